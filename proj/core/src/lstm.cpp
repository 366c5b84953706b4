#include "pba/lstm.hpp"

#include "pba/errors.hpp"

namespace pba {

using namespace ad;

namespace init {

Mat uniform(std::mt19937_64& rng, int rows, int cols, double limit) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = dist(rng);
  return m;
}

}  // namespace init

BiLstm::BiLstm(int input_dim, int hidden, ParamStore& store,
               std::mt19937_64* rng)
    : input_dim_(input_dim), hidden_(hidden) {
  if (input_dim < 1 || hidden < 1)
    throw ConfigError("bilstm: input_dim and hidden must be positive");
  auto w = [&](const std::string& name, int r, int c) {
    return rng ? store.add(name, init::uniform(*rng, r, c))
               : store.add(name, Mat::Zero(r, c));
  };
  for (auto* dir : {&fwd_, &bwd_}) {
    std::string p = dir == &fwd_ ? "lstm.fwd." : "lstm.bwd.";
    dir->wx = w(p + "wx", input_dim, 4 * hidden);
    dir->wh = w(p + "wh", hidden, 4 * hidden);
    dir->b = store.add(p + "b", Mat::Zero(1, 4 * hidden));
  }
}

Var BiLstm::run_direction(Tape& tape, const std::vector<Var>& params,
                          Var inputs, const Direction& dir,
                          bool reversed) const {
  const int t_len = static_cast<int>(inputs.value().rows());
  const int h = hidden_;
  Var h_prev = tape.leaf(Mat::Zero(1, h));
  Var c_prev = tape.leaf(Mat::Zero(1, h));
  std::vector<Var> states(static_cast<std::size_t>(t_len),
                          Var{nullptr, -1});
  for (int step = 0; step < t_len; ++step) {
    int t = reversed ? t_len - 1 - step : step;
    Var x_t = rows(inputs, t, 1);
    Var gates = add_rowvec(add(matmul(x_t, params[dir.wx]),
                               matmul(h_prev, params[dir.wh])),
                           params[dir.b]);
    Var gi = sigmoid(cols(gates, 0, h));
    Var gf = sigmoid(cols(gates, h, h));
    Var go = sigmoid(cols(gates, 2 * h, h));
    Var gc = tanh_(cols(gates, 3 * h, h));
    c_prev = add(mul(gf, c_prev), mul(gi, gc));
    h_prev = mul(go, tanh_(c_prev));
    states[static_cast<std::size_t>(t)] = h_prev;
  }
  return concat_rows(states);
}

Var BiLstm::run(Tape& tape, const std::vector<Var>& params,
                Var inputs) const {
  if (inputs.value().cols() != input_dim_)
    throw DataError("bilstm: input width mismatch");
  Var f = run_direction(tape, params, inputs, fwd_, false);
  Var b = run_direction(tape, params, inputs, bwd_, true);
  return concat_cols({f, b});
}

}  // namespace pba
