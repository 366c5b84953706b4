#include "pba/encoder.hpp"

#include <cmath>

#include "pba/errors.hpp"

namespace pba {

using namespace ad;

namespace init {

Mat normal(std::mt19937_64& rng, int rows, int cols, double stddev) {
  std::normal_distribution<double> dist(0.0, stddev);
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) m(r, c) = dist(rng);
  return m;
}

Mat zeros(int rows, int cols) { return Mat::Zero(rows, cols); }
Mat ones(int rows, int cols) { return Mat::Ones(rows, cols); }

}  // namespace init

void EncoderConfig::validate() const {
  if (max_len < 2) throw ConfigError("encoder: max_len must be >= 2");
  if (dim < 1 || layers < 1 || heads < 1)
    throw ConfigError("encoder: dim/layers/heads must be positive");
  if (dim % heads != 0)
    throw ConfigError("encoder: dim must be divisible by heads");
}

TransformerEncoder::TransformerEncoder(const EncoderConfig& cfg,
                                       int vocab_size, ParamStore& store,
                                       std::mt19937_64& rng)
    : cfg_(cfg), vocab_size_(vocab_size) {
  cfg_.validate();
  register_params(store, &rng);
}

TransformerEncoder::TransformerEncoder(const EncoderConfig& cfg,
                                       int vocab_size, ParamStore& store)
    : cfg_(cfg), vocab_size_(vocab_size) {
  cfg_.validate();
  register_params(store, nullptr);
}

void TransformerEncoder::register_params(ParamStore& store,
                                         std::mt19937_64* rng) {
  const int d = cfg_.dim;
  // Fan-in-scaled init: the 0.02 constant used by large pretrained encoders
  // leaves attention scores indistinguishable from uniform at toy widths.
  auto w = [&](const std::string& name, int r, int c) {
    return rng ? store.add(name, init::normal(*rng, r, c,
                                              1.0 / std::sqrt(double(r))))
               : store.add(name, init::zeros(r, c));
  };
  auto z = [&](const std::string& name, int r, int c) {
    return store.add(name, init::zeros(r, c));
  };
  auto g1 = [&](const std::string& name, int c) {
    return store.add(name, init::ones(1, c));
  };
  tok_emb_ = w("tok_emb", vocab_size_, d);
  pos_emb_ = w("pos_emb", cfg_.max_len, d);
  ln_emb_g_ = g1("ln_emb.g", d);
  ln_emb_b_ = z("ln_emb.b", 1, d);
  for (int l = 0; l < cfg_.layers; ++l) {
    std::string p = "layer" + std::to_string(l) + ".";
    LayerIdx li;
    li.wq = w(p + "wq", d, d);
    li.bq = z(p + "bq", 1, d);
    li.wk = w(p + "wk", d, d);
    li.bk = z(p + "bk", 1, d);
    li.wv = w(p + "wv", d, d);
    li.bv = z(p + "bv", 1, d);
    li.wo = w(p + "wo", d, d);
    li.bo = z(p + "bo", 1, d);
    li.ln1_g = g1(p + "ln1.g", d);
    li.ln1_b = z(p + "ln1.b", 1, d);
    li.w1 = w(p + "ffn.w1", d, 4 * d);
    li.b1 = z(p + "ffn.b1", 1, 4 * d);
    li.w2 = w(p + "ffn.w2", 4 * d, d);
    li.b2 = z(p + "ffn.b2", 1, d);
    li.ln2_g = g1(p + "ln2.g", d);
    li.ln2_b = z(p + "ln2.b", 1, d);
    layers_.push_back(li);
  }
}

Var TransformerEncoder::encode(Tape& tape, const std::vector<Var>& params,
                               const EncodedSequence& input) const {
  if (input.ids.empty()) throw DataError("encode: empty input");
  const int t_len = static_cast<int>(input.ids.size());
  if (t_len > cfg_.max_len)
    throw DataError("encode: input longer than max_len");
  const int d = cfg_.dim;
  const int dh = d / cfg_.heads;

  Var x = add(gather_rows(params[tok_emb_], input.ids),
              rows(params[pos_emb_], 0, t_len));
  x = layernorm_rows(x, params[ln_emb_g_], params[ln_emb_b_]);

  for (const auto& li : layers_) {
    Var q = add_rowvec(matmul(x, params[li.wq]), params[li.bq]);
    Var k = add_rowvec(matmul(x, params[li.wk]), params[li.bk]);
    Var v = add_rowvec(matmul(x, params[li.wv]), params[li.bv]);
    std::vector<Var> heads;
    heads.reserve(cfg_.heads);
    for (int h = 0; h < cfg_.heads; ++h) {
      Var qh = cols(q, h * dh, dh);
      Var kh = cols(k, h * dh, dh);
      Var vh = cols(v, h * dh, dh);
      Var scores = scale(matmul(qh, transpose(kh)), 1.0 / std::sqrt(dh));
      heads.push_back(matmul(softmax_rows(scores), vh));
    }
    Var attn = add_rowvec(matmul(concat_cols(heads), params[li.wo]),
                          params[li.bo]);
    x = layernorm_rows(add(x, attn), params[li.ln1_g], params[li.ln1_b]);
    Var h1 = gelu(add_rowvec(matmul(x, params[li.w1]), params[li.b1]));
    Var h2 = add_rowvec(matmul(h1, params[li.w2]), params[li.b2]);
    x = layernorm_rows(add(x, h2), params[li.ln2_g], params[li.ln2_b]);
  }
  return x;
}

}  // namespace pba
