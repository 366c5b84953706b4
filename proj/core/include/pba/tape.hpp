#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace pba::ad {

using Mat = Eigen::MatrixXd;

class Tape;

// Handle to a matrix-valued node on a tape.
struct Var {
  Tape* tape = nullptr;
  int id = -1;
  const Mat& value() const;
};

// Reverse-mode autodiff over dense double matrices. One tape per training
// step; parameters are pushed as leaves first, a scalar loss is built on top,
// and backward() accumulates gradients in reverse creation order.
class Tape {
 public:
  Var leaf(Mat value);

  const Mat& value(int id) const { return nodes_[id].value; }
  Mat& grad(int id) { return nodes_[id].grad; }
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(root)/d(root) = 1 (root must be 1x1) and propagates.
  void backward(Var root);

  // Internal: used by the op free functions.
  Var push(Mat value, std::function<void(Tape&, int)> back);

 private:
  struct Node {
    Mat value;
    Mat grad;
    std::function<void(Tape&, int)> back;
  };
  std::vector<Node> nodes_;
};

// --- elementwise / linear algebra ---
Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);  // hadamard
Var scale(Var a, double c);
Var matmul(Var a, Var b);
Var transpose(Var a);
Var add_rowvec(Var a, Var row);  // row is 1 x C, broadcast over rows
Var add_colvec(Var a, Var col);  // col is R x 1, broadcast over cols

// --- shape ---
Var rows(Var a, int start, int n);
Var cols(Var a, int start, int n);
Var concat_rows(const std::vector<Var>& parts);
Var concat_cols(const std::vector<Var>& parts);
Var entry(Var a, int i, int j);  // 1x1 view of a single element
Var gather_rows(Var table, const std::vector<int>& indices);

// --- nonlinearities ---
Var relu(Var a);
Var gelu(Var a);  // exact erf form
Var tanh_(Var a);
Var sigmoid(Var a);

// --- reductions / normalization ---
Var sum(Var a);   // 1x1
Var mean(Var a);  // 1x1
Var softmax_rows(Var a);
Var layernorm_rows(Var x, Var gain, Var bias, double eps = 1e-5);
Var logsumexp_colwise(Var a);  // R x C -> 1 x C

// Mean cross-entropy of row-wise softmax against integer targets; rows with
// target -1 are excluded from the loss (and from the mean's denominator).
Var softmax_cross_entropy_rows(Var logits, const std::vector<int>& targets);

// Same, with a per-row weight (e.g. inverse class frequency); the loss is
// sum(w_r * ce_r) / sum(w_r) over labeled rows.
Var softmax_cross_entropy_rows(Var logits, const std::vector<int>& targets,
                               const std::vector<double>& weights);

// --- parameters ---

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Named parameter matrices with Adam state. Parameters attach to a tape as
// the first leaves of each step, in registration order, which keeps seeded
// training bit-reproducible.
class ParamStore {
 public:
  int add(const std::string& name, Mat init);

  std::size_t count() const { return values_.size(); }
  Mat& value(int idx) { return values_[idx]; }
  const Mat& value(int idx) const { return values_[idx]; }
  const std::string& name(int idx) const { return names_[idx]; }

  // Pushes every parameter onto the tape; result[i] is parameter i.
  std::vector<Var> attach(Tape& tape) const;

  // Applies one Adam update from the gradients accumulated on `tape` for the
  // leaves returned by attach().
  void adam_step(Tape& tape, const std::vector<Var>& leaves,
                 const AdamConfig& cfg);

  void save(std::ostream& out) const;
  void load(std::istream& in);

 private:
  std::vector<std::string> names_;
  std::vector<Mat> values_;
  std::vector<Mat> m_, v_;
  std::int64_t step_ = 0;
};

}  // namespace pba::ad
