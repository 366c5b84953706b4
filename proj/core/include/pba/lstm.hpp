#pragma once

#include <random>

#include "pba/tape.hpp"

namespace pba {

// Bidirectional LSTM layer on the autodiff tape. Output is (T x 2*hidden):
// forward states concatenated with backward states per position.
class BiLstm {
 public:
  // rng == nullptr registers a zero layout (for rebinding a loaded store).
  BiLstm(int input_dim, int hidden, ad::ParamStore& store,
         std::mt19937_64* rng);

  ad::Var run(ad::Tape& tape, const std::vector<ad::Var>& params,
              ad::Var inputs) const;

  int hidden() const { return hidden_; }

 private:
  struct Direction {
    int wx, wh, b;
  };

  ad::Var run_direction(ad::Tape& tape, const std::vector<ad::Var>& params,
                        ad::Var inputs, const Direction& dir,
                        bool reversed) const;

  int input_dim_ = 0;
  int hidden_ = 0;
  Direction fwd_{}, bwd_{};
};

namespace init {
ad::Mat uniform(std::mt19937_64& rng, int rows, int cols, double limit = 0.08);
}

}  // namespace pba
