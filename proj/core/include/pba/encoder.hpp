#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pba/tape.hpp"
#include "pba/vocab.hpp"

namespace pba {

enum class EncoderScale { kToy, kPretrainedAdapter };

struct EncoderConfig {
  int max_len = 128;
  int dim = 64;
  int layers = 2;
  int heads = 4;
  EncoderScale scale = EncoderScale::kToy;

  void validate() const;
};

// Pre-norm-free (post-layernorm) transformer encoder over word pieces and the
// four reserved break tokens. Registers its parameters in a ParamStore and
// remembers the indices, so it can be rebuilt around a loaded store.
class TransformerEncoder {
 public:
  // Registers fresh parameters (normal(0, 0.02) init, seeded).
  TransformerEncoder(const EncoderConfig& cfg, int vocab_size,
                     ad::ParamStore& store, std::mt19937_64& rng);

  // Binds to parameters previously registered in the same order.
  TransformerEncoder(const EncoderConfig& cfg, int vocab_size,
                     ad::ParamStore& store);

  // Hidden states, one row per input position (T x dim). `params` must come
  // from store.attach(tape).
  ad::Var encode(ad::Tape& tape, const std::vector<ad::Var>& params,
                 const EncodedSequence& input) const;

  const EncoderConfig& config() const { return cfg_; }
  int vocab_size() const { return vocab_size_; }

 private:
  struct LayerIdx {
    int wq, bq, wk, bk, wv, bv, wo, bo;
    int ln1_g, ln1_b;
    int w1, b1, w2, b2;
    int ln2_g, ln2_b;
  };

  void register_params(ad::ParamStore& store, std::mt19937_64* rng);

  EncoderConfig cfg_;
  int vocab_size_ = 0;
  int tok_emb_ = -1, pos_emb_ = -1, ln_emb_g_ = -1, ln_emb_b_ = -1;
  std::vector<LayerIdx> layers_;
};

// Helpers shared by model builders.
namespace init {
ad::Mat normal(std::mt19937_64& rng, int rows, int cols, double stddev = 0.02);
ad::Mat zeros(int rows, int cols);
ad::Mat ones(int rows, int cols);
}  // namespace init

}  // namespace pba
