#include "pba/neural.hpp"

#include <cmath>
#include <iostream>
#include <memory>
#include <sstream>

#include "pba/vocab.hpp"
#include "training.hpp"

namespace pba {

using namespace ad;

namespace {

struct SeqModel {
  Vocab vocab;
  EncoderConfig cfg;
  ParamStore params;
  std::unique_ptr<TransformerEncoder> encoder;
  int head_w = -1, head_b = -1;
  int n_out = 0;
  std::size_t encoder_param_count = 0;

  SeqModel(Vocab v, const EncoderConfig& c, int out, std::uint64_t seed)
      : vocab(std::move(v)), cfg(c), n_out(out) {
    std::mt19937_64 rng(seed ^ 0x7061'7261'6d73ull);
    encoder = std::make_unique<TransformerEncoder>(cfg, vocab.size(), params,
                                                   rng);
    encoder_param_count = params.count();
    head_w = params.add("head.w", init::normal(rng, cfg.dim, n_out));
    head_b = params.add("head.b", init::zeros(1, n_out));
  }

  // Overwrites the encoder block with weights from another store laid out the
  // same way (the head stays as initialized).
  void load_encoder_from(const ParamStore& other) {
    if (other.count() < encoder_param_count)
      throw DataError("init checkpoint has fewer parameters than the encoder");
    for (std::size_t i = 0; i < encoder_param_count; ++i) {
      if (other.value(static_cast<int>(i)).rows() !=
              params.value(static_cast<int>(i)).rows() ||
          other.value(static_cast<int>(i)).cols() !=
              params.value(static_cast<int>(i)).cols())
        throw DataError("init checkpoint shape mismatch at parameter '" +
                        params.name(static_cast<int>(i)) + "'");
      params.value(static_cast<int>(i)) = other.value(static_cast<int>(i));
    }
  }

  Var logits(Tape& tape, const std::vector<Var>& pv,
             const EncodedSequence& in) const {
    Var h = encoder->encode(tape, pv, in);
    return add_rowvec(matmul(h, pv[head_w]), pv[head_b]);
  }

  Checkpoint to_checkpoint(std::string stage) const {
    Checkpoint ckpt;
    ckpt.stage = std::move(stage);
    ckpt.encoder = cfg;
    ckpt.vocab_pieces = vocab.pieces();
    ckpt.hyper["head_out"] = n_out;
    ckpt.params = params;
    return ckpt;
  }
};

// Rebinds a checkpoint for inference: the layout is reconstructed in a scratch
// store to recover indices, the values come from the checkpoint.
struct BoundModel {
  Vocab vocab;
  EncoderConfig cfg;
  const ParamStore& params;
  std::unique_ptr<TransformerEncoder> encoder;
  ParamStore layout;
  int head_w = -1, head_b = -1;

  explicit BoundModel(const Checkpoint& ckpt)
      : vocab(Vocab::from_pieces(ckpt.vocab_pieces)),
        cfg(ckpt.encoder),
        params(ckpt.params) {
    encoder = std::make_unique<TransformerEncoder>(cfg, vocab.size(), layout);
    head_w = static_cast<int>(layout.count());
    head_b = head_w + 1;
    if (params.count() != layout.count() + 2)
      throw DataError("checkpoint parameter count does not match its config");
  }

  Eigen::RowVectorXd row_logits(const EncodedSequence& in, int row) const {
    Tape tape;
    auto pv = params.attach(tape);
    Var h = encoder->encode(tape, pv, in);
    Var lg = add_rowvec(matmul(rows(h, row, 1), pv[head_w]), pv[head_b]);
    return lg.value().row(0);
  }

  Mat all_logits(const EncodedSequence& in) const {
    Tape tape;
    auto pv = params.attach(tape);
    Var h = encoder->encode(tape, pv, in);
    return add_rowvec(matmul(h, pv[head_w]), pv[head_b]).value();
  }
};

std::vector<double> softmax(const Eigen::RowVectorXd& logits) {
  double mx = logits.maxCoeff();
  Eigen::ArrayXd ex = (logits.array() - mx).exp();
  ex /= ex.sum();
  return std::vector<double>(ex.data(), ex.data() + ex.size());
}

std::vector<double> rank_weights(const std::vector<int>& labels, bool enabled) {
  std::vector<double> counts(3, 0.0);
  for (int l : labels) counts[l] += 1.0;
  std::vector<double> w(3, 1.0);
  if (enabled) {
    double total = static_cast<double>(labels.size());
    for (int c = 0; c < 3; ++c)
      w[c] = counts[c] > 0.0 ? total / (3.0 * counts[c]) : 0.0;
  }
  return w;
}

}  // namespace

Checkpoint pretrain_discriminator(const std::vector<CorruptionRecord>& records,
                                  const EncoderConfig& enc,
                                  const TrainConfig& tc) {
  tc.validate();
  if (records.empty()) throw DataError("pretrain: no records");
  bool any_orig = false, any_corr = false;
  for (const auto& r : records) {
    (r.label == CorruptionLabel::kOriginal ? any_orig : any_corr) = true;
  }
  if (!any_orig || !any_corr)
    std::cerr << "warning: pre-training set has a single label; the "
                 "discriminator cannot learn anything useful\n";

  std::vector<std::vector<std::string>> word_lists;
  word_lists.reserve(records.size());
  for (const auto& r : records) word_lists.push_back(r.sequence.words());
  SeqModel model(Vocab::build(word_lists), enc, 2, tc.seed);

  std::vector<EncodedSequence> inputs;
  std::vector<int> targets;
  inputs.reserve(records.size());
  for (const auto& r : records) {
    inputs.push_back(encode_sequence(model.vocab, r.sequence, enc.max_len));
    targets.push_back(r.label == CorruptionLabel::kCorrupted ? 1 : 0);
  }

  detail::sgd_train(model.params, records.size(), tc,
                    [&](Tape& tape, const std::vector<Var>& pv,
                        std::size_t i) {
                      Var h = model.encoder->encode(tape, pv, inputs[i]);
                      Var lg = add_rowvec(
                          matmul(rows(h, 0, 1), pv[model.head_w]),
                          pv[model.head_b]);
                      return softmax_cross_entropy_rows(lg, {targets[i]});
                    });
  return model.to_checkpoint(stage::kPretrained);
}

namespace {

SeqModel build_finetune_model(const std::vector<LabeledUtterance>& data,
                              const Checkpoint* init, const EncoderConfig& enc,
                              const TrainConfig& tc) {
  if (init) {
    SeqModel model(Vocab::from_pieces(init->vocab_pieces), init->encoder, 3,
                   tc.seed);
    model.load_encoder_from(init->params);
    return model;
  }
  std::vector<std::vector<std::string>> word_lists;
  word_lists.reserve(data.size());
  for (const auto& rec : data)
    word_lists.push_back(tokenize(rec.utterance).words());
  return SeqModel(Vocab::build(word_lists), enc, 3, tc.seed);
}

void require_labels(const std::vector<LabeledUtterance>& data, bool overall) {
  std::ostringstream missing;
  int n_missing = 0;
  for (const auto& rec : data) {
    bool has = overall ? rec.overall_rank.has_value()
                       : rec.interval_ranks.has_value();
    if (!has) {
      if (n_missing++) missing << ", ";
      missing << rec.utterance.utterance_id;
    }
  }
  if (n_missing)
    throw DataError(std::string(overall ? "overall" : "interval") +
                    " labels missing for: " + missing.str());
}

}  // namespace

Checkpoint finetune_overall(const std::vector<LabeledUtterance>& data,
                            const Checkpoint* init, const EncoderConfig& enc,
                            const TrainConfig& tc) {
  tc.validate();
  if (data.empty()) throw DataError("finetune_overall: no data");
  require_labels(data, /*overall=*/true);
  SeqModel model = build_finetune_model(data, init, enc, tc);

  std::vector<EncodedSequence> inputs;
  std::vector<int> targets;
  for (const auto& rec : data) {
    inputs.push_back(encode_sequence(model.vocab, tokenize(rec.utterance),
                                     model.cfg.max_len));
    targets.push_back(rec.overall_rank->value() - 1);
  }
  std::vector<double> cw = rank_weights(targets, tc.class_weights);

  detail::sgd_train(
      model.params, data.size(), tc,
      [&](Tape& tape, const std::vector<Var>& pv, std::size_t i) {
        Var h = model.encoder->encode(tape, pv, inputs[i]);
        Var lg = add_rowvec(matmul(rows(h, 0, 1), pv[model.head_w]),
                            pv[model.head_b]);
        return softmax_cross_entropy_rows(lg, {targets[i]}, {cw[targets[i]]});
      });
  return model.to_checkpoint(stage::kFinetunedOverall);
}

Checkpoint finetune_fine_grained(const std::vector<LabeledUtterance>& data,
                                 const Checkpoint* init,
                                 const EncoderConfig& enc,
                                 const TrainConfig& tc) {
  tc.validate();
  if (data.empty()) throw DataError("finetune_fine_grained: no data");
  require_labels(data, /*overall=*/false);
  SeqModel model = build_finetune_model(data, init, enc, tc);

  struct Item {
    EncodedSequence input;
    std::vector<int> targets;   // -1 everywhere except break positions
    std::vector<double> weights;
  };
  std::vector<int> all_labels;
  for (const auto& rec : data)
    for (const auto& r : *rec.interval_ranks)
      all_labels.push_back(r.value() - 1);
  std::vector<double> cw = rank_weights(all_labels, tc.class_weights);

  std::vector<Item> items;
  for (const auto& rec : data) {
    Item item;
    item.input = encode_sequence(model.vocab, tokenize(rec.utterance),
                                 model.cfg.max_len);
    if (item.input.truncated)
      std::cerr << "warning: '" << rec.utterance.utterance_id
                << "' truncated at max_len " << model.cfg.max_len << "\n";
    if (item.input.break_positions.empty()) continue;  // nothing to label
    item.targets.assign(item.input.ids.size(), -1);
    item.weights.assign(item.input.ids.size(), 0.0);
    for (std::size_t b = 0; b < item.input.break_positions.size(); ++b) {
      int label = (*rec.interval_ranks)[b].value() - 1;
      item.targets[item.input.break_positions[b]] = label;
      item.weights[item.input.break_positions[b]] = cw[label];
    }
    items.push_back(std::move(item));
  }
  if (items.empty())
    throw DataError("finetune_fine_grained: no utterance has any break");

  detail::sgd_train(model.params, items.size(), tc,
                    [&](Tape& tape, const std::vector<Var>& pv,
                        std::size_t i) {
                      Var lg = model.logits(tape, pv, items[i].input);
                      return softmax_cross_entropy_rows(
                          lg, items[i].targets, items[i].weights);
                    });
  return model.to_checkpoint(stage::kFinetunedFineGrained);
}

std::pair<Rank, std::array<double, 3>> predict_overall(
    const Checkpoint& ckpt, const AlignedUtterance& utt) {
  if (ckpt.stage != stage::kFinetunedOverall)
    throw DataError("predict_overall: checkpoint stage is '" + ckpt.stage +
                    "', expected '" + stage::kFinetunedOverall + "'");
  BoundModel model(ckpt);
  EncodedSequence in =
      encode_sequence(model.vocab, tokenize(utt), model.cfg.max_len);
  auto probs = softmax(model.row_logits(in, 0));
  int best = 0;
  for (int c = 1; c < 3; ++c)
    if (probs[c] > probs[best]) best = c;
  return {Rank(best + 1), {probs[0], probs[1], probs[2]}};
}

FineGrainedPrediction predict_fine_grained(const Checkpoint& ckpt,
                                           const AlignedUtterance& utt) {
  if (ckpt.stage != stage::kFinetunedFineGrained)
    throw DataError("predict_fine_grained: checkpoint stage is '" +
                    ckpt.stage + "', expected '" +
                    stage::kFinetunedFineGrained + "'");
  BoundModel model(ckpt);
  EncodedSequence in =
      encode_sequence(model.vocab, tokenize(utt), model.cfg.max_len);
  Mat logits = model.all_logits(in);
  FineGrainedPrediction out;
  out.truncated = in.truncated;
  for (std::size_t b = 0; b < in.break_positions.size(); ++b) {
    auto probs = softmax(logits.row(in.break_positions[b]));
    int best = 0;
    for (int c = 1; c < 3; ++c)
      if (probs[c] > probs[best]) best = c;
    out.intervals.push_back(
        {static_cast<int>(b), Rank(best + 1), {probs[0], probs[1], probs[2]}});
  }
  return out;
}

double predict_corruption_probability(const Checkpoint& ckpt,
                                      const TokenSequence& seq) {
  if (ckpt.stage != stage::kPretrained)
    throw DataError("predict_corruption_probability: checkpoint stage is '" +
                    ckpt.stage + "', expected '" + stage::kPretrained + "'");
  BoundModel model(ckpt);
  EncodedSequence in = encode_sequence(model.vocab, seq, model.cfg.max_len);
  auto probs = softmax(model.row_logits(in, 0));
  return probs[1];
}

}  // namespace pba
