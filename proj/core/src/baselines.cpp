#include "pba/baselines.hpp"

#include <cmath>
#include <iostream>
#include <memory>

#include "pba/crf.hpp"
#include "pba/lstm.hpp"
#include "pba/vocab.hpp"
#include "training.hpp"

namespace pba {

using namespace ad;

namespace {

struct LstmModel {
  Vocab vocab;
  BilstmConfig cfg;
  ParamStore params;
  int emb = -1;
  std::unique_ptr<BiLstm> lstm;
  // overall head, or CRF emission projection
  int proj_w = -1, proj_b = -1;
  // CRF only
  int trans = -1, start = -1, stop = -1;

  LstmModel(Vocab v, const BilstmConfig& c, bool with_crf, std::uint64_t seed,
            bool fresh)
      : vocab(std::move(v)), cfg(c) {
    cfg.validate();
    std::mt19937_64 rng(seed ^ 0x6c73'746dull);
    std::mt19937_64* rp = fresh ? &rng : nullptr;
    emb = fresh ? params.add("emb", init::uniform(rng, vocab.size(),
                                                  cfg.embed_dim))
                : params.add("emb", Mat::Zero(vocab.size(), cfg.embed_dim));
    lstm = std::make_unique<BiLstm>(cfg.embed_dim, cfg.hidden, params, rp);
    int h2 = 2 * cfg.hidden;
    proj_w = fresh ? params.add("proj.w", init::uniform(rng, h2, 3))
                   : params.add("proj.w", Mat::Zero(h2, 3));
    proj_b = params.add("proj.b", Mat::Zero(1, 3));
    if (with_crf) {
      // zero-init transitions: the first iteration is emission-dominated
      trans = params.add("crf.trans", Mat::Zero(3, 3));
      start = params.add("crf.start", Mat::Zero(1, 3));
      stop = params.add("crf.stop", Mat::Zero(1, 3));
    }
  }

  Var states(Tape& tape, const std::vector<Var>& pv,
             const EncodedSequence& in) const {
    Var x = gather_rows(pv[emb], in.ids);
    return lstm->run(tape, pv, x);
  }

  Checkpoint to_checkpoint(std::string stage_tag) const {
    Checkpoint ckpt;
    ckpt.stage = std::move(stage_tag);
    ckpt.encoder.max_len = cfg.max_len;  // truncation bound
    ckpt.vocab_pieces = vocab.pieces();
    ckpt.hyper["embed_dim"] = cfg.embed_dim;
    ckpt.hyper["hidden"] = cfg.hidden;
    ckpt.hyper["max_len"] = cfg.max_len;
    ckpt.params = params;
    return ckpt;
  }
};

LstmModel bind_lstm(const Checkpoint& ckpt, bool with_crf) {
  BilstmConfig cfg;
  cfg.embed_dim = static_cast<int>(ckpt.hyper.at("embed_dim"));
  cfg.hidden = static_cast<int>(ckpt.hyper.at("hidden"));
  cfg.max_len = static_cast<int>(ckpt.hyper.at("max_len"));
  LstmModel model(Vocab::from_pieces(ckpt.vocab_pieces), cfg, with_crf,
                  /*seed=*/0, /*fresh=*/false);
  if (model.params.count() != ckpt.params.count())
    throw DataError("bilstm checkpoint parameter count mismatch");
  for (std::size_t i = 0; i < ckpt.params.count(); ++i)
    model.params.value(static_cast<int>(i)) =
        ckpt.params.value(static_cast<int>(i));
  return model;
}

Vocab vocab_from_data(const std::vector<LabeledUtterance>& data) {
  std::vector<std::vector<std::string>> word_lists;
  word_lists.reserve(data.size());
  for (const auto& rec : data)
    word_lists.push_back(tokenize(rec.utterance).words());
  return Vocab::build(word_lists);
}

std::vector<double> softmax3(const Eigen::RowVectorXd& logits) {
  double mx = logits.maxCoeff();
  Eigen::ArrayXd ex = (logits.array() - mx).exp();
  ex /= ex.sum();
  return {ex(0), ex(1), ex(2)};
}

}  // namespace

Checkpoint train_bilstm_overall(const std::vector<LabeledUtterance>& data,
                                const BilstmConfig& cfg,
                                const TrainConfig& tc) {
  tc.validate();
  if (data.empty()) throw DataError("bilstm_overall: no data");
  for (const auto& rec : data)
    if (!rec.overall_rank)
      throw DataError("bilstm_overall: missing overall_rank for '" +
                      rec.utterance.utterance_id + "'");
  LstmModel model(vocab_from_data(data), cfg, /*with_crf=*/false, tc.seed,
                  /*fresh=*/true);

  std::vector<EncodedSequence> inputs;
  std::vector<int> targets;
  for (const auto& rec : data) {
    inputs.push_back(
        encode_sequence(model.vocab, tokenize(rec.utterance), cfg.max_len));
    targets.push_back(rec.overall_rank->value() - 1);
  }

  detail::sgd_train(
      model.params, data.size(), tc,
      [&](Tape& tape, const std::vector<Var>& pv, std::size_t i) {
        Var s = model.states(tape, pv, inputs[i]);
        int t_len = static_cast<int>(inputs[i].ids.size());
        Var pool = tape.leaf(Mat::Constant(1, t_len, 1.0 / t_len));
        Var lg = add_rowvec(matmul(matmul(pool, s), pv[model.proj_w]),
                            pv[model.proj_b]);
        return softmax_cross_entropy_rows(lg, {targets[i]});
      });
  return model.to_checkpoint(stage::kBilstmOverall);
}

Checkpoint train_bilstm_crf(const std::vector<LabeledUtterance>& data,
                            const BilstmConfig& cfg, const TrainConfig& tc) {
  tc.validate();
  if (data.empty()) throw DataError("bilstm_crf: no data");
  for (const auto& rec : data)
    if (!rec.interval_ranks)
      throw DataError("bilstm_crf: missing interval_ranks for '" +
                      rec.utterance.utterance_id + "'");
  LstmModel model(vocab_from_data(data), cfg, /*with_crf=*/true, tc.seed,
                  /*fresh=*/true);

  struct Item {
    EncodedSequence input;
    std::vector<int> gold;  // one label per surviving break
  };
  std::vector<Item> items;
  for (const auto& rec : data) {
    Item item;
    item.input =
        encode_sequence(model.vocab, tokenize(rec.utterance), cfg.max_len);
    if (item.input.break_positions.empty()) continue;
    for (std::size_t b = 0; b < item.input.break_positions.size(); ++b)
      item.gold.push_back((*rec.interval_ranks)[b].value() - 1);
    items.push_back(std::move(item));
  }
  if (items.empty()) throw DataError("bilstm_crf: no utterance has any break");

  detail::sgd_train(
      model.params, items.size(), tc,
      [&](Tape& tape, const std::vector<Var>& pv, std::size_t i) {
        Var s = model.states(tape, pv, items[i].input);
        Var at_breaks = gather_rows(s, items[i].input.break_positions);
        Var emissions =
            add_rowvec(matmul(at_breaks, pv[model.proj_w]), pv[model.proj_b]);
        return crf_nll(emissions, pv[model.trans], pv[model.start],
                       pv[model.stop], items[i].gold);
      });
  return model.to_checkpoint(stage::kBilstmCrf);
}

std::pair<Rank, std::array<double, 3>> predict_bilstm_overall(
    const Checkpoint& ckpt, const AlignedUtterance& utt) {
  if (ckpt.stage != stage::kBilstmOverall)
    throw DataError("predict_bilstm_overall: checkpoint stage is '" +
                    ckpt.stage + "'");
  LstmModel model = bind_lstm(ckpt, /*with_crf=*/false);
  EncodedSequence in =
      encode_sequence(model.vocab, tokenize(utt), model.cfg.max_len);
  Tape tape;
  auto pv = model.params.attach(tape);
  Var s = model.states(tape, pv, in);
  int t_len = static_cast<int>(in.ids.size());
  Var pool = tape.leaf(Mat::Constant(1, t_len, 1.0 / t_len));
  Var lg = add_rowvec(matmul(matmul(pool, s), pv[model.proj_w]),
                      pv[model.proj_b]);
  auto probs = softmax3(lg.value().row(0));
  int best = 0;
  for (int c = 1; c < 3; ++c)
    if (probs[c] > probs[best]) best = c;
  return {Rank(best + 1), {probs[0], probs[1], probs[2]}};
}

FineGrainedPrediction predict_bilstm_crf(const Checkpoint& ckpt,
                                         const AlignedUtterance& utt) {
  if (ckpt.stage != stage::kBilstmCrf)
    throw DataError("predict_bilstm_crf: checkpoint stage is '" + ckpt.stage +
                    "'");
  LstmModel model = bind_lstm(ckpt, /*with_crf=*/true);
  EncodedSequence in =
      encode_sequence(model.vocab, tokenize(utt), model.cfg.max_len);
  FineGrainedPrediction out;
  out.truncated = in.truncated;
  if (in.break_positions.empty()) return out;

  Tape tape;
  auto pv = model.params.attach(tape);
  Var s = model.states(tape, pv, in);
  Var at_breaks = gather_rows(s, in.break_positions);
  Mat emissions =
      add_rowvec(matmul(at_breaks, pv[model.proj_w]), pv[model.proj_b])
          .value();
  CrfParams crf{model.params.value(model.trans),
                model.params.value(model.start),
                model.params.value(model.stop)};
  auto [path, score] = crf_viterbi(emissions, crf);

  // Forward-backward marginals for the per-position probabilities.
  const Eigen::Index t_len = emissions.rows();
  auto lse = [](const Eigen::VectorXd& v) {
    double mx = v.maxCoeff();
    return mx + std::log((v.array() - mx).exp().sum());
  };
  Mat alpha(t_len, 3), beta(t_len, 3);
  alpha.row(0) = emissions.row(0) + crf.start.row(0);
  for (Eigen::Index t = 1; t < t_len; ++t)
    for (int j = 0; j < 3; ++j)
      alpha(t, j) = lse(alpha.row(t - 1).transpose() +
                        crf.transitions.col(j)) +
                    emissions(t, j);
  beta.row(t_len - 1) = crf.stop.row(0);
  for (Eigen::Index t = t_len - 2; t >= 0; --t)
    for (int i = 0; i < 3; ++i)
      beta(t, i) = lse((crf.transitions.row(i).transpose().array() +
                        emissions.row(t + 1).transpose().array() +
                        beta.row(t + 1).transpose().array())
                           .matrix());
  double log_z =
      lse(alpha.row(t_len - 1).transpose() + crf.stop.row(0).transpose());

  for (Eigen::Index t = 0; t < t_len; ++t) {
    std::array<double, 3> probs{};
    for (int j = 0; j < 3; ++j)
      probs[static_cast<std::size_t>(j)] =
          std::exp(alpha(t, j) + beta(t, j) - log_z);
    out.intervals.push_back({static_cast<int>(t),
                             Rank(path[static_cast<std::size_t>(t)] + 1),
                             probs});
  }
  return out;
}

Rank rank_from_similarity(double similarity) {
  if (similarity < 0.3) return poor();
  if (similarity < 0.7) return fair();
  return great();
}

std::pair<double, Rank> against_tts_score(const TokenSequence& test,
                                          const ReferenceBreaks& ref) {
  if (test.word_count() != ref.sequence.word_count())
    throw DataError("against_tts: word counts differ (" +
                    std::to_string(test.word_count()) + " vs " +
                    std::to_string(ref.sequence.word_count()) + ")");
  for (std::size_t i = 0; i < test.word_count(); ++i)
    if (test.words()[i] != ref.sequence.words()[i])
      throw DataError("against_tts: word mismatch at index " +
                      std::to_string(i) + ": '" + test.words()[i] + "' vs '" +
                      ref.sequence.words()[i] + "'");
  if (test.break_count() == 0) return {1.0, great()};

  auto binarize = [](BreakToken b) {
    return static_cast<int>(b) >= 2;  // br0/br1 no break, br2/br3 break
  };
  std::size_t agree = 0;
  for (std::size_t i = 0; i < test.break_count(); ++i)
    if (binarize(test.breaks()[i]) == binarize(ref.sequence.breaks()[i]))
      ++agree;
  double similarity =
      static_cast<double>(agree) / static_cast<double>(test.break_count());
  return {similarity, rank_from_similarity(similarity)};
}

}  // namespace pba
