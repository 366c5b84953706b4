#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "pba/corpus.hpp"
#include "pba/corruption.hpp"
#include "pba/crf.hpp"
#include "pba/encoder.hpp"
#include "pba/tokenizer.hpp"
#include "pba/vocab.hpp"

namespace {

using namespace pba;

std::vector<LabeledUtterance> bench_corpus(std::size_t n) {
  return synthesize_corpus(17, n, builtin_vocab(), GapProfile::kMixed);
}

void BM_Tokenize(benchmark::State& state) {
  auto corpus = bench_corpus(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    for (const auto& rec : corpus)
      benchmark::DoNotOptimize(tokenize(rec.utterance));
  }
  state.SetItemsProcessed(state.iterations() * corpus.size());
}
BENCHMARK(BM_Tokenize)->Arg(64)->Arg(512);

void BM_Corrupt(benchmark::State& state) {
  auto corpus = bench_corpus(256);
  std::vector<TokenSequence> seqs;
  for (const auto& rec : corpus) seqs.push_back(tokenize(rec.utterance));
  std::mt19937_64 rng(23);
  for (auto _ : state) {
    for (const auto& seq : seqs)
      benchmark::DoNotOptimize(corrupt(seq, 0.15, rng));
  }
  state.SetItemsProcessed(state.iterations() * seqs.size());
}
BENCHMARK(BM_Corrupt);

void BM_CrfForward(benchmark::State& state) {
  const int t_len = static_cast<int>(state.range(0));
  std::mt19937_64 rng(29);
  std::normal_distribution<double> dist(0.0, 1.0);
  ad::Mat emissions(t_len, 3);
  CrfParams crf{ad::Mat(3, 3), ad::Mat(1, 3), ad::Mat(1, 3)};
  for (auto* m : {&emissions, &crf.transitions, &crf.start, &crf.stop})
    for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = dist(rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(crf_log_partition(emissions, crf));
}
BENCHMARK(BM_CrfForward)->Arg(8)->Arg(32)->Arg(128);

void BM_EncoderForward(benchmark::State& state) {
  EncoderConfig cfg;
  cfg.max_len = 64;
  cfg.dim = static_cast<int>(state.range(0));
  cfg.layers = 2;
  cfg.heads = 4;
  Vocab vocab = Vocab::build({builtin_vocab()});
  ad::ParamStore store;
  std::mt19937_64 rng(31);
  TransformerEncoder enc(cfg, vocab.size(), store, rng);

  auto corpus = bench_corpus(1);
  EncodedSequence input =
      encode_sequence(vocab, tokenize(corpus[0].utterance), cfg.max_len);
  for (auto _ : state) {
    ad::Tape tape;
    auto params = store.attach(tape);
    benchmark::DoNotOptimize(enc.encode(tape, params, input));
  }
}
BENCHMARK(BM_EncoderForward)->Arg(16)->Arg(32)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
