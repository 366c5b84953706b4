#pragma once

// Internal: shared minibatch training loop (seeded shuffle + Adam).

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "pba/neural.hpp"
#include "pba/tape.hpp"

namespace pba::detail {

// loss_fn(tape, params, item_index) must return a 1x1 loss Var.
template <typename ItemLoss>
void sgd_train(ad::ParamStore& params, std::size_t n_items,
               const TrainConfig& tc, ItemLoss&& loss_fn) {
  std::mt19937_64 rng(tc.seed);
  std::vector<std::size_t> order(n_items);
  std::iota(order.begin(), order.end(), 0);
  ad::AdamConfig adam;
  adam.lr = tc.lr;
  for (int epoch = 0; epoch < tc.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t at = 0; at < n_items;
         at += static_cast<std::size_t>(tc.batch_size)) {
      std::size_t end =
          std::min(n_items, at + static_cast<std::size_t>(tc.batch_size));
      ad::Tape tape;
      auto pv = params.attach(tape);
      ad::Var total = loss_fn(tape, pv, order[at]);
      for (std::size_t i = at + 1; i < end; ++i)
        total = ad::add(total, loss_fn(tape, pv, order[i]));
      total = ad::scale(total, 1.0 / static_cast<double>(end - at));
      tape.backward(total);
      params.adam_step(tape, pv, adam);
    }
  }
}

}  // namespace pba::detail
