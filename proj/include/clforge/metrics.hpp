#pragma once

#include <vector>

#include "clforge/data.hpp"
#include "clforge/loss.hpp"
#include "clforge/model.hpp"

namespace clforge {

struct RunRecord;

struct EvalResult {
  double loss = 0.0;
  double err = 0.0;
};

EvalResult eval_loss(const NetParams& params, const Dataset& data, Activation act,
                     const LossFn& loss);

/// Forgetting of task k measured at the snapshot after task K'. Test-side
/// quantities are held-out estimates of the population loss.
struct ForgettingEntry {
  int k;
  int K_prime;
  double f_tr;       // F_hat_k(w_K') - F_hat_k(w_k)
  double f_ts;       // F_k(w_K') - F_k(w_k)
  double gen_gap;    // F_k(w_K') - F_hat_k(w_K')
  double pre_gap;    // F_hat_k(w_k) - F_k(w_k)
  double f_tr_err;   // misclassification variants
  double f_ts_err;
};

struct ForgettingReport {
  std::vector<ForgettingEntry> entries;

  const ForgettingEntry& at(int k, int K_prime) const;
};

ForgettingReport forgetting(const RunRecord& record, const TaskStream& ts, Activation act,
                            const LossFn& loss);

}  // namespace clforge
