#include "clforge/metrics.hpp"

#include <array>
#include <string>

#include "clforge/errors.hpp"
#include "clforge/trainer.hpp"

namespace clforge {

EvalResult eval_loss(const NetParams& params, const Dataset& data, Activation act,
                     const LossFn& loss) {
  const Eigen::VectorXd margins = batch_forward(params, data, act);
  double total = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) total += loss.value(margins(i));
  return {total / static_cast<double>(margins.size()), misclassification(margins)};
}

const ForgettingEntry& ForgettingReport::at(int k, int K_prime) const {
  for (const auto& e : entries) {
    if (e.k == k && e.K_prime == K_prime) return e;
  }
  throw MissingSnapshot("no forgetting entry for k=" + std::to_string(k) +
                        ", K'=" + std::to_string(K_prime));
}

ForgettingReport forgetting(const RunRecord& record, const TaskStream& ts, Activation act,
                            const LossFn& loss) {
  const int K = ts.num_tasks();
  if (static_cast<int>(record.snapshots.size()) != K + 1) {
    throw MissingSnapshot("expected " + std::to_string(K + 1) + " boundary snapshots, have " +
                          std::to_string(record.snapshots.size()));
  }

  // evals[s][task][split]: snapshot s on task (0-based), split 0=train 1=test
  std::vector<std::vector<std::array<EvalResult, 2>>> evals(
      record.snapshots.size(),
      std::vector<std::array<EvalResult, 2>>(static_cast<std::size_t>(K)));
  for (int s = 1; s <= K; ++s) {
    const NetParams params = record.snapshot_params(s);
    for (int task = 1; task <= s; ++task) {
      evals[s][task - 1][0] = eval_loss(params, ts.train[static_cast<std::size_t>(task - 1)],
                                        act, loss);
      evals[s][task - 1][1] = eval_loss(params, ts.test[static_cast<std::size_t>(task - 1)],
                                        act, loss);
    }
  }

  ForgettingReport report;
  for (int k = 1; k <= K; ++k) {
    const auto& at_k_train = evals[k][k - 1][0];
    const auto& at_k_test = evals[k][k - 1][1];
    for (int K_prime = k; K_prime <= K; ++K_prime) {
      const auto& at_Kp_train = evals[K_prime][k - 1][0];
      const auto& at_Kp_test = evals[K_prime][k - 1][1];
      ForgettingEntry e;
      e.k = k;
      e.K_prime = K_prime;
      e.f_tr = at_Kp_train.loss - at_k_train.loss;
      e.f_ts = at_Kp_test.loss - at_k_test.loss;
      e.gen_gap = at_Kp_test.loss - at_Kp_train.loss;
      e.pre_gap = at_k_train.loss - at_k_test.loss;
      e.f_tr_err = at_Kp_train.err - at_k_train.err;
      e.f_ts_err = at_Kp_test.err - at_k_test.err;
      report.entries.push_back(e);
    }
  }
  return report;
}

}  // namespace clforge
