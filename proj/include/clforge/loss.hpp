#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <utility>

#include "clforge/errors.hpp"

namespace clforge {

enum class LossKind { hinge, logistic, linear };

/// Scalar loss on the margin u = y * Phi(w,x).
struct LossFn {
  LossKind kind = LossKind::hinge;

  static LossFn parse(const std::string& name) {
    if (name == "hinge") return {LossKind::hinge};
    if (name == "logistic") return {LossKind::logistic};
    if (name == "linear") return {LossKind::linear};
    throw ConfigError("unknown loss: " + name);
  }

  std::string name() const {
    switch (kind) {
      case LossKind::hinge: return "hinge";
      case LossKind::logistic: return "logistic";
      case LossKind::linear: return "linear";
    }
    return "?";
  }

  /// |f'(u)| <= f(u); holds for logistic, the hypothesis of the improved gap bound.
  bool self_bounded() const { return kind == LossKind::logistic; }

  double value(double u) const {
    switch (kind) {
      case LossKind::hinge: return u < 1.0 ? 1.0 - u : 0.0;
      case LossKind::logistic:
        // stable log(1 + e^{-u})
        return u >= 0.0 ? std::log1p(std::exp(-u)) : -u + std::log1p(std::exp(u));
      case LossKind::linear: return 1.0 - u;
    }
    return 0.0;
  }

  double deriv(double u) const {
    switch (kind) {
      case LossKind::hinge: return u < 1.0 ? -1.0 : 0.0;  // subgradient 0 at u=1
      case LossKind::logistic: return -1.0 / (1.0 + std::exp(u));
      case LossKind::linear: return -1.0;
    }
    return 0.0;
  }
};

/// Mean loss over the batch plus the per-sample derivatives f'(u_i).
inline std::pair<double, Eigen::VectorXd> loss_and_grad(const LossFn& loss,
                                                        const Eigen::VectorXd& margins) {
  const auto n = margins.size();
  Eigen::VectorXd grad(n);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    total += loss.value(margins(i));
    grad(i) = loss.deriv(margins(i));
  }
  return {total / static_cast<double>(n), std::move(grad)};
}

/// Fraction of margins <= 0 (ties count as errors).
inline double misclassification(const Eigen::VectorXd& margins) {
  return static_cast<double>((margins.array() <= 0.0).count()) /
         static_cast<double>(margins.size());
}

}  // namespace clforge
