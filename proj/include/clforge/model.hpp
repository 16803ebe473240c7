#pragma once

#include <Eigen/Dense>
#include <string>

#include "clforge/data.hpp"
#include "clforge/prng.hpp"

namespace clforge {

enum class Activation { quadratic, relu, gelu };

Activation parse_activation(const std::string& name);
std::string to_string(Activation act);

double act_value(Activation act, double t);
double act_deriv(Activation act, double t);

/// Apply phi / phi' elementwise.
Eigen::MatrixXd act_value(Activation act, const Eigen::MatrixXd& H);
Eigen::MatrixXd act_deriv(Activation act, const Eigen::MatrixXd& H);

/// Two-layer network Phi(w,x) = (1/sqrt(m)) sum_i a_i phi(x.w_i).
/// Only W is trainable; the +/-1 output signs a are fixed at init.
struct NetParams {
  Eigen::MatrixXd W;  // m x d, row i = w_i
  Eigen::VectorXd a;  // +/-1

  int m() const { return static_cast<int>(W.rows()); }
  int d() const { return static_cast<int>(W.cols()); }
};

NetParams init(int m, int d, Stream& stream, bool balanced_a = false);

double forward(const NetParams& params, const Eigen::VectorXd& x, Activation act);

/// dPhi/dw_i = (1/sqrt(m)) a_i phi'(x.w_i) x, stacked over i (m x d).
Eigen::MatrixXd grad_margin(const NetParams& params, const Eigen::VectorXd& x, Activation act);

/// Raw outputs Phi(w, x_i), one per dataset row.
Eigen::VectorXd batch_outputs(const NetParams& params, const Eigen::MatrixXd& X, Activation act);

/// Margins y_i * Phi(w, x_i).
Eigen::VectorXd batch_forward(const NetParams& params, const Dataset& data, Activation act);

}  // namespace clforge
