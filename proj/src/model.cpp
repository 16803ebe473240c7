#include "clforge/model.hpp"

#include <cmath>

#include "clforge/errors.hpp"

namespace clforge {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double gauss_cdf(double t) { return 0.5 * std::erfc(-t * kInvSqrt2); }
double gauss_pdf(double t) { return kInvSqrt2Pi * std::exp(-0.5 * t * t); }

}  // namespace

Activation parse_activation(const std::string& name) {
  if (name == "quadratic") return Activation::quadratic;
  if (name == "relu") return Activation::relu;
  if (name == "gelu") return Activation::gelu;
  throw ConfigError("unknown activation: " + name);
}

std::string to_string(Activation act) {
  switch (act) {
    case Activation::quadratic: return "quadratic";
    case Activation::relu: return "relu";
    case Activation::gelu: return "gelu";
  }
  return "?";
}

double act_value(Activation act, double t) {
  switch (act) {
    case Activation::quadratic: return 0.5 * t * t;
    case Activation::relu: return t > 0.0 ? t : 0.0;
    case Activation::gelu: return t * gauss_cdf(t);
  }
  return 0.0;
}

double act_deriv(Activation act, double t) {
  switch (act) {
    case Activation::quadratic: return t;
    case Activation::relu: return t > 0.0 ? 1.0 : 0.0;  // subgradient 0 at the kink
    case Activation::gelu: return gauss_cdf(t) + t * gauss_pdf(t);
  }
  return 0.0;
}

Eigen::MatrixXd act_value(Activation act, const Eigen::MatrixXd& H) {
  switch (act) {
    case Activation::quadratic: return 0.5 * H.array().square();
    case Activation::relu: return H.array().max(0.0);
    case Activation::gelu:
      return H.unaryExpr([](double t) { return t * gauss_cdf(t); });
  }
  return H;
}

Eigen::MatrixXd act_deriv(Activation act, const Eigen::MatrixXd& H) {
  switch (act) {
    case Activation::quadratic: return H;
    case Activation::relu:
      return (H.array() > 0.0).cast<double>();
    case Activation::gelu:
      return H.unaryExpr([](double t) { return gauss_cdf(t) + t * gauss_pdf(t); });
  }
  return H;
}

NetParams init(int m, int d, Stream& stream, bool balanced_a) {
  NetParams params;
  params.W.resize(m, d);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < d; ++j) params.W(i, j) = stream.gaussian();
  }
  params.a.resize(m);
  if (balanced_a) {
    // alternate signs, then shuffle the assignment with the stream
    for (int i = 0; i < m; ++i) params.a(i) = (i % 2 == 0) ? 1.0 : -1.0;
    for (int i = m - 1; i > 0; --i) {
      const int j = static_cast<int>(stream.next_u64() % static_cast<std::uint64_t>(i + 1));
      std::swap(params.a(i), params.a(j));
    }
  } else {
    for (int i = 0; i < m; ++i) params.a(i) = stream.rademacher();
  }
  return params;
}

double forward(const NetParams& params, const Eigen::VectorXd& x, Activation act) {
  if (x.size() != params.d()) {
    throw DimensionMismatch("forward: x has dim " + std::to_string(x.size()) + ", expected " +
                            std::to_string(params.d()));
  }
  const Eigen::VectorXd h = params.W * x;
  double out = 0.0;
  for (int i = 0; i < params.m(); ++i) out += params.a(i) * act_value(act, h(i));
  return out / std::sqrt(static_cast<double>(params.m()));
}

Eigen::MatrixXd grad_margin(const NetParams& params, const Eigen::VectorXd& x, Activation act) {
  if (x.size() != params.d()) {
    throw DimensionMismatch("grad_margin: x has dim " + std::to_string(x.size()) + ", expected " +
                            std::to_string(params.d()));
  }
  const Eigen::VectorXd h = params.W * x;
  const double inv_sqrt_m = 1.0 / std::sqrt(static_cast<double>(params.m()));
  Eigen::VectorXd scale(params.m());
  for (int i = 0; i < params.m(); ++i) {
    scale(i) = inv_sqrt_m * params.a(i) * act_deriv(act, h(i));
  }
  return scale * x.transpose();
}

Eigen::VectorXd batch_outputs(const NetParams& params, const Eigen::MatrixXd& X, Activation act) {
  if (X.cols() != params.d()) {
    throw DimensionMismatch("batch_outputs: data dim " + std::to_string(X.cols()) +
                            ", expected " + std::to_string(params.d()));
  }
  const Eigen::MatrixXd H = X * params.W.transpose();  // n x m
  return act_value(act, H) * params.a / std::sqrt(static_cast<double>(params.m()));
}

Eigen::VectorXd batch_forward(const NetParams& params, const Dataset& data, Activation act) {
  return data.y.cwiseProduct(batch_outputs(params, data.X, act));
}

}  // namespace clforge
