#pragma once

#include <vector>

namespace clforge {

/// Inputs to the closed-form bound evaluators. `S[j-1]` is the cumulative
/// per-step training loss of task j, sum_t F_hat_j(w_j^(t)), taken from a run.
struct BoundInputs {
  double d = 1;
  double n = 1;
  double m = 1;
  double T = 1;
  double K = 1;
  double k = 1;
  double eta = 1;
  double delta = 0.05;
  std::vector<double> S;
};

/// C1*eta*T*sqrt(K-k)/(d*sqrt(n)) + C2*eta*T*sqrt(K-k)/(d^2 log^2 d)
///   + C3*eta^2*T^2*K^2/sqrt(m).
double thm1_forgetting_bound(const BoundInputs& in, double C1 = 1.0, double C2 = 1.0,
                             double C3 = 1.0);

/// eta*T*exp(eta*T*(K-k+1)/sqrt(m))/n.
double thm3_gen_gap_bound(const BoundInputs& in);

/// (eta/n) * exp((eta/sqrt(m)) * sum_{j>k} S_j) * S_k.
double thm4_gen_gap_bound(const BoundInputs& in);

struct ComplexityRecipe {
  double n = 0;
  double m = 0;
  double eta_T = 0;
  bool m_capped = false;
};

/// (c_n d^2 K log d, c_m d^8 K^4 capped, c_T d^2) for theorem-regime scaling.
ComplexityRecipe complexity_recipe(int d, int K, double c_n = 1.0, double c_m = 1.0,
                                   double c_T = 1.0, double m_cap = 1e7);

}  // namespace clforge
