#include "clforge/bounds.hpp"

#include <cmath>
#include <string>

#include "clforge/errors.hpp"

namespace clforge {

double thm1_forgetting_bound(const BoundInputs& in, double C1, double C2, double C3) {
  const double root_gap = std::sqrt(in.K - in.k);
  const double log_d = std::log(in.d);
  const double term1 = C1 * in.eta * in.T * root_gap / (in.d * std::sqrt(in.n));
  const double term2 = C2 * in.eta * in.T * root_gap / (in.d * in.d * log_d * log_d);
  const double term3 = C3 * in.eta * in.eta * in.T * in.T * in.K * in.K / std::sqrt(in.m);
  return term1 + term2 + term3;
}

double thm3_gen_gap_bound(const BoundInputs& in) {
  return in.eta * in.T * std::exp(in.eta * in.T * (in.K - in.k + 1.0) / std::sqrt(in.m)) / in.n;
}

double thm4_gen_gap_bound(const BoundInputs& in) {
  const int K = static_cast<int>(in.K);
  const int k = static_cast<int>(in.k);
  if (static_cast<int>(in.S.size()) < K) {
    throw MissingLossTrace("thm4_gen_gap_bound: need cumulative loss S_j for all " +
                           std::to_string(K) + " tasks, have " + std::to_string(in.S.size()));
  }
  double later = 0.0;
  for (int j = k + 1; j <= K; ++j) later += in.S[static_cast<std::size_t>(j - 1)];
  const double S_k = in.S[static_cast<std::size_t>(k - 1)];
  return (in.eta / in.n) * std::exp(in.eta * later / std::sqrt(in.m)) * S_k;
}

ComplexityRecipe complexity_recipe(int d, int K, double c_n, double c_m, double c_T,
                                   double m_cap) {
  const double dd = static_cast<double>(d);
  const double KK = static_cast<double>(K);
  ComplexityRecipe r;
  r.n = c_n * dd * dd * KK * std::log(dd);
  const double m_raw = c_m * std::pow(dd, 8) * std::pow(KK, 4);
  r.m_capped = m_raw > m_cap;
  r.m = r.m_capped ? m_cap : m_raw;
  r.eta_T = c_T * dd * dd;
  return r;
}

}  // namespace clforge
