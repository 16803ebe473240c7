#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <vector>

#include "clforge/bounds.hpp"
#include "clforge/data.hpp"
#include "clforge/errors.hpp"
#include "clforge/harness.hpp"
#include "clforge/linearized.hpp"
#include "clforge/loss.hpp"
#include "clforge/metrics.hpp"
#include "clforge/model.hpp"
#include "clforge/prng.hpp"
#include "clforge/trainer.hpp"

namespace clforge {

namespace {

struct Checker {
  std::ostream& os;
  int failures = 0;

  void check(const std::string& name, bool ok, const std::string& details) {
    os << (ok ? "[ ok ] " : "[FAIL] ") << name << " — " << details << "\n";
    if (!ok) ++failures;
  }
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

TaskStream small_stream(int d, int K, int n_train, int n_test, double sigma_coeff,
                        std::uint64_t seed) {
  auto stream = derive(Seed{seed}, "data");
  return build_stream(d, K, n_train, n_test, sigma_coeff / std::sqrt(double(d)), stream);
}

void check_prng(Checker& c) {
  auto g = derive(Seed{7}, "verify/gauss");
  const int N = 200000;
  double sum = 0, sumsq = 0;
  for (int i = 0; i < N; ++i) {
    const double v = g.gaussian();
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / N, var = sumsq / N - mean * mean;
  c.check("prng gaussian moments", std::abs(mean) < 0.012 && std::abs(var - 1.0) < 0.03,
          "mean=" + num(mean) + " var=" + num(var) + " over " + std::to_string(N) + " draws");

  auto r = derive(Seed{7}, "verify/rad");
  double rs = 0;
  for (int i = 0; i < N; ++i) rs += r.rademacher();
  c.check("prng rademacher balance", std::abs(rs / N) < 0.012, "mean=" + num(rs / N));

  auto a = derive(Seed{7}, "a");
  auto b = derive(Seed{7}, "b");
  auto a2 = derive(Seed{7}, "a");
  bool distinct = true, reproducible = true;
  for (int i = 0; i < 16; ++i) {
    const auto va = a.next_u64();
    distinct = distinct && (va != b.next_u64());
    reproducible = reproducible && (va == a2.next_u64());
  }
  c.check("prng stream labels", distinct && reproducible,
          std::string("distinct=") + (distinct ? "yes" : "no") +
              " reproducible=" + (reproducible ? "yes" : "no"));
}

void check_model(Checker& c) {
  auto stream = derive(Seed{11}, "init");
  double worst = 0;
  for (Activation act : {Activation::quadratic, Activation::relu, Activation::gelu}) {
    NetParams p = init(16, 6, stream);
    auto xs = derive(Seed{11}, std::string("x/") + to_string(act));
    for (int rep = 0; rep < 20; ++rep) {
      Eigen::VectorXd x(6);
      for (int j = 0; j < 6; ++j) x(j) = xs.gaussian();
      const Eigen::MatrixXd G = grad_margin(p, x, act);
      const double h = 1e-5;
      for (int probe = 0; probe < 4; ++probe) {
        const int i = static_cast<int>(xs.next_u64() % 16);
        const int j = static_cast<int>(xs.next_u64() % 6);
        // central differences are invalid within h of the relu kink
        if (act == Activation::relu && std::abs(x.dot(p.W.row(i))) < 1e-3) continue;
        NetParams pp = p, pm = p;
        pp.W(i, j) += h;
        pm.W(i, j) -= h;
        const double fd = (forward(pp, x, act) - forward(pm, x, act)) / (2 * h);
        // floor keeps FD cancellation noise (~1e-11 absolute) out of the
        // relative error when the true gradient is itself ~1e-7
        const double denom = std::max({std::abs(fd), std::abs(G(i, j)), 1e-6});
        worst = std::max(worst, std::abs(fd - G(i, j)) / denom);
      }
    }
  }
  c.check("model gradient vs central differences", worst <= 2e-5,
          "max rel err=" + num(worst) + " across 3 activations, 240 probes");

  NetParams p = init(32, 5, stream);
  auto xs = derive(Seed{12}, "homog");
  Eigen::VectorXd x(5);
  for (int j = 0; j < 5; ++j) x(j) = xs.gaussian();
  const double cquad = forward(p, Eigen::VectorXd(2.0 * x), Activation::quadratic) -
                       4.0 * forward(p, x, Activation::quadratic);
  const double crelu = forward(p, Eigen::VectorXd(3.0 * x), Activation::relu) -
                       3.0 * forward(p, x, Activation::relu);
  c.check("activation homogeneity", std::abs(cquad) < 1e-12 && std::abs(crelu) < 1e-12,
          "quadratic deg-2 resid=" + num(cquad) + " relu deg-1 resid=" + num(crelu));
}

void check_loss(Checker& c) {
  const LossFn hinge{LossKind::hinge}, lin{LossKind::linear}, logi{LossKind::logistic};
  auto s = derive(Seed{13}, "loss");
  double worst = 0;
  bool self_bounded = true;
  for (int i = 0; i < 200; ++i) {
    const double u = 3.0 * s.gaussian();
    if (u < 1.0) {
      worst = std::max(worst, std::abs(hinge.value(u) - lin.value(u)));
      worst = std::max(worst, std::abs(hinge.deriv(u) - lin.deriv(u)));
    }
    self_bounded = self_bounded && std::abs(logi.deriv(u)) <= logi.value(u) + 1e-15;
  }
  c.check("hinge equals linear below margin 1", worst == 0.0, "max diff=" + num(worst));
  c.check("logistic self-bounded |f'|<=f", self_bounded, "200 random margins");
}

void check_data(Checker& c) {
  const auto [mu1p, mu1m] = standard_means(12, 1);
  const auto [mu2p, mu2m] = standard_means(12, 2);
  const double within = mu1p.dot(mu1m);
  const double across = std::abs(mu1p.dot(mu2p)) + std::abs(mu1p.dot(mu2m)) +
                        std::abs(mu1m.dot(mu2p)) + std::abs(mu1m.dot(mu2m));
  const double norm_err = std::abs(mu1p.norm() - std::sqrt(2.0 / 12.0));
  c.check("xor means orthogonal across/within tasks",
          std::abs(within) < 1e-15 && across < 1e-15 && norm_err < 1e-15,
          "mu+.mu-=" + num(within) + " cross=" + num(across) + " |mu|-sqrt(2/d)=" + num(norm_err));

  // noiseless four-center witness: every linear classifier errs on >= 1/4 of
  // {(mu+,+),(-mu+,+),(mu-,-),(-mu-,-)}
  const TaskSpec spec = make_task_spec(12, 1, 0.0);
  bool witness = true;
  auto s = derive(Seed{17}, "sep");
  for (int rep = 0; rep < 50; ++rep) {
    Eigen::VectorXd w(12);
    for (int j = 0; j < 12; ++j) w(j) = s.gaussian();
    int errs = 0;
    errs += (w.dot(spec.mu_plus) <= 0);
    errs += (-w.dot(spec.mu_plus) <= 0);
    errs += (-w.dot(spec.mu_minus) <= 0);
    errs += (w.dot(spec.mu_minus) <= 0);
    witness = witness && errs >= 1;
  }
  c.check("xor clusters not linearly separable", witness,
          "every random hyperplane errs on >=1 of the 4 centers");

  auto ds = derive(Seed{19}, "data");
  const Dataset data = sample_xor(make_task_spec(10, 1, 0.02), 4000, ds);
  const double label_mean = data.y.mean();
  c.check("xor label balance", std::abs(label_mean) < 0.08, "mean label=" + num(label_mean));
}

void check_mnist(Checker& c) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "clforge_verify_idx";
  fs::create_directories(dir);
  const auto img = (dir / "img").string(), lab = (dir / "lab").string();
  {
    std::ofstream fi(img, std::ios::binary), fl(lab, std::ios::binary);
    const unsigned char ih[] = {0, 0, 8, 3, 0, 0, 0, 4, 0, 0, 0, 2, 0, 0, 0, 2};
    const unsigned char lh[] = {0, 0, 8, 1, 0, 0, 0, 4};
    fi.write(reinterpret_cast<const char*>(ih), sizeof(ih));
    fl.write(reinterpret_cast<const char*>(lh), sizeof(lh));
    const unsigned char pixels[] = {255, 0, 0, 0, 0, 255, 0, 0, 0, 0, 255, 0, 0, 0, 0, 255};
    const unsigned char labels[] = {3, 5, 3, 5};
    fi.write(reinterpret_cast<const char*>(pixels), sizeof(pixels));
    fl.write(reinterpret_cast<const char*>(labels), sizeof(labels));
  }
  const Dataset d = load_mnist_pair(img, lab, 3, 5, 4, false);
  const bool ok = d.n() == 4 && d.d() == 4 && d.y(0) == 1.0 && d.y(1) == -1.0 &&
                  std::abs(d.X(0, 0) - 1.0) < 1e-12 && d.X(0, 1) == 0.0;
  c.check("mnist idx roundtrip", ok, "4 samples, labels and pixel scaling as written");

  bool bad_magic = false, truncated = false;
  try {
    load_mnist_pair(lab, lab, 3, 5, 2, false);
  } catch (const BadMagic&) {
    bad_magic = true;
  }
  try {
    load_mnist_pair(img, lab, 3, 5, 9, false);
  } catch (const NotEnoughSamples&) {
    truncated = true;
  }
  c.check("mnist error paths", bad_magic && truncated,
          "BadMagic on wrong magic, NotEnoughSamples on over-request");
}

void check_trainer(Checker& c) {
  const TaskStream ts = small_stream(10, 2, 200, 300, 0.1, 21);
  TrainConfig cfg;
  cfg.eta = 1.0;
  cfg.T = 30;
  ModelConfig model;
  model.m = 64;
  const LossFn loss{LossKind::logistic};

  const RunRecord r1 = train_stream(ts, cfg, model, loss, Seed{5});
  const RunRecord r2 = train_stream(ts, cfg, model, loss, Seed{5});
  const RunRecord r3 = train_stream(ts, cfg, model, loss, Seed{6});
  const double same = (r1.snapshots.back() - r2.snapshots.back()).cwiseAbs().maxCoeff();
  const double diff = (r1.snapshots.back() - r3.snapshots.back()).cwiseAbs().maxCoeff();
  c.check("trainer seed determinism", same == 0.0 && diff > 0.0,
          "same-seed diff=" + num(same) + " cross-seed diff=" + num(diff));
  c.check("trainer snapshot layout",
          r1.snapshots.size() == 3 && r1.loss_trace.size() == 2 &&
              r1.loss_trace[0].size() == 30,
          "K+1 snapshots, K traces of length T");

  TrainConfig reg = cfg;
  reg.lambda = 0.0;
  const RunRecord r4 = train_stream(ts, reg, model, loss, Seed{5});
  const double lam0 = (r1.snapshots.back() - r4.snapshots.back()).cwiseAbs().maxCoeff();
  c.check("lambda=0 equals unregularized", lam0 == 0.0, "max diff=" + num(lam0));

  // forgetting decomposition is an exact identity
  const ForgettingReport rep = forgetting(r1, ts, model.act, loss);
  double worst = 0;
  for (const auto& e : rep.entries) {
    worst = std::max(worst, std::abs(e.f_ts - (e.f_tr + e.gen_gap + e.pre_gap)));
  }
  c.check("forgetting decomposition identity", worst <= 1e-12, "max residual=" + num(worst));
}

void check_linearized(Checker& c) {
  const TaskStream ts = small_stream(8, 2, 150, 150, 0.1, 23);
  TrainConfig cfg;
  cfg.eta = 0.05;
  cfg.T = 80;
  ModelConfig model;
  model.m = 64;
  const LossFn lin{LossKind::linear};
  const LinearizedRun closed = train_linearized(ts, cfg, model, lin, Seed{9}, true);
  const LinearizedRun iter = train_linearized(ts, cfg, model, lin, Seed{9}, false);
  const double diff = (closed.net.delta - iter.net.delta).cwiseAbs().maxCoeff();
  c.check("closed-form equals iterated linearized", diff <= 1e-10, "max diff=" + num(diff));

  double worst = 0, worst_approx = 0;
  const double eta = 0.1;
  for (double lambda : {0.01, 0.1, 1.0}) {
    double rec = 0.0;
    for (long t = 1; t <= 500; ++t) {
      rec = (1.0 - eta * lambda) * rec + 1.0;
      worst = std::max(worst, std::abs(rec - alpha_t(eta, lambda, t)) / rec);
    }
    const long t = 500;
    worst_approx = std::max(worst_approx, std::abs(alpha_t_approx(eta, lambda, t) /
                                                       alpha_t(eta, lambda, t) -
                                                   1.0));
  }
  c.check("alpha_t recursion vs closed form", worst <= 1e-12, "max rel err=" + num(worst));
  c.check("alpha_t exponential approximation", worst_approx <= 0.05,
          "rel err at t=500: " + num(worst_approx));

  const double eq = regularized_equivalence_check(ts, 0.1, 50, 0.5, Seed{9});
  c.check("regularization equals alpha-rescaled step", eq <= 1e-10, "max diff=" + num(eq));

  // infinite-width prediction is invariant to sample order
  std::vector<SignalMatrix> sigs;
  for (const auto& d : ts.train) sigs.push_back(signal_matrix(d));
  Dataset rev = ts.train[0];
  rev.X = ts.train[0].X.colwise().reverse().eval();
  rev.y = ts.train[0].y.reverse().eval();
  std::vector<SignalMatrix> sigs2 = sigs;
  sigs2[0] = signal_matrix(rev);
  auto xs = derive(Seed{31}, "probe");
  Eigen::VectorXd x(8);
  for (int j = 0; j < 8; ++j) x(j) = xs.gaussian();
  const double p1 = infinite_width_prediction(sigs, 2.0, 100, x);
  const double p2 = infinite_width_prediction(sigs2, 2.0, 100, x);
  c.check("infinite-width prediction order-invariant", std::abs(p1 - p2) <= 1e-10 * std::abs(p1),
          "p=" + num(p1) + " reordered=" + num(p2));
}

void check_ustat_margin(Checker& c) {
  // E[U] = y1/(2 d^2) needs |mu| = 1/sqrt(d)
  const int d = 30, n = 300, draws = 400;
  TaskSpec spec;
  spec.d = d;
  spec.mu_plus = Eigen::VectorXd::Zero(d);
  spec.mu_minus = Eigen::VectorXd::Zero(d);
  const double c2 = 1.0 / std::sqrt(2.0 * d);
  spec.mu_plus(0) = c2;
  spec.mu_plus(1) = c2;
  spec.mu_minus(0) = c2;
  spec.mu_minus(1) = -c2;
  spec.sigma = 0.1 / std::sqrt(double(d));
  auto s = derive(Seed{37}, "ustat");
  double sum = 0, sumsq = 0;
  for (int r = 0; r < draws; ++r) {
    const Dataset data = sample_xor(spec, n, s);
    Eigen::VectorXd x1 = data.X.row(0).transpose();
    const double u = data.y(0) * u_statistic(data, x1, data.y(0));
    sum += u;
    sumsq += u * u;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sumsq / draws - mean * mean) / draws);
  const double target = 1.0 / (2.0 * d * d);
  c.check("u-statistic expectation", std::abs(mean - target) <= 6.0 * se,
          "mean=" + num(mean) + " target=" + num(target) + " se=" + num(se));

  const TaskSpec spec1 = make_task_spec(20, 1, 0.1 / std::sqrt(20.0));
  auto zs = derive(Seed{41}, "margin");
  auto probe = derive(Seed{41}, "margin/probe");
  Eigen::VectorXd x = spec1.mu_plus + 0.02 * Eigen::VectorXd::NullaryExpr(20, [&](Eigen::Index) {
                        return probe.gaussian();
                      });
  const MonteCarloEstimate est = ntk_margin_mc(spec1, x, 1.0, 200000, zs);
  c.check("ntk margin positive at cluster center", est.mean > 3.0 * est.std_err,
          "M=" + num(est.mean) + " se=" + num(est.std_err));
}

void check_bounds(Checker& c) {
  BoundInputs a{50, 1000, 1e6, 200, 5, 4, 1.0, 0.05, {}};
  BoundInputs b = a;
  b.k = 1;  // earlier task: larger K-k
  const bool mono_gap = thm1_forgetting_bound(b) > thm1_forgetting_bound(a) &&
                        thm3_gen_gap_bound(b) > thm3_gen_gap_bound(a);
  BoundInputs wide = a;
  wide.m = 1e12;
  BoundInputs big_n = a;
  big_n.n = 4000;
  const bool mono_res = thm1_forgetting_bound(wide) < thm1_forgetting_bound(a) &&
                        thm3_gen_gap_bound(big_n) < thm3_gen_gap_bound(a);
  c.check("bounds monotone in task gap and resources", mono_gap && mono_res,
          "thm1/thm3 grow with K-k, shrink with m, n");

  bool threw = false;
  try {
    thm4_gen_gap_bound(a);
  } catch (const MissingLossTrace&) {
    threw = true;
  }
  c.check("thm4 requires loss traces", threw, "MissingLossTrace on empty S");

  const ComplexityRecipe r = complexity_recipe(50, 3, 1, 1, 1, 1e7);
  c.check("complexity recipe caps m", r.m == 1e7 && r.m_capped && r.eta_T == 2500.0,
          "n=" + num(r.n) + " m capped at 1e7, etaT=" + num(r.eta_T));
}

void check_lazy_width(Checker& c) {
  // finite-vs-linearized output discrepancy shrinks with width
  const TaskStream ts = small_stream(8, 1, 100, 100, 0.1, 43);
  TrainConfig cfg;
  cfg.eta = 0.5;
  cfg.T = 40;
  const LossFn lin{LossKind::linear};
  auto discrepancy = [&](int m) {
    double acc = 0;
    for (std::uint64_t s = 1; s <= 3; ++s) {
      ModelConfig model;
      model.m = m;
      const RunRecord fin = train_stream(ts, cfg, model, lin, Seed{s});
      const LinearizedRun laz = train_linearized(ts, cfg, model, lin, Seed{s}, true);
      const NetParams fp = fin.final_params();
      const Eigen::MatrixXd& X = ts.test[0].X;
      acc += (batch_outputs(fp, X, model.act) - laz.net.batch_outputs(X))
                 .cwiseAbs()
                 .maxCoeff();
    }
    return acc / 3.0;
  };
  const double d_small = discrepancy(64);
  const double d_large = discrepancy(1024);
  c.check("lazy discrepancy shrinks with width", d_large < 0.7 * d_small,
          "m=64: " + num(d_small) + " m=1024: " + num(d_large));
}

}  // namespace

int verify_all(std::ostream& os) {
  Checker c{os};
  check_prng(c);
  check_model(c);
  check_loss(c);
  check_data(c);
  check_mnist(c);
  check_trainer(c);
  check_linearized(c);
  check_ustat_margin(c);
  check_bounds(c);
  check_lazy_width(c);
  os << (c.failures == 0 ? "verify: all checks passed\n"
                         : "verify: " + std::to_string(c.failures) + " check(s) FAILED\n");
  return c.failures;
}

}  // namespace clforge
