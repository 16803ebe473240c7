#include "clforge/harness.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "clforge/bounds.hpp"
#include "clforge/errors.hpp"
#include "clforge/linearized.hpp"

namespace clforge {

using json = nlohmann::json;

std::vector<SweepCell> expand_sweep(const ExperimentConfig& cfg) {
  std::vector<SweepCell> cells;
  std::size_t total = 1;
  for (const auto& [key, vals] : cfg.sweep) total *= vals.size();
  if (static_cast<long long>(total) * cfg.seeds > cfg.cell_cap) {
    throw ConfigError("sweep expands to " + std::to_string(total * cfg.seeds) +
                      " runs, above cell_cap=" + std::to_string(cfg.cell_cap));
  }
  for (std::size_t idx = 0; idx < total; ++idx) {
    SweepCell cell;
    cell.index = static_cast<int>(idx);
    cell.cfg = cfg;
    std::size_t rem = idx;
    for (const auto& [key, vals] : cfg.sweep) {
      const double v = vals[rem % vals.size()];
      rem /= vals.size();
      apply_axis(cell.cfg, key, v);
      cell.axes.emplace_back(key, v);
    }
    cells.push_back(std::move(cell));
  }
  return cells;
}

namespace {

EvalResult eval_linearized(const LinearizedNet& base, const Eigen::MatrixXd& delta,
                           const Dataset& data, const LossFn& loss) {
  LinearizedNet net = base;
  net.delta = delta;
  const Eigen::VectorXd margins = data.y.cwiseProduct(net.batch_outputs(data.X));
  double total = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i) total += loss.value(margins(i));
  return {total / static_cast<double>(margins.size()), misclassification(margins)};
}

void linearized_run_result(const TaskStream& ts, const ExperimentConfig& cfg,
                           const ModelConfig& model, const LossFn& loss, Seed seed,
                           RunResult& rr) {
  const LinearizedRun lr =
      train_linearized(ts, cfg.train, model, loss, seed, cfg.model.closed_form);
  const int K = ts.num_tasks();
  // boundary metrics: snapshot s evaluated on every task, both splits
  std::vector<std::vector<EvalResult>> tr(static_cast<std::size_t>(K + 1)),
      te(static_cast<std::size_t>(K + 1));
  for (int s = 0; s <= K; ++s) {
    for (int j = 1; j <= K; ++j) {
      const auto& delta = lr.delta_snapshots[static_cast<std::size_t>(s)];
      const EvalResult on_train =
          eval_linearized(lr.net, delta, ts.train[static_cast<std::size_t>(j - 1)], loss);
      const EvalResult on_test =
          eval_linearized(lr.net, delta, ts.test[static_cast<std::size_t>(j - 1)], loss);
      tr[static_cast<std::size_t>(s)].push_back(on_train);
      te[static_cast<std::size_t>(s)].push_back(on_test);
      const long iter = static_cast<long>(s) * cfg.train.T;
      rr.metrics.push_back({s, iter, j, false, on_train.loss, on_train.err});
      rr.metrics.push_back({s, iter, j, true, on_test.loss, on_test.err});
    }
  }
  for (int k = 1; k <= K; ++k) {
    for (int Kp = k; Kp <= K; ++Kp) {
      const EvalResult& tr_k = tr[static_cast<std::size_t>(k)][static_cast<std::size_t>(k - 1)];
      const EvalResult& te_k = te[static_cast<std::size_t>(k)][static_cast<std::size_t>(k - 1)];
      const EvalResult& tr_K = tr[static_cast<std::size_t>(Kp)][static_cast<std::size_t>(k - 1)];
      const EvalResult& te_K = te[static_cast<std::size_t>(Kp)][static_cast<std::size_t>(k - 1)];
      ForgettingEntry e;
      e.k = k;
      e.K_prime = Kp;
      e.f_tr = tr_K.loss - tr_k.loss;
      e.f_ts = te_K.loss - te_k.loss;
      e.gen_gap = te_K.loss - tr_K.loss;
      e.pre_gap = tr_k.loss - te_k.loss;
      e.f_tr_err = tr_K.err - tr_k.err;
      e.f_ts_err = te_K.err - te_k.err;
      rr.report.entries.push_back(e);
    }
  }
}

}  // namespace

RunResult execute_run(const ExperimentConfig& cfg, const std::string& run_id, Seed seed) {
  const TaskStream ts = build_task_stream(cfg, seed);
  const LossFn loss = LossFn::parse(cfg.loss);
  ModelConfig model;
  model.m = cfg.model.m;
  model.act = parse_activation(cfg.model.activation);
  model.balanced_a = cfg.model.balanced_a;

  RunResult rr;
  rr.run_id = run_id;
  rr.seed = seed.value;
  if (cfg.model.kind == "linearized") {
    linearized_run_result(ts, cfg, model, loss, seed, rr);
    return rr;
  }
  const RunRecord rec = train_stream(ts, cfg.train, model, loss, seed);
  rr.metrics = rec.metrics;
  rr.report = forgetting(rec, ts, model.act, loss);
  for (const auto& trace : rec.loss_trace) {
    rr.S.push_back(std::accumulate(trace.begin(), trace.end(), 0.0));
  }
  return rr;
}

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::string pad(int v, int width) {
  std::string s = std::to_string(v);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, int jobs) {
  const std::vector<SweepCell> cells = expand_sweep(cfg);
  struct Job {
    const SweepCell* cell;
    int seed_index;
  };
  std::vector<Job> queue;
  for (const auto& cell : cells) {
    for (int s = 0; s < cfg.seeds; ++s) queue.push_back({&cell, s});
  }

  std::vector<RunResult> results(queue.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= queue.size()) return;
      const Job& job = queue[i];
      const std::string run_id =
          "c" + pad(job.cell->index, 2) + "_s" + pad(job.seed_index, 2);
      const Seed seed{cfg.seed + static_cast<std::uint64_t>(job.seed_index)};
      try {
        results[i] = execute_run(job.cell->cfg, run_id, seed);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  const int n_threads =
      std::max(1, std::min<int>(jobs, static_cast<int>(queue.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(out_dir + "/results.csv");
    out << "run_id,seed,phase_task,iter,eval_task,split,loss,err\n";
    for (const auto& rr : results) {
      for (const auto& row : rr.metrics) {
        out << rr.run_id << ',' << rr.seed << ',' << row.phase_task << ',' << row.iter << ','
            << row.eval_task << ',' << (row.test_split ? "test" : "train") << ','
            << fmt(row.loss) << ',' << fmt(row.err) << '\n';
      }
    }
  }
  {
    std::ofstream out(out_dir + "/report.csv");
    out << "run_id,k,K_prime,f_tr,f_ts,gen_gap,pre_gap,f_tr_err,f_ts_err\n";
    for (const auto& rr : results) {
      for (const auto& e : rr.report.entries) {
        out << rr.run_id << ',' << e.k << ',' << e.K_prime << ',' << fmt(e.f_tr) << ','
            << fmt(e.f_ts) << ',' << fmt(e.gen_gap) << ',' << fmt(e.pre_gap) << ','
            << fmt(e.f_tr_err) << ',' << fmt(e.f_ts_err) << '\n';
      }
    }
  }
  {
    json meta;
    meta["schema_version"] = 1;
    meta["config"] = json::parse(config_to_json(cfg));
    meta["jobs"] = n_threads;
    json jc = json::array();
    for (const auto& cell : cells) {
      json axes = json::object();
      for (const auto& [key, v] : cell.axes) axes[key] = v;
      jc.push_back({{"index", cell.index}, {"axes", axes}});
    }
    meta["cells"] = jc;
    json seeds = json::array();
    for (int s = 0; s < cfg.seeds; ++s) seeds.push_back(cfg.seed + static_cast<std::uint64_t>(s));
    meta["seed_values"] = seeds;
    std::ofstream out(out_dir + "/meta.json");
    out << meta.dump(2) << '\n';
  }
  return static_cast<int>(results.size());
}

void bounds_table(const std::string& config_path, std::ostream& os) {
  std::ifstream in(config_path);
  if (!in) throw ConfigError("cannot open bounds config: " + config_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(config_path + ": " + std::string(e.what()));
  }
  const json b = j.contains("bounds") ? j.at("bounds") : j;
  auto grid = [&](const char* key, double fallback) {
    std::vector<double> out{fallback};
    if (!b.contains(key)) return out;
    const json& v = b.at(key);
    out.clear();
    if (v.is_array()) {
      for (const auto& e : v) out.push_back(e.get<double>());
    } else {
      out.push_back(v.get<double>());
    }
    if (out.empty()) throw ConfigError(std::string("bounds.") + key + ": empty list");
    return out;
  };
  const auto ds = grid("d", 50), ns = grid("n", 1000), ms = grid("m", 1e6),
             Ts = grid("T", 200), Ks = grid("K", 3), etas = grid("eta", 1.0);
  const double C1 = b.value("C1", 1.0), C2 = b.value("C2", 1.0), C3 = b.value("C3", 1.0);
  const double delta = b.value("delta", 0.05);
  std::vector<double> S;
  if (b.contains("S")) S = b.at("S").get<std::vector<double>>();

  os << "d,n,m,T,K,k,eta,delta,thm1,thm3" << (S.empty() ? "" : ",thm4") << '\n';
  os.precision(8);
  for (double d : ds)
    for (double n : ns)
      for (double m : ms)
        for (double T : Ts)
          for (double K : Ks)
            for (double eta : etas)
              for (int k = 1; k <= static_cast<int>(K); ++k) {
                BoundInputs bi{d, n, m, T, K, static_cast<double>(k), eta, delta, S};
                os << d << ',' << n << ',' << m << ',' << T << ',' << K << ',' << k << ','
                   << eta << ',' << delta << ',' << thm1_forgetting_bound(bi, C1, C2, C3)
                   << ',' << thm3_gen_gap_bound(bi);
                if (!S.empty()) os << ',' << thm4_gen_gap_bound(bi);
                os << '\n';
              }
}

}  // namespace clforge
