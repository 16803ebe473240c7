#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "clforge/bounds.hpp"
#include "clforge/config.hpp"
#include "clforge/harness.hpp"
#include "clforge/linearized.hpp"
#include "clforge/metrics.hpp"
#include "clforge/model.hpp"
#include "clforge/prng.hpp"
#include "clforge/trainer.hpp"

namespace py = pybind11;
using namespace clforge;

PYBIND11_MODULE(_clforge, mod) {
  mod.doc() = "continual-learning laboratory for two-layer networks";

  py::class_<TaskSpec>(mod, "TaskSpec")
      .def_readonly("d", &TaskSpec::d)
      .def_readonly("mu_plus", &TaskSpec::mu_plus)
      .def_readonly("mu_minus", &TaskSpec::mu_minus)
      .def_readonly("sigma", &TaskSpec::sigma)
      .def_readonly("task_index", &TaskSpec::task_index);

  py::class_<Dataset>(mod, "Dataset")
      .def_readonly("X", &Dataset::X)
      .def_readonly("y", &Dataset::y)
      .def_readonly("task_index", &Dataset::task_index)
      .def_property_readonly("n", &Dataset::n)
      .def_property_readonly("d", &Dataset::d);

  py::class_<TaskStream>(mod, "TaskStream")
      .def_readonly("tasks", &TaskStream::tasks)
      .def_readonly("train", &TaskStream::train)
      .def_readonly("test", &TaskStream::test)
      .def_readonly("d", &TaskStream::d)
      .def_property_readonly("num_tasks", &TaskStream::num_tasks);

  mod.def(
      "build_stream",
      [](int d, int K, int n_train, int n_test, double sigma, std::uint64_t seed) {
        auto stream = derive(Seed{seed}, "data");
        return build_stream(d, K, n_train, n_test, sigma, stream);
      },
      py::arg("d"), py::arg("K"), py::arg("n_train"), py::arg("n_test"), py::arg("sigma"),
      py::arg("seed"));
  mod.def("load_mnist_pair", &load_mnist_pair, py::arg("images"), py::arg("labels"),
          py::arg("digit_a"), py::arg("digit_b"), py::arg("n"), py::arg("normalize") = true,
          py::arg("skip") = 0);
  mod.def("make_task_spec", &make_task_spec, py::arg("d"), py::arg("k"), py::arg("sigma"));
  mod.def(
      "sample_xor",
      [](const TaskSpec& spec, int n, std::uint64_t seed) {
        auto stream = derive(Seed{seed}, "data");
        return sample_xor(spec, n, stream);
      },
      py::arg("spec"), py::arg("n"), py::arg("seed"));

  py::class_<NetParams>(mod, "NetParams")
      .def_readonly("W", &NetParams::W)
      .def_readonly("a", &NetParams::a);

  py::class_<ModelConfig>(mod, "ModelConfig")
      .def(py::init([](int m, const std::string& activation, bool balanced_a) {
             return ModelConfig{m, parse_activation(activation), balanced_a};
           }),
           py::arg("m") = 100, py::arg("activation") = "quadratic",
           py::arg("balanced_a") = false)
      .def_readwrite("m", &ModelConfig::m);

  py::class_<TrainConfig>(mod, "TrainConfig")
      .def(py::init([](double eta, int T, double lam, int batch_size, int eval_every) {
             TrainConfig c;
             c.eta = eta;
             c.T = T;
             c.lambda = lam;
             c.batch_size = batch_size;
             c.eval_every = eval_every;
             return c;
           }),
           py::arg("eta") = 1.0, py::arg("T") = 100, py::arg("lam") = 0.0,
           py::arg("batch_size") = 0, py::arg("eval_every") = 0)
      .def_readwrite("eta", &TrainConfig::eta)
      .def_readwrite("T", &TrainConfig::T);

  py::class_<MetricRow>(mod, "MetricRow")
      .def_readonly("phase_task", &MetricRow::phase_task)
      .def_readonly("iter", &MetricRow::iter)
      .def_readonly("eval_task", &MetricRow::eval_task)
      .def_readonly("test_split", &MetricRow::test_split)
      .def_readonly("loss", &MetricRow::loss)
      .def_readonly("err", &MetricRow::err);

  py::class_<RunRecord>(mod, "RunRecord")
      .def_readonly("snapshots", &RunRecord::snapshots)
      .def_readonly("metrics", &RunRecord::metrics)
      .def_readonly("loss_trace", &RunRecord::loss_trace)
      .def("final_params", &RunRecord::final_params);

  mod.def(
      "train_stream",
      [](const TaskStream& ts, const TrainConfig& cfg, const ModelConfig& model,
         const std::string& loss, std::uint64_t seed) {
        return train_stream(ts, cfg, model, LossFn::parse(loss), Seed{seed});
      },
      py::arg("stream"), py::arg("train"), py::arg("model"), py::arg("loss"), py::arg("seed"));

  py::class_<ForgettingEntry>(mod, "ForgettingEntry")
      .def_readonly("k", &ForgettingEntry::k)
      .def_readonly("K_prime", &ForgettingEntry::K_prime)
      .def_readonly("f_tr", &ForgettingEntry::f_tr)
      .def_readonly("f_ts", &ForgettingEntry::f_ts)
      .def_readonly("gen_gap", &ForgettingEntry::gen_gap)
      .def_readonly("pre_gap", &ForgettingEntry::pre_gap)
      .def_readonly("f_tr_err", &ForgettingEntry::f_tr_err)
      .def_readonly("f_ts_err", &ForgettingEntry::f_ts_err);

  mod.def(
      "forgetting",
      [](const RunRecord& rec, const TaskStream& ts, const std::string& activation,
         const std::string& loss) {
        return forgetting(rec, ts, parse_activation(activation), LossFn::parse(loss)).entries;
      },
      py::arg("record"), py::arg("stream"), py::arg("activation"), py::arg("loss"));

  mod.def("alpha_t", &alpha_t, py::arg("eta"), py::arg("lam"), py::arg("t"));
  mod.def("alpha_t_approx", &alpha_t_approx, py::arg("eta"), py::arg("lam"), py::arg("t"));
  mod.def(
      "thm1_forgetting_bound",
      [](double d, double n, double m, double T, double K, double k, double eta, double C1,
         double C2, double C3) {
        return thm1_forgetting_bound(BoundInputs{d, n, m, T, K, k, eta, 0.05, {}}, C1, C2, C3);
      },
      py::arg("d"), py::arg("n"), py::arg("m"), py::arg("T"), py::arg("K"), py::arg("k"),
      py::arg("eta"), py::arg("C1") = 1.0, py::arg("C2") = 1.0, py::arg("C3") = 1.0);
  mod.def(
      "thm3_gen_gap_bound",
      [](double d, double n, double m, double T, double K, double k, double eta) {
        return thm3_gen_gap_bound(BoundInputs{d, n, m, T, K, k, eta, 0.05, {}});
      },
      py::arg("d"), py::arg("n"), py::arg("m"), py::arg("T"), py::arg("K"), py::arg("k"),
      py::arg("eta"));
  mod.def(
      "u_statistic",
      [](const Dataset& data, const Eigen::VectorXd& probe) {
        return u_statistic(data, probe, 1.0);
      },
      py::arg("data"), py::arg("probe"));
  mod.def(
      "ntk_margin_mc",
      [](const TaskSpec& spec, const Eigen::VectorXd& x, double y, long samples,
         std::uint64_t seed) {
        auto stream = derive(Seed{seed}, "margin");
        const MonteCarloEstimate est = ntk_margin_mc(spec, x, y, samples, stream);
        return std::make_pair(est.mean, est.std_err);
      },
      py::arg("spec"), py::arg("x"), py::arg("y"), py::arg("samples"), py::arg("seed"));

  mod.def(
      "run_config",
      [](const std::string& json_text, const std::string& out_dir, int jobs) {
        return run_experiment(parse_config(json_text, "<python>"), out_dir, jobs);
      },
      py::arg("json_text"), py::arg("out_dir"), py::arg("jobs") = 1);
  mod.def("verify", [] {
    std::ostringstream os;
    const int failures = verify_all(os);
    return std::make_pair(failures, os.str());
  });
}
