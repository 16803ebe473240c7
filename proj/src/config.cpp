#include "clforge/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "clforge/errors.hpp"

namespace clforge {

using json = nlohmann::json;

namespace {

template <typename T>
void read_field(const json& j, const char* section, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(section) + "." + key + ": " + e.what());
  }
}

std::string resolve_mnist_path(const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  if (const char* dir = std::getenv("CLFORGE_MNIST_DIR")) {
    return std::string(dir) + "/" + path;
  }
  return path;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError(origin + ": top level must be an object");

  ExperimentConfig cfg;
  read_field(j, "", "seed", cfg.seed);
  read_field(j, "", "seeds", cfg.seeds);
  read_field(j, "", "out_dir", cfg.out_dir);
  read_field(j, "", "loss", cfg.loss);
  read_field(j, "", "cell_cap", cfg.cell_cap);

  if (j.contains("data")) {
    const json& d = j.at("data");
    read_field(d, "data", "kind", cfg.data.kind);
    read_field(d, "data", "d", cfg.data.d);
    read_field(d, "data", "K", cfg.data.K);
    read_field(d, "data", "n_train", cfg.data.n_train);
    read_field(d, "data", "n_train_later", cfg.data.n_train_later);
    read_field(d, "data", "n_test", cfg.data.n_test);
    read_field(d, "data", "sigma_coeff", cfg.data.sigma_coeff);
    read_field(d, "data", "mnist_images", cfg.data.mnist_images);
    read_field(d, "data", "mnist_labels", cfg.data.mnist_labels);
    read_field(d, "data", "mnist_normalize", cfg.data.mnist_normalize);
    if (d.contains("mnist_pairs")) {
      try {
        for (const auto& p : d.at("mnist_pairs")) {
          cfg.data.mnist_pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
        }
      } catch (const json::exception& e) {
        throw ConfigError(std::string("data.mnist_pairs: ") + e.what());
      }
    }
    if (cfg.data.kind != "xor" && cfg.data.kind != "mnist") {
      throw ConfigError("data.kind: expected \"xor\" or \"mnist\", got \"" + cfg.data.kind + "\"");
    }
  }

  if (j.contains("model")) {
    const json& m = j.at("model");
    read_field(m, "model", "kind", cfg.model.kind);
    read_field(m, "model", "m", cfg.model.m);
    read_field(m, "model", "activation", cfg.model.activation);
    read_field(m, "model", "balanced_a", cfg.model.balanced_a);
    read_field(m, "model", "closed_form", cfg.model.closed_form);
    if (cfg.model.kind != "finite" && cfg.model.kind != "linearized") {
      throw ConfigError("model.kind: expected \"finite\" or \"linearized\", got \"" +
                        cfg.model.kind + "\"");
    }
    parse_activation(cfg.model.activation);  // throws ConfigError-equivalent early
  }

  if (j.contains("train")) {
    const json& t = j.at("train");
    read_field(t, "train", "eta", cfg.train.eta);
    read_field(t, "train", "T", cfg.train.T);
    read_field(t, "train", "lambda", cfg.train.lambda);
    read_field(t, "train", "batch_size", cfg.train.batch_size);
    read_field(t, "train", "eval_every", cfg.train.eval_every);
  }

  if (j.contains("sweep")) {
    const json& s = j.at("sweep");
    if (!s.is_object()) throw ConfigError("sweep: must map axis keys to value lists");
    for (const auto& [key, values] : s.items()) {
      std::vector<double> vals;
      try {
        vals = values.get<std::vector<double>>();
      } catch (const json::exception& e) {
        throw ConfigError("sweep." + key + ": " + e.what());
      }
      if (vals.empty()) throw ConfigError("sweep." + key + ": empty value list");
      ExperimentConfig probe = cfg;
      apply_axis(probe, key, vals.front());  // reject unknown keys up front
      cfg.sweep.emplace_back(key, std::move(vals));
    }
  }

  LossFn::parse(cfg.loss);
  if (cfg.seeds < 1) throw ConfigError("seeds: must be >= 1");
  if (cfg.train.T < 1) throw ConfigError("train.T: must be >= 1");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["seeds"] = cfg.seeds;
  j["out_dir"] = cfg.out_dir;
  j["loss"] = cfg.loss;
  j["data"] = {{"kind", cfg.data.kind},
               {"d", cfg.data.d},
               {"K", cfg.data.K},
               {"n_train", cfg.data.n_train},
               {"n_train_later", cfg.data.n_train_later},
               {"n_test", cfg.data.n_test},
               {"sigma_coeff", cfg.data.sigma_coeff}};
  if (cfg.data.kind == "mnist") {
    j["data"]["mnist_images"] = cfg.data.mnist_images;
    j["data"]["mnist_labels"] = cfg.data.mnist_labels;
    j["data"]["mnist_normalize"] = cfg.data.mnist_normalize;
    json pairs = json::array();
    for (const auto& [a, b] : cfg.data.mnist_pairs) pairs.push_back({a, b});
    j["data"]["mnist_pairs"] = pairs;
  }
  j["model"] = {{"kind", cfg.model.kind},
                {"m", cfg.model.m},
                {"activation", cfg.model.activation},
                {"balanced_a", cfg.model.balanced_a},
                {"closed_form", cfg.model.closed_form}};
  j["train"] = {{"eta", cfg.train.eta},
                {"T", cfg.train.T},
                {"lambda", cfg.train.lambda},
                {"batch_size", cfg.train.batch_size},
                {"eval_every", cfg.train.eval_every}};
  json sweep = json::object();
  for (const auto& [key, vals] : cfg.sweep) sweep[key] = vals;
  j["sweep"] = sweep;
  return j.dump(2);
}

void apply_axis(ExperimentConfig& cfg, const std::string& key, double value) {
  const auto as_int = [&](const char* what) {
    const double r = std::round(value);
    if (std::abs(r - value) > 1e-9) {
      throw ConfigError("sweep axis " + key + ": " + what + " must be an integer, got " +
                        std::to_string(value));
    }
    return static_cast<int>(r);
  };
  if (key == "data.d") cfg.data.d = as_int("d");
  else if (key == "data.K") cfg.data.K = as_int("K");
  else if (key == "data.n_train") cfg.data.n_train = as_int("n_train");
  else if (key == "data.n_train_later") cfg.data.n_train_later = as_int("n_train_later");
  else if (key == "data.n_test") cfg.data.n_test = as_int("n_test");
  else if (key == "data.sigma_coeff") cfg.data.sigma_coeff = value;
  else if (key == "model.m") cfg.model.m = as_int("m");
  else if (key == "train.eta") cfg.train.eta = value;
  else if (key == "train.T") cfg.train.T = as_int("T");
  else if (key == "train.lambda") cfg.train.lambda = value;
  else if (key == "train.batch_size") cfg.train.batch_size = as_int("batch_size");
  else if (key == "train.eval_every") cfg.train.eval_every = as_int("eval_every");
  else throw ConfigError("unknown sweep axis: " + key);
}

TaskStream build_task_stream(const ExperimentConfig& cfg, Seed seed) {
  if (cfg.data.kind == "mnist") {
    if (cfg.data.mnist_pairs.empty()) throw ConfigError("data.mnist_pairs: required for mnist");
    const std::string images = resolve_mnist_path(cfg.data.mnist_images);
    const std::string labels = resolve_mnist_path(cfg.data.mnist_labels);
    TaskStream ts;
    const int K = static_cast<int>(cfg.data.mnist_pairs.size());
    for (int k = 1; k <= K; ++k) {
      const auto [a, b] = cfg.data.mnist_pairs[static_cast<std::size_t>(k - 1)];
      const int n_k = (k >= 2 && cfg.data.n_train_later > 0) ? cfg.data.n_train_later
                                                             : cfg.data.n_train;
      Dataset train = load_mnist_pair(images, labels, a, b, n_k, cfg.data.mnist_normalize, 0);
      Dataset test =
          load_mnist_pair(images, labels, a, b, cfg.data.n_test, cfg.data.mnist_normalize, n_k);
      train.task_index = k;
      test.task_index = k;
      ts.d = train.d();
      ts.train.push_back(std::move(train));
      ts.test.push_back(std::move(test));
    }
    return ts;
  }

  const double sigma = cfg.data.sigma_coeff / std::sqrt(static_cast<double>(cfg.data.d));
  auto stream = derive(seed, "data");
  if (cfg.data.n_train_later > 0) {
    std::vector<int> n_train(static_cast<std::size_t>(cfg.data.K), cfg.data.n_train_later);
    n_train.front() = cfg.data.n_train;
    return build_stream(cfg.data.d, cfg.data.K, n_train, cfg.data.n_test, sigma, stream);
  }
  return build_stream(cfg.data.d, cfg.data.K, cfg.data.n_train, cfg.data.n_test, sigma, stream);
}

}  // namespace clforge
