#include "clforge/data.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>

#include "clforge/errors.hpp"

namespace clforge {

std::pair<Eigen::VectorXd, Eigen::VectorXd> standard_means(int d, int k) {
  if (2 * k > d) {
    throw DimensionTooSmall("standard_means: need 2k <= d, got d=" + std::to_string(d) +
                            ", k=" + std::to_string(k));
  }
  const double s = 1.0 / std::sqrt(static_cast<double>(d));
  Eigen::VectorXd mu_plus = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd mu_minus = Eigen::VectorXd::Zero(d);
  mu_plus(2 * k - 2) = s;
  mu_plus(2 * k - 1) = s;
  mu_minus(2 * k - 2) = s;
  mu_minus(2 * k - 1) = -s;
  return {mu_plus, mu_minus};
}

TaskSpec make_task_spec(int d, int k, double sigma) {
  auto [mu_plus, mu_minus] = standard_means(d, k);
  return TaskSpec{d, std::move(mu_plus), std::move(mu_minus), sigma, k};
}

Dataset sample_xor(const TaskSpec& spec, int n, Stream& stream) {
  Dataset ds;
  ds.task_index = spec.task_index;
  ds.X.resize(n, spec.d);
  ds.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const double label = stream.rademacher();
    const double center_sign = stream.rademacher();
    const Eigen::VectorXd& mu = label > 0 ? spec.mu_plus : spec.mu_minus;
    for (int j = 0; j < spec.d; ++j) {
      ds.X(i, j) = center_sign * mu(j) + spec.sigma * stream.gaussian();
    }
    ds.y(i) = label;
  }
  return ds;
}

TaskStream build_stream(int d, int K, int n_train, int n_test, double sigma, Stream& stream) {
  return build_stream(d, K, std::vector<int>(static_cast<std::size_t>(K), n_train), n_test, sigma,
                      stream);
}

TaskStream build_stream(int d, int K, const std::vector<int>& n_train, int n_test, double sigma,
                        Stream& stream) {
  if (2 * K > d) {
    throw DimensionTooSmall("build_stream: need 2K <= d, got d=" + std::to_string(d) +
                            ", K=" + std::to_string(K));
  }
  TaskStream ts;
  ts.d = d;
  for (int k = 1; k <= K; ++k) {
    TaskSpec spec = make_task_spec(d, k, sigma);
    auto train_stream = stream.child("task/" + std::to_string(k) + "/train");
    auto test_stream = stream.child("task/" + std::to_string(k) + "/test");
    ts.train.push_back(sample_xor(spec, n_train[static_cast<std::size_t>(k - 1)], train_stream));
    ts.test.push_back(sample_xor(spec, n_test, test_stream));
    ts.tasks.push_back(std::move(spec));
  }
  return ts;
}

namespace {

std::uint32_t read_be32(std::ifstream& in, const std::string& path) {
  unsigned char buf[4];
  if (!in.read(reinterpret_cast<char*>(buf), 4)) {
    throw TruncatedFile("unexpected end of file in " + path);
  }
  return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
         (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

}  // namespace

Dataset load_mnist_pair(const std::string& images_path, const std::string& labels_path,
                        int digit_a, int digit_b, int n, bool normalize, int skip) {
  if (digit_a == digit_b) throw ConfigError("load_mnist_pair: digit_a == digit_b");
  if (n <= 0) throw NotEnoughSamples("load_mnist_pair: requested n=" + std::to_string(n));

  std::ifstream img(images_path, std::ios::binary);
  if (!img) throw TruncatedFile("cannot open " + images_path);
  std::ifstream lab(labels_path, std::ios::binary);
  if (!lab) throw TruncatedFile("cannot open " + labels_path);

  if (read_be32(img, images_path) != 0x00000803u) {
    throw BadMagic("bad image magic in " + images_path);
  }
  const std::uint32_t count = read_be32(img, images_path);
  const std::uint32_t rows = read_be32(img, images_path);
  const std::uint32_t cols = read_be32(img, images_path);

  if (read_be32(lab, labels_path) != 0x00000801u) {
    throw BadMagic("bad label magic in " + labels_path);
  }
  const std::uint32_t lab_count = read_be32(lab, labels_path);
  if (lab_count != count) {
    throw TruncatedFile("image/label count mismatch: " + images_path);
  }

  const int d = static_cast<int>(rows * cols);
  const double scale = (normalize ? 1.0 / std::sqrt(static_cast<double>(d)) : 1.0) / 255.0;

  Dataset ds;
  ds.X.resize(n, d);
  ds.y.resize(n);
  std::vector<unsigned char> pixels(static_cast<std::size_t>(d));
  int kept = 0;
  int skipped = 0;
  for (std::uint32_t i = 0; i < count && kept < n; ++i) {
    char label_byte;
    if (!lab.read(&label_byte, 1)) throw TruncatedFile("unexpected end of file in " + labels_path);
    if (!img.read(reinterpret_cast<char*>(pixels.data()), d)) {
      throw TruncatedFile("unexpected end of file in " + images_path);
    }
    const int digit = static_cast<unsigned char>(label_byte);
    if (digit != digit_a && digit != digit_b) continue;
    if (skipped < skip) {
      ++skipped;
      continue;
    }
    for (int j = 0; j < d; ++j) ds.X(kept, j) = scale * pixels[static_cast<std::size_t>(j)];
    ds.y(kept) = digit == digit_a ? 1.0 : -1.0;
    ++kept;
  }
  if (kept < n) {
    throw NotEnoughSamples("load_mnist_pair: found " + std::to_string(kept) + " of " +
                           std::to_string(n) + " requested samples");
  }
  return ds;
}

}  // namespace clforge
