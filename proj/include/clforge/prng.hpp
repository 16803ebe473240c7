#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace clforge {

/// Root seed of an experiment. Identical Seed implies bit-identical results.
struct Seed {
  std::uint64_t value = 0;
};

namespace detail {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

// splitmix64 finalizer
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// FNV-1a over the label bytes, folded into the parent key.
inline std::uint64_t hash_label(std::uint64_t base, std::string_view label) {
  std::uint64_t h = 0xCBF29CE484222325ull ^ mix64(base + kGamma);
  for (unsigned char c : label) {
    h = (h ^ c) * 0x100000001B3ull;
  }
  return mix64(h + kGamma);
}

}  // namespace detail

// Counter-based generator: draw i from a stream is a pure function of
// (key, i), so distinct streams are order-insensitive by construction.
class Stream {
 public:
  Stream() = default;

  std::uint64_t next_u64() { return detail::mix64(key_ + (++counter_) * detail::kGamma); }

  /// Uniform on the open interval (0,1).
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; consumes exactly two uniforms per draw,
  /// no rejection loop, so the draw count is input-independent.
  double gaussian() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  double rademacher() { return (next_u64() >> 63) ? 1.0 : -1.0; }

  /// Derive an independent sub-stream, e.g. child("task/2/data").
  Stream child(std::string_view label) const {
    if (label.empty()) throw std::invalid_argument("Stream::child: empty label");
    return Stream(detail::hash_label(key_, label),
                  label_.empty() ? std::string(label) : label_ + "/" + std::string(label));
  }

  const std::string& label() const { return label_; }

 private:
  Stream(std::uint64_t key, std::string label) : key_(key), label_(std::move(label)) {}
  friend Stream derive(Seed, std::string_view);

  static constexpr double kTwoPi = 6.283185307179586476925286766559;

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
  std::string label_;
};

inline Stream derive(Seed seed, std::string_view label) {
  if (label.empty()) throw std::invalid_argument("derive: empty label");
  Stream s;
  s.key_ = detail::hash_label(seed.value, label);
  s.label_ = std::string(label);
  return s;
}

inline std::vector<double> gaussian(Stream& stream, std::size_t count) {
  std::vector<double> out(count);
  for (auto& v : out) v = stream.gaussian();
  return out;
}

inline std::vector<double> rademacher(Stream& stream, std::size_t count) {
  std::vector<double> out(count);
  for (auto& v : out) v = stream.rademacher();
  return out;
}

}  // namespace clforge
