#pragma once

#include <stdexcept>
#include <string>

namespace clforge {

struct DimensionMismatch : std::runtime_error {
  explicit DimensionMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct DimensionTooSmall : std::runtime_error {
  explicit DimensionTooSmall(const std::string& what) : std::runtime_error(what) {}
};

struct BadMagic : std::runtime_error {
  explicit BadMagic(const std::string& what) : std::runtime_error(what) {}
};

struct TruncatedFile : std::runtime_error {
  explicit TruncatedFile(const std::string& what) : std::runtime_error(what) {}
};

struct NotEnoughSamples : std::runtime_error {
  explicit NotEnoughSamples(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteUpdate : std::runtime_error {
  explicit NonFiniteUpdate(const std::string& what) : std::runtime_error(what) {}
};

struct MissingSnapshot : std::runtime_error {
  explicit MissingSnapshot(const std::string& what) : std::runtime_error(what) {}
};

struct ModeMismatch : std::runtime_error {
  explicit ModeMismatch(const std::string& what) : std::runtime_error(what) {}
};

struct MissingLossTrace : std::runtime_error {
  explicit MissingLossTrace(const std::string& what) : std::runtime_error(what) {}
};

struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct SchemaMismatch : std::runtime_error {
  explicit SchemaMismatch(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace clforge
