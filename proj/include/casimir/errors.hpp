#pragma once

#include <stdexcept>
#include <string>

namespace casimir {

// Invalid curve/placement/mesh data (non-star-shaped configuration, etc).
struct GeometryError : std::runtime_error {
  explicit GeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

// Argument outside the supported range of a special function.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Scene or run configuration rejected before any computation.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Degenerate or ill-conditioned spectral point (caller may subdivide around it).
struct SpectralPointError : std::runtime_error {
  explicit SpectralPointError(const std::string& msg) : std::runtime_error(msg) {}
};

// Quadrature or scan failure after retries; carries the worst node diagnostics.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Eigenvalue scan detected structure finer than the grid step.
struct ScanError : std::runtime_error {
  explicit ScanError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace casimir
