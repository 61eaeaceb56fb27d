#pragma once

// Shared scalar/matrix aliases, error types and small numeric helpers.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

namespace lowtrot {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

inline constexpr std::size_t kDefaultDimensionCap = 20000;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when a Hilbert space would exceed the configured dimension cap.
class DimensionCapError : public Error {
 public:
  using Error::Error;
};

/// base^exp, or nullopt once the result exceeds `cap` (never overflows).
inline std::optional<std::size_t> checked_power(std::size_t base, std::size_t exp,
                                                std::size_t cap) {
  std::size_t result = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (base != 0 && result > cap / base) return std::nullopt;
    result *= base;
    if (result > cap) return std::nullopt;
  }
  return result;
}

inline double max_abs_entry(const Matrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// max-entry deviation ‖M − M†‖_max
inline double hermiticity_defect(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<double>::infinity();
  return m.size() == 0 ? 0.0 : (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline bool is_real(const Matrix& m) {
  return m.size() == 0 || m.imag().cwiseAbs().maxCoeff() == 0.0;
}

}  // namespace lowtrot
