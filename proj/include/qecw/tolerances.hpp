#pragma once

#include <atomic>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace qecw {

/// Numerical tolerances shared by every module and by the test suites.
namespace tol {
/// Algebraic identities: unitarity, trace preservation, idempotence, ...
inline constexpr double algebraic = 1e-9;
/// Reconstruction after a Hermitian eigendecomposition.
inline constexpr double eigen = 1e-8;
/// Published values are printed with four decimals.
inline constexpr double published = 1e-4;
/// Relative cutoff for the zero block of the error-correlation matrix.
inline constexpr double rank_cutoff = 1e-9;
}  // namespace tol

/// Thrown when operand dimensions or lengths do not match.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a value fails a structural precondition (non-unitary,
/// non-commuting generators, out-of-range probability, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a state has support outside a partial subsystem identification.
class DetectionError : public std::runtime_error {
 public:
  DetectionError(const std::string& what, double leaked)
      : std::runtime_error(what), leaked_(leaked) {}
  double leaked() const noexcept { return leaked_; }

 private:
  double leaked_;
};

namespace detail {
inline std::atomic<std::size_t>& max_dimension_storage() {
  static std::atomic<std::size_t> value{std::size_t{1} << 10};
  return value;
}
}  // namespace detail

/// Largest total Hilbert-space dimension any dense object may have.
inline std::size_t max_dimension() { return detail::max_dimension_storage().load(); }
inline void set_max_dimension(std::size_t d) { detail::max_dimension_storage().store(d); }

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw PreconditionError(msg);
}

}  // namespace qecw
