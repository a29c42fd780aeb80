#pragma once

// Dense complex linear algebra at desk scale. Every object carries the list
// of subsystem dimensions it lives on; tensor-factor order is left to right,
// so qubit 1 is the most significant index.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qecw/pauli.hpp"
#include "qecw/tolerances.hpp"

namespace qecw {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Dims = std::vector<std::size_t>;

inline std::size_t total_dim(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

inline Dims qubit_dims(std::size_t n) { return Dims(n, 2); }

inline Dims concat_dims(const Dims& a, const Dims& b) {
  Dims out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

namespace detail {
inline void check_cap(std::size_t d) {
  if (d > max_dimension())
    throw DimensionError("dimension " + std::to_string(d) + " exceeds configured maximum " +
                         std::to_string(max_dimension()));
}
inline void check_dims(const Dims& dims, Eigen::Index size, const char* what) {
  for (auto d : dims)
    if (d == 0) throw DimensionError(std::string(what) + ": zero subsystem dimension");
  if (total_dim(dims) != static_cast<std::size_t>(size))
    throw DimensionError(std::string(what) + ": dims do not match data size");
  check_cap(total_dim(dims));
}
}  // namespace detail

/// Largest entry magnitude; the norm used for all tolerance checks.
inline double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const Matrix& m, double tolerance = tol::algebraic) {
  return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tolerance;
}

/// Columns orthonormal: V^dagger V = 1.
inline bool is_isometry(const Matrix& m, double tolerance = tol::algebraic) {
  return max_abs(m.adjoint() * m - Matrix::Identity(m.cols(), m.cols())) <= tolerance;
}

inline bool is_unitary(const Matrix& m, double tolerance = tol::algebraic) {
  return m.rows() == m.cols() && is_isometry(m, tolerance);
}

struct StateVector {
  Dims dims;
  Vector amplitudes;

  StateVector() = default;
  /// Normalized state unless `allow_unnormalized` (error terms may be subnormalized).
  StateVector(Dims d, Vector amps, bool allow_unnormalized = false)
      : dims(std::move(d)), amplitudes(std::move(amps)) {
    detail::check_dims(dims, amplitudes.size(), "state vector");
    if (!allow_unnormalized && std::abs(amplitudes.norm() - 1.0) > tol::algebraic)
      throw PreconditionError("state vector is not normalized");
  }

  static StateVector basis(const Dims& dims, std::size_t index) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(total_dim(dims)));
    if (index >= static_cast<std::size_t>(v.size())) throw DimensionError("basis index out of range");
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return StateVector(dims, std::move(v));
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(amplitudes.size()); }
  double norm() const { return amplitudes.norm(); }
  Complex inner(const StateVector& other) const { return amplitudes.dot(other.amplitudes); }
};

struct LinearOperator {
  Dims dims_in;
  Dims dims_out;
  Matrix matrix;

  LinearOperator() = default;
  LinearOperator(Dims in, Dims out, Matrix m) : dims_in(std::move(in)), dims_out(std::move(out)), matrix(std::move(m)) {
    detail::check_dims(dims_in, matrix.cols(), "operator input");
    detail::check_dims(dims_out, matrix.rows(), "operator output");
  }
  /// Square operator on `dims`.
  LinearOperator(const Dims& dims, Matrix m) : LinearOperator(dims, dims, std::move(m)) {}

  static LinearOperator identity(const Dims& dims) {
    const auto d = static_cast<Eigen::Index>(total_dim(dims));
    return LinearOperator(dims, Matrix::Identity(d, d));
  }

  bool is_square() const { return dims_in == dims_out; }
  bool is_unitary(double tolerance = tol::algebraic) const { return is_square() && qecw::is_unitary(matrix, tolerance); }
  bool is_isometry(double tolerance = tol::algebraic) const { return qecw::is_isometry(matrix, tolerance); }
  bool is_hermitian(double tolerance = tol::algebraic) const { return is_square() && qecw::is_hermitian(matrix, tolerance); }

  LinearOperator adjoint() const { return LinearOperator(dims_out, dims_in, matrix.adjoint()); }

  StateVector apply(const StateVector& psi) const {
    if (psi.dims != dims_in) throw DimensionError("operator/state dims mismatch");
    return StateVector(dims_out, matrix * psi.amplitudes, true);
  }

  friend LinearOperator operator*(const LinearOperator& a, const LinearOperator& b) {
    if (a.dims_in != b.dims_out) throw DimensionError("operator composition dims mismatch");
    return LinearOperator(b.dims_in, a.dims_out, a.matrix * b.matrix);
  }
  friend LinearOperator operator*(Complex s, const LinearOperator& a) {
    return LinearOperator(a.dims_in, a.dims_out, s * a.matrix);
  }
  friend LinearOperator operator+(const LinearOperator& a, const LinearOperator& b) {
    if (a.dims_in != b.dims_in || a.dims_out != b.dims_out) throw DimensionError("operator sum dims mismatch");
    return LinearOperator(a.dims_in, a.dims_out, a.matrix + b.matrix);
  }
};

struct DensityOperator {
  Dims dims;
  Matrix matrix;

  DensityOperator() = default;
  /// Validates Hermiticity, unit trace and positivity unless `unchecked`.
  DensityOperator(Dims d, Matrix m, bool unchecked = false) : dims(std::move(d)), matrix(std::move(m)) {
    if (matrix.rows() != matrix.cols()) throw DimensionError("density operator must be square");
    detail::check_dims(dims, matrix.rows(), "density operator");
    if (unchecked) return;
    if (!qecw::is_hermitian(matrix)) throw PreconditionError("density operator is not Hermitian");
    if (std::abs(matrix.trace() - Complex(1.0)) > tol::algebraic) throw PreconditionError("density operator trace != 1");
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol::algebraic) throw PreconditionError("density operator is not positive");
  }

  static DensityOperator pure(const StateVector& psi) {
    return DensityOperator(psi.dims, psi.amplitudes * psi.amplitudes.adjoint(), true);
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
  double trace() const { return matrix.trace().real(); }
  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  }
};

/// Exact 2x2 Pauli matrix.
inline LinearOperator pauli(Pauli p) {
  Matrix m(2, 2);
  const Complex i(0, 1);
  switch (p) {
    case Pauli::I: m << 1, 0, 0, 1; break;
    case Pauli::X: m << 0, 1, 1, 0; break;
    case Pauli::Y: m << 0, -i, i, 0; break;
    case Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return LinearOperator({2}, std::move(m));
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

inline Vector kron(const Vector& a, const Vector& b) {
  Vector out(a.size() * b.size());
  for (Eigen::Index r = 0; r < a.size(); ++r) out.segment(r * b.size(), b.size()) = a(r) * b;
  return out;
}

inline LinearOperator tensor(const LinearOperator& a, const LinearOperator& b) {
  detail::check_cap(static_cast<std::size_t>(a.matrix.rows() * b.matrix.rows()));
  detail::check_cap(static_cast<std::size_t>(a.matrix.cols() * b.matrix.cols()));
  return LinearOperator(concat_dims(a.dims_in, b.dims_in), concat_dims(a.dims_out, b.dims_out),
                        kron(a.matrix, b.matrix));
}

inline StateVector tensor(const StateVector& a, const StateVector& b) {
  detail::check_cap(a.dim() * b.dim());
  return StateVector(concat_dims(a.dims, b.dims), kron(a.amplitudes, b.amplitudes), true);
}

inline DensityOperator tensor(const DensityOperator& a, const DensityOperator& b) {
  detail::check_cap(a.dim() * b.dim());
  return DensityOperator(concat_dims(a.dims, b.dims), kron(a.matrix, b.matrix), true);
}

/// Dense matrix of a Pauli word, including its phase.
inline LinearOperator dense(const PauliProduct& p) {
  detail::check_cap(std::size_t{1} << p.size());
  Matrix m = Matrix::Identity(1, 1);
  for (std::size_t q = 0; q < p.size(); ++q) m = kron(m, pauli(p.at(q)).matrix);
  return LinearOperator(qubit_dims(p.size()), p.phase() * m);
}

/// Single-subsystem operator `op` placed on factor `index` of `dims`.
inline LinearOperator embed(const LinearOperator& op, std::size_t index, const Dims& dims) {
  if (index >= dims.size() || op.dims_in.size() != 1 || op.dims_in != op.dims_out || op.dims_in[0] != dims[index])
    throw DimensionError("embed: operator does not fit the chosen factor");
  Matrix m = Matrix::Identity(1, 1);
  for (std::size_t k = 0; k < dims.size(); ++k) {
    const auto d = static_cast<Eigen::Index>(dims[k]);
    m = kron(m, k == index ? op.matrix : Matrix::Identity(d, d));
  }
  return LinearOperator(dims, std::move(m));
}

/// Matrix whose columns are the given vectors.
inline Matrix stack_columns(std::span<const StateVector> vectors) {
  if (vectors.empty()) return Matrix(0, 0);
  Matrix m(static_cast<Eigen::Index>(vectors.front().dim()), static_cast<Eigen::Index>(vectors.size()));
  for (std::size_t k = 0; k < vectors.size(); ++k) {
    if (vectors[k].dims != vectors.front().dims) throw DimensionError("basis vectors live on different spaces");
    m.col(static_cast<Eigen::Index>(k)) = vectors[k].amplitudes;
  }
  return m;
}

/// Orthogonal projector onto the span of an orthonormal list.
inline LinearOperator projector(std::span<const StateVector> basis, const Dims& dims) {
  const auto d = static_cast<Eigen::Index>(total_dim(dims));
  if (basis.empty()) return LinearOperator(dims, Matrix::Zero(d, d));
  for (const auto& b : basis)
    if (b.dims != dims) throw DimensionError("projector basis dims mismatch");
  const Matrix v = stack_columns(basis);
  if (!is_isometry(v)) throw PreconditionError("projector basis is not orthonormal");
  return LinearOperator(dims, v * v.adjoint());
}

/// Keeps the factors listed in `keep` (any order; output follows ascending factor order).
inline DensityOperator partial_trace(const DensityOperator& rho, std::vector<std::size_t> keep) {
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (auto k : keep)
    if (k >= rho.dims.size()) throw DimensionError("partial trace: subsystem index out of range");

  const std::size_t m = rho.dims.size();
  std::vector<bool> kept(m, false);
  for (auto k : keep) kept[k] = true;
  Dims kept_dims, traced_dims;
  for (std::size_t k = 0; k < m; ++k) (kept[k] ? kept_dims : traced_dims).push_back(rho.dims[k]);
  const std::size_t dk = total_dim(kept_dims);
  const std::size_t dt = total_dim(traced_dims);

  // full index for each (kept, traced) multi-index pair
  std::vector<std::size_t> full(dk * dt);
  const std::size_t d = total_dim(rho.dims);
  for (std::size_t f = 0; f < d; ++f) {
    std::size_t rem = f, ki = 0, ti = 0, kscale = 1, tscale = 1;
    for (std::size_t k = m; k-- > 0;) {
      const std::size_t digit = rem % rho.dims[k];
      rem /= rho.dims[k];
      if (kept[k]) {
        ki += digit * kscale;
        kscale *= rho.dims[k];
      } else {
        ti += digit * tscale;
        tscale *= rho.dims[k];
      }
    }
    full[ki * dt + ti] = f;
  }

  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(dk), static_cast<Eigen::Index>(dk));
  for (std::size_t a = 0; a < dk; ++a)
    for (std::size_t b = 0; b < dk; ++b) {
      Complex s = 0;
      for (std::size_t t = 0; t < dt; ++t)
        s += rho.matrix(static_cast<Eigen::Index>(full[a * dt + t]), static_cast<Eigen::Index>(full[b * dt + t]));
      out(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = s;
    }
  if (kept_dims.empty()) kept_dims = {1};
  return DensityOperator(kept_dims, std::move(out), true);
}

struct HermitianEigen {
  Eigen::VectorXd eigenvalues;  // ascending
  Matrix eigenvectors;          // unitary, columns match eigenvalues
};

inline HermitianEigen herm_eig(const Matrix& m) {
  if (!is_hermitian(m)) throw PreconditionError("herm_eig: matrix is not Hermitian");
  // symmetrize so round-off in the input cannot leak into the solver
  const Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("herm_eig: eigensolver did not converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

inline HermitianEigen herm_eig(const LinearOperator& op) {
  if (!op.is_square()) throw DimensionError("herm_eig: operator is not square");
  return herm_eig(op.matrix);
}

/// e^{-iHt} through the eigendecomposition of H.
inline LinearOperator exp_hermitian(const LinearOperator& h, double t) {
  const auto eig = herm_eig(h);
  Vector phases(eig.eigenvalues.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) phases(k) = std::exp(Complex(0, -eig.eigenvalues(k) * t));
  return LinearOperator(h.dims_in, eig.eigenvectors * phases.asDiagonal() * eig.eigenvectors.adjoint());
}

/// Operator that moves the content of factor k to factor perm[k]. All
/// permuted factors must share one dimension.
inline LinearOperator permutation_operator(const std::vector<std::size_t>& perm, const Dims& dims) {
  const std::size_t m = dims.size();
  if (perm.size() != m) throw DimensionError("permutation length differs from factor count");
  std::vector<bool> seen(m, false);
  for (std::size_t k = 0; k < m; ++k) {
    if (perm[k] >= m || seen[perm[k]]) throw PreconditionError("not a permutation");
    seen[perm[k]] = true;
    if (dims[k] != dims[perm[k]]) throw DimensionError("permutation mixes factors of different dimension");
  }
  const std::size_t d = total_dim(dims);
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  std::vector<std::size_t> in_digits(m), out_digits(m);
  for (std::size_t f = 0; f < d; ++f) {
    std::size_t rem = f;
    for (std::size_t k = m; k-- > 0;) {
      in_digits[k] = rem % dims[k];
      rem /= dims[k];
    }
    for (std::size_t k = 0; k < m; ++k) out_digits[perm[k]] = in_digits[k];
    std::size_t g = 0;
    for (std::size_t k = 0; k < m; ++k) g = g * dims[k] + out_digits[k];
    out(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(f)) = 1.0;
  }
  return LinearOperator(dims, std::move(out));
}

/// Gram-Schmidt with column pivoting: repeatedly takes the remaining column
/// with the largest residual norm. Columns below `tolerance` are dropped.
inline Matrix orthonormalize_columns(const Matrix& columns, double tolerance = tol::algebraic) {
  Matrix residual = columns;
  std::vector<Vector> picked;
  std::vector<bool> used(static_cast<std::size_t>(columns.cols()), false);
  while (true) {
    Eigen::Index best = -1;
    double best_norm = tolerance;
    for (Eigen::Index c = 0; c < residual.cols(); ++c) {
      if (used[static_cast<std::size_t>(c)]) continue;
      const double nrm = residual.col(c).norm();
      if (nrm > best_norm + 1e-12) {  // earliest column wins ties
        best_norm = nrm;
        best = c;
      }
    }
    if (best < 0) break;
    used[static_cast<std::size_t>(best)] = true;
    Vector q = residual.col(best) / best_norm;
    // re-orthogonalize once against previous picks for stability
    for (const auto& p : picked) q -= p * p.dot(q);
    q.normalize();
    picked.push_back(q);
    for (Eigen::Index c = 0; c < residual.cols(); ++c)
      if (!used[static_cast<std::size_t>(c)]) residual.col(c) -= q * q.dot(residual.col(c));
  }
  Matrix out(columns.rows(), static_cast<Eigen::Index>(picked.size()));
  for (std::size_t k = 0; k < picked.size(); ++k) out.col(static_cast<Eigen::Index>(k)) = picked[k];
  return out;
}

/// Multiplies by a global phase so the first largest-magnitude amplitude is real positive.
inline Vector fix_global_phase(const Vector& v) {
  if (v.size() == 0) return v;
  const double top = v.cwiseAbs().maxCoeff();
  if (top == 0.0) return v;
  for (Eigen::Index k = 0; k < v.size(); ++k)
    if (std::abs(v(k)) >= top - 1e-9) return v * (std::conj(v(k)) / std::abs(v(k)));
  return v;
}

// JSON: complex numbers serialize as [re, im] pairs.

inline nlohmann::json complex_to_json(Complex z) { return nlohmann::json::array({z.real(), z.imag()}); }

inline nlohmann::json vector_to_json(const Vector& v) {
  auto out = nlohmann::json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(complex_to_json(v(k)));
  return out;
}

inline nlohmann::json matrix_to_json(const Matrix& m) {
  auto out = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    auto row = nlohmann::json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

/// Accepts a number or a [re, im] pair.
inline Complex complex_from_json(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw std::invalid_argument("expected a number or a [re, im] pair");
}

inline Vector vector_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("expected an array of amplitudes");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = complex_from_json(j[k]);
  return v;
}

inline Matrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw std::invalid_argument("expected a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (j[static_cast<std::size_t>(r)].size() != static_cast<std::size_t>(cols))
      throw std::invalid_argument("ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c)
      m(r, c) = complex_from_json(j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]);
  }
  return m;
}

}  // namespace qecw
