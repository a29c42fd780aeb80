#pragma once

// Detectability and correctability checks, the error-correlation matrix,
// decoder synthesis, dense minimum distance, commutants and the
// noiseless-qubit construction for three spins.

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "qecw/channels.hpp"
#include "qecw/codes.hpp"
#include "qecw/hilbert.hpp"
#include "qecw/pauli.hpp"

namespace qecw {

/// Labeled error operators on one space. By convention the identity comes first when present.
class ErrorSet {
 public:
  ErrorSet(Dims dims, std::vector<KrausOperator> ops) : dims_(std::move(dims)), ops_(std::move(ops)) {
    const auto d = static_cast<Eigen::Index>(total_dim(dims_));
    detail::check_cap(static_cast<std::size_t>(d));
    for (std::size_t i = 0; i < ops_.size(); ++i) {
      if (ops_[i].matrix.rows() != d || ops_[i].matrix.cols() != d) throw DimensionError("error " + ops_[i].label + " has wrong shape");
      for (std::size_t j = 0; j < i; ++j)
        if (ops_[j].label == ops_[i].label) throw PreconditionError("duplicate error label " + ops_[i].label);
    }
  }

  static ErrorSet from_paulis(const std::vector<PauliProduct>& words) {
    if (words.empty()) throw PreconditionError("empty Pauli error list");
    std::vector<KrausOperator> ops;
    for (const auto& w : words) ops.push_back({w.to_string(), dense(w).matrix});
    return ErrorSet(qubit_dims(words.front().size()), std::move(ops));
  }

  const Dims& dims() const noexcept { return dims_; }
  const std::vector<KrausOperator>& ops() const noexcept { return ops_; }
  std::size_t size() const noexcept { return ops_.size(); }

 private:
  Dims dims_;
  std::vector<KrausOperator> ops_;
};

/// Identity followed by every Pauli word of weight 1..max_weight over the alphabet.
inline std::vector<PauliProduct> pauli_words_up_to_weight(std::size_t n, std::size_t max_weight,
                                                          const std::vector<Pauli>& alphabet = {Pauli::X, Pauli::Y, Pauli::Z}) {
  std::vector<PauliProduct> out{PauliProduct(n)};
  for (std::size_t w = 1; w <= std::min(max_weight, n); ++w)
    for_each_pauli_of_weight(n, w, alphabet, [&](const PauliProduct& p) {
      out.push_back(p);
      return true;
    });
  return out;
}

// ---------------------------------------------------------------------------
// Classical checks

/// E is detectable iff it never maps one code word onto a different one.
inline bool detectable_classical(const ClassicalCode& code, const ClassicalMap& e) {
  if (e.table.size() != code.state_count()) throw DimensionError("error map is not total on the state set");
  const auto words = code.word_indices();
  for (auto x : words)
    for (auto y : words)
      if (x != y && e(x) == y) return false;
  return true;
}

struct ClassicalCorrection {
  bool correctable = false;
  /// Witness of failure: E_i x == E_j y with x != y.
  std::optional<std::string> collision;
  /// z <-> i(z) . dec(z), where the syndrome is the error label and the logical
  /// value is the index of the decoded code word. States not reached are fail.
  std::optional<ClassicalIdentification> identification;
};

inline ClassicalCorrection correctable_classical(const ClassicalCode& code, const std::vector<ClassicalMap>& errs) {
  const auto words = code.word_indices();
  const std::size_t states = code.state_count();
  for (const auto& e : errs)
    if (e.table.size() != states) throw DimensionError("error map is not total on the state set");
  ClassicalCorrection out;
  std::vector<std::optional<std::pair<std::size_t, std::size_t>>> origin(states);  // (error, word)
  for (std::size_t i = 0; i < errs.size(); ++i)
    for (std::size_t x = 0; x < words.size(); ++x) {
      const std::size_t z = errs[i](words[x]);
      if (origin[z] && origin[z]->second != x) {
        out.collision = errs[origin[z]->first].label + "(" + code.words[origin[z]->second] + ") == " + errs[i].label + "(" +
                        code.words[x] + ") == " + code.word_of(z);
        return out;
      }
      if (!origin[z]) origin[z] = std::make_pair(i, x);
    }
  out.correctable = true;
  ClassicalIdentification id{code, std::vector<std::optional<ClassicalIdentification::Entry>>(states)};
  for (std::size_t z = 0; z < states; ++z)
    if (origin[z]) id.table[z] = ClassicalIdentification::Entry{errs[origin[z]->first].label, std::to_string(origin[z]->second)};
  out.identification = std::move(id);
  return out;
}

// ---------------------------------------------------------------------------
// Quantum checks

struct DetectVerdict {
  bool detectable = false;
  Complex lambda{0, 0};  // meaningful when detectable
  double residual = 0;   // max |PEP - lambda P|
};

/// PEP = lambda P with lambda = tr(PEP)/tr(P).
inline DetectVerdict detectable_quantum(const CodeSubspace& code, const Matrix& e, double tolerance = tol::algebraic) {
  const auto d = static_cast<Eigen::Index>(code.physical_dim());
  if (e.rows() != d || e.cols() != d) throw DimensionError("error does not act on the code space");
  const Matrix p = code.projector_matrix();
  const Matrix pep = p * e * p;
  const Complex lambda = pep.trace() / static_cast<double>(code.dimension());
  DetectVerdict v;
  v.residual = max_abs(pep - lambda * p);
  v.detectable = v.residual <= tolerance;
  v.lambda = v.detectable ? lambda : Complex(0, 0);
  return v;
}

inline DetectVerdict detectable_quantum(const CodeSubspace& code, const LinearOperator& e, double tolerance = tol::algebraic) {
  if (e.dims_in != code.dims() || e.dims_out != code.dims()) throw DimensionError("error dims differ from code dims");
  return detectable_quantum(code, e.matrix, tolerance);
}

/// Orthogonality form of detectability: <psi|E|phi> = 0 whenever psi and phi
/// are orthogonal code states. Checked on basis pairs and on the rotated
/// pairs (|i> +- |j>)/sqrt2, (|i> +- i|j>)/sqrt2, which together pin down the
/// full condition.
inline bool detectable_by_orthogonality(const CodeSubspace& code, const Matrix& e, double tolerance = tol::algebraic) {
  const Matrix m = code.basis().adjoint() * e * code.basis();
  const auto k = m.rows();
  const Complex i1(0, 1);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) {
      if (a == b) continue;
      if (std::abs(m(a, b)) > tolerance) return false;
      for (Complex ph : {Complex(1, 0), i1}) {
        Vector u = Vector::Zero(k), w = Vector::Zero(k);
        u(a) = 1.0 / std::sqrt(2.0);
        u(b) = ph / std::sqrt(2.0);
        w(a) = 1.0 / std::sqrt(2.0);
        w(b) = -ph / std::sqrt(2.0);
        if (std::abs(u.dot(m * w)) > tolerance) return false;
      }
    }
  return true;
}

struct CorrectVerdict {
  bool correctable = false;
  Matrix lambda;  // lambda_ij with P E_i^dagger E_j P = lambda_ij P
  std::size_t rank = 0;
  std::optional<std::pair<std::string, std::string>> first_failure;
};

namespace detail {
/// Number of eigenvalues above rank_cutoff times the largest one.
inline std::size_t numerical_rank(const Eigen::VectorXd& eigenvalues) {
  if (eigenvalues.size() == 0) return 0;
  const double top = eigenvalues.maxCoeff();
  if (top <= 0) return 0;
  std::size_t s = 0;
  for (Eigen::Index k = 0; k < eigenvalues.size(); ++k) s += eigenvalues(k) > tol::rank_cutoff * top;
  return s;
}
}  // namespace detail

/// Correctable iff every E_i^dagger E_j is detectable.
inline CorrectVerdict correctable_quantum(const CodeSubspace& code, const ErrorSet& errs) {
  if (errs.dims() != code.dims()) throw DimensionError("error set dims differ from code dims");
  const auto n = static_cast<Eigen::Index>(errs.size());
  CorrectVerdict out;
  out.lambda = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const auto& ei = errs.ops()[static_cast<std::size_t>(i)];
      const auto& ej = errs.ops()[static_cast<std::size_t>(j)];
      const auto v = detectable_quantum(code, Matrix(ei.matrix.adjoint() * ej.matrix));
      if (!v.detectable) {
        out.first_failure = std::make_pair(ei.label, ej.label);
        return out;
      }
      out.lambda(i, j) = v.lambda;
    }
  if (!is_hermitian(out.lambda)) throw std::runtime_error("lambda matrix is not Hermitian");
  const auto eig = herm_eig(out.lambda);
  if (eig.eigenvalues.minCoeff() < -tol::algebraic) throw std::runtime_error("lambda matrix is not positive semidefinite");
  out.correctable = true;
  out.rank = detail::numerical_rank(eig.eigenvalues);
  return out;
}

struct Decoder {
  SubsystemIdentification identification;
  KrausChannel recovery;
  Matrix a;  // change of basis, errors x syndromes
  std::size_t rank;
};

/// Builds the canonical decoder for a correctable error set. The columns of
/// A diagonalize Lambda to the identity on its rank-s part, D_k = sum_i E_i a_ik,
/// and W maps |k>|l> to D_k|l_L>. Syndrome 0 is aligned with the first error,
/// so when that error is the identity the base syndrome block is the code.
inline Decoder synthesize_decoder(const CodeSubspace& code, const ErrorSet& errs) {
  const auto verdict = correctable_quantum(code, errs);
  if (!verdict.correctable)
    throw PreconditionError("error set is not correctable: " + verdict.first_failure->first + "^dagger " +
                            verdict.first_failure->second + " is not detectable");
  const Matrix& lambda = verdict.lambda;
  const auto m = lambda.rows();
  const auto s = static_cast<Eigen::Index>(verdict.rank);
  if (s == 0) throw PreconditionError("every error annihilates the code");

  Matrix a(m, s);
  const Matrix off = lambda - Matrix(lambda.diagonal().asDiagonal());
  if (max_abs(off) <= tol::algebraic) {
    // already orthogonal: one syndrome per error of nonzero weight
    const double top = lambda.diagonal().real().maxCoeff();
    Eigen::Index k = 0;
    a.setZero();
    for (Eigen::Index i = 0; i < m; ++i)
      if (lambda(i, i).real() > tol::rank_cutoff * top) a(i, k++) = 1.0 / std::sqrt(lambda(i, i).real());
  } else {
    const auto eig = herm_eig(lambda);
    const double top = eig.eigenvalues.maxCoeff();
    Matrix a0(m, s);
    Eigen::Index k = 0;
    for (Eigen::Index c = m; c-- > 0;)
      if (eig.eigenvalues(c) > tol::rank_cutoff * top) a0.col(k++) = eig.eigenvectors.col(c) / std::sqrt(eig.eigenvalues(c));
    // rotate within the syndrome space so that column 0 points along error 0
    const Vector v = a0.completeOrthogonalDecomposition().pseudoInverse().col(0);
    Matrix u = Matrix::Identity(s, s);
    if (v.norm() > tol::algebraic) {
      const Eigen::HouseholderQR<Matrix> qr{Matrix(v)};
      u = qr.householderQ() * Matrix::Identity(s, s);
      const Complex c = u.col(0).dot(v);
      u.col(0) *= c / std::abs(c);
    }
    a = a0 * u;
  }

  const auto dl = static_cast<Eigen::Index>(code.dimension());
  const auto dp = static_cast<Eigen::Index>(code.physical_dim());
  Matrix w(dp, s * dl);
  for (Eigen::Index k = 0; k < s; ++k) {
    Matrix dk = Matrix::Zero(dp, dp);
    for (Eigen::Index i = 0; i < m; ++i) dk += a(i, k) * errs.ops()[static_cast<std::size_t>(i)].matrix;
    w.middleCols(k * dl, dl) = dk * code.basis();
  }
  std::vector<std::string> labels;
  for (Eigen::Index k = 0; k < s; ++k) labels.push_back(std::to_string(k));
  SubsystemIdentification id(code.dims(), static_cast<std::size_t>(s), static_cast<std::size_t>(dl), w, 0, labels);

  std::vector<KrausOperator> ops;
  for (Eigen::Index k = 0; k < s; ++k)
    ops.push_back({"r" + std::to_string(k), code.basis() * id.syndrome_block(static_cast<std::size_t>(k)).adjoint()});
  const Matrix q = id.detector();
  if (max_abs(q) > tol::algebraic) ops.push_back({"fail", q});
  KrausChannel recovery(code.dims(), std::move(ops));
  return Decoder{std::move(id), std::move(recovery), std::move(a), static_cast<std::size_t>(s)};
}

/// Smallest weight of a Pauli word (over `alphabet`) that fails detectability.
/// Linearity reduces the check to the Pauli basis.
inline MinDistance min_distance_quantum(const CodeSubspace& code, const std::vector<Pauli>& alphabet = {Pauli::X, Pauli::Y, Pauli::Z},
                                        std::size_t cap = default_distance_cap) {
  for (auto d : code.dims())
    if (d != 2) throw PreconditionError("min_distance_quantum needs a qubit code");
  const std::size_t n = code.dims().size();
  MinDistance result{MinDistance::Status::no_logical_operator, 0, cap, std::nullopt};
  for (std::size_t w = 1; w <= n; ++w) {
    if (w > cap) {
      result.status = MinDistance::Status::exceeds_cap;
      return result;
    }
    for_each_pauli_of_weight(n, w, alphabet, [&](const PauliProduct& p) {
      if (detectable_quantum(code, dense(p).matrix).detectable) return true;
      result.witness = p;
      return false;
    });
    if (result.witness) {
      result.status = MinDistance::Status::found;
      result.distance = w;
      return result;
    }
  }
  return result;
}

/// Hermitian basis of {X : XE = EX for all E}, orthonormal under tr(A^dagger B).
/// The set is closed under adjoints first, so the result is a *-algebra.
inline std::vector<Matrix> commutant(const std::vector<Matrix>& errs) {
  if (errs.empty()) throw PreconditionError("commutant of an empty set");
  const auto d = errs.front().rows();
  detail::check_cap(static_cast<std::size_t>(d * d));
  const Matrix id = Matrix::Identity(d, d);
  Matrix gram = Matrix::Zero(d * d, d * d);
  for (const auto& e : errs) {
    if (e.rows() != d || e.cols() != d) throw DimensionError("commutant: operators have different shapes");
    for (const Matrix& f : {e, Matrix(e.adjoint())}) {
      // vec(XF - FX) = (F^T (x) 1 - 1 (x) F) vec(X), column-major vec
      const Matrix l = kron(Matrix(f.transpose()), id) - kron(id, f);
      gram.noalias() += l.adjoint() * l;
    }
  }
  const auto eig = herm_eig(gram);
  const double cutoff = tol::algebraic * std::max(1.0, eig.eigenvalues.maxCoeff());
  // Hermitian and anti-Hermitian parts, as real vectors (re, im) of length 2d^2
  Matrix parts(2 * d * d, 0);
  auto push = [&](const Matrix& h) {
    parts.conservativeResize(Eigen::NoChange, parts.cols() + 1);
    for (Eigen::Index k = 0; k < d * d; ++k) {
      const Complex z = h(k % d, k / d);
      parts(k, parts.cols() - 1) = z.real();
      parts(d * d + k, parts.cols() - 1) = z.imag();
    }
  };
  for (Eigen::Index c = 0; c < eig.eigenvalues.size(); ++c) {
    if (eig.eigenvalues(c) > cutoff) continue;
    Matrix x(d, d);
    for (Eigen::Index k = 0; k < d * d; ++k) x(k % d, k / d) = eig.eigenvectors(k, c);
    push(0.5 * (x + x.adjoint()));
    push(Complex(0, -0.5) * (x - x.adjoint()));
  }
  const Matrix ortho = orthonormalize_columns(parts, 1e-7);
  std::vector<Matrix> basis;
  for (Eigen::Index c = 0; c < ortho.cols(); ++c) {
    Matrix h(d, d);
    for (Eigen::Index k = 0; k < d * d; ++k) h(k % d, k / d) = Complex(ortho(k, c).real(), ortho(d * d + k, c).real());
    basis.push_back(std::move(h));
  }
  return basis;
}

/// (1/n!) sum of all factor permutations of n qubits: projector onto the symmetric subspace.
inline LinearOperator symmetric_projector(std::size_t n = 3) {
  const Dims dims = qubit_dims(n);
  const auto d = static_cast<Eigen::Index>(total_dim(dims));
  std::vector<std::size_t> perm(n);
  for (std::size_t k = 0; k < n; ++k) perm[k] = k;
  Matrix sum = Matrix::Zero(d, d);
  double count = 0;
  do {
    sum += permutation_operator(perm, dims).matrix;
    count += 1;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return LinearOperator(dims, sum / count);
}

/// Cyclic particle permutation |abc> -> |bca> and the swap of particles 2 and 3.
inline LinearOperator cyclic_permutation3() { return permutation_operator({2, 0, 1}, qubit_dims(3)); }
inline LinearOperator swap23() { return permutation_operator({0, 2, 1}, qubit_dims(3)); }

/// Rebuilds the three-spin noiseless qubit from the permutation symmetry:
/// restrict pi'_1 = (1 - P_sym) pi_1 to the 2J_z = 1 part of the spin-1/2
/// space, take its e^{-i2pi/3} eigenvector, then generate the other states
/// with pi'_2, 2J_x and pi'_2 2J_x.
inline SubsystemIdentification build_noiseless_qubit() {
  const Dims dims = qubit_dims(3);
  const Matrix id = Matrix::Identity(8, 8);
  const Matrix q = id - symmetric_projector(3).matrix;
  const Matrix p1 = q * cyclic_permutation3().matrix;
  const Matrix p2 = q * swap23().matrix;
  const Matrix jz2 = 2.0 * collective_spin(Pauli::Z, 3).matrix;
  const Matrix jx2 = 2.0 * collective_spin(Pauli::X, 3).matrix;

  // 2J_z = 1 eigenspace (one spin down), then its spin-1/2 part
  const auto ez = herm_eig(jz2);
  Matrix up_sector(8, 0);
  for (Eigen::Index c = 0; c < 8; ++c)
    if (std::abs(ez.eigenvalues(c) - 1.0) < tol::eigen) {
      up_sector.conservativeResize(Eigen::NoChange, up_sector.cols() + 1);
      up_sector.col(up_sector.cols() - 1) = ez.eigenvectors.col(c);
    }
  const Matrix b = orthonormalize_columns(q * up_sector);
  if (b.cols() != 2) throw std::runtime_error("spin-1/2 sector with 2J_z = 1 is not two-dimensional");

  const Matrix r = b.adjoint() * p1 * b;
  Eigen::ComplexEigenSolver<Matrix> es(r);
  const Complex target = std::exp(Complex(0, -2.0 * std::acos(-1.0) / 3.0));
  Eigen::Index pick = 0;
  for (Eigen::Index k = 1; k < es.eigenvalues().size(); ++k)
    if (std::abs(es.eigenvalues()(k) - target) < std::abs(es.eigenvalues()(pick) - target)) pick = k;
  if (std::abs(es.eigenvalues()(pick) - target) > tol::eigen) throw std::runtime_error("no e^{-i2pi/3} eigenvector of pi'_1");
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
    if (k != pick && std::abs(es.eigenvalues()(k) - target) < 1e-6) throw std::runtime_error("degenerate eigenspace of pi'_1");

  const Vector psi = fix_global_phase((b * es.eigenvectors().col(pick)).normalized());
  Matrix w(8, 4);
  w.col(0) = psi;
  w.col(1) = (p2 * psi).normalized();
  w.col(2) = (jx2 * psi).normalized();
  w.col(3) = (p2 * jx2 * psi).normalized();
  return SubsystemIdentification(dims, 2, 2, std::move(w), 0, {"up", "down"});
}

/// How an operator looks through an identification: weight sent outside
/// the identified subspace, and the distance of W^dagger E W from the
/// closest M (x) 1 (syndrome-only action).
struct FactorizationCheck {
  double leakage;
  double deviation;
  Matrix syndrome_action;  // M
};

inline FactorizationCheck factorization_check(const SubsystemIdentification& id, const Matrix& e) {
  const Matrix& w = id.isometry();
  if (e.rows() != w.rows() || e.cols() != w.rows()) throw DimensionError("operator does not act on the identified space");
  const Matrix ew = e * w;
  const Matrix inner = w.adjoint() * ew;
  const auto ds = static_cast<Eigen::Index>(id.syndrome_dim());
  const auto dl = static_cast<Eigen::Index>(id.logical_dim());
  Matrix m(ds, ds);
  for (Eigen::Index a = 0; a < ds; ++a)
    for (Eigen::Index b = 0; b < ds; ++b) m(a, b) = inner.block(a * dl, b * dl, dl, dl).trace() / static_cast<double>(dl);
  const double leak = max_abs(ew - w * inner);
  const double dev = max_abs(inner - kron(m, Matrix::Identity(dl, dl)));
  return {leak, dev, std::move(m)};
}

// ---------------------------------------------------------------------------
// Verdict records

inline nlohmann::ordered_json to_json(const DetectVerdict& v) {
  nlohmann::ordered_json j;
  j["detectable"] = v.detectable;
  j["lambda"] = complex_to_json(v.lambda);
  return j;
}

inline nlohmann::ordered_json to_json(const CorrectVerdict& v) {
  nlohmann::ordered_json j;
  j["correctable"] = v.correctable;
  j["lambda_matrix"] = matrix_to_json(v.lambda);
  j["rank"] = v.rank;
  return j;
}

}  // namespace qecw
