#pragma once

// Error models as environment-labeled operator sums: each Kraus operator
// A_e carries the label of the formal environment state |e> it came with.

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "qecw/hilbert.hpp"
#include "qecw/pauli.hpp"

namespace qecw {

struct KrausOperator {
  std::string label;
  Matrix matrix;
};

class KrausChannel {
 public:
  static constexpr std::size_t default_op_cap = std::size_t{1} << 16;

  KrausChannel(Dims dims, std::vector<KrausOperator> ops, std::optional<std::set<std::string>> bad_labels = std::nullopt)
      : dims_(std::move(dims)), ops_(std::move(ops)), bad_(std::move(bad_labels)) {
    if (ops_.empty()) throw PreconditionError("channel needs at least one operator");
    const auto d = static_cast<Eigen::Index>(total_dim(dims_));
    detail::check_cap(static_cast<std::size_t>(d));
    std::set<std::string> seen;
    for (const auto& op : ops_) {
      if (op.matrix.rows() != d || op.matrix.cols() != d) throw DimensionError("kraus operator " + op.label + " has wrong shape");
      if (!seen.insert(op.label).second) throw PreconditionError("duplicate kraus label " + op.label);
    }
    if (bad_)
      for (const auto& b : *bad_)
        if (!seen.count(b)) throw PreconditionError("bad label " + b + " is not a channel label");
    if (completeness_defect() > tol::algebraic) throw PreconditionError("kraus operators are not trace preserving");
  }

  const Dims& dims() const noexcept { return dims_; }
  std::size_t dim() const { return total_dim(dims_); }
  const std::vector<KrausOperator>& ops() const noexcept { return ops_; }
  const std::optional<std::set<std::string>>& bad_labels() const noexcept { return bad_; }

  KrausChannel with_bad_labels(std::set<std::string> bad) const { return KrausChannel(dims_, ops_, std::move(bad)); }

  const KrausOperator& op(const std::string& label) const {
    for (const auto& o : ops_)
      if (o.label == label) return o;
    throw std::out_of_range("no kraus operator labeled " + label);
  }

  /// max |sum_e A_e^dagger A_e - 1|.
  double completeness_defect() const {
    const auto d = static_cast<Eigen::Index>(dim());
    Matrix s = Matrix::Zero(d, d);
    for (const auto& op : ops_) s += op.matrix.adjoint() * op.matrix;
    return max_abs(s - Matrix::Identity(d, d));
  }

 private:
  Dims dims_;
  std::vector<KrausOperator> ops_;
  std::optional<std::set<std::string>> bad_;
};

/// Random application of Pauli words with probabilities p_v.
class PauliChannel {
 public:
  PauliChannel(std::size_t n, std::map<PauliProduct, double> probs) : n_(n), probs_(std::move(probs)) {
    double total = 0;
    for (const auto& [p, w] : probs_) {
      if (p.size() != n_) throw DimensionError("pauli channel word length mismatch");
      if (p.phase_exponent() != 0) throw PreconditionError("pauli channel words must carry phase +1");
      if (w < -tol::algebraic) throw PreconditionError("negative pauli channel probability");
      total += w;
    }
    if (std::abs(total - 1.0) > tol::algebraic) throw PreconditionError("pauli channel probabilities do not sum to 1");
  }

  std::size_t size() const noexcept { return n_; }
  const std::map<PauliProduct, double>& probabilities() const noexcept { return probs_; }

  double probability(const PauliProduct& p) const {
    auto it = probs_.find(p.without_phase());
    return it == probs_.end() ? 0.0 : it->second;
  }
  double probability(std::string_view word) const { return probability(PauliProduct::parse(word)); }

 private:
  std::size_t n_;
  std::map<PauliProduct, double> probs_;
};

namespace detail {
inline void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) throw PreconditionError(std::string(what) + ": probability outside [0, 1]");
}
}  // namespace detail

inline KrausChannel identity_channel(const Dims& dims) {
  const auto d = static_cast<Eigen::Index>(total_dim(dims));
  return KrausChannel(dims, {{"id", Matrix::Identity(d, d)}});
}

/// Depolarization with probability p, five labeled events:
/// sqrt(1-p)|0>1 + sqrt(p)/2 (|1>1 + |x>X + |y>Y + |z>Z).
inline KrausChannel depolarizing(double p) {
  detail::check_probability(p, "depolarizing");
  const double a = std::sqrt(1.0 - p);
  const double b = std::sqrt(p) / 2.0;
  return KrausChannel({2}, {{"0", a * pauli(Pauli::I).matrix},
                            {"1", b * pauli(Pauli::I).matrix},
                            {"x", b * pauli(Pauli::X).matrix},
                            {"y", b * pauli(Pauli::Y).matrix},
                            {"z", b * pauli(Pauli::Z).matrix}});
}

inline KrausChannel bit_flip(double p) {
  detail::check_probability(p, "bit_flip");
  return KrausChannel({2}, {{"I", std::sqrt(1.0 - p) * pauli(Pauli::I).matrix}, {"X", std::sqrt(p) * pauli(Pauli::X).matrix}});
}

/// Cyclic shift s_k |l> = |l + k mod dim>.
inline Matrix shift_operator(int k, std::size_t dim) {
  const auto d = static_cast<Eigen::Index>(dim);
  Matrix m = Matrix::Zero(d, d);
  const long long dd = static_cast<long long>(dim);
  for (long long l = 0; l < dd; ++l) m((((l + k) % dd) + dd) % dd, l) = 1.0;
  return m;
}

/// Truncated Gaussian shift distribution q e^{-k^2}, |k| <= K, renormalized.
struct GaussianShiftModel {
  int truncation;
  double q;
  std::vector<std::pair<int, double>> probabilities;  // k ascending from -K

  double probability(int k) const {
    for (const auto& [kk, p] : probabilities)
      if (kk == k) return p;
    return 0.0;
  }
};

inline constexpr int default_gaussian_truncation = 20;

inline GaussianShiftModel gaussian_shift_model(int truncation = default_gaussian_truncation) {
  if (truncation < 2) throw PreconditionError("gaussian shift truncation must be at least 2");
  double z = 0;
  for (int k = -truncation; k <= truncation; ++k) z += std::exp(-static_cast<double>(k) * k);
  GaussianShiftModel model{truncation, 1.0 / z, {}};
  for (int k = -truncation; k <= truncation; ++k) model.probabilities.emplace_back(k, model.q * std::exp(-static_cast<double>(k) * k));
  return model;
}

inline KrausChannel gaussian_shift(std::size_t dim = 7, int truncation = default_gaussian_truncation) {
  const auto model = gaussian_shift_model(truncation);
  std::vector<KrausOperator> ops;
  for (const auto& [k, p] : model.probabilities) ops.push_back({"s" + std::to_string(k), std::sqrt(p) * shift_operator(k, dim)});
  return KrausChannel({dim}, std::move(ops));
}

/// Total spin component J_u = (sigma_u^(1) + ... + sigma_u^(n)) / 2.
inline LinearOperator collective_spin(Pauli u, std::size_t n) {
  const Dims dims = qubit_dims(n);
  const auto d = static_cast<Eigen::Index>(total_dim(dims));
  Matrix sum = Matrix::Zero(d, d);
  for (std::size_t q = 0; q < n; ++q) sum += embed(pauli(u), q, dims).matrix;
  return LinearOperator(dims, 0.5 * sum);
}

/// Collective error E(v) = exp(-i v.J) on three spins, as a one-operator channel.
inline LinearOperator collective_error(const std::array<double, 3>& v, std::size_t n = 3) {
  const LinearOperator h =
      v[0] * collective_spin(Pauli::X, n) + (v[1] * collective_spin(Pauli::Y, n) + v[2] * collective_spin(Pauli::Z, n));
  return exp_hermitian(h, 1.0);
}

inline KrausChannel collective_rotation(const std::array<double, 3>& v) {
  return KrausChannel(qubit_dims(3), {{"E", collective_error(v).matrix}});
}

inline KrausChannel pauli_channel_to_kraus(const PauliChannel& ch) {
  std::vector<KrausOperator> ops;
  for (const auto& [p, w] : ch.probabilities()) ops.push_back({p.to_string(), std::sqrt(std::max(w, 0.0)) * dense(p).matrix});
  return KrausChannel(qubit_dims(ch.size()), std::move(ops));
}

/// Operator-sum action sum_e A_e rho A_e^dagger.
inline DensityOperator apply(const KrausChannel& ch, const DensityOperator& rho) {
  if (rho.dims != ch.dims()) throw DimensionError("channel/state dims mismatch");
  Matrix out = Matrix::Zero(rho.matrix.rows(), rho.matrix.cols());
  for (const auto& op : ch.ops()) out.noalias() += op.matrix * rho.matrix * op.matrix.adjoint();
  return DensityOperator(rho.dims, std::move(out), true);
}

/// Channel `second` after channel `first`.
inline KrausChannel compose(const KrausChannel& second, const KrausChannel& first) {
  if (second.dims() != first.dims()) throw DimensionError("compose: dims mismatch");
  std::vector<KrausOperator> ops;
  for (const auto& b : second.ops())
    for (const auto& a : first.ops()) ops.push_back({b.label + "*" + a.label, b.matrix * a.matrix});
  return KrausChannel(first.dims(), std::move(ops));
}

/// n-fold independent product channel; labels are concatenated per unit.
inline KrausChannel tensor_independent(const KrausChannel& ch, std::size_t n, std::size_t op_cap = KrausChannel::default_op_cap) {
  if (n == 0) throw PreconditionError("tensor_independent needs n >= 1");
  double count = 1;
  for (std::size_t k = 0; k < n; ++k) count *= static_cast<double>(ch.ops().size());
  if (count > static_cast<double>(op_cap)) throw PreconditionError("tensor_independent: operator count exceeds cap");
  bool short_labels = true;
  for (const auto& op : ch.ops()) short_labels = short_labels && op.label.size() == 1;
  const std::string sep = short_labels ? "" : ".";

  std::vector<KrausOperator> ops = ch.ops();
  Dims dims = ch.dims();
  for (std::size_t k = 1; k < n; ++k) {
    detail::check_cap(total_dim(dims) * ch.dim());
    std::vector<KrausOperator> next;
    next.reserve(ops.size() * ch.ops().size());
    for (const auto& a : ops)
      for (const auto& b : ch.ops()) next.push_back({a.label + sep + b.label, kron(a.matrix, b.matrix)});
    ops = std::move(next);
    dims = concat_dims(dims, ch.dims());
  }
  return KrausChannel(dims, std::move(ops));
}

/// Product channel a (x) b on the concatenated space.
inline KrausChannel tensor(const KrausChannel& a, const KrausChannel& b, std::size_t op_cap = KrausChannel::default_op_cap) {
  if (a.ops().size() * b.ops().size() > op_cap) throw PreconditionError("tensor: operator count exceeds cap");
  detail::check_cap(a.dim() * b.dim());
  std::vector<KrausOperator> ops;
  for (const auto& x : a.ops())
    for (const auto& y : b.ops()) ops.push_back({x.label + "." + y.label, kron(x.matrix, y.matrix)});
  return KrausChannel(concat_dims(a.dims(), b.dims()), std::move(ops));
}

/// Random choice among unitaries: sqrt(p_k) U_k with labels u0, u1, ...
inline KrausChannel unitary_mixture(const Dims& dims, const std::vector<double>& probs, const std::vector<Matrix>& unitaries) {
  if (probs.size() != unitaries.size() || probs.empty()) throw DimensionError("unitary_mixture: one probability per unitary");
  std::vector<KrausOperator> ops;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    detail::check_probability(probs[k], "unitary_mixture");
    if (!is_unitary(unitaries[k])) throw PreconditionError("unitary_mixture: operator is not unitary");
    ops.push_back({"u" + std::to_string(k), std::sqrt(probs[k]) * unitaries[k]});
  }
  return KrausChannel(dims, std::move(ops));
}

/// At most one bit flip on n qubits: nothing with probability 1 - p, X on
/// qubit i with probability p/n each. Labels I, X1, ..., Xn.
inline KrausChannel single_flip_noise(double p, std::size_t n = 3) {
  detail::check_probability(p, "single_flip_noise");
  const Dims dims = qubit_dims(n);
  const auto d = static_cast<Eigen::Index>(total_dim(dims));
  std::vector<KrausOperator> ops{{"I", std::sqrt(1.0 - p) * Matrix::Identity(d, d)}};
  for (std::size_t q = 0; q < n; ++q)
    ops.push_back({"X" + std::to_string(q + 1), std::sqrt(p / static_cast<double>(n)) * embed(pauli(Pauli::X), q, dims).matrix});
  return KrausChannel(dims, std::move(ops));
}

/// A_e = <e| U |env_init> for a joint unitary U on environment (x) system.
inline KrausChannel channel_from_unitary(const LinearOperator& u, const StateVector& env_init,
                                         const std::vector<StateVector>& env_basis) {
  if (!u.is_unitary()) throw PreconditionError("channel_from_unitary: coupling is not unitary");
  const std::size_t de = env_init.dim();
  if (de == 0 || u.dims_in.size() <= env_init.dims.size() ||
      !std::equal(env_init.dims.begin(), env_init.dims.end(), u.dims_in.begin()))
    throw DimensionError("channel_from_unitary: environment dims do not lead the coupling dims");
  const Dims sys(u.dims_in.begin() + static_cast<std::ptrdiff_t>(env_init.dims.size()), u.dims_in.end());
  const auto ds = static_cast<Eigen::Index>(total_dim(sys));
  if (env_basis.size() != de) throw DimensionError("channel_from_unitary: environment basis is incomplete");
  if (!is_isometry(stack_columns(env_basis))) throw PreconditionError("channel_from_unitary: environment basis not orthonormal");

  const Matrix id = Matrix::Identity(ds, ds);
  const Matrix lift = kron(Matrix(env_init.amplitudes), id);  // (de*ds) x ds
  std::vector<KrausOperator> ops;
  for (std::size_t e = 0; e < de; ++e) {
    const Matrix bra = kron(Matrix(env_basis[e].amplitudes.adjoint()), id);  // ds x (de*ds)
    ops.push_back({"e" + std::to_string(e), bra * u.matrix * lift});
  }
  return KrausChannel(sys, std::move(ops));
}

/// Re-expresses the operator sum through a unitary remixing of its labels:
/// B_f = sum_e U_fe A_e. The channel itself is unchanged.
inline KrausChannel remix(const KrausChannel& ch, const Matrix& u) {
  const auto k = static_cast<Eigen::Index>(ch.ops().size());
  if (u.rows() != k || u.cols() != k || !is_unitary(u)) throw PreconditionError("remix needs a unitary of the label count");
  std::vector<KrausOperator> ops;
  for (Eigen::Index f = 0; f < k; ++f) {
    Matrix b = Matrix::Zero(ch.ops().front().matrix.rows(), ch.ops().front().matrix.cols());
    for (Eigen::Index e = 0; e < k; ++e) b += u(f, e) * ch.ops()[static_cast<std::size_t>(e)].matrix;
    ops.push_back({"m" + std::to_string(f), std::move(b)});
  }
  return KrausChannel(ch.dims(), std::move(ops));
}

/// Choi matrix sum_ij |i><j| (x) E(|i><j|).
inline Matrix choi(const KrausChannel& ch) {
  const auto d = static_cast<Eigen::Index>(ch.dim());
  Matrix j = Matrix::Zero(d * d, d * d);
  for (const auto& op : ch.ops()) {
    Vector v = Vector::Zero(d * d);
    for (Eigen::Index i = 0; i < d; ++i) v.segment(i * d, d) = op.matrix.col(i);
    j.noalias() += v * v.adjoint();
  }
  return j;
}

/// Pauli twirl of a one-qubit channel: p_v = sum_e |alpha_ev|^2 where
/// A_e = sum_v alpha_ev sigma_v.
inline PauliChannel twirl(const KrausChannel& ch) {
  if (ch.dims() != Dims{2}) throw PreconditionError("twirl is defined for one-qubit channels only");
  std::map<PauliProduct, double> probs;
  for (Pauli v : {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z}) {
    const Matrix sigma = pauli(v).matrix;
    double pv = 0;
    for (const auto& op : ch.ops()) pv += std::norm((sigma * op.matrix).trace() / 2.0);
    probs[PauliProduct(std::vector<Pauli>{v})] = pv;
  }
  return PauliChannel(1, std::move(probs));
}

/// The 24 one-qubit rotations generated by 90-degree turns about x, y, z,
/// each normalized so its first nonzero entry is real positive.
inline const std::vector<Matrix>& rotation_group() {
  static const std::vector<Matrix> group = [] {
    auto canonical = [](const Matrix& m) {
      for (Eigen::Index k = 0; k < m.size(); ++k) {
        const Complex z = m(k % 2, k / 2);
        if (std::abs(z) > 1e-9) return Matrix(m * (std::conj(z) / std::abs(z)));
      }
      return m;
    };
    const double quarter = std::acos(-1.0) / 4.0;  // exp(-i sigma pi/4) is a 90 degree rotation
    std::vector<Matrix> gens;
    for (Pauli u : {Pauli::X, Pauli::Y, Pauli::Z}) gens.push_back(exp_hermitian(pauli(u), quarter).matrix);
    std::vector<Matrix> elems{Matrix::Identity(2, 2)};
    for (std::size_t i = 0; i < elems.size(); ++i)
      for (const auto& g : gens) {
        Matrix cand = canonical(g * elems[i]);
        bool known = false;
        for (const auto& e : elems) known = known || max_abs(e - cand) < 1e-9;
        if (!known) elems.push_back(std::move(cand));
      }
    return elems;
  }();
  return group;
}

/// p such that depolarizing(p) has the same non-identity mass: (4/3)(pX+pY+pZ).
inline double depolarizing_parameter(const PauliChannel& ch) {
  if (ch.size() != 1) throw PreconditionError("depolarizing parameter is defined for one-qubit channels");
  return 4.0 / 3.0 * (ch.probability("X") + ch.probability("Y") + ch.probability("Z"));
}

/// Averages a one-qubit Pauli channel over the rotation group. The result is
/// depolarizing; it is returned in Pauli form {I, X, Y, Z} with
/// probabilities (1 - 3p/4, p/4, p/4, p/4), which stays valid for p up to 4/3.
inline KrausChannel clifford_twirl(const PauliChannel& ch) {
  if (ch.size() != 1) throw PreconditionError("clifford_twirl is defined for one-qubit channels");
  const std::array<Pauli, 4> basis{Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
  std::array<double, 4> avg{};
  const auto& group = rotation_group();
  for (const auto& u : group) {
    // U^dagger sigma_v U = +-sigma_w: the event sigma_v is relabeled to sigma_w
    for (std::size_t v = 0; v < 4; ++v) {
      const Matrix conj = u.adjoint() * pauli(basis[v]).matrix * u;
      for (std::size_t w = 0; w < 4; ++w)
        if (std::abs((pauli(basis[w]).matrix * conj).trace()) > 1.0)
          avg[w] += ch.probability(PauliProduct(std::vector<Pauli>{basis[v]})) / static_cast<double>(group.size());
    }
  }
  std::map<PauliProduct, double> probs;
  for (std::size_t w = 0; w < 4; ++w) probs[PauliProduct(std::vector<Pauli>{basis[w]})] = avg[w];
  return pauli_channel_to_kraus(PauliChannel(1, std::move(probs)));
}

}  // namespace qecw
