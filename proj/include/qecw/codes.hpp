#pragma once

// Concrete codes and subsystem identifications: classical and quantum
// repetition, the 7-state cyclic system, the trivial two-qubit code, the
// three-spin noiseless qubit and the five-qubit stabilizer code.

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qecw/hilbert.hpp"
#include "qecw/pauli.hpp"

namespace qecw {

/// A code given by an orthonormal basis of its subspace (one column per code word).
class CodeSubspace {
 public:
  CodeSubspace(Dims dims, Matrix basis) : dims_(std::move(dims)), basis_(std::move(basis)) {
    detail::check_dims(dims_, basis_.rows(), "code subspace");
    if (basis_.cols() == 0) throw PreconditionError("code subspace is empty");
    if (!is_isometry(basis_)) throw PreconditionError("code basis is not orthonormal");
  }

  static CodeSubspace from_states(const std::vector<StateVector>& states) {
    if (states.empty()) throw PreconditionError("code subspace is empty");
    return CodeSubspace(states.front().dims, stack_columns(states));
  }

  const Dims& dims() const noexcept { return dims_; }
  const Matrix& basis() const noexcept { return basis_; }
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(basis_.cols()); }
  std::size_t physical_dim() const noexcept { return static_cast<std::size_t>(basis_.rows()); }

  Matrix projector_matrix() const { return basis_ * basis_.adjoint(); }
  LinearOperator projector() const { return LinearOperator(dims_, projector_matrix()); }

  StateVector state(std::size_t k) const { return StateVector(dims_, basis_.col(static_cast<Eigen::Index>(k))); }

  /// Code state sum_k c_k |k_L>.
  StateVector encode(const Vector& coefficients) const {
    if (coefficients.size() != basis_.cols()) throw DimensionError("logical coefficient count mismatch");
    return StateVector(dims_, basis_ * coefficients);
  }

 private:
  Dims dims_;
  Matrix basis_;
};

/// Isometry W from syndrome (x) logical into the physical space. Column
/// s * logical_dim + l is the physical image of |s>|l>. A partial
/// identification (fewer columns than rows) carries the detector 1 - WW^dagger.
class SubsystemIdentification {
 public:
  SubsystemIdentification(Dims physical_dims, std::size_t syndrome_dim, std::size_t logical_dim, Matrix w,
                          std::size_t syndrome_base, std::vector<std::string> syndrome_labels = {})
      : physical_dims_(std::move(physical_dims)),
        syndrome_dim_(syndrome_dim),
        logical_dim_(logical_dim),
        w_(std::move(w)),
        syndrome_base_(syndrome_base),
        syndrome_labels_(std::move(syndrome_labels)) {
    detail::check_dims(physical_dims_, w_.rows(), "identification");
    if (syndrome_dim_ == 0 || logical_dim_ == 0) throw DimensionError("identification factors must be nonzero");
    if (static_cast<std::size_t>(w_.cols()) != syndrome_dim_ * logical_dim_)
      throw DimensionError("identification isometry has the wrong number of columns");
    if (!is_isometry(w_)) throw PreconditionError("identification map is not an isometry");
    if (syndrome_base_ >= syndrome_dim_) throw DimensionError("syndrome base out of range");
    if (syndrome_labels_.empty())
      for (std::size_t s = 0; s < syndrome_dim_; ++s) syndrome_labels_.push_back(std::to_string(s));
    if (syndrome_labels_.size() != syndrome_dim_) throw DimensionError("syndrome label count mismatch");
  }

  const Dims& physical_dims() const noexcept { return physical_dims_; }
  std::size_t syndrome_dim() const noexcept { return syndrome_dim_; }
  std::size_t logical_dim() const noexcept { return logical_dim_; }
  std::size_t syndrome_base() const noexcept { return syndrome_base_; }
  const Matrix& isometry() const noexcept { return w_; }
  const std::vector<std::string>& syndrome_labels() const noexcept { return syndrome_labels_; }
  Dims pair_dims() const { return {syndrome_dim_, logical_dim_}; }
  bool is_partial() const noexcept { return w_.cols() < w_.rows(); }

  Eigen::Index column(std::size_t s, std::size_t l) const {
    return static_cast<Eigen::Index>(s * logical_dim_ + l);
  }

  /// Physical state identified with |s>|l>.
  StateVector pair_state(std::size_t s, std::size_t l) const { return StateVector(physical_dims_, w_.col(column(s, l))); }

  /// Columns with syndrome s, as a physical x logical isometry.
  Matrix syndrome_block(std::size_t s) const {
    return w_.middleCols(column(s, 0), static_cast<Eigen::Index>(logical_dim_));
  }

  CodeSubspace code_subspace() const { return CodeSubspace(physical_dims_, syndrome_block(syndrome_base_)); }

  StateVector encode(const StateVector& logical) const {
    if (logical.dim() != logical_dim_) throw DimensionError("encode: logical state has the wrong dimension");
    return StateVector(physical_dims_, syndrome_block(syndrome_base_) * logical.amplitudes);
  }

  DensityOperator encode(const DensityOperator& logical) const {
    if (logical.dim() != logical_dim_) throw DimensionError("encode: logical state has the wrong dimension");
    const Matrix b = syndrome_block(syndrome_base_);
    return DensityOperator(physical_dims_, b * logical.matrix * b.adjoint(), true);
  }

  /// Projector onto the complement of the identified subspace.
  Matrix detector() const {
    const auto d = w_.rows();
    return Matrix::Identity(d, d) - w_ * w_.adjoint();
  }

  double leakage(const DensityOperator& rho) const {
    check_physical(rho);
    return (detector() * rho.matrix).trace().real();
  }

  /// W^dagger rho W on syndrome (x) logical; trace is 1 - leakage.
  DensityOperator to_pair(const DensityOperator& rho) const {
    check_physical(rho);
    return DensityOperator(pair_dims(), w_.adjoint() * rho.matrix * w_, true);
  }

  /// Logical factor of the identified part of rho (unnormalized if rho leaks).
  DensityOperator logical(const DensityOperator& rho) const { return partial_trace(to_pair(rho), {1}); }

  /// Syndrome distribution of the identified part of rho.
  std::vector<double> syndrome_probabilities(const DensityOperator& rho) const {
    const DensityOperator s = partial_trace(to_pair(rho), {0});
    std::vector<double> out;
    for (std::size_t k = 0; k < syndrome_dim_; ++k) out.push_back(s.matrix(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)).real());
    return out;
  }

 private:
  void check_physical(const DensityOperator& rho) const {
    if (rho.dims != physical_dims_) throw DimensionError("state does not live on the identified physical space");
  }

  Dims physical_dims_;
  std::size_t syndrome_dim_;
  std::size_t logical_dim_;
  Matrix w_;
  std::size_t syndrome_base_;
  std::vector<std::string> syndrome_labels_;
};

/// Replaces the syndrome factor by the base state while keeping the logical
/// factor. Throws DetectionError if rho has weight outside the identified subspace.
inline DensityOperator syndrome_reset(const SubsystemIdentification& id, const DensityOperator& rho,
                                      double tolerance = tol::algebraic) {
  const double leaked = id.leakage(rho);
  if (leaked > tolerance) throw DetectionError("state has support outside the identified subspace", leaked);
  const DensityOperator logical = id.logical(rho);
  return id.encode(logical);
}

// ---------------------------------------------------------------------------
// Classical codes

/// Words of a given length over digits 0..alphabet-1. States are indexed by
/// reading the word as a base-`alphabet` number, first position most significant.
struct ClassicalCode {
  std::size_t alphabet;
  std::size_t length;
  std::vector<std::string> words;

  ClassicalCode(std::size_t alphabet_size, std::size_t word_length, std::vector<std::string> code_words)
      : alphabet(alphabet_size), length(word_length), words(std::move(code_words)) {
    if (alphabet < 2 || alphabet > 10) throw PreconditionError("classical alphabet must have 2..10 symbols");
    for (std::size_t i = 0; i < words.size(); ++i) {
      index_of(words[i]);
      for (std::size_t j = 0; j < i; ++j)
        if (words[i] == words[j]) throw PreconditionError("duplicate code word " + words[i]);
    }
  }

  std::size_t state_count() const {
    std::size_t n = 1;
    for (std::size_t k = 0; k < length; ++k) n *= alphabet;
    return n;
  }

  std::size_t index_of(std::string_view word) const {
    if (word.size() != length) throw DimensionError("word has the wrong length");
    std::size_t idx = 0;
    for (char c : word) {
      const int digit = c - '0';
      if (digit < 0 || static_cast<std::size_t>(digit) >= alphabet) throw PreconditionError("symbol outside alphabet");
      idx = idx * alphabet + static_cast<std::size_t>(digit);
    }
    return idx;
  }

  std::string word_of(std::size_t index) const {
    std::string w(length, '0');
    for (std::size_t k = length; k-- > 0;) {
      w[k] = static_cast<char>('0' + index % alphabet);
      index /= alphabet;
    }
    return w;
  }

  std::vector<std::size_t> word_indices() const {
    std::vector<std::size_t> out;
    for (const auto& w : words) out.push_back(index_of(w));
    return out;
  }
};

/// A total map on the state set, given as a table of image indices.
struct ClassicalMap {
  std::string label;
  std::vector<std::size_t> table;

  std::size_t operator()(std::size_t x) const { return table.at(x); }
  bool is_invertible() const {
    std::vector<bool> hit(table.size(), false);
    for (auto y : table) {
      if (y >= table.size() || hit[y]) return false;
      hit[y] = true;
    }
    return true;
  }
};

inline ClassicalMap identity_map(const ClassicalCode& space) {
  ClassicalMap m{"id", {}};
  for (std::size_t x = 0; x < space.state_count(); ++x) m.table.push_back(x);
  return m;
}

/// Flips the binary digits at the given 0-based positions.
inline ClassicalMap flip_map(const ClassicalCode& space, const std::vector<std::size_t>& positions, std::string label = "") {
  if (space.alphabet != 2) throw PreconditionError("bit flips need a binary alphabet");
  if (label.empty()) {
    label = "flip";
    for (auto p : positions) label += std::to_string(p + 1);
  }
  ClassicalMap m{std::move(label), {}};
  for (std::size_t x = 0; x < space.state_count(); ++x) {
    std::string w = space.word_of(x);
    for (auto p : positions) {
      if (p >= space.length) throw DimensionError("flip position out of range");
      w[p] = w[p] == '0' ? '1' : '0';
    }
    m.table.push_back(space.index_of(w));
  }
  return m;
}

/// Cyclic shift x -> x + k mod alphabet on a one-symbol state space.
inline ClassicalMap shift_map(const ClassicalCode& space, int k) {
  if (space.length != 1) throw PreconditionError("shift maps act on single-symbol states");
  ClassicalMap m{"s" + std::to_string(k), {}};
  const long long d = static_cast<long long>(space.alphabet);
  for (long long x = 0; x < d; ++x) m.table.push_back(static_cast<std::size_t>(((x + k) % d + d) % d));
  return m;
}

/// Per-state identification: state <-> syndrome . logical, or fail.
struct ClassicalIdentification {
  struct Entry {
    std::string syndrome;
    std::string logical;
  };
  ClassicalCode space;
  std::vector<std::optional<Entry>> table;

  const std::optional<Entry>& at(std::string_view word) const { return table.at(space.index_of(word)); }
  std::string decode(std::string_view word) const {
    const auto& e = at(word);
    return e ? e->logical : std::string("fail");
  }
};

inline ClassicalCode repetition_classical() { return ClassicalCode(2, 3, {"000", "111"}); }

/// Majority vote over the three bits of a word.
inline char majority_decode(std::string_view word) {
  if (word.size() != 3) throw DimensionError("majority decode needs three bits");
  int ones = 0;
  for (char c : word) {
    if (c != '0' && c != '1') throw PreconditionError("majority decode needs a binary word");
    ones += c == '1';
  }
  return ones >= 2 ? '1' : '0';
}

/// Probability that independent flips with probability p defeat majority decoding.
template <class T>
T repetition_failure_probability(const T& p) {
  const T q = T(1) - p;
  return T(3) * p * p * q + p * p * p;
}

/// The 8-row identification of three bits with a two-bit syndrome and the
/// majority-decoded bit. The syndrome records which single flip would explain
/// the word: 00 none, 10 first bit, 01 second bit, 11 third bit.
inline ClassicalIdentification repetition_identification() {
  ClassicalIdentification id{ClassicalCode(2, 3, {"000", "111"}), std::vector<std::optional<ClassicalIdentification::Entry>>(8)};
  const std::vector<std::pair<std::string, std::string>> rows = {
      {"000", "00"}, {"001", "11"}, {"010", "01"}, {"100", "10"},
      {"111", "00"}, {"110", "11"}, {"101", "01"}, {"011", "10"}};
  for (const auto& [word, syndrome] : rows)
    id.table[id.space.index_of(word)] = ClassicalIdentification::Entry{syndrome, std::string(1, majority_decode(word))};
  return id;
}

/// Two bits ab <-> F(ab) . P(ab) with F the first bit and P the parity.
/// Flipping both bits changes F only.
inline ClassicalIdentification classical_parity_identification() {
  ClassicalIdentification id{ClassicalCode(2, 2, {}), std::vector<std::optional<ClassicalIdentification::Entry>>(4)};
  for (std::size_t x = 0; x < 4; ++x) {
    const std::string w = id.space.word_of(x);
    const char parity = (w[0] == w[1]) ? '0' : '1';
    id.table[x] = ClassicalIdentification::Entry{std::string(1, w[0]), std::string(1, parity)};
  }
  return id;
}

// ---------------------------------------------------------------------------
// Quantum codes

namespace detail {
inline std::size_t syndrome_index(std::string_view bits) {
  std::size_t v = 0;
  for (char c : bits) v = 2 * v + static_cast<std::size_t>(c == '1');
  return v;
}
}  // namespace detail

/// Three qubits identified with a two-qubit syndrome and the majority qubit,
/// following the classical table row by row.
inline SubsystemIdentification repetition_quantum() {
  const auto table = repetition_identification();
  Matrix w = Matrix::Zero(8, 8);
  for (std::size_t x = 0; x < 8; ++x) {
    const auto& e = *table.table[x];
    const std::size_t s = detail::syndrome_index(e.syndrome);
    const std::size_t l = e.logical == "1" ? 1 : 0;
    w(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(s * 2 + l)) = 1.0;
  }
  return SubsystemIdentification(qubit_dims(3), 4, 2, std::move(w), 0, {"00", "01", "10", "11"});
}

/// Physical |3l + s> <-> |s - 1> . |l> on the 7-state system; |6> is outside
/// and is detected as a failure. Base syndrome is 0 (index 1).
inline SubsystemIdentification cyclic7() {
  Matrix w = Matrix::Zero(7, 6);
  for (std::size_t l = 0; l < 2; ++l)
    for (std::size_t s = 0; s < 3; ++s) w(static_cast<Eigen::Index>(3 * l + s), static_cast<Eigen::Index>(s * 2 + l)) = 1.0;
  return SubsystemIdentification({7}, 3, 2, std::move(w), 1, {"-1", "0", "1"});
}

/// Syndrome on qubit 1, information on qubit 2, encoding psi -> |0>|psi>.
inline SubsystemIdentification trivial_two_qubit() {
  return SubsystemIdentification(qubit_dims(2), 2, 2, Matrix::Identity(4, 4), 0, {"0", "1"});
}

/// Four states of three spin-1/2 particles identified with a spin-1/2
/// syndrome (up, down) and a noiseless qubit. Up is |0>, down is |1>.
inline SubsystemIdentification three_spin_noiseless() {
  const double pi = std::acos(-1.0);
  const Complex w = std::exp(Complex(0, 2 * pi / 3));
  const Complex wb = std::conj(w);
  const double r = 1.0 / std::sqrt(3.0);
  Matrix m = Matrix::Zero(8, 4);
  // basis index a1*4 + a2*2 + a3; w = e^{i2pi/3}, wb its conjugate
  m(4, 0) = r;       // |duu>
  m(2, 0) = r * wb;  // |udu>
  m(1, 0) = r * w;   // |uud>
  m(4, 1) = r;
  m(2, 1) = r * w;
  m(1, 1) = r * wb;
  m(3, 2) = -r;       // |udd>
  m(5, 2) = -r * wb;  // |dud>
  m(6, 2) = -r * w;   // |ddu>
  m(3, 3) = -r;
  m(5, 3) = -r * w;
  m(6, 3) = -r * wb;
  return SubsystemIdentification(qubit_dims(3), 2, 2, std::move(m), 0, {"up", "down"});
}

/// Joint +1 eigenspace of the generators: columns of prod (1 + A)/2,
/// orthonormalized with column pivoting.
inline CodeSubspace stabilizer_codespace(const StabilizerGeneratorSet& s) {
  const std::size_t n = s.size();
  const Dims dims = qubit_dims(n);
  detail::check_cap(total_dim(dims));
  const auto d = static_cast<Eigen::Index>(total_dim(dims));
  Matrix p = Matrix::Identity(d, d);
  for (const auto& g : s.generators()) p = 0.5 * (Matrix::Identity(d, d) + dense(g).matrix) * p;
  Matrix basis = orthonormalize_columns(p);
  const std::size_t expected = std::size_t{1} << s.logical_qubits();
  if (static_cast<std::size_t>(basis.cols()) != expected)
    throw PreconditionError("inconsistent stabilizer: -1 lies in the generated group");
  return CodeSubspace(dims, std::move(basis));
}

struct StabilizerCode {
  StabilizerGeneratorSet generators;
  CodeSubspace code;
};

inline StabilizerCode five_qubit() {
  auto s = StabilizerGeneratorSet::parse({"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"});
  auto code = stabilizer_codespace(s);
  return {std::move(s), std::move(code)};
}

inline StabilizerGeneratorSet repetition_stabilizer() { return StabilizerGeneratorSet::parse({"ZZI", "ZIZ"}); }

}  // namespace qecw
