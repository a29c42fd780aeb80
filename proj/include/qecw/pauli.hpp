#pragma once

// Pauli products and stabilizer generator sets in the binary symplectic
// picture. Each qubit carries a 2-bit symbol I=00, X=01, Y=10, Z=11; under
// this encoding the product of two Pauli words is the XOR of their symbols
// and anticommutation is x^T B y = 1 with B = diag([[0,1],[1,0]], ...).

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "qecw/gf2.hpp"
#include "qecw/tolerances.hpp"

namespace qecw {

/// Single-qubit Pauli; the enumerator value is its 2-bit symbol.
enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline char pauli_char(Pauli p) { return "IXYZ"[static_cast<int>(p)]; }

inline std::optional<Pauli> pauli_from_char(char c) {
  switch (c) {
    case 'I': return Pauli::I;
    case 'X': return Pauli::X;
    case 'Y': return Pauli::Y;
    case 'Z': return Pauli::Z;
    default: return std::nullopt;
  }
}

/// n-qubit Pauli word with an exact phase i^k, k in {0,1,2,3}.
class PauliProduct {
 public:
  static constexpr std::size_t max_qubits = 64;

  PauliProduct() = default;

  /// Identity on n qubits.
  explicit PauliProduct(std::size_t n) : n_(n) {
    if (n > max_qubits) throw DimensionError("pauli product longer than 64 qubits");
  }

  PauliProduct(const std::vector<Pauli>& symbols, int phase_exponent = 0) : PauliProduct(symbols.size()) {
    for (std::size_t q = 0; q < symbols.size(); ++q) set(q, symbols[q]);
    phase_ = static_cast<std::uint8_t>(((phase_exponent % 4) + 4) % 4);
  }

  /// Parses "[+|-|+i|-i]WORD" with WORD over {I,X,Y,Z}.
  static PauliProduct parse(std::string_view text) {
    int phase = 0;
    if (text.starts_with("+i")) {
      phase = 1;
      text.remove_prefix(2);
    } else if (text.starts_with("-i")) {
      phase = 3;
      text.remove_prefix(2);
    } else if (text.starts_with("+")) {
      text.remove_prefix(1);
    } else if (text.starts_with("-")) {
      phase = 2;
      text.remove_prefix(1);
    }
    if (text.empty()) throw std::invalid_argument("empty pauli word");
    std::vector<Pauli> symbols;
    symbols.reserve(text.size());
    for (char c : text) {
      auto p = pauli_from_char(c);
      if (!p) throw std::invalid_argument("invalid pauli symbol '" + std::string(1, c) + "'");
      symbols.push_back(*p);
    }
    if (symbols.size() > max_qubits) throw DimensionError("pauli product longer than 64 qubits");
    return PauliProduct(symbols, phase);
  }

  /// Single-qubit operator `p` on qubit `q` (0-based) of an n-qubit register.
  static PauliProduct single(std::size_t n, std::size_t q, Pauli p) {
    PauliProduct out(n);
    out.set(q, p);
    return out;
  }

  std::size_t size() const noexcept { return n_; }

  Pauli at(std::size_t q) const {
    const unsigned hi = (hi_ >> q) & 1U;
    const unsigned lo = (lo_ >> q) & 1U;
    return static_cast<Pauli>((hi << 1) | lo);
  }

  void set(std::size_t q, Pauli p) {
    if (q >= n_) throw DimensionError("qubit index out of range");
    const std::uint64_t mask = std::uint64_t{1} << q;
    const auto code = static_cast<unsigned>(p);
    hi_ = (code & 2U) ? (hi_ | mask) : (hi_ & ~mask);
    lo_ = (code & 1U) ? (lo_ | mask) : (lo_ & ~mask);
  }

  /// Number of non-identity tensor factors.
  std::size_t weight() const noexcept { return static_cast<std::size_t>(std::popcount(hi_ | lo_)); }

  int phase_exponent() const noexcept { return phase_; }
  std::complex<double> phase() const {
    static constexpr std::complex<double> table[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return table[phase_];
  }

  PauliProduct with_phase(int exponent) const {
    PauliProduct out = *this;
    out.phase_ = static_cast<std::uint8_t>(((exponent % 4) + 4) % 4);
    return out;
  }
  PauliProduct without_phase() const { return with_phase(0); }

  bool is_identity() const noexcept { return (hi_ | lo_) == 0; }

  bool same_up_to_phase(const PauliProduct& o) const noexcept {
    return n_ == o.n_ && hi_ == o.hi_ && lo_ == o.lo_;
  }

  std::string to_string() const {
    static constexpr const char* tokens[4] = {"", "+i", "-", "-i"};
    std::string s = tokens[phase_];
    for (std::size_t q = 0; q < n_; ++q) s.push_back(pauli_char(at(q)));
    return s;
  }

  /// Length-2n binary vector (b1 b0 per qubit, qubit 1 first).
  Gf2Vector to_binary() const {
    Gf2Vector v(2 * n_);
    for (std::size_t q = 0; q < n_; ++q) {
      v.set(2 * q, (hi_ >> q) & 1U);
      v.set(2 * q + 1, (lo_ >> q) & 1U);
    }
    return v;
  }

  static PauliProduct from_binary(const Gf2Vector& v, int phase_exponent = 0) {
    if (v.size() % 2 != 0) throw DimensionError("binary pauli vector must have even length");
    std::vector<Pauli> symbols(v.size() / 2);
    for (std::size_t q = 0; q < symbols.size(); ++q)
      symbols[q] = static_cast<Pauli>((v.get(2 * q) ? 2 : 0) | (v.get(2 * q + 1) ? 1 : 0));
    return PauliProduct(symbols, phase_exponent);
  }

  std::uint64_t hi_bits() const noexcept { return hi_; }
  std::uint64_t lo_bits() const noexcept { return lo_; }

  friend bool operator==(const PauliProduct&, const PauliProduct&) = default;
  friend auto operator<=>(const PauliProduct& a, const PauliProduct& b) {
    return std::tie(a.n_, a.hi_, a.lo_, a.phase_) <=> std::tie(b.n_, b.hi_, b.lo_, b.phase_);
  }

 private:
  std::size_t n_ = 0;
  std::uint64_t hi_ = 0;
  std::uint64_t lo_ = 0;
  std::uint8_t phase_ = 0;
};

/// Symplectic product x^T B y over GF(2).
inline int symplectic_product(const PauliProduct& a, const PauliProduct& b) {
  if (a.size() != b.size()) throw DimensionError("pauli length mismatch");
  const std::uint64_t cross = (a.hi_bits() & b.lo_bits()) ^ (a.lo_bits() & b.hi_bits());
  return std::popcount(cross) & 1;
}

inline bool commutes(const PauliProduct& a, const PauliProduct& b) { return symplectic_product(a, b) == 0; }

/// Exact product a·b including the phase.
inline PauliProduct multiply(const PauliProduct& a, const PauliProduct& b) {
  if (a.size() != b.size()) throw DimensionError("pauli length mismatch");
  // exponent of i in sigma_a * sigma_b, indexed by symbol codes
  static constexpr int phase_table[4][4] = {
      // I  X  Y  Z
      {0, 0, 0, 0},  // I
      {0, 0, 1, 3},  // X: XY = iZ, XZ = -iY
      {0, 3, 0, 1},  // Y: YX = -iZ, YZ = iX
      {0, 1, 3, 0},  // Z: ZX = iY, ZY = -iX
  };
  int phase = a.phase_exponent() + b.phase_exponent();
  std::vector<Pauli> symbols(a.size());
  for (std::size_t q = 0; q < a.size(); ++q) {
    const auto pa = static_cast<int>(a.at(q));
    const auto pb = static_cast<int>(b.at(q));
    phase += phase_table[pa][pb];
    symbols[q] = static_cast<Pauli>(pa ^ pb);
  }
  return PauliProduct(symbols, phase);
}

inline PauliProduct operator*(const PauliProduct& a, const PauliProduct& b) { return multiply(a, b); }

/// The 2n x 2n block-diagonal form B with blocks [[0,1],[1,0]].
struct SymplecticForm {
  std::size_t n;
  Gf2Matrix matrix;

  explicit SymplecticForm(std::size_t qubits) : n(qubits), matrix(2 * qubits, 2 * qubits) {
    for (std::size_t q = 0; q < n; ++q) {
      matrix.set(2 * q, 2 * q + 1, true);
      matrix.set(2 * q + 1, 2 * q, true);
    }
  }

  bool product(const Gf2Vector& x, const Gf2Vector& y) const { return x.dot(matrix.apply(y)); }
};

/// Commuting Pauli generators of a stabilizer group.
class StabilizerGeneratorSet {
 public:
  StabilizerGeneratorSet(std::size_t n, std::vector<PauliProduct> generators)
      : n_(n), generators_(std::move(generators)) {
    for (const auto& g : generators_) {
      if (g.size() != n_) throw DimensionError("generator length differs from code length");
      if (g.phase_exponent() != 0) throw PreconditionError("stabilizer generators must carry phase +1");
    }
    for (std::size_t i = 0; i < generators_.size(); ++i)
      for (std::size_t j = i + 1; j < generators_.size(); ++j)
        if (!commutes(generators_[i], generators_[j]))
          throw PreconditionError("generators " + generators_[i].to_string() + " and " +
                                  generators_[j].to_string() + " anticommute");
  }

  static StabilizerGeneratorSet parse(const std::vector<std::string>& words) {
    if (words.empty()) throw std::invalid_argument("stabilizer needs at least one generator to fix its length");
    std::vector<PauliProduct> gens;
    for (const auto& w : words) gens.push_back(PauliProduct::parse(w));
    const std::size_t n = gens.front().size();
    return StabilizerGeneratorSet(n, std::move(gens));
  }

  std::size_t size() const noexcept { return n_; }
  const std::vector<PauliProduct>& generators() const noexcept { return generators_; }

  std::vector<Gf2Vector> binary_rows() const {
    std::vector<Gf2Vector> rows;
    for (const auto& g : generators_) rows.push_back(g.to_binary());
    return rows;
  }

  std::size_t rank() const { return Gf2Matrix(2 * n_, binary_rows()).rank(); }

  /// True when no generator is a product of the others (up to phase).
  bool is_minimal() const { return rank() == generators_.size(); }

  /// Number of encoded qubits, n - rank.
  std::size_t logical_qubits() const { return n_ - rank(); }

 private:
  std::size_t n_;
  std::vector<PauliProduct> generators_;
};

/// All products of generators, modulo phase, sorted.
inline std::vector<PauliProduct> generated_set(const StabilizerGeneratorSet& s) {
  std::vector<PauliProduct> out{PauliProduct(s.size())};
  for (const auto& g : s.generators()) {
    const auto gg = g.without_phase();
    if (std::any_of(out.begin(), out.end(), [&](const PauliProduct& p) { return p.same_up_to_phase(gg); }))
      continue;
    const std::size_t current = out.size();
    for (std::size_t i = 0; i < current; ++i) out.push_back(multiply(out[i], gg).without_phase());
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Membership in the generated group, ignoring phase.
inline bool in_generated_set(const StabilizerGeneratorSet& s, const PauliProduct& p) {
  return Gf2RowSpace(2 * s.size(), s.binary_rows()).contains(p.to_binary());
}

/// GF(2) basis of the Pauli products commuting with every generator.
inline std::vector<PauliProduct> centralizer(const StabilizerGeneratorSet& s) {
  const std::size_t n = s.size();
  const SymplecticForm form(n);
  std::vector<Gf2Vector> rows;
  for (const auto& g : s.generators()) rows.push_back(form.matrix.apply(g.to_binary()));
  std::vector<PauliProduct> basis;
  for (const auto& v : Gf2Matrix(2 * n, rows).nullspace()) basis.push_back(PauliProduct::from_binary(v));
  return basis;
}

/// Visits every Pauli word of exactly `weight` non-identity factors drawn
/// from `alphabet`. Stops early when `visit` returns false.
inline bool for_each_pauli_of_weight(std::size_t n, std::size_t weight, const std::vector<Pauli>& alphabet,
                                     const std::function<bool(const PauliProduct&)>& visit) {
  if (weight > n) return true;
  std::vector<std::size_t> support(weight);
  for (std::size_t i = 0; i < weight; ++i) support[i] = i;
  std::vector<std::size_t> letters(weight, 0);
  while (true) {
    std::fill(letters.begin(), letters.end(), 0);
    while (true) {
      PauliProduct p(n);
      for (std::size_t i = 0; i < weight; ++i) p.set(support[i], alphabet[letters[i]]);
      if (!visit(p)) return false;
      std::size_t i = 0;
      while (i < weight && ++letters[i] == alphabet.size()) letters[i++] = 0;
      if (i == weight) break;
    }
    // next combination in lexicographic order
    std::size_t i = weight;
    while (i > 0 && support[i - 1] == n - weight + i - 1) --i;
    if (i == 0) return true;
    ++support[i - 1];
    for (std::size_t j = i; j < weight; ++j) support[j] = support[j - 1] + 1;
  }
}

inline std::vector<Pauli> parse_alphabet(std::string_view letters) {
  std::vector<Pauli> out;
  for (char c : letters) {
    auto p = pauli_from_char(c);
    if (!p || *p == Pauli::I) throw std::invalid_argument("alphabet must be drawn from X, Y, Z");
    if (std::find(out.begin(), out.end(), *p) == out.end()) out.push_back(*p);
  }
  if (out.empty()) throw std::invalid_argument("empty alphabet");
  return out;
}

/// Outcome of a capped minimum-distance search.
struct MinDistance {
  enum class Status { found, exceeds_cap, no_logical_operator };
  Status status;
  std::size_t distance = 0;  // valid when status == found
  std::size_t cap = 0;
  std::optional<PauliProduct> witness;

  bool found() const noexcept { return status == Status::found; }
};

inline constexpr std::size_t default_distance_cap = 5;

/// Smallest weight of a Pauli word (over `alphabet`) that commutes with every
/// generator but is not itself a stabilizer element.
inline MinDistance stabilizer_min_distance(const StabilizerGeneratorSet& s,
                                           const std::vector<Pauli>& alphabet = {Pauli::X, Pauli::Y, Pauli::Z},
                                           std::size_t cap = default_distance_cap) {
  if (s.generators().empty()) throw PreconditionError("minimum distance needs a nonempty stabilizer");
  const std::size_t n = s.size();
  const Gf2RowSpace group(2 * n, s.binary_rows());
  MinDistance result{MinDistance::Status::no_logical_operator, 0, cap, std::nullopt};
  for (std::size_t w = 1; w <= n; ++w) {
    if (w > cap) {
      result.status = MinDistance::Status::exceeds_cap;
      return result;
    }
    for_each_pauli_of_weight(n, w, alphabet, [&](const PauliProduct& p) {
      for (const auto& g : s.generators())
        if (!commutes(g, p)) return true;
      if (group.contains(p.to_binary())) return true;
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

}  // namespace qecw
