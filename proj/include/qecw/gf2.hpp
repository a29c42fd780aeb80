#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "qecw/tolerances.hpp"

namespace qecw {

/// Bit vector over GF(2), packed into 64-bit words.
class Gf2Vector {
 public:
  Gf2Vector() = default;
  explicit Gf2Vector(std::size_t size) : size_(size), words_((size + 63) / 64, 0) {}

  std::size_t size() const noexcept { return size_; }

  bool get(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1U; }
  void set(std::size_t i, bool v) {
    const std::uint64_t mask = std::uint64_t{1} << (i % 64);
    if (v)
      words_[i / 64] |= mask;
    else
      words_[i / 64] &= ~mask;
  }
  void flip(std::size_t i) { words_[i / 64] ^= std::uint64_t{1} << (i % 64); }

  Gf2Vector& operator^=(const Gf2Vector& o) {
    if (o.size_ != size_) throw DimensionError("gf2 vector length mismatch");
    for (std::size_t w = 0; w < words_.size(); ++w) words_[w] ^= o.words_[w];
    return *this;
  }
  friend Gf2Vector operator^(Gf2Vector a, const Gf2Vector& b) { return a ^= b; }

  /// Standard dot product over GF(2).
  bool dot(const Gf2Vector& o) const {
    if (o.size_ != size_) throw DimensionError("gf2 vector length mismatch");
    int parity = 0;
    for (std::size_t w = 0; w < words_.size(); ++w) parity ^= std::popcount(words_[w] & o.words_[w]) & 1;
    return parity != 0;
  }

  bool any() const noexcept {
    for (auto w : words_)
      if (w) return true;
    return false;
  }

  std::size_t popcount() const noexcept {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }

  std::string to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i)
      if (get(i)) s[i] = '1';
    return s;
  }

  friend bool operator==(const Gf2Vector&, const Gf2Vector&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Dense GF(2) matrix stored as rows.
class Gf2Matrix {
 public:
  Gf2Matrix(std::size_t rows, std::size_t cols) : cols_(cols), rows_(rows, Gf2Vector(cols)) {}
  explicit Gf2Matrix(std::size_t cols, std::vector<Gf2Vector> rows) : cols_(cols), rows_(std::move(rows)) {
    for (const auto& r : rows_)
      if (r.size() != cols_) throw DimensionError("gf2 matrix row length mismatch");
  }

  std::size_t rows() const noexcept { return rows_.size(); }
  std::size_t cols() const noexcept { return cols_; }
  bool get(std::size_t r, std::size_t c) const { return rows_[r].get(c); }
  void set(std::size_t r, std::size_t c, bool v) { rows_[r].set(c, v); }
  const Gf2Vector& row(std::size_t r) const { return rows_[r]; }

  Gf2Vector apply(const Gf2Vector& x) const {
    Gf2Vector y(rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r) y.set(r, rows_[r].dot(x));
    return y;
  }

  Gf2Matrix transpose() const {
    Gf2Matrix t(cols_, rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r)
      for (std::size_t c = 0; c < cols_; ++c)
        if (get(r, c)) t.set(c, r, true);
    return t;
  }

  friend Gf2Matrix operator*(const Gf2Matrix& a, const Gf2Matrix& b) {
    if (a.cols_ != b.rows()) throw DimensionError("gf2 matrix product shape mismatch");
    const Gf2Matrix bt = b.transpose();
    Gf2Matrix out(a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r)
      for (std::size_t c = 0; c < b.cols(); ++c) out.set(r, c, a.rows_[r].dot(bt.rows_[c]));
    return out;
  }

  static Gf2Matrix identity(std::size_t n) {
    Gf2Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m.set(i, i, true);
    return m;
  }

  friend bool operator==(const Gf2Matrix&, const Gf2Matrix&) = default;

  /// Reduced row echelon form; returns the pivot column of each nonzero row.
  std::vector<std::size_t> row_reduce() {
    std::vector<std::size_t> pivots;
    std::size_t lead = 0;
    for (std::size_t c = 0; c < cols_ && lead < rows_.size(); ++c) {
      std::size_t p = lead;
      while (p < rows_.size() && !rows_[p].get(c)) ++p;
      if (p == rows_.size()) continue;
      std::swap(rows_[p], rows_[lead]);
      for (std::size_t r = 0; r < rows_.size(); ++r)
        if (r != lead && rows_[r].get(c)) rows_[r] ^= rows_[lead];
      pivots.push_back(c);
      ++lead;
    }
    rows_.resize(lead);
    return pivots;
  }

  std::size_t rank() const {
    Gf2Matrix copy = *this;
    return copy.row_reduce().size();
  }

  /// Basis of {x : M x = 0}.
  std::vector<Gf2Vector> nullspace() const {
    Gf2Matrix rref = *this;
    const auto pivots = rref.row_reduce();
    std::vector<bool> is_pivot(cols_, false);
    for (auto p : pivots) is_pivot[p] = true;
    std::vector<Gf2Vector> basis;
    for (std::size_t free = 0; free < cols_; ++free) {
      if (is_pivot[free]) continue;
      Gf2Vector v(cols_);
      v.set(free, true);
      for (std::size_t r = 0; r < pivots.size(); ++r)
        if (rref.get(r, free)) v.set(pivots[r], true);
      basis.push_back(std::move(v));
    }
    return basis;
  }

 private:
  std::size_t cols_;
  std::vector<Gf2Vector> rows_;
};

/// Row-space membership oracle built once from a generating set.
class Gf2RowSpace {
 public:
  Gf2RowSpace(std::size_t cols, std::vector<Gf2Vector> rows) : basis_(cols, std::move(rows)) {
    pivots_ = basis_.row_reduce();
  }

  std::size_t dimension() const noexcept { return pivots_.size(); }

  bool contains(Gf2Vector v) const {
    for (std::size_t r = 0; r < pivots_.size(); ++r)
      if (v.get(pivots_[r])) v ^= basis_.row(r);
    return !v.any();
  }

 private:
  Gf2Matrix basis_;
  std::vector<std::size_t> pivots_;
};

}  // namespace qecw
