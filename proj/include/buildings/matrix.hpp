#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>

#include "buildings/error.hpp"
#include "buildings/gf.hpp"

namespace buildings {

// Dense n x n matrix over GF(q), n <= 4.  Value type; all arithmetic exact.
struct Mat {
  const FieldSpec* f = nullptr;
  int n = 0;
  std::array<std::uint8_t, 16> e{};  // row-major

  static Mat identity(const FieldSpec& f, int n) {
    Mat m;
    m.f = &f;
    m.n = n;
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }

  std::uint8_t& at(int i, int j) { return e[i * n + j]; }
  std::uint8_t at(int i, int j) const { return e[i * n + j]; }

  friend Mat operator*(const Mat& a, const Mat& b) {
    if (a.f != b.f || a.n != b.n) fail(Errc::field_mismatch, "matrix shape/field mismatch");
    Mat r;
    r.f = a.f;
    r.n = a.n;
    for (int i = 0; i < a.n; ++i)
      for (int j = 0; j < a.n; ++j) {
        int acc = 0;
        for (int k = 0; k < a.n; ++k) acc = a.f->add(acc, a.f->mul(a.at(i, k), b.at(k, j)));
        r.at(i, j) = static_cast<std::uint8_t>(acc);
      }
    return r;
  }
  friend bool operator==(const Mat& a, const Mat& b) {
    return a.f == b.f && a.n == b.n && a.e == b.e;
  }
  friend bool operator<(const Mat& a, const Mat& b) { return a.e < b.e; }

  Mat transpose() const {
    Mat r = *this;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) r.at(i, j) = at(j, i);
    return r;
  }

  // Gauss-Jordan inverse.
  Mat inverse() const {
    Mat a = *this, r = identity(*f, n);
    for (int col = 0; col < n; ++col) {
      int piv = -1;
      for (int row = col; row < n; ++row)
        if (a.at(row, col) != 0) { piv = row; break; }
      if (piv < 0) fail(Errc::schema, "singular matrix");
      if (piv != col)
        for (int j = 0; j < n; ++j) {
          std::swap(a.e[piv * n + j], a.e[col * n + j]);
          std::swap(r.e[piv * n + j], r.e[col * n + j]);
        }
      int s = f->inv(a.at(col, col));
      for (int j = 0; j < n; ++j) {
        a.at(col, j) = static_cast<std::uint8_t>(f->mul(a.at(col, j), s));
        r.at(col, j) = static_cast<std::uint8_t>(f->mul(r.at(col, j), s));
      }
      for (int row = 0; row < n; ++row) {
        if (row == col || a.at(row, col) == 0) continue;
        int c = a.at(row, col);
        for (int j = 0; j < n; ++j) {
          a.at(row, j) = static_cast<std::uint8_t>(f->sub(a.at(row, j), f->mul(c, a.at(col, j))));
          r.at(row, j) = static_cast<std::uint8_t>(f->sub(r.at(row, j), f->mul(c, r.at(col, j))));
        }
      }
    }
    return r;
  }

  int det() const {
    Mat a = *this;
    int d = 1;
    for (int col = 0; col < n; ++col) {
      int piv = -1;
      for (int row = col; row < n; ++row)
        if (a.at(row, col) != 0) { piv = row; break; }
      if (piv < 0) return 0;
      if (piv != col) {
        for (int j = 0; j < n; ++j) std::swap(a.e[piv * n + j], a.e[col * n + j]);
        d = f->neg(d);
      }
      d = f->mul(d, a.at(col, col));
      int s = f->inv(a.at(col, col));
      for (int row = col + 1; row < n; ++row) {
        int c = f->mul(a.at(row, col), s);
        for (int j = 0; j < n; ++j)
          a.at(row, j) = static_cast<std::uint8_t>(f->sub(a.at(row, j), f->mul(c, a.at(col, j))));
      }
    }
    return d;
  }

  bool is_upper_triangular() const {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j)
        if (at(i, j) != 0) return false;
    return true;
  }

  // Exactly one nonzero entry per row and per column.
  bool is_monomial() const {
    for (int i = 0; i < n; ++i) {
      int cnt = 0;
      for (int j = 0; j < n; ++j)
        if (at(i, j) != 0) ++cnt;
      if (cnt != 1) return false;
    }
    for (int j = 0; j < n; ++j) {
      int cnt = 0;
      for (int i = 0; i < n; ++i)
        if (at(i, j) != 0) ++cnt;
      if (cnt != 1) return false;
    }
    return true;
  }

  // Canonical representative of the coset M B, where B is the full upper
  // triangular subgroup: column-reduced form.  Allowed moves are scaling a
  // column and adding multiples of earlier columns to later ones; pivots are
  // the bottom-most nonzero entries, normalized to 1, with the pivot rows
  // cleared in all later columns.
  Mat column_reduced() const {
    Mat a = *this;
    std::array<int, 4> pivot_row{};
    for (int j = 0; j < n; ++j) {
      int pr = -1;
      for (int i = n - 1; i >= 0; --i) {
        bool taken = false;
        for (int k = 0; k < j; ++k)
          if (pivot_row[k] == i) taken = true;
        if (!taken && a.at(i, j) != 0) { pr = i; break; }
      }
      // Clear entries in already-pivoted rows using earlier columns first;
      // those cannot change rows below, so find the pivot afterwards again.
      for (int k = 0; k < j; ++k) {
        int i = pivot_row[k];
        if (a.at(i, j) == 0) continue;
        int c = a.at(i, j);
        for (int r = 0; r < n; ++r)
          a.at(r, j) = static_cast<std::uint8_t>(f->sub(a.at(r, j), f->mul(c, a.at(r, k))));
      }
      pr = -1;
      for (int i = n - 1; i >= 0; --i)
        if (a.at(i, j) != 0) { pr = i; break; }
      if (pr < 0) fail(Errc::schema, "singular matrix in column reduction");
      pivot_row[j] = pr;
      int s = f->inv(a.at(pr, j));
      for (int r = 0; r < n; ++r) a.at(r, j) = static_cast<std::uint8_t>(f->mul(a.at(r, j), s));
    }
    return a;
  }

  std::string str() const {
    std::string s;
    for (int i = 0; i < n; ++i) {
      s += i == 0 ? "[" : " ";
      for (int j = 0; j < n; ++j) s += std::to_string(int(at(i, j))) + (j + 1 < n ? "," : "");
      s += i + 1 < n ? ";" : "]";
    }
    return s;
  }
};

struct MatKey {
  std::array<std::uint8_t, 17> bytes{};
  friend bool operator==(const MatKey&, const MatKey&) = default;
  friend bool operator<(const MatKey& a, const MatKey& b) { return a.bytes < b.bytes; }
};

inline MatKey mat_key(const Mat& m) {
  MatKey k;
  k.bytes[0] = static_cast<std::uint8_t>(m.n);
  for (int i = 0; i < m.n * m.n; ++i) k.bytes[i + 1] = m.e[i];
  return k;
}

struct MatKeyHash {
  size_t operator()(const MatKey& k) const {
    size_t h = 1469598103934665603ull;
    for (auto b : k.bytes) {
      h ^= b;
      h *= 1099511628211ull;
    }
    return h;
  }
};

}  // namespace buildings
