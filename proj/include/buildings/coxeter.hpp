#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "buildings/error.hpp"
#include "buildings/zsqrt2.hpp"

namespace buildings {

// Generators are indices 0..rank-1; words are sequences of indices.
using Word = std::vector<std::uint8_t>;

// Coxeter matrix with m_st restricted to {2,3,4} off the diagonal.  Rank-2
// parabolic types are then A1xA1, A2 or B2, which is exactly what the rank-2
// engines support.
struct CoxeterMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<int>> m;

  int rank() const { return static_cast<int>(names.size()); }

  int order(int s, int t) const { return m[s][t]; }

  int index_of(const std::string& name) const {
    for (int i = 0; i < rank(); ++i)
      if (names[i] == name) return i;
    fail(Errc::unknown_generator, "no generator named '" + name + "'");
  }

  void validate() const {
    const int n = rank();
    if (static_cast<int>(m.size()) != n) fail(Errc::schema, "matrix size != rank");
    for (int i = 0; i < n; ++i) {
      if (static_cast<int>(m[i].size()) != n) fail(Errc::schema, "matrix row size != rank");
      if (m[i][i] != 1) fail(Errc::unsupported_order, "diagonal entries must be 1");
      for (int j = 0; j < n; ++j) {
        if (m[i][j] != m[j][i]) fail(Errc::schema, "matrix not symmetric");
        if (i != j && (m[i][j] < 2 || m[i][j] > 4))
          fail(Errc::unsupported_order, "m_st must lie in {2,3,4}, got " + std::to_string(m[i][j]));
      }
    }
  }

  // 2*cos(pi/m_st): 0, 1 or sqrt(2).
  Zr2 c(int s, int t) const {
    switch (m[s][t]) {
      case 2: return {0, 0};
      case 3: return {1, 0};
      case 4: return {0, 1};
      default: fail(Errc::unsupported_order, "unsupported order in reflection action");
    }
  }
};

using Vec = std::vector<Zr2>;  // coordinates in the simple-root basis

inline Vec basis_vec(const CoxeterMatrix& cm, int s) {
  Vec v(cm.rank());
  v[s] = {1, 0};
  return v;
}

// sigma_s(v): negate the s-coordinate contribution, v - 2B(alpha_s, v) alpha_s.
inline void apply_gen(const CoxeterMatrix& cm, int s, Vec& v) {
  Zr2 acc = -v[s];
  for (int t = 0; t < cm.rank(); ++t)
    if (t != s && !v[t].is_zero()) acc = acc + cm.c(s, t) * v[t];
  v[s] = acc;
}

// +1 if v is a positive root vector, -1 if negative.  Every root vector has
// all coordinates of one sign in the geometric representation.
inline int vec_sign(const Vec& v) {
  int sgn = 0;
  for (const Zr2& x : v) {
    int s = x.sign();
    if (s == 0) continue;
    if (sgn == 0) sgn = s;
    else if (sgn != s) fail(Errc::schema, "mixed-sign vector is not a root");
  }
  return sgn;
}

// Matrix of a group element, stored as images of the basis vectors.
struct WMat {
  std::vector<Vec> col;

  static WMat identity(const CoxeterMatrix& cm) {
    WMat r;
    for (int i = 0; i < cm.rank(); ++i) r.col.push_back(basis_vec(cm, i));
    return r;
  }
  bool is_identity(const CoxeterMatrix& cm) const {
    for (int j = 0; j < cm.rank(); ++j)
      for (int i = 0; i < cm.rank(); ++i)
        if (col[j][i] != Zr2{i == j ? 1 : 0, 0}) return false;
    return true;
  }
  // M := sigma_s * M
  void premul_gen(const CoxeterMatrix& cm, int s) {
    for (Vec& c : col) apply_gen(cm, s, c);
  }
  // M := M * sigma_s
  void postmul_gen(const CoxeterMatrix& cm, int s) {
    for (int j = 0; j < cm.rank(); ++j) {
      if (j == s) continue;
      Zr2 csj = cm.c(s, j);
      if (csj.is_zero()) continue;
      for (int i = 0; i < cm.rank(); ++i) col[j][i] = col[j][i] + csj * col[s][i];
    }
    for (int i = 0; i < cm.rank(); ++i) col[s][i] = -col[s][i];
  }
};

struct CoxeterElement {
  Word word;  // canonical: ShortLex-least reduced word

  int length() const { return static_cast<int>(word.size()); }
  bool is_identity() const { return word.empty(); }
  friend bool operator==(const CoxeterElement&, const CoxeterElement&) = default;
  friend auto operator<=>(const CoxeterElement& a, const CoxeterElement& b) {
    if (a.word.size() != b.word.size()) return a.word.size() <=> b.word.size();
    return a.word <=> b.word;  // ShortLex
  }
};

inline void check_letters(const CoxeterMatrix& cm, const Word& w) {
  for (auto s : w)
    if (s >= cm.rank()) fail(Errc::unknown_generator, "letter index " + std::to_string(s));
}

// Canonical form of the product of `w`.  Extracts the ShortLex-least reduced
// word by repeatedly stripping the least left descent.
inline CoxeterElement reduce(const CoxeterMatrix& cm, const Word& w) {
  check_letters(cm, w);
  WMat minv = WMat::identity(cm);  // matrix of the inverse element
  for (auto s : w) minv.premul_gen(cm, s);
  CoxeterElement out;
  for (;;) {
    int descent = -1;
    for (int s = 0; s < cm.rank(); ++s) {
      if (vec_sign(minv.col[s]) < 0) {  // w^{-1}(alpha_s) < 0
        descent = s;
        break;
      }
    }
    if (descent < 0) break;
    out.word.push_back(static_cast<std::uint8_t>(descent));
    minv.postmul_gen(cm, descent);
  }
  assert(minv.is_identity(cm));
  return out;
}

inline CoxeterElement mult(const CoxeterMatrix& cm, const CoxeterElement& a,
                           const CoxeterElement& b) {
  Word w = a.word;
  w.insert(w.end(), b.word.begin(), b.word.end());
  return reduce(cm, w);
}

inline CoxeterElement inverse(const CoxeterMatrix& cm, const CoxeterElement& a) {
  Word w(a.word.rbegin(), a.word.rend());
  return reduce(cm, w);
}

// w(v) for a (not necessarily reduced) word.
inline Vec apply_word(const CoxeterMatrix& cm, const Word& w, Vec v) {
  for (auto it = w.rbegin(); it != w.rend(); ++it) apply_gen(cm, *it, v);
  return v;
}

// w^{-1}(v).
inline Vec apply_word_inv(const CoxeterMatrix& cm, const Word& w, Vec v) {
  for (auto s : w) apply_gen(cm, s, v);
  return v;
}

inline bool is_reduced(const CoxeterMatrix& cm, const Word& w) {
  return reduce(cm, w).length() == static_cast<int>(w.size());
}

// ell(ws) > ell(w) iff w(alpha_s) > 0.
inline bool ascends_right(const CoxeterMatrix& cm, const CoxeterElement& w, int s) {
  return vec_sign(apply_word(cm, w.word, basis_vec(cm, s))) > 0;
}
// ell(sw) > ell(w) iff w^{-1}(alpha_s) > 0.
inline bool ascends_left(const CoxeterMatrix& cm, const CoxeterElement& w, int s) {
  return vec_sign(apply_word_inv(cm, w.word, basis_vec(cm, s))) > 0;
}

inline std::vector<int> left_descents(const CoxeterMatrix& cm, const CoxeterElement& w) {
  std::vector<int> out;
  for (int s = 0; s < cm.rank(); ++s)
    if (!ascends_left(cm, w, s)) out.push_back(s);
  return out;
}
inline std::vector<int> right_descents(const CoxeterMatrix& cm, const CoxeterElement& w) {
  std::vector<int> out;
  for (int s = 0; s < cm.rank(); ++s)
    if (!ascends_right(cm, w, s)) out.push_back(s);
  return out;
}

// p(s,t) = stst... of length m_st.
inline Word p_word(const CoxeterMatrix& cm, int s, int t) {
  if (s == t) fail(Errc::schema, "p(s,t) needs distinct generators");
  Word w;
  for (int i = 0; i < cm.order(s, t); ++i)
    w.push_back(static_cast<std::uint8_t>(i % 2 == 0 ? s : t));
  return w;
}

// All reduced expressions of w (each first letter is a left descent).
inline std::vector<Word> reduced_words(const CoxeterMatrix& cm, const CoxeterElement& w) {
  std::map<Word, std::vector<Word>> memo;
  auto rec = [&](auto&& self, const CoxeterElement& v) -> const std::vector<Word>& {
    auto it = memo.find(v.word);
    if (it != memo.end()) return it->second;
    std::vector<Word> out;
    if (v.is_identity()) {
      out.push_back({});
    } else {
      for (int s : left_descents(cm, v)) {
        Word rest(v.word);  // s * v, then reduce
        rest.insert(rest.begin(), static_cast<std::uint8_t>(s));
        CoxeterElement shorter = reduce(cm, rest);
        for (const Word& tail : self(self, shorter)) {
          Word full;
          full.push_back(static_cast<std::uint8_t>(s));
          full.insert(full.end(), tail.begin(), tail.end());
          out.push_back(std::move(full));
        }
      }
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
    }
    return memo.emplace(v.word, std::move(out)).first->second;
  };
  return rec(rec, w);
}

// Words obtained from `w` by one braid move p(s,t) -> p(t,s) in a window.
inline std::vector<Word> braid_moves(const CoxeterMatrix& cm, const Word& w) {
  std::vector<Word> out;
  const int k = static_cast<int>(w.size());
  for (int i = 0; i + 1 < k; ++i) {
    int s = w[i], t = w[i + 1];
    if (s == t) continue;
    int mm = cm.order(s, t);
    if (i + mm > k) continue;
    bool ok = true;
    for (int x = 0; x < mm; ++x)
      if (w[i + x] != (x % 2 == 0 ? s : t)) { ok = false; break; }
    if (!ok) continue;
    Word v = w;
    for (int x = 0; x < mm; ++x) v[i + x] = static_cast<std::uint8_t>(x % 2 == 0 ? t : s);
    out.push_back(std::move(v));
  }
  return out;
}

namespace detail {
// Determinant over Z[sqrt2] by cofactor expansion; fine at rank <= 8.
inline Zr2 det(std::vector<std::vector<Zr2>> a) {
  const int n = static_cast<int>(a.size());
  if (n == 0) return {1, 0};
  Zr2 acc{0, 0};
  int sign = 1;
  for (int i = 0; i < n; ++i) {
    std::vector<std::vector<Zr2>> minor;
    for (int r = 1; r < n; ++r) {
      std::vector<Zr2> row;
      for (int c2 = 0; c2 < n; ++c2)
        if (c2 != i) row.push_back(a[r][c2]);
      minor.push_back(std::move(row));
    }
    Zr2 term = a[0][i] * det(minor);
    acc = sign > 0 ? acc + term : acc - term;
    sign = -sign;
  }
  return acc;
}
}  // namespace detail

// <J> finite iff the Gram matrix (-cos pi/m_st) is positive definite; checked
// exactly via leading principal minors of the doubled matrix.
inline bool is_spherical(const CoxeterMatrix& cm, const std::vector<int>& J) {
  const int k = static_cast<int>(J.size());
  std::vector<std::vector<Zr2>> g(k, std::vector<Zr2>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j)
      g[i][j] = (i == j) ? Zr2{2, 0} : -cm.c(J[i], J[j]);
  for (int lead = 1; lead <= k; ++lead) {
    std::vector<std::vector<Zr2>> sub(lead, std::vector<Zr2>(lead));
    for (int i = 0; i < lead; ++i)
      for (int j = 0; j < lead; ++j) sub[i][j] = g[i][j];
    if (detail::det(sub).sign() <= 0) return false;
  }
  return true;
}

inline bool is_k_spherical(const CoxeterMatrix& cm, int k) {
  const int n = cm.rank();
  std::vector<int> J;
  auto rec = [&](auto&& self, int from, int left) -> bool {
    if (left == 0) return is_spherical(cm, J);
    for (int s = from; s <= n - left; ++s) {
      J.push_back(s);
      bool ok = self(self, s + 1, left - 1);
      J.pop_back();
      if (!ok) return false;
    }
    return true;
  };
  for (int size = 1; size <= std::min(k, n); ++size)
    if (!rec(rec, 0, size)) return false;
  return true;
}

// r_J, the longest element of a spherical <J>.
inline CoxeterElement longest_element(const CoxeterMatrix& cm, const std::vector<int>& J) {
  if (!is_spherical(cm, J)) fail(Errc::not_spherical, "J generates an infinite group");
  CoxeterElement w;
  for (;;) {
    int up = -1;
    for (int s : J)
      if (ascends_right(cm, w, s)) { up = s; break; }
    if (up < 0) return w;
    Word ext = w.word;
    ext.push_back(static_cast<std::uint8_t>(up));
    w = reduce(cm, ext);
  }
}

// A root, i.e. a half-space w alpha_s of W.  Canonical form is the pair
// (reflection, sign); the coordinate vector is kept alongside and determines
// the same data.
struct Root {
  CoxeterElement refl;
  bool positive = true;
  Vec vec;

  friend bool operator==(const Root& a, const Root& b) {
    return a.positive == b.positive && a.refl == b.refl;
  }
  friend auto operator<=>(const Root& a, const Root& b) {
    if (auto c = a.refl <=> b.refl; c != 0) return c;
    return (a.positive ? 1 : 0) <=> (b.positive ? 1 : 0);
  }
  Root opposite() const {
    Root r = *this;
    r.positive = !r.positive;
    for (Zr2& x : r.vec) x = -x;
    return r;
  }
};

inline Root simple_root(const CoxeterMatrix& cm, int s) {
  Root r;
  r.refl = CoxeterElement{{static_cast<std::uint8_t>(s)}};
  r.positive = true;
  r.vec = basis_vec(cm, s);
  return r;
}

// w alpha_s as a Root.
inline Root root_of(const CoxeterMatrix& cm, const CoxeterElement& w, int s) {
  Root r;
  r.vec = apply_word(cm, w.word, basis_vec(cm, s));
  Word conj = w.word;
  conj.push_back(static_cast<std::uint8_t>(s));
  conj.insert(conj.end(), w.word.rbegin(), w.word.rend());
  r.refl = reduce(cm, conj);
  r.positive = vec_sign(r.vec) > 0;
  return r;
}

// w applied to a root.
inline Root apply_to_root(const CoxeterMatrix& cm, const CoxeterElement& w, const Root& a) {
  Root r;
  r.vec = apply_word(cm, w.word, a.vec);
  Word conj = w.word;
  conj.insert(conj.end(), a.refl.word.begin(), a.refl.word.end());
  Word winv(w.word.rbegin(), w.word.rend());
  conj.insert(conj.end(), winv.begin(), winv.end());
  r.refl = reduce(cm, conj);
  r.positive = vec_sign(r.vec) > 0;
  return r;
}

// Membership u in alpha, where alpha = {w : w^{-1}(vec) > 0}.
inline bool half_space_contains(const CoxeterMatrix& cm, const Root& a, const CoxeterElement& u) {
  return vec_sign(apply_word_inv(cm, u.word, a.vec)) > 0;
}

// Roots beta_j = s_1...s_{j-1} alpha_{s_j} crossed by a reduced word.
inline std::vector<Root> crossed_roots(const CoxeterMatrix& cm, const Word& w) {
  if (!is_reduced(cm, w)) fail(Errc::not_reduced, "crossed_roots needs a reduced word");
  std::vector<Root> out;
  for (size_t j = 0; j < w.size(); ++j) {
    CoxeterElement prefix{Word(w.begin(), w.begin() + j)};
    out.push_back(root_of(cm, prefix, w[j]));
  }
  return out;
}

struct RootInterval {
  std::vector<Root> closed;  // [alpha, beta]
  std::vector<Root> open;    // (alpha, beta)
};

inline std::vector<CoxeterElement> enumerate_elements(const CoxeterMatrix& cm, int max_len);

namespace detail {
// Order of r_a r_b, or 0 if no power up to `cutoff` is the identity.
inline int reflection_product_order(const CoxeterMatrix& cm, const Root& a, const Root& b,
                                    int cutoff = 12) {
  CoxeterElement prod = mult(cm, a.refl, b.refl);
  CoxeterElement acc = prod;
  for (int k = 1; k <= cutoff; ++k) {
    if (acc.is_identity()) return k;
    acc = mult(cm, acc, prod);
  }
  return 0;
}

// Sign of the coefficient x in gamma = x a + y b, restricted to the plane
// spanned by a and b.  Uses a nonsingular 2x2 coordinate minor.
inline bool cone_coeffs_nonneg(const Vec& a, const Vec& b, const Vec& g) {
  const int n = static_cast<int>(a.size());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      Zr2 d = a[i] * b[j] - a[j] * b[i];
      if (d.is_zero()) continue;
      Zr2 numx = g[i] * b[j] - g[j] * b[i];
      Zr2 numy = a[i] * g[j] - a[j] * g[i];
      int sx = numx.sign() * d.sign();
      int sy = numy.sign() * d.sign();
      return sx >= 0 && sy >= 0;
    }
  fail(Errc::schema, "degenerate root pair");
}
}  // namespace detail

// [alpha,beta] and (alpha,beta) for a prenilpotent pair with o(r_a r_b)
// finite.  Nested pairs (infinite order) are rejected with NESTED_PAIR.
//
// The pair is moved into a standard rank-2 subsystem first (such a position
// exists exactly when the reflection product has finite order); the interval
// is the cone cut of that complete planar subsystem, carried back.
inline RootInterval interval(const CoxeterMatrix& cm, const Root& a, const Root& b,
                             int witness_len = 9) {
  if (a == b) fail(Errc::not_prenilpotent, "interval needs distinct roots");
  if (a == b.opposite()) fail(Errc::not_prenilpotent, "{alpha, -alpha} is not prenilpotent");
  int ord = detail::reflection_product_order(cm, a, b);
  if (ord == 0) {
    // Walls do not cross: exactly one of the four sign quadrants is empty.
    // A pair of this kind is prenilpotent iff nested, and we reject both ways.
    auto empty_quadrant = [&](const Root& x, const Root& y) {
      for (const CoxeterElement& u : enumerate_elements(cm, witness_len))
        if (half_space_contains(cm, x, u) && half_space_contains(cm, y, u)) return false;
      return true;
    };
    if (empty_quadrant(a, b.opposite()) || empty_quadrant(a.opposite(), b))
      fail(Errc::nested_pair, "nested prenilpotent pair; interval is infinite");
    fail(Errc::not_prenilpotent, "half-spaces do not form a prenilpotent pair");
  }
  // Find w with w^{-1} a, w^{-1} b supported on a single pair of generators.
  const int n = cm.rank();
  auto support = [&](const Vec& v) {
    std::vector<int> out;
    for (int i = 0; i < n; ++i)
      if (!v[i].is_zero()) out.push_back(i);
    return out;
  };
  for (const CoxeterElement& w : enumerate_elements(cm, 12)) {
    Vec va = apply_word_inv(cm, w.word, a.vec);
    Vec vb = apply_word_inv(cm, w.word, b.vec);
    std::vector<int> supp = support(va);
    for (int i : support(vb))
      if (std::find(supp.begin(), supp.end(), i) == supp.end()) supp.push_back(i);
    if (static_cast<int>(supp.size()) > 2) continue;
    int s = supp[0], t = supp.size() == 2 ? supp[1] : (supp[0] + 1) % n;
    // Complete planar subsystem Phi^{s,t}, in ambient coordinates.
    std::set<Root> sys;
    std::vector<CoxeterElement> dihedral;
    {
      std::set<Word> seen{Word{}};
      std::vector<CoxeterElement> shell{CoxeterElement{}};
      dihedral = shell;
      while (!shell.empty()) {
        std::vector<CoxeterElement> next;
        for (const CoxeterElement& v : shell)
          for (int g : {s, t}) {
            Word ext = v.word;
            ext.push_back(static_cast<std::uint8_t>(g));
            CoxeterElement e = reduce(cm, ext);
            if (e.length() == v.length() + 1 && seen.insert(e.word).second) next.push_back(e);
          }
        dihedral.insert(dihedral.end(), next.begin(), next.end());
        shell = std::move(next);
      }
    }
    for (const CoxeterElement& v : dihedral)
      for (int g : {s, t}) {
        Root r = root_of(cm, v, g);
        sys.insert(r);
        sys.insert(r.opposite());
      }
    RootInterval out;
    for (const Root& g : sys)
      if (detail::cone_coeffs_nonneg(va, vb, g.vec)) out.closed.push_back(apply_to_root(cm, w, g));
    std::sort(out.closed.begin(), out.closed.end());
    for (const Root& g : out.closed)
      if (!(g == a) && !(g == b)) out.open.push_back(g);
    return out;
  }
  fail(Errc::out_of_range, "no rank-2 residue found within the search bound");
}

// All elements of length <= max_len, ordered by (length, ShortLex word).
inline std::vector<CoxeterElement> enumerate_elements(const CoxeterMatrix& cm, int max_len) {
  std::vector<CoxeterElement> out{CoxeterElement{}};
  std::set<Word> seen{Word{}};
  std::vector<CoxeterElement> shell = out;
  for (int len = 1; len <= max_len; ++len) {
    std::set<Word> next;
    for (const CoxeterElement& w : shell) {
      for (int s = 0; s < cm.rank(); ++s) {
        Word ext = w.word;
        ext.push_back(static_cast<std::uint8_t>(s));
        CoxeterElement e = reduce(cm, ext);
        if (e.length() == len && seen.insert(e.word).second) next.insert(e.word);
      }
    }
    shell.clear();
    for (const Word& w : next) shell.push_back(CoxeterElement{w});
    out.insert(out.end(), shell.begin(), shell.end());
    if (shell.empty()) break;  // finite group exhausted
  }
  return out;
}

}  // namespace buildings
