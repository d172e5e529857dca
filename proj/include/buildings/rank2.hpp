#pragma once

#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include "buildings/coxeter.hpp"
#include "buildings/error.hpp"
#include "buildings/gf.hpp"
#include "buildings/matrix.hpp"

namespace buildings {

enum class Rank2Kind { A1xA1, A2, B2 };

inline int rank2_order(Rank2Kind k) {
  switch (k) {
    case Rank2Kind::A1xA1: return 2;
    case Rank2Kind::A2: return 3;
    case Rank2Kind::B2: return 4;
  }
  return 0;
}

// One edge of a foundation: a labelled rank-2 Moufang building.
struct Rank2Descriptor {
  Rank2Kind kind = Rank2Kind::A2;
  int s = 0, t = 1;        // global generator indices, s < t
  int qs = 2, qt = 2;      // parameter field sizes (qs == qt unless A1xA1)
  int short_side = 0;      // B2: 0 if s carries the short simple root, 1 for t
};

// SL2(q) calculus for a single one-parameter root group pair.  This is both
// the per-vertex oracle of the glued groups X_s and the building block of the
// A1xA1 engine.  `eps` is the parameter of the fixed generator e with
// n := m(e); the glueing twists choose it per edge.
class Sl2 {
 public:
  Sl2() = default;
  Sl2(const FieldSpec& f, int eps) : f_(&f), eps_(eps) {
    if (eps_ == 0) fail(Errc::identity_input, "unit parameter must be nonzero");
    build();
  }

  const FieldSpec& field() const { return *f_; }
  int q() const { return f_->q(); }

  Mat x(int a) const {
    Mat m = Mat::identity(*f_, 2);
    m.at(0, 1) = static_cast<std::uint8_t>(a);
    return m;
  }
  Mat y(int a) const {
    Mat m = Mat::identity(*f_, 2);
    m.at(1, 0) = static_cast<std::uint8_t>(a);
    return m;
  }
  const Mat& n() const { return n_; }

  // m(u) = u' u u'' with u', u'' in the opposite root group; derived by
  // exhaustive search, unique.
  struct MOf {
    int b = 0, c = 0;  // u' = y(b), u'' = y(c)
    Mat mat;
  };
  MOf m_of(int a) const {
    if (a == 0) fail(Errc::identity_input, "m(u) needs u != 1");
    return m_of_[a];
  }

  // h(u,v) = m(x(u))^{-1} m(x(v)).
  Mat h(int u, int v) const {
    if (u == 0 || v == 0) fail(Errc::identity_input, "torus parameters must be nonzero");
    return m_of_[u].mat.inverse() * m_of_[v].mat;
  }

  // Torus subgroup H as matrices with one (u,v) representative each.
  const std::vector<std::pair<Mat, std::pair<int, int>>>& torus_elements() const { return hs_; }

  std::pair<int, int> torus_params(const Mat& m) const {
    for (auto& [mat, uv] : hs_)
      if (mat == m) return uv;
    fail(Errc::schema, "matrix is not a torus element");
  }
  bool is_torus(const Mat& m) const {
    for (auto& [mat, uv] : hs_)
      if (mat == m) return true;
    return false;
  }

  // n x(a) n = x(abar) n x(c) h; returns (abar, c, (hu,hv)).
  struct NsConj {
    int abar = 0, c = 0;
    std::pair<int, int> h;
  };
  NsConj ns_conj(int a) const {
    if (a == 0) fail(Errc::identity_input, "ns_conj needs u != 1");
    return ns_conj_[a];
  }

  // n^2 and n^{-2} as torus parameters.
  std::pair<int, int> n_squared() const { return nsq_; }
  std::pair<int, int> n_squared_inv() const { return {nsq_.second, nsq_.first}; }

  // h x(a) h^{-1} = x(a') for torus h(u,v).
  int torus_on_x(int hu, int hv, int a, bool inverse_torus = false) const {
    Mat hm = h(hu, hv);
    if (inverse_torus) hm = hm.inverse();
    Mat m = hm * x(a) * hm.inverse();
    if (m.at(0, 0) != 1 || m.at(1, 1) != 1 || m.at(1, 0) != 0)
      fail(Errc::schema, "torus conjugate left the root group");
    return m.at(0, 1);
  }

  // n^{-1} h(u,v) n as torus parameters.
  std::pair<int, int> conj_torus_by_n(int hu, int hv) const {
    Mat m = n_.inverse() * h(hu, hv) * n_;
    return torus_params(m);
  }

 private:
  void build() {
    const int q = f_->q();
    m_of_.resize(q);
    for (int a = 1; a < q; ++a) {
      bool found = false;
      for (int b = 0; b < q && !found; ++b)
        for (int c = 0; c < q && !found; ++c) {
          Mat m = y(b) * x(a) * y(c);
          if (m.at(0, 0) == 0 && m.at(1, 1) == 0) {
            m_of_[a] = {b, c, m};
            found = true;
          }
        }
      if (!found) fail(Errc::schema, "m(u) not found");
    }
    n_ = m_of_[eps_].mat;
    for (int u = 1; u < q; ++u)
      for (int v = 1; v < q; ++v) {
        Mat m = m_of_[u].mat.inverse() * m_of_[v].mat;
        bool seen = false;
        for (auto& [mat, uv] : hs_)
          if (mat == m) seen = true;
        if (!seen) hs_.push_back({m, {u, v}});
      }
    nsq_ = torus_params(n_ * n_);
    ns_conj_.resize(q);
    for (int a = 1; a < q; ++a) {
      Mat target = n_ * x(a) * n_;
      bool found = false;
      for (int abar = 0; abar < q && !found; ++abar) {
        Mat rest = n_.inverse() * x(f_->neg(abar)) * target;  // should be x(c) h
        for (auto& [hm, uv] : hs_) {
          Mat u = rest * hm.inverse();
          if (u.at(0, 0) == 1 && u.at(1, 1) == 1 && u.at(1, 0) == 0) {
            ns_conj_[a] = {abar, u.at(0, 1), uv};
            found = true;
            break;
          }
        }
      }
      if (!found) fail(Errc::schema, "ns_conj decomposition not found");
    }
  }

  const FieldSpec* f_ = nullptr;
  int eps_ = 1;
  Mat n_;
  std::vector<MOf> m_of_;
  std::vector<std::pair<Mat, std::pair<int, int>>> hs_;
  std::pair<int, int> nsq_;
  std::vector<NsConj> ns_conj_;
};

// A root-group letter local to one edge: a positive root index of the edge's
// rank-2 system and a parameter in the edge-local field of that root.
struct LocalLetter {
  int root = 0;
  int c = 0;
};

// A torus letter local to one edge: h_{side}(u, v) in edge-local parameters.
struct LocalTorus {
  int side = 0;
  int u = 1, v = 1;
};

// Matrix engine for one edge: the rank-2 Moufang building of the given kind
// over GF(q), with every structure constant derived from the fixed matrix
// conventions:
//   A2: unimodular 3x3, x_s(a) = I + a E12, x_t(a) = I + a E23;
//   B2: Sp4 for the antidiagonal symplectic form, short root I + a(E12 - E34),
//       long root I + a E23;
//   A1xA1: a pair of 2x2 unimodular blocks.
class Rank2Engine {
 public:
  Rank2Engine(const Rank2Descriptor& d, int eps0, int eps1) : desc_(d) {
    mst_ = rank2_order(d.kind);
    cm2_ = CoxeterMatrix{{"0", "1"}, {{1, mst_}, {mst_, 1}}};
    if (d.kind == Rank2Kind::A1xA1) {
      blocks_[0] = Sl2(buildings::field(d.qs), eps0);
      blocks_[1] = Sl2(buildings::field(d.qt), eps1);
      nroots_ = 2;
      coords_ = {{1, 0}, {0, 1}};
    } else {
      if (d.qs != d.qt) fail(Errc::panel_mismatch, "A2/B2 edges need one field");
      f_ = &buildings::field(d.qs);
      eps_[0] = eps0;
      eps_[1] = eps1;
      build_patterns();
      build_side_groups();
      nroots_ = static_cast<int>(patterns_.size());
    }
    build_table();
  }

  const Rank2Descriptor& desc() const { return desc_; }
  int m_st() const { return mst_; }
  int positive_root_count() const { return nroots_; }
  int side_of_vertex(int global) const {
    if (global == desc_.s) return 0;
    if (global == desc_.t) return 1;
    fail(Errc::wrong_edge, "generator does not belong to this edge");
  }
  int vertex_of_side(int side) const { return side == 0 ? desc_.s : desc_.t; }
  const FieldSpec& side_field(int side) const {
    if (desc_.kind == Rank2Kind::A1xA1) return blocks_[side]->field();
    return *f_;
  }
  // root index of a side's simple root
  int simple_root(int side) const { return side; }
  bool is_simple(int root) const { return root < 2; }
  // side owning a simple root index
  int root_side(int root) const { return root < 2 ? root : -1; }

  // ---- matrices ------------------------------------------------------

  struct EMat {  // split representation for A1xA1, single matrix otherwise
    Mat m;
    Mat m2;
    bool split = false;
    friend bool operator==(const EMat&, const EMat&) = default;
    EMat mul(const EMat& o) const {
      EMat r = *this;
      r.m = m * o.m;
      if (split) r.m2 = m2 * o.m2;
      return r;
    }
    EMat inv() const {
      EMat r = *this;
      r.m = m.inverse();
      if (split) r.m2 = m2.inverse();
      return r;
    }
  };

  EMat identity_mat() const {
    EMat e;
    if (desc_.kind == Rank2Kind::A1xA1) {
      e.split = true;
      e.m = Mat::identity(blocks_[0]->field(), 2);
      e.m2 = Mat::identity(blocks_[1]->field(), 2);
    } else {
      e.m = Mat::identity(*f_, dim());
    }
    return e;
  }

  EMat x_mat(const LocalLetter& l) const {
    EMat e = identity_mat();
    if (desc_.kind == Rank2Kind::A1xA1) {
      if (l.root == 0) e.m = blocks_[0]->x(l.c);
      else e.m2 = blocks_[1]->x(l.c);
      return e;
    }
    e.m = pattern_mat(l.root, l.c);
    return e;
  }

  EMat n_mat(int side) const {
    EMat e = identity_mat();
    if (desc_.kind == Rank2Kind::A1xA1) {
      if (side == 0) e.m = blocks_[0]->n();
      else e.m2 = blocks_[1]->n();
      return e;
    }
    e.m = side_[side].n;
    return e;
  }

  EMat h_mat(const LocalTorus& h) const {
    EMat e = identity_mat();
    if (desc_.kind == Rank2Kind::A1xA1) {
      if (h.side == 0) e.m = blocks_[0]->h(h.u, h.v);
      else e.m2 = blocks_[1]->h(h.u, h.v);
      return e;
    }
    e.m = side_m_of(h.side, h.u).mat.inverse() * side_m_of(h.side, h.v).mat;
    return e;
  }

  // u' u u'' decomposition of m(u) for a simple-root letter.
  struct MOf {
    int b = 0, c = 0;
    EMat mat;
  };
  MOf m_of(int side, int a) const {
    if (a == 0) fail(Errc::identity_input, "m(u) needs u != 1");
    if (desc_.kind == Rank2Kind::A1xA1) {
      auto r = blocks_[side]->m_of(a);
      MOf out{r.b, r.c, identity_mat()};
      if (side == 0) out.mat.m = r.mat;
      else out.mat.m2 = r.mat;
      return out;
    }
    auto r = side_m_of(side, a);
    MOf out{r.b, r.c, identity_mat()};
    out.mat.m = r.mat;
    return out;
  }

  // ---- chamber table / Bruhat ----------------------------------------

  using SideWord = std::vector<int>;  // word in sides 0/1

  struct Chamber {
    SideWord type;            // canonical reduced type
    std::vector<int> labels;  // one parameter per letter
  };

  int chamber_count() const { return static_cast<int>(table_.size()); }

  // Bruhat data of an arbitrary group element's coset M B+.
  Chamber bruhat(const EMat& m) const {
    auto it = table_.find(key_of(m));
    if (it == table_.end()) fail(Errc::wrong_edge, "matrix not in the edge group");
    return it->second.first;
  }

  // Unique labels of M B+ along a chosen reduced type of the same element.
  std::vector<int> labels_along(EMat m, const SideWord& type) const {
    std::vector<int> labels;
    SideWord rest(type);
    for (size_t j = 0; j < type.size(); ++j) {
      rest.erase(rest.begin());
      const int side = type[j];
      const int q = side_field(side).q();
      bool found = false;
      for (int a = 0; a < q && !found; ++a) {
        EMat peeled = n_mat(side).inv().mul(x_mat({simple_root(side), neg_side(side, a)}).mul(m));
        auto it = table_.find(key_of(peeled));
        if (it != table_.end() && it->second.first.type == canonical_type(rest)) {
          labels.push_back(a);
          m = peeled;
          found = true;
        }
      }
      if (!found) fail(Errc::schema, "Bruhat extraction failed");
    }
    return labels;
  }

  // The unique equivalent label sequence of the opposite alternating type.
  std::vector<int> relabel(const std::vector<int>& labels, int first_side) const {
    if (static_cast<int>(labels.size()) != mst_)
      fail(Errc::schema, "relabel needs a full p(s,t) window");
    SideWord from = alternating(first_side), to = alternating(1 - first_side);
    EMat m = to_matrix(from, labels);
    return labels_along(m, to);
  }

  EMat to_matrix(const SideWord& type, const std::vector<int>& labels) const {
    EMat m = identity_mat();
    for (size_t i = 0; i < type.size(); ++i)
      m = m.mul(x_mat({simple_root(type[i]), labels[i]}).mul(n_mat(type[i])));
    return m;
  }

  SideWord alternating(int first_side) const {
    SideWord w;
    for (int i = 0; i < mst_; ++i) w.push_back(i % 2 == 0 ? first_side : 1 - first_side);
    return w;
  }

  // ---- structure constants -------------------------------------------

  // Positive-root coordinates in the basis of the two simple roots.
  std::pair<int, int> root_coords(int root) const { return coords_[root]; }

  // s_side(gamma) for gamma a positive root other than the side's simple one.
  int reflected_root(int side, int root) const {
    int r = refl_[side][root];
    if (r < 0) fail(Errc::schema, "reflection makes the root negative");
    return r;
  }

  // n_side^{-1} x_gamma(c) n_side as a local letter.
  LocalLetter conj_by_n(int side, const LocalLetter& l) const {
    if (desc_.kind == Rank2Kind::A1xA1) {
      if (l.root == side) fail(Errc::schema, "conjugating a letter of the same block");
      return l;  // other block commutes
    }
    if (l.root == simple_root(side)) fail(Errc::schema, "simple letter of the acting side");
    Mat m = side_[side].n.inverse() * pattern_mat(l.root, l.c) * side_[side].n;
    int target = reflected_root(side, l.root);
    return {target, extract_param(m, target)};
  }

  // n_side^{-1} h n_side decomposed in H_side * H_other (commuting factors).
  std::vector<LocalTorus> conj_torus_by_n(int side, const LocalTorus& h) const {
    if (desc_.kind == Rank2Kind::A1xA1) {
      if (h.side == side) {
        auto uv = blocks_[side]->conj_torus_by_n(h.u, h.v);
        return {{side, uv.first, uv.second}};
      }
      return {h};
    }
    Mat m = side_[side].n.inverse() * h_mat(h).m * side_[side].n;
    for (auto& [ma, uva] : side_[side].torus)
      for (auto& [mb, uvb] : side_[1 - side].torus)
        if (ma * mb == m) {
          std::vector<LocalTorus> out;
          if (uva.first != uva.second) out.push_back({side, uva.first, uva.second});
          if (uvb.first != uvb.second) out.push_back({1 - side, uvb.first, uvb.second});
          return out;
        }
    fail(Errc::schema, "torus conjugate not in H_s H_t");
  }

  // h x_gamma(c) h^{-1} (or with h^{-1} acting) as a local letter.
  LocalLetter torus_conj_root(const LocalTorus& h, const LocalLetter& l, bool inverse_torus) const {
    if (desc_.kind == Rank2Kind::A1xA1) {
      if (h.side != l.root) return l;
      int a = blocks_[l.root]->torus_on_x(h.u, h.v, l.c, inverse_torus);
      return {l.root, a};
    }
    Mat hm = h_mat(h).m;
    if (inverse_torus) hm = hm.inverse();
    Mat m = hm * pattern_mat(l.root, l.c) * hm.inverse();
    return {l.root, extract_param(m, l.root)};
  }

  // [x_a, x_b] = x_a^{-1} x_b^{-1} x_a x_b as a word over the open interval
  // (alpha, beta), one letter per interval root in a fixed order.
  std::vector<LocalLetter> commutator(const LocalLetter& a, const LocalLetter& b) const {
    if (desc_.kind == Rank2Kind::A1xA1) return {};
    if (a.root == b.root) return {};
    std::vector<int> between = open_interval(a.root, b.root);
    Mat lhs = pattern_mat(a.root, a.c).inverse() * pattern_mat(b.root, b.c).inverse() *
              pattern_mat(a.root, a.c) * pattern_mat(b.root, b.c);
    std::vector<LocalLetter> out;
    if (between.empty()) {
      if (!(lhs == Mat::identity(*f_, dim())))
        fail(Errc::schema, "commutator nonzero on empty interval");
      return out;
    }
    // Exhaustive solve of the product over interval roots.
    const int q = f_->q();
    std::vector<int> params(between.size(), 0);
    for (;;) {
      Mat prod = Mat::identity(*f_, dim());
      for (size_t i = 0; i < between.size(); ++i)
        prod = prod * pattern_mat(between[i], params[i]);
      if (prod == lhs) {
        for (size_t i = 0; i < between.size(); ++i)
          if (params[i] != 0) out.push_back({between[i], params[i]});
        return out;
      }
      size_t d = 0;
      while (d < params.size() && ++params[d] == q) params[d++] = 0;
      if (d == params.size()) fail(Errc::schema, "commutator not in interval product");
    }
  }

  // Open interval (alpha, beta) inside the positive system, ordered by
  // coordinates; prenilpotency is automatic for distinct positive roots.
  std::vector<int> open_interval(int ra, int rb) const {
    auto [a1, a2] = coords_[ra];
    auto [b1, b2] = coords_[rb];
    std::vector<int> out;
    for (int g = 0; g < nroots_; ++g) {
      if (g == ra || g == rb) continue;
      auto [c1, c2] = coords_[g];
      long det = static_cast<long>(a1) * b2 - static_cast<long>(a2) * b1;
      long nx = static_cast<long>(c1) * b2 - static_cast<long>(c2) * b1;
      long ny = static_cast<long>(a1) * c2 - static_cast<long>(a2) * c1;
      if (det == 0) continue;
      long sx = (nx == 0 ? 0 : (nx > 0 ? 1 : -1)) * (det > 0 ? 1 : -1);
      long sy = (ny == 0 ? 0 : (ny > 0 ? 1 : -1)) * (det > 0 ? 1 : -1);
      if (sx >= 0 && sy >= 0) out.push_back(g);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  // x_gamma(c) for a non-simple gamma as a word of simple-root letters of this
  // edge, via breadth-first search in <U_s, U_t>.  Fails with
  // UNSUPPORTED_SMALL_FIELD when the commutators do not span (B2 over F2/F3).
  std::vector<std::pair<int, int>> expand(const LocalLetter& l) const {
    if (is_simple(l.root)) return {{l.root, l.c}};
    if (l.c == 0) return {};
    ensure_span_bfs();
    auto it = span_words_.find(mat_key(pattern_mat(l.root, l.c)));
    if (it == span_words_.end())
      fail(Errc::unsupported_small_field,
           "root group not spanned by simple root groups at q = " + std::to_string(f_->q()));
    return it->second;
  }

  bool spans_all_positive_roots() const {
    if (desc_.kind == Rank2Kind::A1xA1) return true;
    ensure_span_bfs();
    for (int g = 2; g < nroots_; ++g)
      for (int c = 1; c < f_->q(); ++c)
        if (!span_words_.count(mat_key(pattern_mat(g, c)))) return false;
    return true;
  }

  // ---- building-level reports ----------------------------------------

  struct OppositionReport {
    int vertices = 0;
    bool connected = false;
  };

  OppositionReport opposition_graph() const {
    SideWord longest = alternating(0);
    std::vector<MatPairKey> opp;
    std::map<MatPairKey, int> index;
    for (auto& [key, entry] : table_)
      if (entry.first.type == canonical_type(longest)) {
        index[key] = static_cast<int>(opp.size());
        opp.push_back(key);
      }
    std::vector<int> parent(opp.size());
    for (size_t i = 0; i < opp.size(); ++i) parent[i] = static_cast<int>(i);
    auto find = [&](auto&& self, int v) -> int {
      return parent[v] == v ? v : parent[v] = self(self, parent[v]);
    };
    for (auto& key : opp) {
      const EMat& rep = table_.at(key).second;
      for (int side = 0; side < 2; ++side) {
        const int q = side_field(side).q();
        for (int a = 0; a < q; ++a) {
          EMat mate = rep.mul(x_mat({simple_root(side), a}).mul(n_mat(side)));
          auto it = index.find(key_of(mate));
          if (it != index.end())
            parent[find(find, it->second)] = find(find, index.at(key));
        }
      }
    }
    std::set<int> comps;
    for (size_t i = 0; i < opp.size(); ++i) comps.insert(find(find, static_cast<int>(i)));
    return {static_cast<int>(opp.size()), comps.size() <= 1};
  }

  // The panel Moufang set at one side of the base chamber: points are the
  // side's parameter set plus infinity (encoded q), root groups as
  // permutations.
  struct MoufangSet {
    int points = 0;                                   // q + 1, infinity = q
    std::vector<std::vector<std::vector<int>>> unit;  // per point: list of permutations
  };

  MoufangSet moufang_set(int side) const {
    const int q = side_field(side).q();
    std::vector<MatPairKey> panel(q + 1);
    panel[q] = key_of(identity_mat());
    for (int a = 0; a < q; ++a)
      panel[a] = key_of(x_mat({simple_root(side), a}).mul(n_mat(side)));
    std::map<MatPairKey, int> point_of;
    for (int p = 0; p <= q; ++p) point_of[panel[p]] = p;
    auto perm_of = [&](const EMat& g) {
      std::vector<int> perm(q + 1);
      for (int p = 0; p <= q; ++p) {
        EMat img = g.mul(table_.at(panel[p]).second);
        perm[p] = point_of.at(key_of(img));
      }
      return perm;
    };
    MoufangSet ms;
    ms.points = q + 1;
    ms.unit.resize(q + 1);
    // U_infinity = the simple root group itself.
    std::vector<std::vector<int>> uinf;
    for (int a = 0; a < q; ++a) uinf.push_back(perm_of(x_mat({simple_root(side), a})));
    ms.unit[q] = uinf;
    for (int pt = 0; pt < q; ++pt) {
      EMat g = x_mat({simple_root(side), pt}).mul(n_mat(side));  // maps infinity to pt
      std::vector<std::vector<int>> upt;
      for (int a = 0; a < q; ++a) {
        EMat conj = g.mul(x_mat({simple_root(side), a}).mul(g.inv()));
        upt.push_back(perm_of(conj));
      }
      ms.unit[pt] = upt;
    }
    return ms;
  }

 private:
  using MatPairKey = std::array<std::uint8_t, 34>;

  int dim() const { return desc_.kind == Rank2Kind::A2 ? 3 : 4; }

  int neg_side(int side, int a) const { return side_field(side).neg(a); }

  MatPairKey key_of(const EMat& m) const {
    MatPairKey k{};
    Mat r = m.m.column_reduced();
    for (int i = 0; i < r.n * r.n; ++i) k[i] = r.e[i];
    if (m.split) {
      Mat r2 = m.m2.column_reduced();
      for (int i = 0; i < r2.n * r2.n; ++i) k[17 + i] = r2.e[i];
    }
    return k;
  }

  SideWord canonical_type(const SideWord& w) const {
    // canonical reduced word of the dihedral element: ShortLex via the
    // rank-2 Coxeter matrix
    Word ww(w.begin(), w.end());
    auto e = reduce(cm2_, ww);
    return SideWord(e.word.begin(), e.word.end());
  }

  Mat pattern_mat(int root, int c) const {
    Mat m = Mat::identity(*f_, dim());
    for (auto& [i, j, sgn] : patterns_[root])
      m.at(i, j) = static_cast<std::uint8_t>(sgn > 0 ? c : f_->neg(c));
    return m;
  }

  int extract_param(const Mat& m, int root) const {
    auto& [i, j, sgn] = patterns_[root][0];
    int c = sgn > 0 ? m.at(i, j) : f_->neg(m.at(i, j));
    if (!(m == pattern_mat(root, c))) fail(Errc::schema, "matrix is not a root group element");
    return c;
  }

  void build_patterns() {
    // Entries (i, j, sign); coordinates in the (side0, side1) simple basis.
    if (desc_.kind == Rank2Kind::A2) {
      patterns_ = {{{0, 1, 1}}, {{1, 2, 1}}, {{0, 2, 1}}};
      coords_ = {{1, 0}, {0, 1}, {1, 1}};
      refl_ = {{-1, 2, 1}, {2, -1, 0}};
    } else {
      // B2 as Sp4 with the form <e1,e4> = <e2,e3> = 1.  alpha short, beta
      // long: x_alpha = I + a(E12 - E34), x_beta = I + a E23,
      // x_{alpha+beta} = I + a(E13 + E24), x_{2 alpha + beta} = I + a E14.
      std::vector<std::vector<std::array<int, 3>>> pat = {
          {{0, 1, 1}, {2, 3, -1}},
          {{1, 2, 1}},
          {{0, 2, 1}, {1, 3, 1}},
          {{0, 3, 1}},
      };
      // reflections: r_alpha: beta <-> 2a+b, a+b fixed; r_beta: alpha <-> a+b,
      // 2a+b fixed.
      if (desc_.short_side == 0) {
        patterns_ = pat;
        coords_ = {{1, 0}, {0, 1}, {1, 1}, {2, 1}};
        refl_ = {{-1, 3, 2, 1}, {2, -1, 0, 3}};
      } else {
        patterns_ = {pat[1], pat[0], pat[2], pat[3]};
        coords_ = {{1, 0}, {0, 1}, {1, 1}, {1, 2}};
        refl_ = {{-1, 2, 1, 3}, {3, -1, 2, 0}};
      }
    }
  }

  struct SideGroup {
    Mat n;
    std::vector<std::pair<Mat, std::pair<int, int>>> torus;
  };

  struct EmbeddedMOf {
    int b = 0, c = 0;
    Mat mat;
  };

  EmbeddedMOf side_m_of(int side, int a) const {
    auto& v = side_mof_[side];
    if (a == 0 || a >= static_cast<int>(v.size()) || v[a].mat.f == nullptr)
      fail(Errc::identity_input, "m(u) needs u != 1");
    return v[a];
  }

  void build_side_groups() {
    const int q = f_->q();
    for (int side = 0; side < 2; ++side) {
      side_mof_[side].resize(q);
      for (int a = 1; a < q; ++a) {
        Mat xm = pattern_mat(simple_root(side), a);
        bool found = false;
        for (int b = 0; b < q && !found; ++b)
          for (int c = 0; c < q && !found; ++c) {
            Mat yb = neg_pattern_transpose(side, b);
            Mat yc = neg_pattern_transpose(side, c);
            Mat m = yb * xm * yc;
            if (m.is_monomial()) {
              side_mof_[side][a] = {b, c, m};
              found = true;
            }
          }
        if (!found) fail(Errc::schema, "embedded m(u) not found");
      }
      side_[side].n = side_mof_[side][eps_[side]].mat;
      for (int u = 1; u < q; ++u)
        for (int v = 1; v < q; ++v) {
          Mat m = side_mof_[side][u].mat.inverse() * side_mof_[side][v].mat;
          bool seen = false;
          for (auto& [mat, uv] : side_[side].torus)
            if (mat == m) seen = true;
          if (!seen) side_[side].torus.push_back({m, {u, v}});
        }
    }
  }

  Mat neg_pattern_transpose(int side, int b) const {
    // opposite root group: transposed pattern
    Mat m = Mat::identity(*f_, dim());
    for (auto& [i, j, sgn] : patterns_[simple_root(side)])
      m.at(j, i) = static_cast<std::uint8_t>(sgn > 0 ? b : f_->neg(b));
    return m;
  }

  void build_table() {
    // Chambers are normal forms along canonical types; the table maps coset
    // fingerprints to (canonical chamber, representative matrix).
    auto elems = enumerate_elements(cm2_, mst_);
    for (const auto& w : elems) {
      SideWord type(w.word.begin(), w.word.end());
      std::vector<int> labels(type.size(), 0);
      for (;;) {
        EMat m = to_matrix(type, labels);
        auto key = key_of(m);
        auto [it, fresh] = table_.emplace(key, std::make_pair(Chamber{type, labels}, m));
        if (!fresh) fail(Errc::schema, "normal form collision in chamber table");
        size_t d = 0;
        while (d < labels.size() && ++labels[d] == side_field(type[d]).q()) labels[d++] = 0;
        if (d == labels.size() && !labels.empty()) break;
        if (labels.empty()) break;
      }
    }
  }

  void ensure_span_bfs() const {
    std::lock_guard<std::mutex> lock(span_mu_);
    if (span_built_) return;
    [&] {
      std::vector<std::pair<Mat, std::vector<std::pair<int, int>>>> frontier;
      std::map<MatKey, std::vector<std::pair<int, int>>> words;
      Mat id = Mat::identity(*f_, dim());
      words[mat_key(id)] = {};
      frontier.push_back({id, {}});
      const int q = f_->q();
      while (!frontier.empty()) {
        std::vector<std::pair<Mat, std::vector<std::pair<int, int>>>> next;
        for (auto& [m, word] : frontier) {
          for (int side = 0; side < 2; ++side)
            for (int a = 1; a < q; ++a) {
              Mat nm = m * pattern_mat(simple_root(side), a);
              auto key = mat_key(nm);
              if (words.count(key)) continue;
              auto nw = word;
              nw.push_back({side, a});
              words[key] = nw;
              next.push_back({nm, std::move(nw)});
            }
        }
        frontier = std::move(next);
      }
      span_words_ = std::move(words);
    }();
    span_built_ = true;
  }

  Rank2Descriptor desc_;
  int mst_ = 0;
  int nroots_ = 0;
  const FieldSpec* f_ = nullptr;
  int eps_[2] = {1, 1};
  std::optional<Sl2> blocks_[2];
  std::vector<std::vector<std::array<int, 3>>> patterns_;
  std::vector<std::pair<int, int>> coords_;
  std::vector<std::vector<int>> refl_;
  CoxeterMatrix cm2_;
  SideGroup side_[2];
  std::vector<EmbeddedMOf> side_mof_[2];
  std::map<MatPairKey, std::pair<Chamber, EMat>> table_;
  mutable std::mutex span_mu_;
  mutable bool span_built_ = false;
  mutable std::map<MatKey, std::vector<std::pair<int, int>>> span_words_;
};

}  // namespace buildings
