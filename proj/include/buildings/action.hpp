#pragma once

#include <atomic>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "buildings/chamber.hpp"

namespace buildings {

// A generator letter of the acting group: simple-root elements u_s(a), torus
// elements h_s(u,v) = m(u_s(u))^{-1} m(u_s(v)), the fixed n_s = m(e_s) and its
// inverse, and edge-local elements of non-simple positive root groups (these
// arise from conjugation inside the recursion, in edge-local parameters).
struct GenLetter {
  enum class Kind { Root, EdgeRoot, Torus, N, Ninv };
  Kind kind = Kind::Root;
  int s = -1;               // vertex (Root, Torus, N, Ninv)
  int a = 0;                // Root parameter (global)
  int es = -1, et = -1;     // EdgeRoot: edge vertices, es < et
  int root = -1, c = 0;     // EdgeRoot: local root index and parameter
  int u = 1, v = 1;         // Torus parameters (global)

  static GenLetter root_elem(int s, int a) {
    GenLetter l;
    l.kind = Kind::Root;
    l.s = s;
    l.a = a;
    return l;
  }
  static GenLetter torus(int s, int u, int v) {
    GenLetter l;
    l.kind = Kind::Torus;
    l.s = s;
    l.u = u;
    l.v = v;
    return l;
  }
  static GenLetter n(int s) {
    GenLetter l;
    l.kind = Kind::N;
    l.s = s;
    return l;
  }
  static GenLetter ninv(int s) {
    GenLetter l;
    l.kind = Kind::Ninv;
    l.s = s;
    return l;
  }
  static GenLetter edge_root(int es, int et, int root, int c) {
    GenLetter l;
    l.kind = Kind::EdgeRoot;
    l.es = es;
    l.et = et;
    l.root = root;
    l.c = c;
    return l;
  }
};

using GroupWord = std::vector<GenLetter>;

inline GroupWord inverse_word(const Realization& r, const GroupWord& w) {
  GroupWord out;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    GenLetter l = *it;
    switch (l.kind) {
      case GenLetter::Kind::Root:
        l.a = r.blueprint().vertex_field(l.s).neg(l.a);
        break;
      case GenLetter::Kind::EdgeRoot: {
        const auto& e = r.blueprint().engine(l.es, l.et);
        l.c = e.side_field(0).neg(l.c);  // A2/B2 edges have a single field
        break;
      }
      case GenLetter::Kind::Torus:
        std::swap(l.u, l.v);
        break;
      case GenLetter::Kind::N:
        l.kind = GenLetter::Kind::Ninv;
        break;
      case GenLetter::Kind::Ninv:
        l.kind = GenLetter::Kind::N;
        break;
    }
    out.push_back(l);
  }
  return out;
}

namespace detail {

// Letters produced by edge-local computations, normalized: zero parameters
// vanish, simple roots become global Root letters.
inline void push_local(const Realization& r, int es, int et, const LocalLetter& l,
                       GroupWord& out) {
  const auto& e = r.blueprint().engine(es, et);
  if (l.c == 0) return;
  if (e.is_simple(l.root)) {
    int vtx = e.vertex_of_side(e.root_side(l.root));
    int other = vtx == es ? et : es;
    out.push_back(GenLetter::root_elem(vtx, r.blueprint().to_global(vtx, other, l.c)));
    return;
  }
  out.push_back(GenLetter::edge_root(es, et, l.root, l.c));
}

}  // namespace detail

// The recursive action of B-letters (root and torus elements) on labelled
// sequences; preserves the type.
inline LabeledSequence omega_b_letter(const Realization& r, const GenLetter& g,
                                      const LabeledSequence& seq) {
  if (seq.type.empty()) return seq;
  const Blueprint& bp = r.blueprint();
  const CoxeterMatrix& cm = r.cm();
  const int s1 = seq.type[0];
  const int u1 = seq.labels[0];
  LabeledSequence tail{Word(seq.type.begin() + 1, seq.type.end()),
                       std::vector<int>(seq.labels.begin() + 1, seq.labels.end())};
  auto rejoin = [&](int head_label, const LabeledSequence& new_tail) {
    LabeledSequence out;
    out.type = seq.type;
    out.labels.reserve(seq.labels.size());
    out.labels.push_back(head_label);
    out.labels.insert(out.labels.end(), new_tail.labels.begin(), new_tail.labels.end());
    return out;
  };
  auto recurse = [&](const GroupWord& w, const LabeledSequence& t) {
    LabeledSequence cur = t;
    for (auto it = w.rbegin(); it != w.rend(); ++it) cur = omega_b_letter(r, *it, cur);
    return cur;
  };

  switch (g.kind) {
    case GenLetter::Kind::Root: {
      if (g.a == 0) return seq;
      if (g.s == s1)
        return rejoin(bp.vertex_field(s1).add(g.a, u1), tail);
      if (cm.order(g.s, s1) == 2) return rejoin(u1, recurse({g}, tail));
      const auto& e = bp.engine(g.s, s1);
      int other = g.s;  // the edge is {g.s, s1}
      LocalLetter lg{e.simple_root(e.side_of_vertex(g.s)), bp.to_local(g.s, s1, g.a)};
      LocalLetter lu{e.simple_root(e.side_of_vertex(s1)), bp.to_local(s1, other, u1)};
      GroupWord w;
      detail::push_local(r, std::min(g.s, s1), std::max(g.s, s1),
                         e.conj_by_n(e.side_of_vertex(s1), lg), w);
      for (const LocalLetter& cl : e.commutator(lg, lu))
        detail::push_local(r, std::min(g.s, s1), std::max(g.s, s1),
                           e.conj_by_n(e.side_of_vertex(s1), cl), w);
      return rejoin(u1, recurse(w, tail));
    }
    case GenLetter::Kind::EdgeRoot: {
      if (g.c == 0) return seq;
      const auto& e = bp.engine(g.es, g.et);
      if (s1 == g.es || s1 == g.et) {
        LocalLetter lg{g.root, g.c};
        LocalLetter lu{e.simple_root(e.side_of_vertex(s1)),
                       bp.to_local(s1, s1 == g.es ? g.et : g.es, u1)};
        GroupWord w;
        detail::push_local(r, g.es, g.et, e.conj_by_n(e.side_of_vertex(s1), lg), w);
        for (const LocalLetter& cl : e.commutator(lg, lu))
          detail::push_local(r, g.es, g.et, e.conj_by_n(e.side_of_vertex(s1), cl), w);
        return rejoin(u1, recurse(w, tail));
      }
      if (cm.order(g.es, s1) == 2 && cm.order(g.et, s1) == 2)
        return rejoin(u1, recurse({g}, tail));
      // the letter meets a different edge: expand into simple letters first
      GroupWord expanded;
      for (auto& [side, c] : e.expand({g.root, g.c})) {
        int vtx = e.vertex_of_side(side);
        int other = vtx == g.es ? g.et : g.es;
        expanded.push_back(GenLetter::root_elem(vtx, bp.to_global(vtx, other, c)));
      }
      return recurse(expanded, seq);
    }
    case GenLetter::Kind::Torus: {
      if (g.u == g.v) return seq;
      int head;
      if (g.s == s1) {
        head = bp.vertex_sl2(s1).torus_on_x(g.u, g.v, u1, false);
      } else if (cm.order(g.s, s1) == 2) {
        head = u1;
      } else {
        const auto& e = bp.engine(g.s, s1);
        LocalTorus lh{e.side_of_vertex(g.s), bp.to_local(g.s, s1, g.u),
                      bp.to_local(g.s, s1, g.v)};
        LocalLetter lu{e.simple_root(e.side_of_vertex(s1)), bp.to_local(s1, g.s, u1)};
        head = bp.to_global(s1, g.s, e.torus_conj_root(lh, lu, false).c);
      }
      GroupWord w;
      if (g.s == s1) {
        auto uv = bp.vertex_sl2(s1).conj_torus_by_n(g.u, g.v);
        if (uv.first != uv.second) w.push_back(GenLetter::torus(s1, uv.first, uv.second));
      } else if (cm.order(g.s, s1) == 2) {
        w.push_back(g);
      } else {
        const auto& e = bp.engine(g.s, s1);
        LocalTorus lh{e.side_of_vertex(g.s), bp.to_local(g.s, s1, g.u),
                      bp.to_local(g.s, s1, g.v)};
        for (const LocalTorus& lt : e.conj_torus_by_n(e.side_of_vertex(s1), lh)) {
          int vtx = e.vertex_of_side(lt.side);
          int other = vtx == s1 ? g.s : s1;
          w.push_back(GenLetter::torus(vtx, bp.to_global(vtx, other, lt.u),
                                       bp.to_global(vtx, other, lt.v)));
        }
      }
      return rejoin(head, recurse(w, tail));
    }
    default:
      fail(Errc::unsupported_letter, "n-letters do not act through omega_B");
  }
}

inline LabeledSequence omega_b(const Realization& r, const GroupWord& w,
                               const LabeledSequence& seq) {
  r.check_sequence(seq);
  LabeledSequence cur = seq;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    if (it->kind == GenLetter::Kind::N || it->kind == GenLetter::Kind::Ninv)
      fail(Errc::unsupported_letter, "omega_B accepts only root and torus letters");
    cur = omega_b_letter(r, *it, cur);
  }
  return cur;
}

// The action of n_s on a chamber.
inline Chamber omega_n(const Realization& r, int s, const Chamber& c) {
  r.require_realisable();
  const CoxeterMatrix& cm = r.cm();
  const Sl2& sl = r.blueprint().vertex_sl2(s);
  if (ascends_left(cm, c.element(), s)) {
    LabeledSequence ext;
    ext.type.push_back(static_cast<std::uint8_t>(s));
    ext.type.insert(ext.type.end(), c.seq.type.begin(), c.seq.type.end());
    ext.labels.push_back(0);
    ext.labels.insert(ext.labels.end(), c.seq.labels.begin(), c.seq.labels.end());
    return r.canonicalize(ext);
  }
  // representative of type (s, t_2, ..., t_k)
  CoxeterElement shorter =
      mult(cm, CoxeterElement{{static_cast<std::uint8_t>(s)}}, c.element());
  Word target;
  target.push_back(static_cast<std::uint8_t>(s));
  target.insert(target.end(), shorter.word.begin(), shorter.word.end());
  LabeledSequence rep = r.rewrite_to(c.seq, target);
  int u1 = rep.labels[0];
  LabeledSequence tail{Word(rep.type.begin() + 1, rep.type.end()),
                       std::vector<int>(rep.labels.begin() + 1, rep.labels.end())};
  if (u1 == 0) {
    auto nsq = sl.n_squared();
    GroupWord w;
    if (nsq.first != nsq.second) w.push_back(GenLetter::torus(s, nsq.first, nsq.second));
    return r.canonicalize(omega_b(r, w, tail));
  }
  auto conj = sl.ns_conj(u1);
  GroupWord b;
  if (conj.c != 0) b.push_back(GenLetter::root_elem(s, conj.c));
  if (conj.h.first != conj.h.second)
    b.push_back(GenLetter::torus(s, conj.h.first, conj.h.second));
  LabeledSequence new_tail = omega_b(r, b, tail);
  LabeledSequence out;
  out.type = rep.type;
  out.labels.push_back(conj.abar);
  out.labels.insert(out.labels.end(), new_tail.labels.begin(), new_tail.labels.end());
  return r.canonicalize(out);
}

// The full left-multiplication action of a generator word on a chamber.
inline Chamber omega(const Realization& r, const GroupWord& w, const Chamber& c) {
  r.require_realisable();
  Chamber cur = c;
  for (auto it = w.rbegin(); it != w.rend(); ++it) {
    switch (it->kind) {
      case GenLetter::Kind::N:
        cur = omega_n(r, it->s, cur);
        break;
      case GenLetter::Kind::Ninv: {
        const Sl2& sl = r.blueprint().vertex_sl2(it->s);
        auto nsqi = sl.n_squared_inv();
        GroupWord pre;
        if (nsqi.first != nsqi.second)
          pre.push_back(GenLetter::torus(it->s, nsqi.first, nsqi.second));
        cur = Chamber{omega_b(r, pre, cur.seq)};
        cur = omega_n(r, it->s, cur);
        break;
      }
      default:
        cur = Chamber{omega_b(r, {*it}, cur.seq)};
        break;
    }
  }
  return cur;
}

// u_1 n_1 ... u_k n_k as a group word; applying it to the base chamber gives
// back the chamber.
inline GroupWord chamber_word(const Chamber& c) {
  GroupWord w;
  for (size_t i = 0; i < c.seq.type.size(); ++i) {
    w.push_back(GenLetter::root_elem(c.seq.type[i], c.seq.labels[i]));
    w.push_back(GenLetter::n(c.seq.type[i]));
  }
  return w;
}

// W-distance, computed by moving x to the base chamber with the inverse of
// its defining word; the action is type preserving on classes.
inline CoxeterElement delta(const Realization& r, const Chamber& x, const Chamber& y) {
  Chamber moved = omega(r, inverse_word(r, chamber_word(x)), y);
  return moved.element();
}

// Projection of y onto the J-residue of anchor: greedy descent to the gate.
inline Chamber proj(const Realization& r, const Chamber& anchor, const std::vector<int>& J,
                    const Chamber& y) {
  Chamber z = anchor;
  int cur = delta(r, y, z).length();
  for (;;) {
    bool improved = false;
    for (int s : J) {
      for (const Chamber& m : r.panel(z, s)) {
        int d = delta(r, y, m).length();
        if (d < cur) {
          z = m;
          cur = d;
          improved = true;
          break;
        }
      }
      if (improved) break;
    }
    if (!improved) return z;
  }
}

// ---- verifier suite ------------------------------------------------------

struct VerifyReport {
  long checked = 0;
  long skipped = 0;
  struct Failure {
    Chamber chamber;
    std::string relation;
  };
  std::vector<Failure> failures;
  bool ok() const { return failures.empty(); }
};

namespace detail {

// Deterministic parallel evaluation: results land in per-index slots.
template <class F>
inline void parallel_over(long n, int threads, F&& f) {
  if (threads <= 1 || n < 2) {
    for (long i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<long> next{0};
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        long i = next.fetch_add(1);
        if (i >= n) return;
        f(i);
      }
    });
  for (auto& th : pool) th.join();
}

struct WordPair {
  GroupWord lhs, rhs;
  std::string name;
};

inline VerifyReport compare_words_on_chambers(const Realization& r,
                                              const std::vector<WordPair>& pairs,
                                              const std::vector<Chamber>& chambers,
                                              int threads) {
  VerifyReport report;
  std::vector<std::vector<VerifyReport::Failure>> fails(chambers.size());
  std::vector<long> checked(chambers.size(), 0), skipped(chambers.size(), 0);
  parallel_over(static_cast<long>(chambers.size()), threads, [&](long i) {
    for (const auto& p : pairs) {
      try {
        Chamber a = omega(r, p.lhs, chambers[i]);
        Chamber b = omega(r, p.rhs, chambers[i]);
        ++checked[i];
        if (!(a == b)) fails[i].push_back({chambers[i], p.name});
      } catch (const Error&) {
        ++skipped[i];
      }
    }
  });
  for (size_t i = 0; i < chambers.size(); ++i) {
    report.checked += checked[i];
    report.skipped += skipped[i];
    for (auto& f : fails[i]) report.failures.push_back(f);
  }
  return report;
}

inline GroupWord p_word_n(const CoxeterMatrix& cm, int s, int t) {
  GroupWord w;
  for (int i = 0; i < cm.order(s, t); ++i)
    w.push_back(GenLetter::n(i % 2 == 0 ? s : t));
  return w;
}

// h^{n_s} as a group word, for a global torus letter h at vertex t.
inline GroupWord conj_torus_global(const Realization& r, int s, const GenLetter& h) {
  const CoxeterMatrix& cm = r.cm();
  if (h.s == s) {
    auto uv = r.blueprint().vertex_sl2(s).conj_torus_by_n(h.u, h.v);
    if (uv.first == uv.second) return {};
    return {GenLetter::torus(s, uv.first, uv.second)};
  }
  if (cm.order(h.s, s) == 2) return {h};
  const auto& e = r.blueprint().engine(h.s, s);
  LocalTorus lh{e.side_of_vertex(h.s), r.blueprint().to_local(h.s, s, h.u),
                r.blueprint().to_local(h.s, s, h.v)};
  GroupWord out;
  for (const LocalTorus& lt : e.conj_torus_by_n(e.side_of_vertex(s), lh)) {
    int vtx = e.vertex_of_side(lt.side);
    int other = vtx == h.s ? s : h.s;
    out.push_back(GenLetter::torus(vtx, r.blueprint().to_global(vtx, other, lt.u),
                                   r.blueprint().to_global(vtx, other, lt.v)));
  }
  return out;
}

inline GroupWord nsq_word(const Realization& r, int s) {
  auto uv = r.blueprint().vertex_sl2(s).n_squared();
  if (uv.first == uv.second) return {};
  return {GenLetter::torus(s, uv.first, uv.second)};
}

}  // namespace detail

// p(n_s, n_t) = p(n_t, n_s) on every chamber.
inline VerifyReport verify_braid(const Realization& r, int max_len, int threads = 1) {
  auto chambers = r.enumerate(max_len);
  std::vector<detail::WordPair> pairs;
  for (int s = 0; s < r.cm().rank(); ++s)
    for (int t = s + 1; t < r.cm().rank(); ++t)
      pairs.push_back({detail::p_word_n(r.cm(), s, t), detail::p_word_n(r.cm(), t, s),
                       "p(n_" + r.cm().names[s] + ",n_" + r.cm().names[t] + ")"});
  return detail::compare_words_on_chambers(r, pairs, chambers, threads);
}

// n_s u_s n_s = ubar_s n_s b(u_s) on every chamber, u_s != 1.
inline VerifyReport verify_ps(const Realization& r, int max_len, int threads = 1) {
  auto chambers = r.enumerate(max_len);
  std::vector<detail::WordPair> pairs;
  for (int s = 0; s < r.cm().rank(); ++s) {
    const Sl2& sl = r.blueprint().vertex_sl2(s);
    for (int a = 1; a < r.vertex_q(s); ++a) {
      auto conj = sl.ns_conj(a);
      GroupWord lhs{GenLetter::n(s), GenLetter::root_elem(s, a), GenLetter::n(s)};
      GroupWord rhs{GenLetter::root_elem(s, conj.abar), GenLetter::n(s)};
      if (conj.c != 0) rhs.push_back(GenLetter::root_elem(s, conj.c));
      if (conj.h.first != conj.h.second)
        rhs.push_back(GenLetter::torus(s, conj.h.first, conj.h.second));
      pairs.push_back({lhs, rhs, "n u_" + r.cm().names[s] + "(" + std::to_string(a) + ") n"});
    }
  }
  return detail::compare_words_on_chambers(r, pairs, chambers, threads);
}

// n_s h n_s = n_s^2 h^{n_s} and n_s u_alpha n_s = n_s^2 u_alpha^{n_s}.
inline VerifyReport verify_torus_and_conj(const Realization& r, int max_len, int threads = 1) {
  auto chambers = r.enumerate(max_len);
  std::vector<detail::WordPair> pairs;
  const int n = r.cm().rank();
  for (int s = 0; s < n; ++s) {
    GroupWord nsq = detail::nsq_word(r, s);
    // torus relation, h in H_t for every t
    for (int t = 0; t < n; ++t) {
      for (int v = 2; v < r.vertex_q(t); ++v) {  // h_t(1, v), v != 1
        GenLetter h = GenLetter::torus(t, 1, v);
        GroupWord lhs{GenLetter::n(s), h, GenLetter::n(s)};
        GroupWord rhs = nsq;
        for (auto& l : detail::conj_torus_global(r, s, h)) rhs.push_back(l);
        pairs.push_back({lhs, rhs,
                         "n_" + r.cm().names[s] + " h_" + r.cm().names[t] + "(1," +
                             std::to_string(v) + ") n_" + r.cm().names[s]});
      }
    }
    // conjugate root group relation within each edge at s
    for (int t = 0; t < n; ++t) {
      if (t == s || r.cm().order(s, t) == 2) continue;
      const auto& e = r.blueprint().engine(s, t);
      for (int root = 0; root < e.positive_root_count(); ++root) {
        if (root == e.simple_root(e.side_of_vertex(s))) continue;
        for (int c = 1; c < e.side_field(0).q(); ++c) {
          GroupWord mid;
          detail::push_local(r, std::min(s, t), std::max(s, t), LocalLetter{root, c}, mid);
          GroupWord lhs{GenLetter::n(s)};
          lhs.insert(lhs.end(), mid.begin(), mid.end());
          lhs.push_back(GenLetter::n(s));
          GroupWord rhs = detail::nsq_word(r, s);
          GroupWord conj;
          detail::push_local(r, std::min(s, t), std::max(s, t),
                             e.conj_by_n(e.side_of_vertex(s), {root, c}), conj);
          rhs.insert(rhs.end(), conj.begin(), conj.end());
          pairs.push_back({lhs, rhs,
                           "n_" + r.cm().names[s] + " u_[root " + std::to_string(root) +
                               ", c " + std::to_string(c) + "] n_" + r.cm().names[s]});
        }
      }
    }
  }
  return detail::compare_words_on_chambers(r, pairs, chambers, threads);
}

struct RgdReport {
  VerifyReport rgd1;       // commutator identities, edge-locally
  VerifyReport rgd2;       // m(u) conjugation
  long rgd0_checked = 0;   // letters that moved some chamber
  long rgd3_checked = 0;   // base-chamber fixing / moving letters
  bool rgd0 = true, rgd3 = true;
  bool ok() const { return rgd0 && rgd3 && rgd1.ok() && rgd2.ok(); }
};

inline RgdReport verify_rgd(const Realization& r, int max_len, int threads = 1) {
  RgdReport out;
  auto chambers = r.enumerate(max_len);
  Chamber base = chambers[0];
  const int n = r.cm().rank();

  // (RGD0) and (RGD3): positive letters fix the base chamber and act
  // nontrivially somewhere; conjugated negative letters move the base.
  for (int s = 0; s < n; ++s) {
    for (int a = 1; a < r.vertex_q(s); ++a) {
      GenLetter u = GenLetter::root_elem(s, a);
      // (RGD0): the letter and its negative counterpart act nontrivially
      ++out.rgd0_checked;
      bool moves = false;
      for (auto& c : chambers)
        if (!(omega(r, {u}, c) == c)) { moves = true; break; }
      if (!moves) out.rgd0 = false;
      // (RGD3): positive letters fix the base; conjugated negative letters
      // move it
      ++out.rgd3_checked;
      if (!(omega(r, {u}, base) == base)) out.rgd3 = false;
      GroupWord neg{GenLetter::n(s), u, GenLetter::ninv(s)};
      if (omega(r, neg, base) == base) {
        out.rgd3 = false;
        out.rgd0 = false;
      }
    }
  }

  // (RGD1): edge-local commutator identities as actions.
  {
    std::vector<detail::WordPair> pairs;
    for (auto& [key, d] : r.blueprint().spec().edges) {
      const auto& e = r.blueprint().engine(key.first, key.second);
      if (d.kind == Rank2Kind::A1xA1) {
        // commuting root groups: [u_s(a), u_t(b)] acts trivially
        for (int a = 1; a < d.qs; ++a)
          for (int b = 1; b < d.qt; ++b) {
            GenLetter x = GenLetter::root_elem(key.first, a);
            GenLetter y = GenLetter::root_elem(key.second, b);
            GroupWord lhs{GenLetter::root_elem(key.first, r.blueprint().vertex_field(key.first).neg(a)),
                          GenLetter::root_elem(key.second, r.blueprint().vertex_field(key.second).neg(b)),
                          x, y};
            pairs.push_back({lhs, {}, "[u,u] on a commuting pair"});
          }
        continue;
      }
      const int q = e.side_field(0).q();
      for (int r1 = 0; r1 < e.positive_root_count(); ++r1)
        for (int r2 = 0; r2 < e.positive_root_count(); ++r2) {
          if (r1 == r2) continue;
          for (int a = 1; a < q; ++a)
            for (int b = 1; b < q; ++b) {
              GroupWord lhs, rhs;
              detail::push_local(r, key.first, key.second,
                                 LocalLetter{r1, e.side_field(0).neg(a)}, lhs);
              detail::push_local(r, key.first, key.second,
                                 LocalLetter{r2, e.side_field(0).neg(b)}, lhs);
              detail::push_local(r, key.first, key.second, LocalLetter{r1, a}, lhs);
              detail::push_local(r, key.first, key.second, LocalLetter{r2, b}, lhs);
              for (const LocalLetter& cl : e.commutator({r1, a}, {r2, b}))
                detail::push_local(r, key.first, key.second, cl, rhs);
              pairs.push_back({lhs, rhs, "RGD1 commutator"});
            }
        }
    }
    out.rgd1 = detail::compare_words_on_chambers(r, pairs, chambers, threads);
  }

  // (RGD2): conjugation by m(u) maps U_beta to U_{s beta}.
  {
    std::vector<detail::WordPair> pairs;
    for (auto& [key, d] : r.blueprint().spec().edges) {
      if (d.kind == Rank2Kind::A1xA1) continue;
      const auto& e = r.blueprint().engine(key.first, key.second);
      for (int vtx : {key.first, key.second}) {
        const Sl2& sl = r.blueprint().vertex_sl2(vtx);
        for (int a = 1; a < r.vertex_q(vtx); ++a) {
          // m(u) = h n_s with h = m(u) n_s^{-1} in H_s
          Mat hm = sl.m_of(a).mat * sl.n().inverse();
          auto uv = sl.torus_params(hm);
          GroupWord m_u;
          if (uv.first != uv.second) m_u.push_back(GenLetter::torus(vtx, uv.first, uv.second));
          m_u.push_back(GenLetter::n(vtx));
          GroupWord m_u_inv = inverse_word(r, m_u);
          int side = e.side_of_vertex(vtx);
          for (int root = 0; root < e.positive_root_count(); ++root) {
            if (root == e.simple_root(side)) continue;
            for (int c = 1; c < e.side_field(0).q(); ++c) {
              GroupWord mid;
              detail::push_local(r, key.first, key.second, LocalLetter{root, c}, mid);
              // x^{m(u)} = m(u)^{-1} x m(u) = n^{-1} (h^{-1} x h) n
              int other = vtx == key.first ? key.second : key.first;
              LocalTorus lh{side, r.blueprint().to_local(vtx, other, uv.first),
                            r.blueprint().to_local(vtx, other, uv.second)};
              LocalLetter byh = e.torus_conj_root(lh, {root, c}, true);
              GroupWord rhs;
              detail::push_local(r, key.first, key.second, e.conj_by_n(side, byh), rhs);
              GroupWord lhs = m_u_inv;
              lhs.insert(lhs.end(), mid.begin(), mid.end());
              lhs.insert(lhs.end(), m_u.begin(), m_u.end());
              pairs.push_back({lhs, rhs, "RGD2 m(u) conjugation"});
            }
          }
        }
      }
    }
    out.rgd2 = detail::compare_words_on_chambers(r, pairs, chambers, threads);
  }
  return out;
}

struct OrbitReport {
  CoxeterElement w;
  long tuples = 0;
  long sphere = 0;
  bool bijective = false;
};

// The product map (a_1, ..., a_k) -> u(a_1) n_1 ... u(a_k) n_k [()] is a
// bijection onto the w-sphere.
inline OrbitReport orbit_w(const Realization& r, const CoxeterElement& w, int max_len) {
  if (w.length() > max_len) fail(Errc::out_of_range, "w exceeds the truncation");
  OrbitReport report;
  report.w = w;
  Chamber base{LabeledSequence{}};
  std::set<Chamber> image;
  std::vector<int> tuple(w.length(), 0);
  long tuples = 0;
  for (;;) {
    GroupWord word;
    for (size_t i = 0; i < tuple.size(); ++i) {
      word.push_back(GenLetter::root_elem(w.word[i], tuple[i]));
      word.push_back(GenLetter::n(w.word[i]));
    }
    image.insert(omega(r, word, base));
    ++tuples;
    int d = static_cast<int>(tuple.size()) - 1;
    while (d >= 0 && ++tuple[d] == r.vertex_q(w.word[d])) tuple[d--] = 0;
    if (d < 0) break;
  }
  report.tuples = tuples;
  // the sphere: all chambers with element w
  long sphere = 1;
  for (auto s : w.word) sphere *= r.vertex_q(s);
  report.sphere = sphere;
  bool all_on_sphere = true;
  for (const Chamber& c : image)
    if (!(c.element() == w)) all_on_sphere = false;
  report.bijective =
      all_on_sphere && static_cast<long>(image.size()) == tuples && tuples == sphere;
  return report;
}

}  // namespace buildings
