#pragma once

#include <array>
#include <map>
#include <memory>
#include <set>
#include <vector>

#include "buildings/coxeter.hpp"
#include "buildings/error.hpp"
#include "buildings/gf.hpp"
#include "buildings/rank2.hpp"

namespace buildings {

// Base-point-preserving panel bijection u -> scale * frobenius^k(u), with
// infinity fixed.  Closed under composition and inversion, so the cocycle
// condition is checkable syntactically.
struct GlueMap {
  int scale = 1;  // nonzero field element
  int frob = 0;   // exponent of x -> x^p

  bool is_identity() const { return scale == 1 && frob == 0; }

  int apply(const FieldSpec& f, int label) const {
    return f.mul(scale, f.frobenius(label, frob));
  }
  int apply_inv(const FieldSpec& f, int label) const {
    int k = (f.automorphism_count() - frob % f.automorphism_count()) % f.automorphism_count();
    return f.frobenius(f.div(label, scale), k);
  }
  GlueMap compose(const FieldSpec& f, const GlueMap& inner) const {
    // (this o inner)(u) = scale * sigma(inner.scale) * (sigma o tau)(u)
    GlueMap g;
    g.scale = f.mul(scale, f.frobenius(inner.scale, frob));
    g.frob = (frob + inner.frob) % f.automorphism_count();
    return g;
  }
  GlueMap inverse(const FieldSpec& f) const {
    GlueMap g;
    g.frob = (f.automorphism_count() - frob % f.automorphism_count()) % f.automorphism_count();
    g.scale = f.frobenius(f.inv(scale), g.frob);
    return g;
  }
  friend bool operator==(const GlueMap&, const GlueMap&) = default;
};

using EdgeKey = std::pair<int, int>;          // (s, t) with s < t
using GlueKey = std::array<int, 3>;           // (r, s, t): glueing at the s-panel

inline EdgeKey edge_key(int s, int t) { return {std::min(s, t), std::max(s, t)}; }

// The foundation data: diagram + per-edge rank-2 building descriptors +
// glueings.  Declared A1xA1 pairs carry parameter sets but are not diagram
// edges; glueings join diagram edges only.
struct FoundationSpec {
  CoxeterMatrix cm;
  std::map<EdgeKey, Rank2Descriptor> edges;
  std::map<GlueKey, GlueMap> glueings;  // stored for r < t only

  bool has_edge(int s, int t) const { return edges.count(edge_key(s, t)) > 0; }

  // diagram neighbors: m_st >= 3
  std::vector<int> neighbors(int s) const {
    std::vector<int> out;
    for (auto& [key, d] : edges) {
      if (d.kind == Rank2Kind::A1xA1) continue;
      if (key.first == s) out.push_back(key.second);
      if (key.second == s) out.push_back(key.first);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  int vertex_q(int s) const {
    int q = -1;
    for (auto& [key, d] : edges) {
      int mine = key.first == s ? d.qs : (key.second == s ? d.qt : -1);
      if (mine < 0) continue;
      if (q < 0) q = mine;
      else if (q != mine)
        fail(Errc::panel_mismatch, "edges at '" + cm.names[s] + "' carry different fields");
    }
    if (q < 0)
      fail(Errc::schema, "generator '" + cm.names[s] + "' lies on no edge; parameter set unknown");
    return q;
  }

  // phi_rst for any ordered pair of diagram neighbors (r, t) of s.
  GlueMap glue(int r, int s, int t) const {
    if (r == t) return {};
    const FieldSpec& f = buildings::field(vertex_q(s));
    if (r < t) {
      auto it = glueings.find({r, s, t});
      return it == glueings.end() ? GlueMap{} : it->second;
    }
    auto it = glueings.find({t, s, r});
    return it == glueings.end() ? GlueMap{} : it->second.inverse(f);
  }

  // least diagram neighbor; the reference edge of the vertex
  int reference_neighbor(int s) const {
    auto nb = neighbors(s);
    return nb.empty() ? -1 : nb[0];
  }

  // twist of the edge {s,t}: global labels at s -> edge-local labels
  GlueMap twist(int s, int t) const {
    if (cm.order(s, t) == 2) return {};
    return glue(reference_neighbor(s), s, t);
  }

  FoundationSpec residue(const std::vector<int>& J) const;
};

struct ValidationProblem {
  Errc code;
  std::string what;
};

struct ValidationReport {
  std::vector<ValidationProblem> problems;
  bool ok() const { return problems.empty(); }
  void raise_first() const {
    if (!ok()) fail(problems[0].code, problems[0].what);
  }
};

namespace detail {

inline void check_mf2(const FoundationSpec& spec, int r, int s, int t,
                      ValidationReport& report) {
  // Explicit permutation check that the glueing conjugates the panel Moufang
  // set of the {r,s}-building onto the one of the {s,t}-building.
  const FieldSpec& f = buildings::field(spec.vertex_q(s));
  const int q = f.q();
  GlueMap phi = spec.glue(r, s, t);
  auto mk = [&](int a, int b) {
    return std::make_unique<Rank2Engine>(spec.edges.at(edge_key(a, b)), 1, 1);
  };
  auto e1 = mk(r, s), e2 = mk(s, t);
  auto ms1 = e1->moufang_set(e1->side_of_vertex(s));
  auto ms2 = e2->moufang_set(e2->side_of_vertex(s));
  auto phi_pt = [&](int p) { return p == q ? q : phi.apply(f, p); };
  for (int p = 0; p <= q; ++p) {
    std::set<std::vector<int>> conj;
    for (auto& u : ms1.unit[p]) {
      std::vector<int> perm(q + 1);
      for (int x = 0; x <= q; ++x) {
        int pre = x == q ? q : phi.apply_inv(f, x);
        perm[x] = phi_pt(u[pre]);
      }
      conj.insert(perm);
    }
    std::set<std::vector<int>> target(ms2.unit[phi_pt(p)].begin(), ms2.unit[phi_pt(p)].end());
    if (conj != target) {
      report.problems.push_back(
          {Errc::panel_mismatch, "glueing (" + spec.cm.names[r] + "," + spec.cm.names[s] + "," +
                                     spec.cm.names[t] + ") is not a Moufang set isomorphism"});
      return;
    }
  }
}

}  // namespace detail

inline ValidationReport validate(const FoundationSpec& spec) {
  ValidationReport report;
  try {
    spec.cm.validate();
  } catch (const Error& e) {
    report.problems.push_back({e.code(), e.what()});
    return report;
  }
  // declared edges match the matrix orders and carry consistent fields
  for (auto& [key, d] : spec.edges) {
    auto [s, t] = key;
    if (s >= t || t >= spec.cm.rank()) {
      report.problems.push_back({Errc::schema, "bad edge key"});
      return report;
    }
    int want = rank2_order(d.kind);
    if (spec.cm.order(s, t) != want)
      report.problems.push_back({Errc::schema, "edge kind disagrees with the Coxeter matrix"});
    if (d.kind != Rank2Kind::A1xA1 && d.qs != d.qt)
      report.problems.push_back({Errc::panel_mismatch, "A2/B2 edge with two fields"});
  }
  for (int s = 0; s < spec.cm.rank(); ++s) {
    try {
      (void)spec.vertex_q(s);
    } catch (const Error& e) {
      report.problems.push_back({e.code(), e.what()});
    }
  }
  if (!report.ok()) return report;
  // glueings join diagram edges at a common vertex, stored for r < t
  for (auto& [key, g] : spec.glueings) {
    auto [r, s, t] = key;
    if (r >= t || !spec.has_edge(r, s) || !spec.has_edge(s, t) ||
        spec.cm.order(r, s) == 2 || spec.cm.order(s, t) == 2) {
      report.problems.push_back({Errc::schema, "glueing does not join two diagram edges"});
      continue;
    }
    const FieldSpec& f = buildings::field(spec.vertex_q(s));
    if (g.scale <= 0 || g.scale >= f.q())
      report.problems.push_back({Errc::schema, "glueing scale is not a nonzero field element"});
    if (g.frob < 0 || g.frob >= f.automorphism_count())
      report.problems.push_back({Errc::schema, "glueing frobenius exponent out of range"});
  }
  if (!report.ok()) return report;
  // cocycle closure phi_tsu o phi_rst = phi_rsu over each vertex star
  for (int s = 0; s < spec.cm.rank(); ++s) {
    auto nb = spec.neighbors(s);
    const FieldSpec& f = buildings::field(spec.vertex_q(s));
    for (int r : nb)
      for (int t : nb)
        for (int u : nb) {
          GlueMap lhs = spec.glue(t, s, u).compose(f, spec.glue(r, s, t));
          if (!(lhs == spec.glue(r, s, u))) {
            report.problems.push_back(
                {Errc::cocycle_violation, "cocycle fails at the '" + spec.cm.names[s] +
                                              "' panel for (" + spec.cm.names[r] + "," +
                                              spec.cm.names[t] + "," + spec.cm.names[u] + ")"});
            return report;
          }
        }
  }
  // (MF2) for each pair of diagram edges at a vertex
  for (int s = 0; s < spec.cm.rank(); ++s) {
    auto nb = spec.neighbors(s);
    for (size_t i = 0; i < nb.size(); ++i)
      for (size_t j = i + 1; j < nb.size(); ++j) {
        detail::check_mf2(spec, nb[i], s, nb[j], report);
        if (!report.ok()) return report;
      }
  }
  return report;
}

inline FoundationSpec FoundationSpec::residue(const std::vector<int>& J) const {
  FoundationSpec out;
  std::map<int, int> index;
  for (size_t i = 0; i < J.size(); ++i) {
    index[J[i]] = static_cast<int>(i);
    out.cm.names.push_back(cm.names[J[i]]);
  }
  out.cm.m.assign(J.size(), std::vector<int>(J.size()));
  for (size_t i = 0; i < J.size(); ++i)
    for (size_t j = 0; j < J.size(); ++j) out.cm.m[i][j] = cm.m[J[i]][J[j]];
  for (auto& [key, d] : edges) {
    if (!index.count(key.first) || !index.count(key.second)) continue;
    Rank2Descriptor nd = d;
    nd.s = index[key.first];
    nd.t = index[key.second];
    if (nd.s > nd.t) {
      std::swap(nd.s, nd.t);
      std::swap(nd.qs, nd.qt);
      nd.short_side = 1 - nd.short_side;
    }
    out.edges[{nd.s, nd.t}] = nd;
  }
  for (auto& [key, g] : glueings) {
    if (!index.count(key[0]) || !index.count(key[1]) || !index.count(key[2])) continue;
    int r = index[key[0]], s = index[key[1]], t = index[key[2]];
    const FieldSpec& f = buildings::field(vertex_q(key[1]));
    if (r < t) out.glueings[{r, s, t}] = g;
    else out.glueings[{t, s, r}] = g.inverse(f);
  }
  return out;
}

// The assembled blueprint: one engine per declared edge, with units twisted by
// the glueings so that a single parameter set per vertex labels every edge.
class Blueprint {
 public:
  explicit Blueprint(const FoundationSpec& spec) : spec_(spec) {
    validate(spec).raise_first();
    for (auto& [key, d] : spec_.edges) {
      GlueMap tw0 = spec_.twist(key.first, key.second);
      GlueMap tw1 = spec_.twist(key.second, key.first);
      const FieldSpec& f0 = buildings::field(d.qs);
      const FieldSpec& f1 = buildings::field(d.qt);
      engines_[key] =
          std::make_unique<Rank2Engine>(d, tw0.apply(f0, 1), tw1.apply(f1, 1));
      twists_[{key.first, key.second}] = tw0;
      twists_[{key.second, key.first}] = tw1;
    }
    for (int s = 0; s < rank(); ++s)
      vertex_sl2_.push_back(std::make_unique<Sl2>(buildings::field(spec_.vertex_q(s)), 1));
  }

  const FoundationSpec& spec() const { return spec_; }
  const CoxeterMatrix& cm() const { return spec_.cm; }
  int rank() const { return spec_.cm.rank(); }

  const FieldSpec& vertex_field(int s) const { return vertex_sl2_[s]->field(); }
  const Sl2& vertex_sl2(int s) const { return *vertex_sl2_[s]; }

  bool has_engine(int s, int t) const { return engines_.count(edge_key(s, t)) > 0; }
  const Rank2Engine& engine(int s, int t) const {
    auto it = engines_.find(edge_key(s, t));
    if (it == engines_.end()) fail(Errc::wrong_edge, "no engine for this pair");
    return *it->second;
  }

  // global label at s -> local label of the edge {s,t}
  int to_local(int s, int t, int label) const {
    auto it = twists_.find({s, t});
    if (it == twists_.end()) return label;
    return it->second.apply(vertex_field(s), label);
  }
  int to_global(int s, int t, int label) const {
    auto it = twists_.find({s, t});
    if (it == twists_.end()) return label;
    return it->second.apply_inv(vertex_field(s), label);
  }

 private:
  FoundationSpec spec_;
  std::map<EdgeKey, std::unique_ptr<Rank2Engine>> engines_;
  std::map<std::pair<int, int>, GlueMap> twists_;
  std::vector<std::unique_ptr<Sl2>> vertex_sl2_;
};

// Foundation apartment: the all-zero-label chambers of every edge building.
struct FoundationApartment {
  std::map<EdgeKey, std::vector<Rank2Engine::Chamber>> chambers;
};

inline FoundationApartment apartment(const FoundationSpec& spec) {
  validate(spec).raise_first();
  FoundationApartment out;
  Blueprint bp(spec);
  for (auto& [key, d] : spec.edges) {
    const Rank2Engine& e = bp.engine(key.first, key.second);
    std::vector<Rank2Engine::Chamber> cs;
    for (const auto& w : enumerate_elements(CoxeterMatrix{{"0", "1"},
                                                          {{1, e.m_st()}, {e.m_st(), 1}}},
                                            e.m_st())) {
      Rank2Engine::SideWord type(w.word.begin(), w.word.end());
      cs.push_back({type, std::vector<int>(type.size(), 0)});
    }
    out.chambers[key] = cs;
  }
  // (FA2): the glueings fix the labels 0 and infinity, so the apartment
  // traces match across shared panels; assert it explicitly.
  for (int s = 0; s < spec.cm.rank(); ++s) {
    const FieldSpec& f = buildings::field(spec.vertex_q(s));
    auto nb = spec.neighbors(s);
    for (int r : nb)
      for (int t : nb)
        if (spec.glue(r, s, t).apply(f, 0) != 0)
          fail(Errc::schema, "glueing moves the apartment label 0");
  }
  return out;
}

}  // namespace buildings
