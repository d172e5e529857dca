#pragma once

// Shared foundation builders for the tests.

#include <map>
#include <string>
#include <vector>

#include "buildings/foundation.hpp"

namespace testhelpers {

using namespace buildings;

struct EdgeIn {
  int s, t;
  Rank2Kind kind;
  int q;
  int short_side = 0;
};

inline FoundationSpec make_spec(std::vector<std::string> names, std::vector<EdgeIn> edges,
                                std::map<GlueKey, GlueMap> glues = {}) {
  FoundationSpec spec;
  spec.cm.names = std::move(names);
  int n = static_cast<int>(spec.cm.names.size());
  spec.cm.m.assign(n, std::vector<int>(n, 2));
  for (int i = 0; i < n; ++i) spec.cm.m[i][i] = 1;
  for (auto& e : edges) {
    spec.cm.m[e.s][e.t] = spec.cm.m[e.t][e.s] = rank2_order(e.kind);
    Rank2Descriptor d;
    d.kind = e.kind;
    d.s = std::min(e.s, e.t);
    d.t = std::max(e.s, e.t);
    d.qs = d.qt = e.q;
    d.short_side = e.short_side;
    spec.edges[{d.s, d.t}] = d;
  }
  spec.glueings = std::move(glues);
  return spec;
}

inline FoundationSpec a2_spec(int q) {
  return make_spec({"s", "t"}, {{0, 1, Rank2Kind::A2, q}});
}
inline FoundationSpec b2_spec(int q, int short_side = 0) {
  return make_spec({"s", "t"}, {{0, 1, Rank2Kind::B2, q, short_side}});
}
inline FoundationSpec a1a1_spec(int q) {
  return make_spec({"s", "t"}, {{0, 1, Rank2Kind::A1xA1, q}});
}
inline FoundationSpec a3_spec(int q) {
  return make_spec({"1", "2", "3"}, {{0, 1, Rank2Kind::A2, q}, {1, 2, Rank2Kind::A2, q}});
}
inline FoundationSpec b3_spec(int q) {
  // 1 - 2 - 3 with m_23 = 4; the short simple root of the B2 edge sits at 2.
  return make_spec({"1", "2", "3"},
                   {{0, 1, Rank2Kind::A2, q}, {1, 2, Rank2Kind::B2, q, 0}});
}
inline FoundationSpec a1cubed_spec(int q) {
  return make_spec({"a", "b", "c"},
                   {{0, 1, Rank2Kind::A1xA1, q},
                    {0, 2, Rank2Kind::A1xA1, q},
                    {1, 2, Rank2Kind::A1xA1, q}});
}
// reducible rank 3: an A2 edge plus an isolated generator
inline FoundationSpec a2xa1_spec(int q) {
  return make_spec({"1", "2", "3"},
                   {{0, 1, Rank2Kind::A2, q},
                    {0, 2, Rank2Kind::A1xA1, q},
                    {1, 2, Rank2Kind::A1xA1, q}});
}
inline FoundationSpec d4tilde_spec(int q) {
  return make_spec({"c", "1", "2", "3", "4"},
                   {{0, 1, Rank2Kind::A2, q},
                    {0, 2, Rank2Kind::A2, q},
                    {0, 3, Rank2Kind::A2, q},
                    {0, 4, Rank2Kind::A2, q}});
}
// affine C2 tilde: not 3-spherical
inline FoundationSpec c2tilde_spec(int q) {
  return make_spec({"1", "2", "3"},
                   {{0, 1, Rank2Kind::B2, q}, {1, 2, Rank2Kind::B2, q}});
}

}  // namespace testhelpers
