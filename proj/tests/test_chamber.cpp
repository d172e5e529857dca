#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "buildings/chamber.hpp"
#include "helpers.hpp"

using namespace buildings;
using namespace testhelpers;

namespace {

Realization realize(const FoundationSpec& spec) {
  Realization r(spec);
  auto rep = r.check_realisable();
  REQUIRE(rep.ok());
  return r;
}

}  // namespace

TEST_CASE("elementary moves") {
  Realization r(a1a1_spec(3));
  r.check_realisable();
  auto moves = r.elementary_moves({{0, 1}, {1, 2}});
  REQUIRE(moves.size() == 1);
  CHECK(moves[0].type == Word{1, 0});
  CHECK(moves[0].labels == std::vector<int>{2, 1});

  // no applicable window
  CHECK(r.elementary_moves({{0}, {1}}).empty());

  Realization a2(a2_spec(2));
  a2.check_realisable();
  auto mv = a2.elementary_moves({{0, 1, 0}, {1, 1, 1}});
  REQUIRE(mv.size() == 1);
  CHECK(mv[0].type == Word{1, 0, 1});
  // the oracle fixes the labels; round-trip must restore them
  auto back = a2.elementary_moves(mv[0]);
  REQUIRE(back.size() == 1);
  CHECK(back[0].labels == std::vector<int>{1, 1, 1});
}

TEST_CASE("canonicalize") {
  auto r = realize(a2_spec(2));
  CHECK(r.canonicalize({{}, {}}).is_base());
  Chamber c = r.canonicalize({{0, 1}, {1, 0}});
  CHECK(c.seq.type == Word{0, 1});
  CHECK(c.seq.labels == std::vector<int>{1, 0});
  // non-canonical type gets rewritten
  Chamber d = r.canonicalize({{1, 0, 1}, {1, 1, 1}});
  CHECK(d.seq.type == Word{0, 1, 0});
  // the class is the same: rewriting back along moves returns the original
  auto back = r.rewrite_to(d.seq, {1, 0, 1});
  CHECK(back.labels == std::vector<int>{1, 1, 1});
}

TEST_CASE("canonicalize requires a realisability check") {
  Realization r(a2_spec(2));
  CHECK_THROWS_MATCHES(r.canonicalize({{0}, {1}}), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::not_realisable;
                       }));
}

TEST_CASE("check_realisable verdicts") {
  for (int q : {2, 3, 4}) {
    Realization r(a1cubed_spec(q));
    CHECK(r.check_realisable().ok());
  }
  {
    Realization r(a3_spec(2));
    auto rep = r.check_realisable();
    REQUIRE(rep.subsets.size() == 1);
    CHECK(rep.ok());
  }
  {
    Realization r(a2xa1_spec(2));
    CHECK(r.check_realisable().ok());
  }
  {
    Realization r(b3_spec(2));
    CHECK(r.check_realisable().ok());
  }
  {
    Realization r(c2tilde_spec(2));
    auto rep = r.check_realisable();
    CHECK(!rep.ok());
    REQUIRE(rep.subsets.size() == 1);
    CHECK(!rep.subsets[0].spherical);
  }
}

TEST_CASE("enumerate counts") {
  CHECK(realize(a2_spec(2)).enumerate(3).size() == 21);
  CHECK(realize(a3_spec(2)).enumerate(6).size() == 315);
  CHECK(realize(d4tilde_spec(2)).enumerate(2).size() == 67);
  // deterministic order: (length, type, labels)
  auto r = realize(a2_spec(3));
  auto cs = r.enumerate(3);
  CHECK(cs.size() == 52);
  for (size_t i = 1; i < cs.size(); ++i) CHECK(cs[i - 1] < cs[i]);
}

TEST_CASE("panels") {
  auto r = realize(a2_spec(2));
  Chamber base = r.canonicalize({{}, {}});
  auto p = r.panel(base, 0);
  CHECK(p.size() == 3);  // q + 1
  // all mutually adjacent, all within the panel contain base
  for (auto& c : p) CHECK((c.is_base() || c.seq.type == Word{0}));
  // descending case: panel of a chamber whose canonical type does not end
  // with the panel direction
  Chamber far = r.canonicalize({{0, 1}, {1, 1}});
  auto p2 = r.panel(far, 0);
  CHECK(p2.size() == 3);
  int shorter = 0;
  for (auto& c : p2)
    if (c.length() == 1) ++shorter;
  CHECK(shorter == 0);  // ell(w s) = 3 > 2: all mates have length 2 or 3
  auto p3 = r.panel(far, 1);
  int gates = 0;
  for (auto& c : p3)
    if (c.length() == 1) ++gates;
  CHECK(gates == 1);
}

TEST_CASE("distances within residues (WD axioms at small scale)") {
  auto r = realize(a2_spec(2));
  Chamber base = r.canonicalize({{}, {}});
  auto dist = r.residue_with_distances(base, {0, 1}, 3);
  CHECK(dist.size() == 21);
  CHECK(dist.at(base).is_identity());
  // delta(base, [u]_s) = s
  for (int u = 0; u < 2; ++u)
    CHECK(dist.at(r.canonicalize({{0}, {u}})) == CoxeterElement{{0}});
  // delta from a non-base chamber
  Chamber x = r.canonicalize({{0}, {1}});
  auto dx = r.residue_with_distances(x, {0, 1}, 3);
  CHECK(dx.at(x).is_identity());
  CHECK(dx.at(r.canonicalize({{0, 1}, {1, 1}})) == CoxeterElement{{1}});
  // (WD2) on sampled triples: delta(x, z) in {w, ws} for z in an s-panel of y
  for (auto& [y, w] : dx) {
    for (int s : {0, 1}) {
      for (auto& z : r.panel(y, s)) {
        auto wz = dx.at(z);
        auto ws = mult(r.cm(), w, CoxeterElement{{static_cast<std::uint8_t>(s)}});
        CHECK((wz == w || wz == ws));
        if (ws.length() == w.length() + 1 && !(z == y)) CHECK(wz == ws);
      }
    }
  }
}

TEST_CASE("chamber counts equal the Poincare sum per element") {
  auto r = realize(b3_spec(2));
  auto chambers = r.enumerate(9);
  CHECK(chambers.size() == 2835);
  std::map<Word, int> per_type;
  for (auto& c : chambers) ++per_type[c.seq.type];
  for (auto& [type, count] : per_type) {
    int expect = 1;
    for (auto s : type) expect *= r.vertex_q(s);
    CHECK(count == expect);
  }
}

TEST_CASE("residues are isomorphic to the edge buildings (counts)") {
  auto r = realize(a3_spec(2));
  Chamber base = r.canonicalize({{}, {}});
  auto d01 = r.residue_with_distances(base, {0, 1}, 6);
  CHECK(d01.size() == 21);
  auto d12 = r.residue_with_distances(base, {1, 2}, 6);
  CHECK(d12.size() == 21);
  auto d02 = r.residue_with_distances(base, {0, 2}, 6);
  CHECK(d02.size() == 9);  // A1xA1 over F2: (1+2)^2
  // a residue around a non-base chamber has the same size
  Chamber c = r.canonicalize({{2, 1, 0}, {1, 1, 1}});
  CHECK(r.residue_with_distances(c, {0, 1}, 6).size() == 21);
}

TEST_CASE("confluence: random braid paths canonicalize identically") {
  auto r = realize(a3_spec(3));
  std::mt19937_64 rng(4242);
  auto elems = enumerate_elements(r.cm(), 6);
  for (int it = 0; it < 300; ++it) {
    const auto& w = elems[rng() % elems.size()];
    LabeledSequence seq{w.word, {}};
    for (auto s : w.word) seq.labels.push_back(static_cast<int>(rng() % r.vertex_q(s)));
    Chamber expect = r.canonicalize(seq);
    // random walk through elementary moves, then canonicalize
    LabeledSequence cur = seq;
    for (int hop = 0; hop < 6; ++hop) {
      auto moves = r.elementary_moves(cur);
      if (moves.empty()) break;
      cur = moves[rng() % moves.size()];
    }
    CHECK(r.canonicalize(cur) == expect);
  }
}

TEST_CASE("out of range residues") {
  auto r = realize(d4tilde_spec(2));
  Chamber base = r.canonicalize({{}, {}});
  CHECK_THROWS_MATCHES(r.residue_with_distances(base, {0, 1}, 1), Error,
                       Catch::Matchers::Predicate<Error>([](const Error& e) {
                         return e.code() == Errc::out_of_range;
                       }));
  CHECK(r.residue_with_distances(base, {0, 1}, 3).size() == 21);
}

TEST_CASE("co_check") {
  auto a2q5 = realize(a2_spec(5));
  Chamber base5 = a2q5.canonicalize({{}, {}});
  auto co = a2q5.co_check(0, 1, base5, 3);
  CHECK(co.vertices == 125);
  CHECK(co.connected);

  auto a11 = realize(a1a1_spec(2));
  Chamber b = a11.canonicalize({{}, {}});
  auto co2 = a11.co_check(0, 1, b, 2);
  CHECK(co2.vertices == 4);
  CHECK(co2.connected);

  // reported for q = 2 on A2 (not asserted): just exercise the call
  auto a2q2 = realize(a2_spec(2));
  auto co3 = a2q2.co_check(0, 1, a2q2.canonicalize({{}, {}}), 3);
  CHECK(co3.vertices == 8);
}

TEST_CASE("co_check from a non-base chamber") {
  auto r = realize(a3_spec(2));
  Chamber c = r.canonicalize({{0, 1}, {1, 1}});
  auto co = r.co_check(0, 1, c, 6);
  CHECK(co.vertices == 8);
}

TEST_CASE("sco_check on the rank-3 opposition system") {
  auto r = realize(a3_spec(2));
  Chamber base = r.canonicalize({{}, {}});
  auto rep = r.sco_check({0, 1, 2}, base, 6);
  CHECK(rep.vertices == 64);
  CHECK(rep.connected);
  // verdict is reported; INCONCLUSIVE is acceptable at q = 2
  CHECK((rep.verdict == ScoVerdict::SIMPLY_CONNECTED ||
         rep.verdict == ScoVerdict::NOT_SIMPLY_CONNECTED ||
         rep.verdict == ScoVerdict::INCONCLUSIVE));
  CHECK(rep.generators > 0);
}
