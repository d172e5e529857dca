#pragma once

// Independent brute-force oracles used by the tests.  Everything here works
// with permutation groups and exhaustive enumeration and shares no code with
// the library implementation it checks.

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

namespace oracle {

using Perm = std::vector<int>;

inline Perm perm_identity(int n) {
  Perm p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  return p;
}

inline Perm compose(const Perm& f, const Perm& g) {  // (f*g)(x) = f(g(x))
  Perm r(f.size());
  for (size_t i = 0; i < g.size(); ++i) r[i] = f[g[i]];
  return r;
}

// A finite Coxeter group realized by generator permutations.
struct PermGroup {
  std::vector<Perm> gens;
  std::map<Perm, int> length;            // min word length per element
  std::vector<Perm> elements;            // BFS order

  explicit PermGroup(std::vector<Perm> g) : gens(std::move(g)) {
    Perm id = perm_identity(static_cast<int>(gens[0].size()));
    length[id] = 0;
    elements.push_back(id);
    for (size_t head = 0; head < elements.size(); ++head) {
      Perm cur = elements[head];
      int len = length[cur];
      for (const Perm& s : gens) {
        Perm nxt = compose(cur, s);
        if (!length.count(nxt)) {
          length[nxt] = len + 1;
          elements.push_back(nxt);
        }
      }
    }
  }

  int size() const { return static_cast<int>(elements.size()); }

  Perm eval(const std::vector<int>& word) const {
    Perm p = perm_identity(static_cast<int>(gens[0].size()));
    for (int s : word) p = compose(p, gens[s]);
    return p;
  }

  int len(const std::vector<int>& word) const { return length.at(eval(word)); }

  // All reduced words of an element, by descent recursion on the length table.
  std::vector<std::vector<int>> reduced_words(const Perm& w) const {
    std::vector<std::vector<int>> out;
    int lw = length.at(w);
    if (lw == 0) {
      out.push_back({});
      return out;
    }
    for (size_t s = 0; s < gens.size(); ++s) {
      Perm rest = compose(gens[s], w);  // s * w
      if (length.at(rest) == lw - 1) {
        for (auto& tail : reduced_words(rest)) {
          std::vector<int> word{static_cast<int>(s)};
          word.insert(word.end(), tail.begin(), tail.end());
          out.push_back(std::move(word));
        }
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  // ShortLex-least reduced word.
  std::vector<int> canonical(const Perm& w) const {
    auto words = reduced_words(w);
    return *std::min_element(words.begin(), words.end());
  }

  // Half-space v alpha_s = {w : len(s v^{-1} w) > len(v^{-1} w)} as a set of
  // element indices.
  std::set<int> half_space(const Perm& v, int s) const {
    Perm vinv = inverse(v);
    std::set<int> out;
    for (int i = 0; i < size(); ++i) {
      Perm u = compose(vinv, elements[i]);
      Perm su = compose(gens[s], u);
      if (length.at(su) > length.at(u)) out.insert(i);
    }
    return out;
  }

  static Perm inverse(const Perm& p) {
    Perm r(p.size());
    for (size_t i = 0; i < p.size(); ++i) r[p[i]] = static_cast<int>(i);
    return r;
  }

  // Every distinct half-space of the group.
  std::vector<std::set<int>> all_half_spaces() const {
    std::set<std::set<int>> seen;
    for (const Perm& v : elements)
      for (size_t s = 0; s < gens.size(); ++s) seen.insert(half_space(v, s));
    return {seen.begin(), seen.end()};
  }
};

// Standard small Coxeter groups.
inline PermGroup make_a2() {  // S3, s=(01), t=(12)
  return PermGroup({{1, 0, 2}, {0, 2, 1}});
}
inline PermGroup make_a1a1() {  // C2 x C2 on 4 points
  return PermGroup({{1, 0, 2, 3}, {0, 1, 3, 2}});
}
inline PermGroup make_b2() {  // signed perms of 2 letters: points (1,2,-1,-2)
  return PermGroup({{1, 0, 3, 2}, {2, 1, 0, 3}});
}
inline PermGroup make_a3() {  // S4
  return PermGroup({{1, 0, 2, 3}, {0, 2, 1, 3}, {0, 1, 3, 2}});
}
inline PermGroup make_b3() {  // signed perms of 3 letters: points (1,2,3,-1,-2,-3)
  return PermGroup({
      {1, 0, 2, 4, 3, 5},  // swap 1,2
      {0, 2, 1, 3, 5, 4},  // swap 2,3
      {0, 1, 5, 3, 4, 2},  // sign flip on 3
  });
}

}  // namespace oracle
