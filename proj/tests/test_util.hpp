#ifndef CLAB_TEST_UTIL_HPP
#define CLAB_TEST_UTIL_HPP

#include <algorithm>
#include <complex>
#include <set>
#include <vector>

#include "clab/cocycle.hpp"
#include "clab/random.hpp"
#include "clab/system.hpp"

namespace clab::testutil {

// Random system built from coset actions: each orbit is Gamma/St for a
// random subgroup St, so the generators commute with the right orders.
// Weights are uniform inside an orbit with a random ticket per orbit, and
// sometimes a zero-weight fixed point is appended.
inline FiniteSystem random_system(Rng& rng, int max_points, bool allow_null = true) {
  static const std::vector<std::vector<long long>> pool = {
      {2}, {3}, {4}, {2, 2}, {6}, {2, 4}};
  FinAbGroup gamma(pool[rng.below(pool.size())]);
  long long gn = gamma.size();

  struct Orbit {
    std::vector<int> coset_of;   // Gamma element index -> coset position
    int n_cosets = 0;
    long long ticket = 1;
  };
  auto make_orbit = [&](int subgroup_gens) {
    std::set<long long> st{0};
    for (int t = 0; t < subgroup_gens; ++t) {
      long long g = (long long)rng.below(gn);
      std::vector<long long> work(st.begin(), st.end());
      for (size_t head = 0; head < work.size(); ++head) {
        long long sum = gamma.index_of(
            gamma.add(gamma.element_at(work[head]), gamma.element_at(g)));
        if (st.insert(sum).second) work.push_back(sum);
      }
    }
    Orbit orbit;
    orbit.coset_of.assign(gn, -1);
    for (long long e = 0; e < gn; ++e) {
      if (orbit.coset_of[e] >= 0) continue;
      for (long long s : st) {
        long long m = gamma.index_of(gamma.add(gamma.element_at(e), gamma.element_at(s)));
        orbit.coset_of[m] = orbit.n_cosets;
      }
      ++orbit.n_cosets;
    }
    orbit.ticket = 1 + (long long)rng.below(4);
    return orbit;
  };

  std::vector<Orbit> orbits;
  int total = 0;
  int want = 1 + int(rng.below(3));
  for (int o = 0; o < want; ++o) {
    Orbit orbit = make_orbit(int(rng.below(3)));
    if (total + orbit.n_cosets > max_points) continue;
    total += orbit.n_cosets;
    orbits.push_back(std::move(orbit));
  }
  if (orbits.empty()) {
    Orbit orbit = make_orbit(0); // free orbit Gamma itself
    while (orbit.n_cosets > max_points) orbit = make_orbit(3);
    total = orbit.n_cosets;
    orbits.push_back(std::move(orbit));
  }

  bool add_null = allow_null && rng.below(2) == 0 && total + 1 <= max_points;
  int n = total + (add_null ? 1 : 0);

  long long ticket_total = 0;
  for (const auto& o : orbits) ticket_total += o.ticket;
  std::vector<Rational> weights;
  std::vector<std::vector<int>> action(gamma.rank(), std::vector<int>(n));
  int offset = 0;
  for (const auto& o : orbits) {
    for (int i = 0; i < o.n_cosets; ++i)
      weights.push_back(Rational(o.ticket, ticket_total * o.n_cosets));
    // position i holds the coset whose minimal member maps to i; recover a
    // member per coset to act on
    std::vector<long long> member(o.n_cosets, -1);
    for (long long e = gn; e-- > 0;) member[o.coset_of[e]] = e;
    for (int g = 0; g < gamma.rank(); ++g)
      for (int i = 0; i < o.n_cosets; ++i) {
        long long moved = gamma.index_of(
            gamma.add(gamma.element_at(member[i]), gamma.generator(g)));
        action[g][offset + i] = offset + o.coset_of[moved];
      }
    offset += o.n_cosets;
  }
  if (add_null) {
    weights.push_back(Rational(0));
    for (int g = 0; g < gamma.rank(); ++g) action[g][n - 1] = n - 1;
  }
  return make_system(gamma, std::move(weights), std::move(action));
}

inline ObservableC random_observable(Rng& rng, int n) {
  ObservableC f;
  for (int i = 0; i < n; ++i)
    f.values.push_back({double(rng.below(5)) - 2.0, double(rng.below(5)) - 2.0});
  return f;
}

// small fiber pool for randomized cocycle suites
inline Fiber random_fiber(Rng& rng, long long max_size) {
  static const std::vector<std::vector<long long>> pool = {
      {2}, {3}, {4}, {2, 2}, {8}, {2, 4}, {6}};
  while (true) {
    const auto& orders = pool[rng.below(pool.size())];
    FinAbGroup k(orders);
    if (k.size() <= max_size) return finite_fiber(k);
  }
}

} // namespace clab::testutil

#endif
