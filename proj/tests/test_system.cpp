#include <doctest.h>

#include <cmath>
#include <complex>
#include <set>

#include "clab/errors.hpp"
#include "clab/examples.hpp"
#include "clab/system.hpp"
#include "test_util.hpp"

using namespace clab;

namespace {

GroupHom identity_hom(const FinAbGroup& z) {
  std::vector<GroupElement> images;
  for (int i = 0; i < z.rank(); ++i) images.push_back(z.generator(i));
  return make_hom(z, z, images);
}

FiniteSystem trivial_action_on(int points) {
  FinAbGroup gamma({2});
  std::vector<std::vector<int>> action(1);
  for (int p = 0; p < points; ++p) action[0].push_back(p);
  std::vector<Rational> weights(points, Rational(1, points));
  return make_system(gamma, std::move(weights), std::move(action));
}

// independent cube average over a full rotation: the order-k average of
// prod_omega C^{|omega|} f(z + omega . s) over all (z, s_1, ..., s_k)
std::complex<double> brute_rotation_cube_average(const FinAbGroup& z,
                                                 const ObservableC& f, int k) {
  long long n = z.size();
  std::vector<long long> idx(k + 1, 0);
  std::complex<double> total(0.0, 0.0);
  long long count = 0;
  while (true) {
    std::complex<double> prod(1.0, 0.0);
    for (int mask = 0; mask < (1 << k); ++mask) {
      GroupElement pt = z.element_at(idx[0]);
      for (int i = 0; i < k; ++i)
        if (mask & (1 << i)) pt = z.add(pt, z.element_at(idx[i + 1]));
      std::complex<double> v = f.values[z.index_of(pt)];
      prod *= (__builtin_popcount(unsigned(mask)) % 2 == 1) ? std::conj(v) : v;
    }
    total += prod;
    ++count;
    int i = k + 1;
    bool done = true;
    while (i-- > 0) {
      if (++idx[i] < n) { done = false; break; }
      idx[i] = 0;
    }
    if (done) break;
  }
  return total / double(count);
}

} // namespace

TEST_SUITE_BEGIN("system");

TEST_CASE("regular rotation is transitive") {
  FinAbGroup z({4});
  FiniteSystem x = make_rotational(z, identity_hom(z));
  CHECK(x.n_points == 4);
  CHECK(invariant_factor(x).n_blocks == 1);
}

TEST_CASE("index-two rotation splits into two orbits") {
  FinAbGroup gamma({2}), z({4});
  GroupHom phi = make_hom(gamma, z, {GroupElement{2}});
  FiniteSystem x = make_rotational(z, phi);
  FactorPartition orbits = invariant_factor(x);
  CHECK(orbits.n_blocks == 2);
  for (const auto& blk : orbits.blocks()) CHECK(blk.size() == 2);
}

TEST_CASE("doubling rotation mod 3 is transitive") {
  FinAbGroup z({3});
  GroupHom phi = make_hom(z, z, {GroupElement{2}});
  FiniteSystem x = make_rotational(z, phi);
  CHECK(invariant_factor(x).n_blocks == 1);
}

TEST_CASE("non-invariant custom weights are rejected") {
  FinAbGroup z({2});
  std::vector<Rational> bad = {Rational(1, 3), Rational(2, 3)};
  CHECK_THROWS_AS(make_rotational(z, identity_hom(z), bad), ConsistencyError);
  std::vector<Rational> good = {Rational(1, 2), Rational(1, 2)};
  CHECK_NOTHROW(make_rotational(z, identity_hom(z), good));
}

TEST_CASE("trivial action has singleton orbits and components") {
  FiniteSystem x = trivial_action_on(3);
  CHECK(invariant_factor(x).n_blocks == 3);
  CHECK(ergodic_components(x).size() == 3);
}

TEST_CASE("the order-two extension splits into four orbits of two") {
  FiniteSystem ext = extension_build(example_char2(1).rho);
  REQUIRE(ext.n_points == 8);
  FactorPartition orbits = invariant_factor(ext);
  CHECK(orbits.n_blocks == 4);
  for (const auto& blk : orbits.blocks()) CHECK(blk.size() == 2);
}

TEST_CASE("relative product over singletons is the diagonal") {
  FiniteSystem x = trivial_action_on(3);
  FactorPartition p = make_partition(x, {0, 1, 2});
  FiniteSystem y = rel_product(x, p);
  REQUIRE(y.n_points == 3);
  for (int i = 0; i < 3; ++i) CHECK(y.weights[i] == Rational(1, 3));
}

TEST_CASE("relative product over one block is the full product") {
  FinAbGroup z({3});
  FiniteSystem x = make_rotational(z, identity_hom(z));
  FiniteSystem y = rel_product(x, invariant_factor(x));
  CHECK(y.n_points == 9);
  for (int i = 0; i < 9; ++i) CHECK(y.weights[i] == Rational(1, 9));
}

TEST_CASE("relative product over the invariant factor of a two-orbit rotation") {
  FinAbGroup gamma({2}), z({4});
  FiniteSystem x = make_rotational(z, make_hom(gamma, z, {GroupElement{2}}));
  FiniteSystem y = rel_product(x, invariant_factor(x));
  REQUIRE(y.n_points == 8);
  for (int i = 0; i < 8; ++i) CHECK(y.weights[i] == Rational(1, 8));
}

TEST_CASE("cube of an ergodic rotation is the parallelepiped set") {
  FinAbGroup z({3});
  FiniteSystem x = make_rotational(z, identity_hom(z));
  FiniteSystem cube = cube_system(x, 2);
  REQUIRE(cube.n_points == 27);
  REQUIRE(cube.corner_width == 4);
  for (int p = 0; p < cube.n_points; ++p) {
    GroupElement c0 = z.element_at(cube.corner(p, 0));
    GroupElement c1 = z.element_at(cube.corner(p, 1));
    GroupElement c2 = z.element_at(cube.corner(p, 2));
    GroupElement c3 = z.element_at(cube.corner(p, 3));
    // corners are (z, z+s1, z+s2, z+s1+s2)
    CHECK(z.add(c1, c2) == z.add(c0, c3));
  }
  FiniteSystem two = make_rotational(FinAbGroup({2}), identity_hom(FinAbGroup({2})));
  CHECK(cube_system(two, 1).n_points == 4);
  CHECK(cube_system(x, 0).n_points == x.n_points);
  CHECK_THROWS_AS(cube_system(x, 4), SizeGuardError);
}

TEST_CASE("cube point count is |Z|^(k+1) for ergodic rotations") {
  for (long long n : {2, 3, 4}) {
    FinAbGroup z({n});
    FiniteSystem x = make_rotational(z, identity_hom(z));
    for (int k = 0; k <= 2; ++k) {
      long long expect = 1;
      for (int i = 0; i <= k; ++i) expect *= n;
      CHECK(cube_system(x, k).n_points == expect);
    }
  }
}

TEST_CASE("order-0 factor of an ergodic system is a single block") {
  FinAbGroup z({3});
  FiniteSystem x = make_rotational(z, identity_hom(z));
  CHECK(hkz_factor(x, 0).n_blocks == 1);
}

TEST_CASE("a rotation is its own order-1 factor") {
  for (long long n : {2, 3, 4, 5}) {
    FinAbGroup z({n});
    FiniteSystem x = make_rotational(z, identity_hom(z));
    CHECK(hkz_factor(x, 1).n_blocks == x.n_points);
  }
}

TEST_CASE("order-2 factor separates points of an ergodic extension component") {
  FiniteSystem ext = extension_build(example_char2(1).rho);
  auto components = ergodic_components(ext);
  REQUIRE(!components.empty());
  const FiniteSystem& comp = components.front();
  REQUIRE(comp.n_points == 2);
  CHECK(hkz_factor(comp, 2).n_blocks == comp.n_points);
}

TEST_CASE("order factors form a tower") {
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    FiniteSystem x = testutil::random_system(rng, 8);
    FactorPartition p0 = hkz_factor(x, 0);
    FactorPartition p1 = hkz_factor(x, 1);
    FactorPartition p2 = hkz_factor(x, 2);
    CHECK(refines(p1, p0));
    CHECK(refines(p2, p1));
  }
}

TEST_CASE("order-1 factor agrees with the eigenfunction construction") {
  Rng rng(5);
  for (int trial = 0; trial < 25; ++trial) {
    FiniteSystem x = testutil::random_system(rng, 16);
    KroneckerData kd = kronecker_factor(x);
    FactorPartition via_cubes = hkz_factor(x, 1);
    CHECK(via_cubes.block_of == kd.partition.block_of);
  }
}

TEST_CASE("eigenfunctions of the regular rotation are the characters") {
  FinAbGroup z({4});
  FiniteSystem x = make_rotational(z, identity_hom(z));
  KroneckerData kd = kronecker_factor(x);
  REQUIRE(kd.eigenfunctions.size() == 4);
  CHECK(kd.partition.n_blocks == 4);
  const double two_pi = 8.0 * std::atan(1.0);
  for (const auto& [lambda, f] : kd.eigenfunctions) {
    REQUIRE(f.values.size() == 4);
    CHECK(std::abs(f.values[0] - std::complex<double>(1.0, 0.0)) < 1e-12);
    for (int p = 0; p < 4; ++p) {
      double t = two_pi * lambda.eval(z, {1}).to_double();
      std::complex<double> rot(std::cos(t), std::sin(t));
      CHECK(std::abs(f.values[x.action[0][p]] - rot * f.values[p]) < 1e-12);
    }
  }
}

TEST_CASE("trivial action only keeps the zero eigenvalue") {
  FiniteSystem x = trivial_action_on(3);
  KroneckerData kd = kronecker_factor(x);
  CHECK(kd.eigenfunctions.size() == 3); // one indicator per orbit
  for (const auto& [lambda, f] : kd.eigenfunctions) CHECK(lambda.zero());
  CHECK(kd.partition.n_blocks == 3);
}

TEST_CASE("ergodic component of the order-two extension has two eigenfunctions") {
  FiniteSystem ext = extension_build(example_char2(1).rho);
  FiniteSystem comp = ergodic_components(ext).front();
  KroneckerData kd = kronecker_factor(comp);
  CHECK(kd.eigenfunctions.size() == 2);
}

TEST_CASE("uniformity norm of the constant function is one") {
  FinAbGroup z({3});
  FiniteSystem x = make_rotational(z, identity_hom(z));
  ObservableC one;
  one.values.assign(3, {1.0, 0.0});
  CHECK(gowers_norm(x, one, 1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gowers_norm(x, one, 2) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("uniformity norm of a character on the 3-rotation") {
  FinAbGroup z({3});
  FiniteSystem x = make_rotational(z, identity_hom(z));
  const double two_pi = 8.0 * std::atan(1.0);
  ObservableC f;
  for (int p = 0; p < 3; ++p)
    f.values.push_back({std::cos(two_pi * p / 3.0), std::sin(two_pi * p / 3.0)});
  // oracle: direct parallelepiped averages
  CHECK(std::abs(brute_rotation_cube_average(z, f, 1)) < 1e-12);
  CHECK(std::abs(brute_rotation_cube_average(z, f, 2) - 1.0) < 1e-12);
  CHECK(gowers_norm(x, f, 1) < 1e-9);
  CHECK(gowers_norm(x, f, 2) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("cube machinery matches the direct average on full rotations") {
  Rng rng(3);
  for (const auto& orders : std::vector<std::vector<long long>>{{3}, {4}, {2, 2}}) {
    FinAbGroup z(orders);
    FiniteSystem x = make_rotational(z, identity_hom(z));
    for (int trial = 0; trial < 5; ++trial) {
      ObservableC f = testutil::random_observable(rng, x.n_points);
      for (int k = 1; k <= 2; ++k) {
        double direct = std::pow(
            std::max(0.0, brute_rotation_cube_average(z, f, k).real()), 1.0 / (1 << k));
        CHECK(gowers_norm(x, f, k) == doctest::Approx(direct).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("ergodic components renormalize and preserve labels") {
  FiniteSystem ext = extension_build(example_char2(2).rho);
  auto components = ergodic_components(ext);
  REQUIRE(components.size() == 4);
  for (const auto& c : components) {
    CHECK(c.n_points == 4);
    Rational total(0);
    for (const auto& w : c.weights) total = total + w;
    CHECK(total == Rational(1));
    CHECK(c.label_width == ext.label_width);
    CHECK(c.parent_points.size() == 4);
  }
}

TEST_CASE("joint eigenfunction extraction fixes an exact character") {
  FinAbGroup z({4});
  FiniteSystem x = make_rotational(z, identity_hom(z));
  UnitaryAction u;
  u.perms = x.action;
  u.phases.assign(1, std::vector<CircleValue>(4));
  const double two_pi = 8.0 * std::atan(1.0);
  ObservableC chi;
  for (int p = 0; p < 4; ++p)
    chi.values.push_back({std::cos(two_pi * p / 4.0), std::sin(two_pi * p / 4.0)});
  ObservableC out = extract_joint_eigenfunction(x, u, chi, 1e-3);
  for (int p = 0; p < 4; ++p) CHECK(std::abs(out.values[p] - chi.values[p]) < 1e-9);
}

TEST_CASE("joint eigenfunction extraction removes a small perturbation") {
  FinAbGroup z({4});
  FiniteSystem x = make_rotational(z, identity_hom(z));
  UnitaryAction u;
  u.perms = x.action;
  u.phases.assign(1, std::vector<CircleValue>(4));
  const double two_pi = 8.0 * std::atan(1.0);
  ObservableC chi, g;
  for (int p = 0; p < 4; ++p)
    chi.values.push_back({std::cos(two_pi * p / 4.0), std::sin(two_pi * p / 4.0)});
  g = chi;
  g.values[2] += std::complex<double>(0.017, -0.011); // perturbation of norm ~0.01
  double norm = 0.0;
  for (auto v : g.values) norm += 0.25 * std::norm(v);
  for (auto& v : g.values) v /= std::sqrt(norm);
  ObservableC out = extract_joint_eigenfunction(x, u, g, 1e-3);
  for (int p = 0; p < 4; ++p) CHECK(std::abs(out.values[p] - chi.values[p]) < 1e-6);
}

TEST_CASE("degenerate guess raises the no-gap error") {
  FinAbGroup z({2});
  FiniteSystem x = make_rotational(z, identity_hom(z));
  UnitaryAction u;
  u.perms = x.action;
  u.phases.assign(1, std::vector<CircleValue>(2));
  ObservableC g;
  g.values = {std::sqrt(2.0), 0.0}; // normalized indicator of one point
  CHECK_THROWS_AS(extract_joint_eigenfunction(x, u, g, 1e-6), NoGapError);
}

TEST_CASE("inconsistent phase tables are rejected") {
  FinAbGroup z({2});
  FiniteSystem x = make_rotational(z, identity_hom(z));
  UnitaryAction u;
  u.perms = x.action;
  u.phases = {{CircleValue(1, 4), CircleValue(0, 1)}}; // order relation fails
  ObservableC g;
  g.values = {1.0, 1.0};
  CHECK_THROWS_AS(extract_joint_eigenfunction(x, u, g, 1e-6), ConsistencyError);
}

TEST_SUITE_END();
