#include "clab/system.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "clab/errors.hpp"

namespace clab {

int FiniteSystem::apply_element(const GroupElement& g, int p) const {
  gamma.check_element(g, "apply_element");
  for (size_t i = 0; i < g.size(); ++i)
    for (long long rep = 0; rep < g[i]; ++rep) p = action[i][p];
  return p;
}

void FiniteSystem::validate() const {
  if ((int)weights.size() != n_points)
    throw ConsistencyError("system: one weight per point required");
  Rational total(0);
  bool any_positive = false;
  for (const Rational& w : weights) {
    if (w.num < 0) throw ConsistencyError("system: negative weight");
    if (w.positive()) any_positive = true;
    total = total + w;
  }
  if (!(total == Rational(1))) throw ConsistencyError("system: weights must sum to 1");
  if (!any_positive) throw ConsistencyError("system: no positive-weight point");
  if ((int)action.size() != gamma.rank())
    throw ConsistencyError("system: one permutation per group generator required");
  for (int i = 0; i < gamma.rank(); ++i) {
    const auto& perm = action[i];
    if ((int)perm.size() != n_points)
      throw ConsistencyError("system: permutation size mismatch");
    std::vector<char> seen(n_points, 0);
    for (int p = 0; p < n_points; ++p) {
      if (perm[p] < 0 || perm[p] >= n_points || seen[perm[p]])
        throw ConsistencyError("system: action is not a permutation");
      seen[perm[p]] = 1;
      if (!(weights[perm[p]] == weights[p]))
        throw ConsistencyError("system: action does not preserve weights");
    }
    // order of the permutation divides the generator order
    for (int p = 0; p < n_points; ++p) {
      int q = p;
      for (long long rep = 0; rep < gamma.orders[i]; ++rep) q = perm[q];
      if (q != p)
        throw ConsistencyError("system: generator order does not annihilate the action");
    }
  }
  for (int i = 0; i < gamma.rank(); ++i)
    for (int j = i + 1; j < gamma.rank(); ++j)
      for (int p = 0; p < n_points; ++p)
        if (action[i][action[j][p]] != action[j][action[i][p]])
          throw ConsistencyError("system: generator actions do not commute");
  if (label_width > 0 && labels.size() != (size_t)label_width * n_points)
    throw ConsistencyError("system: label table size mismatch");
  if (!corners.empty() && corners.size() != (size_t)corner_width * n_points)
    throw ConsistencyError("system: corner table size mismatch");
}

FiniteSystem make_system(FinAbGroup gamma, std::vector<Rational> weights,
                         std::vector<std::vector<int>> action) {
  FiniteSystem x;
  x.gamma = std::move(gamma);
  x.n_points = int(weights.size());
  x.weights = std::move(weights);
  x.action = std::move(action);
  x.validate();
  return x;
}

std::vector<std::vector<int>> FactorPartition::blocks() const {
  std::vector<std::vector<int>> out(n_blocks);
  for (int p = 0; p < (int)block_of.size(); ++p) out[block_of[p]].push_back(p);
  return out;
}

namespace {

// renumber blocks in order of first appearance
void canonicalize_blocks(std::vector<int>& block_of, int& n_blocks) {
  std::vector<int> remap(n_blocks, -1);
  int next = 0;
  for (int& b : block_of) {
    if (remap[b] < 0) remap[b] = next++;
    b = remap[b];
  }
  n_blocks = next;
}

} // namespace

FactorPartition make_partition(const FiniteSystem& x, std::vector<int> block_of) {
  if ((int)block_of.size() != x.n_points)
    throw ConsistencyError("partition: size mismatch");
  int n_blocks = 0;
  for (int b : block_of) {
    if (b < 0) throw ConsistencyError("partition: negative block id");
    n_blocks = std::max(n_blocks, b + 1);
  }
  canonicalize_blocks(block_of, n_blocks);
  // invariance: the image of a block under each generator is a single block
  for (int g = 0; g < x.gamma.rank(); ++g) {
    std::vector<int> image(n_blocks, -1);
    for (int p = 0; p < x.n_points; ++p) {
      int b = block_of[p], ib = block_of[x.action[g][p]];
      if (image[b] < 0) image[b] = ib;
      else if (image[b] != ib)
        throw ConsistencyError("partition: not invariant under the action");
    }
  }
  FactorPartition part;
  part.block_of = std::move(block_of);
  part.n_blocks = n_blocks;
  return part;
}

bool refines(const FactorPartition& fine, const FactorPartition& coarse) {
  if (fine.block_of.size() != coarse.block_of.size()) return false;
  std::vector<int> target(fine.n_blocks, -1);
  for (size_t p = 0; p < fine.block_of.size(); ++p) {
    int f = fine.block_of[p], c = coarse.block_of[p];
    if (target[f] < 0) target[f] = c;
    else if (target[f] != c) return false;
  }
  return true;
}

FiniteSystem make_rotational(const FinAbGroup& z, const GroupHom& phi,
                             const std::optional<std::vector<Rational>>& weights) {
  if (!(phi.target == z))
    throw PreconditionError("make_rotational: hom target must be Z");
  long long n = z.size();
  FiniteSystem x;
  x.gamma = phi.source;
  x.n_points = int(n);
  if (weights) {
    if ((long long)weights->size() != n)
      throw PreconditionError("make_rotational: weight count mismatch");
    x.weights = *weights;
  } else {
    x.weights.assign(n, Rational(1, n));
  }
  x.action.resize(x.gamma.rank());
  for (int i = 0; i < x.gamma.rank(); ++i) {
    GroupElement step = phi.apply(x.gamma.generator(i));
    x.action[i].resize(n);
    for (long long p = 0; p < n; ++p)
      x.action[i][p] = int(z.index_of(z.add(z.element_at(p), step)));
  }
  x.label_width = z.rank();
  x.labels.reserve((size_t)n * z.rank());
  for (long long p = 0; p < n; ++p) {
    GroupElement e = z.element_at(p);
    x.labels.insert(x.labels.end(), e.begin(), e.end());
  }
  x.rotation = RotationInfo{z, phi};
  x.validate(); // rejects non-invariant custom weights
  return x;
}

FactorPartition invariant_factor(const FiniteSystem& x) {
  std::vector<int> block(x.n_points, -1);
  int next = 0;
  for (int p = 0; p < x.n_points; ++p) {
    if (block[p] >= 0) continue;
    if (!x.positive(p)) { block[p] = next++; continue; }
    // forward closure equals the orbit because every generator has finite order
    std::vector<int> stack{p};
    block[p] = next;
    while (!stack.empty()) {
      int q = stack.back();
      stack.pop_back();
      for (int g = 0; g < x.gamma.rank(); ++g) {
        int r = x.action[g][q];
        if (block[r] < 0) { block[r] = next; stack.push_back(r); }
      }
    }
    ++next;
  }
  FactorPartition part;
  part.block_of = std::move(block);
  part.n_blocks = next;
  canonicalize_blocks(part.block_of, part.n_blocks);
  return part;
}

FiniteSystem rel_product(const FiniteSystem& x, const FactorPartition& p) {
  if ((int)p.block_of.size() != x.n_points)
    throw PreconditionError("rel_product: partition does not match system");
  std::vector<Rational> block_weight(p.n_blocks, Rational(0));
  for (int q = 0; q < x.n_points; ++q)
    block_weight[p.block_of[q]] = block_weight[p.block_of[q]] + x.weights[q];

  auto blocks = p.blocks();
  FiniteSystem y;
  y.gamma = x.gamma;
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < x.n_points; ++a) {
    int b = p.block_of[a];
    if (!block_weight[b].positive()) continue;
    for (int c : blocks[b]) pairs.emplace_back(a, c);
  }
  y.n_points = int(pairs.size());
  y.weights.reserve(pairs.size());
  Rational total(0);
  for (auto& [a, c] : pairs) {
    Rational w = x.weights[a] * x.weights[c] / block_weight[p.block_of[a]];
    total = total + w;
    y.weights.push_back(w);
  }
  if (!(total == Rational(1)))
    throw InternalError("rel_product: weights do not sum to 1");

  std::map<std::pair<int, int>, int> index;
  for (int i = 0; i < y.n_points; ++i) index[pairs[i]] = i;
  y.action.assign(x.gamma.rank(), std::vector<int>(y.n_points));
  for (int g = 0; g < x.gamma.rank(); ++g)
    for (int i = 0; i < y.n_points; ++i) {
      auto it = index.find({x.action[g][pairs[i].first], x.action[g][pairs[i].second]});
      if (it == index.end())
        throw InternalError("rel_product: diagonal action leaves the point set");
      y.action[g][i] = it->second;
    }

  if (x.label_width > 0) {
    y.label_width = 2 * x.label_width;
    y.labels.reserve((size_t)y.n_points * y.label_width);
    for (auto& [a, c] : pairs) {
      y.labels.insert(y.labels.end(), x.label_row(a), x.label_row(a) + x.label_width);
      y.labels.insert(y.labels.end(), x.label_row(c), x.label_row(c) + x.label_width);
    }
  }
  y.corner_width = 2 * x.corner_width;
  y.corners.reserve((size_t)y.n_points * y.corner_width);
  for (auto& [a, c] : pairs) {
    for (int j = 0; j < x.corner_width; ++j) y.corners.push_back(x.corner(a, j));
    for (int j = 0; j < x.corner_width; ++j) y.corners.push_back(x.corner(c, j));
  }
  return y;
}

FiniteSystem cube_system(const FiniteSystem& x, int k, int cap) {
  if (k < 0) throw PreconditionError("cube_system: k must be >= 0");
  if (k > cap) throw SizeGuardError("cube_system: k exceeds the cube cap");
  FiniteSystem cube = x;
  cube.corner_width = 1;
  cube.corners.clear();
  for (int level = 0; level < k; ++level)
    cube = rel_product(cube, invariant_factor(cube));
  return cube;
}

FactorPartition hkz_factor(const FiniteSystem& x, int k, int cap) {
  if (k < 0) throw PreconditionError("hkz_factor: k must be >= 0");
  if (k + 1 > cap) throw SizeGuardError("hkz_factor: k exceeds the cube cap");
  FiniteSystem cube = cube_system(x, k + 1, cap);

  // union-find over base points, linking first coordinates that share the
  // remaining coordinates of a positive-weight cube point
  std::vector<int> parent(x.n_points);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::map<std::vector<int>, int> rep;
  std::vector<int> key(cube.corner_width - 1);
  for (int p = 0; p < cube.n_points; ++p) {
    if (!cube.positive(p)) continue;
    for (int j = 1; j < cube.corner_width; ++j) key[j - 1] = cube.corner(p, j);
    int x0 = cube.corner(p, 0);
    auto [it, fresh] = rep.try_emplace(key, x0);
    if (!fresh) parent[find(x0)] = find(it->second);
  }
  std::vector<int> block(x.n_points);
  for (int p = 0; p < x.n_points; ++p) block[p] = find(p);
  FactorPartition part;
  part.block_of = std::move(block);
  part.n_blocks = x.n_points;
  canonicalize_blocks(part.block_of, part.n_blocks);
  return make_partition(x, part.block_of); // re-checks invariance
}

namespace {

struct ExactEigenfunction {
  Character lambda;
  std::vector<char> support;       // 1 where defined (one orbit)
  std::vector<CircleValue> phase;  // meaningful where support is set
};

std::vector<ExactEigenfunction> exact_eigenfunctions(const FiniteSystem& x) {
  DualGroup dual = dual_group(x.gamma);
  FactorPartition orbits = invariant_factor(x);
  auto blocks = orbits.blocks();

  std::vector<ExactEigenfunction> out;
  for (const Character& lambda : dual.characters) {
    std::vector<CircleValue> step(x.gamma.rank());
    for (int g = 0; g < x.gamma.rank(); ++g)
      step[g] = lambda.eval(x.gamma, x.gamma.generator(g));
    for (const auto& blk : blocks) {
      if (!x.positive(blk.front())) continue;
      int base = *std::min_element(blk.begin(), blk.end());
      std::vector<char> support(x.n_points, 0);
      std::vector<CircleValue> phase(x.n_points);
      std::vector<int> stack{base};
      support[base] = 1;
      phase[base] = CircleValue();
      bool consistent = true;
      while (!stack.empty() && consistent) {
        int q = stack.back();
        stack.pop_back();
        for (int g = 0; g < x.gamma.rank() && consistent; ++g) {
          int r = x.action[g][q];
          CircleValue want = phase[q] + step[g];
          if (!support[r]) {
            support[r] = 1;
            phase[r] = want;
            stack.push_back(r);
          } else if (!(phase[r] == want)) {
            consistent = false;
          }
        }
      }
      if (consistent) out.push_back({lambda, std::move(support), std::move(phase)});
    }
  }
  return out;
}

} // namespace

KroneckerData kronecker_factor(const FiniteSystem& x) {
  bool any = false;
  for (int p = 0; p < x.n_points; ++p) any = any || x.positive(p);
  if (!any) throw PreconditionError("kronecker_factor: no positive-weight point");

  auto exact = exact_eigenfunctions(x);
  KroneckerData data;
  const double two_pi = 8.0 * std::atan(1.0);
  for (const auto& ef : exact) {
    ObservableC f;
    f.values.assign(x.n_points, {0.0, 0.0});
    for (int p = 0; p < x.n_points; ++p)
      if (ef.support[p]) {
        double t = two_pi * ef.phase[p].to_double();
        f.values[p] = {std::cos(t), std::sin(t)};
      }
    data.eigenfunctions.emplace_back(ef.lambda, std::move(f));
  }

  // exact partition: group points by their value under every eigenfunction
  std::map<std::vector<long long>, int> classes;
  std::vector<int> block(x.n_points);
  for (int p = 0; p < x.n_points; ++p) {
    std::vector<long long> sig;
    sig.reserve(exact.size() * 3);
    for (const auto& ef : exact) {
      if (ef.support[p]) {
        sig.push_back(1);
        sig.push_back(ef.phase[p].num);
        sig.push_back(ef.phase[p].den);
      } else {
        sig.push_back(0);
        sig.push_back(0);
        sig.push_back(0);
      }
    }
    auto [it, fresh] = classes.try_emplace(std::move(sig), int(classes.size()));
    block[p] = it->second;
  }
  data.partition = make_partition(x, block);
  return data;
}

double gowers_norm(const FiniteSystem& x, const ObservableC& f, int k, int cap) {
  if (k < 1) throw PreconditionError("gowers_norm: k must be >= 1");
  if ((int)f.values.size() != x.n_points)
    throw PreconditionError("gowers_norm: observable size mismatch");
  FiniteSystem cube = cube_system(x, k, cap);
  std::complex<double> total(0.0, 0.0);
  double mass = 0.0;
  for (int p = 0; p < cube.n_points; ++p) {
    if (!cube.positive(p)) continue;
    std::complex<double> prod(1.0, 0.0);
    for (int j = 0; j < cube.corner_width; ++j) {
      std::complex<double> v = f.values[cube.corner(p, j)];
      prod *= (std::popcount(unsigned(j)) % 2 == 1) ? std::conj(v) : v;
    }
    double w = cube.weights[p].to_double();
    total += w * prod;
    mass += w * std::abs(prod);
  }
  if (total.real() < -1e-9 * std::max(mass, 1.0))
    throw InternalError("gowers_norm: cube average has negative real part");
  // summation noise cannot be distinguished from zero; without this clamp
  // the 2^k-th root would inflate rounding into ~1e-8 norms
  double base = total.real();
  if (std::abs(base) <= 1e-11 * (1.0 + mass)) base = 0.0;
  return std::pow(std::max(base, 0.0), 1.0 / double(1 << k));
}

std::vector<std::complex<double>> block_averages(const FiniteSystem& x,
                                                 const FactorPartition& p,
                                                 const ObservableC& f) {
  std::vector<std::complex<double>> sum(p.n_blocks, {0.0, 0.0});
  std::vector<Rational> mass(p.n_blocks, Rational(0));
  for (int q = 0; q < x.n_points; ++q) {
    sum[p.block_of[q]] += x.weights[q].to_double() * f.values[q];
    mass[p.block_of[q]] = mass[p.block_of[q]] + x.weights[q];
  }
  for (int b = 0; b < p.n_blocks; ++b)
    if (mass[b].positive()) sum[b] /= mass[b].to_double();
    else sum[b] = {0.0, 0.0};
  return sum;
}

std::vector<FiniteSystem> ergodic_components(const FiniteSystem& x) {
  FactorPartition orbits = invariant_factor(x);
  std::vector<FiniteSystem> out;
  for (const auto& blk : orbits.blocks()) {
    if (!x.positive(blk.front())) continue;
    std::vector<int> pts = blk;
    std::sort(pts.begin(), pts.end());
    Rational mass(0);
    for (int p : pts) mass = mass + x.weights[p];
    std::vector<int> local(x.n_points, -1);
    for (int i = 0; i < (int)pts.size(); ++i) local[pts[i]] = i;

    FiniteSystem c;
    c.gamma = x.gamma;
    c.n_points = int(pts.size());
    for (int p : pts) c.weights.push_back(x.weights[p] / mass);
    c.action.assign(x.gamma.rank(), std::vector<int>(c.n_points));
    for (int g = 0; g < x.gamma.rank(); ++g)
      for (int i = 0; i < c.n_points; ++i) c.action[g][i] = local[x.action[g][pts[i]]];
    if (x.label_width > 0) {
      c.label_width = x.label_width;
      for (int p : pts)
        c.labels.insert(c.labels.end(), x.label_row(p), x.label_row(p) + x.label_width);
    }
    c.parent_points = pts;
    c.validate();
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

struct ExactOperator {
  std::vector<int> perm;            // x -> image of x
  std::vector<CircleValue> phase;   // phase at x
};

// composition a after b as operators: (a.b f)(x) = e(a.phase[x]) (b f)(a.perm^{-1} x)
ExactOperator compose(const ExactOperator& a, const ExactOperator& b) {
  int n = int(a.perm.size());
  std::vector<int> inv_a(n);
  for (int p = 0; p < n; ++p) inv_a[a.perm[p]] = p;
  ExactOperator c;
  c.perm.resize(n);
  c.phase.resize(n);
  for (int p = 0; p < n; ++p) {
    c.perm[p] = a.perm[b.perm[p]];
    c.phase[p] = a.phase[p] + b.phase[inv_a[p]];
  }
  return c;
}

bool operator_equal(const ExactOperator& a, const ExactOperator& b) {
  return a.perm == b.perm && a.phase == b.phase;
}

} // namespace

ObservableC extract_joint_eigenfunction(const FiniteSystem& x, const UnitaryAction& u,
                                        const ObservableC& g, double tol) {
  int n = x.n_points;
  if ((int)u.perms.size() != x.gamma.rank() || (int)u.phases.size() != x.gamma.rank())
    throw PreconditionError("extract: one permutation and phase table per generator");
  std::vector<ExactOperator> gen(x.gamma.rank());
  ExactOperator id{std::vector<int>(n), std::vector<CircleValue>(n)};
  std::iota(id.perm.begin(), id.perm.end(), 0);
  for (int i = 0; i < x.gamma.rank(); ++i) {
    if ((int)u.perms[i].size() != n || (int)u.phases[i].size() != n)
      throw PreconditionError("extract: table size mismatch");
    gen[i] = {u.perms[i], u.phases[i]};
  }
  // cocycle consistency: commuting generators, orders annihilate
  for (int i = 0; i < x.gamma.rank(); ++i) {
    ExactOperator powi = id;
    for (long long rep = 0; rep < x.gamma.orders[i]; ++rep) powi = compose(gen[i], powi);
    if (!operator_equal(powi, id))
      throw ConsistencyError("extract: generator order does not close the unitary action");
    for (int j = i + 1; j < x.gamma.rank(); ++j)
      if (!operator_equal(compose(gen[i], gen[j]), compose(gen[j], gen[i])))
        throw ConsistencyError("extract: unitary generators do not commute");
  }

  std::vector<double> w(n);
  for (int p = 0; p < n; ++p) w[p] = x.weights[p].to_double();
  auto inner = [&](const std::vector<std::complex<double>>& a,
                   const std::vector<std::complex<double>>& b) {
    std::complex<double> s(0.0, 0.0);
    for (int p = 0; p < n; ++p) s += w[p] * a[p] * std::conj(b[p]);
    return s;
  };
  auto norm = [&](const std::vector<std::complex<double>>& a) {
    return std::sqrt(std::max(0.0, inner(a, a).real()));
  };

  if ((int)g.values.size() != n) throw PreconditionError("extract: guess size mismatch");
  if (std::abs(norm(g.values) - 1.0) > 1e-9)
    throw PreconditionError("extract: guess must be a unit vector");

  // all translates U^gamma g, gamma over the full group
  const double two_pi = 8.0 * std::atan(1.0);
  long long gamma_size = x.gamma.size();
  std::vector<std::vector<std::complex<double>>> translates;
  translates.reserve(gamma_size);
  for (long long gi = 0; gi < gamma_size; ++gi) {
    GroupElement ge = x.gamma.element_at(gi);
    ExactOperator op = id;
    for (int i = 0; i < x.gamma.rank(); ++i)
      for (long long rep = 0; rep < ge[i]; ++rep) op = compose(gen[i], op);
    std::vector<int> inv(n);
    for (int p = 0; p < n; ++p) inv[op.perm[p]] = p;
    std::vector<std::complex<double>> h(n);
    for (int p = 0; p < n; ++p) {
      double t = two_pi * op.phase[p].to_double();
      h[p] = std::complex<double>(std::cos(t), std::sin(t)) * g.values[inv[p]];
    }
    translates.push_back(std::move(h));
  }

  auto apply_a = [&](const std::vector<std::complex<double>>& f) {
    std::vector<std::complex<double>> out(n, {0.0, 0.0});
    for (const auto& h : translates) {
      std::complex<double> c = inner(f, h);
      for (int p = 0; p < n; ++p) out[p] += c * h[p];
    }
    for (int p = 0; p < n; ++p) out[p] /= double(gamma_size);
    return out;
  };

  auto power_iterate = [&](std::vector<std::complex<double>> v,
                           const std::vector<std::complex<double>>* deflate)
      -> std::pair<double, std::vector<std::complex<double>>> {
    auto project_out = [&](std::vector<std::complex<double>>& f) {
      if (!deflate) return;
      std::complex<double> c = inner(f, *deflate);
      for (int p = 0; p < n; ++p) f[p] -= c * (*deflate)[p];
    };
    project_out(v);
    double nv = norm(v);
    if (nv < 1e-12) return {0.0, v};
    for (int p = 0; p < n; ++p) v[p] /= nv;
    double lambda = 0.0;
    for (int it = 0; it < 4000; ++it) {
      auto av = apply_a(v);
      project_out(av);
      double na = norm(av);
      if (na < 1e-15) return {0.0, av};
      for (int p = 0; p < n; ++p) av[p] /= na;
      double diff = 0.0;
      for (int p = 0; p < n; ++p) diff = std::max(diff, std::abs(av[p] - v[p]));
      v = std::move(av);
      lambda = na;
      if (diff < 1e-14 && it > 8) break;
    }
    return {lambda, v};
  };

  auto [lambda1, v1] = power_iterate(g.values, nullptr);

  // second eigenvalue from a deterministic start orthogonal to v1
  double lambda2 = 0.0;
  for (int start = 0; start < n; ++start) {
    std::vector<std::complex<double>> e(n, {0.0, 0.0});
    e[start] = {1.0, 0.0};
    std::complex<double> c = inner(e, v1);
    for (int p = 0; p < n; ++p) e[p] -= c * v1[p];
    if (norm(e) < 1e-9) continue;
    auto [l2, v2] = power_iterate(e, &v1);
    lambda2 = std::max(lambda2, l2);
  }

  if (lambda1 - lambda2 < tol)
    throw NoGapError("extract: spectral gap " + std::to_string(lambda1 - lambda2) +
                     " below tolerance");

  // fix the global phase: first entry of magnitude > 1e-9 becomes positive real
  for (int p = 0; p < n; ++p)
    if (std::abs(v1[p]) > 1e-9) {
      std::complex<double> u0 = v1[p] / std::abs(v1[p]);
      for (int q = 0; q < n; ++q) v1[q] /= u0;
      break;
    }
  ObservableC out;
  out.values = std::move(v1);
  return out;
}

} // namespace clab
