#include "clab/cocycle.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <queue>

#include "clab/errors.hpp"

namespace clab {

namespace {

// Precomputed fiber arithmetic on element indices.
struct FiberOps {
  const FinAbGroup& g;
  long long n;
  std::vector<long long> add_table;
  std::vector<long long> neg_table;

  explicit FiberOps(const FinAbGroup& group) : g(group), n(group.size()) {
    add_table.resize(n * n);
    neg_table.resize(n);
    for (long long a = 0; a < n; ++a) {
      GroupElement ea = g.element_at(a);
      neg_table[a] = g.index_of(g.neg(ea));
      for (long long b = 0; b < n; ++b)
        add_table[a * n + b] = g.index_of(g.add(ea, g.element_at(b)));
    }
  }
  long long add(long long a, long long b) const { return add_table[a * n + b]; }
  long long neg(long long a) const { return neg_table[a]; }
  long long sub(long long a, long long b) const { return add(a, neg(b)); }
};

long long exponent_with_rotation(const FiniteSystem& base, const Fiber& fiber) {
  long long m = std::lcm(fiber.modulus(), base.gamma.exponent());
  if (base.rotation) m = std::lcm(m, base.rotation->z.exponent());
  return m;
}

} // namespace

Fiber finite_fiber(FinAbGroup k) { return Fiber{std::move(k), false}; }

Fiber circle_fiber(long long m) {
  if (m < 1) throw PreconditionError("circle fiber needs modulus >= 1");
  return Fiber{FinAbGroup({m}), true};
}

bool TransferFunction::zero() const {
  return std::all_of(values.begin(), values.end(), [](long long v) { return v == 0; });
}

long long Cocycle::eval(const GroupElement& g, int point) const {
  base->gamma.check_element(g, "cocycle eval");
  FiberOps ops(fiber.group);
  long long total = 0;
  int p = point;
  for (int i = base->gamma.rank(); i-- > 0;) {
    for (long long t = 0; t < g[i]; ++t) {
      total = ops.add(total, tables[i][p]);
      p = base->action[i][p];
    }
  }
  return total;
}

std::string CoboundaryObstruction::describe() const {
  return "orbit base " + std::to_string(orbit_base) + ", point " + std::to_string(point) +
         ", generator " + std::to_string(generator) + ", defect " + std::to_string(value);
}

Cocycle make_cocycle(SystemPtr base, Fiber fiber,
                     std::vector<std::vector<long long>> tables) {
  const FiniteSystem& x = *base;
  if ((int)tables.size() != x.gamma.rank())
    throw ConsistencyError("cocycle: one table per generator required");
  long long fn = fiber.size();
  for (auto& t : tables) {
    if ((int)t.size() != x.n_points)
      throw ConsistencyError("cocycle: table size mismatch");
    for (long long v : t)
      if (v < 0 || v >= fn) throw ConsistencyError("cocycle: fiber value out of range");
  }
  FiberOps ops(fiber.group);
  // order consistency: the telescoped sum along each generator cycle is zero
  for (int i = 0; i < x.gamma.rank(); ++i)
    for (int p = 0; p < x.n_points; ++p) {
      if (!x.positive(p)) continue;
      long long sum = 0;
      int q = p;
      for (long long j = 0; j < x.gamma.orders[i]; ++j) {
        sum = ops.add(sum, tables[i][q]);
        q = x.action[i][q];
      }
      if (sum != 0)
        throw ConsistencyError("cocycle: order relation fails at generator " +
                               std::to_string(i) + ", point " + std::to_string(p) +
                               ", telescoped value " + std::to_string(sum));
    }
  // commutation consistency
  for (int i = 0; i < x.gamma.rank(); ++i)
    for (int j = i + 1; j < x.gamma.rank(); ++j)
      for (int p = 0; p < x.n_points; ++p) {
        if (!x.positive(p)) continue;
        long long lhs = ops.add(tables[i][x.action[j][p]], tables[j][p]);
        long long rhs = ops.add(tables[j][x.action[i][p]], tables[i][p]);
        if (lhs != rhs)
          throw ConsistencyError("cocycle: generator pair (" + std::to_string(i) + "," +
                                 std::to_string(j) + ") inconsistent at point " +
                                 std::to_string(p));
      }
  Cocycle rho;
  rho.base = std::move(base);
  rho.fiber = std::move(fiber);
  rho.tables = std::move(tables);
  return rho;
}

Cocycle derivative(SystemPtr base, const TransferFunction& f) {
  const FiniteSystem& x = *base;
  if ((int)f.values.size() != x.n_points)
    throw PreconditionError("derivative: transfer function size mismatch");
  FiberOps ops(f.fiber.group);
  std::vector<std::vector<long long>> tables(x.gamma.rank(),
                                             std::vector<long long>(x.n_points));
  for (int i = 0; i < x.gamma.rank(); ++i)
    for (int p = 0; p < x.n_points; ++p)
      tables[i][p] = ops.sub(f.values[x.action[i][p]], f.values[p]);
  return make_cocycle(std::move(base), f.fiber, std::move(tables));
}

Cocycle translate_derivative(const Cocycle& rho, const GroupElement& z0) {
  const FiniteSystem& x = *rho.base;
  if (!x.rotation)
    throw PreconditionError("translate_derivative: base must be rotational");
  const FinAbGroup& z = x.rotation->z;
  z.check_element(z0, "translate_derivative");
  std::vector<int> shift(x.n_points);
  for (int p = 0; p < x.n_points; ++p)
    shift[p] = int(z.index_of(z.add(z.element_at(p), z0)));
  FiberOps ops(rho.fiber.group);
  std::vector<std::vector<long long>> tables(x.gamma.rank(),
                                             std::vector<long long>(x.n_points));
  for (int i = 0; i < x.gamma.rank(); ++i)
    for (int p = 0; p < x.n_points; ++p)
      tables[i][p] = ops.sub(rho.tables[i][shift[p]], rho.tables[i][p]);
  return make_cocycle(rho.base, rho.fiber, std::move(tables));
}

Cocycle cube_difference(const Cocycle& rho, int k, int cap) {
  auto cube = std::make_shared<FiniteSystem>(cube_system(*rho.base, k, cap));
  FiberOps ops(rho.fiber.group);
  std::vector<std::vector<long long>> tables(
      rho.base->gamma.rank(), std::vector<long long>(cube->n_points, 0));
  for (int i = 0; i < (int)tables.size(); ++i)
    for (int p = 0; p < cube->n_points; ++p) {
      long long sum = 0;
      for (int j = 0; j < cube->corner_width; ++j) {
        long long v = rho.tables[i][cube->corner(p, j)];
        sum = (std::popcount(unsigned(j)) % 2 == 1) ? ops.sub(sum, v) : ops.add(sum, v);
      }
      tables[i][p] = sum;
    }
  return make_cocycle(cube, rho.fiber, std::move(tables));
}

CoboundaryResult coboundary_solve(const Cocycle& sigma) {
  const FiniteSystem& x = *sigma.base;
  FiberOps ops(sigma.fiber.group);
  std::vector<long long> f(x.n_points, 0);
  std::vector<char> visited(x.n_points, 0);

  for (int base_pt = 0; base_pt < x.n_points; ++base_pt) {
    if (visited[base_pt] || !x.positive(base_pt)) continue;
    // spanning-tree propagation from the lowest-index point of the orbit
    std::vector<int> orbit;
    std::queue<int> queue;
    queue.push(base_pt);
    visited[base_pt] = 1;
    f[base_pt] = 0;
    while (!queue.empty()) {
      int p = queue.front();
      queue.pop();
      orbit.push_back(p);
      for (int g = 0; g < x.gamma.rank(); ++g) {
        int q = x.action[g][p];
        if (!visited[q]) {
          visited[q] = 1;
          f[q] = ops.add(f[p], sigma.tables[g][p]);
          queue.push(q);
        }
      }
    }
    // every edge must now agree, including the relations closing the orbit
    for (int p : orbit)
      for (int g = 0; g < x.gamma.rank(); ++g) {
        int q = x.action[g][p];
        long long defect = ops.sub(sigma.tables[g][p], ops.sub(f[q], f[p]));
        if (defect != 0) {
          CoboundaryResult res;
          res.obstruction = CoboundaryObstruction{base_pt, p, g, defect};
          return res;
        }
      }
  }
  CoboundaryResult res;
  res.transfer = TransferFunction{sigma.fiber, std::move(f)};
  return res;
}

namespace {

// sigma minus the constant cocycle with the given generator images
Cocycle subtract_hom(const Cocycle& sigma, const std::vector<long long>& images) {
  FiberOps ops(sigma.fiber.group);
  Cocycle out = sigma;
  for (size_t i = 0; i < out.tables.size(); ++i)
    for (long long& v : out.tables[i]) v = ops.sub(v, images[i]);
  return out;
}

} // namespace

QuasiCoboundaryResult quasi_coboundary_solve(const Cocycle& sigma) {
  const FiniteSystem& x = *sigma.base;
  Cocycle work = sigma;
  if (sigma.fiber.circle) {
    long long m = exponent_with_rotation(x, sigma.fiber);
    work = widen_circle(sigma, m);
  }
  QuasiCoboundaryResult res;
  res.solve_fiber = work.fiber;

  FiberOps ops(work.fiber.group);
  // zero transfer function first: constant tables that form a homomorphism
  {
    std::vector<long long> images(x.gamma.rank(), 0);
    bool constant = true;
    for (int i = 0; i < x.gamma.rank() && constant; ++i) {
      long long c = -1;
      for (int p = 0; p < x.n_points; ++p) {
        if (!x.positive(p)) continue;
        if (c < 0) c = work.tables[i][p];
        else if (c != work.tables[i][p]) { constant = false; break; }
      }
      images[i] = std::max(c, 0LL);
    }
    if (constant) {
      bool hom = true;
      for (int i = 0; i < x.gamma.rank(); ++i) {
        GroupElement im = work.fiber.group.element_at(images[i]);
        if (!work.fiber.group.is_zero(work.fiber.group.scale(x.gamma.orders[i], im)))
          hom = false;
      }
      if (hom) {
        res.ok = true;
        res.transfer = TransferFunction{work.fiber,
                                        std::vector<long long>(x.n_points, 0)};
        res.hom_images = images;
        return res;
      }
    }
  }
  for (const GroupHom& c : hom_enumerate(x.gamma, work.fiber.group)) {
    std::vector<long long> images(x.gamma.rank());
    for (int i = 0; i < x.gamma.rank(); ++i)
      images[i] = work.fiber.group.index_of(c.images[i]);
    CoboundaryResult cb = coboundary_solve(subtract_hom(work, images));
    if (cb.ok()) {
      res.ok = true;
      res.transfer = std::move(cb.transfer);
      res.hom_images = images;
      return res;
    }
  }
  return res;
}

TypeTestResult type_test(const Cocycle& rho, int k, int cap) {
  Cocycle delta = cube_difference(rho, k, cap);
  CoboundaryResult cb = coboundary_solve(delta);
  TypeTestResult res;
  res.cube = delta.base;
  res.certificate = std::move(cb.transfer);
  res.obstruction = std::move(cb.obstruction);
  return res;
}

CLResult cl_solve(const Cocycle& rho) {
  const FiniteSystem& x = *rho.base;
  if (!x.rotation) throw PreconditionError("cl_solve: base must be rotational");
  const FinAbGroup& z = x.rotation->z;

  std::vector<TransferFunction> gen_f;
  std::vector<std::vector<long long>> gen_c;
  Fiber solve_fiber = rho.fiber;
  for (int i = 0; i < z.rank(); ++i) {
    GroupElement u = z.generator(i);
    QuasiCoboundaryResult q = quasi_coboundary_solve(translate_derivative(rho, u));
    if (!q.ok) {
      CLResult res;
      res.failing_u = u;
      return res;
    }
    solve_fiber = q.solve_fiber;
    gen_f.push_back(std::move(*q.transfer));
    gen_c.push_back(std::move(q.hom_images));
  }

  FiberOps ops(solve_fiber.group);
  long long zn = z.size();
  CLWitness w;
  w.fiber = solve_fiber;
  w.transfer.resize(zn, TransferFunction{solve_fiber,
                                         std::vector<long long>(x.n_points, 0)});
  w.hom_images.resize(zn, std::vector<long long>(x.gamma.rank(), 0));

  // translation lookup: point index of p + generator_i of Z
  std::vector<std::vector<int>> gen_shift(z.rank(), std::vector<int>(x.n_points));
  for (int i = 0; i < z.rank(); ++i) {
    GroupElement u = z.generator(i);
    for (int p = 0; p < x.n_points; ++p)
      gen_shift[i][p] = int(z.index_of(z.add(z.element_at(p), u)));
  }

  for (long long zi = 0; zi < zn; ++zi) {
    GroupElement ze = z.element_at(zi);
    std::vector<long long> f(x.n_points, 0);
    std::vector<long long> c(x.gamma.rank(), 0);
    // telescoping: combine(W, u): F'(w) = F(w+u) + F_u(w), c' = c + c_u
    for (int i = 0; i < z.rank(); ++i)
      for (long long t = 0; t < ze[i]; ++t) {
        std::vector<long long> nf(x.n_points);
        for (int p = 0; p < x.n_points; ++p)
          nf[p] = ops.add(f[gen_shift[i][p]], gen_f[i].values[p]);
        f = std::move(nf);
        for (int g = 0; g < x.gamma.rank(); ++g) c[g] = ops.add(c[g], gen_c[i][g]);
      }
    w.transfer[zi].values = std::move(f);
    w.hom_images[zi] = std::move(c);
  }

  verify_cl_witness(rho, w);
  CLResult res;
  res.witness = std::move(w);
  return res;
}

void verify_cl_witness(const Cocycle& rho, const CLWitness& w) {
  const FiniteSystem& x = *rho.base;
  if (!x.rotation) throw PreconditionError("cl witness: base must be rotational");
  const FinAbGroup& z = x.rotation->z;
  Cocycle work = rho;
  if (rho.fiber.circle && !(w.fiber.group == rho.fiber.group))
    work = widen_circle(rho, w.fiber.modulus());
  else if (!(w.fiber.group == rho.fiber.group))
    throw PreconditionError("cl witness: fiber mismatch");
  FiberOps ops(w.fiber.group);
  long long zn = z.size();
  if ((long long)w.transfer.size() != zn || (long long)w.hom_images.size() != zn)
    throw PreconditionError("cl witness: one entry per base group element required");
  for (long long zi = 0; zi < zn; ++zi) {
    GroupElement ze = z.element_at(zi);
    std::vector<int> shift(x.n_points);
    for (int p = 0; p < x.n_points; ++p)
      shift[p] = int(z.index_of(z.add(z.element_at(p), ze)));
    for (int g = 0; g < x.gamma.rank(); ++g)
      for (int p = 0; p < x.n_points; ++p) {
        if (!x.positive(p)) continue;
        long long lhs = ops.sub(work.tables[g][shift[p]], work.tables[g][p]);
        long long rhs = ops.add(
            ops.sub(w.transfer[zi].values[x.action[g][p]], w.transfer[zi].values[p]),
            w.hom_images[zi][g]);
        if (lhs != rhs)
          throw InternalError("cl witness fails at z index " + std::to_string(zi) +
                              ", generator " + std::to_string(g) + ", point " +
                              std::to_string(p));
      }
  }
}

TransferFunction cl_to_type2_witness(const Cocycle& rho, const CLWitness& w,
                                     SystemPtr* cube_out) {
  const FiniteSystem& x = *rho.base;
  if (!x.rotation) throw PreconditionError("cl_to_type2_witness: rotational base");
  const FinAbGroup& z = x.rotation->z;
  verify_cl_witness(rho, w);

  Cocycle delta = cube_difference(rho, 2);
  Cocycle delta_w = delta.fiber.circle && !(w.fiber.group == delta.fiber.group)
                        ? widen_circle(delta, w.fiber.modulus())
                        : delta;
  const FiniteSystem& cube = *delta.base;
  FiberOps ops(w.fiber.group);

  TransferFunction f2{w.fiber, std::vector<long long>(cube.n_points, 0)};
  for (int p = 0; p < cube.n_points; ++p) {
    int x0 = cube.corner(p, 0), x1 = cube.corner(p, 1), x2 = cube.corner(p, 2);
    GroupElement s2 = z.sub(z.element_at(x2), z.element_at(x0));
    const TransferFunction& fs2 = w.transfer[z.index_of(s2)];
    f2.values[p] = ops.sub(fs2.values[x1], fs2.values[x0]);
  }
  // the identity Delta^[2] rho = d F^[2] must hold exactly
  Cocycle df2 = derivative(delta.base, f2);
  for (int g = 0; g < x.gamma.rank(); ++g)
    for (int p = 0; p < cube.n_points; ++p) {
      if (!cube.positive(p)) continue;
      if (delta_w.tables[g][p] != df2.tables[g][p])
        throw InternalError("cl_to_type2_witness: cube identity fails (invalid witness)");
    }
  if (cube_out) *cube_out = delta.base;
  return f2;
}

ErgodicityReport ergodicity_test(const Cocycle& rho) {
  const FiniteSystem& x = *rho.base;
  FactorPartition orbits = invariant_factor(x);
  int positive_blocks = 0;
  for (const auto& blk : orbits.blocks())
    if (x.positive(blk.front())) ++positive_blocks;
  if (positive_blocks != 1)
    throw PreconditionError("ergodicity_test: base is not ergodic");

  ErgodicityReport report;
  report.ergodic = true;
  for (const Character& xi : dual_group(rho.fiber.group).characters) {
    if (xi.zero()) continue;
    CoboundaryResult cb = coboundary_solve(compose_character(rho, xi));
    if (cb.ok()) {
      report.ergodic = false;
      report.failing_xi = xi;
      report.xi_transfer = std::move(cb.transfer);
      break;
    }
  }

  // cross-check against transitivity of the extension
  FiniteSystem ext = extension_build(rho);
  FactorPartition ext_orbits = invariant_factor(ext);
  int ext_positive = 0;
  for (const auto& blk : ext_orbits.blocks())
    if (ext.positive(blk.front())) ++ext_positive;
  bool transitive = ext_positive == 1;
  if (transitive != report.ergodic)
    throw InternalError("ergodicity_test: criterion disagrees with extension orbits");
  return report;
}

FiniteSystem extension_build(const Cocycle& rho) {
  const FiniteSystem& y = *rho.base;
  long long kn = rho.fiber.size();
  FiberOps ops(rho.fiber.group);
  FiniteSystem x;
  x.gamma = y.gamma;
  x.n_points = int(y.n_points * kn);
  x.weights.reserve(x.n_points);
  for (int p = 0; p < y.n_points; ++p)
    for (long long k = 0; k < kn; ++k)
      x.weights.push_back(y.weights[p] * Rational(1, kn));
  x.action.assign(y.gamma.rank(), std::vector<int>(x.n_points));
  for (int g = 0; g < y.gamma.rank(); ++g)
    for (int p = 0; p < y.n_points; ++p)
      for (long long k = 0; k < kn; ++k)
        x.action[g][p * kn + k] =
            int(y.action[g][p] * kn + ops.add(k, rho.tables[g][p]));
  int fiber_rank = rho.fiber.group.rank();
  x.label_width = y.label_width + fiber_rank;
  x.labels.reserve((size_t)x.n_points * x.label_width);
  for (int p = 0; p < y.n_points; ++p)
    for (long long k = 0; k < kn; ++k) {
      if (y.label_width > 0)
        x.labels.insert(x.labels.end(), y.label_row(p), y.label_row(p) + y.label_width);
      GroupElement ke = rho.fiber.group.element_at(k);
      x.labels.insert(x.labels.end(), ke.begin(), ke.end());
    }
  x.validate();
  return x;
}

MackeyResult mackey_reduce(const Cocycle& rho, const FiniteSystem& component) {
  const FiniteSystem& y = *rho.base;
  long long kn = rho.fiber.size();
  if (component.parent_points.empty())
    throw PreconditionError("mackey_reduce: component must reference the extension");

  // the component must push down onto every positive-weight base point
  std::vector<char> covered(y.n_points, 0);
  for (int parent : component.parent_points) covered[parent / kn] = 1;
  for (int p = 0; p < y.n_points; ++p)
    if (y.positive(p) && !covered[p])
      throw PreconditionError("mackey_reduce: component does not cover the base");

  // D = characters killed up to coboundary, H = their annihilator
  std::vector<Character> d;
  for (const Character& xi : dual_group(rho.fiber.group).characters) {
    if (xi.zero()) continue;
    if (coboundary_solve(compose_character(rho, xi)).ok()) d.push_back(xi);
  }
  std::vector<GroupElement> h = annihilator(rho.fiber.group, d);
  std::vector<char> in_h(kn, 0);
  for (const GroupElement& e : h) in_h[rho.fiber.group.index_of(e)] = 1;

  // propagate F modulo H, storing the minimal coset representative, so that
  // rho - dF lands in H; closing defects are orbit holonomies annihilated by
  // every character in D, hence they lie in H
  FiberOps ops(rho.fiber.group);
  std::vector<long long> coset_rep(kn);
  for (long long k = 0; k < kn; ++k) {
    long long best = kn;
    for (const GroupElement& e : h)
      best = std::min(best, ops.add(k, rho.fiber.group.index_of(e)));
    coset_rep[k] = best;
  }
  std::vector<long long> f(y.n_points, 0);
  std::vector<char> visited(y.n_points, 0);
  for (int base_pt = 0; base_pt < y.n_points; ++base_pt) {
    if (visited[base_pt] || !y.positive(base_pt)) continue;
    std::queue<int> queue;
    queue.push(base_pt);
    visited[base_pt] = 1;
    std::vector<int> orbit;
    while (!queue.empty()) {
      int p = queue.front();
      queue.pop();
      orbit.push_back(p);
      for (int g = 0; g < y.gamma.rank(); ++g) {
        int q = y.action[g][p];
        if (!visited[q]) {
          visited[q] = 1;
          f[q] = coset_rep[ops.add(f[p], rho.tables[g][p])];
          queue.push(q);
        }
      }
    }
    for (int p : orbit)
      for (int g = 0; g < y.gamma.rank(); ++g) {
        long long defect = ops.sub(rho.tables[g][p], ops.sub(f[y.action[g][p]], f[p]));
        if (!in_h[defect])
          throw InternalError("mackey_reduce: holonomy escapes the Mackey group");
      }
  }
  TransferFunction transfer{rho.fiber, f};
  Cocycle rho_prime = cocycle_difference(rho, derivative(rho.base, transfer));
  for (int g = 0; g < y.gamma.rank(); ++g)
    for (int p = 0; p < y.n_points; ++p)
      if (y.positive(p) && !in_h[rho_prime.tables[g][p]])
        throw InternalError("mackey_reduce: reduced cocycle escapes the Mackey group");

  // the component must match Y x H after shifting by a fiber constant
  int first = *std::min_element(component.parent_points.begin(),
                                component.parent_points.end());
  long long shift = ops.sub(first % kn, f[first / kn]);

  std::map<std::pair<int, long long>, int> seen; // (base point, H element) -> comp idx
  for (int i = 0; i < component.n_points; ++i) {
    int parent = component.parent_points[i];
    int yp = parent / int(kn);
    long long kv = ops.sub(ops.sub(parent % kn, f[yp]), shift);
    if (!in_h[kv])
      throw InternalError("mackey_reduce: component leaves the reduced extension");
    if (!seen.emplace(std::make_pair(yp, kv), i).second)
      throw InternalError("mackey_reduce: component hits a fiber point twice");
    // weight must match the product measure on Y x H
    if (!(component.weights[i] == y.weights[yp] * Rational(1, (long long)h.size())))
      throw InternalError("mackey_reduce: component weight is not the product measure");
  }
  long long positive_base = 0;
  for (int p = 0; p < y.n_points; ++p)
    if (y.positive(p)) ++positive_base;
  if ((long long)component.n_points != positive_base * (long long)h.size())
    throw InternalError("mackey_reduce: component size mismatch with Y x H");

  // action compatibility: the shift map intertwines the component with the
  // rho' extension
  for (int i = 0; i < component.n_points; ++i) {
    int parent = component.parent_points[i];
    int yp = parent / int(kn);
    long long kv = ops.sub(ops.sub(parent % kn, f[yp]), shift);
    for (int g = 0; g < y.gamma.rank(); ++g) {
      int j = component.action[g][i];
      int parent_j = component.parent_points[j];
      long long kv_j = ops.sub(ops.sub(parent_j % kn, f[parent_j / kn]), shift);
      if (parent_j / kn != y.action[g][yp] ||
          kv_j != ops.add(kv, rho_prime.tables[g][yp]))
        throw InternalError("mackey_reduce: component action differs from rho'");
    }
  }

  MackeyResult res;
  res.mackey_group = std::move(h);
  res.rho_prime = std::move(rho_prime);
  res.transfer = std::move(transfer);
  res.component_shift = shift;
  return res;
}

Cocycle compose_character(const Cocycle& rho, const Character& xi) {
  long long m = rho.fiber.group.exponent();
  Fiber target = circle_fiber(m);
  std::vector<std::vector<long long>> tables(rho.tables.size());
  for (size_t i = 0; i < rho.tables.size(); ++i) {
    tables[i].resize(rho.tables[i].size());
    for (size_t p = 0; p < rho.tables[i].size(); ++p) {
      CircleValue v = xi.eval(rho.fiber.group, rho.fiber.group.element_at(rho.tables[i][p]));
      tables[i][p] = v.num * (m / v.den);
    }
  }
  return make_cocycle(rho.base, target, std::move(tables));
}

Cocycle cocycle_difference(const Cocycle& a, const Cocycle& b) {
  if (!(a.fiber.group == b.fiber.group) || a.fiber.circle != b.fiber.circle)
    throw PreconditionError("cocycle_difference: fiber mismatch");
  if (a.base->n_points != b.base->n_points || !(a.base->gamma == b.base->gamma))
    throw PreconditionError("cocycle_difference: base mismatch");
  FiberOps ops(a.fiber.group);
  std::vector<std::vector<long long>> tables = a.tables;
  for (size_t i = 0; i < tables.size(); ++i)
    for (size_t p = 0; p < tables[i].size(); ++p)
      tables[i][p] = ops.sub(tables[i][p], b.tables[i][p]);
  return make_cocycle(a.base, a.fiber, std::move(tables));
}

Cocycle widen_circle(const Cocycle& rho, long long m) {
  if (!rho.fiber.circle) throw PreconditionError("widen_circle: circle fiber required");
  long long m0 = rho.fiber.modulus();
  if (m % m0 != 0) throw PreconditionError("widen_circle: modulus must be a multiple");
  long long scale = m / m0;
  // embedding preserves the relations, so no re-validation here; the solvers
  // also run it on raw tables whose defects they want to expose
  Cocycle out;
  out.base = rho.base;
  out.fiber = circle_fiber(m);
  out.tables = rho.tables;
  for (auto& t : out.tables)
    for (long long& v : t) v *= scale;
  return out;
}

Cocycle random_cocycle(Rng& rng, SystemPtr base, const Fiber& fiber) {
  const FiniteSystem& y = *base;
  long long kn = fiber.size();
  FiberOps ops(fiber.group);
  long long gamma_size = y.gamma.size();

  std::vector<std::vector<long long>> tables(y.gamma.rank(),
                                             std::vector<long long>(y.n_points, 0));
  std::vector<char> visited(y.n_points, 0);
  for (int base_pt = 0; base_pt < y.n_points; ++base_pt) {
    if (visited[base_pt] || !y.positive(base_pt)) continue;
    // orbit, with a group element g_y moving the base point to each y
    std::vector<int> orbit;
    std::vector<GroupElement> g_of(y.n_points);
    std::queue<int> queue;
    queue.push(base_pt);
    visited[base_pt] = 1;
    g_of[base_pt] = y.gamma.zero();
    while (!queue.empty()) {
      int p = queue.front();
      queue.pop();
      orbit.push_back(p);
      for (int g = 0; g < y.gamma.rank(); ++g) {
        int q = y.action[g][p];
        if (!visited[q]) {
          visited[q] = 1;
          g_of[q] = y.gamma.add(g_of[p], y.gamma.generator(g));
          queue.push(q);
        }
      }
    }
    // stabilizer of the base point and a random homomorphism on it
    std::vector<long long> stab;
    for (long long gi = 0; gi < gamma_size; ++gi)
      if (y.apply_element(y.gamma.element_at(gi), base_pt) == base_pt)
        stab.push_back(gi);
    std::map<long long, int> stab_pos;
    for (size_t i = 0; i < stab.size(); ++i) stab_pos[stab[i]] = int(i);
    auto stab_mul = [&](int a, int b) {
      GroupElement s =
          y.gamma.add(y.gamma.element_at(stab[a]), y.gamma.element_at(stab[b]));
      return stab_pos.at(y.gamma.index_of(s));
    };
    AbelianStructure st =
        abelian_structure(int(stab.size()), stab_mul, stab_pos.at(0));
    // random image per stabilizer basis generator, killed by its order
    std::vector<long long> h_images;
    for (long long order : st.group.orders) {
      std::vector<long long> valid;
      for (long long k = 0; k < kn; ++k)
        if (fiber.group.is_zero(fiber.group.scale(order, fiber.group.element_at(k))))
          valid.push_back(k);
      h_images.push_back(valid[rng.below(valid.size())]);
    }
    auto h_of = [&](long long gamma_index) {
      GroupElement res = st.group.element_at(st.index_of_cayley[stab_pos.at(gamma_index)]);
      long long out = 0;
      for (size_t i = 0; i < res.size(); ++i)
        for (long long t = 0; t < res[i]; ++t) out = ops.add(out, h_images[i]);
      return out;
    };
    // random transfer part plus the induced-homomorphism part
    std::vector<long long> f(y.n_points, 0);
    for (int p : orbit) f[p] = (long long)rng.below(kn);
    for (int p : orbit)
      for (int g = 0; g < y.gamma.rank(); ++g) {
        int q = y.action[g][p];
        GroupElement diff =
            y.gamma.sub(y.gamma.add(y.gamma.generator(g), g_of[p]), g_of[q]);
        long long hom_part = h_of(y.gamma.index_of(diff));
        tables[g][p] = ops.add(ops.sub(f[q], f[p]), hom_part);
      }
  }
  return make_cocycle(std::move(base), fiber, std::move(tables));
}

} // namespace clab
