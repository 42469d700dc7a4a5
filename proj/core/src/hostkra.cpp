#include "clab/hostkra.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>

#include "clab/errors.hpp"
#include "clab/random.hpp"

namespace clab {

namespace {

struct FiberOps {
  const FinAbGroup& g;
  long long n;
  std::vector<long long> add_table, neg_table;
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

} // namespace

int HKGroup::find(int u, const std::vector<long long>& f) const {
  auto it = index_.find({u, f});
  return it == index_.end() ? -1 : it->second;
}

int HKGroup::mul(int a, int b) const {
  const HKElement& ea = elements[a];
  const HKElement& eb = elements[b];
  int u = int(z.index_of(z.add(z.element_at(ea.u), z.element_at(eb.u))));
  std::vector<long long> f(ea.f.size());
  for (size_t p = 0; p < f.size(); ++p)
    f[p] = fadd(ea.f[shift[eb.u][p]], eb.f[p]);
  int r = find(u, f);
  if (r < 0) throw InternalError("host-kra group not closed under multiplication");
  return r;
}

int HKGroup::inv(int a) const {
  const HKElement& ea = elements[a];
  int nu = int(z.index_of(z.neg(z.element_at(ea.u))));
  std::vector<long long> f(ea.f.size());
  for (size_t p = 0; p < f.size(); ++p) f[p] = fneg(ea.f[shift[nu][p]]);
  int r = find(nu, f);
  if (r < 0) throw InternalError("host-kra group not closed under inversion");
  return r;
}

int HKGroup::act(int g, int point, long long fiber_size) const {
  const HKElement& e = elements[g];
  int zp = point / int(fiber_size);
  long long k = point % fiber_size;
  return shift[e.u][zp] * int(fiber_size) + int(fadd(k, e.f[zp]));
}

HKGroup host_kra_group(const Cocycle& rho, long long max_enum) {
  const FiniteSystem& x = *rho.base;
  if (!x.rotation) throw PreconditionError("host_kra_group: base must be rotational");
  const FinAbGroup& z = x.rotation->z;
  const FinAbGroup& k = rho.fiber.group;
  long long zn = z.size();
  FiberOps ops(k);

  HKGroup g;
  g.rho = rho;
  g.z = z;
  g.fiber_n_ = ops.n;
  g.fiber_add_ = ops.add_table;
  g.fiber_neg_ = ops.neg_table;
  g.shift.assign(zn, std::vector<int>(x.n_points));
  for (long long u = 0; u < zn; ++u) {
    GroupElement ue = z.element_at(u);
    for (int p = 0; p < x.n_points; ++p)
      g.shift[u][p] = int(z.index_of(z.add(z.element_at(p), ue)));
  }

  // orbits of the base, for the free per-orbit constants of each solution
  FactorPartition orbits = invariant_factor(x);
  std::vector<std::vector<int>> positive_orbits;
  for (const auto& blk : orbits.blocks())
    if (x.positive(blk.front())) positive_orbits.push_back(blk);
  int n_orbits = int(positive_orbits.size());

  auto homs = hom_enumerate(x.gamma, k);

  // solve dF = sigma - c by orbit propagation; nullopt when inconsistent
  auto particular = [&](const Cocycle& sigma,
                        const std::vector<long long>& c) -> std::optional<std::vector<long long>> {
    std::vector<long long> f(x.n_points, 0);
    std::vector<char> visited(x.n_points, 0);
    for (const auto& blk : positive_orbits) {
      int base_pt = *std::min_element(blk.begin(), blk.end());
      std::queue<int> queue;
      queue.push(base_pt);
      visited[base_pt] = 1;
      while (!queue.empty()) {
        int p = queue.front();
        queue.pop();
        for (int gen = 0; gen < x.gamma.rank(); ++gen) {
          int q = x.action[gen][p];
          if (!visited[q]) {
            visited[q] = 1;
            f[q] = ops.add(f[p], ops.sub(sigma.tables[gen][p], c[gen]));
            queue.push(q);
          }
        }
      }
      for (int p : blk)
        for (int gen = 0; gen < x.gamma.rank(); ++gen) {
          int q = x.action[gen][p];
          if (ops.sub(sigma.tables[gen][p], c[gen]) != ops.sub(f[q], f[p]))
            return std::nullopt;
        }
    }
    return f;
  };

  // kernel size |E| from the u = 0 translation, for the size guard
  Cocycle zero = translate_derivative(rho, z.zero());
  long long valid_c = 0;
  for (const GroupHom& c : homs) {
    std::vector<long long> ci(x.gamma.rank());
    for (int i = 0; i < x.gamma.rank(); ++i) ci[i] = k.index_of(c.images[i]);
    if (particular(zero, ci)) ++valid_c;
  }
  long long kn = k.size();
  long long coset = valid_c;
  for (int i = 0; i < n_orbits; ++i) {
    coset *= kn;
    if (coset > max_enum) break;
  }
  if (zn * coset > max_enum)
    throw SizeGuardError("host_kra_group: enumeration of " + std::to_string(zn * coset) +
                         " elements exceeds the guard of " + std::to_string(max_enum));

  for (long long u = 0; u < zn; ++u) {
    Cocycle sigma = translate_derivative(rho, z.element_at(u));
    std::vector<std::vector<long long>> solutions;
    for (const GroupHom& c : homs) {
      std::vector<long long> ci(x.gamma.rank());
      for (int i = 0; i < x.gamma.rank(); ++i) ci[i] = k.index_of(c.images[i]);
      auto part = particular(sigma, ci);
      if (!part) continue;
      // add every combination of per-orbit constants
      std::vector<long long> pick(n_orbits, 0);
      while (true) {
        std::vector<long long> f = *part;
        for (int o = 0; o < n_orbits; ++o)
          for (int p : positive_orbits[o]) f[p] = ops.add(f[p], pick[o]);
        solutions.push_back(std::move(f));
        int o = n_orbits;
        bool done = n_orbits == 0;
        while (o-- > 0) {
          if (++pick[o] < kn) break;
          pick[o] = 0;
          if (o == 0) done = true;
        }
        if (done) break;
      }
    }
    if (solutions.empty())
      throw NotCLSystemError("host_kra_group: no solution for translation index " +
                             std::to_string(u));
    std::sort(solutions.begin(), solutions.end());
    solutions.erase(std::unique(solutions.begin(), solutions.end()), solutions.end());
    for (auto& f : solutions) {
      g.index_[{int(u), f}] = int(g.elements.size());
      g.elements.push_back(HKElement{int(u), std::move(f)});
    }
  }

  g.identity = g.find(0, std::vector<long long>(x.n_points, 0));
  if (g.identity < 0) throw InternalError("host_kra_group: identity missing");
  for (long long kv = 0; kv < kn; ++kv) {
    int idx = g.find(0, std::vector<long long>(x.n_points, kv));
    if (idx < 0) throw InternalError("host_kra_group: constant element missing");
    g.g2.push_back(idx);
  }
  for (int i = 0; i < g.size(); ++i)
    if (g.elements[i].u == 0) g.h.push_back(i);

  // closure: full for small groups, deterministic sampling above
  if (g.size() <= 256) {
    for (int a = 0; a < g.size(); ++a) {
      g.inv(a);
      for (int b = 0; b < g.size(); ++b) g.mul(a, b);
    }
  } else {
    Rng rng(0);
    for (int trial = 0; trial < 10000; ++trial)
      g.mul(int(rng.below(g.size())), int(rng.below(g.size())));
  }
  return g;
}

StructureReport structure_report(const HKGroup& g) {
  int n = g.size();
  if (n > 4096)
    throw SizeGuardError("structure_report: group too large for full pair analysis");
  FiberOps ops(g.rho.fiber.group);
  const FinAbGroup& z = g.z;

  StructureReport rep;
  rep.order = n;
  rep.g2_order = (long long)g.g2.size();
  rep.h_order = (long long)g.h.size();
  rep.z_order = z.size();

  // all element-pair commutators, each checked against the closed form
  rep.commutator_formula_ok = true;
  std::set<int> commutators;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int c = g.mul(g.mul(a, b), g.mul(g.inv(a), g.inv(b)));
      commutators.insert(c);
      const HKElement& ea = g.elements[a];
      const HKElement& eb = g.elements[b];
      const HKElement& ec = g.elements[c];
      if (ec.u != 0) {
        rep.commutator_formula_ok = false;
        continue;
      }
      // (d_{u'}F - d_{u}F') o V_{-u-u'}
      int mu = int(z.index_of(
          z.neg(z.add(z.element_at(ea.u), z.element_at(eb.u)))));
      bool constant = true;
      for (size_t p = 0; p < ec.f.size(); ++p) {
        int q = g.shift[mu][int(p)];
        long long want = ops.sub(ops.sub(ea.f[g.shift[eb.u][q]], ea.f[q]),
                                 ops.sub(eb.f[g.shift[ea.u][q]], eb.f[q]));
        if (want != ec.f[p]) rep.commutator_formula_ok = false;
        if (ec.f[p] != ec.f[0]) constant = false;
      }
      if (!constant) rep.commutator_formula_ok = false;
    }

  // closed commutator subgroup
  std::vector<int> closure(commutators.begin(), commutators.end());
  std::set<int> in_closure(closure.begin(), closure.end());
  for (size_t head = 0; head < closure.size(); ++head)
    for (int c : std::vector<int>(closure.begin(), closure.end())) {
      int prod = g.mul(closure[head], c);
      if (in_closure.insert(prod).second) closure.push_back(prod);
    }
  rep.commutator_subgroup.assign(in_closure.begin(), in_closure.end());
  rep.commutator_order = (long long)rep.commutator_subgroup.size();

  // center
  long long center = 0;
  std::set<int> g2_set(g.g2.begin(), g.g2.end());
  bool g2_central = true;
  for (int a = 0; a < n; ++a) {
    bool central = true;
    for (int b = 0; b < n && central; ++b)
      if (g.mul(a, b) != g.mul(b, a)) central = false;
    if (central) ++center;
    else if (g2_set.count(a)) g2_central = false;
  }
  rep.center_order = center;
  rep.g2_central = g2_central;

  rep.commutators_in_g2 = std::all_of(
      rep.commutator_subgroup.begin(), rep.commutator_subgroup.end(),
      [&](int c) { return g2_set.count(c) > 0; });

  std::set<int> seen_u;
  for (const HKElement& e : g.elements) seen_u.insert(e.u);
  rep.short_exact_ok = (long long)seen_u.size() == rep.z_order &&
                       rep.order == rep.h_order * rep.z_order;

  if (!rep.commutators_in_g2 || !rep.g2_central || !rep.short_exact_ok ||
      !rep.commutator_formula_ok)
    throw CertificateError("structure_report: group structure check failed");
  return rep;
}

TranslationalCertificate translational_certificate(const HKGroup& g,
                                                   const FiniteSystem& x, int x0) {
  long long kn = g.rho.fiber.size();
  if ((long long)x.n_points != g.z.size() * kn)
    throw PreconditionError("translational_certificate: extension size mismatch");
  if (x0 < 0 || x0 >= x.n_points || !x.positive(x0))
    throw PreconditionError("translational_certificate: x0 must be positive-weight");

  TranslationalCertificate cert;
  cert.point_of.resize(g.size());
  std::vector<long long> hits(x.n_points, 0);
  for (int a = 0; a < g.size(); ++a) {
    int p = g.act(a, x0, kn);
    cert.point_of[a] = p;
    ++hits[p];
    if (p == x0) cert.lambda.push_back(a);
  }
  for (int p = 0; p < x.n_points; ++p)
    if (x.positive(p) && hits[p] == 0)
      throw NotTransitiveError("translational_certificate: action misses point " +
                               std::to_string(p));
  cert.lambda_order = (long long)cert.lambda.size();

  long long positive = 0;
  for (int p = 0; p < x.n_points; ++p)
    if (x.positive(p)) ++positive;
  cert.coset_bijection_ok = g.size() == positive * cert.lambda_order;
  for (int p = 0; p < x.n_points; ++p)
    if (hits[p] != 0 && hits[p] != cert.lambda_order) cert.coset_bijection_ok = false;

  cert.lambda_abelian = true;
  for (int a : cert.lambda)
    for (int b : cert.lambda)
      if (g.mul(a, b) != g.mul(b, a)) cert.lambda_abelian = false;

  cert.lambda_meets_g2_trivially = true;
  for (int a : cert.lambda)
    if (std::find(g.g2.begin(), g.g2.end(), a) != g.g2.end() && a != g.identity)
      cert.lambda_meets_g2_trivially = false;

  if (!cert.coset_bijection_ok || !cert.lambda_abelian || !cert.lambda_meets_g2_trivially)
    throw CertificateError("translational_certificate: stabilizer checks failed");
  return cert;
}

FiniteGroupTable make_group_table(int n, std::vector<int> mul) {
  if ((long long)mul.size() != (long long)n * n)
    throw ConsistencyError("group table: size mismatch");
  for (int v : mul)
    if (v < 0 || v >= n) throw ConsistencyError("group table: entry out of range");
  FiniteGroupTable t;
  t.n = n;
  t.mul = std::move(mul);
  t.identity = -1;
  for (int e = 0; e < n; ++e) {
    bool ok = true;
    for (int a = 0; a < n && ok; ++a)
      if (t.at(e, a) != a || t.at(a, e) != a) ok = false;
    if (ok) { t.identity = e; break; }
  }
  if (t.identity < 0) throw ConsistencyError("group table: no identity");
  t.inv.assign(n, -1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b)
      if (t.at(a, b) == t.identity && t.at(b, a) == t.identity) { t.inv[a] = b; break; }
    if (t.inv[a] < 0) throw ConsistencyError("group table: missing inverse");
  }
  if (n <= 256) {
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          if (t.at(t.at(a, b), c) != t.at(a, t.at(b, c)))
            throw ConsistencyError("group table: associativity fails");
  } else {
    Rng rng(0);
    for (int trial = 0; trial < 10000; ++trial) {
      int a = int(rng.below(n)), b = int(rng.below(n)), c = int(rng.below(n));
      if (t.at(t.at(a, b), c) != t.at(a, t.at(b, c)))
        throw ConsistencyError("group table: associativity fails");
    }
  }
  return t;
}

FiniteGroupTable group_table_of(const HKGroup& g) {
  int n = g.size();
  std::vector<int> mul((size_t)n * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) mul[(size_t)a * n + b] = g.mul(a, b);
  return make_group_table(n, std::move(mul));
}

namespace {

std::vector<int> subgroup_closure(const FiniteGroupTable& t, std::vector<int> gens) {
  std::set<int> members{t.identity};
  std::vector<int> work{t.identity};
  for (size_t head = 0; head < work.size(); ++head)
    for (int s : gens) {
      int y = t.at(work[head], s);
      if (members.insert(y).second) work.push_back(y);
    }
  return std::vector<int>(members.begin(), members.end());
}

bool is_subgroup(const FiniteGroupTable& t, const std::vector<int>& s) {
  std::set<int> set(s.begin(), s.end());
  if (!set.count(t.identity)) return false;
  for (int a : s) {
    if (!set.count(t.inv[a])) return false;
    for (int b : s)
      if (!set.count(t.at(a, b))) return false;
  }
  return true;
}

} // namespace

ExtractionResult translational_to_extension(const FiniteGroupTable& g,
                                            const std::vector<int>& lambda,
                                            const std::vector<int>& g2,
                                            const FinAbGroup& gamma,
                                            const std::vector<int>& phi_images) {
  int n = g.n;
  if (!is_subgroup(g, lambda))
    throw PreconditionError("translational_to_extension: Lambda is not a subgroup");
  if (!is_subgroup(g, g2))
    throw PreconditionError("translational_to_extension: G2 is not a subgroup");
  std::set<int> g2_set(g2.begin(), g2.end());
  std::set<int> lambda_set(lambda.begin(), lambda.end());
  for (int a : g2)
    for (int b = 0; b < n; ++b)
      if (g.at(a, b) != g.at(b, a))
        throw PreconditionError("translational_to_extension: G2 is not central");
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int comm = g.at(g.at(a, b), g.at(g.inv[a], g.inv[b]));
      if (!g2_set.count(comm))
        throw PreconditionError("translational_to_extension: [G,G] escapes G2");
    }
  for (int a : lambda)
    if (g2_set.count(a) && a != g.identity)
      throw PreconditionError("translational_to_extension: Lambda meets G2");
  if ((int)phi_images.size() != gamma.rank())
    throw PreconditionError("translational_to_extension: one phi image per generator");
  for (int i = 0; i < gamma.rank(); ++i) {
    int pw = g.identity;
    for (long long t = 0; t < gamma.orders[i]; ++t) pw = g.at(pw, phi_images[i]);
    if (pw != g.identity)
      throw PreconditionError("translational_to_extension: phi image order mismatch");
    for (int j = 0; j < gamma.rank(); ++j)
      if (g.at(phi_images[i], phi_images[j]) != g.at(phi_images[j], phi_images[i]))
        throw PreconditionError("translational_to_extension: phi images do not commute");
  }

  // N = G2 * Lambda; contains [G,G], hence normal with abelian quotient
  std::vector<int> n_gens = g2;
  n_gens.insert(n_gens.end(), lambda.begin(), lambda.end());
  std::vector<int> big_n = subgroup_closure(g, n_gens);
  std::set<int> n_set(big_n.begin(), big_n.end());

  // cosets of N, represented by their minimal element
  std::vector<int> coset_rep(n, -1);
  std::vector<int> reps;
  for (int a = 0; a < n; ++a) {
    if (coset_rep[a] >= 0) continue;
    std::vector<int> coset;
    for (int m : big_n) coset.push_back(g.at(a, m));
    int rep = *std::min_element(coset.begin(), coset.end());
    for (int c : coset) coset_rep[c] = rep;
    reps.push_back(rep);
  }
  std::sort(reps.begin(), reps.end());
  std::map<int, int> coset_id;
  for (size_t i = 0; i < reps.size(); ++i) coset_id[reps[i]] = int(i);
  auto quot_mul = [&](int a, int b) {
    return coset_id.at(coset_rep[g.at(reps[a], reps[b])]);
  };
  // well-definedness doubles as the normality check
  for (size_t a = 0; a < reps.size(); ++a)
    for (int m : big_n)
      for (size_t b = 0; b < reps.size(); ++b)
        if (coset_id.at(coset_rep[g.at(g.at(reps[a], m), reps[b])]) != quot_mul(int(a), int(b)))
          throw PreconditionError("translational_to_extension: quotient is not well-defined");
  AbelianStructure z_struct =
      abelian_structure(int(reps.size()), quot_mul, coset_id.at(coset_rep[g.identity]));

  // K = G2 (Lambda meets it trivially)
  std::map<int, int> g2_pos;
  std::vector<int> g2_sorted = g2;
  std::sort(g2_sorted.begin(), g2_sorted.end());
  for (size_t i = 0; i < g2_sorted.size(); ++i) g2_pos[g2_sorted[i]] = int(i);
  auto g2_mul = [&](int a, int b) {
    return g2_pos.at(g.at(g2_sorted[a], g2_sorted[b]));
  };
  AbelianStructure k_struct =
      abelian_structure(int(g2_sorted.size()), g2_mul, g2_pos.at(g.identity));

  auto pi = [&](int a) { // G -> Z index
    return z_struct.index_of_cayley[coset_id.at(coset_rep[a])];
  };
  auto big_pi = [&](int a) { // G2 -> K index
    return k_struct.index_of_cayley[g2_pos.at(a)];
  };

  // section: lowest-index group element in each N-coset; X = G/Lambda
  long long zn = z_struct.group.size();
  std::vector<int> section(zn, -1);
  for (int a = 0; a < n; ++a) {
    long long zi = pi(a);
    if (section[zi] < 0 || a < section[zi]) section[zi] = a;
  }
  std::vector<int> lambda_coset(n, -1); // element -> min element of a*Lambda
  for (int a = 0; a < n; ++a) {
    if (lambda_coset[a] >= 0) continue;
    std::vector<int> coset;
    for (int l : lambda) coset.push_back(g.at(a, l));
    int rep = *std::min_element(coset.begin(), coset.end());
    for (int c : coset) lambda_coset[c] = rep;
  }

  // the unique k with h*Lambda = (g2 section(z'))*Lambda
  auto fiber_offset = [&](int h, long long z_target) {
    int sprime = section[z_target];
    long long found = -1;
    for (int l : lambda) {
      int cand = g.at(g.at(h, l), g.inv[sprime]);
      if (g2_set.count(cand)) {
        long long kv = big_pi(cand);
        if (found >= 0 && found != kv)
          throw InternalError("translational_to_extension: fiber offset not unique");
        found = kv;
      }
    }
    if (found < 0)
      throw InternalError("translational_to_extension: fiber offset missing");
    return found;
  };

  // rotational base and the section cocycle
  std::vector<GroupElement> phi_z;
  for (int i = 0; i < gamma.rank(); ++i)
    phi_z.push_back(z_struct.group.element_at(pi(phi_images[i])));
  GroupHom phi_hom = make_hom(gamma, z_struct.group, phi_z);
  auto base = std::make_shared<FiniteSystem>(make_rotational(z_struct.group, phi_hom));

  std::vector<std::vector<long long>> tables(gamma.rank(),
                                             std::vector<long long>(zn));
  for (int i = 0; i < gamma.rank(); ++i)
    for (long long zi = 0; zi < zn; ++zi) {
      long long zt = z_struct.group.index_of(
          z_struct.group.add(phi_z[i], z_struct.group.element_at(zi)));
      tables[i][zi] = fiber_offset(g.at(phi_images[i], section[zi]), zt);
    }
  Cocycle rho = make_cocycle(base, finite_fiber(k_struct.group), std::move(tables));

  // Conze-Lesigne data read off the commutators
  CLWitness w;
  w.fiber = rho.fiber;
  w.transfer.resize(zn, TransferFunction{rho.fiber, std::vector<long long>(zn, 0)});
  w.hom_images.resize(zn, std::vector<long long>(gamma.rank(), 0));
  for (long long z0 = 0; z0 < zn; ++z0) {
    int gz0 = section[z0];
    for (long long zi = 0; zi < zn; ++zi) {
      long long zt = z_struct.group.index_of(z_struct.group.add(
          z_struct.group.element_at(zi), z_struct.group.element_at(z0)));
      w.transfer[z0].values[zi] = fiber_offset(g.at(gz0, section[zi]), zt);
    }
    for (int i = 0; i < gamma.rank(); ++i) {
      int comm = g.at(g.at(gz0, phi_images[i]), g.at(g.inv[gz0], g.inv[phi_images[i]]));
      if (!g2_set.count(comm))
        throw InternalError("translational_to_extension: commutator escapes G2");
      w.hom_images[z0][i] = k_struct.group.index_of(
          k_struct.group.neg(k_struct.group.element_at(big_pi(comm))));
    }
  }
  verify_cl_witness(rho, w);

  ExtractionResult res;
  res.z = z_struct.group;
  res.k = k_struct.group;
  res.rho = std::move(rho);
  res.witness = std::move(w);
  res.z_of_element.resize(n);
  res.k_of_element.assign(n, -1);
  for (int a = 0; a < n; ++a) {
    res.z_of_element[a] = int(pi(a));
    if (g2_set.count(a)) res.k_of_element[a] = big_pi(a);
  }
  return res;
}

std::vector<JoiningComponentReport> joining_good(const Cocycle& rho1,
                                                 const Cocycle& rho2,
                                                 const FiniteSystem& joint) {
  const FiniteSystem& y1 = *rho1.base;
  const FiniteSystem& y2 = *rho2.base;
  if (!y1.rotation || !y2.rotation)
    throw PreconditionError("joining_good: rotational bases required");
  if (!(y1.gamma == y2.gamma))
    throw PreconditionError("joining_good: acting groups differ");
  FiniteSystem x1 = extension_build(rho1);
  FiniteSystem x2 = extension_build(rho2);
  if (joint.n_points != x1.n_points * x2.n_points)
    throw PreconditionError("joining_good: joint must live on the product");
  if (!(joint.gamma == y1.gamma))
    throw PreconditionError("joining_good: acting group mismatch");
  for (int g = 0; g < joint.gamma.rank(); ++g)
    for (int p1 = 0; p1 < x1.n_points; ++p1)
      for (int p2 = 0; p2 < x2.n_points; ++p2)
        if (joint.action[g][p1 * x2.n_points + p2] !=
            x1.action[g][p1] * x2.n_points + x2.action[g][p2])
          throw PreconditionError("joining_good: joint action is not the product action");
  for (int p1 = 0; p1 < x1.n_points; ++p1) {
    Rational m(0);
    for (int p2 = 0; p2 < x2.n_points; ++p2)
      m = m + joint.weights[p1 * x2.n_points + p2];
    if (!(m == x1.weights[p1]))
      throw PreconditionError("joining_good: joint does not project onto the first factor");
  }
  for (int p2 = 0; p2 < x2.n_points; ++p2) {
    Rational m(0);
    for (int p1 = 0; p1 < x1.n_points; ++p1)
      m = m + joint.weights[p1 * x2.n_points + p2];
    if (!(m == x2.weights[p2]))
      throw PreconditionError("joining_good: joint does not project onto the second factor");
  }

  // product base, product fiber, product cocycle
  const FinAbGroup& z1 = y1.rotation->z;
  const FinAbGroup& z2 = y2.rotation->z;
  std::vector<long long> z_orders = z1.orders;
  z_orders.insert(z_orders.end(), z2.orders.begin(), z2.orders.end());
  FinAbGroup zp(z_orders);
  std::vector<long long> k_orders = rho1.fiber.group.orders;
  k_orders.insert(k_orders.end(), rho2.fiber.group.orders.begin(),
                  rho2.fiber.group.orders.end());
  FinAbGroup kp(k_orders);
  long long k1n = rho1.fiber.size(), k2n = rho2.fiber.size();
  long long z2n = z2.size();

  std::vector<GroupElement> phi_images;
  for (int i = 0; i < joint.gamma.rank(); ++i) {
    GroupElement a = y1.rotation->phi.apply(joint.gamma.generator(i));
    GroupElement b = y2.rotation->phi.apply(joint.gamma.generator(i));
    a.insert(a.end(), b.begin(), b.end());
    phi_images.push_back(std::move(a));
  }
  GroupHom phi_p = make_hom(joint.gamma, zp, phi_images);
  auto base_p = std::make_shared<FiniteSystem>(make_rotational(zp, phi_p));
  std::vector<std::vector<long long>> tables_p(joint.gamma.rank(),
                                               std::vector<long long>(zp.size()));
  for (int g = 0; g < joint.gamma.rank(); ++g)
    for (long long zi = 0; zi < zp.size(); ++zi) {
      long long a = zi / z2n, b = zi % z2n;
      tables_p[g][zi] = rho1.tables[g][a] * k2n + rho2.tables[g][b];
    }
  Cocycle rho_p = make_cocycle(base_p, finite_fiber(kp), std::move(tables_p));

  std::vector<JoiningComponentReport> reports;
  auto components = ergodic_components(joint);
  for (int ci = 0; ci < (int)components.size(); ++ci) {
    JoiningComponentReport rep;
    rep.component = ci;
    const FiniteSystem& comp = components[ci];
    try {
      // push the component measure down to the product base
      std::vector<Rational> nu(zp.size(), Rational(0));
      for (int i = 0; i < comp.n_points; ++i) {
        int parent = comp.parent_points[i];
        int p1 = parent / x2.n_points, p2 = parent % x2.n_points;
        long long zi = (p1 / k1n) * z2n + (p2 / k2n);
        nu[zi] = nu[zi] + comp.weights[i];
      }
      std::vector<long long> support;
      for (long long zi = 0; zi < zp.size(); ++zi)
        if (nu[zi].positive()) support.push_back(zi);
      GroupElement z_star = zp.element_at(support.front());
      std::vector<long long> zprime;
      for (long long s : support)
        zprime.push_back(zp.index_of(zp.sub(zp.element_at(s), z_star)));
      std::sort(zprime.begin(), zprime.end());
      std::set<long long> zprime_set(zprime.begin(), zprime.end());
      bool subgroup = zprime_set.count(0) > 0;
      for (long long a : zprime) {
        if (!zprime_set.count(zp.index_of(zp.neg(zp.element_at(a))))) subgroup = false;
        for (long long b : zprime)
          if (!zprime_set.count(
                  zp.index_of(zp.add(zp.element_at(a), zp.element_at(b)))))
            subgroup = false;
      }
      bool uniform = true;
      for (long long s : support)
        if (!(nu[s] == nu[support.front()])) uniform = false;
      rep.base_coset_ok = subgroup && uniform;
      rep.base_subgroup_order = (long long)zprime.size();
      if (!rep.base_coset_ok) {
        rep.note = "pushdown is not uniform on a coset of a subgroup";
        reports.push_back(rep);
        continue;
      }

      // abelian structure of Z' and the restricted rotational base
      std::map<long long, int> zprime_pos;
      for (size_t i = 0; i < zprime.size(); ++i) zprime_pos[zprime[i]] = int(i);
      auto zp_mul = [&](int a, int b) {
        return zprime_pos.at(
            zp.index_of(zp.add(zp.element_at(zprime[a]), zp.element_at(zprime[b]))));
      };
      AbelianStructure zr = abelian_structure(int(zprime.size()), zp_mul, zprime_pos.at(0));
      std::vector<GroupElement> phi_r;
      for (int i = 0; i < joint.gamma.rank(); ++i) {
        long long img = zp.index_of(phi_p.apply(joint.gamma.generator(i)));
        if (!zprime_set.count(img)) throw PreconditionError("action leaves the subgroup");
        phi_r.push_back(zr.group.element_at(zr.index_of_cayley[zprime_pos.at(img)]));
      }
      auto base_r = std::make_shared<FiniteSystem>(
          make_rotational(zr.group, make_hom(joint.gamma, zr.group, phi_r)));
      std::vector<std::vector<long long>> tables_r(
          joint.gamma.rank(), std::vector<long long>(zprime.size()));
      for (int g = 0; g < joint.gamma.rank(); ++g)
        for (size_t i = 0; i < zprime.size(); ++i) {
          long long coset_point =
              zp.index_of(zp.add(z_star, zp.element_at(zprime[i])));
          tables_r[g][zr.index_of_cayley[int(i)]] = rho_p.tables[g][coset_point];
        }
      Cocycle rho_r = make_cocycle(base_r, rho_p.fiber, std::move(tables_r));

      // component re-indexed over the restricted extension
      FiniteSystem comp_r = comp;
      comp_r.parent_points.clear();
      for (int i = 0; i < comp.n_points; ++i) {
        int parent = comp.parent_points[i];
        int p1 = parent / x2.n_points, p2 = parent % x2.n_points;
        long long zi = (p1 / k1n) * z2n + (p2 / k2n);
        long long ki = (p1 % k1n) * k2n + (p2 % k2n);
        long long rel = zp.index_of(zp.sub(zp.element_at(zi), z_star));
        long long zidx = zr.index_of_cayley[zprime_pos.at(rel)];
        comp_r.parent_points.push_back(int(zidx * kp.size() + ki));
      }
      MackeyResult mk = mackey_reduce(rho_r, comp_r);
      rep.mackey_order = (long long)mk.mackey_group.size();

      // re-fiber the reduced cocycle over the Mackey group itself
      std::map<long long, int> h_pos;
      for (size_t i = 0; i < mk.mackey_group.size(); ++i)
        h_pos[kp.index_of(mk.mackey_group[i])] = int(i);
      auto h_mul = [&](int a, int b) {
        return h_pos.at(kp.index_of(kp.add(mk.mackey_group[a], mk.mackey_group[b])));
      };
      AbelianStructure hs =
          abelian_structure(int(mk.mackey_group.size()), h_mul, h_pos.at(0));
      std::vector<std::vector<long long>> tables_h(
          joint.gamma.rank(), std::vector<long long>(base_r->n_points));
      for (int g = 0; g < joint.gamma.rank(); ++g)
        for (int p = 0; p < base_r->n_points; ++p)
          tables_h[g][p] =
              hs.index_of_cayley[h_pos.at(mk.rho_prime.tables[g][p])];
      Cocycle rho_h = make_cocycle(base_r, finite_fiber(hs.group), std::move(tables_h));

      HKGroup hk = host_kra_group(rho_h);
      rep.hk_order = hk.size();
      structure_report(hk);
      FiniteSystem ext = extension_build(rho_h);
      translational_certificate(hk, ext, 0);
      rep.certified = true;
    } catch (const Error& e) {
      rep.certified = false;
      rep.note = e.what();
    }
    reports.push_back(rep);
  }
  return reports;
}

} // namespace clab
