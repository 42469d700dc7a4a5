#include "clab/examples.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "clab/errors.hpp"
#include "clab/random.hpp"

namespace clab {

namespace {

SystemPtr identity_rotation(const FinAbGroup& z, const GroupHom& phi) {
  return std::make_shared<FiniteSystem>(make_rotational(z, phi));
}

} // namespace

ExampleBundle example_char2(int n) {
  if (n < 1 || n > 8) throw PreconditionError("example_char2: n must be in 1..8");
  FinAbGroup z(std::vector<long long>(n, 2));
  std::vector<GroupElement> id_images;
  for (int i = 0; i < n; ++i) id_images.push_back(z.generator(i));
  GroupHom phi = make_hom(z, z, id_images);
  SystemPtr base = identity_rotation(z, phi);

  FinAbGroup k({4});
  long long zn = z.size();
  std::vector<std::vector<long long>> tables(n, std::vector<long long>(zn));
  for (int m = 0; m < n; ++m)
    for (long long zi = 0; zi < zn; ++zi) {
      GroupElement ze = z.element_at(zi);
      tables[m][zi] = ze[m] == 0 ? 1 : 3; // (-1)^{z_m} in Z/4
    }

  ExampleBundle b;
  b.name = "char2";
  b.params = json{{"n", n}};
  b.z = z;
  b.k = k;
  b.rho = make_cocycle(base, finite_fiber(k), std::move(tables));
  b.expected = {{"rho.i", "deviation-at-finite-truncation"},
                {"rho.ii", "verified-exact"},
                {"rho.iii", "verified-exact"},
                {"kroncalc", "deviation-at-finite-truncation"}};
  return b;
}

ExampleBundle example_oddp(int p, int n) {
  if (p != 3 && p != 5 && p != 7)
    throw PreconditionError("example_oddp: p must be an odd prime <= 7");
  if (n < 1 || n > 3) throw PreconditionError("example_oddp: n must be in 1..3");
  FinAbGroup z(std::vector<long long>(n, p));
  std::vector<GroupElement> images;
  for (int i = 0; i < n; ++i) images.push_back(z.scale(2, z.generator(i)));
  GroupHom phi = make_hom(z, z, images);
  SystemPtr base = identity_rotation(z, phi);

  FinAbGroup k({p});
  long long zn = z.size();
  std::vector<std::vector<long long>> tables(n, std::vector<long long>(zn));
  for (int m = 0; m < n; ++m)
    for (long long zi = 0; zi < zn; ++zi) {
      GroupElement ze = z.element_at(zi);
      tables[m][zi] = (ze[m] + 1) % p; // z_m + B(e_m, e_m)
    }

  ExampleBundle b;
  b.name = "oddp";
  b.params = json{{"p", p}, {"n", n}};
  b.z = z;
  b.k = k;
  b.rho = make_cocycle(base, finite_fiber(k), std::move(tables));
  b.expected = {{"rho.i", "deviation-at-finite-truncation"},
                {"rho.ii", "verified-exact"},
                {"rho.iii", "verified-exact"},
                {"kroncalc", "deviation-at-finite-truncation"}};
  return b;
}

ExampleBundle example_bilinear(const FinAbGroup& gamma, const FinAbGroup& u,
                               const std::vector<std::vector<GroupElement>>& b) {
  int gr = gamma.rank(), ur = u.rank();
  if ((int)b.size() != gr)
    throw PreconditionError("example_bilinear: form must be given on generator pairs");
  for (int i = 0; i < gr; ++i) {
    if ((int)b[i].size() != gr)
      throw PreconditionError("example_bilinear: form must be square");
    for (int j = 0; j < gr; ++j) {
      u.check_element(b[i][j], "bilinear form value");
      if (b[i][j] != b[j][i])
        throw PreconditionError("example_bilinear: form is not symmetric");
      if (!u.is_zero(u.scale(gamma.orders[i], b[i][j])) ||
          !u.is_zero(u.scale(gamma.orders[j], b[i][j])))
        throw PreconditionError("example_bilinear: form is not bilinear over the orders");
    }
  }
  auto form = [&](const GroupElement& a, const GroupElement& c) {
    GroupElement out = u.zero();
    for (int i = 0; i < gr; ++i)
      for (int j = 0; j < gr; ++j)
        out = u.add(out, u.scale(a[i] * c[j], b[i][j]));
    return out;
  };

  // Z = Hom(gamma, u): coordinate (i, j) ranges over Z/gcd(N_i, M_j) and the
  // hom sends e_i to sum_j z_{ij} (M_j / g_{ij}) f_j
  std::vector<long long> z_orders;
  for (int i = 0; i < gr; ++i)
    for (int j = 0; j < ur; ++j)
      z_orders.push_back(std::gcd(gamma.orders[i], u.orders[j]));
  FinAbGroup z(z_orders);
  auto hom_value = [&](const GroupElement& ze, int i) { // z(e_i) in U
    GroupElement out = u.zero();
    for (int j = 0; j < ur; ++j) {
      long long g = z.orders[(size_t)i * ur + j];
      out = u.add(out, u.scale(ze[(size_t)i * ur + j] * (u.orders[j] / g),
                               u.generator(j)));
    }
    return out;
  };
  auto hom_of = [&](const std::vector<GroupElement>& images) { // U images -> Z elem
    GroupElement ze = z.zero();
    for (int i = 0; i < gr; ++i)
      for (int j = 0; j < ur; ++j) {
        long long g = z.orders[(size_t)i * ur + j];
        long long step = u.orders[j] / g;
        if (images[i][j] % step != 0)
          throw InternalError("example_bilinear: image escapes the hom lattice");
        ze[(size_t)i * ur + j] = (images[i][j] / step) % g;
      }
    return ze;
  };

  std::vector<GroupElement> phi_images;
  for (int i = 0; i < gr; ++i) {
    std::vector<GroupElement> imgs;
    for (int ii = 0; ii < gr; ++ii)
      imgs.push_back(u.scale(2, form(gamma.generator(i), gamma.generator(ii))));
    phi_images.push_back(hom_of(imgs));
  }
  GroupHom phi = make_hom(gamma, z, phi_images);
  SystemPtr base = identity_rotation(z, phi);

  long long zn = z.size();
  std::vector<std::vector<long long>> tables(gr, std::vector<long long>(zn));
  for (int i = 0; i < gr; ++i) {
    GroupElement bii = form(gamma.generator(i), gamma.generator(i));
    for (long long zi = 0; zi < zn; ++zi) {
      GroupElement ze = z.element_at(zi);
      tables[i][zi] = u.index_of(u.add(bii, hom_value(ze, i)));
    }
  }

  ExampleBundle bundle;
  bundle.name = "bilinear";
  bundle.params = json{{"gamma", gamma.orders}, {"u", u.orders}};
  bundle.z = z;
  bundle.k = u;
  bundle.rho = make_cocycle(base, finite_fiber(u), std::move(tables));
  bundle.expected = {{"rho.i", "reported"},
                     {"rho.ii", "verified-exact"},
                     {"rho.iii", "verified-exact"}};
  return bundle;
}

namespace {

double frac(double x) { return x - std::floor(x); }

double torus_dist(double x) {
  double f = frac(x);
  return std::min(f, 1.0 - f);
}

} // namespace

json example_tdk(uint64_t seed, int samples) {
  Rng rng(seed);
  auto rho1 = [](double x, double alpha) {
    return frac((frac(x + alpha) - x - alpha) / 2.0);
  };
  auto f1 = [](double x, double y) {
    return frac((x - y - frac(x - y)) / 2.0);
  };
  double max_residual = 0.0;
  double worst[3] = {0, 0, 0};
  int done = 0;
  while (done < samples) {
    double x = rng.real(), y = rng.real(), alpha = rng.real();
    if (torus_dist(x + alpha) < 1e-12 || torus_dist(y + alpha) < 1e-12 ||
        torus_dist(x - y) < 1e-12)
      continue; // guard band around the jumps of the fractional part
    double lhs = rho1(x, alpha) - rho1(y, alpha);
    double rhs = f1(frac(x + alpha), frac(y + alpha)) - f1(x, y);
    double residual = torus_dist(lhs - rhs);
    if (residual > max_residual) {
      max_residual = residual;
      worst[0] = x; worst[1] = y; worst[2] = alpha;
    }
    ++done;
  }
  json rep;
  rep["identity"] = "order-1 cube difference of the half-fractional-part cocycle "
                    "equals the derivative of the displayed transfer function";
  rep["samples"] = samples;
  rep["max_residual"] = max_residual;
  rep["pass"] = max_residual < 1e-12;
  rep["worst_sample"] = {worst[0], worst[1], worst[2]};
  rep["quasi_coboundary"] = "fails analytically for the order-two coefficient group; "
                            "recorded, not tested";
  if (max_residual >= 1e-12)
    throw InternalError("example_tdk: residual " + std::to_string(max_residual) +
                        " exceeds 1e-12");
  return rep;
}

namespace {

// (u, theta, sigma) coordinates of a Host-Kra element in the two shipped
// families, where F(z) = theta + sum (-1)^{z_m} [sigma_m = 1] (char2) or
// F(z) = theta + sum z_m sigma_m (oddp)
struct TripleForm {
  bool ok = false;
  long long theta = 0;
  GroupElement sigma;
};

TripleForm char2_form(const FinAbGroup& z, const FinAbGroup& k,
                      const std::vector<long long>& f) {
  int n = z.rank();
  TripleForm t;
  t.sigma.assign(n, 0);
  long long f0 = f[z.index_of(z.zero())];
  for (int m = 0; m < n; ++m) {
    long long diff = (f[z.index_of(z.generator(m))] - f0 + 8) % 4;
    if (diff == 2) t.sigma[m] = 1;
    else if (diff != 0) return t;
  }
  long long weight = std::accumulate(t.sigma.begin(), t.sigma.end(), 0LL);
  t.theta = ((f0 - weight) % 4 + 4) % 4;
  for (long long zi = 0; zi < z.size(); ++zi) {
    GroupElement ze = z.element_at(zi);
    long long want = t.theta;
    for (int m = 0; m < n; ++m)
      if (t.sigma[m] == 1) want += ze[m] == 0 ? 1 : 3;
    if (f[zi] != ((want % 4) + 4) % 4) return t;
  }
  (void)k;
  t.ok = true;
  return t;
}

TripleForm oddp_form(const FinAbGroup& z, long long p,
                     const std::vector<long long>& f) {
  int n = z.rank();
  TripleForm t;
  t.sigma.assign(n, 0);
  long long f0 = f[z.index_of(z.zero())];
  for (int m = 0; m < n; ++m)
    t.sigma[m] = ((f[z.index_of(z.generator(m))] - f0) % p + p) % p;
  t.theta = f0;
  for (long long zi = 0; zi < z.size(); ++zi) {
    GroupElement ze = z.element_at(zi);
    long long want = t.theta;
    for (int m = 0; m < n; ++m) want += ze[m] * t.sigma[m];
    if (f[zi] != ((want % p) + p) % p) return t;
  }
  t.ok = true;
  return t;
}

json compare_paper_law(const ExampleBundle& b, const HKGroup& g) {
  json out;
  const FinAbGroup& z = g.z;
  int n = z.rank();
  bool is_char2 = b.name == "char2";
  long long p = is_char2 ? 4 : b.params["p"].get<long long>();

  out["reading"] =
      is_char2 ? "displayed summand ((-1)^{u'_m}+1) 1_{gamma_m=1} read with gamma = sigma"
               : "displayed summand sum u_m sigma_m compared against the generic law";

  // parameterize every element; bail out if some element escapes the form
  std::vector<TripleForm> forms(g.size());
  for (int a = 0; a < g.size(); ++a) {
    forms[a] = is_char2 ? char2_form(z, b.k, g.elements[a].f)
                        : oddp_form(z, p, g.elements[a].f);
    if (!forms[a].ok) {
      out["match"] = false;
      out["note"] = "element outside the displayed triple parameterization";
      return out;
    }
  }
  long long mismatches = 0;
  json first_discrepancy;
  for (int a = 0; a < g.size(); ++a)
    for (int c = 0; c < g.size(); ++c) {
      int prod = g.mul(a, c);
      GroupElement u_a = z.element_at(g.elements[a].u);
      GroupElement u_c = z.element_at(g.elements[c].u);
      long long theta;
      if (is_char2) {
        theta = forms[a].theta + forms[c].theta;
        for (int m = 0; m < n; ++m)
          if (forms[a].sigma[m] == 1)
            theta += (u_c[m] == 0 ? 1 : -1) + 1; // displayed ((-1)^{u'_m}+1)
        theta = ((theta % 4) + 4) % 4;
      } else {
        theta = forms[a].theta + forms[c].theta;
        for (int m = 0; m < n; ++m) theta += u_a[m] * forms[a].sigma[m]; // displayed u, not u'
        theta = ((theta % p) + p) % p;
      }
      GroupElement sigma = forms[a].sigma;
      for (int m = 0; m < n; ++m) sigma[m] = (sigma[m] + forms[c].sigma[m]) % (is_char2 ? 2 : p);
      bool same = forms[prod].theta == theta && forms[prod].sigma == sigma &&
                  g.elements[prod].u ==
                      int(z.index_of(z.add(u_a, u_c)));
      if (!same) {
        if (mismatches == 0)
          first_discrepancy = {{"left", a},
                               {"right", c},
                               {"displayed_theta", theta},
                               {"generic_theta", forms[prod].theta}};
        ++mismatches;
      }
    }
  out["pairs"] = (long long)g.size() * g.size();
  out["mismatches"] = mismatches;
  out["match"] = mismatches == 0;
  if (mismatches > 0) out["first_discrepancy"] = first_discrepancy;
  return out;
}

} // namespace

json verify_paper_claims(const ExampleBundle& b) {
  json rep;
  rep["name"] = b.name;
  rep["params"] = b.params;
  json claims = json::array();

  auto push = [&](const std::string& id, const std::string& status,
                  const std::string& note) {
    claims.push_back(json{{"id", id}, {"status", status}, {"note", note}});
  };

  // consistency holds by construction (make_cocycle validated the bundle)
  push("cocycle.consistency", "verified-exact", "order and commutation relations hold");

  // type 2 with the zero witness
  TypeTestResult t2 = type_test(b.rho, 2);
  if (t2.ok() && t2.certificate->zero())
    push("rho.ii", "verified-exact", "cube difference vanishes; zero witness accepted");
  else if (t2.ok())
    push("rho.ii", "verified-exact", "nonzero coboundary witness");
  else
    push("rho.ii", "failed", t2.obstruction->describe());

  // Conze-Lesigne equation with the closed-form homomorphism part
  CLResult cl = cl_solve(b.rho);
  if (!cl.ok()) {
    push("rho.iii", "failed", "no witness for some translation");
  } else {
    bool zero_f = std::all_of(cl.witness->transfer.begin(), cl.witness->transfer.end(),
                              [](const TransferFunction& f) { return f.zero(); });
    bool c_matches = true;
    const FinAbGroup& z = b.z;
    for (long long zi = 0; zi < z.size(); ++zi) {
      GroupElement ze = z.element_at(zi);
      for (int i = 0; i < b.rho.base->gamma.rank(); ++i) {
        long long want;
        if (b.name == "char2") {
          want = ze[i] == 1 ? 2 : 0; // ((-1)^{z_i} - 1) mod 4
        } else if (b.name == "oddp") {
          want = ze[i] % b.k.orders[0];
        } else {
          // bilinear family: c_z(e_i) = z(e_i) = rho_{e_i}(z) - B(e_i, e_i)
          GroupElement w = b.k.sub(b.k.element_at(b.rho.tables[i][zi]),
                                   b.k.element_at(b.rho.tables[i][z.index_of(z.zero())]));
          want = b.k.index_of(w);
        }
        if (cl.witness->hom_images[zi][i] != want) c_matches = false;
      }
    }
    if (zero_f && c_matches)
      push("rho.iii", "verified-exact",
           "zero transfer functions with the displayed homomorphism family");
    else if (zero_f)
      push("rho.iii", "verified-exact", "zero transfer functions, homomorphisms differ "
                                        "from the displayed form");
    else
      push("rho.iii", "verified-exact", "witness verified, transfer part nonzero");
    // the order-2 certificate built from the witness must verify exactly
    cl_to_type2_witness(b.rho, *cl.witness);
  }

  // ergodicity: exact at infinite truncation only for the shipped families
  FiniteSystem ext = extension_build(b.rho);
  auto components = ergodic_components(ext);
  bool base_ergodic = invariant_factor(*b.rho.base).n_blocks == 1;
  json erg_detail;
  erg_detail["components"] = (long long)components.size();
  erg_detail["component_sizes"] = json::array();
  for (const auto& c : components) erg_detail["component_sizes"].push_back(c.n_points);
  if (!base_ergodic) {
    erg_detail["ergodic"] = false;
    push("rho.i", "reported", "base rotation is not ergodic at this truncation; "
                              "the character criterion does not apply");
  } else {
    ErgodicityReport erg = ergodicity_test(b.rho);
    erg_detail["ergodic"] = erg.ergodic;
    if (!erg.ergodic) {
      MackeyResult mk = mackey_reduce(b.rho, components.front());
      erg_detail["mackey_order"] = (long long)mk.mackey_group.size();
    }
    if (b.name == "bilinear") {
      push("rho.i", erg.ergodic ? "verified-exact" : "reported",
           erg.ergodic ? "extension transitive" : "not ergodic at this truncation");
    } else if (erg.ergodic) {
      push("rho.i", "verified-exact", "extension transitive");
    } else {
      push("rho.i", "deviation-at-finite-truncation",
           "ergodicity holds only in the infinite limit; finite truncation "
           "decomposes into " + std::to_string(components.size()) + " components");
    }
  }
  rep["ergodicity"] = erg_detail;

  // Kronecker-factor claim: both order-1 factor constructions agree on each
  // component and separate its points; the infinite-system identification is
  // recorded as a deviation
  bool kron_agree = true;
  for (const auto& comp : components) {
    FactorPartition via_cubes = hkz_factor(comp, 1);
    KroneckerData kd = kronecker_factor(comp);
    if (via_cubes.block_of != kd.partition.block_of) kron_agree = false;
    if (kd.partition.n_blocks != comp.n_points) kron_agree = false;
  }
  if (b.name == "bilinear")
    push("kroncalc", kron_agree ? "verified-exact" : "failed",
         "order-1 factor constructions agree on every component");
  else
    push("kroncalc", kron_agree ? "deviation-at-finite-truncation" : "failed",
         "both order-1 factor constructions agree on every component; the "
         "infinite-system factor identification is not finitely testable");

  // Host-Kra group structure, when the enumeration is small enough.  The
  // centrality and commutator arguments need an ergodic base, so the group
  // analysis is only asserted there.
  long long expected_order = -1;
  if (b.name == "char2") expected_order = b.z.size() * 4 * b.z.size();
  if (b.name == "oddp") expected_order = b.z.size() * b.k.size() * b.z.size();
  if (!base_ergodic) {
    push("hk.order", "not-asserted", "base rotation is not ergodic; the group "
                                     "structure claims do not apply");
    rep["claims"] = claims;
    bool all_expected_early = true;
    for (const ClaimExpectation& exp : b.expected) {
      bool found = false;
      for (const auto& c : claims)
        if (c["id"] == exp.id && c["status"] == exp.status) found = true;
      if (!found) all_expected_early = false;
    }
    rep["matches_expectations"] = all_expected_early;
    return rep;
  }
  try {
    HKGroup g = host_kra_group(b.rho);
    if (g.size() <= 1024) {
      StructureReport sr = structure_report(g);
      json hk;
      hk["order"] = sr.order;
      hk["g2_order"] = sr.g2_order;
      hk["h_order"] = sr.h_order;
      hk["commutator_order"] = sr.commutator_order;
      hk["center_order"] = sr.center_order;
      rep["hk"] = hk;
      if (expected_order >= 0)
        push("hk.order", sr.order == expected_order ? "verified-exact" : "failed",
             "order " + std::to_string(sr.order));
      else
        push("hk.order", "reported", "order " + std::to_string(sr.order));
      long long expected_comm = b.name == "char2" ? 2
                                : b.name == "oddp" ? b.k.size()
                                                   : -1;
      if (expected_comm >= 0)
        push("hk.commutator",
             sr.commutator_order == expected_comm ? "verified-exact" : "failed",
             "commutator subgroup order " + std::to_string(sr.commutator_order));
      else
        push("hk.commutator", "reported",
             "commutator subgroup order " + std::to_string(sr.commutator_order));
      TranslationalCertificate cert = translational_certificate(g, ext, 0);
      rep["lambda_order"] = cert.lambda_order;
      if (b.name == "char2" || b.name == "oddp") {
        json law = compare_paper_law(b, g);
        rep["paper_law_check"] = law;
        push("paper_law", "reported",
             law["match"].get<bool>()
                 ? "displayed law matches the composed law"
                 : "displayed law differs from the composed law on " +
                       std::to_string(law["mismatches"].get<long long>()) +
                       " pairs; the composed law is authoritative");
      }
    } else {
      push("hk.order", expected_order < 0 || g.size() == expected_order
                           ? "verified-exact"
                           : "failed",
           "order " + std::to_string(g.size()) + "; pair analysis skipped (size)");
    }
  } catch (const SizeGuardError& e) {
    push("hk.order", "not-asserted", std::string("enumeration guard: ") + e.what());
  }

  // compare against the expectations shipped with the bundle
  bool all_expected = true;
  for (const ClaimExpectation& exp : b.expected) {
    bool found = false;
    for (const auto& c : claims)
      if (c["id"] == exp.id && c["status"] == exp.status) found = true;
    if (!found) all_expected = false;
  }
  rep["claims"] = claims;
  rep["matches_expectations"] = all_expected;
  return rep;
}

} // namespace clab
