// clab: exact workbench for abelian cocycle cohomology, cube factors and
// class-two translational structure on finite systems.
//
// Every subcommand binds one library operation and emits a deterministic
// JSON report.  Exit codes: 0 verified, 1 negative result with certificate,
// 2 input error.

#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "clab/errors.hpp"
#include "clab/examples.hpp"
#include "clab/hostkra.hpp"
#include "clab/serialize.hpp"
#include "clab/torus.hpp"

using namespace clab;

namespace {

struct Output {
  std::string path;
  void emit(const ojson& report) const {
    if (!path.empty()) write_json_atomic(path, report);
    std::cout << report.dump(2) << "\n";
  }
};

long long max_enum_guard() {
  if (const char* env = std::getenv("CLAB_MAX_ENUM")) {
    try {
      return std::stoll(env);
    } catch (const std::exception&) {
      throw ParseError("CLAB_MAX_ENUM is not an integer");
    }
  }
  return 1000000;
}

ojson obstruction_json(const CoboundaryObstruction& o) {
  return ojson{{"orbit_base", o.orbit_base},
               {"point", o.point},
               {"generator", o.generator},
               {"defect", o.value}};
}

int cmd_check(const std::string& input, const Output& out) {
  ojson j = load_json(input);
  ojson report;
  report["command"] = "check";
  report["claims_checked"] = {"cocycle.consistency"};
  try {
    Cocycle rho = cocycle_from_json(j);
    report["consistent"] = true;
    report["points"] = rho.base->n_points;
    report["generators"] = (int)rho.tables.size();
    out.emit(report);
    return 0;
  } catch (const ConsistencyError& e) {
    report["consistent"] = false;
    report["witness"] = e.what();
    out.emit(report);
    return 1;
  }
}

int cmd_type(const std::string& input, int k, const Output& out) {
  Cocycle rho = cocycle_from_json(load_json(input));
  TypeTestResult res = type_test(rho, k);
  ojson report;
  report["command"] = "type";
  report["k"] = k;
  report["claims_checked"] = {k == 2 ? "rho.ii" : "cocycle.type"};
  report["is_type_k"] = res.ok();
  if (res.ok()) {
    report["certificate_zero"] = res.certificate->zero();
    report["certificate"] = transfer_to_json(*res.certificate);
    out.emit(report);
    return 0;
  }
  report["witness"] = obstruction_json(*res.obstruction);
  out.emit(report);
  return 1;
}

int cmd_cl_solve(const std::string& input, const Output& out) {
  Cocycle rho = cocycle_from_json(load_json(input));
  CLResult res = cl_solve(rho);
  ojson report;
  report["command"] = "cl-solve";
  report["claims_checked"] = {"rho.iii"};
  report["satisfied"] = res.ok();
  if (res.ok()) {
    bool zero = true;
    for (const auto& f : res.witness->transfer) zero = zero && f.zero();
    report["transfer_all_zero"] = zero;
    ojson homs = ojson::array();
    for (const auto& c : res.witness->hom_images) homs.push_back(c);
    report["hom_images"] = homs;
    out.emit(report);
    return 0;
  }
  report["failing_translation"] = *res.failing_u;
  out.emit(report);
  return 1;
}

int cmd_ergodic(const std::string& input, const Output& out) {
  Cocycle rho = cocycle_from_json(load_json(input));
  ErgodicityReport res = ergodicity_test(rho);
  ojson report;
  report["command"] = "ergodic";
  report["claims_checked"] = {"rho.i"};
  report["ergodic"] = res.ergodic;
  if (res.ergodic) {
    out.emit(report);
    return 0;
  }
  report["failing_character"] = res.failing_xi->coeffs;
  report["coboundary_transfer"] = transfer_to_json(*res.xi_transfer);
  out.emit(report);
  return 1;
}

int cmd_mackey(const std::string& input, int component, const Output& out) {
  Cocycle rho = cocycle_from_json(load_json(input));
  FiniteSystem ext = extension_build(rho);
  auto comps = ergodic_components(ext);
  if (component < 0 || component >= (int)comps.size())
    throw PreconditionError("mackey: component index out of range");
  MackeyResult res = mackey_reduce(rho, comps[component]);
  ojson report;
  report["command"] = "mackey";
  report["claims_checked"] = {"rho.i", "kroncalc"};
  report["components"] = (int)comps.size();
  report["component"] = component;
  report["component_size"] = comps[component].n_points;
  ojson h = ojson::array();
  for (const auto& e : res.mackey_group) h.push_back(e);
  report["mackey_group"] = h;
  report["mackey_order"] = (long long)res.mackey_group.size();
  report["transfer"] = transfer_to_json(res.transfer);
  bool prime_zero = true;
  for (const auto& t : res.rho_prime.tables)
    for (long long v : t)
      if (v != 0) prime_zero = false;
  report["rho_prime_zero"] = prime_zero;
  out.emit(report);
  return 0;
}

int cmd_hk_group(const std::string& input, const Output& out) {
  Cocycle rho = cocycle_from_json(load_json(input));
  ojson report;
  report["command"] = "hk-group";
  report["claims_checked"] = {"hk.order", "hk.commutator"};
  try {
    HKGroup g = host_kra_group(rho, max_enum_guard());
    StructureReport sr = structure_report(g);
    FiniteSystem ext = extension_build(rho);
    TranslationalCertificate cert = translational_certificate(g, ext, 0);
    report["order"] = sr.order;
    report["g2_order"] = sr.g2_order;
    report["h_order"] = sr.h_order;
    report["commutator_order"] = sr.commutator_order;
    report["center_order"] = sr.center_order;
    report["lambda_order"] = cert.lambda_order;
    report["certificates"] = ojson{{"short_exact", sr.short_exact_ok},
                                   {"commutator_formula", sr.commutator_formula_ok},
                                   {"commutators_in_g2", sr.commutators_in_g2},
                                   {"g2_central", sr.g2_central},
                                   {"lambda_abelian", cert.lambda_abelian},
                                   {"lambda_meets_g2_trivially",
                                    cert.lambda_meets_g2_trivially},
                                   {"coset_bijection", cert.coset_bijection_ok}};
    report["paper_law_check"] = nullptr;
    out.emit(report);
    return 0;
  } catch (const NotCLSystemError& e) {
    report["order"] = 0;
    report["witness"] = e.what();
    out.emit(report);
    return 1;
  }
}

int cmd_factors(const std::string& input, int k, const Output& out) {
  FiniteSystem x = system_from_json(load_json(input));
  FactorPartition p = hkz_factor(x, k);
  ojson report;
  report["command"] = "factors";
  report["k"] = k;
  report["claims_checked"] = {"kroncalc"};
  report["partition"] = partition_to_json(p);
  out.emit(report);
  return 0;
}

int cmd_gowers(const std::string& input, int k, const Output& out) {
  ojson j = load_json(input);
  if (!j.contains("system") || !j.contains("f"))
    throw ParseError("gowers: input must carry \"system\" and \"f\"");
  FiniteSystem x = system_from_json(j["system"]);
  ObservableC f;
  for (const auto& v : j["f"]) {
    if (!v.is_array() || v.size() != 2) throw ParseError("gowers: f entries are [re, im]");
    f.values.push_back({v[0].get<double>(), v[1].get<double>()});
  }
  double norm = gowers_norm(x, f, k);
  ojson report;
  report["command"] = "gowers";
  report["k"] = k;
  report["claims_checked"] = ojson::array();
  report["norm"] = norm;
  out.emit(report);
  return 0;
}

int cmd_example(const std::string& name, int n, int p, bool verify,
                const Output& out) {
  ExampleBundle bundle = [&] {
    if (name == "char2") return example_char2(n);
    if (name == "oddp") return example_oddp(p, n);
    throw ParseError("example: unknown name " + name + " (char2, oddp)");
  }();
  if (!verify) {
    out.emit(cocycle_to_json(bundle.rho));
    return 0;
  }
  json report = verify_paper_claims(bundle);
  report["command"] = "example";
  bool ok = report["matches_expectations"].get<bool>();
  for (const auto& c : report["claims"])
    if (c["status"] == "failed") ok = false;
  out.emit(report);
  return ok ? 0 : 1;
}

int cmd_torus_skew(double alpha, long long n, int max_freq, double tol,
                   uint64_t seed, const Output& out) {
  TorusParams params;
  params.alpha = alpha;
  ojson report;
  report["command"] = "torus skew";
  report["claims_checked"] = {"rho.ii", "rho.iii", "paper_law"};
  bool pass = true;
  try {
    auto orbit = skew_shift_orbit(params, n);
    auto table = weyl_test(orbit, max_freq);
    double worst = 0.0;
    ojson entries = ojson::array();
    for (const auto& e : table) {
      entries.push_back(ojson{{"frequency", e.freq}, {"magnitude", e.magnitude}});
      worst = std::max(worst, e.magnitude);
    }
    report["N"] = n;
    report["weyl"] = entries;
    report["weyl_max"] = worst;
    report["identities"] = ojson::array();
    for (const char* kind : {"cocycle-eq", "type-2", "cl"})
      report["identities"].push_back(verify_identity(kind, params, 10000, tol, seed));
    report["paper_law_check"] = skew_law_check(2000, seed);
  } catch (const InternalError& e) {
    report["failure"] = e.what();
    pass = false;
  }
  out.emit(report);
  return pass ? 0 : 1;
}

int cmd_torus_heisenberg(double alpha, double beta, long long samples, double tol,
                         uint64_t seed, const Output& out) {
  TorusParams params;
  params.alpha = alpha;
  params.beta = beta;
  ojson report;
  report["command"] = "torus heisenberg";
  report["claims_checked"] = ojson::array();
  try {
    report["check"] = heisenberg_check(params, int(samples), tol, seed);
  } catch (const InternalError& e) {
    report["failure"] = e.what();
    out.emit(report);
    return 1;
  }
  out.emit(report);
  return 0;
}

int cmd_torus_tdk(long long samples, uint64_t seed, const Output& out) {
  ojson report;
  report["command"] = "torus tdk";
  report["claims_checked"] = ojson::array();
  try {
    report["check"] = example_tdk(seed, int(samples));
  } catch (const InternalError& e) {
    report["failure"] = e.what();
    out.emit(report);
    return 1;
  }
  out.emit(report);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact cocycle and cube-factor workbench for finite abelian systems"};
  app.require_subcommand(1);

  std::string input;
  Output out;
  int k = 2, n = 1, p = 3, component = 0;
  double alpha = 0.41421356237309503, beta = 0.6180339887498949;
  double tol = 1e-9;
  long long big_n = 100000;
  uint64_t seed = 0;
  bool verify = false;
  int max_freq = 3;

  auto add_out = [&](CLI::App* cmd) { cmd->add_option("--out", out.path, "report path"); };

  auto* check = app.add_subcommand("check", "verify cocycle consistency");
  check->add_option("input", input)->required();
  add_out(check);

  auto* type = app.add_subcommand("type", "test whether a cocycle is of type k");
  type->add_option("input", input)->required();
  type->add_option("--k", k, "cube order")->default_val(2);
  add_out(type);

  auto* cl = app.add_subcommand("cl-solve", "solve the translation equations");
  cl->add_option("input", input)->required();
  add_out(cl);

  auto* ergodic = app.add_subcommand("ergodic", "character criterion for ergodicity");
  ergodic->add_option("input", input)->required();
  add_out(ergodic);

  auto* mackey = app.add_subcommand("mackey", "reduce against an ergodic component");
  mackey->add_option("input", input)->required();
  mackey->add_option("--component", component, "component index")->default_val(0);
  add_out(mackey);

  auto* hk = app.add_subcommand("hk-group", "enumerate the transformation group");
  hk->add_option("input", input)->required();
  add_out(hk);

  auto* factors = app.add_subcommand("factors", "order-k characteristic factor");
  factors->add_option("input", input)->required();
  factors->add_option("--k", k)->default_val(1);
  add_out(factors);

  auto* gowers = app.add_subcommand("gowers", "order-k uniformity norm");
  gowers->add_option("input", input)->required();
  gowers->add_option("--k", k)->default_val(2);
  add_out(gowers);

  auto* example = app.add_subcommand("example", "shipped example families");
  example->add_option("name", input)->required();
  example->add_option("--n", n)->default_val(1);
  example->add_option("--p", p)->default_val(3);
  example->add_flag("--verify", verify, "run the claim suite");
  add_out(example);

  auto* torus = app.add_subcommand("torus", "floating-point circle systems");
  torus->require_subcommand(1);
  auto* skew = torus->add_subcommand("skew", "skew shift orbit and diagnostics");
  skew->add_option("--alpha", alpha);
  skew->add_option("--N", big_n);
  skew->add_option("--max-freq", max_freq);
  skew->add_option("--tol", tol);
  skew->add_option("--seed", seed);
  add_out(skew);
  auto* heis = torus->add_subcommand("heisenberg", "nilmanifold section cocycle");
  heis->add_option("--alpha", alpha);
  heis->add_option("--beta", beta);
  heis->add_option("--N", big_n);
  heis->add_option("--tol", tol);
  heis->add_option("--seed", seed);
  add_out(heis);
  auto* tdk = torus->add_subcommand("tdk", "half-fractional-part identity");
  tdk->add_option("--N", big_n);
  tdk->add_option("--seed", seed);
  add_out(tdk);

  CLI11_PARSE(app, argc, argv);

  try {
    if (check->parsed()) return cmd_check(input, out);
    if (type->parsed()) return cmd_type(input, k, out);
    if (cl->parsed()) return cmd_cl_solve(input, out);
    if (ergodic->parsed()) return cmd_ergodic(input, out);
    if (mackey->parsed()) return cmd_mackey(input, component, out);
    if (hk->parsed()) return cmd_hk_group(input, out);
    if (factors->parsed()) return cmd_factors(input, k, out);
    if (gowers->parsed()) return cmd_gowers(input, k, out);
    if (example->parsed()) return cmd_example(input, n, p, verify, out);
    if (skew->parsed())
      return cmd_torus_skew(alpha, big_n, max_freq, tol, seed, out);
    if (heis->parsed())
      return cmd_torus_heisenberg(alpha, beta, std::min(big_n, 100000LL), tol, seed, out);
    if (tdk->parsed()) return cmd_torus_tdk(std::min(big_n, 100000LL), seed, out);
  } catch (const ParseError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const SizeGuardError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const ConsistencyError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
