#ifndef CLAB_COCYCLE_HPP
#define CLAB_COCYCLE_HPP

#include <optional>
#include <string>
#include <vector>

#include "clab/random.hpp"
#include "clab/system.hpp"

namespace clab {

// Coefficient group of a cocycle.  A circle fiber is the finite cyclic
// group (1/M)Z/Z: a single cyclic factor whose element v stands for the
// exact circle value v/M.  Solvers that enumerate homomorphisms into the
// circle first widen M to lcm(M, exp(gamma), exp(Z)).
struct Fiber {
  FinAbGroup group;
  bool circle = false;

  long long size() const { return group.size(); }
  long long modulus() const { return group.orders.at(0); } // circle fibers only
  CircleValue circle_value(long long v) const { return CircleValue(v, modulus()); }
};

Fiber finite_fiber(FinAbGroup k);
Fiber circle_fiber(long long m);

// Fiber-valued function on the points of a system, stored as fiber element
// indices.  Zero-weight points carry the zero value.
struct TransferFunction {
  Fiber fiber;
  std::vector<long long> values;

  bool zero() const;
};

// Cocycle over a finite system, stored as one fiber-valued table per
// generator of the acting group.  Values at arbitrary group elements come
// from telescoping in the fixed generator order.
struct Cocycle {
  SystemPtr base;
  Fiber fiber;
  std::vector<std::vector<long long>> tables;

  long long at(int generator, int point) const { return tables[generator][point]; }
  // rho_g(p) for an arbitrary acting-group element
  long long eval(const GroupElement& g, int point) const;
};

// Validates the order and commutation consistency invariants and returns
// the cocycle.  Throws ConsistencyError naming a witness otherwise.
Cocycle make_cocycle(SystemPtr base, Fiber fiber,
                     std::vector<std::vector<long long>> tables);

// dF as a cocycle: (dF)_g = F o T^g - F.
Cocycle derivative(SystemPtr base, const TransferFunction& f);

// Cocycle difference under the base translation V_{z0} (rotational base).
Cocycle translate_derivative(const Cocycle& rho, const GroupElement& z0);

// Alternating sum of rho over the corners of X^[k].
Cocycle cube_difference(const Cocycle& rho, int k, int cap = 3);

struct CoboundaryObstruction {
  int orbit_base = -1;
  int point = -1;
  int generator = -1;
  long long value = 0; // nonzero fiber element witnessing the failure
  std::string describe() const;
};

struct CoboundaryResult {
  std::optional<TransferFunction> transfer;
  std::optional<CoboundaryObstruction> obstruction;
  bool ok() const { return transfer.has_value(); }
};

// Orbit propagation with F = 0 at the lowest-index point of each orbit.
CoboundaryResult coboundary_solve(const Cocycle& sigma);

struct QuasiCoboundaryResult {
  bool ok = false;
  Fiber solve_fiber; // fiber the certificate lives in (widened for circle mode)
  std::optional<TransferFunction> transfer;
  std::vector<long long> hom_images; // image of each gamma generator
};

// Finds (F, c) with sigma = dF + c, trying the zero transfer function
// first and then homomorphisms in enumeration order.
QuasiCoboundaryResult quasi_coboundary_solve(const Cocycle& sigma);

struct TypeTestResult {
  std::optional<TransferFunction> certificate; // over the cube system
  std::optional<CoboundaryObstruction> obstruction;
  SystemPtr cube;
  bool ok() const { return certificate.has_value(); }
};

// Type-k test: coboundary_solve(cube_difference(rho, k)).
TypeTestResult type_test(const Cocycle& rho, int k, int cap = 3);

// Family of solutions d(F_z) + c_z = translate-derivative at every z.
struct CLWitness {
  Fiber fiber;
  std::vector<TransferFunction> transfer;          // per z index
  std::vector<std::vector<long long>> hom_images;  // per z index, per generator
};

struct CLResult {
  std::optional<CLWitness> witness;
  std::optional<GroupElement> failing_u; // generator of Z that failed
  bool ok() const { return witness.has_value(); }
};

CLResult cl_solve(const Cocycle& rho);

// Verifies a Conze-Lesigne witness exactly on positive-weight points.
void verify_cl_witness(const Cocycle& rho, const CLWitness& w);

// Builds the order-2 coboundary certificate from a Conze-Lesigne witness
// and asserts the cube identity exactly.  Optionally returns the cube.
TransferFunction cl_to_type2_witness(const Cocycle& rho, const CLWitness& w,
                                     SystemPtr* cube_out = nullptr);

struct ErgodicityReport {
  bool ergodic = false;
  std::optional<Character> failing_xi;          // character certifying failure
  std::optional<TransferFunction> xi_transfer;  // coboundary witness for it
};

// Character criterion, cross-checked against transitivity of the extension.
ErgodicityReport ergodicity_test(const Cocycle& rho);

// Skew product of the base with the fiber group through rho.
FiniteSystem extension_build(const Cocycle& rho);

struct MackeyResult {
  std::vector<GroupElement> mackey_group;  // H as a sorted element list in K
  Cocycle rho_prime;                       // rho - dF, valued in H
  TransferFunction transfer;
  long long component_shift = 0;           // fiber element aligning the component
};

// Reduces rho against an ergodic component of its extension.
MackeyResult mackey_reduce(const Cocycle& rho, const FiniteSystem& component);

// --- helpers shared by solvers and tests ---

// xi o rho as a circle-fiber cocycle.
Cocycle compose_character(const Cocycle& rho, const Character& xi);

// rho1 - rho2 over a common base and fiber.
Cocycle cocycle_difference(const Cocycle& a, const Cocycle& b);

// Embeds a circle-fiber cocycle into (1/m)Z/Z for a multiple m of its modulus.
Cocycle widen_circle(const Cocycle& rho, long long m);

// Deterministic random cocycle spanning the whole cocycle space: a random
// coboundary plus, per orbit, the cocycle induced from a random
// homomorphism on the orbit stabilizer.
Cocycle random_cocycle(Rng& rng, SystemPtr base, const Fiber& fiber);

} // namespace clab

#endif
