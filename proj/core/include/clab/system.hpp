#ifndef CLAB_SYSTEM_HPP
#define CLAB_SYSTEM_HPP

#include <complex>
#include <memory>
#include <optional>
#include <vector>

#include "clab/abelian.hpp"
#include "clab/rational.hpp"

namespace clab {

// Present when a system is a rotation on a compact abelian group Z:
// point i is the i-th element of Z and each gamma-generator translates
// by phi(generator).
struct RotationInfo {
  FinAbGroup z;
  GroupHom phi; // gamma -> z
};

// Finite measure-preserving system for a finite abelian acting group.
// Weights may be zero; zero-weight points are carried structurally but all
// almost-everywhere statements quantify over positive-weight points only.
struct FiniteSystem {
  FinAbGroup gamma;
  int n_points = 0;
  std::vector<Rational> weights;
  std::vector<std::vector<int>> action; // per gamma generator: point -> point

  // optional flat label table, row-major, label_width entries per point
  int label_width = 0;
  std::vector<long long> labels;

  // cube-corner tracking: corner_width base points per point (1 = the
  // point itself, empty corners vector)
  int corner_width = 1;
  std::vector<int> corners;

  std::optional<RotationInfo> rotation;
  std::vector<int> parent_points; // indices into the system this was carved from

  int apply(int generator, int p) const { return action[generator][p]; }
  int apply_element(const GroupElement& g, int p) const;
  int corner(int p, int j) const {
    return corners.empty() ? p : corners[(size_t)p * corner_width + j];
  }
  const long long* label_row(int p) const { return labels.data() + (size_t)p * label_width; }
  bool positive(int p) const { return weights[p].positive(); }

  void validate() const; // throws ConsistencyError on any broken invariant
};

using SystemPtr = std::shared_ptr<const FiniteSystem>;

FiniteSystem make_system(FinAbGroup gamma, std::vector<Rational> weights,
                         std::vector<std::vector<int>> action);

// Gamma-invariant partition of the points of a system.
struct FactorPartition {
  std::vector<int> block_of;
  int n_blocks = 0;

  std::vector<std::vector<int>> blocks() const;
};

FactorPartition make_partition(const FiniteSystem& x, std::vector<int> block_of);
bool refines(const FactorPartition& fine, const FactorPartition& coarse);

struct ObservableC {
  std::vector<std::complex<double>> values;
};

// Rotation of Z through phi: gamma -> Z.  Default weights are uniform;
// custom weights must be invariant under the action.
FiniteSystem make_rotational(const FinAbGroup& z, const GroupHom& phi,
                             const std::optional<std::vector<Rational>>& weights = {});

// Orbits of the action on positive-weight points; zero-weight points are
// singleton blocks.
FactorPartition invariant_factor(const FiniteSystem& x);

// Relatively independent product of x with itself over the factor p.
FiniteSystem rel_product(const FiniteSystem& x, const FactorPartition& p);

// Iterated parallelepiped system X^[k].  Points carry 2^k corner indices
// into x, ordered by the cube coordinate omega.
FiniteSystem cube_system(const FiniteSystem& x, int k, int cap = 3);

// k-th characteristic factor: components of the bipartite incidence between
// the first cube coordinate and the remaining ones on X^[k+1].
FactorPartition hkz_factor(const FiniteSystem& x, int k, int cap = 3);

struct KroneckerData {
  // one entry per (eigenvalue, orbit) pair that propagates consistently
  std::vector<std::pair<Character, ObservableC>> eigenfunctions;
  FactorPartition partition; // points indistinguishable by all eigenfunctions
};

KroneckerData kronecker_factor(const FiniteSystem& x);

// Host-Kra-Gowers seminorm of f of order k (uses X^[k]).
double gowers_norm(const FiniteSystem& x, const ObservableC& f, int k, int cap = 3);

// Weighted block averages of f over a partition; entries for zero-weight
// blocks are zero.
std::vector<std::complex<double>> block_averages(const FiniteSystem& x,
                                                 const FactorPartition& p,
                                                 const ObservableC& f);

// One subsystem per orbit of positive-weight points, weights renormalized.
std::vector<FiniteSystem> ergodic_components(const FiniteSystem& x);

// Unitary action given per gamma generator by a point permutation plus an
// exact phase table: (U^e f)(x) = e(phase[x]) f(perm^{-1} x).
struct UnitaryAction {
  std::vector<std::vector<int>> perms;
  std::vector<std::vector<CircleValue>> phases;
};

// Power iteration on the group-averaged projection built from the guess g;
// returns the top eigenvector, normalized so the first entry of magnitude
// above 1e-9 is positive real.  Throws NoGapError when the top of the
// spectrum is degenerate at tolerance tol.
ObservableC extract_joint_eigenfunction(const FiniteSystem& x, const UnitaryAction& u,
                                        const ObservableC& g, double tol);

} // namespace clab

#endif
