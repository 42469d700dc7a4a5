#ifndef CLAB_HOSTKRA_HPP
#define CLAB_HOSTKRA_HPP

#include <map>
#include <string>
#include <vector>

#include "clab/cocycle.hpp"

namespace clab {

// Pair (u, F): a base translation u together with a transfer function
// solving the Conze-Lesigne relation for that translation.
struct HKElement {
  int u = 0;                       // index of the translation in Z
  std::vector<long long> f;        // fiber element index per base point
};

// The group of all such pairs under (u,F)(u',F') = (u+u', F o V_{u'} + F'),
// fully enumerated under a size guard.
class HKGroup {
public:
  Cocycle rho;
  FinAbGroup z;
  std::vector<HKElement> elements; // sorted by (u, F table)
  int identity = -1;
  std::vector<int> g2;             // indices of (0, constant) elements
  std::vector<int> h;              // indices of (0, F) elements, the kernel of u

  int size() const { return int(elements.size()); }
  int mul(int a, int b) const;
  int inv(int a) const;
  int find(int u, const std::vector<long long>& f) const;
  // action on the extension: (u,F)(z,k) = (z+u, k+F(z))
  int act(int g, int point, long long fiber_size) const;

  // translation lookup shared with the solvers: point index of p + u
  std::vector<std::vector<int>> shift;

private:
  friend HKGroup host_kra_group(const Cocycle&, long long);
  std::map<std::pair<int, std::vector<long long>>, int> index_;
  // cached fiber arithmetic on element indices
  long long fiber_n_ = 1;
  std::vector<long long> fiber_add_, fiber_neg_;
  long long fadd(long long a, long long b) const { return fiber_add_[a * fiber_n_ + b]; }
  long long fneg(long long a) const { return fiber_neg_[a]; }
};

// Enumerates the full Host-Kra group of a cocycle over a rotational base.
// The guard limits |Z| times the per-translation solution-coset size; the
// default of 10^6 can be overridden (CLAB_MAX_ENUM in the CLI).
HKGroup host_kra_group(const Cocycle& rho, long long max_enum = 1000000);

struct StructureReport {
  long long order = 0;
  long long g2_order = 0;
  long long h_order = 0;
  long long z_order = 0;
  long long commutator_order = 0;
  long long center_order = 0;
  bool commutators_in_g2 = false;
  bool g2_central = false;
  bool short_exact_ok = false;     // |G| = |H| * |Z| and the projection is onto
  bool commutator_formula_ok = false;
  std::vector<int> commutator_subgroup; // element indices
};

// Commutator and centrality structure, with every commutator checked
// against the closed-form (0, (d_{u'}F - d_{u}F') o V_{-u-u'}) identity.
StructureReport structure_report(const HKGroup& g);

struct TranslationalCertificate {
  std::vector<int> lambda;     // stabilizer element indices
  std::vector<int> point_of;   // g index -> g . x0
  long long lambda_order = 0;
  bool lambda_abelian = false;
  bool lambda_meets_g2_trivially = false;
  bool coset_bijection_ok = false;
};

// Verifies transitivity of the group action on the extension and computes
// the stabilizer certificate at x0.
TranslationalCertificate translational_certificate(const HKGroup& g,
                                                   const FiniteSystem& x, int x0);

// Abstract finite group given by its Cayley table.
struct FiniteGroupTable {
  int n = 0;
  std::vector<int> mul; // row-major n x n
  int identity = -1;
  std::vector<int> inv;

  int at(int a, int b) const { return mul[(size_t)a * n + b]; }
};

// Validates identity, inverses and associativity (full check for n <= 256,
// 10^4 sampled triples above).
FiniteGroupTable make_group_table(int n, std::vector<int> mul);

FiniteGroupTable group_table_of(const HKGroup& g);

struct ExtractionResult {
  FinAbGroup z;
  FinAbGroup k;
  Cocycle rho;                  // over the rotational system on z, into k
  CLWitness witness;
  std::vector<int> z_of_element;    // group element -> index in z
  std::vector<long long> k_of_element; // -1 unless the element lies in G2
};

// Reads off the extension data of a translational system: Z = G/(G2*Lambda),
// K = G2, the section cocycle, and a verified Conze-Lesigne witness with
// c_{z0}(gamma) = -Pi([g_{z0}, phi(gamma)]).
ExtractionResult translational_to_extension(const FiniteGroupTable& g,
                                            const std::vector<int>& lambda,
                                            const std::vector<int>& g2,
                                            const FinAbGroup& gamma,
                                            const std::vector<int>& phi_images);

struct JoiningComponentReport {
  int component = -1;
  bool base_coset_ok = false;
  long long base_subgroup_order = 0;
  long long mackey_order = 0;
  long long hk_order = 0;
  bool certified = false;
  std::string note;
};

// Decomposes a joining of two extensions into ergodic components and pushes
// each through base-coset detection, Mackey reduction, Host-Kra group
// construction and the translational certificate.
std::vector<JoiningComponentReport> joining_good(const Cocycle& rho1,
                                                 const Cocycle& rho2,
                                                 const FiniteSystem& joint);

} // namespace clab

#endif
