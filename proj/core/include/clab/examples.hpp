#ifndef CLAB_EXAMPLES_HPP
#define CLAB_EXAMPLES_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "clab/cocycle.hpp"
#include "clab/hostkra.hpp"

namespace clab {

using json = nlohmann::ordered_json;

// Expected status for a claim at finite truncation.
struct ClaimExpectation {
  std::string id;     // "rho.i", "rho.ii", "rho.iii", "kroncalc", ...
  std::string status; // "verified-exact", "deviation-at-finite-truncation", ...
};

struct ExampleBundle {
  std::string name;
  json params;
  FinAbGroup z;
  FinAbGroup k;
  Cocycle rho;
  std::vector<ClaimExpectation> expected;
};

// Characteristic-two family: Gamma = Z = (Z/2)^n, K = Z/4,
// rho_gamma(z) = sum_m (-1)^{z_m} [gamma_m = 1].
ExampleBundle example_char2(int n);

// Odd-characteristic family: Gamma = Z = (Z/p)^n, phi(gamma) = 2 gamma,
// K = Z/p, rho_gamma(z) = sum_m z_m gamma_m + B(gamma, gamma).
ExampleBundle example_oddp(int p, int n);

// Bilinear-form family: Z = Hom(Gamma, U), action
// (gamma . z)(gamma') = z(gamma') + 2B(gamma, gamma'),
// rho_gamma(z) = B(gamma, gamma) + z(gamma).
// b[i][j] is the value of the form on the (i, j) generator pair.
ExampleBundle example_bilinear(const FinAbGroup& gamma, const FinAbGroup& u,
                               const std::vector<std::vector<GroupElement>>& b);

// Numeric check of the half-fractional-part identity on the circle with a
// cyclic coefficient group of order two.
json example_tdk(uint64_t seed = 0, int samples = 10000);

// Runs the full claim suite on a bundle and reports per-claim status.
json verify_paper_claims(const ExampleBundle& b);

} // namespace clab

#endif
