#include "clab/torus.hpp"

#include <cmath>

#include "clab/errors.hpp"
#include "clab/random.hpp"

namespace clab {

namespace {

double frac(double x) { return x - std::floor(x); }

double torus_dist(double x) {
  double f = frac(x);
  return std::min(f, 1.0 - f);
}

// frac(alpha * q) for integer q >= 0, exact in the binary representation of
// alpha: alpha = m * 2^e with m < 2^53, so alpha*q is an integer multiple of
// 2^e and the reduction mod 1 is a 128-bit remainder.
double frac_mul_exact(double alpha, long long q) {
  if (q == 0 || alpha == 0.0) return 0.0;
  bool negate = false;
  if (q < 0) { negate = true; q = -q; }
  int e;
  double mant = std::frexp(alpha, &e); // alpha = mant * 2^e, mant in [0.5, 1)
  long long m = (long long)std::ldexp(mant, 53);
  int shift = 53 - e; // alpha * q = (m * q) / 2^shift
  if (shift <= 0) return 0.0; // alpha * q is an integer
  __int128 prod = (__int128)m * q;
  if (shift >= 127) {
    double v = alpha * double(q);
    return negate ? frac(-v) : frac(v);
  }
  __int128 mod = (__int128)1 << shift;
  __int128 rem = prod & (mod - 1);
  double v = std::ldexp(double(rem), -shift);
  return negate ? frac(-v) : frac(v);
}

} // namespace

std::vector<std::array<double, 2>> skew_shift_orbit(const TorusParams& params,
                                                    long long n) {
  if (n < 0 || n > 10000000)
    throw PreconditionError("skew_shift_orbit: N must be in 0..1e7");
  std::vector<std::array<double, 2>> orbit;
  orbit.reserve(n);
  double z = 0.0, k = 0.0;
  const double alpha = params.alpha;
  for (long long i = 0; i < n; ++i) {
    orbit.push_back({z, k});
    k = frac(k + z + alpha); // rho_1(z) = z + alpha
    z = frac(z + 2.0 * alpha);
  }
  if (n <= 100000) {
    for (long long i = 0; i < n; ++i) {
      double cz = frac_mul_exact(alpha, 2 * i);
      double ck = frac_mul_exact(alpha, i * i);
      if (torus_dist(orbit[i][0] - cz) > 1e-9 || torus_dist(orbit[i][1] - ck) > 1e-9)
        throw InternalError("skew_shift_orbit: iterate deviates from the closed form "
                            "at step " + std::to_string(i));
    }
  }
  return orbit;
}

std::vector<WeylEntry> weyl_test(const std::vector<std::array<double, 2>>& points,
                                 int max_freq) {
  if (max_freq < 1) throw PreconditionError("weyl_test: max_freq must be >= 1");
  if (points.empty()) throw PreconditionError("weyl_test: empty orbit");
  const double two_pi = 8.0 * std::atan(1.0);
  std::vector<WeylEntry> out;
  for (int k1 = -max_freq; k1 <= max_freq; ++k1)
    for (int k2 = -max_freq; k2 <= max_freq; ++k2) {
      if (k1 == 0 && k2 == 0) continue;
      double re = 0.0, im = 0.0;
      for (const auto& p : points) {
        double t = two_pi * (k1 * p[0] + k2 * p[1]);
        re += std::cos(t);
        im += std::sin(t);
      }
      double n = double(points.size());
      out.push_back({{k1, k2}, std::sqrt(re * re + im * im) / n});
    }
  return out;
}

nlohmann::ordered_json verify_identity(const std::string& kind,
                                       const TorusParams& params, int samples,
                                       double tol, uint64_t seed) {
  if (tol < 1e-12) throw PreconditionError("verify_identity: tol must be >= 1e-12");
  Rng rng(seed);
  const double alpha = params.alpha;
  auto rho = [&](long long n, double z) { return frac(z * n + alpha * double(n) * n); };

  double max_residual = 0.0;
  nlohmann::ordered_json worst;
  for (int i = 0; i < samples; ++i) {
    long long n = (long long)rng.below(41) - 20;
    double residual = 0.0;
    if (kind == "cocycle-eq") {
      long long m = (long long)rng.below(41) - 20;
      double z = rng.real();
      double lhs = rho(m + n, z);
      double rhs = frac(rho(m, frac(z + 2.0 * alpha * n)) + rho(n, z));
      // the representative shift of the base point contributes m * (integer)
      residual = torus_dist(lhs - rhs);
      if (residual > max_residual) {
        max_residual = residual;
        worst = {{"kind", kind}, {"m", m}, {"n", n}, {"z", z}};
      }
      continue;
    }
    if (kind == "type-2") {
      double z = rng.real(), s1 = rng.real(), s2 = rng.real();
      double v = rho(n, z) - rho(n, frac(z + s1)) - rho(n, frac(z + s2)) +
                 rho(n, frac(z + s1 + s2));
      residual = torus_dist(v);
      if (residual > max_residual) {
        max_residual = residual;
        worst = {{"kind", kind}, {"n", n}, {"z", z}, {"s1", s1}, {"s2", s2}};
      }
      continue;
    }
    if (kind == "cl") {
      double z = rng.real(), u = rng.real();
      double v = rho(n, frac(z + u)) - rho(n, z) - frac(double(n) * u);
      residual = torus_dist(v);
      if (residual > max_residual) {
        max_residual = residual;
        worst = {{"kind", kind}, {"n", n}, {"z", z}, {"u", u}};
      }
      continue;
    }
    throw PreconditionError("verify_identity: unknown kind " + kind);
  }
  nlohmann::ordered_json rep;
  rep["kind"] = kind;
  rep["samples"] = samples;
  rep["max_residual"] = max_residual;
  rep["tolerance"] = tol;
  rep["pass"] = max_residual <= tol;
  rep["worst_sample"] = worst;
  if (max_residual > tol)
    throw InternalError("verify_identity: residual " + std::to_string(max_residual) +
                        " exceeds tolerance");
  return rep;
}

double heisenberg_cocycle(double alpha, double beta, long long n, double x, double y) {
  double fy = frac(y);
  double jump = fy + n * beta - frac(y + n * beta); // an integer
  double m = std::llround(jump);
  double v = 0.5 * double(n) * double(n - 1) * alpha * beta + n * alpha * fy -
             (x + n * alpha) * m;
  return frac(v);
}

nlohmann::ordered_json heisenberg_check(const TorusParams& params, int samples,
                                        double tol, uint64_t seed) {
  Rng rng(seed);
  const double alpha = params.alpha, beta = params.beta;
  double max_residual = 0.0;
  nlohmann::ordered_json worst;
  int done = 0;
  while (done < samples) {
    long long m = (long long)rng.below(41) - 20;
    long long n = (long long)rng.below(41) - 20;
    double x = rng.real(), y = rng.real();
    // stay away from the jumps of the fractional part
    if (torus_dist(y + n * beta) < 1e-12 || torus_dist(y + (m + n) * beta) < 1e-12)
      continue;
    double lhs = heisenberg_cocycle(alpha, beta, m + n, x, y);
    double rhs = frac(heisenberg_cocycle(alpha, beta, m, frac(x + n * alpha),
                                         frac(y + n * beta)) +
                      heisenberg_cocycle(alpha, beta, n, x, y));
    double residual = torus_dist(lhs - rhs);
    if (residual > max_residual) {
      max_residual = residual;
      worst = {{"m", m}, {"n", n}, {"x", x}, {"y", y}};
    }
    ++done;
  }
  nlohmann::ordered_json rep;
  rep["identity"] = "cocycle equation for the nilmanifold section cocycle";
  rep["samples"] = samples;
  rep["max_residual"] = max_residual;
  rep["tolerance"] = tol;
  rep["pass"] = max_residual <= tol;
  rep["worst_sample"] = worst;
  if (max_residual > tol)
    throw InternalError("heisenberg_check: residual exceeds tolerance");
  return rep;
}

nlohmann::ordered_json skew_law_check(int samples, uint64_t seed) {
  Rng rng(seed);
  // elements (u, theta, m) acting by (z, k) -> (z + u, k + theta + m z);
  // composing two actions gives theta'' = theta + theta' + m u'
  long long mismatches = 0;
  double max_gap = 0.0;
  for (int i = 0; i < samples; ++i) {
    double u2 = rng.real(), th1 = rng.real(), th2 = rng.real();
    long long m1 = (long long)rng.below(9) - 4;
    double generic = frac(th1 + th2 + m1 * u2);
    double u1 = rng.real();
    double displayed = frac(th1 + th2 + u1); // the displayed law adds u instead
    double gap = torus_dist(generic - displayed);
    if (gap > 1e-9) ++mismatches;
    max_gap = std::max(max_gap, gap);
  }
  nlohmann::ordered_json rep;
  rep["match"] = mismatches == 0;
  rep["mismatches"] = mismatches;
  rep["samples"] = samples;
  rep["max_gap"] = max_gap;
  rep["note"] = "displayed law adds u to the central coordinate where composition "
                "of the actions gives m u'; the derived law is used throughout";
  return rep;
}

} // namespace clab
