#ifndef DHDAE_ORACLE_HPP
#define DHDAE_ORACLE_HPP

#include "dhdae/model.hpp"
#include "dhdae/report.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dhdae {

/// Which degeneracy a distance report claims to be nearest to.
enum class DegeneracyKind { ImaginaryAxis, Singular, HigherIndex };

/// Draws `count` random perturbation triples inside the given set with
/// triple norm at most `budget`. Semidefinite parts are clipped by scaling
/// so that E + dE >= 0 and R + dR >= 0 hold; every sample is re-validated
/// before it is returned.
std::vector<PerturbationTriple> sample_structured_perturbations(
    const DhdaeSystem& sys, SetTag set_tag, double budget, int count,
    std::uint64_t rng_seed);

struct CertificateRecord {
  bool pass = false;
  std::string detail;
  std::uint64_t rng_seed = 0;
  int samples = 0;
  std::optional<PerturbationTriple> counterexample;
};

/// Monte-Carlo certificate for a distance value: no sampled perturbation
/// of norm value*(1 - 1e-3) may trigger the claimed degeneracy, and the
/// witness (when given) must trigger it.
CertificateRecord certify_distance(
    const DhdaeSystem& sys, DegeneracyKind kind, SetTag set_tag, double value,
    const std::optional<PerturbationTriple>& witness, int samples,
    std::uint64_t rng_seed, double rank_tol = kDefaultRankTol);

/// True when the perturbed system exhibits the degeneracy at desk
/// tolerances (axis eigenvalue within tol, stacked sigma_min below tol, or
/// staircase index 2).
bool triggers_degeneracy(const DhdaeSystem& perturbed, DegeneracyKind kind,
                         double tol, double rank_tol = kDefaultRankTol);

/// Dense omega-grid minimum of a scalar objective; the independent check
/// for the outer minimizations.
double grid_omega_oracle(const std::function<double(double)>& objective,
                         double lo, double hi, int points);

/// Finite eigenvalues of a general pencil lambda*E - A through the
/// characteristic polynomial: det evaluated on sample points, coefficient
/// interpolation, then companion-matrix roots. Independent of the
/// staircase path; desk scale only.
std::vector<Complex> pencil_eigs_by_determinant(const ComplexMatrix& E,
                                                const ComplexMatrix& A,
                                                double rank_tol = 1e-8);

/// Best objective value over `count` seeded random points on the unit
/// sphere (plus the coordinate axes); brute-force inner-minimization
/// estimate used by the grid oracles.
double sphere_sample_min(const std::function<double(const ComplexVector&)>& f,
                         Index dim, int count, std::uint64_t rng_seed);

}  // namespace dhdae

#endif
