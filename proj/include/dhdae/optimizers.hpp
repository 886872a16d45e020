#ifndef DHDAE_OPTIMIZERS_HPP
#define DHDAE_OPTIMIZERS_HPP

#include "dhdae/matrix_core.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace dhdae {

/// Shared optimizer knobs. Every tolerance used by the three engines lives
/// here so runs are reproducible from a single config value.
struct OptConfig {
  int max_iter = 500;
  int multistarts = 10;
  std::uint64_t seed = 0x5eedULL;
  double golden_rel_width = 1e-10;   // omega refinement width, relative
  double shift_growth = 2.0;         // SCF level-shift growth factor
  int penalty_rounds = 12;           // quadratic-penalty doubling rounds
  double grid_lo = 1e-3;             // omega grid decade span
  double grid_hi = 1e3;
  int grid_per_side = 32;            // log-spaced points per sign
  double subgrad_tol = 1e-8;         // lambda-max descent stop
  double f_decrease_tol = 1e-12;
};

/// Minimization of  x*H1x/x*x + sum_i (x*H2_i x / x*H3_i x)^2  on the unit
/// sphere, for Hermitian PSD coefficient matrices. A quotient with both
/// forms vanishing is 0 under the 0/0 convention; with zero_over_zero off,
/// iterates whose H3 form vanishes are rejected instead (used to restrict
/// the search away from kernels).
struct RayleighSumProblem {
  ComplexMatrix H1;
  std::vector<std::pair<ComplexMatrix, ComplexMatrix>> quotients;
  bool zero_over_zero = true;
  double kernel_tol = 1e-12;
};

struct OptResult {
  double value = std::numeric_limits<double>::infinity();
  ComplexVector minimizer;    // sphere problems
  double t1 = 0.0, t2 = 0.0;  // two-parameter problems
  double omega = 0.0;         // one-dimensional problems
  int iterations = 0;
  bool converged = false;
  bool heuristic = false;  // best-effort global search, not certified
  std::vector<std::pair<std::string, double>> multistart_log;
};

/// Level-shifted SCF iteration on the stationarity eigenproblem
///   (H1 + sum_i (2 q_i / x*H3_i x)(H2_i - q_i H3_i)) x = mu x,
/// with multistarts from eigenvectors of H1, of sum(H2 - H3), and random
/// unit vectors; falls back to projected gradient descent on the sphere
/// when the SCF stalls.
OptResult minimize_rayleigh_sum(const RayleighSumProblem& p,
                                const OptConfig& cfg = {});

/// Global minimum of the convex map (t1, t2) -> lambda_max(G + t1 H1 + t2 H2)
/// for Hermitian G, H1, H2. Requires every nonzero real combination of H1
/// and H2 to be indefinite (checked on a 32-point unit circle; vanishing
/// H1 or H2 reduces to the corresponding lower-dimensional problem).
/// Subgradient descent with a compass-search polish at kinks.
OptResult minimize_lambda_max_2d(const ComplexMatrix& G,
                                 const ComplexMatrix& H1,
                                 const ComplexMatrix& H2,
                                 const OptConfig& cfg = {});

/// Derivative-free 1-D minimization over omega: the caller's seeds plus a
/// symmetric log-spaced grid and 0, each refined by golden section. Always
/// flagged heuristic (best effort, no global certificate).
OptResult minimize_over_omega(const std::function<double(double)>& f,
                              const std::vector<double>& seeds,
                              const OptConfig& cfg = {});

}  // namespace dhdae

#endif
