#ifndef DHDAE_MAPPINGS_HPP
#define DHDAE_MAPPINGS_HPP

#include "dhdae/matrix_core.hpp"

#include <optional>
#include <string>

namespace dhdae {

/// Result of a minimal-spectral-norm structured mapping problem H x = y.
/// `feasible` reports whether the structure admits any solution; when it
/// does, `matrix` attains the minimum and `norm` is its closed-form value.
/// `marginal` marks feasibility decisions within rounding distance of the
/// cutoff, which are accepted rather than silently flipped.
struct MappingResult {
  ComplexMatrix matrix;
  double norm = 0.0;
  bool feasible = false;
  bool marginal = false;
  std::string infeasibility_reason;
};

/// Relative tolerance deciding the exact feasibility conditions
/// Im(x^*y) = 0 (Hermitian) and Re(x^*y) = 0 (skew-Hermitian).
inline constexpr double kFeasibilityTol = 1e-12;

/// Minimal-norm Hermitian H with H x = y; feasible iff Im(x^*y) = 0.
/// The norm is ||y||/||x||.
MappingResult min_hermitian_map(const ComplexVector& x, const ComplexVector& y);

/// Minimal-norm skew-Hermitian S with S x = y; feasible iff Re(x^*y) = 0.
MappingResult min_skew_map(const ComplexVector& x, const ComplexVector& y);

/// Minimal-norm Hermitian positive semidefinite H with H x = y; feasible
/// iff x^*y > 0 (or y = 0, in which case H = 0 under the 0/0 convention).
/// The minimum ||y||^2 / (x^*y) is attained by the rank-one y y^*/(x^*y).
MappingResult min_psd_map(const ComplexVector& x, const ComplexVector& y);

/// For Hermitian R >= 0 returns the minimal-norm dR <= 0 with
/// (R + dR) x = 0 and R + dR >= 0, namely -(Rx)(Rx)^*/(x^*Rx); its norm is
/// ||Rx||^2/(x^*Rx), and dR = 0 when R x = 0. Always feasible.
MappingResult min_neg_semidef_annihilator(const ComplexMatrix& R,
                                          const ComplexVector& x);

enum class MapStructure { Hermitian, Skew, PsdNeg };

/// Solves the consistency-reduced mapping problem arising from compressed
/// constraints N^* D N x = -N^* A N x: with orthonormal N the right-hand
/// side is y = -N (N^* A N x) at the input vector N x, and the problem is
/// dispatched to the structured solver selected by `structure`
/// (PsdNeg asks for D <= 0).
MappingResult pseudoinverse_consistent_map(const ComplexMatrix& N,
                                           const ComplexMatrix& A,
                                           const ComplexVector& x,
                                           MapStructure structure);

}  // namespace dhdae

#endif
