#ifndef DHDAE_STAIRCASE_HPP
#define DHDAE_STAIRCASE_HPP

#include "dhdae/matrix_core.hpp"
#include "dhdae/model.hpp"

#include <array>
#include <optional>

namespace dhdae {

/// Raised when a rank decision inside the staircase reduction is too close
/// to call: the transformed matrices fail their required zero patterns by
/// more than 100 * rank_tol * norm.
class RankAmbiguityError : public Error {
public:
  RankAmbiguityError(const std::string& what, double gap)
      : Error(what), offending_gap(gap) {}
  double offending_gap;
};

/// Unitary staircase form of a dHDAE triple. With P unitary and block
/// sizes (n1, .., n5), n4 = n1, the transformed matrices carry the zero
/// patterns
///   P^*EP: nonzero only in the leading (n1+n2) x (n1+n2) block (> 0),
///   P^*RP: nonzero only in the leading (n1+n2+n3) square, rows 4,5 zero,
///   P^*JP: rows/columns 4 couple only to block 1 (J41 invertible),
///          rows/columns 5 zero,
/// and J33 - R33 is invertible whenever block 3 is nonempty.
struct StaircaseForm {
  ComplexMatrix P;
  std::array<Index, 5> sizes{};
  ComplexMatrix Ehat, Jhat, Rhat;  // pattern-exact transformed matrices
  double pattern_residual = 0.0;   // worst entry cleaned to reach the pattern
  double rank_tol = kDefaultRankTol;

  Index n() const { return Ehat.rows(); }
  Index block_start(int b) const;
  /// View of block (i, j), i, j in 1..5, of one of the hat matrices.
  ComplexMatrix block(const ComplexMatrix& M, int i, int j) const;
};

StaircaseForm compute_staircase(const DhdaeSystem& sys,
                                double rank_tol = kDefaultRankTol);

struct Classification {
  bool regular = false;
  int index = 0;
};

/// Regularity and index from the block sizes: regular iff n5 = 0; index 0
/// when E is invertible, 1 when n1 = n4 = 0, and 2 otherwise.
Classification classify(const StaircaseForm& sc);

/// Eigenvalues of the Schur-complement pencil on block 2,
///   lambda E22 - (A22 - A23 A33^{-1} A32),  A = Jhat - Rhat,
/// which carry the finite spectrum. Empty when n2 = 0. Requires a regular
/// staircase.
std::vector<Complex> finite_spectrum(const StaircaseForm& sc);

/// Finite eigenvalues together with eigenvectors of the original pencil
/// (lifted through P). Also usable when the pencil is singular, in which
/// case the eigenpairs of the regular part are returned.
struct FiniteEigenSystem {
  std::vector<Complex> eigenvalues;
  ComplexMatrix eigenvectors;  // n x k, column j pairs with eigenvalues[j]
};

FiniteEigenSystem finite_eigensystem(const StaircaseForm& sc);

/// Outcome of the robust-asymptotic-stability check, together with the
/// distance bounds collected along the way (steps 1--4 of the check):
///   d_dae        lambda_min(E), 0 when E is singular,
///   d_sing_stack sigma_min([E; J; R]),
///   d_hi_lower   sigma_min(N(E)^*(J-R)N(E)),
///   d_r          lambda_min(N(E)^*RN(E)) when that matrix is nonsingular.
struct StabilityVerdict {
  bool regular = false;
  int index = 0;
  double spectral_abscissa = -std::numeric_limits<double>::infinity();
  bool cond_a = false;  // regular
  bool cond_b = false;  // index <= 1 and principal submatrices nonsingular
  bool cond_c = false;  // spectral abscissa negative
  bool principal_submatrix_ok = false;
  bool principal_check_exact = true;  // false above the enumeration cap
  std::optional<double> d_dae, d_sing_stack, d_hi_lower, d_r;
  std::array<Index, 5> staircase_sizes{};

  bool robustly_stable() const { return cond_a && cond_b && cond_c; }
};

StabilityVerdict verdict(const DhdaeSystem& sys,
                         double rank_tol = kDefaultRankTol);

/// Non-unitary diagnostic refinement: returns L, Z and the transformed
/// triple in which block 1 of E is diagonal positive and decoupled from
/// block 2, and the blocks (1,4)/(4,1) of J are -I/I with rows and columns
/// 4 otherwise clean. This exposes the index-2 substructure as n4 chains
/// of length two. Never used by the distance computations, which require
/// unitary transformations.
struct RefinedForm {
  ComplexMatrix L, Z;
  std::array<Index, 5> sizes{};
  ComplexMatrix Et, Jt, Rt;
};

RefinedForm refined_form(const StaircaseForm& sc);

/// Real spectrum of det(omega * E - S) = 0 for Hermitian S and E >= 0,
/// with eigenvectors, computed through the staircase of the dH triple
/// (E, iS, 0). Used for the Lambda set of the pair (iE, J) with S = -iJ.
/// `pencil_singular` reports det identically zero; the common kernel then
/// consists of eigenvectors for every omega and is returned separately.
struct RealPencilEigs {
  std::vector<double> omegas;
  ComplexMatrix eigenvectors;  // paired with omegas
  bool pencil_singular = false;
  ComplexMatrix common_kernel;  // n x k, empty when regular
};

RealPencilEigs hermitian_pencil_real_eigs(const ComplexMatrix& E,
                                          const ComplexMatrix& S,
                                          double rank_tol = kDefaultRankTol);

}  // namespace dhdae

#endif
