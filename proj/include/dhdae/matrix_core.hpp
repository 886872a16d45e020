#ifndef DHDAE_MATRIX_CORE_HPP
#define DHDAE_MATRIX_CORE_HPP

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace dhdae {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Default relative tolerance for numerical rank decisions.
inline constexpr double kDefaultRankTol = 1e-10;

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
  using Error::Error;
};

/// Raised when a pencil that must be regular turns out singular.
/// Carries a unit vector in the common kernel of the stacked coefficients.
class SingularPencilError : public Error {
public:
  SingularPencilError(const std::string& what, ComplexVector witness)
      : Error(what), kernel_witness(std::move(witness)) {}
  ComplexVector kernel_witness;
};

/// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
struct HermitianEig {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;
};

/// Singular value decomposition A = U * diag(singular_values) * V^*,
/// singular values nonincreasing.
struct Svd {
  ComplexMatrix U;
  RealVector singular_values;
  ComplexMatrix V;
};

/// (A + A^*)/2, exactly Hermitian entry by entry.
ComplexMatrix hermitian_part(const ComplexMatrix& A);

/// (A - A^*)/2, exactly skew-Hermitian entry by entry.
ComplexMatrix skew_part(const ComplexMatrix& A);

/// Max-abs residual of Hermitian symmetry, ||A - A^*||_max.
double hermitian_residual(const ComplexMatrix& A);

/// Max-abs residual of skew symmetry, ||A + A^*||_max.
double skew_residual(const ComplexMatrix& A);

/// True iff lambda_min(A) >= -tol * max(1, ||A||). Throws if A is not
/// Hermitian to the same tolerance.
bool is_psd(const ComplexMatrix& A, double tol = 1e-12);

/// Largest singular value.
double spectral_norm(const ComplexMatrix& A);

double sigma_min(const ComplexMatrix& A);

HermitianEig hermitian_eig(const ComplexMatrix& A);

Svd svd(const ComplexMatrix& A);

/// Orthonormal basis of { x : ||A x|| <= rank_tol * ||A|| * ||x|| }.
/// Returns an n x 0 matrix when A has full column rank and the identity
/// when A vanishes.
ComplexMatrix nullspace_basis(const ComplexMatrix& A,
                              double rank_tol = kDefaultRankTol);

/// Smallest singular value of the vertical stack of the given matrices.
/// All matrices must share their column count.
double stacked_sigma_min(const std::vector<ComplexMatrix>& mats);

ComplexMatrix vstack(const std::vector<ComplexMatrix>& mats);

/// Finite spectrum of the dH pencil lambda*E - A, where A = J - R splits
/// into skew and negated-Hermitian parts. Routed through the staircase
/// reduction (see staircase.hpp); no general QZ solver is used.
/// Throws SingularPencilError with a common-kernel witness if the pencil
/// is singular.
std::vector<Complex> pencil_finite_eigs(const ComplexMatrix& E,
                                        const ComplexMatrix& A,
                                        double rank_tol = kDefaultRankTol);

}  // namespace dhdae

#endif
