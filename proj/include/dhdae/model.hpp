#ifndef DHDAE_MODEL_HPP
#define DHDAE_MODEL_HPP

#include "dhdae/matrix_core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dhdae {

/// One violated structural invariant, with the size of the violation.
struct Violation {
  enum class Kind {
    NotHermitianE,
    NotHermitianR,
    NotSkewJ,
    NotPsdE,
    NotPsdR,
    SizeMismatch
  };
  Kind kind;
  double magnitude;
  std::string describe() const;
};

class StructureError : public Error {
public:
  StructureError(const std::string& what, std::vector<Violation> v)
      : Error(what), violations(std::move(v)) {}
  std::vector<Violation> violations;
};

class QSingularError : public Error {
public:
  using Error::Error;
};

/// A validated dissipative Hamiltonian triple: E = E^* >= 0, J = -J^*,
/// R = R^* >= 0, all n x n. The associated system is E x' = (J - R) x.
struct DhdaeSystem {
  Index n = 0;
  ComplexMatrix E, J, R;

  static DhdaeSystem validate(const ComplexMatrix& E, const ComplexMatrix& J,
                              const ComplexMatrix& R, double tol = 1e-12);

  /// Non-throwing structural check; empty result means valid.
  static std::vector<Violation> check(const ComplexMatrix& E,
                                      const ComplexMatrix& J,
                                      const ComplexMatrix& R,
                                      double tol = 1e-12);
};

/// The four-coefficient form E x' = (J - R) Q x with
/// E^*Q = Q^*E >= 0, Q^*JQ skew-Hermitian, Q^*RQ >= 0.
struct GeneralizedDhdae {
  Index n = 0;
  ComplexMatrix E, J, R, Q;

  static GeneralizedDhdae validate(const ComplexMatrix& E,
                                   const ComplexMatrix& J,
                                   const ComplexMatrix& R,
                                   const ComplexMatrix& Q, double tol = 1e-12);
};

/// Multiplies the state equation by Q^* from the left, removing the Q
/// factor: (Q^*E, Q^*JQ, Q^*RQ). Q must be invertible; rank-deficient Q
/// can make solutions grow without bound and is refused.
DhdaeSystem reduce_q(const GeneralizedDhdae& sys,
                     double rank_tol = kDefaultRankTol);

enum class SetTag { Sd, Si, SdJR, SiJR };

std::string to_string(SetTag tag);

/// True for the tags that restrict the perturbation to (J, R) only.
bool is_jr_scope(SetTag tag);

/// True for the semidefinite-decrease tags (dE <= 0, dR <= 0).
bool is_decrease_set(SetTag tag);

/// A structured perturbation (dE, dJ, dR) with its set tag and the triple
/// norm sqrt(||dE||^2 + ||dJ||^2 + ||dR||^2) in spectral norms.
struct PerturbationTriple {
  ComplexMatrix dE, dJ, dR;
  SetTag set_tag = SetTag::Si;
  double norm = 0.0;
};

/// Builds a PerturbationTriple, checking structural membership of the tag:
/// dJ skew-Hermitian, dE and dR Hermitian, dE <= 0 and dR <= 0 for Sd tags,
/// dE = 0 for the *JR tags. (Membership conditions involving the base
/// system, E + dE >= 0 and R + dR >= 0, are checked where a system is at
/// hand; see oracle.hpp.)
PerturbationTriple make_perturbation(const ComplexMatrix& dE,
                                     const ComplexMatrix& dJ,
                                     const ComplexMatrix& dR, SetTag tag,
                                     double tol = 1e-10);

/// Applies a perturbation and re-validates the result.
DhdaeSystem apply_perturbation(const DhdaeSystem& sys,
                               const PerturbationTriple& p,
                               double tol = 1e-8);

// --- Instance generators for the standard example families -------------

/// Damped mechanical system in first order form:
/// E = diag(M, K), J = [[0, -K], [K, 0]], R = diag(D, 0).
/// Requires M, D Hermitian >= 0 and K Hermitian > 0.
DhdaeSystem make_mechanical(const ComplexMatrix& M, const ComplexMatrix& D,
                            const ComplexMatrix& K);

/// Interior acoustic model; same block pattern as make_mechanical but M is
/// typically rank deficient, so E is singular.
DhdaeSystem make_car_acoustic(const ComplexMatrix& M, const ComplexMatrix& D,
                              const ComplexMatrix& K);

/// Discretized (in)compressible Stokes flow. The operator block A is split
/// into its skew part (into J) and its Hermitian part (negated, into R);
/// the stabilization C >= 0 enters dissipatively:
/// E = diag(Mv, Mp), J = [[skew(A), B], [-B^*, 0]], R = diag(-herm(A), C).
/// Requires Mv > 0, Mp >= 0, herm(A) <= 0, C >= 0, B of full column rank.
DhdaeSystem make_stokes(const ComplexMatrix& Mv, const ComplexMatrix& Mp,
                        const ComplexMatrix& A, const ComplexMatrix& B,
                        const ComplexMatrix& C);

/// First-order poroelasticity: E = diag(Y, A, M),
/// J = [[0, -A, D^*], [A, 0, 0], [-D, 0, 0]], R = diag(0, 0, K).
/// Requires Y >= 0, A > 0, M > 0 Hermitian, K >= 0, D arbitrary.
DhdaeSystem make_poroelastic(const ComplexMatrix& Y, const ComplexMatrix& A,
                             const ComplexMatrix& M, const ComplexMatrix& K,
                             const ComplexMatrix& D);

struct DcNetworkParams {
  double L = 1.0, C1 = 1.0, C2 = 1.0, RL = 1.0, RG = 1.0, RR = 1.0;
};

/// Fixed 5x5 DC power network: E = diag(L, C1, C2, 0, 0),
/// R = diag(RL, 0, 0, RG, RR) and the hard-wired interconnection J.
/// All parameters must be positive.
DhdaeSystem make_dc_network(const DcNetworkParams& p = {});

/// Lossy repair for near-structured data: Hermitian/skew projection plus
/// clipping of negative eigenvalues of E and R at zero.
DhdaeSystem project_to_structure(const ComplexMatrix& E, const ComplexMatrix& J,
                                 const ComplexMatrix& R, double tol = 1e-12);

enum class ExampleKind { Mechanical, Stokes, Poroelastic, CarAcoustic, DcNetwork };

/// Random admissible parameter draw for one of the example families;
/// `m` is the parameter block size (the system dimension is a small
/// multiple of it; ignored for the fixed-size DC network).
DhdaeSystem random_example(ExampleKind kind, Index m, std::uint64_t seed);

/// Dense random dHDAE: E and R are random PSD (rank deficient roughly half
/// the time when allow_singular is set), J random skew-Hermitian.
DhdaeSystem random_system(Index n, std::uint64_t seed,
                          bool allow_singular = true);

}  // namespace dhdae

#endif
