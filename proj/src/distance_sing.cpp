#include "dhdae/distance_sing.hpp"

#include "dhdae/mappings.hpp"

#include <Eigen/Eigenvalues>

namespace dhdae {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double scale_of(const DhdaeSystem& sys) {
  return std::max({1.0, spectral_norm(sys.E), spectral_norm(sys.J),
                   spectral_norm(sys.R)});
}

bool positive_definite(const ComplexMatrix& A, double rank_tol) {
  if (A.rows() == 0) return false;
  const auto eig = hermitian_eig(hermitian_part(A));
  return eig.eigenvalues(0) >
         rank_tol * std::max(1.0, std::abs(eig.eigenvalues(A.rows() - 1)));
}

/// Minimal structured triple annihilating (E, J, R) at x. The dE/dR parts
/// use the negative-semidefinite annihilator for the decrease sets and the
/// minimal Hermitian mapping otherwise; dJ is always the minimal skew map.
std::optional<PerturbationTriple> kernel_witness(const DhdaeSystem& sys,
                                                 const ComplexVector& x,
                                                 SetTag tag) {
  const Index n = sys.n;
  ComplexMatrix dE = ComplexMatrix::Zero(n, n);
  ComplexMatrix dR = ComplexMatrix::Zero(n, n);
  const bool decrease = is_decrease_set(tag);
  if (!is_jr_scope(tag)) {
    const MappingResult mE =
        decrease ? min_neg_semidef_annihilator(sys.E, x)
                 : min_hermitian_map(x, ComplexVector(-sys.E * x));
    if (!mE.feasible) return std::nullopt;
    dE = mE.matrix;
  }
  const MappingResult mJ = min_skew_map(x, ComplexVector(-sys.J * x));
  if (!mJ.feasible) return std::nullopt;
  const MappingResult mR =
      decrease ? min_neg_semidef_annihilator(sys.R, x)
               : min_hermitian_map(x, ComplexVector(-sys.R * x));
  if (!mR.feasible) return std::nullopt;
  try {
    return make_perturbation(dE, mJ.matrix, mR.matrix, tag);
  } catch (const StructureError&) {
    return std::nullopt;
  }
}

bool verify_common_kernel(const DhdaeSystem& sys, const PerturbationTriple& p,
                          const ComplexVector& x, double scale) {
  const double tol = 1e-8 * scale * x.norm();
  if (((sys.E + p.dE) * x).norm() > tol) return false;
  if (((sys.J + p.dJ) * x).norm() > tol) return false;
  if (((sys.R + p.dR) * x).norm() > tol) return false;
  try {
    apply_perturbation(sys, p, 1e-8);
  } catch (const StructureError&) {
    return false;
  }
  return true;
}

/// Kernel-restricted Sd branch: distance to a common kernel vector inside
/// ker(F) when only the other two coefficients pay. H1 carries the skew
/// term ||J N x||^2 and the quotient pair the PSD coefficient P.
struct BranchResult {
  double squared = kInf;
  ComplexVector x;
};

BranchResult sd_kernel_branch(const ComplexMatrix& Nbasis,
                              const ComplexMatrix& J, const ComplexMatrix& P,
                              const OptConfig& cfg) {
  BranchResult out;
  if (Nbasis.cols() == 0) return out;
  const ComplexMatrix JN = J * Nbasis;
  const ComplexMatrix PN = P * Nbasis;
  RayleighSumProblem prob;
  prob.H1 = hermitian_part(JN.adjoint() * JN);
  prob.quotients.emplace_back(hermitian_part(PN.adjoint() * PN),
                              hermitian_part(Nbasis.adjoint() * PN));
  const OptResult r = minimize_rayleigh_sum(prob, cfg);
  out.squared = r.value;
  out.x = (Nbasis * r.minimizer).normalized();
  return out;
}

}  // namespace

SingDistanceReport dist_sing_unstructured(const DhdaeSystem& sys,
                                          double rank_tol) {
  const ComplexMatrix G = hermitian_part(
      sys.E * sys.E + sys.J.adjoint() * sys.J + sys.R * sys.R);
  const auto eig = hermitian_eig(G);
  const double lam = std::max(0.0, eig.eigenvalues(0));
  SingDistanceReport rep;
  rep.value = std::sqrt(lam);
  rep.bound_kind = BoundKind::Exact;
  rep.scope = Scope::Full;

  const double stack = stacked_sigma_min({sys.E, sys.J, sys.R});
  if (std::abs(stack - rep.value) > 1e-8 * std::max(1.0, rep.value))
    throw Error("dist_sing_unstructured: Gram identity violated");

  const ComplexVector x = eig.eigenvectors.col(0);
  rep.kernel_vector = x;
  if (auto w = kernel_witness(sys, x, SetTag::Si)) {
    rep.witness = *w;
    rep.witness_verified = verify_common_kernel(sys, *w, x, scale_of(sys));
  }
  (void)rank_tol;
  return rep;
}

SingDistanceReport dist_sing_full(const DhdaeSystem& sys, SetTag set_tag,
                                  double rank_tol, const OptConfig& cfg) {
  if (is_jr_scope(set_tag))
    throw Error("dist_sing_full: use the Sd/Si tags; scope is implied");
  SingDistanceReport rep;
  rep.scope = Scope::Full;
  rep.set_tag = set_tag;

  if (set_tag == SetTag::Si) {
    SingDistanceReport base = dist_sing_unstructured(sys, rank_tol);
    rep.value = base.value;
    rep.kernel_vector = base.kernel_vector;
    const bool equality_branch = positive_definite(sys.E, rank_tol) &&
                                 positive_definite(sys.R, rank_tol);
    rep.bound_kind = equality_branch ? BoundKind::Exact : BoundKind::Lower;
    if (base.kernel_vector) {
      if (auto w = kernel_witness(sys, *base.kernel_vector, SetTag::Si)) {
        rep.witness = *w;
        rep.witness_verified = verify_common_kernel(
            sys, *w, *base.kernel_vector, scale_of(sys));
      }
    }
    return rep;
  }

  // Sd: minimum of the ker(E) branch, the ker(R) branch, and the
  // three-term minimization away from both kernels.
  const ComplexMatrix NE = nullspace_basis(sys.E, rank_tol);
  const ComplexMatrix NR = nullspace_basis(sys.R, rank_tol);
  BranchResult bE = sd_kernel_branch(NE, sys.J, sys.R, cfg);
  BranchResult bR = sd_kernel_branch(NR, sys.J, sys.E, cfg);
  BranchResult bM;
  {
    RayleighSumProblem prob;
    prob.H1 = hermitian_part(sys.J.adjoint() * sys.J);
    prob.quotients.emplace_back(hermitian_part(sys.R * sys.R), sys.R);
    prob.quotients.emplace_back(hermitian_part(sys.E * sys.E), sys.E);
    prob.zero_over_zero = false;  // restrict to ker(R)^c cap ker(E)^c
    prob.kernel_tol = rank_tol;
    try {
      const OptResult r = minimize_rayleigh_sum(prob, cfg);
      bM.squared = r.value;
      bM.x = r.minimizer;
    } catch (const Error&) {
      // The admissible set M3 is empty; the branch contributes nothing.
    }
  }

  const BranchResult* win = &bE;
  if (bR.squared < win->squared) win = &bR;
  if (bM.squared < win->squared) win = &bM;
  rep.value = std::sqrt(win->squared);
  rep.bound_kind = BoundKind::Exact;
  if (win->x.size()) {
    rep.kernel_vector = win->x;
    if (auto w = kernel_witness(sys, win->x, SetTag::Sd)) {
      rep.witness = *w;
      rep.witness_verified =
          verify_common_kernel(sys, *w, win->x, scale_of(sys));
    }
  }
  return rep;
}

SingDistanceReport dist_sing_jr(const DhdaeSystem& sys, SetTag set_tag,
                                double rank_tol, const OptConfig& cfg) {
  const SetTag tag = (set_tag == SetTag::Sd || set_tag == SetTag::SdJR)
                         ? SetTag::SdJR
                         : SetTag::SiJR;
  SingDistanceReport rep;
  rep.scope = Scope::JR;
  rep.set_tag = tag;

  if (positive_definite(sys.E, rank_tol)) {
    rep.value = kInf;
    rep.bound_kind = BoundKind::Exact;
    return rep;
  }
  const ComplexMatrix N = nullspace_basis(sys.E, rank_tol);

  ComplexVector x;
  if (tag == SetTag::SdJR) {
    const BranchResult b = sd_kernel_branch(N, sys.J, sys.R, cfg);
    rep.value = std::sqrt(b.squared);
    rep.bound_kind = BoundKind::Exact;
    x = b.x;
  } else {
    const ComplexMatrix JN = sys.J * N;
    const ComplexMatrix RN = sys.R * N;
    const auto eig = hermitian_eig(
        hermitian_part(JN.adjoint() * JN + RN.adjoint() * RN));
    rep.value = std::sqrt(std::max(0.0, eig.eigenvalues(0)));
    rep.bound_kind = positive_definite(sys.R, rank_tol) ? BoundKind::Exact
                                                        : BoundKind::Lower;
    x = (N * eig.eigenvectors.col(0)).normalized();
  }
  if (x.size()) {
    rep.kernel_vector = x;
    if (auto w = kernel_witness(sys, x, tag)) {
      rep.witness = *w;
      rep.witness_verified = verify_common_kernel(sys, *w, x, scale_of(sys));
    }
  }
  return rep;
}

}  // namespace dhdae
