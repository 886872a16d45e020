#include "dhdae/distance_hi.hpp"

#include "dhdae/mappings.hpp"
#include "dhdae/staircase.hpp"

#include <Eigen/Eigenvalues>

namespace dhdae {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_robustly_stable(const DhdaeSystem& sys, double rank_tol,
                             const char* who) {
  if (!verdict(sys, rank_tol).robustly_stable())
    throw PreconditionError(std::string(who) +
                            ": the system must be robustly asymptotically "
                            "stable");
}

/// Inner mapping problem on an orthonormal kernel basis Nk: the squared
/// cost mu of driving Nk^*(J + dJ - R - dR)Nk singular, plus a minimizer.
struct InnerResult {
  double mu = kInf;       // squared (dJ, dR) cost
  ComplexVector x;        // compressed coordinates (dim = cols of Nk)
};

InnerResult inner_mu(const ComplexMatrix& Nk, const DhdaeSystem& sys,
                     SetTag set_tag, const OptConfig& cfg) {
  InnerResult out;
  const Index r = Nk.cols();
  if (r == 0) return out;
  const ComplexMatrix Jc = Nk.adjoint() * sys.J * Nk;
  const ComplexMatrix Rc = hermitian_part(Nk.adjoint() * sys.R * Nk);
  const ComplexMatrix H_J = hermitian_part(Jc.adjoint() * Jc);
  if (is_decrease_set(set_tag)) {
    RayleighSumProblem prob;
    prob.H1 = H_J;
    prob.quotients.emplace_back(hermitian_part(Rc * Rc), Rc);
    const OptResult res = minimize_rayleigh_sum(prob, cfg);
    out.mu = res.value;
    out.x = res.minimizer;
  } else {
    // Both terms quadratic: closed-form lambda_min, cross-checked against
    // the sphere optimizer.
    const ComplexMatrix H = hermitian_part(H_J + Rc * Rc);
    const auto eig = hermitian_eig(H);
    out.mu = std::max(0.0, eig.eigenvalues(0));
    out.x = eig.eigenvectors.col(0);
    RayleighSumProblem prob;
    prob.H1 = H;
    const OptResult res = minimize_rayleigh_sum(prob, cfg);
    if (std::abs(res.value - out.mu) > 1e-8 * (1.0 + std::abs(out.mu)))
      throw Error("dist_hi: optimizer disagrees with the closed form");
  }
  return out;
}

std::optional<PerturbationTriple> hi_witness(const ComplexMatrix& Nk,
                                             const DhdaeSystem& sys,
                                             SetTag set_tag,
                                             const ComplexVector& x,
                                             const ComplexMatrix& dE) {
  const MappingResult mJ =
      pseudoinverse_consistent_map(Nk, sys.J, x, MapStructure::Skew);
  const MappingResult mR = pseudoinverse_consistent_map(
      Nk, sys.R, x,
      is_decrease_set(set_tag) ? MapStructure::PsdNeg
                               : MapStructure::Hermitian);
  if (!mJ.feasible || !mR.feasible) return std::nullopt;
  try {
    return make_perturbation(dE, mJ.matrix, mR.matrix, set_tag);
  } catch (const StructureError&) {
    return std::nullopt;
  }
}

bool verify_index_two(const DhdaeSystem& sys, const PerturbationTriple& p,
                      double value, double rank_tol) {
  try {
    const DhdaeSystem pert = apply_perturbation(sys, p, 1e-8);
    const StaircaseForm sc = compute_staircase(pert, rank_tol);
    if (sc.sizes[3] == 0) return false;
  } catch (const Error&) {
    return false;
  }
  return std::abs(p.norm - value) <= 1e-8 * (1.0 + value);
}

}  // namespace

HiDistanceReport dist_hi_jr(const DhdaeSystem& sys, SetTag set_tag,
                            double rank_tol, const OptConfig& cfg) {
  require_robustly_stable(sys, rank_tol, "dist_hi_jr");
  const SetTag tag = is_decrease_set(set_tag) ? SetTag::SdJR : SetTag::SiJR;
  HiDistanceReport rep;
  rep.scope = Scope::JR;
  rep.set_tag = tag;

  const ComplexMatrix N = nullspace_basis(sys.E, rank_tol);
  if (N.cols() == 0) {
    rep.value = kInf;
    rep.bound_kind = BoundKind::Exact;
    rep.note = "E is positive definite; with dE = 0 the index stays 0";
    return rep;
  }
  const InnerResult inner = inner_mu(N, sys, tag, cfg);
  rep.value = std::sqrt(inner.mu);
  rep.bound_kind = BoundKind::Exact;
  if (auto w = hi_witness(N, sys, tag, inner.x,
                          ComplexMatrix::Zero(sys.n, sys.n))) {
    rep.witness = *w;
    rep.witness_verified = verify_index_two(sys, *w, rep.value, rank_tol);
  }
  return rep;
}

HiDistanceReport dist_hi_full(const DhdaeSystem& sys, SetTag set_tag,
                              double rank_tol, const OptConfig& cfg) {
  require_robustly_stable(sys, rank_tol, "dist_hi_full");
  const SetTag tag = is_decrease_set(set_tag) ? SetTag::Sd : SetTag::Si;
  HiDistanceReport rep;
  rep.scope = Scope::Full;
  rep.set_tag = tag;
  rep.bound_kind = BoundKind::Upper;
  rep.note =
      "two-stage bound; no tightness statement is available for it";

  const auto eigE = hermitian_eig(sys.E);
  const Index n = sys.n;
  double best = kInf;
  int k_star = 0;
  ComplexVector x_star;
  for (Index k = 1; k <= n; ++k) {
    const double cost = std::max(0.0, eigE.eigenvalues(k - 1));
    if (cost * cost >= best) break;  // eigenvalues ascend; nothing better left
    const ComplexMatrix Nk = eigE.eigenvectors.leftCols(k);
    const InnerResult inner = inner_mu(Nk, sys, tag, cfg);
    const double tot = cost * cost + inner.mu;
    if (tot < best) {
      best = tot;
      k_star = static_cast<int>(k);
      x_star = inner.x;
    }
  }
  rep.value = std::sqrt(best);
  rep.k_star = k_star;

  if (k_star > 0 && x_star.size()) {
    const ComplexMatrix Uk = eigE.eigenvectors.leftCols(k_star);
    RealVector trunc = eigE.eigenvalues.head(k_star).cwiseMax(0.0);
    const ComplexMatrix dE =
        hermitian_part(-(Uk * trunc.asDiagonal() * Uk.adjoint()));
    if (auto w = hi_witness(Uk, sys, tag, x_star, dE)) {
      rep.witness = *w;
      rep.witness_verified = verify_index_two(sys, *w, rep.value, rank_tol);
    }
  }
  return rep;
}

}  // namespace dhdae
