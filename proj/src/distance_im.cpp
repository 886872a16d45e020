#include "dhdae/distance_im.hpp"

#include "dhdae/mappings.hpp"
#include "dhdae/staircase.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <random>

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

double system_scale(const DhdaeSystem& sys) {
  return std::max({1.0, spectral_norm(sys.E), spectral_norm(sys.J),
                   spectral_norm(sys.R)});
}

std::vector<double> omega_seeds(const DhdaeSystem& sys, double rank_tol) {
  std::vector<double> seeds;
  const StaircaseForm sc = compute_staircase(sys, rank_tol);
  for (const Complex& lam : finite_eigensystem(sc).eigenvalues)
    seeds.push_back(lam.imag());
  const RealPencilEigs rp = hermitian_pencil_real_eigs(
      sys.E, Complex(0, -1) * sys.J, rank_tol);
  seeds.insert(seeds.end(), rp.omegas.begin(), rp.omegas.end());
  return seeds;
}

OptConfig light_config(const OptConfig& cfg) {
  OptConfig c = cfg;
  c.multistarts = std::min(cfg.multistarts, 4);
  c.max_iter = std::min(cfg.max_iter, 150);
  return c;
}

// ---- Lambda branch ------------------------------------------------------

struct LambdaGroup {
  double omega = 0.0;
  ComplexMatrix basis;  // orthonormal columns spanning the eigenspace
};

struct LambdaData {
  std::vector<LambdaGroup> groups;
  bool everywhere = false;  // det(i w E - J) vanishes identically
};

ComplexMatrix orthonormalize(const ComplexMatrix& B) {
  if (B.cols() == 0) return B;
  Eigen::HouseholderQR<ComplexMatrix> qr(B);
  ComplexMatrix Q = qr.householderQ() * ComplexMatrix::Identity(B.rows(), B.cols());
  return Q;
}

LambdaData collect_lambda(const DhdaeSystem& sys, double rank_tol) {
  LambdaData out;
  const RealPencilEigs rp = hermitian_pencil_real_eigs(
      sys.E, Complex(0, -1) * sys.J, rank_tol);
  out.everywhere = rp.pencil_singular;

  std::vector<std::pair<double, Index>> order;
  for (std::size_t i = 0; i < rp.omegas.size(); ++i)
    order.emplace_back(rp.omegas[i], static_cast<Index>(i));
  std::sort(order.begin(), order.end());

  const Index nker = rp.common_kernel.cols();
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    const double w0 = order[i].first;
    while (j < order.size() &&
           order[j].first - w0 <= 1e-8 * (1.0 + std::abs(w0)))
      ++j;
    ComplexMatrix B(sys.n, static_cast<Index>(j - i) + nker);
    for (std::size_t k = i; k < j; ++k)
      B.col(static_cast<Index>(k - i)) = rp.eigenvectors.col(order[k].second);
    if (nker > 0) B.rightCols(nker) = rp.common_kernel;
    LambdaGroup g;
    g.omega = w0;
    g.basis = orthonormalize(B);
    out.groups.push_back(std::move(g));
    i = j;
  }
  if (out.everywhere) {
    // The common kernel supplies eigenvectors for every omega.
    LambdaGroup g;
    g.omega = 0.0;
    g.basis = orthonormalize(rp.common_kernel);
    out.groups.push_back(std::move(g));
  }
  return out;
}

struct BranchCandidate {
  double sq = kInf;
  double omega = 0.0;
  ImBranch branch = ImBranch::Generic;
  ComplexVector x;        // Lambda witness vector
  ComplexVector vJ, vE;   // generic witness data
};

BranchCandidate lambda_branch(const DhdaeSystem& sys, SetTag tag,
                              const LambdaData& ld, const OptConfig& cfg) {
  BranchCandidate best;
  best.branch = ImBranch::Lambda;
  for (const auto& g : ld.groups) {
    if (g.basis.cols() == 0) continue;
    double sq = kInf;
    ComplexVector x;
    const ComplexMatrix RB = sys.R * g.basis;
    const ComplexMatrix R2 = hermitian_part(RB.adjoint() * RB);
    if (tag == SetTag::Si || tag == SetTag::SiJR) {
      const auto eig = hermitian_eig(R2);
      sq = std::max(0.0, eig.eigenvalues(0));
      x = (g.basis * eig.eigenvectors.col(0)).normalized();
    } else if (g.basis.cols() == 1) {
      x = g.basis.col(0);
      const ComplexVector Rx = sys.R * x;
      const double b = x.dot(Rx).real();
      const double a = Rx.squaredNorm();
      if (a <= 1e-24) {
        sq = 0.0;
      } else if (b > 0.0) {
        sq = (a / b) * (a / b);
      }
      // b = 0 with a > 0 cannot occur for PSD R.
    } else {
      RayleighSumProblem prob;
      prob.H1 = ComplexMatrix::Zero(g.basis.cols(), g.basis.cols());
      prob.quotients.emplace_back(R2,
                                  hermitian_part(g.basis.adjoint() * RB));
      prob.zero_over_zero = false;  // Rx = 0 contradicts robust stability
      try {
        const OptResult r = minimize_rayleigh_sum(prob, cfg);
        sq = r.value;
        x = (g.basis * r.minimizer).normalized();
      } catch (const Error&) {
        continue;
      }
    }
    if (sq < best.sq) {
      best.sq = sq;
      best.omega = g.omega;
      best.x = x;
    }
  }
  return best;
}

// ---- generic branch, Si: two-parameter lambda_max minimization ----------

double si_generic_value(const DhdaeSystem& sys, double omega, double rank_tol,
                        const OptConfig& cfg, OmegaMatrices* keep = nullptr,
                        ComplexVector* y_top = nullptr) {
  OmegaMatrices om;
  try {
    om = build_omega_matrices(sys, omega, rank_tol);
  } catch (const OmegaInLambdaError&) {
    return kInf;
  }
  OptResult r;
  try {
    r = minimize_lambda_max_2d(om.G, om.H1, om.H2, cfg);
  } catch (const Error&) {
    return kInf;
  }
  if (!(r.value > 1e-14)) return kInf;
  if (keep) *keep = om;
  if (y_top) {
    ComplexMatrix Mt = om.G + r.t1 * om.H1 + r.t2 * om.H2;
    const auto eig = hermitian_eig(hermitian_part(Mt));
    *y_top = eig.eigenvectors.col(Mt.rows() - 1);
  }
  return 1.0 / r.value;
}

// ---- generic branch, Sd: quadratic-penalty solve of the constrained u
//      problem from the bound display ------------------------------------

struct SdEval {
  double objective = kInf;
  double c1 = 0.0, c2 = 0.0;  // scaled equality-constraint residuals
};

SdEval sd_objective(const DhdaeSystem& sys, const ComplexMatrix& M,
                    double omega, const ComplexVector& u) {
  const Index n = sys.n;
  SdEval ev;
  const ComplexVector vJ = u.head(n), vE = u.tail(n);
  const ComplexVector v = vJ - Complex(0, 1) * omega * vE;
  const ComplexVector x = M * v;
  const double nx2 = x.squaredNorm();
  if (nx2 <= 1e-20 * u.squaredNorm()) return ev;

  double f = vJ.squaredNorm() / nx2;
  const ComplexVector Rx = sys.R * x;
  const double a = Rx.squaredNorm();
  const double b = x.dot(Rx).real();
  const double rscale = std::max(1.0, spectral_norm(sys.R));
  if (b > 1e-14 * rscale * nx2) {
    f += (a / b) * (a / b);
  } else if (a > 1e-14 * rscale * rscale * nx2) {
    return ev;  // Rx != 0 but x*Rx = 0 cannot be annihilated
  }
  const double ne2 = vE.squaredNorm();
  if (ne2 > 1e-20) {
    const Complex c = x.dot(vE);
    const double denom = std::abs(c.real());
    if (denom <= 1e-14 * std::sqrt(ne2 * nx2)) return ev;
    f += (ne2 / denom) * (ne2 / denom);
    ev.c2 = c.imag() / (std::sqrt(ne2 * nx2) + 1e-300);
  }
  const Complex d = vJ.dot(x);
  const double nj = vJ.norm();
  ev.c1 = (nj > 0) ? d.real() / (nj * std::sqrt(nx2) + 1e-300) : 0.0;
  ev.objective = f;
  return ev;
}

struct SdSolve {
  double value = kInf;
  ComplexVector u;
};

SdSolve sd_generic_solve(const DhdaeSystem& sys, double omega, double rank_tol,
                         const OptConfig& cfg, bool thorough) {
  SdSolve out;
  const Index n = sys.n;
  const ComplexMatrix iwEJ =
      Complex(0, 1) * omega * sys.E - sys.J;
  if (sigma_min(iwEJ) <= rank_tol * std::max(1.0, system_scale(sys)))
    return out;
  const ComplexMatrix M = iwEJ.partialPivLu().solve(
      ComplexMatrix::Identity(n, n));

  // Start from the best dE = 0 point: vJ = (i w E - J)x for the minimizer x
  // of the partial objective, vE = 0. It is feasible by skewness.
  std::vector<ComplexVector> starts;
  {
    RayleighSumProblem prob;
    prob.H1 = hermitian_part(iwEJ.adjoint() * iwEJ);
    prob.quotients.emplace_back(hermitian_part(sys.R * sys.R), sys.R);
    OptConfig lc = light_config(cfg);
    const OptResult r = minimize_rayleigh_sum(prob, lc);
    ComplexVector u0 = ComplexVector::Zero(2 * n);
    u0.head(n) = iwEJ * r.minimizer;
    if (u0.norm() > 0) starts.push_back(u0.normalized());
  }
  std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss;
  const int extra = thorough ? 3 : 1;
  for (int s = 0; s < extra; ++s) {
    ComplexVector u(2 * n);
    for (Index i = 0; i < 2 * n; ++i) u(i) = Complex(gauss(rng), gauss(rng));
    starts.push_back(u.normalized());
  }

  auto penalized = [&](const ComplexVector& u, double rho) {
    const SdEval ev = sd_objective(sys, M, omega, u);
    if (!std::isfinite(ev.objective)) return kInf;
    return ev.objective + rho * (ev.c1 * ev.c1 + ev.c2 * ev.c2);
  };
  const double feas_tol = 1e-6;
  const int iters = thorough ? 60 : 25;

  for (const ComplexVector& u0 : starts) {
    ComplexVector u = u0;
    double rho = 1.0;
    for (int round = 0; round < cfg.penalty_rounds; ++round, rho *= 2.0) {
      double fu = penalized(u, rho);
      for (int it = 0; it < iters; ++it) {
        // Numeric gradient over the real coordinates of u.
        ComplexVector g = ComplexVector::Zero(2 * n);
        const double h = 1e-6;
        for (Index k = 0; k < 2 * n; ++k) {
          for (int part = 0; part < 2; ++part) {
            const Complex delta = part == 0 ? Complex(h, 0) : Complex(0, h);
            ComplexVector up = u, um = u;
            up(k) += delta;
            um(k) -= delta;
            const double fp = penalized(up.normalized(), rho);
            const double fm = penalized(um.normalized(), rho);
            const double d =
                (std::isfinite(fp) && std::isfinite(fm)) ? (fp - fm) / (2 * h)
                                                         : 0.0;
            g(k) += part == 0 ? Complex(d, 0) : Complex(0, d);
          }
        }
        const double gn = g.norm();
        if (gn <= 1e-10 * (1.0 + std::abs(fu))) break;
        double alpha = 1.0 / std::max(1.0, gn);
        bool moved = false;
        for (int ls = 0; ls < 25; ++ls, alpha *= 0.5) {
          const ComplexVector un = (u - alpha * g).normalized();
          const double fn = penalized(un, rho);
          if (fn < fu - 1e-14 * (1.0 + std::abs(fu))) {
            u = un;
            fu = fn;
            moved = true;
            break;
          }
        }
        if (!moved) break;
      }
      const SdEval ev = sd_objective(sys, M, omega, u);
      if (std::isfinite(ev.objective) && std::abs(ev.c1) <= feas_tol &&
          std::abs(ev.c2) <= feas_tol && ev.objective < out.value) {
        out.value = ev.objective;
        out.u = u;
      }
    }
  }
  return out;
}

// ---- witness construction ----------------------------------------------

struct WitnessCheck {
  std::optional<PerturbationTriple> witness;
  bool verified = false;
  bool attains = false;
};

bool eigenvalue_hits_axis_at(const DhdaeSystem& pert, double omega,
                             double tol, double rank_tol) {
  try {
    const StaircaseForm sc = compute_staircase(pert, rank_tol);
    for (const Complex& lam : finite_eigensystem(sc).eigenvalues)
      if (std::abs(lam - Complex(0, omega)) <= tol) return true;
  } catch (const Error&) {
    return false;
  }
  return false;
}

WitnessCheck check_witness(const DhdaeSystem& sys, const ComplexMatrix& dE,
                           const ComplexMatrix& dJ, const ComplexMatrix& dR,
                           SetTag tag, const ComplexVector& x, double omega,
                           double value, double rank_tol) {
  WitnessCheck out;
  PerturbationTriple p;
  try {
    p = make_perturbation(dE, dJ, dR, tag, 1e-8);
  } catch (const StructureError&) {
    return out;
  }
  out.witness = p;
  const double scale = system_scale(sys);
  DhdaeSystem pert;
  try {
    pert = apply_perturbation(sys, p, 1e-8);
  } catch (const StructureError&) {
    return out;  // witness present but set membership fails
  }
  // Lemma-style residuals at the witness vector, then the actual spectrum.
  const double rtol = 1e-8 * scale * x.norm();
  const bool residuals_ok =
      ((pert.R) * x).norm() <= rtol &&
      ((Complex(0, 1) * omega * pert.E - pert.J) * x).norm() <= rtol;
  const bool axis = eigenvalue_hits_axis_at(pert, omega, 1e-6 * scale, rank_tol);
  out.verified = residuals_ok && axis;
  out.attains = out.verified && std::abs(p.norm - value) <= 1e-6 * (1.0 + value);
  return out;
}

}  // namespace

OmegaMatrices build_omega_matrices(const DhdaeSystem& sys, double omega,
                                   double rank_tol) {
  const Index n = sys.n;
  const ComplexMatrix iwEJ = Complex(0, 1) * omega * sys.E - sys.J;
  if (sigma_min(iwEJ) <= rank_tol * std::max(1.0, system_scale(sys)))
    throw OmegaInLambdaError(
        "build_omega_matrices: i*omega is an eigenvalue of (E, J); use the "
        "Lambda branch");
  OmegaMatrices om;
  om.M = iwEJ.partialPivLu().solve(ComplexMatrix::Identity(n, n));

  // The feasibility forms: the printed (1,2)/(2,1) blocks of the first one
  // are skew, so the Hermitian representative carries an extra factor i;
  // its zero set is unchanged.
  om.H1t.setZero(2 * n, 2 * n);
  om.H1t.topRightCorner(n, n) = Complex(0, -1) * om.M.adjoint();
  om.H1t.bottomLeftCorner(n, n) = Complex(0, 1) * om.M;
  om.H2t.setZero(2 * n, 2 * n);
  om.H2t.topRightCorner(n, n) = Complex(0, -omega) * om.M;
  om.H2t.bottomLeftCorner(n, n) = Complex(0, omega) * om.M.adjoint();

  ComplexMatrix Wc(2 * n, n);
  Wc.topRows(n) = ComplexMatrix::Identity(n, n);
  Wc.bottomRows(n) = Complex(0, 1) * omega * ComplexMatrix::Identity(n, n);
  const ComplexMatrix RM = sys.R * om.M;
  om.G1 = hermitian_part(Wc * (RM.adjoint() * RM) * Wc.adjoint()) +
          ComplexMatrix::Identity(2 * n, 2 * n);
  om.G2 = hermitian_part(Wc * (om.M.adjoint() * om.M) * Wc.adjoint());

  const auto eig = hermitian_eig(om.G1);
  if (eig.eigenvalues(0) <= 0)
    throw Error("build_omega_matrices: G1 is not positive definite");
  om.G1_inv_sqrt = eig.eigenvectors *
                   eig.eigenvalues.cwiseSqrt().cwiseInverse().asDiagonal() *
                   eig.eigenvectors.adjoint();
  om.G = hermitian_part(om.G1_inv_sqrt * om.G2 * om.G1_inv_sqrt);
  om.H1 = hermitian_part(om.G1_inv_sqrt * om.H1t * om.G1_inv_sqrt);
  om.H2 = hermitian_part(om.G1_inv_sqrt * om.H2t * om.G1_inv_sqrt);
  return om;
}

ImDistanceReport dist_im_full(const DhdaeSystem& sys, SetTag set_tag,
                              double rank_tol, const OptConfig& cfg) {
  if (is_jr_scope(set_tag))
    throw Error("dist_im_full: pass Sd or Si; scope is implied");
  require_robustly_stable(sys, rank_tol, "dist_im_full");

  ImDistanceReport rep;
  rep.scope = Scope::Full;
  rep.set_tag = set_tag;

  const LambdaData ld = collect_lambda(sys, rank_tol);
  BranchCandidate best = lambda_branch(sys, set_tag, ld, cfg);

  if (!ld.everywhere) {
    const std::vector<double> seeds = omega_seeds(sys, rank_tol);
    const OptConfig lc = light_config(cfg);
    BranchCandidate gen;
    gen.branch = ImBranch::Generic;
    if (set_tag == SetTag::Si) {
      auto f = [&](double w) {
        return si_generic_value(sys, w, rank_tol, lc);
      };
      const OptResult r = minimize_over_omega(f, seeds, cfg);
      if (std::isfinite(r.value)) {
        OmegaMatrices om;
        ComplexVector y;
        gen.sq = si_generic_value(sys, r.omega, rank_tol, cfg, &om, &y);
        gen.omega = r.omega;
        if (y.size()) {
          const ComplexVector u = om.G1_inv_sqrt * y;
          gen.vJ = u.head(sys.n);
          gen.vE = u.tail(sys.n);
          gen.x = om.M * (gen.vJ - Complex(0, 1) * r.omega * gen.vE);
        }
      }
    } else {
      OptConfig oc = cfg;
      oc.golden_rel_width = std::max(cfg.golden_rel_width, 1e-6);
      auto f = [&](double w) {
        return sd_generic_solve(sys, w, rank_tol, cfg, false).value;
      };
      const OptResult r = minimize_over_omega(f, seeds, oc);
      if (std::isfinite(r.value)) {
        const SdSolve full = sd_generic_solve(sys, r.omega, rank_tol, cfg, true);
        gen.sq = std::min(r.value, full.value);
        gen.omega = r.omega;
        if (full.u.size()) {
          const ComplexMatrix iwEJ =
              Complex(0, 1) * r.omega * sys.E - sys.J;
          gen.vJ = full.u.head(sys.n);
          gen.vE = full.u.tail(sys.n);
          gen.x = iwEJ.partialPivLu().solve(
              ComplexVector(gen.vJ - Complex(0, 1) * r.omega * gen.vE));
        }
      }
    }
    if (gen.sq < best.sq) best = gen;
  }

  if (!std::isfinite(best.sq))
    throw Error("dist_im_full: no candidate value could be computed");
  rep.value = std::sqrt(best.sq);
  rep.omega_star = best.omega;
  rep.branch = best.branch;

  // Witness reconstruction.
  const Index n = sys.n;
  if (best.branch == ImBranch::Lambda && best.x.size()) {
    const ComplexVector& x = best.x;
    ComplexMatrix dR;
    if (set_tag == SetTag::Sd) {
      dR = min_neg_semidef_annihilator(sys.R, x).matrix;
    } else {
      const MappingResult m = min_hermitian_map(x, ComplexVector(-sys.R * x));
      if (!m.feasible) return rep;
      dR = m.matrix;
    }
    const WitnessCheck wc = check_witness(
        sys, ComplexMatrix::Zero(n, n), ComplexMatrix::Zero(n, n), dR,
        set_tag, x, best.omega, rep.value, rank_tol);
    rep.witness = wc.witness;
    rep.witness_verified = wc.verified;
    rep.tight = wc.attains;
  } else if (best.x.size()) {
    ComplexVector x = best.x;
    const double nx2 = x.squaredNorm();
    if (nx2 > 0) {
      // First-order feasibility repair at fixed x.
      ComplexVector vJ = best.vJ - (x.dot(best.vJ).real() / nx2) * x;
      ComplexVector vE =
          best.vE - Complex(0, 1) * (x.dot(best.vE).imag() / nx2) * x;
      ComplexMatrix dE = ComplexMatrix::Zero(n, n);
      bool ok = true;
      if (vE.norm() > 1e-12) {
        if (set_tag == SetTag::Si) {
          const MappingResult m = min_hermitian_map(x, vE);
          ok = m.feasible;
          dE = m.matrix;
        } else {
          const Complex c = vE.dot(x);
          if (std::abs(c.real()) > 1e-14 * vE.norm() * x.norm())
            dE = (vE * vE.adjoint()) / c.real();
          else
            ok = false;
        }
      }
      const MappingResult mJ = min_skew_map(x, vJ);
      ComplexMatrix dR;
      if (set_tag == SetTag::Sd) {
        dR = min_neg_semidef_annihilator(sys.R, x).matrix;
      } else {
        const MappingResult m = min_hermitian_map(x, ComplexVector(-sys.R * x));
        ok = ok && m.feasible;
        dR = ok ? m.matrix : ComplexMatrix::Zero(n, n);
      }
      if (ok && mJ.feasible) {
        const WitnessCheck wc =
            check_witness(sys, hermitian_part(dE), mJ.matrix, dR, set_tag, x,
                          best.omega, rep.value, rank_tol);
        rep.witness = wc.witness;
        rep.witness_verified = wc.verified;
        rep.tight = wc.attains;
      }
    }
  }
  if (rep.tight) rep.bound_kind = BoundKind::Exact;
  return rep;
}

ImDistanceReport dist_im_jr(const DhdaeSystem& sys, SetTag set_tag,
                            double rank_tol, const OptConfig& cfg) {
  require_robustly_stable(sys, rank_tol, "dist_im_jr");
  const SetTag tag = is_decrease_set(set_tag) ? SetTag::SdJR : SetTag::SiJR;
  ImDistanceReport rep;
  rep.scope = Scope::JR;
  rep.set_tag = tag;

  const std::vector<double> seeds = omega_seeds(sys, rank_tol);
  const Index n = sys.n;
  double omega_star = 0.0;
  ComplexVector x;

  if (tag == SetTag::SdJR) {
    const OptConfig lc = light_config(cfg);
    auto inner = [&](double w, const OptConfig& c) {
      const ComplexMatrix iwEJ = Complex(0, 1) * w * sys.E - sys.J;
      RayleighSumProblem prob;
      prob.H1 = hermitian_part(iwEJ.adjoint() * iwEJ);
      prob.quotients.emplace_back(hermitian_part(sys.R * sys.R), sys.R);
      return minimize_rayleigh_sum(prob, c);
    };
    const OptResult outer = minimize_over_omega(
        [&](double w) { return inner(w, lc).value; }, seeds, cfg);
    const OptResult fin = inner(outer.omega, cfg);
    rep.value = std::sqrt(std::min(outer.value, fin.value));
    rep.bound_kind = BoundKind::Exact;
    omega_star = outer.omega;
    x = fin.minimizer;
  } else {
    auto f = [&](double w) {
      ComplexMatrix stack(2 * n, n);
      stack.topRows(n) = sys.R;
      stack.bottomRows(n) = Complex(0, 1) * w * sys.E - sys.J;
      return sigma_min(stack);
    };
    const OptResult outer = minimize_over_omega(f, seeds, cfg);
    rep.value = outer.value;
    omega_star = outer.omega;
    const bool rpd = [&] {
      const auto eig = hermitian_eig(sys.R);
      return eig.eigenvalues(0) >
             rank_tol * std::max(1.0, spectral_norm(sys.R));
    }();
    rep.bound_kind = rpd ? BoundKind::Exact : BoundKind::Lower;
    ComplexMatrix stack(2 * n, n);
    stack.topRows(n) = sys.R;
    stack.bottomRows(n) = Complex(0, 1) * omega_star * sys.E - sys.J;
    const Svd s = svd(stack);
    x = s.V.col(n - 1);
  }
  rep.omega_star = omega_star;
  rep.branch = ImBranch::Generic;

  if (x.size()) {
    const ComplexMatrix iwEJ = Complex(0, 1) * omega_star * sys.E - sys.J;
    const MappingResult mJ = min_skew_map(x, ComplexVector(iwEJ * x));
    ComplexMatrix dR;
    bool ok = mJ.feasible;
    if (tag == SetTag::SdJR) {
      dR = min_neg_semidef_annihilator(sys.R, x).matrix;
    } else {
      const MappingResult m = min_hermitian_map(x, ComplexVector(-sys.R * x));
      ok = ok && m.feasible;
      dR = ok ? m.matrix : ComplexMatrix::Zero(n, n);
    }
    if (ok) {
      const WitnessCheck wc =
          check_witness(sys, ComplexMatrix::Zero(n, n), mJ.matrix, dR, tag, x,
                        omega_star, rep.value, rank_tol);
      rep.witness = wc.witness;
      rep.witness_verified = wc.verified;
      rep.tight = wc.attains;
      if (rep.tight) rep.bound_kind = BoundKind::Exact;
    }
  }
  return rep;
}

}  // namespace dhdae
