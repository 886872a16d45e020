#include "dhdae/model.hpp"

#include <Eigen/Eigenvalues>

#include <random>
#include <sstream>

namespace dhdae {

namespace {

double psd_violation(const ComplexMatrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(A),
                                                  Eigen::EigenvaluesOnly);
  return std::max(0.0, -es.eigenvalues()(0));
}

void require_square_same(const ComplexMatrix& E, const ComplexMatrix& J,
                         const ComplexMatrix& R) {
  if (E.rows() != E.cols() || J.rows() != J.cols() || R.rows() != R.cols() ||
      E.rows() != J.rows() || E.rows() != R.rows())
    throw DimensionError("coefficients must be square and of equal size");
}

ComplexMatrix zero_like(Index n) { return ComplexMatrix::Zero(n, n); }

}  // namespace

std::string Violation::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::NotHermitianE: os << "E is not Hermitian"; break;
    case Kind::NotHermitianR: os << "R is not Hermitian"; break;
    case Kind::NotSkewJ: os << "J is not skew-Hermitian"; break;
    case Kind::NotPsdE: os << "E is not positive semidefinite"; break;
    case Kind::NotPsdR: os << "R is not positive semidefinite"; break;
    case Kind::SizeMismatch: os << "coefficient sizes mismatch"; break;
  }
  os << " (residual " << magnitude << ")";
  return os.str();
}

std::vector<Violation> DhdaeSystem::check(const ComplexMatrix& E,
                                          const ComplexMatrix& J,
                                          const ComplexMatrix& R, double tol) {
  require_square_same(E, J, R);
  std::vector<Violation> out;
  const double se = std::max(1.0, E.size() ? E.cwiseAbs().maxCoeff() : 0.0);
  const double sj = std::max(1.0, J.size() ? J.cwiseAbs().maxCoeff() : 0.0);
  const double sr = std::max(1.0, R.size() ? R.cwiseAbs().maxCoeff() : 0.0);

  if (double r = hermitian_residual(E); r > tol * se)
    out.push_back({Violation::Kind::NotHermitianE, r});
  if (double r = skew_residual(J); r > tol * sj)
    out.push_back({Violation::Kind::NotSkewJ, r});
  if (double r = hermitian_residual(R); r > tol * sr)
    out.push_back({Violation::Kind::NotHermitianR, r});
  if (double v = psd_violation(E); v > tol * se)
    out.push_back({Violation::Kind::NotPsdE, v});
  if (double v = psd_violation(R); v > tol * sr)
    out.push_back({Violation::Kind::NotPsdR, v});
  return out;
}

DhdaeSystem DhdaeSystem::validate(const ComplexMatrix& E, const ComplexMatrix& J,
                                  const ComplexMatrix& R, double tol) {
  auto violations = check(E, J, R, tol);
  if (!violations.empty()) {
    std::ostringstream os;
    os << "not a dHDAE triple:";
    for (const auto& v : violations) os << " " << v.describe() << ";";
    throw StructureError(os.str(), std::move(violations));
  }
  return DhdaeSystem{E.rows(), E, J, R};
}

GeneralizedDhdae GeneralizedDhdae::validate(const ComplexMatrix& E,
                                            const ComplexMatrix& J,
                                            const ComplexMatrix& R,
                                            const ComplexMatrix& Q,
                                            double tol) {
  require_square_same(E, J, R);
  if (Q.rows() != E.rows() || Q.cols() != E.cols())
    throw DimensionError("Q must match the coefficient size");
  std::vector<Violation> out;
  const ComplexMatrix EQ = E.adjoint() * Q;
  const double scale =
      std::max(1.0, EQ.size() ? EQ.cwiseAbs().maxCoeff() : 0.0);
  if (double r = hermitian_residual(EQ); r > tol * scale)
    out.push_back({Violation::Kind::NotHermitianE, r});
  if (double v = psd_violation(EQ); v > tol * scale)
    out.push_back({Violation::Kind::NotPsdE, v});
  const ComplexMatrix JQ = Q.adjoint() * J * Q;
  if (double r = skew_residual(JQ);
      r > tol * std::max(1.0, JQ.size() ? JQ.cwiseAbs().maxCoeff() : 0.0))
    out.push_back({Violation::Kind::NotSkewJ, r});
  const ComplexMatrix RQ = Q.adjoint() * R * Q;
  const double sr = std::max(1.0, RQ.size() ? RQ.cwiseAbs().maxCoeff() : 0.0);
  if (double r = hermitian_residual(RQ); r > tol * sr)
    out.push_back({Violation::Kind::NotHermitianR, r});
  if (double v = psd_violation(RQ); v > tol * sr)
    out.push_back({Violation::Kind::NotPsdR, v});
  if (!out.empty()) {
    std::ostringstream os;
    os << "not a generalized dHDAE quadruple:";
    for (const auto& v : out) os << " " << v.describe() << ";";
    throw StructureError(os.str(), std::move(out));
  }
  return GeneralizedDhdae{E.rows(), E, J, R, Q};
}

DhdaeSystem reduce_q(const GeneralizedDhdae& sys, double rank_tol) {
  const double smin = sigma_min(sys.Q);
  const double smax = spectral_norm(sys.Q);
  if (smin <= rank_tol * std::max(smax, 1.0))
    throw QSingularError(
        "reduce_q: Q is numerically singular; with rank-deficient Q the "
        "solution can grow without bound, so the reduction is refused");
  // Q^*E is Hermitian up to the residual of E^*Q = Q^*E; re-validation uses
  // a tolerance that absorbs the congruence conditioning.
  const double tol = 1e-12 * std::max(1.0, smax * smax);
  return DhdaeSystem::validate(sys.Q.adjoint() * sys.E,
                               sys.Q.adjoint() * sys.J * sys.Q,
                               sys.Q.adjoint() * sys.R * sys.Q, tol);
}

std::string to_string(SetTag tag) {
  switch (tag) {
    case SetTag::Sd: return "Sd";
    case SetTag::Si: return "Si";
    case SetTag::SdJR: return "Sd(J,R)";
    case SetTag::SiJR: return "Si(J,R)";
  }
  return "?";
}

bool is_jr_scope(SetTag tag) {
  return tag == SetTag::SdJR || tag == SetTag::SiJR;
}

bool is_decrease_set(SetTag tag) {
  return tag == SetTag::Sd || tag == SetTag::SdJR;
}

PerturbationTriple make_perturbation(const ComplexMatrix& dE,
                                     const ComplexMatrix& dJ,
                                     const ComplexMatrix& dR, SetTag tag,
                                     double tol) {
  require_square_same(dE, dJ, dR);
  std::vector<Violation> out;
  const double se = std::max(1.0, dE.size() ? dE.cwiseAbs().maxCoeff() : 0.0);
  const double sj = std::max(1.0, dJ.size() ? dJ.cwiseAbs().maxCoeff() : 0.0);
  const double sr = std::max(1.0, dR.size() ? dR.cwiseAbs().maxCoeff() : 0.0);
  if (double r = hermitian_residual(dE); r > tol * se)
    out.push_back({Violation::Kind::NotHermitianE, r});
  if (double r = skew_residual(dJ); r > tol * sj)
    out.push_back({Violation::Kind::NotSkewJ, r});
  if (double r = hermitian_residual(dR); r > tol * sr)
    out.push_back({Violation::Kind::NotHermitianR, r});
  if (is_jr_scope(tag)) {
    if (dE.size() && dE.cwiseAbs().maxCoeff() > tol * se)
      out.push_back({Violation::Kind::NotPsdE, dE.cwiseAbs().maxCoeff()});
  } else if (is_decrease_set(tag)) {
    if (double v = psd_violation(-dE); v > tol * se)
      out.push_back({Violation::Kind::NotPsdE, v});
  }
  if (is_decrease_set(tag)) {
    if (double v = psd_violation(-dR); v > tol * sr)
      out.push_back({Violation::Kind::NotPsdR, v});
  }
  if (!out.empty()) {
    std::ostringstream os;
    os << "perturbation violates the structure of " << to_string(tag) << ":";
    for (const auto& v : out) os << " " << v.describe() << ";";
    throw StructureError(os.str(), std::move(out));
  }
  PerturbationTriple p;
  p.dE = dE;
  p.dJ = dJ;
  p.dR = dR;
  p.set_tag = tag;
  const double ne = spectral_norm(dE), nj = spectral_norm(dJ),
               nr = spectral_norm(dR);
  p.norm = std::sqrt(ne * ne + nj * nj + nr * nr);
  return p;
}

DhdaeSystem apply_perturbation(const DhdaeSystem& sys,
                               const PerturbationTriple& p, double tol) {
  if (p.dE.rows() != sys.n)
    throw DimensionError("apply_perturbation: size mismatch");
  return DhdaeSystem::validate(sys.E + p.dE, sys.J + p.dJ, sys.R + p.dR, tol);
}

namespace {

void require_psd_param(const ComplexMatrix& A, const char* name) {
  const double s = std::max(1.0, A.size() ? A.cwiseAbs().maxCoeff() : 0.0);
  if (hermitian_residual(A) > 1e-12 * s || psd_violation(A) > 1e-12 * s)
    throw StructureError(std::string(name) + " must be Hermitian >= 0", {});
}

void require_pd_param(const ComplexMatrix& A, const char* name) {
  require_psd_param(A, name);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(A),
                                                  Eigen::EigenvaluesOnly);
  const double s = std::max(1.0, A.cwiseAbs().maxCoeff());
  if (A.size() == 0 || es.eigenvalues()(0) <= 1e-12 * s)
    throw StructureError(std::string(name) + " must be Hermitian > 0", {});
}

}  // namespace

DhdaeSystem make_mechanical(const ComplexMatrix& M, const ComplexMatrix& D,
                            const ComplexMatrix& K) {
  const Index m = M.rows();
  if (M.rows() != M.cols() || D.rows() != m || D.cols() != m || K.rows() != m ||
      K.cols() != m)
    throw DimensionError("make_mechanical: M, D, K must be square, same size");
  require_psd_param(M, "M");
  require_psd_param(D, "D");
  require_pd_param(K, "K");
  const Index n = 2 * m;
  ComplexMatrix E = zero_like(n), J = zero_like(n), R = zero_like(n);
  E.topLeftCorner(m, m) = M;
  E.bottomRightCorner(m, m) = K;
  J.topRightCorner(m, m) = -K;
  J.bottomLeftCorner(m, m) = K;
  R.topLeftCorner(m, m) = D;
  return DhdaeSystem::validate(E, J, R);
}

DhdaeSystem make_car_acoustic(const ComplexMatrix& M, const ComplexMatrix& D,
                              const ComplexMatrix& K) {
  return make_mechanical(M, D, K);
}

DhdaeSystem make_stokes(const ComplexMatrix& Mv, const ComplexMatrix& Mp,
                        const ComplexMatrix& A, const ComplexMatrix& B,
                        const ComplexMatrix& C) {
  const Index nv = Mv.rows(), np = Mp.rows();
  if (A.rows() != nv || A.cols() != nv || B.rows() != nv || B.cols() != np ||
      C.rows() != np || C.cols() != np || Mv.cols() != nv || Mp.cols() != np)
    throw DimensionError("make_stokes: inconsistent block sizes");
  require_pd_param(Mv, "Mv");
  require_psd_param(Mp, "Mp");
  require_psd_param(C, "C");
  const ComplexMatrix Ah = hermitian_part(A);
  require_psd_param(-Ah, "-herm(A)");
  if (np > 0 && B.size() > 0) {
    if (sigma_min(B) <= kDefaultRankTol * std::max(1.0, spectral_norm(B)))
      throw StructureError("make_stokes: B must have full column rank", {});
  }
  const Index n = nv + np;
  ComplexMatrix E = zero_like(n), J = zero_like(n), R = zero_like(n);
  E.topLeftCorner(nv, nv) = Mv;
  E.bottomRightCorner(np, np) = Mp;
  J.topLeftCorner(nv, nv) = skew_part(A);
  J.topRightCorner(nv, np) = B;
  J.bottomLeftCorner(np, nv) = -B.adjoint();
  R.topLeftCorner(nv, nv) = -Ah;
  R.bottomRightCorner(np, np) = C;
  return DhdaeSystem::validate(E, J, R);
}

DhdaeSystem make_poroelastic(const ComplexMatrix& Y, const ComplexMatrix& A,
                             const ComplexMatrix& M, const ComplexMatrix& K,
                             const ComplexMatrix& D) {
  const Index m = A.rows();
  if (Y.rows() != m || Y.cols() != m || A.cols() != m || M.rows() != m ||
      M.cols() != m || K.rows() != m || K.cols() != m || D.rows() != m ||
      D.cols() != m)
    throw DimensionError("make_poroelastic: blocks must be square, same size");
  require_psd_param(Y, "Y");
  require_pd_param(A, "A");
  require_pd_param(M, "M");
  require_psd_param(K, "K");
  const Index n = 3 * m;
  ComplexMatrix E = zero_like(n), J = zero_like(n), R = zero_like(n);
  E.block(0, 0, m, m) = Y;
  E.block(m, m, m, m) = A;
  E.block(2 * m, 2 * m, m, m) = M;
  J.block(0, m, m, m) = -A;
  J.block(m, 0, m, m) = A;
  J.block(0, 2 * m, m, m) = D.adjoint();
  J.block(2 * m, 0, m, m) = -D;
  R.block(2 * m, 2 * m, m, m) = K;
  return DhdaeSystem::validate(E, J, R);
}

DhdaeSystem make_dc_network(const DcNetworkParams& p) {
  for (double v : {p.L, p.C1, p.C2, p.RL, p.RG, p.RR})
    if (!(v > 0.0))
      throw StructureError("make_dc_network: all parameters must be > 0", {});
  ComplexMatrix E = zero_like(5), J = zero_like(5), R = zero_like(5);
  E(0, 0) = p.L;
  E(1, 1) = p.C1;
  E(2, 2) = p.C2;
  J << 0, -1, 1, 0, 0,
       1, 0, 0, -1, 0,
      -1, 0, 0, 0, -1,
       0, 1, 0, 0, 0,
       0, 0, 1, 0, 0;
  R(0, 0) = p.RL;
  R(3, 3) = p.RG;
  R(4, 4) = p.RR;
  return DhdaeSystem::validate(E, J, R);
}

namespace {

ComplexMatrix random_dense(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> g;
  ComplexMatrix A(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) A(i, j) = Complex(g(rng), g(rng));
  return A;
}

ComplexMatrix random_psd(std::mt19937_64& rng, Index n, Index rank) {
  if (rank <= 0) return ComplexMatrix::Zero(n, n);
  const ComplexMatrix G = random_dense(rng, n, std::min(rank, n));
  return hermitian_part(G * G.adjoint());
}

ComplexMatrix random_pd(std::mt19937_64& rng, Index n) {
  return random_psd(rng, n, n) + 0.1 * ComplexMatrix::Identity(n, n);
}

}  // namespace

DhdaeSystem random_example(ExampleKind kind, Index m, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> rank(1, std::max<Index>(1, m));
  switch (kind) {
    case ExampleKind::Mechanical:
      return make_mechanical(random_psd(rng, m, m), random_psd(rng, m, rank(rng)),
                             random_pd(rng, m));
    case ExampleKind::CarAcoustic:
      // Rank-deficient mass block, as in the interior acoustic model.
      return make_car_acoustic(
          random_psd(rng, m, std::max<Index>(1, m / 2)),
          random_psd(rng, m, rank(rng)), random_pd(rng, m));
    case ExampleKind::Stokes: {
      const Index np = std::max<Index>(1, m / 2);
      const ComplexMatrix Mv = random_pd(rng, m);
      const ComplexMatrix Mp = random_psd(rng, np, rank(rng) % (np + 1));
      ComplexMatrix A = random_dense(rng, m, m);
      A = skew_part(A) - random_pd(rng, m);  // Hermitian part <= 0
      ComplexMatrix B = random_dense(rng, m, np);
      const ComplexMatrix C = random_psd(rng, np, np);
      return make_stokes(Mv, Mp, A, B, C);
    }
    case ExampleKind::Poroelastic:
      return make_poroelastic(random_psd(rng, m, rank(rng)), random_pd(rng, m),
                              random_pd(rng, m), random_psd(rng, m, rank(rng)),
                              random_dense(rng, m, m));
    case ExampleKind::DcNetwork: {
      std::uniform_real_distribution<double> pos(0.2, 3.0);
      DcNetworkParams p;
      p.L = pos(rng);
      p.C1 = pos(rng);
      p.C2 = pos(rng);
      p.RL = pos(rng);
      p.RG = pos(rng);
      p.RR = pos(rng);
      return make_dc_network(p);
    }
  }
  throw Error("random_example: unknown kind");
}

DhdaeSystem random_system(Index n, std::uint64_t seed, bool allow_singular) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Index> rank(1, n);
  std::bernoulli_distribution full(0.5);
  const Index re = (allow_singular && !full(rng)) ? rank(rng) : n;
  const Index rr = (allow_singular && !full(rng)) ? rank(rng) : n;
  return DhdaeSystem::validate(random_psd(rng, n, re),
                               skew_part(random_dense(rng, n, n)),
                               random_psd(rng, n, rr));
}

DhdaeSystem project_to_structure(const ComplexMatrix& E, const ComplexMatrix& J,
                                 const ComplexMatrix& R, double tol) {
  require_square_same(E, J, R);
  auto clip_psd = [](const ComplexMatrix& A) {
    const ComplexMatrix H = hermitian_part(A);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(H);
    RealVector lam = es.eigenvalues().cwiseMax(0.0);
    return hermitian_part(es.eigenvectors() * lam.asDiagonal() *
                          es.eigenvectors().adjoint());
  };
  return DhdaeSystem::validate(clip_psd(E), skew_part(J), clip_psd(R),
                               std::max(tol, 1e-10));
}

}  // namespace dhdae
