#include "dhdae/staircase.hpp"

#include "dhdae/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <sstream>

namespace dhdae {

Index StaircaseForm::block_start(int b) const {
  Index at = 0;
  for (int i = 1; i < b; ++i) at += sizes[i - 1];
  return at;
}

ComplexMatrix StaircaseForm::block(const ComplexMatrix& M, int i, int j) const {
  return M.block(block_start(i), block_start(j), sizes[i - 1], sizes[j - 1]);
}

namespace {

struct PatternCheck {
  double residual = 0.0;
  std::string where;
};

void scan_zero_block(const ComplexMatrix& M, Index r0, Index r1, Index c0,
                     Index c1, const char* name, PatternCheck& pc) {
  for (Index i = r0; i < r1; ++i)
    for (Index j = c0; j < c1; ++j) {
      const double a = std::abs(M(i, j));
      if (a > pc.residual) {
        pc.residual = a;
        pc.where = name;
      }
    }
}

}  // namespace

StaircaseForm compute_staircase(const DhdaeSystem& sys, double rank_tol) {
  const Index n = sys.n;
  const ComplexMatrix &E = sys.E, &J = sys.J, &R = sys.R;
  const double normE = spectral_norm(E);
  const double scaleJR = std::max(spectral_norm(J), spectral_norm(R));

  // (i) rotate so that E = diag(E+, 0); ascending eigenvalues put the
  // kernel first.
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> esE(E);
  const double cutE = rank_tol * normE;
  Index rankE = 0;
  for (Index i = 0; i < n; ++i)
    if (esE.eigenvalues()(i) > cutE) ++rankE;
  const Index m = n - rankE;
  const ComplexMatrix K = esE.eigenvectors().leftCols(m);
  const ComplexMatrix V = esE.eigenvectors().rightCols(rankE);

  // (ii) inside ker E, split off the part on which the compressed J - R
  // acts invertibly. Its kernel equals ker(K*JK) cap ker(K*RK), so the
  // rank decision runs on the stacked compression.
  const ComplexMatrix Jk = K.adjoint() * J * K;
  const ComplexMatrix Rk = K.adjoint() * R * K;
  ComplexMatrix stack(2 * m, m);
  stack.topRows(m) = Jk;
  stack.bottomRows(m) = Rk;
  Index n3 = 0;
  ComplexMatrix B3(m, 0), B45 = ComplexMatrix::Identity(m, m);
  if (m > 0 && stack.cwiseAbs().maxCoeff() > 0.0) {
    Eigen::JacobiSVD<ComplexMatrix> sv(stack, Eigen::ComputeFullV);
    const double cut = rank_tol * scaleJR;
    for (Index i = 0; i < sv.singularValues().size(); ++i)
      if (sv.singularValues()(i) > cut) ++n3;
    B3 = sv.matrixV().leftCols(n3);
    B45 = sv.matrixV().rightCols(m - n3);
  }
  const Index q = m - n3;
  const ComplexMatrix W = K * B45;  // ker E cap ker J-compression cap ker R

  // (iii) rank-reveal the J coupling of the dead kernel part against the
  // range of E; it decides n4 = n1 and the fifth (singular) block.
  ComplexMatrix C = W.adjoint() * J * V;  // q x rankE
  Index n4 = 0;
  ComplexMatrix U4 = ComplexMatrix::Identity(q, q);
  ComplexMatrix V1 = ComplexMatrix::Identity(rankE, rankE);
  if (q > 0 && rankE > 0 && C.cwiseAbs().maxCoeff() > 0.0) {
    Eigen::JacobiSVD<ComplexMatrix> sv(C, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const double cut = rank_tol * std::max(spectral_norm(J), 1e-300);
    for (Index i = 0; i < sv.singularValues().size(); ++i)
      if (sv.singularValues()(i) > cut) ++n4;
    U4 = sv.matrixU();
    V1 = sv.matrixV();
  }
  const Index n1 = n4, n2 = rankE - n4, n5 = q - n4;

  StaircaseForm sc;
  sc.sizes = {n1, n2, n3, n4, n5};
  sc.rank_tol = rank_tol;
  sc.P.resize(n, n);
  sc.P << V * V1.leftCols(n1), V * V1.rightCols(n2), K * B3,
      W * U4.leftCols(n4), W * U4.rightCols(n5);

  ComplexMatrix Eh = sc.P.adjoint() * E * sc.P;
  ComplexMatrix Jh = sc.P.adjoint() * J * sc.P;
  ComplexMatrix Rh = sc.P.adjoint() * R * sc.P;

  // Required zero patterns; a large residual means some rank decision was
  // too close to call for this rank_tol.
  const Index s12 = n1 + n2, s123 = n1 + n2 + n3, s4 = s123 + n4;
  PatternCheck pcE, pcJ, pcR;
  scan_zero_block(Eh, 0, s12, s12, n, "E rows 1-2 x cols 3-5", pcE);
  scan_zero_block(Eh, s12, n, 0, n, "E rows 3-5", pcE);
  scan_zero_block(Rh, 0, s123, s123, n, "R rows 1-3 x cols 4-5", pcR);
  scan_zero_block(Rh, s123, n, 0, n, "R rows 4-5", pcR);
  scan_zero_block(Jh, s123, s4, n1, s123, "J row 4 x cols 2-3", pcJ);
  scan_zero_block(Jh, s123, n, s123, n, "J rows 4-5 x cols 4-5", pcJ);
  scan_zero_block(Jh, n1, s123, s123, s4, "J rows 2-3 x col 4", pcJ);
  scan_zero_block(Jh, s4, n, 0, s123, "J row 5", pcJ);
  scan_zero_block(Jh, 0, s123, s4, n, "J col 5", pcJ);

  auto fail = [&](const PatternCheck& pc, double norm, const char* mat) {
    if (pc.residual > 100.0 * rank_tol * std::max(norm, 1.0)) {
      std::ostringstream os;
      os << "compute_staircase: numerical rank ambiguity, " << mat
         << " pattern residual " << pc.residual << " at " << pc.where
         << " exceeds 100 * rank_tol * ||" << mat << "||";
      throw RankAmbiguityError(os.str(), pc.residual);
    }
  };
  fail(pcE, normE, "E");
  fail(pcJ, spectral_norm(J), "J");
  fail(pcR, spectral_norm(R), "R");
  sc.pattern_residual =
      std::max({pcE.residual, pcJ.residual, pcR.residual});

  // Store the pattern-exact matrices.
  Eh.block(0, s12, s12, n - s12).setZero();
  Eh.block(s12, 0, n - s12, n).setZero();
  Eh.topLeftCorner(s12, s12) = hermitian_part(Eh.topLeftCorner(s12, s12));
  Rh.block(0, s123, s123, n - s123).setZero();
  Rh.block(s123, 0, n - s123, n).setZero();
  Rh.topLeftCorner(s123, s123) = hermitian_part(Rh.topLeftCorner(s123, s123));
  Jh.block(s123, n1, n4, s123 - n1).setZero();
  Jh.block(n1, s123, s123 - n1, n4).setZero();
  Jh.block(s123, s123, n - s123, n - s123).setZero();
  Jh.block(s4, 0, n5, n).setZero();
  Jh.block(0, s4, n, n5).setZero();
  Jh = skew_part(Jh);

  sc.Ehat = std::move(Eh);
  sc.Jhat = std::move(Jh);
  sc.Rhat = std::move(Rh);

  // Structural guards promised by the form.
  if (n3 > 0) {
    const ComplexMatrix A33 = sc.block(sc.Jhat, 3, 3) - sc.block(sc.Rhat, 3, 3);
    if (sigma_min(A33) <= 1e-14 * std::max(scaleJR, 1.0))
      throw RankAmbiguityError(
          "compute_staircase: J33 - R33 is numerically singular; the "
          "kernel split of J - R on ker E is ambiguous",
          sigma_min(A33));
  }
  return sc;
}

Classification classify(const StaircaseForm& sc) {
  const auto& s = sc.sizes;
  Classification c;
  c.regular = (s[4] == 0);
  const bool e_invertible = (s[2] == 0 && s[3] == 0 && s[4] == 0);
  if (e_invertible)
    c.index = 0;
  else if (s[0] == 0 && s[3] == 0)
    c.index = 1;
  else
    c.index = 2;
  return c;
}

namespace {

/// Schur complement of the (3,3) block of Jhat - Rhat onto block 2 and the
/// matching E block. Valid whenever block sizes allow it.
struct ReducedPencil {
  ComplexMatrix E22, S;
};

ReducedPencil reduce_to_block2(const StaircaseForm& sc) {
  const ComplexMatrix A = sc.Jhat - sc.Rhat;
  const Index n2 = sc.sizes[1];
  ReducedPencil rp;
  rp.E22 = sc.block(sc.Ehat, 2, 2);
  ComplexMatrix A22 = A.block(sc.block_start(2), sc.block_start(2), n2, n2);
  if (sc.sizes[2] > 0) {
    const ComplexMatrix A23 =
        A.block(sc.block_start(2), sc.block_start(3), n2, sc.sizes[2]);
    const ComplexMatrix A32 =
        A.block(sc.block_start(3), sc.block_start(2), sc.sizes[2], n2);
    const ComplexMatrix A33 = A.block(sc.block_start(3), sc.block_start(3),
                                      sc.sizes[2], sc.sizes[2]);
    A22 -= A23 * A33.partialPivLu().solve(A32);
  }
  rp.S = std::move(A22);
  return rp;
}

}  // namespace

FiniteEigenSystem finite_eigensystem(const StaircaseForm& sc) {
  FiniteEigenSystem out;
  const Index n2 = sc.sizes[1];
  out.eigenvectors.resize(sc.n(), n2);
  if (n2 == 0) return out;

  const ReducedPencil rp = reduce_to_block2(sc);
  const Eigen::LLT<ComplexMatrix> llt(rp.E22);
  if (llt.info() != Eigen::Success)
    throw Error("finite_eigensystem: E22 block is not positive definite");
  Eigen::ComplexEigenSolver<ComplexMatrix> es(llt.solve(rp.S));
  if (es.info() != Eigen::Success)
    throw Error("finite_eigensystem: eigensolver failed");

  std::vector<Index> order(n2);
  for (Index i = 0; i < n2; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](Index a, Index b) {
    const Complex u = es.eigenvalues()(a), v = es.eigenvalues()(b);
    if (u.real() != v.real()) return u.real() < v.real();
    return u.imag() < v.imag();
  });

  const ComplexMatrix A = sc.Jhat - sc.Rhat;
  const Index n1 = sc.sizes[0], n3 = sc.sizes[2], n4 = sc.sizes[3];
  const Index b2 = sc.block_start(2), b3 = sc.block_start(3),
              b4 = sc.block_start(4);
  Eigen::PartialPivLU<ComplexMatrix> luA33, luA14;
  if (n3 > 0) luA33.compute(A.block(b3, b3, n3, n3));
  if (n4 > 0) luA14.compute(A.block(0, b4, n1, n4));

  out.eigenvalues.resize(n2);
  for (Index c = 0; c < n2; ++c) {
    const Index k = order[c];
    const Complex lambda = es.eigenvalues()(k);
    out.eigenvalues[c] = lambda;
    ComplexVector x = ComplexVector::Zero(sc.n());
    const ComplexVector w = es.eigenvectors().col(k);
    x.segment(b2, n2) = w;
    ComplexVector x3(n3);
    if (n3 > 0) {
      x3 = -luA33.solve(A.block(b3, b2, n3, n2) * w);
      x.segment(b3, n3) = x3;
    }
    if (n4 > 0) {
      // Row block 1 determines the block-4 component through J41.
      ComplexVector rhs = lambda * (sc.Ehat.block(0, b2, n1, n2) * w) -
                          A.block(0, b2, n1, n2) * w;
      if (n3 > 0) rhs -= A.block(0, b3, n1, n3) * x3;
      x.segment(b4, n4) = luA14.solve(rhs);
    }
    x = sc.P * x;
    x.normalize();
    out.eigenvectors.col(c) = x;
  }
  return out;
}

std::vector<Complex> finite_spectrum(const StaircaseForm& sc) {
  if (sc.sizes[4] > 0) {
    ComplexVector w = sc.P.col(sc.n() - 1);
    throw SingularPencilError(
        "finite_spectrum: the pencil is singular (n5 > 0)", std::move(w));
  }
  return finite_eigensystem(sc).eigenvalues;
}

StabilityVerdict verdict(const DhdaeSystem& sys, double rank_tol) {
  const StaircaseForm sc = compute_staircase(sys, rank_tol);
  const Classification cls = classify(sc);
  const double scaleJR =
      std::max(spectral_norm(sys.J), spectral_norm(sys.R));

  StabilityVerdict v;
  v.regular = cls.regular;
  v.index = cls.index;
  v.staircase_sizes = sc.sizes;
  v.cond_a = cls.regular;

  const auto fe = finite_eigensystem(sc);
  v.spectral_abscissa = -std::numeric_limits<double>::infinity();
  for (const Complex& lam : fe.eigenvalues)
    v.spectral_abscissa = std::max(v.spectral_abscissa, lam.real());
  v.cond_c = v.spectral_abscissa < -rank_tol * std::max(1.0, scaleJR);

  const ComplexMatrix N = nullspace_basis(sys.E, rank_tol);
  const Index r = N.cols();
  if (r == 0) {
    v.principal_submatrix_ok = true;
  } else {
    const ComplexMatrix Wm = N.adjoint() * (sys.J - sys.R) * N;
    const double thresh = rank_tol * std::max(1.0, scaleJR);
    if (r <= 12) {
      // All 2^r - 1 principal submatrices, checked in parallel.
      const std::size_t count = (std::size_t{1} << r) - 1;
      std::atomic<bool> ok{true};
      parallel_for(count, [&](std::size_t s) {
        if (!ok.load(std::memory_order_relaxed)) return;
        const std::size_t mask = s + 1;
        std::vector<Index> idx;
        for (Index b = 0; b < r; ++b)
          if (mask & (std::size_t{1} << b)) idx.push_back(b);
        ComplexMatrix sub(idx.size(), idx.size());
        for (std::size_t a = 0; a < idx.size(); ++a)
          for (std::size_t b = 0; b < idx.size(); ++b)
            sub(a, b) = Wm(idx[a], idx[b]);
        if (sigma_min(sub) <= thresh)
          ok.store(false, std::memory_order_relaxed);
      });
      v.principal_submatrix_ok = ok.load();
    } else {
      // Sufficient condition N^*RN > 0; flagged as non-exhaustive.
      v.principal_check_exact = false;
      const auto eig = hermitian_eig(hermitian_part(N.adjoint() * sys.R * N));
      v.principal_submatrix_ok = eig.eigenvalues(0) > thresh;
    }
    v.d_hi_lower = sigma_min(Wm);
    const auto eigR = hermitian_eig(hermitian_part(N.adjoint() * sys.R * N));
    if (eigR.eigenvalues(0) > rank_tol * std::max(1.0, spectral_norm(sys.R)))
      v.d_r = eigR.eigenvalues(0);
  }
  v.cond_b = (v.index <= 1) && v.principal_submatrix_ok;

  const auto eigE = hermitian_eig(sys.E);
  v.d_dae = std::max(0.0, eigE.eigenvalues(0));
  v.d_sing_stack = stacked_sigma_min({sys.E, sys.J, sys.R});
  return v;
}

RefinedForm refined_form(const StaircaseForm& sc) {
  const Index n = sc.n();
  const Index n1 = sc.sizes[0], n2 = sc.sizes[1];
  const Index b2 = sc.block_start(2), b4 = sc.block_start(4);

  ComplexMatrix TL = ComplexMatrix::Identity(n, n);
  ComplexMatrix TZ = ComplexMatrix::Identity(n, n);
  ComplexMatrix Eh = sc.Ehat, Jh = sc.Jhat, Rh = sc.Rhat;

  auto apply_left = [&](const ComplexMatrix& T) {
    Eh = T * Eh;
    Jh = T * Jh;
    Rh = T * Rh;
    TL = T * TL;
  };
  auto apply_right = [&](const ComplexMatrix& T) {
    Eh = Eh * T;
    Jh = Jh * T;
    Rh = Rh * T;
    TZ = TZ * T;
  };

  // Decouple and diagonalize the block-1 part of E by congruence.
  if (n1 > 0) {
    if (n2 > 0) {
      const ComplexMatrix E21 = Eh.block(b2, 0, n2, n1);
      const ComplexMatrix E22 = Eh.block(b2, b2, n2, n2);
      ComplexMatrix Wc = ComplexMatrix::Identity(n, n);
      Wc.block(b2, 0, n2, n1) = -E22.llt().solve(E21);
      apply_left(Wc.adjoint());
      apply_right(Wc);
    }
    const auto eig1 = hermitian_eig(hermitian_part(Eh.topLeftCorner(n1, n1)));
    ComplexMatrix Uc = ComplexMatrix::Identity(n, n);
    Uc.topLeftCorner(n1, n1) = eig1.eigenvectors;
    apply_left(Uc.adjoint());
    apply_right(Uc);

    // Normalize the J couplings of block 4 to identities.
    const ComplexMatrix J41 = Jh.block(b4, 0, n1, n1);
    ComplexMatrix Sl = ComplexMatrix::Identity(n, n);
    Sl.block(b4, b4, n1, n1) = J41.partialPivLu().inverse();
    apply_left(Sl);
    ComplexMatrix Sr = ComplexMatrix::Identity(n, n);
    Sr.block(b4, b4, n1, n1) = J41.adjoint().partialPivLu().inverse();
    apply_right(Sr);

    // Row and column 4 of E and R vanish, so elementary operations with
    // them clear the remaining J entries in row/column 1 for free.
    ComplexMatrix Cops = ComplexMatrix::Identity(n, n);
    Cops.block(b4, 0, n1, b4) = Jh.block(0, 0, n1, b4);
    apply_right(Cops);
    ComplexMatrix Rops = ComplexMatrix::Identity(n, n);
    Rops.block(n1, b4, b4 - n1, n1) = -Jh.block(n1, 0, b4 - n1, n1);
    apply_left(Rops);
  }

  RefinedForm rf;
  rf.sizes = sc.sizes;
  rf.L = TL * sc.P.adjoint();
  rf.Z = sc.P * TZ;
  rf.Et = std::move(Eh);
  rf.Jt = std::move(Jh);
  rf.Rt = std::move(Rh);
  return rf;
}

std::vector<Complex> pencil_finite_eigs(const ComplexMatrix& E,
                                        const ComplexMatrix& A,
                                        double rank_tol) {
  const ComplexMatrix J = skew_part(A);
  const ComplexMatrix R = -hermitian_part(A);
  const auto sys = DhdaeSystem::validate(E, J, R, 1e-9);
  const StaircaseForm sc = compute_staircase(sys, rank_tol);
  return finite_spectrum(sc);
}

RealPencilEigs hermitian_pencil_real_eigs(const ComplexMatrix& E,
                                          const ComplexMatrix& S,
                                          double rank_tol) {
  const Index n = E.rows();
  const ComplexMatrix J = Complex(0, 1) * hermitian_part(S);
  const auto sys =
      DhdaeSystem::validate(hermitian_part(E), skew_part(J),
                            ComplexMatrix::Zero(n, n), 1e-9);
  const StaircaseForm sc = compute_staircase(sys, rank_tol);

  RealPencilEigs out;
  out.pencil_singular = sc.sizes[4] > 0;
  out.common_kernel = sc.P.rightCols(sc.sizes[4]);
  const auto fe = finite_eigensystem(sc);
  out.eigenvectors = fe.eigenvectors;
  out.omegas.reserve(fe.eigenvalues.size());
  for (const Complex& lam : fe.eigenvalues) out.omegas.push_back(lam.imag());
  return out;
}

}  // namespace dhdae
