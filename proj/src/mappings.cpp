#include "dhdae/mappings.hpp"

namespace dhdae {

namespace {

MappingResult zero_result(Index n) {
  MappingResult r;
  r.matrix = ComplexMatrix::Zero(n, n);
  r.norm = 0.0;
  r.feasible = true;
  return r;
}

MappingResult infeasible(Index n, std::string why) {
  MappingResult r;
  r.matrix = ComplexMatrix::Zero(n, n);
  r.feasible = false;
  r.infeasibility_reason = std::move(why);
  return r;
}

void require_nonzero(const ComplexVector& x) {
  if (x.size() == 0 || x.norm() == 0.0)
    throw Error("structured mapping: x must be nonzero");
}

}  // namespace

MappingResult min_hermitian_map(const ComplexVector& x, const ComplexVector& y) {
  require_nonzero(x);
  const Index n = x.size();
  if (y.size() != n) throw DimensionError("min_hermitian_map: size mismatch");
  const double ny = y.norm();
  if (ny == 0.0) return zero_result(n);
  const double nx = x.norm();
  const Complex xy = x.dot(y);  // x^* y
  const double im = std::abs(xy.imag());
  if (im > kFeasibilityTol * nx * ny)
    return infeasible(n, "Im(x^*y) != 0: no Hermitian H maps x to y");

  MappingResult r;
  r.feasible = true;
  r.marginal = im > 0.0;
  r.norm = ny / nx;

  // Linear-dependence branch: y = c x with real c.
  const ComplexVector resid = y - (xy / (nx * nx)) * x;
  if (resid.norm() < 1e-10 * ny) {
    r.matrix = (y * x.adjoint()) / (nx * nx);
    r.matrix = 0.5 * (r.matrix + r.matrix.adjoint().eval());
    return r;
  }

  ComplexMatrix B(n, 2);
  B.col(0) = y / ny;
  B.col(1) = x / nx;
  const double c = xy.real() / (nx * ny);  // real by feasibility
  Eigen::Matrix2cd mid;
  mid << c, 1.0, 1.0, c;
  r.matrix = (ny / nx) * (B * mid * B.adjoint());
  r.matrix = 0.5 * (r.matrix + r.matrix.adjoint().eval());
  return r;
}

MappingResult min_skew_map(const ComplexVector& x, const ComplexVector& y) {
  require_nonzero(x);
  const Index n = x.size();
  if (y.size() != n) throw DimensionError("min_skew_map: size mismatch");
  if (y.norm() == 0.0) return zero_result(n);
  const Complex xy = x.dot(y);
  if (std::abs(xy.real()) > kFeasibilityTol * x.norm() * y.norm())
    return infeasible(n, "Re(x^*y) != 0: no skew-Hermitian S maps x to y");
  // S = -i * H_(x, iy); Im(x^*(iy)) = Re(x^*y) matches the check above.
  MappingResult r = min_hermitian_map(x, Complex(0, 1) * y);
  r.matrix = (Complex(0, -1) * r.matrix).eval();
  r.matrix = 0.5 * (r.matrix - r.matrix.adjoint().eval());
  return r;
}

MappingResult min_psd_map(const ComplexVector& x, const ComplexVector& y) {
  require_nonzero(x);
  const Index n = x.size();
  if (y.size() != n) throw DimensionError("min_psd_map: size mismatch");
  const double ny = y.norm();
  if (ny == 0.0) return zero_result(n);  // 0/0 := 0
  const double nx = x.norm();
  const Complex xy = x.dot(y);
  const double tol = kFeasibilityTol * nx * ny;
  if (std::abs(xy.imag()) > tol || xy.real() <= tol)
    return infeasible(n, "x^*y is not real positive: no PSD H maps x to y");
  MappingResult r;
  r.feasible = true;
  r.marginal = std::abs(xy.imag()) > 0.0;
  r.norm = ny * ny / xy.real();
  r.matrix = (y * y.adjoint()) / xy.real();
  return r;
}

MappingResult min_neg_semidef_annihilator(const ComplexMatrix& R,
                                          const ComplexVector& x) {
  require_nonzero(x);
  if (R.rows() != R.cols() || R.rows() != x.size())
    throw DimensionError("min_neg_semidef_annihilator: size mismatch");
  const ComplexVector Rx = R * x;
  const double scale = std::max(1.0, R.size() ? R.cwiseAbs().maxCoeff() : 0.0);
  if (Rx.norm() <= 1e-14 * scale * x.norm()) return zero_result(R.rows());
  const double xRx = x.dot(Rx).real();
  if (xRx <= 0.0)
    throw Error("min_neg_semidef_annihilator: R is not PSD at x");
  MappingResult r;
  r.feasible = true;
  r.norm = Rx.squaredNorm() / xRx;
  r.matrix = -(Rx * Rx.adjoint()) / xRx;
  return r;
}

MappingResult pseudoinverse_consistent_map(const ComplexMatrix& N,
                                           const ComplexMatrix& A,
                                           const ComplexVector& x,
                                           MapStructure structure) {
  require_nonzero(x);
  if (N.cols() != x.size() || A.rows() != N.rows() || A.cols() != N.rows())
    throw DimensionError("pseudoinverse_consistent_map: size mismatch");
  // With orthonormal columns, (N^*)^dagger = N.
  const ComplexVector z = N * x;
  const ComplexVector y = -(N * (N.adjoint() * (A * z)));
  switch (structure) {
    case MapStructure::Hermitian:
      return min_hermitian_map(z, y);
    case MapStructure::Skew:
      return min_skew_map(z, y);
    case MapStructure::PsdNeg: {
      // D <= 0 with D z = y: negate the PSD problem.
      if (y.norm() == 0.0) return zero_result(N.rows());
      MappingResult r = min_psd_map(z, -y);
      if (r.feasible) r.matrix = -r.matrix;
      return r;
    }
  }
  throw Error("pseudoinverse_consistent_map: unknown structure");
}

}  // namespace dhdae
