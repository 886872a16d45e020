#include "dhdae/matrix_core.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace dhdae {

ComplexMatrix hermitian_part(const ComplexMatrix& A) {
  if (A.rows() != A.cols())
    throw DimensionError("hermitian_part: matrix must be square");
  const Index n = A.rows();
  ComplexMatrix H(n, n);
  for (Index i = 0; i < n; ++i) {
    H(i, i) = Complex(A(i, i).real(), 0.0);
    for (Index j = i + 1; j < n; ++j) {
      const Complex h = 0.5 * (A(i, j) + std::conj(A(j, i)));
      H(i, j) = h;
      H(j, i) = std::conj(h);
    }
  }
  return H;
}

ComplexMatrix skew_part(const ComplexMatrix& A) {
  if (A.rows() != A.cols())
    throw DimensionError("skew_part: matrix must be square");
  const Index n = A.rows();
  ComplexMatrix S(n, n);
  for (Index i = 0; i < n; ++i) {
    S(i, i) = Complex(0.0, A(i, i).imag());
    for (Index j = i + 1; j < n; ++j) {
      const Complex s = 0.5 * (A(i, j) - std::conj(A(j, i)));
      S(i, j) = s;
      S(j, i) = -std::conj(s);
    }
  }
  return S;
}

double hermitian_residual(const ComplexMatrix& A) {
  return (A - A.adjoint()).cwiseAbs().maxCoeff();
}

double skew_residual(const ComplexMatrix& A) {
  return (A + A.adjoint()).cwiseAbs().maxCoeff();
}

bool is_psd(const ComplexMatrix& A, double tol) {
  if (A.rows() != A.cols()) throw DimensionError("is_psd: matrix must be square");
  if (A.size() == 0) return true;
  const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
  if (hermitian_residual(A) > tol * scale)
    throw Error("is_psd: input is not Hermitian to tolerance");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian_part(A),
                                                  Eigen::EigenvaluesOnly);
  const double norm = std::max(std::abs(es.eigenvalues()(0)),
                               std::abs(es.eigenvalues()(A.rows() - 1)));
  return es.eigenvalues()(0) >= -tol * std::max(1.0, norm);
}

double spectral_norm(const ComplexMatrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> s(A);
  return s.singularValues()(0);
}

double sigma_min(const ComplexMatrix& A) {
  if (A.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> s(A);
  return s.singularValues()(s.singularValues().size() - 1);
}

HermitianEig hermitian_eig(const ComplexMatrix& A) {
  if (A.rows() != A.cols())
    throw DimensionError("hermitian_eig: matrix must be square");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(A);
  if (es.info() != Eigen::Success)
    throw Error("hermitian_eig: eigensolver failed to converge");
  return HermitianEig{es.eigenvalues(), es.eigenvectors()};
}

Svd svd(const ComplexMatrix& A) {
  Eigen::JacobiSVD<ComplexMatrix> s(A, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return Svd{s.matrixU(), s.singularValues(), s.matrixV()};
}

ComplexMatrix nullspace_basis(const ComplexMatrix& A, double rank_tol) {
  const Index n = A.cols();
  if (A.size() == 0 || A.cwiseAbs().maxCoeff() == 0.0)
    return ComplexMatrix::Identity(n, n);
  Eigen::JacobiSVD<ComplexMatrix> s(A, Eigen::ComputeFullV);
  const auto& sv = s.singularValues();
  const double cutoff = rank_tol * sv(0);
  Index rank = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return s.matrixV().rightCols(n - rank);
}

ComplexMatrix vstack(const std::vector<ComplexMatrix>& mats) {
  if (mats.empty()) throw DimensionError("vstack: empty list");
  const Index cols = mats.front().cols();
  Index rows = 0;
  for (const auto& m : mats) {
    if (m.cols() != cols)
      throw DimensionError("vstack: column counts differ");
    rows += m.rows();
  }
  ComplexMatrix out(rows, cols);
  Index at = 0;
  for (const auto& m : mats) {
    out.middleRows(at, m.rows()) = m;
    at += m.rows();
  }
  return out;
}

double stacked_sigma_min(const std::vector<ComplexMatrix>& mats) {
  return sigma_min(vstack(mats));
}

}  // namespace dhdae
