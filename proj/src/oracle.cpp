#include "dhdae/oracle.hpp"

#include "dhdae/parallel.hpp"
#include "dhdae/staircase.hpp"

#include <Eigen/Eigenvalues>

#include <random>
#include <sstream>

namespace dhdae {

namespace {

ComplexMatrix random_gaussian(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> g;
  ComplexMatrix A(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) A(i, j) = Complex(g(rng), g(rng));
  return A;
}

/// Largest s in [0, 1] with B + s*D >= 0 (lambda_min concave in s).
double psd_preserving_scale(const ComplexMatrix& B, const ComplexMatrix& D) {
  auto lam_min = [&](double s) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(
        hermitian_part(B + s * D), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  };
  if (lam_min(1.0) >= 0.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (lam_min(mid) >= 0.0 ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace

std::vector<PerturbationTriple> sample_structured_perturbations(
    const DhdaeSystem& sys, SetTag set_tag, double budget, int count,
    std::uint64_t rng_seed) {
  if (budget < 0.0)
    throw Error("sample_structured_perturbations: negative budget");
  const Index n = sys.n;
  std::vector<PerturbationTriple> out(count);
  // Per-sample RNG streams keep the draw independent of scheduling.
  parallel_for(static_cast<std::size_t>(count), [&](std::size_t k) {
    std::mt19937_64 rng(rng_seed + 0x9e3779b97f4a7c15ULL * (k + 1));
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const bool jr = is_jr_scope(set_tag);
    const bool decrease = is_decrease_set(set_tag);

    ComplexMatrix dJ = skew_part(random_gaussian(rng, n));
    ComplexMatrix dE, dR;
    if (decrease) {
      const ComplexMatrix GE = random_gaussian(rng, n);
      const ComplexMatrix GR = random_gaussian(rng, n);
      dE = -hermitian_part(GE * GE.adjoint());
      dR = -hermitian_part(GR * GR.adjoint());
    } else {
      dE = hermitian_part(random_gaussian(rng, n));
      dR = hermitian_part(random_gaussian(rng, n));
    }
    if (jr) dE.setZero();

    // Split the norm budget over the three blocks, total <= budget.
    double w[3] = {uni(rng), uni(rng), uni(rng)};
    if (jr) w[0] = 0.0;
    const double total = w[0] + w[1] + w[2];
    const double radius = budget * uni(rng);
    auto rescale = [&](ComplexMatrix& D, double share) {
      const double target =
          (total > 0) ? radius * std::sqrt(share / total) : 0.0;
      const double cur = spectral_norm(D);
      D = (cur > 0) ? ComplexMatrix((target / cur) * D)
                    : ComplexMatrix::Zero(n, n);
    };
    rescale(dE, w[0]);
    rescale(dJ, w[1]);
    rescale(dR, w[2]);

    // Clip so the perturbed coefficients stay PSD.
    if (!jr && dE.size() && dE.cwiseAbs().maxCoeff() > 0)
      dE *= psd_preserving_scale(sys.E, dE);
    if (dR.cwiseAbs().maxCoeff() > 0) dR *= psd_preserving_scale(sys.R, dR);

    PerturbationTriple p = make_perturbation(dE, dJ, dR, set_tag);
    apply_perturbation(sys, p, 1e-10);  // re-validate set membership
    out[k] = std::move(p);
  });
  return out;
}

bool triggers_degeneracy(const DhdaeSystem& perturbed, DegeneracyKind kind,
                         double tol, double rank_tol) {
  switch (kind) {
    case DegeneracyKind::Singular:
      return stacked_sigma_min({perturbed.E, perturbed.J, perturbed.R}) <= tol;
    case DegeneracyKind::HigherIndex: {
      const StaircaseForm sc = compute_staircase(perturbed, rank_tol);
      return sc.sizes[3] > 0 || sc.sizes[4] > 0;
    }
    case DegeneracyKind::ImaginaryAxis: {
      const StaircaseForm sc = compute_staircase(perturbed, rank_tol);
      if (sc.sizes[4] > 0) return true;  // singular counts as degenerate
      for (const Complex& lam : finite_eigensystem(sc).eigenvalues)
        if (lam.real() >= -tol) return true;
      return false;
    }
  }
  return false;
}

CertificateRecord certify_distance(
    const DhdaeSystem& sys, DegeneracyKind kind, SetTag set_tag, double value,
    const std::optional<PerturbationTriple>& witness, int samples,
    std::uint64_t rng_seed, double rank_tol) {
  CertificateRecord rec;
  rec.rng_seed = rng_seed;
  rec.samples = samples;
  if (!std::isfinite(value)) {
    rec.pass = true;
    rec.detail = "distance is infinite; nothing to sample";
    return rec;
  }
  const double scale = std::max(
      {1.0, spectral_norm(sys.E), spectral_norm(sys.J), spectral_norm(sys.R)});
  const double budget = value * (1.0 - 1e-3);
  const double tol = 1e-9 * scale;

  const auto draws =
      sample_structured_perturbations(sys, set_tag, budget, samples, rng_seed);
  std::atomic<long> bad{-1};
  parallel_for(draws.size(), [&](std::size_t i) {
    if (bad.load(std::memory_order_relaxed) >= 0) return;
    try {
      const DhdaeSystem pert = apply_perturbation(sys, draws[i], 1e-8);
      if (triggers_degeneracy(pert, kind, tol, rank_tol)) {
        long expect = -1;
        bad.compare_exchange_strong(expect, static_cast<long>(i));
      }
    } catch (const Error&) {
      long expect = -1;
      bad.compare_exchange_strong(expect, static_cast<long>(i));
    }
  });
  if (bad.load() >= 0) {
    rec.pass = false;
    rec.counterexample = draws[static_cast<std::size_t>(bad.load())];
    std::ostringstream os;
    os << "sample " << bad.load() << " of norm "
       << rec.counterexample->norm << " < " << value
       << " already triggers the degeneracy";
    rec.detail = os.str();
    return rec;
  }
  if (witness) {
    bool ok = false;
    try {
      const DhdaeSystem pert = apply_perturbation(sys, *witness, 1e-8);
      ok = triggers_degeneracy(pert, kind, 1e-6 * scale, rank_tol);
    } catch (const Error&) {
      ok = false;
    }
    if (!ok) {
      rec.pass = false;
      rec.detail = "the witness perturbation does not trigger the degeneracy";
      return rec;
    }
  }
  rec.pass = true;
  rec.detail = "no sub-distance sample triggers; witness (if any) does";
  return rec;
}

double grid_omega_oracle(const std::function<double(double)>& objective,
                         double lo, double hi, int points) {
  if (points < 2 || !(hi > lo))
    throw Error("grid_omega_oracle: bad grid spec");
  std::vector<double> vals(points);
  parallel_for(static_cast<std::size_t>(points), [&](std::size_t i) {
    const double w = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    vals[i] = objective(w);
  });
  double best = vals[0];
  for (double v : vals) best = std::min(best, v);
  return best;
}

std::vector<Complex> pencil_eigs_by_determinant(const ComplexMatrix& E,
                                                const ComplexMatrix& A,
                                                double rank_tol) {
  const Index n = E.rows();
  if (E.cols() != n || A.rows() != n || A.cols() != n)
    throw DimensionError("pencil_eigs_by_determinant: square same-size");
  // det(lambda E - A) has degree at most rank(E) <= n; sample on a circle
  // that dominates the spectrum scale and interpolate the coefficients.
  const Index deg = n;
  const Index samples = deg + 1;
  const double radius =
      4.0 * (spectral_norm(A) + spectral_norm(E) + 1.0);
  Eigen::MatrixXcd V(samples, deg + 1);
  ComplexVector d(samples);
  for (Index k = 0; k < samples; ++k) {
    const double th = 2.0 * M_PI * k / samples;
    const Complex z = radius * Complex(std::cos(th), std::sin(th));
    d(k) = (z * E - A).determinant();
    Complex p = 1.0;
    for (Index j = 0; j <= deg; ++j) {
      V(k, j) = p;
      p *= z;
    }
  }
  ComplexVector coef = V.colPivHouseholderQr().solve(d);
  // Trim leading coefficients drowned by interpolation noise: coefficient
  // j inherits noise of order |d|_max / radius^j from rank deficiency of E.
  const double dmax = d.cwiseAbs().maxCoeff();
  if (dmax == 0.0) throw Error("pencil_eigs_by_determinant: singular pencil");
  auto negligible = [&](Index j) {
    return std::abs(coef(j)) <= rank_tol * dmax / std::pow(radius, double(j));
  };
  Index eff = deg;
  while (eff > 0 && negligible(eff)) --eff;
  if (eff == 0) {
    if (negligible(0))
      throw Error("pencil_eigs_by_determinant: singular pencil");
    return {};
  }
  ComplexMatrix comp = ComplexMatrix::Zero(eff, eff);
  for (Index i = 1; i < eff; ++i) comp(i, i - 1) = 1.0;
  for (Index i = 0; i < eff; ++i) comp(i, eff - 1) = -coef(i) / coef(eff);
  Eigen::ComplexEigenSolver<ComplexMatrix> es(comp);
  std::vector<Complex> out(es.eigenvalues().data(),
                           es.eigenvalues().data() + eff);
  std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

double sphere_sample_min(const std::function<double(const ComplexVector&)>& f,
                         Index dim, int count, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> g;
  double best = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < dim; ++i) {
    ComplexVector e = ComplexVector::Zero(dim);
    e(i) = 1.0;
    best = std::min(best, f(e));
  }
  for (int k = 0; k < count; ++k) {
    ComplexVector v(dim);
    for (Index i = 0; i < dim; ++i) v(i) = Complex(g(rng), g(rng));
    v.normalize();
    best = std::min(best, f(v));
  }
  return best;
}

}  // namespace dhdae
