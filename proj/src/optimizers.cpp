#include "dhdae/optimizers.hpp"

#include "dhdae/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>

namespace dhdae {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double form(const ComplexMatrix& H, const ComplexVector& x) {
  return x.dot(H * x).real();
}

struct RayleighEval {
  double value;
  bool rejected;
};

RayleighEval eval_objective(const RayleighSumProblem& p, const ComplexVector& x,
                            const std::vector<double>& scale2,
                            const std::vector<double>& scale3) {
  double f = form(p.H1, x);
  for (std::size_t i = 0; i < p.quotients.size(); ++i) {
    const double a = form(p.quotients[i].first, x);
    const double b = form(p.quotients[i].second, x);
    const bool a0 = a <= p.kernel_tol * scale2[i];
    const bool b0 = b <= p.kernel_tol * scale3[i];
    if (b0) {
      if (a0) {
        if (!p.zero_over_zero) return {kInf, true};
        continue;  // 0/0 := 0
      }
      return {kInf, true};  // a/0 with a > 0
    }
    const double q = a / b;
    f += q * q;
  }
  return {f, false};
}

ComplexVector random_unit(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> g;
  ComplexVector v(n);
  for (Index i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  v.normalize();
  return v;
}

}  // namespace

OptResult minimize_rayleigh_sum(const RayleighSumProblem& p,
                                const OptConfig& cfg) {
  const Index n = p.H1.rows();
  if (n == 0 || p.H1.cols() != n)
    throw DimensionError("minimize_rayleigh_sum: bad H1");
  for (const auto& [H2, H3] : p.quotients)
    if (H2.rows() != n || H2.cols() != n || H3.rows() != n || H3.cols() != n)
      throw DimensionError("minimize_rayleigh_sum: quotient size mismatch");

  std::vector<double> scale2, scale3;
  for (const auto& [H2, H3] : p.quotients) {
    scale2.push_back(std::max(1e-300, spectral_norm(H2)));
    scale3.push_back(std::max(1e-300, spectral_norm(H3)));
  }
  auto f = [&](const ComplexVector& x) {
    return eval_objective(p, x, scale2, scale3);
  };

  // SCF coefficient matrix at the current iterate.
  auto scf_matrix = [&](const ComplexVector& x) {
    ComplexMatrix A = p.H1;
    for (std::size_t i = 0; i < p.quotients.size(); ++i) {
      const double b = form(p.quotients[i].second, x);
      if (b <= p.kernel_tol * scale3[i]) continue;
      const double q = form(p.quotients[i].first, x) / b;
      A += (2.0 * q / b) *
           (p.quotients[i].first - q * p.quotients[i].second);
    }
    return A;
  };
  // Euclidean gradient (up to the factor 2), used by the fallback.
  auto gradient = [&](const ComplexVector& x) {
    ComplexVector g = p.H1 * x;
    for (std::size_t i = 0; i < p.quotients.size(); ++i) {
      const double b = form(p.quotients[i].second, x);
      if (b <= p.kernel_tol * scale3[i]) continue;
      const double q = form(p.quotients[i].first, x) / b;
      g += (2.0 * q / b) *
           (p.quotients[i].first * x - q * (p.quotients[i].second * x));
    }
    return g;
  };

  // Multistart pool: eigenvectors of H1 and of sum(H2 - H3), then random.
  std::vector<std::pair<std::string, ComplexVector>> starts;
  {
    const auto e1 = hermitian_eig(hermitian_part(p.H1));
    for (Index k = 0; k < std::min<Index>(3, n); ++k)
      starts.emplace_back("eig(H1)", e1.eigenvectors.col(k));
    if (!p.quotients.empty()) {
      ComplexMatrix D = ComplexMatrix::Zero(n, n);
      for (const auto& [H2, H3] : p.quotients) D += H2 - H3;
      const auto e2 = hermitian_eig(hermitian_part(D));
      for (Index k = 0; k < std::min<Index>(3, n); ++k)
        starts.emplace_back("eig(H2-H3)", e2.eigenvectors.col(k));
    }
    std::mt19937_64 rng(cfg.seed);
    while (static_cast<int>(starts.size()) < cfg.multistarts)
      starts.emplace_back("random", random_unit(rng, n));
  }

  OptResult best;
  int iterations = 0;
  for (const auto& [label, x0] : starts) {
    ComplexVector x = x0;
    auto [fx, rej] = f(x);
    double sigma = 0.0;
    int stalls = 0;
    for (int it = 0; it < cfg.max_iter; ++it) {
      ++iterations;
      const ComplexMatrix A = scf_matrix(x) - sigma * (x * x.adjoint());
      const auto eig = hermitian_eig(hermitian_part(A));
      ComplexVector cand = eig.eigenvectors.col(0);
      auto [fc, rc] = f(cand);
      if (!rc && fc < fx - 1e-15 * (1.0 + std::abs(fx))) {
        x = cand;
        fx = fc;
        sigma *= 0.5;
        stalls = 0;
        continue;
      }
      // Raise the level shift; if that no longer helps, one projected
      // gradient sweep, then give up on this start.
      const double base = std::max(1.0, spectral_norm(A));
      sigma = (sigma == 0.0) ? 0.1 * base : sigma * cfg.shift_growth;
      if (sigma < 1e6 * base && ++stalls < 60) continue;

      bool improved = false;
      ComplexVector g = gradient(x);
      g -= x.dot(g).real() * x;  // tangent projection
      double alpha = 1.0 / std::max(1.0, g.norm());
      for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
        ComplexVector xn = (x - alpha * g).normalized();
        auto [fn, rn] = f(xn);
        if (!rn && fn < fx - 1e-15 * (1.0 + std::abs(fx))) {
          x = xn;
          fx = fn;
          improved = true;
          break;
        }
      }
      if (!improved) break;
      sigma = 0.0;
      stalls = 0;
    }
    if (!rej && fx < best.value) {
      best.value = fx;
      best.minimizer = x;
      // Stationarity residual decides convergence.
      const ComplexMatrix A = scf_matrix(x);
      const ComplexVector Ax = A * x;
      const double mu = x.dot(Ax).real();
      best.converged =
          (Ax - mu * x).norm() <= 1e-8 * std::max(1.0, spectral_norm(A));
    }
    best.multistart_log.emplace_back(label, rej ? kInf : fx);
  }
  best.iterations = iterations;
  if (!best.minimizer.size())
    throw Error("minimize_rayleigh_sum: every start was rejected");
  return best;
}

OptResult minimize_lambda_max_2d(const ComplexMatrix& G,
                                 const ComplexMatrix& H1,
                                 const ComplexMatrix& H2,
                                 const OptConfig& cfg) {
  const Index n = G.rows();
  if (G.cols() != n || H1.rows() != n || H1.cols() != n || H2.rows() != n ||
      H2.cols() != n)
    throw DimensionError("minimize_lambda_max_2d: size mismatch");
  const double sG = std::max(1.0, spectral_norm(G));
  for (const ComplexMatrix* M : {&G, &H1, &H2})
    if (M->size() && hermitian_residual(*M) > 1e-10 * sG)
      throw Error("minimize_lambda_max_2d: inputs must be Hermitian");

  const double s1 = spectral_norm(H1), s2 = spectral_norm(H2);
  const double hscale = std::max(s1, s2);
  const bool use1 = s1 > 1e-14 * std::max(1.0, hscale);
  const bool use2 = s2 > 1e-14 * std::max(1.0, hscale);

  auto indefinite = [&](const ComplexMatrix& M) {
    const auto e = hermitian_eig(hermitian_part(M));
    const double tol = 1e-12 * std::max(1.0, hscale);
    return e.eigenvalues(0) < -tol && e.eigenvalues(n - 1) > tol;
  };
  if (use1 && use2) {
    for (int k = 0; k < 32; ++k) {
      const double th = 2.0 * M_PI * k / 32.0;
      if (!indefinite(std::cos(th) * H1 + std::sin(th) * H2))
        throw Error(
            "minimize_lambda_max_2d: a real combination of H1 and H2 is "
            "semidefinite; the constrained supremum characterization does "
            "not apply");
    }
  } else if (use1 && !indefinite(H1)) {
    throw Error("minimize_lambda_max_2d: H1 is semidefinite");
  } else if (use2 && !indefinite(H2)) {
    throw Error("minimize_lambda_max_2d: H2 is semidefinite");
  }

  struct Eval {
    double f;
    Eigen::Vector2d g;
  };
  auto eval = [&](double t1, double t2) {
    ComplexMatrix M = G;
    if (use1) M += t1 * H1;
    if (use2) M += t2 * H2;
    const auto e = hermitian_eig(hermitian_part(M));
    const ComplexVector v = e.eigenvectors.col(n - 1);
    Eval out;
    out.f = e.eigenvalues(n - 1);
    out.g = Eigen::Vector2d(use1 ? form(H1, v) : 0.0, use2 ? form(H2, v) : 0.0);
    return out;
  };

  OptResult res;
  Eigen::Vector2d t(0.0, 0.0);
  Eval cur = eval(t(0), t(1));
  double scale = 1.0 / std::max(1.0, hscale);
  int it = 0;
  int ray_steps = 0;
  for (; it < 4 * cfg.max_iter; ++it) {
    if (cur.g.norm() <= cfg.subgrad_tol * std::max(1.0, sG)) {
      res.converged = true;
      break;
    }
    bool moved = false;
    // Armijo backtracking along the negative (sub)gradient.
    double alpha = std::max(scale, 1e-12);
    for (int ls = 0; ls < 40; ++ls, alpha *= 0.5) {
      const Eigen::Vector2d tn = t - alpha * cur.g;
      const Eval en = eval(tn(0), tn(1));
      if (en.f < cur.f - 0.25 * alpha * cur.g.squaredNorm()) {
        t = tn;
        cur = en;
        scale = std::min(alpha * 4.0, 1e12);
        moved = true;
        break;
      }
    }
    if (!moved) {
      // Kink: compass search at the current scale.
      static const double dirs[8][2] = {{1, 0},  {-1, 0}, {0, 1},  {0, -1},
                                        {1, 1},  {1, -1}, {-1, 1}, {-1, -1}};
      double bestf = cur.f;
      Eigen::Vector2d bestt = t;
      for (const auto& d : dirs) {
        Eigen::Vector2d tn = t + scale * Eigen::Vector2d(d[0], d[1]);
        if (!use1) tn(0) = 0.0;
        if (!use2) tn(1) = 0.0;
        const Eval en = eval(tn(0), tn(1));
        if (en.f < bestf) {
          bestf = en.f;
          bestt = tn;
        }
      }
      if (bestf < cur.f - cfg.f_decrease_tol * std::max(1.0, std::abs(cur.f))) {
        t = bestt;
        cur = eval(t(0), t(1));
      } else {
        scale *= 0.5;
        if (scale < 1e-13 * (1.0 + t.norm())) {
          res.converged = true;
          break;
        }
      }
    }
    if (t.norm() > 1e9 * std::max(1.0, sG / std::max(hscale, 1e-300))) {
      if (++ray_steps > 1000)
        throw Error("minimize_lambda_max_2d: objective is unbounded below");
    }
  }
  res.value = cur.f;
  res.t1 = t(0);
  res.t2 = t(1);
  res.iterations = it;
  return res;
}

OptResult minimize_over_omega(const std::function<double(double)>& f,
                              const std::vector<double>& seeds,
                              const OptConfig& cfg) {
  std::vector<double> cand(seeds);
  cand.push_back(0.0);
  const double llo = std::log10(cfg.grid_lo), lhi = std::log10(cfg.grid_hi);
  for (int k = 0; k < cfg.grid_per_side; ++k) {
    const double u = (cfg.grid_per_side == 1)
                         ? llo
                         : llo + (lhi - llo) * k / (cfg.grid_per_side - 1);
    cand.push_back(std::pow(10.0, u));
    cand.push_back(-std::pow(10.0, u));
  }
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  const std::size_t nc = cand.size();

  struct Local {
    double value = kInf;
    double omega = 0.0;
  };
  std::vector<Local> locals(nc);
  static const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;

  parallel_for(nc, [&](std::size_t i) {
    const double c = cand[i];
    const double pad = std::max(1.0, std::abs(c));
    double lo = (i == 0) ? c - pad : 0.5 * (cand[i - 1] + c);
    double hi = (i + 1 == nc) ? c + pad : 0.5 * (c + cand[i + 1]);
    const double width = cfg.golden_rel_width * (1.0 + std::abs(c));
    double a = lo, b = hi;
    double x1 = b - invphi * (b - a), x2 = a + invphi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > width) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - invphi * (b - a);
        f1 = f(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + invphi * (b - a);
        f2 = f(x2);
      }
    }
    const double xm = 0.5 * (a + b);
    const double fm = f(xm);
    Local L;
    L.value = fm;
    L.omega = xm;
    // The seed itself is also a candidate; golden section may have slid off
    // a sharp minimum at the bracket center.
    const double fc = f(c);
    if (fc < L.value) {
      L.value = fc;
      L.omega = c;
    }
    locals[i] = L;
  });

  OptResult res;
  res.heuristic = true;
  for (std::size_t i = 0; i < nc; ++i) {
    if (locals[i].value < res.value) {
      res.value = locals[i].value;
      res.omega = locals[i].omega;
    }
  }
  res.converged = std::isfinite(res.value);
  res.iterations = static_cast<int>(nc);
  return res;
}

}  // namespace dhdae
