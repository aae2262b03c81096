#include "casimir/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <string>

#include "casimir/errors.hpp"
#include "casimir/specfun.hpp"

namespace casimir {

namespace {

constexpr double kTwoPi = 6.28318530717958647692528677;

struct SignedLogDet {
  double logabs;
  int sign;
};

template <typename Matrix>
SignedLogDet lu_log_det(const Matrix& m) {
  Eigen::PartialPivLU<Matrix> lu(m);
  const auto& diag = lu.matrixLU().diagonal();
  double logabs = 0.0;
  int sign = lu.permutationP().determinant() > 0 ? +1 : -1;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    const double a = std::abs(diag[i]);
    if (a == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
    logabs += std::log(a);
    if constexpr (std::is_same_v<typename Matrix::Scalar, double>) {
      if (diag[i] < 0) sign = -sign;
    }
  }
  return {logabs, sign};
}

}  // namespace

LogDet log_det_from_blocks(const BoundaryBlocks& blocks, SolveOrder order) {
  ReducedBlocks red = reduce_blocks(blocks);
  const int N = blocks.N;
  LogDet out;

  // Row equilibration.  Scaling row q of (N1, N2) by the same factor is a
  // similarity transformation of N2 P2^-1 P1 N1^-1 (likewise rows of
  // (P1, P2)), so Q is unchanged while the LU conditioning improves greatly
  // when the collocation radii spread the entry magnitudes.
  Eigen::MatrixXd N1 = blocks.N1, N2 = blocks.N2;
  for (int q = 0; q < N; ++q) {
    const double s = std::max(N1.row(q).cwiseAbs().maxCoeff(),
                              N2.row(q).cwiseAbs().maxCoeff());
    if (s > 0) {
      N1.row(q) /= s;
      N2.row(q) /= s;
    }
    const double t = std::max(red.P1.row(q).cwiseAbs().maxCoeff(),
                              red.P2.row(q).cwiseAbs().maxCoeff());
    if (t > 0) {
      red.P1.row(q) /= t;
      red.P2.row(q) /= t;
    }
  }

  Eigen::MatrixXd A(N, N);
  if (order == SolveOrder::P2First) {
    Eigen::PartialPivLU<Eigen::MatrixXd> luP2(red.P2);
    if (!(luP2.rcond() > 1e-14)) out.condition_flag = true;
    const Eigen::MatrixXd X = luP2.solve(red.P1);
    const Eigen::MatrixXd B = N2 * X;
    Eigen::PartialPivLU<Eigen::MatrixXd> luN1t(N1.transpose());
    if (!(luN1t.rcond() > 1e-14)) out.condition_flag = true;
    A = luN1t.solve(B.transpose()).transpose();
  } else {
    Eigen::PartialPivLU<Eigen::MatrixXd> luN1t(N1.transpose());
    if (!(luN1t.rcond() > 1e-14)) out.condition_flag = true;
    const Eigen::MatrixXd W = luN1t.solve(red.P1.transpose()).transpose();
    Eigen::PartialPivLU<Eigen::MatrixXd> luP2(red.P2);
    if (!(luP2.rcond() > 1e-14)) out.condition_flag = true;
    A = N2 * luP2.solve(W);
  }

  const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(N, N) - A;
  const SignedLogDet d = lu_log_det(M);
  out.value = d.logabs;
  out.sign = d.sign;
  if (!std::isfinite(out.value)) out.condition_flag = true;
  return out;
}

LogDet log_Q(const SceneConfig& scene, const SpectralPoint& sp,
             const SceneMeshes& meshes) {
  return log_det_from_blocks(build_blocks(scene, sp, meshes));
}

LogDet log_Q(const SceneConfig& scene, const SpectralPoint& sp) {
  return log_Q(scene, sp, sample_scene(scene));
}

namespace {

// Shared scan skeleton.  fn(lambda) -> (ln|det|, sign); sign = 0 means the
// determinant carries no usable sign (MFS).
EigenvalueList scan_determinant(
    const std::function<SignedLogDet(double)>& fn, double lo, double hi,
    const ScanOptions& opts, EigenMethod method) {
  if (!(lo > 0) || !(hi > lo))
    throw ScanError("eigen scan requires 0 < lambda_min < lambda_max");
  const int n = std::max(8, static_cast<int>(std::ceil((hi - lo) / opts.step)));
  std::vector<double> x(n + 1), g(n + 1);
  std::vector<int> s(n + 1);
  for (int i = 0; i <= n; ++i) {
    x[i] = lo + (hi - lo) * i / n;
    const auto d = fn(x[i]);
    g[i] = d.logabs;
    s[i] = d.sign;
  }
  const double gmax = *std::max_element(g.begin(), g.end());

  EigenvalueList out;
  out.method = method;

  auto bisect = [&](double a, double b, int sa) {
    while (b - a > opts.refine_tol) {
      const double mid = 0.5 * (a + b);
      const auto d = fn(mid);
      if (d.sign == sa)
        a = mid;
      else
        b = mid;
    }
    return 0.5 * (a + b);
  };
  auto golden = [&](double a, double b) {
    const double invphi = 0.6180339887498949;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    double fc = fn(c).logabs, fd = fn(d).logabs;
    while (b - a > opts.refine_tol) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = fn(c).logabs;
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = fn(d).logabs;
      }
    }
    return 0.5 * (a + b);
  };

  // Sign changes.  Every cell is checked on an 8-fold subdivided sign
  // sequence: an unresolved pair of simple roots inside one cell flips the
  // sign twice and would otherwise be invisible from the endpoints alone.
  std::vector<bool> sign_cell(n, false);
  const bool have_signs = s[0] != 0;
  for (int i = 0; i < n && have_signs; ++i) {
    int changes = 0;
    int prev = s[i];
    double a = x[i], b = x[i + 1];
    int sa = s[i];
    double suba = x[i];
    for (int k = 1; k <= 8; ++k) {
      const double xx = x[i] + (x[i + 1] - x[i]) * k / 8.0;
      const int sk = (k == 8) ? s[i + 1] : fn(xx).sign;
      if (sk != 0 && sk != prev) {
        ++changes;
        a = suba;
        b = xx;
        sa = prev;
        prev = sk;
      }
      suba = xx;
    }
    if (changes > 1)
      throw ScanError("two eigenvalue crossings inside one scan cell near "
                      "lambda = " + std::to_string(x[i]) +
                      "; use a finer scan step");
    if (changes == 0) continue;
    sign_cell[i] = true;
    const double root = bisect(a, b, sa);
    out.values.push_back(root);
    out.residuals.push_back(std::exp(fn(root).logabs - gmax));
  }

  // Sharp minima of the surrogate (even-multiplicity roots).
  for (int i = 1; i < n; ++i) {
    if (g[i] >= g[i - 1] || g[i] >= g[i + 1]) continue;
    if (sign_cell[i - 1] || sign_cell[i]) continue;
    const double m = golden(x[i - 1], x[i + 1]);
    const double gm = fn(m).logabs;
    const double edge = std::min(g[i - 1], g[i + 1]);
    if (gm - edge > std::log(opts.dip_threshold)) continue;  // shallow dip
    out.values.push_back(m);
    out.residuals.push_back(std::exp(gm - gmax));
  }

  // Sort and merge near-duplicates.
  std::vector<int> idx(out.values.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(),
            [&](int a, int b) { return out.values[a] < out.values[b]; });
  EigenvalueList sorted;
  sorted.method = method;
  for (int id : idx) {
    if (!sorted.values.empty() &&
        out.values[id] - sorted.values.back() < 1e2 * opts.refine_tol)
      continue;
    sorted.values.push_back(out.values[id]);
    sorted.residuals.push_back(out.residuals[id]);
  }
  return sorted;
}

}  // namespace

EigenvalueList eigen_scan_pmm(const CurveSpec& curve, BoundaryCondition bc,
                              double lambda_min, double lambda_max, int S,
                              ScanOptions opts) {
  validate(curve);
  const int N = 2 * S + 1;
  const SampledBoundary mesh = sample_curve(curve, Placement{}, N);

  auto det_at = [&](double lambda) -> SignedLogDet {
    Eigen::MatrixXd D(N, N);
    for (int q = 0; q < N; ++q) {
      const double r = mesh.radii[q];
      const double theta = mesh.angles[q];
      const auto J = specfun_detail::bessel_J_all(S + 1, lambda * r);
      if (bc == BoundaryCondition::Dirichlet) {
        for (int j = 0; j < N; ++j)
          D(q, j) = J[basis_mode(j, S)] * basis_angular(j, S, theta);
      } else {
        // Radial Neumann datum, matching the block assembly convention.
        for (int j = 0; j < N; ++j) {
          const int m = basis_mode(j, S);
          const double jp =
              (m == 0) ? -J[1] : 0.5 * (J[m - 1] - J[m + 1]);
          D(q, j) = lambda * jp * basis_angular(j, S, theta);
        }
      }
    }
    return lu_log_det(D);
  };

  return scan_determinant(det_at, lambda_min, lambda_max, opts,
                          EigenMethod::PMM);
}

EigenvalueList eigen_scan_mfs(const CurveSpec& curve, double lambda_min,
                              double lambda_max, int S, double source_scale,
                              ScanOptions opts) {
  validate(curve);
  if (!(source_scale > 1.0))
    throw ConfigError("MFS source_scale must be > 1 (sources outside Sigma)");
  const int N = 2 * S + 1;
  const SampledBoundary mesh = sample_curve(curve, Placement{}, N);
  std::vector<Vec2> sources(N);
  for (int j = 0; j < N; ++j) {
    const double theta = kTwoPi * j / N;
    const double r = source_scale * curve_radius(curve, theta);
    sources[j] = {r * std::cos(theta), r * std::sin(theta)};
  }

  double worst_cond = 0.0;
  auto det_at = [&](double lambda) -> SignedLogDet {
    Eigen::MatrixXcd D(N, N);
    for (int q = 0; q < N; ++q) {
      for (int j = 0; j < N; ++j) {
        const double dx = mesh.points[q].x - sources[j].x;
        const double dy = mesh.points[q].y - sources[j].y;
        const double d = lambda * std::hypot(dx, dy);
        // Fundamental solution (i/4) H0^(1); the constant factor drops out
        // of the determinant root structure.
        D(q, j) = std::complex<double>(specfun_detail::bessel_J_all(0, d)[0],
                                       bessel_Y0(d));
      }
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(D);
    const auto& diag = lu.matrixLU().diagonal();
    double logabs = 0.0, dmax = -1e300, dmin = 1e300;
    for (int i = 0; i < N; ++i) {
      const double a = std::abs(diag[i]);
      if (a == 0.0) return {-std::numeric_limits<double>::infinity(), 0};
      logabs += std::log(a);
      dmax = std::max(dmax, std::log(a));
      dmin = std::min(dmin, std::log(a));
    }
    worst_cond = std::max(worst_cond, dmax - dmin);
    return {logabs, 0};
  };

  EigenvalueList out = scan_determinant(det_at, lambda_min, lambda_max, opts,
                                        EigenMethod::MFS);
  out.conditioning_warning = worst_cond > std::log(1e13);
  return out;
}

}  // namespace casimir
