#include "casimir/assembly.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "casimir/errors.hpp"
#include "casimir/specfun.hpp"

namespace casimir {

namespace {

double checked_exp(double logval) {
  if (logval > 700.0)
    throw SpectralPointError("matrix entry overflows after scaling (log = " +
                             std::to_string(logval) + ")");
  return std::exp(logval);
}

bool is_circle(const CurveSpec& c) { return std::holds_alternative<Circle>(c); }

// Fills the per-column ledger if the caller has not done so.
void ensure_ledger(BoundaryBlocks& b, double ref_r_outer, double ref_r_inner) {
  const int N = b.N;
  if (b.ledger.col_log_B.size() == N) return;
  const int S = b.S;
  const auto liB = specfun_detail::log_bessel_I(S, b.lambda2 * ref_r_outer);
  const auto lkC = specfun_detail::log_bessel_K(S, b.lambda2 * ref_r_inner);
  b.ledger.col_log_B.resize(N);
  b.ledger.col_log_C.resize(N);
  for (int j = 0; j < N; ++j) {
    const int m = basis_mode(j, S);
    b.ledger.col_log_B[j] = liB[m];
    b.ledger.col_log_C[j] = lkC[m];
  }
  if (b.dielectric) {
    const auto liA = specfun_detail::log_bessel_I(S, b.lambda1 * ref_r_inner);
    b.ledger.col_log_A.resize(N);
    for (int j = 0; j < N; ++j)
      b.ledger.col_log_A[j] = liA[basis_mode(j, S)];
  }
}

}  // namespace

int basis_mode(int j, int S) { return j <= S ? j : j - S; }

double basis_angular(int j, int S, double theta) {
  if (j == 0) return 1.0;
  if (j <= S) return std::cos(j * theta);
  return std::sin((j - S) * theta);
}

double basis_angular_deriv(int j, int S, double theta) {
  if (j == 0) return 0.0;
  if (j <= S) return -j * std::sin(j * theta);
  return (j - S) * std::cos((j - S) * theta);
}

void validate(const SceneConfig& scene) {
  validate(scene.outer);
  validate(scene.inner);
  if (scene.truncation < 1)
    throw ConfigError("truncation S must be a positive integer");
  if (scene.points_per_curve != 2 * scene.truncation + 1)
    throw ConfigError("points_per_curve must equal 2S+1 (square collocation)");
  if (scene.eps1 < 1.0 || scene.eps2 < 1.0)
    throw ConfigError("permittivities must be >= 1");
  if (scene.inner_kind == InnerKind::DielectricInterface) {
    if (scene.eps1 < scene.eps2)
      throw ConfigError("dielectric interface requires eps1 >= eps2");
    if (!is_circle(scene.inner))
      throw ConfigError(
          "dielectric interface supported on circular inner curves only "
          "(the continuity conditions are written with radial derivatives)");
  }
  // Inner curve strictly inside the outer curve, on a fine angular grid.
  const int grid = 720;
  for (int i = 0; i < grid; ++i) {
    const double theta = 2.0 * M_PI * i / grid;
    const double ri = curve_radius(scene.inner, theta);
    const double ro = placed_radius(scene.outer, scene.outer_placement, theta);
    if (!(ro > ri))
      throw ConfigError("inner curve is not strictly inside the outer curve "
                        "at angle " + std::to_string(theta));
  }
}

SceneMeshes sample_scene(const SceneConfig& scene) {
  validate(scene);
  SceneMeshes m;
  m.outer = sample_curve(scene.outer, scene.outer_placement,
                         scene.points_per_curve);
  m.inner = sample_curve(scene.inner, Placement{}, scene.points_per_curve);
  double gap = std::numeric_limits<double>::max();
  const int grid = 720;
  for (int i = 0; i < grid; ++i) {
    const double theta = 2.0 * M_PI * i / grid;
    const double ri = curve_radius(scene.inner, theta);
    const double ro = placed_radius(scene.outer, scene.outer_placement, theta);
    gap = std::min(gap, ro - ri);
  }
  m.gap_min = gap;
  return m;
}

SpectralPoint SpectralPoint::make(double xi, double kz, double eps1,
                                  double eps2) {
  if (xi < 0 || kz < 0 || (xi == 0 && kz == 0))
    throw SpectralPointError("spectral point must have xi, kz >= 0, not both 0");
  SpectralPoint sp;
  sp.xi = xi;
  sp.kz = kz;
  sp.lambda1 = std::sqrt(eps1 * xi * xi + kz * kz);
  sp.lambda2 = std::sqrt(eps2 * xi * xi + kz * kz);
  return sp;
}

namespace {

// One curve's worth of value/derivative blocks for the region-II basis.
// kind: Dirichlet -> values, Neumann -> outward-normal derivatives.
void fill_region2_blocks(const SampledBoundary& mesh, double lambda2,
                         BoundaryCondition kind, int S,
                         const Eigen::VectorXd& refB,
                         const Eigen::VectorXd& refC,
                         Eigen::MatrixXd& blockI, Eigen::MatrixXd& blockK) {
  const int N = 2 * S + 1;
  blockI.resize(N, N);
  blockK.resize(N, N);
  for (int q = 0; q < N; ++q) {
    const double r = mesh.radii[q];
    const double x = lambda2 * r;
    const double theta = mesh.angles[q];
    const auto li = specfun_detail::log_bessel_I(S, x);
    const auto lk = specfun_detail::log_bessel_K(S, x);
    if (kind == BoundaryCondition::Dirichlet) {
      for (int j = 0; j < N; ++j) {
        const int m = basis_mode(j, S);
        const double ang = basis_angular(j, S, theta);
        blockI(q, j) = checked_exp(li[m] - refB[j]) * ang;
        blockK(q, j) = checked_exp(lk[m] - refC[j]) * ang;
      }
    } else {
      // Neumann rows use the radial derivative, the same datum the interface
      // continuity rows are written with.  Projecting the full gradient on
      // the true normal adds a tangential term that ruins the convergence of
      // the exterior expansion once the boundary slope h nu / r approaches
      // unity, while the radial datum stays stable on the same scenes.
      std::vector<double> lip, lkp;
      specfun_detail::log_bessel_derivs(S, x, lip, lkp);
      for (int j = 0; j < N; ++j) {
        const int m = basis_mode(j, S);
        const double ang = basis_angular(j, S, theta);
        blockI(q, j) = lambda2 * checked_exp(lip[m] - refB[j]) * ang;
        blockK(q, j) = -lambda2 * checked_exp(lkp[m] - refC[j]) * ang;
      }
    }
  }
}

}  // namespace

void build_outer_blocks(const SceneConfig& scene, const SpectralPoint& sp,
                        const SampledBoundary& mesh_outer,
                        BoundaryBlocks& out) {
  if (!(sp.lambda2 > 0))
    throw SpectralPointError("degenerate spectral point: lambda2 = 0");
  out.S = scene.truncation;
  out.N = scene.points_per_curve;
  out.lambda1 = sp.lambda1;
  out.lambda2 = sp.lambda2;
  out.dielectric = scene.inner_kind == InnerKind::DielectricInterface;
  ensure_ledger(out, mesh_outer.mean_radius(), mesh_outer.mean_radius());
  fill_region2_blocks(mesh_outer, sp.lambda2, scene.bc_outer, out.S,
                      out.ledger.col_log_B, out.ledger.col_log_C, out.N1,
                      out.N2);
}

void build_inner_conductor_blocks(const SceneConfig& scene,
                                  const SpectralPoint& sp,
                                  const SampledBoundary& mesh_inner,
                                  BoundaryBlocks& out) {
  if (!(sp.lambda2 > 0))
    throw SpectralPointError("degenerate spectral point: lambda2 = 0");
  const auto kind = scene.inner_kind == InnerKind::PerfectConductorNeumann
                        ? BoundaryCondition::Neumann
                        : BoundaryCondition::Dirichlet;
  out.S = scene.truncation;
  out.N = scene.points_per_curve;
  out.lambda1 = sp.lambda1;
  out.lambda2 = sp.lambda2;
  ensure_ledger(out, mesh_inner.mean_radius(), mesh_inner.mean_radius());
  fill_region2_blocks(mesh_inner, sp.lambda2, kind, out.S,
                      out.ledger.col_log_B, out.ledger.col_log_C, out.M1,
                      out.M2);
}

void build_inner_interface_blocks(const SceneConfig& scene,
                                  const SpectralPoint& sp,
                                  const SampledBoundary& mesh_inner,
                                  BoundaryBlocks& out) {
  if (scene.inner_kind != InnerKind::DielectricInterface)
    throw ConfigError("interface blocks require a DielectricInterface scene");
  if (!(sp.lambda2 > 0) || !(sp.lambda1 > 0))
    throw SpectralPointError("degenerate spectral point on the interface");
  out.S = scene.truncation;
  out.N = scene.points_per_curve;
  out.lambda1 = sp.lambda1;
  out.lambda2 = sp.lambda2;
  out.dielectric = true;
  const int S = out.S, N = out.N;
  ensure_ledger(out, mesh_inner.mean_radius(), mesh_inner.mean_radius());
  // Value continuity rows: R1 A = M1 B + M2 C.  Derivative continuity rows
  // carry the factor lambda2/lambda1 on the region-II side.
  const double ratio = sp.lambda2 / sp.lambda1;
  out.R1.resize(N, N);
  out.R2.resize(N, N);
  out.M1.resize(N, N);
  out.M2.resize(N, N);
  out.M1p.resize(N, N);
  out.M2p.resize(N, N);
  for (int p = 0; p < N; ++p) {
    const double r = mesh_inner.radii[p];
    const double theta = mesh_inner.angles[p];
    const double x1 = sp.lambda1 * r, x2 = sp.lambda2 * r;
    const auto li1 = specfun_detail::log_bessel_I(S, x1);
    const auto li2 = specfun_detail::log_bessel_I(S, x2);
    const auto lk2 = specfun_detail::log_bessel_K(S, x2);
    std::vector<double> lip1, lkp1, lip2, lkp2;
    specfun_detail::log_bessel_derivs(S, x1, lip1, lkp1);
    specfun_detail::log_bessel_derivs(S, x2, lip2, lkp2);
    for (int j = 0; j < N; ++j) {
      const int m = basis_mode(j, S);
      const double ang = basis_angular(j, S, theta);
      out.R1(p, j) = checked_exp(li1[m] - out.ledger.col_log_A[j]) * ang;
      out.R2(p, j) = checked_exp(lip1[m] - out.ledger.col_log_A[j]) * ang;
      out.M1(p, j) = checked_exp(li2[m] - out.ledger.col_log_B[j]) * ang;
      out.M2(p, j) = checked_exp(lk2[m] - out.ledger.col_log_C[j]) * ang;
      out.M1p(p, j) =
          ratio * checked_exp(lip2[m] - out.ledger.col_log_B[j]) * ang;
      out.M2p(p, j) =
          -ratio * checked_exp(lkp2[m] - out.ledger.col_log_C[j]) * ang;
    }
  }
}

BoundaryBlocks build_blocks(const SceneConfig& scene, const SpectralPoint& sp,
                            const SceneMeshes& meshes) {
  if (!(sp.lambda2 > 0))
    throw SpectralPointError("degenerate spectral point: lambda2 = 0");
  BoundaryBlocks b;
  b.S = scene.truncation;
  b.N = scene.points_per_curve;
  b.lambda1 = sp.lambda1;
  b.lambda2 = sp.lambda2;
  b.dielectric = scene.inner_kind == InnerKind::DielectricInterface;
  ensure_ledger(b, meshes.outer.mean_radius(), meshes.inner.mean_radius());
  build_outer_blocks(scene, sp, meshes.outer, b);
  if (b.dielectric)
    build_inner_interface_blocks(scene, sp, meshes.inner, b);
  else
    build_inner_conductor_blocks(scene, sp, meshes.inner, b);
  return b;
}

ReducedBlocks reduce_blocks(const BoundaryBlocks& blocks) {
  ReducedBlocks red;
  if (!blocks.dielectric) {
    red.P1 = blocks.M1;
    red.P2 = blocks.M2;
    return red;
  }
  if (blocks.lambda1 == blocks.lambda2) {
    // Equal media: the region-I and region-II regular bases coincide, so
    // M1 - R1 R2^-1 M1' cancels identically.
    red.P1 = Eigen::MatrixXd::Zero(blocks.N, blocks.N);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(blocks.R2);
    red.P2 = blocks.M2 - blocks.R1 * lu.solve(blocks.M2p);
    return red;
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(blocks.R2);
  const double rc = lu.rcond();
  if (!(rc > 1e-12))
    throw SpectralPointError("R2 block ill-conditioned (rcond = " +
                             std::to_string(rc) + ")");
  red.P1 = blocks.M1 - blocks.R1 * lu.solve(blocks.M1p);
  red.P2 = blocks.M2 - blocks.R1 * lu.solve(blocks.M2p);
  return red;
}

}  // namespace casimir
