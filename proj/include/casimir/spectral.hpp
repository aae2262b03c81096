#pragma once

#include <vector>

#include "casimir/assembly.hpp"

namespace casimir {

struct LogDet {
  double value = 0.0;        // ln |det|
  int sign = +1;
  bool condition_flag = false;
};

enum class SolveOrder { P2First, N1First };

// ln Q with Q = det(1 - N2 P2^-1 P1 N1^-1); all inverses applied as
// columnwise linear solves with partial pivoting.
LogDet log_det_from_blocks(const BoundaryBlocks& blocks,
                           SolveOrder order = SolveOrder::P2First);

LogDet log_Q(const SceneConfig& scene, const SpectralPoint& sp,
             const SceneMeshes& meshes);
// Convenience overload that samples the meshes itself.
LogDet log_Q(const SceneConfig& scene, const SpectralPoint& sp);

enum class EigenMethod { PMM, MFS };

struct EigenvalueList {
  std::vector<double> values;     // strictly increasing
  std::vector<double> residuals;  // |det| surrogate at each root
  EigenMethod method = EigenMethod::PMM;
  bool conditioning_warning = false;
};

struct ScanOptions {
  double step = 0.005;          // grid spacing of the initial scan
  double refine_tol = 1e-9;     // final bracket width
  double dip_threshold = 1e-6;  // |det| drop required to accept a minimum
};

// Real-axis Helmholtz eigenvalues of a single closed curve by collocation
// with the free-space J_m basis; sign changes are bisected, sharp minima of
// the determinant surrogate (double roots) are localized by golden section.
EigenvalueList eigen_scan_pmm(const CurveSpec& curve, BoundaryCondition bc,
                              double lambda_min, double lambda_max, int S,
                              ScanOptions opts = {});

// Method of fundamental solutions, Dirichlet only; point sources on the
// scaled curve r = source_scale * r_curve(theta).  The dip threshold is
// looser than the PMM default because the attainable determinant floor is
// set by the (intentionally ill-conditioned) source basis.
EigenvalueList eigen_scan_mfs(const CurveSpec& curve, double lambda_min,
                              double lambda_max, int S,
                              double source_scale = 1.5, ScanOptions opts = {
                                  0.005, 1e-9, 5e-2});

}  // namespace casimir
