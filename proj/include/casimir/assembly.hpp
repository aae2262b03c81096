#pragma once

#include <Eigen/Dense>

#include "casimir/geometry.hpp"

namespace casimir {

enum class BoundaryCondition { Dirichlet, Neumann };

enum class InnerKind {
  PerfectConductorDirichlet,
  PerfectConductorNeumann,
  DielectricInterface,
};

struct SceneConfig {
  CurveSpec outer;
  Placement outer_placement;
  CurveSpec inner;
  BoundaryCondition bc_outer = BoundaryCondition::Dirichlet;
  InnerKind inner_kind = InnerKind::PerfectConductorDirichlet;
  double eps1 = 1.0;  // region I permittivity (inside the inner curve)
  double eps2 = 1.0;  // region II permittivity (annular region)
  int truncation = 15;       // S; basis modes m = -S..S
  int points_per_curve = 31; // N, must equal 2S+1
};

void validate(const SceneConfig& scene);

struct SceneMeshes {
  SampledBoundary outer;
  SampledBoundary inner;
  double gap_min = 0.0;  // min over angle of r_outer - r_inner
};

SceneMeshes sample_scene(const SceneConfig& scene);

// Spectral point on the rotated (imaginary-frequency) axis: omega = i xi.
// lambda1/lambda2 are the imaginary-axis magnitudes of lambda^(I), lambda^(II).
struct SpectralPoint {
  double xi = 0.0;
  double kz = 0.0;
  double lambda1 = 0.0;  // sqrt(eps1 xi^2 + kz^2)
  double lambda2 = 0.0;  // sqrt(eps2 xi^2 + kz^2)

  static SpectralPoint make(double xi, double kz, double eps1, double eps2);
};

// Per-column log-scale references (the ledger).  Entry (q, j) of each stored
// block is the true matrix entry times exp(-col_log_*[j]); references are
// shared between the blocks multiplying the same coefficient vector, so they
// cancel identically inside Q = det(1 - N2 P2^-1 P1 N1^-1).
struct BlockLedger {
  Eigen::VectorXd col_log_B;  // columns of N1, M1, M1', P1 (I-type basis)
  Eigen::VectorXd col_log_C;  // columns of N2, M2, M2', P2 (K-type basis)
  Eigen::VectorXd col_log_A;  // columns of R1, R2 (region-I basis)
};

struct BoundaryBlocks {
  int S = 0;
  int N = 0;
  double lambda1 = 0.0, lambda2 = 0.0;
  bool dielectric = false;

  Eigen::MatrixXd N1, N2;        // outer-curve condition blocks
  Eigen::MatrixXd M1, M2;        // inner-curve region-II value blocks
  Eigen::MatrixXd M1p, M2p;      // region-II derivative blocks (dielectric)
  Eigen::MatrixXd R1, R2;        // region-I value/derivative blocks (dielectric)
  BlockLedger ledger;
};

// Real angular basis: j = 0 -> 1, j = 1..S -> cos(j theta),
// j = S+1..2S -> sin((j-S) theta).  Mode index of column j:
int basis_mode(int j, int S);
double basis_angular(int j, int S, double theta);
double basis_angular_deriv(int j, int S, double theta);

void build_outer_blocks(const SceneConfig& scene, const SpectralPoint& sp,
                        const SampledBoundary& mesh_outer, BoundaryBlocks& out);

void build_inner_conductor_blocks(const SceneConfig& scene,
                                  const SpectralPoint& sp,
                                  const SampledBoundary& mesh_inner,
                                  BoundaryBlocks& out);

void build_inner_interface_blocks(const SceneConfig& scene,
                                  const SpectralPoint& sp,
                                  const SampledBoundary& mesh_inner,
                                  BoundaryBlocks& out);

// All blocks for the scene at one spectral point.
BoundaryBlocks build_blocks(const SceneConfig& scene, const SpectralPoint& sp,
                            const SceneMeshes& meshes);

struct ReducedBlocks {
  Eigen::MatrixXd P1, P2;
};

// P1 = M1 - R1 R2^-1 M1', P2 = M2 - R1 R2^-1 M2' (columnwise solves; the
// inverse is never formed).  Perfect-conductor blocks pass through unchanged.
ReducedBlocks reduce_blocks(const BoundaryBlocks& blocks);

}  // namespace casimir
