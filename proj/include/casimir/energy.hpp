#pragma once

#include <functional>
#include <string>
#include <vector>

#include "casimir/assembly.hpp"

namespace casimir {

struct QuadratureSpec {
  int panels = 12;
  int nodes_per_panel = 12;
  double y_max = 0.0;  // 0 -> chosen from the scene's minimum gap
  double refinement_tolerance = 1e-6;
};

// y_max = max(40/gap, 20/a) so the tail bound e^{-2 y_max gap} is negligible.
double auto_y_max(const SceneMeshes& meshes);

struct EnergyResult {
  double energy = 0.0;          // units L/a^2
  double error_estimate = 0.0;  // refinement delta + truncated tail bound
  int S_used = 0;
  int N_used = 0;
  long node_count = 0;
  double worst_log_q = -1e300;  // max ln Q seen on the path (should be <= 0)
  double refinement_delta = 0.0;
  std::vector<std::string> flags;
};

// E a^2/L = (1/4pi) Int_0^ymax y ln Q(iy) dy for perfect-conductor scenes
// (Dirichlet -> TM, Neumann -> TE), composite Gauss-Legendre with one
// node-doubling refinement.
EnergyResult energy_conductor(const SceneConfig& scene,
                              const QuadratureSpec& quad, int threads = 1);

// Dielectric inner interface: E a^2/L = (1/4pi^2) Int dxi Int dkz ln Q,
// taken as twice the kz >= 0 quadrant and evaluated in polar spectral
// coordinates (radial spec = first argument, angular spec = second; the
// angular panels refine geometrically toward the kz axis where the
// lambda1/lambda2 ratio varies fastest).
EnergyResult energy_dielectric(const SceneConfig& scene,
                               const QuadratureSpec& radial,
                               const QuadratureSpec& angular, int threads = 1);

// Cartesian evaluation of the same quadrant integral (isotropy cross-check).
double energy_dielectric_cartesian(const SceneConfig& scene,
                                   const QuadratureSpec& quad_xi,
                                   const QuadratureSpec& quad_kz,
                                   int threads = 1);

// Casimir torque -dE/dphi0 by central differences on the outer corrugation
// phase; both curves must be corrugated with a common frequency.
double torque(const SceneConfig& scene, double phi0, double delta,
              const QuadratureSpec& quad, int threads = 1);

enum class SweepParameter { Phi0, EpsY, EpsX, Amplitude, Eps1 };

struct SweepTable {
  std::string parameter;
  std::vector<double> values;
  std::vector<EnergyResult> results;
};

SweepTable sweep(const SceneConfig& templ, SweepParameter param,
                 const std::vector<double>& grid, const QuadratureSpec& quad,
                 int threads = 1);

struct CosFit {
  double amplitude = 0.0;
  double offset = 0.0;
  double residual_rms = 0.0;
};

// Least-squares fit E(phi0) = offset + amplitude * cos(phi0).
CosFit cos_fit(const SweepTable& table);

namespace quadrature_detail {

// Gauss-Legendre nodes/weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights);

}  // namespace quadrature_detail

}  // namespace casimir
