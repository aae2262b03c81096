#include "casimir/energy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "casimir/errors.hpp"
#include "casimir/spectral.hpp"

namespace casimir {

namespace quadrature_detail {

void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 0; k < n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k + 1.0) * x * p1 - k * p2) / (k + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    weights[n - 1 - i] = weights[i];
  }
}

}  // namespace quadrature_detail

namespace {

constexpr double kPi = 3.14159265358979323846264338;

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr eptr;
  std::mutex emtx;
  auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(emtx);
        if (!eptr) eptr = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int nt = std::min(threads, n);
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (eptr) std::rethrow_exception(eptr);
}

struct QuadNode {
  double y;       // abscissa
  double weight;  // includes panel jacobian
};

// Composite panels on [0, ymax] with edges clustered quadratically toward 0
// (the integrand peaks near y ~ 1/gap and decays exponentially).
std::vector<QuadNode> radial_plan(double ymax, int panels, int nodes) {
  std::vector<double> gx, gw;
  quadrature_detail::gauss_legendre(nodes, gx, gw);
  std::vector<QuadNode> plan;
  plan.reserve(panels * nodes);
  for (int p = 0; p < panels; ++p) {
    const double a = ymax * std::pow(double(p) / panels, 2.0);
    const double b = ymax * std::pow(double(p + 1) / panels, 2.0);
    for (int k = 0; k < nodes; ++k)
      plan.push_back({0.5 * (a + b) + 0.5 * (b - a) * gx[k],
                      0.5 * (b - a) * gw[k]});
  }
  return plan;
}

std::vector<QuadNode> panel_plan(const std::vector<double>& edges, int nodes) {
  std::vector<double> gx, gw;
  quadrature_detail::gauss_legendre(nodes, gx, gw);
  std::vector<QuadNode> plan;
  for (size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p], b = edges[p + 1];
    for (int k = 0; k < nodes; ++k)
      plan.push_back({0.5 * (a + b) + 0.5 * (b - a) * gx[k],
                      0.5 * (b - a) * gw[k]});
  }
  return plan;
}

// Angular panels on [0, pi/2]: uniform away from the kz axis, geometric
// refinement toward pi/2 where lambda1/lambda2 varies on scale sqrt(eps2/eps1).
std::vector<double> angular_edges(int base_panels, double eps1, double eps2) {
  const double W = 0.4;
  const double wmin =
      std::max(1e-6, 0.05 * std::sqrt(eps2 / std::max(eps1, 1.0)));
  std::vector<double> edges;
  for (int i = 0; i <= base_panels; ++i)
    edges.push_back((0.5 * kPi - W) * i / base_panels);
  double w = 0.5 * W;
  while (w > wmin) {
    edges.push_back(0.5 * kPi - w);
    w *= 0.5;
  }
  edges.push_back(0.5 * kPi);
  return edges;
}

struct NodeEval {
  double log_q = 0.0;
  bool flagged = false;
  std::string diag;
};

NodeEval eval_log_q(const SceneConfig& scene, const SceneMeshes& meshes,
                    double xi, double kz) {
  NodeEval e;
  try {
    const SpectralPoint sp = SpectralPoint::make(xi, kz, scene.eps1, scene.eps2);
    const LogDet d = log_Q(scene, sp, meshes);
    // Q = sign * exp(value); the energy path expects Q in (0, 1].
    e.log_q = d.value;
    // Deep in the exponential tail the collocation radii span several decay
    // lengths and the block solves are legitimately ill-conditioned, but Q
    // itself is already indistinguishable from 1.  Accept a condition-flagged
    // node when the computed |lnQ| sits below the tail decay bound
    // exp(-gap * lambda); a corrupted solve would not land there.
    const double lam = std::hypot(xi, kz);
    const bool benign_tail =
        d.sign == +1 &&
        std::fabs(d.value) < std::min(1e-6, std::exp(-meshes.gap_min * lam));
    if (d.sign != +1 || (d.condition_flag && !benign_tail) ||
        e.log_q > 1e-8) {
      e.flagged = true;
      e.diag = "node (xi=" + std::to_string(xi) + ", kz=" + std::to_string(kz) +
               "): sign=" + std::to_string(d.sign) +
               " lnQ=" + std::to_string(e.log_q) +
               (d.condition_flag ? " [ill-conditioned]" : "");
    }
  } catch (const SpectralPointError& ex) {
    e.flagged = true;
    e.diag = ex.what();
  }
  return e;
}

// Integrate f = y lnQ over a radial plan; flagged nodes trigger panel-free
// local subdivision (re-evaluate at two shifted points) before giving up.
struct PathIntegral {
  double value = 0.0;
  long nodes = 0;
  double worst_log_q = -1e300;
};

PathIntegral integrate_radial(const SceneConfig& scene,
                              const SceneMeshes& meshes,
                              const std::vector<QuadNode>& plan, int threads) {
  std::vector<NodeEval> evals(plan.size());
  parallel_for(static_cast<int>(plan.size()), threads, [&](int i) {
    evals[i] = eval_log_q(scene, meshes, plan[i].y, 0.0);
  });
  PathIntegral out;
  for (size_t i = 0; i < plan.size(); ++i) {
    if (evals[i].flagged) {
      // Removable node: subdivide around it by averaging nearby evaluations.
      const double h = 1e-4 * std::max(plan[i].y, 1.0);
      const NodeEval lo = eval_log_q(scene, meshes, plan[i].y - h, 0.0);
      const NodeEval hi = eval_log_q(scene, meshes, plan[i].y + h, 0.0);
      if (lo.flagged || hi.flagged)
        throw NumericalError("persistent flagged quadrature node: " +
                             evals[i].diag);
      evals[i].log_q = 0.5 * (lo.log_q + hi.log_q);
      evals[i].flagged = false;
      out.nodes += 2;
    }
    out.value += plan[i].weight * plan[i].y * evals[i].log_q;
    out.worst_log_q = std::max(out.worst_log_q, evals[i].log_q);
    ++out.nodes;
  }
  return out;
}

double tail_bound(double log_q_at_ymax_abs, double ymax, double gap) {
  // With lnQ ~ -C e^{-2 g y}:  Int_ymax^inf y |lnQ| dy
  return log_q_at_ymax_abs * (ymax / (2.0 * gap) + 1.0 / (4.0 * gap * gap));
}

}  // namespace

double auto_y_max(const SceneMeshes& meshes) {
  const double gap = meshes.gap_min;
  const double a = meshes.inner.mean_radius();
  return std::max(40.0 / gap, 20.0 / a);
}

EnergyResult energy_conductor(const SceneConfig& scene,
                              const QuadratureSpec& quad, int threads) {
  if (scene.inner_kind == InnerKind::DielectricInterface)
    throw ConfigError("energy_conductor requires a perfect-conductor inner curve");
  const SceneMeshes meshes = sample_scene(scene);
  const double ymax = quad.y_max > 0 ? quad.y_max : auto_y_max(meshes);
  const double gap = meshes.gap_min;

  const auto coarse_plan = radial_plan(ymax, quad.panels, quad.nodes_per_panel);
  const auto fine_plan = radial_plan(ymax, quad.panels, 2 * quad.nodes_per_panel);
  const PathIntegral coarse = integrate_radial(scene, meshes, coarse_plan, threads);
  const PathIntegral fine = integrate_radial(scene, meshes, fine_plan, threads);

  const NodeEval tail_node = eval_log_q(scene, meshes, ymax, 0.0);

  EnergyResult res;
  res.energy = fine.value / (4.0 * kPi);
  res.refinement_delta = (fine.value - coarse.value) / (4.0 * kPi);
  res.error_estimate = std::fabs(res.refinement_delta) +
                       tail_bound(std::fabs(tail_node.log_q), ymax, gap) /
                           (4.0 * kPi);
  res.S_used = scene.truncation;
  res.N_used = scene.points_per_curve;
  res.node_count = coarse.nodes + fine.nodes + 1;
  res.worst_log_q = std::max(coarse.worst_log_q, fine.worst_log_q);
  if (std::fabs(res.refinement_delta) >
      quad.refinement_tolerance * std::max(std::fabs(res.energy), 1e-12))
    res.flags.push_back("refinement tolerance not reached");
  return res;
}

EnergyResult energy_dielectric(const SceneConfig& scene,
                               const QuadratureSpec& radial,
                               const QuadratureSpec& angular, int threads) {
  if (scene.inner_kind != InnerKind::DielectricInterface)
    throw ConfigError("energy_dielectric requires a DielectricInterface scene");
  const SceneMeshes meshes = sample_scene(scene);
  const double ymax = radial.y_max > 0 ? radial.y_max : auto_y_max(meshes);
  const double gap = meshes.gap_min;
  const auto phi_edges = angular_edges(angular.panels, scene.eps1, scene.eps2);

  auto run = [&](int rn, int an) {
    const auto rplan = radial_plan(ymax, radial.panels, rn);
    const auto aplan = panel_plan(phi_edges, an);
    struct Cell { double xi, kz, w; };
    std::vector<Cell> cells;
    cells.reserve(rplan.size() * aplan.size());
    for (const auto& rp : rplan)
      for (const auto& ap : aplan)
        cells.push_back({rp.y * std::cos(ap.y), rp.y * std::sin(ap.y),
                         rp.weight * ap.weight * rp.y});
    std::vector<NodeEval> evals(cells.size());
    parallel_for(static_cast<int>(cells.size()), threads, [&](int i) {
      evals[i] = eval_log_q(scene, meshes, cells[i].xi, cells[i].kz);
    });
    PathIntegral out;
    for (size_t i = 0; i < cells.size(); ++i) {
      if (evals[i].flagged)
        throw NumericalError("flagged quadrature node: " + evals[i].diag);
      out.value += cells[i].w * evals[i].log_q;
      out.worst_log_q = std::max(out.worst_log_q, evals[i].log_q);
      ++out.nodes;
    }
    return out;
  };

  const PathIntegral coarse = run(radial.nodes_per_panel, angular.nodes_per_panel);
  const PathIntegral fine =
      run(2 * radial.nodes_per_panel, 2 * angular.nodes_per_panel);

  // Radial tail, bounded by the worst |lnQ| on the arc y = ymax.
  double tail_lq = 0.0;
  for (double phi : {0.0, 0.7, 1.4, 0.5 * kPi}) {
    const NodeEval e = eval_log_q(scene, meshes, ymax * std::cos(phi),
                                  ymax * std::sin(phi));
    tail_lq = std::max(tail_lq, std::fabs(e.log_q));
  }

  EnergyResult res;
  const double norm = 1.0 / (2.0 * kPi * kPi);
  res.energy = fine.value * norm;
  res.refinement_delta = (fine.value - coarse.value) * norm;
  res.error_estimate =
      std::fabs(res.refinement_delta) +
      (0.5 * kPi) * tail_bound(tail_lq, ymax, gap) * norm;
  res.S_used = scene.truncation;
  res.N_used = scene.points_per_curve;
  res.node_count = coarse.nodes + fine.nodes + 4;
  res.worst_log_q = std::max(coarse.worst_log_q, fine.worst_log_q);
  return res;
}

double energy_dielectric_cartesian(const SceneConfig& scene,
                                   const QuadratureSpec& quad_xi,
                                   const QuadratureSpec& quad_kz,
                                   int threads) {
  const SceneMeshes meshes = sample_scene(scene);
  const double xmax = quad_xi.y_max > 0 ? quad_xi.y_max : auto_y_max(meshes);
  const double kmax = quad_kz.y_max > 0 ? quad_kz.y_max : auto_y_max(meshes);
  const auto xplan = radial_plan(xmax, quad_xi.panels, quad_xi.nodes_per_panel);
  const auto kplan = radial_plan(kmax, quad_kz.panels, quad_kz.nodes_per_panel);
  struct Cell { double xi, kz, w; };
  std::vector<Cell> cells;
  for (const auto& xp : xplan)
    for (const auto& kp : kplan)
      cells.push_back({xp.y, kp.y, xp.weight * kp.weight});
  std::vector<NodeEval> evals(cells.size());
  parallel_for(static_cast<int>(cells.size()), threads, [&](int i) {
    evals[i] = eval_log_q(scene, meshes, cells[i].xi, cells[i].kz);
  });
  double sum = 0.0;
  for (size_t i = 0; i < cells.size(); ++i) {
    if (evals[i].flagged)
      throw NumericalError("flagged quadrature node: " + evals[i].diag);
    sum += cells[i].w * evals[i].log_q;
  }
  return sum / (2.0 * kPi * kPi);
}

double torque(const SceneConfig& scene, double phi0, double delta,
              const QuadratureSpec& quad, int threads) {
  const auto* outer = std::get_if<CorrugatedCircle>(&scene.outer);
  const auto* inner = std::get_if<CorrugatedCircle>(&scene.inner);
  if (!outer || !inner)
    throw ConfigError("torque requires corrugated inner and outer curves");
  if (outer->frequency != inner->frequency)
    throw ConfigError("torque requires a common corrugation frequency");
  if (!(delta > 0)) throw ConfigError("torque step delta must be > 0");

  auto energy_at = [&](double phase) {
    SceneConfig s = scene;
    std::get<CorrugatedCircle>(s.outer).phase = phase;
    return energy_conductor(s, quad, threads).energy;
  };
  return -(energy_at(phi0 + delta) - energy_at(phi0 - delta)) / (2.0 * delta);
}

SweepTable sweep(const SceneConfig& templ, SweepParameter param,
                 const std::vector<double>& grid, const QuadratureSpec& quad,
                 int threads) {
  if (grid.size() >= 2) {
    const bool increasing = grid[1] > grid[0];
    for (size_t i = 1; i < grid.size(); ++i)
      if ((grid[i] > grid[i - 1]) != increasing || grid[i] == grid[i - 1])
        throw ConfigError("sweep grid must be strictly monotone");
  }

  SweepTable table;
  switch (param) {
    case SweepParameter::Phi0: table.parameter = "phi0"; break;
    case SweepParameter::EpsY: table.parameter = "eps_y"; break;
    case SweepParameter::EpsX: table.parameter = "eps_x"; break;
    case SweepParameter::Amplitude: table.parameter = "h"; break;
    case SweepParameter::Eps1: table.parameter = "eps1"; break;
  }
  table.values = grid;
  table.results.reserve(grid.size());

  for (double v : grid) {
    SceneConfig s = templ;
    switch (param) {
      case SweepParameter::Phi0: {
        auto* c = std::get_if<CorrugatedCircle>(&s.outer);
        if (!c) throw ConfigError("phi0 sweep requires a corrugated outer curve");
        c->phase = v;
        break;
      }
      case SweepParameter::EpsY:
        // eps_y positions the inner cylinder relative to the outer center;
        // the origin stays at the inner center, so the outer curve moves by -v.
        s.outer_placement.offset_y = -v;
        break;
      case SweepParameter::EpsX:
        s.outer_placement.offset_x = -v;
        break;
      case SweepParameter::Amplitude: {
        auto* co = std::get_if<CorrugatedCircle>(&s.outer);
        auto* ci = std::get_if<CorrugatedCircle>(&s.inner);
        if (!co || !ci)
          throw ConfigError("amplitude sweep requires corrugated curves");
        co->amplitude = v;
        ci->amplitude = v;
        break;
      }
      case SweepParameter::Eps1:
        s.eps1 = v;
        break;
    }
    try {
      if (s.inner_kind == InnerKind::DielectricInterface)
        table.results.push_back(energy_dielectric(s, quad, quad, threads));
      else
        table.results.push_back(energy_conductor(s, quad, threads));
    } catch (const ConfigError& e) {
      throw ConfigError("sweep aborted at " + table.parameter + " = " +
                        std::to_string(v) + ": " + e.what());
    } catch (const GeometryError& e) {
      throw ConfigError("sweep aborted at " + table.parameter + " = " +
                        std::to_string(v) + ": " + e.what());
    }
  }
  return table;
}

CosFit cos_fit(const SweepTable& table) {
  const size_t n = table.values.size();
  if (n < 8)
    throw ConfigError("cos_fit needs at least 8 sample points");
  // Normal equations for E = offset + amplitude cos(phi0).
  double s1 = 0, sc = 0, scc = 0, se = 0, sec = 0;
  for (size_t i = 0; i < n; ++i) {
    const double c = std::cos(table.values[i]);
    const double e = table.results[i].energy;
    s1 += 1.0;
    sc += c;
    scc += c * c;
    se += e;
    sec += e * c;
  }
  const double det = s1 * scc - sc * sc;
  CosFit fit;
  fit.offset = (se * scc - sec * sc) / det;
  fit.amplitude = (s1 * sec - sc * se) / det;
  double rss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double r = table.results[i].energy - fit.offset -
                     fit.amplitude * std::cos(table.values[i]);
    rss += r * r;
  }
  fit.residual_rms = std::sqrt(rss / n);
  return fit;
}

}  // namespace casimir
