#include "casimir/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "casimir/errors.hpp"

namespace casimir {

namespace {

constexpr double kTwoPi = 6.28318530717958647692528677;

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0) w += kTwoPi;
  return w;
}

// Signed angular difference a-b folded into (-pi, pi].
double ang_diff(double a, double b) {
  double d = std::remainder(a - b, kTwoPi);
  return d;
}

Vec2 rotate(const Vec2& v, double c, double s) {
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

}  // namespace

bool Placement::is_identity() const {
  return offset_x == 0.0 && offset_y == 0.0 && wrap_angle(rotation) == 0.0;
}

double SampledBoundary::min_radius() const {
  return *std::min_element(radii.begin(), radii.end());
}
double SampledBoundary::max_radius() const {
  return *std::max_element(radii.begin(), radii.end());
}
double SampledBoundary::mean_radius() const {
  double s = 0.0;
  for (double r : radii) s += r;
  return s / static_cast<double>(radii.size());
}

void validate(const CurveSpec& spec) {
  std::visit(
      [](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Circle>) {
          if (!(c.radius > 0)) throw GeometryError("circle radius must be > 0");
        } else if constexpr (std::is_same_v<T, CorrugatedCircle>) {
          if (!(c.radius > 0))
            throw GeometryError("corrugated circle radius must be > 0");
          if (!(std::fabs(c.amplitude) < c.radius))
            throw GeometryError("corrugation amplitude |h| must be < radius");
          if (c.frequency < 1)
            throw GeometryError("corrugation frequency must be a positive integer");
        } else {
          if (!(c.semiminor > 0) || !(c.semimajor > 0))
            throw GeometryError("ellipse semiaxes must be > 0");
          if (c.semiminor > c.semimajor)
            throw GeometryError("ellipse requires semiminor <= semimajor");
        }
      },
      spec);
}

double curve_radius(const CurveSpec& spec, double theta) {
  return std::visit(
      [theta](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return c.radius;
        } else if constexpr (std::is_same_v<T, CorrugatedCircle>) {
          return c.radius + c.amplitude * std::sin(c.frequency * theta + c.phase);
        } else {
          const double ct = c.semimajor * std::cos(theta);
          const double st = c.semiminor * std::sin(theta);
          return c.semiminor * c.semimajor / std::sqrt(ct * ct + st * st);
        }
      },
      spec);
}

double curve_radius_deriv(const CurveSpec& spec, double theta) {
  return std::visit(
      [theta](const auto& c) -> double {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, Circle>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, CorrugatedCircle>) {
          return c.amplitude * c.frequency *
                 std::cos(c.frequency * theta + c.phase);
        } else {
          const double b1 = c.semiminor, b2 = c.semimajor;
          const double g = b2 * b2 * std::cos(theta) * std::cos(theta) +
                           b1 * b1 * std::sin(theta) * std::sin(theta);
          const double gp = (b1 * b1 - b2 * b2) * std::sin(2.0 * theta);
          return -0.5 * b1 * b2 * gp / (g * std::sqrt(g));
        }
      },
      spec);
}

Vec2 outward_normal(const CurveSpec& spec, double theta) {
  // grad F with F(r,theta) = r - f(theta):  n ~ rhat - (f'/f) thetahat
  const double f = curve_radius(spec, theta);
  const double fp = curve_radius_deriv(spec, theta);
  const double c = std::cos(theta), s = std::sin(theta);
  const double t = fp / f;
  Vec2 n{c + t * s, s - t * c};  // rhat - t*thetahat
  const double norm = std::hypot(n.x, n.y);
  return {n.x / norm, n.y / norm};
}

double placed_radius(const CurveSpec& spec, const Placement& placement,
                     double theta) {
  if (placement.offset_x == 0.0 && placement.offset_y == 0.0)
    return curve_radius(spec, theta - placement.rotation);
  // General case: intersect the ray from the origin with the placed curve.
  const Placement& pl = placement;
  const double cr = std::cos(pl.rotation), sr = std::sin(pl.rotation);
  auto point_at = [&](double psi) {
    const double f = curve_radius(spec, psi);
    Vec2 p = rotate({f * std::cos(psi), f * std::sin(psi)}, cr, sr);
    return Vec2{p.x + pl.offset_x, p.y + pl.offset_y};
  };
  auto angle_at = [&](double psi) {
    const Vec2 p = point_at(psi);
    return std::atan2(p.y, p.x);
  };
  const int grid = 2048;
  double prev = angle_at(0.0);
  double lo = -1.0, hi = -1.0;
  for (int i = 1; i <= grid; ++i) {
    const double psi = kTwoPi * i / grid;
    const double cur = angle_at(psi);
    const double step = ang_diff(cur, prev);
    if (!(step > 0))
      throw GeometryError(
          "curve is not star-shaped about the inner-cylinder center near "
          "angle " + std::to_string(wrap_angle(cur)));
    if (ang_diff(theta, prev) >= 0 && ang_diff(theta, cur) < 0 && lo < 0) {
      lo = kTwoPi * (i - 1) / grid;
      hi = psi;
    }
    prev = cur;
  }
  if (lo < 0)
    throw GeometryError("ray/curve intersection bracket not found (origin "
                        "outside the placed curve?)");
  for (int it = 0; it < 64; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (ang_diff(theta, angle_at(mid)) >= 0)
      lo = mid;
    else
      hi = mid;
  }
  const Vec2 p = point_at(0.5 * (lo + hi));
  return std::hypot(p.x, p.y);
}

SampledBoundary sample_curve(const CurveSpec& spec, const Placement& placement,
                             int n) {
  validate(spec);
  if (n < 3) throw GeometryError("sample_curve requires n >= 3");
  SampledBoundary sb;
  sb.count = n;
  sb.points.resize(n);
  sb.angles.resize(n);
  sb.radii.resize(n);
  sb.normals.resize(n);

  const bool pure_rotation =
      (placement.offset_x == 0.0 && placement.offset_y == 0.0);
  const double cr = std::cos(placement.rotation);
  const double sr = std::sin(placement.rotation);

  if (pure_rotation) {
    for (int k = 0; k < n; ++k) {
      const double theta = kTwoPi * k / n;
      const double psi = theta - placement.rotation;
      const double r = curve_radius(spec, psi);
      if (!(r > 0)) throw GeometryError("curve radius not positive");
      sb.angles[k] = theta;
      sb.radii[k] = r;
      sb.points[k] = {r * std::cos(theta), r * std::sin(theta)};
      sb.normals[k] = rotate(outward_normal(spec, psi), cr, sr);
    }
    return sb;
  }

  // Offset placement: walk the curve parameter psi, checking the star-shape
  // condition, and solve angle(P(psi)) = theta_k for each collocation angle.
  auto point_at = [&](double psi) {
    const double f = curve_radius(spec, psi);
    Vec2 p = rotate({f * std::cos(psi), f * std::sin(psi)}, cr, sr);
    return Vec2{p.x + placement.offset_x, p.y + placement.offset_y};
  };
  const int grid = 4096;
  std::vector<double> psis(grid + 1), phis(grid + 1);
  double unwrapped = std::atan2(point_at(0.0).y, point_at(0.0).x);
  psis[0] = 0.0;
  phis[0] = unwrapped;
  for (int i = 1; i <= grid; ++i) {
    const double psi = kTwoPi * i / grid;
    const Vec2 p = point_at(psi);
    const double step = ang_diff(std::atan2(p.y, p.x), phis[i - 1]);
    if (!(step > 0))
      throw GeometryError(
          "curve is not star-shaped about the inner-cylinder center near "
          "angle " + std::to_string(wrap_angle(phis[i - 1])));
    psis[i] = psi;
    phis[i] = phis[i - 1] + step;
  }
  // Winding number must be exactly one.
  if (std::fabs((phis[grid] - phis[0]) - kTwoPi) > 1e-9)
    throw GeometryError("placed curve does not wind once about the origin");

  for (int k = 0; k < n; ++k) {
    const double theta = kTwoPi * k / n;
    // Continuous target angle in [phis[0], phis[0] + 2pi).
    double target = phis[0] + wrap_angle(theta - phis[0]);
    const auto it = std::upper_bound(phis.begin(), phis.end(), target);
    int idx = static_cast<int>(it - phis.begin());
    idx = std::clamp(idx, 1, grid);
    double lo = psis[idx - 1], hi = psis[idx];
    for (int iter = 0; iter < 64; ++iter) {
      const double mid = 0.5 * (lo + hi);
      const Vec2 p = point_at(mid);
      if (ang_diff(std::atan2(p.y, p.x), theta) <= 0)
        lo = mid;
      else
        hi = mid;
    }
    const double psi = 0.5 * (lo + hi);
    const Vec2 p = point_at(psi);
    sb.angles[k] = theta;
    sb.points[k] = p;
    sb.radii[k] = std::hypot(p.x, p.y);
    sb.normals[k] = rotate(outward_normal(spec, psi), cr, sr);
  }
  return sb;
}

}  // namespace casimir
