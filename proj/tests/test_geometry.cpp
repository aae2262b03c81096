#include <cmath>

#include "casimir/errors.hpp"
#include "casimir/geometry.hpp"
#include "doctest.h"

using namespace casimir;

namespace {

constexpr double kPi = 3.14159265358979323846;

Vec2 point_on(const CurveSpec& spec, double theta) {
  const double r = curve_radius(spec, theta);
  return {r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace

TEST_CASE("circle sampling: four cardinal points") {
  const CurveSpec c = Circle{2.0};
  const SampledBoundary mesh = sample_curve(c, Placement{}, 4);
  REQUIRE(mesh.count == 4);
  CHECK(mesh.points[0].x == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(mesh.points[0].y == doctest::Approx(0.0).scale(1).epsilon(1e-14));
  CHECK(mesh.points[1].x == doctest::Approx(0.0).scale(1).epsilon(1e-14));
  CHECK(mesh.points[1].y == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(mesh.points[2].x == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(mesh.points[3].y == doctest::Approx(-2.0).epsilon(1e-14));
  for (int q = 0; q < 4; ++q) {
    CHECK(mesh.radii[q] == doctest::Approx(2.0).epsilon(1e-14));
    // Outward normal of a centered circle is radial.
    CHECK(mesh.normals[q].x ==
          doctest::Approx(mesh.points[q].x / 2.0).scale(1).epsilon(1e-14));
    CHECK(mesh.normals[q].y ==
          doctest::Approx(mesh.points[q].y / 2.0).scale(1).epsilon(1e-14));
  }
}

TEST_CASE("corrugated circle with h = 0 degenerates to the circle") {
  const CurveSpec c = Circle{1.3};
  const CurveSpec cc = CorrugatedCircle{1.3, 0.0, 3, 0.7};
  for (int i = 0; i < 32; ++i) {
    const double theta = 2.0 * kPi * i / 32;
    CHECK(curve_radius(cc, theta) == curve_radius(c, theta));
    CHECK(curve_radius_deriv(cc, theta) == 0.0);
    const Vec2 n1 = outward_normal(cc, theta);
    const Vec2 n2 = outward_normal(c, theta);
    CHECK(n1.x == doctest::Approx(n2.x).scale(1).epsilon(1e-15));
    CHECK(n1.y == doctest::Approx(n2.y).scale(1).epsilon(1e-15));
  }
}

TEST_CASE("ellipse polar form: axes points and normal tilt") {
  // semiminor along x, semimajor along y.
  const CurveSpec e = Ellipse{4.0, 4.33};
  CHECK(curve_radius(e, 0.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(curve_radius(e, kPi / 2) == doctest::Approx(4.33).epsilon(1e-14));
  CHECK(curve_radius(e, kPi) == doctest::Approx(4.0).epsilon(1e-14));

  // On the axes the normal is radial by symmetry.
  CHECK(outward_normal(e, 0.0).x == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(outward_normal(e, 0.0).y ==
        doctest::Approx(0.0).scale(1).epsilon(1e-14));
  CHECK(outward_normal(e, kPi / 2).y == doctest::Approx(1.0).epsilon(1e-14));

  // Implicit-gradient check off axis: n ~ (x/b1^2, y/b2^2) normalized.
  const double theta = 0.83;
  const Vec2 p = point_on(e, theta);
  double gx = p.x / (4.0 * 4.0), gy = p.y / (4.33 * 4.33);
  const double g = std::hypot(gx, gy);
  gx /= g;
  gy /= g;
  const Vec2 n = outward_normal(e, theta);
  CHECK(n.x == doctest::Approx(gx).epsilon(1e-12));
  CHECK(n.y == doctest::Approx(gy).epsilon(1e-12));
}

TEST_CASE("outward normal agrees with finite differences of the boundary") {
  const CurveSpec specs[] = {CurveSpec(Circle{1.0}),
                             CurveSpec(CorrugatedCircle{2.0, 0.3, 3, 0.4}),
                             CurveSpec(Ellipse{4.0, 4.33})};
  for (const auto& spec : specs) {
    for (int i = 0; i < 64; ++i) {
      const double theta = 2.0 * kPi * i / 64;
      const double d = 1e-6;
      const Vec2 a = point_on(spec, theta - d);
      const Vec2 b = point_on(spec, theta + d);
      // Tangent along increasing theta; outward normal is the tangent
      // rotated by -pi/2 for a counterclockwise-oriented boundary.
      double tx = b.x - a.x, ty = b.y - a.y;
      const double t = std::hypot(tx, ty);
      tx /= t;
      ty /= t;
      const Vec2 n = outward_normal(spec, theta);
      CHECK(std::fabs(n.x * tx + n.y * ty) < 1e-6);  // orthogonal
      CHECK(n.x * ty - n.y * tx > 0);                // outward side
      CHECK(std::hypot(n.x, n.y) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("pure rotation permutes/retargets samples consistently") {
  const CurveSpec cc = CorrugatedCircle{2.0, 0.3, 3, 0.0};
  const int n = 48;
  const SampledBoundary base = sample_curve(cc, Placement{}, n);
  // Rotating by one grid step chi = 2 pi / n: the placed curve at angle
  // theta_k equals the unplaced curve at theta_{k-1}.
  Placement rot;
  rot.rotation = 2.0 * kPi / n;
  const SampledBoundary turned = sample_curve(cc, rot, n);
  for (int k = 0; k < n; ++k) {
    const int src = (k - 1 + n) % n;
    CHECK(turned.radii[k] ==
          doctest::Approx(base.radii[src]).epsilon(1e-12));
    // Normals rotate with the curve.
    const double c = std::cos(rot.rotation), s = std::sin(rot.rotation);
    CHECK(turned.normals[k].x ==
          doctest::Approx(c * base.normals[src].x - s * base.normals[src].y)
              .scale(1)
              .epsilon(1e-12));
    CHECK(turned.normals[k].y ==
          doctest::Approx(s * base.normals[src].x + c * base.normals[src].y)
              .scale(1)
              .epsilon(1e-12));
  }
}

TEST_CASE("offset placement solves the ray intersection") {
  const CurveSpec c = Circle{3.0};
  Placement off;
  off.offset_x = 0.5;
  off.offset_y = -0.25;
  const int n = 33;
  const SampledBoundary mesh = sample_curve(c, off, n);
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * kPi * k / n;
    CHECK(mesh.angles[k] == doctest::Approx(theta).scale(1).epsilon(1e-12));
    // Point lies on the placed circle.
    const double dx = mesh.points[k].x - off.offset_x;
    const double dy = mesh.points[k].y - off.offset_y;
    CHECK(std::hypot(dx, dy) == doctest::Approx(3.0).epsilon(1e-10));
    // Point lies on the ray from the origin.
    CHECK(mesh.points[k].x ==
          doctest::Approx(mesh.radii[k] * std::cos(theta))
              .scale(1)
              .epsilon(1e-10));
    // Normal of the placed circle is radial about its own center.
    CHECK(mesh.normals[k].x == doctest::Approx(dx / 3.0).scale(1).epsilon(1e-10));
    CHECK(mesh.normals[k].y == doctest::Approx(dy / 3.0).scale(1).epsilon(1e-10));
    // placed_radius agrees with the mesh.
    CHECK(placed_radius(c, off, theta) ==
          doctest::Approx(mesh.radii[k]).epsilon(1e-10));
  }
}

TEST_CASE("star-shape validation") {
  // A strongly corrugated curve viewed from a far-off center is not
  // star-shaped about the origin.
  const CurveSpec cc = CorrugatedCircle{1.0, 0.45, 5, 0.0};
  Placement far_off;
  far_off.offset_x = 0.9;
  CHECK_THROWS_AS(sample_curve(cc, far_off, 31), GeometryError);

  // Mild cases must not be rejected.
  Placement mild;
  mild.offset_x = 0.2;
  mild.offset_y = -0.1;
  mild.rotation = 0.3;
  CHECK_NOTHROW(sample_curve(cc, Placement{}, 31));
  CHECK_NOTHROW(sample_curve(CurveSpec(Ellipse{4.0, 4.33}), mild, 31));
  CHECK_NOTHROW(sample_curve(CurveSpec(CorrugatedCircle{2.0, 0.3, 3, 1.1}),
                             mild, 31));
}

TEST_CASE("curve validation errors") {
  CHECK_THROWS_AS(validate(CurveSpec(Circle{0.0})), GeometryError);
  CHECK_THROWS_AS(validate(CurveSpec(Circle{-1.0})), GeometryError);
  CHECK_THROWS_AS(validate(CurveSpec(CorrugatedCircle{1.0, 1.0, 3, 0.0})),
                  GeometryError);
  CHECK_THROWS_AS(validate(CurveSpec(CorrugatedCircle{1.0, 0.2, 0, 0.0})),
                  GeometryError);
  CHECK_THROWS_AS(validate(CurveSpec(Ellipse{4.33, 4.0})), GeometryError);
  CHECK_THROWS_AS(validate(CurveSpec(Ellipse{0.0, 1.0})), GeometryError);
  CHECK_NOTHROW(validate(CurveSpec(Ellipse{4.0, 4.33})));
}
