#pragma once

#include <variant>
#include <vector>

namespace casimir {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// Parametric cross-section curves, polar form r(theta) about the curve center.
struct Circle {
  double radius;
};

struct CorrugatedCircle {
  double radius;
  double amplitude;   // h, |h| < radius
  int frequency;      // nu
  double phase = 0.0; // phi
};

struct Ellipse {
  double semiminor;  // b1 (along x)
  double semimajor;  // b2 (along y), b1 <= b2
};

using CurveSpec = std::variant<Circle, CorrugatedCircle, Ellipse>;

// Rigid placement of a curve: offset of the curve center plus rotation,
// both expressed in the inner-cylinder frame (the coordinate origin is
// always the inner-cylinder center).
struct Placement {
  double offset_x = 0.0;
  double offset_y = 0.0;
  double rotation = 0.0;  // normalized to [0, 2pi)

  bool is_identity() const;
};

// Collocation mesh on one curve: n points at uniformly spaced polar angles
// about the inner-cylinder center, with true outward unit normals.
struct SampledBoundary {
  std::vector<Vec2> points;
  std::vector<double> angles;   // strictly increasing in [0, 2pi)
  std::vector<double> radii;    // |point|, radial coordinate about the origin
  std::vector<Vec2> normals;    // outward unit normals of the placed curve
  int count = 0;

  double min_radius() const;
  double max_radius() const;
  double mean_radius() const;
};

void validate(const CurveSpec& spec);

// Polar radius of the curve in its own frame.
double curve_radius(const CurveSpec& spec, double theta);
// d r(theta) / d theta in the curve frame.
double curve_radius_deriv(const CurveSpec& spec, double theta);

// True outward unit normal at polar angle theta (curve frame), from the
// gradient of F(r,theta) = r - r_curve(theta).
Vec2 outward_normal(const CurveSpec& spec, double theta);

// Sample n collocation points at angles theta_k = 2 pi k / n about the
// inner-cylinder center.  Throws GeometryError when the placed curve is not
// star-shaped about that center.
SampledBoundary sample_curve(const CurveSpec& spec, const Placement& placement,
                             int n);

// Radius of the placed curve seen from the origin at polar angle theta
// (solves the ray/curve intersection for non-identity placements).
double placed_radius(const CurveSpec& spec, const Placement& placement,
                     double theta);

}  // namespace casimir
