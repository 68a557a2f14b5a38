#pragma once

#include <Eigen/Core>

namespace chaowork {

using Vec2 = Eigen::Vector2d;

inline constexpr double kTolGeom = 1e-10;
inline constexpr double kWallNudge = 1e-12;
inline constexpr double kTolGrazing = 1e-12;

enum class Wall { bottom, top, left, right, arc };

/// Desymmetrized (quarter) stadium: the rectangle [0,l]x[0,r] joined to the
/// quarter disk of radius r centred at (l,0). The bounding box is
/// [0,l+r]x[0,r]. With `rectangle_only` the arc is dropped and the domain is
/// the plain rectangle [0,l]x[0,r] (used to check the quantum grid against
/// analytic Dirichlet eigenvalues).
struct BilliardGeometry {
  double radius = 1.0;
  double length = 1.0;
  bool rectangle_only = false;

  Vec2 arc_center() const { return {length, 0.0}; }
  double x_extent() const { return rectangle_only ? length : length + radius; }
  double y_extent() const { return radius; }
};

struct BoundaryHit {
  Vec2 point;
  double path_length = 0.0;
  Vec2 inward_normal;
  Wall wall = Wall::bottom;
  bool corner = false;  // two walls within kTolGeom; normal is their bisector
};

/// Throws RangeError unless r > 0 and l >= 0 (l > 0 for the rectangle).
void validate(const BilliardGeometry& geom);

bool contains(const BilliardGeometry& geom, const Vec2& q);

/// Closed-region test with slack, for points that sit on a wall.
bool contains_closed(const BilliardGeometry& geom, const Vec2& q, double tol = kTolGeom);

double area(const BilliardGeometry& geom);

double perimeter(const BilliardGeometry& geom);

/// Nearest wall hit along a ray with path length > kTolGeom.
BoundaryHit first_hit(const BilliardGeometry& geom, const Vec2& origin, const Vec2& direction);

/// Specular reflection d - 2(d.n)n. Grazing rays (|d.n| < kTolGrazing) are
/// reflected anyway and reported once through warn_once.
Vec2 reflect(const Vec2& direction, const Vec2& inward_normal);

}  // namespace chaowork
