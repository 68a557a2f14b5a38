#include "chaowork/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "chaowork/errors.hpp"

namespace chaowork {

void validate(const BilliardGeometry& geom) {
  if (!(geom.radius > 0.0) || !std::isfinite(geom.radius))
    throw Error(ErrorKind::RangeError, "radius must be positive and finite");
  if (!(geom.length >= 0.0) || !std::isfinite(geom.length))
    throw Error(ErrorKind::RangeError, "length must be non-negative and finite");
  if (geom.rectangle_only && !(geom.length > 0.0))
    throw Error(ErrorKind::RangeError, "rectangle geometry needs length > 0");
}

bool contains(const BilliardGeometry& geom, const Vec2& q) {
  const double x = q.x(), y = q.y();
  if (!(x > 0.0) || !(y > 0.0) || !(y < geom.radius)) return false;
  if (x < geom.length) return true;
  if (geom.rectangle_only) return false;
  const double dx = x - geom.length;
  return dx * dx + y * y < geom.radius * geom.radius;
}

bool contains_closed(const BilliardGeometry& geom, const Vec2& q, double tol) {
  const double x = q.x(), y = q.y();
  if (x < -tol || y < -tol || y > geom.radius + tol) return false;
  if (x <= geom.length + (geom.rectangle_only ? tol : 0.0)) return true;
  if (geom.rectangle_only) return false;
  const double dx = x - geom.length;
  return std::hypot(dx, y) <= geom.radius + tol;
}

double area(const BilliardGeometry& geom) {
  const double rect = geom.length * geom.radius;
  if (geom.rectangle_only) return rect;
  return rect + std::numbers::pi * geom.radius * geom.radius / 4.0;
}

double perimeter(const BilliardGeometry& geom) {
  if (geom.rectangle_only) return 2.0 * (geom.length + geom.radius);
  // bottom (l + r), left (r), top (l), arc (pi r / 2)
  return 2.0 * geom.length + 2.0 * geom.radius + std::numbers::pi * geom.radius / 2.0;
}

namespace {

struct Candidate {
  double t;
  Wall wall;
  Vec2 normal;
};

}  // namespace

BoundaryHit first_hit(const BilliardGeometry& geom, const Vec2& origin, const Vec2& direction) {
  const double r = geom.radius;
  const double l = geom.length;
  const double ox = origin.x(), oy = origin.y();
  const double dx = direction.x(), dy = direction.y();
  const double slack = kTolGeom;

  std::array<Candidate, 4> found;
  std::size_t count = 0;
  auto add = [&](double t, Wall wall, const Vec2& normal) {
    if (t > kTolGeom && std::isfinite(t)) found[count++] = {t, wall, normal};
  };

  if (dy < 0.0) {
    const double t = -oy / dy;
    const double x = ox + t * dx;
    if (x >= -slack && x <= geom.x_extent() + slack) add(t, Wall::bottom, {0.0, 1.0});
  }
  if (dy > 0.0) {
    const double t = (r - oy) / dy;
    const double x = ox + t * dx;
    if (x >= -slack && x <= l + slack) add(t, Wall::top, {0.0, -1.0});
  }
  if (dx < 0.0) {
    const double t = -ox / dx;
    const double y = oy + t * dy;
    if (y >= -slack && y <= r + slack) add(t, Wall::left, {1.0, 0.0});
  }
  if (geom.rectangle_only) {
    if (dx > 0.0) {
      const double t = (l - ox) / dx;
      const double y = oy + t * dy;
      if (y >= -slack && y <= r + slack) add(t, Wall::right, {-1.0, 0.0});
    }
  } else {
    // Far root of |o + t d - c|^2 = r^2; the near root (if positive) is the
    // ray entering the disk from the rectangle, which is not a wall.
    const double fx = ox - l, fy = oy;
    const double b = fx * dx + fy * dy;
    const double c = fx * fx + fy * fy - r * r;
    const double disc = b * b - c;
    if (disc >= 0.0) {
      const double root = std::sqrt(disc);
      const double t = b > 0.0 ? -c / (b + root) : root - b;
      const double x = ox + t * dx;
      const double y = oy + t * dy;
      if (x >= l - slack && y >= -slack) {
        add(t, Wall::arc, Vec2(l - x, -y) / r);
      }
    }
  }

  if (count == 0) {
    throw Error(ErrorKind::NoHit, "ray from (" + std::to_string(ox) + ", " + std::to_string(oy) +
                                      ") does not reach the billiard boundary");
  }
  std::sort(found.begin(), found.begin() + count,
            [](const Candidate& a, const Candidate& b) { return a.t < b.t; });

  BoundaryHit hit;
  hit.path_length = found[0].t;
  hit.point = origin + found[0].t * direction;
  hit.wall = found[0].wall;
  hit.inward_normal = found[0].normal;
  if (count > 1 && found[1].t - found[0].t < kTolGeom) {
    hit.corner = true;
    hit.inward_normal = (found[0].normal + found[1].normal).normalized();
  }
  return hit;
}

Vec2 reflect(const Vec2& direction, const Vec2& inward_normal) {
  const double dn = direction.dot(inward_normal);
  if (std::abs(dn) < kTolGrazing) {
    warn_once("grazing", "grazing ray reflected (|d.n| below 1e-12); continuing");
  }
  return direction - 2.0 * dn * inward_normal;
}

}  // namespace chaowork
