#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>

#include "chaowork/errors.hpp"
#include "chaowork/geometry.hpp"
#include "chaowork/rng.hpp"

using namespace chaowork;
using std::numbers::pi;

namespace {

const BilliardGeometry kStadium{};

// Dense ray march: first step whose end point leaves the open domain.
double march(const BilliardGeometry& g, Vec2 q, const Vec2& d, double step) {
  double s = 0.0;
  while (contains(g, q + step * d)) {
    q += step * d;
    s += step;
  }
  return s + 0.5 * step;
}

}  // namespace

TEST_CASE("containment") {
  CHECK(contains(kStadium, {0.5, 0.5}));
  CHECK_FALSE(contains(kStadium, {3.0, 0.5}));
  const double f = 1.0 - 1e-9;
  const Vec2 q(1.0 + std::cos(pi / 4) * f, std::sin(pi / 4) * f);
  // exact circle equation as the oracle
  CHECK(std::hypot(q.x() - 1.0, q.y()) < 1.0);
  CHECK(contains(kStadium, q));
  CHECK_FALSE(contains(kStadium, {1.0 + std::cos(pi / 4) * (1 + 1e-9), std::sin(pi / 4) * (1 + 1e-9)}));
  CHECK_FALSE(contains(kStadium, {0.5, 0.0}));
  CHECK(contains_closed(kStadium, {0.5, 0.0}));
}

TEST_CASE("area and perimeter") {
  CHECK(area(kStadium) == doctest::Approx(1.0 + pi / 4).epsilon(1e-15));
  CHECK(area({1.0, 0.0}) == doctest::Approx(pi / 4).epsilon(1e-15));
  CHECK(area({2.0, 3.0}) == doctest::Approx(6.0 + pi).epsilon(1e-15));
  CHECK(perimeter(kStadium) == doctest::Approx(4.0 + pi / 2).epsilon(1e-15));
  CHECK_THROWS_AS(validate(BilliardGeometry{-1.0, 1.0}), Error);
}

TEST_CASE("first hit on a flat wall") {
  const BoundaryHit h = first_hit(kStadium, {0.5, 0.5}, {0.0, -1.0});
  CHECK(h.point.x() == doctest::Approx(0.5));
  CHECK(h.point.y() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(h.path_length == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(h.wall == Wall::bottom);
  CHECK(h.inward_normal.isApprox(Vec2(0.0, 1.0)));
}

TEST_CASE("rays from the arc centre hit the arc at distance r") {
  for (double theta : {0.1, 0.4, pi / 4, 1.2, 1.5}) {
    const BoundaryHit h = first_hit(kStadium, {1.0 + 1e-9, 1e-9}, {std::cos(theta), std::sin(theta)});
    CHECK(h.wall == Wall::arc);
    CHECK(h.path_length == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("first hit agrees with a ray march") {
  const Vec2 d = Vec2(1.0, 1.0).normalized();
  const BoundaryHit h = first_hit(kStadium, {0.2, 0.4}, d);
  CHECK(std::abs(h.path_length - march(kStadium, {0.2, 0.4}, d, 1e-6)) < 1e-5);

  CounterRng rng(11, 0);
  for (int i = 0; i < 20; ++i) {
    Vec2 q;
    do q = Vec2(2.0 * rng.uniform(), rng.uniform());
    while (!contains(kStadium, q));
    const double a = 2.0 * pi * rng.uniform();
    const Vec2 dir(std::cos(a), std::sin(a));
    const BoundaryHit hit = first_hit(kStadium, q, dir);
    CHECK(std::abs(hit.path_length - march(kStadium, q, dir, 1e-5)) < 2e-5);
  }
}

TEST_CASE("hit points satisfy their wall equation") {
  CounterRng rng(5, 0);
  for (int i = 0; i < 2000; ++i) {
    Vec2 q;
    do q = Vec2(2.0 * rng.uniform(), rng.uniform());
    while (!contains(kStadium, q));
    const double a = 2.0 * pi * rng.uniform();
    const BoundaryHit h = first_hit(kStadium, q, {std::cos(a), std::sin(a)});
    const Vec2 p = h.point;
    double residual = 0.0;
    switch (h.wall) {
      case Wall::bottom: residual = std::abs(p.y()); break;
      case Wall::top: residual = std::abs(p.y() - 1.0) + (p.x() > 1.0 + kTolGeom); break;
      case Wall::left: residual = std::abs(p.x()); break;
      case Wall::right: residual = 1.0; break;
      case Wall::arc: residual = std::abs(std::hypot(p.x() - 1.0, p.y()) - 1.0); break;
    }
    CHECK(residual <= kTolGeom);
    CHECK(std::abs(h.inward_normal.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("specular reflection") {
  const Vec2 r = reflect(Vec2(1.0, -1.0).normalized(), {0.0, 1.0});
  CHECK(r.isApprox(Vec2(1.0, 1.0).normalized(), 1e-15));
  const Vec2 n = Vec2(0.3, 0.7).normalized();
  CHECK(reflect(-n, n).isApprox(n, 1e-15));

  using big = boost::multiprecision::cpp_bin_float_50;
  CounterRng rng(3, 0);
  for (int i = 0; i < 1000; ++i) {
    const double a = 2.0 * pi * rng.uniform(), b = 2.0 * pi * rng.uniform();
    Vec2 d(std::cos(a), std::sin(a));
    Vec2 nn(std::cos(b), std::sin(b));
    if (d.dot(nn) > 0.0) d = -d;
    const Vec2 out = reflect(d, nn);
    CHECK(std::abs(out.norm() - 1.0) < 1e-12);
    // extended-precision d - 2 (d.n) n
    const big dn = big(d.x()) * big(nn.x()) + big(d.y()) * big(nn.y());
    const big ex = big(d.x()) - 2 * dn * big(nn.x());
    const big ey = big(d.y()) - 2 * dn * big(nn.y());
    CHECK(std::abs(out.x() - ex.convert_to<double>()) < 1e-15);
    CHECK(std::abs(out.y() - ey.convert_to<double>()) < 1e-15);
    // tangential component preserved
    const Vec2 t(-nn.y(), nn.x());
    CHECK(std::abs(out.dot(t) - d.dot(t)) < 1e-12);
    CHECK(out.dot(nn) > 0.0);
  }
}

TEST_CASE("grazing rays are reflected, not rejected") {
  const Vec2 d = Vec2(1.0, -1e-14).normalized();
  const Vec2 r = reflect(d, {0.0, 1.0});
  CHECK(r.y() > 0.0);
  CHECK(std::abs(r.norm() - 1.0) < 1e-12);
}

TEST_CASE("corner hits use the bisector normal") {
  // straight into the (0,0) corner
  const BoundaryHit h = first_hit(kStadium, {0.5, 0.5}, Vec2(-1.0, -1.0).normalized());
  CHECK(h.corner);
  CHECK(h.inward_normal.isApprox(Vec2(1.0, 1.0).normalized(), 1e-12));
}

TEST_CASE("a long bounce sequence stays in the closed region") {
  Vec2 q(0.31, 0.47);
  Vec2 d = Vec2(0.8, 0.6);
  for (int i = 0; i < 20000; ++i) {
    const BoundaryHit h = first_hit(kStadium, q, d);
    REQUIRE(contains_closed(kStadium, h.point));
    d = reflect(d, h.inward_normal).normalized();
    q = h.point + kWallNudge * h.inward_normal;
  }
}
