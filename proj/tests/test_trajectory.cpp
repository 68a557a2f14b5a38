#include <doctest.h>

#include <cmath>
#include <numbers>

#include "chaowork/errors.hpp"
#include "chaowork/sampler.hpp"
#include "chaowork/trajectory.hpp"

using namespace chaowork;

namespace {

const BilliardGeometry kStadium{};
const QuenchPotential kPot{};

// Small-step reference propagator with the wall read off the escape position.
Vec2 march(PhasePoint x, double t, double step) {
  Vec2 q = x.q;
  Vec2 d = x.p.normalized();
  const double speed = 2.0 * x.p.norm();
  double s = speed * t;
  while (s > 0.0) {
    const double h = std::min(step, s);
    const Vec2 next = q + h * d;
    if (contains(kStadium, next)) {
      q = next;
      s -= h;
      continue;
    }
    Vec2 n;
    if (next.y() <= 0.0) n = {0.0, 1.0};
    else if (next.x() <= 0.0) n = {1.0, 0.0};
    else if (next.x() <= 1.0) n = {0.0, -1.0};
    else n = (Vec2(1.0, 0.0) - next).normalized();
    d = d - 2.0 * d.dot(n) * n;
  }
  return q;
}

double simpson_along(const Trajectory& tr, double step) {
  double total = 0.0;
  for (const auto& seg : tr.segments) {
    const double len = seg.speed * seg.duration;
    int m = std::max(2, int(std::ceil(len / step)));
    m += m % 2;
    const double h = len / m;
    double sum = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      sum += w * eval(kPot, seg.start + seg.direction * (h * i));
    }
    total += sum * h / 3.0 / seg.speed;
  }
  return kPot.strength() * total;
}

PhasePoint random_point(std::uint64_t k, double beta = 1.0 / 64) {
  return sample_phase_point(kStadium, beta, 77, k);
}

}  // namespace

TEST_CASE("a particle at rest stays put") {
  const PhasePoint x{{0.4, 0.3}, {0.0, 0.0}};
  const Trajectory tr = propagate(x, 5.0, kStadium);
  CHECK(tr.final_point.q == x.q);
  CHECK(tr.final_point.p == x.p);
  REQUIRE(tr.segments.size() == 1);
  CHECK(tr.segments[0].speed == 0.0);
}

TEST_CASE("single normal bounce uses speed 2|p|") {
  const double p = 2.0;
  const PhasePoint x{{0.5, 0.5}, {0.0, p}};
  // top wall after 0.5 / (2p) = 0.125; t = 0.2 leaves 0.075 of downward flight
  const Trajectory tr = propagate(x, 0.2, kStadium);
  CHECK(tr.bounces == 1);
  CHECK(tr.final_point.p.x() == doctest::Approx(0.0));
  CHECK(tr.final_point.p.y() == doctest::Approx(-p));
  CHECK(tr.final_point.q.x() == doctest::Approx(0.5));
  CHECK(tr.final_point.q.y() == doctest::Approx(1.0 - 2.0 * p * 0.075).epsilon(1e-11));
  double total = 0.0;
  for (const auto& s : tr.segments) total += s.duration;
  CHECK(total == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("propagation matches a small-step ray march over short times") {
  for (std::uint64_t k = 0; k < 10; ++k) {
    const PhasePoint x = random_point(k);
    const double t = 1.5 / (2.0 * x.p.norm());  // about 1.5 length units of flight
    const Trajectory tr = propagate(x, t, kStadium);
    CHECK(std::abs(tr.final_point.p.norm() - x.p.norm()) <= 1e-12 * x.p.norm());
    CHECK((tr.final_point.q - march(x, t, 1e-5)).norm() < 1e-3);
  }
}

TEST_CASE("energy conservation and containment over many bounces") {
  for (std::uint64_t k = 0; k < 5; ++k) {
    const PhasePoint x = random_point(k, std::ldexp(1.0, -12));
    const Trajectory tr = propagate(x, 20.0, kStadium);
    CHECK(tr.bounces > 1000);
    CHECK(std::abs(tr.final_point.p.norm() - x.p.norm()) <= 1e-12 * x.p.norm());
    for (const auto& s : tr.segments) {
      CHECK(contains_closed(kStadium, s.start));
      CHECK(contains_closed(kStadium, s.start + s.direction * (s.speed * s.duration)));
    }
  }
}

TEST_CASE("bounce cap") {
  PropagationOptions opts;
  opts.max_bounces = 10;
  CHECK_THROWS_AS(propagate(random_point(1), 100.0, kStadium, opts), Error);
}

TEST_CASE("short-time reversibility") {
  for (std::uint64_t k = 0; k < 10; ++k) {
    const PhasePoint x = random_point(k);
    const double t = 3.0 / (2.0 * x.p.norm());
    const Trajectory fwd = propagate(x, t, kStadium);
    REQUIRE(fwd.bounces <= 10);
    const PhasePoint back{fwd.final_point.q, -fwd.final_point.p};
    CHECK((propagate(back, t, kStadium).final_point.q - x.q).norm() < 1e-6);
  }
}

TEST_CASE("action difference") {
  const PhasePoint x = random_point(3);
  CHECK(action_difference(x, 0.0, kStadium, kPot) == 0.0);
  QuenchPotential none = kPot;
  none.xi_f = none.xi_0;
  CHECK(action_difference(x, 1.0, kStadium, none) == 0.0);

  for (std::uint64_t k = 0; k < 10; ++k) {
    const PhasePoint y = random_point(k, std::ldexp(1.0, -8));
    const double t = 0.3;
    const double ds = action_difference(y, t, kStadium, kPot);
    const double ref = simpson_along(propagate(y, t, kStadium), kPot.sigma / 50.0);
    CHECK(std::abs(ds - ref) <= 1e-6 * std::max(std::abs(ref), 1e-3));
  }
}

TEST_CASE("action additivity and checkpoint series") {
  for (std::uint64_t k = 0; k < 10; ++k) {
    const PhasePoint x = random_point(k, std::ldexp(1.0, -10));
    const double t1 = 0.17, t2 = 0.29;
    const double whole = action_difference(x, t1 + t2, kStadium, kPot);
    const PhasePoint mid = propagate(x, t1, kStadium).final_point;
    const double parts = action_difference(x, t1, kStadium, kPot) + action_difference(mid, t2, kStadium, kPot);
    // restarting at t1 rounds the state; chaos amplifies it over many bounces
    CHECK(std::abs(whole - parts) <= 1e-8 * std::max(std::abs(whole), 1.0));

    const std::vector<double> times{0.0, 0.05, 0.1, 0.2, 0.4};
    const auto series = action_difference_series(x, times, kStadium, kPot);
    for (std::size_t i = 0; i < times.size(); ++i)
      CHECK(std::abs(series[i] - action_difference(x, times[i], kStadium, kPot)) <=
            1e-10 * std::max(std::abs(series[i]), 1.0));
  }
}
