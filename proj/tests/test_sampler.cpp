#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "chaowork/sampler.hpp"
#include "support.hpp"

using namespace chaowork;

namespace {

const BilliardGeometry kStadium{};

// Number of proposals used by the last sample_position call, read off the
// stream position (two uniforms per proposal).
int proposals(CounterRng before, const CounterRng& after) {
  CounterRng probe = after;
  const auto next = probe();
  int draws = 0;
  while (before() != next) ++draws;
  return draws / 2;
}

// Area of [x0,x1]x[y0,y1] inside the stadium, by 1D quadrature of the column height.
double clipped_area(double x0, double x1, double y0, double y1) {
  auto height = [&](double x) {
    const double top = x <= 1.0 ? 1.0 : std::sqrt(std::max(0.0, 1.0 - (x - 1.0) * (x - 1.0)));
    return std::clamp(top - y0, 0.0, y1 - y0);
  };
  if (x1 <= 1.0) return (x1 - x0) * (y1 - y0);
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(height, std::max(x0, 1.0), x1, 15, 1e-12) +
         std::max(0.0, 1.0 - x0) * (y1 - y0) * (x0 < 1.0);
}

}  // namespace

TEST_CASE("rejection acceptance rate matches the area ratio") {
  const int n = 100000;
  long total = 0;
  CounterRng rng(21, 0);
  for (int i = 0; i < n; ++i) {
    const CounterRng before = rng;
    const Vec2 q = sample_position(kStadium, rng);
    REQUIRE(contains(kStadium, q));
    total += proposals(before, rng);
  }
  const double p = area(kStadium) / 2.0;
  const double rate = double(n) / double(total);
  CHECK(p == doctest::Approx((1.0 + std::numbers::pi / 4) / 2.0));
  CHECK(std::abs(rate - p) < 3.0 * std::sqrt(p * (1 - p) / double(total)));
}

TEST_CASE("positions are uniform (chi-square on a clipped 10x10 grid)") {
  const int n = 100000;
  std::vector<double> counts(100, 0.0);
  CounterRng rng(22, 0);
  for (int i = 0; i < n; ++i) {
    const Vec2 q = sample_position(kStadium, rng);
    const int cx = std::min(9, int(q.x() / 0.2)), cy = std::min(9, int(q.y() / 0.1));
    counts[cy * 10 + cx] += 1.0;
  }
  double chi2 = 0.0;
  int cells = 0;
  for (int cy = 0; cy < 10; ++cy)
    for (int cx = 0; cx < 10; ++cx) {
      const double a = clipped_area(0.2 * cx, 0.2 * (cx + 1), 0.1 * cy, 0.1 * (cy + 1));
      if (a <= 0.0) {
        CHECK(counts[cy * 10 + cx] == 0.0);
        continue;
      }
      const double expected = n * a / area(kStadium);
      chi2 += std::pow(counts[cy * 10 + cx] - expected, 2) / expected;
      ++cells;
    }
  const boost::math::chi_squared dist(cells - 1);
  CHECK(boost::math::cdf(boost::math::complement(dist, chi2)) > 0.001);
}

TEST_CASE("Boltzmann momenta") {
  const double beta = std::ldexp(1.0, -12);
  const int n = 1000000;
  double sum_h = 0, sum_h2 = 0, sum_px = 0, sum_px2 = 0;
  std::vector<double> px;
  CounterRng rng(23, 0);
  for (int i = 0; i < n; ++i) {
    const Vec2 p = sample_momentum(beta, rng);
    const double h = p.squaredNorm();
    sum_h += h;
    sum_h2 += h * h;
    sum_px += p.x();
    sum_px2 += p.x() * p.x();
    if (i < 20000) px.push_back(p.x());
  }
  const double mean_h = sum_h / n;
  const double se_h = std::sqrt((sum_h2 / n - mean_h * mean_h) / n);
  CHECK(std::abs(mean_h - 1.0 / beta) < 3.0 * se_h);
  const double var = 1.0 / (2.0 * beta);
  CHECK(std::abs(sum_px / n) < 3.0 * std::sqrt(var / n));
  // variance of the sample variance of a normal: 2 var^2 / n
  CHECK(std::abs(sum_px2 / n - std::ldexp(1.0, 11)) < 3.0 * std::sqrt(2.0 / n) * var);
  const double s = std::sqrt(var);
  CHECK(testing::ks_one_sample(px, [&](double x) { return 0.5 * std::erfc(-x / (s * std::numbers::sqrt2)); }) > 0.001);
}

TEST_CASE("ensembles are reproducible and worker-independent") {
  const double beta = std::ldexp(1.0, -12);
  const auto a = sample_ensemble(kStadium, beta, 5000, 99, 1);
  const auto b = sample_ensemble(kStadium, beta, 5000, 99, 3);
  REQUIRE(a.points.size() == 5000);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    CHECK(a.points[i].q == b.points[i].q);
    CHECK(a.points[i].p == b.points[i].p);
    CHECK(contains(kStadium, a.points[i].q));
  }
  const PhasePoint k = sample_phase_point(kStadium, beta, 99, 1234);
  CHECK(k.q == a.points[1234].q);
  CHECK(k.p == a.points[1234].p);
}

TEST_CASE("disjoint seeds give the same energy distribution") {
  const double beta = std::ldexp(1.0, -12);
  const auto a = sample_ensemble(kStadium, beta, 9000, 1);
  const auto b = sample_ensemble(kStadium, beta, 9000, 2);
  std::vector<double> ha, hb;
  for (const auto& x : a.points) ha.push_back(x.p.squaredNorm());
  for (const auto& x : b.points) hb.push_back(x.p.squaredNorm());
  CHECK(ha != hb);
  CHECK(testing::ks_two_sample(ha, hb) > 0.001);
}

TEST_CASE("shell points sit on the shell") {
  CounterRng rng(4, 0);
  for (int i = 0; i < 100; ++i) {
    const PhasePoint x = sample_shell_point(kStadium, 37.0, rng);
    CHECK(x.p.squaredNorm() == doctest::Approx(37.0).epsilon(1e-14));
    CHECK(contains(kStadium, x.q));
  }
}
