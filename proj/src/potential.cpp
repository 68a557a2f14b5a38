#include "chaowork/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chaowork/errors.hpp"

namespace chaowork {

namespace {

// Gaussians whose centre is farther than this from a segment are skipped.
constexpr double kCutoffSigmas = 8.0;
// Simpson panel width in units of sigma.
constexpr double kSimpsonStep = 0.01;

double saddle_term(const Vec2& q, const Vec2& c, double two_sigma2) {
  const double dx = q.x() - c.x(), dy = q.y() - c.y();
  return std::exp(-(dx * dx - dy * dy) / two_sigma2);
}

// erf(b) - erf(a) without cancellation in the tails.
double erf_difference(double b, double a) {
  if (a > 0.0 && b > 0.0) return std::erfc(a) - std::erfc(b);
  if (a < 0.0 && b < 0.0) return std::erfc(-b) - std::erfc(-a);
  return std::erf(b) - std::erf(a);
}

double simpson(const QuenchPotential& pot, const Vec2& q0, const Vec2& direction, double length) {
  const double step = kSimpsonStep * pot.sigma;
  std::size_t panels = static_cast<std::size_t>(std::ceil(length / step));
  if (panels % 2 == 1) ++panels;
  if (panels == 0) return 0.0;
  const double h = length / static_cast<double>(panels);
  double sum = eval(pot, q0) + eval(pot, q0 + direction * length);
  for (std::size_t i = 1; i < panels; ++i) {
    const double w = (i % 2 == 1) ? 4.0 : 2.0;
    sum += w * eval(pot, q0 + direction * (h * static_cast<double>(i)));
  }
  return sum * h / 3.0;
}

}  // namespace

void validate(const QuenchPotential& pot) {
  if (!(pot.sigma > 0.0) || !std::isfinite(pot.sigma))
    throw Error(ErrorKind::RangeError, "sigma must be positive and finite");
  if (!std::isfinite(pot.xi_0) || !std::isfinite(pot.xi_f))
    throw Error(ErrorKind::RangeError, "xi_0 and xi_f must be finite");
  for (const auto& c : pot.centers)
    if (!c.allFinite()) throw Error(ErrorKind::RangeError, "Gaussian centres must be finite");
  for (double s : pot.signs)
    if (s != 1.0 && s != -1.0) throw Error(ErrorKind::RangeError, "Gaussian signs must be +1 or -1");
}

double eval(const QuenchPotential& pot, const Vec2& q) {
  const double two_sigma2 = 2.0 * pot.sigma * pot.sigma;
  double v = 0.0;
  for (std::size_t i = 0; i < pot.centers.size(); ++i) {
    if (pot.anisotropic_saddle) {
      v += pot.signs[i] * saddle_term(q, pot.centers[i], two_sigma2);
    } else {
      v += pot.signs[i] * std::exp(-(q - pot.centers[i]).squaredNorm() / two_sigma2);
    }
  }
  return v;
}

double segment_integral(const QuenchPotential& pot, const Vec2& q0, const Vec2& direction,
                        double speed, double duration, LineIntegral method) {
  if (duration <= 0.0) return 0.0;
  if (speed == 0.0) return eval(pot, q0) * duration;

  const double length = speed * duration;
  if (method == LineIntegral::simpson || pot.anisotropic_saddle) {
    return simpson(pot, q0, direction, length) / speed;
  }

  // |q0 + d s - c|^2 = (s - s*)^2 + b^2 with s* = (c - q0).d
  const double sigma = pot.sigma;
  const double inv = 1.0 / (std::numbers::sqrt2 * sigma);
  const double cutoff2 = kCutoffSigmas * kCutoffSigmas * sigma * sigma;
  const double prefactor = sigma * std::sqrt(std::numbers::pi / 2.0);
  double total = 0.0;
  for (std::size_t i = 0; i < pot.centers.size(); ++i) {
    const Vec2 rel = pot.centers[i] - q0;
    const double s_star = rel.dot(direction);
    const double s_near = std::clamp(s_star, 0.0, length);
    if ((rel - direction * s_near).squaredNorm() > cutoff2) continue;
    const double b2 = (rel - direction * s_star).squaredNorm();
    total += pot.signs[i] * std::exp(-b2 / (2.0 * sigma * sigma)) * prefactor *
             erf_difference((length - s_star) * inv, -s_star * inv);
  }
  return total / speed;
}

}  // namespace chaowork
