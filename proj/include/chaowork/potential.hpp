#pragma once

#include <array>

#include "chaowork/geometry.hpp"

namespace chaowork {

/// Quench perturbation: four signed Gaussians of common width sigma. The
/// Hamiltonian after the quench is H0 + xi_f V; before it, H0 + xi_0 V.
struct QuenchPotential {
  std::array<Vec2, 4> centers{Vec2(0.2, 0.4), Vec2(0.67, 0.5), Vec2(0.5, 0.15), Vec2(0.3, 0.75)};
  std::array<double, 4> signs{1.0, -1.0, 1.0, -1.0};
  double sigma = 0.1;
  double xi_0 = 0.0;
  double xi_f = 85.0;
  /// Literal saddle form exp(-[(x-xi)^2 - (y-yi)^2]/(2 sigma^2)); sensitivity
  /// check only, unbounded and not a Gaussian.
  bool anisotropic_saddle = false;

  double strength() const { return xi_f - xi_0; }
};

void validate(const QuenchPotential& pot);

/// Unit-amplitude V(q) (no xi factor).
double eval(const QuenchPotential& pot, const Vec2& q);

enum class LineIntegral { closed_form, simpson };

/// Integral over tau in [0, duration] of V(q0 + direction * speed * tau).
/// speed == 0 denotes a stationary particle and yields V(q0) * duration.
/// The saddle variant always uses Simpson.
double segment_integral(const QuenchPotential& pot, const Vec2& q0, const Vec2& direction,
                        double speed, double duration,
                        LineIntegral method = LineIntegral::closed_form);

}  // namespace chaowork
