#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chaowork/potential.hpp"
#include "chaowork/sampler.hpp"

namespace chaowork {

/// Straight flight q(tau) = start + direction * speed * tau, tau in [0, duration].
/// speed is 2|p| (mass 1/2); a stationary particle has speed 0.
struct FlightSegment {
  Vec2 start;
  Vec2 direction;
  double speed = 0.0;
  double duration = 0.0;
};

struct PropagationOptions {
  std::size_t max_bounces = 10'000'000;
  LineIntegral line_integral = LineIntegral::closed_form;
};

struct Trajectory {
  PhasePoint final_point;
  std::vector<FlightSegment> segments;
  std::size_t bounces = 0;
};

/// Free flight under H0 = p^2 with specular reflections for a time t.
Trajectory propagate(const PhasePoint& x0, double t, const BilliardGeometry& geom,
                     const PropagationOptions& options = {});

/// Delta S(x0, t) = (xi_f - xi_0) * integral of V along the H0 trajectory.
double action_difference(const PhasePoint& x0, double t, const BilliardGeometry& geom,
                         const QuenchPotential& pot, const PropagationOptions& options = {});

/// Delta S at every time of a non-decreasing list of non-negative times,
/// from a single propagation to times.back().
std::vector<double> action_difference_series(const PhasePoint& x0, std::span<const double> times,
                                             const BilliardGeometry& geom,
                                             const QuenchPotential& pot,
                                             const PropagationOptions& options = {});

}  // namespace chaowork
