#include "chaowork/trajectory.hpp"

#include <cmath>
#include <string>

#include "chaowork/errors.hpp"

namespace chaowork {

namespace detail {

template <typename Visitor>
PhasePoint walk(const PhasePoint& x0, double t, const BilliardGeometry& geom,
                const PropagationOptions& options, Visitor&& visit, std::size_t* bounces_out) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw Error(ErrorKind::RangeError, "time must be >= 0");
  const double momentum = x0.p.norm();
  const double speed = 2.0 * momentum;
  if (speed == 0.0) {
    visit(FlightSegment{x0.q, Vec2(1.0, 0.0), 0.0, t}, 0.0);
    if (bounces_out) *bounces_out = 0;
    return x0;
  }

  Vec2 q = x0.q;
  Vec2 dir = x0.p / momentum;
  double elapsed = 0.0;
  std::size_t bounces = 0;
  for (;;) {
    const double remaining = t - elapsed;
    const BoundaryHit hit = first_hit(geom, q, dir);
    const double flight = hit.path_length / speed;
    if (flight >= remaining) {
      visit(FlightSegment{q, dir, speed, remaining}, elapsed);
      q += dir * (speed * remaining);
      break;
    }
    visit(FlightSegment{q, dir, speed, flight}, elapsed);
    elapsed += flight;
    if (++bounces > options.max_bounces) {
      throw Error(ErrorKind::BounceLimitExceeded,
                  "more than " + std::to_string(options.max_bounces) + " reflections");
    }
    q = hit.point + kWallNudge * hit.inward_normal;
    dir = reflect(dir, hit.inward_normal);
    dir /= dir.norm();
  }
  if (bounces_out) *bounces_out = bounces;
  return PhasePoint{q, momentum * dir};
}

}  // namespace detail

Trajectory propagate(const PhasePoint& x0, double t, const BilliardGeometry& geom,
                     const PropagationOptions& options) {
  Trajectory out;
  out.final_point = detail::walk(
      x0, t, geom, options,
      [&](const FlightSegment& s, double) { out.segments.push_back(s); }, &out.bounces);
  return out;
}

double action_difference(const PhasePoint& x0, double t, const BilliardGeometry& geom,
                         const QuenchPotential& pot, const PropagationOptions& options) {
  const double strength = pot.strength();
  double integral = 0.0;
  detail::walk(
      x0, t, geom, options,
      [&](const FlightSegment& s, double) {
        integral += segment_integral(pot, s.start, s.direction, s.speed, s.duration,
                                     options.line_integral);
      },
      nullptr);
  return strength * integral;
}

std::vector<double> action_difference_series(const PhasePoint& x0, std::span<const double> times,
                                             const BilliardGeometry& geom,
                                             const QuenchPotential& pot,
                                             const PropagationOptions& options) {
  std::vector<double> out(times.size(), 0.0);
  if (times.empty()) return out;
  const double strength = pot.strength();
  std::size_t next = 0;
  while (next < times.size() && times[next] <= 0.0) ++next;
  if (next == times.size()) return out;

  double integral = 0.0;
  detail::walk(
      x0, times.back(), geom, options,
      [&](const FlightSegment& s, double start_time) {
        double local = 0.0;
        const double end_time = start_time + s.duration;
        while (next < times.size() && times[next] <= end_time) {
          const double tau = times[next] - start_time;
          integral += segment_integral(pot, s.start + s.direction * (s.speed * local), s.direction,
                                       s.speed, tau - local, options.line_integral);
          local = tau;
          out[next++] = strength * integral;
        }
        integral += segment_integral(pot, s.start + s.direction * (s.speed * local), s.direction,
                                     s.speed, s.duration - local, options.line_integral);
      },
      nullptr);
  // Checkpoints lost to rounding in the accumulated segment times.
  for (; next < times.size(); ++next) out[next] = strength * integral;
  return out;
}

}  // namespace chaowork
