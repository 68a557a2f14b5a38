#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "chaowork/geometry.hpp"
#include "chaowork/potential.hpp"
#include "chaowork/trajectory.hpp"

namespace chaowork {

/// Everything a run depends on. Defaults are the four-Gaussian quench in the
/// r = l = 1 desymmetrized stadium.
struct RunConfig {
  std::string scenario;  // empty, fig2, fig3 or fig4
  BilliardGeometry geometry;
  QuenchPotential potential;

  std::vector<double> betas{std::ldexp(1.0, -12)};
  std::vector<double> hbars{1.0};

  std::size_t n_semiclassical = 90'000;
  std::size_t n_classical = 4'000'000;
  std::size_t pilot_samples = 100'000;
  std::size_t batches = 32;

  std::size_t grid_points = 512;   // power of two
  double grid_padding = 0.2;
  double broadening = -1.0;        // negative: twice the W bin width

  PropagationOptions propagation;
  bool shell_estimator = false;
  std::size_t shell_count = 64;
  std::size_t samples_per_shell = 2000;

  double quantum_hbar = 1.0;
  double quantum_h = 0.0;          // 0: from the state-count planner
  std::size_t quantum_min_basis = 0;
  std::size_t quantum_max_basis = 1200;

  std::uint64_t seed = 1;
  int workers = 0;
  std::string out = "out";

  /// Keys given explicitly (file, environment or flags).
  std::set<std::string> explicit_keys;
};

/// Documented keys in canonical order.
const std::vector<std::string>& config_keys();

/// Parses `key = value` lines ('#' starts a comment). Unknown keys and bad
/// syntax raise ParseError with line and column.
RunConfig parse_config(const std::string& text);

/// Applies one key/value pair (also used for environment and flag overrides).
/// `origin` labels errors.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value,
                   const std::string& origin);

/// CHAOWORK_<KEY> environment variables, for every documented key.
void apply_environment(RunConfig& cfg);

/// Scenario defaults for keys that were not given explicitly.
void apply_scenario_defaults(RunConfig& cfg);

/// Range checks on every field. Throws RangeError naming the field.
void validate(const RunConfig& cfg);

/// parse_config + apply_scenario_defaults + validate.
RunConfig validate_config(const std::string& text);

/// Canonical `key = value` dump (every key, fixed order, %.17g numbers).
std::string canonical_text(const RunConfig& cfg);

}  // namespace chaowork
