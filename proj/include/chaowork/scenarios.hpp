#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "chaowork/characteristic.hpp"
#include "chaowork/config.hpp"

namespace chaowork {

/// Shared W-window for a run: range of a pilot classical work sample padded
/// by grid_padding, on grid_points points.
FourierGrid plan_grid(const RunConfig& cfg);

/// cfg.broadening, or twice the bin width when it is negative.
double resolved_broadening(const RunConfig& cfg, const FourierGrid& grid);

/// File-name label of a parameter: "2^-12" for powers of two, %g otherwise.
std::string param_label(double v);

// Each runner writes its CSV files under cfg.out and returns a JSON report.
nlohmann::json run_semiclassical(const RunConfig& cfg, bool dump_ensemble = false);
nlohmann::json run_classical(const RunConfig& cfg);
nlohmann::json run_quantum(const RunConfig& cfg);
nlohmann::json run_jarzynski(const RunConfig& cfg);
nlohmann::json run_compare(const std::filesystem::path& a, const std::filesystem::path& b);

/// fig2: quantum vs semiclassical at hbar = 1 over four temperatures.
/// fig3: Jarzynski sweep. fig4: classical vs semiclassical over hbar.
nlohmann::json run_scenario(const RunConfig& cfg);

/// Writes manifest.json (config, hash, seeds, version, command report).
void write_manifest(const RunConfig& cfg, const std::string& command, const nlohmann::json& report);

}  // namespace chaowork
