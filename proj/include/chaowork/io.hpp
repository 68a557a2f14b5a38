#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "chaowork/characteristic.hpp"
#include "chaowork/config.hpp"
#include "chaowork/errors.hpp"
#include "chaowork/quantum.hpp"
#include "chaowork/spectra.hpp"

namespace chaowork {

inline constexpr const char* kVersion = "1.0.0";

/// 16 hex digits of FNV-1a over the canonical config text and the version.
std::string manifest_hash(const RunConfig& cfg);

/// FNV-1a 64 of arbitrary bytes.
std::uint64_t fnv1a(std::string_view bytes);

/// Plain CSV table. The first line is "# manifest <hash>", then optional
/// "# key value" metadata lines, then the header and rows (%.17g).
struct CsvTable {
  std::string manifest;
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
CsvTable read_csv(const std::filesystem::path& path);

/// Columns u, re_g, im_g, stderr_re, stderr_im; grid metadata in comments.
void write_characteristic_csv(const std::filesystem::path& path, const CharacteristicGrid& g,
                              const std::string& manifest);
/// Columns w, density, error; grid and broadening in comments.
void write_histogram_csv(const std::filesystem::path& path, const WorkHistogram& h,
                         const std::string& manifest);
/// Reads a histogram back, including the grid it was computed on.
WorkHistogram read_histogram_csv(const std::filesystem::path& path);

/// Columns qx, qy, px, py.
void write_ensemble_csv(const std::filesystem::path& path, const ThermalEnsemble& e,
                        const std::string& manifest);
/// Columns index, e0, ef.
void write_levels_csv(const std::filesystem::path& path, const QuenchSpectra& s,
                      const std::string& manifest);

void write_json(const std::filesystem::path& path, const nlohmann::json& value);

/// {"error": kind, "message": ...}
nlohmann::json error_json(const Error& e);

std::string format_double(double v);

}  // namespace chaowork
