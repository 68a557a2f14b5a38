#include "chaowork/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace chaowork {

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string manifest_hash(const RunConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a(canonical_text(cfg) + "version = " + kVersion)));
  return buf;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  os << "# manifest " << table.manifest << '\n';
  for (const auto& [k, v] : table.meta) os << "# " << k << ' ' << v << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) os << (c ? "," : "") << table.columns[c];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) os << (c ? "," : "") << format_double(row[c]);
    os << '\n';
  }
  if (!os) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorKind::IoError, "cannot read " + path.string());
  CsvTable t;
  std::string line;
  std::size_t line_no = 0;
  bool header = false;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string key, value;
      ls >> key;
      std::getline(ls >> std::ws, value);
      if (key == "manifest") t.manifest = value;
      else t.meta.emplace_back(key, value);
      continue;
    }
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!header) {
      t.columns = cells;
      header = true;
      continue;
    }
    if (cells.size() != t.columns.size())
      throw Error(ErrorKind::ParseError, path.string() + " line " + std::to_string(line_no) +
                                             ": expected " + std::to_string(t.columns.size()) + " cells");
    std::vector<double> row;
    for (const auto& c : cells) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(c, &used));
        if (used != c.size()) throw std::invalid_argument(c);
      } catch (const std::exception&) {
        throw Error(ErrorKind::ParseError,
                    path.string() + " line " + std::to_string(line_no) + ": bad number '" + c + "'");
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

namespace {

std::vector<std::pair<std::string, std::string>> grid_meta(const FourierGrid& g) {
  return {{"grid_n", std::to_string(g.n)},
          {"grid_du", format_double(g.du)},
          {"grid_w_origin", format_double(g.w_origin)}};
}

const std::string& meta_value(const CsvTable& t, const std::string& key,
                              const std::filesystem::path& path) {
  for (const auto& [k, v] : t.meta)
    if (k == key) return v;
  throw Error(ErrorKind::ParseError, path.string() + ": missing '# " + key + "' line");
}

}  // namespace

void write_characteristic_csv(const std::filesystem::path& path, const CharacteristicGrid& g,
                              const std::string& manifest) {
  CsvTable t;
  t.manifest = manifest;
  t.meta = grid_meta(g.grid);
  t.meta.emplace_back("hbar", format_double(g.hbar));
  t.meta.emplace_back("beta", format_double(g.beta));
  t.meta.emplace_back("n_samples", std::to_string(g.n_samples));
  t.meta.emplace_back("n_failed", std::to_string(g.n_failed));
  t.columns = {"u", "re_g", "im_g", "stderr_re", "stderr_im"};
  for (std::size_t k = 0; k < g.grid.n; ++k)
    t.rows.push_back({g.u_values[k], g.g_values[k].real(), g.g_values[k].imag(), g.stderr_re[k],
                      g.stderr_im[k]});
  write_csv(path, t);
}

void write_histogram_csv(const std::filesystem::path& path, const WorkHistogram& h,
                         const std::string& manifest) {
  CsvTable t;
  t.manifest = manifest;
  t.meta = grid_meta(h.grid);
  t.meta.emplace_back("broadening", format_double(h.broadening));
  t.meta.emplace_back("total_mass", format_double(h.total_mass));
  t.columns = {"w", "density", "error"};
  for (std::size_t j = 0; j < h.density.size(); ++j) t.rows.push_back({h.w[j], h.density[j], h.error[j]});
  write_csv(path, t);
}

WorkHistogram read_histogram_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  if (t.columns != std::vector<std::string>{"w", "density", "error"})
    throw Error(ErrorKind::ParseError, path.string() + ": expected columns w,density,error");
  WorkHistogram h;
  try {
    h.grid.n = std::stoull(meta_value(t, "grid_n", path));
    h.grid.du = std::stod(meta_value(t, "grid_du", path));
    h.grid.w_origin = std::stod(meta_value(t, "grid_w_origin", path));
    h.broadening = std::stod(meta_value(t, "broadening", path));
  } catch (const std::logic_error&) {
    throw Error(ErrorKind::ParseError, path.string() + ": malformed grid metadata");
  }
  if (t.rows.size() != h.grid.n)
    throw Error(ErrorKind::ParseError, path.string() + ": row count does not match grid_n");
  h.bin_width = h.grid.dw();
  for (std::size_t j = 0; j < h.grid.n; ++j) {
    h.w.push_back(h.grid.w(j));
    h.density.push_back(t.rows[j][1]);
    h.error.push_back(t.rows[j][2]);
    h.total_mass += t.rows[j][1] * h.bin_width;
  }
  h.w_min = h.w.front();
  h.w_max = h.w.back();
  return h;
}

void write_ensemble_csv(const std::filesystem::path& path, const ThermalEnsemble& e,
                        const std::string& manifest) {
  CsvTable t;
  t.manifest = manifest;
  t.meta = {{"beta", format_double(e.beta)}, {"seed", std::to_string(e.seed)}};
  t.columns = {"qx", "qy", "px", "py"};
  for (const auto& x : e.points) t.rows.push_back({x.q.x(), x.q.y(), x.p.x(), x.p.y()});
  write_csv(path, t);
}

void write_levels_csv(const std::filesystem::path& path, const QuenchSpectra& s,
                      const std::string& manifest) {
  CsvTable t;
  t.manifest = manifest;
  t.meta = {{"hbar", format_double(s.hbar)},
            {"h", format_double(s.h)},
            {"n_sites", std::to_string(s.n_sites)},
            {"n_basis", std::to_string(s.n_basis)}};
  t.columns = {"index", "e0", "ef"};
  for (std::size_t i = 0; i < s.n_states; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    t.rows.push_back({static_cast<double>(i), s.e0(k), s.ef(k)});
  }
  write_csv(path, t);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& value) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error(ErrorKind::IoError, "cannot write " + path.string());
  os << value.dump(2) << '\n';
}

nlohmann::json error_json(const Error& e) {
  return {{"error", std::string(to_string(e.kind()))}, {"message", e.what()}};
}

}  // namespace chaowork
