#include "thermoisaacs/solution_io.hpp"

#include <filesystem>
#include <sstream>
#include <vector>

#include "json.hpp"

#include "thermoisaacs/errors.hpp"
#include "thermoisaacs/util.hpp"

namespace thermoisaacs {

const char* const kToolVersion = "1.0.0";

std::string sector_csv_name(const std::string& kind, int w, int z) {
  auto tag = [](int mode) { return mode > 0 ? std::string("p1") : std::string("m1"); };
  return kind + "_w" + tag(w) + "_z" + tag(z) + ".csv";
}

void write_value_csv(const std::string& path, const SectorGrid& g,
                     const ValueField& v, int w, int z) {
  const int n = int(g.axes_x().size());
  const int m = int(g.axes_y().size());
  std::ostringstream out;
  for (int k = 0; k < n; ++k) out << "i" << (k + 1) << ",";
  for (int k = 0; k < m; ++k) out << "j" << (k + 1) << ",";
  for (int k = 0; k < n; ++k) out << "x" << (k + 1) << ",";
  for (int k = 0; k < m; ++k) out << "y" << (k + 1) << ",";
  out << "V\n";

  std::vector<double> xc(static_cast<std::size_t>(n)), yc(static_cast<std::size_t>(m));
  std::vector<int> xi(static_cast<std::size_t>(n)), yi(static_cast<std::size_t>(m));
  const int nxl = g.x_local_count(w);
  const int nyl = g.y_local_count(z);
  for (int xl = 0; xl < nxl; ++xl) {
    // Multi-index of the x node, axis 0 in global axis coordinates.
    int rem = xl % g.x_rest();
    xi[0] = g.x_axis0_begin(w) + xl / g.x_rest();
    for (int k = n - 1; k >= 1; --k) {
      const int sz = int(g.axes_x()[std::size_t(k)].size());
      xi[std::size_t(k)] = rem % sz;
      rem /= sz;
    }
    g.x_node_coords(w, xl, xc);
    for (int yl = 0; yl < nyl; ++yl) {
      int yrem = yl % g.y_rest();
      yi[0] = g.y_axis0_begin(z) + yl / g.y_rest();
      for (int k = m - 1; k >= 1; --k) {
        const int sz = int(g.axes_y()[std::size_t(k)].size());
        yi[std::size_t(k)] = yrem % sz;
        yrem /= sz;
      }
      g.y_node_coords(z, yl, yc);
      for (int k = 0; k < n; ++k) out << xi[std::size_t(k)] << ",";
      for (int k = 0; k < m; ++k) out << yi[std::size_t(k)] << ",";
      for (int k = 0; k < n; ++k) out << format_double(xc[std::size_t(k)]) << ",";
      for (int k = 0; k < m; ++k) out << format_double(yc[std::size_t(k)]) << ",";
      out << format_double(v.at(w, z, xl, yl)) << "\n";
    }
  }
  write_file(path, out.str());
}

ValueField read_solution_field(const std::string& dir, const std::string& kind,
                               const SectorGrid& g) {
  ValueField v(g, 0.0);
  const int n = int(g.axes_x().size());
  const int m = int(g.axes_y().size());
  const std::size_t value_col = std::size_t(2 * (n + m));
  for (int w : {-1, 1}) {
    for (int z : {-1, 1}) {
      const std::string path =
          (std::filesystem::path(dir) / sector_csv_name(kind, w, z)).string();
      const std::string text = read_file(path);
      std::istringstream in(text);
      std::string line;
      if (!std::getline(in, line))
        throw ParseError(path + ": empty file");
      const auto header = split_csv_line(line);
      if (header.size() != value_col + 1 || header.back() != "V")
        throw ParseError(path + ": unexpected header");
      const long expect = long(g.x_local_count(w)) * long(g.y_local_count(z));
      long row = 0;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != value_col + 1)
          throw ParseError(path + ": bad column count on data row " +
                           std::to_string(row + 1));
        if (row >= expect)
          throw ParseError(path + ": more rows than sector nodes");
        const int nyl = g.y_local_count(z);
        try {
          v.at(w, z, int(row / nyl), int(row % nyl)) =
              std::stod(cells[value_col]);
        } catch (const std::exception&) {
          throw ParseError(path + ": unparsable value on data row " +
                           std::to_string(row + 1));
        }
        ++row;
      }
      if (row != expect)
        throw ParseError(path + ": expected " + std::to_string(expect) +
                         " rows, found " + std::to_string(row));
    }
  }
  return v;
}

std::string solver_config_json(const SolverConfig& cfg) {
  nlohmann::ordered_json j;
  j["value_kind"] = cfg.value_kind == ValueKind::Lower ? "lower" : "upper";
  j["staging"] = cfg.staging == Staging::Staged ? "staged" : "plain";
  j["tol"] = cfg.tol;
  j["max_iter"] = cfg.max_iter;
  j["discount_form"] = cfg.discount_form == DiscountForm::OneMinusLambdaH
                           ? "1-lambda*h"
                           : "exp(-lambda*h)";
  j["threads"] = cfg.threads;
  return j.dump(2);
}

std::string stats_json(const IterationStats& stats, const SolverConfig& cfg) {
  nlohmann::ordered_json j;
  j["config"] = nlohmann::ordered_json::parse(solver_config_json(cfg));
  j["iterations"] = stats.iterations;
  j["final_residual"] = stats.final_residual;
  j["converged"] = stats.converged;
  j["projection_count"] = stats.projection_count;
  j["last_projection_iteration"] = stats.last_projection_iteration;
  // The full per-iteration list is bulky; keep the tail, which is the part
  // that says whether the iteration settled into its asymptotic rate.
  const std::size_t keep = 16;
  const auto& cf = stats.contraction_factors;
  nlohmann::ordered_json tail = nlohmann::ordered_json::array();
  for (std::size_t k = cf.size() > keep ? cf.size() - keep : 0; k < cf.size(); ++k)
    tail.push_back(cf[k]);
  j["contraction_factor_tail"] = tail;
  return j.dump(2);
}

void write_solution(const std::string& dir, const SectorGrid& g,
                    const ValueField& v, const IterationStats& stats,
                    const SolverConfig& cfg, const std::string& kind,
                    std::vector<std::string>& files) {
  std::filesystem::create_directories(dir);
  for (int w : {-1, 1}) {
    for (int z : {-1, 1}) {
      const std::string name = sector_csv_name(kind, w, z);
      write_value_csv((std::filesystem::path(dir) / name).string(), g, v, w, z);
      files.push_back(name);
    }
  }
  const std::string stats_name = kind + "_stats.json";
  write_file((std::filesystem::path(dir) / stats_name).string(),
             stats_json(stats, cfg) + "\n");
  files.push_back(stats_name);
}

void write_manifest(const std::string& dir, const std::string& problem_hash,
                    const std::string& config_json,
                    const std::vector<std::string>& files) {
  nlohmann::ordered_json j;
  j["tool"] = "thermoisaacs";
  j["version"] = kToolVersion;
  j["problem_digest"] = problem_hash;
  j["config"] = nlohmann::ordered_json::parse(config_json);
  j["created_utc"] = iso8601_utc_now();
  j["files"] = files;
  write_file((std::filesystem::path(dir) / "manifest.json").string(),
             j.dump(2) + "\n");
}

}  // namespace thermoisaacs
