#pragma once

#include <string>
#include <vector>

#include "thermoisaacs/grid.hpp"
#include "thermoisaacs/isaacs_solver.hpp"

namespace thermoisaacs {

/// File name of one sector's CSV, e.g. lower_wp1_zm1.csv.
std::string sector_csv_name(const std::string& kind, int w, int z);

/// Long-format sector dump: per-axis node indices, node coordinates, value.
/// Header i1..in,j1..jm,x1..xn,y1..ym,V. Rows in flat local order.
void write_value_csv(const std::string& path, const SectorGrid& g,
                     const ValueField& v, int w, int z);

/// Reads the four sector CSVs written by write_value_csv back into a field
/// shaped by `g`. Throws ParseError on shape mismatch.
ValueField read_solution_field(const std::string& dir, const std::string& kind,
                               const SectorGrid& g);

std::string solver_config_json(const SolverConfig& cfg);
std::string stats_json(const IterationStats& stats, const SolverConfig& cfg);

/// Writes the four sector CSVs plus <kind>_stats.json into dir; appends the
/// created file names (relative to dir) to files.
void write_solution(const std::string& dir, const SectorGrid& g,
                    const ValueField& v, const IterationStats& stats,
                    const SolverConfig& cfg, const std::string& kind,
                    std::vector<std::string>& files);

/// manifest.json: problem digest, config snapshot, tool version, timestamp and
/// the complete list of files the run wrote. Exactly one per output directory.
void write_manifest(const std::string& dir, const std::string& problem_hash,
                    const std::string& config_json,
                    const std::vector<std::string>& files);

extern const char* const kToolVersion;

}  // namespace thermoisaacs
