#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "rirfill/config.hpp"
#include "rirfill/diffusion.hpp"
#include "rirfill/metrics.hpp"

namespace rirfill {

struct Cell {
  double curvature = 0.0;
  double angle_deg = 90.0;
  double mask_ratio = 0.5;
  std::uint64_t seed = 0;
};

// Every (curvature, angle, ratio, seed) combination, in that nesting order.
std::vector<Cell> expand_cells(const ExperimentConfig& config);

// Inference matrix for one array curvature and source angle (T60 = test_t60,
// K = test_samples).
RirMatrix simulate_test_matrix(const ExperimentConfig& config, double curvature, double angle_deg);

inline constexpr const char* kMethodDiffusion = "diffusion";
inline constexpr const char* kMethodSci = "sci";

struct CellOutcome {
  Cell cell;
  Mask mask;
  EvalReport diffusion;
  EvalReport sci;
  RirMatrix diffusion_estimate;
  RirMatrix sci_estimate;
};

// Masks `truth` with the cell seed, runs both methods and scores them over the
// missing columns. Failures of either method are recorded in its report.
CellOutcome run_cell(const ExperimentConfig& config, const DiffusionModel& model,
                     const RirMatrix& truth, const Cell& cell);

// One CSV row. Header:
//   curvature,angle_deg,mask_ratio,seed,method,n_missing,nmse_db,cd,status
// nmse_db is "-inf" for an exact reconstruction; status is "ok", "exact" or
// "error: <message>" (commas replaced by semicolons).
struct ResultRow {
  Cell cell;
  std::string method;
  std::size_t n_missing = 0;
  double nmse_db = 0.0;
  double cd = 0.0;
  std::string status = "ok";

  bool ok() const { return status == "ok" || status == "exact"; }
  std::string key() const;
};

inline constexpr const char* kCsvHeader =
    "curvature,angle_deg,mask_ratio,seed,method,n_missing,nmse_db,cd,status";

ResultRow make_row(const Cell& cell, const EvalReport& report, std::size_t n_missing);
std::string format_row(const ResultRow& row);
ResultRow parse_row(const std::string& line);
std::vector<ResultRow> read_results(const std::filesystem::path& csv);

// Appends rows to `csv`, writing the header first if the file is new. Throws
// if a row's key is already present.
void append_results(const std::filesystem::path& csv, const std::vector<ResultRow>& rows);

using CellCallback = std::function<void(const CellOutcome&, std::size_t done, std::size_t total)>;

struct ExperimentSummary {
  std::filesystem::path csv;
  std::vector<ResultRow> new_rows;
  std::size_t skipped_cells = 0;  // already present in the CSV
  std::vector<std::filesystem::path> artifacts;
  std::vector<std::string> warnings;  // artifact failures; results are unaffected
};

// Runs every cell not yet recorded in <output_dir>/results.csv on a work
// queue of `config.threads` workers and appends the results in cell order, so
// the file does not depend on scheduling. Writes PGM images for the first seed
// of each (curvature, angle, ratio), an EDC chart per (curvature, angle), and
// median-over-seeds SVG charts for each swept variable.
ExperimentSummary run_experiment(const ExperimentConfig& config, const DiffusionModel& model,
                                 const CellCallback& on_cell = {});

double median(std::vector<double> values);

// SVG charts of median metric against every variable that takes more than
// one value in `rows`, one series per method. Returns the written paths.
std::vector<std::filesystem::path> write_sweep_plots(const std::vector<ResultRow>& rows,
                                                     const std::filesystem::path& dir);

}  // namespace rirfill
