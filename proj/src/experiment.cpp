#include "rirfill/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "rirfill/baseline.hpp"
#include "rirfill/image_io.hpp"
#include "rirfill/room_sim.hpp"
#include "rirfill/svg_plot.hpp"

namespace rirfill {

namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

std::string cell_name(const Cell& c) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "c%.3f_a%03.0f_r%.2f_s%llu", c.curvature, c.angle_deg, c.mask_ratio,
                static_cast<unsigned long long>(c.seed));
  return buf;
}

// Runs job(i) for i in [0, n) on `threads` workers pulling from a shared counter.
template <typename Job>
void run_queue(std::size_t n, int threads, Job&& job) {
  const std::size_t workers =
      std::min<std::size_t>(n, threads > 0 ? threads : std::max(1u, std::thread::hardware_concurrency()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) job(i);
  };
  if (workers <= 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
}

}  // namespace

std::vector<Cell> expand_cells(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  for (double c : config.curvatures)
    for (double a : config.angles)
      for (double r : config.mask_ratios)
        for (auto s : config.seeds) cells.push_back({c, a, r, s});
  return cells;
}

RirMatrix simulate_test_matrix(const ExperimentConfig& config, double curvature, double angle_deg) {
  RoomSpec room = config.room;
  room.reflection.fill(reflection_coeff_for_t60(room, config.test_t60));
  const auto array = make_arc_array(config.n_mics, curvature, room);
  const auto source = make_source(room, array, angle_deg);
  return simulate_matrix(room, source, array, config.test_samples);
}

CellOutcome run_cell(const ExperimentConfig& config, const DiffusionModel& model,
                     const RirMatrix& truth, const Cell& cell) {
  CellOutcome out;
  out.cell = cell;
  const EvalKey base{cell.curvature, cell.angle_deg, cell.mask_ratio, cell.seed, {}};
  out.diffusion.key = base;
  out.diffusion.key.method = kMethodDiffusion;
  out.sci.key = base;
  out.sci.key.method = kMethodSci;
  try {
    out.mask = make_mask(truth.n_mics, cell.mask_ratio, cell.seed);
  } catch (const std::exception& e) {
    out.diffusion.error = out.sci.error = std::string("mask: ") + e.what();
    return out;
  }
  const auto missing = out.mask.missing_indices();
  const RirMatrix masked = apply_mask(truth, out.mask);

  try {
    out.diffusion_estimate = inpaint_matrix(model, masked, out.mask, config.repaint(cell.seed));
    out.diffusion = evaluate(truth, out.diffusion_estimate, missing, out.diffusion.key);
  } catch (const std::exception& e) {
    out.diffusion.error = e.what();
  }
  try {
    out.sci_estimate = sci_interpolate(masked, out.mask);
    out.sci = evaluate(truth, out.sci_estimate, missing, out.sci.key);
  } catch (const std::exception& e) {
    out.sci.error = e.what();
  }
  return out;
}

std::string ResultRow::key() const {
  return fmt(cell.curvature) + "," + fmt(cell.angle_deg) + "," + fmt(cell.mask_ratio) + "," +
         std::to_string(cell.seed) + "," + method;
}

ResultRow make_row(const Cell& cell, const EvalReport& report, std::size_t n_missing) {
  ResultRow row;
  row.cell = cell;
  row.method = report.key.method;
  row.n_missing = n_missing;
  if (report.error) {
    std::string msg = *report.error;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    row.status = "error: " + msg;
    row.nmse_db = std::numeric_limits<double>::quiet_NaN();
    row.cd = std::numeric_limits<double>::quiet_NaN();
    return row;
  }
  row.nmse_db = report.nmse_db;
  row.cd = report.cd;
  row.status = report.nmse_db == kExactNmseDb ? "exact" : "ok";
  return row;
}

std::string format_row(const ResultRow& r) {
  return r.key() + "," + std::to_string(r.n_missing) + "," + fmt(r.nmse_db) + "," + fmt(r.cd) + "," +
         r.status;
}

ResultRow parse_row(const std::string& line) {
  std::vector<std::string> f;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) f.push_back(item);
  if (f.size() != 9) throw std::invalid_argument("CSV row needs 9 fields: " + line);
  ResultRow r;
  r.cell = {parse_double(f[0]), parse_double(f[1]), parse_double(f[2]), std::stoull(f[3])};
  r.method = f[4];
  r.n_missing = std::stoul(f[5]);
  r.nmse_db = parse_double(f[6]);
  r.cd = parse_double(f[7]);
  r.status = f[8];
  return r;
}

std::vector<ResultRow> read_results(const std::filesystem::path& csv) {
  std::vector<ResultRow> rows;
  std::ifstream is(csv);
  if (!is) return rows;
  std::string line;
  if (!std::getline(is, line)) return rows;
  if (line != kCsvHeader) throw std::runtime_error(csv.string() + ": unexpected CSV header");
  while (std::getline(is, line))
    if (!line.empty()) rows.push_back(parse_row(line));
  return rows;
}

void append_results(const std::filesystem::path& csv, const std::vector<ResultRow>& rows) {
  std::set<std::string> keys;
  for (const auto& r : read_results(csv)) keys.insert(r.key());
  for (const auto& r : rows)
    if (!keys.insert(r.key()).second) throw std::runtime_error("duplicate result key " + r.key());
  const bool fresh = !std::filesystem::exists(csv) || std::filesystem::file_size(csv) == 0;
  std::ofstream os(csv, std::ios::app);
  if (!os) throw std::runtime_error("cannot write " + csv.string());
  if (fresh) os << kCsvHeader << '\n';
  for (const auto& r : rows) os << format_row(r) << '\n';
}

double median(std::vector<double> v) {
  if (v.empty()) throw std::invalid_argument("median of an empty set");
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<std::filesystem::path> write_sweep_plots(const std::vector<ResultRow>& rows,
                                                     const std::filesystem::path& dir) {
  struct Axis {
    const char* name;
    const char* label;
    double (*get)(const Cell&);
  };
  const Axis axes[] = {
      {"mask_ratio", "mask ratio", [](const Cell& c) { return c.mask_ratio; }},
      {"curvature", "array curvature", [](const Cell& c) { return c.curvature; }},
      {"angle", "source angle (deg)", [](const Cell& c) { return c.angle_deg; }},
  };
  std::vector<std::filesystem::path> written;
  for (const auto& axis : axes) {
    std::set<double> values;
    for (const auto& r : rows) values.insert(axis.get(r.cell));
    if (values.size() < 2) continue;

    std::map<std::string, std::map<double, std::pair<std::vector<double>, std::vector<double>>>> groups;
    for (const auto& r : rows) {
      if (!r.ok()) continue;
      auto& g = groups[r.method][axis.get(r.cell)];
      g.first.push_back(r.nmse_db);
      g.second.push_back(r.cd);
    }
    LineChart nmse{std::string("NMSE vs ") + axis.label, axis.label, "median NMSE (dB)", {}};
    LineChart cd{std::string("Cosine distance vs ") + axis.label, axis.label, "median CD", {}};
    for (const auto& [method, by_x] : groups) {
      Series sn{method, {}, {}}, sc{method, {}, {}};
      for (const auto& [x, vals] : by_x) {
        sn.x.push_back(x);
        sn.y.push_back(median(vals.first));
        sc.x.push_back(x);
        sc.y.push_back(median(vals.second));
      }
      nmse.series.push_back(std::move(sn));
      cd.series.push_back(std::move(sc));
    }
    const auto pn = dir / (std::string("nmse_vs_") + axis.name + ".svg");
    const auto pc = dir / (std::string("cd_vs_") + axis.name + ".svg");
    write_svg(pn, nmse);
    write_svg(pc, cd);
    written.push_back(pn);
    written.push_back(pc);
  }
  return written;
}

ExperimentSummary run_experiment(const ExperimentConfig& config, const DiffusionModel& model,
                                 const CellCallback& on_cell) {
  config.validate();
  namespace fs = std::filesystem;
  fs::create_directories(config.output_dir);
  ExperimentSummary summary;
  summary.csv = config.output_dir / "results.csv";

  std::set<std::string> done;
  const auto existing = read_results(summary.csv);
  for (const auto& r : existing) done.insert(r.key());

  std::vector<Cell> cells;
  for (const auto& c : expand_cells(config)) {
    ResultRow probe;
    probe.cell = c;
    probe.method = kMethodDiffusion;
    const bool have_d = done.count(probe.key()) > 0;
    probe.method = kMethodSci;
    const bool have_s = done.count(probe.key()) > 0;
    if (have_d && have_s)
      ++summary.skipped_cells;
    else if (have_d || have_s)
      throw std::runtime_error("results.csv holds a partial cell: " + probe.key());
    else
      cells.push_back(c);
  }

  // One simulation per geometry, shared read-only by its cells.
  std::vector<std::pair<double, double>> geoms;
  for (const auto& c : cells)
    if (std::find(geoms.begin(), geoms.end(), std::pair{c.curvature, c.angle_deg}) == geoms.end())
      geoms.emplace_back(c.curvature, c.angle_deg);
  std::vector<RirMatrix> truths(geoms.size());
  std::vector<std::string> sim_errors(geoms.size());
  run_queue(geoms.size(), config.threads, [&](std::size_t g) {
    try {
      truths[g] = simulate_test_matrix(config, geoms[g].first, geoms[g].second);
    } catch (const std::exception& e) {
      sim_errors[g] = std::string("simulation: ") + e.what();
    }
  });

  const fs::path image_dir = config.output_dir / "images";
  if (config.write_images) fs::create_directories(image_dir);
  const std::uint64_t first_seed = config.seeds.front();

  std::vector<std::vector<ResultRow>> rows(cells.size());
  std::vector<std::vector<fs::path>> artifacts(cells.size());
  std::vector<std::string> warnings(cells.size());
  std::mutex progress_mutex;
  std::size_t finished = 0;
  run_queue(cells.size(), config.threads, [&](std::size_t idx) {
    const Cell& cell = cells[idx];
    const auto g = static_cast<std::size_t>(
        std::find(geoms.begin(), geoms.end(), std::pair{cell.curvature, cell.angle_deg}) - geoms.begin());
    CellOutcome out;
    if (!sim_errors[g].empty()) {
      out.cell = cell;
      out.diffusion.key = {cell.curvature, cell.angle_deg, cell.mask_ratio, cell.seed, kMethodDiffusion};
      out.sci.key = {cell.curvature, cell.angle_deg, cell.mask_ratio, cell.seed, kMethodSci};
      out.diffusion.error = out.sci.error = sim_errors[g];
    } else {
      out = run_cell(config, model, truths[g], cell);
    }
    const std::size_t n_missing = out.mask.size() ? out.mask.n_missing() : 0;
    rows[idx] = {make_row(cell, out.diffusion, n_missing), make_row(cell, out.sci, n_missing)};

    if (config.write_images && cell.seed == first_seed && sim_errors[g].empty() && out.mask.size()) {
      try {
        const std::string stem = cell_name(cell);
        auto emit = [&](const RirMatrix& m, const char* what) {
          if (m.data.empty()) return;
          const auto p = image_dir / (stem + "_" + what + ".pgm");
          export_rir_image(m, p);
          artifacts[idx].push_back(p);
        };
        emit(truths[g], "truth");
        emit(apply_mask(truths[g], out.mask), "masked");
        emit(out.diffusion_estimate, "diffusion");
        emit(out.sci_estimate, "sci");

        const auto missing = out.mask.missing_indices();
        if (!missing.empty() && !out.diffusion_estimate.data.empty() && !out.sci_estimate.data.empty()) {
          const std::size_t mic = missing[missing.size() / 2];
          LineChart edc{"Energy decay curve, mic " + std::to_string(mic), "time (s)", "EDC (dB)", {}};
          auto add = [&](const RirMatrix& m, const char* name) {
            const auto curve = edc_db(m.column(mic));
            Series s{name, {}, {}};
            for (std::size_t k = 0; k < curve.size(); ++k) {
              s.x.push_back(static_cast<double>(k) / m.sample_rate);
              s.y.push_back(curve[k]);
            }
            edc.series.push_back(std::move(s));
          };
          add(truths[g], "truth");
          add(out.diffusion_estimate, kMethodDiffusion);
          add(out.sci_estimate, kMethodSci);
          const auto p = config.output_dir / ("edc_" + stem + ".svg");
          write_svg(p, edc);
          artifacts[idx].push_back(p);
        }
      } catch (const std::exception& e) {
        warnings[idx] = cell_name(cell) + ": artifacts: " + e.what();
      }
    }

    std::lock_guard lock(progress_mutex);
    ++finished;
    if (on_cell) on_cell(out, finished, cells.size());
  });

  for (auto& r : rows)
    for (auto& row : r) summary.new_rows.push_back(std::move(row));
  for (auto& a : artifacts)
    for (auto& p : a) summary.artifacts.push_back(std::move(p));
  for (auto& w : warnings)
    if (!w.empty()) summary.warnings.push_back(std::move(w));
  append_results(summary.csv, summary.new_rows);

  const auto plots = write_sweep_plots(read_results(summary.csv), config.output_dir);
  summary.artifacts.insert(summary.artifacts.end(), plots.begin(), plots.end());
  return summary;
}

}  // namespace rirfill
