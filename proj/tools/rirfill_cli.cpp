#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "rirfill/alloc.hpp"
#include "rirfill/baseline.hpp"
#include "rirfill/checkpoint.hpp"
#include "rirfill/config.hpp"
#include "rirfill/dataset.hpp"
#include "rirfill/experiment.hpp"
#include "rirfill/image_io.hpp"
#include "rirfill/metrics.hpp"
#include "rirfill/rir_io.hpp"
#include "rirfill/room_sim.hpp"
#include "rirfill/serialize.hpp"

namespace fs = std::filesystem;
using namespace rirfill;

namespace {

// --config, --profile and one flag per config field. Flags override the file,
// which overrides the profile.
struct ConfigOptions {
  std::string path;
  std::string profile;
  std::map<std::string, std::string> overrides;

  void attach(CLI::App* app) {
    app->add_option("--config", path, "experiment config JSON")->check(CLI::ExistingFile);
    app->add_option("--profile", profile, "desk or full");
    for (const auto& key : config_keys(ExperimentConfig::desk())) {
      if (key == "profile") continue;
      std::string flag = key;
      for (auto& c : flag)
        if (c == '_') c = '-';
      app->add_option_function<std::string>(
             "--" + flag, [this, key](const std::string& v) { overrides[key] = v; },
             "override config field " + key)
          ->group("Config overrides");
    }
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c;
    if (!path.empty()) {
      c = load_config(path);
      if (!profile.empty() && profile != c.profile)
        throw std::invalid_argument("--profile conflicts with the profile in " + path);
    } else {
      c = ExperimentConfig::for_profile(profile.empty() ? "desk" : profile);
    }
    for (const auto& [k, v] : overrides) set_config_value(c, k, v);
    c.validate();
    return c;
  }
};

struct MaskOptions {
  double ratio = 0.5;
  std::uint64_t seed = 0;

  void attach(CLI::App* app) {
    app->add_option("--ratio", ratio, "fraction of microphones treated as missing")
        ->check(CLI::Range(0.0, 1.0));
    app->add_option("--mask-seed", seed, "seed of the random missing set");
  }
};

std::string db(double v) { return std::isinf(v) ? "-inf (exact)" : std::to_string(v); }

nlohmann::json report_json(const EvalReport& r) {
  nlohmann::json j = {{"nmse_db", std::isinf(r.nmse_db) ? nlohmann::json("-inf") : nlohmann::json(r.nmse_db)},
                      {"cd", r.cd}};
  if (r.error) j["error"] = *r.error;
  nlohmann::json mics = nlohmann::json::array();
  for (const auto& m : r.per_mic) {
    nlohmann::json e = {{"mic", m.mic},
                        {"nmse_db", std::isinf(m.nmse_db) ? nlohmann::json("-inf") : nlohmann::json(m.nmse_db)},
                        {"cd", m.cd}};
    if (m.error) e["error"] = *m.error;
    mics.push_back(e);
  }
  j["per_mic"] = mics;
  return j;
}

// Mean T60 over the given columns whose decay reaches -35 dB.
std::optional<double> mean_t60(const RirMatrix& m, const std::vector<std::size_t>& cols) {
  double sum = 0.0;
  int n = 0;
  for (auto i : cols) {
    try {
      sum += t60_from_edc(edc_db(m.column(i)), m.sample_rate);
      ++n;
    } catch (const std::exception&) {
    }
  }
  if (n == 0) return std::nullopt;
  return sum / n;
}

}  // namespace

int main(int argc, char** argv) {
  rirfill::keep_large_allocations_on_heap();
  CLI::App app{"RIR interpolation by diffusion inpainting"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "simulate an RIR matrix and write it as RIRB");
  ConfigOptions sim_cfg;
  sim_cfg.attach(sim);
  double sim_curv = 0.0, sim_angle = 90.0, sim_t60 = 0.0;
  int sim_samples = 0;
  std::string sim_out;
  sim->add_option("--curvature", sim_curv, "array curvature in [0, 1]")->check(CLI::Range(0.0, 1.0));
  sim->add_option("--angle", sim_angle, "source angle in degrees");
  sim->add_option("--t60", sim_t60, "target T60 in seconds (default: test_t60)");
  sim->add_option("--samples", sim_samples, "RIR length (default: test_samples)");
  sim->add_option("-o,--out", sim_out, "output .rirb")->required();

  // dataset
  auto* ds = app.add_subcommand("dataset", "build the training patch set");
  ConfigOptions ds_cfg;
  ds_cfg.attach(ds);
  std::uint64_t ds_seed = 0;
  std::string ds_out;
  ds->add_option("--seed", ds_seed, "sampling seed")->required();
  ds->add_option("-o,--out", ds_out, "output .rirp")->required();

  // train
  auto* tr = app.add_subcommand("train", "train the denoiser");
  ConfigOptions tr_cfg;
  tr_cfg.attach(tr);
  std::uint64_t tr_seed = 0;
  std::string tr_data, tr_out;
  tr->add_option("--seed", tr_seed, "training and dataset seed")->required();
  tr->add_option("--dataset", tr_data, "patch set from `dataset` (built on the fly when absent)")
      ->check(CLI::ExistingFile);
  tr->add_option("-o,--out", tr_out, "output checkpoint")->required();

  // inpaint
  auto* ip = app.add_subcommand("inpaint", "fill missing microphones with RePaint");
  MaskOptions ip_mask;
  ip_mask.attach(ip);
  std::string ip_model, ip_in, ip_out;
  RepaintOptions ip_opts;
  ip_opts.resamples = 3;
  ip->add_option("--model", ip_model, "checkpoint")->required()->check(CLI::ExistingFile);
  ip->add_option("-i,--input", ip_in, "ground-truth or masked .rirb")->required()->check(CLI::ExistingFile);
  ip->add_option("-o,--out", ip_out, "output .rirb")->required();
  ip->add_option("--jump-length", ip_opts.jump_length, "RePaint jump length");
  ip->add_option("--resamples", ip_opts.resamples, "RePaint resampling count");
  ip->add_option("--seed", ip_opts.seed, "sampling seed");
  ip->add_option("--batch", ip_opts.batch_size, "patches per network call");

  // baseline
  auto* bl = app.add_subcommand("baseline", "fill missing microphones with the cubic spline");
  MaskOptions bl_mask;
  bl_mask.attach(bl);
  std::string bl_in, bl_out;
  bl->add_option("-i,--input", bl_in, "input .rirb")->required()->check(CLI::ExistingFile);
  bl->add_option("-o,--out", bl_out, "output .rirb")->required();

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "score an estimate against ground truth");
  MaskOptions ev_mask;
  ev_mask.attach(ev);
  std::string ev_truth, ev_est, ev_json;
  ev->add_option("--truth", ev_truth, "ground-truth .rirb")->required()->check(CLI::ExistingFile);
  ev->add_option("--estimate", ev_est, "estimate .rirb")->required()->check(CLI::ExistingFile);
  ev->add_option("--json", ev_json, "write the full report here");

  // sweep
  auto* sw = app.add_subcommand("sweep", "run the experiment grid");
  ConfigOptions sw_cfg;
  sw_cfg.attach(sw);
  std::string sw_seeds, sw_model;
  sw->add_option("--seed", sw_seeds, "seed list, e.g. 0,1,2,3,4")->required();
  sw->add_option("--model", sw_model, "checkpoint (default: config checkpoint)");

  // plot
  auto* pl = app.add_subcommand("plot", "SVG charts from a results CSV");
  std::string pl_csv, pl_dir;
  pl->add_option("--csv", pl_csv, "results.csv")->required()->check(CLI::ExistingFile);
  pl->add_option("-o,--out", pl_dir, "output directory (default: next to the CSV)");

  // export-image
  auto* ex = app.add_subcommand("export-image", "16-bit PGM of an RIR matrix");
  std::string ex_in, ex_out;
  ex->add_option("-i,--input", ex_in, "input .rirb")->required()->check(CLI::ExistingFile);
  ex->add_option("-o,--out", ex_out, "output .pgm")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const auto cfg = sim_cfg.resolve();
      ExperimentConfig c = cfg;
      if (sim_t60 > 0.0) c.test_t60 = sim_t60;
      if (sim_samples > 0) c.test_samples = sim_samples;
      const auto m = simulate_test_matrix(c, sim_curv, sim_angle);
      RirMetadata meta;
      RoomSpec room = c.room;
      room.reflection.fill(reflection_coeff_for_t60(room, c.test_t60));
      meta.room = room;
      meta.target_t60 = c.test_t60;
      save_rirb(sim_out, m, meta);
      std::printf("wrote %s (%zu mics x %zu samples, beta %.4f)\n", sim_out.c_str(), m.n_mics,
                  m.n_samples, room.reflection[0]);
    } else if (*ds) {
      const auto cfg = ds_cfg.resolve();
      const auto set = build_training_set(cfg, ds_seed);
      nlohmann::json images = nlohmann::json::array();
      for (const auto& im : set.images) images.push_back({{"curvature", im.curvature}, {"angle_deg", im.angle_deg}});
      save_patches(ds_out, set.patches, set.fingerprint, images.dump());
      std::printf("wrote %zu patches to %s (fingerprint %s)\n", set.patches.size(), ds_out.c_str(),
                  set.fingerprint.c_str());
    } else if (*tr) {
      auto cfg = tr_cfg.resolve();
      cfg.training.seed = tr_seed;
      const Patches data =
          tr_data.empty() ? build_training_set(cfg, tr_seed).patches : load_patches(tr_data);
      const int epochs = cfg.training.epochs;
      auto model = train(data, cfg.schedule(), cfg.training, [&](int epoch, double loss) {
        if (epoch == 0 || (epoch + 1) % 10 == 0 || epoch + 1 == epochs)
          std::printf("epoch %d/%d  loss %.5f\n", epoch + 1, epochs, loss);
        std::fflush(stdout);
      });
      save_checkpoint(tr_out, model);
      std::printf("wrote %s (%zu parameters, dataset %s)\n", tr_out.c_str(),
                  model.net.parameter_count(), model.meta.dataset_fingerprint.c_str());
    } else if (*ip) {
      const auto model = load_checkpoint(ip_model);
      RirMetadata meta;
      const auto truth = load_rirb(ip_in, &meta);
      const auto mask = make_mask(truth.n_mics, ip_mask.ratio, ip_mask.seed);
      const auto est = inpaint_matrix(model, apply_mask(truth, mask), mask, ip_opts);
      save_rirb(ip_out, est, meta);
      std::printf("wrote %s (%zu of %zu mics inpainted)\n", ip_out.c_str(), mask.n_missing(), mask.size());
    } else if (*bl) {
      RirMetadata meta;
      const auto truth = load_rirb(bl_in, &meta);
      const auto mask = make_mask(truth.n_mics, bl_mask.ratio, bl_mask.seed);
      const auto est = sci_interpolate(apply_mask(truth, mask), mask);
      save_rirb(bl_out, est, meta);
      std::printf("wrote %s (%zu of %zu mics interpolated)\n", bl_out.c_str(), mask.n_missing(), mask.size());
    } else if (*ev) {
      const auto truth = load_rirb(ev_truth);
      const auto est = load_rirb(ev_est);
      const auto mask = make_mask(truth.n_mics, ev_mask.ratio, ev_mask.seed);
      const auto missing = mask.missing_indices();
      const auto report = evaluate(truth, est, missing);
      if (report.error) throw std::runtime_error(*report.error);
      std::printf("missing mics: %zu\nNMSE: %s dB\nCD:   %.6f\n", missing.size(), db(report.nmse_db).c_str(),
                  report.cd);
      const auto t_true = mean_t60(truth, missing);
      const auto t_est = mean_t60(est, missing);
      if (t_true) std::printf("T60 truth:    %.3f s\n", *t_true);
      if (t_est) std::printf("T60 estimate: %.3f s\n", *t_est);
      if (!ev_json.empty()) {
        auto j = report_json(report);
        if (t_true) j["t60_truth"] = *t_true;
        if (t_est) j["t60_estimate"] = *t_est;
        write_json_file(ev_json, j);
      }
    } else if (*sw) {
      auto cfg = sw_cfg.resolve();
      set_config_value(cfg, "seeds", sw_seeds);
      if (!sw_model.empty()) cfg.checkpoint = sw_model;
      if (cfg.checkpoint.empty()) throw std::invalid_argument("sweep needs --model or a config checkpoint");
      const auto model = load_checkpoint(cfg.checkpoint);
      if (model.schedule.steps() != cfg.diffusion_steps)
        throw std::invalid_argument("checkpoint was trained with T = " + std::to_string(model.schedule.steps()) +
                                    ", config asks for " + std::to_string(cfg.diffusion_steps));
      fs::create_directories(cfg.output_dir);
      save_config(cfg.output_dir / "config.json", cfg);
      const auto summary = run_experiment(cfg, model, [](const CellOutcome& o, std::size_t done, std::size_t total) {
        std::printf("[%zu/%zu] curvature %.3f angle %.0f ratio %.2f seed %llu: diffusion CD %.4f, sci CD %.4f\n",
                    done, total, o.cell.curvature, o.cell.angle_deg, o.cell.mask_ratio,
                    static_cast<unsigned long long>(o.cell.seed), o.diffusion.cd, o.sci.cd);
        std::fflush(stdout);
      });
      for (const auto& w : summary.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      std::printf("%zu rows appended to %s (%zu cells already present)\n", summary.new_rows.size(),
                  summary.csv.c_str(), summary.skipped_cells);
    } else if (*pl) {
      const fs::path dir = pl_dir.empty() ? fs::path(pl_csv).parent_path() : fs::path(pl_dir);
      if (!dir.empty()) fs::create_directories(dir);
      for (const auto& p : write_sweep_plots(read_results(pl_csv), dir.empty() ? "." : dir))
        std::printf("wrote %s\n", p.c_str());
    } else if (*ex) {
      const auto map = export_rir_image(load_rirb(ex_in), ex_out);
      std::printf("wrote %s (%dx%d, max |h| %.6g)\n", ex_out.c_str(), map.width, map.height, map.max_abs);
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
