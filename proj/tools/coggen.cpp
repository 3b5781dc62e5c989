// coggen CLI: phantom/mask generation, reconstruction, ablation suites, and
// the theory verification report.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "coggen/coggen.hpp"

namespace fs = std::filesystem;
using coggen::errc;

namespace {

int exit_code_for(const coggen::error& e) {
  switch (e.code()) {
    case errc::bad_config: return 2;
    case errc::io_error:
    case errc::bad_magic:
    case errc::truncated_file:
    case errc::unsupported_version: return 4;
    default: return 3;  // numerical failure
  }
}

std::string sanitize(const std::string& name) {
  std::string out = name;
  for (char& c : out)
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '-';
  return out;
}

void write_json_file(const std::string& path, const coggen::json& j) {
  std::ofstream os(path);
  coggen::require(os.good(), errc::io_error, "cannot open " + path);
  os << j.dump(2) << "\n";
  coggen::require(os.good(), errc::io_error, "write failed for " + path);
}

coggen::json weights_summary(const coggen::recon_result& res) {
  coggen::json stages = coggen::json::array();
  for (std::size_t k = 0; k < res.weights_per_stage.size(); ++k) {
    const std::vector<double>& v = res.weights_per_stage[k].v;
    double lo = 1.0, hi = 0.0, sum = 0.0;
    for (double x : v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
      sum += x;
    }
    coggen::json s{{"stage", k + 1},
                   {"v_min", v.empty() ? 0.0 : lo},
                   {"v_max", v.empty() ? 0.0 : hi},
                   {"v_mean", v.empty() ? 0.0 : sum / static_cast<double>(v.size())}};
    if (k < res.stage_seconds.size()) s["seconds"] = res.stage_seconds[k];
    stages.push_back(s);
  }
  return stages;
}

int cmd_gen_phantom(const std::string& spec_path, const std::string& out_path,
                    std::int64_t seed_override) {
  coggen::experiment_config cfg = coggen::load_experiment_config(spec_path);
  if (seed_override >= 0) cfg.phantom.seed = static_cast<std::uint64_t>(seed_override);
  const coggen::complex_grid g = coggen::gen_phantom(cfg.phantom);
  coggen::write_grid(out_path, g);
  std::printf("wrote %s (%zux%zu %s)\n", out_path.c_str(), g.height, g.width,
              coggen::to_string(cfg.phantom.kind));
  return 0;
}

int cmd_gen_mask(const std::string& spec_path, const std::string& out_path,
                 std::int64_t seed_override) {
  coggen::experiment_config cfg = coggen::load_experiment_config(spec_path);
  if (seed_override >= 0) cfg.mask.seed = static_cast<std::uint64_t>(seed_override);
  const std::size_t h = cfg.mask.height ? cfg.mask.height : cfg.phantom.height;
  const std::size_t w = cfg.mask.width ? cfg.mask.width : cfg.phantom.width;
  const coggen::sampling_mask m = coggen::gen_vd_mask(
      h, w, cfg.mask.pattern, cfg.mask.acceleration_factor, cfg.mask.center_fraction,
      cfg.mask.seed);
  coggen::write_mask(out_path, m);
  std::printf("wrote %s (%zux%zu %s, %zu samples, achieved AF %.3f)\n", out_path.c_str(),
              m.height, m.width, coggen::to_string(m.pattern), m.count(),
              m.acceleration_factor);
  return 0;
}

int cmd_reconstruct(const std::string& config_path, const std::string& out_dir, bool vanilla,
                    std::int64_t seed_override) {
  coggen::experiment_config cfg = coggen::load_experiment_config(config_path);
  if (vanilla) cfg.run.vanilla_mode = true;
  if (seed_override >= 0) cfg.run.seed = static_cast<std::uint64_t>(seed_override);

  const coggen::prepared_instance inst = coggen::prepare_instance(cfg);
  std::printf("phantom %zux%zu, mask %s AF %.3f (%zu samples), noise sigma %.6g\n",
              inst.ground_truth.height, inst.ground_truth.width,
              coggen::to_string(inst.mask.pattern), inst.mask.acceleration_factor,
              inst.mask.count(), inst.noise_sigma_used);

  const coggen::recon_result res =
      coggen::reconstruct(cfg.run, inst.mask, inst.y, &inst.ground_truth, &inst.roi);

  fs::create_directories(out_dir);
  const std::string recon_path = (fs::path(out_dir) / "recon.cgim").string();
  const std::string curve_path = (fs::path(out_dir) / "curve.csv").string();
  coggen::write_mask((fs::path(out_dir) / "mask.cgim").string(), inst.mask);
  coggen::write_grid((fs::path(out_dir) / "ground_truth.cgim").string(), inst.ground_truth);
  coggen::write_grid(recon_path, res.image);
  coggen::write_curve_csv(curve_path, res.curve);
  if (cfg.output.pgm)
    coggen::write_pgm_magnitude((fs::path(out_dir) / "recon.pgm").string(), res.image);

  const double final_rlne = coggen::rlne_roi(inst.ground_truth, res.image, inst.roi);
  const double final_psnr = coggen::psnr_roi(inst.ground_truth, res.image, inst.roi);

  coggen::json report;
  report["format"] = "coggen-report/1";
  report["kind"] = "reconstruct";
  report["config"] = coggen::config_to_json(cfg);
  report["metrics"] = {{"final_rlne_roi", final_rlne},
                       {"final_psnr_db", final_psnr},
                       {"final_loss", res.curve.empty() ? 0.0 : res.curve.back().loss}};
  report["diverged"] = res.diverged;
  report["iterations_run"] = res.iterations_run;
  report["stages"] = weights_summary(res);
  report["artifacts"] = {{"recon", recon_path}, {"curve", curve_path}};
  write_json_file((fs::path(out_dir) / "report.json").string(), report);

  std::printf("%s: %zu iterations, final RLNE_ROI %.6f, PSNR %.2f dB\n",
              res.diverged ? "DIVERGED" : "done", res.iterations_run, final_rlne, final_psnr);
  if (res.diverged) {
    std::fprintf(stderr, "reconstruction diverged; partial curve written to %s\n",
                 curve_path.c_str());
    return 3;
  }
  return 0;
}

int cmd_ablate(const std::string& config_path, const std::string& suite_name,
               std::size_t seeds, const std::string& out_dir, std::size_t threads,
               std::int64_t seed_override) {
  coggen::experiment_config cfg = coggen::load_experiment_config(config_path);
  if (seed_override >= 0) cfg.run.seed = static_cast<std::uint64_t>(seed_override);

  coggen::ablation_suite suite;
  if (suite_name == "backbone") {
    suite = coggen::ablation_suite::backbone_gain;
  } else if (suite_name == "curriculum-size") {
    suite = coggen::ablation_suite::curriculum_size;
  } else if (suite_name == "mode-weighting") {
    suite = coggen::ablation_suite::mode_weighting;
  } else {
    coggen::fail(errc::bad_config, "unknown suite " + suite_name);
  }

  const std::function<void(const coggen::ablation_run&)> progress =
      [](const coggen::ablation_run& r) {
        std::printf("  %-14s seed %llu: final RLNE %.6f%s\n", r.arm.c_str(),
                    static_cast<unsigned long long>(r.seed), r.final_rlne,
                    r.diverged ? " (diverged)" : "");
        std::fflush(stdout);
      };
  const coggen::ablation_report report =
      coggen::run_ablation(suite, cfg, seeds, threads, &progress);

  fs::create_directories(out_dir);
  for (const coggen::ablation_run& r : report.runs) {
    const std::string name =
        "curve_" + sanitize(r.arm) + "_seed" + std::to_string(r.seed) + ".csv";
    coggen::write_curve_csv((fs::path(out_dir) / name).string(), r.curve);
  }
  coggen::json table = coggen::ablation_table_json(report);
  table["format"] = "coggen-report/1";
  table["kind"] = "ablate";
  table["config"] = coggen::config_to_json(cfg);
  write_json_file((fs::path(out_dir) / "ablation.json").string(), table);

  std::printf("\n%-16s %12s %12s %9s\n", "arm", "mean RLNE", "mean PSNR", "diverged");
  for (const coggen::arm_summary& s : coggen::summarize(report))
    std::printf("%-16s %12.6f %12.2f %9zu\n", s.arm.c_str(), s.mean_final_rlne,
                s.mean_final_psnr, s.diverged);
  std::printf("report: %s\n", (fs::path(out_dir) / "ablation.json").string().c_str());
  return 0;
}

int cmd_verify_theory(const std::string& section, const std::string& out_path) {
  const std::vector<coggen::section_report> sections = coggen::run_verify_sections(section);
  bool all = true;
  for (const coggen::section_report& s : sections) {
    std::printf("[%s]\n", s.section.c_str());
    for (const coggen::check_line& l : s.lines) {
      std::printf("  %-34s %s  measured %.6g vs %.6g  %s\n", l.name.c_str(),
                  l.pass ? "PASS" : "FAIL", l.measured, l.limit, l.note.c_str());
      all = all && l.pass;
    }
  }
  write_json_file(out_path, coggen::verify_theory_json(sections));
  std::printf("%s — report written to %s\n", all ? "all sections pass" : "FAILURES present",
              out_path.c_str());
  return all ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coggen: curriculum-scheduled unsupervised CS-MRI reconstruction"};
  app.require_subcommand(1);

  std::string spec_path, out_path, config_path, out_dir, suite, section = "all";
  std::int64_t seed_override = -1;
  std::size_t seeds = 5, threads = 0;
  bool vanilla = false;

  CLI::App* gp = app.add_subcommand("gen-phantom", "Generate a phantom CGIM file");
  gp->add_option("--spec", spec_path, "config JSON")->required();
  gp->add_option("--out", out_path, "output .cgim")->required();
  gp->add_option("--seed", seed_override, "override phantom seed");

  CLI::App* gm = app.add_subcommand("gen-mask", "Generate a sampling-mask CGIM file");
  gm->add_option("--spec", spec_path, "config JSON")->required();
  gm->add_option("--out", out_path, "output .cgim")->required();
  gm->add_option("--seed", seed_override, "override mask seed");

  CLI::App* rc = app.add_subcommand("reconstruct", "Run one reconstruction");
  rc->add_option("--config", config_path, "config JSON")->required();
  rc->add_option("--out-dir", out_dir, "output directory")->required();
  rc->add_flag("--vanilla", vanilla, "force vanilla (unweighted single-stage) fitting");
  rc->add_option("--seed", seed_override, "override optimizer seed");

  CLI::App* ab = app.add_subcommand("ablate", "Run an ablation suite");
  ab->add_option("--suite", suite, "backbone|curriculum-size|mode-weighting")->required();
  ab->add_option("--config", config_path, "config JSON")->required();
  ab->add_option("--seeds", seeds, "number of seeds per arm");
  ab->add_option("--out-dir", out_dir, "output directory")->required();
  ab->add_option("--threads", threads, "worker threads (0 = auto, COGGEN_THREADS caps)");
  ab->add_option("--seed", seed_override, "override base optimizer seed");

  CLI::App* vt = app.add_subcommand("verify-theory", "Numerically verify the analysis");
  vt->add_option("--section", section, "spectral|pl|bounds|all");
  vt->add_option("--out", out_path, "report JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc2 = app.exit(e);
    return rc2 == 0 ? 0 : 2;
  }

  try {
    if (gp->parsed()) return cmd_gen_phantom(spec_path, out_path, seed_override);
    if (gm->parsed()) return cmd_gen_mask(spec_path, out_path, seed_override);
    if (rc->parsed()) return cmd_reconstruct(config_path, out_dir, vanilla, seed_override);
    if (ab->parsed()) return cmd_ablate(config_path, suite, seeds, out_dir, threads,
                                        seed_override);
    if (vt->parsed())
      return cmd_verify_theory(section, out_path.empty() ? "report.json" : out_path);
  } catch (const coggen::error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}
