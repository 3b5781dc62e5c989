#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "coggen/errors.hpp"
#include "coggen/inr.hpp"
#include "coggen/optimizer.hpp"
#include "coggen/phantom.hpp"
#include "coggen/sampling_mask.hpp"
#include "coggen/spcl.hpp"

namespace coggen {

using json = nlohmann::ordered_json;

// How to obtain the sampling mask: generate from these parameters, or load
// the CGIM file named in `file`.
struct mask_spec {
  mask_pattern pattern = mask_pattern::vd2d;
  std::size_t height = 0;  // 0 = inherit the phantom dimension
  std::size_t width = 0;
  double acceleration_factor = 8.0;
  double center_fraction = 0.04;
  std::uint64_t seed = 0;
  std::string file;
};

struct noise_spec {
  double sigma = 0.0;      // absolute std-dev per component
  double sigma_rel = 0.0;  // > 0: sigma = sigma_rel * max |y|, overrides sigma
  std::uint64_t seed = 0;
};

struct output_spec {
  bool pgm = false;
};

// One experiment of record: a single JSON document with sections
// {phantom, mask, noise, inr, curriculum, optimizer, output}.
struct experiment_config {
  phantom_spec phantom;
  std::string phantom_file;  // optional CGIM override
  mask_spec mask;
  noise_spec noise;
  run_config run;
  output_spec output;
};

namespace detail {

[[noreturn]] inline void cfg_fail(const std::string& msg) {
  fail(errc::bad_config, "config: " + msg);
}

inline void check_keys(const json& j, const char* section,
                       std::initializer_list<const char*> allowed) {
  if (!j.is_object()) cfg_fail(std::string(section) + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known) cfg_fail("unknown key \"" + item.key() + "\" in section " + section);
  }
}

inline double num_or(const json& j, const char* key, double def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_number()) cfg_fail(std::string(key) + " must be a number");
  return j[key].get<double>();
}

inline std::uint64_t uint_or(const json& j, const char* key, std::uint64_t def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_number_integer() || (j[key].is_number_integer() && j[key].get<std::int64_t>() < 0))
    cfg_fail(std::string(key) + " must be a non-negative integer");
  return j[key].get<std::uint64_t>();
}

inline bool bool_or(const json& j, const char* key, bool def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_boolean()) cfg_fail(std::string(key) + " must be a boolean");
  return j[key].get<bool>();
}

inline std::string str_or(const json& j, const char* key, const std::string& def) {
  if (!j.contains(key)) return def;
  if (!j[key].is_string()) cfg_fail(std::string(key) + " must be a string");
  return j[key].get<std::string>();
}

template <class Enum>
Enum parse_enum(const std::string& s, std::initializer_list<Enum> values, const char* what) {
  for (Enum v : values)
    if (s == to_string(v)) return v;
  cfg_fail(std::string("unknown ") + what + " \"" + s + "\"");
}

inline activation_kind parse_activation(const std::string& s) {
  if (s == "SINE") return activation_kind::sine;
  cfg_fail("unknown activation \"" + s + "\"");
}

inline const char* to_string(activation_kind) { return "SINE"; }

}  // namespace detail

inline phantom_spec parse_phantom_spec(const json& j) {
  detail::check_keys(j, "phantom", {"kind", "height", "width", "phase_mode", "seed", "file"});
  phantom_spec s;
  s.kind = detail::parse_enum(detail::str_or(j, "kind", "SHEPP_LOGAN"),
                              {phantom_kind::shepp_logan, phantom_kind::ellipse_suite,
                               phantom_kind::checker_smooth},
                              "phantom kind");
  s.height = detail::uint_or(j, "height", 64);
  s.width = detail::uint_or(j, "width", 64);
  s.phase = detail::parse_enum(detail::str_or(j, "phase_mode", "ZERO"),
                               {phase_mode::zero, phase_mode::smooth_random}, "phase_mode");
  s.seed = detail::uint_or(j, "seed", 0);
  if (s.height < 1 || s.width < 1) detail::cfg_fail("phantom dimensions must be >= 1");
  return s;
}

inline mask_spec parse_mask_spec(const json& j) {
  detail::check_keys(j, "mask",
                     {"pattern", "height", "width", "acceleration_factor", "center_fraction",
                      "seed", "file"});
  mask_spec s;
  s.pattern = detail::parse_enum(detail::str_or(j, "pattern", "VD2D"),
                                 {mask_pattern::vd2d, mask_pattern::vd1d_pe, mask_pattern::full},
                                 "mask pattern");
  s.height = detail::uint_or(j, "height", 0);
  s.width = detail::uint_or(j, "width", 0);
  s.acceleration_factor = detail::num_or(j, "acceleration_factor", 8.0);
  s.center_fraction = detail::num_or(j, "center_fraction", 0.04);
  s.seed = detail::uint_or(j, "seed", 0);
  s.file = detail::str_or(j, "file", "");
  if (s.file.empty()) {
    if (s.acceleration_factor < 1.0) detail::cfg_fail("acceleration_factor must be >= 1");
    if (s.center_fraction < 0.0 || s.center_fraction > 1.0)
      detail::cfg_fail("center_fraction must lie in [0, 1]");
  }
  return s;
}

inline noise_spec parse_noise_spec(const json& j) {
  detail::check_keys(j, "noise", {"sigma", "sigma_rel", "seed"});
  noise_spec s;
  s.sigma = detail::num_or(j, "sigma", 0.0);
  s.sigma_rel = detail::num_or(j, "sigma_rel", 0.0);
  s.seed = detail::uint_or(j, "seed", 0);
  if (s.sigma < 0.0 || s.sigma_rel < 0.0) detail::cfg_fail("noise levels must be >= 0");
  return s;
}

inline inr_config parse_inr_config(const json& j) {
  detail::check_keys(j, "inr",
                     {"hidden_layers", "hidden_width", "fourier_features", "fourier_scale",
                      "activation", "omega0"});
  inr_config c;
  c.hidden_layers = detail::uint_or(j, "hidden_layers", c.hidden_layers);
  c.hidden_width = detail::uint_or(j, "hidden_width", c.hidden_width);
  c.fourier_features = detail::uint_or(j, "fourier_features", c.fourier_features);
  c.fourier_scale = detail::num_or(j, "fourier_scale", c.fourier_scale);
  c.activation = detail::parse_activation(detail::str_or(j, "activation", "SINE"));
  c.omega0 = detail::num_or(j, "omega0", c.omega0);
  validate(c);
  return c;
}

inline curriculum_config parse_curriculum_config(const json& j) {
  detail::check_keys(j, "curriculum",
                     {"K1", "K2", "w1", "w2", "delta_lambda_mode", "delta_lambda",
                      "growth_lambda", "delta_r_mode", "delta_r", "growth_r", "lambda0", "r0"});
  curriculum_config c;
  c.k1 = detail::uint_or(j, "K1", c.k1);
  if (j.contains("K2")) {
    if (!j["K2"].is_array()) detail::cfg_fail("K2 must be an array of positive integers");
    c.k2.clear();
    for (const auto& e : j["K2"]) {
      if (!e.is_number_integer() || e.get<std::int64_t>() < 1)
        detail::cfg_fail("K2 entries must be positive integers");
      c.k2.push_back(e.get<std::size_t>());
    }
  }
  c.w1 = detail::num_or(j, "w1", c.w1);
  c.w2 = detail::num_or(j, "w2", c.w2);
  c.lambda_mode = detail::parse_enum(detail::str_or(j, "delta_lambda_mode", "GEOMETRIC"),
                                     {growth_mode::additive, growth_mode::geometric},
                                     "delta_lambda_mode");
  c.r_mode = detail::parse_enum(detail::str_or(j, "delta_r_mode", "GEOMETRIC"),
                                {growth_mode::additive, growth_mode::geometric}, "delta_r_mode");
  c.lambda_step = c.lambda_mode == growth_mode::additive
                      ? detail::num_or(j, "delta_lambda", 0.0)
                      : detail::num_or(j, "growth_lambda", 0.0);
  c.r_step = c.r_mode == growth_mode::additive ? detail::num_or(j, "delta_r", 0.0)
                                               : detail::num_or(j, "growth_r", 0.0);
  c.lambda0 = detail::num_or(j, "lambda0", 0.0);
  c.r0 = detail::num_or(j, "r0", 0.0);
  if (c.k1 < 1) detail::cfg_fail("K1 must be >= 1");
  if (c.k2.size() != c.k1) detail::cfg_fail("K2 must list exactly K1 stage lengths");
  return c;
}

inline output_spec parse_output_spec(const json& j) {
  detail::check_keys(j, "output", {"pgm"});
  output_spec s;
  s.pgm = detail::bool_or(j, "pgm", false);
  return s;
}

inline experiment_config parse_experiment_config(const json& root) {
  detail::check_keys(root, "config root",
                     {"phantom", "mask", "noise", "inr", "curriculum", "optimizer", "output"});
  experiment_config cfg;
  const json empty = json::object();
  const json& jp = root.contains("phantom") ? root["phantom"] : empty;
  cfg.phantom = parse_phantom_spec(jp);
  cfg.phantom_file = detail::str_or(jp, "file", "");
  cfg.mask = parse_mask_spec(root.contains("mask") ? root["mask"] : empty);
  cfg.noise = parse_noise_spec(root.contains("noise") ? root["noise"] : empty);
  cfg.run.inr = parse_inr_config(root.contains("inr") ? root["inr"] : empty);
  cfg.run.curriculum = parse_curriculum_config(root.contains("curriculum") ? root["curriculum"]
                                                                            : empty);

  const json& jo = root.contains("optimizer") ? root["optimizer"] : empty;
  detail::check_keys(jo, "optimizer",
                     {"optimizer_kind", "learning_rate", "adam_betas", "adam_eps", "seed",
                      "log_every", "vanilla_mode", "weighting_mode"});
  cfg.run.optimizer = detail::parse_enum(detail::str_or(jo, "optimizer_kind", "ADAM"),
                                         {optimizer_kind::adam, optimizer_kind::gd},
                                         "optimizer_kind");
  cfg.run.learning_rate = detail::num_or(jo, "learning_rate", 1e-4);
  if (jo.contains("adam_betas")) {
    const json& b = jo["adam_betas"];
    if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number())
      detail::cfg_fail("adam_betas must be an array of two numbers");
    cfg.run.adam_beta1 = b[0].get<double>();
    cfg.run.adam_beta2 = b[1].get<double>();
  }
  cfg.run.adam_eps = detail::num_or(jo, "adam_eps", 1e-8);
  cfg.run.seed = detail::uint_or(jo, "seed", 0);
  cfg.run.log_every = detail::uint_or(jo, "log_every", 50);
  cfg.run.vanilla_mode = detail::bool_or(jo, "vanilla_mode", false);
  cfg.run.weighting = detail::parse_enum(
      detail::str_or(jo, "weighting_mode", "DUAL"),
      {weighting_mode::dual, weighting_mode::student_only, weighting_mode::teacher_only,
       weighting_mode::uniform},
      "weighting_mode");
  if (cfg.run.learning_rate <= 0.0) detail::cfg_fail("learning_rate must be positive");
  if (cfg.run.log_every < 1) detail::cfg_fail("log_every must be >= 1");

  cfg.output = parse_output_spec(root.contains("output") ? root["output"] : empty);
  return cfg;
}

inline json parse_json_text(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) detail::cfg_fail("malformed JSON");
  return j;
}

inline json load_json_file(const std::string& path) {
  std::ifstream is(path);
  require(is.good(), errc::io_error, "cannot open config " + path);
  std::string text((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  return parse_json_text(text);
}

inline experiment_config load_experiment_config(const std::string& path) {
  return parse_experiment_config(load_json_file(path));
}

// Canonical echo of the effective configuration (defaults resolved), embedded
// into run reports so every artifact records the exact parameters used.
inline json config_to_json(const experiment_config& cfg) {
  json j;
  j["phantom"] = {{"kind", to_string(cfg.phantom.kind)},
                  {"height", cfg.phantom.height},
                  {"width", cfg.phantom.width},
                  {"phase_mode", to_string(cfg.phantom.phase)},
                  {"seed", cfg.phantom.seed}};
  if (!cfg.phantom_file.empty()) j["phantom"]["file"] = cfg.phantom_file;
  j["mask"] = {{"pattern", to_string(cfg.mask.pattern)},
               {"height", cfg.mask.height},
               {"width", cfg.mask.width},
               {"acceleration_factor", cfg.mask.acceleration_factor},
               {"center_fraction", cfg.mask.center_fraction},
               {"seed", cfg.mask.seed}};
  if (!cfg.mask.file.empty()) j["mask"]["file"] = cfg.mask.file;
  j["noise"] = {{"sigma", cfg.noise.sigma},
                {"sigma_rel", cfg.noise.sigma_rel},
                {"seed", cfg.noise.seed}};
  j["inr"] = {{"hidden_layers", cfg.run.inr.hidden_layers},
              {"hidden_width", cfg.run.inr.hidden_width},
              {"fourier_features", cfg.run.inr.fourier_features},
              {"fourier_scale", cfg.run.inr.fourier_scale},
              {"activation", detail::to_string(cfg.run.inr.activation)},
              {"omega0", cfg.run.inr.omega0}};
  const curriculum_config& cc = cfg.run.curriculum;
  j["curriculum"] = {{"K1", cc.k1},
                     {"K2", cc.k2},
                     {"w1", cc.w1},
                     {"w2", cc.w2},
                     {"delta_lambda_mode", to_string(cc.lambda_mode)},
                     {cc.lambda_mode == growth_mode::additive ? "delta_lambda" : "growth_lambda",
                      cc.lambda_step},
                     {"delta_r_mode", to_string(cc.r_mode)},
                     {cc.r_mode == growth_mode::additive ? "delta_r" : "growth_r", cc.r_step},
                     {"lambda0", cc.lambda0},
                     {"r0", cc.r0}};
  j["optimizer"] = {{"optimizer_kind", to_string(cfg.run.optimizer)},
                    {"learning_rate", cfg.run.learning_rate},
                    {"adam_betas", {cfg.run.adam_beta1, cfg.run.adam_beta2}},
                    {"adam_eps", cfg.run.adam_eps},
                    {"seed", cfg.run.seed},
                    {"log_every", cfg.run.log_every},
                    {"vanilla_mode", cfg.run.vanilla_mode},
                    {"weighting_mode", to_string(cfg.run.weighting)}};
  j["output"] = {{"pgm", cfg.output.pgm}};
  return j;
}

}  // namespace coggen
