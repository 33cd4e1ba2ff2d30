#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "riscov/errors.hpp"
#include "riscov/inversion.hpp"
#include "riscov/simulator.hpp"

namespace riscov {

enum class Preset {
  kProximitySweep,
  kInterferenceStudy,
  kFadingSensitivity,
  kPlacementComparison,
  kTimingBenchmark,
  kCustom,
};

enum class Method { kAnalytic, kMonteCarlo, kBoth };

// Flat experiment description assembled from a key=value config file plus
// preset defaults. `base_scene()` resolves it into the scene the sweep
// loops then specialize per point (elements, square center, process, ...).
struct ExperimentConfig {
  Preset preset = Preset::kCustom;
  Method method = Method::kAnalytic;
  std::uint64_t seed = 1;
  std::string out_path;
  bool rate_in_bits = false;

  double carrier_ghz = 2.4;  // assumed default; absolute rates scale with it
  double p0_watts = 1.0;
  double sigma2_watts = 1e-13;
  double lambda_bs_per_km2 = 10.0;
  double serving_distance_m = 100.0;
  double alpha_los = 2.0;
  double alpha_nlos = 3.0;
  double alpha_ir = 3.0;

  bool ris_enabled = true;
  std::string ris_region = "circle";  // circle | square
  std::optional<double> ris_center_x;  // default: the serving BS
  std::optional<double> ris_center_y;
  double ris_radius_m = 20.0;
  double ris_width_m = 10.0;
  std::string ris_process = "ppp";  // ppp | bpp | equidistant | best_selection
  double ris_mean_count = 5.0;
  int ris_count = 5;
  int ris_elements = 80;
  FadingModel ris_fading = FadingModel::rayleigh();

  bool interferer_enabled = false;
  double ir_ring_radius_m = 20.0;
  double ir_mean_per_cell = 5.0;
  int ir_elements = 80;
  OverlapModel ir_overlap = OverlapModel::fixed(0.3);

  std::uint64_t mc_trials = 100000;
  double mc_truncation_radius_m = 0.0;  // 0: tail-fraction rule
  double mc_tail_fraction = 0.005;
  double analytic_x_max_m = 0.0;  // 0: infinite plane

  PvQuadratureConfig pv;
  RateGridPolicy rate_policy;

  std::vector<double> thresholds_db;
  std::vector<int> elements_sweep;
  std::vector<double> center_x_sweep;
  std::vector<double> center_y_sweep;
  int timing_reps = 3;

  Scene base_scene() const {
    Scene sc;
    sc.net.p0_watts = p0_watts;
    sc.net.sigma2_watts = sigma2_watts;
    sc.net.lambda_bs = lambda_bs_per_km2 * 1e-6;
    sc.net.pathloss = PathLossParams::from_carrier(carrier_ghz * 1e9,
                                                   alpha_los, alpha_nlos,
                                                   alpha_ir);
    sc.serving_r = serving_distance_m;
    sc.mc_truncation_m = mc_truncation_radius_m;
    sc.mc_tail_fraction = mc_tail_fraction;
    sc.analytic_x_max_m = analytic_x_max_m;
    if (ris_enabled) {
      RisDeployment dep;
      const Vec2 center{ris_center_x.value_or(serving_distance_m),
                        ris_center_y.value_or(0.0)};
      if (ris_region == "circle") {
        dep.region = Region::circle(center, ris_radius_m);
      } else if (ris_region == "square") {
        dep.region = Region::square(center, ris_width_m);
      } else {
        throw DomainError("ris.region: must be circle or square");
      }
      if (ris_process == "ppp") {
        const double measure = ris_region == "circle"
                                   ? 2.0 * kPi * ris_radius_m
                                   : ris_width_m * ris_width_m;
        dep.process = PointProcess::ppp(ris_mean_count / measure);
      } else if (ris_process == "bpp") {
        dep.process = PointProcess::bpp(ris_count);
      } else if (ris_process == "equidistant") {
        dep.process = PointProcess::equidistant(ris_count);
      } else if (ris_process == "best_selection") {
        dep.process = PointProcess::best_selection(ris_count);
      } else {
        throw DomainError(
            "ris.process: must be ppp, bpp, equidistant, or best_selection");
      }
      dep.elements = ris_elements;
      dep.fading = ris_fading;
      sc.ris = dep;
    }
    if (interferer_enabled) {
      sc.interferer_ris = InterfererRis{ir_ring_radius_m, ir_mean_per_cell,
                                        ir_elements, ir_overlap};
    }
    return sc;
  }
};

struct ResultRow {
  std::string curve;
  std::string method;   // analytic | monte_carlo
  std::string x_label;
  double x = 0.0;
  std::string metric;
  double value = 0.0;
  std::optional<double> std_error;   // empty for analytic rows
  std::optional<double> wall_time_s; // populated on timing rows only
};

struct ExperimentResult {
  std::vector<ResultRow> rows;
  std::string csv;
  std::string summary;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

[[noreturn]] inline void config_fail(int line, const std::string& msg) {
  throw DomainError("config line " + std::to_string(line) + ": " + msg);
}

inline double parse_num(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    config_fail(line, key + ": expected a number, got '" + v + "'");
  }
}

inline std::uint64_t parse_u64(const std::string& v, int line,
                               const std::string& key) {
  const double x = parse_num(v, line, key);
  if (x < 0.0 || x != std::floor(x))
    config_fail(line, key + ": expected a nonnegative integer");
  return static_cast<std::uint64_t>(x);
}

inline int parse_int(const std::string& v, int line, const std::string& key) {
  const double x = parse_num(v, line, key);
  if (x != std::floor(x) || std::abs(x) > 1e9)
    config_fail(line, key + ": expected an integer");
  return static_cast<int>(x);
}

inline bool parse_bool(const std::string& v, int line, const std::string& key) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  config_fail(line, key + ": expected true/false");
}

inline std::vector<double> parse_num_list(const std::string& v, int line,
                                          const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) config_fail(line, key + ": empty list element");
    out.push_back(parse_num(item, line, key));
  }
  if (out.empty()) config_fail(line, key + ": sweep axis must be nonempty");
  return out;
}

inline std::vector<int> parse_int_list(const std::string& v, int line,
                                       const std::string& key) {
  std::vector<int> out;
  for (double d : parse_num_list(v, line, key)) {
    if (d != std::floor(d)) config_fail(line, key + ": expected integers");
    out.push_back(static_cast<int>(d));
  }
  return out;
}

inline FadingModel parse_fading(const std::string& v, int line) {
  if (v == "rayleigh") return FadingModel::rayleigh();
  if (v == "constant" || v == "constant_power")
    return FadingModel::constant_power();
  if (v.rfind("nakagami", 0) == 0) {
    const std::string m = v.substr(8);
    if (!m.empty() && m.find_first_not_of("0123456789") == std::string::npos)
      return FadingModel::nakagami(std::stoi(m));
  }
  config_fail(line, "ris.fading: expected rayleigh, nakagamiN (integer N >= "
                    "1), or constant_power");
}

// Overlap column: plain number -> fixed probability; "C/M" -> beam-width
// model with coefficient C (xi = min(1, C/M)).
inline OverlapModel parse_overlap(const std::string& v, int line) {
  const std::size_t slash = v.find('/');
  if (slash != std::string::npos) {
    const std::string num = trim(v.substr(0, slash));
    const std::string den = trim(v.substr(slash + 1));
    if (den != "M" && den != "m")
      config_fail(line, "interferer_ris.overlap: denominator must be M");
    return OverlapModel::beam_width(
        parse_num(num, line, "interferer_ris.overlap"));
  }
  const double xi = parse_num(v, line, "interferer_ris.overlap");
  if (xi < 0.0 || xi > 1.0)
    config_fail(line, "interferer_ris.overlap: fixed value must be in [0,1]");
  return OverlapModel::fixed(xi);
}

inline std::vector<double> default_thresholds_db() {
  std::vector<double> t;
  for (double db = -10.0; db <= 20.0 + 1e-9; db += 2.5) t.push_back(db);
  return t;
}

inline void apply_preset(ExperimentConfig& c) {
  switch (c.preset) {
    case Preset::kProximitySweep:
      c.ris_region = "square";
      c.ris_width_m = 10.0;
      c.ris_process = "bpp";
      c.ris_count = 5;
      c.ris_elements = 80;
      c.center_x_sweep = {15.0, 30.0, 50.0, 70.0, 85.0};
      c.center_y_sweep = {0.0, 10.0};
      c.method = Method::kAnalytic;
      break;
    case Preset::kInterferenceStudy:
      c.interferer_enabled = true;
      c.ir_overlap = OverlapModel::fixed(0.3);
      c.alpha_ir = 2.0;
      // The alpha_ir = 2 reflected field grows with the integration bound
      // (log-divergent on the whole plane); a wide fixed bound stands in
      // for the unbounded network.
      c.analytic_x_max_m = 5e5;
      c.elements_sweep = {8, 20, 40, 80};
      c.method = Method::kAnalytic;
      break;
    case Preset::kFadingSensitivity:
      c.elements_sweep = {8, 20, 40, 80};
      c.method = Method::kAnalytic;
      break;
    case Preset::kPlacementComparison:
      c.elements_sweep = {20, 80};
      c.ris_count = 5;
      c.ris_mean_count = 5.0;
      c.method = Method::kMonteCarlo;
      c.mc_truncation_radius_m = 5000.0;
      break;
    case Preset::kTimingBenchmark:
      c.elements_sweep = {80};
      c.method = Method::kBoth;
      c.mc_truncation_radius_m = 5000.0;
      break;
    case Preset::kCustom:
      break;
  }
}

inline std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

// Key reference: {key, default, description}. The CLI prints this table;
// the parser is driven by the same names so they cannot drift apart.
inline const std::vector<std::array<std::string, 3>>& config_key_reference() {
  static const std::vector<std::array<std::string, 3>> kKeys = {
      {"preset",
       "custom",
       "proximity_sweep | interference_study | fading_sensitivity | "
       "placement_comparison | timing_benchmark | custom"},
      {"method", "analytic", "analytic | monte_carlo | both"},
      {"seed", "1", "Monte Carlo seed"},
      {"out", "", "CSV output path (empty: stdout only)"},
      {"rate_units", "nats", "nats | bits"},
      {"carrier_ghz", "2.4",
       "carrier frequency; sets beta = (c / 4 pi f)^2. Assumed default; "
       "absolute rates scale with it"},
      {"p0_watts", "1.0", "BS transmit power"},
      {"sigma2_watts", "1e-13", "noise power"},
      {"lambda_bs_per_km2", "10", "BS density"},
      {"serving_distance_m", "100", "UE to serving BS distance r"},
      {"alpha_los", "2", "LoS path-loss exponent (BS-RIS, RIS-UE)"},
      {"alpha_nlos", "3", "NLoS path-loss exponent (direct links)"},
      {"alpha_ir", "3", "interfering-RIS to UE path-loss exponent"},
      {"ris.enabled", "true", "serving cell has a reflector deployment"},
      {"ris.region", "circle", "circle | square"},
      {"ris.center_x_m", "(serving BS)", "region center x"},
      {"ris.center_y_m", "0", "region center y"},
      {"ris.radius_m", "20", "ring radius R"},
      {"ris.width_m", "10", "square width"},
      {"ris.process", "ppp", "ppp | bpp | equidistant | best_selection"},
      {"ris.mean_count", "5", "mean reflectors (ppp)"},
      {"ris.count", "5", "reflector count (bpp/equidistant/best_selection)"},
      {"ris.elements", "80", "elements M per reflector (power gain M^2)"},
      {"ris.fading", "rayleigh", "rayleigh | nakagamiN | constant_power"},
      {"interferer_ris.enabled", "false",
       "interfering cells carry reflector rings"},
      {"interferer_ris.ring_radius_m", "20", "interferer ring radius"},
      {"interferer_ris.mean_per_cell", "5", "mean reflectors per cell"},
      {"interferer_ris.elements", "80", "elements per interfering reflector"},
      {"interferer_ris.overlap", "0.3",
       "beam overlap probability xi: number in [0,1] or C/M"},
      {"mc.trials", "100000", "Monte Carlo trials"},
      {"mc.truncation_radius_m", "0",
       "interferer field radius; 0 applies the tail-fraction rule"},
      {"mc.tail_fraction", "0.005",
       "truncated share of mean interference when the rule is active"},
      {"analytic.x_max_m", "0",
       "outer bound of the analytic interferer integral; 0 = infinite"},
      {"pv.epsilon", "1e-6", "inversion head cutoff"},
      {"pv.w_max", "1e4", "inversion initial outer limit"},
      {"pv.rel_tol", "1e-7", "inversion refinement tolerance"},
      {"pv.max_rounds", "12", "inversion refinement round cap"},
      {"sweep.thresholds_db", "-10..20 step 2.5",
       "coverage thresholds, comma separated dB"},
      {"sweep.elements", "preset", "element counts M, comma separated"},
      {"sweep.center_x_m", "preset", "square center x values"},
      {"sweep.center_y_m", "preset", "square center y values"},
      {"timing.reps", "3", "timed repetitions per point (median reported)"},
  };
  return kKeys;
}

// Parses a key=value config (UTF-8, '#' comments, flat dotted keys) into a
// validated ExperimentConfig. Unknown keys and malformed values are
// rejected naming the line. An empty file yields the documented defaults.
inline ExperimentConfig validate_config(const std::string& raw) {
  struct Entry {
    int line;
    std::string key, value;
  };
  std::vector<Entry> entries;
  {
    std::stringstream ss(raw);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
      ++lineno;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = detail::trim(line);
      if (line.empty()) continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string::npos)
        detail::config_fail(lineno, "expected 'key = value'");
      Entry e{lineno, detail::trim(line.substr(0, eq)),
              detail::trim(line.substr(eq + 1))};
      if (e.key.empty()) detail::config_fail(lineno, "empty key");
      entries.push_back(std::move(e));
    }
  }

  ExperimentConfig cfg;
  cfg.thresholds_db = detail::default_thresholds_db();

  // Preset first (wherever it appears), so later keys override its defaults.
  for (const auto& e : entries) {
    if (e.key != "preset") continue;
    if (e.value == "proximity_sweep") cfg.preset = Preset::kProximitySweep;
    else if (e.value == "interference_study") cfg.preset = Preset::kInterferenceStudy;
    else if (e.value == "fading_sensitivity") cfg.preset = Preset::kFadingSensitivity;
    else if (e.value == "placement_comparison") cfg.preset = Preset::kPlacementComparison;
    else if (e.value == "timing_benchmark") cfg.preset = Preset::kTimingBenchmark;
    else if (e.value == "custom") cfg.preset = Preset::kCustom;
    else detail::config_fail(e.line, "preset: unknown value '" + e.value + "'");
  }
  detail::apply_preset(cfg);

  bool method_set = false;
  for (const auto& e : entries) {
    const std::string& k = e.key;
    const std::string& v = e.value;
    const int ln = e.line;
    if (k == "preset") {
      continue;
    } else if (k == "method") {
      if (v == "analytic") cfg.method = Method::kAnalytic;
      else if (v == "monte_carlo" || v == "mc") cfg.method = Method::kMonteCarlo;
      else if (v == "both") cfg.method = Method::kBoth;
      else detail::config_fail(ln, "method: expected analytic, monte_carlo, or both");
      method_set = true;
    } else if (k == "seed") {
      cfg.seed = detail::parse_u64(v, ln, k);
    } else if (k == "out") {
      cfg.out_path = v;
    } else if (k == "rate_units") {
      if (v == "nats") cfg.rate_in_bits = false;
      else if (v == "bits") cfg.rate_in_bits = true;
      else detail::config_fail(ln, "rate_units: expected nats or bits");
    } else if (k == "carrier_ghz") {
      cfg.carrier_ghz = detail::parse_num(v, ln, k);
      if (!(cfg.carrier_ghz > 0.0)) detail::config_fail(ln, "carrier_ghz: must be > 0");
    } else if (k == "p0_watts") {
      cfg.p0_watts = detail::parse_num(v, ln, k);
      if (!(cfg.p0_watts > 0.0)) detail::config_fail(ln, "p0_watts: must be > 0");
    } else if (k == "sigma2_watts") {
      cfg.sigma2_watts = detail::parse_num(v, ln, k);
      if (cfg.sigma2_watts < 0.0) detail::config_fail(ln, "sigma2_watts: must be >= 0");
    } else if (k == "lambda_bs_per_km2") {
      cfg.lambda_bs_per_km2 = detail::parse_num(v, ln, k);
      if (cfg.lambda_bs_per_km2 < 0.0)
        detail::config_fail(ln, "lambda_bs_per_km2: density must be >= 0");
    } else if (k == "serving_distance_m") {
      cfg.serving_distance_m = detail::parse_num(v, ln, k);
      if (!(cfg.serving_distance_m > 0.0))
        detail::config_fail(ln, "serving_distance_m: must be > 0");
    } else if (k == "alpha_los") {
      cfg.alpha_los = detail::parse_num(v, ln, k);
    } else if (k == "alpha_nlos") {
      cfg.alpha_nlos = detail::parse_num(v, ln, k);
    } else if (k == "alpha_ir") {
      cfg.alpha_ir = detail::parse_num(v, ln, k);
    } else if (k == "ris.enabled") {
      cfg.ris_enabled = detail::parse_bool(v, ln, k);
    } else if (k == "ris.region") {
      if (v != "circle" && v != "square")
        detail::config_fail(ln, "ris.region: expected circle or square");
      cfg.ris_region = v;
    } else if (k == "ris.center_x_m") {
      cfg.ris_center_x = detail::parse_num(v, ln, k);
    } else if (k == "ris.center_y_m") {
      cfg.ris_center_y = detail::parse_num(v, ln, k);
    } else if (k == "ris.radius_m") {
      cfg.ris_radius_m = detail::parse_num(v, ln, k);
      if (!(cfg.ris_radius_m > 0.0)) detail::config_fail(ln, "ris.radius_m: must be > 0");
    } else if (k == "ris.width_m") {
      cfg.ris_width_m = detail::parse_num(v, ln, k);
      if (!(cfg.ris_width_m > 0.0)) detail::config_fail(ln, "ris.width_m: must be > 0");
    } else if (k == "ris.process") {
      if (v != "ppp" && v != "bpp" && v != "equidistant" && v != "best_selection")
        detail::config_fail(ln, "ris.process: expected ppp, bpp, equidistant, "
                                "or best_selection");
      cfg.ris_process = v;
    } else if (k == "ris.mean_count") {
      cfg.ris_mean_count = detail::parse_num(v, ln, k);
      if (cfg.ris_mean_count < 0.0)
        detail::config_fail(ln, "ris.mean_count: density must be >= 0");
    } else if (k == "ris.count") {
      cfg.ris_count = detail::parse_int(v, ln, k);
      if (cfg.ris_count < 0) detail::config_fail(ln, "ris.count: must be >= 0");
    } else if (k == "ris.elements") {
      cfg.ris_elements = detail::parse_int(v, ln, k);
      if (cfg.ris_elements < 0) detail::config_fail(ln, "ris.elements: must be >= 0");
    } else if (k == "ris.fading") {
      cfg.ris_fading = detail::parse_fading(v, ln);
    } else if (k == "interferer_ris.enabled") {
      cfg.interferer_enabled = detail::parse_bool(v, ln, k);
    } else if (k == "interferer_ris.ring_radius_m") {
      cfg.ir_ring_radius_m = detail::parse_num(v, ln, k);
      if (!(cfg.ir_ring_radius_m > 0.0))
        detail::config_fail(ln, "interferer_ris.ring_radius_m: must be > 0");
    } else if (k == "interferer_ris.mean_per_cell") {
      cfg.ir_mean_per_cell = detail::parse_num(v, ln, k);
      if (cfg.ir_mean_per_cell < 0.0)
        detail::config_fail(ln, "interferer_ris.mean_per_cell: density must be >= 0");
    } else if (k == "interferer_ris.elements") {
      cfg.ir_elements = detail::parse_int(v, ln, k);
      if (cfg.ir_elements < 0)
        detail::config_fail(ln, "interferer_ris.elements: must be >= 0");
    } else if (k == "interferer_ris.overlap") {
      cfg.ir_overlap = detail::parse_overlap(v, ln);
    } else if (k == "mc.trials") {
      cfg.mc_trials = detail::parse_u64(v, ln, k);
      if (cfg.mc_trials == 0) detail::config_fail(ln, "mc.trials: must be > 0");
    } else if (k == "mc.truncation_radius_m") {
      cfg.mc_truncation_radius_m = detail::parse_num(v, ln, k);
      if (cfg.mc_truncation_radius_m < 0.0)
        detail::config_fail(ln, "mc.truncation_radius_m: must be >= 0");
    } else if (k == "mc.tail_fraction") {
      cfg.mc_tail_fraction = detail::parse_num(v, ln, k);
      if (!(cfg.mc_tail_fraction > 0.0 && cfg.mc_tail_fraction < 1.0))
        detail::config_fail(ln, "mc.tail_fraction: must be in (0,1)");
    } else if (k == "analytic.x_max_m") {
      cfg.analytic_x_max_m = detail::parse_num(v, ln, k);
      if (cfg.analytic_x_max_m < 0.0)
        detail::config_fail(ln, "analytic.x_max_m: must be >= 0");
    } else if (k == "pv.epsilon") {
      cfg.pv.epsilon = detail::parse_num(v, ln, k);
    } else if (k == "pv.w_max") {
      cfg.pv.w_max = detail::parse_num(v, ln, k);
    } else if (k == "pv.rel_tol") {
      cfg.pv.rel_tol = detail::parse_num(v, ln, k);
    } else if (k == "pv.max_rounds") {
      cfg.pv.max_rounds = detail::parse_int(v, ln, k);
    } else if (k == "sweep.thresholds_db") {
      cfg.thresholds_db = detail::parse_num_list(v, ln, k);
    } else if (k == "sweep.elements") {
      cfg.elements_sweep = detail::parse_int_list(v, ln, k);
      for (int m : cfg.elements_sweep)
        if (m < 0) detail::config_fail(ln, "sweep.elements: must be >= 0");
    } else if (k == "sweep.center_x_m") {
      cfg.center_x_sweep = detail::parse_num_list(v, ln, k);
    } else if (k == "sweep.center_y_m") {
      cfg.center_y_sweep = detail::parse_num_list(v, ln, k);
    } else if (k == "timing.reps") {
      cfg.timing_reps = detail::parse_int(v, ln, k);
      if (cfg.timing_reps < 1) detail::config_fail(ln, "timing.reps: must be >= 1");
    } else {
      detail::config_fail(ln, "unknown key '" + k + "'");
    }
  }

  if (cfg.preset == Preset::kTimingBenchmark && method_set &&
      cfg.method != Method::kBoth)
    throw DomainError("timing_benchmark requires method = both");
  if (cfg.preset == Preset::kTimingBenchmark) cfg.method = Method::kBoth;
  if (cfg.preset == Preset::kProximitySweep &&
      (cfg.center_x_sweep.empty() || cfg.center_y_sweep.empty()))
    throw DomainError("proximity_sweep: sweep.center_x_m and sweep.center_y_m "
                      "must be nonempty");
  if ((cfg.preset == Preset::kInterferenceStudy ||
       cfg.preset == Preset::kFadingSensitivity ||
       cfg.preset == Preset::kPlacementComparison ||
       cfg.preset == Preset::kTimingBenchmark) &&
      cfg.elements_sweep.empty())
    throw DomainError("sweep.elements must be nonempty for this preset");
  if (cfg.preset == Preset::kCustom && cfg.thresholds_db.empty())
    throw DomainError("custom preset: sweep.thresholds_db must be nonempty");
  return cfg;
}

// RFC-4180 flavored output. All emitted fields are comma- and quote-free by
// construction, so no quoting pass is needed; numbers use %.17g (lossless
// double round-trip).
inline std::string to_csv(const std::vector<ResultRow>& rows) {
  std::string out = "# schema=1\n";
  out += "curve,method,x_label,x_value,metric,value,std_error,wall_time_s\r\n";
  for (const auto& r : rows) {
    out += r.curve + ',' + r.method + ',' + r.x_label + ',' +
           detail::fmt_g17(r.x) + ',' + r.metric + ',' +
           detail::fmt_g17(r.value) + ',';
    if (r.std_error) out += detail::fmt_g17(*r.std_error);
    out += ',';
    if (r.wall_time_s) out += detail::fmt_g17(*r.wall_time_s);
    out += "\r\n";
  }
  return out;
}

inline std::vector<ResultRow> parse_result_csv(const std::string& csv) {
  std::vector<ResultRow> rows;
  std::stringstream ss(csv);
  std::string line;
  bool header_seen = false;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "curve,method,x_label,x_value,metric,value,std_error,wall_time_s")
        throw DomainError("parse_result_csv: unexpected header: " + line);
      header_seen = true;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    while (f.size() < 8) f.push_back("");
    if (f.size() != 8)
      throw DomainError("parse_result_csv: wrong field count: " + line);
    ResultRow r;
    r.curve = f[0];
    r.method = f[1];
    r.x_label = f[2];
    r.x = std::stod(f[3]);
    r.metric = f[4];
    r.value = std::stod(f[5]);
    if (!f[6].empty()) r.std_error = std::stod(f[6]);
    if (!f[7].empty()) r.wall_time_s = std::stod(f[7]);
    rows.push_back(std::move(r));
  }
  return rows;
}

namespace detail {

struct SweepPoint {
  std::string curve;
  std::string x_label;
  double x;
  Scene scene;
  bool analytic_capable = true;
};

inline std::vector<SweepPoint> build_points(const ExperimentConfig& cfg) {
  std::vector<SweepPoint> pts;
  const Scene base = cfg.base_scene();
  switch (cfg.preset) {
    case Preset::kProximitySweep: {
      for (double y : cfg.center_y_sweep)
        for (double x : cfg.center_x_sweep) {
          Scene sc = base;
          if (!sc.ris) throw DomainError("proximity_sweep: ris.enabled=false");
          sc.ris->region = Region::square({x, y}, cfg.ris_width_m);
          pts.push_back({"y=" + fmt_g17(y), "square_center_x_m", x, sc, true});
        }
      break;
    }
    case Preset::kInterferenceStudy: {
      for (int m : cfg.elements_sweep) {
        Scene sc = base;
        if (!sc.ris || !sc.interferer_ris)
          throw DomainError("interference_study: needs ris and interferer_ris");
        sc.ris->elements = m;
        sc.interferer_ris->elements = m;
        pts.push_back({"with_reflected_interference", "m_elements",
                       static_cast<double>(m), sc, true});
      }
      for (int m : cfg.elements_sweep) {
        Scene sc = base;
        sc.interferer_ris.reset();
        sc.ris->elements = m;
        pts.push_back({"no_reflected_interference", "m_elements",
                       static_cast<double>(m), sc, true});
      }
      for (int m : cfg.elements_sweep) {
        Scene sc = base;
        sc.interferer_ris.reset();
        sc.ris.reset();
        pts.push_back({"no_ris", "m_elements", static_cast<double>(m), sc,
                       true});
      }
      break;
    }
    case Preset::kFadingSensitivity: {
      const std::vector<std::pair<std::string, FadingModel>> models = {
          {"rayleigh", FadingModel::rayleigh()},
          {"nakagami2", FadingModel::nakagami(2)},
          {"nakagami3", FadingModel::nakagami(3)},
          {"constant_power", FadingModel::constant_power()},
      };
      for (const auto& [name, fading] : models)
        for (int m : cfg.elements_sweep) {
          Scene sc = base;
          if (!sc.ris) throw DomainError("fading_sensitivity: ris.enabled=false");
          sc.ris->elements = m;
          sc.ris->fading = fading;
          pts.push_back({name, "m_elements", static_cast<double>(m), sc, true});
        }
      break;
    }
    case Preset::kPlacementComparison:
    case Preset::kTimingBenchmark: {
      std::vector<std::pair<std::string, PointProcess>> laws = {
          {"ppp", PointProcess::ppp(cfg.ris_mean_count /
                                    (2.0 * kPi * cfg.ris_radius_m))},
          {"bpp", PointProcess::bpp(cfg.ris_count)},
      };
      if (cfg.preset == Preset::kPlacementComparison) {
        laws.emplace_back("equidistant",
                          PointProcess::equidistant(cfg.ris_count));
        laws.emplace_back("best_selection",
                          PointProcess::best_selection(cfg.ris_count));
      }
      for (const auto& [name, law] : laws)
        for (int m : cfg.elements_sweep) {
          Scene sc = base;
          if (!sc.ris) throw DomainError("placement preset: ris.enabled=false");
          sc.ris->process = law;
          sc.ris->elements = m;
          const bool capable = law.kind == PointProcess::Kind::kPpp ||
                               law.kind == PointProcess::Kind::kBpp;
          pts.push_back({name, "m_elements", static_cast<double>(m), sc,
                         capable});
        }
      break;
    }
    case Preset::kCustom: {
      pts.push_back({"baseline", "serving_distance_m", base.serving_r, base,
                     !base.ris ||
                         (base.ris->process.kind != PointProcess::Kind::kEquidistant &&
                          base.ris->process.kind != PointProcess::Kind::kBestSelection)});
      break;
    }
  }
  return pts;
}

}  // namespace detail

// Runs the configured sweep. Analytic rows carry no std_error; Monte Carlo
// rows carry the estimator's standard error. Wall times are reported only
// by the timing preset so that re-runs of the other presets are
// byte-identical for a fixed seed.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  using Clock = std::chrono::steady_clock;
  const double unit = cfg.rate_in_bits ? 1.0 / std::log(2.0) : 1.0;
  const std::string rate_metric = cfg.rate_in_bits ? "rate_bits" : "rate_nats";
  const bool timing = cfg.preset == Preset::kTimingBenchmark;
  const bool want_analytic =
      cfg.method == Method::kAnalytic || cfg.method == Method::kBoth;
  const bool want_mc =
      cfg.method == Method::kMonteCarlo || cfg.method == Method::kBoth;

  ExperimentResult out;
  auto points = detail::build_points(cfg);
  for (const auto& pt : points) {
    const std::string where =
        "curve " + pt.curve + " at " + pt.x_label + "=" + detail::fmt_g17(pt.x);
    try {
      double analytic_rate = 0.0;
      bool have_analytic = false;
      if (want_analytic && pt.analytic_capable) {
        std::vector<double> times;
        double rate = 0.0;
        std::vector<std::pair<double, double>> coverage_rows;
        const int reps = timing ? std::max(3, cfg.timing_reps) : 1;
        for (int rep = 0; rep < reps; ++rep) {
          const auto tic = Clock::now();
          CoverageEngine engine(pt.scene, cfg.pv);
          if (cfg.preset == Preset::kCustom) {
            coverage_rows.clear();
            for (double db : cfg.thresholds_db)
              coverage_rows.emplace_back(
                  db, engine.coverage(std::pow(10.0, db / 10.0)));
          }
          rate = engine.ergodic_rate(cfg.rate_policy);
          times.push_back(std::chrono::duration<double>(Clock::now() - tic).count());
        }
        analytic_rate = rate;
        have_analytic = true;
        const auto wall = timing ? std::optional<double>(detail::median_of(times))
                                 : std::nullopt;
        for (const auto& [db, pc] : coverage_rows)
          out.rows.push_back({pt.curve, "analytic", "threshold_db", db,
                              "coverage", pc, std::nullopt, std::nullopt});
        out.rows.push_back({pt.curve, "analytic", pt.x_label, pt.x,
                            rate_metric, rate * unit, std::nullopt, wall});
      }
      if (want_mc) {
        Scenario scenario{pt.scene, cfg.mc_trials, cfg.seed};
        if (timing && have_analytic) {
          // Matched accuracy: size the run so the rate standard error is
          // about 1e-3 relative to the analytic value, from a pilot batch.
          Scenario pilot = scenario;
          pilot.trials = 4096;
          const auto probe = estimate_batch(pilot, {});
          const double sd =
              probe.rate.std_err * std::sqrt(static_cast<double>(pilot.trials));
          const double target = std::max(1e-3 * std::abs(analytic_rate), 1e-6);
          const double n = (sd / target) * (sd / target);
          scenario.trials = static_cast<std::uint64_t>(
              std::clamp(n, 1e4, 2e6));
        }
        std::vector<double> times;
        BatchEstimate est;
        const int reps = timing ? std::max(3, cfg.timing_reps) : 1;
        std::vector<double> t_lin;
        if (cfg.preset == Preset::kCustom)
          for (double db : cfg.thresholds_db)
            t_lin.push_back(std::pow(10.0, db / 10.0));
        for (int rep = 0; rep < reps; ++rep) {
          const auto tic = Clock::now();
          est = estimate_batch(scenario, t_lin);
          times.push_back(std::chrono::duration<double>(Clock::now() - tic).count());
        }
        const auto wall = timing ? std::optional<double>(detail::median_of(times))
                                 : std::nullopt;
        for (std::size_t i = 0; i < t_lin.size(); ++i)
          out.rows.push_back({pt.curve, "monte_carlo", "threshold_db",
                              cfg.thresholds_db[i], "coverage",
                              est.coverage.p[i], est.coverage.std_err[i],
                              std::nullopt});
        out.rows.push_back({pt.curve, "monte_carlo", pt.x_label, pt.x,
                            rate_metric, est.rate.mean_nats * unit,
                            est.rate.std_err * unit, wall});
      }
    } catch (const DomainError& e) {
      throw DomainError(where + ": " + e.what());
    } catch (const DivergenceError& e) {
      throw DivergenceError(where + ": " + e.what(), e.boundary());
    } catch (const ConvergenceError& e) {
      throw ConvergenceError(where + ": " + e.what(), e.achieved(),
                             e.requested());
    }
  }

  for (const auto& r : out.rows) {
    if (!std::isfinite(r.value))
      throw SanityError("run_experiment: non-finite value in curve " + r.curve);
    if (r.wall_time_s && !(*r.wall_time_s > 0.0))
      throw SanityError("run_experiment: nonpositive wall time in curve " +
                        r.curve);
  }

  out.csv = to_csv(out.rows);

  // Per-curve min/max/argmax over the primary metric.
  std::ostringstream sum;
  std::vector<std::string> seen;
  for (const auto& r : out.rows) {
    if (r.metric == "coverage") continue;
    const std::string tag = r.curve + " [" + r.method + "]";
    if (std::find(seen.begin(), seen.end(), tag) != seen.end()) continue;
    seen.push_back(tag);
    double lo = std::numeric_limits<double>::infinity(), lo_x = 0.0;
    double hi = -std::numeric_limits<double>::infinity(), hi_x = 0.0;
    for (const auto& q : out.rows) {
      if (q.metric == "coverage" || q.curve != r.curve || q.method != r.method)
        continue;
      if (q.value < lo) { lo = q.value; lo_x = q.x; }
      if (q.value > hi) { hi = q.value; hi_x = q.x; }
    }
    sum << tag << ": min " << detail::fmt_g17(lo) << " at " << r.x_label << "="
        << detail::fmt_g17(lo_x) << ", max " << detail::fmt_g17(hi) << " at "
        << r.x_label << "=" << detail::fmt_g17(hi_x) << "\n";
  }
  if (timing) {
    for (const auto& r : out.rows) {
      if (r.method != "analytic" || !r.wall_time_s) continue;
      for (const auto& q : out.rows) {
        if (q.method != "monte_carlo" || q.curve != r.curve || q.x != r.x ||
            !q.wall_time_s)
          continue;
        sum << "timing " << r.curve << " " << r.x_label << "="
            << detail::fmt_g17(r.x) << ": analytic "
            << detail::fmt_g17(*r.wall_time_s) << " s, monte_carlo "
            << detail::fmt_g17(*q.wall_time_s) << " s, ratio "
            << detail::fmt_g17(*q.wall_time_s / *r.wall_time_s) << "\n";
      }
    }
  }
  out.summary = sum.str();
  return out;
}

}  // namespace riscov
