#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <gisec/detection.hpp>
#include <gisec/ghostsim.hpp>
#include <gisec/io.hpp>
#include <gisec/polarization.hpp>
#include <gisec/rng.hpp>
#include <gisec/worstcase.hpp>

#ifdef GISEC_HAVE_PNG
#include <png.h>
#endif

using nlohmann::json;

namespace {

constexpr const char *kVersion = "0.1.0";
constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// Configuration

json default_config() {
  json levels = json::array();
  for (int i = 1; i <= 20; ++i)
    levels.push_back(double(i) / 20.0);
  json curve_pairs = json::array(); // explicit: brace-init would make an object
  curve_pairs.push_back(json::array({"psi1", "psi2"}));
  curve_pairs.push_back(json::array({"psi1", "omega1"}));
  curve_pairs.push_back(json::array({"omega1", "omega2"}));
  return json{
      {"pair", {{"first", "psi1"}, {"second", "psi2"}}},
      {"intruder", "omega1"},
      {"r", 0.5},
      {"angles", {kPi / 4.0, kPi / 4.0}},
      {"noise", {{"sigma", 0.1}, {"trials", 1}}},
      {"lambda", 1.0},
      {"prior", 0.5},
      {"seed", 1},
      {"threads", 0},
      {"png", false},
      {"scene",
       {{"width", 34},
        {"height", 34},
        {"photons_per_image", 1e5},
        {"dark_total", 1e4},
        {"mask_true", ""},
        {"mask_false", ""}}},
      {"levels", levels},
      {"curve_pairs", curve_pairs},
      {"search",
       {{"mu_points", 17},
        {"r_points", 33},
        {"theta_points", 33},
        {"level_band", 0.01},
        {"refine_tol", 1e-6},
        {"max_refine_iter", 200}}},
      {"target_level", nullptr},
      {"single_photon", false},
      {"analyze",
       {{"expected_visibility", 1.0},
        {"roi", "overlap"},
        {"dark_correction", true},
        {"estimate_weight", false}}},
  };
}

// Key names must exist in the default schema; value types are checked where
// the values are consumed (state specs are polymorphic: name or parameters).
void check_known_keys(const json &user, const json &schema, const std::string &prefix) {
  if (!user.is_object() || !schema.is_object())
    return;
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = prefix.empty() ? it.key() : prefix + "." + it.key();
    if (!schema.contains(it.key()))
      throw std::invalid_argument("unknown config key: " + path);
    check_known_keys(it.value(), schema[it.key()], path);
  }
}

json load_config(const std::string &explicit_path) {
  std::string path = explicit_path;
  if (path.empty()) {
    if (const char *env = std::getenv("GISEC_CONFIG"))
      path = env;
  }
  json merged = default_config();
  if (!path.empty()) {
    json user;
    try {
      user = json::parse(gisec::read_file(path));
    } catch (const json::parse_error &e) {
      throw std::invalid_argument("config " + path + ": " + e.what());
    }
    check_known_keys(user, merged, "");
    merged.merge_patch(user);
  }
  return merged;
}

/// Canonical name or explicit correlation parameters.
struct StateSpec {
  std::string name;
  gisec::TwoPhotonState state;
};

StateSpec parse_state(const json &spec, const std::string &what) {
  const gisec::CanonicalStates st = gisec::canonical_states();
  if (spec.is_string()) {
    const std::string name = spec.get<std::string>();
    if (name == "psi1")
      return {name, st.psi1};
    if (name == "psi2")
      return {name, st.psi2};
    if (name == "omega1")
      return {name, st.omega1};
    if (name == "omega2")
      return {name, st.omega2};
    throw std::invalid_argument(what + ": unknown state name '" + name + "'");
  }
  if (spec.is_object()) {
    gisec::BellDiagonalParams mu;
    mu.mu_x = spec.at("mu_x").get<double>();
    mu.mu_y = spec.at("mu_y").get<double>();
    mu.mu_z = spec.at("mu_z").get<double>();
    return {"custom", gisec::bell_diagonal_state(mu)};
  }
  throw std::invalid_argument(what + ": state must be a name or {mu_x, mu_y, mu_z}");
}

gisec::NoiseModel parse_noise(const json &cfg) {
  gisec::NoiseModel noise;
  noise.sigma = cfg.at("noise").at("sigma").get<double>();
  noise.trials = cfg.at("noise").at("trials").get<int>();
  noise.validate();
  return noise;
}

gisec::TestParams parse_test(const json &cfg) {
  gisec::TestParams params;
  params.lambda = cfg.at("lambda").get<double>();
  params.prior = cfg.at("prior").get<double>();
  params.validate();
  return params;
}

gisec::AnalyzerConfig parse_angles(const json &cfg) {
  const json &a = cfg.at("angles");
  if (!a.is_array() || a.size() != 2)
    throw std::invalid_argument("angles must be an array of two numbers");
  return gisec::AnalyzerConfig(a[0].get<double>(), a[1].get<double>());
}

gisec::SearchSettings parse_search(const json &cfg) {
  const json &s = cfg.at("search");
  gisec::SearchSettings settings;
  settings.mu_points = s.at("mu_points").get<int>();
  settings.r_points = s.at("r_points").get<int>();
  settings.theta_points = s.at("theta_points").get<int>();
  settings.level_band = s.at("level_band").get<double>();
  settings.refine_tol = s.at("refine_tol").get<double>();
  settings.max_refine_iter = s.at("max_refine_iter").get<int>();
  settings.threads = cfg.at("threads").get<int>();
  settings.validate();
  return settings;
}

gisec::Scene parse_scene(const json &cfg) {
  const json &s = cfg.at("scene");
  const int width = s.at("width").get<int>();
  const int height = s.at("height").get<int>();
  gisec::Scene scene = gisec::make_default_scene(s.at("photons_per_image").get<double>(),
                                                 s.at("dark_total").get<double>(),
                                                 width, height);
  const std::string true_path = s.at("mask_true").get<std::string>();
  const std::string false_path = s.at("mask_false").get<std::string>();
  auto load_mask = [&](const std::string &path, std::vector<std::uint8_t> &dst) {
    if (path.empty())
      return;
    gisec::MaskFile file = gisec::read_pbm(path);
    if (file.width != width || file.height != height)
      throw std::invalid_argument("mask " + path + " does not match the scene size");
    dst = file.mask;
  };
  load_mask(true_path, scene.mask_true);
  load_mask(false_path, scene.mask_false);
  scene.validate();
  return scene;
}

gisec::Region parse_region(const std::string &name) {
  if (name == "lambda_only")
    return gisec::Region::lambda_only;
  if (name == "t_only")
    return gisec::Region::t_only;
  if (name == "overlap")
    return gisec::Region::overlap;
  if (name == "background")
    return gisec::Region::background;
  if (name == "non_lambda")
    return gisec::Region::non_lambda;
  throw std::invalid_argument("unknown region of interest '" + name + "'");
}

// ---------------------------------------------------------------------------
// Output plumbing

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  char buf[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  return buf;
}

/// Collects written files and their digests for the run manifest.
struct OutputSink {
  std::filesystem::path dir;
  std::map<std::string, std::string> checksums;

  explicit OutputSink(const std::string &out_dir) : dir(out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
      throw gisec::io_error("cannot create output directory " + out_dir);
  }

  std::string path(const std::string &name) const { return (dir / name).string(); }

  void write(const std::string &name, const std::string &content) {
    gisec::atomic_write(path(name), content);
    checksums[name] = gisec::digest_hex(gisec::fnv1a64(content));
  }
};

void write_manifest(OutputSink &sink, const std::string &command, std::uint64_t seed,
                    const std::string &config_text) {
  json manifest{
      {"version", kVersion},
      {"command", command},
      {"seed", seed},
      {"config_digest", gisec::digest_hex(gisec::fnv1a64(config_text))},
      {"created", timestamp_utc()},
      {"outputs", sink.checksums},
  };
  // The manifest itself is excluded from its own checksum list.
  gisec::atomic_write(sink.path("manifest.json"), manifest.dump(2) + "\n");
}

/// Writes the resolved configuration and returns its exact serialized text,
/// which is the input of the manifest's config digest.
std::string write_effective_config(OutputSink &sink, const json &cfg) {
  const std::string text = cfg.dump(2) + "\n";
  sink.write("effective_config.json", text);
  return text;
}

#ifdef GISEC_HAVE_PNG
// Derived convenience output: 16-bit grayscale, deliberately excluded from
// the manifest checksums (PGM is the archival format).
void write_png(const std::string &path, const gisec::CountImage &img) {
  const std::string tmp = path + ".tmp";
  FILE *fp = std::fopen(tmp.c_str(), "wb");
  if (!fp)
    throw gisec::io_error("cannot open " + tmp + " for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    if (png)
      png_destroy_write_struct(&png, info ? &info : nullptr);
    std::fclose(fp);
    std::remove(tmp.c_str());
    throw gisec::io_error("PNG encoding failed for " + path);
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, png_uint_32(img.width), png_uint_32(img.height), 16,
               PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  std::vector<png_byte> row(std::size_t(img.width) * 2);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const long long v = std::min<long long>(img.counts[std::size_t(y) * img.width + x], 65535);
      row[std::size_t(x) * 2] = png_byte(v >> 8);
      row[std::size_t(x) * 2 + 1] = png_byte(v & 0xFF);
    }
    png_write_row(png, row.data());
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw gisec::io_error("cannot rename " + tmp + " to " + path);
  }
}

gisec::CountImage rounded_counts(const gisec::RealImage &img) {
  gisec::CountImage out;
  out.width = img.width;
  out.height = img.height;
  out.counts.resize(img.pixel_count());
  for (std::size_t p = 0; p < img.pixel_count(); ++p)
    out.counts[p] = std::llround(std::max(0.0, img.values[p]));
  return out;
}
#endif

void maybe_write_png(const json &cfg, OutputSink &sink, const std::string &stem,
                     const gisec::CountImage &img) {
#ifdef GISEC_HAVE_PNG
  if (cfg.at("png").get<bool>())
    write_png(sink.path(stem + ".png"), img);
#else
  (void)cfg;
  (void)sink;
  (void)stem;
  (void)img;
#endif
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_detect_curve(const json &cfg, const std::string &out_dir) {
  const gisec::NoiseModel noise = parse_noise(cfg);
  const gisec::SearchSettings search = parse_search(cfg);
  std::vector<double> levels = cfg.at("levels").get<std::vector<double>>();

  OutputSink sink(out_dir);
  std::vector<std::vector<gisec::CsvCell>> rows;
  for (const json &pair : cfg.at("curve_pairs")) {
    if (!pair.is_array() || pair.size() != 2)
      throw std::invalid_argument("curve_pairs entries must be [first, second]");
    const StateSpec first = parse_state(pair[0], "curve pair");
    const StateSpec second = parse_state(pair[1], "curve pair");
    const std::string name = first.name + "-" + second.name;
    const auto curve = gisec::detection_curve(first.state, second.state, levels, noise, search);
    for (const gisec::CurvePoint &pt : curve) {
      if (pt.feasible)
        rows.push_back({name, pt.level, pt.d, pt.p_detect, pt.p_false_alarm, ""});
      else
        rows.push_back({name, pt.level, "", "", "", "infeasible"});
    }
  }
  sink.write("detect_curve.csv",
             gisec::format_csv({"pair_name", "level", "d", "p_detect", "p_false_alarm", "note"},
                               rows));

  const std::string config_text = write_effective_config(sink, cfg);
  write_manifest(sink, "detect-curve", cfg.at("seed").get<std::uint64_t>(), config_text);
  std::cout << "detect-curve: " << rows.size() << " rows -> " << sink.path("detect_curve.csv")
            << "\n";
  return 0;
}

int cmd_simulate(const json &cfg, const std::string &out_dir) {
  const gisec::Scene scene = parse_scene(cfg);
  const StateSpec first = parse_state(cfg.at("pair").at("first"), "pair.first");
  const StateSpec second = parse_state(cfg.at("pair").at("second"), "pair.second");
  const StateSpec intruder = parse_state(cfg.at("intruder"), "intruder");
  const gisec::AnalyzerConfig angles = parse_angles(cfg);
  const double r = cfg.at("r").get<double>();
  const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();

  auto [jam1, jam2] =
      gisec::simulate_pair(scene, first.state, second.state, intruder.state, r, angles, seed);
  // Clean reference: the same apparatus with no interception, on its own stream.
  const gisec::RealImage clean_expected =
      gisec::expected_counts(scene, first.state, intruder.state, 0.0, angles);
  const gisec::CountImage clean =
      gisec::sample_counts(clean_expected, gisec::mix64(seed ^ gisec::mix64(3)));

  double weight = 1.0;
  if (cfg.at("analyze").at("estimate_weight").get<bool>())
    weight = gisec::estimate_weight(jam1, jam2,
                                    gisec::region_pixels(scene, gisec::Region::t_only));
  const gisec::RecoveryResult recovered = gisec::recover(jam1, jam2, weight);
  const gisec::ImageMetrics metrics =
      gisec::compute_metrics(jam1, jam2, recovered.image, clean, scene);

  const auto overlap = gisec::region_pixels(scene, gisec::Region::overlap);
  const double dark_px = scene.dark_total / double(scene.pixel_count());
  json metrics_json{
      {"mean_dark_per_pixel", metrics.mean_dark_per_pixel},
      {"noise_level", metrics.noise_level},
      {"signal_mean", metrics.signal_mean},
      {"snr", metrics.snr},
      {"residual_false_mean", metrics.residual_false_mean},
      {"visibility_overlap_raw", gisec::measure_region_visibility(jam1, jam2, overlap)},
      {"visibility_overlap", gisec::measure_region_visibility(jam1, jam2, overlap, dark_px)},
      {"weight_used", recovered.weight_used},
  };

  OutputSink sink(out_dir);
  sink.write("jammed_j1.pgm", gisec::format_pgm(jam1));
  sink.write("jammed_j2.pgm", gisec::format_pgm(jam2));
  sink.write("recovered.pgm", gisec::format_pgm(recovered.image));
  sink.write("clean.pgm", gisec::format_pgm(clean));
  sink.write("metrics.json", metrics_json.dump(2) + "\n");
  maybe_write_png(cfg, sink, "jammed_j1", jam1);
  maybe_write_png(cfg, sink, "jammed_j2", jam2);
  maybe_write_png(cfg, sink, "clean", clean);
#ifdef GISEC_HAVE_PNG
  if (cfg.at("png").get<bool>())
    write_png(sink.path("recovered.png"), rounded_counts(recovered.image));
#endif

  const std::string config_text = write_effective_config(sink, cfg);
  write_manifest(sink, "simulate", seed, config_text);
  std::cout << "simulate: snr " << metrics.snr << ", overlap visibility "
            << metrics_json["visibility_overlap"].get<double>() << " -> " << out_dir << "\n";
  return 0;
}

int cmd_analyze(const json &cfg, const std::string &out_dir, const std::string &img1_path,
                const std::string &img2_path) {
  const gisec::Scene scene = parse_scene(cfg);
  const StateSpec first = parse_state(cfg.at("pair").at("first"), "pair.first");
  const StateSpec second = parse_state(cfg.at("pair").at("second"), "pair.second");
  const StateSpec intruder = parse_state(cfg.at("intruder"), "intruder");
  const gisec::AnalyzerConfig angles = parse_angles(cfg);
  const double r = cfg.at("r").get<double>();
  const gisec::NoiseModel noise = parse_noise(cfg);
  const gisec::TestParams params = parse_test(cfg);
  const json &an = cfg.at("analyze");

  auto load_counts = [&](const std::string &path) {
    const gisec::GrayFile file = gisec::read_pgm(path);
    gisec::CountImage img;
    img.width = file.width;
    img.height = file.height;
    img.counts = file.values;
    img.digest = gisec::digest_hex(gisec::fnv1a64(gisec::read_file(path)));
    return img;
  };
  const gisec::CountImage img1 = load_counts(img1_path);
  const gisec::CountImage img2 = load_counts(img2_path);
  if (img1.width != scene.width || img1.height != scene.height)
    throw gisec::io_error(img1_path + " does not match the configured scene size");

  const gisec::Region roi = parse_region(an.at("roi").get<std::string>());
  const auto roi_pixels = gisec::region_pixels(scene, roi);
  const double dark_px = an.at("dark_correction").get<bool>()
                             ? scene.dark_total / double(scene.pixel_count())
                             : 0.0;
  const double v_observed =
      gisec::measure_region_visibility(img1, img2, roi_pixels, dark_px);
  const double v_expected = an.at("expected_visibility").get<double>();

  // Expected visibility under the configured attack: on a region where both
  // objects transmit, the dark-corrected count ratio reduces to the jammed
  // coincidence probabilities.
  const double p1 = gisec::detection_probability(first.state, angles);
  const double p2 = gisec::detection_probability(second.state, angles);
  const double pe = gisec::detection_probability(intruder.state, angles);
  const double v_attack =
      gisec::visibility((1.0 - r) * p1 + r * pe, (1.0 - r) * p2 + r * pe);
  const double d_test = gisec::d_statistic(v_expected, v_attack, noise);

  const gisec::Verdict verdict =
      gisec::decide({v_observed - v_expected}, noise, params, d_test);

  gisec::DetectionReport report;
  report.v_expected = v_expected;
  report.v_observed = v_observed;
  report.d = gisec::d_statistic(v_observed, v_expected, noise); // observed drop
  report.verdict = verdict;
  report.p_detect = gisec::detection_probability(std::abs(d_test), params);
  report.p_false_alarm = gisec::false_alarm_probability(std::abs(d_test), params);

  double weight = 1.0;
  if (an.at("estimate_weight").get<bool>())
    weight = gisec::estimate_weight(img1, img2,
                                    gisec::region_pixels(scene, gisec::Region::t_only));
  const gisec::RecoveryResult recovered = gisec::recover(img1, img2, weight);

  json report_json{
      {"v_expected", report.v_expected},
      {"v_observed", report.v_observed},
      {"d", report.d},
      {"verdict", verdict == gisec::Verdict::intrusion ? "intrusion" : "no_intrusion"},
      {"p_detect", report.p_detect},
      {"p_false_alarm", report.p_false_alarm},
      {"roi", an.at("roi").get<std::string>()},
      {"dark_per_pixel", dark_px},
      {"weight_used", recovered.weight_used},
      {"inputs", {{"img1", img1.digest}, {"img2", img2.digest}}},
  };

  OutputSink sink(out_dir);
  sink.write("report.json", report_json.dump(2) + "\n");
  sink.write("recovered.pgm", gisec::format_pgm(recovered.image));

  const std::string config_text = write_effective_config(sink, cfg);
  write_manifest(sink, "analyze", cfg.at("seed").get<std::uint64_t>(), config_text);
  std::cout << "analyze: " << report_json["verdict"].get<std::string>() << " (observed "
            << report.v_observed << ", expected " << report.v_expected << ", d " << report.d
            << ")\n";
  return 0;
}

int cmd_worst_case(const json &cfg, const std::string &out_dir) {
  const gisec::NoiseModel noise = parse_noise(cfg);
  const gisec::TestParams params = parse_test(cfg);
  OutputSink sink(out_dir);
  json result;

  if (cfg.at("single_photon").get<bool>()) {
    // Orthogonal single-photon pair: the intruder can null the visibility
    // change entirely, so the guaranteed separation is zero.
    const gisec::AnalyzerConfig angles = parse_angles(cfg);
    const double r = cfg.at("r").get<double>();
    const double v_clean = cfg.at("analyze").at("expected_visibility").get<double>();
    const gisec::SinglePhotonNullResult null =
        gisec::single_photon_inner_min(angles.thetas[0], r, v_clean);
    const double d = std::sqrt(double(noise.trials)) * null.difference / noise.sigma;
    result = json{
        {"mode", "single_photon"},
        {"d", d},
        {"theta", angles.thetas[0]},
        {"r", r},
        {"intruder_alpha", null.intruder.alpha},
        {"intruder_beta", null.intruder.beta},
        {"overlap", null.overlap},
    };
  } else {
    const gisec::SearchSettings search = parse_search(cfg);
    const StateSpec first = parse_state(cfg.at("pair").at("first"), "pair.first");
    const StateSpec second = parse_state(cfg.at("pair").at("second"), "pair.second");
    std::optional<double> target;
    if (!cfg.at("target_level").is_null())
      target = cfg.at("target_level").get<double>();
    const gisec::WorstCaseResult res =
        gisec::worst_case_d(first.state, second.state, target, noise, search);
    result = json{
        {"mode", "two_photon"},
        {"pair", first.name + "-" + second.name},
        {"d", res.d},
        {"theta1", res.theta1},
        {"theta2", res.theta2},
        {"intruder",
         {{"mu_x", res.intruder_mu.mu_x},
          {"mu_y", res.intruder_mu.mu_y},
          {"mu_z", res.intruder_mu.mu_z},
          {"r", res.intruder_r}}},
        {"achieved_level", res.achieved_level},
        {"target_level", cfg.at("target_level")},
        {"p_detect", gisec::detection_probability(res.d, params)},
        {"p_false_alarm", gisec::false_alarm_probability(res.d, params)},
        {"search", cfg.at("search")},
    };
  }

  sink.write("worst_case.json", result.dump(2) + "\n");
  const std::string config_text = write_effective_config(sink, cfg);
  write_manifest(sink, "worst-case", cfg.at("seed").get<std::uint64_t>(), config_text);
  std::cout << "worst-case: d = " << result["d"].get<double>() << " -> "
            << sink.path("worst_case.json") << "\n";
  return 0;
}

int run_command(const std::function<int()> &body) {
  try {
    return body();
  } catch (const gisec::infeasible_level_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const gisec::degenerate_region_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const gisec::degenerate_channel_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const gisec::undefined_threshold_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const gisec::corrupted_state_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const gisec::io_error &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Anti-jamming ghost imaging: simulation and analysis toolkit"};
  app.set_version_flag("--version", kVersion);

  std::string config_path;
  std::string out_dir = ".";
  std::int64_t seed_override = -1;
  int threads_override = -1;
  app.add_option("--config", config_path, "configuration file (JSON)");
  app.add_option("--seed", seed_override, "override the configured seed");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads_override, "worker threads (0 = hardware)");

  CLI::App *curve = app.add_subcommand("detect-curve",
                                       "worst-case detection probability vs jamming level");
  CLI::App *simulate = app.add_subcommand("simulate", "sample one jammed imaging round");
  CLI::App *analyze = app.add_subcommand("analyze", "hypothesis test on a measured image pair");
  CLI::App *worst = app.add_subcommand("worst-case", "min-max search for the guaranteed d");
  for (CLI::App *sub : {curve, simulate, analyze, worst})
    sub->fallthrough(); // accept the global flags after the subcommand as well
  std::string img1_path, img2_path;
  analyze->add_option("img1", img1_path, "first PGM image")->required();
  analyze->add_option("img2", img2_path, "second PGM image")->required();
  app.require_subcommand(1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 1;
  }

  return run_command([&]() -> int {
    json cfg = load_config(config_path);
    if (seed_override >= 0)
      cfg["seed"] = std::uint64_t(seed_override);
    if (threads_override >= 0)
      cfg["threads"] = threads_override;

    if (curve->parsed())
      return cmd_detect_curve(cfg, out_dir);
    if (simulate->parsed())
      return cmd_simulate(cfg, out_dir);
    if (analyze->parsed())
      return cmd_analyze(cfg, out_dir, img1_path, img2_path);
    return cmd_worst_case(cfg, out_dir);
  });
}
