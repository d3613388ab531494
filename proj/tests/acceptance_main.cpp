// Acceptance gate: one line per criterion, measured values inline.  Exits
// with the number of failed criteria so the test harness reports any red.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include <json.hpp>

#include <gisec/detection.hpp>
#include <gisec/ghostsim.hpp>
#include <gisec/io.hpp>
#include <gisec/polarization.hpp>
#include <gisec/rng.hpp>
#include <gisec/worstcase.hpp>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace gisec;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

double img_value(const CountImage &img, std::size_t p) { return double(img.counts[p]); }
double img_value(const RealImage &img, std::size_t p) { return img.values[p]; }

/// Mean of an image over a pixel region.
template <typename Image>
double region_mean(const Image &img, const std::vector<std::size_t> &pixels) {
  double sum = 0.0;
  for (std::size_t p : pixels)
    sum += img_value(img, p);
  return sum / double(pixels.size());
}

/// Random physical Bell-diagonal correlations: eigenvalue simplex via
/// normalized exponentials, mapped back to (mu_x, mu_y, mu_z).
BellDiagonalParams random_mu(SplitMix64 &rng) {
  double e[4];
  double total = 0.0;
  for (double &v : e) {
    v = -std::log(1.0 - rng.next_double());
    total += v;
  }
  for (double &v : e)
    v /= total;
  BellDiagonalParams mu;
  mu.mu_x = (e[0] - e[1] + e[2] - e[3]) / 4.0;
  mu.mu_y = (-e[0] + e[1] + e[2] - e[3]) / 4.0;
  mu.mu_z = (e[0] + e[1] - e[2] - e[3]) / 4.0;
  return mu;
}

struct Outcome {
  bool pass{false};
  std::string detail;
};

int failures = 0;

void run_criterion(int id, double runtime_bound_s, const std::function<Outcome()> &body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = body();
  } catch (const std::exception &e) {
    out = {false, std::string("unexpected exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (runtime_bound_s > 0.0 && secs > runtime_bound_s) {
    out.pass = false;
    out.detail += " [runtime " + fmt(secs, 3) + "s exceeds bound " + fmt(runtime_bound_s, 3) + "s]";
  }
  if (!out.pass)
    ++failures;
  std::printf("criterion %d: %s — %s (%.2fs)\n", id, out.pass ? "PASS" : "FAIL",
              out.detail.c_str(), secs);
  std::fflush(stdout);
}

// ---------------------------------------------------------------------------

Outcome criterion_1() {
  const CanonicalStates st = canonical_states();
  const AnalyzerConfig cfg(kPi / 4.0, kPi / 4.0);
  const double v_clean =
      visibility(detection_probability(st.psi1, cfg), detection_probability(st.psi2, cfg));
  const TwoPhotonState j1 = mix(st.psi1, st.omega1, 0.5);
  const TwoPhotonState j2 = mix(st.psi2, st.omega1, 0.5);
  const double v_jam =
      visibility(detection_probability(j1, cfg), detection_probability(j2, cfg));
  JammingScenario scenario{st.psi1, st.psi2, st.omega1, 0.5, cfg};
  const double d = evaluate_d_fixed(scenario, NoiseModel{0.1, 1});

  const double tol = 1e-12;
  const bool pass =
      std::abs(v_clean - 1.0) <= tol && std::abs(v_jam - 0.5) <= tol && std::abs(d - 5.0) <= tol;
  return {pass, "V_clean=" + fmt(v_clean, 15) + ", V_jammed=" + fmt(v_jam, 15) +
                    ", d=" + fmt(d, 15) + " (tol 1e-12)"};
}

Outcome criterion_2() {
  const TestParams params; // lambda = 1
  const double p0 = detection_probability(0.0, params);
  const double pd = detection_probability(5.0, params);
  const double pe = false_alarm_probability(5.0, params);
  const bool pass = p0 == 0.5 && pd >= 0.99 && pe <= 0.01;
  return {pass, "P_d(0)=" + fmt(p0, 15) + ", P_d(5)=" + fmt(pd, 8) + " (>=0.99), P_err(5)=" +
                    fmt(pe, 8) + " (<=0.01)"};
}

Outcome criterion_3() {
  // Closed form vs full density-matrix expectation on a 17^3 correlation grid
  // (physical points only) crossed with a 32^2 analyzer grid.
  const int n_mu = 17, n_th = 32;
  double max_dev = 0.0;
  long long points = 0;
  for (int i = 0; i < n_mu; ++i)
    for (int j = 0; j < n_mu; ++j)
      for (int k = 0; k < n_mu; ++k) {
        BellDiagonalParams mu{-0.25 + 0.5 * i / (n_mu - 1), -0.25 + 0.5 * j / (n_mu - 1),
                              -0.25 + 0.5 * k / (n_mu - 1)};
        if (!mu.positive())
          continue;
        ++points;
        const TwoPhotonState state = bell_diagonal_state(mu);
        for (int a = 0; a < n_th; ++a)
          for (int b = 0; b < n_th; ++b) {
            const double t1 = a * kPi / n_th, t2 = b * kPi / n_th;
            const double dev = std::abs(detection_probability(state, AnalyzerConfig(t1, t2)) -
                                        coincidence_probability_bd(mu, t1, t2));
            if (dev > max_dev)
              max_dev = dev;
          }
      }

  // mu_y perturbations that stay inside the physical class must change the
  // coincidence form by exactly zero, not approximately.
  double max_mu_y_shift = 0.0;
  long long perturbed = 0;
  for (int i = 0; i < n_mu; ++i)
    for (int j = 0; j < n_mu; ++j)
      for (int k = 0; k < n_mu; ++k) {
        BellDiagonalParams mu{-0.25 + 0.5 * i / (n_mu - 1), -0.25 + 0.5 * j / (n_mu - 1),
                              -0.25 + 0.5 * k / (n_mu - 1)};
        if (!mu.positive())
          continue;
        for (double delta : {0.015625, -0.015625}) {
          BellDiagonalParams shifted = mu;
          shifted.mu_y += delta;
          if (!shifted.positive())
            continue;
          ++perturbed;
          for (int a = 0; a < 8; ++a)
            for (int b = 0; b < 8; ++b) {
              const double t1 = a * kPi / 8, t2 = b * kPi / 8;
              const double shift = std::abs(coincidence_probability_bd(mu, t1, t2) -
                                            coincidence_probability_bd(shifted, t1, t2));
              if (shift > max_mu_y_shift)
                max_mu_y_shift = shift;
            }
        }
      }

  const bool pass = max_dev < 1e-12 && max_mu_y_shift == 0.0 && perturbed > 0;
  return {pass, "max |matrix - closed form| = " + fmt(max_dev, 3) + " over " +
                    std::to_string(points) + " states x 1024 angle pairs (<1e-12); mu_y shift = " +
                    fmt(max_mu_y_shift, 3) + " over " + std::to_string(perturbed) +
                    " in-class perturbations (exact 0)"};
}

Outcome criterion_4() {
  double worst = 0.0;
  for (int i = 0; i < 64; ++i)
    for (double r : {0.1, 0.5, 0.9}) {
      const double diff = single_photon_inner_min(i * kPi / 64, r, 1.0).difference;
      if (diff > worst)
        worst = diff;
    }
  return {worst < 1e-6,
          "max residual visibility difference = " + fmt(worst, 3) + " over 64 angles x 3 r (<1e-6)"};
}

struct Curves {
  std::vector<double> levels;
  std::vector<CurvePoint> ent, mixed, cls;
};

Curves compute_curves() {
  const CanonicalStates st = canonical_states();
  std::vector<double> levels;
  for (int i = 1; i <= 20; ++i)
    levels.push_back(double(i) / 20.0);
  const NoiseModel noise{0.1, 1};
  SearchSettings search; // defaults
  Curves c;
  c.levels = levels;
  c.ent = detection_curve(st.psi1, st.psi2, levels, noise, search);
  c.mixed = detection_curve(st.psi1, st.omega1, levels, noise, search);
  c.cls = detection_curve(st.omega1, st.omega2, levels, noise, search);
  return c;
}

Outcome criterion_5(const Curves &c) {
  std::string order_fail;
  double worst_gap = 0.0;
  bool all_feasible = true;
  for (std::size_t i = 0; i < c.levels.size(); ++i) {
    if (!c.ent[i].feasible || !c.mixed[i].feasible || !c.cls[i].feasible) {
      all_feasible = false;
      continue;
    }
    const double pe = c.ent[i].p_detect, pm = c.mixed[i].p_detect, pc = c.cls[i].p_detect;
    if ((pe < pm || pm < pc) && order_fail.empty())
      order_fail = "ordering violated at level " + fmt(c.levels[i], 3) + ": P_d(ent)=" +
                   fmt(pe) + ", P_d(mixed)=" + fmt(pm) + ", P_d(classical)=" + fmt(pc);
    if (c.levels[i] > 0.5) {
      worst_gap = std::max({worst_gap, std::abs(pe - pm), std::abs(pm - pc), std::abs(pe - pc)});
    }
  }
  const bool converge = worst_gap < 0.05;
  const bool pass = all_feasible && order_fail.empty() && converge;
  std::string detail = order_fail.empty() ? "ordering holds at all 20 levels" : order_fail;
  detail += "; max pairwise gap above level 0.5 = " + fmt(worst_gap, 3) + " (<0.05)";
  if (!all_feasible)
    detail += "; some levels infeasible";
  return {pass, detail};
}

Outcome criterion_6(const Curves &c) {
  std::size_t idx = 1; // level 0.10
  const double pd_ent = c.ent[idx].p_detect;
  const double pd_cls = c.cls[idx].p_detect;
  const bool pass = std::abs(pd_cls - 0.82) <= 0.05 && std::abs(pd_ent - 0.92) <= 0.05;
  std::string detail = "at level 0.1: P_d(classical)=" + fmt(pd_cls) +
                       " vs anchor 0.82+-0.05, P_d(entangled)=" + fmt(pd_ent) +
                       " vs anchor 0.92+-0.05";
  if (!pass)
    detail += "; measured under the documented constraint interpretation (worst admissible "
              "Bell-diagonal intruder within the level band, lambda=1), reported unadjusted";
  return {pass, detail};
}

Outcome criterion_7() {
  const CanonicalStates st = canonical_states();
  const AnalyzerConfig cfg(kPi / 4.0, kPi / 4.0);
  const Scene scene = make_default_scene(1e5, 1e4);
  const auto lambda_px = region_pixels(scene, Region::lambda_only);
  const auto t_px = region_pixels(scene, Region::t_only);
  const auto overlap_px = region_pixels(scene, Region::overlap);
  const auto non_lambda_px = region_pixels(scene, Region::non_lambda);
  const double dark_px = scene.dark_total / double(scene.pixel_count());

  const int n_seeds = 30;
  double sum_dark = 0.0, sum_noise_rec = 0.0, sum_noise_clean = 0.0;
  double sum_snr_rec = 0.0, sum_snr_clean = 0.0, sum_vis = 0.0;
  std::vector<double> t_delta; // attack-run minus object-free-run T-region mean
  for (int i = 0; i < n_seeds; ++i) {
    const std::uint64_t seed = 1000 + i;
    auto [j1, j2] = simulate_pair(scene, st.psi1, st.psi2, st.omega1, 0.5, cfg, seed);
    const RecoveryResult rec = recover(j1, j2);
    const CountImage clean =
        sample_counts(expected_counts(scene, st.psi1, st.omega1, 0.0, cfg), mix64(seed ^ mix64(3)));
    const ImageMetrics m = compute_metrics(j1, j2, rec.image, clean, scene);

    sum_dark += m.mean_dark_per_pixel;
    sum_noise_rec += m.noise_level;
    sum_snr_rec += m.snr;
    const double noise_clean = region_mean(clean, non_lambda_px);
    sum_noise_clean += noise_clean;
    sum_snr_clean += region_mean(clean, lambda_px) / noise_clean;
    sum_vis += measure_region_visibility(j1, j2, overlap_px, dark_px);

    auto [f1, f2] =
        simulate_pair(scene, st.psi1, st.psi2, st.omega1, 0.0, cfg, mix64(seed ^ mix64(99)));
    const RecoveryResult rec_free = recover(f1, f2);
    t_delta.push_back(region_mean(rec.image, t_px) - region_mean(rec_free.image, t_px));
  }

  const double mean_dark = sum_dark / n_seeds;
  double delta_mean = 0.0;
  for (double d : t_delta)
    delta_mean += d;
  delta_mean /= n_seeds;
  double delta_var = 0.0;
  for (double d : t_delta)
    delta_var += (d - delta_mean) * (d - delta_mean);
  const double delta_se = std::sqrt(delta_var / (n_seeds - 1) / n_seeds);
  const double noise_rec = sum_noise_rec / n_seeds, noise_clean = sum_noise_clean / n_seeds;
  const double snr_rec = sum_snr_rec / n_seeds, snr_clean = sum_snr_clean / n_seeds;
  const double vis = sum_vis / n_seeds;

  const bool a = mean_dark >= 8.2 && mean_dark <= 9.2;
  const bool b = std::abs(delta_mean) <= 3.0 * delta_se;
  const bool cc = noise_rec < noise_clean;
  const bool dd = snr_rec < snr_clean;
  const bool e = std::abs(vis - 0.5) <= 0.05;
  std::string detail =
      std::string("(a) ") + (a ? "PASS" : "FAIL") + " dark/px=" + fmt(mean_dark, 4) +
      " in [8.2,9.2]; (b) " + (b ? "PASS" : "FAIL") + " T-region excess=" + fmt(delta_mean, 4) +
      " vs 3SE=" + fmt(3.0 * delta_se, 3) + "; (c) " + (cc ? "PASS" : "FAIL") + " noise " +
      fmt(noise_rec, 4) + " < " + fmt(noise_clean, 4) + "; (d) " + (dd ? "PASS" : "FAIL") +
      " SNR " + fmt(snr_rec, 4) + " < " + fmt(snr_clean, 4) + "; (e) " + (e ? "PASS" : "FAIL") +
      " overlap visibility=" + fmt(vis, 4) + " in 0.5+-0.05";
  return {a && b && cc && dd && e, detail};
}

Outcome criterion_8() {
  SplitMix64 rng{0xACCE55};
  double max_dev = 0.0;
  for (int s = 0; s < 50; ++s) {
    const TwoPhotonState rho1 = bell_diagonal_state(random_mu(rng));
    const TwoPhotonState rho2 = bell_diagonal_state(random_mu(rng));
    const TwoPhotonState rho_e = bell_diagonal_state(random_mu(rng));
    const double r = rng.next_double();
    const AnalyzerConfig cfg(rng.next_double() * kPi, rng.next_double() * kPi);
    const Scene scene =
        make_default_scene(1e4 + rng.next_double() * 1.9e5, rng.next_double() * 2e4);

    const RealImage e1 = expected_counts(scene, rho1, rho_e, r, cfg);
    const RealImage e2 = expected_counts(scene, rho2, rho_e, r, cfg);
    const double gap =
        std::abs(detection_probability(rho1, cfg) - detection_probability(rho2, cfg));
    for (std::size_t p = 0; p < scene.pixel_count(); ++p) {
      const double reference = (1.0 - r) * scene.photons_per_image * scene.illumination[p] *
                               scene.mask_true[p] * gap;
      const double dev = std::abs(std::abs(e1.values[p] - e2.values[p]) - reference);
      if (dev > max_dev)
        max_dev = dev;
    }
  }
  return {max_dev < 1e-12,
          "max |difference map - (1-r) n illum mask |P1-P2|| = " + fmt(max_dev, 3) + " (<1e-12)"};
}

Outcome criterion_9(const std::string &binary) {
  if (binary.empty() || !fs::exists(binary))
    return {false, "CLI binary path not supplied or missing"};

  const fs::path root = fs::current_path() / "acceptance_tmp";
  fs::remove_all(root);
  fs::create_directories(root);
  const fs::path cfg_path = root / "fast.json";
  {
    std::ofstream cfg(cfg_path);
    cfg << R"({"levels": [0.2, 0.6],
  "search": {"mu_points": 9, "r_points": 9, "theta_points": 9, "level_band": 0.05},
  "target_level": 0.3})";
  }

  auto run = [&](const std::string &args) {
    const std::string cmd = "\"" + binary + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  auto same_file = [&](const fs::path &a, const fs::path &b) {
    return read_file(a.string()) == read_file(b.string());
  };
  auto manifest_checksums = [&](const fs::path &dir, bool results_only) {
    json outputs = json::parse(read_file((dir / "manifest.json").string()))["outputs"];
    // Across different --threads settings the effective config (and hence its
    // checksum) legitimately differs; the result files must not.
    if (results_only)
      outputs.erase("effective_config.json");
    return outputs.dump();
  };
  const std::string cfg_arg = "--config \"" + cfg_path.string() + "\"";

  std::vector<std::string> problems;
  auto expect = [&](bool ok, const std::string &what) {
    if (!ok)
      problems.push_back(what);
  };

  // detect-curve under three thread counts
  expect(run(cfg_arg + " --seed 5 --out " + (root / "c1").string() + " detect-curve") == 0,
         "detect-curve run 1 failed");
  expect(run(cfg_arg + " --seed 5 --threads 1 --out " + (root / "c2").string() + " detect-curve") == 0,
         "detect-curve run 2 failed");
  expect(run(cfg_arg + " --seed 5 --threads 3 --out " + (root / "c3").string() + " detect-curve") == 0,
         "detect-curve run 3 failed");
  if (problems.empty()) {
    expect(same_file(root / "c1/detect_curve.csv", root / "c2/detect_curve.csv"),
           "detect_curve.csv differs between reruns");
    expect(same_file(root / "c1/detect_curve.csv", root / "c3/detect_curve.csv"),
           "detect_curve.csv depends on thread count");
    expect(manifest_checksums(root / "c1", true) == manifest_checksums(root / "c3", true),
           "detect-curve manifest checksums differ");
  }

  // simulate twice with the same seed
  expect(run("--seed 7 --out " + (root / "s1").string() + " simulate") == 0, "simulate run 1 failed");
  expect(run("--seed 7 --out " + (root / "s2").string() + " simulate") == 0, "simulate run 2 failed");
  if (problems.empty()) {
    for (const char *name : {"jammed_j1.pgm", "jammed_j2.pgm", "recovered.pgm", "clean.pgm"})
      expect(same_file(root / "s1" / name, root / "s2" / name),
             std::string(name) + " differs between reruns");
    expect(manifest_checksums(root / "s1", false) == manifest_checksums(root / "s2", false),
           "simulate manifest checksums differ");
  }

  // analyze the simulated pair twice
  const std::string imgs = " analyze " + (root / "s1/jammed_j1.pgm").string() + " " +
                           (root / "s1/jammed_j2.pgm").string();
  expect(run("--out " + (root / "a1").string() + imgs) == 0, "analyze run 1 failed");
  expect(run("--out " + (root / "a2").string() + imgs) == 0, "analyze run 2 failed");
  if (problems.empty()) {
    expect(same_file(root / "a1/recovered.pgm", root / "a2/recovered.pgm"),
           "analyze recovered.pgm differs between reruns");
    expect(same_file(root / "a1/report.json", root / "a2/report.json"),
           "analyze report differs between reruns");
  }

  // worst-case under two thread counts
  expect(run(cfg_arg + " --threads 1 --out " + (root / "w1").string() + " worst-case") == 0,
         "worst-case run 1 failed");
  expect(run(cfg_arg + " --threads 4 --out " + (root / "w2").string() + " worst-case") == 0,
         "worst-case run 2 failed");
  if (problems.empty())
    expect(same_file(root / "w1/worst_case.json", root / "w2/worst_case.json"),
           "worst_case.json depends on thread count");

  if (!problems.empty())
    return {false, problems.front() + (problems.size() > 1 ? " (+" +
                       std::to_string(problems.size() - 1) + " more)" : "")};
  return {true, "all four commands byte-identical across reruns and thread counts"};
}

} // namespace

int main(int argc, char **argv) {
  const std::string binary = argc > 1 ? argv[1] : "";

  run_criterion(1, 1.0, criterion_1);
  run_criterion(2, 1.0, criterion_2);
  run_criterion(3, 30.0, criterion_3);
  run_criterion(4, 60.0, criterion_4);

  Curves curves;
  run_criterion(5, 600.0, [&]() {
    curves = compute_curves();
    return criterion_5(curves);
  });
  run_criterion(6, 60.0, [&]() { return criterion_6(curves); });
  run_criterion(7, 120.0, criterion_7);
  run_criterion(8, 5.0, criterion_8);
  run_criterion(9, 0.0, [&]() { return criterion_9(binary); });

  std::printf("acceptance: %d/9 criteria passed\n", 9 - failures);
  return failures;
}
