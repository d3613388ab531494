#include <gisec/ghostsim.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <gisec/digest.hpp>
#include <gisec/rng.hpp>

namespace gisec {

namespace {

int scaled(int v, int dim, int reference) {
  return int(std::lround(double(v) * dim / reference));
}

double region_mean(const std::vector<double> &values,
                   const std::vector<std::size_t> &region) {
  if (region.empty())
    throw degenerate_region_error("metric region is empty");
  double sum = 0.0;
  for (std::size_t p : region)
    sum += values[p];
  return sum / double(region.size());
}

std::vector<double> to_real(const CountImage &img) {
  return std::vector<double>(img.counts.begin(), img.counts.end());
}

} // namespace

void Scene::validate() const {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("scene dimensions must be positive");
  const std::size_t n = pixel_count();
  if (mask_true.size() != n || mask_false.size() != n || illumination.size() != n)
    throw std::invalid_argument("scene mask/illumination shape mismatch");
  double sum = 0.0;
  for (double w : illumination) {
    if (w < 0.0)
      throw std::invalid_argument("illumination entries must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("illumination must sum to 1");
  if (photons_per_image < 0.0 || dark_total < 0.0)
    throw std::invalid_argument("photon and dark-count budgets must be nonnegative");
}

std::vector<std::size_t> region_pixels(const Scene &scene, Region region) {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < scene.pixel_count(); ++p) {
    const bool in_true = scene.mask_true[p] != 0;
    const bool in_false = scene.mask_false[p] != 0;
    bool keep = false;
    switch (region) {
    case Region::lambda_only: keep = in_true && !in_false; break;
    case Region::t_only: keep = !in_true && in_false; break;
    case Region::overlap: keep = in_true && in_false; break;
    case Region::background: keep = !in_true && !in_false; break;
    case Region::non_lambda: keep = !in_true; break;
    }
    if (keep)
      out.push_back(p);
  }
  return out;
}

Scene make_default_scene(double photons_per_image, double dark_total, int width,
                         int height) {
  if (width < 16 || height < 16)
    throw std::invalid_argument("default scene needs at least a 16x16 grid");
  Scene scene;
  scene.width = width;
  scene.height = height;
  const std::size_t n = scene.pixel_count();
  scene.mask_true.assign(n, 0);
  scene.mask_false.assign(n, 0);
  scene.illumination.assign(n, 1.0 / double(n));
  scene.photons_per_image = photons_per_image;
  scene.dark_total = dark_total;

  auto set = [&](std::vector<std::uint8_t> &mask, int y, int x0, int x1) {
    for (int x = std::max(0, x0); x <= std::min(width - 1, x1); ++x)
      mask[std::size_t(y) * width + x] = 1;
  };

  // Block-letter T: horizontal bar plus central stem.  Coordinates are
  // designed on a 34x34 grid and scaled for other sizes.
  const int bar_top = scaled(3, height, 34), bar_bot = scaled(8, height, 34);
  const int bar_l = scaled(3, width, 34), bar_r = scaled(30, width, 34);
  const int stem_l = scaled(14, width, 34), stem_r = scaled(19, width, 34);
  for (int y = bar_top; y <= bar_bot; ++y)
    set(scene.mask_false, y, bar_l, bar_r);
  for (int y = bar_bot + 1; y <= scaled(30, height, 34); ++y)
    set(scene.mask_false, y, stem_l, stem_r);

  // Block-letter lambda: two 3-pixel strokes spreading downward from an apex
  // that sits inside the T's bar, giving a nonempty overlap region.
  const int apex = scaled(6, height, 34), foot = scaled(28, height, 34);
  const int cl = scaled(16, width, 34), cr = scaled(17, width, 34);
  const int spread = scaled(10, width, 34);
  for (int y = apex; y <= foot; ++y) {
    const int off = int(std::lround(double(spread) * (y - apex) / (foot - apex)));
    set(scene.mask_true, y, cl - off - 1, cl - off + 1);
    set(scene.mask_true, y, cr + off - 1, cr + off + 1);
  }
  return scene;
}

RealImage expected_counts(const Scene &scene, const TwoPhotonState &legit_state,
                          const TwoPhotonState &rho_e, double r,
                          const AnalyzerConfig &config) {
  scene.validate();
  if (config.arity() != 2)
    throw std::invalid_argument("imaging requires exactly two analyzer angles");
  if (!(r >= 0.0 && r <= 1.0))
    throw std::invalid_argument("intercept fraction r must lie in [0,1]");

  const double p_legit = detection_probability(legit_state, config);
  const double p_false = detection_probability(rho_e, config);
  const double dark_share = scene.dark_total / double(scene.pixel_count());

  RealImage out;
  out.width = scene.width;
  out.height = scene.height;
  out.values.resize(scene.pixel_count());
  for (std::size_t p = 0; p < scene.pixel_count(); ++p) {
    const double coincidence = (1.0 - r) * scene.mask_true[p] * p_legit +
                               r * scene.mask_false[p] * p_false;
    out.values[p] = scene.photons_per_image * scene.illumination[p] * coincidence +
                    dark_share;
  }
  return out;
}

CountImage sample_counts(const RealImage &expected, std::uint64_t seed) {
  for (double v : expected.values)
    if (!(v >= 0.0))
      throw std::invalid_argument("expected counts must be nonnegative");

  CountImage out;
  out.width = expected.width;
  out.height = expected.height;
  out.counts.resize(expected.pixel_count());
  out.seed = seed;
  out.digest = digest_hex(
      fnv1a64(expected.values.data(), expected.values.size() * sizeof(double)));
  for (std::size_t p = 0; p < expected.values.size(); ++p) {
    SplitMix64 rng = stream_for(seed, p);
    out.counts[p] = poisson_sample(rng, expected.values[p]);
  }
  return out;
}

std::pair<CountImage, CountImage> simulate_pair(const Scene &scene,
                                                const TwoPhotonState &rho1,
                                                const TwoPhotonState &rho2,
                                                const TwoPhotonState &rho_e, double r,
                                                const AnalyzerConfig &config,
                                                std::uint64_t seed) {
  const RealImage e1 = expected_counts(scene, rho1, rho_e, r, config);
  const RealImage e2 = expected_counts(scene, rho2, rho_e, r, config);
  return {sample_counts(e1, mix64(seed ^ mix64(1))),
          sample_counts(e2, mix64(seed ^ mix64(2)))};
}

RecoveryResult recover(const CountImage &img1, const CountImage &img2, double weight) {
  if (img1.width != img2.width || img1.height != img2.height)
    throw std::invalid_argument("recovery requires images of identical shape");

  RecoveryResult res;
  res.weight_used = weight;
  res.image.width = img1.width;
  res.image.height = img1.height;
  res.image.values.resize(img1.pixel_count());
  for (std::size_t p = 0; p < img1.pixel_count(); ++p)
    res.image.values[p] = std::abs(double(img1.counts[p]) - weight * double(img2.counts[p]));
  return res;
}

double estimate_weight(const CountImage &img1, const CountImage &img2,
                       const std::vector<std::size_t> &region) {
  if (img1.width != img2.width || img1.height != img2.height)
    throw std::invalid_argument("weight estimation requires images of identical shape");
  if (region.empty())
    throw degenerate_region_error("weight-estimation region is empty");

  double sum1 = 0.0, sum2 = 0.0;
  for (std::size_t p : region) {
    sum1 += double(img1.counts[p]);
    sum2 += double(img2.counts[p]);
  }
  if (sum2 == 0.0)
    throw degenerate_region_error("weight-estimation region has no counts in image 2");
  return sum1 / sum2;
}

double measure_region_visibility(const CountImage &img1, const CountImage &img2,
                                 const std::vector<std::size_t> &region,
                                 double dark_per_pixel) {
  if (img1.width != img2.width || img1.height != img2.height)
    throw std::invalid_argument("visibility requires images of identical shape");
  if (region.empty())
    throw degenerate_region_error("visibility region is empty");

  double sum1 = 0.0, sum2 = 0.0;
  for (std::size_t p : region) {
    sum1 += double(img1.counts[p]);
    sum2 += double(img2.counts[p]);
  }
  const double dark = dark_per_pixel * double(region.size());
  sum1 = std::max(0.0, sum1 - dark);
  sum2 = std::max(0.0, sum2 - dark);
  const double total = sum1 + sum2;
  if (total == 0.0)
    return 0.0;
  return std::abs(sum1 - sum2) / total;
}

ImageMetrics compute_metrics(const CountImage &jam1, const CountImage &jam2,
                             const RealImage &recovered, const CountImage &clean_ref,
                             const Scene &scene) {
  scene.validate();
  const std::size_t n = scene.pixel_count();
  if (jam1.pixel_count() != n || jam2.pixel_count() != n ||
      recovered.pixel_count() != n || clean_ref.pixel_count() != n)
    throw std::invalid_argument("metric image shapes must match the scene");

  const std::vector<double> clean = to_real(clean_ref);

  ImageMetrics m;
  m.mean_dark_per_pixel = region_mean(clean, region_pixels(scene, Region::background));
  m.noise_level = region_mean(recovered.values, region_pixels(scene, Region::non_lambda));
  m.signal_mean = region_mean(recovered.values, region_pixels(scene, Region::lambda_only));
  m.snr = m.noise_level > 0.0 ? m.signal_mean / m.noise_level : 0.0;
  m.residual_false_mean =
      region_mean(recovered.values, region_pixels(scene, Region::t_only));
  return m;
}

} // namespace gisec
