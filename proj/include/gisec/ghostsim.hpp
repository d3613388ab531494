#pragma once
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <gisec/detection.hpp>

namespace gisec {

/// Imaging scenario: object masks, illumination and photon budget.
struct Scene {
  int width{0};
  int height{0};
  std::vector<std::uint8_t> mask_true;  ///< transmission of the legitimate object
  std::vector<std::uint8_t> mask_false; ///< transmission of the intruder's object
  std::vector<double> illumination;     ///< per-pixel distribution, sums to 1
  double photons_per_image{0.0};        ///< photon budget n per state setting
  double dark_total{0.0};               ///< expected noise counts per image

  std::size_t pixel_count() const { return std::size_t(width) * height; }
  void validate() const;
};

/// Pixel classes carved out of the two masks.
enum class Region {
  lambda_only, ///< true object only
  t_only,      ///< false object only
  overlap,     ///< both objects transmit
  background,  ///< neither object transmits
  non_lambda,  ///< everything outside the true object
};

/// Indices of the pixels forming a region, in row-major order.
std::vector<std::size_t> region_pixels(const Scene &scene, Region region);

/// Default 34x34 scene: uniform illumination, a block-letter lambda as the
/// true object and a block-letter T as the false one, overlapping near the
/// top so that the jammed visibility is measurable on the shared pixels.
Scene make_default_scene(double photons_per_image, double dark_total, int width = 34,
                         int height = 34);

/// Real-valued per-pixel map (expectation maps and recovered images).
struct RealImage {
  int width{0};
  int height{0};
  std::vector<double> values;

  std::size_t pixel_count() const { return std::size_t(width) * height; }
};

/// Photon-counting image plus its provenance.
struct CountImage {
  int width{0};
  int height{0};
  std::vector<long long> counts;
  std::uint64_t seed{0};  ///< stream seed used for sampling
  std::string digest;     ///< digest of the generating expectation map

  std::size_t pixel_count() const { return std::size_t(width) * height; }
};

/// Output of the difference-based recovery.
struct RecoveryResult {
  RealImage image; ///< |counts1 - weight*counts2|, nonnegative reals
  double weight_used{1.0};
};

/// Quality metrics of a recovered (or reference) image.  Noise is the mean
/// of the analyzed image outside the true object; this includes the residual
/// left where the false object used to be, which is what limits the
/// signal-to-noise ratio after recovery.
struct ImageMetrics {
  double mean_dark_per_pixel{0.0}; ///< clean-reference mean over background pixels
  double noise_level{0.0};         ///< analyzed-image mean outside the true object
  double signal_mean{0.0};         ///< analyzed-image mean over lambda-only pixels
  double snr{0.0};                 ///< signal_mean / noise_level
  double residual_false_mean{0.0}; ///< analyzed-image mean over T-only pixels
};

/// Per-pixel expected counts for one state setting under attack:
/// n*illum*[(1-r)*mask_true*P(rho_j) + r*mask_false*P(rho_e)] + dark_total/Npix.
/// Intercepted photons contribute only the false-image term.
RealImage expected_counts(const Scene &scene, const TwoPhotonState &legit_state,
                          const TwoPhotonState &rho_e, double r,
                          const AnalyzerConfig &config);

/// Independent Poisson draw per pixel.  Each pixel's stream is derived from
/// (seed, pixel index), so the result does not depend on evaluation order.
CountImage sample_counts(const RealImage &expected, std::uint64_t seed);

/// Samples the two state settings of one imaging round.  The false-image
/// expectation term is identical across the pair; the shot noise is not.
std::pair<CountImage, CountImage> simulate_pair(const Scene &scene,
                                                const TwoPhotonState &rho1,
                                                const TwoPhotonState &rho2,
                                                const TwoPhotonState &rho_e, double r,
                                                const AnalyzerConfig &config,
                                                std::uint64_t seed);

/// Per-pixel |counts1 - weight*counts2|.
RecoveryResult recover(const CountImage &img1, const CountImage &img2,
                       double weight = 1.0);

/// Ratio of mean counts over a designated false-image region,
/// mean(img1)/mean(img2); the weight for recovering from an intruder whose
/// false-image brightness differs between the settings.
double estimate_weight(const CountImage &img1, const CountImage &img2,
                       const std::vector<std::size_t> &region);

/// Visibility of the summed counts over a region.  dark_per_pixel, when
/// nonzero, is subtracted from each sum (clamped at zero) before the ratio,
/// mirroring the accidental-coincidence subtraction done in experiments;
/// the default reproduces the plain summed-counts definition.
double measure_region_visibility(const CountImage &img1, const CountImage &img2,
                                 const std::vector<std::size_t> &region,
                                 double dark_per_pixel = 0.0);

/// Metrics of a recovered image against its clean reference.  The jammed pair
/// participates only in shape validation; all statistics come from the
/// analyzed (recovered) image and the clean reference.
ImageMetrics compute_metrics(const CountImage &jam1, const CountImage &jam2,
                             const RealImage &recovered, const CountImage &clean_ref,
                             const Scene &scene);

} // namespace gisec
