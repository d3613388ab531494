#include <gisec/detection.hpp>

#include <cmath>
#include <stdexcept>

namespace gisec {

namespace {

double gaussian_tail(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// ln(lambda)/d with the lambda=1 limit pinned to 0 for every d, including 0.
double threshold_term(double lambda, double d) {
  if (lambda == 1.0)
    return 0.0;
  if (d == 0.0)
    throw undefined_threshold_error("threshold ln(lambda)/d undefined at d=0 for lambda != 1");
  return std::log(lambda) / d;
}

void check_probability(double p, const char *name) {
  if (!(p >= 0.0 && p <= 1.0))
    throw std::invalid_argument(std::string(name) + " must lie in [0,1]");
}

} // namespace

void NoiseModel::validate() const {
  if (!(sigma > 0.0))
    throw std::invalid_argument("noise sigma must be positive");
  if (trials < 1)
    throw std::invalid_argument("trial count M must be at least 1");
}

void TestParams::validate() const {
  if (!(lambda > 0.0))
    throw std::invalid_argument("likelihood threshold lambda must be positive");
  if (!(prior > 0.0 && prior < 1.0))
    throw std::invalid_argument("prior must lie in (0,1)");
}

double visibility(double p1, double p2) {
  check_probability(p1, "p1");
  check_probability(p2, "p2");
  const double sum = p1 + p2;
  if (sum == 0.0)
    return 0.0;
  return std::abs(p1 - p2) / sum;
}

double jammed_visibility_single_photon(double v_clean, double r, double overlap) {
  if (!(r >= 0.0 && r <= 1.0))
    throw std::invalid_argument("intercept fraction r must lie in [0,1]");
  check_probability(overlap, "overlap");
  // The intruder term enters both images of the pair, so the normalization
  // picks up 2r*overlap (for an orthogonal pure pair the clean probabilities
  // sum to 1).  This keeps the closed form identical to mixing the states
  // explicitly and applying the visibility definition.
  const double denom = 1.0 - r + 2.0 * r * overlap;
  if (denom <= 0.0)
    throw degenerate_channel_error("jammed channel has zero transmission");
  return (1.0 - r) * v_clean / denom;
}

SinglePhotonNullResult single_photon_inner_min(double theta, double r, double v_clean) {
  if (!(r >= 0.0 && r <= 1.0))
    throw std::invalid_argument("intercept fraction r must lie in [0,1]");

  // Real intruder kets suffice: overlap(alpha) = cos^2(theta - alpha) already
  // sweeps [0,1], and the jammed visibility is monotone in the overlap.
  auto difference = [&](double alpha) {
    const double cosang = std::cos(theta - alpha);
    const double overlap = cosang * cosang;
    return std::abs(v_clean - jammed_visibility_single_photon(v_clean, r, overlap));
  };

  const int coarse = 257;
  double best_alpha = 0.0, best_diff = difference(0.0);
  for (int i = 1; i < coarse; ++i) {
    const double alpha = M_PI * i / coarse;
    const double diff = difference(alpha);
    if (diff < best_diff) {
      best_diff = diff;
      best_alpha = alpha;
    }
  }

  // Golden-section polish around the best coarse sample.
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = best_alpha - M_PI / coarse, b = best_alpha + M_PI / coarse;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double f1 = difference(x1), f2 = difference(x2);
  for (int it = 0; it < 200 && (b - a) > 1e-14; ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - gr * (b - a);
      f1 = difference(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + gr * (b - a);
      f2 = difference(x2);
    }
  }
  best_alpha = (f1 < f2) ? x1 : x2;
  best_diff = std::min(f1, f2);

  SinglePhotonNullResult res;
  res.difference = best_diff;
  res.intruder = PureQubit{best_alpha, 0.0};
  const double cosang = std::cos(theta - best_alpha);
  res.overlap = cosang * cosang;
  return res;
}

double d_statistic(double v0, double v1, const NoiseModel &noise) {
  noise.validate();
  return std::sqrt(double(noise.trials)) * (v1 - v0) / noise.sigma;
}

Verdict decide(const std::vector<double> &samples, const NoiseModel &noise,
               const TestParams &params, double d) {
  noise.validate();
  params.validate();
  if (samples.empty())
    throw std::invalid_argument("decide requires at least one sample");

  const double scale = noise.sigma * std::sqrt(double(noise.trials));
  double sum = 0.0;
  for (double s : samples)
    sum += s / scale;

  const double threshold = threshold_term(params.lambda, d) + d / 2.0;
  // The H0 side of the threshold depends on the sign of the H1 shift;
  // boundary equality always resolves to intrusion.
  if (d >= 0.0)
    return sum < threshold ? Verdict::no_intrusion : Verdict::intrusion;
  return sum > threshold ? Verdict::no_intrusion : Verdict::intrusion;
}

double detection_probability(double d, const TestParams &params) {
  params.validate();
  if (d < 0.0)
    throw std::invalid_argument("separation statistic d must be nonnegative");
  return gaussian_tail(threshold_term(params.lambda, d) - d / 2.0);
}

double false_alarm_probability(double d, const TestParams &params) {
  params.validate();
  if (d < 0.0)
    throw std::invalid_argument("separation statistic d must be nonnegative");
  return gaussian_tail(threshold_term(params.lambda, d) + d / 2.0);
}

double jamming_level(const JammingScenario &scenario) {
  if (!(scenario.r >= 0.0 && scenario.r <= 1.0))
    throw std::invalid_argument("intercept fraction r must lie in [0,1]");
  const double e = detection_probability(scenario.rho_e, scenario.config);
  double level = 0.0;
  for (const TwoPhotonState *state : {&scenario.rho1, &scenario.rho2}) {
    const double p = detection_probability(*state, scenario.config);
    const double jammed = (1.0 - scenario.r) * p + scenario.r * e;
    level = std::max(level, visibility(p, jammed));
  }
  return level;
}

double evaluate_d_fixed(const JammingScenario &scenario, const NoiseModel &noise) {
  noise.validate();
  if (!(scenario.r >= 0.0 && scenario.r <= 1.0))
    throw std::invalid_argument("intercept fraction r must lie in [0,1]");
  const double p1 = detection_probability(scenario.rho1, scenario.config);
  const double p2 = detection_probability(scenario.rho2, scenario.config);
  const double e = detection_probability(scenario.rho_e, scenario.config);
  const double j1 = (1.0 - scenario.r) * p1 + scenario.r * e;
  const double j2 = (1.0 - scenario.r) * p2 + scenario.r * e;
  const double drop = visibility(p1, p2) - visibility(j1, j2);
  return std::sqrt(double(noise.trials)) * drop / noise.sigma;
}

} // namespace gisec
