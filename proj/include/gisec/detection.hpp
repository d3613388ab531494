#pragma once
#include <vector>

#include <gisec/polarization.hpp>

namespace gisec {

/// Gaussian visibility-noise model for the hypothesis test.
struct NoiseModel {
  double sigma{0.1};    ///< standard deviation of one visibility sample, > 0
  int trials{1};        ///< number of samples M, >= 1

  void validate() const;
};

/// Likelihood-ratio test parameters.
struct TestParams {
  double lambda{1.0}; ///< likelihood threshold, > 0
  double prior{0.5};  ///< prior probability of intrusion, in (0,1)

  void validate() const;
};

/// Test verdict: H0 = no intrusion, H1 = intrusion.
enum class Verdict { no_intrusion, intrusion };

/// Everything the analyzer reports about one hypothesis test.
struct DetectionReport {
  double v_expected{0.0};    ///< visibility without intrusion
  double v_observed{0.0};    ///< measured visibility
  double d{0.0};             ///< separation statistic in units of sigma/sqrt(M)
  Verdict verdict{Verdict::no_intrusion};
  double p_detect{0.0};      ///< probability of detecting a real intruder
  double p_false_alarm{0.0}; ///< probability of flagging a clean run
};

/// A concrete intercept-resend attack on a two-state imaging protocol.
struct JammingScenario {
  TwoPhotonState rho1;   ///< first legitimate state
  TwoPhotonState rho2;   ///< second legitimate state
  TwoPhotonState rho_e;  ///< state substituted by the intruder
  double r{0.0};         ///< intercepted fraction, in [0,1]
  AnalyzerConfig config{std::vector<double>{0.0, 0.0}};
};

/// |p1-p2|/(p1+p2); defined as 0 when both probabilities vanish.
/// Throws std::invalid_argument if an input lies outside [0,1].
double visibility(double p1, double p2);

/// Jammed visibility for a single-photon channel with an orthogonal pure
/// state pair: (1-r)*v_clean / (1-r + 2r*overlap), where
/// overlap = <a(theta)|rho_E|a(theta)>.  Exactly matches mixing the states
/// and reapplying the visibility definition, since the intruder contributes
/// the same overlap term to both images of the pair.
/// Throws degenerate_channel_error when the denominator vanishes (r=1, overlap=0).
double jammed_visibility_single_photon(double v_clean, double r, double overlap);

/// Minimizes |v_clean - jammed visibility| over single-photon intruder states
/// for a given analyzer angle and intercept fraction.  Returns the achieved
/// difference and the minimizing intruder (which approaches the state
/// orthogonal to the analyzer, nulling the difference).
struct SinglePhotonNullResult {
  double difference{0.0};
  PureQubit intruder;
  double overlap{0.0};
};
SinglePhotonNullResult single_photon_inner_min(double theta, double r, double v_clean);

/// sqrt(M) * (v1 - v0) / sigma, sign preserved.
double d_statistic(double v0, double v1, const NoiseModel &noise);

/// Likelihood-ratio decision on normalized samples s~_i = s_i / (sigma*sqrt(M)).
/// Accepts H0 iff sum_i s~_i is on the H0 side of ln(lambda)/d + d/2; boundary
/// equality resolves to H1.  The samples are measured relative to the H0 mean,
/// and d carries the sign of the H1 shift.  d=0 with lambda != 1 has no
/// threshold and throws undefined_threshold_error; d=0 with lambda=1 uses
/// threshold 0.
Verdict decide(const std::vector<double> &samples, const NoiseModel &noise,
               const TestParams &params, double d);

/// P_d = Q(ln(lambda)/d - d/2), Q(x) = erfc(x/sqrt(2))/2.
/// The ln(lambda)/d term is taken as 0 when lambda=1, including at d=0.
double detection_probability(double d, const TestParams &params);

/// P_err = Q(ln(lambda)/d + d/2).
double false_alarm_probability(double d, const TestParams &params);

/// Jamming level: max over the two legitimate states of the visibility between
/// the clean and jammed coincidence probabilities.
double jamming_level(const JammingScenario &scenario);

/// Visibility drop caused by a fixed attack, in units of sigma/sqrt(M):
/// [V(rho1,rho2) - V(rho1',rho2')] * sqrt(M) / sigma.
double evaluate_d_fixed(const JammingScenario &scenario, const NoiseModel &noise);

} // namespace gisec
