#pragma once
#include <optional>
#include <vector>

#include <gisec/detection.hpp>

namespace gisec {

/// Resolutions and tolerances for the nested min-max search.  The result is
/// deterministic for fixed settings regardless of thread count.
struct SearchSettings {
  int mu_points{17};       ///< grid points per correlation axis, >= 8
  int r_points{33};        ///< grid points for the intercept fraction, >= 8
  int theta_points{33};    ///< grid points per analyzer angle on [0, pi), >= 8
  double level_band{0.01}; ///< half-width of the jamming-level equality band
  double refine_tol{1e-6}; ///< Nelder-Mead convergence tolerance on the objective
  int max_refine_iter{200};///< Nelder-Mead iteration cap
  int threads{0};          ///< worker threads for the outer grid; 0 = hardware

  void validate() const;
};

/// Outcome of the worst-case search: the guaranteed separation statistic,
/// the analyzer angles attaining it, and the intruder scenario that limits it.
struct WorstCaseResult {
  double d{0.0};
  double theta1{0.0};
  double theta2{0.0};
  BellDiagonalParams intruder_mu;
  double intruder_r{0.0};
  double achieved_level{0.0};
};

/// One point of a detection-probability curve.  Infeasible levels (no intruder
/// scenario reaches the level within the band) are kept as gaps.
struct CurvePoint {
  double level{0.0};
  bool feasible{false};
  double d{0.0};
  double p_detect{0.0};
  double p_false_alarm{0.0};
};

/// Worst-case separation statistic: max over analyzer angles of the min over
/// intruder scenarios (Bell-diagonal states in the positivity tetrahedron
/// crossed with r in [0,1]) of the visibility drop in units of sigma/sqrt(M).
///
/// With a target_level, the inner minimization only considers scenarios whose
/// jamming level lies within +-level_band of the target; analyzer angles with
/// an empty feasible set are skipped, and infeasible_level_error is thrown if
/// every angle is infeasible.  Without a target the intruder may choose r=0,
/// so the result is 0.
///
/// Deterministic two-stage search: exhaustive grid at the configured
/// resolutions (ties broken by lexicographic grid index), then Nelder-Mead
/// refinement of the analyzer angles from the best cell.
WorstCaseResult worst_case_d(const TwoPhotonState &rho1, const TwoPhotonState &rho2,
                             std::optional<double> target_level, const NoiseModel &noise,
                             const SearchSettings &search);

/// Applies worst_case_d at each requested jamming level and converts d to
/// detection and false-alarm probabilities (lambda = 1).
std::vector<CurvePoint> detection_curve(const TwoPhotonState &rho1,
                                        const TwoPhotonState &rho2,
                                        const std::vector<double> &levels,
                                        const NoiseModel &noise,
                                        const SearchSettings &search);

} // namespace gisec
