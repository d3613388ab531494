#pragma once
#include <Eigen/Dense>
#include <array>
#include <vector>

#include <gisec/common.hpp>

namespace gisec {

/// One-photon pure polarization state |phi> = cos(alpha)|H> + e^{i beta} sin(alpha)|V>.
struct PureQubit {
  double alpha{0.0}; ///< mixing angle (radians)
  double beta{0.0};  ///< relative phase (radians)

  Eigen::Vector2cd ket() const;
  Eigen::Matrix2cd density() const;
};

/// Two-photon polarization density matrix in the fixed (HH, HV, VH, VV) basis.
/// Construction validates hermiticity (1e-12), unit trace (1e-12) and
/// positivity (eigenvalues >= -1e-10).
struct TwoPhotonState {
  Eigen::Matrix4cd rho;

  static TwoPhotonState from_matrix(const Eigen::Matrix4cd &m);
  double purity() const; ///< Tr(rho^2), real part
};

/// Correlation triple (mu_x, mu_y, mu_z) of the Bell-diagonal class
/// rho = I/4 + mu_x XX + mu_y YY + mu_z ZZ.  Positivity demands the four
/// Bell-basis eigenvalues 1/4 + sx*mu_x + sy*mu_y + sz*mu_z (sign patterns
/// with sx*sy*sz = -1) all be >= -1e-10.
struct BellDiagonalParams {
  double mu_x{0.0};
  double mu_y{0.0};
  double mu_z{0.0};

  /// The four Bell-basis eigenvalues, order: Phi+, Phi-, Psi+, Psi-.
  std::array<double, 4> eigenvalues() const;
  bool positive(double tol = 1e-10) const;
};

/// Ordered analyzer angles {theta_i}; length must match the photon number
/// of the state it is applied to.  Angles are reduced to [0, pi) because the
/// analyzer projector has period pi.
struct AnalyzerConfig {
  std::vector<double> thetas;

  explicit AnalyzerConfig(std::vector<double> angles);
  AnalyzerConfig(double theta1, double theta2);
  std::size_t arity() const { return thetas.size(); }
};

/// (cos theta, sin theta) in the H/V basis; unit norm.
Eigen::Vector2d analyzer_vector(double theta);

/// <a(th_1) x ... x a(th_n)| rho |a(th_1) x ... x a(th_n)>, clamped to [0,1].
/// rho must be 2^n x 2^n for n analyzer angles.
double detection_probability(const Eigen::MatrixXcd &rho, const AnalyzerConfig &config);
double detection_probability(const TwoPhotonState &state, const AnalyzerConfig &config);

/// I/4 + mu_x XX + mu_y YY + mu_z ZZ as an explicit density matrix.
TwoPhotonState bell_diagonal_state(const BellDiagonalParams &params);

/// Closed-form coincidence probability for the Bell-diagonal class:
/// 1/4 + mu_x sin(2 th1) sin(2 th2) + mu_z cos(2 th1) cos(2 th2).
/// mu_y never contributes for real analyzer vectors.
double coincidence_probability_bd(const BellDiagonalParams &params, double theta1, double theta2);

/// (1-r) * legit + r * intruder.
TwoPhotonState mix(const TwoPhotonState &legit, const TwoPhotonState &intruder, double r);

/// The four named states used throughout: maximally entangled psi1, psi2 and
/// classically correlated omega1 (H/V mixture), omega2 (diag/antidiag mixture).
struct CanonicalStates {
  TwoPhotonState psi1;
  TwoPhotonState psi2;
  TwoPhotonState omega1;
  TwoPhotonState omega2;
};
CanonicalStates canonical_states();

/// Inverse of the Bell-diagonal parametrization: mu_k = Tr(rho sigma_k x sigma_k)/4
/// plus the magnitudes of the two single-photon Bloch vectors (zero on the
/// Bell-diagonal class).  Used to verify sign conventions.
struct Correlations {
  BellDiagonalParams mu;
  double residual_first{0.0};
  double residual_second{0.0};
};
Correlations extract_correlations(const TwoPhotonState &state);

} // namespace gisec
