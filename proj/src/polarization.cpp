#include <gisec/polarization.hpp>

#include <algorithm>
#include <cmath>
#include <complex>

namespace gisec {

namespace {

constexpr double kHermitianTol = 1e-12;
constexpr double kTraceTol = 1e-12;
constexpr double kEigenTol = 1e-10;
constexpr double kImagTol = 1e-10;

const std::complex<double> kI{0.0, 1.0};

double reduce_angle(double theta) {
  if (!std::isfinite(theta))
    throw std::invalid_argument("analyzer angle is not finite");
  double t = std::fmod(theta, M_PI);
  if (t < 0.0)
    t += M_PI;
  return t;
}

} // namespace

Eigen::Vector2cd PureQubit::ket() const {
  Eigen::Vector2cd v;
  v << std::cos(alpha), std::exp(kI * beta) * std::sin(alpha);
  return v;
}

Eigen::Matrix2cd PureQubit::density() const {
  const Eigen::Vector2cd v = ket();
  return v * v.adjoint();
}

TwoPhotonState TwoPhotonState::from_matrix(const Eigen::Matrix4cd &m) {
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > kHermitianTol)
    throw invalid_state_error("density matrix is not Hermitian");
  if (std::abs(m.trace() - std::complex<double>(1.0)) > kTraceTol)
    throw invalid_state_error("density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(m, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kEigenTol)
    throw invalid_state_error("density matrix has eigenvalue " +
                              std::to_string(es.eigenvalues().minCoeff()));
  return TwoPhotonState{m};
}

double TwoPhotonState::purity() const { return (rho * rho).trace().real(); }

std::array<double, 4> BellDiagonalParams::eigenvalues() const {
  // Bell-basis eigenvalues; sign patterns (sx, sy, sz) have sx*sy*sz = -1.
  return {0.25 + mu_x - mu_y + mu_z,  // Phi+
          0.25 - mu_x + mu_y + mu_z,  // Phi-
          0.25 + mu_x + mu_y - mu_z,  // Psi+
          0.25 - mu_x - mu_y - mu_z}; // Psi-
}

bool BellDiagonalParams::positive(double tol) const {
  for (double ev : eigenvalues())
    if (ev < -tol)
      return false;
  return true;
}

AnalyzerConfig::AnalyzerConfig(std::vector<double> angles) : thetas(std::move(angles)) {
  for (double &t : thetas)
    t = reduce_angle(t);
}

AnalyzerConfig::AnalyzerConfig(double theta1, double theta2)
    : AnalyzerConfig(std::vector<double>{theta1, theta2}) {}

Eigen::Vector2d analyzer_vector(double theta) {
  if (!std::isfinite(theta))
    throw std::invalid_argument("analyzer angle is not finite");
  return Eigen::Vector2d(std::cos(theta), std::sin(theta));
}

double detection_probability(const Eigen::MatrixXcd &rho, const AnalyzerConfig &config) {
  const std::size_t n = config.arity();
  const Eigen::Index dim = Eigen::Index(1) << n;
  if (rho.rows() != dim || rho.cols() != dim)
    throw std::invalid_argument("analyzer count does not match state arity");

  Eigen::VectorXcd a = Eigen::VectorXcd::Ones(1);
  for (double theta : config.thetas) {
    const Eigen::Vector2d v = analyzer_vector(theta);
    Eigen::VectorXcd next(a.size() * 2);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      next(2 * i) = a(i) * v(0);
      next(2 * i + 1) = a(i) * v(1);
    }
    a = std::move(next);
  }

  const std::complex<double> val = a.dot(rho * a); // <a| rho |a>
  if (std::abs(val.imag()) >= kImagTol)
    throw corrupted_state_error("detection probability has imaginary part " +
                                std::to_string(val.imag()));
  return std::clamp(val.real(), 0.0, 1.0);
}

double detection_probability(const TwoPhotonState &state, const AnalyzerConfig &config) {
  return detection_probability(Eigen::MatrixXcd(state.rho), config);
}

TwoPhotonState bell_diagonal_state(const BellDiagonalParams &params) {
  const auto evs = params.eigenvalues();
  for (double ev : evs)
    if (ev < -kEigenTol)
      throw invalid_state_error("Bell-diagonal eigenvalue " + std::to_string(ev) +
                                " is negative");

  Eigen::Matrix4cd xx, yy, zz;
  xx << 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0;
  yy << 0, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, -1, 0, 0, 0;
  zz << 1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1;

  Eigen::Matrix4cd rho = 0.25 * Eigen::Matrix4cd::Identity() + params.mu_x * xx +
                         params.mu_y * yy + params.mu_z * zz;
  return TwoPhotonState::from_matrix(rho);
}

double coincidence_probability_bd(const BellDiagonalParams &params, double theta1,
                                  double theta2) {
  if (!params.positive())
    throw invalid_state_error("Bell-diagonal parameters violate positivity");
  return 0.25 + params.mu_x * std::sin(2 * theta1) * std::sin(2 * theta2) +
         params.mu_z * std::cos(2 * theta1) * std::cos(2 * theta2);
}

TwoPhotonState mix(const TwoPhotonState &legit, const TwoPhotonState &intruder, double r) {
  if (!(r >= 0.0 && r <= 1.0))
    throw std::invalid_argument("intercept fraction r must lie in [0,1]");
  return TwoPhotonState{(1.0 - r) * legit.rho + r * intruder.rho};
}

CanonicalStates canonical_states() {
  Eigen::Vector4cd hh = Eigen::Vector4cd::Zero(), vv = Eigen::Vector4cd::Zero();
  hh(0) = 1.0; // |HH>
  vv(3) = 1.0; // |VV>

  const Eigen::Vector4cd p1 = (hh + vv) / std::sqrt(2.0);
  const Eigen::Vector4cd p2 = (hh - vv) / std::sqrt(2.0);

  CanonicalStates s;
  s.psi1 = TwoPhotonState::from_matrix(p1 * p1.adjoint());
  s.psi2 = TwoPhotonState::from_matrix(p2 * p2.adjoint());
  s.omega1 = TwoPhotonState::from_matrix(0.5 * (hh * hh.adjoint() + vv * vv.adjoint()));

  // Diagonal/antidiagonal product kets for omega2.
  Eigen::Vector2cd d, a;
  d << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  a << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  Eigen::Vector4cd dd, aa;
  dd << d(0) * d(0), d(0) * d(1), d(1) * d(0), d(1) * d(1);
  aa << a(0) * a(0), a(0) * a(1), a(1) * a(0), a(1) * a(1);
  s.omega2 = TwoPhotonState::from_matrix(0.5 * (dd * dd.adjoint() + aa * aa.adjoint()));
  return s;
}

Correlations extract_correlations(const TwoPhotonState &state) {
  Eigen::Matrix2cd sx, sy, sz, id;
  sx << 0, 1, 1, 0;
  sy << 0, -kI, kI, 0;
  sz << 1, 0, 0, -1;
  id.setIdentity();

  auto kron = [](const Eigen::Matrix2cd &a, const Eigen::Matrix2cd &b) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
    return out;
  };

  Correlations c;
  c.mu.mu_x = (state.rho * kron(sx, sx)).trace().real() / 4.0;
  c.mu.mu_y = (state.rho * kron(sy, sy)).trace().real() / 4.0;
  c.mu.mu_z = (state.rho * kron(sz, sz)).trace().real() / 4.0;

  const Eigen::Matrix2cd paulis[3] = {sx, sy, sz};
  double first = 0.0, second = 0.0;
  for (const auto &p : paulis) {
    const double bf = (state.rho * kron(p, id)).trace().real();
    const double bs = (state.rho * kron(id, p)).trace().real();
    first += bf * bf;
    second += bs * bs;
  }
  c.residual_first = std::sqrt(first);
  c.residual_second = std::sqrt(second);
  return c;
}

} // namespace gisec
