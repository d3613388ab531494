#include <gisec/worstcase.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace gisec {

namespace {

double vis(double a, double b) {
  const double sum = a + b;
  return sum == 0.0 ? 0.0 : std::abs(a - b) / sum;
}

// Bell-diagonal lattice clipped to the positivity tetrahedron.  The
// coincidence probability depends only on (mu_x, mu_z), so lattice points
// sharing those coordinates are merged; the first representative in
// lexicographic (ix, iy, iz) index order is kept for reporting.
std::vector<BellDiagonalParams> build_lattice(int mu_points) {
  std::vector<BellDiagonalParams> points;
  std::vector<char> seen(std::size_t(mu_points) * mu_points, 0);
  auto coord = [mu_points](int i) { return -0.25 + 0.5 * i / (mu_points - 1); };
  for (int ix = 0; ix < mu_points; ++ix)
    for (int iy = 0; iy < mu_points; ++iy)
      for (int iz = 0; iz < mu_points; ++iz) {
        const BellDiagonalParams mu{coord(ix), coord(iy), coord(iz)};
        if (!mu.positive())
          continue;
        char &flag = seen[std::size_t(ix) * mu_points + iz];
        if (flag)
          continue;
        flag = 1;
        points.push_back(mu);
      }
  return points;
}

// Inner minimization at fixed analyzer angles.
struct InnerHit {
  bool feasible{false};
  double drop{0.0}; ///< smallest visibility drop over admissible intruders
  double level{0.0};
  int point{-1}; ///< lattice representative index
  double r{0.0};
};

struct PairGeometry {
  const TwoPhotonState *rho1;
  const TwoPhotonState *rho2;
  const std::vector<BellDiagonalParams> *lattice;
  std::vector<double> rs;
  std::optional<double> target;
  double band{0.01};
};

InnerHit inner_min(const PairGeometry &geo, double theta1, double theta2) {
  const AnalyzerConfig config(theta1, theta2);
  const double p1 = detection_probability(*geo.rho1, config);
  const double p2 = detection_probability(*geo.rho2, config);
  const double v = vis(p1, p2);
  const double s = std::sin(2 * config.thetas[0]) * std::sin(2 * config.thetas[1]);
  const double c = std::cos(2 * config.thetas[0]) * std::cos(2 * config.thetas[1]);

  InnerHit hit;
  const auto &lattice = *geo.lattice;
  for (std::size_t k = 0; k < lattice.size(); ++k) {
    const double e = std::clamp(0.25 + lattice[k].mu_x * s + lattice[k].mu_z * c, 0.0, 1.0);
    for (double r : geo.rs) {
      const double j1 = (1.0 - r) * p1 + r * e;
      const double j2 = (1.0 - r) * p2 + r * e;
      const double level = std::max(vis(p1, j1), vis(p2, j2));
      if (geo.target && std::abs(level - *geo.target) > geo.band)
        continue;
      // Mixing both arms toward the same coincidence rate never raises the
      // visibility, so the drop is clamped at 0 only to absorb round-off.
      const double drop = std::max(0.0, v - vis(j1, j2));
      if (!hit.feasible || drop < hit.drop) {
        hit.feasible = true;
        hit.drop = drop;
        hit.level = level;
        hit.point = int(k);
        hit.r = r;
      }
    }
  }
  return hit;
}

// Nelder-Mead ascent of the inner minimum over the analyzer angles.
struct Vertex {
  double t1, t2, value; ///< value = -drop (minimized); infeasible = +inf
};

double refine_objective(const PairGeometry &geo, double t1, double t2) {
  const InnerHit hit = inner_min(geo, t1, t2);
  return hit.feasible ? -hit.drop : std::numeric_limits<double>::infinity();
}

void nelder_mead(const PairGeometry &geo, const SearchSettings &search, double &t1,
                 double &t2) {
  const double h = 0.5 * M_PI / search.theta_points;
  std::array<Vertex, 3> sx{Vertex{t1, t2, refine_objective(geo, t1, t2)},
                           Vertex{t1 + h, t2, refine_objective(geo, t1 + h, t2)},
                           Vertex{t1, t2 + h, refine_objective(geo, t1, t2 + h)}};
  auto order = [&sx] {
    std::sort(sx.begin(), sx.end(),
              [](const Vertex &a, const Vertex &b) { return a.value < b.value; });
  };
  order();

  for (int it = 0; it < search.max_refine_iter; ++it) {
    if (std::isfinite(sx[2].value) && sx[2].value - sx[0].value <= search.refine_tol)
      break;
    const double c1 = 0.5 * (sx[0].t1 + sx[1].t1);
    const double c2 = 0.5 * (sx[0].t2 + sx[1].t2);

    Vertex refl{c1 + (c1 - sx[2].t1), c2 + (c2 - sx[2].t2), 0.0};
    refl.value = refine_objective(geo, refl.t1, refl.t2);
    if (refl.value < sx[0].value) {
      Vertex expand{c1 + 2 * (c1 - sx[2].t1), c2 + 2 * (c2 - sx[2].t2), 0.0};
      expand.value = refine_objective(geo, expand.t1, expand.t2);
      sx[2] = expand.value < refl.value ? expand : refl;
    } else if (refl.value < sx[1].value) {
      sx[2] = refl;
    } else {
      Vertex contr{c1 + 0.5 * (sx[2].t1 - c1), c2 + 0.5 * (sx[2].t2 - c2), 0.0};
      contr.value = refine_objective(geo, contr.t1, contr.t2);
      if (contr.value < sx[2].value) {
        sx[2] = contr;
      } else {
        for (int i = 1; i < 3; ++i) {
          sx[i].t1 = sx[0].t1 + 0.5 * (sx[i].t1 - sx[0].t1);
          sx[i].t2 = sx[0].t2 + 0.5 * (sx[i].t2 - sx[0].t2);
          sx[i].value = refine_objective(geo, sx[i].t1, sx[i].t2);
        }
      }
    }
    order();
  }
  t1 = sx[0].t1;
  t2 = sx[0].t2;
}

} // namespace

void SearchSettings::validate() const {
  if (mu_points < 8 || r_points < 8 || theta_points < 8)
    throw std::invalid_argument("search grid needs at least 8 points per axis");
  if (!(level_band > 0.0))
    throw std::invalid_argument("level band must be positive");
  if (!(refine_tol > 0.0))
    throw std::invalid_argument("refinement tolerance must be positive");
  if (max_refine_iter < 0 || threads < 0)
    throw std::invalid_argument("iteration cap and thread count must be nonnegative");
}

WorstCaseResult worst_case_d(const TwoPhotonState &rho1, const TwoPhotonState &rho2,
                             std::optional<double> target_level, const NoiseModel &noise,
                             const SearchSettings &search) {
  search.validate();
  noise.validate();
  if (target_level && !(*target_level >= 0.0 && *target_level <= 1.0))
    throw std::invalid_argument("target jamming level must lie in [0,1]");

  const std::vector<BellDiagonalParams> lattice = build_lattice(search.mu_points);
  PairGeometry geo;
  geo.rho1 = &rho1;
  geo.rho2 = &rho2;
  geo.lattice = &lattice;
  geo.rs.resize(search.r_points);
  for (int i = 0; i < search.r_points; ++i)
    geo.rs[i] = double(i) / (search.r_points - 1);
  geo.target = target_level;
  geo.band = search.level_band;

  // Outer stage: exhaustive theta grid, parallel over rows.  Every cell value
  // is a pure function of its indices and the reduction below is sequential,
  // so the outcome is identical for any thread count.
  const int n = search.theta_points;
  std::vector<InnerHit> cells(std::size_t(n) * n);
  auto theta_at = [n](int i) { return M_PI * i / n; };

  unsigned hw = std::thread::hardware_concurrency();
  int nthreads = search.threads > 0 ? search.threads : int(hw ? hw : 1);
  nthreads = std::min(nthreads, n);
  std::atomic<int> next_row{0};
  auto worker = [&] {
    for (int i = next_row.fetch_add(1); i < n; i = next_row.fetch_add(1))
      for (int j = 0; j < n; ++j)
        cells[std::size_t(i) * n + j] = inner_min(geo, theta_at(i), theta_at(j));
  };
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t)
      pool.emplace_back(worker);
    for (auto &th : pool)
      th.join();
  }

  int best_i = -1, best_j = -1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const InnerHit &hit = cells[std::size_t(i) * n + j];
      if (!hit.feasible)
        continue;
      if (best_i < 0 || hit.drop > cells[std::size_t(best_i) * n + best_j].drop) {
        best_i = i;
        best_j = j;
      }
    }
  if (best_i < 0)
    throw infeasible_level_error("no intruder scenario reaches the requested jamming level");

  double t1 = theta_at(best_i), t2 = theta_at(best_j);
  if (search.max_refine_iter > 0)
    nelder_mead(geo, search, t1, t2);

  const AnalyzerConfig final_config(t1, t2);
  t1 = final_config.thetas[0];
  t2 = final_config.thetas[1];
  InnerHit hit = inner_min(geo, t1, t2);
  const InnerHit &grid_hit = cells[std::size_t(best_i) * n + best_j];
  if (!hit.feasible || hit.drop < grid_hit.drop) {
    // Refinement may not leave the grid optimum; fall back if it drifted.
    t1 = theta_at(best_i);
    t2 = theta_at(best_j);
    hit = grid_hit;
  }

  WorstCaseResult result;
  result.d = std::sqrt(double(noise.trials)) * hit.drop / noise.sigma;
  result.theta1 = t1;
  result.theta2 = t2;
  result.intruder_mu = lattice[std::size_t(hit.point)];
  result.intruder_r = hit.r;
  result.achieved_level = hit.level;
  return result;
}

std::vector<CurvePoint> detection_curve(const TwoPhotonState &rho1,
                                        const TwoPhotonState &rho2,
                                        const std::vector<double> &levels,
                                        const NoiseModel &noise,
                                        const SearchSettings &search) {
  if (!std::is_sorted(levels.begin(), levels.end()))
    throw std::invalid_argument("levels must be sorted ascending");
  for (double level : levels)
    if (!(level >= 0.0 && level <= 1.0))
      throw std::invalid_argument("levels must lie in [0,1]");

  const TestParams params; // lambda = 1
  std::vector<CurvePoint> curve;
  curve.reserve(levels.size());
  for (double level : levels) {
    CurvePoint point;
    point.level = level;
    try {
      const WorstCaseResult res = worst_case_d(rho1, rho2, level, noise, search);
      point.feasible = true;
      point.d = res.d;
      point.p_detect = detection_probability(res.d, params);
      point.p_false_alarm = false_alarm_probability(res.d, params);
    } catch (const infeasible_level_error &) {
      point.feasible = false;
    }
    curve.push_back(point);
  }
  return curve;
}

} // namespace gisec
