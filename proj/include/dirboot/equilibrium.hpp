#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dirboot {

// Pairwise energy for a difference-kernel eigenvalue gas:
//   K(x, y) = 2 g4 d^4 + 2 g2 d^2 + (a/2) x y - (beta2/4) log(m^2 + d^2)
//             - log|d| [vandermonde],      d = x - y,
// plus an optional one-body potential sum_k c_k x^k. beta2 = 2 is the
// fermionic weight; beta2 = 0 switches it off.
struct EnergySpec {
  double g2 = 0.0;
  double g4 = 0.0;
  double mass = 0.0;
  double a = 1.0;
  double beta2 = 2.0;
  bool vandermonde = true;
  std::vector<double> potential;  // c_0, c_1, ... ; empty for none
  double L = 3.0;                 // half-width of [-L, L]
  std::size_t n = 512;
  std::size_t restarts = 4;
  std::size_t max_iter = 20000;
  double tol = 1e-8;  // projected-gradient norm
  std::size_t threads = 1;
};

// Throws ModelError on n < 64, L <= 0 or other bad fields.
void validate(const EnergySpec& spec);

struct GridDensity {
  std::vector<double> x;    // cell centers
  std::vector<double> rho;  // density values, sum rho * delta = 1
  double delta = 0.0;
  double L = 0.0;

  static GridDensity uniform(double L, std::size_t n);
  // All mass on the node nearest to x0.
  static GridDensity point_mass(double L, std::size_t n, double x0);
  double mass() const;
};

struct MinimizeResult {
  GridDensity density;
  double energy = 0.0;
  double pg_norm = 0.0;
  std::size_t iterations = 0;
  std::size_t expansions = 0;  // times L was enlarged
  bool converged = false;
  std::vector<double> energy_trace;  // accepted projected-gradient iterates, best restart
};

// Projected gradient (accelerated, restarted on any energy increase) over
// the simplex of cell weights, then an active-set polish of the support.
// Throws NumericalError if no restart reaches tol; the message carries the
// best projected-gradient norm.
MinimizeResult minimize_density(const EnergySpec& spec, const std::optional<GridDensity>& init = std::nullopt);
// Same, without throwing on non-convergence.
MinimizeResult minimize_density_nothrow(const EnergySpec& spec, const std::optional<GridDensity>& init = std::nullopt);

double energy(const EnergySpec& spec, const GridDensity& rho);

struct PvResidual {
  double max_abs = 0.0;  // over support nodes, rho > 1e-4 max
  double scale = 0.0;    // max |PV term| over the same nodes
  std::size_t nodes = 0;
  bool flagged = false;  // no interior nodes; value taken over the raw support
  double relative() const { return scale > 0.0 ? max_abs / scale : max_abs; }
};

// Stationarity of the energy written as the singular equation
//   c PV int rho(y)/(x - y) dy = int d/dx K_smooth(x, y) rho(y) dy + V'(x)/2
// with c the total log|d| weight. The PV integral is exact for the
// piecewise-linear interpolant of the node values. Taken over support nodes
// at least 3 nodes away from a support edge: the square-root edges are not
// resolved by the grid and would dominate the maximum.
PvResidual residual_pv(const EnergySpec& spec, const GridDensity& rho);

// Same with an explicit edge margin (0 = every support node).
PvResidual residual_pv_interior(const EnergySpec& spec, const GridDensity& rho, std::size_t edge_nodes);

// Maximal runs with rho >= threshold * max rho, merged across single-node gaps.
std::vector<std::pair<double, double>> support_structure(const GridDensity& rho, double threshold);

double moments_from_density(const GridDensity& rho, int k);

struct SpectralCurves {
  std::vector<double> t;
  std::vector<double> K;
  std::vector<double> ds;
  std::vector<double> vs;
  std::optional<double> cutoff;  // first t where K underflows, if any
};

// Heat-kernel estimators for the spectrum of D^2 = m^2 + (l_i - l_j)^2,
// normalized so that K(0+) = 1.
SpectralCurves spectral_estimators(const GridDensity& rho, double mass, const std::vector<double>& t);
std::vector<double> log_grid(double t_min, double t_max, std::size_t steps);

struct PhasePoint {
  double g2 = 0.0, g4 = 0.0, mass = 0.0;
  std::size_t cuts = 0;
  double m2 = 0.0;
  double energy = 0.0;
  bool converged = false;
};

// base supplies everything but (g2, g4, m); points run concurrently.
std::vector<PhasePoint> phase_sweep(const EnergySpec& base, const std::vector<std::array<double, 3>>& points,
                                    double threshold, std::size_t threads);

std::string density_csv(const GridDensity& rho);
std::string curves_csv(const SpectralCurves& c);
std::string phase_csv(const std::vector<PhasePoint>& points);

}  // namespace dirboot
