#include "dirboot/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>
#include <thread>

#include <Eigen/Dense>

#include "dirboot/error.hpp"
#include "dirboot/scan.hpp"

namespace dirboot {

namespace {

// F'' = log|u|, F(0) = 0
double F(double u) { return u == 0.0 ? 0.0 : 0.5 * u * u * std::log(std::abs(u)) - 0.75 * u * u; }

// (1/delta^2) * double integral of log|x - y| over two cells at offset d
double cell_avg_log(double d, double delta) {
  return (F(d + delta) - 2.0 * F(d) + F(d - delta)) / (delta * delta);
}

double log_weight(const EnergySpec& s) { return (s.vandermonde ? 1.0 : 0.0) + (s.mass == 0.0 ? 0.5 * s.beta2 : 0.0); }

double smooth_kernel(const EnergySpec& s, double x, double y) {
  const double d = x - y, d2 = d * d;
  double k = 2.0 * s.g4 * d2 * d2 + 2.0 * s.g2 * d2 + 0.5 * s.a * x * y;
  if (s.mass != 0.0) k -= 0.25 * s.beta2 * std::log(s.mass * s.mass + d2);
  return k;
}

double smooth_kernel_dx(const EnergySpec& s, double x, double y) {
  const double d = x - y, d2 = d * d;
  double k = 8.0 * s.g4 * d2 * d + 4.0 * s.g2 * d + 0.5 * s.a * y;
  if (s.mass != 0.0) k -= 0.5 * s.beta2 * d / (s.mass * s.mass + d2);
  return k;
}

double potential(const EnergySpec& s, double x) {
  double v = 0.0;
  for (std::size_t k = s.potential.size(); k-- > 0;) v = v * x + s.potential[k];
  return v;
}

double potential_dx(const EnergySpec& s, double x) {
  double v = 0.0;
  for (std::size_t k = s.potential.size(); k-- > 1;) v = v * x + static_cast<double>(k) * s.potential[k];
  return v;
}

struct Problem {
  Eigen::MatrixXd K;  // pair kernel in cell weights
  Eigen::VectorXd V;
  double lip = 1.0;  // Lipschitz constant of the gradient 2Kw + V
};

Problem assemble(const EnergySpec& s, const GridDensity& g) {
  const auto n = static_cast<Eigen::Index>(g.x.size());
  Problem p;
  p.K.resize(n, n);
  p.V.resize(n);
  const double c = log_weight(s);
  // the log part depends on the offset only
  std::vector<double> lg(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) lg[static_cast<std::size_t>(k)] = cell_avg_log(static_cast<double>(k) * g.delta, g.delta);
  auto rows = [&](Eigen::Index r0, Eigen::Index r1) {
    for (Eigen::Index i = r0; i < r1; ++i)
      for (Eigen::Index j = 0; j < n; ++j)
        p.K(i, j) = smooth_kernel(s, g.x[static_cast<std::size_t>(i)], g.x[static_cast<std::size_t>(j)]) -
                    c * lg[static_cast<std::size_t>(std::abs(i - j))];
  };
  const auto threads = static_cast<Eigen::Index>(std::max<std::size_t>(1, s.threads));
  if (threads == 1) {
    rows(0, n);
  } else {
    std::vector<std::thread> pool;
    const Eigen::Index block = (n + threads - 1) / threads;
    for (Eigen::Index t = 0; t < threads; ++t) pool.emplace_back(rows, std::min(n, t * block), std::min(n, (t + 1) * block));
    for (auto& th : pool) th.join();
  }
  for (Eigen::Index i = 0; i < n; ++i) p.V(i) = potential(s, g.x[static_cast<std::size_t>(i)]);
  // power iteration for ||K||
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n).normalized();
  double lam = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd w = p.K * v;
    const double nl = w.norm();
    if (nl == 0.0) break;
    v = w / nl;
    if (std::abs(nl - lam) < 1e-10 * nl) {
      lam = nl;
      break;
    }
    lam = nl;
  }
  p.lip = std::max(1e-12, 2.0 * 1.05 * lam);
  return p;
}

double quad_energy(const Problem& p, const Eigen::VectorXd& w) { return w.dot(p.K * w) + p.V.dot(w); }

// Euclidean projection onto {w >= 0, sum w = 1}.
Eigen::VectorXd project_simplex(const Eigen::VectorXd& y) {
  std::vector<double> u(y.data(), y.data() + y.size());
  std::sort(u.begin(), u.end(), std::greater<>());
  double cum = 0.0, theta = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cum += u[k];
    const double t = (cum - 1.0) / static_cast<double>(k + 1);
    if (u[k] - t > 0.0) theta = t;
  }
  return (y.array() - theta).max(0.0).matrix();
}

double pg_norm(const Problem& p, const Eigen::VectorXd& w) {
  const Eigen::VectorXd g = 2.0 * (p.K * w) + p.V;
  return ((w - project_simplex(w - g / p.lip)) * p.lip).norm();
}

struct Local {
  Eigen::VectorXd w;
  double energy = 0.0;
  double pg = 0.0;
  std::size_t iterations = 0;
  std::vector<double> trace;
};

Local descend(const Problem& p, Eigen::VectorXd w, const EnergySpec& s) {
  Local out;
  double e = quad_energy(p, w);
  out.trace.push_back(e);
  Eigen::VectorXd prev = w;
  double tk = 1.0;
  const double step = 1.0 / p.lip;
  for (std::size_t it = 0; it < s.max_iter; ++it) {
    const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
    Eigen::VectorXd y = w + ((tk - 1.0) / tn) * (w - prev);
    Eigen::VectorXd cand = project_simplex(y - step * (2.0 * (p.K * y) + p.V));
    double ec = quad_energy(p, cand);
    if (ec > e) {
      // momentum overshoot: plain step from w
      tk = 1.0;
      cand = project_simplex(w - step * (2.0 * (p.K * w) + p.V));
      ec = quad_energy(p, cand);
      if (ec > e) break;  // roundoff floor
    } else {
      tk = tn;
    }
    prev = w;
    w = cand;
    e = ec;
    out.trace.push_back(e);
    ++out.iterations;
    if (it % 50 == 0 && pg_norm(p, w) < s.tol) break;
  }
  out.w = w;
  out.energy = e;
  out.pg = pg_norm(p, w);
  return out;
}

// Solve the stationarity system on a guessed support, then fix the guess
// until the KKT conditions hold.
bool polish(const Problem& p, Local& loc) {
  const auto n = loc.w.size();
  const double wmax = loc.w.maxCoeff();
  std::vector<char> in(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) in[static_cast<std::size_t>(i)] = loc.w(i) > 1e-9 * wmax;
  for (int round = 0; round < 200; ++round) {
    std::vector<Eigen::Index> S;
    for (Eigen::Index i = 0; i < n; ++i)
      if (in[static_cast<std::size_t>(i)]) S.push_back(i);
    const auto m = static_cast<Eigen::Index>(S.size());
    if (m == 0) return false;
    Eigen::MatrixXd A(m + 1, m + 1);
    Eigen::VectorXd b(m + 1);
    for (Eigen::Index r = 0; r < m; ++r) {
      for (Eigen::Index c = 0; c < m; ++c) A(r, c) = 2.0 * p.K(S[static_cast<std::size_t>(r)], S[static_cast<std::size_t>(c)]);
      A(r, m) = -1.0;
      A(m, r) = 1.0;
      b(r) = -p.V(S[static_cast<std::size_t>(r)]);
    }
    A(m, m) = 0.0;
    b(m) = 1.0;
    const Eigen::VectorXd sol = A.partialPivLu().solve(b);
    if (!sol.allFinite()) return false;
    // drop negative weights first
    Eigen::Index worst = -1;
    for (Eigen::Index r = 0; r < m; ++r)
      if (sol(r) < 0.0 && (worst < 0 || sol(r) < sol(worst))) worst = r;
    if (worst >= 0) {
      in[static_cast<std::size_t>(S[static_cast<std::size_t>(worst)])] = 0;
      continue;
    }
    Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
    for (Eigen::Index r = 0; r < m; ++r) w(S[static_cast<std::size_t>(r)]) = sol(r);
    const double mu = sol(m);
    const Eigen::VectorXd g = 2.0 * (p.K * w) + p.V;
    const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
    Eigen::Index add = -1;
    for (Eigen::Index i = 0; i < n; ++i)
      if (!in[static_cast<std::size_t>(i)] && g(i) < mu - 1e-12 * scale && (add < 0 || g(i) < g(add))) add = i;
    if (add >= 0) {
      in[static_cast<std::size_t>(add)] = 1;
      continue;
    }
    const double e = quad_energy(p, w);
    if (e > loc.energy + 1e-12 * std::max(1.0, std::abs(loc.energy))) return false;
    loc.w = w;
    loc.energy = e;
    loc.pg = pg_norm(p, w);
    return true;
  }
  return false;
}

GridDensity grid(double L, std::size_t n) {
  GridDensity g;
  g.L = L;
  g.delta = 2.0 * L / static_cast<double>(n);
  g.x.resize(n);
  for (std::size_t i = 0; i < n; ++i) g.x[i] = -L + (static_cast<double>(i) + 0.5) * g.delta;
  g.rho.assign(n, 0.0);
  return g;
}

Eigen::VectorXd weights(const GridDensity& g) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(g.rho.size()));
  for (std::size_t i = 0; i < g.rho.size(); ++i) w(static_cast<Eigen::Index>(i)) = g.rho[i] * g.delta;
  return w;
}

GridDensity from_weights(GridDensity g, const Eigen::VectorXd& w) {
  for (std::size_t i = 0; i < g.rho.size(); ++i) g.rho[i] = w(static_cast<Eigen::Index>(i)) / g.delta;
  return g;
}

// Resample a density onto another grid (linear in the cumulative mass).
Eigen::VectorXd resample(const GridDensity& from, const GridDensity& to) {
  auto cdf = [&](double x) {
    double c = 0.0;
    for (std::size_t i = 0; i < from.x.size(); ++i) {
      const double a = from.x[i] - 0.5 * from.delta, b = from.x[i] + 0.5 * from.delta;
      if (x >= b) c += from.rho[i] * from.delta;
      else if (x > a) c += from.rho[i] * (x - a);
    }
    return c;
  };
  Eigen::VectorXd w(static_cast<Eigen::Index>(to.x.size()));
  for (std::size_t i = 0; i < to.x.size(); ++i)
    w(static_cast<Eigen::Index>(i)) = std::max(0.0, cdf(to.x[i] + 0.5 * to.delta) - cdf(to.x[i] - 0.5 * to.delta));
  return project_simplex(w);
}

std::vector<Eigen::VectorXd> starts(const GridDensity& g, std::size_t count, const std::optional<GridDensity>& init) {
  std::vector<Eigen::VectorXd> out;
  if (init) out.push_back(resample(*init, g));
  const auto n = static_cast<Eigen::Index>(g.x.size());
  auto bumps = [&](std::vector<double> centers, double width) {
    Eigen::VectorXd w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      double v = 0.0;
      for (double c : centers) v += std::exp(-0.5 * std::pow((g.x[static_cast<std::size_t>(i)] - c) / width, 2));
      w(i) = v;
    }
    return Eigen::VectorXd(w / w.sum());
  };
  out.push_back(Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)));
  out.push_back(bumps({0.0}, 0.25 * g.L));
  out.push_back(bumps({-0.5 * g.L, 0.5 * g.L}, 0.15 * g.L));
  out.push_back(bumps({0.0}, 0.05 * g.L));
  out.push_back(bumps({-0.25 * g.L, 0.25 * g.L}, 0.08 * g.L));
  out.resize(std::min(out.size(), std::max<std::size_t>(1, count) + (init ? 1 : 0)));
  return out;
}

MinimizeResult solve_once(const EnergySpec& s, double L, const std::optional<GridDensity>& init) {
  const GridDensity g = grid(L, s.n);
  const Problem p = assemble(s, g);
  Local best;
  bool have = false;
  std::size_t iters = 0;
  for (const auto& w0 : starts(g, s.restarts, init)) {
    Local loc = descend(p, w0, s);
    polish(p, loc);
    iters += loc.iterations;
    if (!have || loc.energy < best.energy) {
      best = std::move(loc);
      have = true;
    }
  }
  MinimizeResult r;
  r.density = from_weights(g, best.w);
  r.energy = best.energy;
  r.pg_norm = best.pg;
  r.iterations = iters;
  r.converged = best.pg < s.tol;
  r.energy_trace = std::move(best.trace);
  return r;
}

}  // namespace

void validate(const EnergySpec& s) {
  if (s.n < 64) throw ModelError("equilibrium grid needs n >= 64");
  if (!(s.L > 0.0) || !std::isfinite(s.L)) throw ModelError("equilibrium half-width L must be positive");
  if (!(s.mass >= 0.0)) throw ModelError("fermion mass must be nonnegative");
  if (!(s.beta2 >= 0.0)) throw ModelError("beta2 must be nonnegative");
  if (!(s.tol > 0.0)) throw ModelError("equilibrium tolerance must be positive");
  if (s.max_iter == 0) throw ModelError("max_iter must be positive");
  for (double c : s.potential)
    if (!std::isfinite(c)) throw ModelError("potential coefficients must be finite");
}

GridDensity GridDensity::uniform(double L, std::size_t n) {
  GridDensity g = grid(L, n);
  std::fill(g.rho.begin(), g.rho.end(), 1.0 / (2.0 * L));
  return g;
}

GridDensity GridDensity::point_mass(double L, std::size_t n, double x0) {
  GridDensity g = grid(L, n);
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (std::abs(g.x[i] - x0) < std::abs(g.x[best] - x0)) best = i;
  g.rho[best] = 1.0 / g.delta;
  return g;
}

double GridDensity::mass() const { return std::accumulate(rho.begin(), rho.end(), 0.0) * delta; }

MinimizeResult minimize_density_nothrow(const EnergySpec& spec, const std::optional<GridDensity>& init) {
  validate(spec);
  double L = init ? init->L : spec.L;
  MinimizeResult r;
  for (std::size_t expand = 0;; ++expand) {
    r = solve_once(spec, L, init);
    r.expansions = expand;
    const auto& rho = r.density.rho;
    const double mx = *std::max_element(rho.begin(), rho.end());
    if (std::max(rho.front(), rho.back()) <= 1e-6 * mx || expand == 8) break;
    L *= 1.5;
  }
  return r;
}

MinimizeResult minimize_density(const EnergySpec& spec, const std::optional<GridDensity>& init) {
  MinimizeResult r = minimize_density_nothrow(spec, init);
  if (!r.converged) {
    std::ostringstream os;
    os << "equilibrium solver did not converge after " << spec.restarts << " restarts; best projected-gradient norm "
       << format_number(r.pg_norm);
    throw NumericalError(os.str());
  }
  return r;
}

double energy(const EnergySpec& spec, const GridDensity& rho) {
  validate(spec);
  const Problem p = assemble(spec, rho);
  return quad_energy(p, weights(rho));
}

PvResidual residual_pv_interior(const EnergySpec& s, const GridDensity& g, std::size_t edge_nodes) {
  PvResidual out;
  const std::size_t n = g.x.size();
  if (n == 0) return out;
  const double mx = *std::max_element(g.rho.begin(), g.rho.end());
  const double c = log_weight(s);
  std::vector<char> on(n);
  for (std::size_t i = 0; i < n; ++i) on[i] = g.rho[i] > 1e-4 * mx;
  std::vector<char> use = on;
  for (std::size_t i = 0; i < n; ++i) {
    if (!on[i]) continue;
    // distance to the nearest off node
    std::size_t lo = 0, hi = 0;
    while (i >= lo + 1 && on[i - lo - 1] && lo < edge_nodes) ++lo;
    while (i + hi + 1 < n && on[i + hi + 1] && hi < edge_nodes) ++hi;
    if (lo < edge_nodes || hi < edge_nodes) use[i] = 0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!use[i]) continue;
    const double x = g.x[i];
    double pv = 0.0, smooth = 0.0;
    // rho linear between nodes: on [x_j, x_j+1] the integral of
    // rho(y)/(x - y) is rho_lin(x) log|(x - x_j)/(x - x_j+1)| - (rho_j+1 - rho_j);
    // the two logs that meet at x_i cancel.
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const double r0 = g.rho[j], r1 = g.rho[j + 1];
      if (r0 == 0.0 && r1 == 0.0) continue;
      pv -= r1 - r0;
      if (j == i || j + 1 == i) continue;
      const double lin = r0 + (r1 - r0) * (x - g.x[j]) / g.delta;
      pv += lin * std::log(std::abs((x - g.x[j]) / (x - g.x[j + 1])));
    }
    for (std::size_t j = 0; j < n; ++j)
      if (g.rho[j] != 0.0) smooth += smooth_kernel_dx(s, x, g.x[j]) * g.rho[j] * g.delta;
    const double r = c * pv - smooth - 0.5 * potential_dx(s, x);
    out.max_abs = std::max(out.max_abs, std::abs(r));
    out.scale = std::max(out.scale, std::abs(c * pv));
    ++out.nodes;
  }
  return out;
}

PvResidual residual_pv(const EnergySpec& spec, const GridDensity& rho) {
  PvResidual r = residual_pv_interior(spec, rho, 3);
  if (r.nodes == 0) {
    // support too narrow for an interior: report the raw support value, flagged
    r = residual_pv_interior(spec, rho, 0);
    r.flagged = true;
  }
  return r;
}

std::vector<std::pair<double, double>> support_structure(const GridDensity& g, double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw ModelError("support threshold must lie in (0, 1)");
  const double mx = g.rho.empty() ? 0.0 : *std::max_element(g.rho.begin(), g.rho.end());
  if (!(mx > 0.0)) throw NumericalError("support of an all-zero density");
  const std::size_t n = g.x.size();
  std::vector<char> on(n);
  for (std::size_t i = 0; i < n; ++i) on[i] = g.rho[i] >= threshold * mx;
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (!on[i] && on[i - 1] && on[i + 1]) on[i] = 1;
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < n;) {
    if (!on[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && on[j + 1]) ++j;
    out.emplace_back(g.x[i] - 0.5 * g.delta, g.x[j] + 0.5 * g.delta);
    i = j + 1;
  }
  return out;
}

double moments_from_density(const GridDensity& g, int k) {
  if (k < 0) throw ModelError("moment order must be nonnegative");
  double s = 0.0;
  for (std::size_t i = 0; i < g.x.size(); ++i) s += std::pow(g.x[i], k) * g.rho[i] * g.delta;
  return s;
}

std::vector<double> log_grid(double t_min, double t_max, std::size_t steps) {
  if (!(t_min > 0.0) || !(t_max > t_min) || steps < 2) throw ModelError("t grid needs 0 < t_min < t_max and steps >= 2");
  std::vector<double> t(steps);
  for (std::size_t i = 0; i < steps; ++i)
    t[i] = t_min * std::pow(t_max / t_min, static_cast<double>(i) / static_cast<double>(steps - 1));
  return t;
}

SpectralCurves spectral_estimators(const GridDensity& g, double mass, const std::vector<double>& t) {
  for (std::size_t i = 0; i < t.size(); ++i)
    if (!(t[i] > 0.0) || (i > 0 && !(t[i] > t[i - 1]))) throw ModelError("t grid must be positive and increasing");
  const std::size_t n = g.x.size();
  // autocorrelation of the cell weights: f_k = sum_i w_i w_{i+k}
  std::vector<double> f(n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i + k < n; ++i) f[k] += g.rho[i] * g.rho[i + k];
  const double d2w = g.delta * g.delta;
  for (auto& v : f) v *= d2w;
  const double m2 = mass * mass;
  SpectralCurves c;
  c.t = t;
  for (double tt : t) {
    // offsets +-k counted twice; k = 0 carries the largest exponent, 0
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (f[k] == 0.0) continue;
      const double lam = static_cast<double>(k * k) * g.delta * g.delta;
      const double e = f[k] * std::exp(-tt * lam) * (k == 0 ? 1.0 : 2.0);
      s0 += e;
      s1 += e * lam;
      s2 += e * lam * lam;
    }
    const double mean = s1 / s0;
    const double var = std::max(0.0, s2 / s0 - mean * mean);
    const double K = std::exp(-tt * m2) * s0;
    if (!(K > 0.0) && !c.cutoff) c.cutoff = tt;
    c.K.push_back(K);
    c.ds.push_back(2.0 * tt * (m2 + mean));
    c.vs.push_back(2.0 * tt * tt * var);
  }
  return c;
}

std::vector<PhasePoint> phase_sweep(const EnergySpec& base, const std::vector<std::array<double, 3>>& points,
                                    double threshold, std::size_t threads) {
  std::vector<PhasePoint> out(points.size());
  std::vector<std::exception_ptr> errors(points.size());
  threads = std::max<std::size_t>(1, std::min(threads, points.size()));
  auto work = [&](std::size_t t) {
    for (std::size_t i = t; i < points.size(); i += threads) {
      try {
        EnergySpec s = base;
        s.g2 = points[i][0];
        s.g4 = points[i][1];
        s.mass = points[i][2];
        s.threads = 1;
        const MinimizeResult r = minimize_density_nothrow(s);
        PhasePoint& pp = out[i];
        pp.g2 = s.g2;
        pp.g4 = s.g4;
        pp.mass = s.mass;
        pp.cuts = support_structure(r.density, threshold).size();
        pp.m2 = moments_from_density(r.density, 2);
        pp.energy = r.energy;
        pp.converged = r.converged;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t);
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::string density_csv(const GridDensity& g) {
  std::ostringstream os;
  os << "x,rho\n";
  for (std::size_t i = 0; i < g.x.size(); ++i) os << format_number(g.x[i]) << ',' << format_number(g.rho[i]) << '\n';
  return os.str();
}

std::string curves_csv(const SpectralCurves& c) {
  std::ostringstream os;
  os << "t,K,ds,vs\n";
  for (std::size_t i = 0; i < c.t.size(); ++i)
    os << format_number(c.t[i]) << ',' << format_number(c.K[i]) << ',' << format_number(c.ds[i]) << ','
       << format_number(c.vs[i]) << '\n';
  return os.str();
}

std::string phase_csv(const std::vector<PhasePoint>& points) {
  std::ostringstream os;
  os << "g2,g4,m,cuts,m2,energy\n";
  for (const auto& p : points)
    os << format_number(p.g2) << ',' << format_number(p.g4) << ',' << format_number(p.mass) << ',' << p.cuts << ','
       << format_number(p.m2) << ',' << format_number(p.energy) << '\n';
  return os.str();
}

}  // namespace dirboot
