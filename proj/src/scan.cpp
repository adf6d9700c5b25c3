#include "dirboot/scan.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include "dirboot/error.hpp"

namespace dirboot {

std::vector<double> Axis::values() const {
  if (steps == 0) throw ModelError("axis '" + name + "' needs at least one step");
  if (steps > 1 && !(lo < hi)) throw ModelError("axis '" + name + "' needs lo < hi");
  std::vector<double> out(steps);
  for (std::size_t i = 0; i < steps; ++i)
    out[i] = steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  return out;
}

namespace {

// Static contiguous partition; results are written by index so the
// outcome does not depend on the thread count.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const std::size_t chunk = (n + threads - 1) / threads;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = t * chunk; i < std::min(n, (t + 1) * chunk); ++i) fn(i);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::size_t closure_degree(const EnsembleSpec& spec, const ParamValues& couplings, std::size_t basis_len) {
  ParamValues values = spec.params;
  for (const auto& [k, v] : couplings) values[k] = v;
  const std::size_t d = build_action(spec).degree(values);
  return std::max(2 * basis_len, d);
}

}  // namespace

PointEvaluator::PointEvaluator(const EnsembleSpec& spec, const ParamValues& couplings, const ScanOptions& options)
    : options_(options) {
  if (options.level < 1 && !options.basis) throw ModelError("positivity level must be at least 1");
  basis_ = options.basis ? *options.basis : enumerate_words(spec.alphabet_size, options.level);
  std::size_t len = 0;
  for (const auto& w : basis_) len = std::max(len, w.size());
  ClosureOptions co;
  co.max_degree = closure_degree(spec, couplings, len);
  co.impose_symmetry = options.impose_symmetry;
  closure_ = build_closure(spec, couplings, co);
}

PointResult PointEvaluator::evaluate_fixed(const std::map<CyclicWord, double>& assignment) const {
  PointResult r;
  const auto ev = closure_.evaluate(assignment, options_.closure_tol);
  r.closure_ok = ev.consistent;
  r.violation = ev.violation;
  r.psd = psd_check(build_moment_matrix(ev.table, basis_), options_.tol);
  r.min_eigenvalue = r.psd.min_eigenvalue;
  r.feasible = r.closure_ok && r.psd.feasible;
  return r;
}

double PointEvaluator::score(const PointResult& r) const {
  double v = r.min_eigenvalue / std::max(1.0, r.psd.spectral_norm);
  if (!r.closure_ok) v -= r.violation;
  return v;
}

PointResult PointEvaluator::evaluate(const std::map<std::string, double>& assignment) const {
  std::map<CyclicWord, double> a;
  for (const auto& [name, v] : assignment) a[parse_moment_name(name, closure_.alphabet_size())] = v;
  return evaluate(a);
}

PointResult PointEvaluator::evaluate(const std::map<CyclicWord, double>& assignment_in) const {
  std::map<CyclicWord, double> assignment;
  for (const auto& [k, v] : assignment_in) assignment[moment_key(k)] = v;
  std::vector<CyclicWord> extras;
  for (const auto& s : closure_.search_variables())
    if (!assignment.count(s)) extras.push_back(s);
  if (extras.empty()) return evaluate_fixed(assignment);

  const std::size_t k = extras.size();
  std::vector<std::pair<double, double>> box;
  for (const auto& e : extras) {
    const std::string name = moment_name(e, closure_.alphabet_size());
    std::string compact = name;
    compact.erase(std::remove(compact.begin(), compact.end(), '_'), compact.end());
    auto it = options_.brackets.find(name);
    if (it == options_.brackets.end()) it = options_.brackets.find(compact);
    box.push_back(it == options_.brackets.end() ? options_.default_bracket : it->second);
  }

  // Profiling: maximize the smallest eigenvalue over the box. The moment
  // matrix is usually affine in the extra variables, which makes this a
  // concave problem; a central-cut ellipsoid method with the eigenvector
  // subgradient v^T (dM/dx_k) v handles the kinks where eigenvalues cross.
  PointResult best;
  double best_obj = -std::numeric_limits<double>::infinity();
  const auto assign = [&](const std::vector<double>& x) {
    auto a = assignment;
    for (std::size_t i = 0; i < k; ++i) a[extras[i]] = std::clamp(x[i], box[i].first, box[i].second);
    return a;
  };
  const auto keep = [&](const PointResult& r, double obj, const std::vector<double>& x) {
    if (obj > best_obj || best.profiled.empty()) {
      best_obj = obj;
      best = r;
      best.profiled.clear();
      for (std::size_t i = 0; i < k; ++i) best.profiled[extras[i]] = std::clamp(x[i], box[i].first, box[i].second);
    }
  };
  // Objective and a subgradient at x (nullopt when the closure blows up).
  struct Probe {
    PointResult r;
    double obj;
    std::vector<double> grad;
  };
  struct Sample {
    Eigen::MatrixXd m;
    bool closure_ok = true;
    double violation = 0.0;
  };
  const auto sample = [&](const std::vector<double>& x) -> std::optional<Sample> {
    try {
      const auto ev = closure_.evaluate(assign(x), options_.closure_tol);
      Sample s{build_moment_matrix(ev.table, basis_).entries, ev.consistent, ev.violation};
      if (!s.m.allFinite()) return std::nullopt;
      return s;
    } catch (const NumericalError&) {
      return std::nullopt;
    }
  };
  // When the closure is consistent and the matrix affine in the extras,
  // M(x) = A0 + sum x_i A_i is assembled once and the profile is cheap.
  std::vector<double> origin(k);
  for (std::size_t i = 0; i < k; ++i) origin[i] = 0.5 * (box[i].first + box[i].second);
  std::vector<Eigen::MatrixXd> lin;
  Eigen::MatrixXd a0;
  if (const auto s0 = sample(origin); s0 && s0->closure_ok && s0->violation == 0.0) {
    bool affine = true;
    std::vector<double> probe_x = origin;
    for (std::size_t i = 0; i < k && affine; ++i) {
      auto x = origin;
      x[i] = box[i].second;
      const auto si = sample(x);
      if (!si || !si->closure_ok || si->violation != 0.0) {
        affine = false;
        break;
      }
      lin.push_back((si->m - s0->m) / (box[i].second - origin[i]));
      probe_x[i] = box[i].first + (0.3 + 0.1 * static_cast<double>(i % 3)) * (box[i].second - box[i].first);
    }
    if (affine) {
      a0 = s0->m;
      for (std::size_t i = 0; i < k; ++i) a0 -= origin[i] * lin[i];
      Eigen::MatrixXd pred = a0;
      for (std::size_t i = 0; i < k; ++i) pred += probe_x[i] * lin[i];
      const auto sp = sample(probe_x);
      const double tol = 1e-9 * std::max(1.0, pred.norm());
      affine = sp && sp->closure_ok && sp->violation == 0.0 && (sp->m - pred).norm() <= tol;
    }
    if (!affine) lin.clear();
  }
  const bool affine = !lin.empty();

  const auto probe = [&](const std::vector<double>& x) -> std::optional<Probe> {
    Probe p{};
    Eigen::MatrixXd m0;
    if (affine) {
      m0 = a0;
      for (std::size_t i = 0; i < k; ++i) m0 += std::clamp(x[i], box[i].first, box[i].second) * lin[i];
    } else {
      const auto s = sample(x);
      if (!s) return std::nullopt;
      m0 = s->m;
      p.r.closure_ok = s->closure_ok;
      p.r.violation = s->violation;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m0);
    if (es.info() != Eigen::Success) return std::nullopt;
    p.r.psd = psd_check(m0, options_.tol);
    p.r.min_eigenvalue = p.r.psd.min_eigenvalue;
    p.r.feasible = p.r.closure_ok && p.r.psd.feasible;
    p.obj = score(p.r);
    keep(p.r, p.obj, x);
    const Eigen::VectorXd v = es.eigenvectors().col(0);
    const double scale = std::max(1.0, p.r.psd.spectral_norm);
    p.grad.assign(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
      if (affine) {
        p.grad[i] = v.dot(lin[i] * v) / scale;
        continue;
      }
      const double h = 1e-4 * (box[i].second - box[i].first);
      auto xh = x;
      xh[i] = x[i] + h <= box[i].second ? x[i] + h : x[i] - h;
      const double step = xh[i] - x[i];
      const auto s1 = sample(xh);
      if (!s1) continue;
      double g = v.dot((s1->m - m0) * v) / step / scale;
      if (!p.r.closure_ok || !s1->closure_ok) g -= (s1->violation - p.r.violation) / step;
      p.grad[i] = g;
    }
    return p;
  };

  // Coarse grid as a warm start when the dimension is small.
  std::vector<double> center(k);
  for (std::size_t i = 0; i < k; ++i) center[i] = 0.5 * (box[i].first + box[i].second);
  if (k <= 2) {
    const std::size_t g = k == 1 ? 41 : 11;
    std::vector<std::size_t> idx(k, 0);
    double grid_best = -std::numeric_limits<double>::infinity();
    for (;;) {
      std::vector<double> x(k);
      for (std::size_t i = 0; i < k; ++i)
        x[i] = box[i].first + (box[i].second - box[i].first) * static_cast<double>(idx[i]) / static_cast<double>(g - 1);
      try {
        const auto r = evaluate_fixed(assign(x));
        const double obj = score(r);
        keep(r, obj, x);
        if (r.feasible) return best;
        if (obj > grid_best) {
          grid_best = obj;
          center = x;
        }
      } catch (const NumericalError&) {
      }
      std::size_t p = 0;
      while (p < k && ++idx[p] == g) idx[p++] = 0;
      if (p == k) break;
    }
  }

  // Ellipsoid {x : (x-c)^T P^-1 (x-c) <= 1} starting as the ball around the box.
  const double n = static_cast<double>(k);
  Eigen::VectorXd c = Eigen::Map<Eigen::VectorXd>(center.data(), static_cast<Eigen::Index>(k));
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    const double w = box[i].second - box[i].first;
    P(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = n * w * w;
  }
  const std::size_t max_iter = 80 * k * k + 200;
  // Roundoff can leave P indefinite once it is very flat in some
  // directions; restart around the best point seen, a few times.
  std::size_t restarts = 0;
  double restart_obj = best_obj;
  const auto restart = [&]() {
    if (restarts >= 6 || best.profiled.empty() || !(best_obj > restart_obj) ) return false;
    ++restarts;
    restart_obj = best_obj;
    for (std::size_t i = 0; i < k; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      c(ii) = best.profiled.at(extras[i]);
    }
    Eigen::MatrixXd Q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
    for (std::size_t i = 0; i < k; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double w = box[i].second - box[i].first;
      const double r = std::min(w, 4.0 * std::sqrt(std::max(0.0, P(ii, ii))) + 1e-9 * w);
      Q(ii, ii) = n * r * r;
    }
    P = Q;
    return true;
  };
  for (std::size_t iter = 0; iter < max_iter && !best.feasible; ++iter) {
    Eigen::VectorXd g(static_cast<Eigen::Index>(k));  // cut normal: keep g^T (x - c) <= 0
    std::size_t outside = k;
    for (std::size_t i = 0; i < k; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      if (c(ii) < box[i].first || c(ii) > box[i].second) outside = i;
    }
    if (outside < k) {
      g.setZero();
      const auto ii = static_cast<Eigen::Index>(outside);
      g(ii) = c(ii) > box[outside].second ? 1.0 : -1.0;
    } else {
      std::vector<double> x(c.data(), c.data() + k);
      const auto p = probe(x);
      if (!p) break;
      if (p->r.feasible) break;
      for (std::size_t i = 0; i < k; ++i) g(static_cast<Eigen::Index>(i)) = -p->grad[i];
    }
    const double gpg = g.dot(P * g);
    if (!(gpg > 0.0) || !std::isfinite(gpg)) {
      if (restart()) continue;
      break;
    }
    const Eigen::VectorXd pg = P * g / std::sqrt(gpg);
    if (k == 1) {
      // Interval halving.
      c -= 0.5 * pg;
      P *= 0.25;
    } else {
      c -= pg / (n + 1.0);
      P = (n * n / (n * n - 1.0)) * (P - (2.0 / (n + 1.0)) * pg * pg.transpose());
      P = 0.5 * (P + P.transpose()).eval();
    }
    double radius = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      radius = std::max(radius, std::sqrt(std::max(0.0, P(ii, ii))) / (box[i].second - box[i].first));
    }
    if (radius < 1e-12) {
      if (restart()) continue;
      break;
    }
  }
  if (affine && !best.profiled.empty()) {
    // The table and report come from the closure itself, not the model.
    auto a = assignment;
    for (const auto& [key, v] : best.profiled) a[key] = v;
    auto exact = best.profiled;
    try {
      best = evaluate_fixed(a);
    } catch (const NumericalError&) {
    }
    best.profiled = std::move(exact);
  }
  return best;
}

PointResult feasible_point(const EnsembleSpec& spec, const ParamValues& couplings,
                           const std::map<std::string, double>& assignment, const ScanOptions& options) {
  return PointEvaluator(spec, couplings, options).evaluate(assignment);
}

FeasibleInterval feasible_interval(const EnsembleSpec& spec, const ParamValues& couplings, const std::string& variable,
                                   std::pair<double, double> bracket, const ScanOptions& options) {
  return feasible_interval(PointEvaluator(spec, couplings, options), couplings, variable, bracket, options);
}

FeasibleInterval feasible_interval(const PointEvaluator& eval, const ParamValues& couplings,
                                   const std::string& variable, std::pair<double, double> bracket,
                                   const ScanOptions& options) {
  if (!(bracket.first < bracket.second)) throw ModelError("interval bracket needs lo < hi");
  if (options.coarse < 2) throw ModelError("coarse grid needs at least two points");
  FeasibleInterval out;
  out.couplings = couplings;
  out.variable = variable;
  out.level = options.level;
  const CyclicWord key = parse_moment_name(variable, eval.closure().alphabet_size());
  const auto ok = [&](double x) {
    try {
      return eval.evaluate(std::map<CyclicWord, double>{{key, x}}).feasible;
    } catch (const NumericalError&) {
      return false;
    }
  };
  const auto refine = [&](double in, double outside) {
    for (std::size_t d = 0; d < options.depth; ++d) {
      const double mid = 0.5 * (in + outside);
      if (ok(mid)) {
        in = mid;
      } else {
        outside = mid;
      }
    }
    return in;
  };
  const auto score = [&](double x) {
    try {
      return eval.score(eval.evaluate(std::map<CyclicWord, double>{{key, x}}));
    } catch (const NumericalError&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  const std::size_t n = options.coarse;
  std::vector<double> xs(n);
  std::vector<char> feas(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = bracket.first + (bracket.second - bracket.first) * static_cast<double>(i) / static_cast<double>(n - 1);
    feas[i] = ok(xs[i]);
  }
  auto first = std::find(feas.begin(), feas.end(), 1);
  if (first == feas.end()) {
    // A band narrower than the grid spacing: climb the PSD score from the
    // best few grid cells and bisect outward from whatever turns up.
    std::vector<double> sc(n);
    for (std::size_t i = 0; i < n; ++i) sc[i] = score(xs[i]);
    std::vector<std::size_t> peaks;
    for (std::size_t i = 0; i < n; ++i) {
      const bool left = i == 0 || sc[i] >= sc[i - 1];
      const bool right = i == n - 1 || sc[i] >= sc[i + 1];
      if (left && right && std::isfinite(sc[i])) peaks.push_back(i);
    }
    std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return sc[a] > sc[b]; });
    if (peaks.size() > 4) peaks.resize(4);
    for (std::size_t p : peaks) {
      double a = xs[p == 0 ? 0 : p - 1], b = xs[p == n - 1 ? n - 1 : p + 1];
      const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
      double c = b - gr * (b - a), d = a + gr * (b - a);
      double fc = score(c), fd = score(d);
      std::optional<double> seed;
      for (int it = 0; it < 80 && !seed; ++it) {
        if (ok(c)) seed = c;
        else if (ok(d)) seed = d;
        else if (fc >= fd) {
          b = d, d = c, fd = fc;
          c = b - gr * (b - a), fc = score(c);
        } else {
          a = c, c = d, fc = fd;
          d = a + gr * (b - a), fd = score(d);
        }
      }
      if (!seed) continue;
      const double left = xs[p == 0 ? 0 : p - 1], right = xs[p == n - 1 ? n - 1 : p + 1];
      out.empty = false;
      out.lo = ok(left) ? left : refine(*seed, left);
      out.hi = ok(right) ? right : refine(*seed, right);
      return out;
    }
    return out;
  }
  const auto i_lo = static_cast<std::size_t>(first - feas.begin());
  const auto i_hi = n - 1 - static_cast<std::size_t>(std::find(feas.rbegin(), feas.rend(), 1) - feas.rbegin());
  out.empty = false;
  out.lo = i_lo == 0 ? xs[0] : refine(xs[i_lo], xs[i_lo - 1]);
  out.hi = i_hi == n - 1 ? xs[n - 1] : refine(xs[i_hi], xs[i_hi + 1]);
  return out;
}

std::vector<FeasibleInterval> interval_scan(const EnsembleSpec& spec, const ScanConfig& config,
                                            std::pair<double, double> bracket) {
  if (config.variables.size() != 1) throw ModelError("interval scan needs exactly one variable");
  if (config.couplings.size() > 1) throw ModelError("interval scan takes at most one coupling axis");
  std::vector<ParamValues> points;
  std::string cname;
  if (config.couplings.empty()) {
    points.push_back(config.fixed);
  } else {
    cname = config.couplings[0].name;
    for (double v : config.couplings[0].values()) {
      auto p = config.fixed;
      p[cname] = v;
      points.push_back(p);
    }
  }
  std::vector<FeasibleInterval> out(points.size());
  parallel_for(points.size(), config.options.threads, [&](std::size_t i) {
    out[i] = feasible_interval(spec, points[i], config.variables[0].name, bracket, config.options);
    out[i].coupling_name = cname;
  });
  return out;
}

RegionMask region_scan(const EnsembleSpec& spec, const ScanConfig& config) {
  if (config.couplings.size() > 2) throw ModelError("region scan takes at most two coupling axes");
  if (config.variables.empty() || config.variables.size() > 2)
    throw ModelError("region scan needs one or two variable axes");
  RegionMask mask;
  mask.coupling_axes = config.couplings;
  mask.variable_axes = config.variables;

  std::vector<std::pair<std::optional<double>, std::optional<double>>> cpts;
  {
    std::vector<double> a1{0.0}, a2{0.0};
    if (!config.couplings.empty()) a1 = config.couplings[0].values();
    if (config.couplings.size() > 1) a2 = config.couplings[1].values();
    for (double x : a1)
      for (double y : a2)
        cpts.emplace_back(config.couplings.empty() ? std::nullopt : std::optional<double>(x),
                          config.couplings.size() > 1 ? std::optional<double>(y) : std::nullopt);
  }
  std::vector<std::pair<double, std::optional<double>>> vpts;
  for (double x : config.variables[0].values()) {
    if (config.variables.size() == 1) {
      vpts.emplace_back(x, std::nullopt);
    } else {
      for (double y : config.variables[1].values()) vpts.emplace_back(x, y);
    }
  }

  std::vector<std::unique_ptr<PointEvaluator>> evals(cpts.size());
  parallel_for(cpts.size(), config.options.threads, [&](std::size_t i) {
    auto p = config.fixed;
    if (cpts[i].first) p[config.couplings[0].name] = *cpts[i].first;
    if (cpts[i].second) p[config.couplings[1].name] = *cpts[i].second;
    try {
      evals[i] = std::make_unique<PointEvaluator>(spec, p, config.options);
    } catch (const NumericalError&) {
      evals[i] = nullptr;
    }
  });

  const std::size_t alpha = spec.alphabet_size;
  const CyclicWord k1 = parse_moment_name(config.variables[0].name, alpha);
  std::optional<CyclicWord> k2;
  if (config.variables.size() > 1) k2 = parse_moment_name(config.variables[1].name, alpha);

  mask.points.resize(cpts.size() * vpts.size());
  parallel_for(mask.points.size(), config.options.threads, [&](std::size_t n) {
    const std::size_t ci = n / vpts.size();
    const std::size_t vi = n % vpts.size();
    RegionPoint& pt = mask.points[n];
    pt.c1 = cpts[ci].first;
    pt.c2 = cpts[ci].second;
    pt.v1 = vpts[vi].first;
    pt.v2 = vpts[vi].second;
    if (!evals[ci]) {
      pt.closure_ok = false;
      pt.feasible = false;
      pt.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
      return;
    }
    std::map<CyclicWord, double> a{{k1, pt.v1}};
    if (k2) {
      if (*k2 == k1) throw ModelError("region scan variables must differ");
      a[*k2] = *pt.v2;
    }
    try {
      const auto r = evals[ci]->evaluate(a);
      pt.feasible = r.feasible;
      pt.closure_ok = r.closure_ok;
      pt.min_eigenvalue = r.min_eigenvalue;
    } catch (const NumericalError&) {
      pt.feasible = false;
      pt.closure_ok = false;
      pt.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
    }
  });
  for (const auto& p : mask.points)
    if (!p.closure_ok) ++mask.closure_failures;
  return mask;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

std::string intervals_csv(const std::vector<FeasibleInterval>& intervals) {
  std::ostringstream os;
  os << "coupling,lo,hi,lambda,empty\n";
  for (const auto& iv : intervals) {
    std::string c;
    if (!iv.coupling_name.empty()) {
      c = format_number(iv.couplings.at(iv.coupling_name));
    } else if (iv.couplings.size() == 1) {
      c = format_number(iv.couplings.begin()->second);
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    os << c << ',' << format_number(iv.empty ? nan : iv.lo) << ',' << format_number(iv.empty ? nan : iv.hi) << ','
       << iv.level << ',' << (iv.empty ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string region_csv(const RegionMask& mask) {
  std::ostringstream os;
  const bool two = mask.variable_axes.size() > 1;
  os << "c1,c2,v1," << (two ? "v2," : "") << "feasible,min_eig,closure_ok\n";
  for (const auto& p : mask.points) {
    os << (p.c1 ? format_number(*p.c1) : "") << ',' << (p.c2 ? format_number(*p.c2) : "") << ','
       << format_number(p.v1) << ',';
    if (two) os << format_number(*p.v2) << ',';
    os << (p.feasible ? 1 : 0) << ',' << format_number(p.min_eigenvalue) << ',' << (p.closure_ok ? 1 : 0) << '\n';
  }
  return os.str();
}

namespace {
void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ModelError("cannot open '" + path + "' for writing");
  f << body;
  if (!f) throw ModelError("failed writing '" + path + "'");
}
}  // namespace

void export_intervals(const std::vector<FeasibleInterval>& intervals, const std::string& path) {
  write_file(path, intervals_csv(intervals));
}

void export_region(const RegionMask& mask, const std::string& path) { write_file(path, region_csv(mask)); }

}  // namespace dirboot
