#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dirboot/closure.hpp"
#include "dirboot/config.hpp"
#include "dirboot/dirac.hpp"
#include "dirboot/equilibrium.hpp"
#include "dirboot/error.hpp"
#include "dirboot/loop_eqs.hpp"
#include "dirboot/mc.hpp"
#include "dirboot/moments.hpp"
#include "dirboot/positivity.hpp"
#include "dirboot/scan.hpp"

using namespace dirboot;

namespace {

struct Common {
  std::string model;
  std::optional<std::size_t> lambda;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::size_t> threads;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--model", c.model, "JSON config with a model block");
  sub->add_option("--lambda", c.lambda, "positivity level (longest basis word)");
  sub->add_option("--tol", c.tol, "PSD tolerance, relative to the spectral norm");
  sub->add_option("--seed", c.seed, "RNG seed");
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--threads", c.threads, "worker threads");
}

RunConfig load(const Common& c, bool need_model) {
  RunConfig rc;
  if (!c.model.empty()) rc = load_config(c.model);
  if (need_model && !rc.model) throw ModelError("this command needs --model with a model block");
  if (c.lambda) {
    if (*c.lambda < 1) throw ModelError("--lambda must be at least 1");
    rc.scan.options.level = *c.lambda;
  }
  if (c.tol) {
    if (!(*c.tol >= 0.0)) throw ModelError("--tol must be nonnegative");
    rc.scan.options.tol = *c.tol;
  }
  if (c.seed) rc.seed = c.seed;
  if (rc.seed) rc.mc.chain.seed = *rc.seed;
  if (c.out) rc.out_dir = *c.out;
  std::size_t threads = rc.threads.value_or(1);
  if (const char* env = std::getenv("DIRBOOT_THREADS")) {
    try {
      threads = std::stoul(env);
    } catch (const std::exception&) {
      throw ModelError("DIRBOOT_THREADS must be a positive integer");
    }
  }
  if (c.threads) threads = *c.threads;
  if (threads < 1) throw ModelError("thread count must be at least 1");
  rc.threads = threads;
  rc.scan.options.threads = threads;
  rc.equilibrium.energy.threads = threads;
  return rc;
}

void write_file(const RunConfig& rc, const std::string& name, const std::string& body) {
  std::filesystem::create_directories(rc.out_dir);
  const auto path = std::filesystem::path(rc.out_dir) / name;
  std::ofstream f(path);
  if (!f) throw ModelError("cannot write " + path.string());
  f << body;
  std::cerr << "wrote " << path.string() << "\n";
}

ParamValues coupling_values(const RunConfig& rc) {
  ParamValues v = rc.model->spec.params;
  for (const auto& [k, x] : rc.scan.fixed) v[k] = x;
  return v;
}

Closure closure_for(const RunConfig& rc) {
  const auto& spec = rc.model->spec;
  ClosureOptions co;
  co.impose_symmetry = rc.model->impose_symmetry;
  const ParamValues v = coupling_values(rc);
  co.max_degree = std::max(2 * rc.scan.options.level, build_action(spec).degree(v));
  return build_closure(spec, v, co);
}

// --- subcommands ----------------------------------------------------------

int cmd_expand(const Common& c, const std::string& sig_text, int k) {
  Signature sig;
  if (!sig_text.empty()) {
    sig = parse_signature(sig_text);
  } else {
    const RunConfig rc = load(c, true);
    if (!rc.model->spec.signature) throw ModelError("expand needs a Dirac signature");
    sig = *rc.model->spec.signature;
  }
  if (!is_supported(sig)) throw ModelError("unsupported signature " + to_string(sig));
  if (k < 1) throw ModelError("--k must be at least 1");
  std::cout << "Tr D^" << k << " [" << to_string(sig) << "] = " << expand_dirac_power(sig, k).to_string() << "\n";
  return 0;
}

int cmd_sde(const Common& c, int l) {
  const RunConfig rc = load(c, true);
  if (l < 0) throw ModelError("--l must be nonnegative");
  const auto& spec = rc.model->spec;
  std::vector<SymmetryAction> group;
  if (rc.model->impose_symmetry) group = generate_group(spec.symmetries, spec.alphabet_size);
  const auto action = build_action(spec);
  for (const auto& w : enumerate_words(spec.alphabet_size, static_cast<std::size_t>(l))) {
    if (w.size() != static_cast<std::size_t>(l)) continue;
    for (std::size_t i = 0; i < spec.alphabet_size; ++i) {
      const auto rel = generate_sde(action, w, static_cast<Letter>(i), group);
      // one matrix: the word is H^l, no label needed
      if (spec.alphabet_size > 1)
        std::cout << "W=" << (w.empty() ? std::string("1") : to_string(w, spec.alphabet_size)) << " d/d"
                  << letter_name(static_cast<Letter>(i), spec.alphabet_size) << ": ";
      std::cout << rel.to_string() << "\n";
    }
  }
  return 0;
}

int cmd_closure(const Common& c) {
  const RunConfig rc = load(c, true);
  const Closure cl = closure_for(rc);
  const std::size_t a = cl.alphabet_size();
  std::cout << "max degree " << cl.max_degree() << "\nsearch variables:";
  for (const auto& s : cl.search_variables()) std::cout << " " << moment_name(s, a);
  std::cout << "\n";
  if (!cl.forced_zero().empty()) {
    std::cout << "forced zero:";
    for (const auto& s : cl.forced_zero()) std::cout << " " << moment_name(s, a);
    std::cout << "\n";
  }
  for (const auto& [k, e] : cl.recipes()) std::cout << moment_name(k, a) << " = " << e << "\n";
  for (const auto& s : cl.constraint_strings()) std::cout << "constraint: 0 = " << s << "\n";
  for (const auto& w : cl.warnings()) std::cout << "note: " << w << "\n";
  return 0;
}

int cmd_interval(const Common& c, std::string var, std::optional<double> lo, std::optional<double> hi) {
  RunConfig rc = load(c, true);
  if (var.empty()) {
    if (rc.scan.variables.empty()) throw ModelError("interval needs --var or a scan variable");
    var = rc.scan.variables[0].name;
  }
  std::pair<double, double> bracket = rc.scan.options.default_bracket;
  for (const auto& ax : rc.scan.variables)
    if (ax.name == var && ax.lo < ax.hi) bracket = {ax.lo, ax.hi};
  if (lo) bracket.first = *lo;
  if (hi) bracket.second = *hi;
  ScanConfig sc = rc.scan;
  sc.variables = {Axis{var, bracket.first, bracket.second, 1}};
  const auto ivs = interval_scan(rc.model->spec, sc, bracket);
  const std::string csv = intervals_csv(ivs);
  std::cout << csv;
  write_file(rc, "intervals.csv", csv);
  return 0;
}

int cmd_region(const Common& c) {
  const RunConfig rc = load(c, true);
  if (rc.scan.variables.empty()) throw ModelError("/scan/variables: region needs at least one variable axis");
  const auto mask = region_scan(rc.model->spec, rc.scan);
  const std::string csv = region_csv(mask);
  write_file(rc, "region.csv", csv);
  std::size_t feasible = 0;
  for (const auto& p : mask.points) feasible += p.feasible;
  std::cout << mask.points.size() << " points, " << feasible << " feasible, " << mask.closure_failures
            << " closure failures\n";
  return 0;
}

int cmd_mc(const Common& c) {
  const RunConfig rc = load(c, true);
  const auto& spec = rc.model->spec;
  std::vector<CyclicWord> words;
  for (const auto& name : rc.mc.words) words.push_back(parse_moment_name(name, spec.alphabet_size));
  std::vector<ChainConfig> cfgs;
  for (std::size_t i = 0; i < rc.mc.chains; ++i) {
    ChainConfig cc = rc.mc.chain;
    cc.seed = rc.mc.chain.seed + i;
    cfgs.push_back(cc);
  }
  const auto chains = run_chains(spec, cfgs, words, *rc.threads);
  std::ostringstream os;
  os << "word,mean,stderr,N,steps,seed\n";
  for (const auto& ch : chains) {
    std::vector<Word> ws;
    for (const auto& w : ch.words) ws.push_back(w.word());
    for (const auto& e : estimate_moments(ch, ws))
      os << moment_name(e.word, spec.alphabet_size) << ',' << format_number(e.mean) << ',' << format_number(e.std_error)
         << ',' << ch.config.N << ',' << ch.config.steps << ',' << ch.config.seed << '\n';
  }
  std::cout << os.str();
  write_file(rc, "mc.csv", os.str());
  return 0;
}

MinimizeResult solve_eqm(const RunConfig& rc) {
  const MinimizeResult r = minimize_density(rc.equilibrium.energy);
  const auto res = residual_pv(rc.equilibrium.energy, r.density);
  const auto cuts = support_structure(r.density, rc.equilibrium.threshold);
  std::cerr << "energy " << format_number(r.energy) << ", projected-gradient norm " << format_number(r.pg_norm)
            << ", L " << format_number(r.density.L) << ", cuts " << cuts.size() << ", m2 "
            << format_number(moments_from_density(r.density, 2)) << ", pv residual " << format_number(res.max_abs)
            << " (scale " << format_number(res.scale) << (res.flagged ? ", flagged" : "") << ")\n";
  return r;
}

int cmd_eqm(const Common& c) {
  const RunConfig rc = load(c, false);
  if (!rc.equilibrium.sweep.empty()) {
    const auto pts = phase_sweep(rc.equilibrium.energy, rc.equilibrium.sweep, rc.equilibrium.threshold, *rc.threads);
    const std::string csv = phase_csv(pts);
    std::cout << csv;
    write_file(rc, "phase.csv", csv);
    return 0;
  }
  const MinimizeResult r = solve_eqm(rc);
  const std::string csv = density_csv(r.density);
  write_file(rc, "density.csv", csv);
  for (const auto& [a, b] : support_structure(r.density, rc.equilibrium.threshold))
    std::cout << "support [" << format_number(a) << ", " << format_number(b) << "]\n";
  return 0;
}

int cmd_spectral(const Common& c) {
  const RunConfig rc = load(c, false);
  const MinimizeResult r = solve_eqm(rc);
  const auto t = log_grid(rc.spectral.t_min, rc.spectral.t_max, rc.spectral.steps);
  const auto curves = spectral_estimators(r.density, rc.spectral.mass.value_or(rc.equilibrium.energy.mass), t);
  if (curves.cutoff) std::cerr << "K underflows from t = " << format_number(*curves.cutoff) << "\n";
  const std::string csv = curves_csv(curves);
  std::cout << csv;
  write_file(rc, "density.csv", density_csv(r.density));
  write_file(rc, "curves.csv", csv);
  return 0;
}

// Fast invariant suite.
int cmd_check(const Common& c) {
  (void)load(c, false);
  int failures = 0;
  const auto report = [&](const std::string& name, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    failures += !ok;
  };
  const auto guard = [&](const std::string& name, const std::function<void()>& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      report(name, false, e.what());
    }
  };
  guard("hankel-gaussian", [&] {
    std::vector<Rational> m{1, 0, 1, 0, 3, 0, 15};
    const auto minors = exact_hankel_minors(m);
    const bool ok = minors.size() == 4 && minors[0] == 1 && minors[1] == 1 && minors[2] == 2 && minors[3] == 12;
    std::string d;
    for (const auto& q : minors) d += to_string(q) + " ";
    report("hankel-gaussian", ok, "leading minors " + d);
  });
  guard("catalan", [&] {
    auto spec = make_dirac_spec({1, 0}, {{2, parse_affine("1/4")}, {3, parse_affine("g/6")}});
    ClosureOptions co;
    co.max_degree = 12;
    const auto cl = build_closure(spec, {{"g", 0.0}}, co);
    const auto t = evaluate_moments(cl, {{moment_key(power_word(0, 1)), 0.0}});
    const bool vals = t.m(2) == 1.0 && t.m(4) == 2.0 && t.m(6) == 5.0;
    const auto psd = psd_check(build_moment_matrix(t, 1, 6));
    report("catalan", vals && psd.feasible,
           "m2 m4 m6 = " + format_number(t.m(2)) + " " + format_number(t.m(4)) + " " + format_number(t.m(6)) +
               ", min eig " + format_number(psd.min_eigenvalue));
  });
  guard("rng-reproducible", [&] {
    CounterRng a(7, 3), b(7, 3);
    bool ok = true;
    for (int i = 0; i < 1000; ++i) ok = ok && a.next() == b.next();
    report("rng-reproducible", ok, "1000 draws");
  });
  guard("semicircle", [&] {
    EnergySpec s;
    s.a = 0.0;
    s.beta2 = 0.0;
    s.potential = {0.0, 0.0, 0.5};
    s.n = 128;
    s.restarts = 1;
    const auto r = minimize_density(s);
    const double m2 = moments_from_density(r.density, 2);
    report("semicircle", std::abs(m2 - 1.0) < 1e-2, "m2 " + format_number(m2));
  });
  guard("spectral-delta", [&] {
    const auto g = GridDensity::point_mass(1.0, 64, 0.0);
    const auto cv = spectral_estimators(g, 1.0, {0.5});
    report("spectral-delta", std::abs(cv.ds[0] - 1.0) < 1e-6, "d_s(0.5) " + format_number(cv.ds[0]));
  });
  return failures ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dirboot: bootstrap, Monte Carlo and equilibrium tools for Dirac ensembles"};
  app.require_subcommand(1);
  Common common;
  std::string sig;
  int k = 4, l = 0;
  std::string var;
  std::optional<double> lo, hi;

  auto* expand = app.add_subcommand("expand", "print the multitrace expansion of Tr D^k");
  add_common(expand, common);
  expand->add_option("--sig", sig, "signature p,q");
  expand->add_option("--k", k, "power of D");
  auto* sde = app.add_subcommand("sde", "print large-N loop equations for words of length l");
  add_common(sde, common);
  sde->add_option("--l", l, "word length");
  auto* clo = app.add_subcommand("closure", "print search variables and moment recipes");
  add_common(clo, common);
  auto* iv = app.add_subcommand("interval", "feasible interval of one moment per coupling value");
  add_common(iv, common);
  iv->add_option("--var", var, "moment name, e.g. m2 or m_AA");
  iv->add_option("--lo", lo, "bracket low end");
  iv->add_option("--hi", hi, "bracket high end");
  auto* reg = app.add_subcommand("region", "feasibility mask over a grid");
  add_common(reg, common);
  auto* mc = app.add_subcommand("mc", "Metropolis estimates of moments");
  add_common(mc, common);
  auto* eqm = app.add_subcommand("eqm", "equilibrium density (or phase sweep)");
  add_common(eqm, common);
  auto* spec = app.add_subcommand("spectral", "heat-kernel estimators of the equilibrium density");
  add_common(spec, common);
  auto* chk = app.add_subcommand("check", "run the fast invariant suite");
  add_common(chk, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*expand) return cmd_expand(common, sig, k);
    if (*sde) return cmd_sde(common, l);
    if (*clo) return cmd_closure(common);
    if (*iv) return cmd_interval(common, var, lo, hi);
    if (*reg) return cmd_region(common);
    if (*mc) return cmd_mc(common);
    if (*eqm) return cmd_eqm(common);
    if (*spec) return cmd_spectral(common);
    if (*chk) return cmd_check(common);
  } catch (const ModelError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
