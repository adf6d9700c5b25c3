#include "dirboot/mc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <limits>
#include <map>
#include <thread>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "dirboot/error.hpp"
#include "dirboot/moments.hpp"

namespace dirboot {

using cd = std::complex<double>;

std::uint64_t CounterRng::next() {
  // splitmix64 finalizer over a mix of the three keys
  std::uint64_t z = seed_ * 0x9E3779B97F4A7C15ULL ^ (stream_ + 0xD1B54A32D192ED03ULL) * 0xBF58476D1CE4E5B9ULL ^
                    (counter_++ + 0x94D049BB133111EBULL) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double CounterRng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double CounterRng::symmetric() { return 2.0 * uniform() - 1.0; }

namespace {

ParamValues param_values(const EnsembleSpec& spec) { return spec.params; }

struct NumTerm {
  double coef;  // includes N^n_power
  std::vector<std::size_t> factors;  // indices into the trace-word list
};

// Action terms with N substituted, factors as indices into a word list.
struct NumericAction {
  std::vector<CyclicWord> words;
  std::vector<NumTerm> terms;
};

NumericAction numeric_action(const EnsembleSpec& spec, std::size_t N) {
  NumericAction out;
  std::map<CyclicWord, std::size_t> index;
  for (auto& [c, t] : build_action(spec).numeric_terms(param_values(spec))) {
    NumTerm nt{c * std::pow(static_cast<double>(N), t.n_power), {}};
    for (const auto& f : t.factors) {
      auto [it, fresh] = index.emplace(f, out.words.size());
      if (fresh) out.words.push_back(f);
      nt.factors.push_back(it->second);
    }
    out.terms.push_back(std::move(nt));
  }
  return out;
}

cd trace_of(const Word& w, const std::vector<Eigen::MatrixXcd>& m) {
  if (w.empty()) return cd(static_cast<double>(m[0].rows()), 0.0);
  Eigen::MatrixXcd p = m[w[0]];
  for (std::size_t i = 1; i < w.size(); ++i) p = p * m[w[i]];
  return p.trace();
}

double polynomial_value(const NumericAction& a, const std::vector<cd>& tr) {
  cd s = 0.0;
  for (const auto& t : a.terms) {
    cd p = t.coef;
    for (auto f : t.factors) p *= tr[f];
    s += p;
  }
  return s.real();
}

double fermion_pairs(const FermionBlock& f, const Eigen::VectorXd& lam) {
  double s = 0.0;
  const double m2 = f.mass * f.mass;
  for (Eigen::Index i = 0; i < lam.size(); ++i)
    for (Eigen::Index j = 0; j < lam.size(); ++j) {
      if (i == j) continue;
      const double d = lam(i) - lam(j);
      const double arg = m2 + d * d;
      if (!(arg > 0.0)) return std::numeric_limits<double>::infinity();
      s -= 0.25 * f.beta2 * std::log(arg);
    }
  return s;
}

std::vector<CyclicWord> default_words(const EnsembleSpec& spec) {
  ParamValues v = spec.params;
  const std::size_t len = std::max<std::size_t>(4, build_action(spec).degree(v));
  std::vector<CyclicWord> out;
  std::map<CyclicWord, bool> seen;
  for (const auto& w : enumerate_words(spec.alphabet_size, len)) {
    if (w.empty()) continue;
    const CyclicWord k = moment_key(w);
    if (seen.emplace(k, true).second) out.push_back(k);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void check_config(const ChainConfig& cfg) {
  if (cfg.N < 1) throw ModelError("chain needs N >= 1");
  if (cfg.steps <= cfg.burn_in) throw ModelError("chain needs steps > burn_in; no measurements would be taken");
  if (cfg.thin < 1) throw ModelError("thinning must be at least 1");
  if (!(cfg.step > 0.0)) throw ModelError("proposal step must be positive");
}

// Tuning during burn-in only, toward acceptance 0.5.
double adapt(double step, double rate) { return std::clamp(step * std::exp(rate - 0.5), 1e-6, 1e6); }

// --- matrix space ---------------------------------------------------------

class MatrixSampler {
 public:
  MatrixSampler(const EnsembleSpec& spec, const ChainConfig& cfg)
      : cfg_(cfg), n_(cfg.N), action_(numeric_action(spec, cfg.N)), rng_(cfg.seed, 0) {
    mats_.assign(spec.alphabet_size, Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_)));
    letters_ = spec.alphabet_size;
    for (const auto& w : action_.words) max_len_ = std::max(max_len_, w.size());
    resync();
  }

  const std::vector<Eigen::MatrixXcd>& matrices() const { return mats_; }

  void resync() {
    tr_.resize(action_.words.size());
    for (std::size_t i = 0; i < tr_.size(); ++i) tr_[i] = trace_of(action_.words[i].word(), mats_);
    s_ = polynomial_value(action_, tr_);
  }

  // One sweep; returns the number of accepted moves.
  std::size_t sweep(double step) {
    std::size_t acc = 0;
    const std::size_t sites = letters_ * n_ * (n_ + 1) / 2;
    for (std::size_t s = 0; s < sites; ++s) acc += propose(step);
    return acc;
  }

  std::size_t proposals_per_sweep() const { return letters_ * n_ * (n_ + 1) / 2; }

 private:
  bool propose(double step) {
    const auto l = static_cast<Letter>(letters_ == 1 ? 0 : rng_.next() % letters_);
    std::size_t i = rng_.next() % n_;
    std::size_t j = rng_.next() % n_;
    if (i > j) std::swap(i, j);
    cd delta;
    if (i == j) {
      delta = step * rng_.symmetric();
    } else {
      delta = step * cd(rng_.symmetric(), rng_.symmetric()) / std::sqrt(2.0);
    }
    cache_.clear();
    std::vector<cd> trial(tr_.size());
    for (std::size_t w = 0; w < tr_.size(); ++w) trial[w] = tr_[w] + trace_delta(action_.words[w].word(), l, i, j, delta);
    const double s_new = polynomial_value(action_, trial);
    const double ds = s_new - s_;
    if (!std::isfinite(s_new)) return false;
    if (ds > 0.0 && rng_.uniform() >= std::exp(-ds)) return false;
    auto& m = mats_[l];
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += delta;
    if (i != j) m(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) += std::conj(delta);
    tr_ = std::move(trial);
    s_ = s_new;
    return true;
  }

  // (G e_i, G e_j) for G the product of the gap letters.
  const std::pair<Eigen::VectorXcd, Eigen::VectorXcd>& gap_columns(const Word& gap, std::size_t i, std::size_t j) {
    auto it = cache_.find(gap);
    if (it != cache_.end()) return it->second;
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::VectorXcd a = Eigen::VectorXcd::Zero(n), b = Eigen::VectorXcd::Zero(n);
    a(static_cast<Eigen::Index>(i)) = 1.0;
    b(static_cast<Eigen::Index>(j)) = 1.0;
    for (std::size_t k = gap.size(); k-- > 0;) {
      a = mats_[gap[k]] * a;
      b = mats_[gap[k]] * b;
    }
    return cache_.emplace(gap, std::make_pair(std::move(a), std::move(b))).first->second;
  }

  // Tr(W) after H_l += delta e_i e_j^T + conj(delta) e_j e_i^T, minus Tr(W)
  // before: every nonempty choice of replaced positions, each a product of
  // rank-one pieces joined by 2x2 corners of the gap products.
  cd trace_delta(const Word& w, Letter l, std::size_t i, std::size_t j, cd delta) {
    std::vector<std::size_t> pos;
    for (std::size_t p = 0; p < w.size(); ++p)
      if (w[p] == l) pos.push_back(p);
    if (pos.empty()) return 0.0;
    // rank-one pieces: coefficient, row index, column index
    struct Piece {
      cd c;
      std::size_t u, v;
    };
    std::vector<Piece> pieces{{delta, i, j}};
    if (i != j) pieces.push_back({std::conj(delta), j, i});
    const std::size_t L = w.size();
    cd total = 0.0;
    for (std::uint32_t mask = 1; mask < (1u << pos.size()); ++mask) {
      std::vector<std::size_t> sel;
      for (std::size_t b = 0; b < pos.size(); ++b)
        if (mask & (1u << b)) sel.push_back(pos[b]);
      const std::size_t r = sel.size();
      // corner[t](x, y) = (G_t)_{y_t-index, x-index}: G_t follows piece t.
      std::vector<const std::pair<Eigen::VectorXcd, Eigen::VectorXcd>*> cols(r);
      for (std::size_t t = 0; t < r; ++t) {
        const std::size_t from = sel[t] + 1;
        const std::size_t to = t + 1 < r ? sel[t + 1] : sel[0] + L;
        Word gap;
        for (std::size_t p = from; p < to; ++p) gap.letters.push_back(w[p % L]);
        cols[t] = &gap_columns(gap, i, j);
      }
      const std::size_t np = pieces.size();
      std::size_t combos = 1;
      for (std::size_t t = 0; t < r; ++t) combos *= np;
      for (std::size_t code = 0; code < combos; ++code) {
        std::vector<std::size_t> pick(r);
        std::size_t c = code;
        for (std::size_t t = 0; t < r; ++t) {
          pick[t] = c % np;
          c /= np;
        }
        cd prod = 1.0;
        for (std::size_t t = 0; t < r && prod != 0.0; ++t) {
          const Piece& a = pieces[pick[t]];
          const Piece& b = pieces[pick[(t + 1) % r]];
          // v_a^T G_t u_b = (G_t)_{a.v, b.u}
          const auto& col = b.u == i ? cols[t]->first : cols[t]->second;
          prod *= a.c * col(static_cast<Eigen::Index>(a.v));
        }
        total += prod;
      }
    }
    return total;
  }

  ChainConfig cfg_;
  std::size_t n_;
  std::size_t letters_ = 1;
  std::size_t max_len_ = 0;
  NumericAction action_;
  CounterRng rng_;
  std::vector<Eigen::MatrixXcd> mats_;
  std::vector<cd> tr_;
  double s_ = 0.0;
  std::map<Word, std::pair<Eigen::VectorXcd, Eigen::VectorXcd>> cache_;
};

// --- eigenvalue space -----------------------------------------------------

class EigenSampler {
 public:
  EigenSampler(const EnsembleSpec& spec, const ChainConfig& cfg)
      : n_(cfg.N), action_(numeric_action(spec, cfg.N)), fermion_(*spec.fermion), rng_(cfg.seed, 1) {
    for (const auto& w : action_.words) {
      const std::size_t k = w.size();
      max_power_ = std::max(max_power_, k);
    }
    lam_.resize(static_cast<Eigen::Index>(n_));
    for (std::size_t i = 0; i < n_; ++i)
      lam_(static_cast<Eigen::Index>(i)) = (static_cast<double>(i) - 0.5 * static_cast<double>(n_ - 1)) / static_cast<double>(n_);
    power_.assign(max_power_ + 1, 0.0);
    for (std::size_t k = 0; k <= max_power_; ++k) power_[k] = lam_.array().pow(static_cast<double>(k)).sum();
  }

  const Eigen::VectorXd& eigenvalues() const { return lam_; }
  std::size_t proposals_per_sweep() const { return n_; }

  std::size_t sweep(double step) {
    std::size_t acc = 0;
    for (std::size_t s = 0; s < n_; ++s) acc += propose(step);
    return acc;
  }

  double power_sum(std::size_t k) const {
    double s = 0.0;
    for (Eigen::Index i = 0; i < lam_.size(); ++i) s += std::pow(lam_(i), static_cast<double>(k));
    return s;
  }

  void resync() {
    for (std::size_t k = 0; k <= max_power_; ++k) power_[k] = power_sum(k);
  }

 private:
  double bosonic(const std::vector<double>& p) const {
    double s = 0.0;
    for (const auto& t : action_.terms) {
      double v = t.coef;
      for (auto f : t.factors) v *= p[action_.words[f].size()];
      s += v;
    }
    return s + fermion_.trace_regulator * p[1] * p[1];
  }

  bool propose(double step) {
    const std::size_t i = rng_.next() % n_;
    const double old = lam_(static_cast<Eigen::Index>(i));
    const double nu = old + step * rng_.symmetric();
    std::vector<double> p = power_;
    if (p.size() < 2) p.resize(2, 0.0);
    for (std::size_t k = 1; k < p.size(); ++k)
      p[k] += std::pow(nu, static_cast<double>(k)) - std::pow(old, static_cast<double>(k));
    std::vector<double> p_old = power_;
    if (p_old.size() < 2) p_old.resize(2, 0.0);
    double ds = bosonic(p) - bosonic(p_old);
    const double m2 = fermion_.mass * fermion_.mass;
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == i) continue;
      const double x = lam_(static_cast<Eigen::Index>(j));
      const double dn = nu - x, dold = old - x;
      if (dn == 0.0 || !(m2 + dn * dn > 0.0)) return false;
      // both orderings of the pair
      ds -= 0.5 * fermion_.beta2 * (std::log(m2 + dn * dn) - std::log(m2 + dold * dold));
      ds -= std::log(dn * dn) - std::log(dold * dold);
    }
    if (!std::isfinite(ds)) return false;
    if (ds > 0.0 && rng_.uniform() >= std::exp(-ds)) return false;
    lam_(static_cast<Eigen::Index>(i)) = nu;
    p.resize(power_.size());
    power_ = std::move(p);
    return true;
  }

  std::size_t n_;
  NumericAction action_;
  FermionBlock fermion_;
  CounterRng rng_;
  std::size_t max_power_ = 1;
  Eigen::VectorXd lam_;
  std::vector<double> power_;
};

template <class Sampler, class Measure>
void run(Sampler& s, const ChainConfig& cfg, Chain& out, Measure measure) {
  double step = cfg.step;
  for (std::size_t k = 0; k < cfg.burn_in; ++k) {
    const std::size_t acc = s.sweep(step);
    step = adapt(step, static_cast<double>(acc) / static_cast<double>(s.proposals_per_sweep()));
    s.resync();
  }
  std::size_t acc_total = 0, prop_total = 0;
  for (std::size_t k = cfg.burn_in; k < cfg.steps; ++k) {
    acc_total += s.sweep(step);
    prop_total += s.proposals_per_sweep();
    s.resync();
    if ((k - cfg.burn_in) % cfg.thin == 0) measure();
  }
  out.acceptance = prop_total ? static_cast<double>(acc_total) / static_cast<double>(prop_total) : 0.0;
  out.final_step = step;
}

}  // namespace

double action_value(const EnsembleSpec& spec, const std::vector<Eigen::MatrixXcd>& matrices) {
  if (matrices.size() != spec.alphabet_size) throw ModelError("action needs one matrix per letter");
  const auto n = static_cast<std::size_t>(matrices[0].rows());
  for (const auto& m : matrices) {
    if (m.rows() != m.cols() || static_cast<std::size_t>(m.rows()) != n) throw ModelError("matrices must be square of equal size");
    if (!m.isApprox(m.adjoint(), 1e-12) && m.norm() > 0.0) throw ModelError("matrices must be Hermitian");
  }
  const NumericAction a = numeric_action(spec, n);
  std::vector<cd> tr(a.words.size());
  for (std::size_t i = 0; i < tr.size(); ++i) tr[i] = trace_of(a.words[i].word(), matrices);
  double s = polynomial_value(a, tr);
  if (spec.fermion) {
    if (spec.alphabet_size != 1) throw ModelError("fermionic block needs a one-matrix model");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrices[0], Eigen::EigenvaluesOnly);
    const Eigen::VectorXd lam = es.eigenvalues();
    s += fermion_pairs(*spec.fermion, lam);
    const double t = lam.sum();
    s += spec.fermion->trace_regulator * t * t;
  }
  return s;
}

Chain metropolis_sample(const EnsembleSpec& spec, const ChainConfig& cfg, std::vector<CyclicWord> words) {
  check_config(cfg);
  if (words.empty()) words = default_words(spec);
  for (auto& w : words) w = moment_key(w);
  Chain out;
  out.config = cfg;
  out.alphabet_size = spec.alphabet_size;
  out.words = words;
  out.series.assign(words.size(), {});
  const double n = static_cast<double>(cfg.N);
  if (spec.fermion) {
    if (spec.alphabet_size != 1) throw ModelError("fermionic block needs a one-matrix model");
    out.eigenvalue_space = true;
    EigenSampler s(spec, cfg);
    run(s, cfg, out, [&] {
      for (std::size_t w = 0; w < words.size(); ++w) out.series[w].push_back(s.power_sum(words[w].size()) / n);
    });
  } else {
    MatrixSampler s(spec, cfg);
    run(s, cfg, out, [&] {
      for (std::size_t w = 0; w < words.size(); ++w)
        out.series[w].push_back(trace_of(words[w].word(), s.matrices()).real() / n);
    });
  }
  return out;
}

std::vector<Chain> run_chains(const EnsembleSpec& spec, const std::vector<ChainConfig>& cfgs,
                              const std::vector<CyclicWord>& words, std::size_t threads) {
  std::vector<Chain> out(cfgs.size());
  std::vector<std::exception_ptr> errors(cfgs.size());
  threads = std::max<std::size_t>(1, std::min(threads, cfgs.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < cfgs.size(); i += threads) {
        try {
          out[i] = metropolis_sample(spec, cfgs[i], words);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<MomentEstimate> estimate_moments(const Chain& chain, const std::vector<Word>& words) {
  std::vector<MomentEstimate> out;
  for (const auto& w : words) {
    MomentEstimate e;
    e.word = moment_key(w);
    if (w.empty()) {
      e.mean = 1.0;
      out.push_back(e);
      continue;
    }
    const auto it = std::find(chain.words.begin(), chain.words.end(), e.word);
    if (it == chain.words.end())
      throw ModelError("word " + to_string(w, chain.alphabet_size) + " was not recorded by the chain");
    const auto& xs = chain.series[static_cast<std::size_t>(it - chain.words.begin())];
    std::size_t nb = std::max<std::size_t>(20, chain.config.batches);
    nb = std::min(nb, xs.size());
    if (nb < 2) throw NumericalError("fewer than two batches for word " + to_string(w, chain.alphabet_size));
    const std::size_t size = xs.size() / nb;
    const std::size_t skip = xs.size() - size * nb;  // drop the earliest leftovers
    std::vector<double> means(nb, 0.0);
    double total = 0.0;
    for (std::size_t b = 0; b < nb; ++b) {
      for (std::size_t k = 0; k < size; ++k) means[b] += xs[skip + b * size + k];
      means[b] /= static_cast<double>(size);
      total += means[b];
    }
    e.mean = total / static_cast<double>(nb);
    double v = 0.0;
    for (double m : means) v += (m - e.mean) * (m - e.mean);
    e.std_error = std::sqrt(v / static_cast<double>(nb - 1) / static_cast<double>(nb));
    double mu = 0.0;
    for (double x : xs) mu += x;
    mu /= static_cast<double>(xs.size());
    double var = 0.0;
    for (double x : xs) var += (x - mu) * (x - mu);
    e.variance = xs.size() > 1 ? var / static_cast<double>(xs.size() - 1) : 0.0;
    e.n_batches = nb;
    e.n_samples = xs.size();
    out.push_back(e);
  }
  return out;
}

double scalar_oracle(const EnsembleSpec& spec, int k) {
  if (spec.alphabet_size != 1) throw ModelError("scalar reduction needs a one-matrix model");
  if (k < 0) throw ModelError("moment order must be nonnegative");
  // S(h) as coefficients of h^d
  std::vector<double> c(2, 0.0);
  for (const auto& [coef, t] : build_action(spec).numeric_terms(param_values(spec))) {
    const std::size_t d = t.degree();
    if (c.size() <= d) c.resize(d + 1, 0.0);
    c[d] += coef;
  }
  if (spec.fermion) c[2] += spec.fermion->trace_regulator;
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  const std::size_t deg = c.size() - 1;
  if (deg == 0 || deg % 2 != 0 || !(c.back() > 0.0))
    throw NumericalError("N = 1 integrand is not normalizable: leading term must be an even power with positive coefficient");
  const auto S = [&](double h) {
    double s = 0.0;
    for (std::size_t d = c.size(); d-- > 0;) s = s * h + c[d];
    return s;
  };
  double R = 1.0;
  while (std::min(S(R), S(-R)) - S(0.0) < 200.0 && R < 1e6) R *= 2.0;
  double smin = S(0.0);
  for (int i = -4000; i <= 4000; ++i) smin = std::min(smin, S(R * i / 4000.0));
  using boost::math::quadrature::gauss_kronrod;
  const auto w = [&](double h) { return std::exp(-(S(h) - smin)); };
  const double den = gauss_kronrod<double, 61>::integrate(w, -R, R, 25, 1e-14);
  const double num = gauss_kronrod<double, 61>::integrate(
      [&](double h) { return std::pow(h, k) * w(h); }, -R, R, 25, 1e-14);
  if (!(den > 0.0) || !std::isfinite(num)) throw NumericalError("quadrature failed in the N = 1 reduction");
  return num / den;
}

}  // namespace dirboot
