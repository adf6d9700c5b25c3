#include "dirboot/closure.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "dirboot/error.hpp"

namespace dirboot {

namespace {

struct Row {
  std::vector<double> coef;  // over the current degree's unknowns
  Poly lower;                // recipe level, lower moment ids
  Poly expanded;             // search-variable level
  std::string origin;
};

}  // namespace

std::size_t Closure::id_of(const CyclicWord& key) const {
  auto it = index_.find(key);
  if (it == index_.end()) throw ModelError("moment " + moment_name(key, alphabet_size_) + " is not tracked by the closure");
  return it->second;
}

std::string Closure::var_name(Poly::Var v) const { return moment_name(entries_[v].key, alphabet_size_); }

bool Closure::is_search_variable(const CyclicWord& key) const {
  return std::find(search_.begin(), search_.end(), moment_key(key)) != search_.end();
}

bool Closure::determines(const CyclicWord& key) const {
  const CyclicWord k = moment_key(key);
  if (std::find(forced_zero_.begin(), forced_zero_.end(), k) != forced_zero_.end()) return true;
  auto it = classes_.find(k);
  if (it == classes_.end()) return false;
  return it->second.first < 0 || entries_[static_cast<std::size_t>(it->second.first)].kind != Kind::search;
}

std::string Closure::expansion_string(const CyclicWord& key) const {
  auto it = classes_.find(moment_key(key));
  if (it == classes_.end()) throw ModelError("moment not tracked by the closure");
  if (it->second.first < 0) return "0";
  Poly p = entries_[static_cast<std::size_t>(it->second.first)].expansion;
  p *= it->second.second;
  return p.to_string([this](Poly::Var v) { return var_name(v); });
}

std::vector<std::string> Closure::constraint_strings() const {
  std::vector<std::string> out;
  for (const auto& c : constraints_) out.push_back(c.to_string([this](Poly::Var v) { return var_name(v); }) + " = 0");
  return out;
}

std::vector<std::pair<CyclicWord, std::string>> Closure::recipes() const {
  std::vector<std::pair<CyclicWord, std::string>> out;
  for (const auto& [cls, rep] : classes_) {
    if (rep.first >= 0 && entries_[static_cast<std::size_t>(rep.first)].kind == Kind::search && cls == entries_[static_cast<std::size_t>(rep.first)].key)
      continue;
    out.emplace_back(cls, expansion_string(cls));
  }
  return out;
}

ClosureEvaluation Closure::evaluate(const std::map<CyclicWord, double>& assignment, double tol) const {
  std::vector<double> values(entries_.size(), 0.0);
  std::vector<bool> given(entries_.size(), false);
  std::vector<std::pair<CyclicWord, double>> checks;
  for (const auto& [raw, value] : assignment) {
    const CyclicWord k = moment_key(raw);
    auto it = classes_.find(k);
    if (it == classes_.end()) throw ModelError("assigned moment " + moment_name(k, alphabet_size_) + " is beyond the closure degree");
    const long id = it->second.first;
    if (id >= 0 && entries_[static_cast<std::size_t>(id)].kind == Kind::search &&
        !given[static_cast<std::size_t>(id)]) {
      values[static_cast<std::size_t>(id)] = value * it->second.second;
      given[static_cast<std::size_t>(id)] = true;
    } else {
      checks.emplace_back(k, value);
    }
  }
  for (const auto& s : search_) {
    const std::size_t id = id_of(s);
    if (!given[id]) throw ModelError("no value for search variable " + moment_name(s, alphabet_size_));
  }
  for (std::size_t id : order_) {
    const auto& e = entries_[id];
    if (e.kind == Kind::eliminated) values[id] = e.expansion.evaluate(values);
    if (e.kind == Kind::solved) values[id] = e.recipe.evaluate(values);
    if (!std::isfinite(values[id]))
      throw NumericalError("moment " + moment_name(e.key, alphabet_size_) + " evaluated to a non-finite value");
  }

  ClosureEvaluation out{MomentTable(alphabet_size_), 0.0, true};
  for (const auto& [cls, rep] : classes_) {
    out.table.set(cls, rep.first < 0 ? 0.0 : rep.second * values[static_cast<std::size_t>(rep.first)]);
  }
  for (const auto& c : constraints_) {
    const double v = std::abs(c.evaluate(values)) / std::max(1.0, c.magnitude(values));
    out.violation = std::max(out.violation, v);
  }
  for (const auto& [k, value] : checks) {
    const double v = std::abs(out.table.get(k) - value) / std::max(1.0, std::abs(value));
    out.violation = std::max(out.violation, v);
  }
  out.consistent = out.violation <= tol;
  return out;
}

MomentTable evaluate_moments(const Closure& closure, const std::map<CyclicWord, double>& assignment) {
  auto ev = closure.evaluate(assignment);
  return std::move(ev.table);
}

Closure build_closure(const EnsembleSpec& spec, const ParamValues& couplings, const ClosureOptions& options) {
  ParamValues values = spec.params;
  for (const auto& [k, v] : couplings) values[k] = v;

  const MultiTracePolynomial action = build_action(spec);
  const std::size_t action_degree = action.degree(values);
  if (action_degree < 2) throw ModelError("action must be at least quadratic at the given couplings");
  if (options.max_degree < action_degree)
    throw ModelError("closure degree " + std::to_string(options.max_degree) + " is below the action degree " +
                     std::to_string(action_degree));

  Closure cl;
  cl.alphabet_size_ = spec.alphabet_size;
  cl.max_degree_ = options.max_degree;
  cl.couplings_ = values;
  // no generators given: use whatever the action has
  if (options.impose_symmetry)
    cl.group_ = generate_group(spec.symmetries.empty() ? detect_symmetries(action) : spec.symmetries,
                               spec.alphabet_size);

  // Moment classes and their orbit representatives.
  std::vector<std::vector<std::size_t>> by_degree(options.max_degree + 1);
  {
    std::set<CyclicWord> zero;
    std::vector<std::set<CyclicWord>> reps(options.max_degree + 1);
    std::map<CyclicWord, std::pair<CyclicWord, int>> class_rep;
    for (const auto& w : enumerate_words(spec.alphabet_size, options.max_degree)) {
      if (w.empty()) continue;
      const CyclicWord cls = moment_key(w);
      if (class_rep.count(cls) || zero.count(cls)) continue;
      if (cl.group_.empty()) {
        class_rep.emplace(cls, std::make_pair(cls, 1));
        reps[w.size()].insert(cls);
        continue;
      }
      auto sk = symmetric_key(w, cl.group_);
      if (!sk) {
        zero.insert(cls);
        continue;
      }
      class_rep.emplace(cls, std::make_pair(sk->key, sk->sign));
      reps[w.size()].insert(sk->key);
    }
    for (std::size_t d = 1; d <= options.max_degree; ++d) {
      for (const auto& r : reps[d]) {
        cl.index_[r] = cl.entries_.size();
        by_degree[d].push_back(cl.entries_.size());
        cl.entries_.push_back({r, Closure::Kind::solved, {}, {}});
      }
    }
    for (const auto& [cls, rep] : class_rep)
      cl.classes_[cls] = {static_cast<long>(cl.index_.at(rep.first)), rep.second};
    for (const auto& z : zero) {
      cl.classes_[z] = {-1, 1};
      cl.forced_zero_.push_back(z);
    }
  }

  // Loop equations, bucketed by their numeric top degree.
  std::vector<std::vector<Row>> buckets(options.max_degree + 1);
  const std::size_t max_word = options.max_degree + 1 - action_degree;
  for (const auto& w : enumerate_words(spec.alphabet_size, max_word)) {
    for (std::size_t i = 0; i < spec.alphabet_size; ++i) {
      const MomentRelation rel = generate_sde(action, w, static_cast<Letter>(i), cl.group_);
      Poly p;
      std::size_t deg = 0;
      for (const auto& [prod, c] : rel.difference()) {
        const double cv = c.evaluate(values);
        if (cv == 0.0) continue;
        Poly term = Poly::constant(cv);
        for (const auto& f : prod) term = term * Poly::variable(static_cast<Poly::Var>(cl.id_of(f)));
        p += term;
        deg = std::max(deg, product_degree(prod));
      }
      if (p.is_zero()) continue;
      Row row;
      row.lower = std::move(p);
      row.origin = "W=" + to_string(w, spec.alphabet_size) + ", letter " +
                   letter_name(static_cast<Letter>(i), spec.alphabet_size) + ": " + rel.to_string();
      buckets[deg].push_back(std::move(row));
    }
  }

  const auto expand = [&cl](const Poly& recipe) {
    Poly out;
    for (const auto& [mono, c] : recipe.terms()) {
      Poly t = Poly::constant(c);
      for (Poly::Var v : mono) t = t * cl.entries_[v].expansion;
      out += t;
    }
    return out;
  };

  std::vector<std::size_t> search_ids, eliminated_ids, solved_ids;

  // Applies v := value in every expansion and pending constraint.
  const auto eliminate = [&](Poly::Var v, const Poly& value) {
    for (auto& e : cl.entries_) e.expansion = e.expansion.substitute(v, value);
    cl.entries_[v].kind = Closure::Kind::eliminated;
    cl.entries_[v].expansion = value;
    search_ids.erase(std::remove(search_ids.begin(), search_ids.end(), v), search_ids.end());
    eliminated_ids.push_back(v);
  };

  std::vector<Poly> pending;
  // One elimination at a time; after each the remaining constraints are
  // rewritten so no expansion ever refers to an eliminated variable.
  const auto settle_constraints = [&](std::size_t degree, double scale) {
    for (;;) {
      std::vector<Poly> keep;
      for (auto& c : pending) {
        for (Poly::Var v : eliminated_ids) c = c.substitute(v, cl.entries_[v].expansion);
        c.prune(1e-9 * scale);
        if (c.is_zero()) continue;
        if (c.is_constant()) {
          std::ostringstream os;
          os << "loop equations are inconsistent at degree " << degree << ": residual relation "
             << c.constant_term() << " = 0";
          throw NumericalError(os.str());
        }
        keep.push_back(std::move(c));
      }
      pending = std::move(keep);
      bool done = false;
      for (std::size_t i = 0; i < pending.size() && !done; ++i) {
        const Poly& c = pending[i];
        const auto var_set = c.variables();
        std::vector<Poly::Var> vars(var_set.begin(), var_set.end());
        std::sort(vars.rbegin(), vars.rend());
        for (Poly::Var v : vars) {
          if (cl.entries_[v].kind != Closure::Kind::search) continue;
          auto lc = c.linear_coefficient(v);
          if (!lc || std::abs(*lc) <= 1e-9 * scale) continue;
          Poly value = c.substitute(v, Poly());
          value *= -1.0 / *lc;
          eliminate(v, value);
          cl.warnings_.push_back("constraint at degree " + std::to_string(degree) + " eliminates search variable " +
                                 cl.var_name(v));
          pending.erase(pending.begin() + static_cast<long>(i));
          done = true;
          break;
        }
      }
      if (!done) return;
    }
  };

  for (std::size_t d = 1; d <= options.max_degree; ++d) {
    // Largest moment first so it becomes the pivot.
    std::vector<std::size_t> cols = by_degree[d];
    std::sort(cols.rbegin(), cols.rend());
    std::map<std::size_t, std::size_t> col_of;
    for (std::size_t c = 0; c < cols.size(); ++c) col_of[cols[c]] = c;

    auto& rows = buckets[d];
    double scale = 1.0;
    for (auto& row : rows) {
      row.coef.assign(cols.size(), 0.0);
      Poly rest;
      for (const auto& [mono, c] : row.lower.terms()) {
        if (mono.size() == 1 && col_of.count(mono[0])) {
          row.coef[col_of[mono[0]]] += c;
        } else {
          Poly t;
          t = Poly::constant(c);
          for (Poly::Var v : mono) t = t * Poly::variable(v);
          rest += t;
        }
        scale = std::max(scale, std::abs(c));
      }
      row.lower = std::move(rest);
      row.expanded = expand(row.lower);
    }

    std::vector<long> pivot_row(cols.size(), -1);
    std::vector<bool> used(rows.size(), false);
    for (std::size_t c = 0; c < cols.size(); ++c) {
      long best = -1;
      double best_abs = options.pivot_tol * scale;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (used[r]) continue;
        if (std::abs(rows[r].coef[c]) > best_abs) {
          best_abs = std::abs(rows[r].coef[c]);
          best = static_cast<long>(r);
        }
      }
      if (best < 0) continue;
      auto& pr = rows[static_cast<std::size_t>(best)];
      used[static_cast<std::size_t>(best)] = true;
      pivot_row[c] = best;
      const double inv = 1.0 / pr.coef[c];
      for (auto& x : pr.coef) x *= inv;
      pr.coef[c] = 1.0;
      pr.lower *= inv;
      pr.expanded *= inv;
      for (std::size_t r = 0; r < rows.size(); ++r) {
        if (r == static_cast<std::size_t>(best)) continue;
        const double f = rows[r].coef[c];
        if (f == 0.0) continue;
        for (std::size_t k = 0; k < cols.size(); ++k) rows[r].coef[k] -= f * pr.coef[k];
        rows[r].coef[c] = 0.0;
        rows[r].lower.axpy(-f, pr.lower);
        rows[r].expanded.axpy(-f, pr.expanded);
      }
    }

    std::vector<std::string> promoted;
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (pivot_row[c] >= 0) continue;
      const std::size_t id = cols[c];
      cl.entries_[id].kind = Closure::Kind::search;
      cl.entries_[id].expansion = Poly::variable(static_cast<Poly::Var>(id));
      search_ids.push_back(id);
      if (!rows.empty()) promoted.push_back(cl.var_name(static_cast<Poly::Var>(id)));
    }
    if (!promoted.empty()) {
      std::string list;
      for (const auto& p : promoted) list += (list.empty() ? "" : ", ") + p;
      cl.warnings_.push_back("degree " + std::to_string(d) + " underdetermined; promoted to search variables: " + list);
    }
    // Pivots solved smallest first so recipes only look down.
    for (long c = static_cast<long>(cols.size()) - 1; c >= 0; --c) {
      const long r = pivot_row[static_cast<std::size_t>(c)];
      if (r < 0) continue;
      const auto& row = rows[static_cast<std::size_t>(r)];
      Poly recipe = row.lower;
      Poly expansion = row.expanded;
      for (std::size_t f = 0; f < cols.size(); ++f) {
        if (pivot_row[f] >= 0 || std::abs(row.coef[f]) <= options.pivot_tol * scale) continue;
        recipe.axpy(row.coef[f], Poly::variable(static_cast<Poly::Var>(cols[f])));
        expansion.axpy(row.coef[f], Poly::variable(static_cast<Poly::Var>(cols[f])));
      }
      recipe *= -1.0;
      expansion *= -1.0;
      const std::size_t id = cols[static_cast<std::size_t>(c)];
      cl.entries_[id].recipe = std::move(recipe);
      cl.entries_[id].expansion = std::move(expansion);
      solved_ids.push_back(id);
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (used[r]) continue;
      pending.push_back(rows[r].expanded);
    }
    try {
      settle_constraints(d, scale);
    } catch (const NumericalError& e) {
      std::string origins;
      for (std::size_t r = 0; r < rows.size(); ++r)
        if (!used[r]) origins += "\n  from " + rows[r].origin;
      throw NumericalError(std::string(e.what()) + origins);
    }
  }

  cl.constraints_ = std::move(pending);
  for (auto id : search_ids) cl.search_.push_back(cl.entries_[id].key);
  std::sort(cl.search_.begin(), cl.search_.end());
  cl.order_ = search_ids;
  cl.order_.insert(cl.order_.end(), eliminated_ids.begin(), eliminated_ids.end());
  cl.order_.insert(cl.order_.end(), solved_ids.begin(), solved_ids.end());
  std::sort(cl.forced_zero_.begin(), cl.forced_zero_.end());
  return cl;
}

}  // namespace dirboot
