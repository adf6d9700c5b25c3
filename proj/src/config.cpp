#include "dirboot/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dirboot/error.hpp"
#include "dirboot/moments.hpp"

namespace dirboot {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& ptr, const std::string& what) {
  throw ModelError((ptr.empty() ? std::string("/") : ptr) + ": " + what);
}

std::string escape(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

// An object whose keys must all be consumed.
class Block {
 public:
  Block(const json& j, std::string ptr) : j_(j), ptr_(std::move(ptr)) {
    if (!j_.is_object()) fail(ptr_, "expected an object");
  }
  ~Block() = default;

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string at(const std::string& key) const { return ptr_ + "/" + escape(key); }

  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  double number(const std::string& key, double def) {
    const json* v = get(key);
    if (!v) return def;
    if (!v->is_number()) fail(at(key), "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) fail(at(key), "expected a finite number");
    return x;
  }
  std::optional<double> opt_number(const std::string& key) {
    if (!has(key) || j_.at(key).is_null()) {
      seen_.insert(key);
      return std::nullopt;
    }
    return number(key, 0.0);
  }
  std::size_t count(const std::string& key, std::size_t def, std::size_t min = 0) {
    const json* v = get(key);
    if (!v) return def;
    if (!v->is_number_integer() || v->get<long long>() < static_cast<long long>(min))
      fail(at(key), "expected an integer >= " + std::to_string(min));
    return v->get<std::size_t>();
  }
  std::uint64_t u64(const std::string& key, std::uint64_t def) {
    const json* v = get(key);
    if (!v) return def;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
      fail(at(key), "expected a nonnegative integer");
    return v->get<std::uint64_t>();
  }
  bool boolean(const std::string& key, bool def) {
    const json* v = get(key);
    if (!v) return def;
    if (!v->is_boolean()) fail(at(key), "expected true or false");
    return v->get<bool>();
  }
  std::string string(const std::string& key, const std::string& def) {
    const json* v = get(key);
    if (!v) return def;
    if (!v->is_string()) fail(at(key), "expected a string");
    return v->get<std::string>();
  }

  // Call once every key has been read.
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) fail(at(it.key()), "unknown key");
  }

  const std::string& pointer() const { return ptr_; }

 private:
  const json& j_;
  std::string ptr_;
  std::set<std::string> seen_;
};

std::pair<double, double> pair_of(const json& v, const std::string& ptr) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    fail(ptr, "expected [lo, hi]");
  const double lo = v[0].get<double>(), hi = v[1].get<double>();
  if (!(lo < hi)) fail(ptr, "expected lo < hi");
  return {lo, hi};
}

std::string shortest(double x) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

Affine coupling_value(const json& v, const std::string& ptr) {
  try {
    if (v.is_number()) {
      const double x = v.get<double>();
      if (!std::isfinite(x)) fail(ptr, "expected a finite number");
      return parse_affine(shortest(x));
    }
    if (v.is_string()) return parse_affine(v.get<std::string>());
  } catch (const ModelError& e) {
    fail(ptr, e.what());
  }
  fail(ptr, "expected a number or an expression such as \"t2\" or \"g/6\"");
}

ModelConfig parse_model(const json& j, const std::string& ptr) {
  Block b(j, ptr);
  ModelConfig m;
  m.spec.name = b.string("name", "");
  std::optional<Signature> sig;
  if (const json* s = b.get("signature"); s && !s->is_null()) {
    try {
      if (s->is_string()) {
        sig = parse_signature(s->get<std::string>());
      } else if (s->is_array() && s->size() == 2 && (*s)[0].is_number_integer() && (*s)[1].is_number_integer()) {
        sig = Signature{(*s)[0].get<int>(), (*s)[1].get<int>()};
      } else {
        fail(b.at("signature"), "expected \"p,q\", [p, q] or null");
      }
    } catch (const ModelError& e) {
      const std::string what = e.what();
      if (what.rfind(ptr, 0) == 0) throw;
      fail(b.at("signature"), what);
    }
    if (!is_supported(*sig)) fail(b.at("signature"), "unsupported signature " + to_string(*sig));
  }
  std::map<int, Affine> couplings;
  if (const json* c = b.get("couplings")) {
    Block cb(*c, b.at("couplings"));
    for (auto it = c->begin(); it != c->end(); ++it) {
      const std::string key = it.key();
      int k = 0;
      auto [p, ec] = std::from_chars(key.data(), key.data() + key.size(), k);
      if (ec != std::errc() || p != key.data() + key.size() || k < 1) fail(cb.at(key), "coupling keys are powers >= 1");
      couplings[k] = coupling_value(*cb.get(key), cb.at(key));
    }
    cb.finish();
  }
  if (couplings.empty()) fail(b.at("couplings"), "at least one coupling is required");
  m.spec = sig ? make_dirac_spec(*sig, couplings) : make_single_trace_spec(couplings);
  m.spec.name = b.string("name", "");
  if (const json* p = b.get("params")) {
    Block pb(*p, b.at("params"));
    for (auto it = p->begin(); it != p->end(); ++it) m.spec.params[it.key()] = pb.number(it.key(), 0.0);
    pb.finish();
  }
  m.impose_symmetry = b.boolean("impose_symmetry", false);
  if (const json* f = b.get("fermion"); f && !f->is_null()) {
    Block fb(*f, b.at("fermion"));
    FermionBlock fe;
    fe.mass = fb.number("mass", fe.mass);
    fe.trace_regulator = fb.number("trace_regulator", fe.trace_regulator);
    fe.beta2 = fb.number("beta2", fe.beta2);
    fb.finish();
    if (m.spec.alphabet_size != 1) fail(b.at("fermion"), "the fermionic block needs a one-matrix model");
    if (fe.mass < 0.0) fail(fb.at("mass"), "expected a nonnegative mass");
    m.spec.fermion = fe;
  }
  b.finish();
  if (m.impose_symmetry) m.spec.symmetries = detect_symmetries(build_action(m.spec));
  return m;
}

Axis parse_axis(const json& j, const std::string& ptr) {
  Block b(j, ptr);
  Axis a;
  a.name = b.string("name", "");
  if (a.name.empty()) fail(b.at("name"), "axis needs a name");
  a.lo = b.number("lo", 0.0);
  a.hi = b.number("hi", a.lo);
  a.steps = b.count("steps", 1, 1);
  b.finish();
  if (a.steps > 1 && !(a.lo < a.hi)) fail(ptr, "expected lo < hi");
  return a;
}

void parse_scan(const json& j, const std::string& ptr, ScanConfig& sc) {
  Block b(j, ptr);
  auto axes = [&](const std::string& key, std::vector<Axis>& out, std::size_t max) {
    if (const json* v = b.get(key)) {
      if (!v->is_array()) fail(b.at(key), "expected an array of axes");
      if (v->size() > max) fail(b.at(key), "at most " + std::to_string(max) + " axes");
      for (std::size_t i = 0; i < v->size(); ++i) out.push_back(parse_axis((*v)[i], b.at(key) + "/" + std::to_string(i)));
    }
  };
  axes("couplings", sc.couplings, 2);
  axes("variables", sc.variables, 2);
  auto& o = sc.options;
  o.level = b.count("lambda", o.level, 1);
  o.tol = b.number("tol", o.tol);
  if (!(o.tol >= 0.0)) fail(b.at("tol"), "expected a nonnegative tolerance");
  o.closure_tol = b.number("closure_tol", o.closure_tol);
  o.depth = b.count("depth", o.depth, 1);
  o.coarse = b.count("coarse", o.coarse, 2);
  if (const json* v = b.get("brackets")) {
    Block bb(*v, b.at("brackets"));
    for (auto it = v->begin(); it != v->end(); ++it) o.brackets[it.key()] = pair_of(*bb.get(it.key()), bb.at(it.key()));
    bb.finish();
  }
  if (const json* v = b.get("default_bracket")) o.default_bracket = pair_of(*v, b.at("default_bracket"));
  b.finish();
}

void parse_mc(const json& j, const std::string& ptr, McConfig& mc) {
  Block b(j, ptr);
  auto& c = mc.chain;
  c.N = b.count("N", c.N, 1);
  c.steps = b.count("steps", c.steps, 1);
  c.burn_in = b.count("burn_in", c.burn_in);
  c.step = b.number("step", c.step);
  if (!(c.step > 0.0)) fail(b.at("step"), "expected a positive step");
  c.seed = b.u64("seed", c.seed);
  c.thin = b.count("thin", c.thin, 1);
  c.batches = b.count("batches", c.batches, 2);
  mc.chains = b.count("chains", mc.chains, 1);
  if (const json* v = b.get("words")) {
    if (!v->is_array()) fail(b.at("words"), "expected an array of moment names");
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_string()) fail(b.at("words") + "/" + std::to_string(i), "expected a moment name");
      mc.words.push_back((*v)[i].get<std::string>());
    }
  }
  b.finish();
  if (c.steps <= c.burn_in) fail(ptr + "/steps", "steps must exceed burn_in");
}

void parse_equilibrium(const json& j, const std::string& ptr, EquilibriumConfig& eq) {
  Block b(j, ptr);
  auto& e = eq.energy;
  e.n = b.count("n", e.n, 64);
  e.L = b.number("L", e.L);
  if (!(e.L > 0.0)) fail(b.at("L"), "expected L > 0");
  e.g2 = b.number("g2", e.g2);
  e.g4 = b.number("g4", e.g4);
  e.mass = b.number("mass", e.mass);
  if (e.mass < 0.0) fail(b.at("mass"), "expected a nonnegative mass");
  e.a = b.number("a", e.a);
  e.beta2 = b.number("beta2", e.beta2);
  if (e.beta2 < 0.0) fail(b.at("beta2"), "expected beta2 >= 0");
  e.vandermonde = b.boolean("vandermonde", e.vandermonde);
  if (const json* v = b.get("potential")) {
    if (!v->is_array()) fail(b.at("potential"), "expected coefficients [c0, c1, ...]");
    for (std::size_t i = 0; i < v->size(); ++i) {
      if (!(*v)[i].is_number()) fail(b.at("potential") + "/" + std::to_string(i), "expected a number");
      e.potential.push_back((*v)[i].get<double>());
    }
  }
  e.restarts = b.count("restarts", e.restarts, 1);
  e.max_iter = b.count("max_iter", e.max_iter, 1);
  e.tol = b.number("tol", e.tol);
  if (!(e.tol > 0.0)) fail(b.at("tol"), "expected a positive tolerance");
  eq.threshold = b.number("threshold", eq.threshold);
  if (!(eq.threshold > 0.0 && eq.threshold < 1.0)) fail(b.at("threshold"), "expected a threshold in (0, 1)");
  if (const json* v = b.get("sweep")) {
    if (!v->is_array()) fail(b.at("sweep"), "expected an array of [g2, g4, m]");
    for (std::size_t i = 0; i < v->size(); ++i) {
      const json& p = (*v)[i];
      const std::string pp = b.at("sweep") + "/" + std::to_string(i);
      if (!p.is_array() || p.size() != 3 || !p[0].is_number() || !p[1].is_number() || !p[2].is_number())
        fail(pp, "expected [g2, g4, m]");
      if (p[2].get<double>() < 0.0) fail(pp + "/2", "expected a nonnegative mass");
      eq.sweep.push_back({p[0].get<double>(), p[1].get<double>(), p[2].get<double>()});
    }
  }
  b.finish();
}

void parse_spectral(const json& j, const std::string& ptr, SpectralConfig& sp) {
  Block b(j, ptr);
  sp.t_min = b.number("t_min", sp.t_min);
  sp.t_max = b.number("t_max", sp.t_max);
  sp.steps = b.count("steps", sp.steps, 2);
  sp.mass = b.opt_number("mass");
  b.finish();
  if (!(sp.t_min > 0.0)) fail(ptr + "/t_min", "expected t_min > 0");
  if (!(sp.t_max > sp.t_min)) fail(ptr + "/t_max", "expected t_max > t_min");
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("/: invalid JSON: ") + e.what());
  }
  RunConfig rc;
  Block b(j, "");
  if (const json* v = b.get("model")) rc.model = parse_model(*v, "/model");
  if (const json* v = b.get("scan")) parse_scan(*v, "/scan", rc.scan);
  if (const json* v = b.get("mc")) parse_mc(*v, "/mc", rc.mc);
  if (const json* v = b.get("equilibrium")) parse_equilibrium(*v, "/equilibrium", rc.equilibrium);
  if (const json* v = b.get("spectral")) parse_spectral(*v, "/spectral", rc.spectral);
  if (const json* v = b.get("output")) {
    Block ob(*v, "/output");
    rc.out_dir = ob.string("dir", rc.out_dir);
    ob.finish();
  }
  if (b.has("seed")) rc.seed = b.u64("seed", 0);
  if (b.has("threads")) rc.threads = b.count("threads", 1, 1);
  b.finish();
  if (rc.model) {
    rc.scan.options.impose_symmetry = rc.model->impose_symmetry;
    rc.scan.fixed = rc.model->spec.params;
    // moment names must parse under the model's alphabet
    for (std::size_t i = 0; i < rc.mc.words.size(); ++i) {
      try {
        parse_moment_name(rc.mc.words[i], rc.model->spec.alphabet_size);
      } catch (const ModelError& e) {
        fail("/mc/words/" + std::to_string(i), e.what());
      }
    }
  }
  return rc;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace dirboot
