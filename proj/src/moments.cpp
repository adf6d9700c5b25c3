#include "dirboot/moments.hpp"

#include <cctype>
#include <cmath>

#include "dirboot/error.hpp"

namespace dirboot {

CyclicWord moment_key(const Word& w) {
  auto a = canonical_cyclic(w);
  auto b = canonical_cyclic(adjoint(w));
  return b < a ? b : a;
}

std::optional<SymmetricKey> symmetric_key(const Word& w, const std::vector<SymmetryAction>& group) {
  const CyclicWord self = moment_key(w);
  CyclicWord best = self;
  int best_sign = 1;
  for (const auto& g : group) {
    auto [image, sign] = apply_symmetry(w, g);
    const CyclicWord k = moment_key(image);
    // An element mapping the class to itself with a sign flip kills it.
    if (k == self && sign < 0) return std::nullopt;
    if (k < best) {
      best = k;
      best_sign = sign;
    }
  }
  return SymmetricKey{best, best_sign};
}

std::string moment_name(const CyclicWord& w, std::size_t alphabet_size) {
  if (w.empty()) return "1";
  if (alphabet_size == 1) return "m_" + std::to_string(w.size());
  return "m_" + to_string(w, alphabet_size);
}

CyclicWord parse_moment_name(const std::string& name, std::size_t alphabet_size) {
  std::string body = name;
  if (body == "1") return moment_key(Word{});
  if (body.empty() || body[0] != 'm') throw ModelError("bad moment name '" + name + "'");
  body = body.substr(1);
  if (!body.empty() && body[0] == '_') body = body.substr(1);
  if (body.empty()) throw ModelError("bad moment name '" + name + "'");
  if (std::isdigit(static_cast<unsigned char>(body[0]))) {
    if (alphabet_size != 1) throw ModelError("numeric moment name '" + name + "' needs a one-matrix model");
    for (char c : body)
      if (!std::isdigit(static_cast<unsigned char>(c))) throw ModelError("bad moment name '" + name + "'");
    return moment_key(power_word(0, std::stoul(body)));
  }
  return moment_key(parse_word(body, alphabet_size));
}

MomentTable MomentTable::from_sequence(const std::vector<double>& m) {
  if (m.empty() || m[0] != 1.0) throw ModelError("moment sequence must start with m_0 = 1");
  MomentTable t(1);
  for (std::size_t k = 1; k < m.size(); ++k) t.set(power_word(0, k), m[k]);
  return t;
}

void MomentTable::set(const Word& w, double value) {
  if (!std::isfinite(value)) throw NumericalError("non-finite moment value");
  if (w.empty()) {
    if (value != 1.0) throw ModelError("the empty-word moment is fixed at 1");
    return;
  }
  values_[moment_key(w)] = value;
}

bool MomentTable::has(const Word& w) const { return w.empty() || values_.count(moment_key(w)) > 0; }

double MomentTable::get(const Word& w) const {
  if (w.empty()) return 1.0;
  auto it = values_.find(moment_key(w));
  if (it == values_.end())
    throw NumericalError("moment " + moment_name(moment_key(w), alphabet_size_) + " missing from table");
  return it->second;
}

}  // namespace dirboot
