#include "dirboot/multitrace.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "dirboot/error.hpp"

namespace dirboot {

namespace {

// Plain decimal digits only; boost would read a leading 0 as octal.
boost::multiprecision::cpp_int decimal_digits(std::string d, const std::string& literal) {
  if (d.empty() || !std::all_of(d.begin(), d.end(), [](unsigned char c) { return std::isdigit(c); }))
    throw ModelError("bad rational literal '" + literal + "'");
  d.erase(0, std::min(d.find_first_not_of('0'), d.size() - 1));
  return boost::multiprecision::cpp_int(d);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string s(text);
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  if (s.empty()) throw ModelError("empty rational literal");
  if (s.find_first_of("eE") != std::string::npos) throw ModelError("unsupported rational literal '" + s + "'");
  const bool neg = s[0] == '-';
  const std::string body = (s[0] == '-' || s[0] == '+') ? s.substr(1) : s;
  Rational q;
  if (const auto slash = body.find('/'); slash != std::string::npos) {
    if (body.find('.') != std::string::npos) throw ModelError("unsupported rational literal '" + s + "'");
    const auto den = decimal_digits(body.substr(slash + 1), s);
    if (den == 0) throw ModelError("zero denominator in '" + s + "'");
    q = Rational(decimal_digits(body.substr(0, slash), s), den);
  } else if (const auto d = body.find('.'); d != std::string::npos) {
    const std::size_t frac = body.size() - d - 1;
    const auto num = decimal_digits(body.substr(0, d) + body.substr(d + 1), s);
    q = Rational(num, boost::multiprecision::pow(boost::multiprecision::cpp_int(10), static_cast<unsigned>(frac)));
  } else {
    q = Rational(decimal_digits(body, s));
  }
  return neg ? Rational(-q) : q;
}

std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(q);
  if (boost::multiprecision::denominator(q) != 1) os << "/" << boost::multiprecision::denominator(q);
  return os.str();
}

Affine Affine::param(const std::string& name, Rational scale) {
  Affine a;
  a.params_[name] = std::move(scale);
  a.prune();
  return a;
}

Affine& Affine::operator+=(const Affine& rhs) {
  constant_ += rhs.constant_;
  for (const auto& [name, c] : rhs.params_) params_[name] += c;
  prune();
  return *this;
}

Affine& Affine::operator*=(const Rational& s) {
  constant_ *= s;
  for (auto& [name, c] : params_) c *= s;
  prune();
  return *this;
}

void Affine::prune() {
  std::erase_if(params_, [](const auto& kv) { return kv.second == 0; });
}

double Affine::evaluate(const ParamValues& values) const {
  double v = to_double(constant_);
  for (const auto& [name, c] : params_) {
    auto it = values.find(name);
    if (it == values.end()) throw ModelError("no value given for coupling parameter '" + name + "'");
    v += to_double(c) * it->second;
  }
  return v;
}

namespace {

std::string scaled_symbol(const Rational& c, const std::string& name) {
  if (c == 1) return name;
  if (c == -1) return "-" + name;
  return dirboot::to_string(c) + "*" + name;
}

}  // namespace

std::string Affine::to_string() const {
  std::string out;
  if (constant_ != 0 || params_.empty()) out = dirboot::to_string(constant_);
  for (const auto& [name, c] : params_) {
    if (out.empty()) {
      out = scaled_symbol(c, name);
    } else if (c < 0) {
      out += " - " + scaled_symbol(Rational(-c), name);
    } else {
      out += " + " + scaled_symbol(c, name);
    }
  }
  return out;
}

Affine parse_affine(const std::string& text) {
  Affine result;
  std::size_t i = 0;
  const auto skip = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  skip();
  if (i == text.size()) throw ModelError("empty coupling expression");
  bool first = true;
  while (i < text.size()) {
    int sign = 1;
    skip();
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      sign = text[i] == '-' ? -1 : 1;
      ++i;
    } else if (!first) {
      throw ModelError("malformed coupling expression '" + text + "'");
    }
    first = false;
    Rational scale = sign;
    std::string symbol;
    char op = '*';
    for (;;) {
      skip();
      if (i >= text.size()) throw ModelError("malformed coupling expression '" + text + "'");
      if (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.') {
        std::size_t j = i;
        while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.'))
          ++j;
        Rational num = parse_rational(text.substr(i, j - i));
        if (op == '*') {
          scale *= num;
        } else {
          if (num == 0) throw ModelError("division by zero in coupling expression");
          scale /= num;
        }
        i = j;
      } else if (std::isalpha(static_cast<unsigned char>(text[i])) || text[i] == '_') {
        std::size_t j = i;
        while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
          ++j;
        if (op != '*' || !symbol.empty())
          throw ModelError("coupling expression must be affine in parameters: '" + text + "'");
        symbol = text.substr(i, j - i);
        i = j;
      } else {
        throw ModelError("unexpected character in coupling expression '" + text + "'");
      }
      skip();
      if (i < text.size() && (text[i] == '*' || text[i] == '/')) {
        op = text[i++];
        continue;
      }
      break;
    }
    result += symbol.empty() ? Affine(scale) : Affine::param(symbol, scale);
  }
  return result;
}

std::size_t TraceMonomial::degree() const {
  std::size_t d = 0;
  for (const auto& f : factors) d += f.size();
  return d;
}

void MultiTracePolynomial::add_term(const Affine& coefficient, int n_power,
                                    const std::vector<Word>& trace_words) {
  if (coefficient.is_zero()) return;
  std::vector<CyclicWord> factors;
  for (const auto& w : trace_words) {
    for (Letter x : w.letters)
      if (x >= alphabet_size_) throw ModelError("trace word uses a letter outside the alphabet");
    if (w.empty()) {
      ++n_power;
    } else {
      factors.push_back(canonical_cyclic(w));
    }
  }
  std::sort(factors.begin(), factors.end());
  Key key{n_power, std::move(factors)};
  auto& slot = terms_[key];
  slot += coefficient;
  if (slot.is_zero()) terms_.erase(key);
}

void MultiTracePolynomial::add(const MultiTracePolynomial& other, const Rational& scale) {
  add(other, Affine(scale));
}

void MultiTracePolynomial::add(const MultiTracePolynomial& other, const Affine& scale) {
  if (other.alphabet_size_ != alphabet_size_) throw ModelError("alphabet mismatch in polynomial sum");
  // Products of two parameter-dependent coefficients are not affine.
  for (const auto& [key, coef] : other.terms_) {
    Affine term;
    if (scale.is_constant()) {
      term = coef * scale.constant();
    } else if (coef.is_constant()) {
      term = scale * coef.constant();
    } else {
      throw ModelError("coupling product is not affine in the parameters");
    }
    auto& slot = terms_[key];
    slot += term;
    if (slot.is_zero()) terms_.erase(key);
  }
}

std::vector<TraceMonomial> MultiTracePolynomial::terms() const {
  std::vector<TraceMonomial> out;
  out.reserve(terms_.size());
  for (const auto& [key, coef] : terms_) out.push_back({coef, key.first, key.second});
  std::stable_sort(out.begin(), out.end(), [](const TraceMonomial& a, const TraceMonomial& b) {
    if (a.n_power != b.n_power) return a.n_power > b.n_power;
    return a.factors < b.factors;
  });
  return out;
}

std::vector<std::pair<double, TraceMonomial>> MultiTracePolynomial::numeric_terms(
    const ParamValues& values) const {
  std::vector<std::pair<double, TraceMonomial>> out;
  for (auto& t : terms()) {
    const double c = t.coefficient.evaluate(values);
    if (c != 0.0) out.emplace_back(c, std::move(t));
  }
  return out;
}

std::size_t MultiTracePolynomial::degree(const ParamValues& values) const {
  std::size_t d = 0;
  for (const auto& [c, t] : numeric_terms(values)) d = std::max(d, t.degree());
  return d;
}

namespace {

std::string factor_string(const CyclicWord& w, std::size_t alphabet_size) {
  return "Tr(" + to_power_string(w.word(), alphabet_size) + ")";
}

std::string monomial_body(const TraceMonomial& t, std::size_t alphabet_size) {
  std::vector<std::string> parts;
  if (t.n_power == 1) parts.push_back("N");
  if (t.n_power > 1 || t.n_power < 0) parts.push_back("N^" + std::to_string(t.n_power));
  std::size_t i = 0;
  while (i < t.factors.size()) {
    std::size_t j = i;
    while (j < t.factors.size() && t.factors[j] == t.factors[i]) ++j;
    const auto f = factor_string(t.factors[i], alphabet_size);
    parts.push_back(j - i == 1 ? f : "(" + f + ")^" + std::to_string(j - i));
    i = j;
  }
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) out += (k ? "*" : "") + parts[k];
  return out;
}

}  // namespace

std::string MultiTracePolynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& t : terms()) {
    const std::string body = monomial_body(t, alphabet_size_);
    const Affine& c = t.coefficient;
    bool negative = false;
    std::string coef;
    if (c.is_constant()) {
      negative = c.constant() < 0;
      const Rational mag = negative ? Rational(-c.constant()) : c.constant();
      if (body.empty()) {
        coef = dirboot::to_string(mag);
      } else if (mag != 1) {
        coef = dirboot::to_string(mag) + "*";
      }
    } else if (c.constant() == 0 && c.params().size() == 1) {
      const auto& [name, s] = *c.params().begin();
      negative = s < 0;
      const Rational mag = negative ? Rational(-s) : s;
      coef = (mag == 1 ? name : dirboot::to_string(mag) + "*" + name) + (body.empty() ? "" : "*");
    } else {
      coef = "(" + c.to_string() + ")" + (body.empty() ? "" : "*");
    }
    if (first) {
      out += negative ? "-" : "";
    } else {
      out += negative ? " - " : " + ";
    }
    out += coef + body;
    first = false;
  }
  return out;
}

}  // namespace dirboot
