#include "pslab/parse.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "pslab/errors.hpp"

namespace pslab {

namespace {

constexpr int kMaxPower = 1000;

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

// Largest variable index mentioned; 0 when there are none.
std::size_t max_variable(std::string_view text) {
  std::size_t best = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != 'z') continue;
    std::size_t j = i + 1, v = 0;
    while (j < text.size() && is_digit(text[j])) v = v * 10 + static_cast<std::size_t>(text[j++] - '0');
    if (j == i + 1) throw ParseError("variable name needs an index", i);
    if (v == 0) throw ParseError("variables are numbered from z1", i);
    best = std::max(best, v);
  }
  return best;
}

class PolyParser {
 public:
  PolyParser(std::string_view text, std::size_t dim) : text_(text), dim_(dim) {}

  SparsePoly parse() {
    SparsePoly p = expr();
    skip();
    if (pos_ != text_.size()) throw ParseError("unexpected character '" + std::string(1, text_[pos_]) + "'", pos_);
    return p;
  }

 private:
  void skip() {
    while (pos_ < text_.size() && is_space(text_[pos_])) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  SparsePoly expr() {
    SparsePoly acc = term();
    while (true) {
      if (accept('+')) acc += term();
      else if (accept('-')) acc -= term();
      else return acc;
    }
  }

  SparsePoly term() {
    SparsePoly acc = unary();
    while (true) {
      if (accept('*')) {
        acc = acc * unary();
      } else if (accept('/')) {
        skip();
        const std::size_t at = pos_;
        const SparsePoly d = unary();
        if (d.degree() > 0) throw ParseError("division by a non-constant polynomial", at);
        const Complex c = d.constant_term();
        if (c == Complex(0)) throw ParseError("division by zero", at);
        acc *= Complex(1) / c;
      } else {
        return acc;
      }
    }
  }

  SparsePoly unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  SparsePoly power() {
    SparsePoly base = primary();
    if (!accept('^')) return base;
    skip();
    const std::size_t at = pos_;
    int k = 0;
    while (pos_ < text_.size() && is_digit(text_[pos_])) {
      k = k * 10 + (text_[pos_++] - '0');
      if (k > kMaxPower) throw ParseError("power is too large", at);
    }
    if (pos_ == at) throw ParseError("expected a nonnegative integer power", at);
    SparsePoly out = SparsePoly::constant(dim_, 1.0);
    for (int i = 0; i < k; ++i) out = out * base;
    return out;
  }

  SparsePoly primary() {
    skip();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of expression", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      SparsePoly inner = expr();
      if (!accept(')')) throw ParseError("expected ')'", pos_);
      return inner;
    }
    if (c == 'z') {
      std::size_t j = pos_ + 1, v = 0;
      while (j < text_.size() && is_digit(text_[j])) v = v * 10 + static_cast<std::size_t>(text_[j++] - '0');
      if (v == 0 || v > dim_) throw ParseError("variable index out of range", pos_);
      pos_ = j;
      return SparsePoly::variable(dim_, v - 1);
    }
    if (c == 'i') {
      ++pos_;
      return SparsePoly::constant(dim_, Complex(0, 1));
    }
    if (is_digit(c) || c == '.') {
      double value = 0.0;
      const char* first = text_.data() + pos_;
      const auto [ptr, ec] = std::from_chars(first, text_.data() + text_.size(), value);
      if (ec != std::errc() || !std::isfinite(value)) throw ParseError("malformed number", pos_);
      pos_ += static_cast<std::size_t>(ptr - first);
      if (pos_ < text_.size() && text_[pos_] == 'i') {
        ++pos_;
        return SparsePoly::constant(dim_, Complex(0, value));
      }
      return SparsePoly::constant(dim_, Complex(value, 0));
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_);
  }

  std::string_view text_;
  std::size_t dim_;
  std::size_t pos_ = 0;
};

// Splits at sep when outside parentheses. Offsets of each piece are returned too.
std::vector<std::pair<std::string_view, std::size_t>> split_top(std::string_view s, char sep) {
  std::vector<std::pair<std::string_view, std::size_t>> out;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    else if (s[i] == ')') --depth;
    else if (s[i] == sep && depth == 0) {
      out.emplace_back(s.substr(start, i - start), start);
      start = i + 1;
    }
  }
  out.emplace_back(s.substr(start), start);
  return out;
}

// Factor separators: an 'x' at depth 0 right after a closing parenthesis ("fix" has an x too).
std::vector<std::pair<std::string_view, std::size_t>> split_factors(std::string_view s) {
  std::vector<std::pair<std::string_view, std::size_t>> out;
  int depth = 0;
  std::size_t start = 0;
  char last = '\0';
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (c == '(') ++depth;
    else if (c == ')') --depth;
    else if (c == 'x' && depth == 0 && last == ')') {
      out.emplace_back(s.substr(start, i - start), start);
      start = i + 1;
    }
    if (!is_space(c)) last = c;
  }
  out.emplace_back(s.substr(start), start);
  return out;
}

double parse_real(std::string_view s, std::size_t offset) {
  const Complex c = [&] {
    try {
      return parse_complex(s);
    } catch (const ParseError& e) {
      throw ParseError("malformed real number", offset + e.position());
    }
  }();
  if (c.imag() != 0.0) throw ParseError("expected a real number", offset);
  return c.real();
}

}  // namespace

SparsePoly parse_poly(std::string_view text, std::size_t dimension) {
  if (trim(text).empty()) throw ParseError("empty expression", 0);
  const std::size_t used = max_variable(text);
  if (dimension != 0 && used > dimension)
    throw ParseError("expression uses z" + std::to_string(used) + " but the dimension is " + std::to_string(dimension),
                     text.find('z' + std::to_string(used)));
  return PolyParser(text, dimension != 0 ? dimension : std::max<std::size_t>(used, 1)).parse();
}

Complex parse_complex(std::string_view text) {
  if (max_variable(text) != 0) throw ParseError("expected a constant", text.find('z'));
  const SparsePoly p = parse_poly(text, 1);
  return p.constant_term();
}

std::vector<Complex> parse_point(std::string_view text) {
  std::vector<Complex> out;
  for (const auto& [piece, at] : split_top(text, ',')) {
    try {
      out.push_back(parse_complex(piece));
    } catch (const ParseError& e) {
      throw ParseError("malformed coordinate", at + e.position());
    }
  }
  return out;
}

std::vector<double> parse_reals(std::string_view text) {
  std::vector<double> out;
  for (const auto& [piece, at] : split_top(text, ',')) out.push_back(parse_real(piece, at));
  return out;
}

MeasureSpec parse_measure(std::string_view text) {
  if (trim(text).empty()) throw ParseError("empty measure", 0);
  MeasureSpec mu;
  int weighted = 0;
  for (const auto& [piece, at] : split_top(text, '+')) {
    MeasureComponent comp;
    std::string_view body = piece;
    std::size_t body_at = at;
    // An optional leading "w*" gives the weight.
    const auto star = split_top(piece, '*');
    if (star.size() == 2) {
      comp.weight = parse_real(star[0].first, at);
      body = star[1].first;
      body_at = at + star[1].second;
      ++weighted;
    } else if (star.size() > 2) {
      throw ParseError("measure component has more than one weight", at);
    }
    for (const auto& [factor, fat] : split_factors(body)) {
      const std::string_view f = trim(factor);
      const std::size_t where = body_at + fat;
      auto argument = [&](std::string_view name) -> std::string_view {
        if (f.substr(0, name.size()) != name || f.size() < name.size() + 2 || f[name.size()] != '(' || f.back() != ')')
          throw ParseError("expected fix(...) or circle(...)", where);
        return f.substr(name.size() + 1, f.size() - name.size() - 2);
      };
      if (f.rfind("fix", 0) == 0) {
        comp.coords.push_back(CoordinateSupport::fixed(parse_complex(argument("fix"))));
      } else if (f.rfind("circle", 0) == 0) {
        const double r = parse_real(argument("circle"), where);
        if (!(r > 0.0)) throw ParseError("circle radius must be positive", where);
        comp.coords.push_back(CoordinateSupport::circle(r));
      } else {
        throw ParseError("expected fix(...) or circle(...)", where);
      }
    }
    mu.components.push_back(std::move(comp));
  }
  if (weighted != 0 && weighted != static_cast<int>(mu.components.size()))
    throw ParseError("either every component or none carries a weight", 0);
  if (weighted == 0)
    for (auto& c : mu.components) c.weight = 1.0 / static_cast<double>(mu.components.size());
  for (const auto& c : mu.components)
    if (c.coords.size() != mu.components.front().coords.size())
      throw InputError("measure components have different dimensions");
  return mu;
}

DomainSpec parse_domain(std::string_view text) {
  text = trim(text);
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos) throw ParseError("domain needs the form kind:parameters", 0);
  const std::string_view kind = text.substr(0, colon);
  const std::string_view args = text.substr(colon + 1);
  const std::vector<double> v = [&] {
    try {
      return parse_reals(args);
    } catch (const ParseError& e) {
      throw ParseError("malformed domain parameters", colon + 1 + e.position());
    }
  }();
  auto positive_int = [&](double x) {
    if (!(x >= 1.0) || x != std::floor(x) || x > 64) throw InputError("dimension must be an integer in [1, 64]");
    return static_cast<std::size_t>(x);
  };
  DomainSpec spec;
  if (kind == "polydisk") {
    if (v.size() != 1) throw InputError("polydisk takes one parameter: the dimension");
    spec = Polydisk{positive_int(v[0])};
  } else if (kind == "ball") {
    if (v.size() != 1) throw InputError("ball takes one parameter: the dimension");
    spec = Ellipsoid{std::vector<double>(positive_int(v[0]), 1.0)};
  } else if (kind == "ellipsoid") {
    spec = Ellipsoid{v};
  } else if (kind == "omega-lambda") {
    if (v.size() != 3) throw InputError("omega-lambda takes m, n, lambda");
    spec = omega_lambda(static_cast<int>(positive_int(v[0])), static_cast<int>(positive_int(v[1])), v[2]);
  } else {
    throw InputError("unknown domain kind '" + std::string(kind) + "'");
  }
  validate(spec);
  return spec;
}

}  // namespace pslab
