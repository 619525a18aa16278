#include "l2twist/poly_parser.hpp"

#include <cctype>
#include <map>

namespace l2twist {

namespace {

struct Factor {
  int var = -1;  // -1 for a number
  double number = 1.0;
  std::int64_t power = 1;
};

struct RawTerm {
  double coeff = 1.0;
  std::vector<std::pair<std::string, std::int64_t>> powers;
};

class Lexer {
 public:
  explicit Lexer(const std::string& s) {
    for (char c : s) {
      if (!std::isspace(static_cast<unsigned char>(c))) text_ += c;
    }
  }

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }
  char get() { return text_[pos_++]; }
  std::size_t pos() const { return pos_; }

  [[noreturn]] void fail(const std::string& what) const {
    throw InvalidInput("polynomial parse error at position " + std::to_string(pos_) + ": " + what);
  }

  double number() {
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (peek() == '.') {
      ++pos_;
      while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    }
    if (pos_ == start || (pos_ == start + 1 && text_[start] == '.')) fail("expected a number");
    return std::stod(text_.substr(start, pos_ - start));
  }

  std::int64_t integer() {
    bool neg = false;
    if (peek() == '+' || peek() == '-') neg = get() == '-';
    if (peek() == '(') {
      get();
      const auto v = integer();
      if (peek() != ')') fail("expected ')'");
      get();
      return neg ? -v : v;
    }
    const std::size_t start = pos_;
    while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
    if (pos_ == start) fail("expected an integer exponent");
    const auto v = std::stoll(text_.substr(start, pos_ - start));
    return neg ? -v : v;
  }

  std::string variable() {
    const char c = peek();
    if (c != 'x' && c != 'y' && c != 'z' && c != 'w') fail("expected a variable");
    get();
    std::string name(1, c);
    if (c == 'z') {
      while (std::isdigit(static_cast<unsigned char>(peek()))) name += get();
    }
    return name;
  }

 private:
  std::string text_;
  std::size_t pos_ = 0;
};

bool is_variable_start(char c) { return c == 'x' || c == 'y' || c == 'z' || c == 'w'; }

std::vector<RawTerm> parse_terms(const std::string& text) {
  Lexer lex(text);
  std::vector<RawTerm> terms;
  if (lex.done()) lex.fail("empty polynomial");
  bool first = true;
  while (!lex.done()) {
    double sign = 1.0;
    if (lex.peek() == '+' || lex.peek() == '-') {
      sign = lex.get() == '-' ? -1.0 : 1.0;
    } else if (!first) {
      lex.fail("expected '+' or '-'");
    }
    first = false;
    RawTerm term;
    term.coeff = sign;
    bool expect_factor = true;
    while (expect_factor) {
      const char c = lex.peek();
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        term.coeff *= lex.number();
        // coefficient-variable juxtaposition
        if (is_variable_start(lex.peek())) continue;
      } else if (is_variable_start(c)) {
        auto name = lex.variable();
        std::int64_t p = 1;
        if (lex.peek() == '^') {
          lex.get();
          p = lex.integer();
        }
        term.powers.emplace_back(std::move(name), p);
      } else {
        lex.fail("expected a coefficient or variable");
      }
      if (lex.peek() == '*') {
        lex.get();
      } else {
        expect_factor = false;
      }
    }
    if (!lex.done() && lex.peek() != '+' && lex.peek() != '-') lex.fail("unexpected character");
    terms.push_back(std::move(term));
  }
  return terms;
}

}  // namespace

LaurentPoly parse_polynomial(const std::string& text, std::optional<int> vars) {
  const auto terms = parse_terms(text);
  std::map<std::string, int> index;
  bool indexed = false, lettered = false;
  for (const auto& t : terms) {
    for (const auto& [name, p] : t.powers) {
      (name.size() > 1 ? indexed : lettered) = true;
      index[name] = -1;
    }
  }
  if (indexed && lettered) throw InvalidInput("polynomial mixes x,y,z,w with z1..zd");
  static const std::string order = "xyzw";
  int d = 0;
  if (indexed) {
    for (auto& [name, idx] : index) {
      const int k = std::stoi(name.substr(1));
      if (k < 1) throw InvalidInput("variable indices start at z1");
      idx = k - 1;
      d = std::max(d, k);
    }
    if (vars) {
      if (d > *vars) throw InvalidInput("polynomial uses z" + std::to_string(d) + " but only " +
                                        std::to_string(*vars) + " variables exist");
      d = *vars;
    }
  } else if (vars) {
    d = *vars;
    if (d == 1 && index.size() > 1) throw InvalidInput("one-variable polynomial uses several letters");
    for (auto& [name, idx] : index) {
      idx = d == 1 ? 0 : static_cast<int>(order.find(name[0]));
      if (idx >= d) throw InvalidInput("variable " + name + " exceeds the variable count " + std::to_string(d));
    }
  } else {
    for (char c : order) {
      const auto it = index.find(std::string(1, c));
      if (it != index.end()) it->second = d++;
    }
    d = std::max(d, 1);
  }
  LaurentPoly p(d);
  for (const auto& t : terms) {
    Exponent e(d, 0);
    for (const auto& [name, pw] : t.powers) e[index.at(name)] += pw;
    p.add_term(e, t.coeff);
  }
  return p;
}

}  // namespace l2twist
