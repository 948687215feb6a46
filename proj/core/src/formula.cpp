#include "ranslab/formula.hpp"

#include <cctype>
#include <charconv>
#include <functional>
#include <vector>

#include "ranslab/error.hpp"

namespace ranslab {

namespace {

enum class Tok { Number, Ident, Op, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  double value = 0.0;
  std::size_t pos = 0;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.pos = i;
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && s[j] == '.') ++j;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && (s[j] == 'e' || s[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
        if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
          j = k;
          while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
        }
      }
      t.kind = Tok::Number;
      t.text = std::string(s.substr(i, j - i));
      std::string num = t.text;
      if (num.back() == '.') num += '0';
      if (num.front() == '.') num = "0" + num;
      auto r = std::from_chars(num.data(), num.data() + num.size(), t.value);
      if (r.ec != std::errc()) throw ParseError("bad number '" + t.text + "'");
      i = j;
    } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = std::string(s.substr(i, j - i));
      i = j;
    } else if (c == '*' && i + 1 < s.size() && s[i + 1] == '*') {
      t.kind = Tok::Op;
      t.text = "**";
      i += 2;
    } else if (std::string_view("+-*/(),[]").find(c) != std::string_view::npos) {
      t.kind = Tok::Op;
      t.text = std::string(1, c);
      ++i;
    } else {
      throw ParseError("unexpected character '" + std::string(1, c) + "' at position " + std::to_string(i));
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.pos = s.size();
  out.push_back(end);
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, const Namespace& ns) : text_(text), toks_(tokenize(text)), ns_(ns) {}

  Expr parse() {
    Expr e = expression();
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
    return e;
  }

 private:
  std::string_view text_;
  std::vector<Token> toks_;
  const Namespace& ns_;
  std::size_t p_ = 0;

  const Token& peek() const { return toks_[p_]; }
  bool accept(const char* op) {
    if (peek().kind == Tok::Op && peek().text == op) {
      ++p_;
      return true;
    }
    return false;
  }
  void expect(const char* op) {
    if (!accept(op)) fail(std::string("expected '") + op + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg + " at position " + std::to_string(peek().pos) + " in '" + std::string(text_) + "'");
  }

  Expr expression() {
    Expr e = term();
    for (;;) {
      if (accept("+"))
        e = e + term();
      else if (accept("-"))
        e = e - term();
      else
        return e;
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept("*"))
        e = e * unary();
      else if (accept("/"))
        e = e / unary();
      else
        return e;
    }
  }

  Expr unary() {
    if (accept("-")) return -unary();
    if (accept("+")) return unary();
    return power();
  }

  Expr power() {
    Expr base = postfix();
    if (accept("**")) return pow(base, unary());
    return base;
  }

  int index_literal() {
    if (peek().kind != Tok::Number || peek().text.find_first_not_of("0123456789") != std::string::npos)
      fail("expected an integer index");
    return static_cast<int>(toks_[p_++].value);
  }

  Expr postfix() {
    Expr e = primary();
    while (accept("[")) {
      const int i = index_literal();
      if (accept(",")) {
        const int j = index_literal();
        expect("]");
        e = component(e, i, j);
      } else {
        expect("]");
        e = component(e, i);
      }
    }
    return e;
  }

  std::vector<Expr> arguments() {
    std::vector<Expr> args;
    if (accept(")")) return args;
    do args.push_back(expression());
    while (accept(","));
    expect(")");
    return args;
  }

  Expr call(const std::string& f, const std::vector<Expr>& a) {
    auto arity = [&](std::size_t n) {
      if (a.size() != n)
        throw ParseError("function '" + f + "' takes " + std::to_string(n) + " argument(s), got " +
                         std::to_string(a.size()));
    };
    using U = Expr (*)(const Expr&);
    static const std::map<std::string, U> unary_fns = {
        {"grad", &grad},   {"div", &div},   {"exp", &exp},   {"sqrt", &sqrt},       {"abs", &abs},
        {"log", &ln},      {"ln", &ln},     {"sin", &sin},   {"cos", &cos},         {"sign", &sign},
        {"transpose", &transpose},          {"sym", &sym},
    };
    if (auto it = unary_fns.find(f); it != unary_fns.end()) {
      arity(1);
      return it->second(a[0]);
    }
    if (f == "strain_rate") {
      arity(1);
      return sym(grad(a[0]));
    }
    if (f == "inner") {
      arity(2);
      return inner(a[0], a[1]);
    }
    if (f == "dot") {
      arity(2);
      return dot(a[0], a[1]);
    }
    throw ParseError("unknown function '" + f + "'");
  }

  Expr primary() {
    const Token t = peek();
    if (t.kind == Tok::Number) {
      ++p_;
      return constant(t.value);
    }
    if (t.kind == Tok::Ident) {
      ++p_;
      if (accept("(")) return call(t.text, arguments());
      auto it = ns_.find(t.text);
      if (it == ns_.end()) throw NamespaceError("name '" + t.text + "' is not defined in the namespace");
      return it->second;
    }
    if (accept("(")) {
      Expr e = expression();
      expect(")");
      return e;
    }
    fail(t.kind == Tok::End ? "unexpected end of formula" : "unexpected '" + t.text + "'");
  }
};

}  // namespace

const Expr& lookup(const Namespace& ns, const std::string& name) {
  auto it = ns.find(name);
  if (it == ns.end()) throw NamespaceError("name '" + name + "' is not defined in the namespace");
  return it->second;
}

Expr parse_formula(std::string_view text, const Namespace& ns) {
  Parser p(text, ns);
  return p.parse();
}

}  // namespace ranslab
