#include <cctype>

#include "islarr/syntax.hpp"

namespace islarr {

namespace {

enum class Tok {
  End, Ident, Nat, LParen, RParen, LBrack, RBrack, LBrace, RBrace, Comma, Dot, Semi,
  Plus, Star, Assign, EqEq, Neq, Le, Lt, PointsTo, NotPointsTo, Or, Minus
};

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto adv = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  auto starts = [&](const char* s) { return src.compare(i, std::char_traits<char>::length(s), s) == 0; };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      adv(1);
      continue;
    }
    if (c == '#' || starts("//")) {
      while (i < src.size() && src[i] != '\n') adv(1);
      continue;
    }
    int l = line, cc = col;
    auto push = [&](Tok k, std::size_t n) {
      out.push_back({k, src.substr(i, n), l, cc});
      adv(n);
    };
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      std::size_t j = i + 1;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' ||
                                src[j] == '\'' || src[j] == '$'))
        ++j;
      push(Tok::Ident, j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      push(Tok::Nat, j - i);
    } else if (starts("|->")) {
      push(Tok::PointsTo, 3);
    } else if (starts("!|->")) {
      push(Tok::NotPointsTo, 4);
    } else if (starts("\\/")) {
      push(Tok::Or, 2);
    } else if (starts(":=")) {
      push(Tok::Assign, 2);
    } else if (starts("==")) {
      push(Tok::EqEq, 2);
    } else if (starts("!=")) {
      push(Tok::Neq, 2);
    } else if (starts("<=")) {
      push(Tok::Le, 2);
    } else {
      Tok k;
      switch (c) {
        case '(': k = Tok::LParen; break;
        case ')': k = Tok::RParen; break;
        case '[': k = Tok::LBrack; break;
        case ']': k = Tok::RBrack; break;
        case '{': k = Tok::LBrace; break;
        case '}': k = Tok::RBrace; break;
        case ',': k = Tok::Comma; break;
        case '.': k = Tok::Dot; break;
        case ';': k = Tok::Semi; break;
        case '+': k = Tok::Plus; break;
        case '*': k = Tok::Star; break;
        case '<': k = Tok::Lt; break;
        case '-': k = Tok::Minus; break;
        default:
          throw SyntaxError(std::to_string(l) + ":" + std::to_string(cc) + ": unexpected character '" +
                            std::string(1, c) + "'");
      }
      push(k, 1);
    }
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

bool is_keyword(const std::string& s) {
  static const char* kws[] = {"null", "emp", "arr", "narr", "exists", "false", "skip", "error",
                              "alloc", "free", "assume", "local", "in"};
  for (auto k : kws)
    if (s == k) return true;
  return false;
}

class Parser {
 public:
  explicit Parser(const std::string& src) : toks_(lex(src)) {}

  [[noreturn]] void fail(const std::string& msg) const {
    auto& t = toks_[pos_];
    throw SyntaxError(std::to_string(t.line) + ":" + std::to_string(t.col) + ": " + msg +
                      (t.kind == Tok::End ? " at end of input" : " near '" + t.text + "'"));
  }

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool at_ident(const char* s) const { return at(Tok::Ident) && peek().text == s; }
  Token take() { return toks_[pos_++]; }
  void expect(Tok k, const char* what) {
    if (!at(k)) fail(std::string("expected ") + what);
    ++pos_;
  }
  void expect_end() {
    if (!at(Tok::End)) fail("unexpected trailing input");
  }

  std::string ident() {
    if (!at(Tok::Ident) || is_keyword(peek().text)) fail("expected identifier");
    return take().text;
  }

  // term := primary ('+' primary)*
  Term term() {
    Term t = primary_term();
    while (at(Tok::Plus) && plus_continues_term()) {
      take();
      t = Term::add(t, primary_term());
    }
    return t;
  }

  // After a '+', decide whether a term follows (as opposed to the choice operator).
  bool plus_continues_term() {
    auto& n = peek(1);
    if (n.kind == Tok::Nat) return true;
    if (n.kind == Tok::Ident) {
      if (n.text == "null") return true;
      if ((n.text == "b" || n.text == "e") && peek(2).kind == Tok::LParen) return true;
      if (is_keyword(n.text)) return false;
      return peek(2).kind != Tok::Assign;
    }
    if (n.kind == Tok::LParen) {
      std::size_t save = pos_;
      ++pos_;
      try {
        primary_term();
        pos_ = save;
        return true;
      } catch (const SyntaxError&) {
        pos_ = save;
        return false;
      }
    }
    return false;
  }

  Term primary_term() {
    if (at(Tok::Nat)) {
      auto s = take().text;
      if (s.size() > 15) fail("literal too large");
      return Term::nat(std::stoll(s));
    }
    if (at(Tok::LParen)) {
      take();
      Term t = term();
      expect(Tok::RParen, "')'");
      return t;
    }
    if (at(Tok::Ident)) {
      auto& text = peek().text;
      if (text == "null") {
        take();
        return Term::null();
      }
      if ((text == "b" || text == "e") && peek(1).kind == Tok::LParen) {
        bool base = text == "b";
        take();
        take();
        Term a = term();
        expect(Tok::RParen, "')'");
        try {
          return base ? Term::base(a) : Term::end(a);
        } catch (const SyntaxError& e) {
          fail(e.what());
        }
      }
      return Term::var(ident());
    }
    fail("expected term");
  }

  bool pure_op_ahead(PureOp& op) {
    switch (peek().kind) {
      case Tok::EqEq: op = PureOp::Eq; return true;
      case Tok::Neq: op = PureOp::Neq; return true;
      case Tok::Le: op = PureOp::Le; return true;
      case Tok::Lt: op = PureOp::Lt; return true;
      default: return false;
    }
  }

  // One atom of a symbolic heap. Anonymous values `-` go to anon (null if not allowed).
  void atom(SymbolicHeap& h, std::vector<std::string>* anon, int& anon_count) {
    if (at_ident("emp")) {
      take();
      h.spatial.push_back(emp());
      return;
    }
    if ((at_ident("arr") || at_ident("narr")) && peek(1).kind == Tok::LParen) {
      bool neg = take().text == "narr";
      take();
      Term lo = term();
      expect(Tok::Comma, "','");
      Term hi = term();
      expect(Tok::RParen, "')'");
      h.spatial.push_back(neg ? narr(lo, hi) : arr(lo, hi));
      return;
    }
    Term lhs = term();
    if (at(Tok::PointsTo)) {
      take();
      if (at(Tok::Minus)) {
        if (!anon) fail("anonymous value needs an assertion context");
        take();
        std::string v = "$" + std::to_string(anon_count++);
        anon->push_back(v);
        h.spatial.push_back(pto(lhs, Term::var(v)));
        return;
      }
      h.spatial.push_back(pto(lhs, term()));
      return;
    }
    if (at(Tok::NotPointsTo)) {
      take();
      h.spatial.push_back(narr(lhs, Term::add(lhs, Term::nat(1))));
      return;
    }
    PureOp op;
    if (!pure_op_ahead(op)) fail("expected atom");
    take();
    h.pure.push_back({op, lhs, term()});
  }

  SymbolicHeap heap(std::vector<std::string>* anon, int& anon_count) {
    SymbolicHeap h;
    atom(h, anon, anon_count);
    while (at(Tok::Star)) {
      take();
      atom(h, anon, anon_count);
    }
    return h;
  }

  PureFormula pure() {
    int n = 0;
    SymbolicHeap h = heap(nullptr, n);
    for (auto& s : h.spatial)
      if (s.kind != SpatialKind::Emp) fail("spatial atom in pure formula");
    return h.pure;
  }

  Disjunct disjunct(int& anon_count) {
    Disjunct d;
    if (at_ident("exists")) {
      take();
      while (at(Tok::Ident) && !is_keyword(peek().text)) d.vars.push_back(take().text);
      if (d.vars.empty()) fail("expected bound variables");
      expect(Tok::Dot, "'.'");
      for (std::size_t i = 0; i < d.vars.size(); ++i)
        for (std::size_t j = i + 1; j < d.vars.size(); ++j)
          if (d.vars[i] == d.vars[j]) fail("duplicate bound variable " + d.vars[i]);
    }
    std::vector<std::string> anon;
    d.body = heap(&anon, anon_count);
    d.vars.insert(d.vars.end(), anon.begin(), anon.end());
    return d;
  }

  Assertion assertion() {
    Assertion a;
    if (at_ident("false")) {
      take();
      return a;
    }
    // anonymous names must not collide with user `$k` names
    int anon_count = 0;
    for (auto& t : toks_)
      if (t.kind == Tok::Ident && is_reserved_name(t.text)) {
        Fresh f;
        f.reserve(t.text);
        anon_count = std::max(anon_count, f.peek());
      }
    a.disjuncts.push_back(disjunct(anon_count));
    while (at(Tok::Or)) {
      take();
      if (at_ident("false")) {
        take();
        continue;
      }
      a.disjuncts.push_back(disjunct(anon_count));
    }
    return a;
  }

  // cmd := choice (';' choice)*
  Command command() {
    Command c = choice();
    while (at(Tok::Semi)) {
      take();
      if (at(Tok::End) || at(Tok::RBrace) || at(Tok::RParen)) break;  // trailing ';'
      c = Command::seq(c, choice());
    }
    return c;
  }

  Command choice() {
    Command c = postfix();
    while (at(Tok::Plus)) {
      take();
      c = Command::choice(c, postfix());
    }
    return c;
  }

  Command postfix() {
    Command c = primary_cmd();
    while (at(Tok::Star)) {
      take();
      c = Command::star(c);
    }
    return c;
  }

  Command block() {
    expect(Tok::LBrace, "'{'");
    Command c = command();
    expect(Tok::RBrace, "'}'");
    return c;
  }

  Command primary_cmd() {
    try {
      return primary_cmd_inner();
    } catch (const SyntaxError&) {
      throw;
    }
  }

  Command primary_cmd_inner() {
    if (at(Tok::LBrace)) return block();
    if (at(Tok::LParen)) {
      take();
      Command c = command();
      expect(Tok::RParen, "')'");
      return c;
    }
    if (at(Tok::LBrack)) {
      take();
      Term a = term();
      expect(Tok::RBrack, "']'");
      expect(Tok::Assign, "':='");
      Term v = term();
      check_prog(a);
      check_prog(v);
      return Command::store(a, v);
    }
    if (at_ident("skip")) {
      take();
      return Command::skip();
    }
    if (at_ident("error")) {
      take();
      expect(Tok::LParen, "'('");
      expect(Tok::RParen, "')'");
      return Command::error();
    }
    if (at_ident("free")) {
      take();
      expect(Tok::LParen, "'('");
      Term t = term();
      expect(Tok::RParen, "')'");
      check_prog(t);
      return Command::free(t);
    }
    if (at_ident("assume")) {
      take();
      expect(Tok::LParen, "'('");
      PureFormula p = pure();
      expect(Tok::RParen, "')'");
      return Command::assume(p);
    }
    if (at_ident("local")) {
      take();
      std::string x = ident();
      if (at(Tok::Assign)) {
        take();
        Term t = term();
        check_prog(t);
        if (!at_ident("in")) fail("expected 'in'");
        take();
        return Command::local_init(x, t, block());
      }
      if (!at_ident("in")) fail("expected 'in'");
      take();
      return Command::local(x, block());
    }
    std::string x = ident();
    expect(Tok::Assign, "':='");
    if (at(Tok::Star)) {
      take();
      return Command::havoc(x);
    }
    if (at_ident("alloc") && peek(1).kind == Tok::LParen) {
      take();
      take();
      Term t = term();
      expect(Tok::RParen, "')'");
      check_prog(t);
      return Command::alloc(x, t);
    }
    if (at(Tok::LBrack)) {
      take();
      Term t = term();
      expect(Tok::RBrack, "']'");
      check_prog(t);
      return Command::load(x, t);
    }
    Term t = term();
    check_prog(t);
    return Command::assign(x, t);
  }

  void check_prog(const Term& t) {
    if (t.has_block_ops()) fail("program terms may not contain b or e");
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Term parse_term(const std::string& src) {
  Parser p(src);
  Term t = p.term();
  p.expect_end();
  return t;
}

PureFormula parse_pure(const std::string& src) {
  Parser p(src);
  auto f = p.pure();
  p.expect_end();
  return f;
}

SymbolicHeap parse_heap(const std::string& src) {
  Parser p(src);
  int n = 0;
  auto h = p.heap(nullptr, n);
  p.expect_end();
  return h;
}

Assertion parse_assertion(const std::string& src) {
  Parser p(src);
  auto a = p.assertion();
  p.expect_end();
  return a;
}

Command parse_command(const std::string& src) {
  Parser p(src);
  auto c = p.command();
  p.expect_end();
  return c;
}

}  // namespace islarr
