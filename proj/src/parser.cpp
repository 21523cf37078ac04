#include "trilog/parser.hpp"

#include <cctype>
#include <optional>
#include <set>

namespace trilog {

namespace {

enum class Tok {
  Atom,      // lowercase identifier
  Var,       // uppercase or '_' identifier
  Integer,
  LParen,
  RParen,
  LBracket,
  RBracket,
  Comma,
  Bar,
  Semicolon,
  Dot,
  Neck,      // :-
  Equals,
  Plus,
  Eof,
};

struct Token {
  Tok kind = Tok::Eof;
  std::string text;
  SourcePos pos;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return current_; }

  Token take() {
    Token t = current_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(current_.pos, msg);
  }

 private:
  void advance() {
    skip_trivia();
    current_.pos = {line_, col_};
    if (pos_ >= src_.size()) {
      current_ = {Tok::Eof, "", current_.pos};
      return;
    }
    char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
        bump();
      current_ = {Tok::Integer, src_.substr(start, pos_ - start), current_.pos};
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        bump();
      std::string text = src_.substr(start, pos_ - start);
      bool is_var = std::isupper(static_cast<unsigned char>(text[0])) || text[0] == '_';
      current_ = {is_var ? Tok::Var : Tok::Atom, std::move(text), current_.pos};
      return;
    }
    switch (c) {
      case '(': single(Tok::LParen); return;
      case ')': single(Tok::RParen); return;
      case '[': single(Tok::LBracket); return;
      case ']': single(Tok::RBracket); return;
      case ',': single(Tok::Comma); return;
      case '|': single(Tok::Bar); return;
      case ';': single(Tok::Semicolon); return;
      case '.': single(Tok::Dot); return;
      case '=': single(Tok::Equals); return;
      case '+': single(Tok::Plus); return;
      case ':':
        if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
          bump();
          bump();
          current_ = {Tok::Neck, ":-", current_.pos};
          return;
        }
        throw ParseError(current_.pos, "stray ':'");
      case '\'': {
        bump();
        std::size_t start = pos_;
        while (pos_ < src_.size() && src_[pos_] != '\'') bump();
        if (pos_ >= src_.size()) throw ParseError(current_.pos, "unterminated quoted atom");
        std::string text = src_.substr(start, pos_ - start);
        bump();
        current_ = {Tok::Atom, std::move(text), current_.pos};
        return;
      }
      default:
        throw ParseError(current_.pos, std::string("unexpected character '") + c + "'");
    }
  }

  void single(Tok k) {
    current_ = {k, std::string(1, src_[pos_]), current_.pos};
    bump();
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '%') {
        while (pos_ < src_.size() && src_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token current_;
};

class ProgramParser {
 public:
  explicit ProgramParser(const std::string& src) : lex_(src) {}

  Program parse() {
    Program p;
    while (lex_.peek().kind != Tok::Eof) {
      if (lex_.peek().kind == Tok::Neck) {
        p.type_decls.push_back(parse_type_decl());
      } else {
        p.clauses.push_back(parse_clause());
      }
    }
    std::set<std::string> decl_names;
    for (const auto& d : p.type_decls)
      if (!decl_names.insert(d.name).second)
        throw ParseError(d.pos, "duplicate type declaration: " + d.name);
    return p;
  }

 private:
  Token expect(Tok k, const std::string& what) {
    if (lex_.peek().kind != k) lex_.fail("expected " + what);
    return lex_.take();
  }

  bool accept(Tok k) {
    if (lex_.peek().kind == k) {
      lex_.take();
      return true;
    }
    return false;
  }

  // type_decl := ":-" "type" name ("(" params ")")? "=" sum "."
  TypeDecl parse_type_decl() {
    TypeDecl d;
    d.pos = lex_.peek().pos;
    expect(Tok::Neck, "':-'");
    Token kw = expect(Tok::Atom, "'type'");
    if (kw.text != "type") throw ParseError(kw.pos, "only ':- type' directives are supported");
    d.name = expect(Tok::Atom, "type name").text;
    if (accept(Tok::LParen)) {
      while (true) {
        const Token& t = lex_.peek();
        if (t.kind != Tok::Var && t.kind != Tok::Atom) lex_.fail("type parameter name");
        d.params.push_back(lex_.take().text);
        if (!accept(Tok::Comma)) break;
      }
      expect(Tok::RParen, "')'");
    }
    expect(Tok::Equals, "'='");
    decl_params_ = std::set<std::string>(d.params.begin(), d.params.end());
    d.body = parse_type_sum();
    decl_params_.clear();
    expect(Tok::Dot, "'.'");
    return d;
  }

  SimpleType parse_type_sum() {
    std::vector<SimpleType> parts{parse_type_atom()};
    while (accept(Tok::Plus)) parts.push_back(parse_type_atom());
    return SimpleType::sum(std::move(parts));
  }

  SimpleType parse_type_atom() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Tok::LParen: {
        lex_.take();
        SimpleType inner = parse_type_sum();
        expect(Tok::RParen, "')'");
        return inner;
      }
      case Tok::LBracket: {
        lex_.take();
        if (accept(Tok::RBracket)) return SimpleType::constant("[]");
        SimpleType head = parse_type_sum();
        expect(Tok::Bar, "'|'");
        SimpleType tail = parse_type_sum();
        expect(Tok::RBracket, "']'");
        return SimpleType::app("[|]", {std::move(head), std::move(tail)});
      }
      case Tok::Integer:
        return SimpleType::constant(lex_.take().text);
      case Tok::Var:
        return SimpleType::var(lex_.take().text);
      case Tok::Atom: {
        Token id = lex_.take();
        if (lex_.peek().kind == Tok::LParen) {
          lex_.take();
          std::vector<SimpleType> args{parse_type_sum()};
          while (accept(Tok::Comma)) args.push_back(parse_type_sum());
          expect(Tok::RParen, "')'");
          return SimpleType::app(id.text, std::move(args));
        }
        if (decl_params_.count(id.text)) return SimpleType::var(id.text);
        if (id.text == "bool")
          throw ParseError(id.pos, "bool may not occur in a type declaration");
        if (base_type_names().count(id.text)) return SimpleType::base(id.text);
        return SimpleType::constant(id.text);
      }
      default:
        lex_.fail("expected a type");
    }
  }

  // clause := atom ("(" terms ")")? (":-" body)? "."
  Clause parse_clause() {
    Clause c;
    c.pos = lex_.peek().pos;
    Token head = expect(Tok::Atom, "predicate name");
    c.predicate = head.text;
    if (lex_.peek().kind != Tok::LParen)
      throw ParseError(head.pos, "predicates require at least one argument");
    lex_.take();
    c.head_args.push_back(parse_term());
    while (accept(Tok::Comma)) c.head_args.push_back(parse_term());
    expect(Tok::RParen, "')'");
    if (accept(Tok::Neck)) {
      c.body = parse_body();
    } else {
      c.body = {GoalSeq{}};  // fact
    }
    expect(Tok::Dot, "'.'");
    return c;
  }

  // body := seq (";" seq)*; a parenthesized disjunction may stand as a
  // whole branch but cannot be conjoined with further goals.
  std::vector<GoalSeq> parse_body() {
    std::vector<GoalSeq> alts;
    while (true) {
      std::vector<GoalSeq> branch = parse_branch();
      for (auto& b : branch) alts.push_back(std::move(b));
      if (!accept(Tok::Semicolon)) break;
    }
    return alts;
  }

  std::vector<GoalSeq> parse_branch() {
    SourcePos start = lex_.peek().pos;
    std::vector<GoalSeq> nested;
    GoalSeq seq;
    bool saw_nested = false;
    while (true) {
      if (lex_.peek().kind == Tok::LParen) {
        lex_.take();
        std::vector<GoalSeq> inner = parse_body();
        expect(Tok::RParen, "')'");
        if (inner.size() == 1) {
          for (auto& g : inner[0]) seq.push_back(std::move(g));
        } else {
          nested = std::move(inner);
          saw_nested = true;
        }
      } else {
        seq.push_back(parse_goal());
      }
      if (!accept(Tok::Comma)) break;
      if (saw_nested)
        throw ParseError(start, "a parenthesized disjunction cannot be conjoined with goals");
    }
    if (saw_nested) {
      if (!seq.empty())
        throw ParseError(start, "a parenthesized disjunction cannot be conjoined with goals");
      return nested;
    }
    return {std::move(seq)};
  }

  Goal parse_goal() {
    SourcePos pos = lex_.peek().pos;
    Term first = parse_term();
    if (accept(Tok::Equals)) {
      Term second = parse_term();
      return Goal::unify(std::move(first), std::move(second), pos);
    }
    // A call: the term must be a compound with a lowercase functor.
    if (first.kind == Term::Kind::Compound)
      return Goal::call(first.name, std::move(first.args), pos);
    if (first.kind == Term::Kind::Const)
      throw ParseError(pos, "predicates require at least one argument");
    throw ParseError(pos, "expected a goal");
  }

  Term parse_term() {
    const Token& t = lex_.peek();
    switch (t.kind) {
      case Tok::Var:
        return Term::var(lex_.take().text);
      case Tok::Integer:
        return Term::constant(lex_.take().text);
      case Tok::Atom: {
        Token id = lex_.take();
        if (accept(Tok::LParen)) {
          std::vector<Term> args{parse_term()};
          while (accept(Tok::Comma)) args.push_back(parse_term());
          expect(Tok::RParen, "')'");
          return Term::compound(id.text, std::move(args));
        }
        return Term::constant(id.text);
      }
      case Tok::LBracket:
        return parse_list();
      default:
        lex_.fail("expected a term");
    }
  }

  // [] | [t,...] | [t,...|tail]
  Term parse_list() {
    expect(Tok::LBracket, "'['");
    if (accept(Tok::RBracket)) return Term::constant("[]");
    std::vector<Term> items{parse_term()};
    while (accept(Tok::Comma)) items.push_back(parse_term());
    Term tail = Term::constant("[]");
    if (accept(Tok::Bar)) tail = parse_term();
    expect(Tok::RBracket, "']'");
    for (auto it = items.rbegin(); it != items.rend(); ++it)
      tail = Term::compound("[|]", {std::move(*it), std::move(tail)});
    return tail;
  }

  Lexer lex_;
  std::set<std::string> decl_params_;
};

}  // namespace

Program parse_program(const std::string& source) {
  return ProgramParser(source).parse();
}

}  // namespace trilog
