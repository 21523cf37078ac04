#include "trilog/types.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace trilog {

int compare(const SimpleType& a, const SimpleType& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (int c = a.name.compare(b.name)) return c < 0 ? -1 : 1;
  if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (int c = compare(a.args[i], b.args[i])) return c;
  return 0;
}

SimpleType SimpleType::sum(std::vector<SimpleType> summands) {
  if (summands.size() == 1) return std::move(summands.front());
  SimpleType t;
  t.kind = Kind::Sum;
  t.args = std::move(summands);
  return t;
}

SimpleType normalize_sum(const SimpleType& t) {
  switch (t.kind) {
    case SimpleType::Kind::Var:
    case SimpleType::Kind::Const:
    case SimpleType::Kind::Base:
    case SimpleType::Kind::Bool:
      return t;
    case SimpleType::Kind::Mu:
      return SimpleType::mu(t.name, normalize_sum(t.mu_body()));
    case SimpleType::Kind::App: {
      std::vector<SimpleType> as;
      as.reserve(t.args.size());
      for (const auto& a : t.args) as.push_back(normalize_sum(a));
      return SimpleType::app(t.name, std::move(as));
    }
    case SimpleType::Kind::Sum: {
      std::vector<SimpleType> flat;
      for (const auto& a : t.args) {
        SimpleType na = normalize_sum(a);
        if (na.kind == SimpleType::Kind::Sum) {
          for (auto& s : na.args) flat.push_back(std::move(s));
        } else {
          flat.push_back(std::move(na));
        }
      }
      std::sort(flat.begin(), flat.end());
      flat.erase(std::unique(flat.begin(), flat.end()), flat.end());
      if (flat.size() == 1) return std::move(flat.front());
      SimpleType r;
      r.kind = SimpleType::Kind::Sum;
      r.args = std::move(flat);
      return r;
    }
  }
  return t;
}

void free_type_vars(const SimpleType& t, std::set<std::string>& out) {
  switch (t.kind) {
    case SimpleType::Kind::Var:
      out.insert(t.name);
      return;
    case SimpleType::Kind::Mu: {
      std::set<std::string> inner;
      free_type_vars(t.mu_body(), inner);
      inner.erase(t.name);
      out.insert(inner.begin(), inner.end());
      return;
    }
    default:
      for (const auto& a : t.args) free_type_vars(a, out);
      return;
  }
}

std::set<std::string> free_type_vars(const SimpleType& t) {
  std::set<std::string> out;
  free_type_vars(t, out);
  return out;
}

std::set<std::string> free_type_vars(const PredicateType& t) {
  std::set<std::string> out;
  for (const auto& a : t.arg_types) free_type_vars(a, out);
  return out;
}

namespace {

// Picks a binder name not free in any of the given types.
std::string fresh_binder(const std::string& hint, const std::set<std::string>& avoid) {
  if (!avoid.count(hint)) return hint;
  for (int i = 1;; ++i) {
    std::string cand = hint + std::to_string(i);
    if (!avoid.count(cand)) return cand;
  }
}

SimpleType subst_impl(const SimpleType& t, const TypeSubst& phi) {
  switch (t.kind) {
    case SimpleType::Kind::Var: {
      auto it = phi.find(t.name);
      return it == phi.end() ? t : it->second;
    }
    case SimpleType::Kind::Const:
    case SimpleType::Kind::Base:
    case SimpleType::Kind::Bool:
      return t;
    case SimpleType::Kind::Mu: {
      TypeSubst inner = phi;
      inner.erase(t.name);
      if (inner.empty()) return t;
      std::set<std::string> avoid;
      for (const auto& [v, img] : inner) {
        avoid.insert(v);
        free_type_vars(img, avoid);
      }
      if (avoid.count(t.name)) {
        std::set<std::string> body_free = free_type_vars(t.mu_body());
        avoid.insert(body_free.begin(), body_free.end());
        std::string nb = fresh_binder(t.name, avoid);
        TypeSubst rename{{t.name, SimpleType::var(nb)}};
        return SimpleType::mu(nb, subst_impl(subst_impl(t.mu_body(), rename), inner));
      }
      return SimpleType::mu(t.name, subst_impl(t.mu_body(), inner));
    }
    case SimpleType::Kind::App: {
      std::vector<SimpleType> as;
      as.reserve(t.args.size());
      for (const auto& a : t.args) as.push_back(subst_impl(a, phi));
      return SimpleType::app(t.name, std::move(as));
    }
    case SimpleType::Kind::Sum: {
      std::vector<SimpleType> as;
      as.reserve(t.args.size());
      for (const auto& a : t.args) as.push_back(subst_impl(a, phi));
      return SimpleType::sum(std::move(as));
    }
  }
  return t;
}

SimpleType canonical_impl(const SimpleType& t, std::map<std::string, std::string>& bound,
                          int& depth) {
  switch (t.kind) {
    case SimpleType::Kind::Var: {
      auto it = bound.find(t.name);
      if (it != bound.end()) return SimpleType::var(it->second);
      return t;
    }
    case SimpleType::Kind::Const:
    case SimpleType::Kind::Base:
    case SimpleType::Kind::Bool:
      return t;
    case SimpleType::Kind::Mu: {
      std::string fresh = "#" + std::to_string(depth++);
      auto prev = bound.find(t.name);
      std::optional<std::string> saved;
      if (prev != bound.end()) saved = prev->second;
      bound[t.name] = fresh;
      SimpleType body = canonical_impl(t.mu_body(), bound, depth);
      if (saved)
        bound[t.name] = *saved;
      else
        bound.erase(t.name);
      return SimpleType::mu(fresh, std::move(body));
    }
    case SimpleType::Kind::App: {
      std::vector<SimpleType> as;
      for (const auto& a : t.args) as.push_back(canonical_impl(a, bound, depth));
      return SimpleType::app(t.name, std::move(as));
    }
    case SimpleType::Kind::Sum: {
      std::vector<SimpleType> as;
      for (const auto& a : t.args) as.push_back(canonical_impl(a, bound, depth));
      std::sort(as.begin(), as.end());
      as.erase(std::unique(as.begin(), as.end()), as.end());
      return SimpleType::sum(std::move(as));
    }
  }
  return t;
}

}  // namespace

SimpleType subst(const SimpleType& t, const TypeSubst& phi) { return subst_impl(t, phi); }

PredicateType subst(const PredicateType& t, const TypeSubst& phi) {
  PredicateType r;
  r.arg_types.reserve(t.arg_types.size());
  for (const auto& a : t.arg_types) r.arg_types.push_back(subst_impl(a, phi));
  return r;
}

SimpleType canonical(const SimpleType& t) {
  std::map<std::string, std::string> bound;
  int depth = 0;
  return canonical_impl(normalize_sum(t), bound, depth);
}

bool type_equal(const SimpleType& a, const SimpleType& b) {
  return canonical(a) == canonical(b);
}

SimpleType unfold_mu(const SimpleType& t) {
  if (t.kind != SimpleType::Kind::Mu) return t;
  TypeSubst phi{{t.name, t}};
  return subst(t.mu_body(), phi);
}

bool contains_bool(const SimpleType& t) {
  if (t.kind == SimpleType::Kind::Bool) return true;
  for (const auto& a : t.args)
    if (contains_bool(a)) return true;
  return false;
}

// -- Matching ------------------------------------------------------------

namespace {

bool match_impl(const SimpleType& pat, const SimpleType& tgt, TypeSubst& phi,
                std::map<std::string, std::string>& binders) {
  if (pat.kind == SimpleType::Kind::Var) {
    auto bit = binders.find(pat.name);
    if (bit != binders.end()) {
      // Mu-bound in the pattern: must correspond to the paired binder.
      return tgt.kind == SimpleType::Kind::Var && tgt.name == bit->second;
    }
    auto it = phi.find(pat.name);
    if (it != phi.end()) return type_equal(it->second, tgt);
    // Target-side bound binders may not escape their scope through a
    // binding of a free pattern variable.
    std::set<std::string> tgt_free = free_type_vars(tgt);
    for (const auto& [pb, tb] : binders) {
      (void)pb;
      if (tgt_free.count(tb)) return false;
    }
    phi[pat.name] = tgt;
    return true;
  }
  if (pat.kind != tgt.kind) return false;
  switch (pat.kind) {
    case SimpleType::Kind::Const:
    case SimpleType::Kind::Base:
      return pat.name == tgt.name;
    case SimpleType::Kind::Bool:
      return true;
    case SimpleType::Kind::Mu: {
      auto saved = binders;
      binders[pat.name] = tgt.name;
      bool ok = match_impl(pat.mu_body(), tgt.mu_body(), phi, binders);
      binders = std::move(saved);
      return ok;
    }
    case SimpleType::Kind::App: {
      if (pat.name != tgt.name || pat.args.size() != tgt.args.size()) return false;
      for (std::size_t i = 0; i < pat.args.size(); ++i)
        if (!match_impl(pat.args[i], tgt.args[i], phi, binders)) return false;
      return true;
    }
    case SimpleType::Kind::Sum: {
      if (pat.args.size() != tgt.args.size()) return false;
      // Greedy pairing over the normalized orders; sufficient for the
      // declaration-shaped sums this checker produces.
      std::vector<bool> used(tgt.args.size(), false);
      for (const auto& ps : pat.args) {
        bool matched = false;
        for (std::size_t j = 0; j < tgt.args.size(); ++j) {
          if (used[j]) continue;
          TypeSubst trial = phi;
          auto tb = binders;
          if (match_impl(ps, tgt.args[j], trial, tb)) {
            phi = std::move(trial);
            used[j] = true;
            matched = true;
            break;
          }
        }
        if (!matched) return false;
      }
      return true;
    }
    default:
      return false;
  }
}

}  // namespace

std::optional<TypeSubst> match_type(const SimpleType& pattern, const SimpleType& target) {
  TypeSubst phi;
  std::map<std::string, std::string> binders;
  if (match_impl(normalize_sum(pattern), normalize_sum(target), phi, binders)) return phi;
  return std::nullopt;
}

// -- Printing ------------------------------------------------------------

namespace {

// Precedence: atoms > app > sum; predicate arrow lowest.
void print_type(std::ostream& os, const SimpleType& t, bool parenthesize_sum) {
  switch (t.kind) {
    case SimpleType::Kind::Var:
    case SimpleType::Kind::Base:
    case SimpleType::Kind::Const:
      os << t.name;
      return;
    case SimpleType::Kind::Bool:
      os << "bool";
      return;
    case SimpleType::Kind::Mu:
      os << "mu " << t.name << ". (";
      print_type(os, t.mu_body(), false);
      os << ")";
      return;
    case SimpleType::Kind::App:
      if (t.name == "[|]" && t.args.size() == 2) {
        os << "[";
        print_type(os, t.args[0], false);
        os << "|";
        print_type(os, t.args[1], false);
        os << "]";
        return;
      }
      os << t.name << "(";
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) os << ", ";
        print_type(os, t.args[i], false);
      }
      os << ")";
      return;
    case SimpleType::Kind::Sum: {
      if (parenthesize_sum) os << "(";
      for (std::size_t i = 0; i < t.args.size(); ++i) {
        if (i) os << " + ";
        print_type(os, t.args[i], true);
      }
      if (parenthesize_sum) os << ")";
      return;
    }
  }
}

}  // namespace

std::string to_string(const SimpleType& t) {
  std::ostringstream os;
  print_type(os, t, false);
  return os.str();
}

std::string to_string(const PredicateType& t) {
  std::ostringstream os;
  for (std::size_t i = 0; i < t.arg_types.size(); ++i) {
    if (i) os << " * ";
    print_type(os, t.arg_types[i], true);
  }
  os << " -> bool";
  return os.str();
}

std::string to_string(const TypeScheme& t) { return to_string(t.body); }

// -- Parsing -------------------------------------------------------------

const std::set<std::string>& base_type_names() {
  static const std::set<std::string> names{"int", "float", "atom", "char"};
  return names;
}

namespace {

struct TypeLexer {
  std::string src;
  std::size_t pos = 0;

  void skip_ws() {
    while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
  }

  bool eof() {
    skip_ws();
    return pos >= src.size();
  }

  char peek() {
    skip_ws();
    return pos < src.size() ? src[pos] : '\0';
  }

  bool consume(char c) {
    skip_ws();
    if (pos < src.size() && src[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  bool consume(const std::string& s) {
    skip_ws();
    if (src.compare(pos, s.size(), s) == 0) {
      pos += s.size();
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!consume(c)) fail(std::string("expected '") + c + "'");
  }

  [[noreturn]] void fail(const std::string& msg) {
    throw TypeParseError("type syntax error at offset " + std::to_string(pos) + ": " + msg);
  }

  std::optional<std::string> ident() {
    skip_ws();
    if (pos >= src.size()) return std::nullopt;
    char c = src[pos];
    if (!std::isalpha(static_cast<unsigned char>(c)) && c != '_') return std::nullopt;
    std::size_t start = pos;
    while (pos < src.size() &&
           (std::isalnum(static_cast<unsigned char>(src[pos])) || src[pos] == '_'))
      ++pos;
    return src.substr(start, pos - start);
  }

  std::optional<std::string> integer() {
    skip_ws();
    if (pos >= src.size() || !std::isdigit(static_cast<unsigned char>(src[pos])))
      return std::nullopt;
    std::size_t start = pos;
    while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
    return src.substr(start, pos - start);
  }
};

struct TypeParser {
  TypeLexer lex;
  std::set<std::string> bound_mu;

  SimpleType parse_sum() {
    std::vector<SimpleType> parts{parse_atomic()};
    while (lex.consume('+')) parts.push_back(parse_atomic());
    return SimpleType::sum(std::move(parts));
  }

  SimpleType parse_atomic() {
    if (lex.consume('(')) {
      SimpleType inner = parse_sum();
      lex.expect(')');
      return inner;
    }
    if (lex.consume('[')) {
      if (lex.consume(']')) return SimpleType::constant("[]");
      SimpleType head = parse_sum();
      lex.expect('|');
      SimpleType tail = parse_sum();
      lex.expect(']');
      return SimpleType::app("[|]", {std::move(head), std::move(tail)});
    }
    if (auto num = lex.integer()) return SimpleType::constant(*num);
    if (lex.peek() == '\'') {
      ++lex.pos;
      std::size_t start = lex.pos;
      while (lex.pos < lex.src.size() && lex.src[lex.pos] != '\'') ++lex.pos;
      if (lex.pos >= lex.src.size()) lex.fail("unterminated quoted constant");
      std::string sym = lex.src.substr(start, lex.pos - start);
      ++lex.pos;
      return SimpleType::constant(sym);
    }
    auto id = lex.ident();
    if (!id) lex.fail("expected a type");
    if (*id == "mu") {
      auto binder = lex.ident();
      if (!binder) lex.fail("expected mu binder name");
      lex.expect('.');
      bound_mu.insert(*binder);
      SimpleType body = parse_sum();
      bound_mu.erase(*binder);
      return SimpleType::mu(*binder, std::move(body));
    }
    if (*id == "bool") return SimpleType::boolean();
    if (lex.consume('(')) {
      std::vector<SimpleType> as{parse_sum()};
      while (lex.consume(',')) as.push_back(parse_sum());
      lex.expect(')');
      return SimpleType::app(*id, std::move(as));
    }
    if (bound_mu.count(*id)) return SimpleType::var(*id);
    if (std::isupper(static_cast<unsigned char>((*id)[0])) || (*id)[0] == '_')
      return SimpleType::var(*id);
    if (base_type_names().count(*id)) return SimpleType::base(*id);
    return SimpleType::var(*id);
  }
};

}  // namespace

ParsedType parse_type(const std::string& text) {
  TypeParser p;
  p.lex.src = text;
  std::vector<SimpleType> parts{p.parse_sum()};
  while (p.lex.consume('*')) parts.push_back(p.parse_sum());
  ParsedType result;
  if (p.lex.consume("->")) {
    auto id = p.lex.ident();
    if (!id || *id != "bool") p.lex.fail("predicate types end in bool");
    result.predicate = PredicateType{std::move(parts)};
  } else if (parts.size() == 1) {
    result.simple = std::move(parts.front());
  } else {
    p.lex.fail("product types require '-> bool'");
  }
  if (!p.lex.eof()) p.lex.fail("trailing input");
  return result;
}

SimpleType parse_simple_type(const std::string& text) {
  ParsedType p = parse_type(text);
  if (!p.simple) throw TypeParseError("expected a simple type: " + text);
  return *p.simple;
}

}  // namespace trilog
