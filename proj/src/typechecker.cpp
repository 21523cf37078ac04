#include "trilog/typechecker.hpp"

#include <algorithm>
#include <cassert>
#include <functional>
#include <sstream>

#include "trilog/normalizer.hpp"
#include "trilog/subtyping.hpp"

namespace trilog {

Context context_sum(const Context& g1, const Context& g2) {
  Context out = g1;
  for (const auto& [x, t] : g2) {
    auto it = out.find(x);
    if (it == out.end()) {
      out.emplace(x, t);
    } else {
      it->second = normalize_sum(SimpleType::sum({it->second, t}));
    }
  }
  return out;
}

std::string_view rule_name(Rule r) {
  switch (r) {
    case Rule::VAR: return "VAR";
    case Rule::CST: return "CST";
    case Rule::CPL: return "CPL";
    case Rule::UNF: return "UNF";
    case Rule::CLL: return "CLL";
    case Rule::CON: return "CON";
    case Rule::CLS: return "CLS";
    case Rule::RCLS: return "RCLS";
  }
  return "?";
}

bool Derivation::contains_rule(Rule r) const {
  if (rule == r) return true;
  for (const auto& p : premises)
    if (p.contains_rule(r)) return true;
  return false;
}

namespace {

constexpr const char* kUvarPrefix = "%u";

bool is_uvar(const SimpleType& t) {
  return t.kind == SimpleType::Kind::Var && t.name.rfind(kUvarPrefix, 0) == 0;
}

struct UnifyFailure {
  std::string kind;  // UnsatisfiableConstraints | OccursCheck
  SimpleType left, right;
};

/// First-order unification over simple types. Only unification variables
/// (names starting with "%u") may be bound; everything else is rigid.
/// Mu binders are compared up to alpha-renaming; sums unify pairwise in
/// normalized order.
class Unifier {
 public:
  SimpleType fresh_uvar() {
    return SimpleType::var(kUvarPrefix + std::to_string(counter_++));
  }

  SimpleType fresh_instance(const SimpleType& t) {
    TypeSubst phi;
    for (const auto& v : free_type_vars(t)) phi[v] = fresh_uvar();
    return subst(t, phi);
  }

  std::vector<SimpleType> fresh_instance(const std::vector<SimpleType>& ts) {
    TypeSubst phi;
    std::set<std::string> vars;
    for (const auto& t : ts)
      for (const auto& v : free_type_vars(t)) vars.insert(v);
    for (const auto& v : vars) phi[v] = fresh_uvar();
    std::vector<SimpleType> out;
    out.reserve(ts.size());
    for (const auto& t : ts) out.push_back(subst(t, phi));
    return out;
  }

  SimpleType resolve(const SimpleType& t) const {
    switch (t.kind) {
      case SimpleType::Kind::Var: {
        auto it = solution_.find(t.name);
        if (it == solution_.end()) return t;
        return resolve(it->second);
      }
      case SimpleType::Kind::Const:
      case SimpleType::Kind::Base:
      case SimpleType::Kind::Bool:
        return t;
      case SimpleType::Kind::Mu:
        return SimpleType::mu(t.name, resolve(t.mu_body()));
      case SimpleType::Kind::Sum: {
        std::vector<SimpleType> as;
        for (const auto& a : t.args) as.push_back(resolve(a));
        return normalize_sum(SimpleType::sum(std::move(as)));
      }
      case SimpleType::Kind::App: {
        std::vector<SimpleType> as;
        for (const auto& a : t.args) as.push_back(resolve(a));
        return SimpleType::app(t.name, std::move(as));
      }
    }
    return t;
  }

  std::optional<UnifyFailure> unify(const SimpleType& a, const SimpleType& b) {
    SimpleType x = resolve(a);
    SimpleType y = resolve(b);
    if (x == y) return std::nullopt;
    if (is_uvar(x)) return bind(x.name, y);
    if (is_uvar(y)) return bind(y.name, x);
    if (x.kind != y.kind) return UnifyFailure{"UnsatisfiableConstraints", x, y};
    switch (x.kind) {
      case SimpleType::Kind::Var:
      case SimpleType::Kind::Const:
      case SimpleType::Kind::Base:
        return UnifyFailure{"UnsatisfiableConstraints", x, y};
      case SimpleType::Kind::Bool:
        return std::nullopt;
      case SimpleType::Kind::App: {
        if (x.name != y.name || x.args.size() != y.args.size())
          return UnifyFailure{"UnsatisfiableConstraints", x, y};
        for (std::size_t k = 0; k < x.args.size(); ++k)
          if (auto err = unify(x.args[k], y.args[k])) return err;
        return std::nullopt;
      }
      case SimpleType::Kind::Mu: {
        SimpleType binder = SimpleType::var("%r" + std::to_string(counter_++));
        TypeSubst rx{{x.name, binder}}, ry{{y.name, binder}};
        return unify(subst(x.mu_body(), rx), subst(y.mu_body(), ry));
      }
      case SimpleType::Kind::Sum: {
        if (x.args.size() != y.args.size())
          return UnifyFailure{"UnsatisfiableConstraints", x, y};
        for (std::size_t k = 0; k < x.args.size(); ++k)
          if (auto err = unify(x.args[k], y.args[k])) return err;
        return std::nullopt;
      }
    }
    return UnifyFailure{"UnsatisfiableConstraints", x, y};
  }

 private:
  std::optional<UnifyFailure> bind(const std::string& name, const SimpleType& t) {
    if (occurs(name, t)) return UnifyFailure{"OccursCheck", SimpleType::var(name), t};
    solution_[name] = t;
    return std::nullopt;
  }

  bool occurs(const std::string& name, const SimpleType& t) const {
    SimpleType r = resolve(t);
    if (r.kind == SimpleType::Kind::Var) return r.name == name;
    for (const auto& a : r.args)
      if (occurs(name, a)) return true;
    return false;
  }

  TypeSubst solution_;
  int counter_ = 0;
};

/// Renames leftover unification variables to presentation names A, B, ...
class Finalizer {
 public:
  explicit Finalizer(int* counter) : counter_(counter) {}

  SimpleType finalize(const SimpleType& t) {
    switch (t.kind) {
      case SimpleType::Kind::Var: {
        if (bound_.count(t.name)) return t;  // mu-bound occurrence
        if (t.name.rfind('%', 0) != 0) return t;
        auto it = names_.find(t.name);
        if (it != names_.end()) return SimpleType::var(it->second);
        std::string pretty = next_name();
        names_[t.name] = pretty;
        return SimpleType::var(pretty);
      }
      case SimpleType::Kind::Const:
      case SimpleType::Kind::Base:
      case SimpleType::Kind::Bool:
        return t;
      case SimpleType::Kind::Mu: {
        // Keep internal mu binders readable as well.
        std::string binder = t.name;
        bool fresh_here = bound_.insert(binder).second;
        SimpleType body = finalize(t.mu_body());
        if (fresh_here) bound_.erase(binder);
        if (binder.rfind('%', 0) == 0) {
          std::string nb = mu_name(body);
          TypeSubst phi{{binder, SimpleType::var(nb)}};
          return SimpleType::mu(nb, subst(body, phi));
        }
        return SimpleType::mu(binder, std::move(body));
      }
      case SimpleType::Kind::Sum: {
        std::vector<SimpleType> as;
        for (const auto& a : t.args) as.push_back(finalize(a));
        return normalize_sum(SimpleType::sum(std::move(as)));
      }
      case SimpleType::Kind::App: {
        std::vector<SimpleType> as;
        for (const auto& a : t.args) as.push_back(finalize(a));
        return SimpleType::app(t.name, std::move(as));
      }
    }
    return t;
  }

 private:
  std::string next_name() {
    int n = (*counter_)++;
    std::string name(1, static_cast<char>('A' + n % 26));
    if (n >= 26) name += std::to_string(n / 26);
    return name;
  }

  static std::string mu_name(const SimpleType& body) {
    std::set<std::string> avoid = free_type_vars(body);
    for (char c = 'a'; c <= 'z'; ++c) {
      std::string cand(1, c);
      if (!avoid.count(cand)) return cand;
    }
    return "self";
  }

  int* counter_;
  std::map<std::string, std::string> names_;
  std::set<std::string> bound_;
};

// -- Static domain labels (UNF side condition) ------------------------------

// Identifies the semantic domain(s) a type's values can come from without
// reference to a concrete universe. Unification of two variables is only
// accepted when their common type stays within a single domain; weak
// Kleene equality across domains evaluates to wrong.
void static_domain_labels(const SimpleType& t, const DeclaredTypes& decls,
                          std::set<std::string>& out) {
  for (const auto& [name, decl] : decls.named) {
    if (decls.has_tree_domain(name) && match_type(decl.translation, t)) {
      out.insert("tree:" + name);
      return;
    }
  }
  switch (t.kind) {
    case SimpleType::Kind::Var:
      out.insert("var:" + t.name);
      return;
    case SimpleType::Kind::Base:
      out.insert("base:" + t.name);
      return;
    case SimpleType::Kind::Bool:
      out.insert("bool");
      return;
    case SimpleType::Kind::Const: {
      if (const ConstructorType* ct = decls.type_of.find(t.name)) {
        static_domain_labels(ct->result, decls, out);
      } else {
        out.insert(is_integer_literal(t.name) ? "base:int" : "base:atom");
      }
      return;
    }
    case SimpleType::Kind::App: {
      if (const ConstructorType* ct = decls.functor_type(t.name)) {
        static_domain_labels(ct->result, decls, out);
      } else {
        out.insert("ctor:" + t.name);
      }
      return;
    }
    case SimpleType::Kind::Mu:
      out.insert("mu:" + to_string(canonical(t)));
      return;
    case SimpleType::Kind::Sum:
      for (const auto& a : t.args) static_domain_labels(a, decls, out);
      return;
  }
}

bool single_domain(const SimpleType& t, const DeclaredTypes& decls) {
  std::set<std::string> labels;
  static_domain_labels(normalize_sum(t), decls, labels);
  return labels.size() <= 1;
}

// -- Shared inference machinery ----------------------------------------------

// Presentation form for diagnostics: internal unification and binder
// names replaced by readable ones.
std::string show_type(const Unifier& u, const SimpleType& t) {
  int counter = 0;
  Finalizer fin(&counter);
  return to_string(fin.finalize(u.resolve(t)));
}

struct Infer {
  const DeclaredTypes& decls;
  Unifier& u;
  std::map<std::string, SimpleType>* var_types;  // branch variable typing

  std::variant<SimpleType, Diagnostic> term_type(const Term& t) {
    switch (t.kind) {
      case Term::Kind::Var: {
        auto [it, inserted] = var_types->try_emplace(t.name, u.fresh_uvar());
        (void)inserted;
        return it->second;
      }
      case Term::Kind::Const:
        return u.fresh_instance(decls.constant_type(t.name).result);
      case Term::Kind::Compound: {
        const ConstructorType* ct = decls.functor_type(t.name);
        if (!ct)
          return Diagnostic{"UndeclaredSymbol", "", -1,
                            "no declared type for functor " + t.name, "", "", {}};
        if (ct->arg_types.size() != t.args.size())
          return Diagnostic{"UndeclaredSymbol", "", -1,
                            "functor " + t.name + " used with wrong arity", "", "", {}};
        std::vector<SimpleType> shape = ct->arg_types;
        shape.push_back(ct->result);
        std::vector<SimpleType> inst = u.fresh_instance(shape);
        for (std::size_t k = 0; k < t.args.size(); ++k) {
          auto arg = term_type(t.args[k]);
          if (auto* diag = std::get_if<Diagnostic>(&arg)) return *diag;
          if (auto err = u.unify(std::get<SimpleType>(arg), inst[k]))
            return Diagnostic{"ArgumentTypeMismatch", "", -1,
                              "argument " + std::to_string(k + 1) + " of " + t.name +
                                  " does not fit its declared type",
                              show_type(u, inst[k]),
                              show_type(u, std::get<SimpleType>(arg)),
                              {}};
        }
        return inst.back();
      }
    }
    return Diagnostic{"UndeclaredSymbol", "", -1, "unreachable", "", "", {}};
  }
};

Diagnostic at(Diagnostic d, const SourcePos& pos) {
  if (d.span == SourcePos{}) d.span = pos;
  return d;
}

// -- Derivation building under a fixed context -------------------------------

struct DerivationBuilder {
  const Context& ctx;
  const DeclaredTypes& decls;
  Unifier& u;
  Finalizer& fin;

  DerivationBuilder(const Context& c, const DeclaredTypes& d, Unifier& un, Finalizer& f)
      : ctx(c), decls(d), u(un), fin(f) {}

  SimpleType out_type(const SimpleType& t) { return fin.finalize(u.resolve(t)); }

  std::variant<Derivation, Diagnostic> term(const Term& t) {
    switch (t.kind) {
      case Term::Kind::Var: {
        auto it = ctx.find(t.name);
        if (it == ctx.end())
          return Diagnostic{"UnboundVariable", "", -1,
                            "variable " + t.name + " has no assumption", "", "", {}};
        Derivation d;
        d.rule = Rule::VAR;
        d.ctx = ctx;
        d.subject = t;
        d.type = it->second;
        return d;
      }
      case Term::Kind::Const: {
        Derivation d;
        d.rule = Rule::CST;
        d.ctx = ctx;
        d.subject = t;
        d.type = out_type(typing_.at(&t));
        return d;
      }
      case Term::Kind::Compound: {
        Derivation d;
        d.rule = Rule::CPL;
        d.ctx = ctx;
        d.subject = t;
        d.type = out_type(typing_.at(&t));
        for (const auto& a : t.args) {
          auto sub = term(a);
          if (auto* diag = std::get_if<Diagnostic>(&sub)) return *diag;
          d.premises.push_back(std::move(std::get<Derivation>(sub)));
        }
        return d;
      }
    }
    return Diagnostic{"UndeclaredSymbol", "", -1, "unreachable", "", "", {}};
  }

  // Infers the term against the shared unifier, remembering per-node
  // types so the derivation can be rebuilt with resolved types.
  std::variant<SimpleType, Diagnostic> infer(const Term& t) {
    switch (t.kind) {
      case Term::Kind::Var: {
        auto it = ctx.find(t.name);
        if (it == ctx.end())
          return Diagnostic{"UnboundVariable", "", -1,
                            "variable " + t.name + " has no assumption", "", "", {}};
        typing_[&t] = it->second;
        return it->second;
      }
      case Term::Kind::Const: {
        SimpleType inst = u.fresh_instance(decls.constant_type(t.name).result);
        typing_[&t] = inst;
        return inst;
      }
      case Term::Kind::Compound: {
        const ConstructorType* ct = decls.functor_type(t.name);
        if (!ct)
          return Diagnostic{"UndeclaredSymbol", "", -1,
                            "no declared type for functor " + t.name, "", "", {}};
        if (ct->arg_types.size() != t.args.size())
          return Diagnostic{"UndeclaredSymbol", "", -1,
                            "functor " + t.name + " used with wrong arity", "", "", {}};
        std::vector<SimpleType> shape = ct->arg_types;
        shape.push_back(ct->result);
        std::vector<SimpleType> inst = u.fresh_instance(shape);
        for (std::size_t k = 0; k < t.args.size(); ++k) {
          auto arg = infer(t.args[k]);
          if (auto* diag = std::get_if<Diagnostic>(&arg)) return *diag;
          if (auto err = u.unify(std::get<SimpleType>(arg), inst[k]))
            return Diagnostic{"ArgumentTypeMismatch", "", -1,
                              "argument " + std::to_string(k + 1) + " of " + t.name +
                                  " does not fit its declared type",
                              show_type(u, inst[k]),
                              show_type(u, std::get<SimpleType>(arg)),
                              {}};
        }
        typing_[&t] = inst.back();
        return inst.back();
      }
    }
    return Diagnostic{"UndeclaredSymbol", "", -1, "unreachable", "", "", {}};
  }

 private:
  std::map<const Term*, SimpleType> typing_;
};

}  // namespace

// -- check_term ----------------------------------------------------------------

std::variant<TermCheck, Diagnostic> check_term(const Context& ctx, const Term& t,
                                               const DeclaredTypes& decls) {
  Unifier u;
  int counter = 0;
  Finalizer fin(&counter);
  DerivationBuilder builder{ctx, decls, u, fin};
  auto inferred = builder.infer(t);
  if (auto* diag = std::get_if<Diagnostic>(&inferred)) return *diag;
  auto deriv = builder.term(t);
  if (auto* diag = std::get_if<Diagnostic>(&deriv)) return *diag;
  Derivation d = std::move(std::get<Derivation>(deriv));
  return TermCheck{d.type, std::move(d)};
}

// -- check_goal -----------------------------------------------------------------

std::variant<Derivation, Diagnostic> check_goal(const Context& ctx, const Goal& g,
                                                const DeclaredTypes& decls,
                                                const PredicateTypes& known,
                                                const SelfInfo* self) {
  if (g.kind == Goal::Kind::Unify) {
    Unifier u;
    int counter = 0;
    Finalizer fin(&counter);
    DerivationBuilder builder{ctx, decls, u, fin};
    auto t1 = builder.infer(g.left);
    if (auto* diag = std::get_if<Diagnostic>(&t1)) return at(*diag, g.pos);
    auto t2 = builder.infer(g.right);
    if (auto* diag = std::get_if<Diagnostic>(&t2)) return at(*diag, g.pos);
    if (u.unify(std::get<SimpleType>(t1), std::get<SimpleType>(t2)))
      return at(Diagnostic{"UnifyTypeMismatch", "", -1,
                           "sides of " + pretty(g) + " have no common type",
                           show_type(u, std::get<SimpleType>(t1)),
                           show_type(u, std::get<SimpleType>(t2)),
                           {}},
                g.pos);
    SimpleType common = u.resolve(std::get<SimpleType>(t1));
    if (!single_domain(common, decls))
      return at(Diagnostic{"UnifyTypeMismatch", "", -1,
                           "common type of " + pretty(g) +
                               " is a union spanning several domains",
                           to_string(common), to_string(common),
                           {}},
                g.pos);
    auto d1 = builder.term(g.left);
    if (auto* diag = std::get_if<Diagnostic>(&d1)) return at(*diag, g.pos);
    auto d2 = builder.term(g.right);
    if (auto* diag = std::get_if<Diagnostic>(&d2)) return at(*diag, g.pos);
    Derivation d;
    d.rule = Rule::UNF;
    d.ctx = ctx;
    d.subject = g;
    d.type = SimpleType::boolean();
    d.premises.push_back(std::move(std::get<Derivation>(d1)));
    d.premises.push_back(std::move(std::get<Derivation>(d2)));
    return d;
  }

  // CLL
  Derivation d;
  d.rule = Rule::CLL;
  d.ctx = ctx;
  d.subject = g;
  d.type = SimpleType::boolean();
  d.callee = g.predicate;

  std::vector<SimpleType> expected;
  bool recursive_call = self && self->predicate == g.predicate;
  if (recursive_call) {
    expected = self->head_types;
  } else {
    auto it = known.find(g.predicate);
    if (it == known.end())
      return at(Diagnostic{"UndefinedPredicate", g.predicate, -1,
                           "call to unchecked predicate " + g.predicate, "", "", {}},
                g.pos);
    Unifier u;
    expected = u.fresh_instance(it->second.body.arg_types);
    int counter = 0;
    Finalizer fin(&counter);
    for (auto& e : expected) e = fin.finalize(e);
  }
  if (expected.size() != g.args.size())
    return at(Diagnostic{"UndefinedPredicate", g.predicate, -1,
                         "call to " + g.predicate + " with wrong arity", "", "", {}},
              g.pos);

  for (std::size_t k = 0; k < g.args.size(); ++k) {
    if (g.args[k].kind != Term::Kind::Var)
      return at(Diagnostic{"CallArgNotSubtype", g.predicate, -1,
                           "call arguments must be variables (normalize first)", "", "",
                           {}},
                g.pos);
    auto it = ctx.find(g.args[k].name);
    if (it == ctx.end())
      return at(Diagnostic{"UnboundVariable", g.predicate, -1,
                           "variable " + g.args[k].name + " has no assumption", "", "", {}},
                g.pos);
    if (recursive_call) {
      if (!type_equal(it->second, expected[k]))
        return at(Diagnostic{"MonomorphismViolation", g.predicate, -1,
                             "recursive call argument " + std::to_string(k + 1) +
                                 " differs from the head type of this branch",
                             to_string(expected[k]), to_string(it->second),
                             {}},
                  g.pos);
    } else if (!is_subtype(it->second, expected[k])) {
      return at(Diagnostic{"CallArgNotSubtype", g.predicate, -1,
                           "argument " + std::to_string(k + 1) + " of call to " +
                               g.predicate + " is not a subtype of the expected type",
                           to_string(expected[k]), to_string(it->second),
                           {}},
                g.pos);
    }
  }
  d.callee_arg_types = std::move(expected);
  return d;
}

// -- check_clause ----------------------------------------------------------------

std::variant<Derivation, Diagnostic> check_clause(const std::vector<Context>& branch_ctxs,
                                                  const Clause& c,
                                                  const DeclaredTypes& decls,
                                                  const PredicateTypes& known) {
  if (branch_ctxs.size() != or_degree(c))
    return Diagnostic{"BranchTypeError", c.predicate, -1,
                      "expected one context per branch", "", "", c.pos};

  std::vector<std::string> head_vars;
  for (const auto& t : c.head_args) {
    if (t.kind != Term::Kind::Var)
      return Diagnostic{"BranchTypeError", c.predicate, -1,
                        "clause head is not in normal form", "", "", c.pos};
    head_vars.push_back(t.name);
  }

  bool recursive = false;
  for (const auto& seq : c.body)
    for (const auto& g : seq)
      if (g.kind == Goal::Kind::Call && g.predicate == c.predicate) recursive = true;

  // Off-head assumptions of all branches combine into the shared gamma.
  Context shared;
  std::vector<std::vector<SimpleType>> head_types(c.body.size());
  for (std::size_t k = 0; k < c.body.size(); ++k) {
    for (const auto& [x, t] : branch_ctxs[k]) {
      if (std::find(head_vars.begin(), head_vars.end(), x) != head_vars.end()) continue;
      auto it = shared.find(x);
      if (it != shared.end() && !type_equal(it->second, t))
        return Diagnostic{"BranchTypeError", c.predicate, static_cast<int>(k),
                          "variable " + x + " is typed differently in two branches",
                          to_string(it->second), to_string(t), c.pos};
      shared[x] = t;
    }
    for (const auto& hv : head_vars) {
      auto it = branch_ctxs[k].find(hv);
      if (it == branch_ctxs[k].end())
        return Diagnostic{"BranchTypeError", c.predicate, static_cast<int>(k),
                          "head variable " + hv + " missing from branch context", "", "",
                          c.pos};
      head_types[k].push_back(it->second);
    }
  }

  Derivation d;
  d.rule = recursive ? Rule::RCLS : Rule::CLS;
  d.subject = c;
  d.type = SimpleType::boolean();

  for (std::size_t k = 0; k < c.body.size(); ++k) {
    Context full = shared;
    for (std::size_t j = 0; j < head_vars.size(); ++j) full[head_vars[j]] = head_types[k][j];
    SelfInfo self{c.predicate, head_types[k]};
    Derivation con;
    con.rule = Rule::CON;
    con.ctx = full;
    con.subject = c.body[k];
    con.type = SimpleType::boolean();
    for (const auto& g : c.body[k]) {
      auto gd = check_goal(full, g, decls, known, &self);
      if (auto* diag = std::get_if<Diagnostic>(&gd)) {
        diag->predicate = c.predicate;
        diag->branch = static_cast<int>(k);
        return *diag;
      }
      con.premises.push_back(std::move(std::get<Derivation>(gd)));
    }
    d.premises.push_back(std::move(con));
  }

  Context conclusion = shared;
  for (std::size_t j = 0; j < head_vars.size(); ++j) {
    std::vector<SimpleType> parts;
    for (std::size_t k = 0; k < c.body.size(); ++k) parts.push_back(head_types[k][j]);
    conclusion[head_vars[j]] = normalize_sum(SimpleType::sum(std::move(parts)));
  }
  d.ctx = std::move(conclusion);
  return d;
}

// -- context reconstruction ----------------------------------------------------

namespace {

/// Clause-level reconstruction. All branches share one unifier (their
/// variables are disjoint); after the per-branch constraints are solved,
/// corresponding head-argument types are unified across branches when
/// possible so that recursive data structures come out with one shared
/// element type; positions that cannot be unified fall back to sums in
/// the CLS/RCLS conclusion.
class ClauseReconstructor {
 public:
  ClauseReconstructor(const std::vector<const GoalSeq*>& branches,
                      const std::vector<std::string>& head_vars,
                      const DeclaredTypes& decls, const PredicateTypes& known,
                      const std::string* self_predicate, bool cross_branch_unify)
      : branches_(branches),
        head_vars_(head_vars),
        decls_(decls),
        known_(known),
        self_(self_predicate),
        cross_branch_(cross_branch_unify) {}

  std::variant<std::vector<Context>, Diagnostic> run(int* fresh_counter) {
    std::vector<std::size_t> layout;
    int saved = *fresh_counter;
    auto first = attempt({}, &layout, fresh_counter);
    if (std::holds_alternative<std::vector<Context>>(first)) return first;

    // Retry alternative bindings for call arguments whose callee type is
    // a union; keep the first attempt's diagnostic if nothing succeeds.
    std::size_t combos = 1;
    for (std::size_t n : layout) {
      combos *= (n == 0 ? 1 : n);
      if (combos > 256) {
        combos = 256;
        break;
      }
    }
    std::vector<std::size_t> choices(layout.size(), 0);
    for (std::size_t round = 1; round < combos; ++round) {
      std::size_t carry = 1;
      for (std::size_t k = 0; k < choices.size() && carry; ++k) {
        choices[k] += carry;
        carry = 0;
        if (choices[k] >= layout[k]) {
          choices[k] = 0;
          carry = 1;
        }
      }
      int counter = saved;
      auto result = attempt(choices, nullptr, &counter);
      if (std::holds_alternative<std::vector<Context>>(result)) {
        *fresh_counter = counter;
        return result;
      }
    }
    return first;
  }

 private:
  using VarTypes = std::map<std::string, SimpleType>;

  std::variant<std::vector<Context>, Diagnostic> attempt(
      const std::vector<std::size_t>& choices, std::vector<std::size_t>* layout,
      int* fresh_counter) {
    Unifier u;
    std::vector<VarTypes> vars(branches_.size());

    struct PendingCall {
      std::size_t branch;
      const Goal* goal;
      std::vector<SimpleType> expected;
    };
    std::vector<PendingCall> calls;
    struct UnifiedGoal {
      const Goal* goal;
      SimpleType common;
    };
    std::vector<UnifiedGoal> unify_goals;

    for (std::size_t k = 0; k < branches_.size(); ++k) {
      VarTypes& vt = vars[k];
      for (const auto& hv : head_vars_) vt.emplace(hv, u.fresh_uvar());
      Infer infer{decls_, u, &vt};
      for (const auto& g : *branches_[k]) {
        if (g.kind == Goal::Kind::Unify) {
          auto t1 = infer.term_type(g.left);
          if (auto* diag = std::get_if<Diagnostic>(&t1)) return at(*diag, g.pos);
          auto t2 = infer.term_type(g.right);
          if (auto* diag = std::get_if<Diagnostic>(&t2)) return at(*diag, g.pos);
          if (auto err = u.unify(std::get<SimpleType>(t1), std::get<SimpleType>(t2)))
            return at(Diagnostic{err->kind, "", static_cast<int>(k),
                                 "cannot give both sides of " + pretty(g) + " one type",
                                 show_type(u, err->left), show_type(u, err->right),
                                 {}},
                      g.pos);
          unify_goals.push_back({&g, std::get<SimpleType>(t1)});
          continue;
        }
        for (const auto& a : g.args) {
          if (a.kind != Term::Kind::Var)
            return at(Diagnostic{"CallArgNotSubtype", g.predicate, static_cast<int>(k),
                                 "call arguments must be variables (normalize first)", "",
                                 "",
                                 {}},
                      g.pos);
          vt.try_emplace(a.name, u.fresh_uvar());
        }
        if (self_ && g.predicate == *self_) {
          // Monomorphism restriction: recursive-call arguments share the
          // head types of their branch.
          if (g.args.size() != head_vars_.size())
            return at(Diagnostic{"UndefinedPredicate", g.predicate, static_cast<int>(k),
                                 "recursive call with wrong arity", "", "", {}},
                      g.pos);
          for (std::size_t j = 0; j < g.args.size(); ++j) {
            if (auto err = u.unify(vt.at(g.args[j].name), vt.at(head_vars_[j])))
              return at(Diagnostic{"MonomorphismViolation", g.predicate,
                                   static_cast<int>(k),
                                   "recursive call argument " + std::to_string(j + 1) +
                                       " cannot share the head type of this branch",
                                   show_type(u, err->left), show_type(u, err->right),
                                   {}},
                        g.pos);
          }
          continue;
        }
        auto it = known_.find(g.predicate);
        if (it == known_.end())
          return at(Diagnostic{"UndefinedPredicate", g.predicate, static_cast<int>(k),
                               "call to unchecked predicate " + g.predicate, "", "", {}},
                    g.pos);
        if (it->second.body.arg_types.size() != g.args.size())
          return at(Diagnostic{"UndefinedPredicate", g.predicate, static_cast<int>(k),
                               "call to " + g.predicate + " with wrong arity", "", "", {}},
                    g.pos);
        calls.push_back({k, &g, u.fresh_instance(it->second.body.arg_types)});
      }
    }

    // Bind call arguments that stayed unconstrained; bound arguments are
    // checked against the callee by subtyping below.
    std::size_t choice_slot = 0;
    for (const auto& call : calls) {
      for (std::size_t j = 0; j < call.goal->args.size(); ++j) {
        SimpleType solved = u.resolve(vars[call.branch].at(call.goal->args[j].name));
        if (!is_uvar(solved)) continue;
        SimpleType rho = u.resolve(call.expected[j]);
        std::vector<SimpleType> candidates{rho};
        if (rho.kind == SimpleType::Kind::Sum)
          for (const auto& s : rho.args) candidates.push_back(s);
        std::size_t pick = choice_slot < choices.size() ? choices[choice_slot] : 0;
        if (layout) layout->push_back(candidates.size());
        ++choice_slot;
        if (pick >= candidates.size()) pick = 0;
        u.unify(solved, candidates[pick]);
      }
    }

    // Argument-wise cross-branch unification; failed positions become
    // sums in the conclusion.
    if (cross_branch_ && branches_.size() > 1) {
      for (const auto& hv : head_vars_) {
        Unifier trial = u;
        bool ok = true;
        for (std::size_t k = 1; k < branches_.size() && ok; ++k)
          if (trial.unify(vars[0].at(hv), vars[k].at(hv))) ok = false;
        if (ok) u = std::move(trial);
      }
    }

    // Finalize contexts in deterministic order.
    int local_counter = *fresh_counter;
    Finalizer fin(&local_counter);
    std::vector<Context> ctxs(branches_.size());
    for (std::size_t k = 0; k < branches_.size(); ++k) {
      std::vector<std::string> order = head_vars_;
      for (const auto& g : *branches_[k]) {
        std::vector<std::string> vs;
        std::set<std::string> seen;
        collect_vars(g, vs, seen);
        for (const auto& v : vs)
          if (std::find(order.begin(), order.end(), v) == order.end())
            order.push_back(v);
      }
      for (const auto& v : order) {
        auto it = vars[k].find(v);
        if (it == vars[k].end()) continue;
        ctxs[k][v] = fin.finalize(u.resolve(it->second));
      }
    }

    for (const auto& ug : unify_goals) {
      SimpleType common = fin.finalize(u.resolve(ug.common));
      if (!single_domain(common, decls_))
        return at(Diagnostic{"UnifyTypeMismatch", "", -1,
                             "common type of " + pretty(*ug.goal) +
                                 " is a union spanning several domains",
                             to_string(common), to_string(common),
                             {}},
                  ug.goal->pos);
    }

    for (const auto& call : calls) {
      for (std::size_t j = 0; j < call.goal->args.size(); ++j) {
        SimpleType found = ctxs[call.branch].at(call.goal->args[j].name);
        SimpleType want = fin.finalize(u.resolve(call.expected[j]));
        if (!is_subtype(found, want))
          return at(Diagnostic{"CallArgNotSubtype", call.goal->predicate,
                               static_cast<int>(call.branch),
                               "argument " + std::to_string(j + 1) + " of call to " +
                                   call.goal->predicate +
                                   " is not a subtype of the expected type",
                               to_string(want), to_string(found),
                               {}},
                    call.goal->pos);
      }
    }

    *fresh_counter = local_counter;
    return ctxs;
  }

  const std::vector<const GoalSeq*>& branches_;
  const std::vector<std::string>& head_vars_;
  const DeclaredTypes& decls_;
  const PredicateTypes& known_;
  const std::string* self_;
  bool cross_branch_;
};

}  // namespace

std::variant<Context, Diagnostic> reconstruct_branch_context(
    const GoalSeq& branch, const std::vector<std::string>& head_vars,
    const DeclaredTypes& decls, const PredicateTypes& known, const SelfInfo* self,
    int* fresh_counter) {
  std::vector<const GoalSeq*> branches{&branch};
  const std::string* self_name = self ? &self->predicate : nullptr;
  ClauseReconstructor rec(branches, head_vars, decls, known, self_name, false);
  auto result = rec.run(fresh_counter);
  if (auto* diag = std::get_if<Diagnostic>(&result)) return *diag;
  return std::get<std::vector<Context>>(result)[0];
}

// -- check_program ------------------------------------------------------------------

namespace {

// Tarjan-free SCC detection: iterative DFS looking for cycles through
// distinct predicates (self-loops are allowed).
bool has_mutual_recursion(const std::map<std::string, std::set<std::string>>& graph,
                          std::vector<std::string>& cycle_out) {
  std::map<std::string, int> state;  // 0 unseen, 1 on stack, 2 done
  std::vector<std::string> stack;
  std::function<bool(const std::string&)> dfs = [&](const std::string& n) -> bool {
    state[n] = 1;
    stack.push_back(n);
    auto it = graph.find(n);
    if (it != graph.end()) {
      for (const auto& m : it->second) {
        if (m == n) continue;
        int s = state.count(m) ? state[m] : 0;
        if (s == 1) {
          cycle_out.assign(std::find(stack.begin(), stack.end(), m), stack.end());
          return true;
        }
        if (s == 0 && dfs(m)) return true;
      }
    }
    stack.pop_back();
    state[n] = 2;
    return false;
  };
  for (const auto& [n, _] : graph) {
    (void)_;
    if ((state.count(n) ? state[n] : 0) == 0 && dfs(n)) return true;
  }
  return false;
}

std::vector<std::string> topo_order(const std::vector<std::string>& preds,
                                    const std::map<std::string, std::set<std::string>>& graph) {
  std::vector<std::string> order;
  std::set<std::string> done;
  std::function<void(const std::string&)> visit = [&](const std::string& n) {
    if (done.count(n)) return;
    done.insert(n);
    auto it = graph.find(n);
    if (it != graph.end())
      for (const auto& m : it->second)
        if (m != n) visit(m);
    order.push_back(n);
  };
  for (const auto& p : preds) visit(p);
  return order;
}

}  // namespace

CheckResult check_program(const Program& p, const DeclaredTypes& decls,
                          const Annotations* annotations) {
  CheckResult result;

  std::map<std::string, std::set<std::string>> graph;
  std::vector<std::string> preds = p.predicate_order();
  for (const auto& name : preds) {
    const Clause* c = p.single_clause(name);
    graph[name];
    if (!c) continue;
    for (const auto& seq : c->body)
      for (const auto& g : seq)
        if (g.kind == Goal::Kind::Call) graph[name].insert(g.predicate);
  }

  std::vector<std::string> cycle;
  if (has_mutual_recursion(graph, cycle)) {
    std::string names;
    for (const auto& n : cycle) names += (names.empty() ? "" : " -> ") + n;
    result.global.push_back(Diagnostic{"CyclicCallGraph", cycle.empty() ? "" : cycle[0], -1,
                                       "mutual recursion is not supported: " + names, "",
                                       "",
                                       {}});
    result.ok = false;
    return result;
  }

  result.order = topo_order(preds, graph);
  PredicateTypes known;
  bool all_ok = true;

  for (const auto& name : result.order) {
    PredicateCheck pc;
    pc.predicate = name;
    const Clause* c = p.single_clause(name);
    if (!c) {
      pc.errors.push_back(Diagnostic{"BranchTypeError", name, -1,
                                     "predicate is not in normal form (normalize first)",
                                     "", "",
                                     {}});
      all_ok = false;
      result.predicates.emplace(name, std::move(pc));
      continue;
    }

    std::vector<std::string> head_vars;
    for (const auto& t : c->head_args)
      if (t.kind == Term::Kind::Var) head_vars.push_back(t.name);

    for (const auto& seq : c->body)
      for (const auto& g : seq)
        if (g.kind == Goal::Kind::Call && g.predicate == name) pc.recursive = true;

    // Branch contexts: annotations win, otherwise reconstruction. For
    // recursive predicates reconstruction runs branch-locally with the
    // monomorphism constraints tying recursive calls to this branch's
    // head types.
    std::vector<Context> branch_ctxs;
    bool failed = false;
    if (annotations && annotations->count(name)) {
      branch_ctxs = annotations->at(name);
      if (branch_ctxs.size() != or_degree(*c)) {
        pc.errors.push_back(Diagnostic{"BranchTypeError", name, -1,
                                       "annotation has wrong branch count", "", "",
                                       c->pos});
        failed = true;
      }
    } else {
      int fresh_counter = 0;
      std::vector<const GoalSeq*> branches;
      for (const auto& seq : c->body) branches.push_back(&seq);
      ClauseReconstructor rec(branches, head_vars, decls, known,
                              pc.recursive ? &name : nullptr, true);
      auto ctxs = rec.run(&fresh_counter);
      if (auto* diag = std::get_if<Diagnostic>(&ctxs)) {
        Diagnostic d = *diag;
        d.predicate = name;
        pc.errors.push_back(std::move(d));
        failed = true;
      } else {
        branch_ctxs = std::move(std::get<std::vector<Context>>(ctxs));
      }
    }

    if (!failed) {
      auto deriv = check_clause(branch_ctxs, *c, decls, known);
      if (auto* diag = std::get_if<Diagnostic>(&deriv)) {
        pc.errors.push_back(*diag);
        failed = true;
      } else {
        Derivation d = std::move(std::get<Derivation>(deriv));
        if (auto bad = validate_derivation(d, decls, known)) {
          Diagnostic vd = *bad;
          vd.predicate = name;
          pc.errors.push_back(std::move(vd));
          failed = true;
        } else {
          pc.derivation = std::move(d);
          pc.branch_contexts = branch_ctxs;
          for (std::size_t k = 0; k < branch_ctxs.size(); ++k) {
            std::vector<SimpleType> hts;
            for (const auto& hv : head_vars) hts.push_back(branch_ctxs[k].at(hv));
            pc.branch_head_types.push_back(std::move(hts));
          }
          TypeScheme scheme;
          for (const auto& hv : head_vars)
            scheme.body.arg_types.push_back(pc.derivation->ctx.at(hv));
          scheme.quantified = free_type_vars(scheme.body);
          pc.scheme = scheme;
          known[name] = scheme;
          pc.ok = true;
        }
      }
    }
    if (failed) all_ok = false;
    result.predicates.emplace(name, std::move(pc));
  }

  result.ok = all_ok;
  return result;
}

// -- validate_derivation ---------------------------------------------------------------

namespace {

struct Validator {
  const DeclaredTypes& decls;
  const PredicateTypes& known;

  std::optional<Diagnostic> bad(const std::string& kind, const std::string& msg) const {
    return Diagnostic{kind, "", -1, msg, "", "", {}};
  }

  std::optional<Diagnostic> walk(const Derivation& d, const SelfInfo* self) const {
    switch (d.rule) {
      case Rule::VAR: {
        const Term* t = std::get_if<Term>(&d.subject);
        if (!t || t->kind != Term::Kind::Var) return bad("InvalidDerivation", "VAR subject");
        auto it = d.ctx.find(t->name);
        if (it == d.ctx.end() || !type_equal(it->second, d.type))
          return bad("InvalidDerivation", "VAR type differs from the context");
        if (!d.premises.empty()) return bad("InvalidDerivation", "VAR has premises");
        return std::nullopt;
      }
      case Rule::CST: {
        const Term* t = std::get_if<Term>(&d.subject);
        if (!t || t->kind != Term::Kind::Const) return bad("InvalidDerivation", "CST subject");
        SimpleType declared = decls.constant_type(t->name).result;
        if (!match_type(declared, d.type))
          return bad("InvalidDerivation",
                     "CST type of " + t->name + " is not an instance of its declaration");
        if (!d.premises.empty()) return bad("InvalidDerivation", "CST has premises");
        return std::nullopt;
      }
      case Rule::CPL: {
        const Term* t = std::get_if<Term>(&d.subject);
        if (!t || t->kind != Term::Kind::Compound)
          return bad("InvalidDerivation", "CPL subject");
        const ConstructorType* ct = decls.functor_type(t->name);
        if (!ct || ct->arg_types.size() != t->args.size() ||
            d.premises.size() != t->args.size())
          return bad("InvalidDerivation", "CPL arity");
        std::vector<SimpleType> pattern = ct->arg_types;
        pattern.push_back(ct->result);
        std::vector<SimpleType> target;
        for (const auto& pr : d.premises) target.push_back(pr.type);
        target.push_back(d.type);
        if (!match_type(SimpleType::app("@sig", pattern), SimpleType::app("@sig", target)))
          return bad("InvalidDerivation",
                     "CPL instantiation of " + t->name + " is inconsistent");
        for (std::size_t k = 0; k < d.premises.size(); ++k) {
          const Term* sub = std::get_if<Term>(&d.premises[k].subject);
          if (!sub || !(*sub == t->args[k]))
            return bad("InvalidDerivation", "CPL premise subject mismatch");
          if (d.premises[k].ctx != d.ctx)
            return bad("InvalidDerivation", "CPL premise context mismatch");
          if (auto r = walk(d.premises[k], self)) return r;
        }
        return std::nullopt;
      }
      case Rule::UNF: {
        const Goal* g = std::get_if<Goal>(&d.subject);
        if (!g || g->kind != Goal::Kind::Unify) return bad("InvalidDerivation", "UNF subject");
        if (d.type.kind != SimpleType::Kind::Bool)
          return bad("InvalidDerivation", "UNF concludes bool");
        if (d.premises.size() != 2) return bad("InvalidDerivation", "UNF premises");
        if (!type_equal(d.premises[0].type, d.premises[1].type))
          return bad("InvalidDerivation", "UNF sides have different types");
        if (!single_domain(d.premises[0].type, decls))
          return bad("UnifyTypeMismatch",
                     "UNF common type spans several domains: " +
                         to_string(d.premises[0].type));
        const Term* l = std::get_if<Term>(&d.premises[0].subject);
        const Term* r = std::get_if<Term>(&d.premises[1].subject);
        if (!l || !r || !(*l == g->left) || !(*r == g->right))
          return bad("InvalidDerivation", "UNF premise subjects mismatch");
        for (const auto& pr : d.premises) {
          if (pr.ctx != d.ctx) return bad("InvalidDerivation", "UNF premise context");
          if (auto res = walk(pr, self)) return res;
        }
        return std::nullopt;
      }
      case Rule::CLL: {
        const Goal* g = std::get_if<Goal>(&d.subject);
        if (!g || g->kind != Goal::Kind::Call) return bad("InvalidDerivation", "CLL subject");
        if (d.type.kind != SimpleType::Kind::Bool)
          return bad("InvalidDerivation", "CLL concludes bool");
        if (d.callee != g->predicate || d.callee_arg_types.size() != g->args.size())
          return bad("InvalidDerivation", "CLL callee record");
        bool recursive_call = self && self->predicate == g->predicate;
        if (recursive_call) {
          if (d.callee_arg_types.size() != self->head_types.size())
            return bad("InvalidDerivation", "CLL recursive arity");
          for (std::size_t k = 0; k < g->args.size(); ++k) {
            auto it = d.ctx.find(g->args[k].name);
            if (it == d.ctx.end())
              return bad("InvalidDerivation", "CLL argument not in context");
            if (!type_equal(it->second, self->head_types[k]))
              return bad("MonomorphismViolation",
                         "recursive call argument types differ from the branch head types");
          }
          return std::nullopt;
        }
        auto kt = known.find(g->predicate);
        if (kt == known.end())
          return bad("UndefinedPredicate", "callee " + g->predicate + " unknown");
        if (!match_type(SimpleType::app("@sig", kt->second.body.arg_types),
                        SimpleType::app("@sig", d.callee_arg_types)))
          return bad("InvalidDerivation",
                     "CLL expected types are not an instance of the callee's type");
        for (std::size_t k = 0; k < g->args.size(); ++k) {
          auto it = d.ctx.find(g->args[k].name);
          if (it == d.ctx.end()) return bad("InvalidDerivation", "CLL argument not in context");
          if (!is_subtype(it->second, d.callee_arg_types[k]))
            return bad("CallArgNotSubtype",
                       "argument " + std::to_string(k + 1) + " of " + g->predicate);
        }
        return std::nullopt;
      }
      case Rule::CON: {
        const GoalSeq* seq = std::get_if<GoalSeq>(&d.subject);
        if (!seq) return bad("InvalidDerivation", "CON subject");
        if (d.type.kind != SimpleType::Kind::Bool)
          return bad("InvalidDerivation", "CON concludes bool");
        if (d.premises.size() != seq->size())
          return bad("InvalidDerivation", "CON premise count");
        for (std::size_t k = 0; k < seq->size(); ++k) {
          const Goal* g = std::get_if<Goal>(&d.premises[k].subject);
          if (!g || !(*g == (*seq)[k]))
            return bad("InvalidDerivation", "CON premise subject");
          if (d.premises[k].ctx != d.ctx)
            return bad("InvalidDerivation", "CON premise context");
          if (d.premises[k].type.kind != SimpleType::Kind::Bool)
            return bad("InvalidDerivation", "CON premise type");
          if (auto r = walk(d.premises[k], self)) return r;
        }
        return std::nullopt;
      }
      case Rule::CLS:
      case Rule::RCLS: {
        const Clause* c = std::get_if<Clause>(&d.subject);
        if (!c) return bad("InvalidDerivation", "clause subject");
        if (d.type.kind != SimpleType::Kind::Bool)
          return bad("InvalidDerivation", "clause concludes bool");
        if (d.premises.size() != or_degree(*c))
          return bad("InvalidDerivation", "one premise per branch required");
        bool recursive = false;
        for (const auto& seq : c->body)
          for (const auto& g : seq)
            if (g.kind == Goal::Kind::Call && g.predicate == c->predicate)
              recursive = true;
        if (recursive != (d.rule == Rule::RCLS))
          return bad("InvalidDerivation", recursive ? "recursive predicate needs RCLS"
                                                    : "CLS is for non-recursive predicates");
        std::vector<std::string> head_vars;
        for (const auto& t : c->head_args) {
          if (t.kind != Term::Kind::Var)
            return bad("InvalidDerivation", "clause head not in normal form");
          head_vars.push_back(t.name);
        }
        // Argument-wise sums across branches.
        for (std::size_t j = 0; j < head_vars.size(); ++j) {
          std::vector<SimpleType> parts;
          for (const auto& pr : d.premises) {
            auto it = pr.ctx.find(head_vars[j]);
            if (it == pr.ctx.end())
              return bad("InvalidDerivation", "branch context misses a head variable");
            parts.push_back(it->second);
          }
          auto it = d.ctx.find(head_vars[j]);
          if (it == d.ctx.end() ||
              !type_equal(it->second, SimpleType::sum(std::move(parts))))
            return bad("InvalidDerivation",
                       "conclusion head type is not the argument-wise branch sum");
        }
        for (std::size_t k = 0; k < d.premises.size(); ++k) {
          const GoalSeq* seq = std::get_if<GoalSeq>(&d.premises[k].subject);
          if (!seq || !(*seq == c->body[k]))
            return bad("InvalidDerivation", "branch premise subject mismatch");
          // Branch context: conclusion context with the head variables
          // retyped to this branch's types.
          Context expect = d.ctx;
          for (const auto& hv : head_vars) expect[hv] = d.premises[k].ctx.at(hv);
          if (d.premises[k].ctx != expect)
            return bad("InvalidDerivation", "branch premise context mismatch");
          std::vector<SimpleType> head_types;
          for (const auto& hv : head_vars) head_types.push_back(d.premises[k].ctx.at(hv));
          SelfInfo branch_self{c->predicate, head_types};
          if (auto r = walk(d.premises[k], &branch_self)) return r;
        }
        return std::nullopt;
      }
    }
    return bad("InvalidDerivation", "unknown rule");
  }
};

}  // namespace

std::optional<Diagnostic> validate_derivation(const Derivation& d,
                                              const DeclaredTypes& decls,
                                              const PredicateTypes& known) {
  Validator v{decls, known};
  return v.walk(d, nullptr);
}

}  // namespace trilog
