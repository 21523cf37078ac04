#include "trilog/soundness.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace trilog {

bool value_has_type(const Value& v, const SimpleType& t, const Interpretation& i,
                    const Universe& u, const TypeVarEnv& env) {
  if (v.is_wrong()) return false;  // wrong has no type
  return tsem(t, i, u, env).count(v) > 0;
}

bool context_holds(const Context& g, const Interpretation& i, const State& s,
                   const Universe& u, const TypeVarEnv& env) {
  for (const auto& [x, t] : g) {
    auto it = s.find(x);
    if (it == s.end()) throw EvalError("state has no value for variable " + x);
    if (!value_has_type(it->second, t, i, u, env)) return false;
  }
  return true;
}

// -- build_interpretation ------------------------------------------------------

namespace {

void collect_symbols(const Term& t, std::set<std::string>& constants,
                     std::set<std::string>& functors) {
  if (t.kind == Term::Kind::Const) constants.insert(t.name);
  if (t.kind == Term::Kind::Compound) {
    functors.insert(t.name);
    for (const auto& a : t.args) collect_symbols(a, constants, functors);
  }
}

void collect_symbols(const Program& p, std::set<std::string>& constants,
                     std::set<std::string>& functors) {
  for (const auto& c : p.clauses) {
    for (const auto& t : c.head_args) collect_symbols(t, constants, functors);
    for (const auto& seq : c.body)
      for (const auto& g : seq) {
        if (g.kind == Goal::Kind::Unify) {
          collect_symbols(g.left, constants, functors);
          collect_symbols(g.right, constants, functors);
        } else {
          for (const auto& a : g.args) collect_symbols(a, constants, functors);
        }
      }
  }
}

std::size_t checked_product(const std::vector<std::size_t>& sizes, std::size_t cap) {
  std::size_t n = 1;
  for (std::size_t s : sizes) {
    if (s == 0) return 0;
    if (n > cap / s) throw UniverseTooLarge(cap);
    n *= s;
  }
  return n;
}

// Truth of a goal sequence only; anything non-true poisons the
// conjunction for good, so the fold can stop early.
bool seq_is_true(const GoalSeq& goals, const Interpretation& i, const State& s,
                 const Universe& u) {
  for (const auto& g : goals)
    if (eval_goal(g, i, s, u) != Tv::True) return false;
  return true;
}

}  // namespace

BuildResult build_interpretation(const Program& p, const DeclaredTypes& decls,
                                 const UniverseConfig& config,
                                 const CheckResult* checked, BuildTrace* trace) {
  BuildResult out;
  Universe& u = out.universe;
  Interpretation& interp = out.interpretation;
  u.depth_bound = config.depth_bound;
  u.max_states = config.max_states;

  std::set<std::string> constants, functors;
  collect_symbols(p, constants, functors);
  for (const auto& [sym, ct] : decls.type_of.entries) {
    if (ct.arg_types.empty())
      constants.insert(sym);
    else
      functors.insert(sym);
  }

  // Basic domains and constant values.
  std::map<std::string, std::string> token_domain;  // constant -> basic domain id
  switch (config.policy) {
    case UniverseConfig::Policy::ByType: {
      std::map<std::string, std::vector<std::string>> members;
      for (const auto& c : constants) {
        if (decls.claimed_by.count(c)) continue;  // tree leaf
        SimpleType bt = decls.constant_type(c).result;
        std::string base = bt.kind == SimpleType::Kind::Base ? bt.name
                           : is_integer_literal(c)           ? "int"
                                                             : "atom";
        members[base].push_back(c);
      }
      for (const auto& [base, extra] : config.extra_tokens)
        for (const auto& tok : extra) members[base].push_back(tok);
      for (auto& [base, tokens] : members) {
        std::sort(tokens.begin(), tokens.end());
        tokens.erase(std::unique(tokens.begin(), tokens.end()), tokens.end());
        Domain d;
        d.id = base;
        d.kind = Domain::Kind::Basic;
        for (const auto& tok : tokens) {
          d.members.push_back(Value::base(base, tok));
          token_domain[tok] = base;
        }
        std::sort(d.members.begin(), d.members.end());
        u.base_to_domain[base] = base;
        u.domains.push_back(std::move(d));
      }
      break;
    }
    case UniverseConfig::Policy::Singleton: {
      for (const auto& c : constants) {
        std::string id = "only_" + c;
        Domain d;
        d.id = id;
        d.kind = Domain::Kind::Basic;
        d.members.push_back(Value::base(id, c));
        token_domain[c] = id;
        u.domains.push_back(std::move(d));
      }
      break;
    }
    case UniverseConfig::Policy::Herbrand: {
      Domain d;
      d.id = "herbrand";
      d.kind = Domain::Kind::Basic;
      for (const auto& c : constants) {
        d.members.push_back(Value::base("herbrand", c));
        token_domain[c] = "herbrand";
      }
      std::sort(d.members.begin(), d.members.end());
      for (const auto& base : base_type_names()) u.base_to_domain[base] = "herbrand";
      u.domains.push_back(std::move(d));
      break;
    }
  }

  // Tree domains: leaves now, constructor closure below.
  bool build_trees = config.policy == UniverseConfig::Policy::ByType;
  if (build_trees) {
    for (const auto& [name, decl] : decls.named) {
      (void)decl;
      if (!decls.has_tree_domain(name)) continue;  // alias-style declaration
      Domain d;
      d.id = name;
      d.kind = Domain::Kind::Tree;
      u.domains.push_back(std::move(d));
    }
    for (const auto& [sym, owner] : decls.claimed_by) {
      const ConstructorType* ct = decls.type_of.find(sym);
      u.ctor_domain[sym] = owner;
      if (ct->arg_types.empty()) {
        u.find_domain(owner)->members.push_back(Value::tree(sym));
      } else {
        u.constructors[sym] = ConstructorSig{ct->arg_types, owner};
      }
    }
    for (auto& d : u.domains) std::sort(d.members.begin(), d.members.end());

    // Depth-bounded closure under the declared constructors.
    bool changed = true;
    while (changed) {
      changed = false;
      std::size_t total = 0;
      for (const auto& d : u.domains) total += d.members.size();
      if (total > config.max_universe_values)
        throw UniverseTooLarge(config.max_universe_values);
      for (const auto& [f, sig] : u.constructors) {
        std::vector<std::vector<Value>> candidates;
        std::vector<std::size_t> sizes;
        for (const auto& at : sig.arg_types) {
          std::set<std::string> span = spanned_domains(at, decls, u);
          std::vector<Value> vals;
          for (const auto& id : span) {
            const Domain* d = u.find_domain(id);
            if (d) vals.insert(vals.end(), d->members.begin(), d->members.end());
          }
          std::sort(vals.begin(), vals.end());
          candidates.push_back(std::move(vals));
          sizes.push_back(candidates.back().size());
        }
        if (checked_product(sizes, config.max_states) == 0) continue;
        Domain* home = u.find_domain(sig.result_domain);
        std::vector<Value> fresh;
        std::vector<std::size_t> idx(candidates.size(), 0);
        while (true) {
          std::vector<Value> children;
          children.reserve(candidates.size());
          for (std::size_t k = 0; k < candidates.size(); ++k)
            children.push_back(candidates[k][idx[k]]);
          Value tree = Value::tree(f, std::move(children));
          if (value_depth(tree) <= u.depth_bound && !home->contains(tree))
            fresh.push_back(std::move(tree));
          std::size_t k = 0;
          for (; k < candidates.size(); ++k) {
            if (++idx[k] < candidates[k].size()) break;
            idx[k] = 0;
          }
          if (k == candidates.size()) break;
        }
        if (!fresh.empty()) {
          home->members.insert(home->members.end(), fresh.begin(), fresh.end());
          std::sort(home->members.begin(), home->members.end());
          home->members.erase(std::unique(home->members.begin(), home->members.end()),
                              home->members.end());
          changed = true;
        }
      }
    }
  }

  u.domains.push_back(
      Domain{"bool", Domain::Kind::Bool, {Value::boolean(false), Value::boolean(true)}});
  u.domains.push_back(Domain{"wrong", Domain::Kind::Wrong, {Value::wrong()}});

  // Interpretation of constants. Every basic-domain token counts as a
  // constant symbol, configured extras included.
  for (const auto& c : constants) {
    if (build_trees && decls.claimed_by.count(c)) {
      interp.constants[c] = Value::tree(c);
    } else {
      auto it = token_domain.find(c);
      if (it == token_domain.end())
        throw EvalError("constant " + c + " has no domain under this policy");
      interp.constants[c] = Value::base(it->second, c);
    }
  }
  for (const auto& [token, domain] : token_domain)
    interp.constants.emplace(token, Value::base(domain, token));

  // Constructor functions: free tree building within the depth bound.
  for (const auto& f : functors) {
    auto sig_it = u.constructors.find(f);
    if (sig_it == u.constructors.end()) {
      if (build_trees)
        throw EvalError("functor " + f + " has no type declaration");
      continue;  // constants-only policies have no functions
    }
    const ConstructorSig& sig = sig_it->second;
    FuncValue fv;
    fv.result = sig.result_domain;
    std::vector<std::vector<Value>> candidates;
    for (const auto& at : sig.arg_types) {
      std::set<std::string> span = spanned_domains(at, decls, u);
      fv.signature.push_back(span);
      std::vector<Value> vals;
      for (const auto& id : span) {
        const Domain* d = u.find_domain(id);
        if (d) vals.insert(vals.end(), d->members.begin(), d->members.end());
      }
      std::sort(vals.begin(), vals.end());
      candidates.push_back(std::move(vals));
    }
    bool empty = false;
    for (const auto& c : candidates)
      if (c.empty()) empty = true;
    if (!empty) {
      std::vector<std::size_t> idx(candidates.size(), 0);
      while (true) {
        std::vector<Value> children;
        for (std::size_t k = 0; k < candidates.size(); ++k)
          children.push_back(candidates[k][idx[k]]);
        Value tree = Value::tree(f, children);
        if (value_depth(tree) <= u.depth_bound) fv.table.emplace(children, tree);
        std::size_t k = 0;
        for (; k < candidates.size(); ++k) {
          if (++idx[k] < candidates[k].size()) break;
          idx[k] = 0;
        }
        if (k == candidates.size()) break;
      }
    }
    interp.functions.emplace(f, std::move(fv));
  }

  // Predicates: signatures from checked types when available, otherwise
  // every basic and tree domain; tables start all-false.
  std::set<std::string> every_domain;
  for (const auto& d : u.domains)
    if (d.kind == Domain::Kind::Basic || d.kind == Domain::Kind::Tree)
      every_domain.insert(d.id);

  struct PredWork {
    const Clause* clause;
    std::vector<std::string> head_vars;
    std::vector<std::vector<std::string>> branch_locals;
  };
  std::map<std::string, PredWork> work;

  for (const auto& name : p.predicate_order()) {
    const Clause* c = p.single_clause(name);
    if (!c) throw EvalError("predicate " + name + " is not in normal form");
    FuncValue fv;
    fv.result = "bool";
    const PredicateCheck* pc = checked ? checked->find(name) : nullptr;
    if (pc && pc->ok && pc->scheme) {
      for (const auto& at : pc->scheme->body.arg_types)
        fv.signature.push_back(spanned_domains(at, decls, u));
    } else {
      fv.signature.assign(c->head_args.size(), every_domain);
    }
    std::vector<std::vector<Value>> candidates;
    std::vector<std::size_t> sizes;
    for (const auto& span : fv.signature) {
      std::vector<Value> vals;
      for (const auto& id : span) {
        const Domain* d = u.find_domain(id);
        if (d) vals.insert(vals.end(), d->members.begin(), d->members.end());
      }
      std::sort(vals.begin(), vals.end());
      candidates.push_back(std::move(vals));
      sizes.push_back(candidates.back().size());
    }
    std::size_t rows = checked_product(sizes, u.max_states);
    if (rows > 0) {
      std::vector<std::size_t> idx(candidates.size(), 0);
      while (true) {
        std::vector<Value> args;
        for (std::size_t k = 0; k < candidates.size(); ++k)
          args.push_back(candidates[k][idx[k]]);
        fv.table.emplace(std::move(args), Value::boolean(false));
        std::size_t k = 0;
        for (; k < candidates.size(); ++k) {
          if (++idx[k] < candidates[k].size()) break;
          idx[k] = 0;
        }
        if (k == candidates.size()) break;
      }
    }
    interp.predicates.emplace(name, std::move(fv));

    PredWork w;
    w.clause = c;
    for (const auto& t : c->head_args) w.head_vars.push_back(t.name);
    for (const auto& seq : c->body) {
      std::vector<std::string> locals;
      for (const auto& v : vars_of(seq))
        if (std::find(w.head_vars.begin(), w.head_vars.end(), v) == w.head_vars.end())
          locals.push_back(v);
      // The fixpoint rescans rows x local states per iteration; bound the
      // work at a multiple of the state cap (the scan short-circuits).
      std::vector<std::size_t> work_sizes(locals.size(), u.enumerable_values().size());
      work_sizes.push_back(std::max<std::size_t>(rows, 1));
      checked_product(work_sizes, 64 * u.max_states);
      w.branch_locals.push_back(std::move(locals));
    }
    work.emplace(name, std::move(w));
  }

  // Least-fixpoint iteration of the clause semantics from all-false.
  std::vector<Value> all_values = u.enumerable_values();
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& [name, w] : work) {
      FuncValue& fv = interp.predicates.at(name);
      for (auto& [args, result] : fv.table) {
        if (result.truth) continue;
        bool now_true = false;
        for (std::size_t k = 0; k < w.clause->body.size() && !now_true; ++k) {
          const auto& locals = w.branch_locals[k];
          StateEnumerator en(locals,
                             std::vector<std::vector<Value>>(locals.size(), all_values),
                             u.max_states);
          State s;
          while (en.next(s)) {
            for (std::size_t j = 0; j < w.head_vars.size(); ++j)
              s[w.head_vars[j]] = args[j];
            if (seq_is_true(w.clause->body[k], interp, s, u)) {
              now_true = true;
              break;
            }
          }
        }
        if (now_true) {
          result = Value::boolean(true);
          changed = true;
        }
      }
    }
    if (trace) {
      std::map<std::string, std::set<std::vector<Value>>> snapshot;
      for (const auto& [name, fv] : interp.predicates) {
        auto& trues = snapshot[name];
        for (const auto& [args, result] : fv.table)
          if (result.truth) trues.insert(args);
      }
      trace->push_back(std::move(snapshot));
    }
  }

  return out;
}

// -- semantic_typing_check -------------------------------------------------------

namespace {

std::set<std::string> basic_and_tree_ids(const Universe& u) {
  std::set<std::string> out;
  for (const auto& d : u.domains)
    if (d.kind == Domain::Kind::Basic || d.kind == Domain::Kind::Tree) out.insert(d.id);
  return out;
}

std::vector<TypeVarEnv> type_var_assignments(const std::set<std::string>& vars,
                                             const Universe& u) {
  if (vars.empty()) return {TypeVarEnv{}};
  std::set<std::string> id_set = basic_and_tree_ids(u);
  std::vector<std::string> ids(id_set.begin(), id_set.end());
  std::vector<TypeVarEnv> out;
  if (ids.empty()) return {TypeVarEnv{}};
  std::vector<std::string> names(vars.begin(), vars.end());
  std::vector<std::size_t> idx(names.size(), 0);
  while (true) {
    TypeVarEnv env;
    for (std::size_t k = 0; k < names.size(); ++k) {
      const Domain* d = u.find_domain(ids[idx[k]]);
      env[names[k]] = std::set<Value>(d->members.begin(), d->members.end());
    }
    out.push_back(std::move(env));
    std::size_t k = 0;
    for (; k < names.size(); ++k) {
      if (++idx[k] < ids.size()) break;
      idx[k] = 0;
    }
    if (k == names.size()) break;
    if (out.size() >= 64) break;  // assignment cap
  }
  return out;
}

std::set<std::string> context_type_vars(const Context& ctx) {
  std::set<std::string> vars;
  for (const auto& [x, t] : ctx) {
    (void)x;
    free_type_vars(t, vars);
  }
  return vars;
}

// Type variables that genuinely need domain-assignment enumeration: those
// occurring more than once or below the top level. A variable standing
// alone as one assumption ranges over every domain at once, which equals
// checking each assignment separately.
std::set<std::string> env_needed_vars(const std::vector<Context>& split) {
  std::map<std::string, int> count;
  std::set<std::string> nested;
  for (const auto& part : split) {
    for (const auto& [x, t] : part) {
      (void)x;
      if (t.kind == SimpleType::Kind::Var) {
        ++count[t.name];
      } else {
        for (const auto& v : free_type_vars(t)) {
          ++count[v];
          nested.insert(v);
        }
      }
    }
  }
  std::set<std::string> needed;
  for (const auto& [v, n] : count)
    if (n > 1 || nested.count(v)) needed.insert(v);
  return needed;
}

std::vector<Value> candidate_values(const SimpleType& t, const Interpretation& i,
                                    const Universe& u, const TypeVarEnv& env) {
  if (t.kind == SimpleType::Kind::Var && !env.count(t.name)) return u.enumerable_values();
  std::set<Value> s = tsem(t, i, u, env);
  return std::vector<Value>(s.begin(), s.end());
}

// All ways to hand the summands of each assumption to the m split parts;
// a part may also omit a variable entirely.
std::vector<std::vector<Context>> exhaustive_splits(const Context& ctx, std::size_t m,
                                                    std::size_t cap) {
  std::vector<std::vector<Context>> splits;
  std::vector<std::pair<std::string, std::vector<SimpleType>>> vars;
  for (const auto& [x, t] : ctx) {
    SimpleType n = normalize_sum(t);
    std::vector<SimpleType> summands =
        n.kind == SimpleType::Kind::Sum ? n.args : std::vector<SimpleType>{n};
    vars.emplace_back(x, std::move(summands));
  }

  std::vector<Context> current(m);
  std::function<void(std::size_t)> assign = [&](std::size_t vi) {
    if (splits.size() >= cap) return;
    if (vi == vars.size()) {
      splits.push_back(current);
      return;
    }
    const auto& [x, summands] = vars[vi];
    // Each summand goes to a nonempty subset of parts; a part's type is
    // the sum of summands it received.
    std::vector<std::vector<std::size_t>> chosen(m);
    std::function<void(std::size_t)> place = [&](std::size_t si) {
      if (splits.size() >= cap) return;
      if (si == summands.size()) {
        for (std::size_t part = 0; part < m; ++part) {
          if (chosen[part].empty()) {
            current[part].erase(x);
            continue;
          }
          std::vector<SimpleType> parts;
          for (std::size_t s : chosen[part]) parts.push_back(summands[s]);
          current[part][x] = normalize_sum(SimpleType::sum(std::move(parts)));
        }
        assign(vi + 1);
        for (std::size_t part = 0; part < m; ++part) current[part].erase(x);
        return;
      }
      // Nonempty subset of parts for summand si.
      for (std::size_t mask = 1; mask < (std::size_t(1) << m); ++mask) {
        for (std::size_t part = 0; part < m; ++part)
          if (mask & (std::size_t(1) << part)) chosen[part].push_back(si);
        place(si + 1);
        for (std::size_t part = 0; part < m; ++part)
          if (mask & (std::size_t(1) << part)) chosen[part].pop_back();
        if (splits.size() >= cap) return;
      }
    };
    place(0);
  };
  assign(0);
  return splits;
}

struct BranchOutcome {
  bool ok = true;
  std::size_t states = 0;
  std::size_t wrong = 0;
  std::size_t truncation = 0;
  std::optional<Counterexample> counterexample;
};

BranchOutcome check_branch(const Clause& c, std::size_t k, const Context& gamma,
                           const Interpretation& i, const Universe& u,
                           const TypeVarEnv& env) {
  BranchOutcome out;
  std::vector<std::string> vars;
  {
    std::set<std::string> seen;
    for (const auto& t : c.head_args) collect_vars(t, vars, seen);
    for (const auto& g : c.body[k]) collect_vars(g, vars, seen);
  }
  std::vector<std::vector<Value>> candidates;
  std::vector<Value> all = u.enumerable_values();
  for (const auto& v : vars) {
    auto it = gamma.find(v);
    if (it == gamma.end()) {
      candidates.push_back(all);
    } else {
      candidates.push_back(candidate_values(it->second, i, u, env));
    }
  }
  StateEnumerator en(vars, candidates, u.max_states);
  Goal head = Goal::call(c.predicate, c.head_args);
  State s;
  while (en.next(s)) {
    ++out.states;
    EvalStats stats;
    Tv body = eval_seq(c.body[k], i, s, u, &stats);
    Tv head_v = eval_call(head, i, s, u, &stats);
    if (body == Tv::Wrong || head_v == Tv::Wrong) {
      if (stats.truncation > 0) {
        ++out.truncation;
      } else {
        ++out.wrong;
        if (!out.counterexample) {
          Counterexample ce;
          ce.branch = k;
          ce.state = s;
          ce.detail = body == Tv::Wrong ? "branch body evaluates to wrong"
                                        : "head call evaluates to wrong";
          out.counterexample = std::move(ce);
        }
        out.ok = false;
        return out;
      }
    }
  }
  return out;
}

}  // namespace

namespace {

SemanticTypingReport try_split(const std::vector<Context>& split, const Clause& c,
                               const Interpretation& i, const Universe& u) {
  SemanticTypingReport attempt;
  attempt.witness_split = split;
  std::vector<TypeVarEnv> envs = type_var_assignments(env_needed_vars(split), u);
  bool failed = false;
  for (const auto& env : envs) {
    // Vacuity: an unsatisfiable part empties the whole quantification.
    bool vacuous = false;
    for (const auto& g : split) {
      for (const auto& [x, t] : g) {
        (void)x;
        if (candidate_values(t, i, u, env).empty()) {
          vacuous = true;
          break;
        }
      }
      if (vacuous) break;
    }
    if (vacuous) {
      attempt.vacuous = true;
      continue;
    }
    for (std::size_t k = 0; k < or_degree(c) && !failed; ++k) {
      BranchOutcome b = check_branch(c, k, split[k], i, u, env);
      attempt.states_checked += b.states;
      attempt.wrong_count += b.wrong;
      attempt.truncation_count += b.truncation;
      if (!b.ok) {
        attempt.counterexample = b.counterexample;
        failed = true;
      }
    }
    if (failed) break;
  }
  attempt.holds = !failed;
  return attempt;
}

}  // namespace

SemanticTypingReport semantic_typing_check(const Context& ctx, const Clause& c,
                                           const Interpretation& i, const Universe& u,
                                           const std::vector<Context>* preferred,
                                           std::size_t split_cap) {
  std::size_t m = or_degree(c);

  std::optional<SemanticTypingReport> first_failure;
  if (preferred && preferred->size() == m) {
    SemanticTypingReport r = try_split(*preferred, c, i, u);
    if (r.holds) return r;
    first_failure = std::move(r);
  }
  std::vector<std::vector<Context>> splits;
  if (m == 1) {
    splits.push_back({ctx});
  } else {
    splits = exhaustive_splits(ctx, m, split_cap);
  }
  for (const auto& split : splits) {
    SemanticTypingReport r = try_split(split, c, i, u);
    if (r.holds) return r;
    if (!first_failure) first_failure = std::move(r);
  }
  if (first_failure) return *first_failure;
  SemanticTypingReport empty;
  return empty;
}

SemanticTypingReport semantic_typing_check(const Context& ctx, const Term& t,
                                           const SimpleType& type,
                                           const Interpretation& i, const Universe& u) {
  SemanticTypingReport report;
  report.witness_split = {ctx};

  std::set<std::string> tvars = context_type_vars(ctx);
  free_type_vars(type, tvars);
  std::vector<TypeVarEnv> envs = type_var_assignments(tvars, u);

  std::vector<std::string> vars;
  {
    std::set<std::string> seen;
    collect_vars(t, vars, seen);
  }

  for (const auto& env : envs) {
    bool vacuous = false;
    for (const auto& [x, ty] : ctx) {
      (void)x;
      if (tsem(ty, i, u, env).empty()) vacuous = true;
    }
    if (vacuous) {
      report.vacuous = true;
      continue;
    }
    std::set<Value> target = tsem(type, i, u, env);
    std::vector<std::vector<Value>> candidates;
    std::vector<Value> all = u.enumerable_values();
    for (const auto& v : vars) {
      auto it = ctx.find(v);
      if (it == ctx.end()) {
        candidates.push_back(all);
      } else {
        std::set<Value> s = tsem(it->second, i, u, env);
        candidates.emplace_back(s.begin(), s.end());
      }
    }
    StateEnumerator en(vars, candidates, u.max_states);
    State s;
    while (en.next(s)) {
      ++report.states_checked;
      EvalStats stats;
      Value v = eval_term(t, i, s, u, &stats);
      if (!target.count(v)) {
        if (stats.truncation > 0) {
          ++report.truncation_count;
          continue;
        }
        ++report.wrong_count;
        Counterexample ce;
        ce.branch = 0;
        ce.state = s;
        ce.detail = "term evaluates to " + to_string(v) + " outside the type";
        report.counterexample = std::move(ce);
        return report;
      }
    }
  }
  report.holds = true;
  return report;
}

SemanticTypingReport semantic_typing_check(const Context& ctx, const Goal& g,
                                           const Interpretation& i, const Universe& u) {
  SemanticTypingReport report;
  report.witness_split = {ctx};

  std::vector<TypeVarEnv> envs = type_var_assignments(env_needed_vars({ctx}), u);
  std::vector<std::string> vars;
  {
    std::set<std::string> seen;
    collect_vars(g, vars, seen);
  }
  for (const auto& env : envs) {
    bool vacuous = false;
    for (const auto& [x, ty] : ctx) {
      (void)x;
      if (candidate_values(ty, i, u, env).empty()) vacuous = true;
    }
    if (vacuous) {
      report.vacuous = true;
      continue;
    }
    std::vector<std::vector<Value>> candidates;
    std::vector<Value> all = u.enumerable_values();
    for (const auto& v : vars) {
      auto it = ctx.find(v);
      candidates.push_back(it == ctx.end() ? all : candidate_values(it->second, i, u, env));
    }
    StateEnumerator en(vars, candidates, u.max_states);
    State s;
    while (en.next(s)) {
      ++report.states_checked;
      EvalStats stats;
      Tv v = eval_goal(g, i, s, u, &stats);
      if (v == Tv::Wrong) {
        if (stats.truncation > 0) {
          ++report.truncation_count;
          continue;
        }
        ++report.wrong_count;
        Counterexample ce;
        ce.branch = 0;
        ce.state = s;
        ce.detail = "goal evaluates to wrong";
        report.counterexample = std::move(ce);
        return report;
      }
    }
  }
  report.holds = true;
  return report;
}

// -- verify_soundness ---------------------------------------------------------------

VerifyReport verify_soundness(const Program& p, const DeclaredTypes& decls,
                              const UniverseConfig& config, const CheckResult& checked) {
  VerifyReport report;
  if (!checked.ok) return report;
  BuildResult built = build_interpretation(p, decls, config, &checked);

  bool all_ok = true;
  for (const auto& name : checked.order) {
    const PredicateCheck* pc = checked.find(name);
    const Clause* c = p.single_clause(name);
    if (!pc || !pc->ok || !c || !pc->derivation) continue;
    SemanticTypingReport r =
        semantic_typing_check(pc->derivation->ctx, *c, built.interpretation,
                              built.universe, &pc->branch_contexts);
    PredicateVerdict v;
    v.predicate = name;
    v.states_checked = r.states_checked;
    v.wrong_count = r.wrong_count;
    v.truncation_count = r.truncation_count;
    v.witness_split = r.witness_split;
    v.counterexample = r.counterexample;
    if (!r.holds) {
      v.status = "violation";
      all_ok = false;
    } else if (r.truncation_count > 0) {
      v.status = "truncated";
    } else {
      v.status = "ok";
    }
    report.predicates.push_back(std::move(v));
  }
  report.ok = all_ok;
  return report;
}

// -- generate_program -----------------------------------------------------------------

namespace {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed * 0x9E3779B97F4A7C15ull + 0xD1B54A32D192ED03ull) {}

  std::size_t below(std::size_t n) { return n == 0 ? 0 : engine_() % n; }

  bool percent(int p) { return below(100) < static_cast<std::size_t>(p); }

  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[below(xs.size())];
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

Program generate_program(std::uint64_t seed, const GenParams& params) {
  Rng rng(seed);
  Program p;
  if (params.max_predicates <= 0) return p;

  bool use_nat = params.max_arity > 0 && rng.percent(35);
  if (use_nat) {
    TypeDecl nat;
    nat.name = "nat";
    nat.body = SimpleType::sum(
        {SimpleType::constant("0"), SimpleType::app("s", {SimpleType::constant("nat")})});
    p.type_decls.push_back(std::move(nat));
  }

  // Keep the value universe small: it bounds the state enumeration.
  std::vector<std::string> int_tokens = use_nat ? std::vector<std::string>{"1"}
                                                : std::vector<std::string>{"1", "2"};
  std::vector<std::string> atom_tokens = use_nat ? std::vector<std::string>{"a"}
                                                 : std::vector<std::string>{"a", "b"};

  enum class Ty { Int, Atom, Nat };
  std::vector<Ty> palette{Ty::Int, Ty::Atom};
  if (use_nat) palette.push_back(Ty::Nat);

  bool inject_clash = rng.percent(params.illtyped_percent);

  struct PredSig {
    std::string name;
    std::vector<Ty> args;
  };
  std::vector<PredSig> sigs;

  std::size_t n_preds = 1 + rng.below(static_cast<std::size_t>(params.max_predicates));
  for (std::size_t pi = 0; pi < n_preds; ++pi) {
    PredSig sig;
    sig.name = "p" + std::to_string(pi);
    std::size_t arity = 1 + rng.below(static_cast<std::size_t>(params.max_arity));
    for (std::size_t k = 0; k < arity; ++k) sig.args.push_back(rng.pick(palette));
    sigs.push_back(sig);
  }

  std::size_t clash_pred = rng.below(n_preds);

  for (std::size_t pi = 0; pi < n_preds; ++pi) {
    const PredSig& sig = sigs[pi];
    Clause c;
    c.predicate = sig.name;
    std::vector<std::string> head_vars;
    for (std::size_t k = 0; k < sig.args.size(); ++k) {
      head_vars.push_back("X" + std::to_string(k + 1));
      c.head_args.push_back(Term::var(head_vars.back()));
    }

    std::size_t n_branches = 1 + rng.below(static_cast<std::size_t>(params.max_branches));
    for (std::size_t b = 0; b < n_branches; ++b) {
      GoalSeq seq;
      int locals = 0;
      // A small variable budget keeps exhaustive state enumeration
      // comfortably inside the default cap on a six-value universe.
      const std::size_t var_budget = 6;  // the clash injection may add one more
      auto local_name = [&]() {
        return "L" + std::to_string(b + 1) + "_" + std::to_string(++locals);
      };
      auto const_of = [&](Ty ty) -> Term {
        switch (ty) {
          case Ty::Int: return Term::constant(rng.pick(int_tokens));
          case Ty::Atom: return Term::constant(rng.pick(atom_tokens));
          case Ty::Nat:
            if (rng.percent(50)) return Term::constant("0");
            return Term::compound("s", {Term::constant("0")});
        }
        return Term::constant("1");
      };

      // Ground or pass through each head argument.
      std::map<std::string, Ty> var_ty;
      for (std::size_t k = 0; k < head_vars.size(); ++k) {
        var_ty[head_vars[k]] = sig.args[k];
        switch (rng.below(3)) {
          case 0:
            seq.push_back(Goal::unify(Term::var(head_vars[k]), const_of(sig.args[k])));
            break;
          case 1: {
            std::string l = local_name();
            var_ty[l] = sig.args[k];
            seq.push_back(Goal::unify(Term::var(head_vars[k]), Term::var(l)));
            break;
          }
          default:
            break;  // leave the argument unconstrained in this branch
        }
      }

      std::size_t extra = rng.below(static_cast<std::size_t>(params.max_goals));
      for (std::size_t e = 0; e < extra && seq.size() + 2 < 8; ++e) {
        switch (rng.below(3)) {
          case 0: {  // fresh local grounded to a constant
            if (var_ty.size() >= var_budget) break;
            std::string l = local_name();
            Ty ty = rng.pick(palette);
            var_ty[l] = ty;
            seq.push_back(Goal::unify(Term::var(l), const_of(ty)));
            break;
          }
          case 1: {  // call an earlier predicate with matching variables
            if (pi == 0) break;
            const PredSig& callee = sigs[rng.below(pi)];
            if (var_ty.size() + callee.args.size() > var_budget) break;
            std::vector<Term> args;
            for (Ty want : callee.args) {
              std::string found;
              for (const auto& [v, ty] : var_ty)
                if (ty == want && rng.percent(60)) {
                  found = v;
                  break;
                }
              if (found.empty()) {
                found = local_name();
                var_ty[found] = want;
              }
              args.push_back(Term::var(found));
            }
            seq.push_back(Goal::call(callee.name, std::move(args)));
            break;
          }
          default: {  // recursive call through the head variables
            if (!params.allow_recursion || !rng.percent(30)) break;
            std::vector<Term> args;
            for (const auto& hv : head_vars) args.push_back(Term::var(hv));
            seq.push_back(Goal::call(sig.name, std::move(args)));
            break;
          }
        }
      }

      if (inject_clash && pi == clash_pred && b == 0) {
        std::string l = local_name();
        seq.push_back(Goal::unify(Term::var(l), Term::constant(int_tokens[0])));
        seq.push_back(Goal::unify(Term::var(l), Term::constant(atom_tokens[0])));
      }

      if (seq.empty())
        seq.push_back(Goal::unify(Term::var(head_vars[0]), const_of(sig.args[0])));
      c.body.push_back(std::move(seq));
    }
    p.clauses.push_back(std::move(c));
  }
  return p;
}

}  // namespace trilog
