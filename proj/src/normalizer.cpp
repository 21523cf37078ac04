#include "trilog/normalizer.hpp"

#include <map>
#include <set>

namespace trilog {

namespace {

bool all_distinct_vars(const std::vector<Term>& ts) {
  std::set<std::string> seen;
  for (const auto& t : ts) {
    if (t.kind != Term::Kind::Var) return false;
    if (!seen.insert(t.name).second) return false;
  }
  return true;
}

bool calls_are_flat(const Clause& c) {
  for (const auto& seq : c.body)
    for (const auto& g : seq) {
      if (g.kind != Goal::Kind::Call) continue;
      for (const auto& a : g.args)
        if (a.kind != Term::Kind::Var) return false;
    }
  return true;
}

// Distinct goal sequences may share head variables only.
bool branches_share_only_head_vars(const Clause& c) {
  std::set<std::string> head;
  for (const auto& t : c.head_args)
    if (t.kind == Term::Kind::Var) head.insert(t.name);
  std::map<std::string, std::size_t> first_branch;
  for (std::size_t k = 0; k < c.body.size(); ++k) {
    for (const auto& v : vars_of(c.body[k])) {
      if (head.count(v)) continue;
      auto [it, inserted] = first_branch.emplace(v, k);
      if (!inserted && it->second != k) return false;
    }
  }
  return true;
}

Term rename_term(const Term& t, const std::map<std::string, std::string>& renaming) {
  if (t.kind == Term::Kind::Var) return Term::var(renaming.at(t.name));
  if (t.kind == Term::Kind::Const) return t;
  std::vector<Term> args;
  args.reserve(t.args.size());
  for (const auto& a : t.args) args.push_back(rename_term(a, renaming));
  return Term::compound(t.name, std::move(args));
}

class FreshNames {
 public:
  explicit FreshNames(std::set<std::string> taken) : taken_(std::move(taken)) {}

  std::string fresh(const std::string& stem) {
    std::string name = stem;
    while (taken_.count(name)) name = "_" + name;
    taken_.insert(name);
    return name;
  }

 private:
  std::set<std::string> taken_;
};

// One disjunct-to-be: the head arguments and goals of a single body
// alternative of a single source clause.
struct SourceBranch {
  const Clause* clause;
  const GoalSeq* goals;

  std::vector<std::string> vars() const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (const auto& t : clause->head_args) collect_vars(t, out, seen);
    for (const auto& g : *goals) collect_vars(g, out, seen);
    return out;
  }
};

}  // namespace

bool is_normal_clause(const Clause& c) {
  if (!all_distinct_vars(c.head_args)) return false;
  for (const auto& seq : c.body)
    if (seq.empty()) return false;
  return calls_are_flat(c) && branches_share_only_head_vars(c);
}

bool is_normal(const Program& p) {
  for (const auto& name : p.predicate_order()) {
    const Clause* c = p.single_clause(name);
    if (!c || !is_normal_clause(*c)) return false;
  }
  return true;
}

Program normalize(const Program& raw) {
  std::map<std::string, std::size_t> arity;
  for (const auto& c : raw.clauses) {
    auto [it, inserted] = arity.emplace(c.predicate, c.head_args.size());
    if (!inserted && it->second != c.head_args.size())
      throw NormalizeError(NormalizeError::Kind::ArityMismatch, c.predicate,
                           "clauses for " + c.predicate + " have differing arities");
  }
  for (const auto& c : raw.clauses)
    for (const auto& seq : c.body)
      for (const auto& g : seq) {
        if (g.kind != Goal::Kind::Call) continue;
        auto it = arity.find(g.predicate);
        if (it == arity.end())
          throw NormalizeError(NormalizeError::Kind::UndefinedPredicate, g.predicate,
                               "call to undefined predicate " + g.predicate);
        if (it->second != g.args.size())
          throw NormalizeError(NormalizeError::Kind::ArityMismatch, g.predicate,
                               "call to " + g.predicate + " with wrong arity");
      }

  Program out;
  out.type_decls = raw.type_decls;

  for (const auto& name : raw.predicate_order()) {
    auto defs = raw.clauses_of(name);
    if (defs.size() == 1 && is_normal_clause(*defs[0])) {
      out.clauses.push_back(*defs[0]);
      continue;
    }

    std::vector<SourceBranch> branches;
    for (const auto* c : defs)
      for (const auto& alt : c->body) branches.push_back({c, &alt});

    std::set<std::string> taken;
    for (const auto& b : branches)
      for (const auto& v : b.vars()) taken.insert(v);
    FreshNames names(taken);

    std::size_t n = defs[0]->head_args.size();
    Clause norm;
    norm.predicate = name;
    norm.pos = defs[0]->pos;
    std::vector<std::string> head_vars;
    for (std::size_t j = 0; j < n; ++j) {
      head_vars.push_back(names.fresh("_A" + std::to_string(j + 1)));
      norm.head_args.push_back(Term::var(head_vars.back()));
    }

    // Variables occurring in more than one branch must be renamed apart.
    std::map<std::string, int> branch_count;
    for (const auto& b : branches) {
      std::set<std::string> vs;
      for (const auto& v : b.vars()) vs.insert(v);
      for (const auto& v : vs) ++branch_count[v];
    }

    int flatten_counter = 0;
    for (std::size_t k = 0; k < branches.size(); ++k) {
      const SourceBranch& b = branches[k];
      std::map<std::string, std::string> renaming;
      for (const auto& v : b.vars())
        renaming[v] =
            branch_count[v] > 1 ? names.fresh(v + "_" + std::to_string(k + 1)) : v;

      GoalSeq seq;
      for (std::size_t j = 0; j < n; ++j)
        seq.push_back(Goal::unify(Term::var(head_vars[j]),
                                  rename_term(b.clause->head_args[j], renaming),
                                  b.clause->pos));
      for (const auto& g : *b.goals) {
        if (g.kind == Goal::Kind::Unify) {
          seq.push_back(Goal::unify(rename_term(g.left, renaming),
                                    rename_term(g.right, renaming), g.pos));
        } else {
          std::vector<Term> call_args;
          for (const auto& a : g.args) {
            Term renamed = rename_term(a, renaming);
            std::string v = names.fresh("_F" + std::to_string(++flatten_counter));
            seq.push_back(Goal::unify(Term::var(v), std::move(renamed), g.pos));
            call_args.push_back(Term::var(v));
          }
          seq.push_back(Goal::call(g.predicate, std::move(call_args), g.pos));
        }
      }
      norm.body.push_back(std::move(seq));
    }
    out.clauses.push_back(std::move(norm));
  }
  return out;
}

}  // namespace trilog
