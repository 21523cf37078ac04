#include "trilog/semantics.hpp"

#include <algorithm>
#include <sstream>

namespace trilog {

int compare(const Value& a, const Value& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (int c = a.domain.compare(b.domain)) return c < 0 ? -1 : 1;
  if (int c = a.sym.compare(b.sym)) return c < 0 ? -1 : 1;
  if (a.truth != b.truth) return a.truth < b.truth ? -1 : 1;
  if (a.children.size() != b.children.size())
    return a.children.size() < b.children.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (int c = compare(a.children[i], b.children[i])) return c;
  return 0;
}

int value_depth(const Value& v) {
  if (v.kind != Value::Kind::Tree || v.children.empty()) return 0;
  int d = 0;
  for (const auto& c : v.children) d = std::max(d, value_depth(c));
  return d + 1;
}

std::string to_string(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Base:
      return v.sym;
    case Value::Kind::Bool:
      return v.truth ? "true" : "false";
    case Value::Kind::Wrong:
      return "wrong";
    case Value::Kind::Tree: {
      if (v.children.empty()) return v.sym;
      if (v.sym == "[|]" && v.children.size() == 2) {
        std::ostringstream os;
        os << "[";
        const Value* cur = &v;
        bool first = true;
        while (cur->kind == Value::Kind::Tree && cur->sym == "[|]" &&
               cur->children.size() == 2) {
          if (!first) os << ",";
          os << to_string(cur->children[0]);
          first = false;
          cur = &cur->children[1];
        }
        if (!(cur->kind == Value::Kind::Tree && cur->sym == "[]" && cur->children.empty())) {
          os << "|" << to_string(*cur);
        }
        os << "]";
        return os.str();
      }
      std::ostringstream os;
      os << v.sym << "(";
      for (std::size_t i = 0; i < v.children.size(); ++i) {
        if (i) os << ",";
        os << to_string(v.children[i]);
      }
      os << ")";
      return os.str();
    }
  }
  return "wrong";
}

bool Domain::contains(const Value& v) const {
  return std::binary_search(members.begin(), members.end(), v);
}

const Domain* Universe::find_domain(const std::string& id) const {
  for (const auto& d : domains)
    if (d.id == id) return &d;
  return nullptr;
}

Domain* Universe::find_domain(const std::string& id) {
  for (auto& d : domains)
    if (d.id == id) return &d;
  return nullptr;
}

std::string Universe::domain_of(const Value& v) const {
  switch (v.kind) {
    case Value::Kind::Bool:
      return "bool";
    case Value::Kind::Wrong:
      return "wrong";
    case Value::Kind::Base:
      return v.domain;
    case Value::Kind::Tree: {
      auto it = ctor_domain.find(v.sym);
      return it == ctor_domain.end() ? std::string() : it->second;
    }
  }
  return {};
}

std::vector<Value> Universe::enumerable_values() const {
  std::vector<Value> out;
  for (const auto& d : domains) {
    if (d.kind != Domain::Kind::Basic && d.kind != Domain::Kind::Tree) continue;
    out.insert(out.end(), d.members.begin(), d.members.end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

// -- Evaluation ------------------------------------------------------------

namespace {

const FuncValue& function_of(const Interpretation& i, const std::string& f) {
  auto it = i.functions.find(f);
  if (it == i.functions.end()) throw EvalError("no interpretation for functor " + f);
  return it->second;
}

const FuncValue& predicate_of(const Interpretation& i, const std::string& p) {
  auto it = i.predicates.find(p);
  if (it == i.predicates.end()) throw EvalError("no interpretation for predicate " + p);
  return it->second;
}

// domain(v) must lie inside the signature's domain union at each position.
bool signature_admits(const FuncValue& f, const std::vector<Value>& args,
                      const Universe& u) {
  if (args.size() != f.signature.size()) return false;
  for (std::size_t k = 0; k < args.size(); ++k) {
    std::string d = u.domain_of(args[k]);
    if (d.empty() || !f.signature[k].count(d)) return false;
  }
  return true;
}

Value apply_function(const FuncValue& f, const std::vector<Value>& args,
                     const Universe& u, EvalStats* stats) {
  if (!signature_admits(f, args, u)) return Value::wrong();
  auto it = f.table.find(args);
  if (it == f.table.end()) {
    // Arguments are inside the declared domains, so the only way the
    // table can miss is the depth bound cutting off the result.
    if (stats) ++stats->truncation;
    return Value::wrong();
  }
  return it->second;
}

}  // namespace

Value eval_term(const Term& t, const Interpretation& i, const State& s,
                const Universe& u, EvalStats* stats) {
  switch (t.kind) {
    case Term::Kind::Var: {
      auto it = s.find(t.name);
      if (it == s.end()) throw EvalError("state has no value for variable " + t.name);
      return it->second;
    }
    case Term::Kind::Const: {
      auto it = i.constants.find(t.name);
      if (it == i.constants.end())
        throw EvalError("no interpretation for constant " + t.name);
      return it->second;
    }
    case Term::Kind::Compound: {
      const FuncValue& f = function_of(i, t.name);
      std::vector<Value> args;
      args.reserve(t.args.size());
      for (const auto& a : t.args) args.push_back(eval_term(a, i, s, u, stats));
      return apply_function(f, args, u, stats);
    }
  }
  return Value::wrong();
}

Tv eval_unify(const Term& t1, const Term& t2, const Interpretation& i, const State& s,
              const Universe& u, EvalStats* stats) {
  Value v1 = eval_term(t1, i, s, u, stats);
  Value v2 = eval_term(t2, i, s, u, stats);
  if (v1 == v2 && !v1.is_wrong()) return Tv::True;
  if (!v1.is_wrong() && !v2.is_wrong() && u.domain_of(v1) == u.domain_of(v2) &&
      !u.domain_of(v1).empty())
    return Tv::False;
  return Tv::Wrong;
}

Tv eval_call(const Goal& call, const Interpretation& i, const State& s,
             const Universe& u, EvalStats* stats) {
  const FuncValue& f = predicate_of(i, call.predicate);
  std::vector<Value> args;
  args.reserve(call.args.size());
  for (const auto& a : call.args) args.push_back(eval_term(a, i, s, u, stats));
  Value r = apply_function(f, args, u, stats);
  if (r.kind != Value::Kind::Bool) return Tv::Wrong;
  return r.truth ? Tv::True : Tv::False;
}

Tv eval_goal(const Goal& g, const Interpretation& i, const State& s, const Universe& u,
             EvalStats* stats) {
  if (g.kind == Goal::Kind::Unify) return eval_unify(g.left, g.right, i, s, u, stats);
  return eval_call(g, i, s, u, stats);
}

Tv eval_seq(const GoalSeq& goals, const Interpretation& i, const State& s,
            const Universe& u, EvalStats* stats) {
  Tv acc = Tv::True;  // empty conjunction
  for (const auto& g : goals) acc = tv_and(acc, eval_goal(g, i, s, u, stats));
  return acc;
}

Tv eval_body(const std::vector<GoalSeq>& body, const Interpretation& i,
             const std::vector<State>& states, const Universe& u, EvalStats* stats) {
  if (states.size() != body.size())
    throw std::invalid_argument("eval_body: state list length differs from or_degree");
  Tv acc = eval_seq(body[0], i, states[0], u, stats);
  for (std::size_t k = 1; k < body.size(); ++k)
    acc = tv_or(acc, eval_seq(body[k], i, states[k], u, stats));
  return acc;
}

Tv eval_clause(const Clause& c, const Interpretation& i, const std::vector<State>& states,
               const Universe& u, EvalStats* stats) {
  if (states.size() != or_degree(c))
    throw std::invalid_argument("eval_clause: state list length differs from or_degree");
  Tv body = eval_body(c.body, i, states, u, stats);
  Goal head = Goal::call(c.predicate, c.head_args);
  Tv heads = eval_call(head, i, states[0], u, stats);
  for (std::size_t k = 1; k < states.size(); ++k)
    heads = tv_and(heads, eval_call(head, i, states[k], u, stats));
  return tv_implies(body, heads);
}

// -- State enumeration -------------------------------------------------------

StateEnumerator::StateEnumerator(std::vector<std::string> vars,
                                 std::vector<std::vector<Value>> candidates,
                                 std::size_t cap)
    : vars_(std::move(vars)), candidates_(std::move(candidates)) {
  count_ = 1;
  for (const auto& c : candidates_) {
    if (c.empty()) {
      count_ = 0;
      done_ = true;
      return;
    }
    if (count_ > cap / c.size()) throw UniverseTooLarge(cap);
    count_ *= c.size();
  }
  index_.assign(candidates_.size(), 0);
}

bool StateEnumerator::next(State& out) {
  if (done_) return false;
  if (!started_) {
    started_ = true;
    for (std::size_t k = 0; k < vars_.size(); ++k)
      out[vars_[k]] = candidates_[k][index_[k]];
    if (vars_.empty()) done_ = true;  // single empty state
    return true;
  }
  // Advance the odometer, touching only the updated positions; entries
  // for other keys in `out` are left alone.
  std::size_t k = 0;
  for (; k < index_.size(); ++k) {
    if (++index_[k] < candidates_[k].size()) break;
    index_[k] = 0;
  }
  if (k == index_.size()) {
    done_ = true;
    return false;
  }
  for (std::size_t j = 0; j <= k; ++j) out[vars_[j]] = candidates_[j][index_[j]];
  return true;
}

StateEnumerator enumerate_states(const std::vector<std::string>& vars,
                                 const Universe& u) {
  std::vector<Value> values = u.enumerable_values();
  std::vector<std::vector<Value>> candidates(vars.size(), values);
  return StateEnumerator(vars, std::move(candidates), u.max_states);
}

}  // namespace trilog
