#include "trilog/ast.hpp"

#include <sstream>

namespace trilog {

int compare(const Term& a, const Term& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (int c = a.name.compare(b.name)) return c < 0 ? -1 : 1;
  if (a.args.size() != b.args.size()) return a.args.size() < b.args.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (int c = compare(a.args[i], b.args[i])) return c;
  return 0;
}

std::vector<std::string> Program::predicate_order() const {
  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const auto& c : clauses)
    if (seen.insert(c.predicate).second) order.push_back(c.predicate);
  return order;
}

std::vector<const Clause*> Program::clauses_of(const std::string& predicate) const {
  std::vector<const Clause*> out;
  for (const auto& c : clauses)
    if (c.predicate == predicate) out.push_back(&c);
  return out;
}

const Clause* Program::single_clause(const std::string& predicate) const {
  const Clause* found = nullptr;
  for (const auto& c : clauses) {
    if (c.predicate != predicate) continue;
    if (found) return nullptr;
    found = &c;
  }
  return found;
}

bool Program::defines(const std::string& predicate) const {
  for (const auto& c : clauses)
    if (c.predicate == predicate) return true;
  return false;
}

std::size_t or_degree(const Term&) { return 1; }
std::size_t or_degree(const Goal&) { return 1; }
std::size_t or_degree(const Clause& c) { return c.body.empty() ? 1 : c.body.size(); }

// -- Pretty printing -------------------------------------------------------

namespace {

bool is_list_cell(const Term& t) {
  return t.kind == Term::Kind::Compound && t.name == "[|]" && t.args.size() == 2;
}

void print_term(std::ostream& os, const Term& t) {
  if (t.kind != Term::Kind::Compound) {
    os << t.name;
    return;
  }
  if (t.name == "[]" || is_list_cell(t)) {
    // List sugar: [a,b|T] / [a,b].
    os << "[";
    const Term* cur = &t;
    bool first = true;
    while (is_list_cell(*cur)) {
      if (!first) os << ",";
      print_term(os, cur->args[0]);
      first = false;
      cur = &cur->args[1];
    }
    if (!(cur->kind == Term::Kind::Const && cur->name == "[]")) {
      os << "|";
      print_term(os, *cur);
    }
    os << "]";
    return;
  }
  os << t.name << "(";
  for (std::size_t i = 0; i < t.args.size(); ++i) {
    if (i) os << ",";
    print_term(os, t.args[i]);
  }
  os << ")";
}

void print_goal(std::ostream& os, const Goal& g) {
  if (g.kind == Goal::Kind::Unify) {
    print_term(os, g.left);
    os << " = ";
    print_term(os, g.right);
    return;
  }
  os << g.predicate << "(";
  for (std::size_t i = 0; i < g.args.size(); ++i) {
    if (i) os << ",";
    print_term(os, g.args[i]);
  }
  os << ")";
}

void print_seq(std::ostream& os, const GoalSeq& seq) {
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (i) os << ", ";
    print_goal(os, seq[i]);
  }
}

void print_clause(std::ostream& os, const Clause& c) {
  os << c.predicate << "(";
  for (std::size_t i = 0; i < c.head_args.size(); ++i) {
    if (i) os << ",";
    print_term(os, c.head_args[i]);
  }
  os << ")";
  bool is_fact = c.body.size() == 1 && c.body[0].empty();
  if (!is_fact && !c.body.empty()) {
    os << " :-\n";
    for (std::size_t k = 0; k < c.body.size(); ++k) {
      os << "    ";
      if (c.body.size() > 1) os << "( ";
      print_seq(os, c.body[k]);
      if (c.body.size() > 1) os << " )";
      if (k + 1 < c.body.size()) os << " ;\n";
    }
  }
  os << ".\n";
}

}  // namespace

std::string pretty(const Term& t) {
  std::ostringstream os;
  print_term(os, t);
  return os.str();
}

std::string pretty(const Goal& g) {
  std::ostringstream os;
  print_goal(os, g);
  return os.str();
}

std::string pretty(const Clause& c) {
  std::ostringstream os;
  print_clause(os, c);
  return os.str();
}

std::string pretty(const Program& p) {
  std::ostringstream os;
  for (const auto& d : p.type_decls) {
    os << ":- type " << d.name;
    if (!d.params.empty()) {
      os << "(";
      for (std::size_t i = 0; i < d.params.size(); ++i) {
        if (i) os << ",";
        os << d.params[i];
      }
      os << ")";
    }
    os << " = " << to_string(d.body) << ".\n";
  }
  for (const auto& c : p.clauses) print_clause(os, c);
  return os.str();
}

// -- Variable collection ---------------------------------------------------

void collect_vars(const Term& t, std::vector<std::string>& out, std::set<std::string>& seen) {
  if (t.kind == Term::Kind::Var) {
    if (seen.insert(t.name).second) out.push_back(t.name);
    return;
  }
  for (const auto& a : t.args) collect_vars(a, out, seen);
}

void collect_vars(const Goal& g, std::vector<std::string>& out, std::set<std::string>& seen) {
  if (g.kind == Goal::Kind::Unify) {
    collect_vars(g.left, out, seen);
    collect_vars(g.right, out, seen);
    return;
  }
  for (const auto& a : g.args) collect_vars(a, out, seen);
}

std::vector<std::string> vars_of(const GoalSeq& seq) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& g : seq) collect_vars(g, out, seen);
  return out;
}

std::vector<std::string> vars_of(const Clause& c) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& t : c.head_args) collect_vars(t, out, seen);
  for (const auto& seq : c.body)
    for (const auto& g : seq) collect_vars(g, out, seen);
  return out;
}

// -- Alpha equivalence -------------------------------------------------------

namespace {

struct VarBijection {
  std::map<std::string, std::string> fwd, bwd;

  bool pair(const std::string& a, const std::string& b) {
    auto f = fwd.find(a);
    auto g = bwd.find(b);
    if (f == fwd.end() && g == bwd.end()) {
      fwd[a] = b;
      bwd[b] = a;
      return true;
    }
    return f != fwd.end() && g != bwd.end() && f->second == b && g->second == a;
  }
};

bool alpha_term(const Term& a, const Term& b, VarBijection& m) {
  if (a.kind != b.kind) return false;
  if (a.kind == Term::Kind::Var) return m.pair(a.name, b.name);
  if (a.name != b.name || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!alpha_term(a.args[i], b.args[i], m)) return false;
  return true;
}

bool alpha_goal(const Goal& a, const Goal& b, VarBijection& m) {
  if (a.kind != b.kind) return false;
  if (a.kind == Goal::Kind::Unify)
    return alpha_term(a.left, b.left, m) && alpha_term(a.right, b.right, m);
  if (a.predicate != b.predicate || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!alpha_term(a.args[i], b.args[i], m)) return false;
  return true;
}

}  // namespace

bool alpha_equivalent(const Clause& a, const Clause& b) {
  if (a.predicate != b.predicate || a.head_args.size() != b.head_args.size() ||
      a.body.size() != b.body.size())
    return false;
  VarBijection m;
  for (std::size_t i = 0; i < a.head_args.size(); ++i)
    if (!alpha_term(a.head_args[i], b.head_args[i], m)) return false;
  for (std::size_t k = 0; k < a.body.size(); ++k) {
    if (a.body[k].size() != b.body[k].size()) return false;
    for (std::size_t i = 0; i < a.body[k].size(); ++i)
      if (!alpha_goal(a.body[k][i], b.body[k][i], m)) return false;
  }
  return true;
}

bool alpha_equivalent(const Program& a, const Program& b) {
  if (a.type_decls != b.type_decls || a.clauses.size() != b.clauses.size()) return false;
  for (std::size_t i = 0; i < a.clauses.size(); ++i)
    if (!alpha_equivalent(a.clauses[i], b.clauses[i])) return false;
  return true;
}

}  // namespace trilog
