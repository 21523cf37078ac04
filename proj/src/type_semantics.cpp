#include "trilog/type_semantics.hpp"

#include <algorithm>

namespace trilog {

TypeVarEnv upper_env(const SimpleType& t, const Universe& u) {
  std::vector<Value> all = u.enumerable_values();
  std::set<Value> everything(all.begin(), all.end());
  TypeVarEnv env;
  for (const auto& v : free_type_vars(t)) env[v] = everything;
  return env;
}

namespace {

std::set<Value> tsem_impl(const SimpleType& t, const Interpretation& i, const Universe& u,
                          TypeVarEnv& env) {
  switch (t.kind) {
    case SimpleType::Kind::Var: {
      auto it = env.find(t.name);
      if (it == env.end())
        throw TypeSemanticsError("type variable " + t.name + " has no assigned domain");
      return it->second;
    }
    case SimpleType::Kind::Const: {
      auto it = i.constants.find(t.name);
      if (it == i.constants.end())
        throw TypeSemanticsError("type constant " + t.name + " has no interpretation");
      return {it->second};
    }
    case SimpleType::Kind::Base: {
      auto it = u.base_to_domain.find(t.name);
      if (it == u.base_to_domain.end()) return {};
      const Domain* d = u.find_domain(it->second);
      if (!d) return {};
      return std::set<Value>(d->members.begin(), d->members.end());
    }
    case SimpleType::Kind::Bool:
      return {Value::boolean(true), Value::boolean(false)};
    case SimpleType::Kind::Sum: {
      std::set<Value> out;
      for (const auto& a : t.args) {
        std::set<Value> part = tsem_impl(a, i, u, env);
        out.insert(part.begin(), part.end());
      }
      return out;
    }
    case SimpleType::Kind::App: {
      auto owner = u.ctor_domain.find(t.name);
      if (owner == u.ctor_domain.end())
        throw TypeSemanticsError("constructor " + t.name + " has no tree domain");
      const Domain* dom = u.find_domain(owner->second);
      if (!dom) return {};
      std::vector<std::set<Value>> parts;
      parts.reserve(t.args.size());
      for (const auto& a : t.args) parts.push_back(tsem_impl(a, i, u, env));
      std::set<Value> out;
      std::vector<std::set<Value>::const_iterator> its;
      for (const auto& p : parts) {
        if (p.empty()) return {};
        its.push_back(p.begin());
      }
      while (true) {
        std::vector<Value> children;
        children.reserve(its.size());
        for (const auto& it : its) children.push_back(*it);
        Value candidate = Value::tree(t.name, std::move(children));
        if (dom->contains(candidate)) out.insert(std::move(candidate));
        std::size_t k = 0;
        for (; k < its.size(); ++k) {
          if (++its[k] != parts[k].end()) break;
          its[k] = parts[k].begin();
        }
        if (k == its.size()) break;
      }
      return out;
    }
    case SimpleType::Kind::Mu: {
      auto saved = env.find(t.name);
      std::optional<std::set<Value>> previous;
      if (saved != env.end()) previous = saved->second;
      std::set<Value> current;
      while (true) {
        env[t.name] = current;
        std::set<Value> next = tsem_impl(t.mu_body(), i, u, env);
        if (next == current) break;
        current = std::move(next);
      }
      if (previous)
        env[t.name] = *previous;
      else
        env.erase(t.name);
      return current;
    }
  }
  return {};
}

}  // namespace

std::set<Value> tsem(const SimpleType& t, const Interpretation& i, const Universe& u,
                     const TypeVarEnv& env) {
  TypeVarEnv scratch = env;
  return tsem_impl(t, i, u, scratch);
}

std::set<Value> tsem_upper(const SimpleType& t, const Interpretation& i,
                           const Universe& u) {
  return tsem(t, i, u, upper_env(t, u));
}

std::vector<std::set<Value>> tsem_mu_trace(const SimpleType& t, const Interpretation& i,
                                           const Universe& u, const TypeVarEnv& env) {
  if (t.kind != SimpleType::Kind::Mu)
    throw TypeSemanticsError("tsem_mu_trace requires a mu type");
  std::vector<std::set<Value>> trace;
  TypeVarEnv scratch = env;
  std::set<Value> current;
  while (true) {
    scratch[t.name] = current;
    std::set<Value> next = tsem_impl(t.mu_body(), i, u, scratch);
    trace.push_back(next);
    if (next == current) break;
    current = std::move(next);
  }
  return trace;
}

std::optional<std::set<Value>> assoc_domain(const SimpleType& t, const Interpretation& i,
                                            const Universe& u, const TypeVarEnv& env) {
  if (contains_bool(t)) return std::nullopt;
  return tsem(t, i, u, env);
}

std::set<std::string> spanned_domains(const SimpleType& t, const DeclaredTypes& decls,
                                      const Universe& u) {
  switch (t.kind) {
    case SimpleType::Kind::Var: {
      std::set<std::string> out;
      for (const auto& d : u.domains)
        if (d.kind == Domain::Kind::Basic || d.kind == Domain::Kind::Tree)
          out.insert(d.id);
      return out;
    }
    case SimpleType::Kind::Base: {
      auto it = u.base_to_domain.find(t.name);
      if (it == u.base_to_domain.end()) return {};
      return {it->second};
    }
    case SimpleType::Kind::Const: {
      auto tree = u.ctor_domain.find(t.name);
      if (tree != u.ctor_domain.end()) return {tree->second};
      // A base constant: find the basic domain holding its token; fall
      // back to the declared/default base type.
      for (const auto& d : u.domains)
        if (d.kind == Domain::Kind::Basic &&
            d.contains(Value::base(d.id, t.name)))
          return {d.id};
      SimpleType declared = decls.constant_type(t.name).result;
      if (declared.kind == SimpleType::Kind::Base)
        return spanned_domains(declared, decls, u);
      return {};
    }
    case SimpleType::Kind::Bool:
      return {};
    case SimpleType::Kind::Sum: {
      std::set<std::string> out;
      for (const auto& a : t.args) {
        auto part = spanned_domains(a, decls, u);
        out.insert(part.begin(), part.end());
      }
      return out;
    }
    case SimpleType::Kind::App: {
      auto it = u.ctor_domain.find(t.name);
      if (it == u.ctor_domain.end()) return {};
      return {it->second};
    }
    case SimpleType::Kind::Mu: {
      // The binder only recurs through constructor applications, which
      // span their own tree domain; top-level binder occurrences add
      // nothing.
      std::set<std::string> out;
      const SimpleType& body = t.mu_body();
      std::vector<const SimpleType*> parts;
      if (body.kind == SimpleType::Kind::Sum)
        for (const auto& a : body.args) parts.push_back(&a);
      else
        parts.push_back(&body);
      for (const auto* a : parts) {
        if (a->kind == SimpleType::Kind::Var && a->name == t.name) continue;
        auto part = spanned_domains(*a, decls, u);
        out.insert(part.begin(), part.end());
      }
      return out;
    }
  }
  return {};
}

std::vector<SimpleType> ground_instance_candidates(const DeclaredTypes& decls,
                                                   const Universe& u,
                                                   std::size_t limit) {
  std::vector<SimpleType> out;
  for (const auto& [base, domain] : u.base_to_domain) {
    (void)domain;
    out.push_back(SimpleType::base(base));
  }
  std::vector<SimpleType> seeds = out;
  for (const auto& [name, decl] : decls.named) {
    if (decl.params.empty()) {
      out.push_back(decl.translation);
      continue;
    }
    // Instantiate parameters over the base-type seeds, one combination
    // per seed to keep the candidate list small.
    for (const auto& seed : seeds) {
      TypeSubst phi;
      for (const auto& p : decl.params) phi[p] = seed;
      out.push_back(subst(decl.translation, phi));
      if (out.size() >= limit) return out;
    }
  }
  if (out.size() > limit) out.resize(limit);
  return out;
}

namespace {

bool psem_check_ground(const FuncValue& p, const PredicateType& pt,
                       const Interpretation& i, const Universe& u) {
  if (p.signature.size() != pt.arg_types.size()) return false;
  std::vector<std::vector<Value>> sets;
  sets.reserve(pt.arg_types.size());
  for (const auto& t : pt.arg_types) {
    std::set<Value> s = tsem(t, i, u);
    sets.emplace_back(s.begin(), s.end());
    if (sets.back().empty()) return true;  // empty product: vacuous
  }
  std::vector<std::size_t> idx(sets.size(), 0);
  while (true) {
    std::vector<Value> args;
    args.reserve(sets.size());
    for (std::size_t k = 0; k < sets.size(); ++k) args.push_back(sets[k][idx[k]]);
    bool ok = false;
    if (args.size() == p.signature.size()) {
      bool admitted = true;
      for (std::size_t k = 0; k < args.size(); ++k) {
        std::string d = u.domain_of(args[k]);
        if (d.empty() || !p.signature[k].count(d)) {
          admitted = false;
          break;
        }
      }
      if (admitted) {
        auto hit = p.table.find(args);
        ok = hit != p.table.end() && hit->second.kind == Value::Kind::Bool;
      }
    }
    if (!ok) return false;
    std::size_t k = 0;
    for (; k < idx.size(); ++k) {
      if (++idx[k] < sets[k].size()) break;
      idx[k] = 0;
    }
    if (k == idx.size()) return true;
  }
}

}  // namespace

bool psem_member(const FuncValue& p, const TypeScheme& scheme, const Interpretation& i,
                 const Universe& u, const std::vector<SimpleType>& ground_candidates) {
  std::vector<std::string> vars(scheme.quantified.begin(), scheme.quantified.end());
  if (vars.empty()) return psem_check_ground(p, scheme.body, i, u);
  // All instantiations of the quantified variables over the candidates.
  std::vector<std::size_t> idx(vars.size(), 0);
  if (ground_candidates.empty()) return true;
  while (true) {
    TypeSubst phi;
    for (std::size_t k = 0; k < vars.size(); ++k) phi[vars[k]] = ground_candidates[idx[k]];
    if (!psem_check_ground(p, subst(scheme.body, phi), i, u)) return false;
    std::size_t k = 0;
    for (; k < idx.size(); ++k) {
      if (++idx[k] < ground_candidates.size()) break;
      idx[k] = 0;
    }
    if (k == idx.size()) return true;
  }
}

bool psem_member(const FuncValue& p, const PredicateType& pt, const Interpretation& i,
                 const Universe& u, const std::vector<SimpleType>& ground_candidates) {
  TypeScheme scheme;
  scheme.quantified = free_type_vars(pt);
  scheme.body = pt;
  return psem_member(p, scheme, i, u, ground_candidates);
}

}  // namespace trilog
