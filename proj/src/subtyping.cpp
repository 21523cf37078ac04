#include "trilog/subtyping.hpp"

#include <set>

namespace trilog {

namespace {

struct SubtypeCheck {
  std::vector<std::string>* trace;
  std::set<std::pair<SimpleType, SimpleType>> assumptions;

  void note(const std::string& rule, const SimpleType& a, const SimpleType& b) {
    if (trace)
      trace->push_back(rule + ": " + to_string(a) + " <= " + to_string(b));
  }

  bool check(const SimpleType& sub, const SimpleType& sup) {
    if (type_equal(sub, sup)) {
      note("Reflexivity", sub, sup);
      return true;
    }
    auto key = std::make_pair(canonical(sub), canonical(sup));
    if (assumptions.count(key)) {
      note("Assumption", sub, sup);
      return true;
    }

    // Union decomposition on the supertype.
    if (sup.kind == SimpleType::Kind::Sum) {
      if (sub.kind == SimpleType::Kind::Sum) {
        bool all = true;
        for (const auto& s : sub.args) {
          bool any = false;
          for (const auto& t : sup.args) {
            SubtypeCheck inner{nullptr, assumptions};
            if (inner.check(s, t)) {
              any = true;
              break;
            }
          }
          if (!any) {
            all = false;
            break;
          }
        }
        if (all) {
          note("Union", sub, sup);
          return true;
        }
      } else {
        for (const auto& t : sup.args) {
          SubtypeCheck inner{nullptr, assumptions};
          if (inner.check(sub, t)) {
            note("Union", sub, sup);
            return true;
          }
        }
      }
    }

    // Instance: a substitution on the supertype's variables.
    if (match_type(sup, sub)) {
      note("Instance", sub, sup);
      return true;
    }

    // Mu unfolding under a coinductive assumption.
    if (sub.kind == SimpleType::Kind::Mu || sup.kind == SimpleType::Kind::Mu) {
      assumptions.insert(key);
      SimpleType usub = sub.kind == SimpleType::Kind::Mu
                            ? normalize_sum(unfold_mu(sub))
                            : sub;
      SimpleType usup = sup.kind == SimpleType::Kind::Mu
                            ? normalize_sum(unfold_mu(sup))
                            : sup;
      bool ok = check(usub, usup);
      assumptions.erase(key);
      if (ok) {
        note("Unfold", sub, sup);
        return true;
      }
    }
    return false;
  }
};

}  // namespace

bool is_subtype(const SimpleType& sub, const SimpleType& sup,
                std::vector<std::string>* trace) {
  SubtypeCheck c{trace, {}};
  return c.check(normalize_sum(sub), normalize_sum(sup));
}

bool is_subtype(const PredicateType& sub, const PredicateType& sup,
                std::vector<std::string>* trace) {
  if (sub.arg_types.size() != sup.arg_types.size()) return false;
  for (std::size_t k = 0; k < sub.arg_types.size(); ++k) {
    // Contravariance: the supertype's arguments must be below the
    // subtype's.
    if (!is_subtype(sup.arg_types[k], sub.arg_types[k], trace)) return false;
  }
  if (trace)
    trace->push_back("Contravariance: " + to_string(sub) + " <= " + to_string(sup));
  return true;
}

SubtypeSoundnessReport check_subtype_soundness(const SimpleType& sub,
                                               const SimpleType& sup,
                                               const Interpretation& i,
                                               const Universe& u) {
  SubtypeSoundnessReport report;
  report.subtype = is_subtype(sub, sup);
  if (!report.subtype) return report;
  std::set<Value> lo = tsem_upper(sub, i, u);
  std::set<Value> hi = tsem_upper(sup, i, u);
  for (const auto& v : lo) {
    if (!hi.count(v)) {
      report.containment = false;
      report.counterexample = v;
      return report;
    }
  }
  return report;
}

PredicateSoundnessReport check_subtype_soundness(const PredicateType& sub,
                                                 const PredicateType& sup,
                                                 const Interpretation& i,
                                                 const Universe& u) {
  PredicateSoundnessReport report;
  report.subtype = is_subtype(sub, sup);
  if (!report.subtype) return report;

  // Candidate tables: every boolean function over the union of both
  // argument products, restricted to tiny scale.
  std::vector<SimpleType> all_args = sub.arg_types;
  all_args.insert(all_args.end(), sup.arg_types.begin(), sup.arg_types.end());
  std::set<std::string> arg_domains;
  for (const auto& t : all_args) {
    std::set<Value> s = tsem_upper(t, i, u);
    for (const auto& v : s) arg_domains.insert(u.domain_of(v));
  }
  std::vector<std::vector<Value>> tuple_space;
  {
    std::vector<Value> accepted;
    for (const auto& d : arg_domains) {
      const Domain* dom = u.find_domain(d);
      if (dom) accepted.insert(accepted.end(), dom->members.begin(), dom->members.end());
    }
    std::vector<std::size_t> idx(sub.arg_types.size(), 0);
    if (accepted.empty() || sub.arg_types.empty()) return report;
    while (true) {
      std::vector<Value> tuple;
      for (std::size_t k = 0; k < idx.size(); ++k) tuple.push_back(accepted[idx[k]]);
      tuple_space.push_back(std::move(tuple));
      std::size_t k = 0;
      for (; k < idx.size(); ++k) {
        if (++idx[k] < accepted.size()) break;
        idx[k] = 0;
      }
      if (k == idx.size()) break;
    }
  }
  if (tuple_space.size() > 8) tuple_space.resize(8);

  FuncValue f;
  f.result = "bool";
  f.signature.assign(sub.arg_types.size(), arg_domains);

  auto candidates = ground_instance_candidates(DeclaredTypes{}, u);
  // Enumerate partial tables: each tuple is mapped to true, false, or
  // left undefined.
  std::size_t combos = 1;
  for (std::size_t k = 0; k < tuple_space.size(); ++k) combos *= 3;
  for (std::size_t mask = 0; mask < combos; ++mask) {
    f.table.clear();
    std::size_t m = mask;
    for (const auto& tuple : tuple_space) {
      switch (m % 3) {
        case 0: f.table[tuple] = Value::boolean(true); break;
        case 1: f.table[tuple] = Value::boolean(false); break;
        default: break;  // undefined
      }
      m /= 3;
    }
    ++report.tables_checked;
    if (psem_member(f, sub, i, u, candidates) && !psem_member(f, sup, i, u, candidates)) {
      report.containment = false;
      return report;
    }
  }
  return report;
}

}  // namespace trilog
