#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "trilog/decls.hpp"
#include "trilog/normalizer.hpp"
#include "trilog/parser.hpp"
#include "trilog/soundness.hpp"
#include "trilog/subtyping.hpp"
#include "trilog/truth.hpp"
#include "trilog/typechecker.hpp"

using json = nlohmann::json;
using namespace trilog;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json diagnostic_json(const Diagnostic& d) {
  json j{{"error_kind", d.kind}, {"message", d.message}};
  if (!d.predicate.empty()) j["predicate"] = d.predicate;
  if (d.branch >= 0) j["branch"] = d.branch;
  if (!d.expected.empty()) j["expected"] = d.expected;
  if (!d.found.empty()) j["found"] = d.found;
  if (d.span.line > 0) j["source_span"] = {{"line", d.span.line}, {"column", d.span.column}};
  return j;
}

std::string show_diag(const Diagnostic& d) {
  std::ostringstream os;
  if (!d.predicate.empty()) {
    os << d.predicate;
    if (d.branch >= 0) os << " (branch " << d.branch + 1 << ")";
    os << ": ";
  }
  os << d.kind << ": " << d.message;
  if (!d.expected.empty()) os << " (expected " << d.expected << ", found " << d.found << ")";
  if (d.span.line > 0) os << " at " << d.span.line << ":" << d.span.column;
  return os.str();
}

std::size_t max_states_default() {
  if (const char* env = std::getenv("TRILOG_MAX_STATES")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
  }
  return 1000000;
}

UniverseConfig load_universe(const std::string& path) {
  UniverseConfig config;
  config.max_states = max_states_default();
  json j = json::parse(read_file(path));
  if (j.contains("policy")) {
    std::string p = j["policy"];
    if (p == "singleton")
      config.policy = UniverseConfig::Policy::Singleton;
    else if (p == "herbrand")
      config.policy = UniverseConfig::Policy::Herbrand;
    else if (p == "by_type")
      config.policy = UniverseConfig::Policy::ByType;
    else
      throw std::runtime_error("unknown policy " + p);
  }
  if (j.contains("depth")) config.depth_bound = j["depth"];
  if (j.contains("max_states")) config.max_states = j["max_states"];
  if (j.contains("extra_tokens"))
    for (auto& [base, tokens] : j["extra_tokens"].items())
      for (const auto& t : tokens)
        config.extra_tokens[base].push_back(t.get<std::string>());
  if (j.contains("domains"))  // {"domains":[{"id":"int","members":["1","2"]}]}
    for (const auto& d : j["domains"])
      for (const auto& m : d["members"])
        config.extra_tokens[d["id"].get<std::string>()].push_back(m.get<std::string>());
  return config;
}

// Optional explicit predicate tables: {"tables":{"p":[{"args":["1"],"value":true}]}}
void apply_table_overrides(const std::string& path, BuildResult& built) {
  json j = json::parse(read_file(path));
  if (!j.contains("tables")) return;
  std::map<std::string, Value> by_name;
  for (const auto& v : built.universe.enumerable_values()) by_name[to_string(v)] = v;
  for (auto& [pred, entries] : j["tables"].items()) {
    auto it = built.interpretation.predicates.find(pred);
    if (it == built.interpretation.predicates.end())
      throw std::runtime_error("table override for unknown predicate " + pred);
    for (const auto& e : entries) {
      std::vector<Value> args;
      for (const auto& a : e["args"]) {
        auto vi = by_name.find(a.get<std::string>());
        if (vi == by_name.end())
          throw std::runtime_error("unknown value in table override: " +
                                   a.get<std::string>());
        args.push_back(vi->second);
      }
      it->second.table[args] = Value::boolean(e["value"].get<bool>());
    }
  }
}

json context_json(const Context& ctx, const DeclaredTypes& decls) {
  json j = json::object();
  for (const auto& [x, t] : ctx) j[x] = to_string(decls.resugar(t));
  return j;
}

json state_json(const State& s) {
  json j = json::object();
  for (const auto& [x, v] : s) j[x] = to_string(v);
  return j;
}

int cmd_tables(bool as_json) {
  auto cell = [](Tv v) { return std::string(to_string(v)); };
  if (as_json) {
    json j;
    for (Tv a : kAllTv) {
      for (Tv b : kAllTv) {
        j["and"][cell(a)][cell(b)] = cell(tv_and(a, b));
        j["or"][cell(a)][cell(b)] = cell(tv_or(a, b));
        j["implies"][cell(a)][cell(b)] = cell(tv_implies(a, b));
      }
      j["not"][cell(a)] = cell(tv_not(a));
    }
    std::cout << j.dump(2) << "\n";
    return kExitOk;
  }
  auto grid = [&](const std::string& name, Tv (*op)(Tv, Tv)) {
    std::cout << name << ":\n         true    false   wrong\n";
    for (Tv a : kAllTv) {
      std::cout << "  " << cell(a) << std::string(7 - cell(a).size(), ' ');
      for (Tv b : kAllTv) {
        std::string c = cell(op(a, b));
        std::cout << " " << c << std::string(7 - c.size(), ' ');
      }
      std::cout << "\n";
    }
    std::cout << "\n";
  };
  grid("conjunction", [](Tv a, Tv b) { return tv_and(a, b); });
  grid("disjunction", [](Tv a, Tv b) { return tv_or(a, b); });
  std::cout << "negation:\n";
  for (Tv a : kAllTv) std::cout << "  not(" << cell(a) << ") = " << cell(tv_not(a)) << "\n";
  std::cout << "\n";
  grid("implication", [](Tv a, Tv b) { return tv_implies(a, b); });
  return kExitOk;
}

int cmd_parse(const std::string& file, bool as_json) {
  Program p = parse_program(read_file(file));
  if (as_json) {
    json j;
    j["type_decls"] = json::array();
    for (const auto& d : p.type_decls)
      j["type_decls"].push_back({{"name", d.name},
                                 {"params", d.params},
                                 {"body", to_string(d.body)}});
    j["clauses"] = json::array();
    for (const auto& c : p.clauses)
      j["clauses"].push_back({{"predicate", c.predicate},
                              {"arity", c.head_args.size()},
                              {"or_degree", or_degree(c)},
                              {"text", pretty(c)}});
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << pretty(p);
  }
  return kExitOk;
}

int cmd_normalize(const std::string& file) {
  Program p = normalize(parse_program(read_file(file)));
  std::cout << pretty(p);
  return kExitOk;
}

int cmd_check(const std::string& file, bool as_json) {
  Program p = normalize(parse_program(read_file(file)));
  DeclaredTypes decls = build_decl_table(p);
  CheckResult result = check_program(p, decls);
  if (as_json) {
    json j;
    j["ok"] = result.ok;
    j["predicates"] = json::array();
    for (const auto& name : p.predicate_order()) {
      const PredicateCheck* pc = result.find(name);
      if (!pc) continue;
      json e{{"predicate", name}, {"ok", pc->ok}};
      if (pc->scheme) {
        PredicateType shown = pc->scheme->body;
        for (auto& t : shown.arg_types) t = decls.resugar(t);
        e["type"] = to_string(shown);
      }
      e["errors"] = json::array();
      for (const auto& d : pc->errors) e["errors"].push_back(diagnostic_json(d));
      j["predicates"].push_back(std::move(e));
    }
    for (const auto& d : result.global) j["errors"].push_back(diagnostic_json(d));
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& d : result.global) std::cout << show_diag(d) << "\n";
    for (const auto& name : p.predicate_order()) {
      const PredicateCheck* pc = result.find(name);
      if (!pc) continue;
      if (pc->ok && pc->scheme) {
        PredicateType shown = pc->scheme->body;
        for (auto& t : shown.arg_types) t = decls.resugar(t);
        std::cout << name << " : " << to_string(shown) << "\n";
      } else {
        for (const auto& d : pc->errors) std::cout << show_diag(d) << "\n";
      }
    }
  }
  return result.ok ? kExitOk : kExitDomain;
}

int cmd_subtype(const std::string& t1, const std::string& t2,
                const std::string& program_file, bool as_json) {
  DeclaredTypes decls;
  if (!program_file.empty())
    decls = build_decl_table(parse_program(read_file(program_file)));

  // Bare declared names parse as type variables; rewrite them, then
  // inline declared applications.
  std::function<SimpleType(const SimpleType&)> fix = [&](const SimpleType& t) -> SimpleType {
    if (t.kind == SimpleType::Kind::Var && decls.named.count(t.name) &&
        decls.named.at(t.name).params.empty())
      return decls.named.at(t.name).translation;
    SimpleType out = t;
    for (auto& a : out.args) a = fix(a);
    return decls.resolve(out);
  };

  ParsedType a = parse_type(t1);
  ParsedType b = parse_type(t2);
  bool verdict = false;
  std::vector<std::string> trace;
  if (a.simple && b.simple) {
    verdict = is_subtype(fix(*a.simple), fix(*b.simple), &trace);
  } else if (a.predicate && b.predicate) {
    PredicateType pa = *a.predicate, pb = *b.predicate;
    for (auto& t : pa.arg_types) t = fix(t);
    for (auto& t : pb.arg_types) t = fix(t);
    verdict = is_subtype(pa, pb, &trace);
  } else {
    std::cerr << "cannot compare a simple type with a predicate type\n";
    return kExitUsage;
  }
  if (as_json) {
    std::cout << json{{"subtype", verdict}, {"trace", trace}}.dump(2) << "\n";
  } else {
    std::cout << (verdict ? "true" : "false") << "\n";
    for (const auto& line : trace) std::cout << "  " << line << "\n";
  }
  return verdict ? kExitOk : kExitDomain;
}

int cmd_eval(const std::string& file, const std::string& universe_file, bool per_state,
             bool as_json, int depth, std::size_t max_states) {
  Program p = normalize(parse_program(read_file(file)));
  DeclaredTypes decls = build_decl_table(p);
  UniverseConfig config;
  config.max_states = max_states_default();
  if (!universe_file.empty()) config = load_universe(universe_file);
  if (depth > 0) config.depth_bound = depth;
  if (max_states > 0) config.max_states = max_states;
  BuildResult built = build_interpretation(p, decls, config);
  if (!universe_file.empty()) apply_table_overrides(universe_file, built);

  json report = json::array();
  for (const auto& name : p.predicate_order()) {
    const Clause* c = p.single_clause(name);
    std::vector<std::vector<State>> branch_states;
    std::vector<std::size_t> sizes;
    for (const auto& seq : c->body) {
      std::set<std::string> seen;
      std::vector<std::string> vars;
      for (const auto& t : c->head_args) collect_vars(t, vars, seen);
      for (const auto& g : seq) collect_vars(g, vars, seen);
      StateEnumerator en = enumerate_states(vars, built.universe);
      std::vector<State> states;
      State s;
      while (en.next(s)) states.push_back(s);
      branch_states.push_back(std::move(states));
      sizes.push_back(branch_states.back().size());
    }
    std::size_t lists = 1;
    bool empty = false;
    for (std::size_t n : sizes) {
      if (n == 0) empty = true;
      if (!empty && lists > built.universe.max_states / n)
        throw UniverseTooLarge(built.universe.max_states);
      lists *= n;
    }
    std::size_t count_true = 0, count_false = 0, count_wrong = 0, truncation = 0;
    if (!empty) {
      std::vector<std::size_t> idx(sizes.size(), 0);
      while (true) {
        std::vector<State> states;
        for (std::size_t k = 0; k < idx.size(); ++k)
          states.push_back(branch_states[k][idx[k]]);
        EvalStats stats;
        Tv v = eval_clause(*c, built.interpretation, states, built.universe, &stats);
        truncation += stats.truncation;
        if (v == Tv::True) ++count_true;
        if (v == Tv::False) ++count_false;
        if (v == Tv::Wrong) ++count_wrong;
        if (per_state && !as_json) {
          std::cout << name << " ";
          for (std::size_t k = 0; k < states.size(); ++k) {
            std::cout << (k ? " ; " : "[");
            bool first = true;
            for (const auto& [var, val] : states[k]) {
              std::cout << (first ? "" : ",") << var << "=" << to_string(val);
              first = false;
            }
          }
          std::cout << "] = " << v << "\n";
        }
        std::size_t k = 0;
        for (; k < idx.size(); ++k) {
          if (++idx[k] < sizes[k]) break;
          idx[k] = 0;
        }
        if (k == idx.size()) break;
      }
    }
    if (as_json) {
      report.push_back({{"predicate", name},
                        {"state_lists", lists},
                        {"count_true", count_true},
                        {"count_false", count_false},
                        {"count_wrong", count_wrong},
                        {"truncation_incidents", truncation}});
    } else {
      std::cout << name << ": state_lists=" << (empty ? 0 : lists)
                << " true=" << count_true << " false=" << count_false
                << " wrong=" << count_wrong << " truncation=" << truncation << "\n";
    }
  }
  if (as_json) std::cout << report.dump(2) << "\n";
  return kExitOk;
}

int cmd_verify(const std::string& file, long long seed, int depth,
               std::size_t max_states, bool as_json) {
  Program p;
  if (!file.empty()) {
    p = normalize(parse_program(read_file(file)));
  } else {
    p = generate_program(static_cast<std::uint64_t>(seed));
  }
  DeclaredTypes decls = build_decl_table(p);
  UniverseConfig config;
  config.max_states = max_states_default();
  if (depth > 0) config.depth_bound = depth;
  if (max_states > 0) config.max_states = max_states;

  CheckResult checked = check_program(p, decls);
  if (!checked.ok) {
    if (as_json) {
      json j{{"check", "failed"}, {"errors", json::array()}};
      for (const auto& d : checked.global) j["errors"].push_back(diagnostic_json(d));
      for (const auto& [name, pc] : checked.predicates)
        for (const auto& d : pc.errors) j["errors"].push_back(diagnostic_json(d));
      std::cout << j.dump(2) << "\n";
    } else {
      std::cout << "type check failed; nothing to verify\n";
      for (const auto& d : checked.global) std::cout << show_diag(d) << "\n";
      for (const auto& [name, pc] : checked.predicates)
        for (const auto& d : pc.errors) std::cout << show_diag(d) << "\n";
    }
    return kExitDomain;
  }

  VerifyReport report = verify_soundness(p, decls, config, checked);
  if (as_json) {
    json j = json::array();
    for (const auto& v : report.predicates) {
      json e{{"predicate", v.predicate},
             {"status", v.status},
             {"states_checked", v.states_checked},
             {"wrong_count", v.wrong_count},
             {"truncation_count", v.truncation_count}};
      e["witness_split"] = json::array();
      for (const auto& g : v.witness_split) e["witness_split"].push_back(context_json(g, decls));
      if (v.counterexample) {
        e["counterexample"] = {{"branch", v.counterexample->branch},
                               {"state", state_json(v.counterexample->state)},
                               {"detail", v.counterexample->detail}};
      }
      j.push_back(std::move(e));
    }
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& v : report.predicates) {
      std::cout << v.predicate << ": " << v.status << " states=" << v.states_checked
                << " wrong=" << v.wrong_count << " truncation=" << v.truncation_count
                << "\n";
      if (v.counterexample) {
        std::cout << "  counterexample in branch " << v.counterexample->branch + 1 << ":";
        for (const auto& [var, val] : v.counterexample->state)
          std::cout << " " << var << "=" << to_string(val);
        std::cout << " (" << v.counterexample->detail << ")\n";
      }
    }
  }
  return report.ok ? kExitOk : kExitDomain;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"three-valued semantics and type checker for normalized logic programs"};
  app.require_subcommand(1);
  app.fallthrough();
  bool as_json = false;
  app.add_flag("--json", as_json, "machine-readable output");

  auto* parse_cmd = app.add_subcommand("parse", "parse a program and print it back");
  std::string parse_file;
  parse_cmd->add_option("file", parse_file, "program file")->required();

  auto* norm_cmd = app.add_subcommand("normalize", "print the normal form of a program");
  std::string norm_file;
  norm_cmd->add_option("file", norm_file, "program file")->required();

  auto* check_cmd = app.add_subcommand("check", "type check a program");
  std::string check_file;
  check_cmd->add_option("file", check_file, "program file")->required();

  auto* sub_cmd = app.add_subcommand("subtype", "decide T1 <= T2");
  std::string sub_t1, sub_t2, sub_program;
  sub_cmd->add_option("T1", sub_t1, "subtype candidate")->required();
  sub_cmd->add_option("T2", sub_t2, "supertype candidate")->required();
  sub_cmd->add_option("--program", sub_program, "program file providing declarations");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate clauses over all states");
  std::string eval_file, eval_universe;
  bool eval_per_state = false;
  int eval_depth = 0;
  std::size_t eval_max_states = 0;
  eval_cmd->add_option("file", eval_file, "program file")->required();
  eval_cmd->add_option("--universe", eval_universe, "universe description (JSON)");
  eval_cmd->add_flag("--per-state", eval_per_state, "print one line per state list");
  eval_cmd->add_option("--depth", eval_depth, "tree domain depth bound");
  eval_cmd->add_option("--max-states", eval_max_states, "state enumeration cap");

  auto* verify_cmd = app.add_subcommand("verify", "check + soundness harness");
  std::string verify_file;
  long long verify_seed = -1;
  int verify_depth = 3;
  std::size_t verify_max_states = 0;
  verify_cmd->add_option("file", verify_file, "program file");
  verify_cmd->add_option("--seed", verify_seed, "verify a generated program instead");
  verify_cmd->add_option("--depth", verify_depth, "tree domain depth bound (default 3)");
  verify_cmd->add_option("--max-states", verify_max_states, "state enumeration cap");

  auto* tables_cmd = app.add_subcommand("tables", "print the three-valued connective tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*tables_cmd) return cmd_tables(as_json);
    if (*parse_cmd) return cmd_parse(parse_file, as_json);
    if (*norm_cmd) return cmd_normalize(norm_file);
    if (*check_cmd) return cmd_check(check_file, as_json);
    if (*sub_cmd) return cmd_subtype(sub_t1, sub_t2, sub_program, as_json);
    if (*eval_cmd)
      return cmd_eval(eval_file, eval_universe, eval_per_state, as_json, eval_depth,
                      eval_max_states);
    if (*verify_cmd) {
      if (verify_file.empty() && verify_seed < 0) {
        std::cerr << "verify needs a program file or --seed\n";
        return kExitUsage;
      }
      return cmd_verify(verify_file, verify_seed, verify_depth, verify_max_states,
                        as_json);
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const NormalizeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const DeclError& e) {
    std::cerr << "declaration error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const TypeParseError& e) {
    std::cerr << "type syntax error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const UniverseTooLarge& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
