#pragma once

#include <string>

#include "trilog/decls.hpp"
#include "trilog/normalizer.hpp"
#include "trilog/parser.hpp"
#include "trilog/soundness.hpp"
#include "trilog/typechecker.hpp"

namespace trilog::testing {

struct Pipeline {
  Program program;
  DeclaredTypes decls;
  CheckResult checked;
  BuildResult built;
};

/// parse -> normalize -> decl table -> check -> canonical interpretation.
inline Pipeline pipeline(const std::string& source, UniverseConfig config = {}) {
  Pipeline p;
  p.program = normalize(parse_program(source));
  p.decls = build_decl_table(p.program);
  p.checked = check_program(p.program, p.decls);
  p.built = build_interpretation(p.program, p.decls, config,
                                 p.checked.ok ? &p.checked : nullptr);
  return p;
}

/// Same pipeline without the interpretation (static checking only).
inline Pipeline check_only(const std::string& source) {
  Pipeline p;
  p.program = normalize(parse_program(source));
  p.decls = build_decl_table(p.program);
  p.checked = check_program(p.program, p.decls);
  return p;
}

inline SimpleType ty(const std::string& text) { return parse_simple_type(text); }

}  // namespace trilog::testing
