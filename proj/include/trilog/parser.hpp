#pragma once

#include <stdexcept>
#include <string>

#include "trilog/ast.hpp"

namespace trilog {

struct ParseError : std::runtime_error {
  SourcePos pos;

  ParseError(SourcePos p, const std::string& msg)
      : std::runtime_error(std::to_string(p.line) + ":" + std::to_string(p.column) +
                           ": " + msg),
        pos(p) {}
};

/// Parses program source text. Clauses are kept in source order and are
/// not normalized. Throws ParseError on malformed syntax and on duplicate
/// type declaration names.
Program parse_program(const std::string& source);

}  // namespace trilog
