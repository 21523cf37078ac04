#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "trilog/subtyping.hpp"

using namespace trilog;
using trilog::testing::pipeline;
using trilog::testing::ty;

namespace {

// Six values: int {0,1}, atom {a}, list trees at depth 1 plus [].
trilog::testing::Pipeline small_world() {
  UniverseConfig config;
  config.depth_bound = 1;
  config.extra_tokens["int"] = {"0", "1"};
  config.extra_tokens["atom"] = {"a"};
  return pipeline(":- type list(A) = [] + [A|list(A)].\n", config);
}

SimpleType random_closed_type(std::mt19937_64& rng, int depth) {
  auto below = [&](std::size_t n) { return rng() % n; };
  switch (depth <= 0 ? below(3) : below(5)) {
    case 0: return ty("int");
    case 1: return ty("atom");
    case 2: return below(2) ? ty("0") : ty("[]");
    case 3: {
      std::vector<SimpleType> parts;
      std::size_t n = 2 + below(2);
      for (std::size_t i = 0; i < n; ++i)
        parts.push_back(random_closed_type(rng, depth - 1));
      return SimpleType::sum(std::move(parts));
    }
    default:
      return SimpleType::mu(
          "r", SimpleType::sum({SimpleType::constant("[]"),
                                SimpleType::app("[|]", {random_closed_type(rng, depth - 1),
                                                        SimpleType::var("r")})}));
  }
}

}  // namespace

TEST_CASE("a summand is below its union") {
  CHECK(is_subtype(ty("int"), ty("int + atom")));
  CHECK(is_subtype(ty("atom"), ty("int + atom")));
  CHECK(!is_subtype(ty("int + atom"), ty("int")));
}

TEST_CASE("reflexivity on a random corpus") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 50; ++i) {
    SimpleType t = random_closed_type(rng, 2);
    CAPTURE(to_string(t));
    CHECK(is_subtype(t, t));
  }
}

TEST_CASE("instance: a mu type is below its polymorphic version") {
  SimpleType list_int = ty("mu a. ([] + [int|a])");
  SimpleType list_b = ty("mu a. ([] + [B|a])");
  CHECK(is_subtype(list_int, list_b));
  // The witnessing substitution really maps the supertype onto the subtype.
  auto phi = match_type(list_b, list_int);
  REQUIRE(phi.has_value());
  CHECK(type_equal(subst(list_b, *phi), list_int));
  CHECK(!is_subtype(list_b, list_int));
}

TEST_CASE("instance may bind a variable to a sum") {
  CHECK(is_subtype(ty("int + atom"), ty("A")));
}

TEST_CASE("predicate subtyping is contravariant in the arguments") {
  PredicateType wide{{ty("int + atom")}};
  PredicateType narrow{{ty("int")}};
  std::vector<std::string> trace;
  CHECK(is_subtype(wide, narrow, &trace));
  CHECK(!is_subtype(narrow, wide));
  bool contra = false;
  for (const auto& line : trace)
    if (line.find("Contravariance") != std::string::npos) contra = true;
  CHECK(contra);
}

TEST_CASE("sums compare summand-wise") {
  CHECK(is_subtype(ty("int + atom"), ty("atom + int + [] ")));
  CHECK(is_subtype(ty("0 + 1"), ty("A + B")));
}

TEST_CASE("mu unfolding is admitted under an assumption") {
  SimpleType folded = ty("mu a. ([] + [int|a])");
  SimpleType unfolded = unfold_mu(folded);
  CHECK(is_subtype(folded, unfolded));
  CHECK(is_subtype(unfolded, folded));
}

TEST_CASE("transitivity holds across the tested corpus") {
  std::mt19937_64 rng(23);
  std::vector<SimpleType> corpus;
  for (int i = 0; i < 12; ++i) corpus.push_back(normalize_sum(random_closed_type(rng, 2)));
  for (const auto& a : corpus)
    for (const auto& b : corpus)
      for (const auto& c : corpus)
        if (is_subtype(a, b) && is_subtype(b, c)) {
          CAPTURE(to_string(a));
          CAPTURE(to_string(b));
          CAPTURE(to_string(c));
          CHECK(is_subtype(a, c));
        }
}

TEST_CASE("term-level soundness: subtyping implies value-set containment") {
  auto w = small_world();
  std::mt19937_64 rng(31);
  std::size_t positive = 0;
  for (int i = 0; i < 200; ++i) {
    SimpleType a = normalize_sum(random_closed_type(rng, 2));
    SimpleType b = normalize_sum(random_closed_type(rng, 2));
    if (rng() % 2) b = normalize_sum(SimpleType::sum({a, b}));  // ensure positives
    auto report = check_subtype_soundness(a, b, w.built.interpretation, w.built.universe);
    if (report.subtype) ++positive;
    CAPTURE(to_string(a));
    CAPTURE(to_string(b));
    CHECK(report.ok());
  }
  CHECK(positive >= 50);
}

TEST_CASE("predicate-level soundness report") {
  auto w = small_world();
  PredicateType wide{{ty("int + atom")}};
  PredicateType narrow{{ty("int")}};
  auto ok = check_subtype_soundness(wide, narrow, w.built.interpretation, w.built.universe);
  CHECK(ok.subtype);
  CHECK(ok.containment);
  CHECK(ok.tables_checked > 0);
}

TEST_CASE("dropping the contravariant flip is caught by a constructed table") {
  // If narrow -> bool were below wide -> bool, a table defined on the int
  // domain only would have to handle atoms as well; psem rejects it.
  auto w = small_world();
  const Universe& u = w.built.universe;
  FuncValue on_int;
  on_int.result = "bool";
  on_int.signature = {{"int", "atom"}};
  for (const auto& v : u.find_domain("int")->members)
    on_int.table[{v}] = Value::boolean(true);
  auto candidates = ground_instance_candidates(w.decls, u);
  CHECK(psem_member(on_int, PredicateType{{ty("int")}}, w.built.interpretation, u,
                    candidates));
  CHECK(!psem_member(on_int, PredicateType{{ty("int + atom")}}, w.built.interpretation, u,
                     candidates));
}
