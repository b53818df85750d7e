#include "doctest.h"
#include "lazyref/report_json.hpp"
#include "lazyref/typecheck.hpp"
#include "testers.hpp"

using namespace lazyref;

TEST_CASE("reports round-trip through JSON") {
  for (const char* name : {"good.lzr", "foobar.lzr", "ack_bad.lzr"}) {
    tc::Checker checker(tc::CheckMode::Sound);
    tc::Report report = checker.check_program(testers::load_corpus(name));
    nlohmann::json j = report_to_json(report);
    tc::Report back = report_from_json(j);
    CHECK(report_to_json(back) == j);
  }
}

TEST_CASE("report JSON carries the schema fields") {
  tc::Checker checker(tc::CheckMode::EagerNaive);
  tc::Report report = checker.check_program(testers::load_corpus("foobar.lzr"));
  nlohmann::json j = report_to_json(report);
  CHECK(j.at("verdict") == "safe");
  CHECK(j.at("mode") == "eager-naive");
  CHECK(j.at("bindings").is_array());
  CHECK(j.at("errors").is_array());
  CHECK(j.at("stats").contains("queries"));
  CHECK(j.at("stats").contains("solver_ms"));
}

TEST_CASE("outcome JSON") {
  sem::Outcome out;
  out.kind = sem::Outcome::Kind::Value;
  out.value = mk_int(8);
  out.steps_used = 91;
  nlohmann::json j = outcome_to_json(out, "opt", 1000);
  CHECK(j.at("outcome") == "value");
  CHECK(j.at("result") == "8");
  CHECK(j.at("steps") == 91);
  CHECK(j.at("strategy") == "opt");
}
