#include "lazyref/report_json.hpp"

#include "lazyref/constants.hpp"
#include "lazyref/pretty.hpp"

namespace lazyref {

using nlohmann::json;

namespace {
tc::TerminationStatus termination_from(const std::string& s) {
  if (s == "serious") return tc::TerminationStatus::Serious;
  if (s == "serious-by-annotation")
    return tc::TerminationStatus::SeriousByAnnotation;
  return tc::TerminationStatus::Trivial;
}
}  // namespace

json report_to_json(const tc::Report& report) {
  json bindings = json::array();
  for (const auto& b : report.bindings)
    bindings.push_back({{"name", b.name},
                        {"type", b.type},
                        {"termination", tc::termination_name(b.termination)}});
  json errors = json::array();
  for (const auto& e : report.errors) {
    json err = {{"rule", e.rule},
                {"span", {{"line", e.span.line}, {"col", e.span.col}}},
                {"message", e.message}};
    if (e.query_id)
      err["query_id"] = *e.query_id;
    else
      err["query_id"] = nullptr;
    errors.push_back(std::move(err));
  }
  return json{{"verdict", report.safe() ? "safe" : "unsafe"},
              {"mode",
               report.mode == tc::CheckMode::Sound ? "sound" : "eager-naive"},
              {"bindings", std::move(bindings)},
              {"errors", std::move(errors)},
              {"stats",
               {{"queries", report.query_count}, {"solver_ms", report.solver_ms}}}};
}

tc::Report report_from_json(const json& j) {
  tc::Report report;
  report.mode = j.at("mode").get<std::string>() == "eager-naive"
                    ? tc::CheckMode::EagerNaive
                    : tc::CheckMode::Sound;
  for (const auto& b : j.at("bindings")) {
    tc::BindingReport binding;
    binding.name = b.at("name").get<std::string>();
    binding.type = b.at("type").get<std::string>();
    binding.termination =
        termination_from(b.at("termination").get<std::string>());
    report.bindings.push_back(std::move(binding));
  }
  for (const auto& e : j.at("errors")) {
    tc::TypeError err;
    err.rule = e.at("rule").get<std::string>();
    err.message = e.at("message").get<std::string>();
    err.span.line = e.at("span").at("line").get<std::uint32_t>();
    err.span.col = e.at("span").at("col").get<std::uint32_t>();
    if (!e.at("query_id").is_null())
      err.query_id = e.at("query_id").get<std::size_t>();
    report.errors.push_back(std::move(err));
  }
  report.query_count = j.at("stats").at("queries").get<std::size_t>();
  report.solver_ms = j.at("stats").at("solver_ms").get<std::int64_t>();
  return report;
}

json outcome_to_json(const sem::Outcome& outcome, const std::string& strategy,
                     std::size_t fuel) {
  json out{{"steps", outcome.steps_used},
           {"strategy", strategy},
           {"fuel", fuel}};
  switch (outcome.kind) {
    case sem::Outcome::Kind::Value: {
      out["outcome"] = "value";
      out["result"] = pretty(outcome.value);
      break;
    }
    case sem::Outcome::Kind::Crash:
      out["outcome"] = "crash";
      break;
    case sem::Outcome::Kind::FuelExhausted:
      out["outcome"] = "fuel-exhausted";
      break;
  }
  return out;
}

}  // namespace lazyref
