#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "lazyref/parser.hpp"
#include "lazyref/pretty.hpp"
#include "lazyref/report_json.hpp"
#include "lazyref/semantics.hpp"
#include "lazyref/smt.hpp"
#include "lazyref/typecheck.hpp"

namespace {

using namespace lazyref;

constexpr int kExitSafe = 0;
constexpr int kExitUnsafe = 1;
constexpr int kExitUsage = 2;
constexpr int kExitUnknown = 3;
constexpr int kExitCrash = 4;
constexpr int kExitFuel = 5;

struct CommonOpts {
  std::string input;
  std::string mode = "sound";
  std::string backend = "builtin";
  int time_limit = 10;
  std::string format = "text";
};

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::optional<Program> load_program(const std::string& path) {
  auto text = read_file(path);
  if (!text) {
    std::cerr << "error: cannot read '" << path << "'\n";
    return std::nullopt;
  }
  auto parsed = parse_program(*text);
  if (auto* err = std::get_if<ParseError>(&parsed)) {
    std::cerr << path << ":" << err->render() << "\n";
    return std::nullopt;
  }
  return std::get<Program>(std::move(parsed));
}

std::optional<smt::Backend> make_backend(const std::string& spec, int time_limit) {
  if (spec == "builtin") return smt::Backend::builtin();
  if (spec.rfind("exec:", 0) == 0 || spec == "exec") {
    std::string cmd = spec.size() > 5 ? spec.substr(5) : "";
    if (cmd.empty()) {
      const char* env = std::getenv("LAZYREF_SOLVER");
      if (!env || !*env) {
        std::cerr << "error: '--backend exec:' needs a command or LAZYREF_SOLVER\n";
        return std::nullopt;
      }
      cmd = env;
    }
    return smt::Backend::external(cmd, time_limit);
  }
  std::cerr << "error: unknown backend '" << spec << "'\n";
  return std::nullopt;
}

std::optional<tc::CheckMode> make_mode(const std::string& spec) {
  if (spec == "sound") return tc::CheckMode::Sound;
  if (spec == "eager-naive") return tc::CheckMode::EagerNaive;
  std::cerr << "error: unknown mode '" << spec << "'\n";
  return std::nullopt;
}

void print_report(const tc::Report& report) {
  bool naive = report.mode == tc::CheckMode::EagerNaive;
  std::string verdict = report.safe() ? "Safe" : "Unsafe";
  if (naive) verdict += " (UNSOUND MODE)";
  std::cout << verdict << "\n";
  if (naive)
    std::cout << "warning: eager-naive mode ignores the label discipline; "
                 "verdicts are meaningless for lazy evaluation\n";
  for (const auto& b : report.bindings)
    std::cout << "  " << b.name << " :: " << b.type << "  ["
              << tc::termination_name(b.termination) << "]\n";
  for (const auto& e : report.errors) {
    std::cout << "error: " << e.render() << "\n";
    if (e.query) {
      std::cout << "  failing query:\n";
      std::istringstream lines(smt::emit_smtlib(*e.query));
      std::string line;
      while (std::getline(lines, line)) std::cout << "    " << line << "\n";
    }
  }
  std::cout << report.query_count << " queries, " << report.solver_ms
            << " ms in the solver\n";
}

int cmd_check(const CommonOpts& opts) {
  auto program = load_program(opts.input);
  if (!program) return kExitUsage;
  auto mode = make_mode(opts.mode);
  auto backend = make_backend(opts.backend, opts.time_limit);
  if (!mode || !backend) return kExitUsage;

  tc::Checker checker(*mode, *backend);
  tc::Report report = checker.check_program(*program);
  if (opts.format == "json")
    std::cout << report_to_json(report).dump(2) << "\n";
  else
    print_report(report);
  if (report.any_unknown()) return kExitUnknown;
  return report.safe() ? kExitSafe : kExitUnsafe;
}

int cmd_run(const CommonOpts& opts, const std::string& strategy_name,
            const std::string& oracle_name, std::size_t fuel, bool trace) {
  auto program = load_program(opts.input);
  if (!program) return kExitUsage;
  auto backend = make_backend(opts.backend, opts.time_limit);
  if (!backend) return kExitUsage;

  sem::Strategy strategy = sem::Strategy::cbn();
  if (strategy_name == "cbv") {
    strategy = sem::Strategy::cbv();
  } else if (strategy_name == "opt") {
    strategy = oracle_name == "checker"
                   ? sem::Strategy::opt(sem::TrivialityOracle::from_checker(
                         tc::checker_oracle(*backend)))
                   : sem::Strategy::opt(sem::TrivialityOracle::fuel_probe(fuel));
  } else if (strategy_name != "cbn") {
    std::cerr << "error: unknown strategy '" << strategy_name << "'\n";
    return kExitUsage;
  }

  ExprPtr main_expr = program->desugar();
  sem::Outcome outcome = sem::eval(main_expr, strategy, fuel, trace);
  if (trace)
    for (std::size_t i = 0; i < outcome.trace.size(); ++i)
      std::cout << i << ": " << pretty(outcome.trace[i]) << "\n";
  if (opts.format == "json") {
    std::cout << outcome_to_json(outcome, strategy_name, fuel).dump(2) << "\n";
  } else {
    switch (outcome.kind) {
      case sem::Outcome::Kind::Value:
        std::cout << "value " << pretty(outcome.value) << " (" << outcome.steps_used
                  << " steps)\n";
        break;
      case sem::Outcome::Kind::Crash:
        std::cout << "crash (" << outcome.steps_used << " steps)\n";
        break;
      case sem::Outcome::Kind::FuelExhausted:
        std::cout << "fuel exhausted (" << outcome.steps_used << " steps)\n";
        break;
    }
  }
  switch (outcome.kind) {
    case sem::Outcome::Kind::Value: return kExitSafe;
    case sem::Outcome::Kind::Crash: return kExitCrash;
    default: return kExitFuel;
  }
}

int cmd_smt_dump(const CommonOpts& opts, const std::string& out_dir) {
  auto program = load_program(opts.input);
  if (!program) return kExitUsage;
  auto mode = make_mode(opts.mode);
  auto backend = make_backend(opts.backend, opts.time_limit);
  if (!mode || !backend) return kExitUsage;

  tc::Checker checker(*mode, *backend);
  checker.check_program(*program);

  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    std::cerr << "error: cannot create '" << out_dir << "': " << ec.message()
              << "\n";
    return kExitUsage;
  }
  nlohmann::json index = nlohmann::json::array();
  const auto& queries = checker.queries();
  for (std::size_t i = 0; i < queries.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "q%04zu.smt2", i);
    std::filesystem::path file = std::filesystem::path(out_dir) / name;
    std::ofstream out(file);
    if (!out) {
      std::cerr << "error: cannot write '" << file.string() << "'\n";
      return kExitUsage;
    }
    out << smt::emit_smtlib(queries[i].query);
    const char* verdict = queries[i].verdict.valid()     ? "valid"
                          : queries[i].verdict.invalid() ? "invalid"
                                                         : "unknown";
    index.push_back({{"file", name},
                     {"rule", queries[i].query.origin.rule},
                     {"span",
                      {{"line", queries[i].query.origin.span.line},
                       {"col", queries[i].query.origin.span.col}}},
                     {"verdict", verdict}});
  }
  std::ofstream out(std::filesystem::path(out_dir) / "index.json");
  out << index.dump(2) << "\n";
  std::cout << "wrote " << queries.size() << " queries to " << out_dir << "\n";
  return kExitSafe;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Refinement type checker and interpreter for a lazy core language"};
  app.require_subcommand(1);

  CommonOpts check_opts;
  auto* check = app.add_subcommand("check", "Type-check a program");
  check->add_option("input", check_opts.input, "Program file (.lzr)")->required();
  check->add_option("--mode", check_opts.mode, "sound | eager-naive");
  check->add_option("--backend", check_opts.backend, "builtin | exec:<command>");
  check->add_option("--time-limit", check_opts.time_limit,
                    "Seconds per external solver query");
  check->add_option("--format", check_opts.format, "text | json");

  CommonOpts run_opts;
  std::string strategy = "cbn";
  std::string oracle = "probe";
  std::size_t fuel = sem::kDefaultFuel;
  bool trace = false;
  auto* run = app.add_subcommand("run", "Evaluate a program's main expression");
  run->add_option("input", run_opts.input, "Program file (.lzr)")->required();
  run->add_option("--strategy", strategy, "cbn | cbv | opt");
  run->add_option("--oracle", oracle, "probe | checker (for opt)");
  run->add_option("--fuel", fuel, "Step budget")->check(CLI::PositiveNumber);
  run->add_flag("--trace", trace, "Print every intermediate term");
  run->add_option("--backend", run_opts.backend,
                  "Solver backend for the checker oracle");
  run->add_option("--format", run_opts.format, "text | json");

  CommonOpts dump_opts;
  std::string out_dir = "smt-dump";
  auto* dump = app.add_subcommand("smt-dump",
                                  "Write every obligation as an .smt2 file");
  dump->add_option("input", dump_opts.input, "Program file (.lzr)")->required();
  dump->add_option("--mode", dump_opts.mode, "sound | eager-naive");
  dump->add_option("--backend", dump_opts.backend, "builtin | exec:<command>");
  dump->add_option("--out-dir", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  if (check->parsed()) return cmd_check(check_opts);
  if (run->parsed()) return cmd_run(run_opts, strategy, oracle, fuel, trace);
  if (dump->parsed()) return cmd_smt_dump(dump_opts, out_dir);
  return kExitUsage;
}
