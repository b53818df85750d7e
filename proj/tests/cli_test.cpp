#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "lazyref/vendor_json.hpp"
#include "testers.hpp"

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string(LAZYREF_CLI_PATH) + " " + args + " 2>&1";
  CliResult result;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
  result.exit_code = WEXITSTATUS(pclose(pipe));
  return result;
}

std::string corpus(const std::string& name) { return testers::corpus_file(name); }

}  // namespace

TEST_CASE("check exit codes") {
  CHECK(run_cli("check " + corpus("good.lzr")).exit_code == 0);
  CHECK(run_cli("check " + corpus("bad.lzr")).exit_code == 1);
  CHECK(run_cli("check /nonexistent.lzr").exit_code == 2);

  // Parse errors are usage errors.
  std::string tmp = "/tmp/lazyref_cli_parse_error.lzr";
  std::ofstream(tmp) << "main = 2014 / z\n";
  CHECK(run_cli("check " + tmp).exit_code == 2);
}

TEST_CASE("run exit codes") {
  CHECK(run_cli("run " + corpus("fib5.lzr") + " --strategy cbn").exit_code == 0);
  CHECK(run_cli("run " + corpus("foobar.lzr") + " --strategy cbn").exit_code == 4);
  CHECK(run_cli("run " + corpus("foobar.lzr") + " --strategy cbv --fuel 500")
            .exit_code == 5);
  CliResult opt = run_cli("run " + corpus("fib5.lzr") +
                          " --strategy opt --fuel 100000");
  CHECK(opt.exit_code == 0);
  CHECK(opt.output.find("value 8") != std::string::npos);
  CliResult checker_oracle = run_cli("run " + corpus("fib5.lzr") +
                                     " --strategy opt --oracle checker");
  CHECK(checker_oracle.exit_code == 0);
  CHECK(checker_oracle.output.find("value 8") != std::string::npos);
}

TEST_CASE("an undecidable backend maps to the unknown exit code") {
  CliResult r = run_cli("check " + corpus("good.lzr") +
                        " --backend exec:this_solver_does_not_exist");
  CHECK(r.exit_code == 3);
}

TEST_CASE("the naive watermark is prominent") {
  CliResult r = run_cli("check " + corpus("foobar.lzr") + " --mode eager-naive");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("Safe (UNSOUND MODE)") != std::string::npos);
}

TEST_CASE("json report output parses and matches the verdict") {
  CliResult r = run_cli("check " + corpus("foobar.lzr") + " --format json");
  CHECK(r.exit_code == 1);
  auto j = nlohmann::json::parse(r.output);
  CHECK(j.at("verdict") == "unsafe");
  CHECK(j.at("mode") == "sound");
  CHECK(j.at("errors").size() == 1);

  CliResult run = run_cli("run " + corpus("baz.lzr") + " --format json");
  CHECK(run.exit_code == 0);
  auto jr = nlohmann::json::parse(run.output);
  CHECK(jr.at("outcome") == "value");
  CHECK(jr.at("result") == "0");
}

TEST_CASE("traces print one term per step") {
  CliResult r = run_cli("run " + corpus("lazy_skip.lzr") + " --trace");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("0: ") != std::string::npos);
  CHECK(r.output.find("value 5") != std::string::npos);
}

TEST_CASE("smt-dump writes numbered queries plus an index") {
  std::string dir = "/tmp/lazyref_cli_dump";
  std::filesystem::remove_all(dir);
  CliResult r = run_cli("smt-dump " + corpus("good.lzr") + " --out-dir " + dir);
  CHECK(r.exit_code == 0);
  REQUIRE(std::filesystem::exists(dir + "/q0000.smt2"));
  CHECK_FALSE(std::filesystem::exists(dir + "/q0001.smt2"));
  std::ifstream index(dir + "/index.json");
  auto j = nlohmann::json::parse(index);
  REQUIRE(j.size() == 1);
  CHECK(j[0].at("verdict") == "valid");
  CHECK(j[0].at("rule") == "S-Base-Top");

  // A program with no obligations dumps no query files.
  std::string tmp = "/tmp/lazyref_cli_constant.lzr";
  std::ofstream(tmp) << "main = 5\n";
  std::string dir2 = "/tmp/lazyref_cli_dump_empty";
  std::filesystem::remove_all(dir2);
  CHECK(run_cli("smt-dump " + tmp + " --out-dir " + dir2).exit_code == 0);
  CHECK_FALSE(std::filesystem::exists(dir2 + "/q0000.smt2"));
}
