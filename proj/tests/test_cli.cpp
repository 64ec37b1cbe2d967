// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "psc/registry.hpp"

namespace fs = std::filesystem;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CliFixture {
  fs::path dir;

  CliFixture() {
    dir = fs::temp_directory_path() / ("psc_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(dir);
  }
  ~CliFixture() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }

  CliResult run(const std::string& args) const {
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string command = "cd '" + dir.string() + "' && '" + PSC_CLI_PATH + "' " + args +
                                " > '" + out.string() + "' 2> '" + err.string() + "'";
    const int status = std::system(command.c_str());
    CliResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out);
    result.err = slurp(err);
    return result;
  }
};

}  // namespace

TEST_CASE("cli compare writes a report and a plot, exit 0, silent stderr") {
  CliFixture fx;
  const auto gen = fx.run("simgen --scenario crossing --x-cross 1.5 --range 0:3 --seed 7 "
                          "--out runs.jsonl");
  REQUIRE(gen.exit_code == 0);
  CHECK(gen.err.empty());

  const auto cmp = fx.run("compare --records runs.jsonl --x l2 --y asr --range 0:3.0 "
                          "--resolution 10 --order 5 --out report.json --plot fig.svg");
  CHECK(cmp.exit_code == 0);
  CHECK(cmp.err.empty());
  CHECK(cmp.out.find("RANK") != std::string::npos);
  CHECK(fs::exists(fx.dir / "report.json"));
  CHECK(fs::exists(fx.dir / "fig.svg"));

  const auto report = nlohmann::json::parse(slurp(fx.dir / "report.json"));
  CHECK(report.at("entries").size() == 2);
  CHECK(report.at("entries").at(0).at("curve").at("type") == "polynomial");
}

TEST_CASE("cli rejects d >= r with the constraint spelled out") {
  CliFixture fx;
  REQUIRE(fx.run("simgen --scenario crossing --x-cross 1.5 --range 0:3 --seed 7 "
                 "--out runs.jsonl")
              .exit_code == 0);
  const auto cmp = fx.run("compare --records runs.jsonl --x l2 --y asr --range 0:3.0 "
                          "--resolution 5 --order 5");
  CHECK(cmp.exit_code == 1);
  CHECK(cmp.err.find("resolution r must be larger than order d") != std::string::npos);
  // Structured single-line error on stderr.
  const auto line = nlohmann::json::parse(cmp.err);
  CHECK(line.at("error") == "InvalidOrder");
}

TEST_CASE("cli accepts r = 5 with d = 0 and produces polylines") {
  CliFixture fx;
  REQUIRE(fx.run("simgen --scenario crossing --x-cross 1.5 --range 0:3 --seed 7 "
                 "--out runs.jsonl")
              .exit_code == 0);
  const auto cmp = fx.run("compare --records runs.jsonl --x l2 --y asr --range 0:3.0 "
                          "--resolution 5 --order 0 --out report.json");
  CHECK(cmp.exit_code == 0);
  const auto report = nlohmann::json::parse(slurp(fx.dir / "report.json"));
  for (const auto& entry : report.at("entries")) {
    CHECK(entry.at("curve").at("type") == "polyline");
  }
}

TEST_CASE("cli maps missing input to exit 2 and sparse data to exit 3") {
  CliFixture fx;
  const auto missing = fx.run("compare --records nothere.jsonl --x l2 --y asr --range 0:3 "
                              "--resolution 10 --order 5");
  CHECK(missing.exit_code == 2);

  // Three populated parts cannot support a degree-5 fit.
  std::ofstream sparse(fx.dir / "sparse.csv");
  sparse << "method,param_set,dataset,model,mode,attack_family,l2,asr\n";
  for (double x : {0.1, 1.0, 2.0}) {
    sparse << "m,ps1,mnist,cnn4,untargeted,gradient," << x << ",50\n";
  }
  sparse.close();
  const auto cmp = fx.run("compare --records sparse.csv --x l2 --y asr --range 0:3 "
                          "--resolution 10 --order 5");
  CHECK(cmp.exit_code == 3);
  CHECK(nlohmann::json::parse(cmp.err).at("error") == "InsufficientPoints");
}

TEST_CASE("cli simgen is deterministic and validates its parameters") {
  CliFixture fx;
  REQUIRE(fx.run("simgen --scenario crossing --x-cross 1.5 --range 0:3 --seed 7 --out a.jsonl")
              .exit_code == 0);
  REQUIRE(fx.run("simgen --scenario crossing --x-cross 1.5 --range 0:3 --seed 7 --out b.jsonl")
              .exit_code == 0);
  CHECK(slurp(fx.dir / "a.jsonl") == slurp(fx.dir / "b.jsonl"));

  CHECK(fx.run("simgen --scenario crossing --x-cross 1.5 --range 0:3 --noise-sd -1 "
               "--out c.jsonl")
            .exit_code == 1);
  CHECK(fx.run("simgen --scenario nope --out c.jsonl").exit_code == 1);
  CHECK(fx.run("simgen --scenario crossing --x-cross 0 --range 0:3 --out c.jsonl").exit_code ==
        1);
}

TEST_CASE("cli registry add/list/compare work end to end") {
  CliFixture fx;
  const std::string root = (fx.dir / "reg").string();
  const std::string spec_flags = "--x l2 --y asr --range 0:3 --resolution 10 --order 5";

  REQUIRE(fx.run("simgen --scenario crossing --x-cross 1.5 --range 0:3 --seed 7 "
                 "--out runs.jsonl")
              .exit_code == 0);

  // Empty root lists cleanly.
  const auto empty = fx.run("registry --root '" + root + "' list");
  CHECK(empty.exit_code == 0);
  CHECK(empty.out.find("DATASET") != std::string::npos);

  const auto add_a = fx.run("registry --root '" + root + "' add --records runs.jsonl "
                            "--method attack_a --submitter alice --timestamp 1700000000 " +
                            spec_flags);
  REQUIRE(add_a.exit_code == 0);
  const auto add_b = fx.run("registry --root '" + root + "' add --records runs.jsonl "
                            "--method attack_b --submitter bob --timestamp 1700000100 " +
                            spec_flags);
  REQUIRE(add_b.exit_code == 0);

  const auto listed = fx.run("registry --root '" + root + "' list");
  CHECK(listed.exit_code == 0);
  CHECK(listed.out.find("attack_a") != std::string::npos);
  CHECK(listed.out.find("attack_b") != std::string::npos);

  // A third method to upload: same records relabelled.
  std::string third = slurp(fx.dir / "runs.jsonl");
  for (std::size_t pos = third.find("attack_a"); pos != std::string::npos;
       pos = third.find("attack_a", pos)) {
    third.replace(pos, 8, "attack_c");
  }
  std::ofstream(fx.dir / "mine.jsonl", std::ios::binary) << third;

  const auto merged = fx.run("registry --root '" + root + "' compare --upload mine.jsonl "
                             "--method attack_c " + spec_flags);
  CHECK(merged.exit_code == 0);
  CHECK(merged.out.find("attack_a") != std::string::npos);
  CHECK(merged.out.find("attack_b") != std::string::npos);
  CHECK(merged.out.find("attack_c") != std::string::npos);

  // Context mismatch: relabel the dataset.
  std::string other = slurp(fx.dir / "mine.jsonl");
  for (std::size_t pos = other.find("synthetic"); pos != std::string::npos;
       pos = other.find("synthetic", pos)) {
    other.replace(pos, 9, "different");
  }
  std::ofstream(fx.dir / "other.jsonl", std::ios::binary) << other;
  const auto mismatch = fx.run("registry --root '" + root + "' compare --upload other.jsonl "
                               "--method attack_c " + spec_flags);
  CHECK(mismatch.exit_code == 0);  // different context = different key: degraded single report
  CHECK(mismatch.out.find("no baselines") != std::string::npos);
}

TEST_CASE("cli plot re-renders a saved report identically") {
  CliFixture fx;
  REQUIRE(fx.run("simgen --scenario crossing --x-cross 1.5 --range 0:3 --seed 7 "
                 "--out runs.jsonl")
              .exit_code == 0);
  REQUIRE(fx.run("compare --records runs.jsonl --x l2 --y asr --range 0:3 --resolution 10 "
                 "--order 5 --out report.json --plot fig.svg")
              .exit_code == 0);
  const auto replot = fx.run("plot --report report.json --out fig2.svg");
  CHECK(replot.exit_code == 0);
  CHECK(slurp(fx.dir / "fig.svg") == slurp(fx.dir / "fig2.svg"));
}

TEST_CASE("cli --print-config output reparses to the same configuration") {
  CliFixture fx;
  REQUIRE(fx.run("simgen --scenario crossing --x-cross 1.5 --range 0:3 --seed 7 "
                 "--out runs.jsonl")
              .exit_code == 0);
  const auto first = fx.run("compare --records runs.jsonl --x l2 --y asr --range 0:3 "
                            "--resolution 10 --order 5 --print-config");
  REQUIRE(first.exit_code == 0);
  std::ofstream(fx.dir / "cfg.ini", std::ios::binary) << first.out;
  const auto second = fx.run("--config cfg.ini compare --print-config");
  REQUIRE(second.exit_code == 0);
  CHECK(first.out == second.out);
}

TEST_CASE("cli --fix validates its syntax and its data requirements") {
  CliFixture fx;
  REQUIRE(fx.run("simgen --scenario crossing --x-cross 1.5 --range 0:3 --seed 7 "
                 "--out runs.jsonl")
              .exit_code == 0);
  const std::string base = "compare --records runs.jsonl --x l2 --y asr --range 0:3 "
                           "--resolution 10 --order 5 ";
  CHECK(fx.run(base + "--fix queries=100").exit_code == 1);         // missing ~tolerance
  CHECK(fx.run(base + "--fix nope=1~0.5").exit_code == 1);          // unknown metric
  CHECK(fx.run(base + "--fix asr=99.5~0.5").exit_code == 1);        // clashes with the y axis
  const auto missing = fx.run(base + "--fix queries=100~10");       // no queries in the data
  CHECK(missing.exit_code == 3);
  CHECK(nlohmann::json::parse(missing.err).at("error") == "NoApplicableRecords");
}

TEST_CASE("cli plot writes to standard output with --out -") {
  CliFixture fx;
  REQUIRE(fx.run("simgen --scenario crossing --x-cross 1.5 --range 0:3 --seed 7 "
                 "--out runs.jsonl")
              .exit_code == 0);
  REQUIRE(fx.run("compare --records runs.jsonl --x l2 --y asr --range 0:3 --resolution 10 "
                 "--order 5 --out report.json --plot fig.svg")
              .exit_code == 0);
  const auto piped = fx.run("plot --report report.json --out -");
  CHECK(piped.exit_code == 0);
  CHECK(piped.out == slurp(fx.dir / "fig.svg"));
}

TEST_CASE("cli without a subcommand fails with a structured error") {
  CliFixture fx;
  const auto bare = fx.run("");
  CHECK(bare.exit_code == 1);
  CHECK(nlohmann::json::parse(bare.err).at("error") == "ParseError");
}
