// Copyright 2026 The PRW Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

namespace prw::cli {
namespace {

using nlohmann::json;

struct Captured {
  int code = 0;
  std::string out;
  std::string err;
};

Captured call(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  Captured c;
  c.code = run(args, out, err);
  c.out = out.str();
  c.err = err.str();
  return c;
}

std::string tmp_dir(const std::string& name) {
  const std::filesystem::path p = std::filesystem::path(PRW_TEST_TMP) / name;
  std::filesystem::create_directories(p);
  return p.string();
}

std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string f;
  while (std::getline(ss, f, ',')) out.push_back(f);
  return out;
}

TEST(ParseHypercubeTest, Fields) {
  const HypercubeSpec s = parse_hypercube("n=30,d=7,kstar=3");
  EXPECT_EQ(s.n, 30);
  EXPECT_EQ(s.d, 7);
  EXPECT_EQ(s.kstar, 3);
  EXPECT_EQ(s.k, 3);
  EXPECT_EQ(parse_hypercube("n=30,d=7,kstar=3,k=1").k, 1);
  EXPECT_THROW(parse_hypercube("n=30,d"), InvalidInput);
  EXPECT_THROW(parse_hypercube("n=3x"), InvalidInput);
  EXPECT_THROW(parse_hypercube("n=3,q=1"), InvalidInput);
}

TEST(RunSeedsTest, DistinctAndStable) {
  const RunSeeds a = run_seeds(1, 0, 0, 0);
  EXPECT_EQ(a.instance, run_seeds(1, 0, 0, 0).instance);
  EXPECT_EQ(a.instance, run_seeds(1, 0, 0, 3).instance);
  EXPECT_NE(a.init, run_seeds(1, 0, 0, 1).init);
  EXPECT_NE(a.instance, run_seeds(1, 0, 1, 0).instance);
  EXPECT_NE(a.instance, run_seeds(1, 1, 0, 0).instance);
  EXPECT_NE(a.instance, run_seeds(2, 0, 0, 0).instance);
}

TEST(CliTest, SolveIsDeterministic) {
  const std::vector<std::string> args{"solve", "--hypercube",
                                      "n=20,d=5,kstar=2", "--seed", "4"};
  const Captured a = call(args);
  const Captured b = call(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  const json rep = json::parse(a.out);
  EXPECT_TRUE(rep["converged"].get<bool>());
  EXPECT_TRUE(rep["certificate"]["grad_ok"].get<bool>());
  EXPECT_TRUE(rep["prw_p_exact"].get<bool>());
  EXPECT_GT(rep["prw"].get<double>(), 0.0);
}

TEST(CliTest, GeneratedPointsReproduceHypercubeSolve) {
  const std::string dir = tmp_dir("gen");
  ASSERT_EQ(call({"gen", "--hypercube", "n=15,d=4,kstar=2", "--seed", "9",
                  "--out", dir})
                .code,
            0);
  const Captured from_points =
      call({"solve", "--points", dir + "/X.csv", dir + "/Y.csv", "--weights",
            dir + "/r.csv", dir + "/c.csv", "--k", "2", "--seed", "9"});
  const Captured from_cube =
      call({"solve", "--hypercube", "n=15,d=4,kstar=2", "--seed", "9"});
  ASSERT_EQ(from_points.code, 0) << from_points.err;
  ASSERT_EQ(from_cube.code, 0) << from_cube.err;
  const json p = json::parse(from_points.out);
  const json c = json::parse(from_cube.out);
  EXPECT_EQ(p["prw"], c["prw"]);
  EXPECT_EQ(p["n_grad"], c["n_grad"]);
}

TEST(CliTest, BenchRowMatchesSolve) {
  const std::string dir = tmp_dir("bench");
  const Captured bench =
      call({"bench", "--grid", "12x4", "--kstar", "2", "--instances", "1",
            "--inits", "1", "--config", "0.055:0.9", "--seed", "5", "--out",
            dir + "/runs.csv"});
  ASSERT_EQ(bench.code, 0) << bench.err;
  std::ifstream f(dir + "/runs.csv");
  std::string header, row;
  std::getline(f, header);
  std::getline(f, row);
  const auto names = csv_fields(header);
  const auto values = csv_fields(row);
  ASSERT_EQ(names.size(), values.size());
  auto field = [&](const std::string& name) {
    for (std::size_t i = 0; i < names.size(); ++i) {
      if (names[i] == name) return values[i];
    }
    return std::string();
  };
  const Captured solve =
      call({"solve", "--hypercube", "n=12,d=4,kstar=2", "--seed", "5"});
  ASSERT_EQ(solve.code, 0) << solve.err;
  const json rep = json::parse(solve.out);
  EXPECT_EQ(std::stod(field("prw")), rep["prw"].get<double>());
  EXPECT_EQ(std::stod(field("prw_p")), rep["prw_p"].get<double>());
  EXPECT_EQ(std::stoll(field("n_grad")), rep["n_grad"].get<long long>());
  EXPECT_NE(bench.out.find("K1/K"), std::string::npos);
}

TEST(CliTest, TraceAndCsvOutputs) {
  const std::string dir = tmp_dir("trace");
  const Captured c =
      call({"solve", "--hypercube", "n=10,d=4,kstar=2", "--seed", "2",
            "--trace", dir + "/t.json", "--out", dir + "/s.csv"});
  ASSERT_EQ(c.code, 0) << c.err;
  std::ifstream tf(dir + "/t.json");
  const json t = json::parse(tf);
  EXPECT_FALSE(t["history"].empty());
  std::ifstream sf(dir + "/s.csv");
  std::string header;
  std::getline(sf, header);
  EXPECT_EQ(header.rfind("prw,prw_p,converged", 0), 0u);
}

TEST(CliTest, OtherSolvers) {
  const Captured irbbs = call({"solve", "--hypercube", "n=10,d=4,kstar=2",
                               "--solver", "irbbs", "--eta", "0.5"});
  EXPECT_EQ(irbbs.code, 0) << irbbs.err;
  const Captured logmode =
      call({"solve", "--hypercube", "n=10,d=4,kstar=2", "--solver", "irbbs",
            "--eta", "0.5", "--mode", "log"});
  EXPECT_EQ(logmode.code, 0) << logmode.err;
  EXPECT_NEAR(json::parse(irbbs.out)["prw"].get<double>(),
              json::parse(logmode.out)["prw"].get<double>(), 1e-4);
}

TEST(CliTest, ExitCodes) {
  EXPECT_EQ(call({"solve", "--hypercube", "n=10,d=4,kstar=2", "--solver",
                  "fixed", "--tau", "1e-9"})
                .code,
            1);
  EXPECT_EQ(call({"solve"}).code, 2);
  EXPECT_EQ(call({"solve", "--hypercube", "n=10,d=4,kstar=9"}).code, 2);
  EXPECT_EQ(call({"solve", "--points", "/nonexistent/X.csv",
                  "/nonexistent/Y.csv", "--k", "1"})
                .code,
            2);
  EXPECT_EQ(call({"solve", "--hypercube", "n=10,d=4,kstar=2", "--solver",
                  "simplex"})
                .code,
            2);
  EXPECT_EQ(call({"bench", "--grid", "10by4"}).code, 2);
  EXPECT_EQ(call({"--bogus"}).code, 2);
  EXPECT_EQ(call({"--help"}).code, 0);
  const Captured bad = call({"solve", "--hypercube", "n=10,d=4,kstar=9"});
  EXPECT_NE(bad.err.find("kstar"), std::string::npos);
}

}  // namespace
}  // namespace prw::cli
