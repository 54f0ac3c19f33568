// Copyright 2026 The schur-stream Authors
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

#include "schur/cli.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace schur::cli {
namespace {

struct Result {
  int code;
  std::string out, err;
  json parsed() const { return json::parse(out); }
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "schur");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string demo(const std::string& name) { return std::string(SCHUR_DEMO_DIR) + "/" + name; }

std::string temp_file(const std::string& name, const std::string& content) {
  auto path = std::filesystem::temp_directory_path() / ("schur_cli_test_" + name);
  std::ofstream(path) << content;
  return path.string();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (char ch : line) {
      if (ch == '"') quoted = !quoted;
      else if (ch == ',' && !quoted) {
        fields.push_back(cur);
        cur.clear();
      } else cur += ch;
    }
    fields.push_back(cur);
    rows.push_back(fields);
  }
  return rows;
}

TEST(Cli, DistOnMixedStream) {
  auto r = call({"dist", "--d", "2", "--stream", demo("iid_mixed_n3.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = r.parsed();
  EXPECT_EQ(j["tool"], "schur");
  EXPECT_EQ(j["version"], kVersion);
  EXPECT_EQ(j["config"]["d"], 2);
  EXPECT_NEAR(j["result"]["marginal"]["3,0"].get<double>(), 0.5, 1e-12);
  EXPECT_NEAR(j["result"]["marginal"]["2,1"].get<double>(), 0.5, 1e-12);
}

TEST(Cli, SampleOnZeros) {
  auto r = call({"sample", "--d", "2", "--stream", demo("zeros_n5.json"), "--seed", "7"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = r.parsed();
  EXPECT_EQ(j["seed"], 7);
  EXPECT_EQ(j["result"]["trials"][0]["lambda"], "5,0");
  EXPECT_EQ(j["result"]["trials"][0]["path"], "0,0,0,0");
}

TEST(Cli, ResourcesAtTwo) {
  auto r = call({"resources", "--n", "2", "--d", "2", "--epsilon", "0.001"});
  ASSERT_EQ(r.code, 0) << r.err;
  json j = r.parsed();
  EXPECT_EQ(j["result"]["totals"]["two_level_bound"], "8");
  EXPECT_NE(j["result"]["model"]["notice"].get<std::string>().find("model estimate"), std::string::npos);
}

TEST(Cli, FullOracleAndCg) {
  auto full = call({"full", "--d", "2", "--state", demo("singlet.json")});
  ASSERT_EQ(full.code, 0) << full.err;
  EXPECT_NEAR(full.parsed()["result"]["marginal"]["1,1"].get<double>(), 1.0, 1e-12);

  auto oracle = call({"oracle", "--d", "2", "--compare", demo("iid_mixed_n3.json")});
  ASSERT_EQ(oracle.code, 0) << oracle.err;
  EXPECT_LT(oracle.parsed()["result"]["max_deviation"].get<double>(), 1e-9);
  auto ghz = call({"oracle", "--d", "2", "--state", demo("ghz3.json")});
  ASSERT_EQ(ghz.code, 0) << ghz.err;
  const json ghz_full = call({"full", "--d", "2", "--state", demo("ghz3.json")}).parsed()["result"]["marginal"];
  const json ghz_oracle = ghz.parsed()["result"]["marginal"];
  for (const auto& [lambda, p] : ghz_oracle.items())
    EXPECT_NEAR(ghz_full.value(lambda, 0.0), p.get<double>(), 1e-9);

  auto cg = call({"cg", "--d", "2", "--lambda", "3,1"});
  ASSERT_EQ(cg.code, 0) << cg.err;
  json c = cg.parsed()["result"];
  EXPECT_EQ(c["size"], 6);
  EXPECT_EQ(c["blocks"].size(), 2u);
  EXPECT_EQ(c["matrix"]["data"].size(), 72u);
  EXPECT_TRUE(c["sparsity"]["two_per_row_holds"].get<bool>());

  const std::string dump = (std::filesystem::temp_directory_path() / "schur_cli_dump.json").string();
  auto dumped = call({"cg", "--d", "3", "--lambda", "2,1", "--dump", dump});
  ASSERT_EQ(dumped.code, 0) << dumped.err;
  std::ifstream f(dump);
  json file = json::parse(f);
  EXPECT_EQ(file["matrix"]["rows"], 24);
}

TEST(Cli, QutritMixedStreamFormats) {
  auto r = call({"dist", "--d", "3", "--stream", demo("qutrit_mixed_stream.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const json marginal = r.parsed()["result"]["marginal"];
  double total = 0;
  for (const auto& [k, v] : marginal.items()) total += v.get<double>();
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(call({"dist", "--d", "2", "--bogus"}).code, 1);
  EXPECT_EQ(call({"dist", "--d", "2", "--stream", "/nonexistent.json"}).code, 1);
  auto bad_json = temp_file("bad.json", "[[1, 0], [1, ");
  auto r = call({"dist", "--d", "2", "--stream", bad_json});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("malformed JSON"), std::string::npos);
  auto unnormalized = temp_file("unnorm.json", "[[1, 0], [1, 1], [0, 1]]");
  r = call({"dist", "--d", "2", "--stream", unnormalized});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("stream element 1"), std::string::npos);
  EXPECT_EQ(call({"dist", "--d", "2", "--stream", demo("zeros_n5.json"), "--prune", "0.1"}).code, 1);
  EXPECT_EQ(call({"dist", "--d", "2", "--stream", demo("iid_mixed_n3.json"), "--cap", "1"}).code, 2);
  EXPECT_EQ(call({"oracle", "--d", "2", "--n", "11"}).code, 2);
  EXPECT_EQ(call({"cg", "--d", "2", "--lambda", "1,2"}).code, 1);
  EXPECT_EQ(call({"sample", "--d", "2", "--stream", demo("zeros_n5.json"), "--trials", "0"}).code, 1);
  EXPECT_EQ(call({}).code, 1);
}

TEST(Cli, VersionAndSchema) {
  auto v = call({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find(kVersion), std::string::npos);
  auto s = call({"--schema"});
  ASSERT_EQ(s.code, 0);
  json j = s.parsed();
  EXPECT_TRUE(j.contains("stream"));
  EXPECT_TRUE(j.contains("state"));
  EXPECT_TRUE(j.contains("report"));
  EXPECT_EQ(call({"--schema", "stream"}).code, 0);
  EXPECT_EQ(call({"--schema", "nope"}).code, 1);
}

TEST(Cli, DeterministicReports) {
  const std::vector<std::string> args{"sample", "--d", "2", "--stream", demo("zero_one.json"),
                                      "--seed", "11", "--trials", "25"};
  auto a = call(args);
  auto b = call(args);
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  auto c = call({"sample", "--d", "2", "--stream", demo("zero_one.json"), "--seed", "12", "--trials", "25"});
  EXPECT_NE(a.out, c.out);
}

TEST(Cli, CsvMatchesJson) {
  for (const auto& stream : {"iid_mixed_n3.json", "zero_one.json"}) {
    auto j = call({"dist", "--d", "2", "--stream", demo(stream)});
    auto c = call({"dist", "--d", "2", "--stream", demo(stream), "--format", "csv"});
    ASSERT_EQ(j.code, 0);
    ASSERT_EQ(c.code, 0);
    auto rows = parse_csv(c.out);
    const json paths = j.parsed()["result"]["paths"];
    ASSERT_EQ(rows.size(), paths.size() + 1);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"lambda", "path", "probability"}));
    for (std::size_t i = 0; i < paths.size(); ++i) {
      EXPECT_EQ(rows[i + 1][0], paths[i]["lambda"]);
      EXPECT_EQ(rows[i + 1][1], paths[i]["path"]);
      EXPECT_EQ(std::stod(rows[i + 1][2]), paths[i]["probability"].get<double>());
    }
  }
  auto j = call({"sample", "--d", "2", "--stream", demo("zero_one.json"), "--seed", "3", "--trials", "5"});
  auto c = call({"sample", "--d", "2", "--stream", demo("zero_one.json"), "--seed", "3", "--trials", "5",
                 "--format", "csv"});
  auto rows = parse_csv(c.out);
  const json trials = j.parsed()["result"]["trials"];
  for (std::size_t i = 0; i < trials.size(); ++i) {
    EXPECT_EQ(rows[i + 1][1], trials[i]["lambda"]);
    EXPECT_EQ(std::stod(rows[i + 1][3]), trials[i]["probability"].get<double>());
  }
}

}  // namespace
}  // namespace schur::cli
