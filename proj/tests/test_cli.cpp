// Copyright 2026 The qslkit Authors
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


#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "qslkit_cli.hpp"
#include "test_support.hpp"

namespace qslkit {
namespace {

namespace fs = std::filesystem;

const std::string kModels = (fs::path(QSLKIT_SOURCE_DIR) / "models").string();

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string model(const std::string& name) { return kModels + "/" + name; }

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

class CliTemp : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qslkit-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST(Cli, QslDephasing) {
  const Outcome r = run({"qsl", "--model", model("two-level-dephasing.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "A = 2\n"));
  EXPECT_TRUE(contains(r.out, "E = 1\n"));
  EXPECT_TRUE(contains(r.out, "T* = 0.008839222\n"));
  EXPECT_TRUE(contains(r.out, "T_DC = 0.007071068\n"));
  EXPECT_TRUE(contains(r.out, "T*/T_DC = 1.250055\n"));
  EXPECT_TRUE(contains(r.out, "closed system: no\n"));
}

TEST(Cli, QslJson) {
  const Outcome r = run({"qsl", "--model", model("two-level-dephasing.json"), "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_DOUBLE_EQ(j["t_star"].get<double>(), 0.008839222);
  EXPECT_EQ(j["stationary"], false);
}

TEST(Cli, QslStationary) {
  const Outcome r = run({"qsl", "--model", model("bell-collective.json")});
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(contains(r.out, "A = 4\n"));
  const Outcome s = run({"qsl", "--model", model("minimal.json"), "--lambda", "0.2"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_TRUE(contains(s.out, "closed system: yes\n"));
}

TEST_F(CliTemp, QslInfinity) {
  const std::string psi_minus = write("m.json", R"j({"dimension": 4,
    "channels": ["kron(sm, id(2)) + kron(id(2), sm)"],
    "initial_state": [0, "sqrt(0.5)", "-sqrt(0.5)", 0], "lambda": 0.1})j");
  const Outcome r = run({"qsl", "--model", psi_minus});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "T* = infinity (stationary)\n"));
  EXPECT_TRUE(contains(r.out, "stationary: yes\n"));
  const json j = json::parse(run({"qsl", "--model", psi_minus, "--json"}).out);
  EXPECT_EQ(j["t_star"], "infinity");
}

TEST(Cli, LambdaAndTheta) {
  const Outcome r = run({"qsl", "--model", model("minimal.json"), "--theta", "1.5707963267948966"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "lambda = 1\n"));
  EXPECT_EQ(run({"qsl", "--model", model("minimal.json"), "--theta", "1", "--lambda", "0.1"}).code, 1);
  EXPECT_EQ(run({"qsl", "--model", model("minimal.json")}).code, 1);
  EXPECT_EQ(run({"qsl", "--model", model("minimal.json"), "--lambda", "1.5"}).code, 3);
}

TEST(Cli, Escape) {
  const Outcome r = run({"escape", "--model", model("two-level-dephasing.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "T = 0.01010135\n")) << r.out;
  EXPECT_TRUE(contains(r.out, "T >= T*: yes\n"));
  EXPECT_TRUE(r.err.empty());
  const Outcome never = run({"escape", "--model", model("minimal.json"), "--lambda", "0.5", "--tmax", "0.1"});
  ASSERT_EQ(never.code, 0) << never.err;
  EXPECT_TRUE(contains(never.out, "not escaped within tmax = 0.1\n"));
  const json j = json::parse(run({"escape", "--model", model("two-level-dephasing.json"), "--json"}).out);
  EXPECT_EQ(j["bound_holds"], true);
  EXPECT_EQ(j["escaped"], true);
}

TEST(Cli, RankBellStates) {
  const Outcome r = run({"rank", "--model", model("bell-collective.json"), "--states", model("bell-states.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::size_t a = r.out.find("1. psi-"), b = r.out.find("2. phi+"), c = r.out.find("3. phi-"),
                    d = r.out.find("4. psi+");
  EXPECT_NE(a, std::string::npos) << r.out;
  EXPECT_LT(a, b);
  EXPECT_LT(b, c);
  EXPECT_LT(c, d);
  EXPECT_NE(d, std::string::npos);
  EXPECT_TRUE(contains(r.out, "1. psi-  T* = infinity\n"));
  EXPECT_EQ(run({"rank", "--model", model("minimal.json"), "--states", model("bell-states.json"), "--lambda", "0.1"})
                .code,
            2);
}

TEST_F(CliTemp, Optimize) {
  const Outcome r = run({"optimize", "--model", model("qubit-engineering.json"), "--out", path("sol.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(contains(r.out, "u = [0, -0.1082532, 0]\n")) << r.out;
  EXPECT_TRUE(contains(r.out, "nullspace dimension = 1\n"));
  EXPECT_TRUE(contains(r.out, "F(H_opt) = -0.01171875\n"));
  const EngineeringSolution back = engineering_solution_from_json(json::parse(std::ifstream(path("sol.json"))));
  EXPECT_NEAR(back.u[1], -std::sqrt(3.0) / 16, 1e-15);
  const json j = json::parse(run({"optimize", "--model", model("qutrit-ladder.json"), "--json"}).out);
  EXPECT_EQ(j["nullspace_dimension"], 4);
  EXPECT_LT(j["amplitude_after"].get<double>(), j["amplitude_before"].get<double>());
}

TEST(Cli, RatioGrid) {
  const Outcome r = run({"ratio-grid", "--kmax", "0.5", "--lmax", "0.1", "--n", "2"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "k,lambda,ratio");
  EXPECT_TRUE(contains(r.out, "\n0.5,0.1,1.250055\n")) << r.out;
  EXPECT_TRUE(contains(r.out, "\n0,0.1,14.14214\n")) << r.out;
  EXPECT_EQ(run({"ratio-grid", "--kmax", "0.8"}).code, 3);
  const Outcome full = run({"ratio-grid"});
  ASSERT_EQ(full.code, 0);
  EXPECT_EQ(std::count(full.out.begin(), full.out.end(), '\n'), 2501);
}

TEST_F(CliTemp, SimulateCsvAndOut) {
  const Outcome r = run({"simulate", "--model", model("two-level-dephasing.json"), "--tmax", "0.1", "--step", "0.05"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "time,overlap");
  EXPECT_TRUE(contains(r.out, "\n0,1\n"));
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 4);
  const Outcome w = run({"simulate", "--model", model("two-level-dephasing.json"), "--tmax", "0.1", "--step", "0.05",
                     "--out", path("t.csv")});
  ASSERT_EQ(w.code, 0);
  EXPECT_TRUE(contains(w.out, "wrote 3 rows to"));
  std::stringstream file;
  file << std::ifstream(path("t.csv")).rdbuf();
  EXPECT_EQ(file.str(), r.out);
  const Outcome sx = run({"simulate", "--model", model("minimal.json"), "--tmax", "1", "--hamiltonian", "sx", "--json"});
  ASSERT_EQ(sx.code, 0) << sx.err;
  EXPECT_TRUE(json::parse(sx.out).is_object() || json::parse(sx.out).is_array());
}

TEST(Cli, ScanAndEnsemble) {
  const Outcome s = run({"scan", "--model", model("two-level-dephasing.json"), "--param", "lambda", "--range", "0.1:0.5:5"});
  ASSERT_EQ(s.code, 0) << s.err;
  EXPECT_EQ(std::count(s.out.begin(), s.out.end(), '\n'), 6);
  EXPECT_EQ(run({"scan", "--model", model("two-level-dephasing.json"), "--param", "x", "--range", "0:1:2"}).code, 1);
  EXPECT_EQ(run({"scan", "--model", model("two-level-dephasing.json"), "--param", "gamma", "--range", "0:1"}).code, 1);
  const Outcome e = run({"ensemble-scaling", "--nmax", "10", "--out", (fs::temp_directory_path() / "qslkit-ens.csv").string()});
  ASSERT_EQ(e.code, 0) << e.err;
  EXPECT_TRUE(contains(e.out, "log-log slope of T* over N = 2..10: product -1.0")) << e.out;
  EXPECT_TRUE(contains(e.out, ", GHZ -2\n")) << e.out;
  fs::remove(fs::temp_directory_path() / "qslkit-ens.csv");
}

TEST(Cli, ScenarioRoundTrip) {
  const Outcome list = run({"scenario", "--list"});
  ASSERT_EQ(list.code, 0);
  EXPECT_EQ(std::count(list.out.begin(), list.out.end(), '\n'), 7);
  EXPECT_TRUE(contains(list.out, "qutrit-ladder\n"));
  const Outcome s = run({"scenario", "bell-collective", "--state", "psi+", "--lambda", "0.1"});
  ASSERT_EQ(s.code, 0) << s.err;
  const LoadedModel m = parse_model_text(s.out);
  EXPECT_NEAR(amplitude(m.model, m.psi0), 4.0, 1e-12);
  EXPECT_EQ(m.metadata["scenario"], "bell-collective/psi+");
  EXPECT_EQ(run({"scenario", "nope"}).code, 1);
  EXPECT_EQ(run({"scenario"}).code, 1);
  EXPECT_EQ(run({"scenario", "two-level-dephasing", "--theta", "2"}).code, 3);
}

TEST_F(CliTemp, ExitCodes) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_TRUE(contains(run({"--help"}).out, "ratio-grid"));
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"frobnicate"}).code, 1);
  EXPECT_EQ(run({"qsl"}).code, 1);
  EXPECT_EQ(run({"qsl", "--model", path("missing.json"), "--lambda", "0.1"}).code, 2);
  const Outcome bad = run({"qsl", "--model", write("bad.json", "{\"dimension\": 2,\n \"channels\": [\"sx +\"],\n "
                                                         "\"initial_state\": [1, 0]}"),
                       "--lambda", "0.1"});
  EXPECT_EQ(bad.code, 2);
  EXPECT_TRUE(contains(bad.err, "channels[0]")) << bad.err;
  const std::string big = write("big.json", R"j({"dimension": 2, "channels": ["1e200*sx"], "initial_state": [1, 0]})j");
  EXPECT_EQ(run({"escape", "--model", big, "--lambda", "0.1", "--tmax", "1", "--step", "0.1"}).code, 4);
  const Outcome res = run({"optimize", "--model", big});
  EXPECT_EQ(res.code, 5);
  EXPECT_TRUE(contains(res.err, "residual"));
}

TEST(Cli, Deterministic) {
  const std::vector<std::vector<std::string>> commands = {
      {"qsl", "--model", model("qutrit-ladder.json")},
      {"optimize", "--model", model("qutrit-ladder.json")},
      {"ratio-grid", "--n", "20"},
      {"scan", "--model", model("two-level-decay.json"), "--param", "gamma", "--range", "0.1:2:30"}};
  for (const auto& c : commands) {
    const Outcome a = run(c), b = run(c);
    EXPECT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
  }
}

}  // namespace
}  // namespace qslkit
