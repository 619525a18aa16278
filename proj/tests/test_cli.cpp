#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(L2TWIST_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof(buf), p)) > 0) r.out.append(buf, n);
  const int st = pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("l2twist_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    write("circle.json", R"({"group": {"kind": "abelian", "rank": 1}, "ranks": [1, 1],
        "boundaries": [{"rows": 1, "cols": 1, "entries": [["z-1"]]}]})");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const auto p = (dir_ / name).string();
    std::ofstream(p) << text;
    return p;
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static std::string read(const std::string& p) {
    std::ifstream in(p);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, TorsionCsvMatchesLogMax) {
  const auto r = run("torsion --input " + path("circle.json") + " --tmin 0.25 --tmax 4 --points 9 --csv " +
                     path("out.csv"));
  ASSERT_EQ(r.status, 0);
  std::istringstream csv(read(path("out.csv")));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "t,rho,status,envelope_lower,envelope_upper\r");
  int rows = 0;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    ++rows;
    const double t = std::stod(line.substr(0, line.find(',')));
    const auto rest = line.substr(line.find(',') + 1);
    const double rho = std::stod(rest.substr(0, rest.find(',')));
    EXPECT_NEAR(rho, std::log(std::max(t, 1.0)), 1e-9) << line;
  }
  EXPECT_EQ(rows, 9);
  const Json j = Json::parse(r.out);
  EXPECT_EQ(j["points"].size(), 9u);
}

TEST_F(Cli, MahlerQuadrature) {
  const auto r = run("mahler --poly \"1+x+y\" --method quadrature --n 1024");
  ASSERT_EQ(r.status, 0);
  EXPECT_NEAR(Json::parse(r.out)["value"].get<double>(), 0.3231, 1e-4);
}

TEST_F(Cli, VerifyScalingPasses) {
  EXPECT_EQ(run("verify --check scaling --input " + path("circle.json") + " --r 2").status, 0);
}

TEST_F(Cli, VerifyFailureExitsThree) {
  write("wrong_dim.json", R"({"group": {"kind": "abelian", "rank": 1}, "ranks": [1, 1], "dimension": 2,
      "boundaries": [{"rows": 1, "cols": 1, "entries": [["z-1"]]}]})");
  EXPECT_EQ(run("verify --check duality --input " + path("wrong_dim.json")).status, 3);
  EXPECT_EQ(run("verify --check duality --input " + path("circle.json")).status, 0);
}

TEST_F(Cli, StrictNonDetClassExitsFour) {
  write("zero.json", R"({"group": {"kind": "abelian", "rank": 1}, "ranks": [1, 1],
      "boundaries": [{"rows": 1, "cols": 1, "entries": [["0"]]}]})");
  EXPECT_EQ(run("torsion --input " + path("zero.json")).status, 0);
  EXPECT_EQ(run("torsion --strict --input " + path("zero.json")).status, 4);
}

TEST_F(Cli, InvalidInputExitsTwo) {
  write("broken.json", "{\"group\": ");
  EXPECT_EQ(run("torsion --input " + path("broken.json")).status, 2);
  EXPECT_EQ(run("torsion --input " + path("missing.json")).status, 2);
  EXPECT_EQ(run("mahler --poly \"x+\"").status, 2);
  EXPECT_EQ(run("torsion --input " + path("circle.json") + " --tmin -1").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("verify --input " + path("circle.json")).status, 2);
}

TEST_F(Cli, OutputIsByteIdenticalAcrossRuns) {
  write("torus.json", R"({"group": {"kind": "abelian", "rank": 2}, "ranks": [1, 2, 1],
      "boundaries": [{"rows": 2, "cols": 1, "entries": [["x-1"], ["y-1"]]},
                     {"rows": 1, "cols": 2, "entries": [["1-y", "x-1"]]}],
      "character": {"values": [1, 2]}})");
  const auto a = run("degree --input " + path("torus.json") + " --threads 3");
  const auto b = run("degree --input " + path("torus.json") + " --threads 1");
  ASSERT_EQ(a.status, 0);
  EXPECT_EQ(a.out, b.out);
  const auto m1 = run("mahler --poly \"1+x+y-2x*y\" --method quadrature --n 128 --threads 4");
  const auto m2 = run("mahler --poly \"1+x+y-2x*y\" --method quadrature --n 128");
  EXPECT_EQ(m1.out, m2.out);
}

TEST_F(Cli, FkdetApproxBounds) {
  write("a.json", R"({"group": {"kind": "abelian", "rank": 1},
      "matrix": {"rows": 1, "cols": 1, "entries": [["2z-1"]]},
      "tower": {"cyclic": {"d": 1, "sizes": [16, 64, 256]}},
      "representation": {"dim": 2, "matrices": [[[2, 0], [0, 0.5]]]}})");
  const auto f = run("fkdet --input " + path("a.json"));
  ASSERT_EQ(f.status, 0);
  // twisted by diag(2, 1/2): m(4z - 1) + m(z - 1) = ln 4
  EXPECT_NEAR(Json::parse(f.out)["value"].get<double>(), std::log(4.0), 1e-12);
  const auto ap = run("approx --input " + path("a.json") + " --csv " + path("a.csv"));
  ASSERT_EQ(ap.status, 0);
  EXPECT_EQ(Json::parse(ap.out)["levels"].size(), 3u);
  EXPECT_EQ(read(path("a.csv")).substr(0, 26), "level,order,dim_ker,logdet");
  const auto bd = run("bounds --input " + path("a.json"));
  ASSERT_EQ(bd.status, 0);
  const Json j = Json::parse(bd.out);
  EXPECT_TRUE(j["within"].get<bool>());
  EXPECT_LE(j["lower"].get<double>(), j["upper"].get<double>());
}

TEST_F(Cli, SchemaRoundTripOfEmittedJson) {
  const auto r = run("torsion --input " + path("circle.json") + " --output " + path("res.json"));
  ASSERT_EQ(r.status, 0);
  const Json j = Json::parse(read(path("res.json")));
  EXPECT_EQ(Json::parse(j.dump()), j);
  EXPECT_EQ(j["command"], "torsion");
}
