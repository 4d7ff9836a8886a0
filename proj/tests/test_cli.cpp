#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "finband/serialize.hpp"

using namespace finband;
namespace fs = std::filesystem;

namespace {

const std::string kCli = FINBAND_CLI_PATH;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("finband_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli bands for periodic Jacobi inputs") {
  TempDir tmp;
  write_file(tmp.file("free.json"), R"({"a":[1.0],"b":[0.0]})");
  REQUIRE(run("bands --input " + tmp.file("free.json") + " --out " + tmp.file("bands.json") +
              " --csv " + tmp.file("sweep.csv")) == 0);
  const json bands = json::parse(slurp(tmp.file("bands.json")));
  REQUIRE(bands.size() == 1);
  CHECK_THAT(bands[0][0].get<double>(), Catch::Matchers::WithinAbs(-2.0, 1e-9));
  CHECK_THAT(bands[0][1].get<double>(), Catch::Matchers::WithinAbs(2.0, 1e-9));
  CHECK(slurp(tmp.file("sweep.csv")).rfind("z,delta,in_band", 0) == 0);

  write_file(tmp.file("alt.json"), R"({"a":[1.0,1.0],"b":[1.0,-1.0]})");
  REQUIRE(run("bands --input " + tmp.file("alt.json") + " --out " + tmp.file("alt_bands.json")) == 0);
  const json alt = json::parse(slurp(tmp.file("alt_bands.json")));
  REQUIRE(alt.size() == 2);
  const double s5 = std::sqrt(5.0);
  CHECK_THAT(alt[0][0].get<double>(), Catch::Matchers::WithinAbs(-s5, 1e-9));
  CHECK_THAT(alt[0][1].get<double>(), Catch::Matchers::WithinAbs(-1.0, 1e-9));
  CHECK_THAT(alt[1][0].get<double>(), Catch::Matchers::WithinAbs(1.0, 1e-9));
  CHECK_THAT(alt[1][1].get<double>(), Catch::Matchers::WithinAbs(s5, 1e-9));
}

TEST_CASE("cli bands for an ergodic system input") {
  TempDir tmp;
  write_file(tmp.file("sys.json"), to_json(ErgodicSystem::shift_pair(2)).dump());
  REQUIRE(run("bands --input " + tmp.file("sys.json") + " --out " + tmp.file("bands.json") +
              " --grid -3:3:601") == 0);
  const json bands = json::parse(slurp(tmp.file("bands.json")));
  REQUIRE(bands.size() == 1);
  CHECK_THAT(bands[0][0].get<double>(), Catch::Matchers::WithinAbs(-2.0, 0.02));
  CHECK_THAT(bands[0][1].get<double>(), Catch::Matchers::WithinAbs(2.0, 0.02));
}

TEST_CASE("cli rejects malformed input with exit code 2") {
  TempDir tmp;
  write_file(tmp.file("bad.json"), "{not json");
  CHECK(run("bands --input " + tmp.file("bad.json") + " --out " + tmp.file("o.json")) == 2);
  CHECK(run("bands --input " + tmp.file("missing.json") + " --out " + tmp.file("o.json")) == 2);

  write_file(tmp.file("badsys.json"), R"({"p":1,"d":1,"q":[[[0.0,0.0]],[[-1.0,0.0]]]})");
  CHECK(run("bands --input " + tmp.file("badsys.json") + " --out " + tmp.file("o.json")) == 2);

  write_file(tmp.file("noncoprime.json"),
             R"({"numerator":[[0,0],[1,0],[1,0]],"denominator":[[0,0],[1,0]]})");
  CHECK(run("monodromy --input " + tmp.file("noncoprime.json") + " --out " + tmp.file("o.json")) == 2);

  write_file(tmp.file("zsquared.json"), R"([[0,0],[0,0],[1,0]])");
  CHECK(run("fit --target " + tmp.file("zsquared.json") + " --out " + tmp.file("o.json")) == 2);
}

TEST_CASE("cli discriminant") {
  TempDir tmp;
  write_file(tmp.file("alt.json"), R"({"a":[1.0,1.0],"b":[1.0,-1.0]})");
  REQUIRE(run("discriminant --input " + tmp.file("alt.json") + " --out " + tmp.file("delta.json")) == 0);
  const Poly delta = poly_from_json(json::parse(slurp(tmp.file("delta.json"))));
  CHECK(std::abs(delta.coeff(0) - cdouble(-3.0)) < 1e-12);
  CHECK(std::abs(delta.coeff(1)) < 1e-12);
  CHECK(std::abs(delta.coeff(2) - cdouble(1.0)) < 1e-12);
}

TEST_CASE("cli fit produces a valid operator and report") {
  TempDir tmp;
  write_file(tmp.file("target.json"), R"([[-3.0,0],[0,0],[1,0]])");
  REQUIRE(run("fit --target " + tmp.file("target.json") + " --out " + tmp.file("jacobi.json") +
              " --report " + tmp.file("report.json") + " --seed 7") == 0);
  const PeriodicJacobi j0 = jacobi_from_json(json::parse(slurp(tmp.file("jacobi.json"))));
  const Poly delta = discriminant(j0);
  CHECK(std::abs(delta.coeff(0) - cdouble(-3.0)) < 1e-10);
  const json report = json::parse(slurp(tmp.file("report.json")));
  CHECK(report.at("residual").get<double>() < 1e-10);
  CHECK(report.at("magic").at("deviation").get<double>() < 1e-8);
  CHECK(report.at("open_gaps").size() == 1);
}

TEST_CASE("cli monodromy") {
  TempDir tmp;
  write_file(tmp.file("map.json"), R"({"numerator":[[1,0],[0,0],[0,0],[0,0],[1,0]],"denominator":[[0,0],[0,0],[1,0]]})");
  REQUIRE(run("monodromy --input " + tmp.file("map.json") + " --out " + tmp.file("h.json") +
              " --paths " + tmp.file("paths.csv") + " --seed 11") == 0);
  const json h = json::parse(slurp(tmp.file("h.json")));
  CHECK(h.at("genus").get<int>() == 0);
  CHECK(h.at("degree").get<int>() == 4);
  REQUIRE(h.at("perms").size() == 3);
  for (const auto& p : h.at("perms")) {
    const Perm perm = perm_from_json(p);
    CHECK(perm_nontrivial_cycles(perm) == std::vector<int>({2, 2}));
  }
  CHECK(h.at("branch_points").back().get<std::string>() == "inf");
  CHECK(slurp(tmp.file("paths.csv")).rfind("loop,node,re,im", 0) == 0);
}

TEST_CASE("cli model-check") {
  TempDir tmp;
  REQUIRE(run("model-check --d 3 --window 20 --out " + tmp.file("report.json")) == 0);
  const json report = json::parse(slurp(tmp.file("report.json")));
  CHECK(report.at("max_deviation").get<double>() < 1e-12);
}

TEST_CASE("cli green grid emission") {
  TempDir tmp;
  write_file(tmp.file("t.json"), R"([[0,0],[1,0]])");  // T(z) = z, bands [-2,2]
  REQUIRE(run("green --input " + tmp.file("t.json") + " --grid -3:3:31,-1:1:11 --out " +
              tmp.file("grid.csv") + " --report " + tmp.file("report.json")) == 0);
  const std::string csv = slurp(tmp.file("grid.csv"));
  CHECK(csv.rfind("re,im,G", 0) == 0);
  CHECK(csv.find("nan") != std::string::npos);  // points on the spectrum
  const json report = json::parse(slurp(tmp.file("report.json")));
  CHECK(report.at("min_G").get<double>() > 0.0);

  // boundary samples just off the band ends stay small
  REQUIRE(run("green --input " + tmp.file("t.json") + " --grid 2.0001:2.001:5,0:0.0001:2 --out " +
              tmp.file("edge.csv") + " --report " + tmp.file("edge.json")) == 0);
  const json edge = json::parse(slurp(tmp.file("edge.json")));
  CHECK(edge.at("max_G").get<double>() < 1e-1);
}

TEST_CASE("cli outputs round-trip as inputs") {
  // discriminant of a fitted-to-be periodic operator feeds back into fit
  TempDir tmp;
  write_file(tmp.file("alt.json"), R"({"a":[1.0,1.0],"b":[1.0,-1.0]})");
  REQUIRE(run("discriminant --input " + tmp.file("alt.json") + " --out " + tmp.file("delta.json")) == 0);
  REQUIRE(run("fit --target " + tmp.file("delta.json") + " --out " + tmp.file("refit.json") +
              " --seed 1") == 0);
  const PeriodicJacobi refit = jacobi_from_json(json::parse(slurp(tmp.file("refit.json"))));
  const Poly delta = discriminant(refit);
  CHECK(std::abs(delta.coeff(0) - cdouble(-3.0)) < 1e-9);
  CHECK(std::abs(delta.coeff(2) - cdouble(1.0)) < 1e-9);

  // band sets parse back
  REQUIRE(run("bands --input " + tmp.file("alt.json") + " --out " + tmp.file("bands.json")) == 0);
  const BandSet bands = bandset_from_json(json::parse(slurp(tmp.file("bands.json"))));
  REQUIRE(bands.intervals.size() == 2);
  CHECK(bands.contains(1.5));
  CHECK(!bands.contains(0.0));
}

TEST_CASE("cli green branch evaluation") {
  TempDir tmp;
  write_file(tmp.file("t.json"), R"([[-2.0,0],[0,0],[1,0]])");  // z^2 - 2
  REQUIRE(run("green --input " + tmp.file("t.json") + " --eval 2.1,0 --out " +
              tmp.file("eval.json")) == 0);
  const json eval = json::parse(slurp(tmp.file("eval.json")));
  REQUIRE(eval.at("branches").size() == 2);
  const double g = eval.at("G").get<double>();
  for (const auto& br : eval.at("branches")) {
    const cdouble b = complex_from_json(br.at("b"));
    CHECK(std::abs(-std::log(std::abs(b)) - g) < 1e-12);
    CHECK(std::abs(complex_from_json(br.at("z")) - cdouble(2.41)) < 1e-12);
  }
  // missing grid and eval is a usage error
  CHECK(run("green --input " + tmp.file("t.json")) == 2);
}

TEST_CASE("cli symbol-check") {
  TempDir tmp;
  write_file(tmp.file("sys.json"), to_json(ErgodicSystem::shift_pair(2)).dump());
  REQUIRE(run("symbol-check --input " + tmp.file("sys.json") + " --samples 50 --seed 3 --out " +
              tmp.file("report.json")) == 0);
  const json report = json::parse(slurp(tmp.file("report.json")));
  CHECK(report.at("max_residual").get<double>() < 1e-8);
}

TEST_CASE("cli determinism under a fixed seed") {
  TempDir tmp;
  write_file(tmp.file("alt.json"), R"({"a":[1.0,1.0],"b":[1.0,-1.0]})");
  write_file(tmp.file("map.json"), R"([[0,0],[-3.0,0],[0,0],[1,0]])");
  write_file(tmp.file("target.json"), R"([[-3.0,0],[0,0],[1,0]])");

  REQUIRE(run("bands --input " + tmp.file("alt.json") + " --out " + tmp.file("b1.json") + " --seed 5") == 0);
  REQUIRE(run("bands --input " + tmp.file("alt.json") + " --out " + tmp.file("b2.json") + " --seed 5") == 0);
  CHECK(slurp(tmp.file("b1.json")) == slurp(tmp.file("b2.json")));

  REQUIRE(run("monodromy --input " + tmp.file("map.json") + " --out " + tmp.file("m1.json") + " --seed 5") == 0);
  REQUIRE(run("monodromy --input " + tmp.file("map.json") + " --out " + tmp.file("m2.json") + " --seed 5") == 0);
  CHECK(slurp(tmp.file("m1.json")) == slurp(tmp.file("m2.json")));

  REQUIRE(run("fit --target " + tmp.file("target.json") + " --out " + tmp.file("f1.json") + " --seed 5") == 0);
  REQUIRE(run("fit --target " + tmp.file("target.json") + " --out " + tmp.file("f2.json") + " --seed 5") == 0);
  CHECK(slurp(tmp.file("f1.json")) == slurp(tmp.file("f2.json")));
}
