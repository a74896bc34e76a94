#include <sys/wait.h>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "ks/cli.hpp"

using namespace ks;
using namespace ks::cli;
using std::numbers::pi;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome call(std::vector<std::string> args) {
  args.insert(args.begin(), "ks");
  std::ostringstream out, err;
  const int code = main_entry(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "ks_test_cli";
  std::filesystem::create_directories(dir);
  return dir / name;
}

const std::string kNormalSpec = std::string(KS_DATA_DIR) + "/normal_half_variance.json";

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string c;
  while (std::getline(ss, c, ',')) cells.push_back(c);
  return cells;
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(-4.0) == "-4");
  CHECK(format_double(NAN) == "nan");
  CHECK(format_double(-INFINITY) == "-inf");
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> ex(-300, 300);
  for (int i = 0; i < 10000; ++i) {
    const double v = std::ldexp(mant(rng), ex(rng));
    const std::string s = format_double(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
    // At most 17 significant digits.
    std::string digits;
    for (char ch : s.substr(0, s.find('e'))) {
      if (std::isdigit(static_cast<unsigned char>(ch))) digits += ch;
    }
    digits.erase(0, digits.find_first_not_of('0'));
    digits.erase(digits.find_last_not_of('0') + 1);
    CHECK(digits.size() <= 17);
  }
}

TEST_CASE("grids") {
  SUBCASE("parse") {
    const GridSpec g = parse_grid("0.5,4,6,log");
    CHECK(g.t_min == 0.5);
    CHECK(g.t_max == 4.0);
    CHECK(g.count == 6);
    CHECK(g.spacing == Spacing::LogSymmetric);
    CHECK(parse_grid("-1,1,5").spacing == Spacing::Linear);
    CHECK_THROWS_AS(parse_grid(""), ConfigError);
    CHECK_THROWS_AS(parse_grid("1,2"), ConfigError);
    CHECK_THROWS_AS(parse_grid("1,2,x"), ConfigError);
    CHECK_THROWS_AS(parse_grid("1,2,3,lin"), ConfigError);
    CHECK_THROWS_AS(parse_grid("1,2,2.5"), ConfigError);
  }
  SUBCASE("linear") {
    const auto v = make_grid(parse_grid("-1,1,5"), Support::RealLine);
    CHECK(v == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
  }
  SUBCASE("log-symmetric") {
    const auto v = make_grid(parse_grid("0.01,100,10,log"), Support::RealLine);
    REQUIRE(v.size() == 10);
    for (std::size_t i = 0; i < 5; ++i) CHECK(v[i] == -v[9 - i]);
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] > v[i - 1]);
    CHECK(v[5] == 0.01);
    CHECK(v[9] == 100.0);
    CHECK(std::abs(v[7] - 1.0) < 1e-15);
    CHECK(std::abs(v[6] / v[5] - v[8] / v[7]) < 1e-12);
  }
  SUBCASE("half line keeps positive points") {
    const auto v = make_grid(parse_grid("0.5,2,3,log"), Support::PositiveHalfLine);
    REQUIRE(v.size() == 3);
    CHECK(v[0] == 0.5);
    CHECK(std::abs(v[1] - 1.0) < 1e-15);
    CHECK(v[2] == 2.0);
  }
  SUBCASE("invalid") {
    CHECK_THROWS_AS(make_grid(GridSpec{1.0, 2.0, 0, Spacing::Linear}, Support::RealLine), ConfigError);
    CHECK_THROWS_AS(make_grid(GridSpec{1.0, 2.0, 1, Spacing::Linear}, Support::RealLine), ConfigError);
    CHECK_THROWS_AS(make_grid(GridSpec{2.0, 1.0, 4, Spacing::Linear}, Support::RealLine), ConfigError);
    CHECK_THROWS_AS(make_grid(GridSpec{0.0, 1.0, 4, Spacing::LogSymmetric}, Support::RealLine), ConfigError);
    CHECK_THROWS_AS(make_grid(GridSpec{0.1, 1.0, 5, Spacing::LogSymmetric}, Support::RealLine), ConfigError);
  }
}

TEST_CASE("density specs") {
  SUBCASE("families, both spellings") {
    CHECK(parse_density_spec(R"({"family":"odd_normal_power","n":2})").family().parameter == 2.0);
    CHECK(parse_density_spec(R"({"family":"odd-normal-power","n":1,"support":"real"})").support() ==
          Support::RealLine);
    const Density f = parse_density_spec(R"({"family":"abs_normal_power","r":6})");
    CHECK(f.family().kind == FamilyKind::AbsNormalPower);
    CHECK(f.support() == Support::PositiveHalfLine);
  }
  SUBCASE("custom normal") {
    const Density f = parse_density_spec(slurp(kNormalSpec));
    CHECK(f.support() == Support::RealLine);
    CHECK(std::abs(f.eval(0.7) - std::exp(-0.49) / std::sqrt(pi)) < 1e-15);
  }
  SUBCASE("rejections") {
    for (const char* bad : {
             R"({"family":"odd_normal_power","n":1,"extra":0})",
             R"({"family":"odd_normal_power","n":1,"r":2})",
             R"({"family":"odd_normal_power","n":1.5})",
             R"({"family":"odd_normal_power","n":0})",
             R"({"family":"odd_normal_power"})",
             R"({"family":"odd_normal_power","n":1,"support":"positive"})",
             R"({"family":"abs_normal_power","r":-1})",
             R"({"family":"gamma"})",
             R"({"family":"custom","support":"real"})",
             R"({"family":"custom","support":"both","log_expr":{}})",
             R"({"family":"custom","support":"real","log_expr":{"constant":0,"powers":[[-1,2]],"k":1}})",
             R"({"family":"custom","support":"real","log_expr":{"powers":[[-1]]}})",
             R"({"family":"custom","support":"real","log_expr":{"constant":0,"powers":[[-1,2]]}})",
             R"([1,2])",
             R"({"family":)",
         }) {
      CAPTURE(bad);
      CHECK_THROWS_AS(parse_density_spec(bad), ConfigError);
    }
  }
}

TEST_CASE("exit codes") {
  SUBCASE("success") {
    const auto r = call({"krein-check", "--family", "odd-normal-power", "--n", "1"});
    CHECK(r.code == kOk);
    CHECK(r.out.find("\"Finite\"") != std::string::npos);
  }
  SUBCASE("divergent logarithmic integral") {
    const auto r = call({"krein-check", "--spec", kNormalSpec});
    CHECK(r.code == kPrecondition);
    CHECK(r.out.find("\"Divergent\"") != std::string::npos);
    CHECK(call({"class", "build", "--spec", kNormalSpec}).code == kPrecondition);
    CHECK(call({"class", "verify", "--spec", kNormalSpec}).code == kPrecondition);
    CHECK(call({"krein-check", "--family", "abs-normal-power", "--r", "4"}).code == kPrecondition);
  }
  SUBCASE("verification failure is never 0") {
    const auto r = call({"class", "verify", "--family", "odd-normal-power", "--n", "1", "--max-order", "2",
                         "--tol", "1e-300"});
    CHECK(r.code == kVerificationFailed);
    CHECK(r.out.find("\"pass\": false") != std::string::npos);
  }
  SUBCASE("usage, parse and I/O") {
    CHECK(call({"transform", "--family", "odd-normal-power", "--n", "1", "--grid", "1,2,0"}).code == kIoOrParse);
    CHECK(call({"transform", "--family", "odd-normal-power", "--n", "1", "--grid", ""}).code == kIoOrParse);
    CHECK(call({"transform", "--family", "odd-normal-power", "--n", "1", "--grid", "3,1,4"}).code == kIoOrParse);
    CHECK(call({"transform", "--family", "odd-normal-power"}).code == kIoOrParse);
    CHECK(call({"transform"}).code == kIoOrParse);
    CHECK(call({}).code == kIoOrParse);
    CHECK(call({"frobnicate"}).code == kIoOrParse);
    CHECK(call({"krein-check", "--family", "normal"}).code == kIoOrParse);
    CHECK(call({"krein-check", "--spec", "/definitely/not/here.json"}).code == kIoOrParse);
    CHECK(call({"krein-check", "--spec", R"({"family":"odd_normal_power","n":1,"x":0})"}).code == kIoOrParse);
    CHECK(call({"krein-check", "--spec", kNormalSpec, "--family", "odd-normal-power", "--n", "1"}).code ==
          kIoOrParse);
    CHECK(call({"krein-check", "--family", "odd-normal-power", "--n", "1", "--out", "/definitely/not/here/x.json"})
              .code == kIoOrParse);
    CHECK(call({"class", "verify", "--family", "odd-normal-power", "--n", "1", "--tol", "-1"}).code == kIoOrParse);
  }
  SUBCASE("help") {
    const auto r = call({"--help"});
    CHECK(r.code == kOk);
    CHECK(r.out.find("krein-check") != std::string::npos);
  }
}

TEST_CASE("transform output") {
  const auto r = call({"transform", "--family", "odd-normal-power", "--n", "2", "--grid", "0.25,8,6,log"});
  REQUIRE(r.code == kOk);
  std::stringstream ss(r.out);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "t,phase,cos_phase,sin_phase,method,error_estimate");
  int rows = 0;
  while (std::getline(ss, line)) {
    const auto cells = split(line);
    REQUIRE(cells.size() == 6);
    const double t = std::stod(cells[0]);
    const double phase = std::stod(cells[1]);
    const double expected = (t > 0 ? 1 : -1) * (2 * pi / 5 + std::tan(pi / 5) * std::pow(std::abs(t), 0.4));
    CHECK(std::abs(phase - expected) < 1e-12);
    CHECK(std::abs(std::stod(cells[2]) - std::cos(expected)) < 1e-12);
    CHECK(std::abs(std::stod(cells[3]) - std::sin(expected)) < 1e-12);
    CHECK(cells[4] == "symbolic");
    ++rows;
  }
  CHECK(rows == 6);

  const auto num =
      call({"transform", "--family", "odd-normal-power", "--n", "2", "--grid", "0.25,8,6,log", "--numeric"});
  REQUIRE(num.code == kOk);
  std::stringstream a(r.out), b(num.out);
  std::string la, lb;
  std::getline(a, la);
  std::getline(b, lb);
  while (std::getline(a, la) && std::getline(b, lb)) {
    const auto ca = split(la), cb = split(lb);
    CHECK(cb[4] == "numeric");
    CHECK(std::abs(std::stod(ca[1]) - std::stod(cb[1])) < 1e-6);
  }

  SUBCASE("half line") {
    const auto h = call({"transform", "--family", "abs-normal-power", "--r", "6", "--grid", "0.5,4,4", "--format",
                         "json"});
    REQUIRE(h.code == kOk);
    CHECK(h.out.front() == '[');
    CHECK(h.out.find("\"method\": \"symbolic\"") != std::string::npos);
    const auto bad = call({"transform", "--family", "abs-normal-power", "--r", "6", "--grid", "-1,4,4", "--numeric"});
    CHECK(bad.code == kIoOrParse);
  }
}

TEST_CASE("class build writes report and member samples") {
  const auto out = scratch("build.json");
  const auto r = call({"class", "build", "--family", "odd-normal-power", "--n", "1", "--kind", "sin", "--grid",
                       "0.1,10,4,log", "--out", out.string()});
  REQUIRE(r.code == kOk);
  CHECK(r.out.empty());
  const std::string report = slurp(out);
  CHECK(report.find("\"kind\": \"sin\"") != std::string::npos);
  CHECK(report.find("\"nonzero\": true") != std::string::npos);
  const std::string csv = slurp(out.string() + ".members.csv");
  std::stringstream ss(csv);
  std::string line;
  std::getline(ss, line);
  CHECK(line == "x,eps_-1,eps_-0.5,eps_0,eps_0.5,eps_1");
  int rows = 0;
  while (std::getline(ss, line)) {
    const auto cells = split(line);
    REQUIRE(cells.size() == 6);
    const double f0 = std::stod(cells[3]);
    // Members are affine in eps.
    CHECK(std::abs(std::stod(cells[1]) + std::stod(cells[5]) - 2 * f0) < 1e-12 * f0);
    for (std::size_t j = 1; j < 6; ++j) CHECK(std::stod(cells[j]) >= 0.0);
    ++rows;
  }
  CHECK(rows == 4);
}

TEST_CASE("deterministic output") {
  SUBCASE("in process") {
    const std::vector<std::string> args = {"class", "verify", "--family", "abs-normal-power", "--r", "5"};
    const auto a = call(args);
    const auto b = call(args);
    CHECK(a.code == kOk);
    CHECK(a.out == b.out);
    CHECK(a.out.find("\"errors\"") != std::string::npos);
  }
  SUBCASE("separate processes, files") {
    const auto p1 = scratch("run1.json"), p2 = scratch("run2.json");
    const std::string base = std::string(KS_CLI_PATH) + " class verify --family odd-normal-power --n 1 --max-order 4 ";
    CHECK(shell(base + "--out " + p1.string()) == 0);
    CHECK(shell(base + "--out " + p2.string()) == 0);
    CHECK(slurp(p1) == slurp(p2));
    CHECK(slurp(p1.string() + ".members.csv") == slurp(p2.string() + ".members.csv"));
    CHECK(!slurp(p1).empty());
  }
  SUBCASE("binary exit codes") {
    CHECK(shell(std::string(KS_CLI_PATH) + " krein-check --spec " + kNormalSpec + " > /dev/null") == 2);
    CHECK(shell(std::string(KS_CLI_PATH) + " transform --family odd-normal-power --n 1 --grid 1,2,0 2> /dev/null") ==
          3);
  }
}
