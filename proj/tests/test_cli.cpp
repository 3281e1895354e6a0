#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "siegel/approximants.hpp"
#include "siegel/cli.hpp"
#include "siegel/correlations.hpp"
#include "siegel/error.hpp"
#include "siegel/report.hpp"
#include "siegel/selftest.hpp"

using namespace siegel;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path temp_file(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("siegel_lab_cli_" + name);
}

std::vector<std::string> csv_fields(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

TEST_CASE("parse_count") {
  CHECK(parse_count("1e7") == 10'000'000);
  CHECK(parse_count("12345") == 12345);
  CHECK_THROWS_AS(parse_count("1.5"), ConfigError);
  CHECK_THROWS_AS(parse_count("0"), ConfigError);
  CHECK_THROWS_AS(parse_count("ten"), ConfigError);
  CHECK_THROWS_AS(parse_count(""), ConfigError);
}

TEST_CASE("usage errors exit with code 2") {
  CHECK(run({}).code == kExitConfig);
  CHECK(run({"frobnicate"}).code == kExitConfig);
  CHECK(run({"chain", "--x", "1e6"}).code == kExitConfig);
  const Run bad = run({"char", "--delta", "-12"});
  CHECK(bad.code == kExitConfig);
  CHECK(bad.err.find("fundamental") != std::string::npos);
  CHECK(run({"correlate", "--x", "1e5", "--factors", "zeta:0"}).code == kExitConfig);
  CHECK(run({"correlate", "--x", "1.5", "--factors", "lambda:0"}).code == kExitConfig);
  CHECK(run({"--format", "xml", "correlate", "--x", "100", "--factors", "lambda:0"}).code ==
        kExitConfig);
  CHECK(run({"--help"}).code == kExitOk);
  CHECK(run({"--version"}).out == software_version() + "\n");
}

TEST_CASE("computation failures exit with code 3") {
  setenv("SIEGEL_LAB_CACHE_DIR", "/proc/siegel-lab-no-such-dir", 1);
  CHECK(run({"sieve", "--hi", "100", "--cache"}).code == kExitComputation);
  unsetenv("SIEGEL_LAB_CACHE_DIR");
}

TEST_CASE("correlate emits a CSV row") {
  const Run r = run({"correlate", "--x", "1e6", "--factors", "lambda:0,lambda:1"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string header, row;
  std::getline(lines, header);
  std::getline(lines, row);
  CHECK(header == "x,factors,value");
  const auto f = csv_fields(row);
  REQUIRE(f.size() == 3);
  CHECK(f[0] == "1000000");
  CHECK(f[1] == "lambda:0,lambda:1");
  const Factor fs[] = {{FunctionKind::lambda, 0, {}}, {FunctionKind::lambda, 1, {}}};
  CHECK(std::stod(f[2]) == correlate(1'000'000, fs, CorrelationContext{}));

  const Run sweep = run({"correlate", "--x", "1e4,2e4,3e4", "--factors", "mangoldt:0"});
  CHECK(std::count(sweep.out.begin(), sweep.out.end(), '\n') == 4);

  const Run js = run({"--format", "json", "correlate", "--x", "1e4", "--factors", "nu:0",
                      "--delta", "-4", "--R", "20", "--D", "50"});
  REQUIRE(js.code == 0);
  const json j = json::parse(js.out);
  CHECK(j["report_version"] == 1);
  CHECK(j["results"][0]["params"]["R"]["provenance"] == "override");
}

TEST_CASE("chain report is complete and deterministic") {
  const std::vector<std::string> base{"chain", "--delta", "-163", "--x", "1e5", "--k", "2",
                                      "--shifts", "0,2", "--eta", "50", "--R", "200", "--D",
                                      "1000", "--series-cutoff", "1000000"};
  std::vector<std::string> one{"--threads", "1"}, eight{"--threads", "8"};
  one.insert(one.end(), base.begin(), base.end());
  eight.insert(eight.end(), base.begin(), base.end());
  const Run a = run(one), b = run(eight), c = run(one);
  REQUIRE(a.code == 0);
  CHECK(a.out == c.out);
  const json ja = json::parse(a.out), jb = json::parse(b.out);
  CHECK(ja["report"] == jb["report"]);
  CHECK(ja["config"]["threads"] == "1");
  CHECK_FALSE(ja["cutoff_fingerprint"].get<std::string>().empty());
  CHECK(ja["software_version"] == software_version());
  const ChainReport r = chain_from_json(ja["report"]);
  for (double v : r.lines) CHECK(std::isfinite(v));
  CHECK(r.params.R.provenance == Provenance::override_);
  CHECK(r.params.eta.method == QualityMethod::user_supplied);
  const auto raw = chain_line_factors(0, r.shifts);
  CHECK(r.lines[0] == correlate(100000, raw, CorrelationContext{}));
  CHECK_FALSE(ja["report"].contains("seconds"));

  std::vector<std::string> timed{"--timings"};
  timed.insert(timed.end(), base.begin(), base.end());
  CHECK(json::parse(run(timed).out)["report"].contains("seconds"));

  std::vector<std::string> csv{"--format", "csv"};
  csv.insert(csv.end(), base.begin(), base.end());
  const Run rc = run(csv);
  CHECK(rc.out.rfind("x,R,D,R0,T,line1", 0) == 0);
}

TEST_CASE("config files merge under flags") {
  const auto cfg = temp_file("config.txt");
  {
    std::ofstream f(cfg);
    f << "# sweep settings\n"
      << "x = 2e4\n"
      << "factors = lambda:0,lambda:1\n"
      << "threads = 2\n";
  }
  const Run from_file = run({"--config", cfg.string(), "correlate"});
  REQUIRE(from_file.code == 0);
  CHECK(from_file.out.find("20000,") != std::string::npos);
  const Run overridden = run({"--config", cfg.string(), "correlate", "--x", "3e4"});
  REQUIRE(overridden.code == 0);
  CHECK(overridden.out.find("30000,") != std::string::npos);
  CHECK(overridden.out.find("20000,") == std::string::npos);
  CHECK(run({"--config", "/nonexistent/cfg", "correlate"}).code == kExitConfig);
  {
    std::ofstream f(cfg);
    f << "this line has no equals sign\n";
  }
  CHECK(run({"--config", cfg.string(), "correlate"}).code == kExitConfig);
  std::filesystem::remove(cfg);
}

TEST_CASE("--out writes the report to a file") {
  const auto path = temp_file("out.json");
  const Run r = run({"--out", path.string(), "char", "--delta", "-4"});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  const json j = json::parse(in);
  CHECK(j["conductor"] == 4);
  CHECK(j["L1"].get<double>() == doctest::Approx(M_PI / 4));
  std::filesystem::remove(path);
}

TEST_CASE("char subcommand") {
  const Run r = run({"char", "--delta", "-163", "--x", "1e5,1e6", "--eta", "50"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["delta"] == -163);
  CHECK(j["eta_hat"] == 50.0);
  CHECK(j["method"] == "user-supplied");
  CHECK(j["exceptional_sums"].size() == 2);
  CHECK(j["exceptional_sums"][0]["sum"].get<double>() <= j["exceptional_sums"][1]["sum"].get<double>());
  CHECK(run({"char", "--delta", "-163", "--eta", "5"}).code == kExitConfig);
}

TEST_CASE("sieve subcommand and cache") {
  const Run r = run({"sieve", "--lo", "1", "--hi", "12"});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("n,lambda,mangoldt,mu,tau,spf\n", 0) == 0);
  CHECK(r.out.find("\n12,-1,0,0,6,2\n") != std::string::npos);
  const auto dir = temp_file("cache");
  std::filesystem::remove_all(dir);
  setenv("SIEGEL_LAB_CACHE_DIR", dir.c_str(), 1);
  const Run c1 = run({"sieve", "--lo", "100", "--hi", "200", "--cache"});
  const Run c2 = run({"sieve", "--lo", "100", "--hi", "200", "--cache"});
  unsetenv("SIEGEL_LAB_CACHE_DIR");
  CHECK(c1.code == 0);
  CHECK(c1.out == c2.out);
  CHECK(std::filesystem::exists(dir));
  std::filesystem::remove_all(dir);
  CHECK(run({"sieve", "--lo", "100", "--hi", "200", "--cache"}).code == kExitConfig);
}

TEST_CASE("approx subcommand tables") {
  const Run b = run({"approx", "--delta", "-4", "--x", "1e6", "--R", "20", "--D", "100",
                     "--table", "b"});
  REQUIRE(b.code == 0);
  const TypeICoeffs want = lambda_sharp_coeffs(20, 100, QuadChar(-4));
  std::istringstream in(b.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "d,value");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    const auto f = csv_fields(line);
    CHECK(std::stod(f[1]) == want.coeff(std::stoull(f[0])));
    ++rows;
  }
  CHECK(rows == want.entries.size());
  for (const char* table : {"a", "c", "psi"}) {
    const Run t = run({"approx", "--delta", "-3", "--x", "1e6", "--R", "20", "--D", "5",
                       "--table", table, "--n-max", "50"});
    CHECK(t.code == 0);
  }
  CHECK(run({"approx", "--delta", "-3", "--table", "q"}).code == kExitConfig);
}

TEST_CASE("expsum subcommand") {
  const json k = json::parse(run({"expsum", "--mode", "kloosterman", "--q", "5"}).out);
  CHECK(k["re"].get<double>() == doctest::Approx(2 + 2 * std::cos(4 * M_PI / 5)));
  CHECK(run({"expsum", "--mode", "hyperbola", "--q", "12", "--q0", "6", "--a", "6"}).code == 0);
  const json m = json::parse(run({"expsum", "--mode", "mfe", "--q", "12", "--q0", "4", "--a", "4"}).out);
  CHECK(m["identity_residual"].get<double>() < 1e-9);
  const Run scan = run({"expsum", "--mode", "scan", "--qmax", "10"});
  CHECK(scan.out.rfind("q,kloosterman_max_ratio,mfe_max_ratio\n", 0) == 0);
  CHECK(std::count(scan.out.begin(), scan.out.end(), '\n') == 11);
  const json w = json::parse(run({"expsum", "--mode", "weil", "--delta", "-163", "--count", "50"}).out);
  CHECK(w["violations"] == 0);
  CHECK(run({"expsum", "--mode", "fft"}).code == kExitConfig);
}

TEST_CASE("ld-scan subcommand") {
  const Run r = run({"ld-scan", "--delta", "-3", "--x", "1e5", "--R", "20", "--D", "5", "--q",
                     "7", "--a", "3", "--hi", "20000"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["scan"]["terms"].get<std::uint64_t>() == (20000 - 3) / 7 + 1);
}

TEST_CASE("selftest in quick mode passes") {
  const SelftestResult r = run_selftest(nullptr, true);
  for (const auto& c : r.checks) CHECK_MESSAGE(c.passed, c.name << ": " << c.detail);
  CHECK(r.ok());
}
