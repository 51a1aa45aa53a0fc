#include <catch2/catch_amalgamated.hpp>

#include <oscilla/config.hpp>
#include <oscilla/runner.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

using namespace oscilla;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch_dir(const std::string& leaf) {
  // Under the system temp dir so test runs never litter the source tree.
  const fs::path p = fs::temp_directory_path() / "oscilla_cli_scratch" / leaf;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  REQUIRE(out.good());
  out << text;
}

const std::string solve_config_text =
    "# exponential volume, unit potential\n"
    "[volume]\n"
    "family = exponential\n"
    "a = 1.0\n"
    "alpha = 1.0\n"
    "\n"
    "[potential]\n"
    "family = constant\n"
    "value = 1.0\n"
    "\n"
    "[solve]\n"
    "z0 = 1.0\n"
    "horizon = 40\n";

}  // namespace

TEST_CASE("config parsing and typed getters", "[cli]") {
  const std::string text =
      "top = 3\n"
      "[alpha]\n"
      "# comment line\n"
      "count = 12\n"
      "rate = 2.5e-1\n"
      "label = hello world\n"
      "on = yes\n"
      "off = 0\n"
      "grid = 1, 2.5, 4\n";
  const Config cfg = Config::parse_text(text, "unit.ini");
  CHECK(cfg.number("global", "top") == 3.0);
  CHECK(cfg.integer("alpha", "count") == 12);
  CHECK(cfg.number("alpha", "rate") == 0.25);
  CHECK(cfg.text("alpha", "label") == "hello world");
  CHECK(cfg.flag_or("alpha", "on", false));
  CHECK_FALSE(cfg.flag_or("alpha", "off", true));
  CHECK(cfg.flag_or("alpha", "absent", true));
  CHECK(cfg.number_list("alpha", "grid") == std::vector<double>{1.0, 2.5, 4.0});
  CHECK(cfg.number_or("alpha", "absent", 7.5) == 7.5);
  CHECK(cfg.has_section("alpha"));
  CHECK_FALSE(cfg.has_section("beta"));
}

TEST_CASE("config errors carry file and line", "[cli]") {
  auto message = [](auto&& thunk) {
    try {
      thunk();
      FAIL("expected a config error");
    } catch (const config_error& e) {
      return std::string(e.what());
    }
    return std::string();
  };

  CHECK(message([] { Config::parse_text("a = 1\nbroken line\n", "f.ini"); })
            .find("f.ini:2:") != std::string::npos);
  CHECK(message([] { Config::parse_text("[sec\n", "f.ini"); }).find("f.ini:1:") !=
        std::string::npos);
  CHECK(message([] { Config::parse_text("a =\n", "f.ini"); }).find("empty value") !=
        std::string::npos);
  CHECK(message([] {
          Config::parse_text("[s]\nk = 1\nk = 2\n", "f.ini");
        }).find("f.ini:3:") != std::string::npos);

  const Config cfg = Config::parse_text("[s]\nx = 1.5zz\nn = 2.5\nb = maybe\n", "f.ini");
  CHECK(message([&] { cfg.number("s", "x"); }).find("f.ini:2:") != std::string::npos);
  CHECK(message([&] { cfg.integer("s", "n"); }).find("must be an integer") !=
        std::string::npos);
  CHECK(message([&] { cfg.flag_or("s", "b", false); }).find("boolean") != std::string::npos);
  CHECK(message([&] { cfg.number("s", "missing"); }).find("missing key") !=
        std::string::npos);
  CHECK(message([&] { cfg.number("nosec", "k"); }).find("missing section") !=
        std::string::npos);
}

TEST_CASE("profiles from config sections", "[cli]") {
  const Config cfg = Config::parse_text(
      "[a]\nfamily = euclidean\nm = 3\n"
      "[b]\nfamily = capped_euler\nH = 1.0\nm = 3\n"
      "[c]\nfamily = exponential\nLambda = 2.0\na = 0.5\nalpha = 1.0\n"
      "[d]\nfamily = euclidean\nm = 3\njumps = 2:0.5, 4:0.25\n"
      "[bad]\nfamily = nosuch\n"
      "[neg]\nfamily = constant\nvalue = -1\n",
      "p.ini");
  CHECK(profile_from_config(cfg, "a")(2.0) == 4.0);
  CHECK(profile_from_config(cfg, "b")(0.5) == 0.25);
  CHECK(profile_from_config(cfg, "c")(0.0) == 2.0);
  const auto jumped = profile_from_config(cfg, "d");
  REQUIRE(jumped.jumps().size() == 2);
  CHECK(jumped(5.0) == Catch::Approx(25.0 * 0.125));
  CHECK_THROWS_AS(profile_from_config(cfg, "bad"), config_error);
  CHECK_THROWS_AS(profile_from_config(cfg, "neg"), config_error);
  CHECK_THROWS_AS(envelope_from_config(cfg, "a"), config_error);
}

TEST_CASE("table profiles resolve relative to the config file", "[cli]") {
  const auto dir = scratch_dir("table");
  write_file(dir / "v.tsv",
             "# radius volume\n"
             "0.0 0.0\n"
             "1.0, 2.0\n"
             "3.0\t6.0\n");
  write_file(dir / "cfg.ini", "[volume]\nfamily = table\npath = v.tsv\n");
  const Config cfg = Config::parse_file((dir / "cfg.ini").string());
  const auto v = profile_from_config(cfg, "volume");
  CHECK(v(2.0) == Catch::Approx(4.0));
  CHECK(v.domain_end() == 3.0);

  write_file(dir / "bad.tsv", "0.0 0.0\n1.0 oops\n");
  try {
    read_table((dir / "bad.tsv").string());
    FAIL("expected a table error");
  } catch (const config_error& e) {
    CHECK(std::string(e.what()).find("bad.tsv:2:") != std::string::npos);
  }
  CHECK_THROWS_AS(read_table((dir / "absent.tsv").string()), config_error);
}

TEST_CASE("solve artifacts are byte identical across runs", "[cli]") {
  const Config cfg = Config::parse_text(solve_config_text, "solve.ini");
  const auto out1 = scratch_dir("run1");
  const auto out2 = scratch_dir("run2");
  run_solve(cfg, out1.string());
  run_solve(cfg, out2.string());
  for (const char* name : {"solve_track.csv", "solve_zeros.csv"}) {
    const std::string a = slurp(out1 / name);
    CHECK(a == slurp(out2 / name));
    CHECK_FALSE(a.empty());
  }
  // Header row is the documented contract.
  const std::string track = slurp(out1 / "solve_track.csv");
  CHECK(track.rfind("t,z,flux,y,is_near_zero\n", 0) == 0);
  const std::string zeros = slurp(out1 / "solve_zeros.csv");
  CHECK(zeros.rfind("index,location,bracket_width,ratio\n", 0) == 0);
}

TEST_CASE("gaps runner emits the documented columns", "[cli]") {
  const Config cfg = Config::parse_text(
      "[volume]\nfamily = exponential\na = 1.0\nalpha = 1.0\n"
      "[potential]\nfamily = constant\nvalue = 1.0\n"
      "[gaps]\ntau = 5, 10, 20\nc = 2.0\nalpha = 1.0\n",
      "gaps.ini");
  const auto out = scratch_dir("gaps");
  run_gaps(cfg, out.string());
  const std::string csv = slurp(out / "gaps.csv");
  CHECK(csv.rfind("tau,T1,T2,ratio,g3,g1,g2,g3p,g1p,g2p,bound\n", 0) == 0);
  CHECK(csv.find("\n5,") != std::string::npos);
}

TEST_CASE("criteria runner writes the report and the running table", "[cli]") {
  // The running table's first sample sits exactly at the sweep start, where
  // both anchored integrals are zero.
  const Config cfg = Config::parse_text(
      "[volume]\nfamily = hyperbolic\nm = 2\nB = 1.0\n"
      "[potential]\nfamily = capped_hyperbolic\nH = 0.6\nm = 2\nB = 1.0\n"
      "[criteria]\nhorizon = 50\nt0 = 1.0\n",
      "criteria.ini");
  const auto out = scratch_dir("criteria");
  run_criteria(cfg, out.string());
  const std::string json = slurp(out / "criteria.json");
  CHECK(json.find("\"pointwise_excess\"") != std::string::npos);
  const std::string csv = slurp(out / "criteria_running.csv");
  REQUIRE(csv.rfind(
              "t,sqrt_potential_integral,sqrt_critical_integral,excess,hille_nehari\n", 0) == 0);
  const size_t line2 = csv.find('\n') + 1;
  const std::string first = csv.substr(line2, csv.find('\n', line2) - line2);
  CHECK(first.rfind("1,0,0,0,", 0) == 0);
}

#ifdef OSCILLA_BIN

namespace {
int run_binary(const std::string& args) {
  const std::string cmd = std::string(OSCILLA_BIN) + " " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}
}  // namespace

TEST_CASE("binary solves a shipped config reproducibly", "[cli]") {
  const auto out1 = scratch_dir("bin1");
  const auto out2 = scratch_dir("bin2");
  const std::string cfg = std::string(OSCILLA_CONFIG_DIR) + "/solve_exponential.ini";
  REQUIRE(run_binary("solve --config " + cfg + " --out " + out1.string()) == 0);
  REQUIRE(run_binary("solve --config " + cfg + " --out " + out2.string()) == 0);
  CHECK(slurp(out1 / "solve_track.csv") == slurp(out2 / "solve_track.csv"));
  CHECK(slurp(out1 / "solve_zeros.csv") == slurp(out2 / "solve_zeros.csv"));
}

TEST_CASE("binary rejects malformed configs with a line number", "[cli]") {
  const auto dir = scratch_dir("binbad");
  write_file(dir / "bad.ini", "[volume]\nfamily = euclidean\nm = three\n");
  const std::string cmd = std::string(OSCILLA_BIN) + " solve --config " +
                          (dir / "bad.ini").string() + " --out " + (dir / "out").string() +
                          " 2> " + (dir / "err.txt").string();
  const int rc = std::system(cmd.c_str());
  CHECK(rc != 0);
  const std::string err = slurp(dir / "err.txt");
  CHECK(err.find("bad.ini:3:") != std::string::npos);

  CHECK(run_binary("solve --config " + (dir / "missing.ini").string()) != 0);
  CHECK(run_binary("nosuchcommand") != 0);
}

#endif
