#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
};

Outcome run(const std::string& args, bool merge_stderr = false) {
  std::string cmd = std::string(GRADLAB_BIN) + " " + args + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  Outcome o;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) o.out.append(buf.data(), got);
  const int status = pclose(pipe);
  o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("gradlab_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("orbit reports the Hamiltonian") {
  const auto o = run("orbit --R 0.5 --json");
  REQUIRE(o.code == 0);
  const json j = json::parse(o.out);
  CHECK(j.at("pass") == true);
  CHECK(j.at("reports").at(0).at("H").get<double>() == -0.046875);
}

TEST_CASE("the counterexample violates the Modica bound") {
  const auto o = run("estimates --theorem modica --field counterexample --json");
  CHECK(o.code == 1);
  const json j = json::parse(o.out);
  CHECK(j.at("reports").at(0).at("worst_margin").get<double>() == doctest::Approx(-0.125).epsilon(1e-6));
  CHECK(run("estimates --theorem modica --field counterexample --expect-violation").code == 0);
}

TEST_CASE("usage errors exit with 2 and explain on stderr") {
  const auto bad = run("--bogus", true);
  CHECK(bad.code == 2);
  CHECK(bad.out.find("--bogus") != std::string::npos);
  CHECK(run("orbit").code == 2);
  CHECK(run("estimates --theorem 9.9 --field tanh_profile").code == 2);
  CHECK(run("orbit --R 1.5").code != 0);
  CHECK(run("").code == 2);
}

TEST_CASE("every check is listed") {
  const auto o = run("--list-checks");
  CHECK(o.code == 0);
  for (const char* cmd : {"counterexample", "orbit", "3.1", "3.2", "3.3", "3.4", "3.5", "polygon",
                          "planar tensor", "planar ufield", "planar convexity", "planar green",
                          "planar monotone", "relax"}) {
    CAPTURE(cmd);
    CHECK(o.out.find(cmd) != std::string::npos);
  }
}

TEST_CASE("reports are byte-identical across runs and round-trip through json") {
  const auto a = scratch("a");
  const auto b = scratch("b");
  for (const auto& args : {std::string("planar green --field gl_circle_planar --param '{\"R\":0.5}' --radius 1"),
                           std::string("estimates --theorem 3.3 --field gl_circle --param '{\"R\":0.9}'"),
                           std::string("counterexample build")}) {
    CAPTURE(args);
    REQUIRE(run(args + " --out " + a.string()).code == 0);
    REQUIRE(run(args + " --out " + b.string()).code == 0);
    const auto first = slurp(a / "report.json");
    CHECK(!first.empty());
    CHECK(first == slurp(b / "report.json"));
    const json parsed = json::parse(first);
    CHECK(json::parse(parsed.dump()) == parsed);
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("profile and trajectory csv files carry their headers") {
  const auto dir = scratch("csv");
  REQUIRE(run("planar monotone --out " + dir.string()).code == 0);
  std::ifstream profile(dir / "profile.csv");
  std::string header;
  std::getline(profile, header);
  CHECK(header == "r,M(r),quad_error_estimate");

  REQUIRE(run("counterexample build --out " + dir.string()).code == 0);
  std::ifstream orbit(dir / "orbit.csv");
  std::getline(orbit, header);
  CHECK(header == "t,u_1,u_2,v_1,v_2,H");
  fs::remove_all(dir);
}

TEST_CASE("relax from a config file") {
  const auto dir = scratch("relax");
  fs::create_directories(dir);
  const json cfg = {{"grid", {{"origin", {-2.0, 0.0}}, {"h", {0.1, 0.1}}, {"extents", {41, 11}}}},
                    {"boundary", {{"field", "tanh_planar"}}},
                    {"potential", {{"id", "double_well"}}},
                    {"tol", 1e-8}};
  std::ofstream(dir / "cfg.json") << cfg.dump();
  const auto o = run("relax --config " + (dir / "cfg.json").string() + " --out " + dir.string());
  CHECK(o.code == 0);
  const json log = json::parse(slurp(dir / "relax_log.json"));
  CHECK(log.at("residual").get<double>() <= 1e-8);
  CHECK(log.at("energy_last").get<double>() <= log.at("energy_first").get<double>());
  CHECK(fs::exists(dir / "field.txt"));
  CHECK(run("relax --config " + (dir / "missing.json").string()).code != 0);
  fs::remove_all(dir);
}

TEST_CASE("planar subcommands pass on solutions") {
  for (const char* args : {"planar tensor", "planar ufield", "planar convexity",
                           "planar convexity --field gl_circle_planar --param '{\"R\":0.8}'",
                           "planar green", "planar monotone --density laplacian"}) {
    CAPTURE(args);
    CHECK(run(args).code == 0);
  }
  const auto o = run("planar convexity --field gl_circle_planar --param '{\"R\":0.8}' --json");
  CHECK(json::parse(o.out).at("reports").at(0).at("convex") == false);
}
