#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "gradlab/suite.hpp"

using namespace gradlab;

namespace {

struct Capture {
  int code = -1;
  std::string out;
};

Capture run_cli(const std::string& args) {
  const std::string cmd = std::string(GRADLAB_BIN) + " " + args + " 2>/dev/null";
  Capture c;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return c;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) c.out.append(buf.data(), got);
  const int status = pclose(pipe);
  c.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return c;
}

void line(int n, bool pass, const std::string& title, const std::string& note) {
  std::cout << (pass ? "PASS" : "FAIL") << "  criterion " << n << "  " << title;
  if (!note.empty()) std::cout << "  (" << note << ")";
  std::cout << std::endl;
}

}  // namespace

int main() {
  const std::vector<std::function<suite::CheckResult()>> checks{
      suite::counterexample_check,     suite::hamiltonian_family_check, suite::gl_sharpness_check,
      suite::ode_bound_family_check,   suite::derived_constants_check,  suite::convexity_threshold_check,
      suite::planar_identities_check,  suite::convexity_dichotomy_check, suite::green_monotonicity_check};

  int failures = 0;
  for (std::size_t k = 0; k < checks.size(); ++k) {
    suite::CheckResult r;
    std::string note;
    try {
      r = checks[k]();
    } catch (const std::exception& e) {
      r.title = "threw";
      note = e.what();
    }
    bool pass = r.pass;
    if (k == 0) {
      const bool fast = r.seconds <= 10.0;
      pass = pass && fast;
      note = std::to_string(r.seconds) + " s";
    }
    if (!pass && note.empty()) note = r.detail.dump();
    line(static_cast<int>(k) + 1, pass, r.title, note);
    failures += pass ? 0 : 1;
  }

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const auto first = run_cli("suite --json");
  const auto second = run_cli("suite --json");
  const double seconds = std::chrono::duration<double>(clock::now() - start).count() / 2.0;
  const bool deterministic = !first.out.empty() && first.out == second.out;
  const bool pass10 = first.code == 0 && second.code == 0 && deterministic && seconds <= 120.0;
  line(10, pass10, "suite deterministic and within two minutes",
       "exit " + std::to_string(first.code) + "/" + std::to_string(second.code) + ", " +
           std::to_string(seconds) + " s per run, " + (deterministic ? "identical" : "outputs differ"));
  failures += pass10 ? 0 : 1;

  return failures == 0 ? 0 : 1;
}
