// Acceptance run: one PASS/FAIL line per criterion with the default configurations.

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "hlab/experiments.hpp"

using namespace hlab;

namespace {

struct Criterion {
  const char* id;
  const char* title;
  std::function<ExperimentResult()> run;
  double budget_s = 0.0;  // 0 for no runtime bound
};

ExperimentResult merged(const char* kind, std::vector<std::function<ExperimentResult()>> parts) {
  ExperimentResult r;
  r.kind = kind;
  for (const auto& p : parts) r.merge(p());
  return r;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"AC1", "projection algebra", [] { return check_projection_algebra({}); }},
      {"AC2", "eigen-relations", [] { return check_eigenrelations({}); }, 600.0},
      {"AC3", "reconstruction and Plancherel",
       [] { return merged("reconstruction", {[] { return check_reconstruction({}); }, [] { return check_plancherel({}); }}); }},
      {"AC4", "operator norm growth", [] { return run_opnorm_gamma({}); }},
      {"AC5", "sublaplacian mu-slopes", [] { return run_heisenberg_slopes({}); }},
      {"AC6", "full Laplacian mu-slope", [] { return run_full_laplacian_slopes(full_laplacian_defaults()); }},
      {"AC7", "Metivier restriction slopes", [] { return run_metivier_restriction(MetivierRestrictionConfig::defaults()); }},
      {"AC8", "series convergence cases", [] { return run_series_table({}); }},
      {"AC9", "symplectic normalizers", [] { return check_symplectic({}); }},
      {"AC10", "Knapp sharpness", [] { return run_knapp({}); }},
      {"AC11", "d = 1 oracle equivalence", [] { return check_d1_equivalence({}); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool pass = false;
    try {
      ExperimentResult r = c.run();
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (c.budget_s > 0.0) r.checks.push_back(make_check("runtime_s", secs, c.budget_s));
      pass = r.passed() && !r.checks.empty();
      for (const auto& ch : r.checks) {
        if (!detail.empty()) detail += "; ";
        detail += (ch.pass ? "" : "[FAIL] ") + ch.name + " " + format_number(ch.value) + " <= " + format_number(ch.bound);
      }
      detail += "; wall " + format_number(secs) + " s";
    } catch (const std::exception& e) {
      detail = std::string("error: ") + e.what();
    }
    if (!pass) ++failed;
    std::printf("%s %s %s: %s\n", c.id, pass ? "PASS" : "FAIL", c.title, detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
