// Acceptance gate: nine go/no-go checks over the whole toolchain, one
// PASS/FAIL line each.  Tolerances are pinned in the criterion functions and
// are not configurable; the exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sinegen/funcspace.hpp"
#include "sinegen/io.hpp"
#include "sinegen/kernel.hpp"
#include "sinegen/operators.hpp"
#include "sinegen/props.hpp"
#include "test_support.hpp"

using namespace sinegen;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Criterion {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& label) {
    if (!ok) {
      pass = false;
      detail << (detail.str().empty() ? "" : "; ") << label;
    }
  }
  void note(const std::string& text) {
    detail << (detail.str().empty() ? "" : "; ") << text;
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

double residual_named(const props::PropositionReport& rep, const std::string& name) {
  for (const auto& [key, value] : rep.residuals)
    if (key == name) return value;
  return std::numeric_limits<double>::infinity();
}

double info_named(const props::PropositionReport& rep, const std::string& name) {
  for (const auto& [key, value] : rep.info)
    if (key == name) return value;
  return std::numeric_limits<double>::infinity();
}

double max_residual(const props::PropositionReport& rep) {
  double worst = 0.0;
  for (const auto& [key, value] : rep.residuals) worst = std::max(worst, value);
  return worst;
}

// 1. Kernel existence at a = pi/2 through the CLI: singular value at
//    rounding level and sup-norm agreement with the series oracle.
Criterion criterion_1() {
  Criterion c;
  const auto start = std::chrono::steady_clock::now();
  const auto run = testsupport::run_cli("solve --a pi/2 --modes 16");
  c.require(run.exit_code == 0, "solve exited " + std::to_string(run.exit_code));
  if (!c.pass) return c;

  const kernel::KernelSolution sol = io::solution_from_json(run.out);
  c.require(sol.diagnostics.smallest_singular_value <= 1e-12, "singular value above 1e-12");

  double sup = 0.0;
  for (int j = 0; j < 512; ++j) {
    const double x = 2.0 * kPi * j / 512.0;
    sup = std::max(sup, std::abs(funcspace::evaluate(sol.f, x) -
                                 kernel::taylor_oracle(x).sin_value));
  }
  c.require(sup <= 1e-10, "sup deviation from the series oracle above 1e-10");

  const double elapsed = seconds_since(start);
  c.require(elapsed <= 1.0, "runtime above 1 s");
  char buf[160];
  std::snprintf(buf, sizeof buf, "sigma=%.2e sup=%.2e t=%.2fs",
                sol.diagnostics.smallest_singular_value, sup, elapsed);
  c.note(buf);
  return c;
}

// 2. Full identity suite at tol 1e-9 with the periodicity and addition
//    residuals held to 1e-10.
Criterion criterion_2() {
  Criterion c;
  const auto start = std::chrono::steady_clock::now();
  const kernel::KernelSolution sol = kernel::solve_shifted(kPi / 2.0, 16);
  props::ToleranceConfig tol;
  tol.sup_tol = 1e-9;
  tol.constancy_tol = 1e-9;
  const props::VerificationCertificate cert = props::verify_all(sol, tol);

  c.require(cert.reports.size() == 8, "report count");
  for (const props::PropositionReport& rep : cert.reports)
    c.require(rep.pass, "check " + std::to_string(rep.proposition_id) + " failed");
  c.require(cert.overall_pass, "overall fail");

  const props::PropositionReport& p1 = cert.reports[0];
  c.require(residual_named(p1, "r_half") <= 1e-10, "r_half above 1e-10");
  c.require(residual_named(p1, "r_full") <= 1e-10, "r_full above 1e-10");
  const props::PropositionReport& p7 = cert.reports[6];
  c.require(p7.grid_points == 64 * 64, "addition grid is not 64x64");
  c.require(residual_named(p7, "r_addition") <= 1e-10, "r_addition above 1e-10");

  const double elapsed = seconds_since(start);
  c.require(elapsed <= 5.0, "runtime above 5 s");
  char buf[160];
  std::snprintf(buf, sizeof buf, "r_half=%.2e r_full=%.2e r_addition=%.2e t=%.2fs",
                residual_named(p1, "r_half"), residual_named(p1, "r_full"),
                residual_named(p7, "r_addition"), elapsed);
  c.note(buf);
  return c;
}

// 3. Equivalence both ways: the integrated trajectory satisfies the advance
//    identities, the spectral solution satisfies the harmonic ones.
Criterion criterion_3() {
  Criterion c;
  const kernel::HarmonicTrajectory t = kernel::integrate_harmonic(8.0 * kPi, 1e-3);

  double drift = 0.0;
  for (std::size_t j = 0; j < t.f_values.size(); ++j) {
    const double e = t.f_values[j] * t.f_values[j] + t.g_values[j] * t.g_values[j];
    drift = std::max(drift, std::abs(e - 1.0));
  }
  c.require(drift <= 1e-10, "conservation drift above 1e-10");

  // One fundamental period is a quarter of the integrated span.
  const int quarter = (t.grid.n - 1) / 4;
  funcspace::GridSpec slice(0.0, t.step * quarter, quarter);
  std::vector<double> fs(t.f_values.begin(), t.f_values.begin() + quarter);
  std::vector<double> gs(t.g_values.begin(), t.g_values.begin() + quarter);
  const funcspace::FourierRepresentation fr =
      funcspace::fit(funcspace::SampledFunction(slice, fs), 8);
  const funcspace::FourierRepresentation gr =
      funcspace::fit(funcspace::SampledFunction(slice, gs), 8);
  const double a = fr.period() / 4.0;

  const props::PropositionReport p2 = props::check(2, fr, gr, a);
  const props::PropositionReport p8 = props::check(8, fr, gr, a);
  c.require(max_residual(p2) <= 1e-8, "trajectory advance residual above 1e-8");
  c.require(max_residual(p8) <= 1e-8, "trajectory scaled-shift residual above 1e-8");
  c.require(std::abs(info_named(p8, "f_at_a") - 1.0) <= 1e-8, "f(a) is not 1");

  const kernel::KernelSolution sol = kernel::solve_shifted(kPi / 2.0, 16);
  const props::PropositionReport p3 = props::check(3, sol.f, sol.g, sol.a);
  const props::PropositionReport p6 = props::check(6, sol.f, sol.g, sol.a);
  c.require(max_residual(p3) <= 1e-9, "solution harmonic residual above 1e-9");
  c.require(max_residual(p6) <= 1e-9, "solution closure residual above 1e-9");

  char buf[200];
  std::snprintf(buf, sizeof buf, "drift=%.2e p2=%.2e p8=%.2e f(a)-1=%.1e p3=%.2e p6=%.2e",
                drift, max_residual(p2), max_residual(p8),
                info_named(p8, "f_at_a") - 1.0, max_residual(p3), max_residual(p6));
  c.note(buf);
  return c;
}

// 4. Nonexistence away from the coincidence shifts, and exactly two
//    detector-confirmed shifts inside (0.1, 10).
Criterion criterion_4() {
  Criterion c;
  const auto start = std::chrono::steady_clock::now();

  std::vector<double> grid(50);
  for (int i = 0; i < 50; ++i) grid[i] = 2.0 + i * (3.0 - 2.0) / 49.0;
  double floor_sigma = std::numeric_limits<double>::infinity();
  for (const operators::ScanPoint& p : operators::residual_scan(grid, 16))
    floor_sigma = std::min(floor_sigma, p.sigma_min);
  c.require(floor_sigma >= 0.05, "scan dipped below 0.05");

  bool any_imag = false;
  for (double a : grid)
    for (const kernel::CharacteristicRoot& r : kernel::characteristic_roots(a, 6))
      any_imag = any_imag || r.imaginary;
  c.require(!any_imag, "imaginary-flagged root inside [2, 3]");

  const std::vector<double> shifts = kernel::detect_coincidence_shifts(0.1, 10.0, 300);
  c.require(shifts.size() == 2, "expected exactly two shifts, got " +
                                    std::to_string(shifts.size()));
  if (shifts.size() == 2) {
    c.require(std::abs(shifts[0] - kPi / 2.0) <= 1e-8 * (kPi / 2.0),
              "first shift off pi/2");
    c.require(std::abs(shifts[1] - (kPi / 2.0 + 2.0 * kPi)) <=
                  1e-8 * (kPi / 2.0 + 2.0 * kPi),
              "second shift off pi/2 + 2pi");
  }

  const double elapsed = seconds_since(start);
  c.require(elapsed <= 10.0, "runtime above 10 s");
  char buf[160];
  std::snprintf(buf, sizeof buf, "min sigma=%.3f shifts=%zu t=%.2fs", floor_sigma,
                shifts.size(), elapsed);
  c.note(buf);
  return c;
}

// 5. Scaled family: eigenvalue 2a/pi, self-consistency lambda = f(a), and
//    the scaled shift identity.
Criterion criterion_5() {
  Criterion c;
  for (double a : {1.0, 2.0, 3.0}) {
    const kernel::KernelSolution sol = kernel::solve_scaled_shifted(a, 24);
    const std::string tag = " at a=" + std::to_string(static_cast<int>(a));
    c.require(std::abs(sol.lambda - 2.0 * a / kPi) <= 1e-8, "lambda off 2a/pi" + tag);
    c.require(std::abs(sol.lambda - funcspace::evaluate(sol.f, a)) <= 1e-10,
              "lambda is not f(a)" + tag);
    const props::PropositionReport p8 =
        props::check_form(8, sol.f, sol.g, sol.a, sol.lambda, true);
    c.require(max_residual(p8) <= 1e-9, "scaled shift residual above 1e-9" + tag);
  }
  return c;
}

// 6. Independence: Wronskian pinned at -1 across random points and a
//    dependence residual at the top of its range.
Criterion criterion_6() {
  Criterion c;
  const kernel::KernelSolution sol = kernel::solve_shifted(kPi / 2.0, 16);
  std::mt19937_64 rng(20260821);
  std::uniform_real_distribution<double> xs(0.0, 2.0 * kPi);

  double worst = 0.0;
  for (int i = 0; i < 100; ++i)
    worst = std::max(worst, std::abs(props::wronskian(sol.f, sol.g, xs(rng)) + 1.0));
  c.require(worst <= 1e-10, "Wronskian deviates from -1 by more than 1e-10");

  const double dep = props::linear_dependence_test(sol.f, sol.g);
  c.require(dep >= 0.99, "dependence residual below 0.99");
  char buf[120];
  std::snprintf(buf, sizeof buf, "max|W+1|=%.2e dependence=%.3f over 100 points", worst, dep);
  c.note(buf);
  return c;
}

// 7. Power of the harness: random odd band-limited functions must fail the
//    advance, harmonic, or energy identity by a clear margin.
Criterion criterion_7() {
  Criterion c;
  std::mt19937_64 rng(7);
  const double a = kPi / 2.0;
  double weakest = std::numeric_limits<double>::infinity();
  int failures = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const funcspace::FourierRepresentation f = testsupport::random_odd(rng, 4.0 * a, 6, true);
    const funcspace::FourierRepresentation g = funcspace::differentiate(f);
    double worst = 0.0;
    for (int id : {2, 3, 4}) worst = std::max(worst, max_residual(props::check(id, f, g, a)));
    weakest = std::min(weakest, worst);
    if (worst > 1e-3) ++failures;
  }
  c.require(failures == 100,
            "only " + std::to_string(failures) + "/100 controls were rejected");
  char buf[120];
  std::snprintf(buf, sizeof buf, "100/100 rejected, weakest margin %.3f", weakest);
  if (failures == 100) c.note(buf);
  return c;
}

// 8. Characteristic roots: the coincidence shift carries the unit imaginary
//    pair; generic roots satisfy the equation and pair up in conjugates.
Criterion criterion_8() {
  Criterion c;
  bool plus = false, minus = false;
  for (const kernel::CharacteristicRoot& r : kernel::characteristic_roots(kPi / 2.0, 3)) {
    if (std::abs(r.s - std::complex<double>(0.0, 1.0)) <= 1e-12 && r.residual <= 1e-13)
      plus = true;
    if (std::abs(r.s - std::complex<double>(0.0, -1.0)) <= 1e-12 && r.residual <= 1e-13)
      minus = true;
  }
  c.require(plus && minus, "unit imaginary pair missing at a = pi/2");

  const std::vector<kernel::CharacteristicRoot> roots = kernel::characteristic_roots(1.0, 4);
  c.require(!roots.empty(), "no roots at a = 1");
  for (const kernel::CharacteristicRoot& r : roots) {
    c.require(std::abs(r.s - std::exp(r.s)) <= 1e-12, "equation residual above 1e-12");
    bool paired = false;
    for (const kernel::CharacteristicRoot& other : roots)
      paired = paired || std::abs(other.s - std::conj(r.s)) <= 1e-9;
    c.require(paired, "unpaired root at a = 1");
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "+i/-i confirmed, %zu roots at a=1 in conjugate pairs",
                roots.size());
  if (c.pass) c.note(buf);
  return c;
}

// 9. CLI round trip: file-based verify must reproduce the in-process
//    residuals bit for bit, and the exit codes must follow the contract.
Criterion criterion_9() {
  Criterion c;
  const std::string sol_path = testsupport::temp_path("acceptance_solution.json");
  const auto solved = testsupport::run_cli("solve --a pi/2 --modes 16 --out " + sol_path);
  c.require(solved.exit_code == 0, "solve exit");
  const auto verified = testsupport::run_cli("verify --input " + sol_path);
  c.require(verified.exit_code == 0, "verify exit");
  if (!c.pass) return c;

  const kernel::KernelSolution sol = io::solution_from_json(io::read_file(sol_path));
  const props::VerificationCertificate cert = props::verify_all(sol);
  const json cli_cert = json::parse(verified.out);

  int compared = 0;
  bool all_identical = true;
  for (const props::PropositionReport& rep : cert.reports) {
    const json& cli_rep = cli_cert.at("reports")[rep.proposition_id - 1];
    for (const auto& [name, value] : rep.residuals) {
      ++compared;
      if (cli_rep.at("residuals").at(name).get<double>() != value) all_identical = false;
    }
  }
  c.require(compared >= 8, "residual comparison did not cover the reports");
  c.require(all_identical, "round-tripped residuals are not bit-identical");

  // Exit-code contract: 0 covered above, 1 on a failed certificate,
  // 2 across the malformed corpus, 3 on numeric failure.
  c.require(testsupport::run_cli("verify --input " + sol_path + " --tol 1e-17").exit_code == 1,
            "tight tolerance did not exit 1");
  c.require(testsupport::run_cli("tabulate --a 1 --samples 16").exit_code == 3,
            "kernel-free tabulate did not exit 3");

  const std::string base = io::read_file(sol_path);
  auto corrupt = [&](void (*edit)(json&)) {
    json j = json::parse(base);
    edit(j);
    const std::string path = testsupport::temp_path("acceptance_malformed.json");
    testsupport::spit(path, j.dump());
    return path;
  };

  std::vector<std::string> corpus_paths;
  const char* raw_cases[] = {
      "",                        // empty file
      "not json at all",         // lexer error
      "[1, 2, 3]",               // wrong top-level type
      "{}",                      // missing every field
      R"({"a": 1.5707963267948966})",  // missing representations
  };
  for (const char* text : raw_cases) {
    const std::string path = testsupport::temp_path("acceptance_malformed.json");
    testsupport::spit(path, text);
    corpus_paths.push_back(path);
  }
  corpus_paths.push_back(corrupt([](json& j) { j["a"] = -1.0; }));
  corpus_paths.push_back(corrupt([](json& j) { j["lambda"] = 0.0; }));
  corpus_paths.push_back(corrupt([](json& j) { j["equation_form"] = "cubic"; }));
  corpus_paths.push_back(corrupt([](json& j) { j["a"] = j["a"].get<double>() * 1.001; }));
  corpus_paths.push_back(corrupt([](json& j) {
    j["g"]["coefficients"][17][0] = j["g"]["coefficients"][17][0].get<double>() + 1e-5;
  }));
  corpus_paths.push_back(corrupt([](json& j) {
    j["f"]["coefficients"][17][1] = j["f"]["coefficients"][17][1].get<double>() + 1e-3;
  }));
  corpus_paths.push_back(corrupt([](json& j) { j["f"]["coefficients"].erase(0); }));
  corpus_paths.push_back(corrupt([](json& j) { j["f"]["period"] = "soon"; }));
  corpus_paths.push_back(corrupt([](json& j) { j["f"]["max_mode"] = 0; }));
  corpus_paths.push_back(testsupport::temp_path("acceptance_absent.json"));  // no file

  int malformed_ok = 0;
  for (const std::string& path : corpus_paths) {
    const auto r = testsupport::run_cli("verify --input " + path);
    if (r.exit_code == 2) ++malformed_ok;
    std::remove(path.c_str());
  }
  c.require(static_cast<int>(corpus_paths.size()) >= 10, "corpus is too small");
  c.require(malformed_ok == static_cast<int>(corpus_paths.size()),
            std::to_string(malformed_ok) + "/" + std::to_string(corpus_paths.size()) +
                " malformed cases exited 2");

  char buf[160];
  std::snprintf(buf, sizeof buf,
                "%d residuals bit-identical, %d/%zu malformed cases exit 2, codes 0/1/2/3 hit",
                compared, malformed_ok, corpus_paths.size());
  if (c.pass) c.note(buf);
  std::remove(sol_path.c_str());
  return c;
}

const char* kLabels[] = {
    "kernel existence at a = pi/2 (CLI solve, sigma <= 1e-12, oracle sup <= 1e-10, <= 1 s)",
    "identity suite at tol 1e-9 (periodicity and addition residuals <= 1e-10, <= 5 s)",
    "equivalence both ways (trajectory P2/P8 <= 1e-8, drift <= 1e-10, solution P3/P6 <= 1e-9)",
    "nonexistence on [2, 3] (sigma >= 0.05, no imaginary roots) and exactly two shifts in (0.1, 10)",
    "scaled family at a in {1, 2, 3} (lambda = 2a/pi +- 1e-8, lambda = f(a) +- 1e-10, P8 <= 1e-9)",
    "independence (Wronskian -1 +- 1e-10 at 100 random points, dependence >= 0.99)",
    "negative controls (100 random odd functions all fail P2/P3/P4 above 1e-3)",
    "characteristic roots (+-i residual <= 1e-13 at pi/2; conjugate pairs <= 1e-12 at a = 1)",
    "CLI round trip (bit-identical residuals, exit codes 0/1/2/3 over >= 10 malformed cases)",
};

}  // namespace

int main() {
  Criterion (*criteria[])() = {criterion_1, criterion_2, criterion_3,
                               criterion_4, criterion_5, criterion_6,
                               criterion_7, criterion_8, criterion_9};
  int failures = 0;
  for (int i = 0; i < 9; ++i) {
    Criterion c;
    try {
      c = criteria[i]();
    } catch (const std::exception& e) {
      c.pass = false;
      c.note(std::string("exception: ") + e.what());
    }
    if (!c.pass) ++failures;
    std::printf("%s criterion %d: %s%s%s\n", c.pass ? "PASS" : "FAIL", i + 1, kLabels[i],
                c.detail.str().empty() ? "" : " -- ", c.detail.str().c_str());
  }
  std::printf("%d/9 criteria passed\n", 9 - failures);
  return failures;
}
