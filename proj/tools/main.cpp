#include <cerrno>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <iostream>
#include <numbers>
#include <regex>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sinegen/io.hpp"
#include "sinegen/kernel.hpp"
#include "sinegen/operators.hpp"
#include "sinegen/props.hpp"

namespace {

using namespace sinegen;

double parse_plain_number(const std::string& text) {
  if (text.empty() || std::isspace(static_cast<unsigned char>(text.front())))
    throw std::invalid_argument("cannot parse number \"" + text + "\"");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v))
    throw std::invalid_argument("cannot parse number \"" + text + "\"");
  return v;
}

// Accepts decimals plus rational multiples of pi: "pi", "-pi/4", "2pi", "2.5*pi/3".
double parse_shift(const std::string& text) {
  static const std::regex pi_form(R"(^([+-]?[0-9]*\.?[0-9]*)\*?pi(?:/([0-9]*\.?[0-9]+))?$)");
  std::smatch m;
  if (std::regex_match(text, m, pi_form)) {
    double coefficient = 1.0;
    const std::string coef = m[1].str();
    if (coef == "-") {
      coefficient = -1.0;
    } else if (!coef.empty() && coef != "+") {
      coefficient = parse_plain_number(coef);
    }
    const double divisor = m[2].matched ? parse_plain_number(m[2].str()) : 1.0;
    if (divisor == 0.0) throw std::invalid_argument("division by zero in \"" + text + "\"");
    return coefficient * std::numbers::pi / divisor;
  }
  return parse_plain_number(text);
}

void emit(const std::string& out_path, std::string content) {
  if (content.empty() || content.back() != '\n') content += '\n';
  if (out_path.empty()) {
    std::cout << content;
  } else {
    io::write_file(out_path, content);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Advance-equation toolkit: spectral kernel solve, identity verification, "
               "characteristic roots, coincidence scan, tabulation"};
  app.require_subcommand(1);

  unsigned long long seed = 0;
  app.add_option("--seed", seed,
                 "Echoed to stderr for provenance; every start point is deterministic");

  int rc = 0;

  auto* solve = app.add_subcommand("solve", "Solve f'(x) = f(x+a) on the period-4a basis");
  solve->fallthrough();
  std::string solve_a, solve_out;
  std::string solve_form = "shifted";
  std::string solve_format = "json";
  int solve_modes = 64;
  solve->add_option("--a", solve_a, "Shift a, decimal or pi-syntax (pi/2, 2pi, ...)")->required();
  solve->add_option("--modes", solve_modes, "Fourier mode cutoff")->check(CLI::Range(1, 100000));
  solve->add_option("--form", solve_form, "Equation form")
      ->check(CLI::IsMember({"shifted", "scaled"}));
  solve->add_option("--out", solve_out, "Output path (stdout when omitted)");
  solve->add_option("--format", solve_format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  solve->callback([&] {
    if (solve_format != "json")
      throw io::FormatError("solve emits JSON only; use --format json");
    const double a = parse_shift(solve_a);
    const kernel::KernelSolution sol = solve_form == "shifted"
                                           ? kernel::solve_shifted(a, solve_modes)
                                           : kernel::solve_scaled_shifted(a, solve_modes);
    if (sol.diagnostics.no_exact_kernel) {
      std::cerr << "note: no exact kernel at a = " << io::format_double(a)
                << " (smallest singular value "
                << io::format_double(sol.diagnostics.smallest_singular_value)
                << "); nearest direction reported. Try --form scaled, or a coincidence "
                   "shift such as pi/2.\n";
    }
    emit(solve_out, io::solution_to_json(sol));
  });

  auto* verify = app.add_subcommand("verify", "Check all eight identities on a stored solution");
  verify->fallthrough();
  std::string verify_input, verify_out;
  double verify_tol = 0.0;
  verify->add_option("--input", verify_input, "Solution JSON path")->required();
  verify->add_option("--tol", verify_tol, "Override for sup and constancy tolerances");
  verify->add_option("--out", verify_out, "Output path (stdout when omitted)");
  verify->callback([&] {
    props::ToleranceConfig tol;
    if (verify->count("--tol") > 0) {
      tol.sup_tol = verify_tol;
      tol.constancy_tol = verify_tol;
    }
    tol.validate();
    const kernel::KernelSolution sol = io::solution_from_json(io::read_file(verify_input));
    const props::VerificationCertificate cert = props::verify_all(sol, tol);
    emit(verify_out, io::certificate_to_json(cert));
    if (!cert.overall_pass) rc = 1;
  });

  auto* roots = app.add_subcommand("roots", "Roots of the characteristic equation s = exp(s*a)");
  roots->fallthrough();
  std::string roots_a, roots_out;
  std::string roots_format = "json";
  int roots_count = 3;
  roots->add_option("--a", roots_a, "Shift a, decimal or pi-syntax")->required();
  roots->add_option("--count", roots_count, "Conjugate root classes to return")
      ->check(CLI::Range(1, 10000));
  roots->add_option("--format", roots_format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  roots->add_option("--out", roots_out, "Output path (stdout when omitted)");
  roots->callback([&] {
    const double a = parse_shift(roots_a);
    const std::vector<kernel::CharacteristicRoot> rs = kernel::characteristic_roots(a, roots_count);
    if (rs.empty()) throw kernel::NumericError("no characteristic roots converged");
    int classes = 0;
    for (const auto& r : rs) {
      if (r.s.imag() >= 0.0) {
        ++classes;
        continue;
      }
      bool paired = false;
      for (const auto& other : rs)
        paired = paired || std::abs(std::conj(r.s) - other.s) <= 1e-9;
      if (!paired) ++classes;
    }
    if (classes < roots_count)
      std::cerr << "warning: only " << classes << " of " << roots_count
                << " requested root classes converged\n";
    emit(roots_out, roots_format == "csv" ? io::roots_to_csv(rs) : io::roots_to_json(rs));
  });

  auto* scan = app.add_subcommand(
      "scan", "Smallest singular value of D - T_a over a shift range, with coincidence rows");
  scan->fallthrough();
  std::string scan_a_min, scan_a_max, scan_out;
  std::string scan_format = "csv";
  int scan_samples = 200;
  int scan_modes = 16;
  scan->add_option("--a-min", scan_a_min, "Range start, decimal or pi-syntax")->required();
  scan->add_option("--a-max", scan_a_max, "Range end, decimal or pi-syntax")->required();
  scan->add_option("--samples", scan_samples, "Grid points across the range");
  scan->add_option("--modes", scan_modes, "Fourier mode cutoff")->check(CLI::Range(1, 100000));
  scan->add_option("--format", scan_format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  scan->add_option("--out", scan_out, "Output path (stdout when omitted)");
  scan->callback([&] {
    if (scan_format != "csv") throw io::FormatError("scan emits CSV only; use --format csv");
    const double a_min = parse_shift(scan_a_min);
    const double a_max = parse_shift(scan_a_max);
    if (!(a_min > 0.0 && a_min < a_max))
      throw std::invalid_argument("scan: need 0 < a-min < a-max");
    if (a_min < 1e-6 || a_max > 1e3)
      throw std::invalid_argument("scan: range outside [1e-6, 1e3]");
    if (scan_samples < 2) throw std::invalid_argument("scan: need at least 2 samples");

    std::vector<double> grid(static_cast<size_t>(scan_samples));
    for (int j = 0; j < scan_samples; ++j)
      grid[static_cast<size_t>(j)] = a_min + j * (a_max - a_min) / (scan_samples - 1);
    const std::vector<operators::ScanPoint> points = operators::residual_scan(grid, scan_modes);

    std::string csv = "kind,a,sigma_min,has_imag_root\n";
    for (const operators::ScanPoint& p : points) {
      bool imag = false;
      for (const auto& r : kernel::characteristic_roots(p.a, 6)) imag = imag || r.imaginary;
      csv += "sample,";
      csv += io::format_double(p.a);
      csv += ',';
      csv += io::format_double(p.sigma_min);
      csv += ',';
      csv += imag ? '1' : '0';
      csv += '\n';
    }
    for (double shift : kernel::detect_coincidence_shifts(a_min, a_max, scan_samples)) {
      const double sigma = operators::residual_scan({shift}, scan_modes).front().sigma_min;
      csv += "coincidence,";
      csv += io::format_double(shift);
      csv += ',';
      csv += io::format_double(sigma);
      csv += ",1\n";
    }
    emit(scan_out, csv);
  });

  auto* tabulate = app.add_subcommand(
      "tabulate", "Normalized (x, f, g) table over one period 4a, f(0)=0 and g(0)=1");
  tabulate->fallthrough();
  std::string tab_a, tab_out;
  std::string tab_form = "shifted";
  int tab_samples = 1024;
  int tab_modes = 64;
  tabulate->add_option("--a", tab_a, "Shift a, decimal or pi-syntax")->required();
  tabulate->add_option("--samples", tab_samples, "Rows across one period")
      ->check(CLI::Range(2, 100000000));
  tabulate->add_option("--modes", tab_modes, "Fourier mode cutoff")
      ->check(CLI::Range(1, 100000));
  tabulate->add_option("--form", tab_form, "Equation form")
      ->check(CLI::IsMember({"shifted", "scaled"}));
  tabulate->add_option("--out", tab_out, "Output path (stdout when omitted)");
  tabulate->callback([&] {
    const double a = parse_shift(tab_a);
    const kernel::KernelSolution sol = tab_form == "shifted"
                                           ? kernel::solve_shifted(a, tab_modes)
                                           : kernel::solve_scaled_shifted(a, tab_modes);
    if (sol.diagnostics.no_exact_kernel && tab_form == "shifted")
      throw kernel::NumericError(
          "tabulate: no exact kernel at this shift; rerun with --form scaled");
    funcspace::FourierRepresentation f = sol.f;
    funcspace::FourierRepresentation g = sol.g;
    for (int round = 0; round < 2; ++round) {
      const double g0 = funcspace::evaluate(g, 0.0);
      if (std::abs(g0 - 1.0) <= 1e-15) break;
      if (std::abs(g0) < 1e-150)
        throw kernel::NumericError("tabulate: normalization failed, g(0) is zero");
      f = funcspace::scaled(f, 1.0 / g0);
      g = funcspace::scaled(g, 1.0 / g0);
    }
    if (std::abs(funcspace::evaluate(f, 0.0)) > 1e-12 ||
        std::abs(funcspace::evaluate(g, 0.0) - 1.0) > 1e-12)
      throw kernel::NumericError("tabulate: boundary normalization did not converge");

    std::string csv = "x,f,g\n0,0,1\n";
    const double period = 4.0 * a;
    for (int j = 1; j < tab_samples; ++j) {
      const double x = period * j / tab_samples;
      csv += io::format_double(x);
      csv += ',';
      csv += io::format_double(funcspace::evaluate(f, x));
      csv += ',';
      csv += io::format_double(funcspace::evaluate(g, x));
      csv += '\n';
    }
    emit(tab_out, csv);
  });

  try {
    app.parse(argc, argv);
    if (app.count("--seed") > 0) std::cerr << "seed: " << seed << "\n";
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const io::FormatError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const kernel::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return rc;
}
