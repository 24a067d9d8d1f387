#include "sinegen/io.hpp"

#include <cctype>
#include <cerrno>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace sinegen::io {

namespace {

using funcspace::FourierRepresentation;
using nlohmann::json;

json parse_checked(const std::string& text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw FormatError("invalid JSON");
  return j;
}

const json& field(const json& j, const char* name) {
  if (!j.is_object()) throw FormatError(std::string("expected an object holding \"") + name + "\"");
  auto it = j.find(name);
  if (it == j.end()) throw FormatError(std::string("missing field \"") + name + "\"");
  return *it;
}

double number_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number()) throw FormatError(std::string("field \"") + name + "\" must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw FormatError(std::string("field \"") + name + "\" must be finite");
  return d;
}

long long integer_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_number_integer())
    throw FormatError(std::string("field \"") + name + "\" must be an integer");
  return v.get<long long>();
}

bool bool_field(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_boolean()) throw FormatError(std::string("field \"") + name + "\" must be a boolean");
  return v.get<bool>();
}

json repr_to_j(const FourierRepresentation& r) {
  json coeffs = json::array();
  for (const auto& c : r.coefficients()) coeffs.push_back(json::array({c.real(), c.imag()}));
  return json{{"period", r.period()}, {"max_mode", r.max_mode()}, {"coefficients", coeffs}};
}

FourierRepresentation repr_from_j(const json& j) {
  const double period = number_field(j, "period");
  if (period <= 0.0) throw FormatError("period must be positive");
  const long long max_mode = integer_field(j, "max_mode");
  if (max_mode < 1 || max_mode > 1'000'000) throw FormatError("max_mode out of range");
  const json& cj = field(j, "coefficients");
  if (!cj.is_array()) throw FormatError("coefficients must be an array");
  const size_t expected = static_cast<size_t>(2 * max_mode + 1);
  if (cj.size() != expected)
    throw FormatError("coefficients must hold exactly 2*max_mode+1 entries");
  std::vector<std::complex<double>> coeffs;
  coeffs.reserve(expected);
  for (const json& e : cj) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
      throw FormatError("each coefficient must be a [re, im] number pair");
    const double re = e[0].get<double>();
    const double im = e[1].get<double>();
    if (!std::isfinite(re) || !std::isfinite(im))
      throw FormatError("coefficients must be finite");
    coeffs.emplace_back(re, im);
  }
  try {
    return FourierRepresentation(period, static_cast<int>(max_mode), std::move(coeffs));
  } catch (const std::invalid_argument& ex) {
    throw FormatError(ex.what());
  }
}

json report_to_j(const props::PropositionReport& report) {
  json residuals = json::object();
  for (const auto& [name, value] : report.residuals) residuals[name] = value;
  json info = json::object();
  for (const auto& [name, value] : report.info) info[name] = value;
  return json{{"id", report.proposition_id}, {"residuals", residuals},
              {"info", info},               {"tolerance", report.tolerance_used},
              {"pass", report.pass},        {"grid_points", report.grid_points},
              {"scaled", report.scaled}};
}

double max_abs_coefficient(const FourierRepresentation& r) {
  double m = 0.0;
  for (const auto& c : r.coefficients()) m = std::max(m, std::abs(c));
  return m;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char ch : text) {
    if (ch == '\n') {
      if (!cur.empty() && cur.back() == '\r') cur.pop_back();
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  if (!cur.empty()) {
    if (cur.back() == '\r') cur.pop_back();
    lines.push_back(cur);
  }
  return lines;
}

double parse_double_strict(const std::string& text) {
  if (text.empty() || std::isspace(static_cast<unsigned char>(text.front())))
    throw FormatError("malformed number \"" + text + "\"");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v))
    throw FormatError("malformed number \"" + text + "\"");
  return v;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s == "-0") s = "0";
  return s;
}

std::string representation_to_json(const FourierRepresentation& r) {
  return repr_to_j(r).dump(2);
}

FourierRepresentation representation_from_json(const std::string& text) {
  return repr_from_j(parse_checked(text));
}

std::string solution_to_json(const kernel::KernelSolution& s) {
  json j;
  j["f"] = repr_to_j(s.f);
  j["g"] = repr_to_j(s.g);
  j["a"] = s.a;
  j["lambda"] = s.lambda;
  j["equation_form"] =
      s.equation_form == kernel::EquationForm::Shifted ? "shifted" : "scaled";
  j["diagnostics"] = json{{"smallest_singular_value", s.diagnostics.smallest_singular_value},
                          {"next_singular_value", s.diagnostics.next_singular_value},
                          {"gap", s.diagnostics.gap},
                          {"max_mode", s.diagnostics.max_mode},
                          {"no_exact_kernel", s.diagnostics.no_exact_kernel}};
  return j.dump(2);
}

kernel::KernelSolution solution_from_json(const std::string& text) {
  const json j = parse_checked(text);
  if (!j.is_object()) throw FormatError("solution must be a JSON object");

  FourierRepresentation f = repr_from_j(field(j, "f"));
  FourierRepresentation g = repr_from_j(field(j, "g"));
  const double a = number_field(j, "a");
  if (a <= 0.0) throw FormatError("a must be positive");
  const double lambda = number_field(j, "lambda");
  if (lambda <= 0.0) throw FormatError("lambda must be positive");

  const json& form = field(j, "equation_form");
  if (!form.is_string()) throw FormatError("equation_form must be a string");
  const std::string form_name = form.get<std::string>();
  kernel::EquationForm equation_form;
  if (form_name == "shifted") {
    equation_form = kernel::EquationForm::Shifted;
  } else if (form_name == "scaled") {
    equation_form = kernel::EquationForm::ScaledShifted;
  } else {
    throw FormatError("equation_form must be \"shifted\" or \"scaled\"");
  }

  const json& dj = field(j, "diagnostics");
  kernel::SolveDiagnostics diag{};
  diag.smallest_singular_value = number_field(dj, "smallest_singular_value");
  diag.next_singular_value = number_field(dj, "next_singular_value");
  diag.gap = number_field(dj, "gap");
  diag.max_mode = static_cast<int>(integer_field(dj, "max_mode"));
  diag.no_exact_kernel = bool_field(dj, "no_exact_kernel");

  if (f.period() != g.period() || f.max_mode() != g.max_mode())
    throw FormatError("f and g must share a basis");
  const double scale = 1.0 + std::max(max_abs_coefficient(f), max_abs_coefficient(g));
  if (!f.is_conjugate_symmetric(1e-12 * scale) || !g.is_conjugate_symmetric(1e-12 * scale))
    throw FormatError("coefficients must be conjugate symmetric (real-valued function)");
  const FourierRepresentation df = funcspace::differentiate(f);
  double deriv_gap = 0.0;
  for (int k = -f.max_mode(); k <= f.max_mode(); ++k)
    deriv_gap = std::max(deriv_gap, std::abs(g.coefficient(k) - df.coefficient(k)));
  if (deriv_gap > 1e-10 * scale) throw FormatError("g must be the derivative of f");
  if (std::abs(f.period() - 4.0 * a) > 1e-9 * f.period())
    throw FormatError("basis period must equal 4a");

  return kernel::KernelSolution{std::move(f), std::move(g), a,
                                lambda,       equation_form, diag};
}

std::string report_to_json(const props::PropositionReport& report) {
  return report_to_j(report).dump(2);
}

std::string certificate_to_json(const props::VerificationCertificate& c) {
  json reports = json::array();
  for (const auto& r : c.reports) reports.push_back(report_to_j(r));
  json j;
  j["reports"] = reports;
  j["period"] = json{{"value", c.period.period},
                     {"method", c.period.method == props::PeriodMethod::ZeroCrossing
                                    ? "zero_crossing"
                                    : "autocorrelation"},
                     {"agreement", c.period.agreement}};
  j["period_vs_4a_rel_error"] = c.period_vs_4a_rel_error;
  j["wronskian_at_zero"] = c.wronskian_at_zero;
  j["dependence_residual"] = c.dependence_residual;
  j["overall_pass"] = c.overall_pass;
  return j.dump(2);
}

std::string sampled_to_csv(const funcspace::SampledFunction& s) {
  std::string out = "x,value\n";
  for (int j = 0; j < s.grid.n; ++j) {
    out += format_double(s.grid.point(j));
    out += ',';
    out += format_double(s.values[static_cast<size_t>(j)]);
    out += '\n';
  }
  return out;
}

funcspace::SampledFunction sampled_from_csv(const std::string& text) {
  const std::vector<std::string> lines = split_lines(text);
  if (lines.empty() || lines[0] != "x,value")
    throw FormatError("expected CSV header \"x,value\"");
  std::vector<double> xs, vs;
  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty() && i + 1 == lines.size()) break;
    const std::vector<std::string> fields = split_fields(lines[i]);
    if (fields.size() != 2)
      throw FormatError("row " + std::to_string(i) + " must have exactly two fields");
    xs.push_back(parse_double_strict(fields[0]));
    vs.push_back(parse_double_strict(fields[1]));
  }
  if (xs.size() < 2) throw FormatError("need at least two sample rows");
  const int n = static_cast<int>(xs.size());
  const double x0 = xs[0];
  const double h = (xs[static_cast<size_t>(n - 1)] - x0) / (n - 1);
  if (!(h > 0.0)) throw FormatError("sample abscissae must be strictly increasing");
  for (int j = 0; j < n; ++j) {
    const double expected = x0 + j * h;
    if (std::abs(xs[static_cast<size_t>(j)] - expected) >
        1e-9 * (1.0 + std::abs(xs[static_cast<size_t>(j)])))
      throw FormatError("sample abscissae must be uniformly spaced");
  }
  try {
    return funcspace::SampledFunction(funcspace::GridSpec(x0, h * n, n), std::move(vs));
  } catch (const std::invalid_argument& ex) {
    throw FormatError(ex.what());
  }
}

std::string trajectory_to_csv(const kernel::HarmonicTrajectory& t) {
  std::string out = "x,f,g\n";
  for (int j = 0; j < t.grid.n; ++j) {
    out += format_double(t.grid.point(j));
    out += ',';
    out += format_double(t.f_values[static_cast<size_t>(j)]);
    out += ',';
    out += format_double(t.g_values[static_cast<size_t>(j)]);
    out += '\n';
  }
  return out;
}

std::string roots_to_csv(const std::vector<kernel::CharacteristicRoot>& roots) {
  std::string out = "re,im,residual,imag_flag\n";
  for (const auto& r : roots) {
    out += format_double(r.s.real());
    out += ',';
    out += format_double(r.s.imag());
    out += ',';
    out += format_double(r.residual);
    out += ',';
    out += r.imaginary ? '1' : '0';
    out += '\n';
  }
  return out;
}

std::string roots_to_json(const std::vector<kernel::CharacteristicRoot>& roots) {
  json arr = json::array();
  for (const auto& r : roots) {
    arr.push_back(json{{"re", r.s.real()},
                       {"im", r.s.imag()},
                       {"residual", r.residual},
                       {"branch_index", r.branch_index},
                       {"imaginary", r.imaginary}});
  }
  return arr.dump(2);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in.good() && !in.eof()) throw FormatError("error while reading file: " + path);
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write file: " + path);
  out << content;
  out.flush();
  if (!out.good()) throw FormatError("error while writing file: " + path);
}

}  // namespace sinegen::io
