#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "sinegen/funcspace.hpp"
#include "sinegen/kernel.hpp"
#include "sinegen/props.hpp"

namespace sinegen::io {

/// Malformed file content or schema violation.  Maps to CLI exit code 2.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// "%.17g" with negative zero normalized; round-trips doubles exactly.
std::string format_double(double v);

// JSON, schemas documented in README.md
std::string representation_to_json(const funcspace::FourierRepresentation& r);
funcspace::FourierRepresentation representation_from_json(const std::string& text);

std::string solution_to_json(const kernel::KernelSolution& s);
kernel::KernelSolution solution_from_json(const std::string& text);

std::string report_to_json(const props::PropositionReport& report);
std::string certificate_to_json(const props::VerificationCertificate& c);

// CSV, comma separated, header row, LF line endings, no quoting
std::string sampled_to_csv(const funcspace::SampledFunction& s);
funcspace::SampledFunction sampled_from_csv(const std::string& text);

std::string trajectory_to_csv(const kernel::HarmonicTrajectory& t);
std::string roots_to_csv(const std::vector<kernel::CharacteristicRoot>& roots);
std::string roots_to_json(const std::vector<kernel::CharacteristicRoot>& roots);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace sinegen::io
