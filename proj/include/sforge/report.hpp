#ifndef SFORGE_REPORT_HPP
#define SFORGE_REPORT_HPP

#include "sforge/zerotest.hpp"

#include <optional>
#include <string>
#include <vector>

namespace sforge {

inline constexpr const char* kToolVersion = "0.1.0";

struct ResidualInfo {
  std::string max_abs;
  std::string component;
};

/// One verification record of a report. verdict is one of
/// certified-symbolic, certified-numeric, failed, inapplicable, undetermined.
struct CheckRecord {
  std::string id;
  std::string anchor;  // the identity being checked, in plain ascii
  std::string verdict;
  std::vector<std::pair<std::string, std::string>> witnesses;
  std::optional<ResidualInfo> residual;
  std::string note;
};

struct VerificationReport {
  std::string version = kToolVersion;
  std::string input_sha256;
  ZeroTestConfig config;
  std::vector<CheckRecord> checks;

  bool any_failed() const;
};

std::string emit_text(const VerificationReport& r);
std::string emit_json(const VerificationReport& r);

std::string sha256_hex(const std::string& bytes);
std::string format_double(double v);

}  // namespace sforge

#endif
