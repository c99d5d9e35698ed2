#include "sforge/report.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace sforge {

bool VerificationReport::any_failed() const {
  return std::any_of(checks.begin(), checks.end(),
                     [](const CheckRecord& c) { return c.verdict == "failed"; });
}

std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xF]);
  }
  return out;
}

std::string emit_text(const VerificationReport& r) {
  std::ostringstream os;
  os << "soliton-forge " << r.version << "  (samples=" << r.config.samples
     << " tol=" << format_double(r.config.tol) << " seed=" << r.config.seed << ")\n";
  os << "input sha256: " << r.input_sha256 << "\n";
  std::size_t idw = 2, vw = 2;
  for (const auto& c : r.checks) {
    idw = std::max(idw, c.id.size());
    vw = std::max(vw, c.verdict.size());
  }
  os << "\n";
  for (const auto& c : r.checks) {
    os << "  " << std::left << std::setw(static_cast<int>(idw) + 2) << c.id
       << std::setw(static_cast<int>(vw) + 2) << c.verdict;
    std::string extra;
    for (const auto& [k, v] : c.witnesses) {
      if (!extra.empty()) extra += "  ";
      extra += k + " = " + v;
    }
    if (c.residual && c.verdict == "failed") {
      if (!extra.empty()) extra += "  ";
      extra += "residual max|.| = " + c.residual->max_abs;
      if (!c.residual->component.empty()) extra += " at " + c.residual->component;
    }
    if (!c.note.empty()) {
      if (!extra.empty()) extra += "  ";
      extra += "[" + c.note + "]";
    }
    os << extra << "\n";
  }
  int failed = 0, inapplicable = 0;
  for (const auto& c : r.checks) {
    if (c.verdict == "failed") ++failed;
    if (c.verdict == "inapplicable") ++inapplicable;
  }
  os << "\n"
     << r.checks.size() << " checks, " << failed << " failed, " << inapplicable
     << " inapplicable\n";
  return os.str();
}

std::string emit_json(const VerificationReport& r) {
  nlohmann::ordered_json j;
  j["version"] = r.version;
  j["input_sha256"] = r.input_sha256;
  j["config"] = {{"samples", std::to_string(r.config.samples)},
                 {"tol", format_double(r.config.tol)},
                 {"seed", std::to_string(r.config.seed)}};
  j["checks"] = nlohmann::ordered_json::array();
  for (const auto& c : r.checks) {
    nlohmann::ordered_json jc;
    jc["id"] = c.id;
    jc["anchor"] = c.anchor;
    jc["verdict"] = c.verdict;
    nlohmann::ordered_json w = nlohmann::ordered_json::object();
    for (const auto& [k, v] : c.witnesses) w[k] = v;
    jc["witnesses"] = w;
    if (c.residual) {
      jc["residual"] = {{"max_abs", c.residual->max_abs},
                        {"component", c.residual->component}};
    }
    if (!c.note.empty()) jc["note"] = c.note;
    j["checks"].push_back(jc);
  }
  return j.dump(2) + "\n";
}

}  // namespace sforge
