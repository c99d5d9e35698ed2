#ifndef SFORGE_COMMANDS_HPP
#define SFORGE_COMMANDS_HPP

#include "sforge/document.hpp"
#include "sforge/report.hpp"

#include <string>
#include <vector>

namespace sforge {

struct CommandOptions {
  std::string vector_name;    // defaults to "V" when declared
  std::string eta_name;       // defaults to "eta" when declared, else the g-dual of V
  std::string function_name;  // defaults to "f" when declared
  std::string frame_name;     // defaults to the first declared frame
  std::vector<std::string> forms;  // einstein candidates A (and B)
  std::string tensor_name;         // einstein candidate E
  std::string ambient_vector;      // hypersurface/sphere commands; defaults to "V"
  bool weyl = false;
  ZeroTestConfig ztc;
};

/// Command names: curvature, classify-vector, solve-ricci, solve-yamabe,
/// check-gradient, classify-einstein, verify-identities, hypersurface,
/// sphere-hypersurface, verify-all.
const std::vector<std::string>& known_commands();

VerificationReport run_command(const LoadedDocument& doc, const std::string& command,
                               const CommandOptions& opt);

}  // namespace sforge

#endif
