#include <CLI11.hpp>

#include "sforge/commands.hpp"

#include <fstream>
#include <iostream>

using namespace sforge;

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);

  // command words come first: "solve ricci", "verify all", "check gradient"
  // and "classify einstein" are two words, the rest one
  std::string command;
  std::size_t consumed = 0;
  if (!args.empty() && !args[0].empty() && args[0][0] != '-') {
    std::string head = args[0];
    consumed = 1;
    if ((head == "solve" || head == "verify" || head == "check" || head == "classify") &&
        args.size() > 1 && !args[1].empty() && args[1][0] != '-') {
      command = head + "-" + args[1];
      consumed = 2;
    } else {
      command = head;
    }
  }
  const auto& cmds = known_commands();
  bool known = std::find(cmds.begin(), cmds.end(), command) != cmds.end();
  if (!known) {
    if (!command.empty() && command != "help" && command != "--help" && command != "-h")
      std::cerr << "unknown command '" << command << "'\n";
    std::cerr << "usage: soliton-forge <command> <file...> [flags]\ncommands:\n";
    for (const auto& c : cmds) {
      std::string spaced = c;
      std::replace(spaced.begin(), spaced.end(), '-', ' ');
      std::cerr << "  " << spaced << "\n";
    }
    std::cerr << "flags: --vector NAME --eta NAME --function NAME --frame NAME\n"
                 "       --form NAME (repeatable) --tensor NAME --ambient-vector NAME\n"
                 "       --samples N --tol T --seed S --format text|json --weyl --out FILE\n";
    return command == "help" || command == "--help" || command == "-h" ? 0 : 2;
  }

  CLI::App app{"symbolic soliton and hypersurface workbench", "soliton-forge"};
  std::vector<std::string> files;
  CommandOptions opt;
  std::string format = "text";
  std::string out_path;
  app.add_option("files", files, "manifold description files")->required();
  app.add_option("--vector", opt.vector_name, "potential vector field name (default V)");
  app.add_option("--eta", opt.eta_name, "1-form name (default eta, else the g-dual of V)");
  app.add_option("--function", opt.function_name, "potential function name (default f)");
  app.add_option("--frame", opt.frame_name, "frame name for frame-evaluated records");
  app.add_option("--form", opt.forms, "candidate 1-form for the Einstein taxonomy (repeatable)");
  app.add_option("--tensor", opt.tensor_name, "trace-free candidate tensor name");
  app.add_option("--ambient-vector", opt.ambient_vector,
                 "ambient vector field name for hypersurface commands (default V)");
  app.add_option("--samples", opt.ztc.samples, "zero-test sample count (default 32)");
  app.add_option("--tol", opt.ztc.tol, "zero-test relative tolerance (default 1e-9)");
  app.add_option("--seed", opt.ztc.seed, "zero-test sampling seed (default 0x5EED)");
  app.add_option("--format", format, "report format: text or json")
      ->check(CLI::IsMember({"text", "json"}));
  app.add_flag("--weyl", opt.weyl, "compute the Weyl tensor (n >= 4)");
  app.add_option("--out", out_path, "write the report to a file instead of stdout");

  std::vector<std::string> rest(args.begin() + consumed, args.end());
  std::vector<const char*> cargs;
  cargs.push_back("soliton-forge");
  for (const auto& a : rest) cargs.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargs.size()), cargs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  std::ostream* os = &std::cout;
  std::ofstream file_out;
  if (!out_path.empty()) {
    file_out.open(out_path, std::ios::binary);
    if (!file_out) {
      std::cerr << "cannot open output file '" << out_path << "'\n";
      return 2;
    }
    os = &file_out;
  }

  bool any_failed = false;
  bool first = true;
  for (const std::string& path : files) {
    try {
      LoadedDocument doc = load_document(path, opt.ztc);
      VerificationReport report = run_command(doc, command, opt);
      any_failed = any_failed || report.any_failed();
      if (format == "json") {
        *os << emit_json(report);
      } else {
        if (!first) *os << "\n";
        *os << "== " << path << " ==\n" << emit_text(report);
      }
      first = false;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 2;
    }
  }
  return any_failed ? 1 : 0;
}
