// Acceptance suite: runs every exit criterion against the bundled corpus and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fails.

#include "sforge/commands.hpp"
#include "sforge/parse.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

using namespace sforge;
using nlohmann::json;

namespace {

std::string g_bin;
std::string g_corpus;
int g_failures = 0;

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  std::string cmd = g_bin + " " + args + " 2>/dev/null";
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return {-1, ""};
  std::string out;
  char buf[4096];
  std::size_t r;
  while ((r = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, r);
  int status = pclose(p);
  return {WEXITSTATUS(status), out};
}

json run_json(const std::string& args, int expect_exit = 0) {
  RunResult r = run_cli(args + " --format json");
  if (r.exit_code != expect_exit)
    throw std::runtime_error("exit code " + std::to_string(r.exit_code) + " for: " + args);
  return json::parse(r.output);
}

const json& check_of(const json& report, const std::string& id) {
  for (const auto& c : report.at("checks"))
    if (c.at("id") == id) return c;
  throw std::runtime_error("no check with id '" + id + "'");
}

bool certified(const json& c) {
  std::string v = c.at("verdict");
  return v == "certified-symbolic" || v == "certified-numeric";
}

std::string wit(const json& c, const std::string& key) {
  return c.at("witnesses").at(key).get<std::string>();
}

// exact structural equality of a witness expression against an expected form
bool expr_equal(const std::string& got, const std::string& expected,
                const std::set<std::string>& symbols) {
  return parse_expression(got, symbols) == parse_expression(expected, symbols);
}

void criterion(int number, const std::string& label, bool pass) {
  std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", number, label.c_str());
  if (!pass) ++g_failures;
}

std::string doc(const std::string& name) { return g_corpus + "/" + name; }

const std::set<std::string> xyz = {"x", "y", "z"};

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance <soliton-forge binary> <corpus dir>\n";
    return 2;
  }
  g_bin = argv[1];
  g_corpus = argv[2];

  try {
    {  // 1: hyperbolic eta-Ricci, exact symbolic lambda = mu = -1
      json j = run_json("solve ricci " + doc("hyperbolic.man"));
      const json& c = check_of(j, "eta-ricci-solve");
      criterion(1, "hyperbolic eta-Ricci: lambda = -1, mu = -1 (symbolic)",
                c.at("verdict") == "certified-symbolic" && wit(c, "lambda") == "-1" &&
                    wit(c, "mu") == "-1");
    }
    {  // 2: hyperbolic eta-Yamabe, lambda = -7, mu = -1, scal = -6
      json j = run_json("solve yamabe " + doc("hyperbolic.man"));
      const json& c = check_of(j, "eta-yamabe-solve");
      criterion(2, "hyperbolic eta-Yamabe: lambda = -7, mu = -1, scal = -6",
                c.at("verdict") == "certified-symbolic" && wit(c, "lambda") == "-7" &&
                    wit(c, "mu") == "-1" && wit(c, "scal") == "-6");
    }
    {  // 3: lorentzian almost eta-Ricci + frame Ricci values
      json j = run_json("solve ricci " + doc("lorentz.man"));
      const json& c = check_of(j, "eta-ricci-solve");
      bool solve_ok = certified(c) && expr_equal(wit(c, "lambda"), "1-e^(2*z)", xyz) &&
                      expr_equal(wit(c, "mu"), "-1-e^(2*z)", xyz);
      json jc = run_json("curvature " + doc("lorentz.man") + " --frame E");
      const json& fr = check_of(jc, "frame-ricci-values");
      bool frame_ok = certified(fr) &&
                      expr_equal(wit(fr, "Ric(E1,E1)"), "2-e^(2*z)", xyz) &&
                      expr_equal(wit(fr, "Ric(E2,E2)"), "2-e^(2*z)", xyz) &&
                      expr_equal(wit(fr, "Ric(E3,E3)"), "-2", xyz);
      criterion(3, "lorentzian eta-Ricci: lambda = 1-e^{2z}, mu = -1-e^{2z}, frame Ricci",
                solve_ok && frame_ok);
    }
    {  // 4: lorentzian almost eta-Yamabe
      json j = run_json("solve yamabe " + doc("lorentz.man"));
      const json& c = check_of(j, "eta-yamabe-solve");
      criterion(4, "lorentzian eta-Yamabe: lambda = 7-2e^{2z}, mu = -1, scal = 2(3-e^{2z})",
                certified(c) && expr_equal(wit(c, "lambda"), "7-2*e^(2*z)", xyz) &&
                    wit(c, "mu") == "-1" && expr_equal(wit(c, "scal"), "2*(3-e^(2*z))", xyz));
    }
    {  // 5: gradient certificates on both documents
      json jh = run_json("check gradient " + doc("hyperbolic.man"));
      json jl = run_json("check gradient " + doc("lorentz.man"));
      const json& ch = check_of(jh, "gradient-potential");
      const json& cl = check_of(jl, "gradient-potential");
      criterion(5, "gradient certificates: V = grad(-ln z) and V = grad(-z)",
                ch.at("verdict") == "certified-symbolic" &&
                    cl.at("verdict") == "certified-symbolic");
    }
    {  // 6: concurrent position field in two charts
      json je = run_json("verify all " + doc("euclidean3.man") + " --vector P");
      json js = run_json("verify all " + doc("spherical3.man") + " --vector P");
      bool ok = true;
      for (const json* j : {&je, &js}) {
        const json& cls = check_of(*j, "torse-forming-decomposition");
        const json& sol = check_of(*j, "eta-ricci-solve");
        ok = ok && certified(cls) && wit(cls, "class") == "concurrent" && certified(sol) &&
             wit(sol, "lambda") == "1" && wit(sol, "sign") == "shrinking";
      }
      criterion(6, "position field: concurrent, lambda = 1 shrinking, both charts agree", ok);
    }
    {  // 7: curvature property suite on every corpus document
      const std::vector<std::string> docs = {
          "hyperbolic.man",   "lorentz.man",       "euclidean3.man",  "spherical3.man",
          "e3_flat.man",      "e4_flat.man",       "s3_round.man",    "plane_in_e3.man",
          "sphere2_in_e3.man", "latitude_pi6.man", "latitude_pi4.man", "latitude_pi2.man",
          "torqued_twisted.man", "perturbed_hyperbolic.man"};
      bool ok = true;
      for (const auto& d : docs) {
        json j = run_json("curvature " + doc(d));
        for (const char* id :
             {"metric-compatibility", "christoffel-torsion-free", "riemann-antisymmetry-12",
              "riemann-antisymmetry-34", "riemann-pair-symmetry", "first-bianchi",
              "ricci-symmetry", "contracted-second-bianchi"}) {
          if (!certified(check_of(j, id))) {
            std::fprintf(stderr, "  curvature %s fails on %s\n", id, d.c_str());
            ok = false;
          }
        }
        const json& fd = check_of(j, "fd-christoffel-oracle");
        if (!certified(fd) || wit(fd, "points") != "16") {
          std::fprintf(stderr, "  fd oracle fails on %s\n", d.c_str());
          ok = false;
        }
      }
      criterion(7, "curvature property suite + 16-point fd oracle on every corpus document", ok);
    }
    {  // 8: Gauss-equation suite with exact scalar agreement
      struct Case {
        std::string file, flags;
      };
      const std::vector<Case> cases = {{"sphere2_in_e3.man", ""},
                                       {"plane_in_e3.man", " --ambient-vector E3"},
                                       {"latitude_pi6.man", " --ambient-vector XI"},
                                       {"latitude_pi4.man", " --ambient-vector XI"},
                                       {"latitude_pi2.man", " --ambient-vector XI"}};
      bool ok = true;
      for (const auto& tc : cases) {
        json j = run_json("hypersurface " + doc(tc.file) + tc.flags);
        for (const char* id : {"gauss-ricci", "ricci-structure-rhoH",
                               "ricci-constant-curvature-form", "yamabe-structure-rhoH",
                               "yamabe-constant-curvature-form"})
          if (!certified(check_of(j, id))) {
            std::fprintf(stderr, "  %s fails on %s\n", id, tc.file.c_str());
            ok = false;
          }
        // intrinsic and extrinsic scalar curvature agree exactly
        if (check_of(j, "gauss-scal").at("verdict") != "certified-symbolic") {
          std::fprintf(stderr, "  gauss-scal not exact on %s\n", tc.file.c_str());
          ok = false;
        }
      }
      criterion(8, "Gauss suite on S^2, plane, and three latitude spheres (scal exact)", ok);
    }
    {  // 9: ThmB machinery with coherent lambda and identical mu flags
      bool ok = true;
      for (const std::string d : {"latitude_pi6.man", "latitude_pi4.man", "latitude_pi2.man"}) {
        json j = run_json("sphere-hypersurface " + doc(d));
        for (const char* id : {"sphere-recur1", "sphere-nablaU", "sphere-LieU",
                               "thmb-ricci-coherence"})
          if (!certified(check_of(j, id))) {
            std::fprintf(stderr, "  %s fails on %s\n", id, d.c_str());
            ok = false;
          }
        const json& a = check_of(j, "thmb-ricci-solve");
        const json& b = check_of(j, "direct-ricci-solve");
        if (!(wit(a, "mu") == "undetermined" && wit(b, "mu") == "undetermined")) {
          std::fprintf(stderr, "  mu flags differ on %s\n", d.c_str());
          ok = false;
        }
      }
      criterion(9, "ThmB: recur1/nablaU/LieU certify; lambda coherent; mu flags identical", ok);
    }
    {  // 10: yamabe identity suite
      json jh = run_json("verify identities " + doc("hyperbolic.man"));
      json jl = run_json("verify identities " + doc("lorentz.man"));
      json je = run_json("verify identities " + doc("euclidean3.man"));
      const json& e1h = check_of(jh, "yamabe-e1");
      const json& e1l = check_of(jl, "yamabe-e1");
      const json& muz = check_of(je, "yamabe-mu-zero-lambda-formula");
      criterion(10, "(e1) on both paper yamabe examples; mu = 0 formula on a concircular one",
                certified(e1h) && certified(e1l) && certified(muz));
    }
    {  // 11: negative control and byte-identical determinism
      RunResult neg = run_cli("solve ricci " + doc("perturbed_hyperbolic.man") + " --format json");
      json j = json::parse(neg.output);
      const json& c = check_of(j, "eta-ricci-solve");
      bool neg_ok = neg.exit_code == 1 && c.at("verdict") == "failed" &&
                    c.contains("residual") &&
                    std::stod(c.at("residual").at("max_abs").get<std::string>()) > 0;
      RunResult a = run_cli("verify all " + doc("hyperbolic.man") + " --format json");
      RunResult b = run_cli("verify all " + doc("hyperbolic.man") + " --format json");
      criterion(11, "perturbed metric fails with nonzero exit; reports byte-identical",
                neg_ok && a.output == b.output && !a.output.empty());
    }
  } catch (const std::exception& e) {
    std::cerr << "acceptance harness error: " << e.what() << "\n";
    return 2;
  }

  if (g_failures == 0)
    std::printf("all 11 acceptance criteria passed\n");
  else
    std::printf("%d acceptance criteria FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
