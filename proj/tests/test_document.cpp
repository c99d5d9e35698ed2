#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "sforge/commands.hpp"
#include "sforge/document.hpp"
#include "sforge/parse.hpp"

#include <fstream>
#include <sstream>

using namespace sforge;

namespace {

const ZeroTestConfig cfg;

std::string read_file(const std::string& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string corpus(const std::string& name) { return std::string(CORPUS_DIR) + "/" + name; }

}  // namespace

TEST_CASE("bundled hyperbolic document parses fully") {
  ManifoldDocument doc = parse_document(read_file(corpus("hyperbolic.man")));
  CHECK(doc.name == "hyperbolic");
  CHECK(doc.chart->dim() == 3);
  CHECK(doc.chart->coords == std::vector<std::string>{"x", "y", "z"});
  REQUIRE(doc.chart->constraints.size() == 1);
  CHECK(doc.chart->constraints[0].symbol == "z");
  CHECK(doc.metric_components[0][0] == parse_expression("1/z^2", {"z"}));
  REQUIRE(doc.find_vector("V"));
  CHECK((*doc.find_vector("V"))[2] == parse_expression("-z", {"z"}));
  REQUIRE(doc.find_form("eta"));
  CHECK((*doc.find_form("eta"))[2] == parse_expression("-1/z", {"z"}));
  REQUIRE(doc.find_function("f"));
  REQUIRE(doc.find_frame("E"));
  CHECK(doc.find_frame("E")->size() == 3);
}

TEST_CASE("lorentz document validates with lorentzian signature") {
  LoadedDocument doc = load_document(corpus("lorentz.man"), cfg);
  CHECK(doc.metric.signature() == Signature::Lorentzian);
}

TEST_CASE("diagnostics carry positions") {
  // asymmetric metric rejected
  std::string bad =
      "manifold bad\ncoords x y\nmetric:\n  g[1,1] = 1\n  g[2,2] = 1\n  g[1,2] = x\n  g[2,1] = "
      "y\n";
  try {
    parse_document(bad);
    FAIL("expected rejection");
  } catch (const DocError& e) {
    CHECK(e.line == 7);
    CHECK(std::string(e.what()).find("asymmetric") != std::string::npos);
  }

  // unknown identifier in an expression
  std::string unk = "manifold bad\ncoords x y\nmetric:\n  g[1,1] = 1\n  g[2,2] = w\n";
  try {
    parse_document(unk);
    FAIL("expected rejection");
  } catch (const DocError& e) {
    CHECK(e.line == 5);
    CHECK(std::string(e.what()).find("w") != std::string::npos);
  }

  // duplicate declaration
  std::string dup =
      "manifold bad\ncoords x y\nmetric:\n  g[1,1] = 1\n  g[2,2] = 1\nvector V = d/dx\nvector V "
      "= d/dy\n";
  CHECK_THROWS_AS(parse_document(dup), DocError);

  // nonlinearity in basis tokens
  std::string nl =
      "manifold bad\ncoords x y\nmetric:\n  g[1,1] = 1\n  g[2,2] = 1\nvector V = d/dx * d/dx\n";
  try {
    parse_document(nl);
    FAIL("expected rejection");
  } catch (const DocError& e) {
    CHECK(std::string(e.what()).find("linear") != std::string::npos);
  }

  // missing metric
  CHECK_THROWS_AS(parse_document("manifold m\ncoords x y\n"), DocError);
}

TEST_CASE("document emit/parse stabilizes after one cycle") {
  for (const std::string name :
       {"hyperbolic.man", "lorentz.man", "euclidean3.man", "spherical3.man", "s3_round.man",
        "latitude_pi6.man", "torqued_twisted.man", "sphere2_in_e3.man"}) {
    CAPTURE(name);
    ManifoldDocument d1 = parse_document(read_file(corpus(name)));
    std::string e1 = emit_document(d1);
    ManifoldDocument d2 = parse_document(e1);
    std::string e2 = emit_document(d2);
    CHECK(e1 == e2);
  }
}

TEST_CASE("immersion chains load recursively with digests") {
  LoadedDocument lat = load_document(corpus("latitude_pi6.man"), cfg);
  REQUIRE(lat.target);
  CHECK(lat.target->doc.name == "s3_round");
  REQUIRE(lat.target->target);
  CHECK(lat.target->target->doc.name == "e4_flat");
  CHECK(lat.input_digest.size() == 64);

  // digest covers dependencies: it differs from the digest of the file alone
  LoadedDocument e4 = load_document(corpus("e4_flat.man"), cfg);
  CHECK(e4.input_digest != lat.input_digest);
}

TEST_CASE("basis token encoding does not capture identifier substrings") {
  // a vector named with a coordinate-like suffix must not be rewritten
  std::string text =
      "manifold ok\ncoords x dxlike\nmetric:\n  g[1,1] = 1\n  g[2,2] = 1\nvector V = dxlike * "
      "d/dx\n";
  ManifoldDocument doc = parse_document(text);
  CHECK((*doc.find_vector("V"))[0] == sym("dxlike"));
}

TEST_CASE("run_command reports missing named objects") {
  LoadedDocument doc = load_document_text(
      "manifold m\ncoords x y\nmetric:\n  g[1,1] = 1\n  g[2,2] = 1\n", "inline", cfg);
  CommandOptions opt;
  CHECK_THROWS_WITH_AS(run_command(doc, "solve-ricci", opt), doctest::Contains("no vector"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(run_command(doc, "hypersurface", opt),
                       doctest::Contains("no immersion"), std::runtime_error);
}
