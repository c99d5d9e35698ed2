#ifndef SFORGE_DOCUMENT_HPP
#define SFORGE_DOCUMENT_HPP

#include "sforge/geometry.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sforge {

struct DocError : std::runtime_error {
  int line;  // 1-based; 0 when not tied to a line
  int column;
  DocError(int line_, int column_, const std::string& msg)
      : std::runtime_error(msg), line(line_), column(column_) {}
};

/// One manifold description file: a chart, exactly one metric block, named
/// fields, and an optional immersion into another document.
struct ManifoldDocument {
  std::string name;
  ChartPtr chart;
  Mat metric_components;
  std::vector<std::pair<std::string, Vec>> vectors;
  std::vector<std::pair<std::string, Vec>> forms;
  std::vector<std::pair<std::string, Expr>> functions;
  std::vector<std::pair<std::string, Mat>> tensors;
  std::vector<std::pair<std::string, std::vector<std::string>>> frames;
  std::optional<std::string> immersion_target;  // path as written in the file
  Vec immersion_map;

  const Vec* find_vector(const std::string& n) const;
  const Vec* find_form(const std::string& n) const;
  const Expr* find_function(const std::string& n) const;
  const Mat* find_tensor(const std::string& n) const;
  const std::vector<std::string>* find_frame(const std::string& n) const;
};

ManifoldDocument parse_document(const std::string& text);
std::string emit_document(const ManifoldDocument& doc);

/// A parsed document with its validated metric and the recursively loaded
/// immersion chain. input_digest covers this file and every dependency in
/// load order.
struct LoadedDocument {
  std::string path;
  ManifoldDocument doc;
  Metric metric;
  std::shared_ptr<LoadedDocument> target;  // immersion target when present
  std::string input_digest;
};

LoadedDocument load_document(const std::string& path, const ZeroTestConfig& cfg);
LoadedDocument load_document_text(const std::string& text, const std::string& path_hint,
                                  const ZeroTestConfig& cfg);

}  // namespace sforge

#endif
