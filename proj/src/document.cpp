#include "sforge/document.hpp"

#include "sforge/parse.hpp"
#include "sforge/report.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace sforge {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& s) {
  std::size_t h = s.find('#');
  return h == std::string::npos ? s : s.substr(0, h);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string w;
  while (is >> w) out.push_back(w);
  return out;
}

bool valid_ident(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

// replaces basis tokens (d/dx for vectors, dx for forms) with reserved
// symbols the expression parser can digest
std::string encode_basis_tokens(const std::string& text, const std::vector<std::string>& coords,
                                bool vector_basis) {
  std::string out = text;
  for (const std::string& c : coords) {
    std::string token = vector_basis ? "d/d" + c : "d" + c;
    std::string repl = (vector_basis ? "dvecbasis_" : "dformbasis_") + c;
    std::size_t pos = 0;
    while ((pos = out.find(token, pos)) != std::string::npos) {
      bool left_ok = pos == 0 || (!std::isalnum(static_cast<unsigned char>(out[pos - 1])) &&
                                  out[pos - 1] != '_');
      std::size_t end = pos + token.size();
      bool right_ok = end >= out.size() || (!std::isalnum(static_cast<unsigned char>(out[end])) &&
                                            out[end] != '_');
      if (left_ok && right_ok) {
        out = out.substr(0, pos) + repl + out.substr(end);
        pos += repl.size();
      } else {
        pos += 1;
      }
    }
  }
  return out;
}

Vec extract_components(const std::string& rhs, const Chart& chart, bool vector_basis, int line) {
  std::string encoded = encode_basis_tokens(rhs, chart.coords, vector_basis);
  std::set<std::string> allowed(chart.coords.begin(), chart.coords.end());
  allowed.insert(chart.params.begin(), chart.params.end());
  std::vector<std::string> tokens;
  for (const std::string& c : chart.coords) {
    tokens.push_back((vector_basis ? "dvecbasis_" : "dformbasis_") + c);
    allowed.insert(tokens.back());
  }
  Expr e;
  try {
    e = parse_expression(encoded, allowed);
  } catch (const ParseError& pe) {
    throw DocError(line, static_cast<int>(pe.position) + 1, pe.what());
  }
  int n = chart.dim();
  Vec comps(n, num(0));
  std::map<std::string, Expr> zeros;
  for (const std::string& t : tokens) zeros[t] = num(0);
  for (int i = 0; i < n; ++i) {
    Expr coeff = differentiate(e, tokens[i]);
    for (const std::string& t : tokens) {
      std::set<std::string> fs = free_symbols(coeff);
      if (fs.count(t))
        throw DocError(line, 1, "component expression must be linear in the basis fields");
    }
    comps[i] = simplify(substitute(coeff, zeros));
  }
  Expr rest = simplify(substitute(e, zeros));
  if (!rest.is_zero())
    throw DocError(line, 1,
                   "component expression has a part without any basis field: " + to_string(rest));
  return comps;
}

struct IndexedEntry {
  int i, j, line;
  Expr value;
};

}  // namespace

const Vec* ManifoldDocument::find_vector(const std::string& n) const {
  for (const auto& [k, v] : vectors)
    if (k == n) return &v;
  return nullptr;
}
const Vec* ManifoldDocument::find_form(const std::string& n) const {
  for (const auto& [k, v] : forms)
    if (k == n) return &v;
  return nullptr;
}
const Expr* ManifoldDocument::find_function(const std::string& n) const {
  for (const auto& [k, v] : functions)
    if (k == n) return &v;
  return nullptr;
}
const Mat* ManifoldDocument::find_tensor(const std::string& n) const {
  for (const auto& [k, v] : tensors)
    if (k == n) return &v;
  return nullptr;
}
const std::vector<std::string>* ManifoldDocument::find_frame(const std::string& n) const {
  for (const auto& [k, v] : frames)
    if (k == n) return &v;
  return nullptr;
}

ManifoldDocument parse_document(const std::string& text) {
  ManifoldDocument doc;
  auto chart = std::make_shared<Chart>();
  std::vector<std::string> lines;
  {
    std::istringstream is(text);
    std::string l;
    while (std::getline(is, l)) lines.push_back(l);
  }

  std::set<std::string> declared_names;
  auto declare = [&](const std::string& n, int line) {
    if (!valid_ident(n)) throw DocError(line, 1, "invalid identifier '" + n + "'");
    if (n.rfind("dvecbasis_", 0) == 0 || n.rfind("dformbasis_", 0) == 0)
      throw DocError(line, 1, "identifier prefix is reserved: '" + n + "'");
    if (!declared_names.insert(n).second)
      throw DocError(line, 1, "duplicate declaration of '" + n + "'");
  };

  bool have_coords = false;
  bool have_metric = false;
  std::vector<IndexedEntry> metric_entries;

  std::set<std::string> allowed;  // coords + params for scalar expressions
  auto parse_scalar = [&](const std::string& s, int line) {
    try {
      return parse_expression(s, allowed);
    } catch (const ParseError& pe) {
      throw DocError(line, static_cast<int>(pe.position) + 1, pe.what());
    }
  };

  // block state: after "metric:", "tensor NAME:puis" or "immersion into PATH:"
  enum class Block { None, Metric, Tensor, Immersion };
  Block block = Block::None;
  std::string block_name;
  std::vector<IndexedEntry> tensor_entries;
  std::map<int, std::pair<Expr, int>> immersion_entries;  // index -> (expr, line)

  auto parse_indexed = [&](const std::string& body, const std::string& expected_name,
                           int line) -> std::optional<IndexedEntry> {
    // NAME[i,j] = expr
    std::size_t br = body.find('[');
    if (br == std::string::npos) return std::nullopt;
    std::string nm = trim(body.substr(0, br));
    if (nm != expected_name) return std::nullopt;
    std::size_t close = body.find(']', br);
    std::size_t eq = body.find('=', br);
    if (close == std::string::npos || eq == std::string::npos || eq < close)
      throw DocError(line, static_cast<int>(br) + 1, "malformed indexed entry");
    std::string idx = body.substr(br + 1, close - br - 1);
    std::size_t comma = idx.find(',');
    if (comma == std::string::npos) throw DocError(line, 1, "expected two indices");
    int i = 0, j = 0;
    try {
      i = std::stoi(trim(idx.substr(0, comma)));
      j = std::stoi(trim(idx.substr(comma + 1)));
    } catch (...) {
      throw DocError(line, 1, "indices must be integers");
    }
    if (i < 1 || j < 1 || i > chart->dim() || j > chart->dim())
      throw DocError(line, 1, "index out of range for dimension " +
                                  std::to_string(chart->dim()));
    Expr v = parse_scalar(trim(body.substr(eq + 1)), line);
    return IndexedEntry{i - 1, j - 1, line, v};
  };

  auto flush_tensor = [&]() {
    if (block != Block::Tensor) return;
    int n = chart->dim();
    Mat t = zero_mat(n);
    std::vector<std::vector<int>> seen(n, std::vector<int>(n, 0));
    for (const auto& e : tensor_entries) {
      if (seen[e.i][e.j] && !(t[e.i][e.j] == e.value))
        throw DocError(e.line, 1, "conflicting entries for " + block_name + "[" +
                                      std::to_string(e.i + 1) + "," + std::to_string(e.j + 1) +
                                      "]");
      if (seen[e.j][e.i] && !(t[e.j][e.i] == e.value))
        throw DocError(e.line, 1, block_name + " must be symmetric: entry (" +
                                      std::to_string(e.i + 1) + "," + std::to_string(e.j + 1) +
                                      ") disagrees with its mirror");
      t[e.i][e.j] = e.value;
      t[e.j][e.i] = e.value;
      seen[e.i][e.j] = seen[e.j][e.i] = 1;
    }
    doc.tensors.push_back({block_name, t});
    tensor_entries.clear();
  };

  for (std::size_t li = 0; li < lines.size(); ++li) {
    int lineno = static_cast<int>(li) + 1;
    std::string raw = trim(strip_comment(lines[li]));
    if (raw.empty()) continue;

    // block continuation: lines that match the block grammar extend it, the
    // first line that does not closes it
    if (block == Block::Metric) {
      std::size_t br = raw.find('[');
      if (br != std::string::npos && trim(raw.substr(0, br)) == "g") {
        auto e = parse_indexed(raw, "g", lineno);
        if (e) {
          metric_entries.push_back(*e);
          continue;
        }
      }
      block = Block::None;
    } else if (block == Block::Tensor) {
      std::size_t br = raw.find('[');
      if (br != std::string::npos && trim(raw.substr(0, br)) == block_name) {
        auto e = parse_indexed(raw, block_name, lineno);
        if (e) {
          tensor_entries.push_back(*e);
          continue;
        }
      }
      flush_tensor();
      block = Block::None;
    } else if (block == Block::Immersion) {
      std::size_t br = raw.find('[');
      if (br != std::string::npos && trim(raw.substr(0, br)) == "phi") {
        std::size_t close = raw.find(']', br);
        std::size_t eq = raw.find('=', br);
        if (close == std::string::npos || eq == std::string::npos)
          throw DocError(lineno, 1, "malformed phi entry");
        int k = 0;
        try {
          k = std::stoi(trim(raw.substr(br + 1, close - br - 1)));
        } catch (...) {
          throw DocError(lineno, 1, "phi index must be an integer");
        }
        if (k < 1) throw DocError(lineno, 1, "phi index must be positive");
        Expr v = parse_scalar(trim(raw.substr(eq + 1)), lineno);
        if (immersion_entries.count(k - 1))
          throw DocError(lineno, 1, "duplicate phi[" + std::to_string(k) + "]");
        immersion_entries[k - 1] = {v, lineno};
        continue;
      }
      block = Block::None;
    }

    std::vector<std::string> words = split_ws(raw);
    const std::string& head = words[0];

    if (head == "manifold") {
      if (words.size() != 2) throw DocError(lineno, 1, "expected: manifold NAME");
      if (!doc.name.empty()) throw DocError(lineno, 1, "duplicate manifold header");
      doc.name = words[1];
      chart->name = words[1];
    } else if (head == "coords") {
      if (have_coords) throw DocError(lineno, 1, "duplicate coords declaration");
      if (words.size() < 3) throw DocError(lineno, 1, "a chart needs at least two coordinates");
      for (std::size_t k = 1; k < words.size(); ++k) {
        declare(words[k], lineno);
        chart->coords.push_back(words[k]);
        allowed.insert(words[k]);
      }
      have_coords = true;
    } else if (head == "param") {
      if (words.size() < 2) throw DocError(lineno, 1, "expected: param NAME...");
      for (std::size_t k = 1; k < words.size(); ++k) {
        declare(words[k], lineno);
        chart->params.push_back(words[k]);
        allowed.insert(words[k]);
      }
    } else if (head == "assume") {
      // assume SYM (<|>|!=) EXPR
      if (words.size() < 4) throw DocError(lineno, 1, "expected: assume SYM (<|>|!=) EXPR");
      const std::string& symname = words[1];
      if (!allowed.count(symname))
        throw DocError(lineno, 1, "constraint on undeclared symbol '" + symname + "'");
      DomainConstraint::Rel rel;
      if (words[2] == ">")
        rel = DomainConstraint::Rel::Greater;
      else if (words[2] == "<")
        rel = DomainConstraint::Rel::Less;
      else if (words[2] == "!=")
        rel = DomainConstraint::Rel::NonZero;
      else
        throw DocError(lineno, 1, "unknown relation '" + words[2] + "'");
      std::string rest;
      for (std::size_t k = 3; k < words.size(); ++k) rest += words[k];
      chart->constraints.push_back({symname, rel, parse_scalar(rest, lineno)});
    } else if (head == "metric:") {
      if (!have_coords) throw DocError(lineno, 1, "metric before coords");
      if (have_metric) throw DocError(lineno, 1, "duplicate metric block");
      have_metric = true;
      block = Block::Metric;
    } else if (head == "vector" || head == "form" || head == "function") {
      if (!have_coords) throw DocError(lineno, 1, head + " before coords");
      std::size_t eq = raw.find('=');
      if (eq == std::string::npos || words.size() < 2)
        throw DocError(lineno, 1, "expected: " + head + " NAME = EXPR");
      std::string nm = words[1];
      declare(nm, lineno);
      std::string rhs = trim(raw.substr(eq + 1));
      if (head == "vector")
        doc.vectors.push_back({nm, extract_components(rhs, *chart, true, lineno)});
      else if (head == "form")
        doc.forms.push_back({nm, extract_components(rhs, *chart, false, lineno)});
      else
        doc.functions.push_back({nm, parse_scalar(rhs, lineno)});
    } else if (head == "tensor") {
      if (!have_coords) throw DocError(lineno, 1, "tensor before coords");
      if (words.size() != 2 || words[1].back() != ':')
        throw DocError(lineno, 1, "expected: tensor NAME:");
      block_name = words[1].substr(0, words[1].size() - 1);
      declare(block_name, lineno);
      block = Block::Tensor;
    } else if (head == "frame") {
      std::size_t eq = raw.find('=');
      if (eq == std::string::npos || words.size() < 4)
        throw DocError(lineno, 1, "expected: frame NAME = V1 V2 ...");
      std::string nm = words[1];
      declare(nm, lineno);
      std::vector<std::string> members = split_ws(raw.substr(eq + 1));
      doc.frames.push_back({nm, members});
    } else if (head == "immersion") {
      if (words.size() < 3 || words[1] != "into" || raw.back() != ':')
        throw DocError(lineno, 1, "expected: immersion into PATH:");
      if (doc.immersion_target)
        throw DocError(lineno, 1, "duplicate immersion block");
      std::string path = trim(raw.substr(raw.find("into") + 4));
      path = trim(path.substr(0, path.size() - 1));
      doc.immersion_target = path;
      block = Block::Immersion;
    } else {
      throw DocError(lineno, 1, "unknown directive '" + head + "'");
    }
  }
  flush_tensor();

  if (doc.name.empty()) throw DocError(0, 0, "missing manifold header");
  if (!have_coords) throw DocError(0, 0, "missing coords declaration");
  if (!have_metric) throw DocError(0, 0, "missing metric block");

  int n = chart->dim();
  doc.metric_components = zero_mat(n);
  std::vector<std::vector<int>> seen(n, std::vector<int>(n, 0));
  for (const auto& e : metric_entries) {
    if ((seen[e.i][e.j] || seen[e.j][e.i]) && !(doc.metric_components[e.i][e.j] == e.value))
      throw DocError(e.line, 1,
                     "metric entry (" + std::to_string(e.i + 1) + "," + std::to_string(e.j + 1) +
                         ") conflicts with an earlier entry (asymmetric or duplicate)");
    doc.metric_components[e.i][e.j] = e.value;
    doc.metric_components[e.j][e.i] = e.value;
    seen[e.i][e.j] = seen[e.j][e.i] = 1;
  }

  if (doc.immersion_target) {
    if (immersion_entries.empty()) throw DocError(0, 0, "immersion block has no phi entries");
    int maxk = immersion_entries.rbegin()->first;
    doc.immersion_map.assign(maxk + 1, num(0));
    for (int k = 0; k <= maxk; ++k) {
      auto it = immersion_entries.find(k);
      if (it == immersion_entries.end())
        throw DocError(0, 0, "missing phi[" + std::to_string(k + 1) + "] in immersion block");
      doc.immersion_map[k] = it->second.first;
    }
  }

  // frames resolve against declared vectors
  for (const auto& [fname, members] : doc.frames) {
    for (const std::string& v : members)
      if (!doc.find_vector(v))
        throw DocError(0, 0, "frame '" + fname + "' references unknown vector '" + v + "'");
    if (static_cast<int>(members.size()) != n)
      throw DocError(0, 0, "frame '" + fname + "' must have exactly " + std::to_string(n) +
                               " members");
  }

  chart->validate();
  doc.chart = chart;
  return doc;
}

namespace {

std::string rel_name(DomainConstraint::Rel r) {
  switch (r) {
    case DomainConstraint::Rel::Greater: return ">";
    case DomainConstraint::Rel::Less: return "<";
    case DomainConstraint::Rel::NonZero: return "!=";
  }
  return "?";
}

std::string emit_components(const Vec& comps, const Chart& chart, bool vector_basis) {
  std::string out;
  bool first = true;
  for (int i = 0; i < chart.dim(); ++i) {
    if (comps[i].is_zero()) continue;
    std::string basis = (vector_basis ? "d/d" : "d") + chart.coords[i];
    if (!first) out += " + ";
    out += "(" + to_string(comps[i]) + ")*" + basis;
    first = false;
  }
  if (first) out = "0*" + std::string(vector_basis ? "d/d" : "d") + chart.coords[0];
  return out;
}

}  // namespace

std::string emit_document(const ManifoldDocument& doc) {
  std::ostringstream os;
  const Chart& c = *doc.chart;
  os << "manifold " << doc.name << "\n";
  os << "coords";
  for (const auto& s : c.coords) os << " " << s;
  os << "\n";
  if (!c.params.empty()) {
    os << "param";
    for (const auto& s : c.params) os << " " << s;
    os << "\n";
  }
  for (const auto& a : c.constraints)
    os << "assume " << a.symbol << " " << rel_name(a.rel) << " " << to_string(a.bound) << "\n";
  os << "metric:\n";
  for (int i = 0; i < c.dim(); ++i)
    for (int j = i; j < c.dim(); ++j)
      if (!doc.metric_components[i][j].is_zero())
        os << "  g[" << i + 1 << "," << j + 1
           << "] = " << to_string(doc.metric_components[i][j]) << "\n";
  for (const auto& [n, v] : doc.vectors)
    os << "vector " << n << " = " << emit_components(v, c, true) << "\n";
  for (const auto& [n, v] : doc.forms)
    os << "form " << n << " = " << emit_components(v, c, false) << "\n";
  for (const auto& [n, f] : doc.functions)
    os << "function " << n << " = " << to_string(f) << "\n";
  for (const auto& [n, t] : doc.tensors) {
    os << "tensor " << n << ":\n";
    for (int i = 0; i < c.dim(); ++i)
      for (int j = i; j < c.dim(); ++j)
        if (!t[i][j].is_zero())
          os << "  " << n << "[" << i + 1 << "," << j + 1 << "] = " << to_string(t[i][j]) << "\n";
  }
  for (const auto& [n, members] : doc.frames) {
    os << "frame " << n << " =";
    for (const auto& m : members) os << " " << m;
    os << "\n";
  }
  if (doc.immersion_target) {
    os << "immersion into " << *doc.immersion_target << ":\n";
    for (std::size_t k = 0; k < doc.immersion_map.size(); ++k)
      os << "  phi[" << k + 1 << "] = " << to_string(doc.immersion_map[k]) << "\n";
  }
  return os.str();
}

namespace {

std::string dir_of(const std::string& path) {
  std::size_t sl = path.find_last_of('/');
  return sl == std::string::npos ? "" : path.substr(0, sl + 1);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LoadedDocument load_recursive(const std::string& path, const std::string& text,
                              const ZeroTestConfig& cfg, std::vector<std::string>& stack,
                              std::string& digest_stream) {
  for (const auto& p : stack)
    if (p == path) throw std::runtime_error("immersion chain cycle through '" + path + "'");
  stack.push_back(path);
  digest_stream += text;
  LoadedDocument out;
  out.path = path;
  try {
    out.doc = parse_document(text);
  } catch (const DocError& e) {
    throw std::runtime_error(path + ":" + std::to_string(e.line) + ":" +
                             std::to_string(e.column) + ": " + e.what());
  }
  out.metric = Metric::build(out.doc.chart, out.doc.metric_components, cfg);
  if (out.doc.immersion_target) {
    std::string tpath = *out.doc.immersion_target;
    if (!tpath.empty() && tpath[0] != '/') tpath = dir_of(path) + tpath;
    std::string ttext = read_file(tpath);
    out.target = std::make_shared<LoadedDocument>(
        load_recursive(tpath, ttext, cfg, stack, digest_stream));
    if (static_cast<int>(out.doc.immersion_map.size()) != out.target->metric.dim())
      throw std::runtime_error(path + ": immersion map has " +
                               std::to_string(out.doc.immersion_map.size()) +
                               " components, target dimension is " +
                               std::to_string(out.target->metric.dim()));
    // map expressions must parse against the source chart, already ensured;
    // ambient symbols may not leak in
    for (const Expr& comp : out.doc.immersion_map)
      for (const std::string& s : free_symbols(comp)) {
        const auto order = out.doc.chart->symbol_order();
        if (std::find(order.begin(), order.end(), s) == order.end())
          throw std::runtime_error(path + ": immersion component uses unknown symbol '" + s +
                                   "'");
      }
  }
  stack.pop_back();
  return out;
}

}  // namespace

LoadedDocument load_document(const std::string& path, const ZeroTestConfig& cfg) {
  std::vector<std::string> stack;
  std::string digest_stream;
  LoadedDocument out = load_recursive(path, read_file(path), cfg, stack, digest_stream);
  out.input_digest = sha256_hex(digest_stream);
  return out;
}

LoadedDocument load_document_text(const std::string& text, const std::string& path_hint,
                                  const ZeroTestConfig& cfg) {
  std::vector<std::string> stack;
  std::string digest_stream;
  LoadedDocument out = load_recursive(path_hint, text, cfg, stack, digest_stream);
  out.input_digest = sha256_hex(digest_stream);
  return out;
}

}  // namespace sforge
