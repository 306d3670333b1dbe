#pragma once

#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyncut/graph.hpp"

namespace dyncut {

/// Edge update against the top-level graph.
struct UpdateOp {
  enum class Kind { Insert, Delete };
  Kind kind = Kind::Insert;
  Vertex u = 0;
  Vertex v = 0;
};

inline UpdateOp insert_op(Vertex u, Vertex v) {
  return {UpdateOp::Kind::Insert, u, v};
}
inline UpdateOp delete_op(Vertex u, Vertex v) {
  return {UpdateOp::Kind::Delete, u, v};
}

inline void apply_op(DynamicGraph& g, const UpdateOp& op) {
  if (op.kind == UpdateOp::Kind::Insert)
    g.insert_edge(op.u, op.v);
  else
    g.delete_edge(op.u, op.v);
}

/// One line of an update stream: an edge op or a query marker.
struct StreamItem {
  std::optional<UpdateOp> op;  // empty means "?"
};

struct ParseError : std::runtime_error {
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_number(line) {}
  int line_number;
};

/// Text format: header "n m" followed by m lines "u v" (0-based).
inline DynamicGraph read_graph(std::istream& in) {
  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::size_t i = line.find_first_not_of(" \t");
      if (i == std::string::npos || line[i] == '#') continue;
      return true;
    }
    return false;
  };
  if (!next_line()) throw ParseError(line_no, "missing header");
  std::istringstream hdr(line);
  long long n = 0, m = 0;
  if (!(hdr >> n >> m) || n < 0 || m < 0)
    throw ParseError(line_no, "bad header, expected \"n m\"");
  DynamicGraph g(static_cast<int>(n));
  for (long long e = 0; e < m; ++e) {
    if (!next_line()) throw ParseError(line_no, "unexpected end of edge list");
    std::istringstream es(line);
    Vertex u, v;
    if (!(es >> u >> v)) throw ParseError(line_no, "bad edge line");
    try {
      g.insert_edge(u, v);
    } catch (const std::invalid_argument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return g;
}

inline void write_graph(std::ostream& out, const DynamicGraph& g) {
  Count plain = 0;  // self-loops are internal only and never serialized
  for (Vertex u = 0; u < g.capacity(); ++u)
    if (g.is_live(u))
      for (const auto& [v, mult] : g.neighbors(u))
        if (u < v) plain += mult;
  out << g.capacity() << ' ' << plain << '\n';
  for (Vertex u = 0; u < g.capacity(); ++u) {
    if (!g.is_live(u)) continue;
    for (const auto& [v, mult] : g.neighbors(u))
      if (u < v)
        for (Count i = 0; i < mult; ++i) out << u << ' ' << v << '\n';
  }
}

/// Update stream: lines "+ u v", "- u v", "?".
inline std::vector<StreamItem> read_stream(std::istream& in) {
  std::vector<StreamItem> items;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t i = line.find_first_not_of(" \t");
    if (i == std::string::npos || line[i] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "?") {
      items.push_back({std::nullopt});
      continue;
    }
    Vertex u, v;
    if (!(ls >> u >> v)) throw ParseError(line_no, "bad update line");
    if (tag == "+")
      items.push_back({insert_op(u, v)});
    else if (tag == "-")
      items.push_back({delete_op(u, v)});
    else
      throw ParseError(line_no, "unknown op \"" + tag + "\"");
  }
  return items;
}

}  // namespace dyncut
