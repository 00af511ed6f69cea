#pragma once

// Plain-text hypergraph format:
//
//   # comment
//   nodes=143          (optional; otherwise N = 1 + largest id)
//   0 1
//   1 2 3
//
// One hyperedge per line, whitespace-separated 0-based node ids.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "hbcm/hypergraph.hpp"

namespace hbcm {

class format_error : public std::runtime_error {
 public:
  format_error(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

struct LoadResult {
  Hypergraph hypergraph;
  std::size_t skipped_small = 0;       // lines with fewer than two distinct nodes
  std::size_t skipped_duplicates = 0;  // repeats of an earlier hyperedge
};

inline LoadResult parse_hypergraph(std::istream& in) {
  std::optional<std::size_t> declared;
  std::vector<Hyperedge> edges;
  std::unordered_set<Hyperedge, HyperedgeHash> seen;
  std::size_t skipped_small = 0, skipped_dup = 0, line_no = 0;
  node_id max_id = 0;
  bool any = false;

  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv(line);
    auto first = sv.find_first_not_of(" \t\r");
    if (first == std::string_view::npos || sv[first] == '#') continue;
    sv.remove_prefix(first);
    if (sv.starts_with("nodes=")) {
      if (declared || any) throw format_error(line_no, "'nodes=' header must precede all hyperedges");
      std::size_t n = 0;
      auto body = sv.substr(6);
      while (!body.empty() && (body.back() == ' ' || body.back() == '\r' || body.back() == '\t'))
        body.remove_suffix(1);
      auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), n);
      if (ec != std::errc{} || p != body.data() + body.size() || n == 0)
        throw format_error(line_no, "malformed node count");
      declared = n;
      continue;
    }

    std::vector<node_id> ids;
    std::size_t pos = 0;
    while (pos < sv.size()) {
      while (pos < sv.size() && (sv[pos] == ' ' || sv[pos] == '\t' || sv[pos] == '\r')) ++pos;
      if (pos >= sv.size()) break;
      std::size_t end = pos;
      while (end < sv.size() && sv[end] != ' ' && sv[end] != '\t' && sv[end] != '\r') ++end;
      node_id v = 0;
      auto [p, ec] = std::from_chars(sv.data() + pos, sv.data() + end, v);
      if (ec != std::errc{} || p != sv.data() + end)
        throw format_error(line_no, "malformed node id '" + std::string(sv.substr(pos, end - pos)) + "'");
      if (declared && v >= *declared)
        throw format_error(line_no, "node id " + std::to_string(v) + " out of range [0, " +
                                        std::to_string(*declared) + ")");
      ids.push_back(v);
      pos = end;
    }
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.size() < 2) {
      ++skipped_small;
      continue;
    }
    max_id = std::max(max_id, ids.back());
    any = true;
    auto e = Hyperedge::from_canonical(std::move(ids));
    if (!seen.insert(e).second) {
      ++skipped_dup;
      continue;
    }
    edges.push_back(std::move(e));
  }
  std::size_t n = declared ? *declared : (any ? static_cast<std::size_t>(max_id) + 1 : 0);
  if (n < 2) throw format_error(line_no, "hypergraph has fewer than two nodes");
  return {Hypergraph::from_edges(n, std::move(edges)), skipped_small, skipped_dup};
}

inline LoadResult load_hypergraph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return parse_hypergraph(in);
}

inline void write_hypergraph(const Hypergraph& h, std::ostream& out) {
  if (!h.is_explicit()) throw std::logic_error("only explicit hypergraphs can be saved");
  out << "nodes=" << h.node_count() << '\n';
  for (std::size_t i = 0; i < h.explicit_edge_count(); ++i) {
    auto e = h.edge(i);
    for (std::size_t j = 0; j < e.size(); ++j) out << (j ? " " : "") << e[j];
    out << '\n';
  }
}

inline void save_hypergraph(const Hypergraph& h, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_hypergraph(h, out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace hbcm
