#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <openssl/evp.h>

#include "corrnet/correlation.hpp"
#include "corrnet/csv.hpp"
#include "corrnet/error.hpp"
#include "corrnet/ingest.hpp"
#include "corrnet/netgraph.hpp"
#include "corrnet/returns.hpp"
#include "corrnet/similarity.hpp"

namespace corrnet::io {

inline constexpr int kCorrelationDigits = 9;
inline constexpr int kJaccardDecimals = 6;

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw Error(ErrorKind::Io, "error while reading " + path.string());
  return buf.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::Io, "error while writing " + path.string());
}

inline std::string sha256_hex(std::string_view content) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(content.data(), content.size(), digest, &length, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorKind::Io, "sha256 failed");
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int k = 0; k < length; ++k) {
    out.push_back(hex[digest[k] >> 4]);
    out.push_back(hex[digest[k] & 0xF]);
  }
  return out;
}

inline std::string format_optional(const std::optional<double>& v, int digits = kCorrelationDigits) {
  return v ? csv::format_significant(*v, digits) : std::string{};
}

/// Threshold as written in file names and tables ("0.3", "-0.5").
inline std::string format_theta(double theta) { return csv::format_significant(theta, 6); }

// ---------------------------------------------------------------- tables

/// Header plus data rows of a plain CSV table.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline Table parse_table(std::string_view content) {
  Table t;
  bool first = true;
  std::size_t line_no = 0;
  for (auto line : csv::lines(content)) {
    ++line_no;
    if (csv::trim(line).empty()) continue;
    auto fields = csv::split(line);
    if (!fields) throw Error(ErrorKind::MalformedRow, "unbalanced quotes", line_no);
    if (first) {
      t.header = std::move(*fields);
      first = false;
    } else {
      if (fields->size() != t.header.size())
        throw Error(ErrorKind::MalformedRow, "field count differs from header", line_no);
      t.rows.push_back(std::move(*fields));
    }
  }
  if (first) throw Error(ErrorKind::EmptyFile, "no header row");
  return t;
}

// ---------------------------------------------------------------- prices

inline std::string prices_wide_csv(const PricePanel& panel) {
  std::string out = "date";
  for (const auto& id : panel.instruments) out += "," + csv::quote_if_needed(id.label);
  out += '\n';
  for (std::size_t r = 0; r < panel.rows(); ++r) {
    out += panel.dates[r].to_string();
    for (std::size_t c = 0; c < panel.cols(); ++c) {
      out += ',';
      out += csv::format_significant(panel.closes(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)), 12);
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------- returns

inline std::string volatility_csv(const std::vector<VolatilityReport>& reports) {
  std::string out = "window,instrument,v\n";
  for (const auto& r : reports) {
    const std::string w = csv::quote_if_needed(r.window_label);
    for (const auto& [id, v] : r.per_index)
      out += w + "," + csv::quote_if_needed(id.label) + "," + csv::format_significant(v, kCorrelationDigits) + "\n";
    out += w + ",__MEAN__," + csv::format_significant(r.cross_sectional_mean, kCorrelationDigits) + "\n";
  }
  return out;
}

// ---------------------------------------------------------------- correlation

inline std::string correlation_csv(const CorrelationMatrix& corr) {
  std::string out;
  for (const auto& id : corr.instruments) out += "," + csv::quote_if_needed(id.label);
  out += '\n';
  for (std::size_t i = 0; i < corr.size(); ++i) {
    out += csv::quote_if_needed(corr.instruments[i].label);
    for (std::size_t j = 0; j < corr.size(); ++j) out += "," + csv::format_significant(corr(i, j), kCorrelationDigits);
    out += '\n';
  }
  return out;
}

/// Reads back a matrix written by correlation_csv. Checks squareness,
/// label agreement, symmetry and range.
inline CorrelationMatrix parse_correlation_csv(std::string_view content, std::string window_label) {
  Table t = parse_table(content);
  const std::size_t n = t.header.size() - 1;
  if (n < 1 || t.rows.size() != n) throw Error(ErrorKind::MalformedRow, "correlation matrix must be square");
  CorrelationMatrix corr;
  corr.window_label = std::move(window_label);
  corr.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    std::string label(csv::trim(t.header[i + 1]));
    if (std::string(csv::trim(t.rows[i][0])) != label)
      throw Error(ErrorKind::MalformedRow, "row label '" + t.rows[i][0] + "' differs from column label", i + 2);
    corr.instruments.emplace_back(label);
    for (std::size_t j = 0; j < n; ++j) {
      auto v = csv::parse_double(t.rows[i][j + 1]);
      if (!v || *v < -1.0 - 1e-9 || *v > 1.0 + 1e-9)
        throw Error(ErrorKind::MalformedRow, "correlation entry out of range", i + 2);
      corr.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = std::clamp(*v, -1.0, 1.0);
    }
  }
  if (!(corr.values.array() == corr.values.transpose().array()).all())
    throw Error(ErrorKind::MalformedRow, "correlation matrix is not symmetric");
  return corr;
}

inline std::string mean_correlation_csv(const std::vector<std::pair<std::string, double>>& means) {
  std::string out = "window,mean\n";
  for (const auto& [w, m] : means)
    out += csv::quote_if_needed(w) + "," + csv::format_significant(m, kCorrelationDigits) + "\n";
  return out;
}

// ---------------------------------------------------------------- networks

inline std::string metrics_header() { return "window,theta,N,M,density,path_length,clustering,convention\n"; }

inline std::string metrics_row(const WindowReport& r) {
  return csv::quote_if_needed(r.window_label) + "," + format_theta(r.theta) + "," + std::to_string(r.cluster_size) +
         "," + std::to_string(r.edge_count) + "," + format_optional(r.density) + "," +
         format_optional(r.path_length) + "," + csv::format_significant(r.clustering, kCorrelationDigits) + "," +
         std::string(to_string(r.density_convention)) + "\n";
}

inline std::string metrics_csv(const std::vector<WindowReport>& reports) {
  std::string out = metrics_header();
  for (const auto& r : reports) out += metrics_row(r);
  return out;
}

namespace detail {

inline std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// Reads one double-quoted DOT identifier starting at `pos`; advances `pos`.
inline std::optional<std::string> read_dot_id(std::string_view line, std::size_t& pos) {
  while (pos < line.size() && line[pos] == ' ') ++pos;
  if (pos >= line.size() || line[pos] != '"') return std::nullopt;
  std::string out;
  for (++pos; pos < line.size(); ++pos) {
    if (line[pos] == '\\' && pos + 1 < line.size()) out.push_back(line[++pos]);
    else if (line[pos] == '"') {
      ++pos;
      return out;
    } else out.push_back(line[pos]);
  }
  return std::nullopt;
}

}  // namespace detail

/// Graphviz rendering of a cluster: one node statement per instrument, one
/// edge statement per link with its correlation as `weight`.
inline std::string to_dot(const Cluster& cluster) {
  const Graph& g = cluster.graph;
  std::string out = "graph " + detail::dot_quote(cluster.window_label) + " {\n";
  out += "  // theta=" + format_theta(cluster.theta) + "\n";
  for (std::size_t u = 0; u < g.node_count(); ++u) out += "  " + detail::dot_quote(g.label(u).label) + ";\n";
  for (const auto& e : g.edges())
    out += "  " + detail::dot_quote(g.label(e.u).label) + " -- " + detail::dot_quote(g.label(e.v).label) +
           " [weight=" + csv::format_significant(e.weight, kCorrelationDigits) + "];\n";
  out += "}\n";
  return out;
}

/// Parses the DOT subset written by to_dot.
inline Cluster parse_dot(std::string_view content, std::string window_label) {
  std::vector<InstrumentId> labels;
  std::map<std::string, std::size_t> index;
  std::vector<WeightedEdge> edges;
  double theta = 0.0;
  auto node = [&](const std::string& label) {
    auto [it, inserted] = index.emplace(label, labels.size());
    if (inserted) labels.emplace_back(label);
    return it->second;
  };
  std::size_t line_no = 0;
  bool opened = false;
  for (auto raw : csv::lines(content)) {
    ++line_no;
    auto line = csv::trim(raw);
    if (line.empty() || line == "}") continue;
    if (!opened) {
      if (line.substr(0, 6) != "graph ") throw Error(ErrorKind::MalformedRow, "expected 'graph' header", line_no);
      opened = true;
      continue;
    }
    if (line.substr(0, 9) == "// theta=") {
      auto v = csv::parse_double(line.substr(9));
      if (v) theta = *v;
      continue;
    }
    std::size_t pos = 0;
    auto first = detail::read_dot_id(line, pos);
    if (!first) throw Error(ErrorKind::MalformedRow, "expected quoted node id", line_no);
    auto rest = csv::trim(line.substr(pos));
    if (rest == ";") {
      node(*first);
      continue;
    }
    if (rest.substr(0, 2) != "--") throw Error(ErrorKind::MalformedRow, "expected '--'", line_no);
    pos = line.size() - rest.size() + 2;
    auto second = detail::read_dot_id(line, pos);
    if (!second) throw Error(ErrorKind::MalformedRow, "expected quoted node id", line_no);
    auto attrs = csv::trim(line.substr(pos));
    double weight = 0.0;
    const std::string_view key = "[weight=";
    if (attrs.substr(0, key.size()) == key) {
      auto close = attrs.find(']');
      auto v = close == std::string_view::npos ? std::nullopt : csv::parse_double(attrs.substr(key.size(), close - key.size()));
      if (!v) throw Error(ErrorKind::MalformedRow, "bad weight attribute", line_no);
      weight = *v;
    }
    std::size_t u = node(*first);
    std::size_t v = node(*second);
    edges.push_back({u, v, weight});
  }
  if (!opened) throw Error(ErrorKind::EmptyFile, "no graph in DOT input");
  return Cluster{std::move(window_label), theta, Graph(std::move(labels), std::move(edges))};
}

inline std::string to_graphml(const Cluster& cluster) {
  const Graph& g = cluster.graph;
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      "  <key id=\"label\" for=\"node\" attr.name=\"label\" attr.type=\"string\"/>\n"
      "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" attr.type=\"double\"/>\n"
      "  <graph id=\"" + detail::xml_escape(cluster.window_label) + "\" edgedefault=\"undirected\">\n";
  for (std::size_t u = 0; u < g.node_count(); ++u)
    out += "    <node id=\"n" + std::to_string(u) + "\"><data key=\"label\">" + detail::xml_escape(g.label(u).label) +
           "</data></node>\n";
  for (std::size_t k = 0; k < g.edges().size(); ++k) {
    const auto& e = g.edges()[k];
    out += "    <edge id=\"e" + std::to_string(k) + "\" source=\"n" + std::to_string(e.u) + "\" target=\"n" +
           std::to_string(e.v) + "\"><data key=\"weight\">" +
           csv::format_significant(e.weight, kCorrelationDigits) + "</data></edge>\n";
  }
  out += "  </graph>\n</graphml>\n";
  return out;
}

// ---------------------------------------------------------------- similarity

inline std::string jaccard_csv(const SimilarityMatrix& sim) {
  std::string out;
  for (const auto& w : sim.window_labels) out += "," + csv::quote_if_needed(w);
  out += '\n';
  for (std::size_t a = 0; a < sim.size(); ++a) {
    out += csv::quote_if_needed(sim.window_labels[a]);
    for (std::size_t b = 0; b < sim.size(); ++b) {
      out += ',';
      if (sim(a, b)) out += csv::format_fixed(*sim(a, b), kJaccardDecimals);
    }
    out += '\n';
  }
  return out;
}

inline std::string regime_flags_txt(const std::vector<RegimeFlag>& flags) {
  std::string out;
  for (const auto& f : flags) out += f.window_label + " " + csv::format_fixed(f.adjacent_similarity, kJaccardDecimals) + "\n";
  return out;
}

}  // namespace corrnet::io
