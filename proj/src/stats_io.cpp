#include "stats_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "errors.hpp"
#include "json.hpp"

namespace epkit::io {

namespace {

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

std::uint64_t parse_count(const std::string& tok, const std::string& where) {
  if (tok.empty() || tok[0] == '-') throw io_error(where + ": expected a positive integer");
  std::uint64_t v = 0;
  for (char c : tok) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw io_error(where + ": expected a positive integer, got '" + tok + "'");
    }
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string stats_to_json(const partition::PartitionStats& stats) {
  stats.check();
  std::string out = "{\"n\":" + std::to_string(stats.n) + ",\"k\":" + std::to_string(stats.k) +
                    ",\"s\":{";
  bool first = true;
  for (const auto& [j, c] : stats.sizes) {
    if (!first) out += ",";
    first = false;
    out += "\"" + std::to_string(j) + "\":" + std::to_string(c);
  }
  out += "}}";
  return out;
}

partition::PartitionStats stats_from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("stats json: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("n") || !doc.contains("k") || !doc.contains("s") ||
      !doc["s"].is_object()) {
    throw io_error("stats json: expected {\"n\":..., \"k\":..., \"s\":{...}}");
  }
  partition::PartitionStats st;
  try {
    st.n = doc["n"].get<std::uint64_t>();
    st.k = doc["k"].get<std::uint64_t>();
    std::map<std::uint64_t, std::uint64_t> sizes;
    for (const auto& [key, value] : doc["s"].items()) {
      sizes[parse_count(key, "stats json size key")] = value.get<std::uint64_t>();
    }
    st.sizes.assign(sizes.begin(), sizes.end());
  } catch (const nlohmann::json::exception& e) {
    throw io_error(std::string("stats json: ") + e.what());
  }
  st.check();
  return st;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw io_error("short write to " + path);
}

partition::PartitionStats read_stats_json(const std::string& path) {
  return stats_from_json_text(read_text_file(path));
}

partition::PartitionStats read_blocks_file(const std::string& path) {
  std::istringstream in(read_text_file(path));
  std::vector<std::uint64_t> sizes;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = tokens(strip_comment(line));
    if (toks.empty()) continue;
    if (toks.size() != 1) {
      throw io_error(path + ":" + std::to_string(lineno) + ": expected one class size");
    }
    sizes.push_back(parse_count(toks[0], path + ":" + std::to_string(lineno)));
  }
  if (sizes.empty()) throw io_error(path + ": no class sizes found");
  return partition::stats_from_blocks(sizes);
}

partition::PartitionStats read_edges_file(const std::string& path, bool allow_multi) {
  std::istringstream in(read_text_file(path));
  std::map<std::string, std::uint64_t> degree;
  std::set<std::pair<std::string, std::string>> seen;
  std::string line;
  std::size_t lineno = 0;
  std::uint64_t edges = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = tokens(strip_comment(line));
    if (toks.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    if (toks.size() != 2) throw io_error(where + ": expected 'u v'");
    const std::string& u = toks[0];
    const std::string& v = toks[1];
    if (!allow_multi) {
      if (u == v) throw io_error(where + ": self-loop '" + u + "' in simple mode");
      auto key = u < v ? std::make_pair(u, v) : std::make_pair(v, u);
      if (!seen.insert(std::move(key)).second) {
        throw io_error(where + ": duplicate edge '" + u + " " + v + "' in simple mode");
      }
    }
    degree[u] += 1;
    degree[v] += 1;
    ++edges;
  }
  if (edges == 0) throw io_error(path + ": no edges found");
  std::vector<std::uint64_t> degrees;
  degrees.reserve(degree.size());
  for (const auto& [vertex, d] : degree) degrees.push_back(d);
  return partition::stats_from_degrees(degrees);
}

}  // namespace epkit::io
