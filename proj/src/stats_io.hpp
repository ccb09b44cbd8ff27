#pragma once

#include <string>

#include "partition.hpp"

namespace epkit::io {

// {"n":7,"k":4,"s":{"1":2,"2":1,"3":1}} with size keys ascending.
std::string stats_to_json(const partition::PartitionStats& stats);
partition::PartitionStats stats_from_json_text(const std::string& text);

partition::PartitionStats read_stats_json(const std::string& path);

// One class size per line; blank lines and '#' comments are skipped.
partition::PartitionStats read_blocks_file(const std::string& path);

// Whitespace-separated "u v" per line, '#' starts a comment. Vertices are
// arbitrary tokens; the degree sequence becomes the size profile. Without
// allow_multi the graph must be simple: self-loops and repeated edges are
// rejected. With it, parallel edges accumulate and a self-loop adds two.
partition::PartitionStats read_edges_file(const std::string& path, bool allow_multi);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// printf "%.17g": every double round-trips and prints identically everywhere.
std::string format_double(double v);

}  // namespace epkit::io
