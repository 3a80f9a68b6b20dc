#pragma once

#include <string>

#include "treeflow/graph.hpp"

namespace treeflow {

// Graph file format:
//   {"vertices": N, "edges": [{"from": i, "to": j, "len": "p/q"}, ...]}
// Lengths are strings (or numbers) parsed exactly; any decimal length puts
// the graph in inexact mode. Malformed input throws GraphFormat; valence or
// connectivity problems throw ModelConstraint.
MetricGraph parse_graph_json(const std::string& text);
MetricGraph load_graph(const std::string& path);

std::string graph_summary(const MetricGraph& g);

}  // namespace treeflow
