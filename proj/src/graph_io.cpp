#include "treeflow/graph_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "treeflow/error.hpp"

namespace treeflow {

MetricGraph parse_graph_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::GraphFormat, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("vertices") || !doc.contains("edges")) {
    throw Error(ErrorCode::GraphFormat, "expected an object with \"vertices\" and \"edges\"");
  }
  if (!doc["vertices"].is_number_integer()) throw Error(ErrorCode::GraphFormat, "\"vertices\" must be an integer");
  if (!doc["edges"].is_array()) throw Error(ErrorCode::GraphFormat, "\"edges\" must be an array");

  int n = doc["vertices"].get<int>();
  std::vector<Edge> edges;
  bool inexact = false;
  for (const auto& e : doc["edges"]) {
    if (!e.is_object() || !e.contains("from") || !e.contains("to") || !e.contains("len")) {
      throw Error(ErrorCode::GraphFormat, "each edge needs \"from\", \"to\" and \"len\"");
    }
    if (!e["from"].is_number_integer() || !e["to"].is_number_integer()) {
      throw Error(ErrorCode::GraphFormat, "edge endpoints must be integers");
    }
    std::string len_text;
    if (e["len"].is_string()) {
      len_text = e["len"].get<std::string>();
    } else if (e["len"].is_number_integer()) {
      len_text = std::to_string(e["len"].get<long long>());
    } else if (e["len"].is_number()) {
      // Raw JSON floats lose their spelling; re-serialize the shortest form.
      len_text = e["len"].dump();
    } else {
      throw Error(ErrorCode::GraphFormat, "edge length must be a string or number");
    }
    ParsedLength len;
    try {
      len = parse_rational(len_text);
    } catch (const Error& err) {
      throw Error(ErrorCode::GraphFormat, "bad length '" + len_text + "'");
    }
    inexact = inexact || len.decimal;
    edges.push_back({e["from"].get<int>(), e["to"].get<int>(), len.value});
  }
  return MetricGraph(n, std::move(edges), inexact);
}

MetricGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::GraphFormat, "cannot open graph file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_graph_json(buf.str());
}

std::string graph_summary(const MetricGraph& g) {
  std::ostringstream out;
  out << "vertices=" << g.num_vertices() << " edges=" << g.num_edges() << " rank=" << g.rank()
      << (g.inexact() ? " mode=inexact" : " mode=exact") << "\n";
  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& edge = g.edges()[e];
    out << "  " << g.edge_name(2 * e) << ": " << edge.from << " -> " << edge.to << " len=" << to_string(edge.length)
        << "\n";
  }
  return out.str();
}

}  // namespace treeflow
