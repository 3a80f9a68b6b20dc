#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "treeflow/graph.hpp"
#include "treeflow/rational.hpp"
#include "treeflow/word.hpp"

// Geometry of the universal cover X of a MetricGraph.
//
// Every vertex of X is addressed by the reduced edge path from the lifted
// base vertex (the "root"); the deck element of a lift of the base vertex
// is graph.word_of(path). Ends of X are infinite reduced paths from the
// root. All distances and Busemann values are exact rationals.
namespace treeflow {

// Point of X: the vertex at `path`, moved `offset` along the directed edge
// `edge` leaving it. Canonical form: offset == 0 iff edge == -1, and when
// offset > 0, path + edge is reduced (the edge points away from the root)
// and offset < length(edge).
struct TreePoint {
  EdgePath path;
  int edge = -1;
  Rational offset = 0;

  bool is_vertex() const { return edge < 0; }
  friend bool operator==(const TreePoint&, const TreePoint&) = default;
};

TreePoint root_vertex();
TreePoint vertex_at(EdgePath path);
// Walks `offset` >= 0 along directed edge `edge` from the vertex at `path`
// (which may backtrack toward the root) and returns the canonical point.
TreePoint make_point(const MetricGraph& g, const EdgePath& path, int edge, const Rational& offset);
// Quotient vertex under a tree vertex.
int quotient_vertex(const MetricGraph& g, const TreePoint& vertex);
std::string point_str(const MetricGraph& g, const TreePoint& p);

// End of X. Eventually periodic ends are prefix + period^infinity and are
// kept canonical (primitive period, shortest prefix), so == is equality of
// ends. A truncated end only knows its first prefix.size() edges.
struct End {
  EdgePath prefix;
  EdgePath period;
  bool truncated = false;

  bool exact() const { return !truncated; }
  // Number of known edges, or -1 if infinite.
  long known_depth() const { return truncated ? static_cast<long>(prefix.size()) : -1; }
  int edge_at(std::size_t i) const {
    return i < prefix.size() ? prefix[i] : period[(i - prefix.size()) % period.size()];
  }
  friend bool operator==(const End&, const End&) = default;
};

// Builds prefix . period^infinity; throws InvalidArgument if the infinite
// path backtracks.
End make_periodic_end(EdgePath prefix, EdgePath period);
End make_truncated_end(EdgePath path);
// The end reached from the vertex at `start` by following tail . period^inf
// (start + tail + period^inf must not backtrack after the start vertex).
End end_from(const EdgePath& start, const EdgePath& tail, const EdgePath& period);
std::string end_str(const MetricGraph& g, const End& e);

// Ends beyond a lifted directed edge: the ends whose ray from its tail
// vertex begins with the edge.
struct HalfTree {
  TreePoint tail;  // a vertex
  int edge = -1;
};

TreePoint half_tree_head(const MetricGraph& g, const HalfTree& h);
// Vertex membership in the subtree beyond the edge.
bool in_subtree(const MetricGraph& g, const HalfTree& h, const TreePoint& v);
bool half_trees_disjoint(const MetricGraph& g, const HalfTree& a, const HalfTree& b);
HalfTree reversed(const MetricGraph& g, const HalfTree& h);
// Some eventually periodic end inside the half tree (deterministic choice).
End representative_end(const MetricGraph& g, const HalfTree& h);
bool end_in_half_tree(const MetricGraph& g, const HalfTree& h, const End& xi);

// Ends whose ray from the vertex `anchor` starts with `path`. An empty path
// denotes the whole boundary.
struct EndCylinder {
  TreePoint anchor;
  EdgePath path;

  bool full_boundary() const { return path.empty(); }
  friend bool operator==(const EndCylinder&, const EndCylinder&) = default;
};

HalfTree cylinder_half_tree(const MetricGraph& g, const EndCylinder& c);
std::string cylinder_str(const MetricGraph& g, const EndCylinder& c);

// --- deck action ----------------------------------------------------------

TreePoint act(const MetricGraph& g, const Word& gamma, const TreePoint& p);
End act(const MetricGraph& g, const Word& gamma, const End& xi);
EndCylinder act(const MetricGraph& g, const Word& gamma, const EndCylinder& c);
HalfTree act(const MetricGraph& g, const Word& gamma, const HalfTree& h);

// --- metric functionals ---------------------------------------------------

Rational tree_distance(const MetricGraph& g, const TreePoint& x, const TreePoint& y);

// b_xi(x, y) = lim d(x, z) - d(y, z) as z -> xi. Throws InsufficientDepth
// when a truncated end is too short to locate the merge of the two rays.
Rational busemann(const MetricGraph& g, const End& xi, const TreePoint& x, const TreePoint& y);

// inf over x of (b_xi + b_eta)(x, p). nullopt encodes -infinity (xi == eta);
// otherwise the value is -2 d(p, [xi, eta]).
std::optional<Rational> beta(const MetricGraph& g, const TreePoint& p, const End& xi, const End& eta);

// The geodesic line from `from` to `to` (distinct ends), parametrized with
// b_from(line(t), line(0)) = t.
class GeodesicLine {
 public:
  GeodesicLine(const MetricGraph& g, End from, End to);

  const End& from() const { return from_; }
  const End& to() const { return to_; }
  TreePoint at(const Rational& t) const;
  // Parameter of the point on the line on the horosphere of `from` (resp.
  // `to`) through q.
  Rational time_on_from_horosphere(const TreePoint& q) const;
  Rational time_on_to_horosphere(const TreePoint& q) const;
  // Orthogonal projection of p onto the line, as a parameter.
  Rational project(const TreePoint& p) const;

 private:
  const MetricGraph* g_;
  End from_;
  End to_;
  std::size_t branch_ = 0;  // common prefix length of from and to
  TreePoint origin_;
};

Rational translation_length(const MetricGraph& g, const Word& gamma);

struct Axis {
  End repelling;   // gamma^-
  End attracting;  // gamma^+
};
Axis axis_endpoints(const MetricGraph& g, const Word& gamma);

// End given as prefix . (period)^+ for group words, e.g. a.(b)^infinity.
End end_from_words(const MetricGraph& g, const Word& prefix, const Word& period);
// Parses "prefix:(period)" or "(period)", e.g. "a:(b)" for a.b^infinity.
End parse_end(const MetricGraph& g, const std::string& text);

// Lifted edges crossed (fully or partly) by the geodesic [x, y], in order.
// `tail` is the vertex behind the edge in the direction of travel;
// `far_distance` is the distance from x to the edge's far endpoint.
struct GeodesicEdge {
  TreePoint tail;
  int edge = -1;
  Rational far_distance;
};
std::vector<GeodesicEdge> geodesic_edges(const MetricGraph& g, const TreePoint& x, const TreePoint& y);

// Exact r-shadow O_r(x, y). Returns a single cylinder; an empty-path
// cylinder means the whole boundary.
EndCylinder shadow(const MetricGraph& g, const TreePoint& x, const TreePoint& y, const Rational& r);

// End through the directed edge `first` leaving the vertex `from`.
End end_in_direction(const MetricGraph& g, const TreePoint& from, int first);

}  // namespace treeflow
