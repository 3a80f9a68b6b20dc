#include "treeflow/tree.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "treeflow/error.hpp"

namespace treeflow {

namespace {

// Edge sequence of a point: path, plus the partially covered edge.
EdgePath sequence_of(const TreePoint& p) {
  EdgePath s = p.path;
  if (!p.is_vertex()) s.push_back(p.edge);
  return s;
}

Rational arc_position(const MetricGraph& g, const TreePoint& p) {
  return path_length(g, p.path) + p.offset;
}

bool starts_with(std::span<const int> s, std::span<const int> prefix) {
  return s.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), s.begin());
}

// Smallest p dividing n with period[i] == period[i % p].
EdgePath primitive_root(const EdgePath& period) {
  std::size_t n = period.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p != 0) continue;
    bool ok = true;
    for (std::size_t i = p; i < n && ok; ++i) ok = period[i] == period[i - p];
    if (ok) return EdgePath(period.begin(), period.begin() + static_cast<std::ptrdiff_t>(p));
  }
  return period;
}

// Index of the first edge where two ends differ; nullopt if they agree on
// every edge both of them know.
std::optional<std::size_t> divergence(const End& a, const End& b) {
  std::size_t limit;
  if (a.truncated || b.truncated) {
    limit = std::min(a.truncated ? a.prefix.size() : SIZE_MAX, b.truncated ? b.prefix.size() : SIZE_MAX);
  } else {
    limit = std::max(a.prefix.size(), b.prefix.size()) + a.period.size() * b.period.size() + 1;
  }
  for (std::size_t i = 0; i < limit; ++i) {
    if (a.edge_at(i) != b.edge_at(i)) return i;
  }
  return std::nullopt;
}

struct EndProfile {
  std::size_t common = 0;  // edges shared with the end
  Rational shared_length = 0;
};

// Common prefix of a point sequence with the ray of an end.
EndProfile profile(const MetricGraph& g, const End& xi, const EdgePath& seq) {
  EndProfile out;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (xi.truncated && i >= xi.prefix.size()) {
      throw Error(ErrorCode::InsufficientDepth,
                  "truncated end of depth " + std::to_string(xi.prefix.size()) + " cannot resolve the point");
    }
    if (seq[i] != xi.edge_at(i)) break;
    ++out.common;
    out.shared_length += g.length(seq[i]);
  }
  return out;
}

// b_xi(x, root).
Rational busemann_to_root(const MetricGraph& g, const End& xi, const TreePoint& x) {
  EdgePath seq = sequence_of(x);
  EndProfile pr = profile(g, xi, seq);
  Rational pos = arc_position(g, x);
  Rational m = std::min(pr.shared_length, pos);
  return pos - 2 * m;
}

// Point at arc position s along the ray of an end.
TreePoint point_on_end(const MetricGraph& g, const End& xi, const Rational& s) {
  EdgePath path;
  Rational walked = 0;
  for (std::size_t i = 0;; ++i) {
    if (xi.truncated && i >= xi.prefix.size()) {
      throw Error(ErrorCode::InsufficientDepth, "truncated end too short for requested point");
    }
    int d = xi.edge_at(i);
    if (walked == s) return vertex_at(path);
    if (walked + g.length(d) > s) return TreePoint{path, d, s - walked};
    walked += g.length(d);
    path.push_back(d);
  }
}

}  // namespace

TreePoint root_vertex() { return TreePoint{}; }

TreePoint vertex_at(EdgePath path) {
  TreePoint p;
  p.path = std::move(path);
  return p;
}

TreePoint make_point(const MetricGraph& g, const EdgePath& path, int edge, const Rational& offset) {
  if (offset < 0) throw Error(ErrorCode::InvalidArgument, "negative offset");
  if (offset == 0 || edge < 0) return vertex_at(path);
  const Rational& len = g.length(edge);
  if (offset > len) throw Error(ErrorCode::InvalidArgument, "offset exceeds edge length");
  if (offset == len) return vertex_at(concat_reduce(path, std::vector<int>{edge}));
  if (!path.empty() && path.back() == reverse_edge(edge)) {
    EdgePath shorter(path.begin(), path.end() - 1);
    return TreePoint{std::move(shorter), path.back(), len - offset};
  }
  return TreePoint{path, edge, offset};
}

int quotient_vertex(const MetricGraph& g, const TreePoint& vertex) {
  return vertex.path.empty() ? g.base_vertex() : g.head(vertex.path.back());
}

std::string point_str(const MetricGraph& g, const TreePoint& p) {
  std::string s = path_str(g, p.path);
  if (!p.is_vertex()) s += "+" + to_string(p.offset) + g.edge_name(p.edge);
  return s;
}

End make_periodic_end(EdgePath prefix, EdgePath period) {
  if (period.empty()) throw Error(ErrorCode::InvalidArgument, "end needs a nonempty period");
  EdgePath check = prefix;
  check.insert(check.end(), period.begin(), period.end());
  check.insert(check.end(), period.begin(), period.end());
  if (!is_reduced(check)) throw Error(ErrorCode::InvalidArgument, "end path backtracks");
  End e;
  e.period = primitive_root(period);
  e.prefix = std::move(prefix);
  while (!e.prefix.empty() && e.prefix.back() == e.period.back()) {
    e.prefix.pop_back();
    std::rotate(e.period.rbegin(), e.period.rbegin() + 1, e.period.rend());
  }
  return e;
}

End make_truncated_end(EdgePath path) {
  if (!is_reduced(path)) throw Error(ErrorCode::InvalidArgument, "end path backtracks");
  End e;
  e.prefix = std::move(path);
  e.truncated = true;
  return e;
}

End end_from(const EdgePath& start, const EdgePath& tail, const EdgePath& period) {
  if (period.empty()) throw Error(ErrorCode::InvalidArgument, "end needs a nonempty period");
  std::size_t copies = (start.size() + tail.size()) / period.size() + 2;
  EdgePath walk = tail;
  for (std::size_t i = 0; i < copies; ++i) walk.insert(walk.end(), period.begin(), period.end());
  EdgePath reduced = concat_reduce(start, walk);
  return make_periodic_end(std::move(reduced), period);
}

std::string end_str(const MetricGraph& g, const End& e) {
  if (e.truncated) return path_str(g, e.prefix) + "...";
  std::string s = e.prefix.empty() ? "" : path_str(g, e.prefix) + ":";
  return s + "(" + path_str(g, e.period) + ")";
}

TreePoint half_tree_head(const MetricGraph& g, const HalfTree& h) {
  (void)g;
  return vertex_at(concat_reduce(h.tail.path, std::vector<int>{h.edge}));
}

bool in_subtree(const MetricGraph& g, const HalfTree& h, const TreePoint& v) {
  (void)g;
  EdgePath seq = sequence_of(v);
  const EdgePath& u = h.tail.path;
  if (!u.empty() && u.back() == reverse_edge(h.edge)) return !starts_with(seq, u);
  EdgePath w = u;
  w.push_back(h.edge);
  return starts_with(seq, w);
}

bool half_trees_disjoint(const MetricGraph& g, const HalfTree& a, const HalfTree& b) {
  return !in_subtree(g, a, half_tree_head(g, b)) && !in_subtree(g, b, half_tree_head(g, a));
}

HalfTree reversed(const MetricGraph& g, const HalfTree& h) {
  return HalfTree{half_tree_head(g, h), reverse_edge(h.edge)};
}

End representative_end(const MetricGraph& g, const HalfTree& h) { return end_in_direction(g, h.tail, h.edge); }

bool end_in_half_tree(const MetricGraph& g, const HalfTree& h, const End& xi) {
  (void)g;
  const EdgePath& u = h.tail.path;
  bool toward_root = !u.empty() && u.back() == reverse_edge(h.edge);
  std::size_t need = toward_root ? u.size() : u.size() + 1;
  if (xi.truncated && xi.prefix.size() < need) {
    throw Error(ErrorCode::InsufficientDepth, "truncated end too short to locate");
  }
  bool shares_u = true;
  for (std::size_t i = 0; i < u.size() && shares_u; ++i) shares_u = xi.edge_at(i) == u[i];
  if (toward_root) return !shares_u;
  return shares_u && xi.edge_at(u.size()) == h.edge;
}

HalfTree cylinder_half_tree(const MetricGraph& g, const EndCylinder& c) {
  (void)g;
  if (c.path.empty()) throw Error(ErrorCode::InvalidArgument, "full boundary is not a half tree");
  EdgePath upto(c.path.begin(), c.path.end() - 1);
  return HalfTree{vertex_at(concat_reduce(c.anchor.path, upto)), c.path.back()};
}

std::string cylinder_str(const MetricGraph& g, const EndCylinder& c) {
  if (c.full_boundary()) return "boundary";
  return "[" + point_str(g, c.anchor) + "]" + path_str(g, c.path);
}

TreePoint act(const MetricGraph& g, const Word& gamma, const TreePoint& p) {
  EdgePath moved = concat_reduce(g.loop_of(gamma), p.path);
  if (p.is_vertex()) return vertex_at(std::move(moved));
  return make_point(g, moved, p.edge, p.offset);
}

End act(const MetricGraph& g, const Word& gamma, const End& xi) {
  EdgePath loop = g.loop_of(gamma);
  if (!xi.truncated) return end_from(loop, xi.prefix, xi.period);
  EdgePath moved = concat_reduce(loop, xi.prefix);
  std::size_t cancelled = (loop.size() + xi.prefix.size() - moved.size()) / 2;
  if (!xi.prefix.empty() && cancelled >= xi.prefix.size()) {
    throw Error(ErrorCode::InsufficientDepth, "truncated end consumed by translation");
  }
  return make_truncated_end(std::move(moved));
}

EndCylinder act(const MetricGraph& g, const Word& gamma, const EndCylinder& c) {
  return EndCylinder{act(g, gamma, c.anchor), c.path};
}

HalfTree act(const MetricGraph& g, const Word& gamma, const HalfTree& h) {
  return HalfTree{act(g, gamma, h.tail), h.edge};
}

Rational tree_distance(const MetricGraph& g, const TreePoint& x, const TreePoint& y) {
  EdgePath sx = sequence_of(x);
  EdgePath sy = sequence_of(y);
  std::size_t k = 0;
  while (k < std::min(sx.size(), sy.size()) && sx[k] == sy[k]) ++k;
  Rational shared = path_length(g, std::span<const int>(sx.data(), k));
  Rational px = arc_position(g, x);
  Rational py = arc_position(g, y);
  Rational m = std::min({shared, px, py});
  return px + py - 2 * m;
}

Rational busemann(const MetricGraph& g, const End& xi, const TreePoint& x, const TreePoint& y) {
  return busemann_to_root(g, xi, x) - busemann_to_root(g, xi, y);
}

std::optional<Rational> beta(const MetricGraph& g, const TreePoint& p, const End& xi, const End& eta) {
  auto split = divergence(xi, eta);
  if (!split) {
    if (xi.truncated || eta.truncated) {
      throw Error(ErrorCode::InsufficientDepth, "truncated ends agree on every known edge");
    }
    return std::nullopt;
  }
  EdgePath common(xi.prefix.begin(), xi.prefix.begin());
  for (std::size_t i = 0; i < *split; ++i) common.push_back(xi.edge_at(i));
  TreePoint o = vertex_at(std::move(common));
  return busemann(g, xi, o, p) + busemann(g, eta, o, p);
}

GeodesicLine::GeodesicLine(const MetricGraph& g, End from, End to)
    : g_(&g), from_(std::move(from)), to_(std::move(to)) {
  auto split = divergence(from_, to_);
  if (!split) throw Error(ErrorCode::InvalidArgument, "geodesic line needs distinct ends");
  branch_ = *split;
  EdgePath common;
  for (std::size_t i = 0; i < branch_; ++i) common.push_back(from_.edge_at(i));
  origin_ = vertex_at(std::move(common));
}

TreePoint GeodesicLine::at(const Rational& t) const {
  Rational base = arc_position(*g_, origin_);
  if (t <= 0) return point_on_end(*g_, from_, base - t);
  return point_on_end(*g_, to_, base + t);
}

Rational GeodesicLine::time_on_from_horosphere(const TreePoint& q) const {
  return -busemann(*g_, from_, origin_, q);
}

Rational GeodesicLine::time_on_to_horosphere(const TreePoint& q) const { return busemann(*g_, to_, origin_, q); }

Rational GeodesicLine::project(const TreePoint& p) const {
  return (busemann(*g_, to_, origin_, p) - busemann(*g_, from_, origin_, p)) / 2;
}

namespace {

struct LoopSplit {
  EdgePath conjugator;  // U
  EdgePath core;        // C, cyclically reduced
};

LoopSplit split_loop(const EdgePath& loop) {
  std::size_t lo = 0;
  std::size_t hi = loop.size();
  while (hi - lo >= 2 && loop[lo] == reverse_edge(loop[hi - 1])) {
    ++lo;
    --hi;
  }
  LoopSplit s;
  s.conjugator.assign(loop.begin(), loop.begin() + static_cast<std::ptrdiff_t>(lo));
  s.core.assign(loop.begin() + static_cast<std::ptrdiff_t>(lo), loop.begin() + static_cast<std::ptrdiff_t>(hi));
  return s;
}

}  // namespace

Rational translation_length(const MetricGraph& g, const Word& gamma) {
  return path_length(g, split_loop(g.loop_of(gamma)).core);
}

Axis axis_endpoints(const MetricGraph& g, const Word& gamma) {
  if (gamma.is_identity()) throw Error(ErrorCode::NotHyperbolic, "identity has no axis");
  LoopSplit s = split_loop(g.loop_of(gamma));
  return Axis{make_periodic_end(s.conjugator, reverse_path(s.core)), make_periodic_end(s.conjugator, s.core)};
}

End end_from_words(const MetricGraph& g, const Word& prefix, const Word& period) {
  return act(g, prefix, axis_endpoints(g, period).attracting);
}

End parse_end(const MetricGraph& g, const std::string& text) {
  auto open = text.find('(');
  auto close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open) {
    throw Error(ErrorCode::InvalidArgument, "end must look like prefix:(period), got '" + text + "'");
  }
  std::string head = text.substr(0, open);
  if (!head.empty() && head.back() == ':') head.pop_back();
  Word prefix = head.empty() ? Word() : Word::parse(head, g.rank());
  Word period = Word::parse(text.substr(open + 1, close - open - 1), g.rank());
  return end_from_words(g, prefix, period);
}

std::vector<GeodesicEdge> geodesic_edges(const MetricGraph& g, const TreePoint& x, const TreePoint& y) {
  EdgePath sx = sequence_of(x);
  EdgePath sy = sequence_of(y);
  std::size_t k = 0;
  Rational shared = 0;
  while (k < sx.size() && k < sy.size() && sx[k] == sy[k]) shared += g.length(sx[k++]);
  Rational px = arc_position(g, x);
  Rational py = arc_position(g, y);
  Rational m = std::min({shared, px, py});

  std::vector<GeodesicEdge> out;
  // Climb from x toward the root while above m.
  std::vector<Rational> cum(sx.size() + 1, Rational(0));
  for (std::size_t i = 0; i < sx.size(); ++i) cum[i + 1] = cum[i] + g.length(sx[i]);
  for (std::size_t i = sx.size(); i-- > 0;) {
    if (std::min(cum[i + 1], px) <= std::max(cum[i], m)) continue;
    EdgePath tail(sx.begin(), sx.begin() + static_cast<std::ptrdiff_t>(i + 1));
    out.push_back(GeodesicEdge{vertex_at(std::move(tail)), reverse_edge(sx[i]), px - cum[i]});
  }
  // Descend toward y.
  Rational up = px - m;
  Rational walked = 0;
  for (std::size_t i = 0; i < sy.size(); ++i) {
    Rational lo = walked;
    walked += g.length(sy[i]);
    if (std::min(walked, py) <= std::max(lo, m)) continue;
    EdgePath tail(sy.begin(), sy.begin() + static_cast<std::ptrdiff_t>(i));
    out.push_back(GeodesicEdge{vertex_at(std::move(tail)), sy[i], up + walked - m});
  }
  return out;
}

EndCylinder shadow(const MetricGraph& g, const TreePoint& x, const TreePoint& y, const Rational& r) {
  if (r <= 0) throw Error(ErrorCode::InvalidArgument, "shadow radius must be positive");
  Rational dist = tree_distance(g, x, y);
  if (dist < r) return EndCylinder{x, {}};
  auto edges = geodesic_edges(g, x, y);
  EndCylinder c;
  c.anchor = edges.front().tail;
  for (const auto& e : edges) {
    c.path.push_back(e.edge);
    if (e.far_distance > dist - r) break;
  }
  return c;
}

End end_in_direction(const MetricGraph& g, const TreePoint& from, int first) {
  if (!from.is_vertex()) throw Error(ErrorCode::InvalidArgument, "direction must leave a vertex");
  if (g.tail(first) != quotient_vertex(g, from)) {
    throw Error(ErrorCode::InvalidArgument, "edge does not leave the given vertex");
  }
  // Greedy non-backtracking walk; it is eventually periodic in the finite
  // set of directed edges.
  std::map<int, std::size_t> seen;
  EdgePath walk;
  int e = first;
  while (!seen.contains(e)) {
    seen[e] = walk.size();
    walk.push_back(e);
    int next = -1;
    for (int f : g.out_edges(g.head(e))) {
      if (f != reverse_edge(e)) {
        next = f;
        break;
      }
    }
    e = next;
  }
  std::size_t start = seen[e];
  EdgePath tail(walk.begin(), walk.begin() + static_cast<std::ptrdiff_t>(start));
  EdgePath period(walk.begin() + static_cast<std::ptrdiff_t>(start), walk.end());
  return end_from(from.path, tail, period);
}

}  // namespace treeflow
