#include "treeflow/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <functional>
#include <set>

#include "treeflow/crossratio.hpp"
#include "treeflow/dynamics.hpp"
#include "treeflow/error.hpp"
#include "treeflow/patterson.hpp"
#include "treeflow/quotient.hpp"
#include "treeflow/sampling.hpp"
#include "treeflow/tree.hpp"

namespace treeflow {

namespace {

using sample::Engine;

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6e", x);
  return buf;
}

struct Check {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first;

  template <class Describe>
  void expect(bool ok, Describe&& describe) {
    ++cases;
    if (ok) return;
    if (failures++ == 0) first = describe();
  }
};

class Suite {
 public:
  explicit Suite(std::string name) : name_(std::move(name)) {}
  Check& check(const std::string& name) {
    for (auto& c : checks_) {
      if (c.name == name) return c;
    }
    checks_.push_back(Check{name, 0, 0, {}});
    return checks_.back();
  }
  const std::string& name() const { return name_; }
  const std::deque<Check>& checks() const { return checks_; }

 private:
  std::string name_;
  std::deque<Check> checks_;  // stable references
};

struct Fixture {
  std::string name;
  MetricGraph graph;
};

std::vector<Fixture> graph_fixtures() {
  std::vector<Fixture> out;
  out.push_back({"rose(1,1)", make_rose({1, 1})});
  out.push_back({"rose(1,2)", make_rose({1, 2})});
  out.push_back({"theta(1,1/2,3/2)", MetricGraph(2, {{0, 1, 1}, {0, 1, Rational(1, 2)}, {0, 1, Rational(3, 2)}})});
  return out;
}

// Tree vertices within `radius` of p (p itself need not be a vertex).
std::vector<TreePoint> ball_vertices(const MetricGraph& g, const TreePoint& p, const Rational& radius) {
  std::vector<TreePoint> out;
  std::set<EdgePath> seen;
  std::vector<EdgePath> stack{p.path};
  if (!p.is_vertex()) stack.push_back(concat_reduce(p.path, std::vector<int>{p.edge}));
  while (!stack.empty()) {
    EdgePath path = std::move(stack.back());
    stack.pop_back();
    if (!seen.insert(path).second) continue;
    TreePoint v = vertex_at(path);
    if (tree_distance(g, p, v) > radius) continue;
    out.push_back(v);
    for (int f : g.out_edges(quotient_vertex(g, v))) stack.push_back(concat_reduce(path, std::vector<int>{f}));
  }
  return out;
}

std::string ends3(const MetricGraph& g, const End& a, const TreePoint& x, const TreePoint& y) {
  return "xi=" + end_str(g, a) + " x=" + point_str(g, x) + " y=" + point_str(g, y);
}

// --- graph_core --------------------------------------------------------------

void suite_graph_core(Suite& s, Engine& rng) {
  for (const auto& fx : graph_fixtures()) {
    const MetricGraph& g = fx.graph;
    auto tag = [&](const std::string& what) { return fx.name + " " + what; };

    Check& inv = s.check("edge_reversal");
    for (int d = 0; d < g.num_directed_edges(); ++d) {
      inv.expect(reverse_edge(reverse_edge(d)) == d && reverse_edge(d) != d && g.length(d) == g.length(reverse_edge(d)),
                 [&] { return tag("edge " + std::to_string(d)); });
    }

    Check& metric = s.check("metric_axioms");
    for (int i = 0; i < 100; ++i) {
      TreePoint x = sample::point(g, rng, 3);
      TreePoint y = sample::point(g, rng, 3);
      TreePoint z = sample::point(g, rng, 3);
      Rational dxy = tree_distance(g, x, y);
      bool ok = tree_distance(g, x, x) == 0 && dxy == tree_distance(g, y, x) && ((dxy == 0) == (x == y)) &&
                dxy <= tree_distance(g, x, z) + tree_distance(g, z, y);
      metric.expect(ok, [&] { return tag("x=" + point_str(g, x) + " y=" + point_str(g, y) + " z=" + point_str(g, z)); });
    }

    Check& lip = s.check("busemann_lipschitz");
    Check& cocycle = s.check("busemann_cocycle");
    Check& equi = s.check("busemann_equivariance");
    for (int i = 0; i < 100; ++i) {
      End xi = sample::end(g, rng, 3);
      TreePoint x = sample::point(g, rng, 3);
      TreePoint y = sample::point(g, rng, 3);
      TreePoint z = sample::point(g, rng, 3);
      Rational bxy = busemann(g, xi, x, y);
      lip.expect(abs(bxy) <= tree_distance(g, x, y), [&] { return tag(ends3(g, xi, x, y)); });
      cocycle.expect(bxy + busemann(g, xi, y, z) == busemann(g, xi, x, z),
                     [&] { return tag(ends3(g, xi, x, y) + " z=" + point_str(g, z)); });
      Word gamma = sample::word(rng, g.rank(), 0, 4);
      equi.expect(busemann(g, act(g, gamma, xi), act(g, gamma, x), act(g, gamma, y)) == bxy,
                  [&] { return tag(ends3(g, xi, x, y) + " gamma=" + gamma.str()); });
    }

    Check& binf = s.check("beta_infimum");
    for (int i = 0; i < 12; ++i) {
      End xi = sample::end(g, rng, 2);
      End eta = sample::end(g, rng, 2);
      if (xi == eta) continue;
      TreePoint p = sample::point(g, rng, 2);
      Rational b = *beta(g, p, xi, eta);
      Rational radius = -b / 2 + 1;
      auto cand = ball_vertices(g, p, radius);
      cand.push_back(p);
      Rational best = busemann(g, xi, p, p) + busemann(g, eta, p, p);
      for (const auto& x : cand) best = std::min<Rational>(best, busemann(g, xi, x, p) + busemann(g, eta, x, p));
      binf.expect(best == b, [&] {
        return tag("p=" + point_str(g, p) + " xi=" + end_str(g, xi) + " eta=" + end_str(g, eta) + " closed=" +
                   to_string(b) + " brute=" + to_string(best));
      });
    }

    Check& bline = s.check("beta_zero_on_geodesic");
    for (int i = 0; i < 30; ++i) {
      End xi = sample::end(g, rng, 2);
      End eta = sample::end(g, rng, 2);
      if (xi == eta) continue;
      GeodesicLine line(g, xi, eta);
      Rational t = ratio(static_cast<long>(sample::below(rng, 17)) - 8, 2);
      TreePoint p = line.at(t);
      bline.expect(*beta(g, p, xi, eta) == 0, [&] { return tag("p=" + point_str(g, p) + " on " + end_str(g, xi)); });
      bline.expect(!beta(g, p, xi, xi).has_value(), [&] { return tag("beta(xi, xi) finite"); });
    }

    Check& tl = s.check("translation_length");
    Check& star = s.check("axis_busemann");
    for (int i = 0; i < 50; ++i) {
      Word gamma = sample::word(rng, g.rank(), 1, 5);
      Word alpha = sample::word(rng, g.rank(), 0, 4);
      Rational l = translation_length(g, gamma);
      bool ok = translation_length(g, alpha * gamma * alpha.inverse()) == l;
      for (int n = 2; n <= 4; ++n) ok = ok && translation_length(g, gamma.pow(n)) == l * n;
      tl.expect(ok, [&] { return tag("gamma=" + gamma.str() + " alpha=" + alpha.str()); });

      Axis ax = axis_endpoints(g, gamma);
      TreePoint x = sample::point(g, rng, 3);
      TreePoint gx = act(g, gamma, x);
      TreePoint gix = act(g, gamma.inverse(), x);
      star.expect(busemann(g, ax.attracting, x, gx) == l && busemann(g, ax.repelling, x, gix) == l &&
                      busemann(g, ax.repelling, gx, x) == l && busemann(g, ax.attracting, gix, x) == l &&
                      act(g, gamma, ax.attracting) == ax.attracting && act(g, gamma, ax.repelling) == ax.repelling,
                  [&] { return tag("gamma=" + gamma.str() + " x=" + point_str(g, x)); });
    }

    // Every end of a computed shadow passes within r of y and obeys
    // d - 2r <= b(x, y) <= d; the branches leaving the cylinder path do not.
    Check& sb = s.check("shadow_bounds");
    for (int i = 0; i < 40; ++i) {
      TreePoint x = sample::point(g, rng, 2);
      TreePoint y = sample::point(g, rng, 3);
      static const Rational radii[] = {Rational(1, 2), 1, 2};
      Rational r = radii[sample::below(rng, 3)];
      EndCylinder c = shadow(g, x, y, r);
      Rational d = tree_distance(g, x, y);
      auto gap = [&](const End& xi) -> Rational { return (d - busemann(g, xi, x, y)) / 2; };
      auto where = [&] { return tag("x=" + point_str(g, x) + " y=" + point_str(g, y) + " r=" + to_string(r)); };
      if (c.full_boundary()) {
        sb.expect(d < r, where);
        continue;
      }
      HalfTree h = cylinder_half_tree(g, c);
      TreePoint w = half_tree_head(g, h);
      std::vector<End> inside;
      for (int f : g.out_edges(quotient_vertex(g, w))) {
        if (f != reverse_edge(h.edge)) inside.push_back(representative_end(g, HalfTree{w, f}));
      }
      for (const auto& xi : inside) {
        Rational b = busemann(g, xi, x, y);
        sb.expect(gap(xi) < r && d - 2 * r <= b && b <= d, [&] { return where() + " xi=" + end_str(g, xi); });
      }
      EdgePath walk = c.anchor.path;
      for (std::size_t k = 0; k < c.path.size(); ++k) {
        TreePoint u = vertex_at(walk);
        for (int f : g.out_edges(quotient_vertex(g, u))) {
          if (f == c.path[k] || (k > 0 && f == reverse_edge(c.path[k - 1]))) continue;
          HalfTree side{u, f};
          if (in_subtree(g, side, x.is_vertex() ? x : vertex_at(concat_reduce(x.path, std::vector<int>{x.edge})))) {
            continue;  // points back at x
          }
          if (!x.is_vertex() && in_subtree(g, side, vertex_at(x.path))) continue;
          End xi = representative_end(g, side);
          sb.expect(gap(xi) >= r, [&] { return where() + " outside end " + end_str(g, xi) + " is within r"; });
        }
        walk = concat_reduce(walk, std::vector<int>{c.path[k]});
      }
    }
  }
}

// --- patterson ---------------------------------------------------------------

void suite_patterson(Suite& s, Engine& rng, bool corrupt) {
  for (const auto& fx : graph_fixtures()) {
    const MetricGraph& g = fx.graph;
    auto tag = [&](const std::string& what) { return fx.name + " " + what; };
    GibbsWeights w = critical_exponent(g);

    Check& mono = s.check("spectral_radius_decreasing");
    double prev = spectral_radius(g, 1e-6);
    mono.expect(prev > 1.0, [&] { return tag("rho(1e-6) <= 1"); });
    for (int k = 1; k <= 30; ++k) {
      double sk = 0.1 * k;
      double rho = spectral_radius(g, sk);
      mono.expect(rho < prev, [&] { return tag("rho not decreasing at s=" + num(sk)); });
      prev = rho;
    }
    mono.expect(spectral_radius(g, 64.0 / to_double(g.min_length())) < 1.0, [&] { return tag("rho(hi) >= 1"); });

    Check& dich = s.check("poincare_dichotomy");
    TreePoint root = root_vertex();
    std::vector<double> low;
    std::vector<double> high;
    for (int r = 10; r <= 30; r += 5) {
      low.push_back(poincare_partial(g, w.delta - 0.1, root, root, r));
      high.push_back(poincare_partial(g, w.delta + 0.1, root, root, r));
    }
    for (std::size_t k = 0; k + 1 < low.size(); ++k) {
      dich.expect(low[k + 1] >= 1.5 * low[k], [&] { return tag("below delta: slow growth at step " + std::to_string(k)); });
    }
    for (std::size_t k = 0; k + 2 < high.size(); ++k) {
      double inc0 = high[k + 1] - high[k];
      double inc1 = high[k + 2] - high[k + 1];
      dich.expect(inc1 < 0.9 * inc0, [&] {
        return tag("above delta: increments " + num(inc0) + " -> " + num(inc1) + " not shrinking");
      });
    }

    GibbsWeights used = w;
    if (corrupt) used.right[0] *= 1.01;
    Check& add = s.check("refinement_additivity");
    for (int rep = 0; rep < 2; ++rep) {
      TreePoint p = rep == 0 ? root : sample::vertex(g, rng, 2);
      for (int depth = 1; depth <= 4; ++depth) {
        for (const auto& c : cylinders_at_depth(g, p, depth)) {
          double whole = gibbs_cylinder_measure(used, p, c);
          double parts = 0.0;
          HalfTree h = cylinder_half_tree(g, c);
          TreePoint head = half_tree_head(g, h);
          for (int f : g.out_edges(quotient_vertex(g, head))) {
            if (f == reverse_edge(h.edge)) continue;
            EdgePath ext = c.path;
            ext.push_back(f);
            parts += gibbs_cylinder_measure(used, p, EndCylinder{c.anchor, ext});
          }
          add.expect(std::abs(whole - parts) <= 1e-10 * std::max(1.0, whole), [&] {
            return tag("cylinder " + cylinder_str(g, c) + " mass " + num(whole) + " vs children " + num(parts));
          });
        }
      }
    }

    Check& total = s.check("total_mass_depth_independent");
    CylinderMeasure table = gibbs_measure_table(w, root, 6);
    std::vector<double> per_depth(7, 0.0);
    std::vector<double> max_depth(7, 0.0);
    for (const auto& cm : table.masses) {
      per_depth[cm.depth] += cm.mass;
      max_depth[cm.depth] = std::max(max_depth[cm.depth], cm.mass);
    }
    for (int d = 2; d <= 6; ++d) {
      total.expect(std::abs(per_depth[d] - per_depth[1]) <= 1e-10,
                   [&] { return tag("depth " + std::to_string(d) + " total " + num(per_depth[d])); });
    }
    total.expect(std::abs(per_depth[1] - 1.0) <= 1e-12, [&] { return tag("base mass " + num(per_depth[1])); });

    Check& atom = s.check("non_atomic");
    for (int d = 2; d <= 6; ++d) {
      atom.expect(max_depth[d] < 0.95 * max_depth[d - 1],
                  [&] { return tag("max cylinder mass at depth " + std::to_string(d) + " = " + num(max_depth[d])); });
    }

    Check& scale = s.check("scaling_covariance");
    for (Rational lambda : {Rational(2), Rational(1, 3), Rational(3, 2)}) {
      GibbsWeights ws = critical_exponent(g.scaled(lambda));
      scale.expect(std::abs(ws.delta * to_double(lambda) - w.delta) <= 1e-9,
                   [&] { return tag("lambda=" + to_string(lambda) + " delta " + num(ws.delta)); });
      for (const auto& c : cylinders_at_depth(g, root, 3)) {
        double a = gibbs_cylinder_measure(w, root, c);
        double b = gibbs_cylinder_measure(ws, root, c);
        scale.expect(std::abs(a - b) <= 1e-10, [&] { return tag("lambda=" + to_string(lambda) + " " + cylinder_str(g, c)); });
      }
    }

    Check& conf = s.check("conformality");
    for (int i = 0; i < 8; ++i) {
      TreePoint p = sample::vertex(g, rng, 2);
      TreePoint q = sample::vertex(g, rng, 2);
      int depth = std::max<int>(5, static_cast<int>(geodesic_edges(g, p, q).size()) + 1);
      double res = conformality_residual(w, p, q, depth);
      conf.expect(res <= 1e-9, [&] { return tag("p=" + point_str(g, p) + " q=" + point_str(g, q) + " residual " + num(res)); });
    }
  }

  Check& sh = s.check("shadow_lemma");
  GibbsWeights unit = critical_exponent(make_rose({1, 1}));
  for (Rational r : {Rational(1, 2), Rational(1), Rational(2)}) {
    ShadowReport rep = shadow_lemma_check(unit, root_vertex(), r, 4);
    sh.expect(rep.violations == 0 && rep.max_ratio <= 1.0, [&] {
      return "rose(1,1) r=" + to_string(r) + " max ratio " + num(rep.max_ratio) + " at " + rep.worst;
    });
  }
}

// --- crossratio --------------------------------------------------------------

void suite_crossratio(Suite& s, Engine& rng) {
  std::vector<Fixture> fixtures = graph_fixtures();
  for (const auto& fx : fixtures) {
    const MetricGraph& g = fx.graph;
    auto tag = [&](const std::string& what) { return fx.name + " " + what; };

    Check& ids = s.check("identities_1_to_5");
    Check& base = s.check("basepoint_independence");
    Check& twist = s.check("twisting_equals_cross_ratio");
    Check& lstar = s.check("beta_translate");
    for (int i = 0; i < 120; ++i) {
      std::vector<End> e;
      while (e.size() < 5) {
        End c = sample::end(g, rng, 2);
        if (std::find(e.begin(), e.end(), c) == e.end()) e.push_back(c);
      }
      const End& xi = e[0];
      const End& xi2 = e[1];
      const End& eta = e[2];
      const End& eta2 = e[3];
      const End& eta3 = e[4];
      Quadruple q{xi, xi2, eta, eta2};
      auto cr = [&](const End& a, const End& b, const End& c, const End& d) { return cross_ratio(g, Quadruple{a, b, c, d}); };
      Rational v = cross_ratio(g, q);
      Word gamma = sample::word(rng, g.rank(), 1, 4);
      bool ok = cr(act(g, gamma, xi), act(g, gamma, xi2), act(g, gamma, eta), act(g, gamma, eta2)) == v;
      ok = ok && v == -cr(xi, xi2, eta2, eta);
      ok = ok && v == cr(eta, eta2, xi, xi2);
      ok = ok && v + cr(xi, xi2, eta2, eta3) == cr(xi, xi2, eta, eta3);
      ok = ok && v + cr(xi2, eta, xi, eta2) + cr(eta, xi, xi2, eta2) == 0;
      ids.expect(ok, [&] { return tag(quadruple_str(g, q) + " gamma=" + gamma.str()); });

      TreePoint p1 = sample::point(g, rng, 3);
      TreePoint p2 = sample::point(g, rng, 3);
      base.expect(cross_ratio(g, q, p1) == cross_ratio(g, q, p2),
                  [&] { return tag(quadruple_str(g, q) + " p=" + point_str(g, p1) + " p'=" + point_str(g, p2)); });

      twist.expect(twisting_time(g, q) == v, [&] { return tag(quadruple_str(g, q)); });

      TreePoint x = sample::point(g, rng, 2);
      TreePoint gix = act(g, gamma.inverse(), x);
      lstar.expect(*beta(g, x, act(g, gamma, xi), act(g, gamma, eta)) ==
                       *beta(g, x, xi, eta) + busemann(g, xi, x, gix) + busemann(g, eta, x, gix),
                   [&] { return tag("x=" + point_str(g, x) + " gamma=" + gamma.str()); });
    }

    Check& lvc = s.check("length_via_cross_ratio");
    for (int i = 0; i < 40; ++i) {
      Word gamma = sample::word(rng, g.rank(), 1, 8);
      End xi = sample::end(g, rng, 3);
      Axis ax = axis_endpoints(g, gamma);
      if (xi == ax.attracting || xi == ax.repelling) continue;
      lvc.expect(length_via_crossratio(g, gamma, xi) == 2 * translation_length(g, gamma),
                 [&] { return tag("gamma=" + gamma.str() + " xi=" + end_str(g, xi)); });
    }

    Check& tlq = s.check("tree_lengths_quadruple");
    for (int i = 0; i < 30; ++i) {
      TreePoint p = sample::vertex(g, rng, 2);
      TreePoint q = sample::vertex(g, rng, 2);
      if (p == q) continue;
      tlq.expect(cross_ratio(g, tree_lengths_quadruple(g, p, q)) == 2 * tree_distance(g, p, q),
                 [&] { return tag("p=" + point_str(g, p) + " q=" + point_str(g, q)); });
    }
  }

  Check& seq = s.check("cross_ratio_from_lengths");
  MetricGraph unit = make_rose({1, 1});
  struct Case {
    const char* g1;
    const char* g2;
    int expect;
  };
  for (const Case& c : {Case{"a", "baB", -2}, Case{"a", "b", 0}}) {
    LengthSequence ls = crossratio_from_lengths(unit, Word::parse(c.g1, 2), Word::parse(c.g2, 2), 8);
    seq.expect(ls.stable_from.has_value() && ls.limit == c.expect && ls.cross_ratio == c.expect,
               [&] { return std::string("(") + c.g1 + ", " + c.g2 + ") limit " + to_string(ls.limit); });
  }
}

// --- dynamics ----------------------------------------------------------------

void suite_dynamics(Suite& s, Engine& rng) {
  for (const auto& fx : graph_fixtures()) {
    const MetricGraph& g = fx.graph;
    auto tag = [&](const std::string& what) { return fx.name + " " + what; };
    BMQuotientMeasure m(critical_exponent(g));
    int n = g.num_directed_edges();

    Check& stat = s.check("kernel_stationary");
    for (int f = 0; f < n; ++f) {
      double flow_in = 0.0;
      for (int e = 0; e < n; ++e) {
        if (EdgeShift(g).admissible(e, f)) flow_in += m.pi()[e] * m.transition(e, f);
      }
      stat.expect(std::abs(flow_in - m.pi()[f]) <= 1e-12, [&] { return tag("state " + g.edge_name(f)); });
    }
    for (int e = 0; e < n; ++e) {
      double row = 0.0;
      for (int f = 0; f < n; ++f) {
        if (EdgeShift(g).admissible(e, f)) row += m.transition(e, f);
      }
      stat.expect(std::abs(row - 1.0) <= 1e-12, [&] { return tag("row " + g.edge_name(e)); });
    }

    // Geodesics crossing a lifted directed edge, split by the next edge.
    Check& flow = s.check("flow_mass_decomposition");
    double total = 0.0;
    double refined = 0.0;
    for (int d = 0; d < n; ++d) {
      TreePoint tail = vertex_at(g.tree_path(g.tail(d)));
      EdgePath through = concat_reduce(tail.path, std::vector<int>{d});
      EndCylinder back{vertex_at(through), {reverse_edge(d)}};
      total += g.length_d(d) * bm_pair_mass(m, back, EndCylinder{tail, {d}}, tail);
      for (int f : g.out_edges(g.head(d))) {
        if (f == reverse_edge(d)) continue;
        refined += g.length_d(d) * bm_pair_mass(m, back, EndCylinder{tail, {d, f}}, tail);
      }
    }
    double expect = m.total_flow_mass();
    flow.expect(expect > 0 && std::isfinite(expect) && std::abs(total - expect) <= 1e-10 * expect &&
                    std::abs(refined - expect) <= 1e-10 * expect,
                [&] { return tag("decomposition " + num(total) + " / " + num(refined) + " vs " + num(expect)); });

    Check& refine = s.check("bm_refinement");
    Check& equi = s.check("bm_equivariance");
    TreePoint root = root_vertex();
    for (int i = 0; i < 40; ++i) {
      auto out = g.out_edges(g.base_vertex());
      int f1 = out[sample::below(rng, out.size())];
      int f2 = out[sample::below(rng, out.size())];
      if (f1 == f2) continue;
      auto grow = [&](EdgePath path, int extra) {
        for (int k = 0; k < extra; ++k) {
          auto next = g.out_edges(g.head(path.back()));
          int f = next[sample::below(rng, next.size())];
          if (f == reverse_edge(path.back())) {
            --k;
            continue;
          }
          path.push_back(f);
        }
        return path;
      };
      EndCylinder cm{root, grow({f1}, static_cast<int>(sample::below(rng, 3)))};
      EndCylinder cp{root, grow({f2}, static_cast<int>(sample::below(rng, 3)))};
      double mass = bm_pair_mass(m, cm, cp, root);
      for (int side = 0; side < 2; ++side) {
        const EndCylinder& c = side == 0 ? cp : cm;
        double sum = 0.0;
        for (int f : g.out_edges(g.head(c.path.back()))) {
          if (f == reverse_edge(c.path.back())) continue;
          EndCylinder ext{root, c.path};
          ext.path.push_back(f);
          sum += side == 0 ? bm_pair_mass(m, cm, ext, root) : bm_pair_mass(m, ext, cp, root);
        }
        refine.expect(std::abs(sum - mass) <= 1e-10 * std::max(1.0, mass),
                      [&] { return tag(cylinder_str(g, cm) + " x " + cylinder_str(g, cp)); });
      }
      for (int gen = 0; gen < g.rank(); ++gen) {
        for (bool inv : {false, true}) {
          Word gamma = Word::generator(gen, inv);
          double moved = 0.0;
          try {
            moved = bm_pair_mass(m, act(g, gamma, cm), act(g, gamma, cp), root);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::OverlappingCylinders) throw;
            continue;  // root inside a translated half tree
          }
          equi.expect(std::abs(moved - mass) <= 1e-10 * std::max(1.0, mass),
                      [&] { return tag(gamma.str() + " . " + cylinder_str(g, cm) + " x " + cylinder_str(g, cp)); });
        }
      }
    }

    Check& coh = s.check("verdict_coherence");
    std::vector<Rational> lengths;
    for (const auto& e : g.edges()) lengths.push_back(e.length);
    ArithmeticityVerdict edges = arithmeticity(lengths, false);
    MixingVerdict v = mixing_verdict(g, MixingBudget{});
    coh.expect(v.kind == MixingVerdict::Kind::NotMixing && v.c == edges.c, [&] { return tag(v.str()); });
    auto spectrum = length_spectrum_sample(g, 6);
    ArithmeticityVerdict spec = arithmeticity(spectrum, false);
    coh.expect(is_integer(spec.c / edges.c), [&] { return tag("spectrum c " + to_string(spec.c)); });

    // Lengths in cZ: the circle observable returns to itself after c.
    Check& circ = s.check("circle_obstruction");
    Observable o = Observable::circle(g, to_double(edges.c));
    std::vector<double> times;
    for (int k = 0; k <= 5; ++k) times.push_back(k * to_double(edges.c));
    auto pts = correlation(m, o, o, times, 2000, rng());
    for (std::size_t k = 1; k < pts.size(); ++k) {
      double tol = 3.0 * std::hypot(pts[k].std_error, pts[0].std_error);
      circ.expect(std::abs(std::abs(pts[k].corr) - std::abs(pts[0].corr)) <= tol,
                  [&] { return tag("T=" + num(pts[k].t) + " C=" + num(pts[k].corr) + " C0=" + num(pts[0].corr)); });
    }

    Check& order = s.check("stream_order_independence");
    std::uint64_t master = rng();
    std::vector<FlowState> forward;
    for (std::uint64_t i = 0; i < 16; ++i) {
      Rng r = stream_rng(master, i);
      forward.push_back(flow_step(m, sample_stationary(m, r), 7.5, r));
    }
    for (std::uint64_t i = 16; i-- > 0;) {
      Rng r = stream_rng(master, i);
      FlowState st = flow_step(m, sample_stationary(m, r), 7.5, r);
      order.expect(st == forward[i], [&] { return tag("stream " + std::to_string(i)); });
    }
  }

  Check& erg = s.check("birkhoff_average");
  BMQuotientMeasure r12(critical_exponent(make_rose({1, 2})));
  BirkhoffResult br = birkhoff_vs_space_average(r12, Observable::indicator({2, 3}, "b"), 2e4, rng());
  double diff = std::abs(br.time_average - br.space_average);
  erg.expect(diff <= 0.02 && diff <= 3 * br.std_error + 1e-12, [&] {
    return "rose(1,2) b-edges time " + num(br.time_average) + " space " + num(br.space_average) + " se " +
           num(br.std_error);
  });

  // Aperiodic exactly when some closed path has odd edge count.
  Check& prim = s.check("edge_shift_primitive");
  for (const auto& fx : graph_fixtures()) {
    const MetricGraph& g = fx.graph;
    std::vector<int> colour(g.num_vertices(), -1);
    colour[0] = 0;
    bool bipartite = true;
    for (bool changed = true; changed;) {
      changed = false;
      for (int d = 0; d < g.num_directed_edges(); ++d) {
        int a = colour[g.tail(d)];
        if (a < 0) continue;
        int& b = colour[g.head(d)];
        if (b < 0) {
          b = 1 - a;
          changed = true;
        } else if (b == a) {
          bipartite = false;
        }
      }
    }
    prim.expect(EdgeShift(g).is_primitive() == !bipartite, [&] { return fx.name; });
  }

  Check& exact = s.check("exact_verdicts");
  struct Lengths {
    std::vector<Rational> l;
    Rational c;
  };
  for (const Lengths& c : {Lengths{{1, 1}, 1}, Lengths{{2, 3}, 1}, Lengths{{1, Rational(3, 2)}, Rational(1, 2)}}) {
    MixingVerdict v = mixing_verdict(make_rose(c.l), MixingBudget{});
    exact.expect(v.kind == MixingVerdict::Kind::NotMixing && v.c == c.c, [&] { return v.str(); });
  }
}

// --- quotient ----------------------------------------------------------------

struct QuotientCase {
  std::string name;
  DiscreteMeasureAction action;
  std::vector<Subset> domains;
  std::vector<std::vector<int>> commuting;
};

void suite_quotient(Suite& s, Engine& rng) {
  std::vector<QuotientCase> cases;
  auto add_named = [&](std::string name, DiscreteMeasureAction a) {
    auto doms = orbit_domains(a);
    auto maps = central_maps(a);
    cases.push_back(QuotientCase{std::move(name), std::move(a), std::move(doms), std::move(maps)});
  };
  add_named("negation", negation_fixture());
  add_named("free Z/3", free_rotation_fixture());
  for (const auto& name : group_catalog()) {
    FiniteGroup g = make_group(name);
    auto subs = g.subgroups();
    add_named("cosets " + name, coset_action(g, {subs.front(), subs.back(), subs[subs.size() / 2]},
                                             {Rational(1), Rational(0), Rational(2, 3)}));
  }
  for (int i = 0; i < 50; ++i) {
    RandomFixture fx = random_fixture(rng, 12);
    cases.push_back(QuotientCase{"random#" + std::to_string(i), std::move(fx.action), std::move(fx.domains),
                                 std::move(fx.commuting)});
  }

  for (const auto& qc : cases) {
    LemmaReport rep = check_lemmas(qc.action, qc.domains, qc.commuting, rng);
    auto fold = [&](const char* name, const LemmaTally& t) {
      Check& c = s.check(name);
      bool had = c.failures > 0;
      c.cases += t.cases;
      c.failures += t.failures;
      if (!had && t.failures > 0) c.first = qc.name + " " + t.first;
    };
    fold("reconstruction", rep.reconstruction);
    fold("independence", rep.independence);
    fold("transfer", rep.transfer);
    fold("commuting_maps", rep.commuting);
    fold("null_sets", rep.null_sets);
  }
}

}  // namespace

const std::vector<std::string>& selftest_suites() {
  static const std::vector<std::string> names{"graph_core", "patterson", "crossratio", "dynamics", "quotient"};
  return names;
}

int run_selftest(const SelftestConfig& config, std::ostream& out) {
  const auto& names = selftest_suites();
  if (!config.suite.empty() && std::find(names.begin(), names.end(), config.suite) == names.end()) {
    throw Error(ErrorCode::InvalidArgument, "unknown suite '" + config.suite + "'");
  }
  std::size_t total_cases = 0;
  std::size_t total_failures = 0;
  std::string first;
  out << "selftest seed=" << config.seed << (config.corrupt ? " corrupt" : "") << "\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (!config.suite.empty() && names[i] != config.suite) continue;
    Suite suite(names[i]);
    // Each suite has its own stream so --suite reproduces the full run.
    Rng rng = stream_rng(config.seed, i);
    if (names[i] == "graph_core") suite_graph_core(suite, rng);
    if (names[i] == "patterson") suite_patterson(suite, rng, config.corrupt);
    if (names[i] == "crossratio") suite_crossratio(suite, rng);
    if (names[i] == "dynamics") suite_dynamics(suite, rng);
    if (names[i] == "quotient") suite_quotient(suite, rng);

    std::size_t cases = 0;
    std::size_t failures = 0;
    out << "[" << suite.name() << "]\n";
    for (const auto& c : suite.checks()) {
      char line[160];
      std::snprintf(line, sizeof line, "  %-32s %7zu cases  %s\n", c.name.c_str(), c.cases,
                    c.failures == 0 ? "ok" : ("FAIL x" + std::to_string(c.failures)).c_str());
      out << line;
      if (c.failures > 0) {
        out << "    counterexample: " << c.first << "\n";
        if (first.empty()) first = suite.name() + "/" + c.name + ": " + c.first;
      }
      cases += c.cases;
      failures += c.failures;
    }
    out << suite.name() << ": " << suite.checks().size() << " checks, " << cases << " cases, " << failures
        << " failed\n";
    total_cases += cases;
    total_failures += failures;
  }
  if (total_failures == 0) {
    out << "SELFTEST PASS cases=" << total_cases << "\n";
    return 0;
  }
  out << "SELFTEST FAIL cases=" << total_cases << " failed=" << total_failures << "\n";
  out << "first counterexample: " << first << "\n";
  return 1;
}

}  // namespace treeflow
