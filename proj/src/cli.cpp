#include "treeflow/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "treeflow/crossratio.hpp"
#include "treeflow/dynamics.hpp"
#include "treeflow/error.hpp"
#include "treeflow/graph_io.hpp"
#include "treeflow/kernels.hpp"
#include "treeflow/patterson.hpp"
#include "treeflow/quotient.hpp"
#include "treeflow/selftest.hpp"

namespace treeflow {

namespace {

std::string fixed(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string sci(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

MetricGraph graph_of(const RunConfig& cfg) {
  if (cfg.graph.empty()) throw Error(ErrorCode::InvalidArgument, "--graph is required");
  return load_graph(cfg.graph);
}

void check_caps(const RunConfig& cfg) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::InvalidArgument, what); };
  if (cfg.depth < 1 || cfg.depth > kMaxDepth) bad("--depth must be in [1, " + std::to_string(kMaxDepth) + "]");
  if (cfg.samples < 2 || cfg.samples > kMaxSamples) bad("--samples must be in [2, " + std::to_string(kMaxSamples) + "]");
  if (!(cfg.t_max > 0) || cfg.t_max > kMaxTime) bad("--T-max must be in (0, 10000]");
  if (!(cfg.t_step > 0) || cfg.t_step > cfg.t_max) bad("--T-step must be in (0, T-max]");
  if (!(cfg.c_min > 0)) bad("--c-min must be positive");
  if (!(cfg.s_offset > 0) || cfg.s_offset > 10) bad("--s-offset must be in (0, 10]");
  if (cfg.random_fixtures < 0 || cfg.random_fixtures > kMaxRandomFixtures) bad("--random out of range");
}

// Header, rows, then the config-hash comment line.
void emit_csv(const RunConfig& cfg, const std::string& header, const std::vector<std::string>& rows,
              std::ostream& out) {
  std::ostringstream body;
  body << header << "\n";
  for (const auto& r : rows) body << r << "\n";
  body << "# config_hash=" << config_hash(cfg) << "\n";
  if (cfg.out.empty()) {
    out << body.str();
    return;
  }
  std::ofstream file(cfg.out, std::ios::binary);
  if (!file) throw Error(ErrorCode::InvalidArgument, "cannot write '" + cfg.out + "'");
  file << body.str();
  out << "wrote " << rows.size() << " rows to " << cfg.out << "\n";
}

std::string c_field(const ArithmeticityVerdict& v) {
  return v.kind == ArithmeticityVerdict::Kind::Arithmetic ? to_string(v.c) : "NA";
}

}  // namespace

std::string config_string(const RunConfig& cfg) {
  std::ostringstream s;
  s << "cmd=" << cfg.subcommand << ";graph=" << cfg.graph << ";seed=" << cfg.seed;
  if (cfg.subcommand == "measure") s << ";depth=" << cfg.depth << ";radius=" << cfg.radius << ";s_offset=" << cfg.s_offset;
  if (cfg.subcommand == "mix") {
    s << ";T_max=" << cfg.t_max << ";T_step=" << cfg.t_step << ";samples=" << cfg.samples << ";c_min=" << cfg.c_min;
  }
  if (cfg.subcommand == "analyze") s << ";c_min=" << cfg.c_min;
  return s.str();
}

std::string config_hash(const RunConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_string(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

int cmd_analyze(const RunConfig& cfg, std::ostream& out) {
  check_caps(cfg);
  MetricGraph g = graph_of(cfg);
  GibbsWeights w = critical_exponent(g);
  Rational t = g.min_length() * 20;
  GrowthSlope slope = growth_slope(g, t);

  out << graph_summary(g);
  out << "delta_spectral=" << fixed(w.delta, 12) << " rho_residual=" << sci(w.rho_residual)
      << " bisection_steps=" << w.bisection_steps << " newton_steps=" << w.newton_steps << "\n";
  out << "delta_growth=" << fixed(slope.secant, 12) << " (secant over [t/2, t], t=" << to_string(t)
      << ") log_ratio=" << fixed(slope.ratio, 12) << "\n";
  out << "rank=" << g.rank() << "\n";

  auto spectrum = length_spectrum_sample(g, 6);
  std::map<Rational, int> counts;
  for (const auto& l : spectrum) ++counts[l];
  out << "length_spectrum words<=6: " << spectrum.size() << " cyclically reduced, " << counts.size()
      << " distinct lengths\n";
  int shown = 0;
  for (const auto& [len, k] : counts) {
    if (shown++ == 12) {
      out << "  ...\n";
      break;
    }
    out << "  " << to_string(len) << " x" << k << "\n";
  }

  std::vector<Rational> lengths;
  for (const auto& e : g.edges()) lengths.push_back(e.length);
  LatticeFitOptions opts;
  opts.c_min = cfg.c_min;
  ArithmeticityVerdict edges = arithmeticity(lengths, g.inexact(), opts);
  ArithmeticityVerdict spec = arithmeticity(spectrum, g.inexact(), opts);
  out << "arithmeticity(edges)=" << edges.str() << "\n";
  out << "arithmeticity(spectrum)=" << spec.str() << "\n";
  out << "DELTA=" << fixed(w.delta, 7) << " C=" << c_field(edges) << "\n";
  return kExitOk;
}

int cmd_measure(const RunConfig& cfg, std::ostream& out) {
  check_caps(cfg);
  MetricGraph g = graph_of(cfg);
  GibbsWeights w = critical_exponent(g);
  Rational radius;
  if (cfg.radius.empty()) {
    Rational max_len = 0;
    for (const auto& e : g.edges()) max_len = std::max(max_len, e.length);
    radius = max_len * 24;
  } else {
    radius = parse_rational(cfg.radius).value;
  }
  TreePoint root = root_vertex();
  CylinderMeasure gibbs = gibbs_measure_table(w, root, cfg.depth);
  CylinderMeasure patt = patterson_measure_approx(w, root, w.delta + cfg.s_offset, radius, cfg.depth);

  std::vector<std::string> rows;
  for (const auto& cm : gibbs.masses) {
    double p = patt.mass_of(cm.cylinder);
    rows.push_back(path_str(g, cm.cylinder.path) + "," + std::to_string(cm.depth) + "," + sci(cm.mass) + "," +
                   sci(p) + "," + sci(std::abs(cm.mass - p)));
  }
  emit_csv(cfg, "cylinder,depth,mass_gibbs,mass_patterson,residual", rows, out);
  return kExitOk;
}

int cmd_crossratio(const RunConfig& cfg, std::ostream& out) {
  if (cfg.suite) {
    SelftestConfig st;
    st.seed = cfg.seed;
    st.suite = "crossratio";
    return run_selftest(st, out) == 0 ? kExitOk : kExitInvariant;
  }
  if (cfg.ends.size() != 4) throw Error(ErrorCode::InvalidArgument, "need four end expressions (or --suite)");
  MetricGraph g = cfg.graph.empty() ? make_rose({1, 1}) : load_graph(cfg.graph);
  Quadruple q{parse_end(g, cfg.ends[0]), parse_end(g, cfg.ends[1]), parse_end(g, cfg.ends[2]),
              parse_end(g, cfg.ends[3])};
  out << to_string(cross_ratio(g, q)) << "\n";
  return kExitOk;
}

int cmd_mix(const RunConfig& cfg, std::ostream& out) {
  check_caps(cfg);
  MetricGraph g = graph_of(cfg);
  MixingBudget budget;
  budget.samples = cfg.samples;
  budget.seed = cfg.seed;
  budget.t_max = cfg.t_max;
  budget.t_step = cfg.t_step;
  budget.t_min = std::min(budget.t_min, cfg.t_max / 2);
  budget.lattice.c_min = cfg.c_min;
  budget.full_series = true;
  MixingVerdict v = mixing_verdict(g, budget);

  std::vector<std::string> rows;
  for (const auto& p : v.evidence) rows.push_back(fixed(p.t, 6) + "," + sci(p.corr) + "," + sci(p.std_error));
  emit_csv(cfg, "T,corr,stderr", rows, out);
  out << "arithmeticity=" << v.lattice.str() << " kernels=" << kernels::active().name << "\n";
  out << v.str() << "\n";
  return kExitOk;
}

int cmd_quotient_demo(const RunConfig& cfg, std::ostream& out) {
  check_caps(cfg);
  struct Row {
    std::string name;
    DiscreteMeasureAction action;
    std::vector<Subset> domains;
    std::vector<std::vector<int>> commuting;
  };
  std::vector<Row> rows;
  auto named = [&](std::string name, DiscreteMeasureAction a) {
    auto doms = orbit_domains(a);
    auto maps = central_maps(a);
    rows.push_back(Row{std::move(name), std::move(a), std::move(doms), std::move(maps)});
  };

  DiscreteMeasureAction neg = negation_fixture();
  Subset A = subset_of(3, {1, 2});
  Subset F = subset_of(3, {1, 2});
  out << "negation on {-1,0,1}, counting measure\n";
  out << "  f_A for A=" << neg.set_str(A) << ":";
  for (int z = 0; z < neg.points(); ++z) out << " " << neg.label(z) << "->" << multiplicity(neg, A, z);
  out << "\n  nu_F for F=" << neg.set_str(F) << ":";
  auto nf = nu_F(neg, F);
  for (int z = 0; z < neg.points(); ++z) out << " " << neg.label(z) << "->" << to_string(nf[z]);
  out << "\n";

  named("negation", std::move(neg));
  named("free Z/3", free_rotation_fixture());
  for (const auto& name : group_catalog()) {
    FiniteGroup g = make_group(name);
    auto subs = g.subgroups();
    named("cosets " + name, coset_action(g, {subs.front(), subs.back(), subs[subs.size() / 2]},
                                         {Rational(1), Rational(0), Rational(2, 3)}));
  }
  std::mt19937_64 rng(cfg.seed);
  for (int i = 0; i < cfg.random_fixtures; ++i) {
    RandomFixture fx = random_fixture(rng, 12);
    rows.push_back(Row{"random#" + std::to_string(i), std::move(fx.action), std::move(fx.domains),
                       std::move(fx.commuting)});
  }

  char line[200];
  std::snprintf(line, sizeof line, "%-16s %6s  %-14s %-14s %-10s %-10s %-10s\n", "fixture", "points", "reconstruction",
                "independence", "transfer", "commuting", "null_sets");
  out << "\n" << line;
  std::size_t failures = 0;
  std::string first;
  for (const auto& r : rows) {
    LemmaReport rep = check_lemmas(r.action, r.domains, r.commuting, rng);
    auto cell = [&](const LemmaTally& t) {
      if (t.failures > 0 && first.empty()) first = r.name + ": " + t.first;
      failures += t.failures;
      return std::string(t.failures == 0 ? "pass" : "FAIL") + "(" + std::to_string(t.cases) + ")";
    };
    std::string c1 = cell(rep.reconstruction);
    std::string c2 = cell(rep.independence);
    std::string c3 = cell(rep.transfer);
    std::string c4 = cell(rep.commuting);
    std::string c5 = cell(rep.null_sets);
    std::snprintf(line, sizeof line, "%-16s %6d  %-14s %-14s %-10s %-10s %-10s\n", r.name.c_str(),
                  r.action.points(), c1.c_str(), c2.c_str(), c3.c_str(), c4.c_str(), c5.c_str());
    out << line;
  }
  if (failures > 0) {
    out << "FAIL first counterexample: " << first << "\n";
    return kExitInvariant;
  }
  out << "all lemmas pass on " << rows.size() << " fixtures\n";
  return kExitOk;
}

int cmd_selftest(const RunConfig& cfg, std::ostream& out) {
  SelftestConfig st;
  st.seed = cfg.seed;
  st.suite = cfg.selftest_suite;
  st.corrupt = cfg.corrupt;
  return run_selftest(st, out) == 0 ? kExitOk : kExitInvariant;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Patterson-Sullivan and Bowen-Margulis laboratory for metric graphs"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* analyze = app.add_subcommand("analyze", "critical exponent, length spectrum, arithmeticity");
  analyze->add_option("--graph", cfg.graph, "graph JSON file")->required();
  analyze->add_option("--c-min", cfg.c_min, "smallest lattice step for inexact graphs");

  auto* measure = app.add_subcommand("measure", "Gibbs vs truncated Patterson cylinder masses (CSV)");
  measure->add_option("--graph", cfg.graph, "graph JSON file")->required();
  measure->add_option("--depth", cfg.depth, "cylinder depth");
  measure->add_option("--radius", cfg.radius, "Patterson truncation radius (exact rational)");
  measure->add_option("--s-offset", cfg.s_offset, "Patterson exponent is delta + offset");
  measure->add_option("--out", cfg.out, "CSV output path");
  measure->add_option("--seed", cfg.seed, "unused; recorded in the config hash");

  auto* cross = app.add_subcommand("crossratio", "exact cross-ratio of four ends");
  cross->add_option("ends", cfg.ends, "four ends as prefix:(period), e.g. a:(b)");
  cross->add_option("--graph", cfg.graph, "graph JSON file (default: unit 2-rose)");
  cross->add_flag("--suite", cfg.suite, "run the identity battery instead");
  cross->add_option("--seed", cfg.seed, "seed for --suite");

  auto* mix = app.add_subcommand("mix", "correlation decay of the circle observable (CSV + verdict)");
  mix->add_option("--graph", cfg.graph, "graph JSON file")->required();
  mix->add_option("--T-max", cfg.t_max, "largest correlation time");
  mix->add_option("--T-step", cfg.t_step, "spacing of correlation times");
  mix->add_option("--samples", cfg.samples, "independent trajectories");
  mix->add_option("--seed", cfg.seed, "master seed");
  mix->add_option("--c-min", cfg.c_min, "smallest lattice step for inexact graphs");
  mix->add_option("--out", cfg.out, "CSV output path");

  auto* demo = app.add_subcommand("quotient-demo", "fundamental-domain quotient measure fixtures");
  demo->add_option("--seed", cfg.seed, "seed for randomized fixtures");
  demo->add_option("--random", cfg.random_fixtures, "number of randomized fixtures");

  auto* self = app.add_subcommand("selftest", "run every property suite");
  self->add_option("--seed", cfg.seed, "master seed");
  self->add_option("--suite", cfg.selftest_suite, "graph_core|patterson|crossratio|dynamics|quotient");
  self->add_flag("--corrupt", cfg.corrupt, "perturb the Gibbs fixture (harness check)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInput;
  }

  try {
    for (auto* sub : app.get_subcommands()) cfg.subcommand = sub->get_name();
    if (cfg.subcommand == "analyze") return cmd_analyze(cfg, out);
    if (cfg.subcommand == "measure") return cmd_measure(cfg, out);
    if (cfg.subcommand == "crossratio") return cmd_crossratio(cfg, out);
    if (cfg.subcommand == "mix") return cmd_mix(cfg, out);
    if (cfg.subcommand == "quotient-demo") return cmd_quotient_demo(cfg, out);
    if (cfg.subcommand == "selftest") return cmd_selftest(cfg, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.code()) {
      case ErrorCode::ModelConstraint:
        return kExitModel;
      case ErrorCode::OverlappingCylinders:
      case ErrorCode::InvalidAction:
      case ErrorCode::InvalidFundDomain:
      case ErrorCode::NonInvariantH:
      case ErrorCode::NotCommuting:
      case ErrorCode::NotMeasurePreserving:
        return kExitInvariant;
      default:
        return kExitInput;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitInput;
}

}  // namespace treeflow
