#include "treeflow/quotient.hpp"

#include <algorithm>
#include <set>

#include "treeflow/error.hpp"

namespace treeflow {

bool FiniteGroup::is_central(int g) const {
  for (int h = 0; h < order(); ++h) {
    if (mul[g][h] != mul[h][g]) return false;
  }
  return true;
}

std::vector<std::vector<int>> FiniteGroup::subgroups() const {
  std::set<std::vector<int>> found;
  auto closure = [&](int a, int b) {
    std::set<int> s{0, a, b};
    bool grew = true;
    while (grew) {
      grew = false;
      std::vector<int> cur(s.begin(), s.end());
      for (int x : cur) {
        for (int y : cur) {
          if (s.insert(mul[x][y]).second) grew = true;
        }
      }
    }
    return std::vector<int>(s.begin(), s.end());
  };
  // Every group in the catalog is 2-generated, hence so are its subgroups.
  for (int a = 0; a < order(); ++a) {
    for (int b = a; b < order(); ++b) found.insert(closure(a, b));
  }
  return {found.begin(), found.end()};
}

FiniteGroup FiniteGroup::from_permutations(std::string name, const std::vector<std::vector<int>>& generators) {
  std::size_t degree = generators.front().size();
  std::vector<int> id(degree);
  for (std::size_t i = 0; i < degree; ++i) id[i] = static_cast<int>(i);
  auto compose = [](const std::vector<int>& p, const std::vector<int>& q) {
    std::vector<int> r(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) r[i] = p[q[i]];
    return r;
  };
  std::vector<std::vector<int>> elems{id};
  std::map<std::vector<int>, int> index{{id, 0}};
  for (std::size_t i = 0; i < elems.size(); ++i) {
    for (const auto& gen : generators) {
      auto next = compose(gen, elems[i]);
      if (!index.contains(next)) {
        index[next] = static_cast<int>(elems.size());
        elems.push_back(next);
      }
    }
  }
  FiniteGroup g;
  g.name = std::move(name);
  int n = static_cast<int>(elems.size());
  g.mul.assign(n, std::vector<int>(n));
  g.inv.assign(n, 0);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      g.mul[a][b] = index.at(compose(elems[a], elems[b]));
      if (g.mul[a][b] == 0) g.inv[a] = b;
    }
  }
  return g;
}

const std::vector<std::string>& group_catalog() {
  static const std::vector<std::string> names{"Z2", "Z3", "Z4", "Z2xZ2", "S3", "Z6", "D4"};
  return names;
}

FiniteGroup make_group(std::string_view name) {
  if (name == "Z2") return FiniteGroup::from_permutations("Z2", {{1, 0}});
  if (name == "Z3") return FiniteGroup::from_permutations("Z3", {{1, 2, 0}});
  if (name == "Z4") return FiniteGroup::from_permutations("Z4", {{1, 2, 3, 0}});
  if (name == "Z2xZ2") return FiniteGroup::from_permutations("Z2xZ2", {{1, 0, 3, 2}, {2, 3, 0, 1}});
  if (name == "S3") return FiniteGroup::from_permutations("S3", {{1, 0, 2}, {1, 2, 0}});
  if (name == "Z6") return FiniteGroup::from_permutations("Z6", {{1, 2, 3, 4, 5, 0}});
  if (name == "D4") return FiniteGroup::from_permutations("D4", {{1, 2, 3, 0}, {0, 3, 2, 1}});
  throw Error(ErrorCode::InvalidArgument, "unknown group '" + std::string(name) + "'");
}

DiscreteMeasureAction::DiscreteMeasureAction(FiniteGroup group, std::vector<std::vector<int>> act,
                                             std::vector<Rational> nu, std::vector<std::string> labels)
    : group_(std::move(group)), act_(std::move(act)), nu_(std::move(nu)), labels_(std::move(labels)) {
  int n = points();
  if (static_cast<int>(act_.size()) != group_.order()) throw Error(ErrorCode::InvalidAction, "table has wrong row count");
  for (const auto& row : act_) {
    if (static_cast<int>(row.size()) != n) throw Error(ErrorCode::InvalidAction, "table has wrong column count");
    for (int z : row) {
      if (z < 0 || z >= n) throw Error(ErrorCode::InvalidAction, "element maps a point outside the set");
    }
  }
  for (int z = 0; z < n; ++z) {
    if (act_[0][z] != z) throw Error(ErrorCode::InvalidAction, "identity moves a point");
    if (nu_[z] < 0) throw Error(ErrorCode::InvalidAction, "negative weight");
  }
  for (int g = 0; g < group_.order(); ++g) {
    for (int h = 0; h < group_.order(); ++h) {
      for (int z = 0; z < n; ++z) {
        if (act_[group_.mul[g][h]][z] != act_[g][act_[h][z]]) {
          throw Error(ErrorCode::InvalidAction, "table is not a homomorphism");
        }
      }
    }
    for (int z = 0; z < n; ++z) {
      if (nu_[act_[g][z]] != nu_[z]) throw Error(ErrorCode::InvalidAction, "nu is not invariant");
    }
  }
  if (labels_.empty()) {
    for (int z = 0; z < n; ++z) labels_.push_back(std::to_string(z));
  }
  std::vector<bool> seen(n, false);
  for (int z = 0; z < n; ++z) {
    if (seen[z]) continue;
    std::set<int> orbit;
    for (int g = 0; g < group_.order(); ++g) orbit.insert(act_[g][z]);
    for (int y : orbit) seen[y] = true;
    orbits_.emplace_back(orbit.begin(), orbit.end());
  }
}

std::string DiscreteMeasureAction::set_str(const Subset& a) const {
  std::string s = "{";
  for (int z = 0; z < points(); ++z) {
    if (!a[z]) continue;
    if (s.size() > 1) s += ",";
    s += labels_[z];
  }
  return s + "}";
}

Rational DiscreteMeasureAction::measure(const Subset& a) const { return measure_with(nu_, a); }

Subset DiscreteMeasureAction::saturate(const Subset& a) const {
  Subset out(points(), false);
  for (int z = 0; z < points(); ++z) {
    if (!a[z]) continue;
    for (int g = 0; g < group_.order(); ++g) out[act_[g][z]] = true;
  }
  return out;
}

std::vector<Subset> DiscreteMeasureAction::invariant_subsets() const {
  std::size_t k = orbits_.size();
  std::vector<Subset> out;
  for (std::size_t mask = 0; mask < (std::size_t{1} << k); ++mask) {
    Subset s(points(), false);
    for (std::size_t i = 0; i < k; ++i) {
      if ((mask >> i) & 1) {
        for (int z : orbits_[i]) s[z] = true;
      }
    }
    out.push_back(std::move(s));
  }
  return out;
}

int multiplicity(const DiscreteMeasureAction& a, const Subset& A, int z) {
  int count = 0;
  for (int g = 0; g < a.group().order(); ++g) {
    if (A[a.act(g, z)]) ++count;
  }
  return count;
}

void validate_fund_domain(const DiscreteMeasureAction& a, const Subset& F) {
  if (static_cast<int>(F.size()) != a.points()) throw Error(ErrorCode::InvalidFundDomain, "wrong size");
  Subset gf = a.saturate(F);
  for (int z = 0; z < a.points(); ++z) {
    if (!gf[z] && a.nu(z) != 0) {
      throw Error(ErrorCode::InvalidFundDomain, "orbit of " + a.label(z) + " misses F but has positive measure");
    }
  }
}

namespace {

std::vector<int> return_set(const DiscreteMeasureAction& a, const Subset& F, int z) {
  std::vector<int> b;
  for (int g = 0; g < a.group().order(); ++g) {
    if (F[a.act(g, z)]) b.push_back(g);
  }
  return b;
}

}  // namespace

std::map<std::vector<int>, std::vector<int>> partition_ZBF(const DiscreteMeasureAction& a, const Subset& F) {
  validate_fund_domain(a, F);
  std::map<std::vector<int>, std::vector<int>> blocks;
  for (int z = 0; z < a.points(); ++z) {
    if (F[z]) blocks[return_set(a, F, z)].push_back(z);
  }
  return blocks;
}

std::vector<Rational> nu_F(const DiscreteMeasureAction& a, const Subset& F) {
  std::vector<Rational> out(a.points(), Rational(0));
  for (const auto& [b, zs] : partition_ZBF(a, F)) {
    for (int z : zs) out[z] = a.nu(z) / static_cast<long>(b.size());
  }
  return out;
}

Rational measure_with(const std::vector<Rational>& weights, const Subset& A) {
  Rational s = 0;
  for (std::size_t z = 0; z < weights.size(); ++z) {
    if (A[z]) s += weights[z];
  }
  return s;
}

std::vector<Rational> reconstruct(const DiscreteMeasureAction& a, const std::vector<Rational>& nu_f) {
  std::vector<Rational> out(a.points(), Rational(0));
  for (int g = 0; g < a.group().order(); ++g) {
    for (int z = 0; z < a.points(); ++z) out[a.act(g, z)] += nu_f[z];
  }
  return out;
}

TransferSides verify_transfer(const DiscreteMeasureAction& a, const Subset& F, const Subset& A,
                              const std::vector<Rational>& h) {
  for (int g = 0; g < a.group().order(); ++g) {
    for (int z = 0; z < a.points(); ++z) {
      if (h[a.act(g, z)] != h[z]) throw Error(ErrorCode::NonInvariantH, "h differs along the orbit of " + a.label(z));
    }
  }
  std::vector<Rational> nf = nu_F(a, F);
  TransferSides out;
  for (int z = 0; z < a.points(); ++z) {
    if (A[z]) out.lhs += h[z] * a.nu(z);
    out.rhs += h[z] * multiplicity(a, A, z) * nf[z];
  }
  return out;
}

CommutingReport verify_commuting(const DiscreteMeasureAction& a, const Subset& F, const std::vector<int>& phi) {
  for (int z = 0; z < a.points(); ++z) {
    if (a.nu(phi[z]) != a.nu(z)) throw Error(ErrorCode::NotMeasurePreserving, "phi moves weight at " + a.label(z));
    for (int g = 0; g < a.group().order(); ++g) {
      if (phi[a.act(g, z)] != a.act(g, phi[z])) {
        throw Error(ErrorCode::NotCommuting, "phi fails to commute at " + a.label(z));
      }
    }
  }
  std::vector<Rational> nf = nu_F(a, F);
  CommutingReport rep;
  for (const Subset& s : a.invariant_subsets()) {
    Subset pre(a.points(), false);
    for (int z = 0; z < a.points(); ++z) pre[z] = s[phi[z]];
    ++rep.sets_checked;
    if (measure_with(nf, pre) != measure_with(nf, s)) {
      if (rep.failures++ == 0) rep.first_failure = a.set_str(s);
    }
  }
  return rep;
}

bool null_sets_correspond(const DiscreteMeasureAction& a, const Subset& F, const Subset& A) {
  std::vector<Rational> nf = nu_F(a, F);
  Subset ga = a.saturate(A);
  Subset trace(a.points(), false);
  for (int z = 0; z < a.points(); ++z) trace[z] = ga[z] && F[z];
  bool x = measure_with(nf, trace) == 0;
  bool y = a.measure(A) == 0;
  bool z = a.measure(ga) == 0;
  return x == y && y == z;
}

DiscreteMeasureAction negation_fixture() {
  FiniteGroup g = make_group("Z2");
  // points -1, 0, 1 at indices 0, 1, 2
  std::vector<std::vector<int>> act{{0, 1, 2}, {2, 1, 0}};
  return DiscreteMeasureAction(std::move(g), std::move(act), {1, 1, 1}, {"-1", "0", "1"});
}

DiscreteMeasureAction free_rotation_fixture() {
  FiniteGroup g = make_group("Z3");
  std::vector<std::vector<int>> act(3, std::vector<int>(3));
  for (int k = 0; k < 3; ++k) {
    for (int z = 0; z < 3; ++z) act[k][z] = z;
  }
  // Element indices follow the closure order; read rotations off the table.
  for (int k = 0; k < 3; ++k) {
    for (int z = 0; z < 3; ++z) act[k][z] = g.mul[k][z];
  }
  return DiscreteMeasureAction(std::move(g), std::move(act), {1, 1, 1}, {"r0", "r1", "r2"});
}

Subset subset_of(int n, std::initializer_list<int> members) {
  Subset s(n, false);
  for (int z : members) s[z] = true;
  return s;
}

DiscreteMeasureAction coset_action(const FiniteGroup& g, const std::vector<std::vector<int>>& subgroups,
                                   const std::vector<Rational>& weights) {
  std::vector<std::vector<int>> act(g.order());
  std::vector<Rational> nu;
  std::vector<std::string> labels;
  int offset = 0;
  for (std::size_t i = 0; i < subgroups.size(); ++i) {
    const auto& h = subgroups[i];
    std::vector<int> coset_of(g.order(), -1);
    std::vector<int> reps;
    for (int x = 0; x < g.order(); ++x) {
      if (coset_of[x] >= 0) continue;
      int id = static_cast<int>(reps.size());
      reps.push_back(x);
      for (int y : h) coset_of[g.mul[x][y]] = id;
    }
    for (int a = 0; a < g.order(); ++a) {
      for (int x : reps) act[a].push_back(offset + coset_of[g.mul[a][x]]);
    }
    for (std::size_t c = 0; c < reps.size(); ++c) {
      nu.push_back(weights[i]);
      labels.push_back("o" + std::to_string(i) + "." + std::to_string(c));
    }
    offset += static_cast<int>(reps.size());
  }
  return DiscreteMeasureAction(g, std::move(act), std::move(nu), std::move(labels));
}

namespace {

int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

}  // namespace

RandomFixture random_fixture(std::mt19937_64& rng, int max_points) {
  const auto& names = group_catalog();
  FiniteGroup g = make_group(names[uniform_int(rng, 0, static_cast<int>(names.size()) - 1)]);
  auto subs = g.subgroups();
  static const std::vector<Rational> palette{0, Rational(1, 2), 1, Rational(3, 2), 2, Rational(1, 3)};

  std::vector<std::vector<int>> chosen;
  std::vector<Rational> weights;
  int used = 0;
  for (;;) {
    std::vector<std::size_t> fits;
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (used + g.order() / static_cast<int>(subs[i].size()) <= max_points) fits.push_back(i);
    }
    if (fits.empty()) break;
    std::size_t pick = fits[uniform_int(rng, 0, static_cast<int>(fits.size()) - 1)];
    chosen.push_back(subs[pick]);
    weights.push_back(palette[uniform_int(rng, 0, static_cast<int>(palette.size()) - 1)]);
    used += g.order() / static_cast<int>(subs[pick].size());
    // Sometimes repeat the orbit so an orbit swap is available.
    if (uniform_int(rng, 0, 2) == 0 && used + g.order() / static_cast<int>(subs[pick].size()) <= max_points) {
      chosen.push_back(subs[pick]);
      weights.push_back(weights.back());
      used += g.order() / static_cast<int>(subs[pick].size());
    }
    if (uniform_int(rng, 0, 2) == 0) break;
  }

  DiscreteMeasureAction action = coset_action(g, chosen, weights);
  RandomFixture fx{std::move(action), {}, {}};
  const auto& orbits = fx.action.orbits();
  int n = fx.action.points();

  for (int k = 0; k < 2; ++k) {
    Subset f(n, false);
    for (const auto& orbit : orbits) {
      bool any = false;
      for (int z : orbit) {
        if (uniform_int(rng, 0, 1) == 1) {
          f[z] = true;
          any = true;
        }
      }
      if (!any && fx.action.nu(orbit.front()) != 0) f[orbit[uniform_int(rng, 0, static_cast<int>(orbit.size()) - 1)]] = true;
    }
    fx.domains.push_back(std::move(f));
  }

  std::vector<int> identity(n);
  for (int z = 0; z < n; ++z) identity[z] = z;
  fx.commuting.push_back(identity);
  for (int c = 1; c < g.order(); ++c) {
    if (!g.is_central(c)) continue;
    std::vector<int> phi(n);
    for (int z = 0; z < n; ++z) phi[z] = fx.action.act(c, z);
    fx.commuting.push_back(std::move(phi));
  }
  // Swap two copies of the same coset space carrying equal weights.
  std::vector<int> starts;
  int offset = 0;
  for (const auto& h : chosen) {
    starts.push_back(offset);
    offset += g.order() / static_cast<int>(h.size());
  }
  for (std::size_t i = 0; i + 1 < chosen.size(); ++i) {
    if (chosen[i] == chosen[i + 1] && weights[i] == weights[i + 1]) {
      std::vector<int> phi = identity;
      int size = g.order() / static_cast<int>(chosen[i].size());
      for (int c = 0; c < size; ++c) {
        phi[starts[i] + c] = starts[i + 1] + c;
        phi[starts[i + 1] + c] = starts[i] + c;
      }
      fx.commuting.push_back(std::move(phi));
    }
  }
  return fx;
}


std::vector<Subset> orbit_domains(const DiscreteMeasureAction& a) {
  std::vector<Subset> out(3, Subset(a.points(), false));
  for (const auto& orbit : a.orbits()) {
    out[0][orbit.front()] = true;
    out[1][orbit.back()] = true;
  }
  std::fill(out[2].begin(), out[2].end(), true);
  return out;
}

std::vector<std::vector<int>> central_maps(const DiscreteMeasureAction& a) {
  std::vector<std::vector<int>> out;
  for (int c = 0; c < a.group().order(); ++c) {
    if (!a.group().is_central(c)) continue;
    std::vector<int> phi(a.points());
    for (int z = 0; z < a.points(); ++z) phi[z] = a.act(c, z);
    out.push_back(std::move(phi));
  }
  return out;
}

namespace {

template <class Describe>
void tally(LemmaTally& t, bool ok, Describe&& describe) {
  ++t.cases;
  if (!ok && t.failures++ == 0) t.first = describe();
}

}  // namespace

LemmaReport check_lemmas(const DiscreteMeasureAction& a, const std::vector<Subset>& domains,
                         const std::vector<std::vector<int>>& commuting, std::mt19937_64& rng) {
  LemmaReport rep;
  int n = a.points();
  auto invariant = a.invariant_subsets();
  for (std::size_t k = 0; k < domains.size(); ++k) {
    const Subset& F = domains[k];
    auto where = [&] { return "F=" + a.set_str(F); };
    auto nf = nu_F(a, F);
    auto back = reconstruct(a, nf);
    bool same = true;
    for (int z = 0; z < n; ++z) same = same && back[z] == a.nu(z);
    tally(rep.reconstruction, same, where);

    for (std::size_t j = k + 1; j < domains.size(); ++j) {
      auto ne = nu_F(a, domains[j]);
      for (const auto& S : invariant) {
        tally(rep.independence, measure_with(nf, S) == measure_with(ne, S),
              [&] { return where() + " E=" + a.set_str(domains[j]) + " S=" + a.set_str(S); });
      }
    }

    for (int t = 0; t < 6; ++t) {
      std::vector<Rational> h(n);
      for (const auto& orbit : a.orbits()) {
        Rational val = ratio(uniform_int(rng, -3, 3), uniform_int(rng, 1, 3));
        for (int z : orbit) h[z] = val;
      }
      Subset A(n);
      for (int z = 0; z < n; ++z) A[z] = uniform_int(rng, 0, 1) == 1;
      TransferSides sides = verify_transfer(a, F, A, h);
      tally(rep.transfer, sides.lhs == sides.rhs, [&] {
        return where() + " A=" + a.set_str(A) + " lhs " + to_string(sides.lhs) + " rhs " + to_string(sides.rhs);
      });
    }

    for (const auto& phi : commuting) {
      CommutingReport r = verify_commuting(a, F, phi);
      tally(rep.commuting, r.failures == 0, [&] { return where() + " " + r.first_failure; });
    }

    if (n <= 16) {
      for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
        Subset A(n);
        for (int z = 0; z < n; ++z) A[z] = ((bits >> z) & 1u) != 0;
        tally(rep.null_sets, null_sets_correspond(a, F, A), [&] { return where() + " A=" + a.set_str(A); });
      }
    }
  }
  return rep;
}

}  // namespace treeflow
