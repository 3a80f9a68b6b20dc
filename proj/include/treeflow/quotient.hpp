#pragma once

#include <map>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "treeflow/rational.hpp"

// Fundamental-domain quotient measures for finite groups acting on finite
// weighted point sets. All arithmetic is exact.
namespace treeflow {

// Finite group given by its multiplication table; element 0 is the identity.
// mul[g][h] is g*h, acting as "h first, then g".
struct FiniteGroup {
  std::string name;
  std::vector<std::vector<int>> mul;
  std::vector<int> inv;

  int order() const { return static_cast<int>(mul.size()); }
  bool is_central(int g) const;
  // Every subgroup, as sorted element lists (identity first).
  std::vector<std::vector<int>> subgroups() const;

  // Closure of the permutations under composition.
  static FiniteGroup from_permutations(std::string name, const std::vector<std::vector<int>>& generators);
};

// Z2, Z3, Z4, Z2xZ2, S3, Z6, D4.
const std::vector<std::string>& group_catalog();
FiniteGroup make_group(std::string_view name);

using Subset = std::vector<bool>;

class DiscreteMeasureAction {
 public:
  // act[g][z]; throws InvalidAction unless the table is an action and nu is
  // invariant and nonnegative.
  DiscreteMeasureAction(FiniteGroup group, std::vector<std::vector<int>> act, std::vector<Rational> nu,
                        std::vector<std::string> labels = {});

  const FiniteGroup& group() const { return group_; }
  int points() const { return static_cast<int>(nu_.size()); }
  int act(int g, int z) const { return act_[g][z]; }
  const Rational& nu(int z) const { return nu_[z]; }
  const std::string& label(int z) const { return labels_[z]; }
  std::string set_str(const Subset& a) const;

  Rational measure(const Subset& a) const;
  Subset saturate(const Subset& a) const;  // GA
  const std::vector<std::vector<int>>& orbits() const { return orbits_; }
  // All unions of orbits.
  std::vector<Subset> invariant_subsets() const;

 private:
  FiniteGroup group_;
  std::vector<std::vector<int>> act_;
  std::vector<Rational> nu_;
  std::vector<std::string> labels_;
  std::vector<std::vector<int>> orbits_;
};

// f_A(z) = #{g : gz in A}.
int multiplicity(const DiscreteMeasureAction& a, const Subset& A, int z);

// Throws InvalidFundDomain unless nu(Z \ GF) = 0.
void validate_fund_domain(const DiscreteMeasureAction& a, const Subset& F);

// Z_B^F for z in F, keyed by B = {g : gz in F} (sorted).
std::map<std::vector<int>, std::vector<int>> partition_ZBF(const DiscreteMeasureAction& a, const Subset& F);

// nu_F(z) = nu(z) / |B(z)| on F, zero elsewhere.
std::vector<Rational> nu_F(const DiscreteMeasureAction& a, const Subset& F);
Rational measure_with(const std::vector<Rational>& weights, const Subset& A);

// sum over g of g_* nu_F.
std::vector<Rational> reconstruct(const DiscreteMeasureAction& a, const std::vector<Rational>& nu_f);

struct TransferSides {
  Rational lhs;  // integral of h over A against nu
  Rational rhs;  // integral of h f_A against nu_F
};
// Throws NonInvariantH if h is not constant on orbits.
TransferSides verify_transfer(const DiscreteMeasureAction& a, const Subset& F, const Subset& A,
                              const std::vector<Rational>& h);

struct CommutingReport {
  std::size_t sets_checked = 0;
  std::size_t failures = 0;
  std::string first_failure;
};
// phi_* nu_F == nu_F on every invariant subset. Throws NotCommuting or
// NotMeasurePreserving when phi violates the hypotheses.
CommutingReport verify_commuting(const DiscreteMeasureAction& a, const Subset& F, const std::vector<int>& phi);

// nu_F(GA & F) == 0  <=>  nu(A) == 0  <=>  nu(GA) == 0.
bool null_sets_correspond(const DiscreteMeasureAction& a, const Subset& F, const Subset& A);

// --- fixtures ----------------------------------------------------------------

// Z/2 acting on {-1, 0, 1} by negation, counting measure.
DiscreteMeasureAction negation_fixture();
// Z/3 rotating three points, counting measure.
DiscreteMeasureAction free_rotation_fixture();
Subset subset_of(int n, std::initializer_list<int> members);

// Disjoint union of coset actions G/H_i with weight w_i on the i-th orbit.
DiscreteMeasureAction coset_action(const FiniteGroup& g, const std::vector<std::vector<int>>& subgroups,
                                   const std::vector<Rational>& weights);

// One representative per orbit (first, then last), and all of Z.
std::vector<Subset> orbit_domains(const DiscreteMeasureAction& a);
// z -> cz for central c, identity included.
std::vector<std::vector<int>> central_maps(const DiscreteMeasureAction& a);

struct LemmaTally {
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first;  // first failing instance
};
struct LemmaReport {
  LemmaTally reconstruction;
  LemmaTally independence;
  LemmaTally transfer;
  LemmaTally commuting;
  LemmaTally null_sets;
};
// Runs every identity on every domain (pairs of domains for independence).
// Transfer uses random orbit-constant h and random A; null sets are checked
// on all subsets when there are at most 16 points.
LemmaReport check_lemmas(const DiscreteMeasureAction& a, const std::vector<Subset>& domains,
                         const std::vector<std::vector<int>>& commuting, std::mt19937_64& rng);

struct RandomFixture {
  DiscreteMeasureAction action;
  std::vector<Subset> domains;            // at least two fundamental domains
  std::vector<std::vector<int>> commuting;  // maps commuting with the action, nu-preserving
};
RandomFixture random_fixture(std::mt19937_64& rng, int max_points = 12);

}  // namespace treeflow
