#include "treeflow/sampling.hpp"

namespace treeflow::sample {

std::uint64_t below(Engine& rng, std::uint64_t n) { return n == 0 ? 0 : rng() % n; }

Word word(Engine& rng, int rank, int min_len, int max_len) {
  int len = min_len + static_cast<int>(below(rng, static_cast<std::uint64_t>(max_len - min_len + 1)));
  std::vector<int> letters;
  while (static_cast<int>(letters.size()) < len) {
    int l = static_cast<int>(below(rng, static_cast<std::uint64_t>(2 * rank)));
    if (!letters.empty() && l == letter_inverse(letters.back())) continue;
    letters.push_back(l);
  }
  return Word(std::move(letters));
}

TreePoint vertex(const MetricGraph& g, Engine& rng, int max_len) {
  Word w = word(rng, g.rank(), 0, max_len);
  int v = static_cast<int>(below(rng, static_cast<std::uint64_t>(g.num_vertices())));
  return vertex_at(concat_reduce(g.loop_of(w), g.tree_path(v)));
}

TreePoint point(const MetricGraph& g, Engine& rng, int max_len) {
  TreePoint v = vertex(g, rng, max_len);
  if (below(rng, 2) == 0) return v;
  auto out = g.out_edges(quotient_vertex(g, v));
  int f = out[below(rng, out.size())];
  Rational frac = ratio(static_cast<long>(1 + below(rng, 3)), 4);
  return make_point(g, v.path, f, g.length(f) * frac);
}

End end(const MetricGraph& g, Engine& rng, int max_len) {
  Word prefix = word(rng, g.rank(), 0, max_len);
  Word period = word(rng, g.rank(), 1, 3);
  return end_from_words(g, prefix, period);
}

}  // namespace treeflow::sample
