#include <algorithm>
#include <unordered_set>

#include "latq/error.hpp"
#include "latq/symmetry.hpp"

namespace latq {

PermGroup stabilizer(const PermGroup& h, Point x, std::size_t orbit_size,
                     const std::function<Perm(Point)>& transporter, const Action& act,
                     std::uint64_t seed) {
  Integer order = h.order();
  if (order % static_cast<unsigned long>(orbit_size) != 0)
    fail(ErrorKind::Consistency, "orbit size does not divide the group order");
  Integer target = order / static_cast<unsigned long>(orbit_size);
  auto rng = std::make_shared<std::mt19937_64>(seed);
  return PermGroup::with_known_order(h.degree(), {}, target, [&h, &transporter, &act, x, rng] {
    Perm g = h.random_element(*rng);
    return transporter(act(x, g)).inverse() * g;
  });
}

PermGroup stabilizer(const PermGroup& h, Point x, const Action& act, std::uint64_t seed) {
  OrbitTree tree(x, h.generators_ptr(), act);
  return stabilizer(h, x, tree.size(), [&tree](Point p) { return tree.transporter(p); }, act, seed);
}

PermGroup set_stabilizer(const PermGroup& h, const std::vector<Point>& set, const Action& act,
                         std::uint64_t seed) {
  std::vector<Point> xs(set);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (xs.empty()) return h;
  std::unordered_set<Point> in_set(xs.begin(), xs.end());

  // Pointwise stabilizer chain K_0 = H > K_1 > ... with orbit trees, built on demand.
  std::vector<std::shared_ptr<const PermGroup>> chain{std::make_shared<PermGroup>(h)};
  std::vector<std::unique_ptr<OrbitTree>> trees;
  auto level = [&](std::size_t k) {
    while (trees.size() <= k) {
      std::size_t j = trees.size();
      trees.push_back(std::make_unique<OrbitTree>(xs[j], chain[j]->generators_ptr(), act));
      chain.push_back(std::make_shared<PermGroup>(stabilizer(*chain[j], xs[j], act, seed + j)));
    }
  };

  std::vector<Perm> leaves;
  std::size_t depth_end = xs.size();
  std::vector<char> used(xs.size(), 0);
  std::function<void(std::size_t, const Perm&)> dfs = [&](std::size_t k, const Perm& g) {
    if (k == xs.size() || chain[k]->is_trivial()) {
      for (std::size_t i = k; i < xs.size(); ++i)
        if (!in_set.count(act(xs[i], g))) return;
      depth_end = std::min(depth_end, k);
      leaves.push_back(g);
      return;
    }
    level(k);
    Perm gi = g.inverse();
    for (std::size_t t = 0; t < xs.size(); ++t) {
      if (used[t]) continue;
      Point z = act(xs[t], gi);
      if (!trees[k]->contains(z)) continue;
      used[t] = 1;
      dfs(k + 1, g * trees[k]->transporter(z));
      used[t] = 0;
    }
  };
  level(0);
  dfs(0, h.identity());
  // every leaf sits at the same depth: K_k is trivial from the same k on
  const PermGroup& tail = *chain[std::min(depth_end, chain.size() - 1)];
  std::vector<Perm> gens = tail.generators();
  for (const Perm& g : leaves) gens.push_back(g);
  Integer order = tail.order() * static_cast<unsigned long>(leaves.size());
  return PermGroup::with_known_order(h.degree(), gens, order, seed);
}

bool Coset::contains(const Perm& g) const {
  if (empty()) return false;
  return group->contains(rep.inverse() * g);
}

Integer Coset::size() const { return empty() ? Integer(0) : group->order(); }

namespace {

Coset coset_from_elements(const std::vector<Perm>& elems, std::size_t degree) {
  if (elems.empty()) return Coset::none();
  const Perm& g0 = elems.front();
  Perm g0i = g0.inverse();
  std::vector<Perm> gens;
  for (const Perm& e : elems) {
    Perm k = g0i * e;
    if (!k.is_identity()) gens.push_back(std::move(k));
  }
  auto group = std::make_shared<PermGroup>(
      PermGroup::with_known_order(degree, gens, Integer(static_cast<unsigned long>(elems.size()))));
  return {g0, group};
}

}  // namespace

Coset coset_intersect(const Coset& a, const Coset& b, std::size_t threshold) {
  if (a.empty() || b.empty()) return Coset::none();
  const std::size_t degree = a.group->degree();
  const bool a_small = a.group->order() <= static_cast<unsigned long>(threshold);
  const bool b_small = b.group->order() <= static_cast<unsigned long>(threshold);
  if (a_small || b_small) {
    const Coset& s = (a_small && (!b_small || a.group->order() <= b.group->order())) ? a : b;
    const Coset& o = (&s == &a) ? b : a;
    std::vector<Perm> found;
    s.group->for_each_element([&](const Perm& h) {
      Perm g = s.rep * h;
      if (o.contains(g)) found.push_back(std::move(g));
      return true;
    });
    return coset_from_elements(found, degree);
  }

  // Backtrack over a's subgroup; b's subgroup rebased so partial images can be tested.
  const PermGroup& ha = *a.group;
  std::vector<Point> base = ha.base();
  PermGroup hb = b.group->rebase(base);
  Perm rbi = b.rep.inverse();
  std::vector<Perm> found;
  const std::size_t budget = 1000000;
  std::function<void(std::size_t, const Perm&)> dfs = [&](std::size_t l, const Perm& f) {
    // prefix test: rep_b^-1 f must agree with hb on the first l base points
    Perm k = rbi * f;
    for (std::size_t i = 0; i < l; ++i) {
      Point p = k[base[i]];
      if (!hb.in_basic_orbit(i, p)) return;
      k = hb.strip(i, p, std::move(k));
    }
    if (l == base.size()) {
      if (b.contains(f)) {
        found.push_back(f);
        if (found.size() > budget) fail(ErrorKind::BudgetExceeded, "coset intersection too large");
      }
      return;
    }
    for (Point p : ha.basic_orbit(l)) dfs(l + 1, f * ha.transversal(l, p));
  };
  dfs(0, a.rep);
  return coset_from_elements(found, degree);
}

Coset coset_restrict(const Coset& pool, Point x, Point y, const OrbitTree& tree,
                     std::shared_ptr<const PermGroup> stab, const Action& act) {
  if (pool.empty()) return Coset::none();
  Point z = act(y, pool.rep.inverse());
  if (!tree.contains(z)) return Coset::none();
  Perm g = pool.rep * tree.transporter(z);
  if (act(x, g) != y) fail(ErrorKind::Consistency, "transporter does not map x to y");
  return {std::move(g), std::move(stab)};
}

}  // namespace latq
