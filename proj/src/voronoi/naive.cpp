#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "latq/error.hpp"
#include "latq/naive.hpp"

namespace latq {

namespace {

struct CanonicalLess {
  bool operator()(const QVec& a, const QVec& b) const { return canonical_less(a, b); }
};

std::size_t affine_rank(const std::vector<QVec>& pts, const std::vector<std::size_t>& idx) {
  if (idx.empty()) return 0;
  QMat rows;
  for (std::size_t i = 1; i < idx.size(); ++i) rows.push_back(sub(pts[idx[i]], pts[idx[0]]));
  return rows.empty() ? 0 : rank(rows);
}

}  // namespace

NaiveCell naive_cell(const Lattice& l, const std::vector<QVec>& relevant) {
  const std::size_t n = l.dim();
  const std::size_t m = relevant.size();
  std::vector<QVec> mr;
  std::vector<Rational> rhs;
  for (const QVec& r : relevant) {
    mr.push_back(vecmat(r, l.metric));
    rhs.push_back(dot(mr.back(), r));
  }
  auto inside = [&](const QVec& x) {
    for (std::size_t i = 0; i < m; ++i)
      if (2 * dot(x, mr[i]) > rhs[i]) return false;
    return true;
  };

  std::set<QVec, CanonicalLess> found;
  std::vector<std::size_t> pick(n);
  std::function<void(std::size_t, std::size_t)> choose = [&](std::size_t k, std::size_t from) {
    if (k == n) {
      QMat a;
      QVec b;
      for (std::size_t i : pick) {
        a.push_back(mr[i]);
        b.push_back(rhs[i] / 2);
      }
      auto x = solve(a, b);
      if (x && inside(*x)) found.insert(*x);
      return;
    }
    for (std::size_t i = from; i < m; ++i) {
      pick[k] = i;
      choose(k + 1, i + 1);
    }
  };
  choose(0, 0);

  NaiveCell cell;
  cell.vertices.assign(found.begin(), found.end());
  const std::size_t nv = cell.vertices.size();
  cell.levels.resize(n + 1);
  std::vector<std::size_t> all(nv);
  for (std::size_t i = 0; i < nv; ++i) all[i] = i;
  cell.levels[n].push_back({static_cast<int>(n), all, {}});

  std::set<std::vector<std::size_t>> facet_sets;
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::size_t> vs;
    for (std::size_t v = 0; v < nv; ++v)
      if (2 * dot(cell.vertices[v], mr[i]) == rhs[i]) vs.push_back(v);
    if (affine_rank(cell.vertices, vs) == n - 1) facet_sets.insert(vs);
  }
  for (const auto& s : facet_sets) cell.levels[n - 1].push_back({static_cast<int>(n) - 1, s, {}});

  for (std::size_t d = n - 1; d >= 1; --d) {
    std::set<std::vector<std::size_t>> next;
    const auto& lv = cell.levels[d];
    for (std::size_t i = 0; i < lv.size(); ++i)
      for (std::size_t j = i + 1; j < lv.size(); ++j) {
        std::vector<std::size_t> c;
        std::set_intersection(lv[i].vertices.begin(), lv[i].vertices.end(), lv[j].vertices.begin(),
                              lv[j].vertices.end(), std::back_inserter(c));
        if (!c.empty() && affine_rank(cell.vertices, c) == d - 1) next.insert(c);
      }
    for (const auto& s : next) cell.levels[d - 1].push_back({static_cast<int>(d) - 1, s, {}});
  }
  for (std::size_t d = 1; d <= n; ++d)
    for (auto& f : cell.levels[d])
      for (std::size_t c = 0; c < cell.levels[d - 1].size(); ++c) {
        const auto& cv = cell.levels[d - 1][c].vertices;
        if (std::includes(f.vertices.begin(), f.vertices.end(), cv.begin(), cv.end())) f.children.push_back(c);
      }

  // pulling triangulation: cone from the smallest vertex over the faces that miss it
  std::function<std::vector<std::vector<std::size_t>>(std::size_t, std::size_t)> simplices =
      [&](std::size_t d, std::size_t f) -> std::vector<std::vector<std::size_t>> {
    const NaiveFace& face = cell.levels[d][f];
    if (d == 0) return {face.vertices};
    std::size_t apex = face.vertices.front();
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t c : face.children) {
      const auto& cv = cell.levels[d - 1][c].vertices;
      if (std::binary_search(cv.begin(), cv.end(), apex)) continue;
      for (auto s : simplices(d - 1, c)) {
        s.push_back(apex);
        out.push_back(std::move(s));
      }
    }
    return out;
  };

  Rational nfact = 1;
  for (std::size_t k = 2; k <= n; ++k) nfact *= static_cast<unsigned long>(k);
  cell.volume = 0;
  cell.tensor.assign(n, QVec(n, Rational(0)));
  for (const auto& s : simplices(n, 0)) {
    QMat e;
    for (std::size_t i = 1; i < s.size(); ++i) e.push_back(sub(cell.vertices[s[i]], cell.vertices[s[0]]));
    Rational vol = abs(determinant(e)) / nfact;
    cell.volume += vol;
    QVec sum(n, Rational(0));
    QMat t(n, QVec(n, Rational(0)));
    for (std::size_t i : s) {
      const QVec& v = cell.vertices[i];
      sum = add(sum, v);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) t[a][b] += v[a] * v[b];
    }
    Rational w = vol / Rational(static_cast<unsigned long>((n + 1) * (n + 2)));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) cell.tensor[a][b] += w * (t[a][b] + sum[a] * sum[b]);
  }
  cell.second_moment = 0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) cell.second_moment += l.metric[a][b] * cell.tensor[a][b];
  return cell;
}

}  // namespace latq
