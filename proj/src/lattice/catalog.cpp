#include <map>
#include <regex>

#include "latq/lattice.hpp"

namespace latq {

namespace {

using Block = std::vector<std::vector<ExactScalar>>;

ExactScalar s3() { return ExactScalar::sqrt_of(3); }
ExactScalar half() { return ExactScalar(Rational(1, 2)); }

// 2x2 blocks used by the Coxeter-Todd generator and its symmetries
const std::map<std::string, Block>& blocks() {
  static const std::map<std::string, Block> b = [] {
    std::map<std::string, Block> m;
    const ExactScalar h = half(), r = s3() * half();
    m["0"] = {{0, 0}, {0, 0}};
    m["I"] = {{1, 0}, {0, 1}};
    m["A"] = {{1, 0}, {-h, r}};
    m["W"] = {{-h, r}, {-h, -r}};
    m["S"] = {{1, 0}, {0, -1}};
    m["V"] = {{h, r}, {-r, h}};
    m["Vt"] = {{h, -r}, {r, h}};
    m["Y"] = {{-h, -r}, {-r, h}};
    m["Y'"] = {{-h, r}, {r, h}};
    return m;
  }();
  return b;
}

// token: [-][2]name
Block block(const std::string& tok) {
  std::string t = tok;
  ExactScalar f(1);
  if (!t.empty() && t[0] == '-') {
    f = -f;
    t = t.substr(1);
  }
  if (!t.empty() && t[0] == '2' && t.size() > 1) {
    f *= ExactScalar(2);
    t = t.substr(1);
  }
  auto it = blocks().find(t);
  if (it == blocks().end()) fail(ErrorKind::Parse, "unknown block " + tok);
  Block b = it->second;
  for (auto& row : b)
    for (auto& x : row) x *= f;
  return b;
}

// Builds a (2k + extra) square matrix from k x k block tokens; the trailing
// `extra` diagonal entries get `corner`. Everything is scaled by `scale`.
ExactMatrix from_blocks(const std::vector<std::vector<std::string>>& rows, std::size_t extra = 0,
                        ExactScalar corner = ExactScalar(1), ExactScalar scale = ExactScalar(1)) {
  const std::size_t k = rows.size(), n = 2 * k + extra;
  ExactMatrix m(n, ExactVector(n));
  for (std::size_t bi = 0; bi < k; ++bi)
    for (std::size_t bj = 0; bj < k; ++bj) {
      Block b = block(rows[bi][bj]);
      for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) m[2 * bi + i][2 * bj + j] = b[i][j] * scale;
    }
  for (std::size_t e = 0; e < extra; ++e) m[2 * k + e][2 * k + e] = corner * scale;
  return m;
}

ExactMatrix k12_generator() {
  return from_blocks({{"2A", "0", "0", "0", "0", "0"},
                      {"0", "2A", "0", "0", "0", "0"},
                      {"0", "0", "2A", "0", "0", "0"},
                      {"A", "W", "W", "A", "0", "0"},
                      {"W", "A", "W", "0", "A", "0"},
                      {"W", "W", "A", "0", "0", "A"}});
}

std::vector<ExactMatrix> k12_symmetry() {
  ExactMatrix m1 = from_blocks({{"0", "I", "0", "0", "0", "0"},
                                {"I", "0", "0", "0", "0", "0"},
                                {"0", "0", "I", "0", "0", "0"},
                                {"0", "0", "0", "0", "I", "0"},
                                {"0", "0", "0", "I", "0", "0"},
                                {"0", "0", "0", "0", "0", "I"}});
  ExactMatrix m2 = from_blocks({{"0", "0", "0", "0", "0", "S"},
                                {"0", "0", "0", "0", "S", "0"},
                                {"0", "0", "0", "S", "0", "0"},
                                {"0", "0", "S", "0", "0", "0"},
                                {"0", "S", "0", "0", "0", "0"},
                                {"S", "0", "0", "0", "0", "0"}});
  ExactMatrix m3 = from_blocks({{"I", "V", "-I", "0", "V", "0"},
                                {"Vt", "I", "Vt", "0", "-I", "0"},
                                {"-I", "V", "I", "0", "V", "0"},
                                {"0", "0", "0", "2I", "0", "0"},
                                {"Vt", "-I", "Vt", "0", "I", "0"},
                                {"0", "0", "0", "0", "0", "2I"}},
                               0, ExactScalar(1), half());
  return {m1, m2, m3};
}

std::vector<ExactMatrix> laminated_k12_symmetry() {
  ExactMatrix m1 = from_blocks({{"0", "I", "0", "V", "-I", "-V"},
                                {"0", "-V", "V", "0", "-I", "I"},
                                {"2Vt", "0", "0", "0", "0", "0"},
                                {"0", "0", "-I", "V", "V", "I"},
                                {"0", "I", "V", "-I", "V", "0"},
                                {"0", "V", "I", "I", "0", "V"}},
                               1, ExactScalar(2), half());
  ExactMatrix m2 = from_blocks({{"0", "-S", "0", "Y", "-S", "Y"},
                                {"2S", "0", "0", "0", "0", "0"},
                                {"0", "Y'", "0", "-S", "-Y'", "S"},
                                {"0", "0", "-2S", "0", "0", "0"},
                                {"0", "Y'", "0", "S", "-Y'", "-S"},
                                {"0", "-S", "0", "-Y", "-S", "-Y"}},
                               1, ExactScalar(2), half());
  ExactMatrix m3(13, ExactVector(13));
  for (std::size_t i = 0; i < 13; ++i) m3[i][i] = ExactScalar(i < 8 ? 1 : -1);
  return {m1, m2, m3};
}

// Signed permutations: transposition, n-cycle, sign flip.
std::vector<QMat> signed_permutations(std::size_t n) {
  std::vector<QMat> g;
  if (n >= 2) {
    QMat t = identity<Rational>(n);
    std::swap(t[0], t[1]);
    g.push_back(t);
  }
  if (n >= 3) {
    QMat c(n, QVec(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) c[i][(i + 1) % n] = 1;
    g.push_back(c);
  }
  QMat f = identity<Rational>(n);
  f[0][0] = -1;
  g.push_back(f);
  return g;
}

// A_n in the simple-root basis: S_{n+1} x {+-1} acting on e_i - e_{i+1}.
std::vector<QMat> an_symmetry(std::size_t n) {
  auto root_coords = [n](std::size_t a, std::size_t b) {
    // e_a - e_b in the basis alpha_k = e_k - e_{k+1}
    QVec v(n, Rational(0));
    if (a < b)
      for (std::size_t k = a; k < b; ++k) v[k] += 1;
    else
      for (std::size_t k = b; k < a; ++k) v[k] -= 1;
    return v;
  };
  auto from_perm = [&](const std::vector<std::size_t>& sigma) {
    QMat r;
    for (std::size_t i = 0; i < n; ++i) r.push_back(root_coords(sigma[i], sigma[i + 1]));
    return r;
  };
  std::vector<QMat> g;
  std::vector<std::size_t> t(n + 1), c(n + 1);
  for (std::size_t i = 0; i <= n; ++i) {
    t[i] = i;
    c[i] = (i + 1) % (n + 1);
  }
  std::swap(t[0], t[1]);
  g.push_back(from_perm(t));
  if (n >= 2) g.push_back(from_perm(c));
  QMat neg = identity<Rational>(n);
  for (auto& row : neg)
    for (auto& x : row) x = -x;
  g.push_back(neg);
  return g;
}

}  // namespace

QVec k12_deep_hole_frame() {
  static const QVec v = [] {
    Lattice k = lattice_from_generator("K12", k12_generator());
    ExactVector h(12);
    h[9] = ExactScalar(Rational(2, 3)) * s3();
    h[11] = ExactScalar(Rational(2, 3)) * s3();
    return k.cartesian_to_frame(h);
  }();
  return v;
}

std::vector<std::string> catalog_names() { return {"Z<n>", "A<n>", "D<n>", "K12", "K12-laminated"}; }

Lattice catalog_lattice(const std::string& name, std::optional<Rational> a) {
  std::smatch m;
  static const std::regex fam("([ZAD])([0-9]+)");
  if (std::regex_match(name, m, fam)) {
    const std::size_t n = std::stoul(m[2]);
    if (n < 1 || n > 24) fail(ErrorKind::Parameter, "catalog dimension out of range: " + name);
    const char kind = m[1].str()[0];
    Lattice l;
    if (kind == 'Z') {
      ExactMatrix e(n, ExactVector(n));
      for (std::size_t i = 0; i < n; ++i) e[i][i] = ExactScalar(1);
      l = lattice_from_generator(name, e);
      set_frame_symmetry(l, signed_permutations(n));
    } else if (kind == 'D') {
      if (n < 2) fail(ErrorKind::Parameter, "D<n> needs n >= 2");
      l.name = name;
      l.metric = identity<Rational>(n);
      l.embedding = ExactMatrix(n, ExactVector(n));
      for (std::size_t i = 0; i < n; ++i) (*l.embedding)[i][i] = ExactScalar(1);
      l.basis.assign(n, QVec(n, Rational(0)));
      l.basis[0][0] = -1;
      l.basis[0][1] = -1;
      for (std::size_t i = 1; i < n; ++i) {
        l.basis[i][i - 1] = 1;
        l.basis[i][i] = -1;
      }
      set_frame_symmetry(l, signed_permutations(n));
    } else {
      QMat g(n, QVec(n, Rational(0)));
      for (std::size_t i = 0; i < n; ++i) {
        g[i][i] = 1;
        if (i + 1 < n) g[i][i + 1] = g[i + 1][i] = Rational(-1, 2);
      }
      if (n == 2) {
        ExactMatrix e = {{ExactScalar(1), ExactScalar(0)}, {-half(), s3() * half()}};
        l = lattice_from_generator(name, e);
      } else {
        l = lattice_from_gram(name, g);
      }
      set_frame_symmetry(l, an_symmetry(n));
    }
    return l;
  }
  if (name == "K12") {
    Lattice l = lattice_from_generator("K12", k12_generator());
    set_cartesian_symmetry(l, k12_symmetry());
    return l;
  }
  if (name == "K12-laminated") {
    Rational av = a.value_or(Rational(34, 33));
    Lattice l = laminate(catalog_lattice("K12"), k12_deep_hole_frame(), av);
    l.name = "K12-laminated";
    set_cartesian_symmetry(l, laminated_k12_symmetry());
    return l;
  }
  fail(ErrorKind::Parameter, "unknown catalog lattice '" + name + "'");
}

}  // namespace latq
