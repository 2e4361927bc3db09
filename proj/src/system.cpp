#include "opsysindex/system.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace opsys {

Graph::Graph(int vertices, std::vector<std::pair<int, int>> edge_list) : n(vertices) {
  if (n <= 0) throw std::invalid_argument("Graph: vertex count must be positive");
  std::set<std::pair<int, int>> norm;
  for (auto [i, j] : edge_list) {
    if (i == j) throw std::invalid_argument("Graph: self-loops are not allowed");
    if (i < 0 || j < 0 || i >= n || j >= n)
      throw std::invalid_argument("Graph: vertex index out of range");
    norm.emplace(std::min(i, j), std::max(i, j));
  }
  edges.assign(norm.begin(), norm.end());
}

bool Graph::adjacent(int i, int j) const {
  if (i == j) return false;
  auto e = std::minmax(i, j);
  return std::binary_search(edges.begin(), edges.end(), std::make_pair(e.first, e.second));
}

Graph Graph::complement() const {
  std::vector<std::pair<int, int>> out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (!adjacent(i, j)) out.emplace_back(i, j);
  return Graph(n, out);
}

Graph Graph::complete(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, e);
}

Graph Graph::edgeless(int n) { return Graph(n, {}); }

Graph Graph::path(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, e);
}

Graph Graph::cycle(int n) {
  if (n < 3) throw std::invalid_argument("Graph::cycle: need at least 3 vertices");
  auto g = path(n);
  std::vector<std::pair<int, int>> e = g.edges;
  e.emplace_back(0, n - 1);
  return Graph(n, e);
}

Graph Graph::petersen_induced(int k) {
  if (k < 1 || k > 10) throw std::invalid_argument("petersen_induced: k must be in 1..10");
  std::vector<std::pair<int, int>> all;
  for (int i = 0; i < 5; ++i) {
    all.emplace_back(i, (i + 1) % 5);          // outer cycle
    all.emplace_back(i, i + 5);                // spokes
    all.emplace_back(5 + i, 5 + (i + 2) % 5);  // inner pentagram
  }
  std::vector<std::pair<int, int>> kept;
  for (auto [i, j] : all)
    if (i < k && j < k) kept.emplace_back(i, j);
  return Graph(k, kept);
}

void MatricialSystem::validate() const {
  basis.validate();
  if (basis.ambient_dim != ambient_dim)
    throw std::invalid_argument("MatricialSystem: ambient dimension mismatch");
  CMat id = CMat::Identity(ambient_dim, ambient_dim);
  bool has_unit = opsys::contains(basis, id, 1e-9);
  if (contains_unit != has_unit)
    throw std::invalid_argument("MatricialSystem: contains_unit flag inconsistent with span");
}

void KernelSpace::validate() const {
  basis.validate();
  if (basis.ambient_dim != ambient_dim)
    throw std::invalid_argument("KernelSpace: ambient dimension mismatch");
  CMat id = CMat::Identity(ambient_dim, ambient_dim);
  if ((id - project(basis, id)).norm() < 1e-6)
    throw std::invalid_argument("KernelSpace: span contains the unit");
}

MatricialSystem make_system(int ambient_dim, const std::vector<CMat>& spanning) {
  MatricialSystem s;
  s.ambient_dim = ambient_dim;
  s.basis = orthonormalize(ambient_dim, spanning);
  s.contains_unit = opsys::contains(s.basis, CMat::Identity(ambient_dim, ambient_dim), 1e-9);
  return s;
}

KernelSpace make_kernel(int ambient_dim, const std::vector<CMat>& spanning) {
  KernelSpace k;
  k.ambient_dim = ambient_dim;
  k.basis = orthonormalize(ambient_dim, spanning);
  k.validate();
  return k;
}

namespace {
void push_offdiag_units(std::vector<CMat>& v, int n, int i, int j) {
  const double s = 1.0 / std::sqrt(2.0);
  CMat sym = CMat::Zero(n, n);
  sym(i, j) = s;
  sym(j, i) = s;
  v.push_back(sym);
  CMat asym = CMat::Zero(n, n);
  asym(i, j) = Cplx(0, s);
  asym(j, i) = Cplx(0, -s);
  v.push_back(asym);
}
}  // namespace

MatricialSystem graph_system(const Graph& g) {
  std::vector<CMat> span;
  for (int i = 0; i < g.n; ++i) span.push_back(matrix_unit(g.n, i, i));
  for (auto [i, j] : g.edges) push_offdiag_units(span, g.n, i, j);
  return make_system(g.n, span);
}

MatricialSystem graph_system_equal_diag(const Graph& g) {
  std::vector<CMat> span;
  span.push_back(CMat::Identity(g.n, g.n) / std::sqrt(double(g.n)));
  for (auto [i, j] : g.edges) push_offdiag_units(span, g.n, i, j);
  return make_system(g.n, span);
}

MatricialSystem full_system(int n) { return make_system(n, herm_basis_full(n)); }

MatricialSystem diagonal_system(int n) { return graph_system(Graph::edgeless(n)); }

MatricialSystem scalar_system(int n) {
  return make_system(n, {CMat::Identity(n, n) / std::sqrt(double(n))});
}

MatricialSystem equal_diag_system(int n) {
  return graph_system_equal_diag(Graph::complete(n));
}

KernelSpace perp(const MatricialSystem& s) {
  KernelSpace k;
  k.ambient_dim = s.ambient_dim;
  k.basis = complement(s.basis);
  if (s.contains_unit) k.validate();
  return k;
}

MatricialSystem perp(const KernelSpace& j) {
  MatricialSystem s;
  s.ambient_dim = j.ambient_dim;
  s.basis = complement(j.basis);
  s.contains_unit = opsys::contains(s.basis, CMat::Identity(j.ambient_dim, j.ambient_dim), 1e-9);
  return s;
}

bool contains(const MatricialSystem& s, const CMat& x, double tol) {
  return contains(s.basis, x, tol);
}

bool contains(const KernelSpace& s, const CMat& x, double tol) {
  return contains(s.basis, x, tol);
}

MatricialSystem tensor_system(const MatricialSystem& s, const MatricialSystem& t) {
  std::vector<CMat> span;
  span.reserve(size_t(s.dim()) * t.dim());
  for (const auto& a : s.basis.elements)
    for (const auto& b : t.basis.elements) span.push_back(kron(a, b));
  return make_system(s.ambient_dim * t.ambient_dim, span);
}

MatricialSystem direct_sum_system(const MatricialSystem& s, const MatricialSystem& t) {
  const int n = s.ambient_dim, k = t.ambient_dim, d = n + k;
  std::vector<CMat> span;
  for (const auto& a : s.basis.elements) {
    CMat m = CMat::Zero(d, d);
    m.topLeftCorner(n, n) = a;
    span.push_back(m);
  }
  for (const auto& b : t.basis.elements) {
    CMat m = CMat::Zero(d, d);
    m.bottomRightCorner(k, k) = b;
    span.push_back(m);
  }
  return make_system(d, span);
}

HermitianBasis traceless_part(const MatricialSystem& s) {
  const int n = s.ambient_dim;
  CMat id = CMat::Identity(n, n);
  std::vector<CMat> span;
  for (const auto& e : s.basis.elements) {
    CMat t = e - (hs_inner(id, e) / double(n)) * id;
    if (t.norm() > 1e-12) span.push_back(t);
  }
  if (span.empty()) {
    HermitianBasis empty;
    empty.ambient_dim = n;
    return empty;
  }
  return orthonormalize(n, span);
}

}  // namespace opsys
