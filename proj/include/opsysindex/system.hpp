#pragma once

#include "opsysindex/basis.hpp"

#include <utility>

namespace opsys {

// Simple undirected graph; edges normalized to i < j, deduplicated, loop-free.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;

  Graph() = default;
  Graph(int vertices, std::vector<std::pair<int, int>> edge_list);

  bool adjacent(int i, int j) const;  // false on the diagonal
  Graph complement() const;
  int edge_count() const { return int(edges.size()); }

  static Graph complete(int n);
  static Graph edgeless(int n);
  static Graph path(int n);   // 0-1-2-..-(n-1)
  static Graph cycle(int n);  // path plus closing edge
  // Induced subgraph of the Petersen graph on its first k vertices (k <= 10);
  // vertices 0..4 outer cycle, 5..9 inner pentagram, spokes i - (i+5).
  static Graph petersen_induced(int k);
};

// A unital, *-closed subspace of M_n carried by an orthonormal Hermitian basis.
struct MatricialSystem {
  int ambient_dim = 0;
  HermitianBasis basis;
  bool contains_unit = false;

  int dim() const { return basis.dim(); }
  void validate() const;
};

// A *-closed subspace not containing the unit (e.g. the orthogonal complement
// of a unital system); target of annihilation constraints.
struct KernelSpace {
  int ambient_dim = 0;
  HermitianBasis basis;

  int dim() const { return basis.dim(); }
  void validate() const;
};

MatricialSystem make_system(int ambient_dim, const std::vector<CMat>& spanning);
KernelSpace make_kernel(int ambient_dim, const std::vector<CMat>& spanning);

// Span{E_ij : i = j or i ~ j}: diagonal plus supports over edges.
MatricialSystem graph_system(const Graph& g);
// C I_n plus the off-diagonal supports over edges (constant-diagonal variant).
MatricialSystem graph_system_equal_diag(const Graph& g);

MatricialSystem full_system(int n);      // M_n
MatricialSystem diagonal_system(int n);  // diagonal matrices
MatricialSystem scalar_system(int n);    // C I_n
MatricialSystem equal_diag_system(int n);  // constant diagonal, arbitrary off-diagonal

KernelSpace perp(const MatricialSystem& s);
MatricialSystem perp(const KernelSpace& j);

bool contains(const MatricialSystem& s, const CMat& x, double tol = 1e-9);
bool contains(const KernelSpace& s, const CMat& x, double tol = 1e-9);

// Minimal tensor product realized concretely inside M_{n*k}.
MatricialSystem tensor_system(const MatricialSystem& s, const MatricialSystem& t);

// Block-diagonal direct sum inside M_{n+k}.
MatricialSystem direct_sum_system(const MatricialSystem& s, const MatricialSystem& t);

// Orthonormal basis of the traceless part of the system (dim - 1 elements).
HermitianBasis traceless_part(const MatricialSystem& s);

}  // namespace opsys
