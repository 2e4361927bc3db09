#include "doctest.h"
#include "opsysindex/system.hpp"
#include "test_util.hpp"

using namespace opsys;

TEST_CASE("graph constructors normalize edges") {
  Graph g(4, {{2, 0}, {0, 2}, {1, 3}});
  CHECK(g.edge_count() == 2);
  CHECK(g.adjacent(0, 2));
  CHECK(g.adjacent(2, 0));
  CHECK(!g.adjacent(0, 1));
  CHECK(!g.adjacent(1, 1));
  CHECK_THROWS_AS(Graph(3, {{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(Graph(3, {{0, 3}}), std::invalid_argument);
}

TEST_CASE("standard graphs") {
  Graph c5 = Graph::cycle(5);
  CHECK(c5.edge_count() == 5);
  CHECK(c5.adjacent(0, 4));
  Graph pent = c5.complement();
  CHECK(pent.edge_count() == 5);
  CHECK(pent.adjacent(0, 2));
  CHECK(!pent.adjacent(0, 1));

  Graph pete = Graph::petersen_induced(10);
  CHECK(pete.n == 10);
  CHECK(pete.edge_count() == 15);
  for (int v = 0; v < 10; ++v) {
    int deg = 0;
    for (int w = 0; w < 10; ++w) deg += pete.adjacent(v, w) ? 1 : 0;
    CHECK(deg == 3);
  }

  CHECK(Graph::complete(3).edge_count() == 3);
  CHECK(Graph::edgeless(4).edge_count() == 0);
  CHECK(Graph::path(4).edge_count() == 3);
}

TEST_CASE("graph system dimensions") {
  Graph c5 = Graph::cycle(5);
  MatricialSystem s = graph_system(c5);
  s.validate();
  CHECK(s.ambient_dim == 5);
  CHECK(s.dim() == 15);  // 5 diagonal + 2 per edge
  CHECK(s.contains_unit);
  CMat e01 = matrix_unit(5, 0, 1) + matrix_unit(5, 1, 0);
  CMat e02 = matrix_unit(5, 0, 2) + matrix_unit(5, 2, 0);
  CHECK(contains(s, e01));
  CHECK(!contains(s, e02));

  MatricialSystem eq = graph_system_equal_diag(c5);
  CHECK(eq.dim() == 11);  // unit + 2 per edge
  CHECK(eq.contains_unit);
  CHECK(contains(eq, CMat::Identity(5, 5)));
  CHECK(!contains(eq, matrix_unit(5, 0, 0)));
}

TEST_CASE("named systems") {
  CHECK(full_system(3).dim() == 9);
  CHECK(diagonal_system(3).dim() == 3);
  CHECK(scalar_system(4).dim() == 1);
  CHECK(equal_diag_system(3).dim() == 7);  // n^2 - n + 1
  CHECK(scalar_system(4).contains_unit);
}

TEST_CASE("orthocomplement round trips") {
  MatricialSystem s = graph_system(Graph::cycle(5));
  KernelSpace k = perp(s);
  k.validate();
  CHECK(k.dim() == 25 - 15);
  MatricialSystem back = perp(k);
  CHECK(back.dim() == s.dim());
  RMat p1 = span_projector(s.basis);
  RMat p2 = span_projector(back.basis);
  CHECK((p1 - p2).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("kernel spaces refuse the unit") {
  CHECK_THROWS_AS(make_kernel(2, {CMat::Identity(2, 2)}), std::invalid_argument);
  KernelSpace k = make_kernel(2, {matrix_unit(2, 0, 0) - matrix_unit(2, 1, 1)});
  CHECK(k.dim() == 1);
}

TEST_CASE("tensor systems") {
  MatricialSystem m2 = full_system(2);
  MatricialSystem c3 = scalar_system(3);
  MatricialSystem t = tensor_system(m2, c3);
  CHECK(t.ambient_dim == 6);
  CHECK(t.dim() == 4);
  CHECK(t.contains_unit);
  CMat x = kron(matrix_unit(2, 0, 1) + matrix_unit(2, 1, 0), CMat::Identity(3, 3));
  CHECK(contains(t, x));
  CHECK(!contains(t, kron(matrix_unit(2, 0, 0), matrix_unit(3, 0, 0))));

  // tensoring with scalars preserves dimension; with full M_k multiplies it
  MatricialSystem tt = tensor_system(graph_system_equal_diag(Graph::cycle(5)), full_system(2));
  CHECK(tt.dim() == 11 * 4);
}

TEST_CASE("direct sums") {
  MatricialSystem d = direct_sum_system(scalar_system(1), scalar_system(1));
  CHECK(d.ambient_dim == 2);
  CHECK(d.dim() == 2);
  CHECK(d.contains_unit);
  MatricialSystem d2 = direct_sum_system(full_system(2), scalar_system(2));
  CHECK(d2.ambient_dim == 4);
  CHECK(d2.dim() == 5);
}

TEST_CASE("traceless parts") {
  MatricialSystem s = graph_system(Graph::cycle(5));
  HermitianBasis t = traceless_part(s);
  CHECK(t.dim() == 14);
  for (const auto& e : t.elements) CHECK(std::abs(e.trace()) < 1e-10);
  t.validate();

  HermitianBasis t0 = traceless_part(scalar_system(3));
  CHECK(t0.dim() == 0);
}
