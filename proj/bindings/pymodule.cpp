// Python bindings: a thin functional surface over the library. Systems are
// passed as lists of complex square matrices (generators; the *-closed span
// is taken), graphs as a vertex count plus an edge list.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "opsysindex/cb.hpp"
#include "opsysindex/indices.hpp"
#include "opsysindex/system.hpp"
#include "opsysindex/theta.hpp"

#include <string>
#include <utility>
#include <vector>

namespace py = pybind11;
using namespace opsys;

namespace {

std::vector<CMat> star_closed(const std::vector<CMat>& raw) {
  std::vector<CMat> out;
  out.reserve(2 * raw.size());
  for (const CMat& b : raw) {
    out.push_back(0.5 * (b + b.adjoint()));
    out.push_back(Cplx(0, -0.5) * (b - b.adjoint()));
  }
  return out;
}

MatricialSystem system_of(const std::vector<CMat>& gens) {
  if (gens.empty()) throw std::invalid_argument("empty generator list");
  const int n = int(gens[0].rows());
  return make_system(n, star_closed(gens));
}

SdpOptions opt(double tol, int max_iter) {
  SdpOptions o;
  o.tol = tol;
  o.max_iter = max_iter;
  return o;
}

using Edges = std::vector<std::pair<int, int>>;

}  // namespace

PYBIND11_MODULE(_opsysindex, m) {
  m.doc() = "Index invariants for inclusions of matricial operator systems";

  m.def(
      "lovasz_theta",
      [](int n, const Edges& edges, const std::string& form, double tol, int max_iter) {
        const auto f = form == "s" ? ClassicalThetaForm::s_gamma : ClassicalThetaForm::e_gamma;
        return lovasz_theta(Graph(n, edges), f, opt(tol, max_iter)).value;
      },
      py::arg("n"), py::arg("edges"), py::arg("form") = "e", py::arg("tol") = 1e-8,
      py::arg("max_iter") = 500, "Classical theta number of a simple graph.");

  m.def(
      "relative_theta",
      [](int n, const Edges& edges, const Edges& sub_edges, double tol, int max_iter) {
        return relative_theta(Graph(n, edges), Graph(n, sub_edges), opt(tol, max_iter)).value;
      },
      py::arg("n"), py::arg("edges"), py::arg("sub_edges"), py::arg("tol") = 1e-8,
      py::arg("max_iter") = 500, "Relative theta of a graph and a spanning subgraph.");

  m.def(
      "quantum_theta",
      [](const std::vector<CMat>& gens, const std::string& form, double tol, int max_iter) {
        const auto f =
            form == "primal" ? QuantumThetaForm::dsw_primal : QuantumThetaForm::dsw_dual;
        return quantum_theta(system_of(gens), f, opt(tol, max_iter)).value;
      },
      py::arg("generators"), py::arg("form") = "dual", py::arg("tol") = 1e-8,
      py::arg("max_iter") = 500, "Quantum theta of the system spanned by the generators.");

  m.def(
      "cp_index",
      [](const std::vector<CMat>& gens, double tol, int max_iter) {
        return cp_index_primal(system_of(gens), opt(tol, max_iter)).value;
      },
      py::arg("generators"), py::arg("tol") = 1e-8, py::arg("max_iter") = 500,
      "Completely positive index of the full matrix algebra over the system.");

  m.def(
      "cp_index_dual",
      [](const std::vector<CMat>& gens, double tol, int max_iter) {
        return cp_index_dual(system_of(gens), opt(tol, max_iter)).value;
      },
      py::arg("generators"), py::arg("tol") = 1e-8, py::arg("max_iter") = 500,
      "Same index computed from the minimization form.");

  m.def(
      "cp_index_relative",
      [](const std::vector<CMat>& gens, const std::vector<CMat>& sub_gens, double tol,
         int max_iter) {
        return cp_index_relative(system_of(gens), system_of(sub_gens), opt(tol, max_iter)).value;
      },
      py::arg("generators"), py::arg("sub_generators"), py::arg("tol") = 1e-8,
      py::arg("max_iter") = 500, "Relative index of a nested pair of systems.");

  m.def(
      "lambda_tilde",
      [](const std::vector<CMat>& gens, double tol, int max_iter) {
        return lambda_tilde(system_of(gens), opt(tol, max_iter)).value;
      },
      py::arg("generators"), py::arg("tol") = 1e-8, py::arg("max_iter") = 500,
      "Index of the system over the scalars.");

  m.def(
      "coindex",
      [](const std::vector<CMat>& gens, double tol, int max_iter) {
        const MatricialSystem s = system_of(gens);
        return coindex(s.ambient_dim, perp(s), opt(tol, max_iter)).value;
      },
      py::arg("generators"), py::arg("tol") = 1e-8, py::arg("max_iter") = 500,
      "Co-index of the orthogonal complement of the system.");

  m.def(
      "cb_norm",
      [](const std::vector<CMat>& basis, const std::vector<CMat>& images, double tol,
         int max_iter) {
        if (basis.empty() || images.empty())
          throw std::invalid_argument("basis and images must be non-empty");
        SubspaceMap u;
        u.domain = operator_subspace(int(basis[0].rows()), basis);
        u.out_dim = int(images[0].rows());
        u.images = images;
        u.validate();
        return cb_norm(u, opt(tol, max_iter));
      },
      py::arg("basis"), py::arg("images"), py::arg("tol") = 1e-8, py::arg("max_iter") = 500,
      "Completely bounded norm of the map sending basis[k] to images[k].");

  m.def(
      "cb_index",
      [](const std::vector<CMat>& basis, const std::vector<CMat>& sub_basis, int restarts,
         std::uint64_t seed, double tol, int max_iter) {
        const OperatorSubspace x = operator_subspace(int(basis[0].rows()), basis);
        const OperatorSubspace x0 = operator_subspace(int(sub_basis[0].rows()), sub_basis);
        const CbIndexReport rep = cb_index_dc(x, x0, restarts, seed, opt(tol, max_iter));
        return py::make_tuple(rep.feasible, rep.value);
      },
      py::arg("basis"), py::arg("sub_basis"), py::arg("restarts") = 4, py::arg("seed") = 1,
      py::arg("tol") = 1e-8, py::arg("max_iter") = 500,
      "Heuristic completely bounded index upper bound; returns (found, value).");

  m.def("bounded_index_linf", &bounded_index_linf, py::arg("n"),
        "Index of the scalars inside the n-dimensional bounded sequence algebra.");

  m.def(
      "hoffman_bound",
      [](const std::vector<CMat>& gens, int restarts, std::uint64_t seed) {
        return hoffman_heuristic(system_of(gens), restarts, seed).value;
      },
      py::arg("generators"), py::arg("restarts") = 8, py::arg("seed") = 1,
      "Certified eigenvalue-ratio lower bound for the index of the system.");

  m.def(
      "graph_system",
      [](int n, const Edges& edges) {
        const MatricialSystem s = graph_system(Graph(n, edges));
        return s.basis.elements;
      },
      py::arg("n"), py::arg("edges"),
      "Orthonormal Hermitian basis of the system supported on the graph.");

  m.def(
      "graph_complement_system",
      [](int n, const Edges& edges) {
        const MatricialSystem s = graph_system_equal_diag(Graph(n, edges).complement());
        return s.basis.elements;
      },
      py::arg("n"), py::arg("edges"),
      "Constant-diagonal system supported on the complement graph.");
}
