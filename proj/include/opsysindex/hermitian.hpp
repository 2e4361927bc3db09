#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

namespace opsys {

using Cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// Tolerance for accepting a matrix as Hermitian at construction time.
inline constexpr double kHermTol = 1e-12;

bool is_hermitian(const CMat& a, double tol = kHermTol);

// (A + A*)/2; use after checking is_hermitian to scrub roundoff.
CMat hermitize(const CMat& a);

// Throws std::invalid_argument when a is not Hermitian within tol.
void require_hermitian(const CMat& a, const char* what, double tol = kHermTol);

// Real Hilbert-Schmidt pairing Re tr(A* B); for Hermitian A, B this is tr(AB).
double hs_inner(const CMat& a, const CMat& b);
double hs_norm(const CMat& a);

CMat matrix_unit(int n, int i, int j);
CMat ones_matrix(int n);  // all-entries-one

// Kronecker product, lexicographic convention with the first factor outermost:
// (A (x) B)[(i,k),(j,l)] = A(i,j) B(k,l), row index i*rows(B)+k.
CMat kron(const CMat& a, const CMat& b);

// Partial traces of X acting on C^n (x) C^m.
CMat partial_trace_first(const CMat& x, int n, int m);   // result m x m
CMat partial_trace_second(const CMat& x, int n, int m);  // result n x n

// Middle-factor swap M_n (x) M_n (x) M_k (x) M_k -> M_{nk} (x) M_{nk},
// A(x)B(x)C(x)D -> A(x)C(x)B(x)D on simple tensors.
CMat shuffle_mid(const CMat& z, int n, int k);

struct EigResult {
  RVec values;   // ascending
  CMat vectors;  // columns are orthonormal eigenvectors
};

// Throws std::invalid_argument on non-Hermitian input beyond tolerance.
EigResult eig_hermitian(const CMat& a, double herm_tol = 1e-9);

double lambda_min(const CMat& a);
double lambda_max(const CMat& a);

// Choi matrix of the identity map on M_n: sum_ij E_ij (x) E_ij.
// Rank one, equal to |v><v| for v = sum_i e_i (x) e_i, largest eigenvalue n.
CMat choi_of_identity(int n);

// Orthonormal Hermitian basis of M_n, deterministic order:
// E_ii (i = 0..n-1), then (E_ij + E_ji)/sqrt2 (i<j), then i(E_ij - E_ji)/sqrt2 (i<j).
std::vector<CMat> herm_basis_full(int n);

// Orthonormal Hermitian basis of the traceless part of M_n (n^2 - 1 elements):
// Helmert-style diagonal combinations followed by the off-diagonal units.
std::vector<CMat> herm_basis_traceless(int n);

}  // namespace opsys
