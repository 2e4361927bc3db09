#pragma once

#include "opsysindex/hermitian.hpp"

namespace opsys {

// A linear map M_n -> M_m represented by its Choi matrix
// C = sum_ij E_ij (x) Phi(E_ij) in M_n (x) M_m (first factor outermost).
struct MatrixMap {
  int in_dim = 0;
  int out_dim = 0;
  CMat choi;

  void validate() const;
};

// Build from the images of the matrix units.
MatrixMap map_from_action(int in_dim, int out_dim,
                          const std::function<CMat(int, int)>& image_of_unit);

// Build from an arbitrary linear callable (evaluated on matrix units).
MatrixMap map_from_function(int in_dim, int out_dim,
                            const std::function<CMat(const CMat&)>& fn);

// Phi(X) = (tr (x) id)((X^T (x) I) C).
CMat apply_map(const MatrixMap& phi, const CMat& x);

// Complete positivity test: lambda_min(C) >= -tol * (1 + ||C||).
bool is_cp(const MatrixMap& phi, double tol = 1e-9);

// Schur (entrywise) multiplier X -> A .* X; Choi = sum_ij A_ij E_ij (x) E_ij.
MatrixMap schur_multiplier(const CMat& a);

// Adjoint with respect to the trace pairing: tr(Phi(X) Y) = tr(X Phi'(Y)).
// Choi(Phi')[(a,b),(c,d)] = Choi(Phi)[(d,c),(b,a)] (swap factors + transpose).
MatrixMap dual_map(const MatrixMap& phi);

// For a CP map Phi on M_n, the matrix A with A_ij = Phi(E_ij)_ij, which is
// positive semidefinite with max_i A_ii <= ||Phi(I)||.
// Throws std::invalid_argument when phi is not CP within tolerance.
CMat choi_expectation(const MatrixMap& phi, double cp_tol = 1e-8);

MatrixMap identity_map(int n);
MatrixMap transpose_map(int n);

}  // namespace opsys
