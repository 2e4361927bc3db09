#pragma once

#include "opsysindex/hermitian.hpp"

namespace opsys {

// Isometric real coordinates for Hermitian n x n matrices:
// [diag entries; sqrt2 Re A_ij (i<j, lexicographic); sqrt2 Im A_ij (i<j)],
// so that dot(hvec(A), hvec(B)) = tr(AB).
RVec hvec(const CMat& a);
CMat unhvec(const RVec& v, int n);

// An orthonormal list of Hermitian matrices spanning a real subspace of Herm(M_n).
struct HermitianBasis {
  int ambient_dim = 0;
  std::vector<CMat> elements;

  int dim() const { return int(elements.size()); }

  // Gram matrix must be the identity within tol; every element Hermitian.
  void validate(double gram_tol = 1e-9) const;
};

// Gram-stable orthonormalization of a Hermitian spanning set; directions whose
// residual falls below drop_tol are deflated. Throws on an empty or fully
// degenerate spanning set, mixed dimensions, or non-Hermitian input.
HermitianBasis orthonormalize(int ambient_dim, const std::vector<CMat>& spanning,
                              double drop_tol = 1e-10);

// Orthogonal projection of x onto span(basis).
CMat project(const HermitianBasis& basis, const CMat& x);

// Membership test: || x - proj(x) || <= tol * (1 + ||x||).
bool contains(const HermitianBasis& basis, const CMat& x, double tol = 1e-9);

// Orthonormal basis of the orthogonal complement of span(basis) inside Herm(M_n).
HermitianBasis complement(const HermitianBasis& basis);

// Real n^2 x n^2 matrix of the orthogonal projector onto span(basis) in hvec
// coordinates. Basis-choice invariant; used for canonical digests.
RMat span_projector(const HermitianBasis& basis);

}  // namespace opsys
