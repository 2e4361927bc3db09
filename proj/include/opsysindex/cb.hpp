#pragma once

#include "opsysindex/indices.hpp"
#include "opsysindex/sdp.hpp"

#include <cstdint>
#include <vector>

namespace opsys {

// A linear subspace of M_n spanned by (not necessarily Hermitian) matrices.
// The basis is kept exactly as given; maps on the subspace are represented by
// their images on these basis elements.
struct OperatorSubspace {
  int ambient_in = 0;
  std::vector<CMat> basis;

  int dim() const { return int(basis.size()); }
  void validate() const;  // shape checks + linear independence (Gram rank)
};

OperatorSubspace operator_subspace(int n, std::vector<CMat> basis);
OperatorSubspace full_matrix_space(int n);    // all matrix units, row-major
OperatorSubspace scalar_matrix_space(int n);  // the span of the identity

// A linear map given by one image per domain basis element.
struct SubspaceMap {
  OperatorSubspace domain;
  int out_dim = 0;
  std::vector<CMat> images;

  void validate() const;
};

SubspaceMap identity_map(const OperatorSubspace& x);

// Completely bounded norm, computed as the least R for which the scaled
// corner amplification of the map on the Paulsen system of the domain admits
// a completely positive extension to the full matrix algebra.  The
// feasibility region is affine in (R, Choi), so this is a single SDP.
struct CbNormResult {
  double value = 0.0;
  CMat choi;        // extension Choi matrix on the reduced support
  RVec dual;        // dual multipliers of the agreement rows (norming data)
  double gap = 0.0;
  int iterations = 0;
  double tol_used = 0.0;
};

CbNormResult cb_norm_detailed(const SubspaceMap& u, const SdpOptions& opts = {});
double cb_norm(const SubspaceMap& u, const SdpOptions& opts = {});

// Whether the corner amplification of `v` at the fixed scale `r` is
// completely positive on the Paulsen system (equivalently, extends to a CP
// map on the ambient algebra).
bool paulsen_cp_feasible(const SubspaceMap& v, double r, const SdpOptions& opts = {});

// Upper-bound search for the CB-index of an inclusion X0 <= X:
//   minimize ||u||_cb over maps u: X -> X0 with ||u - id||_cb <= ||u||_cb - 1.
// Since ||id||_cb = 1, the constraint can only ever hold with equality, so
// the search minimizes the exact penalty ||u|| + rho (||u - id|| - ||u|| + 1)
// with escalating rho, linearizing the concave -||u|| part through the
// affine minorant obtained from the dual multipliers of the cb-norm program
// at the current iterate (penalty convex-concave procedure).  Every reported
// value is re-verified on the witness by independent cb-norm computations;
// values are upper bounds only, and finding no witness does not certify that
// the index is infinite.
struct CbIndexReport {
  bool feasible = false;
  double value = 0.0;            // best re-verified ||u||_cb among feasible witnesses
  SubspaceMap witness;
  double witness_norm = 0.0;     // independent cb_norm(u)
  double witness_distance = 0.0; // independent cb_norm(u - id)
  int restarts = 0;
  std::uint64_t seed = 0;
  std::vector<double> restart_values;  // best value per restart (0 = none found)
};

CbIndexReport cb_index_dc(const OperatorSubspace& x, const OperatorSubspace& x0,
                          int restarts = 4, std::uint64_t seed = 1,
                          const SdpOptions& opts = {});

// Norms of the coefficient family T_c(x) = <c, x> * (1,...,1) on the n-point
// sup-norm space: ||T_c|| is the l1 norm of c, and ||T_c - id|| is an exact
// maximum over the finitely many active sign patterns.
double linf_functional_norm(const RVec& c);
double linf_functional_minus_id_norm(const RVec& c);

// Index of the constants inside the n-point sup-norm space under bounded
// maps.  Maps into the constants are exactly the T_c family; feasibility of
// ||T_c - id|| <= ||T_c|| - 1 forces every coefficient to be real and >= 1,
// and a bisection along the symmetric ray locates the boundary.  The result
// is n to within 1e-9.
double bounded_index_linf(int n);

}  // namespace opsys
