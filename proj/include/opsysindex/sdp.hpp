#pragma once

#include "opsysindex/hermitian.hpp"

#include <iosfwd>
#include <map>

namespace opsys {

// Standard primal form over complex Hermitian PSD blocks and free real scalars:
//   minimize    sum_b <C_b, X_b> + c_free . u
//   subject to  sum_b <A_{i,b}, X_b> + f_i . u = b_i   (i = 1..m)
//               X_b >= 0,  u free,
// with <A, B> = Re tr(A* B).
struct SdpProblem {
  struct Entry {
    int r, c;
    Cplx v;
  };
  struct Constraint {
    // sparse nonzeros per touched block, keyed by block index
    std::map<int, std::vector<Entry>> blocks;
    std::vector<std::pair<int, double>> free_coeffs;
    double rhs = 0.0;
  };

  std::vector<int> block_dims;
  std::vector<CMat> objective;  // one Hermitian matrix per block (zero allowed)
  int free_count = 0;
  RVec free_objective;  // size free_count
  std::vector<Constraint> constraints;

  int add_block(int dim);
  int add_free(double objective_coeff);
  void set_objective(int block, const CMat& c);

  // Start a new empty constraint with the given right-hand side; returns its index.
  int new_constraint(double rhs);
  // Adds the nonzeros of a dense Hermitian coefficient for `block` to constraint i.
  void add_coeff(int constraint, int block, const CMat& a);
  void add_free_coeff(int constraint, int free_var, double coeff);

  int num_constraints() const { return int(constraints.size()); }
  void validate() const;
};

enum class SdpStatus { optimal, primal_infeasible, dual_infeasible, max_iterations };

const char* to_string(SdpStatus s);

struct SdpSolution {
  SdpStatus status = SdpStatus::max_iterations;
  double primal_value = 0.0;
  double dual_value = 0.0;
  std::vector<CMat> primal_blocks;  // X
  RVec free_values;                 // u
  RVec dual_vector;                 // y, one multiplier per original constraint
  std::vector<CMat> dual_blocks;    // Z = C - A*(y)

  double primal_feas = 0.0;  // scaled max equality violation
  double dual_feas = 0.0;    // scaled dual residual
  double gap = 0.0;          // relative primal-dual objective gap
  int iterations = 0;
  double tol_used = 0.0;

  // Farkas-type rays backing an infeasibility claim (empty otherwise).
  RVec infeas_dual_ray;                 // primal infeasibility: y-space ray
  std::vector<CMat> infeas_primal_ray;  // dual infeasibility: X-space ray
  RVec infeas_free_ray;

  // (primal objective, dual objective, primal feas, dual feas) per iteration.
  std::vector<std::array<double, 4>> history;
};

struct SdpOptions {
  double tol = 1e-8;
  int max_iter = 500;
  bool trace = false;  // per-iteration log to stderr
};

// Deterministic primal-dual interior-point solve (HKM direction with a
// Mehrotra predictor-corrector); dependent constraint rows are dropped by a
// rank-revealing QR presolve and reported with zero multipliers.
SdpSolution solve(const SdpProblem& p, const SdpOptions& opts = {});

// Independent recomputation of all residuals from problem data only.
struct VerifyReport {
  double primal_feas = 0.0;     // max |<A_i,X> + f_i.u - b_i|, scaled
  double dual_feas = 0.0;       // free-variable dual residual, scaled
  double min_primal_eig = 0.0;  // min over blocks of lambda_min(X_b)
  double min_dual_eig = 0.0;    // min over blocks of lambda_min(C_b - A*(y)_b)
  double gap = 0.0;
  bool certificate_ok = true;  // infeasibility ray check (when applicable)

  bool ok(double tol) const;
};

VerifyReport verify(const SdpProblem& p, const SdpSolution& s, double tol = 1e-6);

// Real symmetric embedding A -> [[Re A, -Im A], [Im A, Re A]]; the optimal
// value of the returned problem is exactly twice the original optimal value.
SdpProblem realify(const SdpProblem& p);

// Sparse text round-trip for debugging.
void dump_problem(const SdpProblem& p, std::ostream& os);
SdpProblem load_problem(std::istream& is);

}  // namespace opsys
