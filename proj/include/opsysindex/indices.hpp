#pragma once

#include "opsysindex/sdp.hpp"
#include "opsysindex/system.hpp"

#include <stdexcept>
#include <string>

namespace opsys {

// Thrown when an interior-point solve ends in any state other than optimal;
// carries the terminal status and the residuals at termination.
struct SolverFailure : std::runtime_error {
  SolverFailure(const std::string& msg, SdpStatus status_, double primal_feas_,
                double dual_feas_)
      : std::runtime_error(msg),
        status(status_),
        primal_feas(primal_feas_),
        dual_feas(dual_feas_) {}

  SdpStatus status;
  double primal_feas;
  double dual_feas;
};

// Outcome of one index computation.  `value` is the index itself (always
// >= 1); `reciprocal` is the underlying program optimum (the lambda or trace
// whose reciprocal the index is, or 1/value for programs solved directly in
// index scale).  The primal certificate is the optimal Choi/feasible matrix
// witnessing the value; the dual certificate is the matching dual slack.
struct IndexResult {
  double value = 0.0;
  double reciprocal = 0.0;
  CMat primal_certificate;
  CMat dual_certificate;
  double gap = 0.0;
  int iterations = 0;
  double tol_used = 0.0;
};

// Least scaling ||phi(1)|| over completely positive maps phi from M_n into S
// with phi - id completely positive, computed as: maximize lambda subject to
// (tr (x) id)(X) = (1 - lambda) I_n, X + lambda Delta_n in M_n (x) S, X >= 0;
// the index is 1/lambda*.  The primal certificate is the Choi matrix of the
// index-achieving map (PSD, dominates Delta_n, range in S, unit image
// value*I_n).
IndexResult cp_index_primal(const MatricialSystem& s, const SdpOptions& opts = {});

// The matching minimization: minimize tr(X) over Y in M_n (x) S-perp with
// I_n (x) X + Y >= 0 and <Delta_n, I_n (x) X + Y> = 1; the index is
// 1/tr(X*).  The primal certificate is the optimal matrix I_n (x) X + Y.
IndexResult cp_index_dual(const MatricialSystem& s, const SdpOptions& opts = {});

// Index of the inclusion s0 inside s (both in the same M_n), via a completely
// positive correction Psi: M_n -> M_n with Psi(x) + x in s0 for every basis
// element x of s and Psi(I) = (mu - 1) I; minimizes mu.  Rejects s0 not
// contained in s.  The primal certificate is the Choi matrix of Psi.
IndexResult cp_index_relative(const MatricialSystem& s, const MatricialSystem& s0,
                              const SdpOptions& opts = {});

// Index of the scalars inside s: cp_index_relative(s, C I_n).
IndexResult lambda_tilde(const MatricialSystem& s, const SdpOptions& opts = {});

// Least ||phi(1)|| over completely positive phi: M_n -> M_n annihilating the
// kernel j with phi - id completely positive: minimize mu subject to
// Choi(phi) >= 0, Choi(phi) - Delta_n >= 0, phi(j) = 0 for each basis element
// of j, mu I - phi(I) >= 0.  The primal certificate is Choi(phi).
IndexResult coindex(int n, const KernelSpace& j, const SdpOptions& opts = {});

// Tensor-versus-product comparison for the index of nested pairs.
struct MultiplicativityReport {
  IndexResult tensor;  // index of tensor(s, t) : tensor(s0, t0)
  IndexResult left;    // index of s : s0
  IndexResult right;   // index of t : t0
  double product = 0.0;
  double relative_deviation = 0.0;
};

// Computes the index of tensor(s,t) : tensor(s0,t0) and the product of the
// factor indices; requires ambient dims n*k <= 9 (the tensor SDP block is
// (n*k)^2).
MultiplicativityReport multiplicativity_check(const MatricialSystem& s,
                                              const MatricialSystem& s0,
                                              const MatricialSystem& t,
                                              const MatricialSystem& t0,
                                              const SdpOptions& opts = {});

}  // namespace opsys
