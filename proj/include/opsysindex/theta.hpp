#pragma once

#include "opsysindex/indices.hpp"
#include "opsysindex/sdp.hpp"
#include "opsysindex/system.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace opsys {

// Which semidefinite formulation produced a theta value.
enum class ClassicalThetaForm { e_gamma, s_gamma };
enum class QuantumThetaForm { dsw_dual, dsw_primal };

struct ThetaResult {
  double value = 0.0;      // the theta number (always >= 1 for nonempty graphs)
  std::string form_used;   // "E_gamma_form" | "S_gamma_form" | "dsw_dual" | "dsw_primal" | "relative"
  CMat certificate;        // optimal matrix of the chosen formulation
  double gap = 0.0;
  int iterations = 0;
  double tol_used = 0.0;
};

// Classical theta number of a graph.
//   E-form: min A(0,0) over A with constant diagonal, zeros on non-edges, A >= J.
//   S-form: min max_i B(i,i) over B with zeros on non-edges (free diagonal), B >= J.
// Both are exact semidefinite programs with the same optimal value.
ThetaResult lovasz_theta(const Graph& g, ClassicalThetaForm form = ClassicalThetaForm::e_gamma,
                         const SdpOptions& opts = {});

// Quantum theta of a unit-containing system S in M_n.
//   dsw_dual:   max <Delta, W> over W = I(x)X + Y >= 0, tr X = 1,
//               Y with first tensor factor orthogonal to S.
//   dsw_primal: max lambda over X >= 0 with second-factor partial trace
//               (1 - lambda) I and X + lambda*Delta supported in M_n (x) S;
//               the value is 1/lambda.
ThetaResult quantum_theta(const MatricialSystem& s,
                          QuantumThetaForm form = QuantumThetaForm::dsw_dual,
                          const SdpOptions& opts = {});

// Relative theta of a graph pair: the relative index of the subgraph's system
// inside the larger graph's system. Requires lambda to be a subgraph of gamma
// on the same vertex set.
ThetaResult relative_theta(const Graph& gamma, const Graph& lambda, const SdpOptions& opts = {});

// Best eigenvalue-ratio lower bound found by projected gradient ascent over
// Hermitian elements of the orthogonal complement of s:
//   value = 1 + lambda_max(x) / |lambda_min(x)|.
// Every reported value is re-evaluated on the returned witness, so it is a
// certified lower bound regardless of how the search behaved. Deterministic
// for a fixed seed; restarts are independent.
struct HoffmanReport {
  double value = 0.0;                  // best certified ratio bound
  CMat witness;                         // Hermitian complement element achieving it
  int restarts = 0;
  std::uint64_t seed = 0;
  std::vector<double> restart_values;  // certified value from each restart
};

HoffmanReport hoffman_heuristic(const MatricialSystem& s, int restarts = 8,
                                std::uint64_t seed = 1);

}  // namespace opsys
