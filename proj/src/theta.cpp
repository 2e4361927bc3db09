#include "opsysindex/theta.hpp"

#include "opsysindex/basis.hpp"
#include "opsysindex/choi.hpp"
#include "opsysindex/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace opsys {

namespace {

SdpSolution solve_or_throw(const SdpProblem& p, const SdpOptions& opts, const char* who) {
  SdpSolution sol = solve(p, opts);
  if (sol.status != SdpStatus::optimal) {
    std::ostringstream msg;
    msg << who << ": solver ended with status " << to_string(sol.status) << " after "
        << sol.iterations << " iterations (primal residual " << sol.primal_feas
        << ", dual residual " << sol.dual_feas << ")";
    throw SolverFailure(msg.str(), sol.status, sol.primal_feas, sol.dual_feas);
  }
  return sol;
}

void fill_stats(ThetaResult& r, const SdpSolution& sol) {
  r.gap = sol.gap;
  r.iterations = sol.iterations;
  r.tol_used = sol.tol_used;
}

CMat scalar_block(double v) {
  CMat m(1, 1);
  m(0, 0) = v;
  return m;
}

// min A(0,0) subject to A >= J, constant diagonal, support on edges only.
ThetaResult theta_e_form(const Graph& g, const SdpOptions& opts) {
  const int n = g.n;
  const CMat jn = ones_matrix(n);
  SdpProblem p;
  const int bp = p.add_block(n);  // P = A - J >= 0
  CMat obj = CMat::Zero(n, n);
  obj(0, 0) = 1.0;
  p.set_objective(bp, obj);
  const KernelSpace comp = perp(graph_system_equal_diag(g));
  for (const CMat& r : comp.basis.elements) {
    const int row = p.new_constraint(-hs_inner(r, jn));
    p.add_coeff(row, bp, r);
  }
  SdpSolution sol = solve_or_throw(p, opts, "lovasz_theta");
  ThetaResult out;
  out.form_used = "E_gamma_form";
  out.value = sol.primal_value + 1.0;
  out.certificate = hermitize(CMat(sol.primal_blocks[size_t(bp)] + jn));
  fill_stats(out, sol);
  return out;
}

// min t subject to B >= J, support on edges + free diagonal, B(i,i) <= t.
ThetaResult theta_s_form(const Graph& g, const SdpOptions& opts) {
  const int n = g.n;
  const CMat jn = ones_matrix(n);
  SdpProblem p;
  const int bp = p.add_block(n);  // P = B - J >= 0
  std::vector<int> slack(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) slack[size_t(i)] = p.add_block(1);
  const int t = p.add_free(1.0);
  const KernelSpace comp = perp(graph_system(g));
  for (const CMat& r : comp.basis.elements) {
    const int row = p.new_constraint(-hs_inner(r, jn));
    p.add_coeff(row, bp, r);
  }
  for (int i = 0; i < n; ++i) {
    const int row = p.new_constraint(-1.0);  // B_ii + s_i - t = 0
    p.add_coeff(row, bp, CMat(matrix_unit(n, i, i)));
    p.add_coeff(row, slack[size_t(i)], scalar_block(1.0));
    p.add_free_coeff(row, t, -1.0);
  }
  SdpSolution sol = solve_or_throw(p, opts, "lovasz_theta");
  ThetaResult out;
  out.form_used = "S_gamma_form";
  out.value = sol.primal_value;
  out.certificate = hermitize(CMat(sol.primal_blocks[size_t(bp)] + jn));
  fill_stats(out, sol);
  return out;
}

// max <Delta, W> over W = I(x)X + Y >= 0 with tr X = 1 and Y's first tensor
// factor orthogonal to s.
ThetaResult theta_dsw_dual(const MatricialSystem& s, const SdpOptions& opts) {
  const int n = s.ambient_dim;
  const CMat delta = choi_of_identity(n);
  SdpProblem p;
  const int bw = p.add_block(n * n);
  p.set_objective(bw, CMat(-delta));  // maximize <Delta, W>
  const HermitianBasis tl = traceless_part(s);
  const std::vector<CMat> hfull = herm_basis_full(n);
  for (const CMat& gmat : tl.elements)
    for (const CMat& h : hfull) {
      const int row = p.new_constraint(0.0);
      p.add_coeff(row, bw, kron(gmat, h));
    }
  {
    const int row = p.new_constraint(double(n));  // tr W = n  <=>  tr X = 1
    p.add_coeff(row, bw, CMat(CMat::Identity(n * n, n * n)));
  }
  SdpSolution sol = solve_or_throw(p, opts, "quantum_theta");
  ThetaResult out;
  out.form_used = "dsw_dual";
  out.value = -sol.primal_value;
  out.certificate = sol.primal_blocks[size_t(bw)];
  fill_stats(out, sol);
  return out;
}

// max lambda over X >= 0, second-factor partial trace (1 - lambda) I,
// X + lambda*Delta supported in M_n (x) s; value is 1/lambda.
ThetaResult theta_dsw_primal(const MatricialSystem& s, const SdpOptions& opts) {
  const int n = s.ambient_dim;
  const CMat delta = choi_of_identity(n);
  SdpProblem p;
  const int bx = p.add_block(n * n);
  const int bl = p.add_block(1);
  p.set_objective(bl, scalar_block(-1.0));  // maximize lambda
  const std::vector<CMat> hfull = herm_basis_full(n);
  for (const CMat& h : hfull) {
    const double trh = std::real(h.trace());
    const int row = p.new_constraint(trh);  // <H (x) I, X> + lambda tr H = tr H
    p.add_coeff(row, bx, kron(h, CMat(CMat::Identity(n, n))));
    if (trh != 0.0) p.add_coeff(row, bl, scalar_block(trh));
  }
  const KernelSpace sp = perp(s);
  for (const CMat& f : hfull)
    for (const CMat& gmat : sp.basis.elements) {
      const CMat coeff = kron(f, gmat);
      const int row = p.new_constraint(0.0);
      p.add_coeff(row, bx, coeff);
      const double dproj = hs_inner(coeff, delta);
      if (dproj != 0.0) p.add_coeff(row, bl, scalar_block(dproj));
    }
  SdpSolution sol = solve_or_throw(p, opts, "quantum_theta");
  const double lambda = sol.primal_blocks[size_t(bl)](0, 0).real();
  ThetaResult out;
  out.form_used = "dsw_primal";
  out.value = 1.0 / lambda;
  out.certificate =
      hermitize(CMat(sol.primal_blocks[size_t(bx)] + lambda * delta));
  fill_stats(out, sol);
  return out;
}

double ratio_bound(const CMat& x, double* out_lmax = nullptr, double* out_lmin = nullptr) {
  const EigResult e = eig_hermitian(x);
  const double lmax = e.values.maxCoeff();
  const double lmin = e.values.minCoeff();
  if (out_lmax) *out_lmax = lmax;
  if (out_lmin) *out_lmin = lmin;
  if (!(lmin < 0.0)) return 1.0;  // degenerate; cannot happen for traceless x != 0
  return 1.0 + lmax / std::abs(lmin);
}

}  // namespace

ThetaResult lovasz_theta(const Graph& g, ClassicalThetaForm form, const SdpOptions& opts) {
  if (g.n < 1) throw std::invalid_argument("lovasz_theta: graph needs at least one vertex");
  return form == ClassicalThetaForm::e_gamma ? theta_e_form(g, opts) : theta_s_form(g, opts);
}

ThetaResult quantum_theta(const MatricialSystem& s, QuantumThetaForm form,
                          const SdpOptions& opts) {
  s.validate();
  if (!s.contains_unit)
    throw std::invalid_argument("quantum_theta: system must contain the unit");
  return form == QuantumThetaForm::dsw_dual ? theta_dsw_dual(s, opts)
                                            : theta_dsw_primal(s, opts);
}

ThetaResult relative_theta(const Graph& gamma, const Graph& lambda, const SdpOptions& opts) {
  if (gamma.n != lambda.n)
    throw std::invalid_argument("relative_theta: graphs must share the vertex set");
  for (const auto& e : lambda.edges)
    if (!gamma.adjacent(e.first, e.second))
      throw std::invalid_argument("relative_theta: second graph is not a subgraph");
  const IndexResult r =
      cp_index_relative(graph_system(gamma), graph_system(lambda), opts);
  ThetaResult out;
  out.form_used = "relative";
  out.value = r.value;
  out.certificate = r.primal_certificate;
  out.gap = r.gap;
  out.iterations = r.iterations;
  out.tol_used = r.tol_used;
  return out;
}

HoffmanReport hoffman_heuristic(const MatricialSystem& s, int restarts, std::uint64_t seed) {
  s.validate();
  const KernelSpace comp = perp(s);
  const int d = comp.dim();
  if (d == 0)
    throw std::invalid_argument("hoffman_heuristic: the system has no orthogonal complement");
  if (restarts < 1) restarts = 1;
  const int n = s.ambient_dim;

  const auto assemble = [&](const RVec& c) {
    CMat x = CMat::Zero(n, n);
    for (int k = 0; k < d; ++k) x += c(k) * comp.basis.elements[size_t(k)];
    return x;
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  HoffmanReport rep;
  rep.restarts = restarts;
  rep.seed = seed;
  rep.value = 1.0;

  for (int r = 0; r < restarts; ++r) {
    RVec c(d);
    for (int k = 0; k < d; ++k) c(k) = gauss(rng);
    c.normalize();

    double cur = ratio_bound(assemble(c));
    double step = 0.5;
    for (int it = 0; it < 200 && step > 1e-12; ++it) {
      const CMat x = assemble(c);
      const EigResult e = eig_hermitian(x);
      const int top = int(e.values.size()) - 1;
      const Eigen::VectorXcd vmax = e.vectors.col(top);
      const Eigen::VectorXcd vmin = e.vectors.col(0);
      const double lmax = e.values(top);
      const double lmin = e.values(0);
      // gradient of lmax/(-lmin) in the coordinates of the complement basis
      RVec grad(d);
      for (int k = 0; k < d; ++k) {
        const CMat& gk = comp.basis.elements[size_t(k)];
        const double dmax = std::real(vmax.dot(gk * vmax));
        const double dmin = std::real(vmin.dot(gk * vmin));
        grad(k) = (dmax * (-lmin) + lmax * dmin) / (lmin * lmin);
      }
      // project out the radial direction; the ratio is scale invariant
      grad -= grad.dot(c) * c;
      const double gn = grad.norm();
      if (gn < 1e-13) break;
      bool improved = false;
      while (step > 1e-12) {
        RVec cand = c + (step / gn) * grad;
        cand.normalize();
        const double val = ratio_bound(assemble(cand));
        if (val > cur + 1e-14) {
          c = cand;
          cur = val;
          improved = true;
          step = std::min(step * 2.0, 1.0);
          break;
        }
        step *= 0.5;
      }
      if (!improved) break;
    }

    // certify by independent re-evaluation of the witness
    const CMat x = assemble(c);
    const double certified = ratio_bound(x);
    rep.restart_values.push_back(certified);
    if (certified > rep.value) {
      rep.value = certified;
      rep.witness = x;
    }
  }
  if (rep.witness.size() == 0) rep.witness = assemble(RVec::Unit(d, 0));
  return rep;
}

}  // namespace opsys
