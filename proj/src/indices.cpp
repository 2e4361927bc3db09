#include "opsysindex/indices.hpp"

#include "opsysindex/choi.hpp"

#include <sstream>

namespace opsys {

namespace {

SdpSolution solve_or_throw(const SdpProblem& p, const SdpOptions& opts,
                           const char* what) {
  SdpSolution s = solve(p, opts);
  if (s.status != SdpStatus::optimal) {
    std::ostringstream msg;
    msg << what << ": solver ended with status " << to_string(s.status)
        << " after " << s.iterations << " iterations (primal residual "
        << s.primal_feas << ", dual residual " << s.dual_feas << ")";
    throw SolverFailure(msg.str(), s.status, s.primal_feas, s.dual_feas);
  }
  return s;
}

void fill_stats(IndexResult& r, const SdpSolution& s) {
  r.gap = s.gap;
  r.iterations = s.iterations;
  r.tol_used = s.tol_used;
}

CMat scalar_block(double v) {
  CMat m(1, 1);
  m(0, 0) = v;
  return m;
}

CMat identity(int n) { return CMat::Identity(n, n); }

}  // namespace

IndexResult cp_index_primal(const MatricialSystem& s, const SdpOptions& opts) {
  s.validate();
  if (!s.contains_unit) throw std::invalid_argument("cp_index_primal: system must be unital");
  const int n = s.ambient_dim;
  const CMat delta = choi_of_identity(n);
  const std::vector<CMat> hfull = herm_basis_full(n);
  const KernelSpace sperp = perp(s);

  SdpProblem p;
  const int bx = p.add_block(n * n);
  const int bl = p.add_block(1);
  p.set_objective(bl, scalar_block(-1.0));  // maximize lambda

  // (tr (x) id)(X) + lambda I = I, one row per Hermitian coordinate.
  for (const CMat& h : hfull) {
    const double trh = std::real(h.trace());
    const int c = p.new_constraint(trh);
    p.add_coeff(c, bx, kron(identity(n), h));
    p.add_coeff(c, bl, scalar_block(trh));
  }
  // X + lambda Delta orthogonal to M_n (x) S-perp.
  for (const CMat& f : hfull) {
    for (const CMat& g : sperp.basis.elements) {
      const CMat coeff = kron(f, g);
      const int c = p.new_constraint(0.0);
      p.add_coeff(c, bx, coeff);
      p.add_coeff(c, bl, scalar_block(hs_inner(coeff, delta)));
    }
  }

  const SdpSolution sol = solve_or_throw(p, opts, "cp_index_primal");
  const double lambda = sol.primal_blocks[bl](0, 0).real();
  IndexResult r;
  r.reciprocal = lambda;
  r.value = 1.0 / lambda;
  // Choi matrix of the index-achieving map (X + lambda Delta) / lambda.
  r.primal_certificate = hermitize((sol.primal_blocks[bx] + lambda * delta) / lambda);
  r.dual_certificate = sol.dual_blocks[bx];
  fill_stats(r, sol);
  return r;
}

IndexResult cp_index_dual(const MatricialSystem& s, const SdpOptions& opts) {
  s.validate();
  if (!s.contains_unit) throw std::invalid_argument("cp_index_dual: system must be unital");
  const int n = s.ambient_dim;
  const CMat delta = choi_of_identity(n);

  // Variable W = I (x) X + Y with Y in M_n (x) S-perp.  Every slice of W
  // against a second-factor basis element of S must be a multiple of I_n, so
  // W is orthogonal to K (x) g for all traceless K; then tr(X) = tr(W)/n.
  SdpProblem p;
  const int bw = p.add_block(n * n);
  p.set_objective(bw, kron(identity(n), identity(n)) / double(n));

  for (const CMat& k : herm_basis_traceless(n)) {
    for (const CMat& g : s.basis.elements) {
      const int c = p.new_constraint(0.0);
      p.add_coeff(c, bw, kron(k, g));
    }
  }
  const int cnorm = p.new_constraint(1.0);
  p.add_coeff(cnorm, bw, delta);

  const SdpSolution sol = solve_or_throw(p, opts, "cp_index_dual");
  IndexResult r;
  r.reciprocal = sol.primal_value;  // tr(X*)
  r.value = 1.0 / sol.primal_value;
  r.primal_certificate = sol.primal_blocks[bw];
  r.dual_certificate = sol.dual_blocks[bw];
  fill_stats(r, sol);
  return r;
}

IndexResult cp_index_relative(const MatricialSystem& s, const MatricialSystem& s0,
                              const SdpOptions& opts) {
  s.validate();
  s0.validate();
  if (s.ambient_dim != s0.ambient_dim)
    throw std::invalid_argument("cp_index_relative: ambient dimensions differ");
  for (const CMat& b : s0.basis.elements) {
    if (!contains(s, b, 1e-9))
      throw std::invalid_argument(
          "cp_index_relative: the target system is not contained in the source system");
  }
  const int n = s.ambient_dim;
  const std::vector<CMat> hfull = herm_basis_full(n);
  const KernelSpace s0perp = perp(s0);

  SdpProblem p;
  const int bx = p.add_block(n * n);        // Choi matrix of Psi
  const int mu = p.add_block(1);            // minimize mu (>= 1 at any feasible point)
  p.set_objective(mu, scalar_block(1.0));

  // Psi(I) = (mu - 1) I, coordinate by coordinate.
  for (const CMat& h : hfull) {
    const double trh = std::real(h.trace());
    const int c = p.new_constraint(-trh);
    p.add_coeff(c, bx, kron(identity(n), h));
    if (trh != 0.0) p.add_coeff(c, mu, scalar_block(-trh));
  }
  // Psi(x) + x in s0 for each basis element x of s.
  for (const CMat& e : s.basis.elements) {
    const CMat et = e.transpose();
    for (const CMat& g : s0perp.basis.elements) {
      const int c = p.new_constraint(-hs_inner(g, e));
      p.add_coeff(c, bx, kron(et, g));
    }
  }

  const SdpSolution sol = solve_or_throw(p, opts, "cp_index_relative");
  IndexResult r;
  r.value = sol.primal_blocks[mu](0, 0).real();
  r.reciprocal = 1.0 / r.value;
  r.primal_certificate = sol.primal_blocks[bx];
  r.dual_certificate = sol.dual_blocks[bx];
  fill_stats(r, sol);
  return r;
}

IndexResult lambda_tilde(const MatricialSystem& s, const SdpOptions& opts) {
  return cp_index_relative(s, scalar_system(s.ambient_dim), opts);
}

IndexResult coindex(int n, const KernelSpace& j, const SdpOptions& opts) {
  if (n < 1) throw std::invalid_argument("coindex: ambient dimension must be positive");
  if (j.dim() > 0) {
    if (j.ambient_dim != n)
      throw std::invalid_argument("coindex: kernel ambient dimension mismatch");
    j.validate();
  }
  const CMat delta = choi_of_identity(n);
  const std::vector<CMat> hfull = herm_basis_full(n);

  // Variables: B = Choi(phi) - Delta >= 0 (which forces Choi(phi) >= 0 as
  // well), the slack Y = mu I - phi(I) >= 0, and mu >= 0 as a 1x1 block.
  SdpProblem p;
  const int bb = p.add_block(n * n);
  const int by = p.add_block(n);
  const int bt = p.add_block(1);
  p.set_objective(bt, scalar_block(1.0));

  // Y + phi(I) - mu I = 0 with phi(I) = (tr (x) id)(B) + I.
  for (const CMat& h : hfull) {
    const double trh = std::real(h.trace());
    const int c = p.new_constraint(-trh);
    p.add_coeff(c, by, h);
    p.add_coeff(c, bb, kron(identity(n), h));
    p.add_coeff(c, bt, scalar_block(-trh));
  }
  // phi kills the kernel: <h, phi(x)> = 0 for basis x of j and all h.
  for (const CMat& x : j.basis.elements) {
    const CMat xt = x.transpose();
    for (const CMat& h : hfull) {
      const CMat coeff = kron(xt, h);
      const int c = p.new_constraint(-hs_inner(coeff, delta));
      p.add_coeff(c, bb, coeff);
    }
  }

  const SdpSolution sol = solve_or_throw(p, opts, "coindex");
  IndexResult r;
  r.value = sol.primal_blocks[bt](0, 0).real();
  r.reciprocal = 1.0 / r.value;
  r.primal_certificate = hermitize(sol.primal_blocks[bb] + delta);  // Choi(phi)
  r.dual_certificate = sol.dual_blocks[bb];
  fill_stats(r, sol);
  return r;
}

MultiplicativityReport multiplicativity_check(const MatricialSystem& s,
                                              const MatricialSystem& s0,
                                              const MatricialSystem& t,
                                              const MatricialSystem& t0,
                                              const SdpOptions& opts) {
  const long nk = long(s.ambient_dim) * long(t.ambient_dim);
  if (nk > 9)
    throw std::invalid_argument(
        "multiplicativity_check: tensor ambient dimension exceeds 9");
  MultiplicativityReport rep;
  rep.left = cp_index_relative(s, s0, opts);
  rep.right = cp_index_relative(t, t0, opts);
  rep.tensor = cp_index_relative(tensor_system(s, t), tensor_system(s0, t0), opts);
  rep.product = rep.left.value * rep.right.value;
  rep.relative_deviation =
      std::abs(rep.tensor.value - rep.product) / std::max(1.0, std::abs(rep.product));
  return rep;
}

}  // namespace opsys
