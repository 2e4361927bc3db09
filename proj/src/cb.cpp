#include "opsysindex/cb.hpp"

#include "opsysindex/hermitian.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
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

CMat scalar_block(double v) {
  CMat m(1, 1);
  m(0, 0) = v;
  return m;
}

Eigen::VectorXcd cvec(const CMat& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

// Columns are the vectorized basis elements.
Eigen::MatrixXcd stacked_basis(const std::vector<CMat>& basis) {
  const Eigen::Index len = basis.front().size();
  Eigen::MatrixXcd v(len, Eigen::Index(basis.size()));
  for (size_t k = 0; k < basis.size(); ++k) v.col(Eigen::Index(k)) = cvec(basis[k]);
  return v;
}

// Hermitian corner element [[0, y], [y*, 0]] of M_2 (x) M_dim; the twisted
// variant carries iy in the upper corner.
CMat corner_elt(int dim, const CMat& y, bool twisted) {
  CMat m = CMat::Zero(2 * dim, 2 * dim);
  m.block(0, dim, dim, dim) = twisted ? CMat(Cplx(0.0, 1.0) * y) : y;
  return CMat(m + m.adjoint());
}

// One linear agreement constraint tying the extension Choi matrix to the
// amplified map, evaluated against the range-side test matrix h.
struct AgreementRow {
  CMat coeff;      // coefficient of the Choi block on its reduced support
  double rcoeff;   // coefficient of the corner scale for diagonal-corner rows
  int k;           // domain basis index for corner rows, -1 otherwise
  bool twisted;    // corner row built from the i-twisted Hermitian element
  CMat h;          // test matrix, Hermitian in M_{2m}
};

// Every completely positive map matching the amplified corner data has a Choi
// matrix supported where the domain-side corner index equals the range-side
// corner index (the diagonal corners of the amplified map are multiples of
// corner projections, which pins the complementary support to zero).  The
// agreement rows are therefore assembled directly on that 2nm-dimensional
// support: coefficient of the reduced Choi variable for test matrix h and
// domain element b is the cornerwise Kronecker product of b^T and h.
CMat reduced_coeff(const CMat& bt, const CMat& h, int n, int m) {
  const int nm = n * m;
  CMat out(2 * nm, 2 * nm);
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t)
      out.block(s * nm, t * nm, nm, nm) =
          kron(bt.block(s * n, t * n, n, n), h.block(s * m, t * m, m, m));
  return hermitize(out);
}

// <h, image element> for a corner row; real-linear in the image y.
double image_rhs(const AgreementRow& r, const CMat& y, int m) {
  return hs_inner(r.h, corner_elt(m, y, r.twisted));
}

// Agreement rows for maps with domain basis xb in M_n and range M_m.  Rows
// whose test matrix cannot see the relevant corner are identically zero for
// every map and are skipped.
std::vector<AgreementRow> paulsen_rows(int n, int m, const std::vector<CMat>& xb) {
  std::vector<AgreementRow> rows;
  const std::vector<CMat> hb = herm_basis_full(2 * m);
  for (int j = 0; j < 2; ++j) {
    CMat pj = CMat::Zero(2 * n, 2 * n);
    pj.block(j * n, j * n, n, n) = CMat::Identity(n, n);
    CMat target = CMat::Zero(2 * m, 2 * m);
    target.block(j * m, j * m, m, m) = CMat::Identity(m, m);
    for (const CMat& h : hb) {
      if (h.block(j * m, j * m, m, m).cwiseAbs().maxCoeff() < 1e-14) continue;
      AgreementRow r;
      r.coeff = reduced_coeff(pj, h, n, m);
      r.rcoeff = hs_inner(h, target);
      r.k = -1;
      r.twisted = false;
      r.h = h;
      rows.push_back(std::move(r));
    }
  }
  for (int k = 0; k < int(xb.size()); ++k) {
    for (int tw = 0; tw < 2; ++tw) {
      const CMat b = corner_elt(n, xb[size_t(k)], tw != 0);
      const CMat bt = b.transpose();
      for (const CMat& h : hb) {
        if (h.block(0, m, m, m).cwiseAbs().maxCoeff() < 1e-14) continue;
        AgreementRow r;
        r.coeff = reduced_coeff(bt, h, n, m);
        r.rcoeff = 0.0;
        r.k = k;
        r.twisted = tw != 0;
        r.h = h;
        rows.push_back(std::move(r));
      }
    }
  }
  return rows;
}

double max_image_entry(const std::vector<CMat>& images) {
  double s = 0.0;
  for (const CMat& y : images) s = std::max(s, y.cwiseAbs().maxCoeff());
  return s;
}

SubspaceMap difference_with_identity(const SubspaceMap& u) {
  if (u.out_dim != u.domain.ambient_in)
    throw std::invalid_argument("difference with identity needs out_dim == ambient_in");
  SubspaceMap d = u;
  for (size_t k = 0; k < d.images.size(); ++k) d.images[k] -= u.domain.basis[k];
  return d;
}

}  // namespace

void OperatorSubspace::validate() const {
  if (ambient_in < 1) throw std::invalid_argument("OperatorSubspace: ambient dimension must be positive");
  if (basis.empty()) throw std::invalid_argument("OperatorSubspace: empty basis");
  for (const CMat& b : basis)
    if (b.rows() != ambient_in || b.cols() != ambient_in)
      throw std::invalid_argument("OperatorSubspace: basis element has wrong shape");
  CMat gram(dim(), dim());
  for (int k = 0; k < dim(); ++k)
    for (int l = 0; l < dim(); ++l)
      gram(k, l) = (basis[size_t(k)].adjoint() * basis[size_t(l)]).trace();
  const EigResult e = eig_hermitian(hermitize(gram));
  if (e.values.minCoeff() <= 1e-10 * std::max(1.0, e.values.maxCoeff()))
    throw std::invalid_argument("OperatorSubspace: basis is linearly dependent");
}

OperatorSubspace operator_subspace(int n, std::vector<CMat> basis) {
  OperatorSubspace s;
  s.ambient_in = n;
  s.basis = std::move(basis);
  s.validate();
  return s;
}

OperatorSubspace full_matrix_space(int n) {
  std::vector<CMat> basis;
  basis.reserve(size_t(n) * size_t(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) basis.push_back(matrix_unit(n, i, j));
  return operator_subspace(n, std::move(basis));
}

OperatorSubspace scalar_matrix_space(int n) {
  return operator_subspace(n, {CMat::Identity(n, n)});
}

void SubspaceMap::validate() const {
  domain.validate();
  if (out_dim < 1) throw std::invalid_argument("SubspaceMap: output dimension must be positive");
  if (int(images.size()) != domain.dim())
    throw std::invalid_argument("SubspaceMap: one image per domain basis element required");
  for (const CMat& y : images)
    if (y.rows() != out_dim || y.cols() != out_dim)
      throw std::invalid_argument("SubspaceMap: image has wrong shape");
}

SubspaceMap identity_map(const OperatorSubspace& x) {
  SubspaceMap u;
  u.domain = x;
  u.out_dim = x.ambient_in;
  u.images = x.basis;
  u.validate();
  return u;
}

CbNormResult cb_norm_detailed(const SubspaceMap& u, const SdpOptions& opts) {
  u.validate();
  const int n = u.domain.ambient_in;
  const int m = u.out_dim;
  CbNormResult out;
  out.tol_used = opts.tol;
  if (max_image_entry(u.images) < 1e-14) {
    out.choi = CMat::Zero(2 * n * m, 2 * n * m);
    out.dual = RVec::Zero(0);
    return out;
  }
  const std::vector<AgreementRow> rows = paulsen_rows(n, m, u.domain.basis);
  SdpProblem p;
  const int bc = p.add_block(2 * n * m);
  const int br = p.add_block(1);  // corner scale, the value being minimized
  p.set_objective(br, scalar_block(1.0));
  for (const AgreementRow& r : rows) {
    const int c = p.new_constraint(r.k < 0 ? 0.0 : image_rhs(r, u.images[size_t(r.k)], m));
    p.add_coeff(c, bc, r.coeff);
    if (std::abs(r.rcoeff) > 1e-14) p.add_coeff(c, br, scalar_block(-r.rcoeff));
  }
  const SdpSolution sol = solve_or_throw(p, opts, "cb_norm");
  out.value = sol.primal_blocks[size_t(br)](0, 0).real();
  out.choi = sol.primal_blocks[size_t(bc)];
  out.dual = sol.dual_vector;
  out.gap = sol.gap;
  out.iterations = sol.iterations;
  out.tol_used = sol.tol_used;
  return out;
}

double cb_norm(const SubspaceMap& u, const SdpOptions& opts) {
  return cb_norm_detailed(u, opts).value;
}

bool paulsen_cp_feasible(const SubspaceMap& v, double r, const SdpOptions& opts) {
  v.validate();
  const int n = v.domain.ambient_in;
  const int m = v.out_dim;
  if (max_image_entry(v.images) < 1e-14) return r >= 0.0;
  const std::vector<AgreementRow> rows = paulsen_rows(n, m, v.domain.basis);
  SdpProblem p;
  const int bc = p.add_block(2 * n * m);
  // Pure feasibility: a bounded surrogate objective keeps the iterates compact.
  p.set_objective(bc, CMat::Identity(2 * n * m, 2 * n * m));
  for (const AgreementRow& row : rows) {
    const double rhs =
        row.k < 0 ? r * row.rcoeff : image_rhs(row, v.images[size_t(row.k)], m);
    const int c = p.new_constraint(rhs);
    p.add_coeff(c, bc, row.coeff);
  }
  const SdpSolution sol = solve(p, opts);
  if (sol.status == SdpStatus::optimal) return true;
  if (sol.status == SdpStatus::primal_infeasible) return false;
  std::ostringstream msg;
  msg << "paulsen_cp_feasible: solver ended with status " << to_string(sol.status)
      << " after " << sol.iterations << " iterations";
  throw SolverFailure(msg.str(), sol.status, sol.primal_feas, sol.dual_feas);
}

CbIndexReport cb_index_dc(const OperatorSubspace& x, const OperatorSubspace& x0,
                          int restarts, std::uint64_t seed, const SdpOptions& opts) {
  x.validate();
  x0.validate();
  if (restarts < 1) throw std::invalid_argument("cb_index_dc: restarts must be positive");
  if (x.ambient_in != x0.ambient_in)
    throw std::invalid_argument("cb_index_dc: ambient dimensions differ");
  const int n = x.ambient_in;
  const int d = x.dim();
  const int d0 = x0.dim();

  // Containment of the candidate range inside the domain (complex spans).
  const Eigen::MatrixXcd vx = stacked_basis(x.basis);
  const auto qr_x = vx.colPivHouseholderQr();
  for (const CMat& g : x0.basis) {
    const Eigen::VectorXcd rhs = cvec(g);
    const Eigen::VectorXcd res = vx * qr_x.solve(rhs) - rhs;
    if (res.norm() > 1e-8 * (1.0 + rhs.norm()))
      throw std::invalid_argument("cb_index_dc: X0 is not contained in X");
  }

  const std::vector<AgreementRow> rows = paulsen_rows(n, n, x.basis);

  // Real coordinates for u: u(x_k) = sum_j (w[a(k,j)] + i w[b(k,j)]) g_j.
  const int nw = 2 * d * d0;
  const auto widx = [&](int k, int j, bool im) { return (k * d0 + j) * 2 + (im ? 1 : 0); };

  // Per-row linear functionals of the image coordinates.
  std::vector<RVec> wre(rows.size()), wim(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].k < 0) continue;
    wre[i] = RVec::Zero(d0);
    wim[i] = RVec::Zero(d0);
    for (int j = 0; j < d0; ++j) {
      wre[i](j) = image_rhs(rows[i], x0.basis[size_t(j)], n);
      wim[i](j) = image_rhs(rows[i], CMat(Cplx(0.0, 1.0) * x0.basis[size_t(j)]), n);
    }
  }

  const auto make_map = [&](const RVec& w) {
    SubspaceMap u;
    u.domain = x;
    u.out_dim = n;
    u.images.assign(size_t(d), CMat::Zero(n, n));
    for (int k = 0; k < d; ++k)
      for (int j = 0; j < d0; ++j)
        u.images[size_t(k)] +=
            Cplx(w(widx(k, j, false)), w(widx(k, j, true))) * x0.basis[size_t(j)];
    return u;
  };

  // Penalized step.  The defining constraint ||u - id|| <= ||u|| - 1 can only
  // ever hold with equality (reverse triangle inequality against ||id|| = 1),
  // so a hard-constrained convex step has no interior.  Instead each round
  // minimizes  rho * t - (rho - 1) * l(u)  over (u, t) with t bounding
  // ||u - id||_cb through its amplified extension rows, where l is the affine
  // minorant of ||.||_cb at the current iterate.  This majorizes the exact
  // penalty  ||u|| + rho * (||u - id|| - ||u|| + 1)  up to the constant rho.
  const auto ccp_step = [&](const RVec& lcoef, double rho) -> std::optional<RVec> {
    SdpProblem p;
    const int b2 = p.add_block(2 * n * n);
    const int bt = p.add_block(1);
    p.set_objective(bt, scalar_block(rho));
    std::vector<int> wv(static_cast<size_t>(nw));
    for (int idx = 0; idx < nw; ++idx)
      wv[size_t(idx)] = p.add_free(-(rho - 1.0) * lcoef(idx));
    for (size_t i = 0; i < rows.size(); ++i) {
      const AgreementRow& r = rows[i];
      const int c2 = p.new_constraint(r.k < 0 ? 0.0 : -image_rhs(r, x.basis[size_t(r.k)], n));
      p.add_coeff(c2, b2, r.coeff);
      if (r.k < 0) {
        p.add_coeff(c2, bt, scalar_block(-r.rcoeff));
      } else {
        for (int j = 0; j < d0; ++j) {
          if (std::abs(wre[i](j)) > 1e-14)
            p.add_free_coeff(c2, wv[size_t(widx(r.k, j, false))], -wre[i](j));
          if (std::abs(wim[i](j)) > 1e-14)
            p.add_free_coeff(c2, wv[size_t(widx(r.k, j, true))], -wim[i](j));
        }
      }
    }
    const SdpSolution sol = solve(p, opts);
    if (sol.status != SdpStatus::optimal) return std::nullopt;
    RVec w(nw);
    for (int idx = 0; idx < nw; ++idx) w(idx) = sol.free_values(wv[size_t(idx)]);
    return w;
  };

  CbIndexReport rep;
  rep.restarts = restarts;
  rep.seed = seed;
  rep.restart_values.assign(size_t(restarts), 0.0);

  // First start: coordinates of the componentwise projection of the identity
  // onto the span of the range basis; later starts are random.
  const Eigen::MatrixXcd v0 = stacked_basis(x0.basis);
  const auto qr_0 = v0.colPivHouseholderQr();
  RVec w_init = RVec::Zero(nw);
  for (int k = 0; k < d; ++k) {
    const Eigen::VectorXcd sol0 = qr_0.solve(cvec(x.basis[size_t(k)]));
    for (int j = 0; j < d0; ++j) {
      w_init(widx(k, j, false)) = sol0(j).real();
      w_init(widx(k, j, true)) = sol0(j).imag();
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int max_rounds = 25;
  const double feas_tol = 1e-7;

  for (int rs = 0; rs < restarts; ++rs) {
    RVec w = w_init;
    if (rs > 0) {
      for (int idx = 0; idx < nw; ++idx) w(idx) = gauss(rng) / std::sqrt(double(d0));
    }
    double best_here = 0.0;
    double rho = 4.0;
    double prev_penalized = -1.0;
    try {
      for (int round = 0; round < max_rounds; ++round) {
        const SubspaceMap u = make_map(w);
        const CbNormResult nrm = cb_norm_detailed(u, opts);
        const double dist = cb_norm(difference_with_identity(u), opts);
        const double violation = std::max(0.0, dist - (nrm.value - 1.0));
        if (violation <= feas_tol) {
          if (best_here == 0.0 || nrm.value < best_here) best_here = nrm.value;
          if (!rep.feasible || nrm.value < rep.value) {
            rep.feasible = true;
            rep.value = nrm.value;
            rep.witness = u;
            rep.witness_norm = nrm.value;
            rep.witness_distance = dist;
          }
        }
        if (nrm.dual.size() == 0) break;  // degenerate (zero) iterate
        const double penalized = nrm.value + rho * violation;
        const bool stalled =
            prev_penalized >= 0.0 &&
            std::abs(penalized - prev_penalized) < 1e-8 * (1.0 + std::abs(penalized));
        if (stalled) {
          if (violation <= feas_tol || rho >= 1024.0) break;
          rho *= 4.0;
          prev_penalized = -1.0;
        } else {
          prev_penalized = penalized;
        }
        RVec lcoef = RVec::Zero(nw);
        for (size_t i = 0; i < rows.size(); ++i) {
          if (rows[i].k < 0) continue;
          const double y = nrm.dual(Eigen::Index(i));
          if (y == 0.0) continue;
          for (int j = 0; j < d0; ++j) {
            lcoef(widx(rows[i].k, j, false)) += y * wre[i](j);
            lcoef(widx(rows[i].k, j, true)) += y * wim[i](j);
          }
        }
        const auto step = ccp_step(lcoef, rho);
        if (!step) break;
        w = *step;
      }
    } catch (const SolverFailure&) {
      // A failed inner solve ends this restart; other restarts continue.
    }
    rep.restart_values[size_t(rs)] = best_here;
  }
  return rep;
}

double linf_functional_norm(const RVec& c) { return c.cwiseAbs().sum(); }

double linf_functional_minus_id_norm(const RVec& c) {
  const double l1 = c.cwiseAbs().sum();
  double best = 0.0;
  for (Eigen::Index i = 0; i < c.size(); ++i)
    best = std::max(best, l1 - std::abs(c(i)) + std::abs(c(i) - 1.0));
  return best;
}

double bounded_index_linf(int n) {
  if (n < 2) throw std::invalid_argument("bounded_index_linf: n must be at least 2");
  const auto feasible = [&](double s) {
    const RVec c = RVec::Constant(n, s);
    return linf_functional_minus_id_norm(c) <= linf_functional_norm(c) - 1.0 + 1e-15;
  };
  double lo = 0.0;
  double hi = 1.0;
  while (!feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw std::logic_error("bounded_index_linf: no feasible scale found");
  }
  for (int it = 0; it < 120; ++it) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return double(n) * hi;
}

}  // namespace opsys
