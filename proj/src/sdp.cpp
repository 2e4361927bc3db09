#include "opsysindex/sdp.hpp"

#include "opsysindex/basis.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace opsys {

namespace {

constexpr double kBig = 1e30;

using Entry = SdpProblem::Entry;

double entry_scale(const CMat& a) {
  double s = a.cwiseAbs().maxCoeff();
  return s > 1.0 ? s : 1.0;
}

}  // namespace

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::optimal: return "optimal";
    case SdpStatus::primal_infeasible: return "primal_infeasible";
    case SdpStatus::dual_infeasible: return "dual_infeasible";
    case SdpStatus::max_iterations: return "max_iterations";
  }
  return "unknown";
}

int SdpProblem::add_block(int dim) {
  if (dim <= 0) throw std::invalid_argument("sdp block dimension must be positive");
  block_dims.push_back(dim);
  objective.push_back(CMat::Zero(dim, dim));
  return int(block_dims.size()) - 1;
}

int SdpProblem::add_free(double objective_coeff) {
  RVec next(free_count + 1);
  if (free_count > 0) next.head(free_count) = free_objective;
  next(free_count) = objective_coeff;
  free_objective = next;
  return free_count++;
}

void SdpProblem::set_objective(int block, const CMat& c) {
  if (block < 0 || block >= int(block_dims.size())) throw std::out_of_range("sdp objective block index");
  require_hermitian(c, "sdp objective", 1e-9);
  if (c.rows() != block_dims[size_t(block)]) throw std::invalid_argument("sdp objective dimension mismatch");
  objective[size_t(block)] = hermitize(c);
}

int SdpProblem::new_constraint(double rhs) {
  if (!std::isfinite(rhs)) throw std::invalid_argument("sdp constraint rhs must be finite");
  Constraint c;
  c.rhs = rhs;
  constraints.push_back(std::move(c));
  return int(constraints.size()) - 1;
}

void SdpProblem::add_coeff(int constraint, int block, const CMat& a) {
  if (constraint < 0 || constraint >= int(constraints.size())) throw std::out_of_range("sdp constraint index");
  if (block < 0 || block >= int(block_dims.size())) throw std::out_of_range("sdp block index");
  const int n = block_dims[size_t(block)];
  if (a.rows() != n || a.cols() != n) throw std::invalid_argument("sdp coefficient dimension mismatch");
  require_hermitian(a, "sdp constraint coefficient", 1e-9);
  const CMat h = hermitize(a);
  const double drop = 1e-14 * entry_scale(h);
  auto& entries = constraints[size_t(constraint)].blocks[block];
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r)
      if (std::abs(h(r, c)) > drop) entries.push_back({r, c, h(r, c)});
  if (entries.empty()) constraints[size_t(constraint)].blocks.erase(block);
}

void SdpProblem::add_free_coeff(int constraint, int free_var, double coeff) {
  if (constraint < 0 || constraint >= int(constraints.size())) throw std::out_of_range("sdp constraint index");
  if (free_var < 0 || free_var >= free_count) throw std::out_of_range("sdp free variable index");
  if (!std::isfinite(coeff)) throw std::invalid_argument("sdp free coefficient must be finite");
  if (coeff != 0.0) constraints[size_t(constraint)].free_coeffs.push_back({free_var, coeff});
}

void SdpProblem::validate() const {
  if (block_dims.empty()) throw std::invalid_argument("sdp problem has no PSD blocks");
  if (objective.size() != block_dims.size()) throw std::invalid_argument("sdp objective/block mismatch");
  for (size_t b = 0; b < block_dims.size(); ++b) {
    if (block_dims[b] <= 0) throw std::invalid_argument("sdp block dimension must be positive");
    if (objective[b].rows() != block_dims[b] || objective[b].cols() != block_dims[b])
      throw std::invalid_argument("sdp objective dimension mismatch");
  }
  if (free_count < 0 || free_objective.size() != free_count)
    throw std::invalid_argument("sdp free objective size mismatch");
  for (const auto& con : constraints) {
    if (!std::isfinite(con.rhs)) throw std::invalid_argument("sdp rhs not finite");
    for (const auto& [b, entries] : con.blocks) {
      if (b < 0 || b >= int(block_dims.size())) throw std::invalid_argument("sdp constraint block out of range");
      for (const auto& e : entries)
        if (e.r < 0 || e.c < 0 || e.r >= block_dims[size_t(b)] || e.c >= block_dims[size_t(b)])
          throw std::invalid_argument("sdp constraint entry out of range");
    }
    for (const auto& [t, v] : con.free_coeffs) {
      if (t < 0 || t >= free_count) throw std::invalid_argument("sdp free coefficient out of range");
      if (!std::isfinite(v)) throw std::invalid_argument("sdp free coefficient not finite");
    }
  }
}

namespace {

// One constraint row after unit-norm scaling, with dense free coefficients.
struct Row {
  std::vector<std::pair<int, std::vector<Entry>>> blocks;
  RVec fc;         // dense, length free_count
  double rhs = 0;  // scaled
  double scale = 1;
  int orig = -1;
};

double sparse_dot_dense(const std::vector<Entry>& a, const CMat& x) {
  double s = 0;
  for (const auto& e : a) s += (std::conj(e.v) * x(e.r, e.c)).real();
  return s;
}

double row_dot_blocks(const Row& row, const std::vector<CMat>& xs) {
  double s = 0;
  for (const auto& [b, entries] : row.blocks) s += sparse_dot_dense(entries, xs[size_t(b)]);
  return s;
}

void scatter_row(const Row& row, int block, CMat& out) {
  out.setZero();
  for (const auto& [b, entries] : row.blocks) {
    if (b != block) continue;
    for (const auto& e : entries) out(e.r, e.c) = e.v;
  }
}

// Maximum alpha in [0, kBig] with m + alpha*d >= 0, for m > 0.
double max_step(const CMat& m, const CMat& d) {
  Eigen::LLT<CMat> llt(m);
  if (llt.info() != Eigen::Success) return 0.0;
  CMat l = llt.matrixL();
  CMat a = l.triangularView<Eigen::Lower>().solve(d);
  CMat w = l.triangularView<Eigen::Lower>().solve(CMat(a.adjoint()));
  double lo = eig_hermitian(hermitize(w)).values.minCoeff();
  if (lo >= -1e-14) return kBig;
  return -1.0 / lo;
}

struct Work {
  const SdpProblem* p = nullptr;
  std::vector<Row> rows;          // kept rows, scaled
  std::vector<int> dropped;       // original indices of dropped rows
  int nb = 0, f = 0;
  std::vector<int> dims;
  std::vector<CMat> cmat;         // objective per block
  double bmax = 1, cmax = 1;
  // per-block list of (kept-row index, entries)
  std::vector<std::vector<std::pair<int, const std::vector<Entry>*>>> by_block;
};

void build_by_block(Work& w) {
  w.by_block.assign(size_t(w.nb), {});
  for (int i = 0; i < int(w.rows.size()); ++i)
    for (const auto& [b, entries] : w.rows[size_t(i)].blocks)
      w.by_block[size_t(b)].push_back({i, &entries});
}

// y in kept/scaled coordinates -> multipliers for the original rows.
RVec unscale_dual(const Work& w, const RVec& y) {
  RVec out = RVec::Zero(w.p->num_constraints());
  for (size_t i = 0; i < w.rows.size(); ++i) out(w.rows[i].orig) = y(long(i)) / w.rows[i].scale;
  return out;
}

// A*(y) per block plus the free part, in kept/scaled coordinates.
void apply_adjoint(const Work& w, const RVec& y, std::vector<CMat>& owt, RVec& fr) {
  for (int b = 0; b < w.nb; ++b) owt[size_t(b)].setZero(w.dims[size_t(b)], w.dims[size_t(b)]);
  fr = RVec::Zero(w.f);
  for (size_t i = 0; i < w.rows.size(); ++i) {
    const double yi = y(long(i));
    if (yi == 0.0) continue;
    for (const auto& [b, entries] : w.rows[i].blocks)
      for (const auto& e : entries) owt[size_t(b)](e.r, e.c) += yi * e.v;
    fr += yi * w.rows[i].fc;
  }
}

struct CertCheck {
  bool ok = false;
  RVec ray;       // normalized y (kept/scaled space)
  double viol = kBig;
};

// Farkas ray for primal infeasibility: y with A*(y) <= 0, F^T y = 0, b.y = 1.
CertCheck try_primal_infeas_cert(const Work& w, const RVec& y, double ctol) {
  CertCheck out;
  double s = 0;
  for (size_t i = 0; i < w.rows.size(); ++i) s += w.rows[i].rhs * y(long(i));
  if (!(s > 0)) return out;
  RVec yh = y / s;
  std::vector<CMat> ay(size_t(w.nb));
  RVec fr;
  apply_adjoint(w, yh, ay, fr);
  double kappa = 1.0 + yh.cwiseAbs().sum();
  double worst = 0;
  for (int b = 0; b < w.nb; ++b) {
    double hi = eig_hermitian(hermitize(ay[size_t(b)])).values.maxCoeff();
    worst = std::max(worst, hi);
  }
  if (w.f > 0) worst = std::max(worst, fr.cwiseAbs().maxCoeff());
  out.viol = worst / kappa;
  out.ok = out.viol <= ctol;
  out.ray = yh;
  return out;
}

// Improving ray for an unbounded primal: X >= 0, A(X) + F u = 0, <C,X> + c.u = -1.
struct RayCheck {
  bool ok = false;
  std::vector<CMat> xray;
  RVec uray;
  double viol = kBig;
};

RayCheck try_dual_infeas_cert(const Work& w, const std::vector<CMat>& x, const RVec& u, double ctol) {
  RayCheck out;
  double obj = 0;
  for (int b = 0; b < w.nb; ++b) obj += hs_inner(w.cmat[size_t(b)], x[size_t(b)]);
  if (w.f > 0) obj += w.p->free_objective.dot(u);
  if (!(obj < 0)) return out;
  const double scale = -1.0 / obj;
  std::vector<CMat> xr(size_t(w.nb));
  for (int b = 0; b < w.nb; ++b) xr[size_t(b)] = x[size_t(b)] * scale;
  RVec ur = u * scale;
  double tr = 0;
  for (int b = 0; b < w.nb; ++b) tr += xr[size_t(b)].real().trace();
  double kappa = 1.0 + tr + (w.f > 0 ? ur.cwiseAbs().sum() : 0.0);
  double worst = 0;
  for (size_t i = 0; i < w.rows.size(); ++i) {
    double v = row_dot_blocks(w.rows[i], xr) + (w.f > 0 ? w.rows[i].fc.dot(ur) : 0.0);
    worst = std::max(worst, std::abs(v));
  }
  out.viol = worst / kappa;
  out.ok = out.viol <= ctol;
  out.xray = std::move(xr);
  out.uray = std::move(ur);
  return out;
}

// Residuals of a candidate solution against the ORIGINAL (unscaled) data.
void final_residuals(const SdpProblem& p, SdpSolution& s) {
  const int m = p.num_constraints();
  double bmax = 1.0, cmax = 1.0;
  for (const auto& con : p.constraints) bmax = std::max(bmax, std::abs(con.rhs));
  for (const auto& c : p.objective) if (c.size() > 0) cmax = std::max(cmax, c.cwiseAbs().maxCoeff());
  if (p.free_count > 0) cmax = std::max(cmax, p.free_objective.cwiseAbs().maxCoeff());

  double pres = 0;
  for (int i = 0; i < m; ++i) {
    const auto& con = p.constraints[size_t(i)];
    double v = -con.rhs;
    for (const auto& [b, entries] : con.blocks) v += sparse_dot_dense(entries, s.primal_blocks[size_t(b)]);
    for (const auto& [t, coeff] : con.free_coeffs) v += coeff * s.free_values(t);
    pres = std::max(pres, std::abs(v));
  }
  s.primal_feas = pres / bmax;

  s.dual_blocks.assign(p.block_dims.size(), CMat());
  for (size_t b = 0; b < p.block_dims.size(); ++b) s.dual_blocks[b] = p.objective[b];
  RVec fres = p.free_count > 0 ? RVec(p.free_objective) : RVec();
  for (int i = 0; i < m; ++i) {
    const double yi = s.dual_vector(i);
    if (yi == 0.0) continue;
    const auto& con = p.constraints[size_t(i)];
    for (const auto& [b, entries] : con.blocks)
      for (const auto& e : entries) s.dual_blocks[size_t(b)](e.r, e.c) -= yi * e.v;
    for (const auto& [t, coeff] : con.free_coeffs) fres(t) -= yi * coeff;
  }
  double dres = 0, zmin = 0;
  for (auto& z : s.dual_blocks) {
    z = hermitize(z);
    zmin = std::min(zmin, eig_hermitian(z).values.minCoeff());
  }
  dres = std::max(dres, std::max(0.0, -zmin) / cmax);
  if (p.free_count > 0) dres = std::max(dres, fres.cwiseAbs().maxCoeff() / cmax);
  s.dual_feas = dres;

  double pobj = 0;
  for (size_t b = 0; b < p.block_dims.size(); ++b) pobj += hs_inner(p.objective[b], s.primal_blocks[b]);
  if (p.free_count > 0) pobj += p.free_objective.dot(s.free_values);
  double dobj = 0;
  for (int i = 0; i < m; ++i) dobj += p.constraints[size_t(i)].rhs * s.dual_vector(i);
  s.primal_value = pobj;
  s.dual_value = dobj;
  s.gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
}

}  // namespace

SdpSolution solve(const SdpProblem& p, const SdpOptions& opts) {
  p.validate();
  const int nb = int(p.block_dims.size());
  const int f = p.free_count;
  const int m_orig = p.num_constraints();

  Work w;
  w.p = &p;
  w.nb = nb;
  w.f = f;
  w.dims = p.block_dims;
  w.cmat = p.objective;
  for (const auto& con : p.constraints) w.bmax = std::max(w.bmax, std::abs(con.rhs));
  for (const auto& c : p.objective) if (c.size() > 0) w.cmax = std::max(w.cmax, c.cwiseAbs().maxCoeff());
  if (f > 0) w.cmax = std::max(w.cmax, p.free_objective.cwiseAbs().maxCoeff());

  SdpSolution sol;
  sol.tol_used = opts.tol;
  sol.free_values = RVec::Zero(f);
  sol.dual_vector = RVec::Zero(m_orig);
  sol.primal_blocks.assign(size_t(nb), CMat());
  for (int b = 0; b < nb; ++b) sol.primal_blocks[size_t(b)] = CMat::Zero(p.block_dims[size_t(b)], p.block_dims[size_t(b)]);

  // --- scale rows to unit norm; zero rows are either vacuous or infeasible ---
  std::vector<Row> all_rows;
  all_rows.reserve(size_t(m_orig));
  for (int i = 0; i < m_orig; ++i) {
    const auto& con = p.constraints[size_t(i)];
    Row row;
    row.orig = i;
    row.fc = RVec::Zero(f);
    double nrm2 = 0;
    for (const auto& [b, entries] : con.blocks) {
      for (const auto& e : entries) nrm2 += std::norm(e.v);
      row.blocks.push_back({b, entries});
    }
    for (const auto& [t, coeff] : con.free_coeffs) row.fc(t) += coeff;
    nrm2 += row.fc.squaredNorm();
    const double nrm = std::sqrt(nrm2);
    if (nrm <= 1e-14) {
      if (std::abs(con.rhs) > 1e-10 * w.bmax) {
        sol.status = SdpStatus::primal_infeasible;
        sol.infeas_dual_ray = RVec::Zero(m_orig);
        sol.infeas_dual_ray(i) = 1.0 / con.rhs;  // b.y = 1, A*(y) = 0
        final_residuals(p, sol);
        return sol;
      }
      continue;  // vacuous 0 = 0 row
    }
    row.scale = nrm;
    row.rhs = con.rhs / nrm;
    for (auto& [b, entries] : row.blocks)
      for (auto& e : entries) e.v /= nrm;
    row.fc /= nrm;
    all_rows.push_back(std::move(row));
  }

  // --- rank filter: column-pivoted QR of the stacked real coordinates ---
  {
    std::vector<long> offs(size_t(nb) + 1, 0);
    for (int b = 0; b < nb; ++b) offs[size_t(b) + 1] = offs[size_t(b)] + long(p.block_dims[size_t(b)]) * p.block_dims[size_t(b)];
    const long ncoord = offs.back() + f;
    const int mr = int(all_rows.size());
    if (mr > 0) {
      RMat hmat = RMat::Zero(ncoord, mr);
      for (int i = 0; i < mr; ++i) {
        for (const auto& [b, entries] : all_rows[size_t(i)].blocks) {
          const int n = p.block_dims[size_t(b)];
          CMat dense = CMat::Zero(n, n);
          for (const auto& e : entries) dense(e.r, e.c) = e.v;
          hmat.col(i).segment(offs[size_t(b)], long(n) * n) = hvec(dense);
        }
        if (f > 0) hmat.col(i).tail(f) = all_rows[size_t(i)].fc;
      }
      Eigen::ColPivHouseholderQR<RMat> qr(hmat);
      qr.setThreshold(1e-10);
      const int rank = int(qr.rank());
      std::vector<int> kept, drop;
      const auto& perm = qr.colsPermutation().indices();
      std::vector<char> is_kept(size_t(mr), 0);
      for (int k = 0; k < rank; ++k) is_kept[size_t(perm(k))] = 1;
      for (int i = 0; i < mr; ++i) (is_kept[size_t(i)] ? kept : drop).push_back(i);

      if (!drop.empty()) {
        RMat hk(ncoord, rank);
        RVec bk(rank);
        for (int k = 0; k < rank; ++k) {
          hk.col(k) = hmat.col(kept[size_t(k)]);
          bk(k) = all_rows[size_t(kept[size_t(k)])].rhs;
        }
        Eigen::HouseholderQR<RMat> hqr(hk);
        std::vector<int> readd;
        for (int j : drop) {
          RVec coef = hqr.solve(hmat.col(j));
          const double resid = (hk * coef - hmat.col(j)).norm();
          const double pred = bk.dot(coef);
          const double bj = all_rows[size_t(j)].rhs;
          if (std::abs(bj - pred) > 1e-8 * (1.0 + std::abs(bj))) {
            if (resid <= 1e-6 * std::abs(bj - pred)) {
              // b is inconsistent on a dependent row: certified infeasibility.
              RVec yout = RVec::Zero(m_orig);
              const double r = bj - pred;
              yout(all_rows[size_t(j)].orig) = 1.0 / (r * all_rows[size_t(j)].scale);
              for (int k = 0; k < rank; ++k)
                yout(all_rows[size_t(kept[size_t(k)])].orig) =
                    -coef(k) / (r * all_rows[size_t(kept[size_t(k)])].scale);
              sol.status = SdpStatus::primal_infeasible;
              sol.infeas_dual_ray = yout;
              final_residuals(p, sol);
              return sol;
            }
            readd.push_back(j);  // near-threshold: keep it rather than guess
          } else {
            sol.dual_vector(all_rows[size_t(j)].orig) = 0.0;
          }
        }
        for (int j : readd) kept.push_back(j);
        std::sort(kept.begin(), kept.end());
        std::vector<Row> sel;
        sel.reserve(kept.size());
        for (int i : kept) sel.push_back(std::move(all_rows[size_t(i)]));
        all_rows = std::move(sel);
      }
    }
  }
  w.rows = std::move(all_rows);
  const int m = int(w.rows.size());
  build_by_block(w);

  // --- degenerate case: nothing couples the blocks ---
  if (m == 0) {
    if (f > 0 && p.free_objective.cwiseAbs().maxCoeff() > 1e-12 * w.cmax) {
      int t = 0;
      for (int j = 0; j < f; ++j)
        if (std::abs(p.free_objective(j)) > std::abs(p.free_objective(t))) t = j;
      sol.status = SdpStatus::dual_infeasible;
      sol.infeas_primal_ray.assign(size_t(nb), CMat());
      for (int b = 0; b < nb; ++b)
        sol.infeas_primal_ray[size_t(b)] = CMat::Zero(p.block_dims[size_t(b)], p.block_dims[size_t(b)]);
      sol.infeas_free_ray = RVec::Zero(f);
      sol.infeas_free_ray(t) = -1.0 / p.free_objective(t);
      final_residuals(p, sol);
      return sol;
    }
    for (int b = 0; b < nb; ++b) {
      EigResult eg = eig_hermitian(p.objective[size_t(b)]);
      const double lo = eg.values.minCoeff();
      if (lo < -1e-12 * w.cmax) {
        int k = 0;
        eg.values.minCoeff(&k);
        sol.status = SdpStatus::dual_infeasible;
        sol.infeas_primal_ray.assign(size_t(nb), CMat());
        for (int bb = 0; bb < nb; ++bb)
          sol.infeas_primal_ray[size_t(bb)] = CMat::Zero(p.block_dims[size_t(bb)], p.block_dims[size_t(bb)]);
        CMat v = eg.vectors.col(k);
        sol.infeas_primal_ray[size_t(b)] = (v * v.adjoint()) / (-lo);
        sol.infeas_free_ray = RVec::Zero(f);
        final_residuals(p, sol);
        return sol;
      }
    }
    sol.status = SdpStatus::optimal;
    final_residuals(p, sol);
    return sol;
  }

  // --- interior-point iteration ---
  int maxdim = 1;
  long ntot = 0;
  for (int b = 0; b < nb; ++b) {
    maxdim = std::max(maxdim, p.block_dims[size_t(b)]);
    ntot += p.block_dims[size_t(b)];
  }
  double rhs_max = 0;
  for (const auto& row : w.rows) rhs_max = std::max(rhs_max, std::abs(row.rhs));
  const double xi_p = std::max({10.0, std::sqrt(double(maxdim)), 2.0 * rhs_max});
  const double xi_d = std::max({10.0, std::sqrt(double(maxdim)), w.cmax});

  std::vector<CMat> X(static_cast<size_t>(nb)), Z(static_cast<size_t>(nb)),
      Zinv(static_cast<size_t>(nb)), Rd(static_cast<size_t>(nb));
  for (int b = 0; b < nb; ++b) {
    const int n = p.block_dims[size_t(b)];
    X[size_t(b)] = xi_p * CMat::Identity(n, n);
    Z[size_t(b)] = xi_d * CMat::Identity(n, n);
  }
  RVec y = RVec::Zero(m), u = RVec::Zero(f);
  RVec rhs_vec(m);
  for (int i = 0; i < m; ++i) rhs_vec(i) = w.rows[size_t(i)].rhs;

  const double tol = opts.tol;
  const double bscale = 1.0 + rhs_max;
  const double cscale = 1.0 + w.cmax;
  int stall = 0;
  bool numerical_break = false;

  std::vector<CMat> dXa(static_cast<size_t>(nb)), dZa(static_cast<size_t>(nb)),
      dX(static_cast<size_t>(nb)), dZ(static_cast<size_t>(nb)), Ecorr(static_cast<size_t>(nb));
  RMat kmat(m + f, m + f);
  RVec rhs_aug(m + f), sol_aug(m + f);

  auto accepted = [&](int iter) {
    sol.iterations = iter;
    for (int b = 0; b < nb; ++b) sol.primal_blocks[size_t(b)] = X[size_t(b)];
    sol.free_values = u;
    RVec yfull = unscale_dual(w, y);
    for (int i = 0; i < m_orig; ++i) sol.dual_vector(i) = yfull(i);
  };

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    // factor Z, residuals, convergence bookkeeping
    bool ok = true;
    for (int b = 0; b < nb; ++b) {
      const int n = p.block_dims[size_t(b)];
      Eigen::LLT<CMat> llt(Z[size_t(b)]);
      if (llt.info() == Eigen::Success) {
        Zinv[size_t(b)] = hermitize(CMat(llt.solve(CMat::Identity(n, n))));
        continue;
      }
      // Cholesky can fail from rounding once the block is nearly singular at
      // high accuracy; invert through a spectral decomposition with a small
      // positive floor instead, and only give up if the block is genuinely
      // indefinite.
      EigResult e = eig_hermitian(Z[size_t(b)]);
      const double lmax = e.values.maxCoeff();
      if (!(lmax > 0.0) || e.values.minCoeff() < -1e-8 * std::max(1.0, lmax)) {
        ok = false;
        break;
      }
      const double floor = 1e-14 * std::max(1.0, lmax);
      RVec inv = e.values.cwiseMax(floor).cwiseInverse();
      Zinv[size_t(b)] = hermitize(CMat(e.vectors * inv.asDiagonal() * e.vectors.adjoint()));
    }
    if (!ok) { numerical_break = true; accepted(iter); break; }

    RVec rp(m);
    for (int i = 0; i < m; ++i)
      rp(i) = w.rows[size_t(i)].rhs - row_dot_blocks(w.rows[size_t(i)], X) -
              (f > 0 ? w.rows[size_t(i)].fc.dot(u) : 0.0);
    RVec fr;
    apply_adjoint(w, y, Rd, fr);
    for (int b = 0; b < nb; ++b) Rd[size_t(b)] = hermitize(CMat(w.cmat[size_t(b)] - Rd[size_t(b)] - Z[size_t(b)]));
    RVec rf = f > 0 ? RVec(p.free_objective - fr) : RVec();

    double mu = 0;
    for (int b = 0; b < nb; ++b) mu += hs_inner(X[size_t(b)], Z[size_t(b)]);
    mu /= double(ntot);

    double pobj = 0;
    for (int b = 0; b < nb; ++b) pobj += hs_inner(w.cmat[size_t(b)], X[size_t(b)]);
    if (f > 0) pobj += p.free_objective.dot(u);
    double dobj = rhs_vec.dot(y);

    const double pinf = m > 0 ? rp.cwiseAbs().maxCoeff() / bscale : 0.0;
    double dinf = 0;
    for (int b = 0; b < nb; ++b) dinf = std::max(dinf, Rd[size_t(b)].cwiseAbs().maxCoeff());
    if (f > 0 && rf.size() > 0) dinf = std::max(dinf, rf.cwiseAbs().maxCoeff());
    dinf /= cscale;
    const double relgap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
    sol.history.push_back({pobj, dobj, pinf, dinf});
    if (opts.trace)
      std::cerr << "iter " << iter << " mu " << mu << " pinf " << pinf << " dinf " << dinf
                << " gap " << relgap << " pobj " << pobj << " dobj " << dobj << "\n";

    if (pinf <= tol && dinf <= tol && relgap <= tol) {
      sol.status = SdpStatus::optimal;
      accepted(iter);
      final_residuals(p, sol);
      return sol;
    }

    // divergence => attempt certificates
    const double ynorm = m > 0 ? y.cwiseAbs().maxCoeff() : 0.0;
    double xnorm = 0;
    for (int b = 0; b < nb; ++b) xnorm = std::max(xnorm, X[size_t(b)].cwiseAbs().maxCoeff());
    if (ynorm > 1e7 * bscale || dobj > 1e8 * bscale) {
      CertCheck cc = try_primal_infeas_cert(w, y, 1e-9);
      if (cc.ok) {
        sol.status = SdpStatus::primal_infeasible;
        sol.infeas_dual_ray = unscale_dual(w, cc.ray);
        accepted(iter);
        final_residuals(p, sol);
        return sol;
      }
    }
    if (xnorm > 1e7 * xi_p * std::sqrt(double(maxdim)) || pobj < -1e8 * cscale) {
      RayCheck rc = try_dual_infeas_cert(w, X, u, 1e-9);
      if (rc.ok) {
        sol.status = SdpStatus::dual_infeasible;
        sol.infeas_primal_ray = rc.xray;
        sol.infeas_free_ray = rc.uray;
        accepted(iter);
        final_residuals(p, sol);
        return sol;
      }
    }

    // Schur complement M_ij = Re tr(A_i X A_j Z^{-1}); free columns alongside
    kmat.setZero();
    for (int b = 0; b < nb; ++b) {
      const auto& rows_b = w.by_block[size_t(b)];
      if (rows_b.empty()) continue;
      const int n = p.block_dims[size_t(b)];
      CMat dense(n, n), v(n, n);
      for (size_t ii = 0; ii < rows_b.size(); ++ii) {
        const int i = rows_b[ii].first;
        scatter_row(w.rows[size_t(i)], b, dense);
        v.noalias() = Zinv[size_t(b)] * dense * X[size_t(b)];
        for (size_t jj = ii; jj < rows_b.size(); ++jj) {
          const int j = rows_b[jj].first;
          Cplx s = 0;
          for (const auto& e : *rows_b[jj].second) s += e.v * v(e.c, e.r);
          kmat(i, j) += s.real();
          if (i != j) kmat(j, i) += s.real();
        }
      }
    }
    for (int i = 0; i < m; ++i)
      for (int t = 0; t < f; ++t) {
        kmat(i, m + t) = w.rows[size_t(i)].fc(t);
        kmat(m + t, i) = w.rows[size_t(i)].fc(t);
      }

    Eigen::PartialPivLU<RMat> klu(kmat);
    Eigen::PartialPivLU<RMat> klu_reg;
    bool kreg_ready = false;

    std::vector<CMat> wrhs(static_cast<size_t>(nb));
    auto solve_direction = [&](double sigmu, bool with_corr) -> bool {
      for (int b = 0; b < nb; ++b) {
        const CMat& xb = X[size_t(b)];
        const CMat& zb = Zinv[size_t(b)];
        CMat xr = xb * Rd[size_t(b)];
        if (with_corr) xr += Ecorr[size_t(b)];
        wrhs[size_t(b)] = xr * zb - sigmu * zb;
      }
      for (int i = 0; i < m; ++i) {
        double acc = w.rows[size_t(i)].rhs - (f > 0 ? w.rows[size_t(i)].fc.dot(u) : 0.0);
        for (const auto& [b, entries] : w.rows[size_t(i)].blocks)
          acc += sparse_dot_dense(entries, wrhs[size_t(b)]);
        rhs_aug(i) = acc;
      }
      for (int t = 0; t < f; ++t) rhs_aug(m + t) = rf(t);
      sol_aug = klu.solve(rhs_aug);
      if (!sol_aug.allFinite()) {
        // The Schur complement turns numerically singular in the last
        // centering steps; a tiny quasi-definite shift recovers a usable
        // direction.
        if (!kreg_ready) {
          RMat kreg = kmat;
          const double delta = 1e-12 * std::max(1.0, kmat.cwiseAbs().maxCoeff());
          for (int i = 0; i < m; ++i) kreg(i, i) += delta;
          for (int t = 0; t < f; ++t) kreg(m + t, m + t) -= delta;
          klu_reg.compute(kreg);
          kreg_ready = true;
        }
        sol_aug = klu_reg.solve(rhs_aug);
        if (!sol_aug.allFinite()) return false;
      }
      RVec dy = sol_aug.head(m);
      std::vector<CMat> aty(static_cast<size_t>(nb));
      RVec dummy;
      apply_adjoint(w, dy, aty, dummy);
      for (int b = 0; b < nb; ++b) {
        dZ[size_t(b)] = hermitize(CMat(Rd[size_t(b)] - aty[size_t(b)]));
        CMat raw = sigmu * Zinv[size_t(b)] - X[size_t(b)] -
                   X[size_t(b)] * dZ[size_t(b)] * Zinv[size_t(b)];
        if (with_corr) raw -= Ecorr[size_t(b)] * Zinv[size_t(b)];
        dX[size_t(b)] = hermitize(raw);
      }
      return true;
    };

    if (!solve_direction(0.0, false)) { numerical_break = true; accepted(iter); break; }

    double ap_aff = 1.0, ad_aff = 1.0;
    for (int b = 0; b < nb; ++b) {
      ap_aff = std::min(ap_aff, max_step(X[size_t(b)], dX[size_t(b)]));
      ad_aff = std::min(ad_aff, max_step(Z[size_t(b)], dZ[size_t(b)]));
    }
    double mu_aff = 0;
    for (int b = 0; b < nb; ++b)
      mu_aff += hs_inner(CMat(X[size_t(b)] + ap_aff * dX[size_t(b)]),
                         CMat(Z[size_t(b)] + ad_aff * dZ[size_t(b)]));
    mu_aff = std::max(mu_aff / double(ntot), 0.0);
    double sigma = std::pow(mu_aff / mu, 3.0);
    sigma = std::min(1.0, std::max(sigma, 1e-10));

    for (int b = 0; b < nb; ++b) dXa[size_t(b)] = dX[size_t(b)], dZa[size_t(b)] = dZ[size_t(b)];
    for (int b = 0; b < nb; ++b) Ecorr[size_t(b)] = dXa[size_t(b)] * dZa[size_t(b)];

    if (!solve_direction(sigma * mu, true)) { numerical_break = true; accepted(iter); break; }

    double ap = kBig, ad = kBig;
    for (int b = 0; b < nb; ++b) {
      ap = std::min(ap, max_step(X[size_t(b)], dX[size_t(b)]));
      ad = std::min(ad, max_step(Z[size_t(b)], dZ[size_t(b)]));
    }
    ap = std::min(1.0, 0.98 * ap);
    ad = std::min(1.0, 0.98 * ad);
    if (ap < 1e-10 && ad < 1e-10) {
      if (++stall >= 3) { accepted(iter); break; }
    } else {
      stall = 0;
    }

    for (int b = 0; b < nb; ++b) {
      X[size_t(b)] = hermitize(CMat(X[size_t(b)] + ap * dX[size_t(b)]));
      Z[size_t(b)] = hermitize(CMat(Z[size_t(b)] + ad * dZ[size_t(b)]));
    }
    u += ap * sol_aug.tail(f);
    y += ad * sol_aug.head(m);
    sol.iterations = iter + 1;
  }

  // The in-loop convergence test runs before each step, so a final step that
  // lands within tolerance is never seen by it; re-evaluate the same
  // optimality criteria on the accepted iterate before reporting failure.
  if (sol.status == SdpStatus::max_iterations) {
    accepted(sol.iterations);
    final_residuals(p, sol);
    if (sol.primal_feas <= tol && sol.dual_feas <= tol && sol.gap <= tol) {
      sol.status = SdpStatus::optimal;
      return sol;
    }
  }

  // no convergence: last chance for a certificate, then report honestly
  if (sol.status == SdpStatus::max_iterations) {
    CertCheck cc = try_primal_infeas_cert(w, y, 1e-8);
    if (cc.ok) {
      sol.status = SdpStatus::primal_infeasible;
      sol.infeas_dual_ray = unscale_dual(w, cc.ray);
    } else {
      RayCheck rc = try_dual_infeas_cert(w, X, u, 1e-8);
      if (rc.ok) {
        sol.status = SdpStatus::dual_infeasible;
        sol.infeas_primal_ray = rc.xray;
        sol.infeas_free_ray = rc.uray;
      }
    }
    accepted(sol.iterations);
    (void)numerical_break;
  }
  final_residuals(p, sol);
  return sol;
}

bool VerifyReport::ok(double tol) const {
  return certificate_ok && primal_feas <= tol && dual_feas <= tol && min_primal_eig >= -tol &&
         min_dual_eig >= -tol && gap <= 10 * tol;
}

VerifyReport verify(const SdpProblem& p, const SdpSolution& s, double tol) {
  p.validate();
  VerifyReport rep;
  if (s.status == SdpStatus::primal_infeasible) {
    rep.certificate_ok = false;
    if (s.infeas_dual_ray.size() == p.num_constraints()) {
      double by = 0;
      std::vector<CMat> acc(p.block_dims.size());
      for (size_t b = 0; b < p.block_dims.size(); ++b)
        acc[b] = CMat::Zero(p.block_dims[b], p.block_dims[b]);
      RVec fr = RVec::Zero(p.free_count);
      double kappa = 1.0;
      for (int i = 0; i < p.num_constraints(); ++i) {
        const double yi = s.infeas_dual_ray(i);
        const auto& con = p.constraints[size_t(i)];
        by += yi * con.rhs;
        if (yi == 0.0) continue;
        for (const auto& [b, entries] : con.blocks)
          for (const auto& e : entries) acc[size_t(b)](e.r, e.c) += yi * e.v;
        for (const auto& [t, coeff] : con.free_coeffs) fr(t) += yi * coeff;
        kappa += std::abs(yi);
      }
      double worst = 0;
      for (auto& a : acc) worst = std::max(worst, eig_hermitian(hermitize(a)).values.maxCoeff());
      if (p.free_count > 0) worst = std::max(worst, fr.cwiseAbs().maxCoeff());
      rep.certificate_ok = by > 0.5 && worst <= tol * kappa;
    }
    return rep;
  }
  if (s.status == SdpStatus::dual_infeasible) {
    rep.certificate_ok = false;
    if (s.infeas_primal_ray.size() == p.block_dims.size()) {
      double obj = 0, lo = 0, worst = 0, kappa = 1.0;
      for (size_t b = 0; b < p.block_dims.size(); ++b) {
        obj += hs_inner(p.objective[b], s.infeas_primal_ray[b]);
        lo = std::min(lo, eig_hermitian(hermitize(s.infeas_primal_ray[b])).values.minCoeff());
        kappa += s.infeas_primal_ray[b].cwiseAbs().maxCoeff();
      }
      if (p.free_count > 0 && s.infeas_free_ray.size() == p.free_count) {
        obj += p.free_objective.dot(s.infeas_free_ray);
        kappa += s.infeas_free_ray.cwiseAbs().maxCoeff();
      }
      for (const auto& con : p.constraints) {
        double v = 0;
        for (const auto& [b, entries] : con.blocks) v += sparse_dot_dense(entries, s.infeas_primal_ray[size_t(b)]);
        if (p.free_count > 0 && s.infeas_free_ray.size() == p.free_count)
          for (const auto& [t, coeff] : con.free_coeffs) v += coeff * s.infeas_free_ray(t);
        worst = std::max(worst, std::abs(v));
      }
      rep.certificate_ok = obj < -0.5 && worst <= tol * kappa && lo >= -tol * kappa;
    }
    return rep;
  }

  // optimal / max_iterations: recompute residuals from scratch
  SdpSolution fresh = s;
  final_residuals(p, fresh);
  rep.primal_feas = fresh.primal_feas;
  rep.dual_feas = fresh.dual_feas;
  rep.gap = fresh.gap;
  double xmin = 0, zmin = 0;
  for (const auto& x : fresh.primal_blocks) xmin = std::min(xmin, eig_hermitian(hermitize(x)).values.minCoeff());
  for (const auto& z : fresh.dual_blocks) zmin = std::min(zmin, eig_hermitian(z).values.minCoeff());
  rep.min_primal_eig = xmin;
  rep.min_dual_eig = zmin;
  rep.certificate_ok = true;
  return rep;
}

SdpProblem realify(const SdpProblem& p) {
  p.validate();
  SdpProblem q;
  for (int d : p.block_dims) q.add_block(2 * d);
  auto embed = [](const CMat& a) {
    const long d = a.rows();
    CMat out = CMat::Zero(2 * d, 2 * d);
    out.topLeftCorner(d, d) = a.real().cast<Cplx>();
    out.bottomRightCorner(d, d) = a.real().cast<Cplx>();
    out.topRightCorner(d, d) = (-a.imag()).cast<Cplx>();
    out.bottomLeftCorner(d, d) = a.imag().cast<Cplx>();
    return out;
  };
  for (size_t b = 0; b < p.block_dims.size(); ++b) q.set_objective(int(b), embed(p.objective[b]));
  for (int t = 0; t < p.free_count; ++t) q.add_free(2.0 * p.free_objective(t));
  for (const auto& con : p.constraints) {
    const int i = q.new_constraint(2.0 * con.rhs);
    for (const auto& [b, entries] : con.blocks) {
      const int n = p.block_dims[size_t(b)];
      CMat dense = CMat::Zero(n, n);
      for (const auto& e : entries) dense(e.r, e.c) = e.v;
      q.add_coeff(i, b, embed(dense));
    }
    for (const auto& [t, coeff] : con.free_coeffs) q.add_free_coeff(i, t, 2.0 * coeff);
  }
  return q;
}

void dump_problem(const SdpProblem& p, std::ostream& os) {
  os.precision(17);
  os << "sdp 1\n";
  os << "blocks " << p.block_dims.size();
  for (int d : p.block_dims) os << ' ' << d;
  os << "\nfree " << p.free_count;
  for (int t = 0; t < p.free_count; ++t) os << ' ' << p.free_objective(t);
  os << '\n';
  for (size_t b = 0; b < p.block_dims.size(); ++b) {
    const CMat& c = p.objective[b];
    for (int cc = 0; cc < c.cols(); ++cc)
      for (int r = 0; r < c.rows(); ++r)
        if (c(r, cc) != Cplx(0, 0))
          os << "obj " << b << ' ' << r << ' ' << cc << ' ' << c(r, cc).real() << ' ' << c(r, cc).imag() << '\n';
  }
  os << "constraints " << p.constraints.size() << '\n';
  for (const auto& con : p.constraints) {
    size_t nnz = 0;
    for (const auto& [b, entries] : con.blocks) nnz += entries.size();
    os << "con " << con.rhs << ' ' << nnz << ' ' << con.free_coeffs.size() << '\n';
    for (const auto& [b, entries] : con.blocks)
      for (const auto& e : entries)
        os << b << ' ' << e.r << ' ' << e.c << ' ' << e.v.real() << ' ' << e.v.imag() << '\n';
    for (const auto& [t, v] : con.free_coeffs) os << t << ' ' << v << '\n';
  }
}

SdpProblem load_problem(std::istream& is) {
  std::string tag;
  int version = 0;
  if (!(is >> tag >> version) || tag != "sdp" || version != 1)
    throw std::runtime_error("unrecognized sdp dump header");
  SdpProblem p;
  size_t nb = 0;
  is >> tag >> nb;
  if (tag != "blocks") throw std::runtime_error("bad sdp dump: blocks");
  std::vector<CMat> obj;
  for (size_t b = 0; b < nb; ++b) {
    int d;
    is >> d;
    p.add_block(d);
    obj.push_back(CMat::Zero(d, d));
  }
  int f = 0;
  is >> tag >> f;
  if (tag != "free") throw std::runtime_error("bad sdp dump: free");
  for (int t = 0; t < f; ++t) {
    double v;
    is >> v;
    p.add_free(v);
  }
  while (is >> tag) {
    if (tag == "obj") {
      int b, r, c;
      double re, im;
      is >> b >> r >> c >> re >> im;
      obj[size_t(b)](r, c) = Cplx(re, im);
    } else if (tag == "constraints") {
      size_t mm;
      is >> mm;
      for (size_t i = 0; i < mm; ++i) {
        double rhs;
        size_t nnz, nfc;
        is >> tag >> rhs >> nnz >> nfc;
        if (tag != "con") throw std::runtime_error("bad sdp dump: con");
        const int ci = p.new_constraint(rhs);
        std::map<int, CMat> dense;
        for (size_t k = 0; k < nnz; ++k) {
          int b, r, c;
          double re, im;
          is >> b >> r >> c >> re >> im;
          auto it = dense.find(b);
          if (it == dense.end())
            it = dense.emplace(b, CMat::Zero(p.block_dims[size_t(b)], p.block_dims[size_t(b)])).first;
          it->second(r, c) = Cplx(re, im);
        }
        for (auto& [b, mat] : dense) p.add_coeff(ci, b, mat);
        for (size_t k = 0; k < nfc; ++k) {
          int t;
          double v;
          is >> t >> v;
          p.add_free_coeff(ci, t, v);
        }
      }
      break;
    } else {
      throw std::runtime_error("bad sdp dump: unexpected tag " + tag);
    }
  }
  for (size_t b = 0; b < nb; ++b) p.set_objective(int(b), obj[size_t(b)]);
  return p;
}

}  // namespace opsys
