#include "opsysindex/hermitian.hpp"

#include <cmath>
#include <string>

namespace opsys {

bool is_hermitian(const CMat& a, double tol) {
  if (a.rows() != a.cols()) return false;
  double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

CMat hermitize(const CMat& a) { return 0.5 * (a + a.adjoint()); }

void require_hermitian(const CMat& a, const char* what, double tol) {
  if (!is_hermitian(a, tol)) {
    throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian within tolerance");
  }
}

double hs_inner(const CMat& a, const CMat& b) {
  return (a.adjoint() * b).trace().real();
}

double hs_norm(const CMat& a) { return a.norm(); }

CMat matrix_unit(int n, int i, int j) {
  CMat e = CMat::Zero(n, n);
  e(i, j) = 1.0;
  return e;
}

CMat ones_matrix(int n) { return CMat::Ones(n, n); }

CMat kron(const CMat& a, const CMat& b) {
  const Eigen::Index ar = a.rows(), ac = a.cols(), br = b.rows(), bc = b.cols();
  CMat out(ar * br, ac * bc);
  for (Eigen::Index i = 0; i < ar; ++i)
    for (Eigen::Index j = 0; j < ac; ++j) out.block(i * br, j * bc, br, bc) = a(i, j) * b;
  return out;
}

CMat partial_trace_first(const CMat& x, int n, int m) {
  if (x.rows() != Eigen::Index(n) * m || x.cols() != Eigen::Index(n) * m)
    throw std::invalid_argument("partial_trace_first: dimension mismatch");
  CMat out = CMat::Zero(m, m);
  for (int b = 0; b < m; ++b)
    for (int d = 0; d < m; ++d)
      for (int a = 0; a < n; ++a) out(b, d) += x(a * m + b, a * m + d);
  return out;
}

CMat partial_trace_second(const CMat& x, int n, int m) {
  if (x.rows() != Eigen::Index(n) * m || x.cols() != Eigen::Index(n) * m)
    throw std::invalid_argument("partial_trace_second: dimension mismatch");
  CMat out = CMat::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int c = 0; c < n; ++c)
      for (int b = 0; b < m; ++b) out(a, c) += x(a * m + b, c * m + b);
  return out;
}

CMat shuffle_mid(const CMat& z, int n, int k) {
  const Eigen::Index dim = Eigen::Index(n) * n * k * k;
  if (z.rows() != dim || z.cols() != dim)
    throw std::invalid_argument("shuffle_mid: dimension mismatch");
  // index (a,b,c,d) with dims (n,n,k,k) -> position ((a*n+b)*k+c)*k+d
  // target (a,c,b,d) with dims (n,k,n,k) -> position ((a*k+c)*n+b)*k+d
  std::vector<Eigen::Index> perm(dim);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < k; ++c)
        for (int d = 0; d < k; ++d)
          perm[((Eigen::Index(a) * n + b) * k + c) * k + d] =
              ((Eigen::Index(a) * k + c) * n + b) * k + d;
  CMat out(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c) out(perm[r], perm[c]) = z(r, c);
  return out;
}

EigResult eig_hermitian(const CMat& a, double herm_tol) {
  if (a.rows() != a.cols()) throw std::invalid_argument("eig_hermitian: matrix not square");
  double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.adjoint()).cwiseAbs().maxCoeff() > herm_tol * scale)
    throw std::invalid_argument("eig_hermitian: input not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(a));
  if (es.info() != Eigen::Success) throw std::runtime_error("eig_hermitian: eigensolver failed");
  return EigResult{es.eigenvalues(), es.eigenvectors()};
}

double lambda_min(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double lambda_max(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitize(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(a.rows() - 1);
}

CMat choi_of_identity(int n) {
  CMat d = CMat::Zero(n * n, n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d(i * n + i, j * n + j) = 1.0;
  return d;
}

std::vector<CMat> herm_basis_full(int n) {
  std::vector<CMat> out;
  out.reserve(size_t(n) * n);
  for (int i = 0; i < n; ++i) out.push_back(matrix_unit(n, i, i));
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      CMat sym = CMat::Zero(n, n);
      sym(i, j) = s;
      sym(j, i) = s;
      out.push_back(sym);
      CMat asym = CMat::Zero(n, n);
      asym(i, j) = Cplx(0, s);
      asym(j, i) = Cplx(0, -s);
      out.push_back(asym);
    }
  return out;
}

std::vector<CMat> herm_basis_traceless(int n) {
  std::vector<CMat> out;
  out.reserve(size_t(n) * n - 1);
  // Helmert-style diagonal directions: (E_00 + .. + E_{k-1,k-1} - k E_kk)/sqrt(k(k+1))
  for (int k = 1; k < n; ++k) {
    CMat d = CMat::Zero(n, n);
    const double w = 1.0 / std::sqrt(double(k) * (k + 1));
    for (int i = 0; i < k; ++i) d(i, i) = w;
    d(k, k) = -double(k) * w;
    out.push_back(d);
  }
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      CMat sym = CMat::Zero(n, n);
      sym(i, j) = s;
      sym(j, i) = s;
      out.push_back(sym);
      CMat asym = CMat::Zero(n, n);
      asym(i, j) = Cplx(0, s);
      asym(j, i) = Cplx(0, -s);
      out.push_back(asym);
    }
  return out;
}

}  // namespace opsys
