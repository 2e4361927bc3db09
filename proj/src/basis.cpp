#include "opsysindex/basis.hpp"

#include <cmath>

namespace opsys {

RVec hvec(const CMat& a) {
  const int n = int(a.rows());
  RVec v(n * n);
  int p = 0;
  for (int i = 0; i < n; ++i) v(p++) = a(i, i).real();
  const double s = std::sqrt(2.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) v(p++) = s * a(i, j).real();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) v(p++) = s * a(i, j).imag();
  return v;
}

CMat unhvec(const RVec& v, int n) {
  CMat a = CMat::Zero(n, n);
  int p = 0;
  for (int i = 0; i < n; ++i) a(i, i) = v(p++);
  const double s = 1.0 / std::sqrt(2.0);
  std::vector<std::pair<int, int>> ut;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) ut.emplace_back(i, j);
  for (auto [i, j] : ut) {
    a(i, j) += s * v(p);
    a(j, i) += s * v(p);
    ++p;
  }
  for (auto [i, j] : ut) {
    a(i, j) += Cplx(0, s) * v(p);
    a(j, i) += Cplx(0, -s) * v(p);
    ++p;
  }
  return a;
}

void HermitianBasis::validate(double gram_tol) const {
  for (const auto& e : elements) {
    if (e.rows() != ambient_dim || e.cols() != ambient_dim)
      throw std::invalid_argument("HermitianBasis: element dimension mismatch");
    require_hermitian(e, "HermitianBasis", 1e-10);
  }
  const int d = dim();
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) {
      double g = hs_inner(elements[i], elements[j]);
      double want = (i == j) ? 1.0 : 0.0;
      if (std::abs(g - want) > gram_tol)
        throw std::invalid_argument("HermitianBasis: Gram matrix deviates from identity");
    }
}

HermitianBasis orthonormalize(int ambient_dim, const std::vector<CMat>& spanning,
                              double drop_tol) {
  if (spanning.empty()) throw std::invalid_argument("orthonormalize: empty spanning set");
  const int n = ambient_dim;
  const int N = n * n;
  RMat cols(N, int(spanning.size()));
  for (size_t k = 0; k < spanning.size(); ++k) {
    const CMat& a = spanning[k];
    if (a.rows() != n || a.cols() != n)
      throw std::invalid_argument("orthonormalize: element dimension mismatch");
    require_hermitian(a, "orthonormalize", 1e-10);
    cols.col(int(k)) = hvec(hermitize(a));
  }
  Eigen::ColPivHouseholderQR<RMat> qr(cols);
  qr.setThreshold(drop_tol);
  const int r = int(qr.rank());
  if (r == 0) throw std::invalid_argument("orthonormalize: spanning set is numerically zero");
  RMat q = qr.householderQ() * RMat::Identity(N, r);
  HermitianBasis out;
  out.ambient_dim = n;
  out.elements.reserve(r);
  for (int k = 0; k < r; ++k) out.elements.push_back(unhvec(q.col(k), n));
  return out;
}

CMat project(const HermitianBasis& basis, const CMat& x) {
  CMat out = CMat::Zero(basis.ambient_dim, basis.ambient_dim);
  for (const auto& e : basis.elements) out += hs_inner(e, x) * e;
  return out;
}

bool contains(const HermitianBasis& basis, const CMat& x, double tol) {
  if (x.rows() != basis.ambient_dim || x.cols() != basis.ambient_dim) return false;
  return (x - project(basis, x)).norm() <= tol * (1.0 + x.norm());
}

HermitianBasis complement(const HermitianBasis& basis) {
  const int n = basis.ambient_dim;
  const int N = n * n;
  const int d = basis.dim();
  if (d >= N) {
    HermitianBasis empty;
    empty.ambient_dim = n;
    return empty;
  }
  if (d == 0) throw std::invalid_argument("complement: empty basis");
  RMat cols(N, d);
  for (int k = 0; k < d; ++k) cols.col(k) = hvec(basis.elements[k]);
  Eigen::ColPivHouseholderQR<RMat> qr(cols);
  qr.setThreshold(1e-10);
  const int r = int(qr.rank());
  RMat qfull = qr.householderQ() * RMat::Identity(N, N);
  HermitianBasis out;
  out.ambient_dim = n;
  out.elements.reserve(N - r);
  for (int k = r; k < N; ++k) out.elements.push_back(unhvec(qfull.col(k), n));
  return out;
}

RMat span_projector(const HermitianBasis& basis) {
  const int n = basis.ambient_dim;
  const int N = n * n;
  RMat p = RMat::Zero(N, N);
  for (const auto& e : basis.elements) {
    RVec v = hvec(e);
    p += v * v.transpose();
  }
  return p;
}

}  // namespace opsys
