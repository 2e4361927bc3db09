#include "opsysindex/choi.hpp"

namespace opsys {

void MatrixMap::validate() const {
  if (in_dim <= 0 || out_dim <= 0) throw std::invalid_argument("MatrixMap: bad dimensions");
  if (choi.rows() != Eigen::Index(in_dim) * out_dim ||
      choi.cols() != Eigen::Index(in_dim) * out_dim)
    throw std::invalid_argument("MatrixMap: Choi dimension mismatch");
}

MatrixMap map_from_action(int in_dim, int out_dim,
                          const std::function<CMat(int, int)>& image_of_unit) {
  MatrixMap phi;
  phi.in_dim = in_dim;
  phi.out_dim = out_dim;
  phi.choi = CMat::Zero(Eigen::Index(in_dim) * out_dim, Eigen::Index(in_dim) * out_dim);
  for (int i = 0; i < in_dim; ++i)
    for (int j = 0; j < in_dim; ++j) {
      CMat img = image_of_unit(i, j);
      if (img.rows() != out_dim || img.cols() != out_dim)
        throw std::invalid_argument("map_from_action: image dimension mismatch");
      phi.choi.block(Eigen::Index(i) * out_dim, Eigen::Index(j) * out_dim, out_dim, out_dim) =
          img;
    }
  return phi;
}

MatrixMap map_from_function(int in_dim, int out_dim,
                            const std::function<CMat(const CMat&)>& fn) {
  return map_from_action(in_dim, out_dim, [&](int i, int j) {
    return fn(matrix_unit(in_dim, i, j));
  });
}

CMat apply_map(const MatrixMap& phi, const CMat& x) {
  phi.validate();
  if (x.rows() != phi.in_dim || x.cols() != phi.in_dim)
    throw std::invalid_argument("apply_map: input dimension mismatch");
  const int n = phi.in_dim, m = phi.out_dim;
  CMat out = CMat::Zero(m, m);
  // (tr (x) id)((X^T (x) I) C): Phi(X) = sum_ij X_ij C_block(i,j).
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Cplx w = x(i, j);
      if (w == Cplx(0, 0)) continue;
      out += w * phi.choi.block(Eigen::Index(i) * m, Eigen::Index(j) * m, m, m);
    }
  return out;
}

bool is_cp(const MatrixMap& phi, double tol) {
  phi.validate();
  require_hermitian(phi.choi, "is_cp", 1e-9);
  EigResult es = eig_hermitian(phi.choi);
  double lmin = es.values(0);
  double scale = std::max(std::abs(es.values(0)), std::abs(es.values(es.values.size() - 1)));
  return lmin >= -tol * (1.0 + scale);
}

MatrixMap schur_multiplier(const CMat& a) {
  const int n = int(a.rows());
  if (a.cols() != n) throw std::invalid_argument("schur_multiplier: matrix not square");
  return map_from_action(n, n, [&](int i, int j) {
    CMat img = CMat::Zero(n, n);
    img(i, j) = a(i, j);
    return img;
  });
}

MatrixMap dual_map(const MatrixMap& phi) {
  phi.validate();
  const int n = phi.in_dim, m = phi.out_dim;
  MatrixMap out;
  out.in_dim = m;
  out.out_dim = n;
  out.choi = CMat::Zero(Eigen::Index(m) * n, Eigen::Index(m) * n);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < m; ++c)
        for (int d = 0; d < n; ++d)
          out.choi(Eigen::Index(a) * n + b, Eigen::Index(c) * n + d) =
              phi.choi(Eigen::Index(d) * m + c, Eigen::Index(b) * m + a);
  return out;
}

CMat choi_expectation(const MatrixMap& phi, double cp_tol) {
  phi.validate();
  if (phi.in_dim != phi.out_dim)
    throw std::invalid_argument("choi_expectation: map must be square");
  if (!is_cp(phi, cp_tol))
    throw std::invalid_argument("choi_expectation: map is not completely positive");
  const int n = phi.in_dim;
  CMat a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      a(i, j) = phi.choi(Eigen::Index(i) * n + i, Eigen::Index(j) * n + j);
  return a;
}

MatrixMap identity_map(int n) {
  MatrixMap phi;
  phi.in_dim = phi.out_dim = n;
  phi.choi = choi_of_identity(n);
  return phi;
}

MatrixMap transpose_map(int n) {
  return map_from_action(n, n, [&](int i, int j) { return matrix_unit(n, j, i); });
}

}  // namespace opsys
