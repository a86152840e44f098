#include "hfa/linalg.hpp"

#include <algorithm>
#include <limits>

namespace hfa::linalg {

double rank_cutoff(Eigen::Index rows, Eigen::Index cols, double largest_singular_value) {
  return static_cast<double>(std::max(rows, cols)) * std::numeric_limits<double>::epsilon() *
         largest_singular_value;
}

PseudoInverse pseudo_inverse(const Eigen::MatrixXd& a) {
  PseudoInverse out;
  const Eigen::Index p = a.cols();
  if (a.size() == 0) {
    out.pinv = Eigen::MatrixXd::Zero(p, a.rows());
    out.gram_pinv = Eigen::MatrixXd::Zero(p, p);
    out.row_projector = Eigen::MatrixXd::Zero(p, p);
    return out;
  }

  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  out.cutoff = rank_cutoff(a.rows(), a.cols(), sv.size() > 0 ? sv(0) : 0.0);

  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > out.cutoff) ++r;
  out.rank = r;

  const auto u = svd.matrixU().leftCols(r);
  const auto v = svd.matrixV().leftCols(r);
  const Eigen::VectorXd inv = sv.head(r).cwiseInverse();

  out.pinv = v * inv.asDiagonal() * u.transpose();
  out.gram_pinv = v * inv.cwiseAbs2().asDiagonal() * v.transpose();
  out.row_projector = v * v.transpose();
  return out;
}

Eigen::Index numerical_rank(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double cutoff = rank_cutoff(a.rows(), a.cols(), sv(0));
  return (sv.array() > cutoff).count();
}

bool is_estimable(const Eigen::MatrixXd& row_projector, const Eigen::VectorXd& contrast,
                  double tol) {
  const Eigen::VectorXd projected = row_projector.transpose() * contrast;
  return (projected - contrast).lpNorm<Eigen::Infinity>() < tol;
}

}  // namespace hfa::linalg
