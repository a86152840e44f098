#pragma once

#include <Eigen/Dense>

namespace hfa::linalg {

/// Singular-value cutoff: max(rows, cols) * eps * largest singular value.
double rank_cutoff(Eigen::Index rows, Eigen::Index cols, double largest_singular_value);

/// Moore-Penrose quantities of a matrix A (m x p), from one thin SVD.
struct PseudoInverse {
  Eigen::MatrixXd pinv;            // A+, p x m
  Eigen::MatrixXd gram_pinv;       // (A'A)+, p x p
  Eigen::MatrixXd row_projector;   // A+ A, p x p
  Eigen::Index rank = 0;
  double cutoff = 0.0;
};

PseudoInverse pseudo_inverse(const Eigen::MatrixXd& a);

Eigen::Index numerical_rank(const Eigen::MatrixXd& a);

/// True when c' P == c' within `tol` (max norm), i.e. c' theta is estimable.
bool is_estimable(const Eigen::MatrixXd& row_projector, const Eigen::VectorXd& contrast,
                  double tol);

}  // namespace hfa::linalg
