#pragma once

#include <vector>

#include <Eigen/Dense>

namespace ordcausal {

// Least-squares fit with rank filtering. Collinear columns are dropped in
// left-to-right order (the first of a dependent group is kept), so `coef`
// keeps the design's column indexing: dropped entries are zero, and vcov
// has zero rows/columns there.
struct OlsFit {
    Eigen::VectorXd coef;
    Eigen::MatrixXd vcov;  // sigma2 * (X'X)^-1 on retained columns, zero-padded
    double sigma2 = 0.0;
    int dof = 0;  // rows - retained columns
    double rss = 0.0;
    std::vector<int> dropped_columns;
    std::vector<int> retained_columns;
    Eigen::VectorXd residuals;
};

// Householder QR in natural column order; a column whose pivot falls below
// pivot_tol times the largest pivot seen so far is dropped and recorded.
// Throws RankDeficientDesign if a protected column is dropped,
// InsufficientRows if no residual degree of freedom remains.
OlsFit fit_ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& design,
               const std::vector<int>& protected_columns = {}, double pivot_tol = 1e-10);

}  // namespace ordcausal
