#include "ordcausal/ols.hpp"

#include <algorithm>
#include <cmath>

#include "ordcausal/dataset.hpp"

namespace ordcausal {

OlsFit fit_ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& design,
               const std::vector<int>& protected_columns, double pivot_tol) {
    const int m = static_cast<int>(design.rows());
    const int p = static_cast<int>(design.cols());
    if (y.size() != m) throw InvalidArgument("fit_ols: y length does not match design rows");
    if (m < 1 || p < 1) throw InvalidArgument("fit_ols: empty design");

    Eigen::MatrixXd a = design;
    Eigen::VectorXd qty = y;

    OlsFit fit;
    fit.retained_columns.reserve(p);
    double max_pivot = 0.0;
    int r = 0;  // rank so far = next pivot row

    for (int j = 0; j < p; ++j) {
        const int tail = m - r;
        if (tail <= 0) {
            fit.dropped_columns.push_back(j);
            continue;
        }
        const double pivot = a.col(j).tail(tail).norm();
        if (pivot <= pivot_tol * std::max(max_pivot, pivot)) {
            fit.dropped_columns.push_back(j);
            continue;
        }
        // Householder reflection zeroing a(r+1..m-1, j)
        Eigen::VectorXd v = a.col(j).tail(tail);
        double alpha = -std::copysign(pivot, v[0]);
        v[0] -= alpha;
        const double vnorm2 = v.squaredNorm();
        if (vnorm2 > 0.0) {
            for (int k = j + 1; k < p; ++k) {
                const double z = v.dot(a.col(k).tail(tail)) * 2.0 / vnorm2;
                a.col(k).tail(tail) -= z * v;
            }
            const double zy = v.dot(qty.tail(tail)) * 2.0 / vnorm2;
            qty.tail(tail) -= zy * v;
        }
        a.col(j).tail(tail).setZero();
        a(r, j) = alpha;
        max_pivot = std::max(max_pivot, std::abs(alpha));
        fit.retained_columns.push_back(j);
        ++r;
    }

    for (int c : protected_columns) {
        if (std::find(fit.dropped_columns.begin(), fit.dropped_columns.end(), c) !=
            fit.dropped_columns.end())
            throw RankDeficientDesign("required design column " + std::to_string(c) +
                                      " dropped as collinear");
    }
    fit.dof = m - r;
    if (fit.dof < 1) throw InsufficientRows("fit_ols: need rows > retained columns");

    // R is upper triangular in rows 0..r-1 of the retained columns.
    Eigen::MatrixXd rmat(r, r);
    for (int k = 0; k < r; ++k) rmat.col(k) = a.col(fit.retained_columns[k]).head(r);

    Eigen::VectorXd coef_r = rmat.triangularView<Eigen::Upper>().solve(qty.head(r));
    fit.rss = qty.tail(m - r).squaredNorm();
    fit.sigma2 = fit.rss / fit.dof;

    Eigen::MatrixXd rinv =
        rmat.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(r, r));
    Eigen::MatrixXd vcov_r = fit.sigma2 * (rinv * rinv.transpose());

    fit.coef = Eigen::VectorXd::Zero(p);
    fit.vcov = Eigen::MatrixXd::Zero(p, p);
    for (int k = 0; k < r; ++k) {
        fit.coef[fit.retained_columns[k]] = coef_r[k];
        for (int l = 0; l < r; ++l)
            fit.vcov(fit.retained_columns[k], fit.retained_columns[l]) = vcov_r(k, l);
    }
    fit.residuals = y - design * fit.coef;
    return fit;
}

}  // namespace ordcausal
