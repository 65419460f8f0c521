#include "scoredec/linalg.hpp"

#include "scoredec/errors.hpp"

namespace scoredec {

std::vector<int> independent_columns(const Matrix& W, double rel_tol) {
    std::vector<int> kept;
    std::vector<Vector> basis;  // orthonormal
    for (int j = 0; j < W.cols(); ++j) {
        Vector v = W.col(j);
        const double norm0 = v.norm();
        if (!(norm0 > 0.0)) continue;
        // two passes of modified Gram-Schmidt keep the residual honest
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) v -= q.dot(v) * q;
        const double res = v.norm();
        if (res > rel_tol * norm0) {
            kept.push_back(j);
            basis.push_back(v / res);
        }
    }
    return kept;
}

Matrix select_columns(const Matrix& W, const std::vector<int>& cols) {
    Matrix out(W.rows(), static_cast<Eigen::Index>(cols.size()));
    for (size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Eigen::Index>(j)) = W.col(cols[j]);
    return out;
}

Matrix psd_sqrt(const Matrix& A) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrize(A));
    Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

Matrix symmetrize(const Matrix& A) { return 0.5 * (A + A.transpose()); }

Matrix make_design(const Vector& x, const Matrix& extra) {
    if (extra.cols() > 0 && extra.rows() != x.size())
        throw InputError("extra covariates must have one row per observation");
    Matrix W(x.size(), 2 + extra.cols());
    W.col(0).setOnes();
    W.col(1) = x;
    if (extra.cols() > 0) W.rightCols(extra.cols()) = extra;
    return W;
}

}  // namespace scoredec
