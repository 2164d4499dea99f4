#include "descentlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace descentlab::linalg {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kHermitianTol = 1e-10;

template <typename Scalar>
Scalar unit_phase(const Scalar& g) {
    return g / Scalar(std::abs(g));
}

// Replace the columns of u from `first` onward with an orthonormal completion
// of the span of columns [0, first). Classical Gram-Schmidt run twice.
template <typename Scalar>
void complete_orthonormal(Matrix<Scalar>& u, Eigen::Index first) {
    const Eigen::Index m = u.rows();
    for (Eigen::Index c = first; c < u.cols(); ++c) {
        Vector<Scalar> best;
        double best_norm = -1.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            Vector<Scalar> v = Vector<Scalar>::Unit(m, i);
            for (int pass = 0; pass < 2; ++pass)
                for (Eigen::Index k = 0; k < c; ++k) v -= u.col(k) * u.col(k).dot(v);
            const double nv = v.norm();
            if (nv > best_norm) {
                best_norm = nv;
                best = std::move(v);
            }
            if (best_norm > 0.5) break;
        }
        u.col(c) = best / best_norm;
    }
}

// (x_j, x_k) <- (c x_j - s phase x_k, s x_j + c phase x_k), in place.
template <typename Scalar>
void rotate_columns(Matrix<Scalar>& x, Eigen::Index j, Eigen::Index k, const Scalar& phase, double c, double s) {
    x.col(k) *= phase;
    x.applyOnTheRight(j, k, Eigen::JacobiRotation<Scalar>(Scalar(c), Scalar(s)));
}

// One-sided Jacobi on a square matrix. On return w holds X*V with mutually
// orthogonal columns and v is unitary. Squared column norms are carried
// through each sweep and refreshed at its start.
template <typename Scalar>
std::size_t jacobi_orthogonalize(Matrix<Scalar>& w, Matrix<Scalar>& v, std::size_t max_sweeps) {
    const Eigen::Index n = w.cols();
    const double tol = std::sqrt(static_cast<double>(std::max<Eigen::Index>(w.rows(), 1))) * kEps;
    RealVector sq(n);
    for (std::size_t sweep = 1; sweep <= max_sweeps; ++sweep) {
        for (Eigen::Index j = 0; j < n; ++j) sq(j) = w.col(j).squaredNorm();
        bool rotated = false;
        for (Eigen::Index j = 0; j + 1 < n; ++j) {
            for (Eigen::Index k = j + 1; k < n; ++k) {
                const double alpha = sq(j);
                const double beta = sq(k);
                const Scalar gamma = w.col(j).dot(w.col(k));
                const double g = std::abs(gamma);
                if (g == 0.0 || g <= tol * std::sqrt(alpha * beta)) continue;
                rotated = true;

                const Scalar phase = Eigen::numext::conj(unit_phase(gamma));
                const double zeta = (beta - alpha) / (2.0 * g);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;

                rotate_columns(w, j, k, phase, c, s);
                rotate_columns(v, j, k, phase, c, s);
                sq(j) = std::max(alpha - t * g, 0.0);
                sq(k) = beta + t * g;
            }
        }
        if (!rotated) return sweep;
    }
    throw SvdNotConverged(max_sweeps);
}

// SVD of a matrix with rows >= cols. B P = Q R by column-pivoted QR; Jacobi
// runs on X = R^H, so X V_x = U_x S gives R = V_x S U_x^H and
// B = (Q V_x) S (P U_x)^H.
template <typename Scalar>
SvdResult<Scalar> svd_tall(const Matrix<Scalar>& b, std::size_t max_sweeps) {
    const Eigen::Index m = b.rows();
    const Eigen::Index n = b.cols();

    Eigen::ColPivHouseholderQR<Matrix<Scalar>> qr(b);
    Matrix<Scalar> w = qr.matrixQR().topRows(n).template triangularView<Eigen::Upper>();
    w.adjointInPlace();
    const Matrix<Scalar> q = qr.householderQ() * Matrix<Scalar>::Identity(m, n);

    Matrix<Scalar> vx = Matrix<Scalar>::Identity(n, n);
    const std::size_t sweeps = jacobi_orthogonalize(w, vx, max_sweeps);

    RealVector norms(n);
    for (Eigen::Index j = 0; j < n; ++j) norms(j) = w.col(j).norm();

    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index x, Eigen::Index y) { return norms(x) > norms(y); });

    SvdResult<Scalar> out;
    out.sweeps = sweeps;
    out.singular_values.resize(n);
    Matrix<Scalar> left(n, n);
    Matrix<Scalar> right(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index src = order[static_cast<std::size_t>(j)];
        out.singular_values(j) = norms(src);
        left.col(j) = vx.col(src);
        right.col(j) = w.col(src);
    }

    const double cutoff = rank_threshold(m, n, n > 0 ? out.singular_values(0) : 0.0);
    Eigen::Index rank = 0;
    while (rank < n && out.singular_values(rank) > cutoff) ++rank;
    out.numerical_rank = rank;

    for (Eigen::Index j = 0; j < rank; ++j) right.col(j) /= out.singular_values(j);
    complete_orthonormal(right, rank);

    out.U = q * left;
    out.V = qr.colsPermutation() * right;
    return out;
}

}  // namespace

double rank_threshold(Eigen::Index rows, Eigen::Index cols, double s_max) {
    return static_cast<double>(std::max(rows, cols)) * kEps * s_max;
}

template <typename Scalar>
SvdResult<Scalar> svd(const Matrix<Scalar>& a) {
    if (a.rows() == 0 || a.cols() == 0) throw std::invalid_argument("svd: empty matrix");
    require_finite(a, "svd");
    const auto max_sweeps = static_cast<std::size_t>(100 * std::max(a.rows(), a.cols()));
    if (a.rows() >= a.cols()) return svd_tall<Scalar>(a, max_sweeps);

    SvdResult<Scalar> t = svd_tall<Scalar>(a.adjoint(), max_sweeps);
    std::swap(t.U, t.V);
    return t;
}

template <typename Scalar>
Matrix<Scalar> pseudo_inverse(const SvdResult<Scalar>& f) {
    const Eigen::Index r = f.numerical_rank;
    const RealVector inv = f.singular_values.head(r).cwiseInverse();
    return f.V.leftCols(r) * inv.template cast<Scalar>().asDiagonal() * f.U.leftCols(r).adjoint();
}

template <typename Scalar>
Matrix<Scalar> pseudo_inverse(const Matrix<Scalar>& a) {
    if (a.rows() == 0 || a.cols() == 0) return Matrix<Scalar>::Zero(a.cols(), a.rows());
    return pseudo_inverse(svd(a));
}

template <typename Scalar>
Vector<Scalar> min_norm_solve(const Matrix<Scalar>& a, const Vector<Scalar>& y) {
    if (a.rows() != y.size())
        throw std::invalid_argument("min_norm_solve: A has " + std::to_string(a.rows()) +
                                    " rows but y has " + std::to_string(y.size()) + " entries");
    require_finite(y, "min_norm_solve");
    if (a.rows() == 0 || a.cols() == 0) return Vector<Scalar>::Zero(a.cols());

    const SvdResult<Scalar> f = svd(a);
    const Eigen::Index r = f.numerical_rank;
    Vector<Scalar> coeffs = f.U.leftCols(r).adjoint() * y;
    for (Eigen::Index i = 0; i < r; ++i) coeffs(i) /= f.singular_values(i);
    return f.V.leftCols(r) * coeffs;
}

template <typename Scalar>
Matrix<Scalar> projection_onto_rowspace(const Matrix<Scalar>& a) {
    const SvdResult<Scalar> f = svd(a);
    const auto vr = f.V.leftCols(f.numerical_rank);
    return vr * vr.adjoint();
}

template <typename Scalar>
RealVector hermitian_eigenvalues(const Matrix<Scalar>& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("hermitian_eigenvalues: matrix is not square");
    require_finite(a, "hermitian_eigenvalues");
    if (a.rows() == 0) return RealVector();
    const double scale = a.norm();
    const double skew = (a - a.adjoint()).norm();
    if (skew > kHermitianTol * scale)
        throw std::invalid_argument("hermitian_eigenvalues: matrix is not Hermitian");

    const Matrix<Scalar> sym = (a + a.adjoint()) / 2.0;
    Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> es(sym, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw std::runtime_error("hermitian_eigenvalues: solver failed");
    return es.eigenvalues();
}

#define DESCENTLAB_INSTANTIATE(S)                                                 \
    template SvdResult<S> svd<S>(const Matrix<S>&);                               \
    template Vector<S> min_norm_solve<S>(const Matrix<S>&, const Vector<S>&);     \
    template Matrix<S> pseudo_inverse<S>(const Matrix<S>&);                       \
    template Matrix<S> pseudo_inverse<S>(const SvdResult<S>&);                    \
    template Matrix<S> projection_onto_rowspace<S>(const Matrix<S>&);             \
    template RealVector hermitian_eigenvalues<S>(const Matrix<S>&);

DESCENTLAB_INSTANTIATE(double)
DESCENTLAB_INSTANTIATE(Complex)

#undef DESCENTLAB_INSTANTIATE

}  // namespace descentlab::linalg
