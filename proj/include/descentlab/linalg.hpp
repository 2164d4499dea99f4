#pragma once

// Dense linear algebra over real and complex doubles: thin SVD, min-norm
// solves, pseudoinverse, row-space projection and Hermitian eigenvalues.
// Storage is Eigen; the SVD is a QR-preconditioned one-sided Jacobi.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace descentlab::linalg {

using Complex = std::complex<double>;

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Raised when the Jacobi sweeps hit the iteration cap.
class SvdNotConverged : public std::runtime_error {
public:
    explicit SvdNotConverged(std::size_t sweeps)
        : std::runtime_error("svd: no convergence after " + std::to_string(sweeps) + " sweeps"),
          sweeps_(sweeps) {}

    std::size_t sweeps() const noexcept { return sweeps_; }

private:
    std::size_t sweeps_;
};

/// Thin SVD, A = U * diag(s) * V^H with k = min(rows, cols) columns in U and V.
template <typename Scalar>
struct SvdResult {
    RealVector singular_values;  // nonincreasing, >= 0
    Matrix<Scalar> U;            // rows x k, orthonormal columns
    Matrix<Scalar> V;            // cols x k, orthonormal columns
    Eigen::Index numerical_rank = 0;
    std::size_t sweeps = 0;
};

/// Cutoff used for numerical_rank: max(rows, cols) * eps * s_max.
double rank_threshold(Eigen::Index rows, Eigen::Index cols, double s_max);

/// Throws std::invalid_argument when any entry is NaN or infinite.
template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& a, const char* what) {
    if (!a.allFinite())
        throw std::invalid_argument(std::string(what) + ": non-finite entry");
}

template <typename Scalar>
SvdResult<Scalar> svd(const Matrix<Scalar>& a);

/// A^+ y: the least-squares minimizer of smallest Euclidean norm.
template <typename Scalar>
Vector<Scalar> min_norm_solve(const Matrix<Scalar>& a, const Vector<Scalar>& y);

/// Moore-Penrose pseudoinverse from the thin SVD, truncated at numerical rank.
template <typename Scalar>
Matrix<Scalar> pseudo_inverse(const Matrix<Scalar>& a);
template <typename Scalar>
Matrix<Scalar> pseudo_inverse(const SvdResult<Scalar>& f);

/// Orthogonal projector A^+ A onto the row space of A (cols x cols).
template <typename Scalar>
Matrix<Scalar> projection_onto_rowspace(const Matrix<Scalar>& a);

/// Eigenvalues of a Hermitian matrix in nondecreasing order. The input must
/// satisfy ||A - A^H||_F <= 1e-10 ||A||_F.
template <typename Scalar>
RealVector hermitian_eigenvalues(const Matrix<Scalar>& a);

}  // namespace descentlab::linalg
