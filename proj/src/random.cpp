#include "descentlab/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace descentlab {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t v : path) h = splitmix64(h ^ splitmix64(v + 0x632BE59BD9B4E019ULL));
    return h;
}

Eigen::VectorXd standard_normal_vector(Eigen::Index size, Rng& rng) {
    std::normal_distribution<double> nd;
    Eigen::VectorXd v(size);
    for (Eigen::Index i = 0; i < size; ++i) v(i) = nd(rng);
    return v;
}

Eigen::MatrixXd standard_normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    std::normal_distribution<double> nd;
    Eigen::MatrixXd m(rows, cols);
    // Row by row, so row i is the i-th observation regardless of storage order.
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = nd(rng);
    return m;
}

Eigen::VectorXd unit_sphere(Eigen::Index dim, Rng& rng) {
    if (dim < 1) throw std::invalid_argument("unit_sphere: dimension must be positive");
    Eigen::VectorXd v;
    double norm = 0.0;
    do {
        v = standard_normal_vector(dim, rng);
        norm = v.norm();
    } while (norm == 0.0);
    return v / norm;
}

Eigen::VectorXcd isotropic_complex(Eigen::Index dim, Rng& rng) {
    std::normal_distribution<double> nd(0.0, std::sqrt(0.5 / static_cast<double>(dim)));
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double re = nd(rng);
        const double im = nd(rng);
        v(i) = {re, im};
    }
    return v;
}

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    // Explicit Fisher-Yates so the sequence is fixed by the engine alone.
    for (std::size_t i = n; i > 1; --i) {
        std::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(perm[i - 1], perm[pick(rng)]);
    }
    return perm;
}

std::vector<std::size_t> random_subset(std::size_t n, std::size_t k, Rng& rng) {
    if (k > n) throw std::invalid_argument("random_subset: k exceeds n");
    std::vector<std::size_t> perm = random_permutation(n, rng);
    perm.resize(k);
    std::sort(perm.begin(), perm.end());
    return perm;
}

}  // namespace descentlab
