#pragma once

// Seeded random streams. Every Monte Carlo unit of work (a trial, a repeat)
// owns a stream derived from the master seed and its index path, so results
// do not depend on scheduling.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace descentlab {

using Rng = std::mt19937_64;

/// Default master seed for reproducible runs ("DESCENT" in ASCII).
inline constexpr std::uint64_t kDefaultSeed = 0x44455343454E54ULL;

/// Mixes the master seed with an index path into a stream seed.
std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path);

inline Rng make_stream(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(master, path));
}

Eigen::VectorXd standard_normal_vector(Eigen::Index size, Rng& rng);
Eigen::MatrixXd standard_normal_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);

/// Uniform draw from the unit sphere in R^dim.
Eigen::VectorXd unit_sphere(Eigen::Index dim, Rng& rng);

/// Complex vector with iid CN(0, 1/dim) entries, so E[b b^H] = I/dim.
Eigen::VectorXcd isotropic_complex(Eigen::Index dim, Rng& rng);

/// Uniform random permutation of {0, ..., n-1}.
std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

/// Uniform k-subset of {0, ..., n-1}, sorted ascending.
std::vector<std::size_t> random_subset(std::size_t n, std::size_t k, Rng& rng);

}  // namespace descentlab
