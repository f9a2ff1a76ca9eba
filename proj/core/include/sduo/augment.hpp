#pragma once

#include <Eigen/Dense>
#include <array>
#include <random>
#include <vector>

namespace sduo {

enum class DistanceKind { cosine, euclidean };

struct AugmentConfig {
    double beta1 = 0.1; // interpolation step toward nearest same-class vector
    double beta2 = 0.1; // extrapolation step away from the class mean
    double beta3 = 0.1; // scale of class-shaped Gaussian noise
    std::array<int, 3> counts{3, 3, 3}; // per transform, per original
    DistanceKind distance = DistanceKind::cosine;

    bool enabled() const { return counts[0] + counts[1] + counts[2] > 0; }
};

struct ClassStats {
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev; // population standard deviation per element
};

// Throws on an empty class (callers skip those).
ClassStats class_stats(const Eigen::MatrixXd& class_rows);

double vector_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       DistanceKind kind);

// Row of class_rows nearest to z, excluding exclude_row (pass -1 to keep
// all); ties resolve to the lowest row index; -1 when no candidate exists.
int nearest_row(const Eigen::MatrixXd& class_rows, const Eigen::VectorXd& z,
                int exclude_row, DistanceKind kind);

// a = z + beta1 * (eps - z), eps the nearest same-class vector; returns z
// unchanged when the class holds no other vector.
Eigen::VectorXd interpolate(const Eigen::VectorXd& z,
                            const Eigen::MatrixXd& class_rows, int self_row,
                            double beta1, DistanceKind kind);

// a = z + beta2 * (z - mean_c)
Eigen::VectorXd extrapolate(const Eigen::VectorXd& z, const ClassStats& stats,
                            double beta2);

// a = z + beta3 * eta, eta ~ N(0, diag(stddev^2)); exactly one standard
// normal draw per element so the rng advances deterministically even where
// stddev is zero.
Eigen::VectorXd gauss_noise(const Eigen::VectorXd& z, const ClassStats& stats,
                            double beta3, std::mt19937_64& rng);

// For every stored vector of every class: counts[0] interpolations,
// counts[1] extrapolations, counts[2] noised copies, appended under the
// source class in that order.
std::vector<Eigen::MatrixXd>
build_generated(const std::vector<Eigen::MatrixXd>& enc_memory,
                const AugmentConfig& cfg, std::mt19937_64& rng);

// Per-class concatenation, originals first and in their stored order.
std::vector<Eigen::MatrixXd>
build_augmented(const std::vector<Eigen::MatrixXd>& enc_memory,
                const std::vector<Eigen::MatrixXd>& generated);

} // namespace sduo
