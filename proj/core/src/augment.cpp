#include "sduo/augment.hpp"

#include <cmath>
#include <stdexcept>

namespace sduo {

ClassStats class_stats(const Eigen::MatrixXd& class_rows) {
    if (class_rows.rows() == 0)
        throw std::invalid_argument("class_stats on empty class");
    ClassStats s;
    s.mean = class_rows.colwise().mean().transpose();
    Eigen::ArrayXXd centered =
        class_rows.array().rowwise() - s.mean.transpose().array();
    s.stddev = (centered.square().colwise().sum() /
                static_cast<double>(class_rows.rows()))
                   .sqrt()
                   .transpose()
                   .matrix();
    return s;
}

double vector_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                       DistanceKind kind) {
    switch (kind) {
    case DistanceKind::euclidean:
        return (a - b).norm();
    case DistanceKind::cosine: {
        const double na = a.norm(), nb = b.norm();
        if (na == 0.0 && nb == 0.0)
            return 0.0;
        if (na == 0.0 || nb == 0.0)
            return 1.0;
        return 1.0 - a.dot(b) / (na * nb);
    }
    }
    throw std::logic_error("unknown distance kind");
}

int nearest_row(const Eigen::MatrixXd& class_rows, const Eigen::VectorXd& z,
                int exclude_row, DistanceKind kind) {
    int best = -1;
    double best_d = 0.0;
    for (int r = 0; r < class_rows.rows(); ++r) {
        if (r == exclude_row)
            continue;
        const double d =
            vector_distance(class_rows.row(r).transpose(), z, kind);
        if (best < 0 || d < best_d) {
            best = r;
            best_d = d;
        }
    }
    return best;
}

Eigen::VectorXd interpolate(const Eigen::VectorXd& z,
                            const Eigen::MatrixXd& class_rows, int self_row,
                            double beta1, DistanceKind kind) {
    const int nn = nearest_row(class_rows, z, self_row, kind);
    if (nn < 0)
        return z;
    Eigen::VectorXd eps = class_rows.row(nn).transpose();
    return z + beta1 * (eps - z);
}

Eigen::VectorXd extrapolate(const Eigen::VectorXd& z, const ClassStats& stats,
                            double beta2) {
    return z + beta2 * (z - stats.mean);
}

Eigen::VectorXd gauss_noise(const Eigen::VectorXd& z, const ClassStats& stats,
                            double beta3, std::mt19937_64& rng) {
    std::normal_distribution<double> unit(0.0, 1.0);
    Eigen::VectorXd out = z;
    for (int e = 0; e < z.size(); ++e) {
        const double u = unit(rng);
        out(e) += beta3 * stats.stddev(e) * u;
    }
    return out;
}

std::vector<Eigen::MatrixXd>
build_generated(const std::vector<Eigen::MatrixXd>& enc_memory,
                const AugmentConfig& cfg, std::mt19937_64& rng) {
    std::vector<Eigen::MatrixXd> gen;
    gen.reserve(enc_memory.size());
    const int per_source = cfg.counts[0] + cfg.counts[1] + cfg.counts[2];
    for (const auto& rows : enc_memory) {
        const int n = static_cast<int>(rows.rows());
        Eigen::MatrixXd G(n * per_source, rows.cols());
        if (n == 0 || per_source == 0) {
            G.resize(0, rows.cols());
            gen.push_back(std::move(G));
            continue;
        }
        const ClassStats stats = class_stats(rows);
        int out_row = 0;
        for (int i = 0; i < n; ++i) {
            const Eigen::VectorXd z = rows.row(i).transpose();
            for (int k = 0; k < cfg.counts[0]; ++k)
                G.row(out_row++) =
                    interpolate(z, rows, i, cfg.beta1, cfg.distance).transpose();
            for (int k = 0; k < cfg.counts[1]; ++k)
                G.row(out_row++) = extrapolate(z, stats, cfg.beta2).transpose();
            for (int k = 0; k < cfg.counts[2]; ++k)
                G.row(out_row++) =
                    gauss_noise(z, stats, cfg.beta3, rng).transpose();
        }
        gen.push_back(std::move(G));
    }
    return gen;
}

std::vector<Eigen::MatrixXd>
build_augmented(const std::vector<Eigen::MatrixXd>& enc_memory,
                const std::vector<Eigen::MatrixXd>& generated) {
    if (enc_memory.size() != generated.size())
        throw std::invalid_argument("augmented: class count mismatch");
    std::vector<Eigen::MatrixXd> aug;
    aug.reserve(enc_memory.size());
    for (std::size_t c = 0; c < enc_memory.size(); ++c) {
        const auto& E = enc_memory[c];
        const auto& G = generated[c];
        Eigen::MatrixXd M(E.rows() + G.rows(),
                          std::max(E.cols(), G.cols()));
        if (E.rows() > 0)
            M.topRows(E.rows()) = E;
        if (G.rows() > 0)
            M.bottomRows(G.rows()) = G;
        aug.push_back(std::move(M));
    }
    return aug;
}

} // namespace sduo
