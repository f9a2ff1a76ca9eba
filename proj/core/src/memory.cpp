#include "sduo/memory.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sduo {

MultiMemory::MultiMemory(int num_classes, int capacity,
                         const std::vector<LabelledExample>& seed_data)
    : capacity_(capacity) {
    if (num_classes < 2)
        throw std::invalid_argument("MultiMemory needs at least 2 classes");
    if (capacity < 1)
        throw std::invalid_argument("MultiMemory capacity must be >= 1");
    queues_.resize(static_cast<std::size_t>(num_classes));
    for (const auto& ex : seed_data)
        append(ex);
}

void MultiMemory::check_label(int label) const {
    if (label < 1 || label > num_classes())
        throw std::invalid_argument("label " + std::to_string(label) +
                                    " outside {1.." +
                                    std::to_string(num_classes()) + "}");
}

void MultiMemory::append(const LabelledExample& ex) {
    check_label(ex.label);
    if (!ex.x.allFinite())
        throw std::invalid_argument("non-finite features appended to memory");
    if (dim_ < 0)
        dim_ = static_cast<int>(ex.x.size());
    else if (ex.x.size() != dim_)
        throw std::invalid_argument("feature width mismatch in memory");
    auto& q = queues_[static_cast<std::size_t>(ex.label - 1)];
    if (static_cast<int>(q.size()) == capacity_)
        q.pop_front();
    q.push_back(ex);
}

const std::deque<LabelledExample>& MultiMemory::queue(int label) const {
    check_label(label);
    return queues_[static_cast<std::size_t>(label - 1)];
}

int MultiMemory::total_size() const {
    int n = 0;
    for (const auto& q : queues_)
        n += static_cast<int>(q.size());
    return n;
}

Eigen::MatrixXd MultiMemory::class_matrix(int label) const {
    const auto& q = queue(label);
    if (q.empty())
        return Eigen::MatrixXd(0, std::max(dim_, 0));
    Eigen::MatrixXd M(static_cast<int>(q.size()), q.front().x.size());
    for (std::size_t i = 0; i < q.size(); ++i)
        M.row(static_cast<int>(i)) = q[i].x.transpose();
    return M;
}

std::vector<LabelledExample> MultiMemory::all() const {
    std::vector<LabelledExample> out;
    out.reserve(static_cast<std::size_t>(total_size()));
    for (const auto& q : queues_)
        out.insert(out.end(), q.begin(), q.end());
    return out;
}

std::vector<Eigen::MatrixXd> class_matrices(const MultiMemory& mem) {
    std::vector<Eigen::MatrixXd> rows;
    rows.reserve(static_cast<std::size_t>(mem.num_classes()));
    for (int c = 1; c <= mem.num_classes(); ++c)
        rows.push_back(mem.class_matrix(c));
    return rows;
}

PairSet build_pairs_from_classes(const std::vector<Eigen::MatrixXd>& class_rows,
                                 std::mt19937_64& rng) {
    PairSet out;
    const int K = static_cast<int>(class_rows.size());

    std::vector<int> offset(static_cast<std::size_t>(K), 0);
    int total = 0, width = 0, populated = 0;
    for (int c = 0; c < K; ++c) {
        offset[static_cast<std::size_t>(c)] = total;
        const int n = static_cast<int>(class_rows[static_cast<std::size_t>(c)].rows());
        total += n;
        if (n > 0) {
            ++populated;
            width = static_cast<int>(class_rows[static_cast<std::size_t>(c)].cols());
        }
    }

    std::vector<std::pair<int, int>> positives;
    for (int c = 0; c < K; ++c) {
        const int n = static_cast<int>(class_rows[static_cast<std::size_t>(c)].rows());
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                positives.emplace_back(offset[static_cast<std::size_t>(c)] + i,
                                       offset[static_cast<std::size_t>(c)] + j);
    }
    if (positives.empty() || populated < 2)
        return out;

    std::vector<std::pair<int, int>> candidates;
    for (int c = 0; c < K; ++c)
        for (int cc = c + 1; cc < K; ++cc) {
            const int nc = static_cast<int>(class_rows[static_cast<std::size_t>(c)].rows());
            const int ncc = static_cast<int>(class_rows[static_cast<std::size_t>(cc)].rows());
            for (int i = 0; i < nc; ++i)
                for (int j = 0; j < ncc; ++j)
                    candidates.emplace_back(offset[static_cast<std::size_t>(c)] + i,
                                            offset[static_cast<std::size_t>(cc)] + j);
        }

    std::vector<std::pair<int, int>> negatives;
    if (candidates.size() >= positives.size()) {
        std::sample(candidates.begin(), candidates.end(),
                    std::back_inserter(negatives), positives.size(), rng);
    } else {
        // warm-up corner case: fewer cross-class pairs than positives
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        negatives.reserve(positives.size());
        while (negatives.size() < positives.size())
            negatives.push_back(candidates[pick(rng)]);
    }

    out.pool.resize(total, width);
    out.pool_class.resize(static_cast<std::size_t>(total));
    for (int c = 0; c < K; ++c) {
        const auto& M = class_rows[static_cast<std::size_t>(c)];
        for (int i = 0; i < M.rows(); ++i) {
            out.pool.row(offset[static_cast<std::size_t>(c)] + i) = M.row(i);
            out.pool_class[static_cast<std::size_t>(
                offset[static_cast<std::size_t>(c)] + i)] = c + 1;
        }
    }

    const std::size_t n_pairs = positives.size() + negatives.size();
    std::vector<std::size_t> order(n_pairs);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);

    out.a.resize(n_pairs);
    out.b.resize(n_pairs);
    out.target.resize(static_cast<int>(n_pairs));
    for (std::size_t k = 0; k < n_pairs; ++k) {
        const std::size_t src = order[k];
        const bool positive = src < positives.size();
        const auto& pr = positive ? positives[src]
                                  : negatives[src - positives.size()];
        out.a[k] = pr.first;
        out.b[k] = pr.second;
        out.target(static_cast<int>(k)) = positive ? 1.0 : 0.0;
    }
    return out;
}

PairSet build_pairs(const MultiMemory& mem, std::mt19937_64& rng) {
    return build_pairs_from_classes(class_matrices(mem), rng);
}

std::vector<Eigen::MatrixXd> encode_all(const MultiMemory& mem,
                                        const DenseNet& encoder) {
    std::vector<Eigen::MatrixXd> enc;
    enc.reserve(static_cast<std::size_t>(mem.num_classes()));
    for (int c = 1; c <= mem.num_classes(); ++c) {
        Eigen::MatrixXd M = mem.class_matrix(c);
        if (M.rows() == 0)
            enc.emplace_back(0, encoder.output_dim());
        else
            enc.push_back(encoder.predict(M));
    }
    return enc;
}

} // namespace sduo
