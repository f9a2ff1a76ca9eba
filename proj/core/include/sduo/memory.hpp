#pragma once

#include <Eigen/Dense>
#include <deque>
#include <random>
#include <vector>

#include "sduo/nn.hpp"

namespace sduo {

// Labels are 1-based throughout ({1..K}).
struct LabelledExample {
    Eigen::VectorXd x;
    int label = 0;
};

// One FIFO queue of bounded length per class.
class MultiMemory {
  public:
    MultiMemory() = default;
    MultiMemory(int num_classes, int capacity,
                const std::vector<LabelledExample>& seed_data = {});

    void append(const LabelledExample& ex);

    int num_classes() const { return static_cast<int>(queues_.size()); }
    int capacity() const { return capacity_; }
    int size(int label) const { return static_cast<int>(queue(label).size()); }
    int total_size() const;

    const std::deque<LabelledExample>& queue(int label) const;

    // Rows are the stored examples of the class, oldest first; 0-row matrix
    // for an empty queue.
    Eigen::MatrixXd class_matrix(int label) const;
    std::vector<LabelledExample> all() const;

  private:
    int capacity_ = 0;
    int dim_ = -1; // fixed by the first appended example
    std::vector<std::deque<LabelledExample>> queues_;

    void check_label(int label) const;
};

// Balanced training pairs. Items live once in `pool`; a pair is two row
// indices plus its same-class target. pool_class keeps the 1-based label of
// each pool row.
struct PairSet {
    Eigen::MatrixXd pool;
    std::vector<int> pool_class;
    std::vector<int> a, b;
    Eigen::VectorXd target;

    std::size_t size() const { return a.size(); }
    bool empty() const { return a.empty(); }
};

// All within-class pairs as positives, equally many cross-class pairs
// sampled without replacement as negatives (with replacement only if the
// cross-class candidate set is smaller), output order shuffled. Fewer than
// two populated classes, or no within-class pair, yields an empty set.
PairSet build_pairs_from_classes(const std::vector<Eigen::MatrixXd>& class_rows,
                                 std::mt19937_64& rng);
PairSet build_pairs(const MultiMemory& mem, std::mt19937_64& rng);

// Per-class matrices of stored examples (index 0 = class 1).
std::vector<Eigen::MatrixXd> class_matrices(const MultiMemory& mem);

// Encodings of every stored example, same class partition and row order as
// the memory. `encoder` maps R^d rows to R^m rows.
std::vector<Eigen::MatrixXd> encode_all(const MultiMemory& mem,
                                        const DenseNet& encoder);

} // namespace sduo
