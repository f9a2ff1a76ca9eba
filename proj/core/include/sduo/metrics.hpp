#pragma once

#include <Eigen/Dense>
#include <deque>
#include <vector>

namespace sduo {

// Geometric mean of per-class recalls with exponentially faded counts.
// Classes not yet observed stay out of the product; the root is the number
// of observed classes.
class FadingGmean {
  public:
    FadingGmean(int num_classes, double alpha);

    void update(int predicted, int actual);
    double value() const;

    double alpha() const { return alpha_; }

  private:
    double alpha_;
    Eigen::VectorXd correct_; // faded per-class correct counts
    Eigen::VectorXd seen_;    // faded per-class totals
};

// Average of one-vs-one AUCs over a sliding window. For each class pair
// (i < j), class i is the positive class and records are ranked by their
// i-th score; ties earn 0.5. Pairs with an empty side are skipped; with no
// scorable pair the value is 0.5.
class SlidingPmauc {
  public:
    SlidingPmauc(int num_classes, int window);

    void update(const Eigen::VectorXd& scores, int actual);
    double value() const;

    int window() const { return window_; }
    int buffered() const { return static_cast<int>(buffer_.size()); }

  private:
    struct Record {
        Eigen::VectorXd scores;
        int actual;
    };
    struct PairState {
        std::vector<double> pos; // sorted i-th scores of class-i records
        std::vector<double> neg; // sorted i-th scores of class-j records
        double concordant = 0.0; // wins + 0.5 * ties
    };

    int num_classes_;
    int window_;
    std::deque<Record> buffer_;
    std::vector<PairState> pairs_; // (i,j), i<j, row-major upper triangle

    PairState& pair_state(int i, int j);
    const PairState& pair_state(int i, int j) const;
    void apply(const Record& rec, bool insert);
};

struct StepRecord {
    int t = 0;
    int predicted = 0;
    int actual = 0;
    bool queried = false;
    double gmean = 0.0;
    double pmauc = 0.0;
    double budget_spent = 0.0;
};

struct RunLog {
    std::vector<StepRecord> steps;
};

struct MetricSeries {
    std::vector<double> mean;
    std::vector<double> stddev; // population std across runs
};

struct AggregateLog {
    MetricSeries gmean, pmauc, budget_spent;
};

// Element-wise mean and population standard deviation across equal-length
// runs; throws on a length mismatch.
AggregateLog aggregate_runs(const std::vector<RunLog>& logs);

} // namespace sduo
