#pragma once

#include <Eigen/Dense>
#include <random>

#include "sduo/nn.hpp"

namespace sduo {

struct QueryDecision {
    bool query = false;
    double v = 0.0; // criterion value the decision was based on
    double theta_after = 0.0;
};

// Randomised variable threshold: the comparison threshold is theta scaled by
// a N(1, delta^2) draw; theta shrinks multiplicatively on a query and grows
// otherwise, clamped to (0, 1].
struct VariableThreshold {
    double theta = 1.0;
    double step = 0.01;
    double delta = 1.0;

    static constexpr double kThetaMin = 1e-6;
    static constexpr double kThetaMax = 1.0;
};

QueryDecision rvus_decide(double v, VariableThreshold& th,
                          std::mt19937_64& rng);

// Fading estimate of the labelling rate over a window of W steps:
// u_hat <- lambda * u_hat + queried, lambda = (W-1)/W, b_hat = u_hat / W.
// The gate compares the previous step's estimate against the budget, so
// callers consult allows() before update() within a step.
struct BudgetTracker {
    double budget = 0.01;
    int window = 300;
    double u_hat = 0.0;

    double lambda() const { return (window - 1.0) / window; }
    double b_hat() const { return u_hat / window; }
    bool allows() const { return b_hat() < budget; }
    void update(bool queried) {
        u_hat = lambda() * u_hat + (queried ? 1.0 : 0.0);
    }
};

// Max class probability; expects a distribution summing to 1.
double criterion_uncertainty(const Eigen::VectorXd& class_probabilities);

// Max pairwise similarity between the query encoding and the stored
// encodings of the predicted class; an empty class is maximally
// query-worthy (0).
double criterion_density(const DenseNet& pair_head,
                         const Eigen::MatrixXd& class_encodings,
                         const Eigen::VectorXd& query_encoding);

} // namespace sduo
