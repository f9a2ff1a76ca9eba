#include "sduo/active.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sduo/siamese.hpp"

namespace sduo {

QueryDecision rvus_decide(double v, VariableThreshold& th,
                          std::mt19937_64& rng) {
    double eta = 1.0;
    if (th.delta > 0.0) {
        std::normal_distribution<double> dist(1.0, th.delta);
        eta = dist(rng);
    }
    const double theta_rdm = th.theta * eta;
    QueryDecision d;
    d.v = v;
    d.query = v < theta_rdm;
    th.theta *= d.query ? (1.0 - th.step) : (1.0 + th.step);
    th.theta = std::clamp(th.theta, VariableThreshold::kThetaMin,
                          VariableThreshold::kThetaMax);
    d.theta_after = th.theta;
    return d;
}

double criterion_uncertainty(const Eigen::VectorXd& class_probabilities) {
    if (std::abs(class_probabilities.sum() - 1.0) > 1e-6)
        throw std::invalid_argument(
            "criterion_uncertainty expects a probability distribution");
    return class_probabilities.maxCoeff();
}

double criterion_density(const DenseNet& pair_head,
                         const Eigen::MatrixXd& class_encodings,
                         const Eigen::VectorXd& query_encoding) {
    if (class_encodings.rows() == 0)
        return 0.0;
    return pair_probs_vs(pair_head, class_encodings, query_encoding).maxCoeff();
}

} // namespace sduo
