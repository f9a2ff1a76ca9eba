#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sduo/active.hpp"
#include "sduo/augment.hpp"
#include "sduo/memory.hpp"
#include "sduo/siamese.hpp"

namespace sduo {

enum class LearnerKind { baseline, nn, siamese, siameseduo };

LearnerKind parse_learner(const std::string& name);
std::string learner_name(LearnerKind kind);

struct LearnerStepOutcome {
    int predicted = 0;
    Eigen::VectorXd scores; // per-class, sums to 1
    bool queried = false;
    double budget_spent = 0.0; // spending estimate after this step
};

// Returns the true label of the current instance; called at most once per
// step and only when the step queries.
using Oracle = std::function<int()>;

struct LearnerConfig {
    int num_classes = 0;
    int input_dim = 0;
    double budget = 0.01;
    int memory_length = 10;

    std::vector<int> hidden{32, 32}; // classifier / encoder stack
    double lr = 0.01;
    double l2 = 1e-4;
    int minibatch = 64;

    std::vector<int> head_hidden{16}; // latent pair classifier
    double head_lr = 0.001;

    double al_step = 0.01;
    double al_delta = 1.0;
    int al_window = 300;

    AugmentConfig augment;
};

class Learner {
  public:
    virtual ~Learner() = default;

    // Predict, consult the budget gate and query criterion, optionally
    // fetch the label and train, then advance the spending estimate. If the
    // oracle throws, all learner state is left unchanged.
    virtual LearnerStepOutcome step(const Eigen::VectorXd& x,
                                    const Oracle& oracle) = 0;

    // The prediction the next step() would report, without side effects.
    virtual Prediction predict(const Eigen::VectorXd& x) const = 0;

    virtual const BudgetTracker& budget() const = 0;

    // Introspection; null when the learner has no such part.
    virtual const MultiMemory* memory() const { return nullptr; }
    virtual const SiameseEncoderNet* encoder() const { return nullptr; }
    virtual const std::vector<Eigen::MatrixXd>* latent_memory() const {
        return nullptr;
    }
};

// seed_data fills the per-class memories of the memory-based learners; the
// memory-less baseline ignores it. All randomness (init, threshold draws,
// pair sampling, shuffles, augmentation noise) stems from `seed`.
std::unique_ptr<Learner> make_learner(LearnerKind kind,
                                      const LearnerConfig& cfg,
                                      const std::vector<LabelledExample>& seed_data,
                                      std::uint64_t seed);

} // namespace sduo
