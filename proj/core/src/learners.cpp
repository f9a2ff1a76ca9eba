#include "sduo/learners.hpp"

#include <stdexcept>

#include "sduo/rng.hpp"

namespace sduo {

LearnerKind parse_learner(const std::string& name) {
    if (name == "baseline")
        return LearnerKind::baseline;
    if (name == "nn")
        return LearnerKind::nn;
    if (name == "siamese")
        return LearnerKind::siamese;
    if (name == "siameseduo")
        return LearnerKind::siameseduo;
    throw std::invalid_argument("unknown learner '" + name + "'");
}

std::string learner_name(LearnerKind kind) {
    switch (kind) {
    case LearnerKind::baseline:
        return "baseline";
    case LearnerKind::nn:
        return "nn";
    case LearnerKind::siamese:
        return "siamese";
    case LearnerKind::siameseduo:
        return "siameseduo";
    }
    return "?";
}

namespace {

Eigen::VectorXd normalize_scores(const Eigen::VectorXd& raw) {
    const double sum = raw.sum();
    if (sum <= 0.0)
        return Eigen::VectorXd::Constant(raw.size(), 1.0 / raw.size());
    return raw / sum;
}

std::vector<LayerSpec> classifier_stack(const std::vector<int>& hidden,
                                        int num_classes) {
    std::vector<LayerSpec> specs;
    for (int units : hidden)
        specs.push_back({units, Activation::leaky_relu});
    specs.push_back({num_classes, Activation::softmax});
    return specs;
}

class SoftmaxLearnerBase : public Learner {
  public:
    SoftmaxLearnerBase(const LearnerConfig& cfg, std::uint64_t seed)
        : cfg_(cfg), rng_(make_rng(seed)) {
        net_ = DenseNet(cfg.input_dim,
                        classifier_stack(cfg.hidden, cfg.num_classes), cfg.l2,
                        rng_);
        adam_state_ = net_.make_adam_state();
        adam_.lr = cfg.lr;
        threshold_.step = cfg.al_step;
        threshold_.delta = cfg.al_delta;
        tracker_.budget = cfg.budget;
        tracker_.window = cfg.al_window;
    }

    Prediction predict(const Eigen::VectorXd& x) const override {
        Prediction pred;
        pred.scores = net_.predict(x.transpose()).row(0).transpose();
        Eigen::Index best = 0;
        pred.scores.maxCoeff(&best);
        pred.cls = static_cast<int>(best) + 1;
        return pred;
    }

    LearnerStepOutcome step(const Eigen::VectorXd& x,
                            const Oracle& oracle) override {
        Prediction pred = predict(x);
        LearnerStepOutcome out;
        out.predicted = pred.cls;
        out.scores = pred.scores;

        if (tracker_.allows()) {
            const double theta_before = threshold_.theta;
            const QueryDecision dec =
                rvus_decide(criterion_uncertainty(pred.scores), threshold_, rng_);
            if (dec.query) {
                int label = 0;
                try {
                    label = oracle();
                } catch (...) {
                    threshold_.theta = theta_before;
                    throw;
                }
                train(x, label);
                out.queried = true;
            }
        }
        tracker_.update(out.queried);
        out.budget_spent = tracker_.b_hat();
        return out;
    }

    const BudgetTracker& budget() const override { return tracker_; }

  protected:
    virtual void train(const Eigen::VectorXd& x, int label) = 0;

    Eigen::MatrixXd one_hot(const std::vector<int>& labels) const {
        Eigen::MatrixXd Y = Eigen::MatrixXd::Zero(
            static_cast<int>(labels.size()), cfg_.num_classes);
        for (std::size_t r = 0; r < labels.size(); ++r)
            Y(static_cast<int>(r), labels[r] - 1) = 1.0;
        return Y;
    }

    LearnerConfig cfg_;
    std::mt19937_64 rng_;
    DenseNet net_;
    AdamState adam_state_;
    AdamConfig adam_;
    VariableThreshold threshold_;
    BudgetTracker tracker_;
};

// Memory-less reference method: uncertainty sampling, one gradient step on
// each queried example.
class BaselineLearner final : public SoftmaxLearnerBase {
  public:
    using SoftmaxLearnerBase::SoftmaxLearnerBase;

  private:
    void train(const Eigen::VectorXd& x, int label) override {
        auto acts = net_.forward(x.transpose());
        NetGrads grads = net_.backward(
            acts, fused_output_delta(acts.back(), one_hot({label})), true);
        net_.add_l2(grads);
        net_.apply_adam(grads, adam_state_, adam_);
    }
};

// Memory-based reference method: uncertainty sampling; each query appends to
// the class queues and retrains one epoch over the whole memory.
class NnLearner final : public SoftmaxLearnerBase {
  public:
    NnLearner(const LearnerConfig& cfg,
              const std::vector<LabelledExample>& seed_data, std::uint64_t seed)
        : SoftmaxLearnerBase(cfg, seed),
          memory_(cfg.num_classes, cfg.memory_length, seed_data) {}

  private:
    void train(const Eigen::VectorXd& x, int label) override {
        memory_.append({x, label});
        const auto stored = memory_.all();
        Eigen::MatrixXd X(static_cast<int>(stored.size()), cfg_.input_dim);
        std::vector<int> labels(stored.size());
        for (std::size_t r = 0; r < stored.size(); ++r) {
            X.row(static_cast<int>(r)) = stored[r].x.transpose();
            labels[r] = stored[r].label;
        }
        train_epoch(net_, adam_state_, adam_, X, one_hot(labels),
                    cfg_.minibatch, rng_);
    }

  public:
    const MultiMemory* memory() const override { return &memory_; }

  private:
    MultiMemory memory_;
};

// Shared scaffolding of the two siamese methods: encoder, class memories,
// cached encodings, density criterion, budget bookkeeping.
class SiameseLearnerBase : public Learner {
  public:
    SiameseLearnerBase(const LearnerConfig& cfg,
                       const std::vector<LabelledExample>& seed_data,
                       std::uint64_t seed)
        : cfg_(cfg), rng_(make_rng(seed)),
          memory_(cfg.num_classes, cfg.memory_length, seed_data) {
        s1_ = make_siamese_encoder_net(cfg.input_dim, cfg.hidden, cfg.l2,
                                       cfg.lr, rng_);
        threshold_.step = cfg.al_step;
        threshold_.delta = cfg.al_delta;
        tracker_.budget = cfg.budget;
        tracker_.window = cfg.al_window;
        enc_mem_ = encode_all(memory_, s1_.encoder);
    }

    LearnerStepOutcome step(const Eigen::VectorXd& x,
                            const Oracle& oracle) override {
        const Eigen::VectorXd enc_x = s1_encode(s1_, x);
        Prediction pred = predict_encoded(enc_x);
        LearnerStepOutcome out;
        out.predicted = pred.cls;
        out.scores = normalize_scores(pred.scores);

        if (tracker_.allows()) {
            const double v = criterion(
                enc_mem_[static_cast<std::size_t>(pred.cls - 1)], enc_x);
            const double theta_before = threshold_.theta;
            const QueryDecision dec = rvus_decide(v, threshold_, rng_);
            if (dec.query) {
                int label = 0;
                try {
                    label = oracle();
                } catch (...) {
                    threshold_.theta = theta_before;
                    throw;
                }
                memory_.append({x, label});
                train();
                out.queried = true;
            }
        }
        tracker_.update(out.queried);
        out.budget_spent = tracker_.b_hat();
        return out;
    }

    Prediction predict(const Eigen::VectorXd& x) const override {
        return predict_encoded(s1_encode(s1_, x));
    }

    const BudgetTracker& budget() const override { return tracker_; }

    const MultiMemory* memory() const override { return &memory_; }
    const SiameseEncoderNet* encoder() const override { return &s1_; }
    const std::vector<Eigen::MatrixXd>* latent_memory() const override {
        return &enc_mem_;
    }

  protected:
    virtual Prediction predict_encoded(const Eigen::VectorXd& enc_x) const = 0;
    // max similarity between the query and the predicted class's encodings
    virtual double criterion(const Eigen::MatrixXd& class_enc,
                             const Eigen::VectorXd& enc_x) const = 0;
    virtual void train() = 0;

    void refresh_encodings() { enc_mem_ = encode_all(memory_, s1_.encoder); }

    LearnerConfig cfg_;
    std::mt19937_64 rng_;
    MultiMemory memory_;
    SiameseEncoderNet s1_;
    std::vector<Eigen::MatrixXd> enc_mem_;
    VariableThreshold threshold_;
    BudgetTracker tracker_;
};

// Single siamese network: prediction and the query criterion both run on the
// encoder's own pair head.
class SiameseLearner final : public SiameseLearnerBase {
  public:
    using SiameseLearnerBase::SiameseLearnerBase;

  private:
    Prediction predict_encoded(const Eigen::VectorXd& enc_x) const override {
        return predict_by_mean_similarity(
            enc_mem_, enc_x,
            [this](const Eigen::MatrixXd& M, const Eigen::VectorXd& q) {
                return pair_probs_vs(s1_.head, M, q);
            });
    }

    double criterion(const Eigen::MatrixXd& class_enc,
                     const Eigen::VectorXd& enc_x) const override {
        return criterion_density(s1_.head, class_enc, enc_x);
    }

    void train() override {
        const PairSet pairs = build_pairs(memory_, rng_);
        train_s1(s1_, pairs, cfg_.minibatch, rng_);
        refresh_encodings();
    }
};

// Full method: s1 learns the encoding, s2 classifies latent pairs built
// from the encodings plus generated vectors; prediction and the query
// criterion run on s2.
class SiameseDuoLearner final : public SiameseLearnerBase {
  public:
    SiameseDuoLearner(const LearnerConfig& cfg,
                      const std::vector<LabelledExample>& seed_data,
                      std::uint64_t seed)
        : SiameseLearnerBase(cfg, seed_data, seed) {
        s2_ = make_siamese_head_net(s1_.latent_dim(), cfg.head_hidden, cfg.l2,
                                    cfg.head_lr, rng_);
    }

  private:
    Prediction predict_encoded(const Eigen::VectorXd& enc_x) const override {
        return predict_class(s2_, enc_x, enc_mem_);
    }

    double criterion(const Eigen::MatrixXd& class_enc,
                     const Eigen::VectorXd& enc_x) const override {
        return criterion_density(s2_.head, class_enc, enc_x);
    }

    void train() override {
        const PairSet pairs = build_pairs(memory_, rng_);
        train_s1(s1_, pairs, cfg_.minibatch, rng_);
        refresh_encodings();
        const auto generated = build_generated(enc_mem_, cfg_.augment, rng_);
        const auto augmented = build_augmented(enc_mem_, generated);
        const PairSet latent_pairs = build_pairs_from_classes(augmented, rng_);
        train_s2(s2_, latent_pairs, cfg_.minibatch, rng_);
    }

    SiameseHeadNet s2_;
};

} // namespace

std::unique_ptr<Learner> make_learner(LearnerKind kind,
                                      const LearnerConfig& cfg,
                                      const std::vector<LabelledExample>& seed_data,
                                      std::uint64_t seed) {
    if (cfg.num_classes < 2 || cfg.input_dim < 1)
        throw std::invalid_argument("learner needs num_classes and input_dim");
    switch (kind) {
    case LearnerKind::baseline:
        return std::make_unique<BaselineLearner>(cfg, seed);
    case LearnerKind::nn:
        return std::make_unique<NnLearner>(cfg, seed_data, seed);
    case LearnerKind::siamese:
        return std::make_unique<SiameseLearner>(cfg, seed_data, seed);
    case LearnerKind::siameseduo:
        return std::make_unique<SiameseDuoLearner>(cfg, seed_data, seed);
    }
    throw std::logic_error("unknown learner kind");
}

} // namespace sduo
