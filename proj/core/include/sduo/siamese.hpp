#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>
#include <vector>

#include "sduo/memory.hpp"
#include "sduo/nn.hpp"

namespace sduo {

// Twin encoder (weight sharing is structural: one net, forwarded once per
// branch) with a single sigmoid unit over the element-wise absolute
// difference of the two encodings.
struct SiameseEncoderNet {
    DenseNet encoder; // d -> hidden (leaky_relu); last hidden = encoding
    DenseNet head;    // m -> 1 sigmoid
    AdamState encoder_state, head_state;
    AdamConfig adam;

    int latent_dim() const { return encoder.output_dim(); }
};

// Classifier over latent pairs: abs-diff, hidden layer, sigmoid unit.
struct SiameseHeadNet {
    DenseNet head; // m -> hidden (leaky_relu) -> 1 sigmoid
    AdamState state;
    AdamConfig adam;
};

SiameseEncoderNet make_siamese_encoder_net(int input_dim,
                                           const std::vector<int>& hidden,
                                           double l2_rate, double lr,
                                           std::mt19937_64& rng);
SiameseHeadNet make_siamese_head_net(int latent_dim,
                                     const std::vector<int>& hidden,
                                     double l2_rate, double lr,
                                     std::mt19937_64& rng);

Eigen::VectorXd s1_encode(const SiameseEncoderNet& s1, const Eigen::VectorXd& x);

// Pair probability of aligned rows: head(|Za - Zb|) per row.
Eigen::VectorXd pair_probs(const DenseNet& head, const Eigen::MatrixXd& Za,
                           const Eigen::MatrixXd& Zb);
// Every row of Z against one query vector.
Eigen::VectorXd pair_probs_vs(const DenseNet& head, const Eigen::MatrixXd& Z,
                              const Eigen::VectorXd& q);

double s1_pair_prob(const SiameseEncoderNet& s1, const Eigen::VectorXd& a,
                    const Eigen::VectorXd& b);
double s2_pair_prob(const SiameseHeadNet& s2, const Eigen::VectorXd& za,
                    const Eigen::VectorXd& zb);

struct PairGrads {
    NetGrads encoder; // empty for the latent-pair net
    NetGrads head;
    double loss = 0.0;
};

// Gradients of the mean binary cross-entropy over the pair batch. Encoder
// gradients are the sum of both branch contributions (shared weights). L2 is
// not included here; training adds it before the Adam step.
PairGrads s1_pair_gradients(const SiameseEncoderNet& s1,
                            const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                            const Eigen::VectorXd& y);
PairGrads s2_pair_gradients(const SiameseHeadNet& s2, const Eigen::MatrixXd& A,
                            const Eigen::MatrixXd& B, const Eigen::VectorXd& y);

// One epoch over the pair set in shuffled mini-batches; empty set is a no-op.
void train_s1(SiameseEncoderNet& s1, const PairSet& pairs, int batch_size,
              std::mt19937_64& rng);
void train_s2(SiameseHeadNet& s2, const PairSet& pairs, int batch_size,
              std::mt19937_64& rng);

struct Prediction {
    int cls = 0;
    Eigen::VectorXd scores; // per-class mean similarity, 0 for empty classes
};

// sim_batch(M, q) returns the similarity of each row of M to q. Scores are
// per-class means; argmax with ties to the lowest class index, and an empty
// class never beats a populated one. Throws if every class is empty.
Prediction predict_by_mean_similarity(
    const std::vector<Eigen::MatrixXd>& class_rows, const Eigen::VectorXd& query,
    const std::function<Eigen::VectorXd(const Eigen::MatrixXd&,
                                        const Eigen::VectorXd&)>& sim_batch);

// Mean s2 pair probability per class over stored encodings.
Prediction predict_class(const SiameseHeadNet& s2,
                         const Eigen::VectorXd& query_encoding,
                         const std::vector<Eigen::MatrixXd>& enc_memory);

} // namespace sduo
