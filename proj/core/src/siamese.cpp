#include "sduo/siamese.hpp"

#include <stdexcept>

namespace sduo {

namespace {

std::vector<LayerSpec> hidden_stack(const std::vector<int>& hidden) {
    std::vector<LayerSpec> specs;
    for (int units : hidden)
        specs.push_back({units, Activation::leaky_relu});
    return specs;
}

void gather_pair_batch(const PairSet& pairs, const std::vector<int>& batch,
                       Eigen::MatrixXd& A, Eigen::MatrixXd& B,
                       Eigen::VectorXd& y) {
    const int n = static_cast<int>(batch.size());
    A.resize(n, pairs.pool.cols());
    B.resize(n, pairs.pool.cols());
    y.resize(n);
    for (int r = 0; r < n; ++r) {
        A.row(r) = pairs.pool.row(pairs.a[static_cast<std::size_t>(batch[static_cast<std::size_t>(r)])]);
        B.row(r) = pairs.pool.row(pairs.b[static_cast<std::size_t>(batch[static_cast<std::size_t>(r)])]);
        y(r) = pairs.target(batch[static_cast<std::size_t>(r)]);
    }
}

} // namespace

SiameseEncoderNet make_siamese_encoder_net(int input_dim,
                                           const std::vector<int>& hidden,
                                           double l2_rate, double lr,
                                           std::mt19937_64& rng) {
    if (hidden.empty())
        throw std::invalid_argument("siamese encoder needs >= 1 hidden layer");
    SiameseEncoderNet s1;
    s1.encoder = DenseNet(input_dim, hidden_stack(hidden), l2_rate, rng);
    s1.head = DenseNet(s1.encoder.output_dim(), {{1, Activation::sigmoid}},
                       l2_rate, rng);
    s1.encoder_state = s1.encoder.make_adam_state();
    s1.head_state = s1.head.make_adam_state();
    s1.adam.lr = lr;
    return s1;
}

SiameseHeadNet make_siamese_head_net(int latent_dim,
                                     const std::vector<int>& hidden,
                                     double l2_rate, double lr,
                                     std::mt19937_64& rng) {
    SiameseHeadNet s2;
    auto specs = hidden_stack(hidden);
    specs.push_back({1, Activation::sigmoid});
    s2.head = DenseNet(latent_dim, specs, l2_rate, rng);
    s2.state = s2.head.make_adam_state();
    s2.adam.lr = lr;
    return s2;
}

Eigen::VectorXd s1_encode(const SiameseEncoderNet& s1, const Eigen::VectorXd& x) {
    return s1.encoder.predict(x.transpose()).row(0).transpose();
}

Eigen::VectorXd pair_probs(const DenseNet& head, const Eigen::MatrixXd& Za,
                           const Eigen::MatrixXd& Zb) {
    return head.predict((Za - Zb).cwiseAbs()).col(0);
}

Eigen::VectorXd pair_probs_vs(const DenseNet& head, const Eigen::MatrixXd& Z,
                              const Eigen::VectorXd& q) {
    Eigen::MatrixXd D = (Z.rowwise() - q.transpose()).cwiseAbs();
    return head.predict(D).col(0);
}

double s1_pair_prob(const SiameseEncoderNet& s1, const Eigen::VectorXd& a,
                    const Eigen::VectorXd& b) {
    Eigen::MatrixXd X(2, a.size());
    X.row(0) = a.transpose();
    X.row(1) = b.transpose();
    Eigen::MatrixXd Z = s1.encoder.predict(X);
    return s1.head.predict((Z.row(0) - Z.row(1)).cwiseAbs())(0, 0);
}

double s2_pair_prob(const SiameseHeadNet& s2, const Eigen::VectorXd& za,
                    const Eigen::VectorXd& zb) {
    return s2.head.predict((za - zb).cwiseAbs().transpose())(0, 0);
}

PairGrads s1_pair_gradients(const SiameseEncoderNet& s1,
                            const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                            const Eigen::VectorXd& y) {
    auto actsA = s1.encoder.forward(A);
    auto actsB = s1.encoder.forward(B);
    const Eigen::MatrixXd& Za = actsA.back();
    const Eigen::MatrixXd& Zb = actsB.back();

    Eigen::MatrixXd D = (Za - Zb).cwiseAbs();
    auto head_acts = s1.head.forward(D);
    const Eigen::MatrixXd& P = head_acts.back();

    PairGrads out;
    out.loss = loss_value(P, y, Loss::binary_cross_entropy);

    Eigen::MatrixXd dD;
    out.head = s1.head.backward(head_acts, fused_output_delta(P, y), true, &dD);

    // d|Za-Zb|/dZa = sign(Za-Zb); both branches hit the same parameters
    Eigen::MatrixXd sgn = (Za - Zb).array().sign().matrix();
    Eigen::MatrixXd dZa = dD.cwiseProduct(sgn);
    out.encoder = s1.encoder.backward(actsA, dZa, false);
    out.encoder += s1.encoder.backward(actsB, -dZa, false);
    return out;
}

PairGrads s2_pair_gradients(const SiameseHeadNet& s2, const Eigen::MatrixXd& A,
                            const Eigen::MatrixXd& B, const Eigen::VectorXd& y) {
    Eigen::MatrixXd D = (A - B).cwiseAbs();
    auto acts = s2.head.forward(D);
    const Eigen::MatrixXd& P = acts.back();

    PairGrads out;
    out.loss = loss_value(P, y, Loss::binary_cross_entropy);
    out.head = s2.head.backward(acts, fused_output_delta(P, y), true);
    return out;
}

void train_s1(SiameseEncoderNet& s1, const PairSet& pairs, int batch_size,
              std::mt19937_64& rng) {
    if (pairs.empty())
        return;
    const auto batches =
        make_minibatches(static_cast<int>(pairs.size()), batch_size, rng);
    Eigen::MatrixXd A, B;
    Eigen::VectorXd y;
    for (const auto& batch : batches) {
        gather_pair_batch(pairs, batch, A, B, y);
        PairGrads g = s1_pair_gradients(s1, A, B, y);
        s1.encoder.add_l2(g.encoder);
        s1.head.add_l2(g.head);
        s1.encoder.apply_adam(g.encoder, s1.encoder_state, s1.adam);
        s1.head.apply_adam(g.head, s1.head_state, s1.adam);
    }
}

void train_s2(SiameseHeadNet& s2, const PairSet& pairs, int batch_size,
              std::mt19937_64& rng) {
    if (pairs.empty())
        return;
    const auto batches =
        make_minibatches(static_cast<int>(pairs.size()), batch_size, rng);
    Eigen::MatrixXd A, B;
    Eigen::VectorXd y;
    for (const auto& batch : batches) {
        gather_pair_batch(pairs, batch, A, B, y);
        PairGrads g = s2_pair_gradients(s2, A, B, y);
        s2.head.add_l2(g.head);
        s2.head.apply_adam(g.head, s2.state, s2.adam);
    }
}

Prediction predict_by_mean_similarity(
    const std::vector<Eigen::MatrixXd>& class_rows, const Eigen::VectorXd& query,
    const std::function<Eigen::VectorXd(const Eigen::MatrixXd&,
                                        const Eigen::VectorXd&)>& sim_batch) {
    const int K = static_cast<int>(class_rows.size());
    Prediction pred;
    pred.scores = Eigen::VectorXd::Zero(K);
    std::vector<bool> populated(static_cast<std::size_t>(K), false);
    bool any_populated = false;
    for (int c = 0; c < K; ++c) {
        const auto& M = class_rows[static_cast<std::size_t>(c)];
        if (M.rows() > 0) {
            populated[static_cast<std::size_t>(c)] = true;
            any_populated = true;
            pred.scores(c) = sim_batch(M, query).mean();
        }
    }
    if (!any_populated)
        throw std::runtime_error("prediction requires a populated memory");
    int best = 0;
    for (int c = 1; c < K; ++c) {
        const bool better =
            pred.scores(c) > pred.scores(best) ||
            (pred.scores(c) == pred.scores(best) &&
             populated[static_cast<std::size_t>(c)] &&
             !populated[static_cast<std::size_t>(best)]);
        if (better)
            best = c;
    }
    pred.cls = best + 1;
    return pred;
}

Prediction predict_class(const SiameseHeadNet& s2,
                         const Eigen::VectorXd& query_encoding,
                         const std::vector<Eigen::MatrixXd>& enc_memory) {
    return predict_by_mean_similarity(
        enc_memory, query_encoding,
        [&s2](const Eigen::MatrixXd& M, const Eigen::VectorXd& q) {
            return pair_probs_vs(s2.head, M, q);
        });
}

} // namespace sduo
