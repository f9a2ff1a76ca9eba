#include "sduo/nn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace sduo {

namespace {

constexpr double kLeakySlope = 0.01;
constexpr double kProbClamp = 1e-12;

// Derivative of the activation expressed through its output value. Works
// because every supported activation is monotone: for leaky ReLU the output
// sign equals the preactivation sign.
Eigen::MatrixXd activation_grad_from_output(const Eigen::MatrixXd& A,
                                            Activation act) {
    switch (act) {
    case Activation::identity:
        return Eigen::MatrixXd::Ones(A.rows(), A.cols());
    case Activation::leaky_relu:
        return ((A.array() > 0.0).cast<double>() * (1.0 - kLeakySlope) +
                kLeakySlope)
            .matrix();
    case Activation::sigmoid:
        return (A.array() * (1.0 - A.array())).matrix();
    case Activation::softmax:
        throw std::logic_error(
            "softmax backward needs a fused preactivation delta");
    }
    throw std::logic_error("unknown activation");
}

} // namespace

NetGrads& NetGrads::operator+=(const NetGrads& other) {
    if (dW.size() != other.dW.size())
        throw std::logic_error("NetGrads shape mismatch");
    for (std::size_t i = 0; i < dW.size(); ++i) {
        dW[i] += other.dW[i];
        db[i] += other.db[i];
    }
    return *this;
}

Eigen::MatrixXd he_normal(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> dist(0.0, std::sqrt(2.0 / cols));
    Eigen::MatrixXd W(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c)
            W(r, c) = dist(rng);
    return W;
}

DenseNet::DenseNet(int input_dim, const std::vector<LayerSpec>& layers,
                   double l2_rate, std::mt19937_64& rng)
    : input_dim_(input_dim), l2_rate_(l2_rate) {
    if (input_dim <= 0)
        throw std::invalid_argument("input_dim must be positive");
    int fan_in = input_dim;
    for (const auto& spec : layers) {
        if (spec.units <= 0)
            throw std::invalid_argument("layer units must be positive");
        DenseLayer layer;
        layer.W = he_normal(spec.units, fan_in, rng);
        layer.b = Eigen::VectorXd::Zero(spec.units);
        layer.act = spec.act;
        layers_.push_back(std::move(layer));
        fan_in = spec.units;
    }
}

Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& Z, Activation act) {
    switch (act) {
    case Activation::identity:
        return Z;
    case Activation::leaky_relu:
        return (Z.array() > 0.0).select(Z, kLeakySlope * Z);
    case Activation::sigmoid:
        return (1.0 / (1.0 + (-Z.array()).exp())).matrix();
    case Activation::softmax: {
        Eigen::MatrixXd out(Z.rows(), Z.cols());
        for (int r = 0; r < Z.rows(); ++r) {
            Eigen::ArrayXd row = Z.row(r).array();
            row -= row.maxCoeff();
            Eigen::ArrayXd e = row.exp();
            out.row(r) = (e / e.sum()).matrix().transpose();
        }
        return out;
    }
    }
    throw std::logic_error("unknown activation");
}

std::vector<Eigen::MatrixXd> DenseNet::forward(const Eigen::MatrixXd& X) const {
    if (X.cols() != input_dim_)
        throw std::invalid_argument("forward: input width mismatch");
    std::vector<Eigen::MatrixXd> acts;
    acts.reserve(layers_.size() + 1);
    acts.push_back(X);
    for (const auto& layer : layers_) {
        Eigen::MatrixXd Z =
            (acts.back() * layer.W.transpose()).rowwise() + layer.b.transpose();
        acts.push_back(apply_activation(Z, layer.act));
    }
    return acts;
}

Eigen::MatrixXd DenseNet::predict(const Eigen::MatrixXd& X) const {
    return forward(X).back();
}

NetGrads DenseNet::backward(const std::vector<Eigen::MatrixXd>& acts,
                            const Eigen::MatrixXd& delta, bool delta_is_preact,
                            Eigen::MatrixXd* d_input) const {
    if (acts.size() != layers_.size() + 1)
        throw std::invalid_argument("backward: activation stack mismatch");
    NetGrads grads;
    grads.dW.resize(layers_.size());
    grads.db.resize(layers_.size());

    Eigen::MatrixXd dA = delta;
    for (int i = static_cast<int>(layers_.size()) - 1; i >= 0; --i) {
        const auto& layer = layers_[static_cast<std::size_t>(i)];
        Eigen::MatrixXd dZ;
        if (i == static_cast<int>(layers_.size()) - 1 && delta_is_preact) {
            dZ = dA;
        } else {
            dZ = dA.cwiseProduct(
                activation_grad_from_output(acts[static_cast<std::size_t>(i) + 1],
                                            layer.act));
        }
        grads.dW[static_cast<std::size_t>(i)] =
            dZ.transpose() * acts[static_cast<std::size_t>(i)];
        grads.db[static_cast<std::size_t>(i)] = dZ.colwise().sum().transpose();
        if (i > 0 || d_input != nullptr)
            dA = dZ * layer.W;
        if (i == 0 && d_input != nullptr)
            *d_input = dA;
    }
    return grads;
}

void DenseNet::add_l2(NetGrads& grads) const {
    if (l2_rate_ == 0.0)
        return;
    for (std::size_t i = 0; i < layers_.size(); ++i)
        grads.dW[i] += l2_rate_ * layers_[i].W;
}

double DenseNet::l2_penalty() const {
    double sum = 0.0;
    for (const auto& layer : layers_)
        sum += layer.W.squaredNorm();
    return 0.5 * l2_rate_ * sum;
}

AdamState DenseNet::make_adam_state() const {
    AdamState s;
    for (const auto& layer : layers_) {
        s.mW.push_back(Eigen::MatrixXd::Zero(layer.W.rows(), layer.W.cols()));
        s.vW.push_back(Eigen::MatrixXd::Zero(layer.W.rows(), layer.W.cols()));
        s.mb.push_back(Eigen::VectorXd::Zero(layer.b.size()));
        s.vb.push_back(Eigen::VectorXd::Zero(layer.b.size()));
    }
    return s;
}

void DenseNet::apply_adam(const NetGrads& grads, AdamState& state,
                          const AdamConfig& cfg) {
    if (grads.dW.size() != layers_.size() || state.mW.size() != layers_.size())
        throw std::invalid_argument("apply_adam: shape mismatch");
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        if (!grads.dW[i].allFinite() || !grads.db[i].allFinite())
            throw std::runtime_error("non-finite gradient in layer " +
                                     std::to_string(i));
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < layers_.size(); ++i) {
        auto& layer = layers_[i];
        state.mW[i] = cfg.beta1 * state.mW[i] + (1.0 - cfg.beta1) * grads.dW[i];
        state.vW[i] = cfg.beta2 * state.vW[i] +
                      (1.0 - cfg.beta2) * grads.dW[i].cwiseProduct(grads.dW[i]);
        state.mb[i] = cfg.beta1 * state.mb[i] + (1.0 - cfg.beta1) * grads.db[i];
        state.vb[i] = cfg.beta2 * state.vb[i] +
                      (1.0 - cfg.beta2) * grads.db[i].cwiseProduct(grads.db[i]);
        layer.W.array() -= cfg.lr * (state.mW[i].array() / bc1) /
                           ((state.vW[i].array() / bc2).sqrt() + cfg.eps);
        layer.b.array() -= cfg.lr * (state.mb[i].array() / bc1) /
                           ((state.vb[i].array() / bc2).sqrt() + cfg.eps);
    }
}

double loss_value(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Y,
                  Loss loss) {
    if (P.rows() != Y.rows() || P.cols() != Y.cols())
        throw std::invalid_argument("loss: shape mismatch");
    if (P.rows() == 0)
        throw std::invalid_argument("loss: empty batch");
    Eigen::ArrayXXd Pc =
        P.array().max(kProbClamp).min(1.0 - kProbClamp);
    const double n = static_cast<double>(P.rows());
    switch (loss) {
    case Loss::binary_cross_entropy:
        return -(Y.array() * Pc.log() + (1.0 - Y.array()) * (1.0 - Pc).log())
                    .sum() /
               n;
    case Loss::categorical_cross_entropy:
        return -(Y.array() * Pc.log()).sum() / n;
    }
    throw std::logic_error("unknown loss");
}

Eigen::MatrixXd fused_output_delta(const Eigen::MatrixXd& P,
                                   const Eigen::MatrixXd& Y) {
    return (P - Y) / static_cast<double>(P.rows());
}

std::vector<std::vector<int>> make_minibatches(int n, int batch_size,
                                               std::mt19937_64& rng) {
    if (batch_size <= 0)
        throw std::invalid_argument("batch_size must be positive");
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::vector<int>> batches;
    for (int start = 0; start < n; start += batch_size) {
        const int end = std::min(n, start + batch_size);
        batches.emplace_back(order.begin() + start, order.begin() + end);
    }
    return batches;
}

void train_epoch(DenseNet& net, AdamState& state, const AdamConfig& cfg,
                 const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                 int batch_size, std::mt19937_64& rng) {
    if (X.rows() != Y.rows())
        throw std::invalid_argument("train_epoch: X/Y row mismatch");
    const auto batches = make_minibatches(static_cast<int>(X.rows()),
                                          batch_size, rng);
    for (const auto& batch : batches) {
        Eigen::MatrixXd Xb(batch.size(), X.cols());
        Eigen::MatrixXd Yb(batch.size(), Y.cols());
        for (std::size_t r = 0; r < batch.size(); ++r) {
            Xb.row(static_cast<int>(r)) = X.row(batch[r]);
            Yb.row(static_cast<int>(r)) = Y.row(batch[r]);
        }
        auto acts = net.forward(Xb);
        NetGrads grads = net.backward(
            acts, fused_output_delta(acts.back(), Yb), true);
        net.add_l2(grads);
        net.apply_adam(grads, state, cfg);
    }
}

} // namespace sduo
