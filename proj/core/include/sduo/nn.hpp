#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

namespace sduo {

enum class Activation { identity, leaky_relu, sigmoid, softmax };

// Loss on the output activation. Values are clamped to [1e-12, 1-1e-12]
// before the log so a saturated unit cannot produce inf.
enum class Loss { binary_cross_entropy, categorical_cross_entropy };

struct LayerSpec {
    int units;
    Activation act;
};

struct DenseLayer {
    Eigen::MatrixXd W; // units x fan_in
    Eigen::VectorXd b; // units
    Activation act;
};

struct NetGrads {
    std::vector<Eigen::MatrixXd> dW;
    std::vector<Eigen::VectorXd> db;

    NetGrads& operator+=(const NetGrads& other);
};

struct AdamConfig {
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<Eigen::MatrixXd> mW, vW;
    std::vector<Eigen::VectorXd> mb, vb;
    long step = 0;
};

// Plain fully connected net. Rows of every matrix passed through it are
// samples; forward() keeps all intermediate activations so a caller can
// backpropagate through shared copies (the siamese twins need that).
class DenseNet {
  public:
    DenseNet() = default;
    DenseNet(int input_dim, const std::vector<LayerSpec>& layers,
             double l2_rate, std::mt19937_64& rng);

    // acts[0] is the input, acts[i+1] the output of layer i.
    std::vector<Eigen::MatrixXd> forward(const Eigen::MatrixXd& X) const;
    Eigen::MatrixXd predict(const Eigen::MatrixXd& X) const;

    // delta is dLoss/d(output activation) of the last layer, already scaled
    // by the batch size; with delta_is_preact it is dLoss/d(preactivation)
    // instead (required for softmax, whose Jacobian is fused into the loss).
    // If d_input is given it receives dLoss/d(input rows).
    NetGrads backward(const std::vector<Eigen::MatrixXd>& acts,
                      const Eigen::MatrixXd& delta, bool delta_is_preact,
                      Eigen::MatrixXd* d_input = nullptr) const;

    // Adds l2_rate * W to the weight gradients (biases are not regularised).
    void add_l2(NetGrads& grads) const;

    // One Adam update. Throws std::runtime_error on non-finite gradients.
    void apply_adam(const NetGrads& grads, AdamState& state,
                    const AdamConfig& cfg);

    AdamState make_adam_state() const;

    int input_dim() const { return input_dim_; }
    int output_dim() const { return layers_.empty() ? input_dim_ : layers_.back().W.rows(); }
    double l2_rate() const { return l2_rate_; }
    // Sum of (l2_rate/2) * ||W||^2 over layers; the penalty whose gradient
    // add_l2 applies.
    double l2_penalty() const;

    std::vector<DenseLayer>& layers() { return layers_; }
    const std::vector<DenseLayer>& layers() const { return layers_; }

  private:
    int input_dim_ = 0;
    double l2_rate_ = 0.0;
    std::vector<DenseLayer> layers_;
};

Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& Z, Activation act);

// He-normal weight init: N(0, 2/fan_in), biases zero.
Eigen::MatrixXd he_normal(int rows, int cols, std::mt19937_64& rng);

double loss_value(const Eigen::MatrixXd& P, const Eigen::MatrixXd& Y, Loss loss);

// (P - Y) / n; exact dLoss/d(preactivation) for sigmoid+BCE and softmax+CCE.
Eigen::MatrixXd fused_output_delta(const Eigen::MatrixXd& P,
                                   const Eigen::MatrixXd& Y);

// Row indices shuffled and split into minibatches; a short tail is kept.
std::vector<std::vector<int>> make_minibatches(int n, int batch_size,
                                               std::mt19937_64& rng);

// One pass over (X, Y) in shuffled minibatches with fused softmax/sigmoid
// output deltas, L2 on weights, and one Adam step per minibatch.
void train_epoch(DenseNet& net, AdamState& state, const AdamConfig& cfg,
                 const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y,
                 int batch_size, std::mt19937_64& rng);

} // namespace sduo
