#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <random>
#include <vector>

#include "zdt/common.hpp"

namespace zdt {

enum class Activation { LeakyRelu, Linear };

constexpr double kLeakyReluSlope = 0.01;

struct Layer {
    Eigen::MatrixXd w;  // out x in
    Eigen::VectorXd b;  // out
    Activation act = Activation::Linear;
};

// Fully-connected network. Rows of a batch matrix are examples.
struct DenseNetwork {
    std::vector<Layer> layers;

    // widths = {in, h1, ..., out}; hidden layers use leaky ReLU, the final
    // layer takes `final_act`. Weights are He-uniform in fan-in, biases zero.
    static DenseNetwork make(const std::vector<int>& widths, std::uint64_t seed,
                             Activation final_act = Activation::Linear);

    int input_size() const { return static_cast<int>(layers.front().w.cols()); }
    int output_size() const { return static_cast<int>(layers.back().w.rows()); }
    std::size_t parameter_count() const;
};

struct ForwardCache {
    Eigen::MatrixXd input;
    std::vector<Eigen::MatrixXd> pre;   // pre-activation per layer
    std::vector<Eigen::MatrixXd> post;  // activation output per layer

    const Eigen::MatrixXd& output() const { return post.back(); }
};

ForwardCache forward(const DenseNetwork& net, const Eigen::MatrixXd& x);

// Output of the forward pass only (no cache kept).
Eigen::MatrixXd predict(const DenseNetwork& net, const Eigen::MatrixXd& x);

struct Gradients {
    std::vector<Eigen::MatrixXd> dw;
    std::vector<Eigen::VectorXd> db;
    Eigen::MatrixXd dinput;
};

// Exact gradients of the upstream scalar loss w.r.t. every parameter and the
// network input, given d(loss)/d(output).
Gradients backward(const DenseNetwork& net, const ForwardCache& cache,
                   const Eigen::MatrixXd& output_gradient);

// Mean over all elements of the squared difference, and its gradient w.r.t.
// pred: 2 (pred - target) / count.
std::pair<double, Eigen::MatrixXd> mse_loss(const Eigen::MatrixXd& pred,
                                            const Eigen::MatrixXd& target);

struct AdamState {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::int64_t step = 0;
    std::vector<Eigen::MatrixXd> m_w, v_w;
    std::vector<Eigen::VectorXd> m_b, v_b;

    static AdamState for_network(const DenseNetwork& net, double lr = 1e-3);
};

// Standard bias-corrected Adam update applied in place.
void adam_step(DenseNetwork& net, const Gradients& grads, AdamState& state);

// Encoder/decoder pair; the encoder output is the latent representation.
// Every layer of the composed network is leaky ReLU except the decoder's
// final reconstruction layer, so the latent itself is a hidden activation.
struct Autoencoder {
    DenseNetwork encoder;
    DenseNetwork decoder;

    // encoder_widths = {in, ..., latent}; the decoder mirrors them.
    static Autoencoder make(const std::vector<int>& encoder_widths, std::uint64_t seed);

    int latent_size() const { return encoder.output_size(); }

    Eigen::MatrixXd encode(const Eigen::MatrixXd& x) const { return predict(encoder, x); }
    Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& x) const {
        return predict(decoder, predict(encoder, x));
    }
};

// Per-row reconstruction MSE.
Eigen::VectorXd reconstruction_losses(const Autoencoder& ae, const Eigen::MatrixXd& x);

struct AeTrainConfig {
    int epochs = 50;
    int batch_size = 256;
    double lr = 1e-3;
    int patience = 5;          // early stop after this many epochs without val improvement
    double min_delta = 1e-7;   // improvement below this counts as plateau
    std::uint64_t seed = 1;
};

struct AeTrainLog {
    std::vector<double> train_mse;
    std::vector<double> val_mse;
    int epochs_run = 0;
};

// Plain reconstruction training with Adam and mini-batches; aborts with
// NumericError if the loss goes non-finite.
AeTrainLog train_autoencoder(Autoencoder& ae, const Eigen::MatrixXd& train,
                             const Eigen::MatrixXd& val, const AeTrainConfig& config,
                             std::ostream* log = nullptr);

}  // namespace zdt
