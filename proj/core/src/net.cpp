#include "zdt/net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace zdt {

DenseNetwork DenseNetwork::make(const std::vector<int>& widths, std::uint64_t seed,
                                Activation final_act) {
    if (widths.size() < 2) throw DataError("DenseNetwork: need at least input and output widths");
    std::mt19937_64 rng(seed);
    DenseNetwork net;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        const int fan_in = widths[l], fan_out = widths[l + 1];
        if (fan_in < 1 || fan_out < 1) throw DataError("DenseNetwork: widths must be positive");
        Layer layer;
        layer.w.resize(fan_out, fan_in);
        const double limit = std::sqrt(6.0 / fan_in);
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (int r = 0; r < fan_out; ++r)
            for (int c = 0; c < fan_in; ++c) layer.w(r, c) = dist(rng);
        layer.act = (l + 2 < widths.size()) ? Activation::LeakyRelu : final_act;
        // Small positive bias keeps leaky units in their active region at
        // the start of training.
        layer.b = Eigen::VectorXd::Constant(fan_out,
                                            layer.act == Activation::LeakyRelu ? 0.01 : 0.0);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

std::size_t DenseNetwork::parameter_count() const {
    std::size_t n = 0;
    for (const auto& l : layers) n += static_cast<std::size_t>(l.w.size()) + l.b.size();
    return n;
}

namespace {

Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& z, Activation act) {
    if (act == Activation::Linear) return z;
    return z.unaryExpr([](double v) { return v > 0.0 ? v : kLeakyReluSlope * v; });
}

Eigen::MatrixXd activation_gradient(const Eigen::MatrixXd& z, Activation act) {
    if (act == Activation::Linear) return Eigen::MatrixXd::Ones(z.rows(), z.cols());
    return z.unaryExpr([](double v) { return v > 0.0 ? 1.0 : kLeakyReluSlope; });
}

}  // namespace

ForwardCache forward(const DenseNetwork& net, const Eigen::MatrixXd& x) {
    if (x.cols() != net.input_size())
        throw DataError("forward: input has " + std::to_string(x.cols()) + " columns, network expects " +
                        std::to_string(net.input_size()));
    ForwardCache cache;
    cache.input = x;
    const Eigen::MatrixXd* cur = &cache.input;
    for (const auto& layer : net.layers) {
        Eigen::MatrixXd z = (*cur * layer.w.transpose()).rowwise() + layer.b.transpose();
        cache.pre.push_back(z);
        cache.post.push_back(apply_activation(z, layer.act));
        cur = &cache.post.back();
    }
    return cache;
}

Eigen::MatrixXd predict(const DenseNetwork& net, const Eigen::MatrixXd& x) {
    if (x.cols() != net.input_size()) throw DataError("predict: input width mismatch");
    Eigen::MatrixXd cur = x;
    for (const auto& layer : net.layers)
        cur = apply_activation((cur * layer.w.transpose()).rowwise() + layer.b.transpose(), layer.act);
    return cur;
}

Gradients backward(const DenseNetwork& net, const ForwardCache& cache,
                   const Eigen::MatrixXd& output_gradient) {
    const std::size_t n_layers = net.layers.size();
    if (cache.pre.size() != n_layers)
        throw DataError("backward: cache does not match network depth");
    if (output_gradient.rows() != cache.output().rows() ||
        output_gradient.cols() != cache.output().cols())
        throw DataError("backward: output gradient shape mismatch");

    Gradients g;
    g.dw.resize(n_layers);
    g.db.resize(n_layers);
    Eigen::MatrixXd delta = output_gradient;
    for (std::size_t li = n_layers; li-- > 0;) {
        const auto& layer = net.layers[li];
        delta = delta.cwiseProduct(activation_gradient(cache.pre[li], layer.act));
        const Eigen::MatrixXd& in = li == 0 ? cache.input : cache.post[li - 1];
        g.dw[li] = delta.transpose() * in;
        g.db[li] = delta.colwise().sum();
        delta = delta * layer.w;  // becomes gradient w.r.t. the layer input
    }
    g.dinput = std::move(delta);
    return g;
}

std::pair<double, Eigen::MatrixXd> mse_loss(const Eigen::MatrixXd& pred,
                                            const Eigen::MatrixXd& target) {
    if (pred.rows() != target.rows() || pred.cols() != target.cols())
        throw DataError("mse_loss: shape mismatch");
    const double count = static_cast<double>(pred.size());
    Eigen::MatrixXd diff = pred - target;
    const double loss = diff.squaredNorm() / count;
    return {loss, (2.0 / count) * diff};
}

AdamState AdamState::for_network(const DenseNetwork& net, double lr) {
    AdamState s;
    s.lr = lr;
    for (const auto& layer : net.layers) {
        s.m_w.push_back(Eigen::MatrixXd::Zero(layer.w.rows(), layer.w.cols()));
        s.v_w.push_back(Eigen::MatrixXd::Zero(layer.w.rows(), layer.w.cols()));
        s.m_b.push_back(Eigen::VectorXd::Zero(layer.b.size()));
        s.v_b.push_back(Eigen::VectorXd::Zero(layer.b.size()));
    }
    return s;
}

namespace {

template <typename T>
void adam_update(T& param, const T& grad, T& m, T& v, const AdamState& s, double bc1, double bc2) {
    m = s.beta1 * m + (1.0 - s.beta1) * grad;
    v = s.beta2 * v + (1.0 - s.beta2) * grad.cwiseProduct(grad);
    param.array() -= s.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + s.epsilon);
}

}  // namespace

void adam_step(DenseNetwork& net, const Gradients& grads, AdamState& state) {
    if (grads.dw.size() != net.layers.size())
        throw DataError("adam_step: gradient count does not match network");
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        adam_update(net.layers[l].w, grads.dw[l], state.m_w[l], state.v_w[l], state, bc1, bc2);
        adam_update(net.layers[l].b, grads.db[l], state.m_b[l], state.v_b[l], state, bc1, bc2);
    }
}

Autoencoder Autoencoder::make(const std::vector<int>& encoder_widths, std::uint64_t seed) {
    if (encoder_widths.size() < 2) throw DataError("Autoencoder: need at least two widths");
    std::vector<int> decoder_widths(encoder_widths.rbegin(), encoder_widths.rend());
    Autoencoder ae;
    ae.encoder = DenseNetwork::make(encoder_widths, seed, Activation::LeakyRelu);
    ae.decoder = DenseNetwork::make(decoder_widths, seed ^ 0x9e3779b97f4a7c15ull);
    return ae;
}

Eigen::VectorXd reconstruction_losses(const Autoencoder& ae, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd recon = ae.reconstruct(x);
    return (recon - x).array().square().rowwise().mean();
}

AeTrainLog train_autoencoder(Autoencoder& ae, const Eigen::MatrixXd& train,
                             const Eigen::MatrixXd& val, const AeTrainConfig& config,
                             std::ostream* log) {
    if (train.rows() < 1) throw DataError("train_autoencoder: empty training data");
    std::mt19937_64 rng(config.seed);
    AdamState enc_state = AdamState::for_network(ae.encoder, config.lr);
    AdamState dec_state = AdamState::for_network(ae.decoder, config.lr);

    const Eigen::Index n = train.rows();
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);

    AeTrainLog out;
    double best_val = std::numeric_limits<double>::infinity();
    int stale = 0;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        Eigen::Index covered = 0;
        for (Eigen::Index start = 0; start < n; start += config.batch_size) {
            const Eigen::Index size = std::min<Eigen::Index>(config.batch_size, n - start);
            Eigen::MatrixXd batch(size, train.cols());
            for (Eigen::Index i = 0; i < size; ++i) batch.row(i) = train.row(order[start + i]);

            ForwardCache enc_cache = forward(ae.encoder, batch);
            ForwardCache dec_cache = forward(ae.decoder, enc_cache.output());
            auto [loss, dloss] = mse_loss(dec_cache.output(), batch);
            if (!std::isfinite(loss))
                throw NumericError("train_autoencoder: non-finite loss at epoch " +
                                   std::to_string(epoch));
            Gradients dec_grads = backward(ae.decoder, dec_cache, dloss);
            Gradients enc_grads = backward(ae.encoder, enc_cache, dec_grads.dinput);
            adam_step(ae.decoder, dec_grads, dec_state);
            adam_step(ae.encoder, enc_grads, enc_state);
            epoch_loss += loss * static_cast<double>(size);
            covered += size;
        }
        out.train_mse.push_back(epoch_loss / static_cast<double>(covered));

        double val_mse = out.train_mse.back();
        if (val.rows() > 0) val_mse = reconstruction_losses(ae, val).mean();
        out.val_mse.push_back(val_mse);
        out.epochs_run = epoch + 1;
        if (log)
            *log << "{\"epoch\":" << epoch << ",\"train_mse\":" << out.train_mse.back()
                 << ",\"val_mse\":" << val_mse << "}\n";

        if (val_mse < best_val - config.min_delta) {
            best_val = val_mse;
            stale = 0;
        } else if (++stale >= config.patience) {
            break;
        }
    }
    return out;
}

}  // namespace zdt
