#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "zdt/net.hpp"

namespace zdt {

// Hinge on squared Euclidean norms:
//   max(||zA - zP||^2 - ||zA - zN||^2 + alpha, 0).
// The subgradient at the kink is zero, so inactive triplets are inert.
struct TripletGrads {
    double loss = 0.0;
    Eigen::VectorXd d_anchor, d_positive, d_negative;
};

TripletGrads triplet_loss(const Eigen::VectorXd& anchor, const Eigen::VectorXd& positive,
                          const Eigen::VectorXd& negative, double alpha);

// Semi-hard band on UNsquared Euclidean distances:
//   d(A,P) < d(A,N) < d(A,P) + alpha, both strict.
bool is_semi_hard(double d_ap, double d_an, double alpha);

struct TripletBatch {
    std::vector<int> anchor;
    std::vector<int> positive;
    std::vector<int> negative;
    std::vector<int> anchor_class;

    std::size_t size() const { return anchor.size(); }
};

// Round-robin batch mining: ordered (anchor-class, negative-class) pairs are
// visited one triplet at a time in a seeded cyclic order until batch_size
// triplets exist, so per-pair anchor counts differ by at most one. Negatives
// prefer the semi-hard band; when it is empty the nearest candidate beyond
// d(A,P) is taken, and failing that a uniform draw from the negative class.
TripletBatch mine_round_robin(const Eigen::MatrixXd& embeddings,
                              const std::vector<std::vector<int>>& class_members, int batch_size,
                              double alpha, std::mt19937_64& rng);

struct CombinedLoss {
    double total = 0.0;
    double reconstruction = 0.0;  // anchor-only MSE
    double triplet = 0.0;         // mean over the batch
    int active_triplets = 0;      // hinge-active count
    double active_loss_sum = 0.0;
    Gradients encoder;
    Gradients decoder;
};

// Weighted objective beta * M + gamma * L. Reconstruction is computed on the
// anchors only; the triplets pass through the encoder only, so the decoder
// receives gradients solely from the reconstruction term.
CombinedLoss combined_loss_step(const Autoencoder& ae, const TripletBatch& batch,
                                const Eigen::MatrixXd& data, double alpha, double beta,
                                double gamma);

// beta = 1, gamma = M0 / max(L0, 1e-12) clamped to [1e-3, 1e3]: both loss
// terms start at roughly the same scale.
std::pair<double, double> auto_balance_weights(double pilot_reconstruction, double pilot_triplet);

// Number of latent coordinates whose variance exceeds
// epsilon * (total variance / latent_dim).
int latent_collapse_metric(const Eigen::MatrixXd& latents, double epsilon);

struct NdTrainConfig {
    std::vector<int> encoder_widths = {24, 16, 8, 5};
    double margin_alpha = 0.2;
    std::optional<double> beta;   // unset: auto-balanced from a pilot pass
    std::optional<double> gamma;  // gamma = 0 disables metric learning
    int batch_size = 256;
    int epochs = 50;
    double lr = 1e-3;
    double collapse_epsilon = 0.01;
    std::uint64_t seed = 1;
};

struct NdEpochStats {
    int epoch = 0;
    double reconstruction = 0.0;
    double triplet = 0.0;
    double combined = 0.0;
    int active_dims = 0;
};

struct NdTrainResult {
    Autoencoder net;
    Eigen::MatrixXd ref_embeddings;  // final latent vectors of the training data
    std::vector<int> ref_classes;
    std::vector<NdEpochStats> history;
    double beta = 1.0;
    double gamma = 1.0;
    bool collapse_warning = false;
};

// Trains the novelty detector on ND-normalized attack data. Mining uses
// epoch-start embeddings; per-epoch stats are logged as line-delimited JSON
// records when a log stream is given.
NdTrainResult train_novelty_detector(const Eigen::MatrixXd& data, const std::vector<int>& class_of,
                                     int num_classes, const NdTrainConfig& config,
                                     std::ostream* log = nullptr);

}  // namespace zdt
