#include "zdt/triplet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

namespace zdt {

TripletGrads triplet_loss(const Eigen::VectorXd& anchor, const Eigen::VectorXd& positive,
                          const Eigen::VectorXd& negative, double alpha) {
    if (anchor.size() != positive.size() || anchor.size() != negative.size())
        throw DataError("triplet_loss: latent dimension mismatch");
    TripletGrads g;
    const Eigen::VectorXd ap = anchor - positive;
    const Eigen::VectorXd an = anchor - negative;
    const double value = ap.squaredNorm() - an.squaredNorm() + alpha;
    if (value > 0.0) {
        g.loss = value;
        g.d_anchor = 2.0 * (negative - positive);
        g.d_positive = -2.0 * ap;
        g.d_negative = 2.0 * an;
    } else {
        g.loss = 0.0;
        g.d_anchor = Eigen::VectorXd::Zero(anchor.size());
        g.d_positive = Eigen::VectorXd::Zero(anchor.size());
        g.d_negative = Eigen::VectorXd::Zero(anchor.size());
    }
    return g;
}

bool is_semi_hard(double d_ap, double d_an, double alpha) {
    return d_ap < d_an && d_an < d_ap + alpha;
}

TripletBatch mine_round_robin(const Eigen::MatrixXd& embeddings,
                              const std::vector<std::vector<int>>& class_members, int batch_size,
                              double alpha, std::mt19937_64& rng) {
    const int num_classes = static_cast<int>(class_members.size());
    if (num_classes < 2) throw DataError("mine_round_robin: need at least 2 classes");
    for (int c = 0; c < num_classes; ++c)
        if (class_members[c].size() < 2)
            throw DataError("mine_round_robin: class " + std::to_string(c) +
                            " has fewer than 2 examples");

    // Seeded, but fixed for the whole batch: pairs are visited cyclically so
    // anchor counts per ordered pair differ by at most one.
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < num_classes; ++a)
        for (int n = 0; n < num_classes; ++n)
            if (a != n) pairs.push_back({a, n});
    std::shuffle(pairs.begin(), pairs.end(), rng);

    TripletBatch batch;
    batch.anchor.reserve(batch_size);
    std::size_t pair_idx = 0;
    while (static_cast<int>(batch.size()) < batch_size) {
        const auto [ac, nc] = pairs[pair_idx];
        pair_idx = (pair_idx + 1) % pairs.size();

        const auto& anchors = class_members[ac];
        const auto& negatives = class_members[nc];

        std::uniform_int_distribution<std::size_t> pick_a(0, anchors.size() - 1);
        const std::size_t ai = pick_a(rng);
        std::uniform_int_distribution<std::size_t> pick_p(0, anchors.size() - 2);
        std::size_t pi = pick_p(rng);
        if (pi >= ai) ++pi;  // uniform over the class minus the anchor
        const int anchor = anchors[ai];
        const int positive = anchors[pi];

        const double d_ap = (embeddings.row(anchor) - embeddings.row(positive)).norm();

        // Semi-hard candidates; fallback: nearest candidate beyond d_ap.
        std::vector<int> semi_hard;
        int hardest_easy = -1;
        double hardest_easy_dist = std::numeric_limits<double>::infinity();
        for (int cand : negatives) {
            const double d_an = (embeddings.row(anchor) - embeddings.row(cand)).norm();
            if (is_semi_hard(d_ap, d_an, alpha)) semi_hard.push_back(cand);
            if (d_an > d_ap && d_an < hardest_easy_dist) {
                hardest_easy_dist = d_an;
                hardest_easy = cand;
            }
        }
        int negative;
        if (!semi_hard.empty()) {
            std::uniform_int_distribution<std::size_t> pick_n(0, semi_hard.size() - 1);
            negative = semi_hard[pick_n(rng)];
        } else if (hardest_easy >= 0) {
            negative = hardest_easy;
        } else {
            std::uniform_int_distribution<std::size_t> pick_n(0, negatives.size() - 1);
            negative = negatives[pick_n(rng)];
        }

        batch.anchor.push_back(anchor);
        batch.positive.push_back(positive);
        batch.negative.push_back(negative);
        batch.anchor_class.push_back(ac);
    }
    return batch;
}

CombinedLoss combined_loss_step(const Autoencoder& ae, const TripletBatch& batch,
                                const Eigen::MatrixXd& data, double alpha, double beta,
                                double gamma) {
    const int b = static_cast<int>(batch.size());
    if (b == 0) throw DataError("combined_loss_step: empty batch");
    const int dim = static_cast<int>(data.cols());

    // One encoder pass over the concatenated anchor/positive/negative rows.
    Eigen::MatrixXd stacked(3 * b, dim);
    for (int i = 0; i < b; ++i) {
        stacked.row(i) = data.row(batch.anchor[i]);
        stacked.row(b + i) = data.row(batch.positive[i]);
        stacked.row(2 * b + i) = data.row(batch.negative[i]);
    }
    ForwardCache enc_cache = forward(ae.encoder, stacked);
    const Eigen::MatrixXd& latent = enc_cache.output();

    // Reconstruction on the anchors only.
    ForwardCache dec_cache = forward(ae.decoder, latent.topRows(b));
    auto [recon, d_recon] = mse_loss(dec_cache.output(), stacked.topRows(b));

    CombinedLoss out;
    out.reconstruction = recon;

    Gradients dec_grads = backward(ae.decoder, dec_cache, beta * d_recon);
    // d(total)/d(latent): reconstruction path for anchors, triplet path for
    // all three roles.
    Eigen::MatrixXd d_latent = Eigen::MatrixXd::Zero(3 * b, latent.cols());
    d_latent.topRows(b) = dec_grads.dinput;

    double triplet_sum = 0.0;
    const double scale = gamma / static_cast<double>(b);
    for (int i = 0; i < b; ++i) {
        TripletGrads g = triplet_loss(latent.row(i).transpose(), latent.row(b + i).transpose(),
                                      latent.row(2 * b + i).transpose(), alpha);
        triplet_sum += g.loss;
        if (g.loss > 0.0) {
            out.active_triplets += 1;
            out.active_loss_sum += g.loss;
        }
        d_latent.row(i) += scale * g.d_anchor.transpose();
        d_latent.row(b + i) += scale * g.d_positive.transpose();
        d_latent.row(2 * b + i) += scale * g.d_negative.transpose();
    }
    out.triplet = triplet_sum / b;
    out.total = beta * recon + gamma * out.triplet;

    out.encoder = backward(ae.encoder, enc_cache, d_latent);
    out.decoder = std::move(dec_grads);
    return out;
}

std::pair<double, double> auto_balance_weights(double pilot_reconstruction, double pilot_triplet) {
    const double gamma = pilot_reconstruction / std::max(pilot_triplet, 1e-12);
    return {1.0, std::clamp(gamma, 1e-3, 1e3)};
}

int latent_collapse_metric(const Eigen::MatrixXd& latents, double epsilon) {
    if (latents.rows() < 1) throw DataError("latent_collapse_metric: empty latents");
    const Eigen::Index dim = latents.cols();
    Eigen::VectorXd variance(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
        const double mean = latents.col(j).mean();
        variance(j) = (latents.col(j).array() - mean).square().sum() / latents.rows();
    }
    const double threshold = epsilon * variance.sum() / static_cast<double>(dim);
    int active = 0;
    for (Eigen::Index j = 0; j < dim; ++j)
        if (variance(j) > threshold) ++active;
    return active;
}

namespace {

std::vector<std::vector<int>> group_by_class(const std::vector<int>& class_of, int num_classes) {
    std::vector<std::vector<int>> members(num_classes);
    for (std::size_t i = 0; i < class_of.size(); ++i) {
        if (class_of[i] < 0 || class_of[i] >= num_classes)
            throw DataError("train_novelty_detector: class id out of range");
        members[class_of[i]].push_back(static_cast<int>(i));
    }
    return members;
}

}  // namespace

NdTrainResult train_novelty_detector(const Eigen::MatrixXd& data, const std::vector<int>& class_of,
                                     int num_classes, const NdTrainConfig& config,
                                     std::ostream* log) {
    if (data.rows() < 4) throw DataError("train_novelty_detector: not enough data");
    if (static_cast<Eigen::Index>(class_of.size()) != data.rows())
        throw DataError("train_novelty_detector: label count does not match data rows");
    if (num_classes < 2) throw DataError("train_novelty_detector: need at least 2 attack classes");
    const auto members = group_by_class(class_of, num_classes);
    for (int c = 0; c < num_classes; ++c)
        if (members[c].size() < 2)
            throw DataError("train_novelty_detector: class " + std::to_string(c) +
                            " has fewer than 2 examples");

    NdTrainResult result;
    result.net = Autoencoder::make(config.encoder_widths, config.seed);
    std::mt19937_64 rng(config.seed ^ 0x5851f42d4c957f2dull);

    const int n = static_cast<int>(data.rows());
    const int batches_per_epoch = (n + config.batch_size - 1) / config.batch_size;
    const int latent_dim = result.net.latent_size();

    // Pilot pass (no updates) to bring both loss terms to the same scale
    // unless the weights were fixed by the caller.
    double beta = config.beta.value_or(1.0);
    double gamma;
    if (config.gamma.has_value()) {
        gamma = *config.gamma;
    } else {
        // The triplet scale is measured over hinge-active triplets only; a
        // raw mean would shrink toward 0 whenever the initial embeddings
        // happen to satisfy most margins, ballooning gamma past the point
        // where the metric term crushes the latent space.
        Eigen::MatrixXd emb = result.net.encode(data);
        double m0 = 0.0, active_sum = 0.0;
        long active = 0;
        for (int b = 0; b < batches_per_epoch; ++b) {
            TripletBatch tb =
                mine_round_robin(emb, members, config.batch_size, config.margin_alpha, rng);
            CombinedLoss pilot = combined_loss_step(result.net, tb, data, config.margin_alpha,
                                                    /*beta=*/1.0, /*gamma=*/1.0);
            m0 += pilot.reconstruction;
            active_sum += pilot.active_loss_sum;
            active += pilot.active_triplets;
        }
        const double l0 = active > 0 ? active_sum / static_cast<double>(active)
                                     : config.margin_alpha;
        auto [auto_beta, auto_gamma] = auto_balance_weights(m0 / batches_per_epoch, l0);
        if (!config.beta.has_value()) beta = auto_beta;
        gamma = auto_gamma;
    }
    result.beta = beta;
    result.gamma = gamma;

    AdamState enc_state = AdamState::for_network(result.net.encoder, config.lr);
    AdamState dec_state = AdamState::for_network(result.net.decoder, config.lr);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        // Mining distances come from frozen epoch-start embeddings.
        Eigen::MatrixXd emb = result.net.encode(data);
        double recon_sum = 0.0, triplet_sum = 0.0;
        for (int b = 0; b < batches_per_epoch; ++b) {
            TripletBatch tb =
                mine_round_robin(emb, members, config.batch_size, config.margin_alpha, rng);
            CombinedLoss step =
                combined_loss_step(result.net, tb, data, config.margin_alpha, beta, gamma);
            if (!std::isfinite(step.total))
                throw NumericError("train_novelty_detector: non-finite loss at epoch " +
                                   std::to_string(epoch) + ", batch " + std::to_string(b));
            adam_step(result.net.encoder, step.encoder, enc_state);
            adam_step(result.net.decoder, step.decoder, dec_state);
            recon_sum += step.reconstruction;
            triplet_sum += step.triplet;
        }

        NdEpochStats stats;
        stats.epoch = epoch;
        stats.reconstruction = recon_sum / batches_per_epoch;
        stats.triplet = triplet_sum / batches_per_epoch;
        stats.combined = beta * stats.reconstruction + gamma * stats.triplet;
        stats.active_dims =
            latent_collapse_metric(result.net.encode(data), config.collapse_epsilon);
        result.history.push_back(stats);
        if (stats.active_dims < latent_dim) result.collapse_warning = true;
        if (log) {
            *log << "{\"epoch\":" << epoch << ",\"M\":" << stats.reconstruction
                 << ",\"L\":" << stats.triplet << ",\"combined\":" << stats.combined
                 << ",\"active_dims\":" << stats.active_dims << "}";
            if (stats.active_dims < latent_dim)
                *log << "  # warning: latent space collapsed to " << stats.active_dims << "/"
                     << latent_dim << " dimensions";
            *log << "\n";
        }
    }

    result.ref_embeddings = result.net.encode(data);
    result.ref_classes = class_of;
    return result;
}

}  // namespace zdt
