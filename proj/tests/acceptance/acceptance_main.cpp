// Acceptance suite: runs the project's exit criteria and prints one
// PASS/FAIL line per criterion. Usage: zdt_acceptance [criterion...]
// (no arguments runs everything). Returns nonzero if any selected
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "zdt/eval.hpp"
#include "zdt/features.hpp"
#include "zdt/pipeline.hpp"
#include "zdt/scaling.hpp"
#include "zdt/triplet.hpp"

using namespace zdt;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << (detail.str().empty() ? "" : "; ") << what;
        }
    }
    void note(const std::string& what) {
        detail << (detail.str().empty() ? "" : "; ") << what;
    }
};

// The ~50k-flow 4-class dataset used by the trend criteria.
SyntheticConfig standard_dataset_config() {
    SyntheticConfig cfg;  // defaults: 400 hosts, 30k benign, 6k/6k/6k/2k attacks
    cfg.seed = 1234;
    return cfg;
}

SyntheticConfig small_dataset_config(std::uint64_t seed) {
    SyntheticConfig cfg;
    cfg.host_count = 80;
    cfg.counts = {{"benign", 2500}, {"scanning", 500}, {"botnet", 500}, {"exfil", 500}, {"c2", 260}};
    cfg.seed = seed;
    return cfg;
}

double max_rel_err(double analytic, double numeric) {
    const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    return std::abs(analytic - numeric) / denom;
}

// ---------------------------------------------------------------------
// 1. Gradient correctness
// ---------------------------------------------------------------------
bool criterion_gradients(Check& c) {
    const auto started = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<int> dim(3, 8);
        std::normal_distribution<double> unit(0.0, 1.0);

        // Network parameter + input gradients under a linear readout loss.
        const std::vector<int> widths = {dim(rng), dim(rng), dim(rng)};
        DenseNetwork net = DenseNetwork::make(widths, rng());
        Eigen::MatrixXd x(3, widths.front()), w(3, widths.back());
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = unit(rng);
        for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = unit(rng);
        auto loss_of = [&] { return predict(net, x).cwiseProduct(w).sum(); };
        ForwardCache cache = forward(net, x);
        Gradients g = backward(net, cache, w);
        const double h = 1e-5;
        auto probe = [&](double& p, double analytic) {
            const double keep = p;
            p = keep + h;
            const double up = loss_of();
            p = keep - h;
            const double down = loss_of();
            p = keep;
            worst = std::max(worst, max_rel_err(analytic, (up - down) / (2 * h)));
        };
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            for (Eigen::Index i = 0; i < net.layers[l].w.size(); ++i)
                probe(net.layers[l].w.data()[i], g.dw[l].data()[i]);
            for (Eigen::Index i = 0; i < net.layers[l].b.size(); ++i)
                probe(net.layers[l].b.data()[i], g.db[l].data()[i]);
        }
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double keep = x.data()[i];
            x.data()[i] = keep + h;
            const double up = loss_of();
            x.data()[i] = keep - h;
            const double down = loss_of();
            x.data()[i] = keep;
            worst = std::max(worst, max_rel_err(g.dinput.data()[i], (up - down) / (2 * h)));
        }

        // Triplet-loss gradients, away from the hinge kink.
        Eigen::VectorXd za(4), zp(4), zn(4);
        double alpha = 0.5;
        do {
            for (int i = 0; i < 4; ++i) {
                za(i) = unit(rng);
                zp(i) = unit(rng);
                zn(i) = unit(rng);
            }
        } while (std::abs((za - zp).squaredNorm() - (za - zn).squaredNorm() + alpha) < 1e-2);
        TripletGrads tg = triplet_loss(za, zp, zn, alpha);
        auto tl = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& p, const Eigen::VectorXd& n) {
            return triplet_loss(a, p, n, alpha).loss;
        };
        for (int i = 0; i < 4; ++i) {
            Eigen::VectorXd u, d;
            u = za; d = za; u(i) += h; d(i) -= h;
            worst = std::max(worst, max_rel_err(tg.d_anchor(i), (tl(u, zp, zn) - tl(d, zp, zn)) / (2 * h)));
            u = zp; d = zp; u(i) += h; d(i) -= h;
            worst = std::max(worst, max_rel_err(tg.d_positive(i), (tl(za, u, zn) - tl(za, d, zn)) / (2 * h)));
            u = zn; d = zn; u(i) += h; d(i) -= h;
            worst = std::max(worst, max_rel_err(tg.d_negative(i), (tl(za, zp, u) - tl(za, zp, d)) / (2 * h)));
        }

        // Combined-loss gradients for every encoder/decoder parameter.
        Autoencoder ae = Autoencoder::make({5, 4, 3}, rng());
        Eigen::MatrixXd data(9, 5);
        for (Eigen::Index i = 0; i < data.size(); ++i) data.data()[i] = unit(rng);
        TripletBatch batch;
        batch.anchor = {0, 3, 6};
        batch.positive = {1, 4, 7};
        batch.negative = {2, 5, 8};
        batch.anchor_class = {0, 1, 2};
        const double beta = 0.8, gamma = 1.2;
        CombinedLoss cl = combined_loss_step(ae, batch, data, alpha, beta, gamma);
        auto total = [&] { return combined_loss_step(ae, batch, data, alpha, beta, gamma).total; };
        auto probe2 = [&](double& p, double analytic) {
            const double keep = p;
            p = keep + h;
            const double up = total();
            p = keep - h;
            const double down = total();
            p = keep;
            worst = std::max(worst, max_rel_err(analytic, (up - down) / (2 * h)));
        };
        for (std::size_t l = 0; l < ae.encoder.layers.size(); ++l) {
            for (Eigen::Index i = 0; i < ae.encoder.layers[l].w.size(); ++i)
                probe2(ae.encoder.layers[l].w.data()[i], cl.encoder.dw[l].data()[i]);
            for (Eigen::Index i = 0; i < ae.encoder.layers[l].b.size(); ++i)
                probe2(ae.encoder.layers[l].b.data()[i], cl.encoder.db[l].data()[i]);
        }
        for (std::size_t l = 0; l < ae.decoder.layers.size(); ++l)
            for (Eigen::Index i = 0; i < ae.decoder.layers[l].w.size(); ++i)
                probe2(ae.decoder.layers[l].w.data()[i], cl.decoder.dw[l].data()[i]);
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    c.note("max rel err " + std::to_string(worst));
    c.note("runtime " + std::to_string(seconds) + "s");
    c.expect(worst < 1e-4, "gradient mismatch above 1e-4");
    c.expect(seconds < 30.0, "runtime exceeded 30s");
    return c.ok;
}

// ---------------------------------------------------------------------
// 2. Loss-function unit identities
// ---------------------------------------------------------------------
bool criterion_loss_identities(Check& c) {
    Eigen::VectorXd z(2);
    z << 1.0, -2.0;
    c.expect(triplet_loss(z, z, z, 0.2).loss == 0.2, "equal embeddings must cost alpha exactly");

    Eigen::VectorXd a(2), p(2), n(2);
    a << 0, 0;
    p << 1, 0;
    n << 3, 0;
    c.expect(triplet_loss(a, p, n, 0.2).loss == 0.0, "satisfied margin must cost 0");

    p << 2, 0;
    n << 1, 0;
    c.expect(triplet_loss(a, p, n, 0.5).loss == 3.5, "worked example must equal 3.5");

    c.expect(is_semi_hard(1.0, 1.3, 0.5) == true, "semi-hard band membership");
    c.expect(is_semi_hard(1.0, 0.9, 0.5) == false, "hard negative must be excluded");
    c.expect(is_semi_hard(1.0, 1.6, 0.5) == false, "easy negative must be excluded");
    c.expect(is_semi_hard(1.0, 1.0, 0.5) == false, "lower bound is strict");
    c.expect(is_semi_hard(1.0, 1.5, 0.5) == false, "upper bound is strict");
    return c.ok;
}

// ---------------------------------------------------------------------
// 3. Metric-learning benefit on the holdout protocol
// ---------------------------------------------------------------------
bool criterion_metric_benefit(Check& c) {
    const auto started = std::chrono::steady_clock::now();
    auto records = generate_synthetic_dataset(standard_dataset_config());
    HoldoutConfig cfg;
    cfg.holdout_class = "botnet";
    cfg.seeds = {1, 2, 3, 4, 5};
    auto report = run_holdout_experiment(records, cfg);

    std::map<std::uint64_t, HoldoutRunMetrics> metric, recon;
    for (const auto& run : report.runs)
        (run.mode == "metric" ? metric : recon)[run.seed] = run;

    int wins = 0;
    for (std::uint64_t seed : cfg.seeds) {
        const auto& m = metric.at(seed);
        const auto& r = recon.at(seed);
        const bool recall_ok = m.recall >= r.recall;
        const bool precision_ok = m.precision >= r.precision - 0.05;
        if (recall_ok && precision_ok) ++wins;
        c.note("seed " + std::to_string(seed) + ": metric P/R " + std::to_string(m.precision) +
               "/" + std::to_string(m.recall) + " vs recon " + std::to_string(r.precision) + "/" +
               std::to_string(r.recall));
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    c.note("runtime " + std::to_string(seconds) + "s");
    c.expect(wins >= 4, "metric mode must win on >= 4 of 5 seeds (won " + std::to_string(wins) + ")");
    c.expect(seconds < 600.0, "runtime exceeded 10 minutes");
    return c.ok;
}

// ---------------------------------------------------------------------
// 4. kNN sweep trend
// ---------------------------------------------------------------------
bool criterion_knn_sweep(Check& c) {
    auto records = generate_synthetic_dataset(standard_dataset_config());
    KnnSweepConfig cfg;
    cfg.ks = {1, 2, 5, 10, 20, 50, 100};
    cfg.seeds = {1, 2, 3, 4, 5};
    auto rows = run_knn_sweep(records, cfg);

    std::map<int, std::vector<double>> metric_acc;             // k -> per-seed accuracies
    std::map<std::uint64_t, std::map<int, double>> by_seed_m, by_seed_r;
    for (const auto& row : rows) {
        if (row.mode == "metric") {
            metric_acc[row.k].push_back(row.accuracy);
            by_seed_m[row.seed][row.k] = row.accuracy;
        } else {
            by_seed_r[row.seed][row.k] = row.accuracy;
        }
    }

    for (int k : {1, 2, 5, 10}) {
        double mean = 0.0;
        for (double a : metric_acc[k]) mean += a;
        mean /= static_cast<double>(metric_acc[k].size());
        c.note("metric k=" + std::to_string(k) + " mean acc " + std::to_string(mean));
        c.expect(mean >= 0.90, "metric accuracy below 0.90 at k=" + std::to_string(k));
    }

    int wins = 0;
    for (std::uint64_t seed : cfg.seeds) {
        const double drop_m = by_seed_m[seed][5] - by_seed_m[seed][100];
        const double drop_r = by_seed_r[seed][5] - by_seed_r[seed][100];
        if (drop_m < drop_r) ++wins;
        c.note("seed " + std::to_string(seed) + " drop metric " + std::to_string(drop_m) +
               " vs recon " + std::to_string(drop_r));
    }
    c.expect(wins >= 4, "metric-mode k=5->100 drop must be smaller in >= 4 of 5 seeds (won " +
                            std::to_string(wins) + ")");
    return c.ok;
}

// ---------------------------------------------------------------------
// 5. AD separability
// ---------------------------------------------------------------------
bool criterion_ad_separability(Check& c) {
    auto records = generate_synthetic_dataset(standard_dataset_config());
    auto artifacts = compute_graph_artifacts(records, 1);
    Eigen::MatrixXd features = build_feature_matrix(records, artifacts);

    std::vector<std::size_t> benign_rows, attack_rows;
    for (std::size_t i = 0; i < records.size(); ++i)
        (records[i].benign() ? benign_rows : attack_rows).push_back(i);

    std::mt19937_64 rng(99);
    std::shuffle(benign_rows.begin(), benign_rows.end(), rng);
    const std::size_t n_eval = benign_rows.size() / 4;
    Eigen::MatrixXd benign_eval(n_eval, features.cols());
    Eigen::MatrixXd benign_train(benign_rows.size() - n_eval, features.cols());
    for (std::size_t i = 0; i < n_eval; ++i) benign_eval.row(i) = features.row(benign_rows[i]);
    for (std::size_t i = n_eval; i < benign_rows.size(); ++i)
        benign_train.row(i - n_eval) = features.row(benign_rows[i]);
    Eigen::MatrixXd anomalies(attack_rows.size(), features.cols());
    for (std::size_t i = 0; i < attack_rows.size(); ++i)
        anomalies.row(i) = features.row(attack_rows[i]);

    AdTrainConfig cfg;
    cfg.seed = 7;
    AnomalyDetector ad = train_anomaly_detector(benign_train, cfg);

    Eigen::VectorXd s_benign = reconstruction_losses(ad.net, transform_minmax(benign_eval, ad.scaler));
    Eigen::VectorXd s_attack = reconstruction_losses(ad.net, transform_minmax(anomalies, ad.scaler));
    std::vector<double> scores;
    std::vector<bool> truth;
    for (Eigen::Index i = 0; i < s_benign.size(); ++i) {
        scores.push_back(s_benign(i));
        truth.push_back(false);
    }
    for (Eigen::Index i = 0; i < s_attack.size(); ++i) {
        scores.push_back(s_attack(i));
        truth.push_back(true);
    }
    const double auc = roc_auc(scores, truth);
    c.note("AUC " + std::to_string(auc));
    c.expect(auc >= 0.95, "benign vs anomaly AUC below 0.95");

    long flagged = 0;
    for (Eigen::Index i = 0; i < s_benign.size(); ++i)
        if (s_benign(i) > ad.threshold) ++flagged;
    const double rate = static_cast<double>(flagged) / static_cast<double>(s_benign.size());
    c.note("benign flag rate " + std::to_string(rate));
    c.expect(rate <= 0.015, "q=0.995 threshold flags more than 1% (+0.5%) of benign validation");
    return c.ok;
}

// ---------------------------------------------------------------------
// 6. Holdout protocol integrity
// ---------------------------------------------------------------------
bool criterion_holdout_integrity(Check& c) {
    auto records = generate_synthetic_dataset(small_dataset_config(31));
    HoldoutConfig cfg;
    cfg.holdout_class = "botnet";
    cfg.seeds = {1, 2};
    cfg.ad.train.epochs = 10;
    cfg.nd.epochs = 10;
    auto report = run_holdout_experiment(records, cfg);
    c.expect(!report.runs.empty(), "no runs produced");
    for (const auto& run : report.runs) {
        c.expect(run.eval_holdout_fraction < 0.02,
                 "eval holdout fraction " + std::to_string(run.eval_holdout_fraction) + " >= 2%");
        c.expect(run.eval_holdout_fraction > 0.0, "eval set lost its holdout rows entirely");
        c.expect(run.nd_train_holdout_rows == 0, "holdout rows leaked into ND training");
    }
    return c.ok;
}

// ---------------------------------------------------------------------
// 7. CATA determinism and correctness
// ---------------------------------------------------------------------
bool criterion_cata(Check& c) {
    Eigen::MatrixXd ref(5, 2);
    ref << 0, 0, 0.1, 0, 0, 0.1, 1, 0, 1.1, 0;
    std::vector<int> classes = {0, 0, 0, 1, 1};
    Eigen::VectorXd q1(2), q2(2);
    q1 << 0.05, 0.05;
    q2 << 0.55, 0.0;

    auto [c1, p1] = cata(q1, ref, classes, 3);
    c.expect(c1 == 0 && p1 == 1.0, "worked kNN example (k=3) mismatch");
    auto [c2, p2] = cata(q2, ref, classes, 5);
    c.expect(c2 == 0 && std::abs(p2 - 0.6) < 1e-12, "worked kNN example (k=5) mismatch");
    auto [c3, p3] = cata(q1, ref, classes, 1);
    c.expect(c3 == 0 && p3 == 1.0, "k=1 nearest-neighbor example mismatch");
    {
        // Exact distance tie (both neighbors at distance 1) resolves to the
        // lower reference index.
        Eigen::MatrixXd tie_ref(2, 1);
        tie_ref << 0.0, 2.0;
        Eigen::VectorXd tie_q(1);
        tie_q << 1.0;
        auto [ct, pt] = cata(tie_q, tie_ref, {1, 0}, 1);
        c.expect(ct == 1 && pt == 1.0, "distance tie must resolve to the lower index");
    }
    auto again = cata(q2, ref, classes, 5);
    c.expect(again.first == c2 && again.second == p2, "cata must be deterministic");

    auto records = generate_synthetic_dataset(small_dataset_config(57));
    HoldoutConfig cfg;
    cfg.holdout_class = "botnet";
    cfg.seeds = {1};
    cfg.ad.train.epochs = 10;
    cfg.nd.epochs = 10;
    auto report = run_holdout_experiment(records, cfg);
    auto report2 = run_holdout_experiment(records, cfg);
    for (const auto& run : report.runs) {
        if (run.cata_distribution.empty()) continue;
        double total = 0.0;
        for (const auto& [cls, p] : run.cata_distribution) total += p;
        c.expect(std::abs(total - 1.0) < 1e-9, "CATA distribution must sum to 1");
    }
    c.expect(report.runs.size() == report2.runs.size(), "rerun changed shape");
    for (std::size_t i = 0; i < report.runs.size(); ++i)
        c.expect(report.runs[i].cata_distribution == report2.runs[i].cata_distribution,
                 "CATA distribution must be deterministic");

    std::ostringstream cata_csv;
    write_cata_distribution_csv(cata_csv, report);
    c.expect(cata_csv.str().rfind("holdout,predicted_class,probability\n", 0) == 0,
             "CATA csv header mismatch");
    std::istringstream lines(cata_csv.str());
    std::string line;
    std::getline(lines, line);
    int rows = 0;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        ++rows;
        c.expect(line.rfind("botnet,", 0) == 0, "CATA csv rows must lead with the holdout class");
    }
    c.expect(rows > 0, "CATA csv has no rows");
    return c.ok;
}

// ---------------------------------------------------------------------
// 8. Yeo-Johnson
// ---------------------------------------------------------------------
bool criterion_yeo_johnson(Check& c) {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> xs(-30.0, 30.0);
    for (int i = 0; i < 50; ++i) {
        const double x = xs(rng);
        c.expect(std::abs(yeo_johnson(x, 1.0) - x) < 1e-9, "lambda=1 must be the identity");
    }
    c.expect(std::abs(yeo_johnson(std::exp(1.0) - 1.0, 0.0) - 1.0) < 1e-12,
             "lambda=0 log case mismatch");
    c.expect(std::abs(yeo_johnson(-(std::exp(1.0) - 1.0), 2.0) + 1.0) < 1e-12,
             "lambda=2 negative log case mismatch");

    std::uniform_real_distribution<double> lams(-5.0, 5.0);
    for (int i = 0; i < 1000; ++i) {
        const double lam = lams(rng);
        double lo = xs(rng), hi = xs(rng);
        if (lo > hi) std::swap(lo, hi);
        if (lo == hi) continue;
        c.expect(yeo_johnson(lo, lam) < yeo_johnson(hi, lam), "monotonicity violated");
        if (!c.ok) break;
    }

    std::normal_distribution<double> normal(0.0, 1.0);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        std::mt19937_64 gen(seed);
        Eigen::VectorXd col(3000);
        for (Eigen::Index i = 0; i < col.size(); ++i) col(i) = std::exp(normal(gen));
        const double lambda = fit_yeo_johnson_lambda(col);
        Eigen::VectorXd transformed(col.size());
        for (Eigen::Index i = 0; i < col.size(); ++i) transformed(i) = yeo_johnson(col(i), lambda);
        auto skew = [](const Eigen::VectorXd& v) {
            const double mean = v.mean();
            const double m2 = (v.array() - mean).square().mean();
            const double m3 = (v.array() - mean).cube().mean();
            return m3 / std::pow(m2, 1.5);
        };
        c.expect(std::abs(skew(transformed)) < std::abs(skew(col)),
                 "fitted lambda must reduce log-normal skewness");
    }
    return c.ok;
}

// ---------------------------------------------------------------------
// 9. End-to-end determinism through the CLI
// ---------------------------------------------------------------------
bool criterion_determinism(Check& c) {
    const fs::path dir = fs::temp_directory_path() / "zdt_acceptance_det";
    fs::remove_all(dir);
    fs::create_directories(dir);

    auto run = [&](const std::string& args) {
        const std::string cmd = std::string(ZDT_CLI_PATH) + " " + args + " > " +
                                (dir / "log.txt").string() + " 2>&1";
        return std::system(cmd.c_str()) == 0;
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };

    for (int round : {1, 2}) {
        const fs::path flows = dir / ("flows" + std::to_string(round) + ".csv");
        const fs::path ad = dir / ("ad" + std::to_string(round) + ".bundle");
        const fs::path model = dir / ("model" + std::to_string(round) + ".bundle");
        const fs::path verdicts = dir / ("verdicts" + std::to_string(round) + ".csv");
        bool ok = run("synth --out " + flows.string() +
                      " --seed 7 --hosts 80 --benign 3000 --scanning 600 --botnet 600 --exfil 600 "
                      "--c2 300") &&
                  run("train-ad --in " + flows.string() + " --out " + ad.string() +
                      " --seed 11 --epochs 10") &&
                  run("train-nd --in " + flows.string() + " --ad " + ad.string() + " --out " +
                      model.string() + " --seed 11 --epochs 10") &&
                  run("score --bundle " + model.string() + " --in " + flows.string() + " --out " +
                      verdicts.string());
        c.expect(ok, "CLI round " + std::to_string(round) + " failed: " + slurp(dir / "log.txt"));
        if (!ok) return c.ok;
    }
    c.expect(slurp(dir / "flows1.csv") == slurp(dir / "flows2.csv"), "synth output differs");
    c.expect(slurp(dir / "model1.bundle") == slurp(dir / "model2.bundle"),
             "bundle bytes differ between identical runs");
    c.expect(slurp(dir / "verdicts1.csv") == slurp(dir / "verdicts2.csv"),
             "verdict csv differs between identical runs");
    fs::remove_all(dir);
    return c.ok;
}

// ---------------------------------------------------------------------
// 10. Latent-collapse diagnostic
// ---------------------------------------------------------------------
bool criterion_collapse(Check& c) {
    // Engineered collapse: two classes on a near-one-dimensional input
    // manifold, a tiny net, and an overwhelming triplet weight. One latent
    // direction suffices to separate the classes; the remaining latent
    // units starve of gradient and die in the flat leaky-ReLU region.
    std::mt19937_64 rng(5);
    std::normal_distribution<double> noise(0.0, 1.0);
    const int per_class = 300;
    Eigen::MatrixXd data(2 * per_class, 24);
    std::vector<int> classes(2 * per_class);
    for (int i = 0; i < per_class; ++i) {
        const double t_a = 0.05 * noise(rng);
        const double t_b = 3.0 + 0.05 * noise(rng);
        for (int j = 0; j < 24; ++j) {
            data(i, j) = t_a + 0.01 * noise(rng);
            data(per_class + i, j) = t_b + 0.01 * noise(rng);
        }
        classes[i] = 0;
        classes[per_class + i] = 1;
    }
    NdTrainConfig collapse_cfg;
    collapse_cfg.encoder_widths = {24, 8, 5};
    collapse_cfg.gamma = 1e3;
    collapse_cfg.epochs = 100;
    collapse_cfg.seed = 3;
    auto collapsed = train_novelty_detector(data, classes, 2, collapse_cfg);
    const int collapsed_dims = collapsed.history.back().active_dims;
    c.note("engineered run active dims " + std::to_string(collapsed_dims));
    c.expect(collapsed_dims < 5, "engineered run failed to collapse");
    c.expect(collapsed.collapse_warning, "collapse warning was not raised");

    // Normal run: the standard 4-class dataset keeps all 5 dimensions.
    auto records = generate_synthetic_dataset(standard_dataset_config());
    auto artifacts = compute_graph_artifacts(records, 1);
    Eigen::MatrixXd features = build_feature_matrix(records, artifacts);
    std::map<std::string, int> class_ids;
    std::vector<std::size_t> attack_rows;
    std::vector<int> attack_cls;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].benign()) continue;
        auto [it, inserted] = class_ids.emplace(records[i].label, class_ids.size());
        attack_rows.push_back(i);
        attack_cls.push_back(it->second);
    }
    Eigen::MatrixXd attacks(attack_rows.size(), features.cols());
    for (std::size_t i = 0; i < attack_rows.size(); ++i)
        attacks.row(i) = features.row(attack_rows[i]);
    auto scaler = fit_nd_normalizer(attacks);
    NdTrainConfig normal_cfg;
    normal_cfg.seed = 3;
    auto normal = train_novelty_detector(transform_nd(attacks, scaler), attack_cls,
                                         static_cast<int>(class_ids.size()), normal_cfg);
    const int normal_dims = normal.history.back().active_dims;
    c.note("normal run active dims " + std::to_string(normal_dims));
    c.expect(normal_dims == 5, "normal run must report 5 active dimensions at convergence");
    return c.ok;
}

struct Criterion {
    int id;
    std::string name;
    std::function<bool(Check&)> fn;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "gradient-correctness", criterion_gradients},
        {2, "loss-identities", criterion_loss_identities},
        {3, "metric-learning-benefit", criterion_metric_benefit},
        {4, "knn-sweep-trend", criterion_knn_sweep},
        {5, "ad-separability", criterion_ad_separability},
        {6, "holdout-integrity", criterion_holdout_integrity},
        {7, "cata", criterion_cata},
        {8, "yeo-johnson", criterion_yeo_johnson},
        {9, "end-to-end-determinism", criterion_determinism},
        {10, "collapse-diagnostic", criterion_collapse},
    };

    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failures = 0;
    for (const auto& criterion : criteria) {
        if (!selected.empty() && !selected.count(criterion.id)) continue;
        Check check;
        const auto started = std::chrono::steady_clock::now();
        bool ok = false;
        try {
            ok = criterion.fn(check);
        } catch (const std::exception& e) {
            check.expect(false, std::string("exception: ") + e.what());
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << criterion.id << " "
                  << criterion.name << " (" << seconds << "s)";
        if (!check.detail.str().empty()) std::cout << " -- " << check.detail.str();
        std::cout << "\n";
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
