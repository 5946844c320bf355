#include "zdt/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <set>

#include "zdt/csv.hpp"

namespace zdt {

PrecisionRecall precision_recall(const std::vector<Verdict>& verdicts,
                                 const std::vector<bool>& truth) {
    if (verdicts.size() != truth.size())
        throw DataError("precision_recall: verdict/truth length mismatch");
    PrecisionRecall pr;
    for (std::size_t i = 0; i < verdicts.size(); ++i) {
        const bool predicted = verdicts[i].category == Category::Zdt;
        if (predicted && truth[i]) ++pr.tp;
        else if (predicted) ++pr.fp;
        else if (truth[i]) ++pr.fn;
        else ++pr.tn;
    }
    pr.no_predicted_positives = pr.tp + pr.fp == 0;
    pr.no_actual_positives = pr.tp + pr.fn == 0;
    pr.precision = pr.no_predicted_positives ? 0.0 : static_cast<double>(pr.tp) / (pr.tp + pr.fp);
    pr.recall = pr.no_actual_positives ? 0.0 : static_cast<double>(pr.tp) / (pr.tp + pr.fn);
    return pr;
}

double roc_auc(const std::vector<double>& scores, const std::vector<bool>& truth) {
    if (scores.size() != truth.size()) throw DataError("roc_auc: score/truth length mismatch");
    const long n_pos = std::count(truth.begin(), truth.end(), true);
    const long n_neg = static_cast<long>(truth.size()) - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw DataError("roc_auc: both classes must be present");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Midranks over tied score groups.
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + j) + 1.0;  // 1-based
        for (std::size_t t = i; t <= j; ++t)
            if (truth[order[t]]) pos_rank_sum += midrank;
        i = j + 1;
    }
    const double u = pos_rank_sum - 0.5 * static_cast<double>(n_pos) * (n_pos + 1);
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

// ---------------------------------------------------------------------------
// Synthetic dataset
// ---------------------------------------------------------------------------

namespace {

std::string host_name(int i) {
    return "10." + std::to_string((i >> 16) & 255) + "." + std::to_string((i >> 8) & 255) + "." +
           std::to_string(i & 255);
}

struct Rng {
    std::mt19937_64 gen;
    explicit Rng(std::uint64_t seed) : gen(seed) {}

    double uniform(double lo, double hi) {
        return std::uniform_real_distribution<double>(lo, hi)(gen);
    }
    long uniform_int(long lo, long hi) {  // inclusive
        return std::uniform_int_distribution<long>(lo, hi)(gen);
    }
    double normal(double mean, double sd) {
        return std::normal_distribution<double>(mean, sd)(gen);
    }
    double lognormal(double mu, double sigma) { return std::exp(normal(mu, sigma)); }

    template <typename T>
    const T& choice(const std::vector<T>& v) {
        return v[static_cast<std::size_t>(uniform_int(0, static_cast<long>(v.size()) - 1))];
    }
};

std::int64_t clamp_bytes(double v) {
    return static_cast<std::int64_t>(std::max(0.0, std::round(v)));
}

}  // namespace

std::vector<FlowRecord> generate_synthetic_dataset(const SyntheticConfig& config) {
    if (config.host_count < 50) throw DataError("generate_synthetic_dataset: need >= 50 hosts");
    static const std::set<std::string> known = {"benign", "scanning", "botnet", "exfil", "c2"};
    for (const auto& [name, count] : config.counts) {
        if (!known.count(name))
            throw DataError("generate_synthetic_dataset: unknown class '" + name + "'");
        if (count < 0) throw DataError("generate_synthetic_dataset: negative count");
    }
    auto count_of = [&](const std::string& name) {
        auto it = config.counts.find(name);
        return it == config.counts.end() ? 0 : it->second;
    };

    Rng rng(config.seed);
    const std::int64_t base_ts = 1700000000;
    const double day = 86400.0;

    std::vector<std::string> hosts(config.host_count);
    for (int i = 0; i < config.host_count; ++i) hosts[i] = host_name(i);
    const int n_servers = std::max(3, config.host_count / 10);
    std::vector<std::string> servers(hosts.begin(), hosts.begin() + n_servers);
    std::vector<std::string> clients(hosts.begin() + n_servers, hosts.end());

    // Zipf-ish server popularity.
    std::vector<double> server_weight(servers.size());
    for (std::size_t i = 0; i < servers.size(); ++i) server_weight[i] = 1.0 / (1.0 + i);
    std::discrete_distribution<int> pick_server(server_weight.begin(), server_weight.end());

    const std::vector<int> benign_ports = {443, 80, 22, 53, 123, 8080, 25, 3306};
    const std::vector<double> benign_port_weight = {40, 25, 8, 15, 4, 4, 2, 2};
    std::discrete_distribution<int> pick_port(benign_port_weight.begin(),
                                              benign_port_weight.end());

    // Compromised/rogue hosts, drawn once per dataset.
    std::vector<std::string> scanner_srcs, bots, exfil_srcs, c2_clients;
    {
        std::vector<std::string> pool = clients;
        std::shuffle(pool.begin(), pool.end(), rng.gen);
        std::size_t cursor = 0;
        auto take = [&](std::size_t n) {
            std::vector<std::string> out(pool.begin() + cursor, pool.begin() + cursor + n);
            cursor += n;
            return out;
        };
        scanner_srcs = take(2);
        const long avail = static_cast<long>(pool.size()) - static_cast<long>(cursor);
        bots = take(static_cast<std::size_t>(std::clamp<long>(avail - 18, 2, 30)));
        exfil_srcs = take(3);
        c2_clients = take(15);
    }
    const std::string botnet_controller = "192.0.2.10";
    const std::string exfil_sink = "203.0.113.9";
    const std::string c2_server = "198.51.100.7";

    std::vector<FlowRecord> records;
    records.reserve(static_cast<std::size_t>(count_of("benign")) + count_of("scanning") +
                    count_of("botnet") + count_of("exfil") + count_of("c2"));

    auto ephemeral = [&] { return static_cast<int>(rng.uniform_int(32768, 60999)); };
    auto day_ts = [&] { return base_ts + static_cast<std::int64_t>(rng.uniform(0.0, day)); };

    for (int i = 0; i < count_of("benign"); ++i) {
        FlowRecord r;
        r.timestamp = day_ts();
        r.src_ip = rng.choice(clients);
        r.dst_ip = servers[pick_server(rng.gen)];
        r.src_port = ephemeral();
        r.dst_port = benign_ports[pick_port(rng.gen)];
        r.duration = rng.lognormal(-1.0, 1.0);
        r.fwd_bytes = clamp_bytes(rng.lognormal(7.0, 1.2));
        r.bwd_bytes = clamp_bytes(static_cast<double>(r.fwd_bytes) * rng.lognormal(0.7, 0.8));
        r.label = "benign";
        records.push_back(std::move(r));
    }

    const int max_scan_port =
        std::max(2, static_cast<int>(65535 * std::clamp(config.port_spread, 0.001, 1.0)));
    std::vector<std::string> scan_targets = hosts;
    if (config.fan_out > 0 && config.fan_out < static_cast<int>(scan_targets.size()))
        scan_targets.resize(config.fan_out);
    for (int i = 0; i < count_of("scanning"); ++i) {
        FlowRecord r;
        r.timestamp = day_ts();
        r.src_ip = scanner_srcs[i % scanner_srcs.size()];
        do {
            r.dst_ip = rng.choice(scan_targets);
        } while (r.dst_ip == r.src_ip);
        r.src_port = ephemeral();
        r.dst_port = static_cast<int>(rng.uniform_int(1, max_scan_port));
        r.duration = rng.lognormal(-5.0, 0.7);
        r.fwd_bytes = 40 + rng.uniform_int(0, 80);
        r.bwd_bytes = rng.uniform(0.0, 1.0) < 0.6 ? 0 : 40 + rng.uniform_int(0, 20);
        r.label = "scanning";
        records.push_back(std::move(r));
    }

    const double beacon_period = std::max(1.0, config.beacon_period);
    for (int i = 0; i < count_of("botnet"); ++i) {
        FlowRecord r;
        const int wave = i / static_cast<int>(bots.size());
        r.timestamp = base_ts + static_cast<std::int64_t>(
                                    wave * beacon_period +
                                    std::abs(rng.normal(0.0, beacon_period * 0.05)));
        r.src_ip = bots[i % bots.size()];
        r.dst_ip = botnet_controller;
        r.src_port = ephemeral();
        r.dst_port = 6667;
        r.duration = rng.lognormal(-2.0, 0.4);
        r.fwd_bytes = clamp_bytes(std::max(60.0, rng.normal(300.0, 30.0)));
        r.bwd_bytes = clamp_bytes(static_cast<double>(r.fwd_bytes) * rng.uniform(0.85, 1.15));
        r.label = "botnet";
        records.push_back(std::move(r));
    }

    for (int i = 0; i < count_of("exfil"); ++i) {
        FlowRecord r;
        r.timestamp = day_ts();
        r.src_ip = rng.choice(exfil_srcs);
        r.dst_ip = exfil_sink;
        r.src_port = ephemeral();
        r.dst_port = 443;
        r.duration = rng.lognormal(2.0, 0.8);
        r.fwd_bytes = clamp_bytes(rng.lognormal(15.0, 1.0));
        const double asym = std::max(1.0, config.byte_asymmetry * rng.lognormal(0.0, 0.5));
        r.bwd_bytes = clamp_bytes(std::max(100.0, static_cast<double>(r.fwd_bytes) / asym));
        r.label = "exfil";
        records.push_back(std::move(r));
    }

    for (int i = 0; i < count_of("c2"); ++i) {
        FlowRecord r;
        r.timestamp = day_ts();
        r.src_ip = rng.choice(c2_clients);
        r.dst_ip = c2_server;
        r.src_port = ephemeral();
        r.dst_port = 8443;
        r.duration = rng.lognormal(5.0, 0.7);
        r.fwd_bytes = clamp_bytes(std::max(80.0, rng.normal(500.0, 100.0)));
        r.bwd_bytes = clamp_bytes(std::max(80.0, rng.normal(500.0, 100.0)));
        r.label = "c2";
        records.push_back(std::move(r));
    }

    std::stable_sort(records.begin(), records.end(),
                     [](const FlowRecord& a, const FlowRecord& b) { return a.timestamp < b.timestamp; });
    return records;
}

// ---------------------------------------------------------------------------
// Holdout experiment
// ---------------------------------------------------------------------------

namespace {

std::vector<std::string> sorted_attack_classes(const std::vector<FlowRecord>& records) {
    std::set<std::string> names;
    for (const auto& r : records)
        if (!r.benign()) names.insert(r.label);
    return {names.begin(), names.end()};
}

Eigen::MatrixXd select_rows(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd out(rows.size(), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = m.row(rows[i]);
    return out;
}

// Trains the novelty detector on the given raw-feature rows and selects its
// loss threshold on a validation slice.
NoveltyDetector train_nd_stage(const Eigen::MatrixXd& train_raw, const std::vector<int>& train_cls,
                               const Eigen::MatrixXd& val_raw, int num_classes,
                               const std::vector<std::string>& class_names,
                               const NdTrainConfig& nd_config, double threshold_quantile, int k,
                               std::ostream* log, int* final_active_dims) {
    NoveltyDetector nd;
    nd.scaler = fit_nd_normalizer(train_raw);
    Eigen::MatrixXd train_n = transform_nd(train_raw, nd.scaler);
    NdTrainResult trained = train_novelty_detector(train_n, train_cls, num_classes, nd_config, log);
    nd.net = std::move(trained.net);
    nd.ref_embeddings = std::move(trained.ref_embeddings);
    nd.ref_classes = std::move(trained.ref_classes);
    nd.class_names = class_names;
    nd.k = std::min<int>(k, static_cast<int>(nd.ref_embeddings.rows()));
    if (final_active_dims && !trained.history.empty())
        *final_active_dims = trained.history.back().active_dims;

    Eigen::MatrixXd val_n = transform_nd(val_raw, nd.scaler);
    Eigen::VectorXd val_losses = reconstruction_losses(nd.net, val_n);
    nd.threshold = select_threshold(
        std::vector<double>(val_losses.data(), val_losses.data() + val_losses.size()),
        threshold_quantile);
    return nd;
}

}  // namespace

HoldoutReport run_holdout_experiment(const std::vector<FlowRecord>& records,
                                     const HoldoutConfig& config, std::ostream* log) {
    HoldoutReport report;
    report.holdout_class = config.holdout_class;

    const auto attack_classes = sorted_attack_classes(records);
    if (std::find(attack_classes.begin(), attack_classes.end(), config.holdout_class) ==
        attack_classes.end())
        throw DataError("run_holdout_experiment: holdout class '" + config.holdout_class +
                        "' absent from dataset");
    std::vector<std::string> known_classes;
    for (const auto& c : attack_classes)
        if (c != config.holdout_class) known_classes.push_back(c);
    if (known_classes.size() < 2)
        throw DataError("run_holdout_experiment: need at least 2 non-holdout attack classes");

    GraphArtifacts artifacts = compute_graph_artifacts(records, config.graph_seed);
    Eigen::MatrixXd features = build_feature_matrix(records, artifacts);

    std::vector<std::size_t> benign_rows, holdout_rows;
    std::map<std::string, std::vector<std::size_t>> class_rows;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].benign()) benign_rows.push_back(i);
        else if (records[i].label == config.holdout_class) holdout_rows.push_back(i);
        else class_rows[records[i].label].push_back(i);
    }

    for (std::uint64_t seed : config.seeds) {
        std::mt19937_64 split_rng(seed * 0x9e3779b97f4a7c15ull + 1);

        auto benign = benign_rows;
        std::shuffle(benign.begin(), benign.end(), split_rng);
        const std::size_t benign_eval_n =
            static_cast<std::size_t>(config.eval_fraction * benign.size());
        std::vector<std::size_t> eval_rows(benign.begin(), benign.begin() + benign_eval_n);
        std::vector<std::size_t> ad_pool(benign.begin() + benign_eval_n, benign.end());

        std::vector<std::size_t> nd_train_rows, nd_val_rows;
        std::vector<int> nd_train_cls, nd_val_cls;
        for (std::size_t c = 0; c < known_classes.size(); ++c) {
            auto rows = class_rows[known_classes[c]];
            std::shuffle(rows.begin(), rows.end(), split_rng);
            const std::size_t eval_n = static_cast<std::size_t>(config.eval_fraction * rows.size());
            const std::size_t val_n = static_cast<std::size_t>(config.nd_val_fraction * rows.size());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (i < eval_n) {
                    eval_rows.push_back(rows[i]);
                } else if (i < eval_n + val_n) {
                    nd_val_rows.push_back(rows[i]);
                    nd_val_cls.push_back(static_cast<int>(c));
                } else {
                    nd_train_rows.push_back(rows[i]);
                    nd_train_cls.push_back(static_cast<int>(c));
                }
            }
        }

        // Cap the holdout share of the eval set below the configured
        // fraction: h <= f * E / (1 - f).
        auto holdout = holdout_rows;
        std::shuffle(holdout.begin(), holdout.end(), split_rng);
        const double f = config.max_holdout_fraction;
        std::size_t cap = static_cast<std::size_t>(
            std::floor(f * static_cast<double>(eval_rows.size()) / (1.0 - f)));
        cap = std::min(cap, holdout.size());
        std::vector<std::size_t> holdout_eval(holdout.begin(), holdout.begin() + cap);
        eval_rows.insert(eval_rows.end(), holdout_eval.begin(), holdout_eval.end());
        std::sort(eval_rows.begin(), eval_rows.end());

        // Anomaly detector is mode-independent; train it once per seed.
        AdTrainConfig ad_config = config.ad;
        ad_config.seed = seed;
        ad_config.train.seed = seed;
        AnomalyDetector ad = train_anomaly_detector(select_rows(features, ad_pool), ad_config);

        std::vector<FlowRecord> eval_records;
        std::vector<bool> truth;
        eval_records.reserve(eval_rows.size());
        for (std::size_t row : eval_rows) {
            eval_records.push_back(records[row]);
            truth.push_back(records[row].label == config.holdout_class);
        }
        const double holdout_fraction =
            eval_rows.empty() ? 0.0
                              : static_cast<double>(holdout_eval.size()) /
                                    static_cast<double>(eval_rows.size());

        std::vector<std::pair<std::string, std::optional<double>>> modes;
        if (config.metric_mode) modes.push_back({"metric", config.nd.gamma});
        if (config.recon_mode) modes.push_back({"recon", 0.0});

        for (const auto& [mode, gamma] : modes) {
            NdTrainConfig nd_config = config.nd;
            nd_config.seed = seed;
            nd_config.gamma = gamma;

            HoldoutRunMetrics run;
            run.seed = seed;
            run.mode = mode;
            run.eval_holdout_fraction = holdout_fraction;
            run.nd_train_holdout_rows = 0;
            for (std::size_t row : nd_train_rows)
                if (records[row].label == config.holdout_class) ++run.nd_train_holdout_rows;

            NoveltyDetector nd = train_nd_stage(
                select_rows(features, nd_train_rows), nd_train_cls,
                select_rows(features, nd_val_rows), static_cast<int>(known_classes.size()),
                known_classes, nd_config, config.nd_threshold_quantile, config.cata_k, nullptr,
                &run.final_active_dims);

            std::vector<Verdict> verdicts = infer(eval_records, artifacts, ad, nd);

            PrecisionRecall pr = precision_recall(verdicts, truth);
            run.precision = pr.precision;
            run.recall = pr.recall;

            // Benign-gated records score 0 so a single ranking covers the
            // two-stage gate.
            std::vector<double> scores(verdicts.size(), 0.0);
            for (std::size_t i = 0; i < verdicts.size(); ++i)
                if (verdicts[i].nd_loss) scores[i] = *verdicts[i].nd_loss;
            run.auc = roc_auc(scores, truth);

            long attributed = 0;
            for (std::size_t i = 0; i < verdicts.size(); ++i) {
                if (!truth[i] || !verdicts[i].cata_class) continue;
                run.cata_distribution[*verdicts[i].cata_class] += 1.0;
                ++attributed;
            }
            if (attributed > 0)
                for (auto& [cls, p] : run.cata_distribution) p /= static_cast<double>(attributed);

            if (log) {
                *log << "{\"seed\":" << seed << ",\"mode\":\"" << mode
                     << "\",\"holdout\":\"" << config.holdout_class
                     << "\",\"precision\":" << run.precision << ",\"recall\":" << run.recall
                     << ",\"auc\":" << run.auc << "}\n";
            }
            report.runs.push_back(std::move(run));
        }
    }
    return report;
}

void write_holdout_report_csv(std::ostream& out, const HoldoutReport& report) {
    out << "seed,mode,holdout,precision,recall,auc\n";
    for (const auto& run : report.runs) {
        csv::write_row(out, {std::to_string(run.seed), run.mode, report.holdout_class,
                             csv::format_double(run.precision), csv::format_double(run.recall),
                             csv::format_double(run.auc)});
    }
}

void write_cata_distribution_csv(std::ostream& out, const HoldoutReport& report) {
    const std::string preferred = "metric";
    std::map<std::string, double> dist;
    int n_runs = 0;
    bool have_metric = false;
    for (const auto& run : report.runs)
        if (run.mode == preferred) have_metric = true;
    for (const auto& run : report.runs) {
        if (run.mode != (have_metric ? preferred : run.mode)) continue;
        for (const auto& [cls, p] : run.cata_distribution) dist[cls] += p;
        ++n_runs;
    }
    out << "holdout,predicted_class,probability\n";
    if (n_runs == 0) return;
    for (const auto& [cls, p] : dist)
        csv::write_row(out, {report.holdout_class, cls, csv::format_double(p / n_runs)});
}

// ---------------------------------------------------------------------------
// kNN sweep
// ---------------------------------------------------------------------------

std::vector<std::pair<int, double>> knn_accuracy_sweep(const NoveltyDetector& nd,
                                                       const Eigen::MatrixXd& test_raw_features,
                                                       const std::vector<int>& test_classes,
                                                       const std::vector<int>& ks) {
    if (static_cast<std::size_t>(test_raw_features.rows()) != test_classes.size())
        throw DataError("knn_accuracy_sweep: label count mismatch");
    int k_max = 0;
    for (int k : ks) {
        if (k < 1 || k > nd.ref_embeddings.rows())
            throw DataError("knn_accuracy_sweep: k out of range");
        k_max = std::max(k_max, k);
    }

    Eigen::MatrixXd latent = nd.net.encode(transform_nd(test_raw_features, nd.scaler));
    std::vector<long> correct(ks.size(), 0);
    for (Eigen::Index i = 0; i < latent.rows(); ++i) {
        const auto neighbors =
            nearest_neighbors(latent.row(i).transpose(), nd.ref_embeddings, k_max);
        for (std::size_t j = 0; j < ks.size(); ++j) {
            auto [cls, prob] = cata_vote(neighbors, nd.ref_classes, ks[j]);
            (void)prob;
            if (cls == test_classes[i]) ++correct[j];
        }
    }
    std::vector<std::pair<int, double>> out;
    for (std::size_t j = 0; j < ks.size(); ++j)
        out.push_back({ks[j], latent.rows() == 0
                                  ? 0.0
                                  : static_cast<double>(correct[j]) / latent.rows()});
    return out;
}

std::vector<KnnSweepRow> run_knn_sweep(const std::vector<FlowRecord>& records,
                                       const KnnSweepConfig& config, std::ostream* log) {
    const auto attack_classes = sorted_attack_classes(records);
    if (attack_classes.size() < 2)
        throw DataError("run_knn_sweep: need at least 2 attack classes");

    GraphArtifacts artifacts = compute_graph_artifacts(records, config.graph_seed);
    Eigen::MatrixXd features = build_feature_matrix(records, artifacts);

    std::map<std::string, std::vector<std::size_t>> class_rows;
    for (std::size_t i = 0; i < records.size(); ++i)
        if (!records[i].benign()) class_rows[records[i].label].push_back(i);

    std::vector<KnnSweepRow> rows;
    for (std::uint64_t seed : config.seeds) {
        std::mt19937_64 split_rng(seed * 0x9e3779b97f4a7c15ull + 2);
        std::vector<std::size_t> train_rows, test_rows;
        std::vector<int> train_cls, test_cls;
        for (std::size_t c = 0; c < attack_classes.size(); ++c) {
            auto idx = class_rows[attack_classes[c]];
            std::shuffle(idx.begin(), idx.end(), split_rng);
            const std::size_t n_test = static_cast<std::size_t>(config.test_fraction * idx.size());
            for (std::size_t i = 0; i < idx.size(); ++i) {
                if (i < n_test) {
                    test_rows.push_back(idx[i]);
                    test_cls.push_back(static_cast<int>(c));
                } else {
                    train_rows.push_back(idx[i]);
                    train_cls.push_back(static_cast<int>(c));
                }
            }
        }

        std::vector<std::pair<std::string, std::optional<double>>> modes;
        if (config.metric_mode) modes.push_back({"metric", config.nd.gamma});
        if (config.recon_mode) modes.push_back({"recon", 0.0});
        for (const auto& [mode, gamma] : modes) {
            NdTrainConfig nd_config = config.nd;
            nd_config.seed = seed;
            nd_config.gamma = gamma;

            NoveltyDetector nd = train_nd_stage(
                select_rows(features, train_rows), train_cls, select_rows(features, train_rows),
                static_cast<int>(attack_classes.size()), attack_classes, nd_config,
                /*threshold_quantile=*/0.99, /*k=*/10, nullptr, nullptr);

            auto sweep = knn_accuracy_sweep(nd, select_rows(features, test_rows), test_cls,
                                            config.ks);
            for (auto [k, acc] : sweep) {
                rows.push_back({seed, mode, k, acc});
                if (log)
                    *log << "{\"seed\":" << seed << ",\"mode\":\"" << mode << "\",\"k\":" << k
                         << ",\"accuracy\":" << acc << "}\n";
            }
        }
    }
    return rows;
}

void write_knn_sweep_csv(std::ostream& out, const std::vector<KnnSweepRow>& rows) {
    out << "seed,mode,k,accuracy\n";
    for (const auto& r : rows)
        csv::write_row(out, {std::to_string(r.seed), r.mode, std::to_string(r.k),
                             csv::format_double(r.accuracy)});
}

}  // namespace zdt
