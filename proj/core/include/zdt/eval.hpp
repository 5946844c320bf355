#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zdt/pipeline.hpp"

namespace zdt {

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
    long tp = 0, fp = 0, fn = 0, tn = 0;
    bool no_predicted_positives = false;
    bool no_actual_positives = false;
};

// Positive = category zdt. Degenerate denominators yield 0 with a flag.
PrecisionRecall precision_recall(const std::vector<Verdict>& verdicts,
                                 const std::vector<bool>& truth);

// Mann-Whitney rank statistic with midrank tie handling: the probability
// that a random positive outscores a random negative. Both classes must be
// present.
double roc_auc(const std::vector<double>& scores, const std::vector<bool>& truth);

// Synthetic labeled-flow generator. Benign background traffic plus four
// attack archetypes with distinct flow- and graph-level signatures:
//   scanning - one source sweeping hosts and ports with tiny byte counts
//   botnet   - periodic same-destination beacons with small symmetric bytes
//   exfil    - extreme forward/backward byte asymmetry to one sink
//   c2       - long-lived low-volume sessions to a single controller
struct SyntheticConfig {
    int host_count = 400;
    std::map<std::string, int> counts = {
        {"benign", 30000}, {"scanning", 6000}, {"botnet", 6000}, {"exfil", 6000}, {"c2", 2000}};
    double port_spread = 1.0;        // fraction of the port range a scan sweeps
    double byte_asymmetry = 2000.0;  // exfil fwd/bwd ratio scale
    int fan_out = 0;                 // cap on distinct scan targets; 0 = every host
    double beacon_period = 60.0;     // seconds between botnet beacons
    std::uint64_t seed = 1;
};

std::vector<FlowRecord> generate_synthetic_dataset(const SyntheticConfig& config);

// Holding one attack class out of ND training and treating it as the
// zero-day at evaluation time, with and/or without metric learning.
struct HoldoutConfig {
    std::string holdout_class = "botnet";
    double max_holdout_fraction = 0.02;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    bool metric_mode = true;
    bool recon_mode = true;
    AdTrainConfig ad;
    NdTrainConfig nd;
    double nd_threshold_quantile = 0.99;
    double eval_fraction = 0.3;    // share of benign/known-attack rows reserved for eval
    double nd_val_fraction = 0.15; // share of the ND pool used for threshold selection
    int cata_k = 10;
    std::uint64_t graph_seed = 1;
};

struct HoldoutRunMetrics {
    std::uint64_t seed = 0;
    std::string mode;  // "metric" or "recon"
    double precision = 0.0;
    double recall = 0.0;
    double auc = 0.5;
    // Distribution of predicted nearest classes over the holdout eval rows
    // that reached the ND; sums to 1 when any did.
    std::map<std::string, double> cata_distribution;
    double eval_holdout_fraction = 0.0;
    long nd_train_holdout_rows = 0;
    int final_active_dims = 0;
};

struct HoldoutReport {
    std::string holdout_class;
    std::vector<HoldoutRunMetrics> runs;
};

HoldoutReport run_holdout_experiment(const std::vector<FlowRecord>& records,
                                     const HoldoutConfig& config, std::ostream* log = nullptr);

// `seed,mode,holdout,precision,recall,auc` rows.
void write_holdout_report_csv(std::ostream& out, const HoldoutReport& report);

// `holdout,predicted_class,probability` rows; the distribution is averaged
// over the metric-mode runs (recon-mode when metric mode was disabled).
void write_cata_distribution_csv(std::ostream& out, const HoldoutReport& report);

// Fraction of test rows whose CATA class matches the true label, per k.
std::vector<std::pair<int, double>> knn_accuracy_sweep(const NoveltyDetector& nd,
                                                       const Eigen::MatrixXd& test_raw_features,
                                                       const std::vector<int>& test_classes,
                                                       const std::vector<int>& ks);

struct KnnSweepConfig {
    std::vector<int> ks = {1, 2, 5, 10, 20, 50, 100};
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    bool metric_mode = true;
    bool recon_mode = true;
    NdTrainConfig nd;
    double test_fraction = 0.25;
    std::uint64_t graph_seed = 1;
};

struct KnnSweepRow {
    std::uint64_t seed = 0;
    std::string mode;
    int k = 0;
    double accuracy = 0.0;
};

// Trains the ND on every attack class (per seed and mode) and classifies a
// held-out test split through CATA across the swept k values.
std::vector<KnnSweepRow> run_knn_sweep(const std::vector<FlowRecord>& records,
                                       const KnnSweepConfig& config, std::ostream* log = nullptr);

// `seed,mode,k,accuracy` rows.
void write_knn_sweep_csv(std::ostream& out, const std::vector<KnnSweepRow>& rows);

}  // namespace zdt
