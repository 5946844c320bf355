#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zdt/features.hpp"
#include "zdt/flow.hpp"
#include "zdt/graph.hpp"
#include "zdt/net.hpp"
#include "zdt/scaling.hpp"
#include "zdt/triplet.hpp"

namespace zdt {

// Autoencoder trained on benign traffic; losses above the threshold mark a
// record anomalous.
struct AnomalyDetector {
    Autoencoder net;
    MinMaxParams scaler;
    double threshold = 0.0;
};

// Autoencoder trained on known attack classes; losses above the threshold on
// an anomalous record mark it a zero-day threat. Carries the labeled latent
// reference set used for closest-attack-type attribution.
struct NoveltyDetector {
    Autoencoder net;
    NdNormalizerParams scaler;
    double threshold = 0.0;
    Eigen::MatrixXd ref_embeddings;
    std::vector<int> ref_classes;
    std::vector<std::string> class_names;  // dense class id -> name
    int k = 10;
};

enum class Category { Benign, KnownAttack, Zdt };

const char* category_name(Category c);

struct Verdict {
    std::int64_t record_id = 0;
    double ad_loss = 0.0;
    std::optional<double> nd_loss;          // present iff not benign
    Category category = Category::Benign;
    std::optional<std::string> cata_class;  // present iff nd_loss present
    std::optional<double> cata_probability;
    bool ingestion_error = false;
    std::string error;
};

// Empirical quantile of the losses with linear interpolation of order
// statistics.
double select_threshold(std::vector<double> losses, double quantile);

struct AdTrainConfig {
    std::vector<int> encoder_widths = {24, 16, 8, 5};
    AeTrainConfig train;
    double threshold_quantile = 0.995;
    double val_fraction = 0.1;
    std::uint64_t seed = 1;
};

// Fits the min-max scaler on the training split, trains the autoencoder and
// selects the loss threshold on a held-out benign validation split.
AnomalyDetector train_anomaly_detector(const Eigen::MatrixXd& benign_features,
                                       const AdTrainConfig& config, std::ostream* log = nullptr);

// Graph-derived context for one record set.
struct GraphArtifacts {
    HostGraph graph;
    CommunityAssignment communities;
    std::map<std::string, HostFeatures> host_features;
    std::map<std::string, int> community_of;
};

GraphArtifacts compute_graph_artifacts(const std::vector<FlowRecord>& records, std::uint64_t seed);

// Raw 24-column feature matrix, one row per record, in record order. Rows
// whose endpoints are missing from the artifacts are flagged in `bad_rows`
// when a sink is given, and zero-filled.
Eigen::MatrixXd build_feature_matrix(const std::vector<FlowRecord>& records,
                                     const GraphArtifacts& artifacts,
                                     std::vector<std::pair<std::size_t, std::string>>* bad_rows = nullptr);

// kNN vote in the reference latent space. Distance ties prefer the lower
// reference index; majority ties prefer the smaller mean distance, then the
// lower class id. Returns (class id, neighbor fraction).
std::pair<int, double> cata(const Eigen::VectorXd& latent, const Eigen::MatrixXd& ref_embeddings,
                            const std::vector<int>& ref_classes, int k);

// The k nearest reference rows as (distance, reference index), sorted with
// distance ties resolved to the lower index.
std::vector<std::pair<double, int>> nearest_neighbors(const Eigen::VectorXd& latent,
                                                      const Eigen::MatrixXd& ref_embeddings, int k);

// Vote over the first k entries of a sorted neighbor list (lets a k-sweep
// reuse one neighbor search).
std::pair<int, double> cata_vote(const std::vector<std::pair<double, int>>& neighbors,
                                 const std::vector<int>& ref_classes, int k);

// Two-stage inference: min-max + AD gate, then ND renormalization of the raw
// vector, ND loss threshold, and CATA on every non-benign record. Output
// order equals input order.
std::vector<Verdict> infer(const std::vector<FlowRecord>& records, const GraphArtifacts& artifacts,
                           const AnomalyDetector& ad, const NoveltyDetector& nd);

// `record_id,ad_loss,nd_loss,category,cata_class,cata_probability`; rows that
// failed ingestion carry category "error" and empty numeric fields.
void write_verdicts_csv(std::ostream& out, const std::vector<Verdict>& verdicts);

struct Bundle {
    AnomalyDetector ad;
    std::optional<NoveltyDetector> nd;
};

// Versioned binary container with a feature-layout checksum and a trailing
// content checksum; load(save(x)) reproduces every parameter bit-exactly.
void save_bundle(const Bundle& bundle, const std::string& path);
Bundle load_bundle(const std::string& path);

struct BundleVersionError : DataError { using DataError::DataError; };
struct BundleChecksumError : DataError { using DataError::DataError; };
struct BundleTruncatedError : DataError { using DataError::DataError; };
struct BundleLayoutError : DataError { using DataError::DataError; };

// One row per example: 5 latent coordinates, 3 PCA coordinates, label.
void export_latent_csv(std::ostream& out, const NoveltyDetector& nd,
                       const Eigen::MatrixXd& raw_features, const std::vector<std::string>& labels);

// Principal-component projection of the rows of `data` onto `components`
// axes (columns are ordered by decreasing variance). Deterministic up to a
// fixed sign convention.
Eigen::MatrixXd pca_project(const Eigen::MatrixXd& data, int components);

}  // namespace zdt
