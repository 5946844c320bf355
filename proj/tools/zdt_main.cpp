// zdt - dual-autoencoder zero-day-threat detection over flow CSVs.
//
// File-mediated workflow: synth -> train-ad -> train-nd -> score, plus the
// experiment drivers (eval-holdout, knn-sweep) and export helpers. Exit
// codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "zdt/csv.hpp"
#include "zdt/eval.hpp"
#include "zdt/features.hpp"
#include "zdt/flow.hpp"
#include "zdt/graph.hpp"
#include "zdt/pipeline.hpp"

using nlohmann::json;

namespace {

// Resolves option values with CLI-flag > config-file > built-in-default
// precedence and records the outcome for the resolved-config banner.
class ConfigMerger {
public:
    explicit ConfigMerger(json file_config) : file_(std::move(file_config)) {}

    template <typename T>
    void resolve(const CLI::Option* opt, const std::string& key, T& value) {
        known_.insert(key);
        if (opt && opt->count() > 0) {
            value = opt->as<T>();
        } else if (file_.contains(key)) {
            try {
                value = file_.at(key).get<T>();
            } catch (const json::exception& e) {
                throw zdt::DataError("config key '" + key + "': " + e.what());
            }
        }
        resolved_[key] = value;
    }

    void resolve_flag(const CLI::Option* opt, const std::string& key, bool& value) {
        known_.insert(key);
        if (opt && opt->count() > 0) {
            value = true;
        } else if (file_.contains(key)) {
            try {
                value = file_.at(key).get<bool>();
            } catch (const json::exception& e) {
                throw zdt::DataError("config key '" + key + "': " + e.what());
            }
        }
        resolved_[key] = value;
    }

    void note(const std::string& key, const json& value) {
        known_.insert(key);
        resolved_[key] = value;
    }

    void reject_unknown_keys() const {
        for (const auto& [key, value] : file_.items()) {
            (void)value;
            if (!known_.count(key))
                throw CLI::ValidationError("--config", "unknown config key '" + key + "'");
        }
    }

    const json& resolved() const { return resolved_; }

private:
    json file_;
    std::set<std::string> known_;
    json resolved_;
};

json load_config_file(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw zdt::DataError("cannot open config file: " + path);
    json cfg;
    try {
        in >> cfg;
    } catch (const json::exception& e) {
        throw zdt::DataError("config file " + path + ": " + e.what());
    }
    if (!cfg.is_object()) throw zdt::DataError("config file must hold a JSON object");
    return cfg;
}

void require_input(const std::string& path) {
    if (!std::filesystem::exists(path)) throw zdt::DataError("input file not found: " + path);
}

void require_output_dir(const std::string& path) {
    auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty() && !std::filesystem::is_directory(parent))
        throw zdt::DataError("output directory does not exist: " + parent.string());
}

void print_resolved(const std::string& subcommand, const json& resolved) {
    std::cout << "resolved-config " << json{{"subcommand", subcommand}, {"options", resolved}}.dump()
              << "\n";
}

zdt::FlowSchema schema_from(const ConfigMerger&, const json& schema_json,
                            const std::vector<std::string>& map_flags) {
    zdt::FlowSchema schema = zdt::FlowSchema::canonical();
    const auto& fields = zdt::FlowSchema::canonical_fields();
    auto known_field = [&](const std::string& f) {
        return std::find(fields.begin(), fields.end(), f) != fields.end();
    };
    if (!schema_json.is_null()) {
        if (!schema_json.is_object()) throw zdt::DataError("config key 'schema' must be an object");
        for (const auto& [field, col] : schema_json.items()) {
            if (!known_field(field)) throw zdt::DataError("schema maps unknown field '" + field + "'");
            schema.columns[field] = col.get<std::string>();
        }
    }
    for (const auto& entry : map_flags) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw zdt::DataError("--map expects field=column, got '" + entry + "'");
        const std::string field = entry.substr(0, eq);
        if (!known_field(field)) throw zdt::DataError("--map maps unknown field '" + field + "'");
        schema.columns[field] = entry.substr(eq + 1);
    }
    return schema;
}

std::vector<zdt::FlowRecord> load_flows(const std::string& path, const zdt::FlowSchema& schema) {
    require_input(path);
    zdt::ParseReport report;
    auto records = zdt::read_flow_csv_file(path, schema, &report);
    if (!report.errors.empty()) {
        std::cerr << "warning: skipped " << report.rows_skipped << " malformed row(s) in " << path
                  << "\n";
        for (std::size_t i = 0; i < std::min<std::size_t>(5, report.errors.size()); ++i)
            std::cerr << "  line " << report.errors[i].line << ": " << report.errors[i].message
                      << "\n";
        if (report.errors.size() > 5)
            std::cerr << "  ... " << report.errors.size() - 5 << " more\n";
    }
    if (records.empty()) throw zdt::DataError("no usable flow records in " + path);
    return records;
}

template <typename WriteFn>
void write_file(const std::string& path, WriteFn&& fn) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw zdt::DataError("cannot open output file: " + path);
    fn(out);
    if (!out.flush()) throw zdt::DataError("write failure: " + path);
}

// Splits a labeled flow file into the benign/attack row sets a trainer needs.
struct LabelSplit {
    std::vector<std::size_t> benign;
    std::map<std::string, std::vector<std::size_t>> attacks;
};

LabelSplit split_by_label(const std::vector<zdt::FlowRecord>& records) {
    LabelSplit s;
    for (std::size_t i = 0; i < records.size(); ++i) {
        if (records[i].benign()) s.benign.push_back(i);
        else s.attacks[records[i].label].push_back(i);
    }
    return s;
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows) {
    Eigen::MatrixXd out(rows.size(), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(i) = m.row(rows[i]);
    return out;
}

// ---------------------------------------------------------------------------

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> map_flags;
};

int cmd_synth(const CommonArgs& common, CLI::App* cmd) {
    const json file_cfg = load_config_file(common.config_path);
    ConfigMerger merger(file_cfg);
    zdt::SyntheticConfig cfg;
    std::string out_path;
    merger.resolve(cmd->get_option("--out"), "out", out_path);
    merger.resolve(cmd->get_option("--seed"), "seed", cfg.seed);
    merger.resolve(cmd->get_option("--hosts"), "hosts", cfg.host_count);
    for (const char* cls : {"benign", "scanning", "botnet", "exfil", "c2"}) {
        int n = cfg.counts[cls];
        merger.resolve(cmd->get_option("--" + std::string(cls)), cls, n);
        cfg.counts[cls] = n;
    }
    merger.resolve(cmd->get_option("--port-spread"), "port_spread", cfg.port_spread);
    merger.resolve(cmd->get_option("--byte-asymmetry"), "byte_asymmetry", cfg.byte_asymmetry);
    merger.resolve(cmd->get_option("--fan-out"), "fan_out", cfg.fan_out);
    merger.resolve(cmd->get_option("--beacon-period"), "beacon_period", cfg.beacon_period);
    merger.reject_unknown_keys();
    print_resolved("synth", merger.resolved());

    require_output_dir(out_path);
    auto records = zdt::generate_synthetic_dataset(cfg);
    zdt::write_flow_csv_file(out_path, records);
    std::cout << "wrote " << records.size() << " flows to " << out_path << "\n";
    return 0;
}

int cmd_featurize(const CommonArgs& common, CLI::App* cmd) {
    const json file_cfg = load_config_file(common.config_path);
    ConfigMerger merger(file_cfg);
    std::string in_path, out_path, hosts_out;
    std::uint64_t graph_seed = 1;
    merger.resolve(cmd->get_option("--in"), "in", in_path);
    merger.resolve(cmd->get_option("--out"), "out", out_path);
    merger.resolve(cmd->get_option("--hosts-out"), "hosts_out", hosts_out);
    merger.resolve(cmd->get_option("--graph-seed"), "graph_seed", graph_seed);
    json schema_json = file_cfg.contains("schema") ? file_cfg.at("schema") : json();
    merger.note("schema", schema_json.is_null() ? json::object() : schema_json);
    merger.reject_unknown_keys();
    print_resolved("featurize", merger.resolved());

    const auto schema = schema_from(merger, schema_json, common.map_flags);
    auto records = load_flows(in_path, schema);
    require_output_dir(out_path);

    auto artifacts = zdt::compute_graph_artifacts(records, graph_seed);
    Eigen::MatrixXd features = zdt::build_feature_matrix(records, artifacts);

    write_file(out_path, [&](std::ostream& out) {
        out << "record_id";
        for (const auto& name : zdt::feature_names()) out << ',' << name;
        out << ",label\n";
        for (Eigen::Index i = 0; i < features.rows(); ++i) {
            std::vector<std::string> row{std::to_string(i)};
            for (int j = 0; j < zdt::kFeatureDim; ++j)
                row.push_back(zdt::csv::format_double(features(i, j)));
            row.push_back(records[i].label);
            zdt::csv::write_row(out, row);
        }
    });
    if (!hosts_out.empty()) {
        require_output_dir(hosts_out);
        write_file(hosts_out, [&](std::ostream& out) {
            zdt::write_host_features_csv(out, artifacts.graph, artifacts.host_features,
                                         artifacts.communities);
        });
    }
    std::cout << "wrote " << features.rows() << " feature vectors to " << out_path << "\n";
    return 0;
}

int cmd_train_ad(const CommonArgs& common, CLI::App* cmd) {
    const json file_cfg = load_config_file(common.config_path);
    ConfigMerger merger(file_cfg);
    std::string in_path, out_path;
    std::uint64_t graph_seed = 1;
    zdt::AdTrainConfig cfg;
    merger.resolve(cmd->get_option("--in"), "in", in_path);
    merger.resolve(cmd->get_option("--out"), "out", out_path);
    merger.resolve(cmd->get_option("--seed"), "seed", cfg.seed);
    merger.resolve(cmd->get_option("--graph-seed"), "graph_seed", graph_seed);
    merger.resolve(cmd->get_option("--epochs"), "epochs", cfg.train.epochs);
    merger.resolve(cmd->get_option("--batch-size"), "batch_size", cfg.train.batch_size);
    merger.resolve(cmd->get_option("--lr"), "lr", cfg.train.lr);
    merger.resolve(cmd->get_option("--quantile"), "quantile", cfg.threshold_quantile);
    merger.resolve(cmd->get_option("--val-fraction"), "val_fraction", cfg.val_fraction);
    merger.resolve(cmd->get_option("--widths"), "widths", cfg.encoder_widths);
    json schema_json = file_cfg.contains("schema") ? file_cfg.at("schema") : json();
    merger.note("schema", schema_json.is_null() ? json::object() : schema_json);
    merger.reject_unknown_keys();
    print_resolved("train-ad", merger.resolved());

    const auto schema = schema_from(merger, schema_json, common.map_flags);
    auto records = load_flows(in_path, schema);
    require_output_dir(out_path);

    auto split = split_by_label(records);
    if (split.benign.empty()) throw zdt::DataError("train-ad: no benign rows in " + in_path);
    std::size_t attack_rows = records.size() - split.benign.size();
    if (attack_rows > 0)
        std::cout << "train-ad: ignoring " << attack_rows
                  << " labeled attack row(s); training on " << split.benign.size()
                  << " benign rows\n";

    auto artifacts = zdt::compute_graph_artifacts(records, graph_seed);
    Eigen::MatrixXd features = zdt::build_feature_matrix(records, artifacts);

    zdt::Bundle bundle;
    bundle.ad = zdt::train_anomaly_detector(rows_of(features, split.benign), cfg, &std::cout);
    zdt::save_bundle(bundle, out_path);
    std::cout << "anomaly detector trained; loss threshold " << bundle.ad.threshold
              << "; bundle written to " << out_path << "\n";
    return 0;
}

int cmd_train_nd(const CommonArgs& common, CLI::App* cmd) {
    const json file_cfg = load_config_file(common.config_path);
    ConfigMerger merger(file_cfg);
    std::string in_path, ad_path, out_path, holdout;
    std::uint64_t graph_seed = 1;
    zdt::NdTrainConfig cfg;
    double beta = -1.0, gamma = -1.0;  // negative: keep auto
    double quantile = 0.99, val_fraction = 0.15;
    int k = 10;
    bool no_metric = false;
    merger.resolve(cmd->get_option("--in"), "in", in_path);
    merger.resolve(cmd->get_option("--ad"), "ad", ad_path);
    merger.resolve(cmd->get_option("--out"), "out", out_path);
    merger.resolve(cmd->get_option("--seed"), "seed", cfg.seed);
    merger.resolve(cmd->get_option("--graph-seed"), "graph_seed", graph_seed);
    merger.resolve(cmd->get_option("--epochs"), "epochs", cfg.epochs);
    merger.resolve(cmd->get_option("--batch-size"), "batch_size", cfg.batch_size);
    merger.resolve(cmd->get_option("--lr"), "lr", cfg.lr);
    merger.resolve(cmd->get_option("--alpha"), "alpha", cfg.margin_alpha);
    merger.resolve(cmd->get_option("--beta"), "beta", beta);
    merger.resolve(cmd->get_option("--gamma"), "gamma", gamma);
    merger.resolve_flag(cmd->get_option("--no-metric-learning"), "no_metric_learning", no_metric);
    merger.resolve(cmd->get_option("--quantile"), "quantile", quantile);
    merger.resolve(cmd->get_option("--val-fraction"), "val_fraction", val_fraction);
    merger.resolve(cmd->get_option("--k"), "k", k);
    merger.resolve(cmd->get_option("--collapse-epsilon"), "collapse_epsilon", cfg.collapse_epsilon);
    merger.resolve(cmd->get_option("--widths"), "widths", cfg.encoder_widths);
    merger.resolve(cmd->get_option("--holdout"), "holdout", holdout);
    json schema_json = file_cfg.contains("schema") ? file_cfg.at("schema") : json();
    merger.note("schema", schema_json.is_null() ? json::object() : schema_json);
    merger.reject_unknown_keys();
    print_resolved("train-nd", merger.resolved());

    if (beta >= 0.0) cfg.beta = beta;
    if (gamma >= 0.0) cfg.gamma = gamma;
    if (no_metric) cfg.gamma = 0.0;  // --no-metric-learning wins over --gamma

    const auto schema = schema_from(merger, schema_json, common.map_flags);
    auto records = load_flows(in_path, schema);
    require_input(ad_path);
    require_output_dir(out_path);

    zdt::Bundle bundle = zdt::load_bundle(ad_path);

    auto split = split_by_label(records);
    if (!holdout.empty()) {
        if (!split.attacks.count(holdout))
            throw zdt::DataError("train-nd: holdout class '" + holdout + "' absent from " + in_path);
        split.attacks.erase(holdout);
    }
    if (split.attacks.size() < 2)
        throw zdt::DataError("train-nd: need at least 2 attack classes, found " +
                             std::to_string(split.attacks.size()));
    if (!split.benign.empty())
        std::cout << "train-nd: ignoring " << split.benign.size() << " benign row(s)\n";

    auto artifacts = zdt::compute_graph_artifacts(records, graph_seed);
    Eigen::MatrixXd features = zdt::build_feature_matrix(records, artifacts);

    // Deterministic per-class train/val split for threshold selection.
    std::vector<std::string> class_names;
    for (const auto& [name, rows] : split.attacks) class_names.push_back(name);
    std::vector<std::size_t> train_rows, val_rows;
    std::vector<int> train_cls;
    std::mt19937_64 split_rng(cfg.seed ^ 0xa5a5a5a5a5a5a5a5ull);
    for (std::size_t c = 0; c < class_names.size(); ++c) {
        auto rows = split.attacks[class_names[c]];
        std::shuffle(rows.begin(), rows.end(), split_rng);
        std::size_t n_val = static_cast<std::size_t>(val_fraction * rows.size());
        if (rows.size() - n_val < 2) n_val = rows.size() > 2 ? rows.size() - 2 : 0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i < n_val) {
                val_rows.push_back(rows[i]);
            } else {
                train_rows.push_back(rows[i]);
                train_cls.push_back(static_cast<int>(c));
            }
        }
    }
    if (val_rows.empty()) val_rows = train_rows;

    zdt::NoveltyDetector nd;
    nd.scaler = zdt::fit_nd_normalizer(rows_of(features, train_rows));
    Eigen::MatrixXd train_n = zdt::transform_nd(rows_of(features, train_rows), nd.scaler);
    zdt::NdTrainResult trained = zdt::train_novelty_detector(
        train_n, train_cls, static_cast<int>(class_names.size()), cfg, &std::cout);
    nd.net = std::move(trained.net);
    nd.ref_embeddings = std::move(trained.ref_embeddings);
    nd.ref_classes = std::move(trained.ref_classes);
    nd.class_names = class_names;
    nd.k = std::min<int>(k, static_cast<int>(nd.ref_embeddings.rows()));

    Eigen::VectorXd val_losses =
        zdt::reconstruction_losses(nd.net, zdt::transform_nd(rows_of(features, val_rows), nd.scaler));
    nd.threshold = zdt::select_threshold(
        std::vector<double>(val_losses.data(), val_losses.data() + val_losses.size()), quantile);

    if (trained.collapse_warning)
        std::cout << "warning: latent collapse detected during training (see per-epoch log)\n";
    std::cout << "beta=" << trained.beta << " gamma=" << trained.gamma << " nd-threshold="
              << nd.threshold << "\n";

    bundle.nd = std::move(nd);
    zdt::save_bundle(bundle, out_path);
    std::cout << "novelty detector trained on " << train_rows.size() << " rows across "
              << class_names.size() << " classes; bundle written to " << out_path << "\n";
    return 0;
}

int cmd_score(const CommonArgs& common, CLI::App* cmd) {
    const json file_cfg = load_config_file(common.config_path);
    ConfigMerger merger(file_cfg);
    std::string bundle_path, in_path, out_path, scaler_mode = "refit";
    std::uint64_t graph_seed = 1;
    merger.resolve(cmd->get_option("--bundle"), "bundle", bundle_path);
    merger.resolve(cmd->get_option("--in"), "in", in_path);
    merger.resolve(cmd->get_option("--out"), "out", out_path);
    merger.resolve(cmd->get_option("--graph-seed"), "graph_seed", graph_seed);
    merger.resolve(cmd->get_option("--scaler"), "scaler", scaler_mode);
    json schema_json = file_cfg.contains("schema") ? file_cfg.at("schema") : json();
    merger.note("schema", schema_json.is_null() ? json::object() : schema_json);
    merger.reject_unknown_keys();
    print_resolved("score", merger.resolved());

    if (scaler_mode != "refit" && scaler_mode != "reuse")
        throw CLI::ValidationError("--scaler", "must be 'refit' or 'reuse'");

    const auto schema = schema_from(merger, schema_json, common.map_flags);
    auto records = load_flows(in_path, schema);
    require_input(bundle_path);
    require_output_dir(out_path);

    zdt::Bundle bundle = zdt::load_bundle(bundle_path);
    if (!bundle.nd)
        throw zdt::DataError("bundle has no novelty detector; finish training with train-nd");

    auto artifacts = zdt::compute_graph_artifacts(records, graph_seed);
    if (scaler_mode == "refit") {
        // New-network operation: refit the min-max envelope on this capture
        // (treated as overwhelmingly benign), keeping the trained weights.
        Eigen::MatrixXd features = zdt::build_feature_matrix(records, artifacts);
        bundle.ad.scaler = zdt::fit_minmax(features);
    }

    auto verdicts = zdt::infer(records, artifacts, bundle.ad, *bundle.nd);
    write_file(out_path, [&](std::ostream& out) { zdt::write_verdicts_csv(out, verdicts); });

    std::size_t benign = 0, known = 0, zdts = 0, errors = 0;
    for (const auto& v : verdicts) {
        if (v.ingestion_error) ++errors;
        else if (v.category == zdt::Category::Benign) ++benign;
        else if (v.category == zdt::Category::KnownAttack) ++known;
        else ++zdts;
    }
    std::cout << "scored " << verdicts.size() << " records: " << benign << " benign, " << known
              << " known-attack, " << zdts << " zdt, " << errors << " error(s); verdicts written to "
              << out_path << "\n";
    return 0;
}

int cmd_eval_holdout(const CommonArgs& common, CLI::App* cmd) {
    const json file_cfg = load_config_file(common.config_path);
    ConfigMerger merger(file_cfg);
    std::string in_path, out_path, cata_out, modes = "both";
    zdt::HoldoutConfig cfg;
    merger.resolve(cmd->get_option("--in"), "in", in_path);
    merger.resolve(cmd->get_option("--out"), "out", out_path);
    merger.resolve(cmd->get_option("--cata-out"), "cata_out", cata_out);
    merger.resolve(cmd->get_option("--holdout"), "holdout", cfg.holdout_class);
    merger.resolve(cmd->get_option("--seeds"), "seeds", cfg.seeds);
    merger.resolve(cmd->get_option("--max-holdout-frac"), "max_holdout_frac",
                   cfg.max_holdout_fraction);
    merger.resolve(cmd->get_option("--eval-fraction"), "eval_fraction", cfg.eval_fraction);
    merger.resolve(cmd->get_option("--modes"), "modes", modes);
    merger.resolve(cmd->get_option("--epochs"), "epochs", cfg.nd.epochs);
    merger.resolve(cmd->get_option("--ad-epochs"), "ad_epochs", cfg.ad.train.epochs);
    merger.resolve(cmd->get_option("--alpha"), "alpha", cfg.nd.margin_alpha);
    merger.resolve(cmd->get_option("--k"), "k", cfg.cata_k);
    merger.resolve(cmd->get_option("--ad-quantile"), "ad_quantile", cfg.ad.threshold_quantile);
    merger.resolve(cmd->get_option("--nd-quantile"), "nd_quantile", cfg.nd_threshold_quantile);
    merger.resolve(cmd->get_option("--graph-seed"), "graph_seed", cfg.graph_seed);
    json schema_json = file_cfg.contains("schema") ? file_cfg.at("schema") : json();
    merger.note("schema", schema_json.is_null() ? json::object() : schema_json);
    merger.reject_unknown_keys();
    print_resolved("eval-holdout", merger.resolved());

    if (modes == "metric") cfg.recon_mode = false;
    else if (modes == "recon") cfg.metric_mode = false;
    else if (modes != "both") throw CLI::ValidationError("--modes", "must be both|metric|recon");

    const auto schema = schema_from(merger, schema_json, common.map_flags);
    auto records = load_flows(in_path, schema);
    require_output_dir(out_path);
    if (!cata_out.empty()) require_output_dir(cata_out);

    auto report = zdt::run_holdout_experiment(records, cfg, &std::cout);
    write_file(out_path, [&](std::ostream& out) { zdt::write_holdout_report_csv(out, report); });
    if (!cata_out.empty())
        write_file(cata_out,
                   [&](std::ostream& out) { zdt::write_cata_distribution_csv(out, report); });
    std::cout << "holdout experiment report written to " << out_path << "\n";
    return 0;
}

int cmd_knn_sweep(const CommonArgs& common, CLI::App* cmd) {
    const json file_cfg = load_config_file(common.config_path);
    ConfigMerger merger(file_cfg);
    std::string in_path, out_path, modes = "both";
    zdt::KnnSweepConfig cfg;
    merger.resolve(cmd->get_option("--in"), "in", in_path);
    merger.resolve(cmd->get_option("--out"), "out", out_path);
    merger.resolve(cmd->get_option("--ks"), "ks", cfg.ks);
    merger.resolve(cmd->get_option("--seeds"), "seeds", cfg.seeds);
    merger.resolve(cmd->get_option("--modes"), "modes", modes);
    merger.resolve(cmd->get_option("--test-fraction"), "test_fraction", cfg.test_fraction);
    merger.resolve(cmd->get_option("--epochs"), "epochs", cfg.nd.epochs);
    merger.resolve(cmd->get_option("--alpha"), "alpha", cfg.nd.margin_alpha);
    merger.resolve(cmd->get_option("--graph-seed"), "graph_seed", cfg.graph_seed);
    json schema_json = file_cfg.contains("schema") ? file_cfg.at("schema") : json();
    merger.note("schema", schema_json.is_null() ? json::object() : schema_json);
    merger.reject_unknown_keys();
    print_resolved("knn-sweep", merger.resolved());

    if (modes == "metric") cfg.recon_mode = false;
    else if (modes == "recon") cfg.metric_mode = false;
    else if (modes != "both") throw CLI::ValidationError("--modes", "must be both|metric|recon");

    const auto schema = schema_from(merger, schema_json, common.map_flags);
    auto records = load_flows(in_path, schema);
    require_output_dir(out_path);

    auto rows = zdt::run_knn_sweep(records, cfg, &std::cout);
    write_file(out_path, [&](std::ostream& out) { zdt::write_knn_sweep_csv(out, rows); });
    std::cout << "knn sweep written to " << out_path << "\n";
    return 0;
}

int cmd_export_latent(const CommonArgs& common, CLI::App* cmd) {
    const json file_cfg = load_config_file(common.config_path);
    ConfigMerger merger(file_cfg);
    std::string bundle_path, in_path, out_path;
    std::uint64_t graph_seed = 1;
    merger.resolve(cmd->get_option("--bundle"), "bundle", bundle_path);
    merger.resolve(cmd->get_option("--in"), "in", in_path);
    merger.resolve(cmd->get_option("--out"), "out", out_path);
    merger.resolve(cmd->get_option("--graph-seed"), "graph_seed", graph_seed);
    json schema_json = file_cfg.contains("schema") ? file_cfg.at("schema") : json();
    merger.note("schema", schema_json.is_null() ? json::object() : schema_json);
    merger.reject_unknown_keys();
    print_resolved("export-latent", merger.resolved());

    const auto schema = schema_from(merger, schema_json, common.map_flags);
    auto records = load_flows(in_path, schema);
    require_input(bundle_path);
    require_output_dir(out_path);

    zdt::Bundle bundle = zdt::load_bundle(bundle_path);
    if (!bundle.nd) throw zdt::DataError("bundle has no novelty detector");

    auto artifacts = zdt::compute_graph_artifacts(records, graph_seed);
    Eigen::MatrixXd features = zdt::build_feature_matrix(records, artifacts);
    std::vector<std::string> labels;
    for (const auto& r : records) labels.push_back(r.label.empty() ? "unlabeled" : r.label);

    write_file(out_path, [&](std::ostream& out) {
        zdt::export_latent_csv(out, *bundle.nd, features, labels);
    });
    std::cout << "latent export written to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zdt - zero-day-threat detection with dual autoencoders and metric learning"};
    app.require_subcommand(1);

    CommonArgs common;
    app.add_option("--config", common.config_path, "JSON config file (CLI flags take precedence)");

    auto add_map = [&](CLI::App* cmd) {
        cmd->add_option("--map", common.map_flags,
                        "remap a canonical flow field to a CSV column, e.g. --map ts=Timestamp");
    };

    CLI::App* synth = app.add_subcommand("synth", "generate a labeled synthetic flow CSV");
    synth->add_option("--out", "output flow CSV")->required();
    synth->add_option("--seed", "rng seed");
    synth->add_option("--hosts", "number of hosts");
    synth->add_option("--benign", "benign flow count");
    synth->add_option("--scanning", "scanning flow count");
    synth->add_option("--botnet", "botnet flow count");
    synth->add_option("--exfil", "exfil flow count");
    synth->add_option("--c2", "c2 flow count");
    synth->add_option("--port-spread", "fraction of the port range scans sweep");
    synth->add_option("--byte-asymmetry", "exfil fwd/bwd byte ratio scale");
    synth->add_option("--fan-out", "cap on distinct scan targets (0 = all hosts)");
    synth->add_option("--beacon-period", "seconds between botnet beacons");

    CLI::App* feat = app.add_subcommand("featurize", "assemble 24-d feature vectors from flows");
    feat->add_option("--in", "input flow CSV")->required();
    feat->add_option("--out", "output feature CSV")->required();
    feat->add_option("--hosts-out", "optional per-host graph feature CSV");
    feat->add_option("--graph-seed", "community detection seed");
    add_map(feat);

    CLI::App* tad = app.add_subcommand("train-ad", "train the anomaly detector on benign flows");
    tad->add_option("--in", "input flow CSV (benign rows are used)")->required();
    tad->add_option("--out", "output bundle path")->required();
    tad->add_option("--seed", "training seed");
    tad->add_option("--graph-seed", "community detection seed");
    tad->add_option("--epochs", "max training epochs");
    tad->add_option("--batch-size", "minibatch size");
    tad->add_option("--lr", "Adam learning rate");
    tad->add_option("--quantile", "benign validation loss quantile for the threshold");
    tad->add_option("--val-fraction", "validation split fraction");
    tad->add_option("--widths", "encoder widths, e.g. 24,16,8,5")->delimiter(',');
    add_map(tad);

    CLI::App* tnd =
        app.add_subcommand("train-nd", "train the novelty detector on labeled attack flows");
    tnd->add_option("--in", "input flow CSV (attack rows are used)")->required();
    tnd->add_option("--ad", "bundle holding the trained anomaly detector")->required();
    tnd->add_option("--out", "output bundle path")->required();
    tnd->add_option("--seed", "training seed");
    tnd->add_option("--graph-seed", "community detection seed");
    tnd->add_option("--epochs", "training epochs");
    tnd->add_option("--batch-size", "triplet batch size");
    tnd->add_option("--lr", "Adam learning rate");
    tnd->add_option("--alpha", "triplet margin");
    tnd->add_option("--beta", "reconstruction loss weight (default: 1)");
    tnd->add_option("--gamma", "triplet loss weight (default: auto-balanced)");
    tnd->add_flag("--no-metric-learning", "force gamma = 0 (reconstruction-only training)");
    tnd->add_option("--quantile", "attack validation loss quantile for the threshold");
    tnd->add_option("--val-fraction", "validation split fraction");
    tnd->add_option("--k", "CATA nearest-neighbor count");
    tnd->add_option("--collapse-epsilon", "active-dimension variance threshold");
    tnd->add_option("--widths", "encoder widths, e.g. 24,16,8,5")->delimiter(',');
    tnd->add_option("--holdout", "exclude this attack class from training");
    add_map(tnd);

    CLI::App* score = app.add_subcommand("score", "run inference and write verdicts");
    score->add_option("--bundle", "trained bundle")->required();
    score->add_option("--in", "input flow CSV")->required();
    score->add_option("--out", "output verdict CSV")->required();
    score->add_option("--graph-seed", "community detection seed");
    score->add_option("--scaler", "refit|reuse the min-max scaler on the scored capture");
    add_map(score);

    CLI::App* ehold = app.add_subcommand("eval-holdout", "holdout-class ZDT evaluation protocol");
    ehold->add_option("--in", "input labeled flow CSV")->required();
    ehold->add_option("--out", "metrics report CSV")->required();
    ehold->add_option("--cata-out", "CATA distribution CSV");
    ehold->add_option("--holdout", "attack class treated as the zero-day");
    ehold->add_option("--seeds", "training seeds, e.g. 1,2,3,4,5")->delimiter(',');
    ehold->add_option("--max-holdout-frac", "max holdout share of the eval set");
    ehold->add_option("--eval-fraction", "share of rows reserved for evaluation");
    ehold->add_option("--modes", "both|metric|recon");
    ehold->add_option("--epochs", "ND training epochs");
    ehold->add_option("--ad-epochs", "AD training epochs");
    ehold->add_option("--alpha", "triplet margin");
    ehold->add_option("--k", "CATA nearest-neighbor count");
    ehold->add_option("--ad-quantile", "AD threshold quantile");
    ehold->add_option("--nd-quantile", "ND threshold quantile");
    ehold->add_option("--graph-seed", "community detection seed");
    add_map(ehold);

    CLI::App* sweep = app.add_subcommand("knn-sweep", "latent kNN accuracy across k values");
    sweep->add_option("--in", "input labeled flow CSV")->required();
    sweep->add_option("--out", "sweep CSV")->required();
    sweep->add_option("--ks", "k values, e.g. 1,2,5,10,20,50,100")->delimiter(',');
    sweep->add_option("--seeds", "training seeds")->delimiter(',');
    sweep->add_option("--modes", "both|metric|recon");
    sweep->add_option("--test-fraction", "per-class test split fraction");
    sweep->add_option("--epochs", "ND training epochs");
    sweep->add_option("--alpha", "triplet margin");
    sweep->add_option("--graph-seed", "community detection seed");
    add_map(sweep);

    CLI::App* exl = app.add_subcommand("export-latent", "export ND latent coordinates with labels");
    exl->add_option("--bundle", "trained bundle")->required();
    exl->add_option("--in", "input flow CSV")->required();
    exl->add_option("--out", "latent CSV")->required();
    exl->add_option("--graph-seed", "community detection seed");
    add_map(exl);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (synth->parsed()) return cmd_synth(common, synth);
        if (feat->parsed()) return cmd_featurize(common, feat);
        if (tad->parsed()) return cmd_train_ad(common, tad);
        if (tnd->parsed()) return cmd_train_nd(common, tnd);
        if (score->parsed()) return cmd_score(common, score);
        if (ehold->parsed()) return cmd_eval_holdout(common, ehold);
        if (sweep->parsed()) return cmd_knn_sweep(common, sweep);
        if (exl->parsed()) return cmd_export_latent(common, exl);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const zdt::NumericError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const zdt::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
