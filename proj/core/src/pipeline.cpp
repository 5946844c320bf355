#include "zdt/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "zdt/csv.hpp"

namespace zdt {

const char* category_name(Category c) {
    switch (c) {
        case Category::Benign: return "benign";
        case Category::KnownAttack: return "known_attack";
        case Category::Zdt: return "zdt";
    }
    return "?";
}

double select_threshold(std::vector<double> losses, double quantile) {
    if (losses.empty()) throw DataError("select_threshold: no losses");
    if (!(quantile > 0.0 && quantile < 1.0))
        throw DataError("select_threshold: quantile must be in (0,1)");
    std::sort(losses.begin(), losses.end());
    const double h = quantile * static_cast<double>(losses.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(h);
    if (lo + 1 >= losses.size()) return losses.back();
    const double frac = h - static_cast<double>(lo);
    return losses[lo] + frac * (losses[lo + 1] - losses[lo]);
}

AnomalyDetector train_anomaly_detector(const Eigen::MatrixXd& benign_features,
                                       const AdTrainConfig& config, std::ostream* log) {
    const Eigen::Index n = benign_features.rows();
    if (n < 2) throw DataError("train_anomaly_detector: need at least 2 benign rows");

    // Deterministic shuffled train/validation split.
    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(config.seed);
    std::shuffle(order.begin(), order.end(), rng);
    Eigen::Index n_val = static_cast<Eigen::Index>(std::round(config.val_fraction * n));
    n_val = std::clamp<Eigen::Index>(n_val, 1, n - 1);
    const Eigen::Index n_train = n - n_val;

    Eigen::MatrixXd train(n_train, benign_features.cols());
    Eigen::MatrixXd val(n_val, benign_features.cols());
    for (Eigen::Index i = 0; i < n_train; ++i) train.row(i) = benign_features.row(order[i]);
    for (Eigen::Index i = 0; i < n_val; ++i) val.row(i) = benign_features.row(order[n_train + i]);

    AnomalyDetector ad;
    ad.scaler = fit_minmax(train);
    Eigen::MatrixXd train_n = transform_minmax(train, ad.scaler);
    Eigen::MatrixXd val_n = transform_minmax(val, ad.scaler);

    ad.net = Autoencoder::make(config.encoder_widths, config.seed);
    AeTrainConfig tc = config.train;
    tc.seed = config.seed;
    train_autoencoder(ad.net, train_n, val_n, tc, log);

    Eigen::VectorXd val_losses = reconstruction_losses(ad.net, val_n);
    ad.threshold = select_threshold(
        std::vector<double>(val_losses.data(), val_losses.data() + val_losses.size()),
        config.threshold_quantile);
    if (!(ad.threshold > 0.0) || !std::isfinite(ad.threshold))
        throw NumericError("train_anomaly_detector: degenerate loss threshold");
    return ad;
}

GraphArtifacts compute_graph_artifacts(const std::vector<FlowRecord>& records, std::uint64_t seed) {
    GraphArtifacts a;
    a.graph = build_graph(records);
    a.communities = detect_communities(a.graph, seed);
    a.host_features = compute_host_features(a.graph, a.communities);
    a.community_of = a.communities.by_host(a.graph);
    return a;
}

Eigen::MatrixXd build_feature_matrix(const std::vector<FlowRecord>& records,
                                     const GraphArtifacts& artifacts,
                                     std::vector<std::pair<std::size_t, std::string>>* bad_rows) {
    Eigen::MatrixXd out(records.size(), kFeatureDim);
    for (std::size_t i = 0; i < records.size(); ++i) {
        try {
            FeatureVector fv = assemble_features(records[i], static_cast<std::int64_t>(i),
                                                 artifacts.host_features, artifacts.community_of);
            for (int j = 0; j < kFeatureDim; ++j) out(i, j) = fv.values[j];
        } catch (const UnknownHostError& e) {
            if (!bad_rows) throw;
            bad_rows->push_back({i, e.what()});
            out.row(i).setZero();
        }
    }
    return out;
}

std::vector<std::pair<double, int>> nearest_neighbors(const Eigen::VectorXd& latent,
                                                      const Eigen::MatrixXd& ref_embeddings,
                                                      int k) {
    const int n = static_cast<int>(ref_embeddings.rows());
    if (n == 0) throw DataError("cata: empty reference set");
    if (k < 1 || k > n) throw DataError("cata: k must be in [1, reference size]");
    std::vector<std::pair<double, int>> dist(n);
    for (int i = 0; i < n; ++i)
        dist[i] = {(ref_embeddings.row(i).transpose() - latent).norm(), i};
    // Ties in distance resolve to the lower reference index.
    std::partial_sort(dist.begin(), dist.begin() + k, dist.end());
    dist.resize(k);
    return dist;
}

std::pair<int, double> cata_vote(const std::vector<std::pair<double, int>>& neighbors,
                                 const std::vector<int>& ref_classes, int k) {
    if (k < 1 || k > static_cast<int>(neighbors.size()))
        throw DataError("cata_vote: k exceeds the neighbor list");
    const int num_classes = 1 + *std::max_element(ref_classes.begin(), ref_classes.end());
    std::vector<int> count(num_classes, 0);
    std::vector<double> dist_sum(num_classes, 0.0);
    for (int i = 0; i < k; ++i) {
        const int c = ref_classes[neighbors[i].second];
        count[c] += 1;
        dist_sum[c] += neighbors[i].first;
    }
    int best = -1;
    for (int c = 0; c < num_classes; ++c) {
        if (count[c] == 0) continue;
        if (best < 0) {
            best = c;
            continue;
        }
        if (count[c] > count[best]) {
            best = c;
        } else if (count[c] == count[best]) {
            const double mean_c = dist_sum[c] / count[c];
            const double mean_b = dist_sum[best] / count[best];
            if (mean_c < mean_b) best = c;  // equal counts: closer class wins; else lower id kept
        }
    }
    return {best, static_cast<double>(count[best]) / static_cast<double>(k)};
}

std::pair<int, double> cata(const Eigen::VectorXd& latent, const Eigen::MatrixXd& ref_embeddings,
                            const std::vector<int>& ref_classes, int k) {
    return cata_vote(nearest_neighbors(latent, ref_embeddings, k), ref_classes, k);
}

std::vector<Verdict> infer(const std::vector<FlowRecord>& records, const GraphArtifacts& artifacts,
                           const AnomalyDetector& ad, const NoveltyDetector& nd) {
    std::vector<std::pair<std::size_t, std::string>> bad_rows;
    Eigen::MatrixXd raw = build_feature_matrix(records, artifacts, &bad_rows);
    std::map<std::size_t, std::string> bad;
    for (auto& [row, msg] : bad_rows) bad.emplace(row, std::move(msg));

    Eigen::MatrixXd ad_input = transform_minmax(raw, ad.scaler);
    Eigen::VectorXd ad_losses = reconstruction_losses(ad.net, ad_input);

    std::vector<Verdict> verdicts(records.size());
    std::vector<std::size_t> anomalous;
    for (std::size_t i = 0; i < records.size(); ++i) {
        Verdict& v = verdicts[i];
        v.record_id = static_cast<std::int64_t>(i);
        if (auto it = bad.find(i); it != bad.end()) {
            v.ingestion_error = true;
            v.error = it->second;
            continue;
        }
        v.ad_loss = ad_losses(i);
        if (v.ad_loss > ad.threshold) anomalous.push_back(i);
        // else benign: the record never reaches the ND
    }
    if (anomalous.empty()) return verdicts;

    // Anomalous records: renormalize the RAW vectors under the ND regime and
    // run the novelty detector over them as one batch.
    Eigen::MatrixXd raw_anom(anomalous.size(), raw.cols());
    for (std::size_t j = 0; j < anomalous.size(); ++j) raw_anom.row(j) = raw.row(anomalous[j]);
    Eigen::MatrixXd nd_input = transform_nd(raw_anom, nd.scaler);
    Eigen::MatrixXd latent = nd.net.encode(nd_input);
    Eigen::MatrixXd recon = predict(nd.net.decoder, latent);
    Eigen::VectorXd nd_losses = (recon - nd_input).array().square().rowwise().mean();

    for (std::size_t j = 0; j < anomalous.size(); ++j) {
        Verdict& v = verdicts[anomalous[j]];
        v.nd_loss = nd_losses(j);
        v.category = *v.nd_loss <= nd.threshold ? Category::KnownAttack : Category::Zdt;
        auto [cls, prob] = cata(latent.row(j).transpose(), nd.ref_embeddings, nd.ref_classes, nd.k);
        v.cata_class = nd.class_names.at(cls);
        v.cata_probability = prob;
    }
    return verdicts;
}

void write_verdicts_csv(std::ostream& out, const std::vector<Verdict>& verdicts) {
    out << "record_id,ad_loss,nd_loss,category,cata_class,cata_probability\n";
    for (const auto& v : verdicts) {
        std::vector<std::string> row;
        row.push_back(std::to_string(v.record_id));
        if (v.ingestion_error) {
            row.insert(row.end(), {"", "", "error", "", ""});
        } else {
            row.push_back(csv::format_double(v.ad_loss));
            row.push_back(v.nd_loss ? csv::format_double(*v.nd_loss) : "");
            row.push_back(category_name(v.category));
            row.push_back(v.cata_class.value_or(""));
            row.push_back(v.cata_probability ? csv::format_double(*v.cata_probability) : "");
        }
        csv::write_row(out, row);
    }
}

// ---------------------------------------------------------------------------
// Bundle serialization
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'Z', 'D', 'T', 'B'};
constexpr std::uint32_t kFormatVersion = 1;

enum class Section : std::uint32_t {
    AdNet = 1,
    AdScaler = 2,
    AdThreshold = 3,
    NdNet = 4,
    NdScaler = 5,
    NdThreshold = 6,
    NdReference = 7,
};

struct Writer {
    std::string buf;

    void u32(std::uint32_t v) { raw(&v, sizeof v); }
    void u64(std::uint64_t v) { raw(&v, sizeof v); }
    void f64(double v) { raw(&v, sizeof v); }
    void raw(const void* p, std::size_t n) { buf.append(static_cast<const char*>(p), n); }
    void str(const std::string& s) {
        u64(s.size());
        raw(s.data(), s.size());
    }
    void vec(const Eigen::VectorXd& v) {
        u64(static_cast<std::uint64_t>(v.size()));
        raw(v.data(), sizeof(double) * v.size());
    }
    void mat(const Eigen::MatrixXd& m) {
        u64(static_cast<std::uint64_t>(m.rows()));
        u64(static_cast<std::uint64_t>(m.cols()));
        raw(m.data(), sizeof(double) * m.size());
    }
};

struct ReadCursor {
    const std::string& buf;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > buf.size()) throw BundleTruncatedError("bundle truncated");
    }
    void raw(void* p, std::size_t n) {
        need(n);
        std::memcpy(p, buf.data() + pos, n);
        pos += n;
    }
    std::uint32_t u32() {
        std::uint32_t v;
        raw(&v, sizeof v);
        return v;
    }
    std::uint64_t u64() {
        std::uint64_t v;
        raw(&v, sizeof v);
        return v;
    }
    double f64() {
        double v;
        raw(&v, sizeof v);
        return v;
    }
    std::string str() {
        const std::uint64_t n = u64();
        need(n);
        std::string s(buf.data() + pos, n);
        pos += n;
        return s;
    }
    Eigen::VectorXd vec() {
        const std::uint64_t n = u64();
        Eigen::VectorXd v(n);
        raw(v.data(), sizeof(double) * n);
        return v;
    }
    Eigen::MatrixXd mat() {
        const std::uint64_t r = u64();
        const std::uint64_t c = u64();
        need(sizeof(double) * r * c);
        Eigen::MatrixXd m(r, c);
        raw(m.data(), sizeof(double) * r * c);
        return m;
    }
};

void write_network(Writer& w, const DenseNetwork& net) {
    w.u64(net.layers.size());
    for (const auto& layer : net.layers) {
        w.u32(layer.act == Activation::LeakyRelu ? 1 : 0);
        w.mat(layer.w);
        w.vec(layer.b);
    }
}

DenseNetwork read_network(ReadCursor& r) {
    DenseNetwork net;
    const std::uint64_t n = r.u64();
    for (std::uint64_t i = 0; i < n; ++i) {
        Layer layer;
        layer.act = r.u32() == 1 ? Activation::LeakyRelu : Activation::Linear;
        layer.w = r.mat();
        layer.b = r.vec();
        net.layers.push_back(std::move(layer));
    }
    return net;
}

void begin_section(Writer& w, Section s, const std::string& payload) {
    w.u32(static_cast<std::uint32_t>(s));
    w.str(payload);
}

}  // namespace

void save_bundle(const Bundle& bundle, const std::string& path) {
    Writer body;

    {
        Writer s;
        write_network(s, bundle.ad.net.encoder);
        write_network(s, bundle.ad.net.decoder);
        begin_section(body, Section::AdNet, s.buf);
    }
    {
        Writer s;
        s.vec(bundle.ad.scaler.min);
        s.vec(bundle.ad.scaler.max);
        begin_section(body, Section::AdScaler, s.buf);
    }
    {
        Writer s;
        s.f64(bundle.ad.threshold);
        begin_section(body, Section::AdThreshold, s.buf);
    }
    if (bundle.nd) {
        const NoveltyDetector& nd = *bundle.nd;
        {
            Writer s;
            write_network(s, nd.net.encoder);
            write_network(s, nd.net.decoder);
            begin_section(body, Section::NdNet, s.buf);
        }
        {
            Writer s;
            s.vec(nd.scaler.mean);
            s.vec(nd.scaler.std);
            s.vec(nd.scaler.lambda);
            begin_section(body, Section::NdScaler, s.buf);
        }
        {
            Writer s;
            s.f64(nd.threshold);
            begin_section(body, Section::NdThreshold, s.buf);
        }
        {
            Writer s;
            s.mat(nd.ref_embeddings);
            s.u64(nd.ref_classes.size());
            for (int c : nd.ref_classes) s.u32(static_cast<std::uint32_t>(c));
            s.u64(nd.class_names.size());
            for (const auto& name : nd.class_names) s.str(name);
            s.u32(static_cast<std::uint32_t>(nd.k));
            begin_section(body, Section::NdReference, s.buf);
        }
    }

    Writer file;
    file.raw(kMagic, 4);
    file.u32(kFormatVersion);
    file.u64(feature_layout_checksum());
    file.u64(body.buf.size());
    file.raw(body.buf.data(), body.buf.size());
    file.u64(fnv1a64(body.buf.data(), body.buf.size()));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open bundle for writing: " + path);
    out.write(file.buf.data(), static_cast<std::streamsize>(file.buf.size()));
    if (!out.flush()) throw DataError("bundle write failure: " + path);
}

Bundle load_bundle(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open bundle: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string file = ss.str();

    ReadCursor r{file};
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw BundleVersionError("not a detector bundle: bad magic bytes");
    const std::uint32_t version = r.u32();
    if (version != kFormatVersion)
        throw BundleVersionError("unsupported bundle format version " + std::to_string(version) +
                                 " (expected " + std::to_string(kFormatVersion) + ")");
    const std::uint64_t layout = r.u64();
    if (layout != feature_layout_checksum())
        throw BundleLayoutError("bundle was built for a different feature layout");
    const std::uint64_t body_size = r.u64();
    r.need(body_size + sizeof(std::uint64_t));
    const std::string body = file.substr(r.pos, body_size);
    r.pos += body_size;
    const std::uint64_t checksum = r.u64();
    if (checksum != fnv1a64(body.data(), body.size()))
        throw BundleChecksumError("bundle content checksum mismatch");

    Bundle bundle;
    bool have_ad_net = false, have_ad_scaler = false, have_ad_threshold = false;
    NoveltyDetector nd;
    bool have_nd = false;
    ReadCursor rb{body};
    while (rb.pos < body.size()) {
        const auto section = static_cast<Section>(rb.u32());
        const std::string payload = rb.str();
        ReadCursor rs{payload};
        switch (section) {
            case Section::AdNet:
                bundle.ad.net.encoder = read_network(rs);
                bundle.ad.net.decoder = read_network(rs);
                have_ad_net = true;
                break;
            case Section::AdScaler:
                bundle.ad.scaler.min = rs.vec();
                bundle.ad.scaler.max = rs.vec();
                have_ad_scaler = true;
                break;
            case Section::AdThreshold:
                bundle.ad.threshold = rs.f64();
                have_ad_threshold = true;
                break;
            case Section::NdNet:
                nd.net.encoder = read_network(rs);
                nd.net.decoder = read_network(rs);
                have_nd = true;
                break;
            case Section::NdScaler:
                nd.scaler.mean = rs.vec();
                nd.scaler.std = rs.vec();
                nd.scaler.lambda = rs.vec();
                break;
            case Section::NdThreshold:
                nd.threshold = rs.f64();
                break;
            case Section::NdReference: {
                nd.ref_embeddings = rs.mat();
                const std::uint64_t n = rs.u64();
                nd.ref_classes.resize(n);
                for (std::uint64_t i = 0; i < n; ++i)
                    nd.ref_classes[i] = static_cast<int>(rs.u32());
                const std::uint64_t m = rs.u64();
                nd.class_names.resize(m);
                for (std::uint64_t i = 0; i < m; ++i) nd.class_names[i] = rs.str();
                nd.k = static_cast<int>(rs.u32());
                break;
            }
        }
    }
    if (!have_ad_net || !have_ad_scaler || !have_ad_threshold)
        throw DataError("bundle is missing anomaly-detector sections");
    if (have_nd) bundle.nd = std::move(nd);
    return bundle;
}

Eigen::MatrixXd pca_project(const Eigen::MatrixXd& data, int components) {
    const Eigen::Index n = data.rows();
    if (n < 1) throw DataError("pca_project: empty data");
    Eigen::RowVectorXd mean = data.colwise().mean();
    Eigen::MatrixXd centered = data.rowwise() - mean;
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    // Eigenvalues ascend; take the top `components` columns in descending
    // order and fix each axis sign by its largest-magnitude coefficient.
    Eigen::MatrixXd axes(data.cols(), components);
    for (int j = 0; j < components; ++j) {
        Eigen::VectorXd axis = solver.eigenvectors().col(data.cols() - 1 - j);
        Eigen::Index arg;
        axis.cwiseAbs().maxCoeff(&arg);
        if (axis(arg) < 0.0) axis = -axis;
        axes.col(j) = axis;
    }
    return centered * axes;
}

void export_latent_csv(std::ostream& out, const NoveltyDetector& nd,
                       const Eigen::MatrixXd& raw_features, const std::vector<std::string>& labels) {
    if (static_cast<std::size_t>(raw_features.rows()) != labels.size())
        throw DataError("export_latent_csv: label count mismatch");
    Eigen::MatrixXd latent = nd.net.encode(transform_nd(raw_features, nd.scaler));
    const int latent_dim = static_cast<int>(latent.cols());
    const int pca_dims = std::min<int>(3, latent_dim);
    Eigen::MatrixXd pca = pca_project(latent, pca_dims);

    for (int j = 0; j < latent_dim; ++j) out << "z" << j << ',';
    for (int j = 0; j < pca_dims; ++j) out << "pca" << j << ',';
    out << "label\n";
    for (Eigen::Index i = 0; i < latent.rows(); ++i) {
        std::vector<std::string> row;
        for (int j = 0; j < latent_dim; ++j) row.push_back(csv::format_double(latent(i, j)));
        for (int j = 0; j < pca_dims; ++j) row.push_back(csv::format_double(pca(i, j)));
        row.push_back(labels[i]);
        csv::write_row(out, row);
    }
}

}  // namespace zdt
