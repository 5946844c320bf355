#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "zdt/eval.hpp"

using namespace zdt;

namespace {

std::vector<Verdict> verdicts_from(const std::vector<Category>& cats) {
    std::vector<Verdict> v(cats.size());
    for (std::size_t i = 0; i < cats.size(); ++i) {
        v[i].record_id = static_cast<std::int64_t>(i);
        v[i].category = cats[i];
    }
    return v;
}

// Brute-force AUC over all positive-negative pairs (ties count half).
double pairwise_auc(const std::vector<double>& scores, const std::vector<bool>& truth) {
    double wins = 0.0;
    long pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (!truth[i]) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (truth[j]) continue;
            ++pairs;
            if (scores[i] > scores[j]) wins += 1.0;
            else if (scores[i] == scores[j]) wins += 0.5;
        }
    }
    return wins / static_cast<double>(pairs);
}

SyntheticConfig small_synth(std::uint64_t seed) {
    SyntheticConfig cfg;
    cfg.host_count = 80;
    cfg.counts = {{"benign", 2500}, {"scanning", 500}, {"botnet", 500}, {"exfil", 500}, {"c2", 260}};
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("precision and recall follow the confusion counts") {
    // TP=3, FP=1, FN=2, TN=1.
    auto v = verdicts_from({Category::Zdt, Category::Zdt, Category::Zdt, Category::Zdt,
                            Category::Benign, Category::Benign, Category::KnownAttack});
    std::vector<bool> truth = {true, true, true, false, true, false, true};
    auto pr = precision_recall(v, truth);
    CHECK(pr.tp == 3);
    CHECK(pr.fp == 1);
    CHECK(pr.fn == 2);
    CHECK(pr.precision == doctest::Approx(0.75));
    CHECK(pr.recall == doctest::Approx(0.6));
    CHECK_FALSE(pr.no_predicted_positives);

    // Recomputing from the reported confusion matrix matches exactly.
    CHECK(pr.precision == static_cast<double>(pr.tp) / (pr.tp + pr.fp));
    CHECK(pr.recall == static_cast<double>(pr.tp) / (pr.tp + pr.fn));
}

TEST_CASE("degenerate cases report zero with a flag") {
    auto none = precision_recall(verdicts_from({Category::Benign, Category::Benign}),
                                 {true, false});
    CHECK(none.precision == 0.0);
    CHECK(none.recall == 0.0);
    CHECK(none.no_predicted_positives);

    auto perfect = precision_recall(verdicts_from({Category::Zdt, Category::Benign}),
                                    {true, false});
    CHECK(perfect.precision == 1.0);
    CHECK(perfect.recall == 1.0);

    CHECK_THROWS_AS(precision_recall({}, {true}), DataError);
}

TEST_CASE("roc auc handles separation, ties and the worked example") {
    CHECK(roc_auc({0.1, 0.2, 0.8, 0.9}, {false, false, true, true}) == doctest::Approx(1.0));
    CHECK(roc_auc({0.5, 0.5, 0.5, 0.5}, {false, true, false, true}) == doctest::Approx(0.5));
    // Positives {0.9, 0.4}, negatives {0.5, 0.1}: wins 3 of 4 pairs.
    const std::vector<double> scores = {0.9, 0.4, 0.5, 0.1};
    const std::vector<bool> truth = {true, true, false, false};
    CHECK(roc_auc(scores, truth) == doctest::Approx(0.75));
    CHECK(roc_auc(scores, truth) == doctest::Approx(pairwise_auc(scores, truth)));
    CHECK_THROWS_AS(roc_auc({0.1, 0.2}, {true, true}), DataError);
}

TEST_CASE("roc auc is invariant under strictly monotone transforms and shuffles") {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    std::vector<double> scores;
    std::vector<bool> truth;
    for (int i = 0; i < 200; ++i) {
        scores.push_back(dist(rng));
        truth.push_back(dist(rng) < 0.3);
    }
    if (std::count(truth.begin(), truth.end(), true) == 0) truth[0] = true;
    if (std::count(truth.begin(), truth.end(), false) == 0) truth[1] = false;
    const double base = roc_auc(scores, truth);
    CHECK(base == doctest::Approx(pairwise_auc(scores, truth)));

    std::vector<double> warped;
    for (double s : scores) warped.push_back(std::exp(3.0 * s) + 7.0);
    CHECK(roc_auc(warped, truth) == doctest::Approx(base));

    std::vector<std::size_t> perm(scores.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> s2;
    std::vector<bool> t2;
    for (auto i : perm) {
        s2.push_back(scores[i]);
        t2.push_back(truth[i]);
    }
    CHECK(roc_auc(s2, t2) == doctest::Approx(base));
}

TEST_CASE("generator honors requested counts and is seed-deterministic") {
    auto cfg = small_synth(7);
    auto a = generate_synthetic_dataset(cfg);
    auto b = generate_synthetic_dataset(cfg);
    REQUIRE(a.size() == b.size());
    CHECK(a.size() == 2500 + 500 + 500 + 500 + 260);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

    std::map<std::string, int> counted;
    for (const auto& r : a) counted[r.label]++;
    CHECK(counted["benign"] == 2500);
    CHECK(counted["scanning"] == 500);
    CHECK(counted["botnet"] == 500);
    CHECK(counted["exfil"] == 500);
    CHECK(counted["c2"] == 260);

    auto different = generate_synthetic_dataset(small_synth(8));
    CHECK(different != a);

    CHECK_THROWS_AS(generate_synthetic_dataset([] {
                        auto bad = SyntheticConfig{};
                        bad.counts["ufo"] = 10;
                        return bad;
                    }()),
                    DataError);
}

TEST_CASE("scanning source tops the benign out-degree distribution") {
    auto records = generate_synthetic_dataset(small_synth(21));
    auto g = build_graph(records);

    std::set<std::string> scan_srcs, benign_hosts;
    for (const auto& r : records) {
        if (r.label == "scanning") scan_srcs.insert(r.src_ip);
        else if (r.label == "benign") {
            benign_hosts.insert(r.src_ip);
            benign_hosts.insert(r.dst_ip);
        }
    }
    std::vector<double> benign_out;
    for (const auto& h : benign_hosts) {
        if (scan_srcs.count(h)) continue;
        const int idx = g.index_of(h);
        if (idx >= 0) benign_out.push_back(static_cast<double>(g.out_edges(idx).size()));
    }
    std::sort(benign_out.begin(), benign_out.end());
    const double p95 = benign_out[static_cast<std::size_t>(0.95 * (benign_out.size() - 1))];
    for (const auto& h : scan_srcs)
        CHECK(static_cast<double>(g.out_edges(g.index_of(h)).size()) > p95);
}

TEST_CASE("holdout experiment respects shape, caps and training hygiene") {
    auto records = generate_synthetic_dataset(small_synth(3));
    HoldoutConfig cfg;
    cfg.holdout_class = "botnet";
    cfg.seeds = {1, 2};
    cfg.ad.train.epochs = 8;
    cfg.nd.epochs = 8;
    auto report = run_holdout_experiment(records, cfg);

    // 2 modes x 2 seeds.
    REQUIRE(report.runs.size() == 4);
    std::set<std::string> modes;
    for (const auto& run : report.runs) {
        modes.insert(run.mode);
        CHECK(run.eval_holdout_fraction < 0.02);
        CHECK(run.eval_holdout_fraction > 0.0);
        CHECK(run.nd_train_holdout_rows == 0);
        CHECK(run.precision >= 0.0);
        CHECK(run.precision <= 1.0);
        CHECK(run.recall >= 0.0);
        CHECK(run.recall <= 1.0);
        CHECK(run.auc >= 0.0);
        CHECK(run.auc <= 1.0);
        if (!run.cata_distribution.empty()) {
            double total = 0.0;
            for (const auto& [cls, p] : run.cata_distribution) {
                CHECK(cls != "botnet");  // only trained classes can be predicted
                total += p;
            }
            CHECK(total == doctest::Approx(1.0));
        }
    }
    CHECK(modes == std::set<std::string>{"metric", "recon"});

    std::ostringstream csv_out;
    write_holdout_report_csv(csv_out, report);
    CHECK(csv_out.str().rfind("seed,mode,holdout,precision,recall,auc\n", 0) == 0);

    std::ostringstream cata_out;
    write_cata_distribution_csv(cata_out, report);
    CHECK(cata_out.str().rfind("holdout,predicted_class,probability\n", 0) == 0);

    HoldoutConfig missing = cfg;
    missing.holdout_class = "ransomware";
    CHECK_THROWS_AS(run_holdout_experiment(records, missing), DataError);
}

TEST_CASE("knn sweep is exact on perfectly clustered latents") {
    NoveltyDetector nd;
    nd.net = Autoencoder::make({4, 3, 2}, 1);
    // Bypass training: craft the reference directly and a scaler with
    // lambda 1 so transform_nd is plain standardization.
    nd.scaler.mean = Eigen::VectorXd::Zero(4);
    nd.scaler.std = Eigen::VectorXd::Ones(4);
    nd.scaler.lambda = Eigen::VectorXd::Ones(4);
    std::mt19937_64 rng(2);
    std::normal_distribution<double> noise(0.0, 0.01);
    Eigen::MatrixXd test(30, 4);
    std::vector<int> test_cls(30);
    for (int i = 0; i < 30; ++i) {
        test_cls[i] = i % 3;
        for (int j = 0; j < 4; ++j) test(i, j) = 10.0 * test_cls[i] + noise(rng);
    }
    // Reference = encoded well-separated clusters around the same centers.
    Eigen::MatrixXd ref_raw(60, 4);
    std::vector<int> ref_cls(60);
    for (int i = 0; i < 60; ++i) {
        ref_cls[i] = i % 3;
        for (int j = 0; j < 4; ++j) ref_raw(i, j) = 10.0 * ref_cls[i] + noise(rng);
    }
    nd.ref_embeddings = nd.net.encode(ref_raw);
    nd.ref_classes = ref_cls;
    nd.class_names = {"a", "b", "c"};
    nd.k = 10;

    auto sweep = knn_accuracy_sweep(nd, test, test_cls, {1, 5, 10});
    REQUIRE(sweep.size() == 3);
    CHECK(sweep[0].first == 1);
    CHECK(sweep[0].second == doctest::Approx(1.0));
    for (const auto& [k, acc] : sweep) {
        CHECK(acc >= 0.0);
        CHECK(acc <= 1.0);
    }
    CHECK_THROWS_AS(knn_accuracy_sweep(nd, test, test_cls, {0}), DataError);
    CHECK_THROWS_AS(knn_accuracy_sweep(nd, test, test_cls, {61}), DataError);
}

TEST_CASE("shuffling eval rows leaves metrics unchanged") {
    std::mt19937_64 rng(44);
    std::vector<Category> cats;
    std::vector<bool> truth;
    for (int i = 0; i < 300; ++i) {
        const int r = static_cast<int>(rng() % 3);
        cats.push_back(r == 0 ? Category::Zdt : (r == 1 ? Category::Benign : Category::KnownAttack));
        truth.push_back(rng() % 4 == 0);
    }
    auto v = verdicts_from(cats);
    auto base = precision_recall(v, truth);

    std::vector<std::size_t> perm(cats.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Category> cats2;
    std::vector<bool> truth2;
    for (auto i : perm) {
        cats2.push_back(cats[i]);
        truth2.push_back(truth[i]);
    }
    auto shuffled = precision_recall(verdicts_from(cats2), truth2);
    CHECK(base.precision == shuffled.precision);
    CHECK(base.recall == shuffled.recall);
    CHECK(base.tp == shuffled.tp);
}

}  // TEST_SUITE
