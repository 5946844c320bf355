#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

const fs::path& work_dir() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "zdt_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    const fs::path out_file = work_dir() / ("stdout_" + std::to_string(counter++) + ".txt");
    const std::string cmd =
        std::string(ZDT_CLI_PATH) + " " + args + " > " + out_file.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file);
    std::stringstream ss;
    ss << in.rdbuf();
    result.output = ss.str();
    return result;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string synth_args(const fs::path& out, int seed) {
    return "synth --out " + out.string() + " --seed " + std::to_string(seed) +
           " --hosts 60 --benign 1500 --scanning 300 --botnet 300 --exfil 300 --c2 150";
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("synth is deterministic per seed") {
    const fs::path a = work_dir() / "synth_a.csv";
    const fs::path b = work_dir() / "synth_b.csv";
    auto ra = run_cli(synth_args(a, 7));
    auto rb = run_cli(synth_args(b, 7));
    REQUIRE(ra.exit_code == 0);
    REQUIRE(rb.exit_code == 0);
    CHECK(ra.output.find("resolved-config") != std::string::npos);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).rfind("ts,src_ip,dst_ip,src_port,dst_port,duration,fwd_bytes,bwd_bytes,label",
                         0) == 0);

    const fs::path c = work_dir() / "synth_c.csv";
    run_cli(synth_args(c, 8));
    CHECK(slurp(a) != slurp(c));
}

TEST_CASE("full train and score workflow produces a verdict csv") {
    const fs::path flows = work_dir() / "flows.csv";
    REQUIRE(run_cli(synth_args(flows, 3)).exit_code == 0);

    const fs::path ad = work_dir() / "ad.bundle";
    auto r1 = run_cli("train-ad --in " + flows.string() + " --out " + ad.string() +
                      " --seed 1 --epochs 6");
    REQUIRE(r1.exit_code == 0);
    CHECK(r1.output.find("ignoring") != std::string::npos);  // attack rows skipped

    const fs::path model = work_dir() / "model.bundle";
    auto r2 = run_cli("train-nd --in " + flows.string() + " --ad " + ad.string() + " --out " +
                      model.string() + " --seed 1 --epochs 6");
    REQUIRE(r2.exit_code == 0);
    CHECK(r2.output.find("\"active_dims\"") != std::string::npos);  // per-epoch log lines

    const fs::path verdicts = work_dir() / "verdicts.csv";
    auto r3 = run_cli("score --bundle " + model.string() + " --in " + flows.string() + " --out " +
                      verdicts.string());
    REQUIRE(r3.exit_code == 0);
    const std::string csv = slurp(verdicts);
    CHECK(csv.rfind("record_id,ad_loss,nd_loss,category,cata_class,cata_probability", 0) == 0);
    CHECK(csv.find("benign") != std::string::npos);

    // Scoring twice is deterministic.
    const fs::path verdicts2 = work_dir() / "verdicts2.csv";
    REQUIRE(run_cli("score --bundle " + model.string() + " --in " + flows.string() + " --out " +
                    verdicts2.string())
                .exit_code == 0);
    CHECK(slurp(verdicts) == slurp(verdicts2));

    // export-latent over the same bundle.
    const fs::path latents = work_dir() / "latents.csv";
    auto r4 = run_cli("export-latent --bundle " + model.string() + " --in " + flows.string() +
                      " --out " + latents.string());
    REQUIRE(r4.exit_code == 0);
    CHECK(slurp(latents).rfind("z0,z1,z2,z3,z4,pca0,pca1,pca2,label", 0) == 0);

    // Scoring with an AD-only bundle is a data error.
    auto r5 = run_cli("score --bundle " + ad.string() + " --in " + flows.string() + " --out " +
                      (work_dir() / "x.csv").string());
    CHECK(r5.exit_code == 2);
}

TEST_CASE("no-metric-learning forces gamma to zero") {
    const fs::path flows = work_dir() / "flows_nm.csv";
    REQUIRE(run_cli(synth_args(flows, 5)).exit_code == 0);
    const fs::path ad = work_dir() / "ad_nm.bundle";
    REQUIRE(run_cli("train-ad --in " + flows.string() + " --out " + ad.string() +
                    " --seed 1 --epochs 4")
                .exit_code == 0);
    auto r = run_cli("train-nd --in " + flows.string() + " --ad " + ad.string() + " --out " +
                     (work_dir() / "m_nm.bundle").string() +
                     " --seed 1 --epochs 4 --no-metric-learning");
    REQUIRE(r.exit_code == 0);
    CHECK(r.output.find("gamma=0") != std::string::npos);
}

TEST_CASE("flag beats config file beats built-in default") {
    const fs::path cfg = work_dir() / "cfg.json";
    {
        std::ofstream out(cfg);
        out << R"({"seed": 5})";
    }
    const fs::path out1 = work_dir() / "p1.csv";
    auto builtin = run_cli("synth --out " + out1.string() +
                           " --hosts 60 --benign 200 --scanning 50 --botnet 50 --exfil 50 --c2 50");
    CHECK(builtin.output.find("\"seed\":1") != std::string::npos);

    auto from_file = run_cli("--config " + cfg.string() + " synth --out " + out1.string() +
                             " --hosts 60 --benign 200 --scanning 50 --botnet 50 --exfil 50 --c2 50");
    CHECK(from_file.output.find("\"seed\":5") != std::string::npos);

    auto from_flag = run_cli("--config " + cfg.string() + " synth --out " + out1.string() +
                             " --seed 9 --hosts 60 --benign 200 --scanning 50 --botnet 50 "
                             "--exfil 50 --c2 50");
    CHECK(from_flag.output.find("\"seed\":9") != std::string::npos);
}

TEST_CASE("usage errors exit 1, data errors exit 2") {
    CHECK(run_cli("frobnicate").exit_code == 1);
    CHECK(run_cli("synth --no-such-flag x --out y.csv").exit_code == 1);
    CHECK(run_cli("score --bundle missing.bin --in missing.csv --out " +
                  (work_dir() / "v.csv").string())
              .exit_code == 2);

    const fs::path bad_cfg = work_dir() / "bad_cfg.json";
    {
        std::ofstream out(bad_cfg);
        out << R"({"sede": 5})";  // misspelled key is rejected
    }
    auto r = run_cli("--config " + bad_cfg.string() + " synth --out " +
                     (work_dir() / "z.csv").string());
    CHECK(r.exit_code == 1);
}

TEST_CASE("featurize writes feature and host csvs") {
    const fs::path flows = work_dir() / "flows_f.csv";
    REQUIRE(run_cli(synth_args(flows, 11)).exit_code == 0);
    const fs::path feats = work_dir() / "features.csv";
    const fs::path hosts = work_dir() / "hosts.csv";
    auto r = run_cli("featurize --in " + flows.string() + " --out " + feats.string() +
                     " --hosts-out " + hosts.string());
    REQUIRE(r.exit_code == 0);
    CHECK(slurp(feats).rfind("record_id,duration,src_port,dst_port,fwd_bytes,bwd_bytes,src_in_degree",
                             0) == 0);
    CHECK(slurp(hosts).rfind("host,in_degree", 0) == 0);
}

TEST_CASE("schema remapping via --map") {
    const fs::path flows = work_dir() / "renamed.csv";
    {
        std::ofstream out(flows);
        out << "when,src_ip,dst_ip,src_port,dst_port,duration,fwd_bytes,bwd_bytes,label\n";
        out << "1,a,b,1,2,0.5,10,20,benign\n";
        out << "2,b,c,1,2,0.5,10,20,benign\n";
        out << "3,c,a,1,2,0.5,10,20,benign\n";
    }
    const fs::path feats = work_dir() / "renamed_features.csv";
    CHECK(run_cli("featurize --in " + flows.string() + " --out " + feats.string()).exit_code == 2);
    CHECK(run_cli("featurize --in " + flows.string() + " --out " + feats.string() +
                  " --map ts=when")
              .exit_code == 0);
}

}  // TEST_SUITE
