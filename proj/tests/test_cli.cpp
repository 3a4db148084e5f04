#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>

#include "radunc/csv.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = RADUNC_CLI_PATH;
const std::string kSamples = RADUNC_SAMPLES_DIR;

fs::path scratch() {
    auto dir = fs::temp_directory_path() / "radunc_test_cli";
    static bool cleared = false;
    if (!cleared) {
        fs::remove_all(dir);
        cleared = true;
    }
    fs::create_directories(dir);
    return dir;
}

struct Run {
    int code = -1;
    std::string err;
};

Run run(const std::string& args) {
    auto err_path = scratch() / "stderr.txt";
    std::string cmd = kCli + " " + args + " >/dev/null 2>" + err_path.string();
    int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = radunc::csv::read_file(err_path.string());
    return r;
}

std::string out_dir(const std::string& name) { return (scratch() / name).string(); }

std::string slurp(const std::string& dir, const std::string& file) { return radunc::csv::read_file(dir + "/" + file); }

} // namespace

TEST_CASE("cli exit codes") {
    auto missing = run("expand /nonexistent/dataset.csv --out " + out_dir("missing"));
    CHECK(missing.code == 2);
    CHECK(missing.err.find("FileNotFound") != std::string::npos);
    CHECK(run("fit").code == 1);
    CHECK(run("no-such-command").code == 1);
    CHECK(run("").code == 1);
    CHECK(run("agreement " + kSamples + "/decision_matrix.csv").code == 0);
    auto bad_strategy = run("fit " + kSamples + "/dataset.csv --ranking " + kSamples +
                            "/dataset.csv --judge synthetic:x --strategy greedy --out " + out_dir("bad"));
    CHECK(bad_strategy.code == 1);
    CHECK(bad_strategy.err.find("InvalidConfig") != std::string::npos);
}

TEST_CASE("cli fit and expand reruns are byte-identical") {
    const std::string latent = kSamples + "/latent_phrases.csv";
    REQUIRE(run("synth-comparisons " + latent + " --repetitions 2 --out " + out_dir("synth")).code == 0);
    REQUIRE(run("build-ranking " + out_dir("synth") + "/comparisons.jsonl --seeds 1 2 3 --out " + out_dir("rank")).code ==
            0);
    for (const char* name : {"fit_a", "fit_b"}) {
        auto r = run("fit " + kSamples + "/dataset.csv --ranking " + out_dir("rank") + "/ranking.csv --judge synthetic:" +
                     latent + " --jobs 3 --out " + out_dir(name));
        REQUIRE(r.code == 0);
    }
    for (const char* file : {"fit.csv", "dataset_with_prob.csv", "config.json"}) {
        CHECK(slurp(out_dir("fit_a"), file) == slurp(out_dir("fit_b"), file));
    }
    CHECK(slurp(out_dir("fit_a"), "fit.csv").find(",,,") == std::string::npos);

    for (const char* name : {"expand_a", "expand_b"}) {
        REQUIRE(run("expand " + kSamples + "/dataset.csv --out " + out_dir(name)).code == 0);
    }
    for (const char* file : {"expanded.csv", "combined.csv", "conflicts.csv", "stats.csv", "conflict_crosstab.csv",
                             "summary.csv", "config.json"}) {
        CHECK(slurp(out_dir("expand_a"), file) == slurp(out_dir("expand_b"), file));
    }
    for (const char* dir : {"synth", "rank", "fit_a", "expand_a"}) CHECK(fs::exists(out_dir(dir) + "/config.json"));
}
