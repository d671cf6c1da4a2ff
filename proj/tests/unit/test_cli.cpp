#include <doctest.h>

#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path kRoot = fs::temp_directory_path() / "lsrank_test_cli";

int run(const std::string& args) {
    const std::string cmd = std::string(LSRANK_BIN) + " " + args + " > " + (kRoot / "last.log").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string dir(const std::string& name) { return (kRoot / name).string(); }

struct Fresh {
    Fresh() {
        fs::remove_all(kRoot);
        fs::create_directories(kRoot);
    }
};

}  // namespace

TEST_CASE("usage errors exit 1") {
    Fresh f;
    CHECK(run("") == 1);
    CHECK(run("bogus") == 1);
    CHECK(run("fit --iterations -3") == 1);
    CHECK(run("--help") == 0);
}

TEST_CASE("simulate is deterministic") {
    Fresh f;
    REQUIRE(run("simulate --n 6 --T 3 --seed 5 --output-dir " + dir("a")) == 0);
    REQUIRE(run("simulate --n 6 --T 3 --seed 5 --output-dir " + dir("b")) == 0);
    CHECK(slurp(kRoot / "a" / "panel.txt") == slurp(kRoot / "b" / "panel.txt"));
    CHECK(slurp(kRoot / "a" / "truth.json") == slurp(kRoot / "b" / "truth.json"));
    REQUIRE(run("simulate --n 6 --T 3 --seed 6 --output-dir " + dir("c")) == 0);
    CHECK(slurp(kRoot / "a" / "panel.txt") != slurp(kRoot / "c" / "panel.txt"));
}

TEST_CASE("bad data exits 2") {
    Fresh f;
    std::ofstream(kRoot / "bad.txt") << "0 1 1\n1 0 2\n2 1 0\n";
    CHECK(run("fit --iterations 10 --input " + dir("bad.txt") + " --output-dir " + dir("out")) == 2);
    std::ofstream(kRoot / "junk.txt") << "0 1 x\n";
    CHECK(run("fit --iterations 10 --input " + dir("junk.txt") + " --output-dir " + dir("out")) == 2);
}

TEST_CASE("downstream commands need a populated store") {
    Fresh f;
    CHECK(run("summarize --input " + dir("missing")) != 0);
    fs::create_directories(kRoot / "empty");
    CHECK(run("summarize --input " + dir("empty")) != 0);
    CHECK(run("regions --input " + dir("empty")) != 0);
    CHECK(run("report --input " + dir("empty")) != 0);
}

TEST_CASE("fit then summarize, regions and report") {
    Fresh f;
    REQUIRE(run("simulate --n 6 --T 3 --seed 2 --output-dir " + dir("sim")) == 0);
    REQUIRE(run("fit --input " + dir("sim/panel.txt") + " --iterations 800 --burn-in 200 --seed 3 --output-dir " +
                dir("fit")) == 0);
    const fs::path fit = kRoot / "fit";
    for (const char* name : {"manifest.json", "draws.bin", "panel.txt", "traces.csv"}) CHECK(fs::exists(fit / name));
    const auto manifest = nlohmann::json::parse(slurp(fit / "manifest.json"));
    CHECK(manifest.at("count") == 600);
    CHECK(manifest.contains("acceptance"));

    REQUIRE(run("summarize --input " + dir("fit")) == 0);
    const auto summary = nlohmann::json::parse(slurp(fit / "summary.json"));
    CHECK(summary.at("stability").size() == 2);
    CHECK(summary.at("pseudo_r2").get<double>() >= 0.0);
    CHECK(summary.at("pseudo_r2").get<double>() < 1.0);
    CHECK(fs::exists(fit / "stability.csv"));

    REQUIRE(run("regions --k 2 --input " + dir("fit")) == 0);
    for (int t = 1; t <= 3; ++t) {
        const std::string tag = std::to_string(t);
        CHECK(fs::exists(fit / "regions" / ("overlap_t" + tag + ".csv")));
        CHECK(fs::exists(fit / "regions" / ("raster_t" + tag + ".csv")));
        CHECK(fs::exists(fit / "regions" / ("frame_t" + tag + ".json")));
    }
    const auto clusters = nlohmann::json::parse(slurp(fit / "regions" / "clusters.json"));
    CHECK(clusters.at("1").at("labels").size() == 6);
    CHECK(run("regions --k 7 --input " + dir("fit") + " --output-dir " + dir("r7")) == 1);

    REQUIRE(run("report --input " + dir("fit")) == 0);
    int plots = 0;
    for (const auto& e : fs::directory_iterator(fit / "report")) {
        if (e.path().extension() != ".svg") continue;
        ++plots;
        const std::string stem = e.path().stem().string();
        // Per-parameter trace plots share one table.
        const fs::path twin = stem.rfind("trace_", 0) == 0 ? fit / "report" / "traces_plot.csv"
                                                          : fit / "report" / (stem + ".csv");
        CHECK_MESSAGE(fs::exists(twin), stem);
    }
    CHECK(plots >= 4);

    // Chains write separate stores.
    REQUIRE(run("fit --input " + dir("sim/panel.txt") + " --iterations 50 --burn-in 10 --chains 2 --output-dir " +
                dir("chains")) == 0);
    CHECK(fs::exists(kRoot / "chains" / "chain_1" / "draws.bin"));
    CHECK(fs::exists(kRoot / "chains" / "chain_2" / "draws.bin"));
}
