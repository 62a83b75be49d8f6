#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "doctest.h"
#include "json.hpp"

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run cli(std::vector<std::string> args) {
    args.insert(args.begin(), "covshift");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = covshift::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("covshift_cli_" + std::to_string(::getpid()))) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name, const std::string& text = {}) const {
        const auto p = (path / name).string();
        if (!text.empty()) std::ofstream(p) << text;
        return p;
    }
};

constexpr const char* kManifoldSpec = R"({
  "kind": "manifold", "D": 5, "d": 2, "n_P": 400, "n_Q": 1500, "seed": 5,
  "anchor": [0.2876, 0.7883, 0.18045504, 0.33246756, 0.22671508]
})";

}  // namespace

TEST_CASE("version and usage") {
    const Run v = cli({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find("0.1.0") != std::string::npos);
    CHECK(cli({}).code == 1);
    CHECK(cli({"frobnicate"}).code == 1);
    CHECK(cli({"--help"}).code == 0);
    CHECK(cli({"estimate", "--data", "x.csv", "--x-star", "0"}).code == 1);
    CHECK(cli({"estimate", "--data", "x.csv", "--x-star", "0", "--h", "-1", "--degree", "1"}).code == 1);
}

TEST_CASE("rates golden output") {
    const Run r = cli({"rates", "--n-P", "0", "--n-Q", "1000", "--beta", "2.5", "--d", "2", "--D", "5", "--rho", "0"});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string header, row;
    std::getline(lines, header);
    std::getline(lines, row);
    CHECK(header == "n_P,n_Q,beta,d,D,rho,regime,kappa_star,h_oracle,theoretical_rate");
    CHECK(row.rfind("0,1000,2.5,2,5,0,SmallRho,0.3727593720314", 0) == 0);

    const Run grid = cli({"rates", "--n-P", "0,100", "--n-Q", "1000,2000", "--beta", "2.5", "--D", "5"});
    CHECK(grid.code == 0);
    CHECK(std::count(grid.out.begin(), grid.out.end(), '\n') == 5);
    CHECK(cli({"rates", "--n-P", "0", "--n-Q", "abc", "--beta", "2.5", "--D", "5"}).code == 1);
    CHECK(cli({"rates", "--n-P", "0", "--n-Q", "10", "--beta", "2.5", "--d", "6", "--D", "5"}).code == 1);
}

TEST_CASE("rates from a config file") {
    TempDir tmp;
    const auto cfg = tmp.file("r.json", R"({"n_P": [5000], "n_Q": 1000, "beta": 2.5, "d": 2, "D": 5, "rho": 0})");
    const Run r = cli({"rates", "--config", cfg});
    REQUIRE(r.code == 0);
    CHECK(r.out.find(",SmallRho,0.35568811") != std::string::npos);
    const auto bad = tmp.file("b.json", R"({"n_P": "many"})");
    CHECK(cli({"rates", "--config", bad, "--n-Q", "10", "--beta", "2", "--D", "2"}).code == 2);
}

TEST_CASE("simulate, estimate, dim-est and adaptive on one file") {
    TempDir tmp;
    const auto spec = tmp.file("spec.json", kManifoldSpec);
    const auto csv = tmp.file("data.csv");
    const Run s = cli({"simulate", "--spec", spec, "--out", csv});
    REQUIRE(s.code == 0);
    CHECK(json::parse(s.out)["n_Q"] == 1500);
    {
        std::ifstream in(csv);
        std::string first;
        std::getline(in, first);
        CHECK(first.rfind("# {", 0) == 0);
    }
    const std::string x = "0.2876,0.7883,0.18045504,0.33246756,0.22671508";

    const Run e = cli({"estimate", "--data", csv, "--x-star", x, "--h", "0.4", "--degree", "2", "--solver", "min_norm"});
    REQUIRE(e.code == 0);
    const auto ej = json::parse(e.out);
    CHECK(ej["truncated"] == false);
    CHECK(std::abs(ej["value"].get<double>()) < 1.0);

    // without source rows the surface makes the degree-2 design rank deficient
    const auto target_spec = tmp.file("target.json", R"({
      "kind": "manifold", "n_Q": 1500, "seed": 5,
      "anchor": [0.2876, 0.7883, 0.18045504, 0.33246756, 0.22671508]
    })");
    const auto target_csv = tmp.file("target.csv");
    REQUIRE(cli({"simulate", "--spec", target_spec, "--out", target_csv}).code == 0);
    const Run strict = cli({"estimate", "--data", target_csv, "--x-star", x, "--h", "0.4", "--degree", "2"});
    CHECK(strict.code == 3);
    CHECK(strict.err.find("singular") != std::string::npos);
    CHECK(cli({"estimate", "--data", target_csv, "--x-star", x, "--h", "0.4", "--degree", "2", "--solver",
               "min_norm"}).code == 0);
    CHECK(cli({"estimate", "--data", csv, "--x-star", "0.1,0.2", "--h", "0.4", "--degree", "1"}).code == 1);

    const Run d = cli({"dim-est", "--data", csv});
    REQUIRE(d.code == 0);
    CHECK(json::parse(d.out)["d_avg"] == 2);

    const Run a = cli({"adaptive", "--data", csv, "--x-star", x, "--trace"});
    REQUIRE(a.code == 0);
    const auto aj = json::parse(a.out);
    CHECK(aj["d_hat"] == 2);
    CHECK(aj["trace"].size() > 2);
    CHECK(aj["selected_beta"].get<double>() >= 1.0);

    const Run over = cli({"--seed", "9", "simulate", "--spec", spec, "--out", csv});
    CHECK(json::parse(over.out)["seed"] == 9);
}

TEST_CASE("data errors exit with code 2") {
    TempDir tmp;
    const auto bad = tmp.file("bad.csv", "x_1,y,origin\n1,2,Z\n");
    const Run r = cli({"estimate", "--data", bad, "--x-star", "0", "--h", "1", "--degree", "0"});
    CHECK(r.code == 2);
    CHECK(r.err.find("line 2") != std::string::npos);
    CHECK(cli({"dim-est", "--data", tmp.file("missing.csv")}).code == 2);
    const auto spec = tmp.file("s.json", R"({"kind": "manifold", "colour": 1})");
    CHECK(cli({"simulate", "--spec", spec, "--out", tmp.file("o.csv")}).code == 2);
}

TEST_CASE("truncated estimate reports zero") {
    TempDir tmp;
    const auto csv = tmp.file("t.csv", "x_1,y,origin\n0,1,Q\n0.1,2,Q\n-0.1,3,P\n");
    const Run r = cli({"estimate", "--data", csv, "--x-star", "0", "--h", "0.5", "--degree", "1", "--truncate",
                       "--tau-exponent", "1.01"});
    REQUIRE(r.code == 0);
    const auto j = json::parse(r.out);
    CHECK(j["truncated"] == true);
    CHECK(j["value"] == 0.0);
}

TEST_CASE("bench writes results") {
    TempDir tmp;
    const auto spec = tmp.file("e.json", R"({
        "name": "tiny",
        "generator": {"kind": "manifold"},
        "x_star": [0.2876, 0.7883, 0.18045504, 0.33246756, 0.22671508],
        "grid": {"n_P": [200], "n_Q": [200, 400, 800]},
        "estimators": ["pooled_oracle", "target_only_oracle"],
        "replications": 3,
        "d_for_oracle": 2
    })");
    const Run r = cli({"--quiet", "--seed", "4", "bench", "--spec", spec, "--out-dir", (tmp.path / "out").string()});
    REQUIRE(r.code == 0);
    const auto files = json::parse(r.out)["files"];
    REQUIRE(files.size() == 2);
    std::ifstream in(files[1].get<std::string>());
    CHECK(json::parse(in)["base_seed"] == 4);
    CHECK(cli({"bench", "--spec", "nope", "--out-dir", tmp.path.string()}).code == 1);
}
