#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "stripflow/cli.hpp"

using namespace stripflow;
using namespace stripflow::cli;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentConfig base_config(const std::string& mode, const std::string& out) {
    nlohmann::json j;
    j["mode"] = mode;
    j["seed"] = 7;
    j["out_dir"] = out;
    j["ode"] = {{"t_end", 1e4}, {"steps", 200}, {"rk_t_end", 5.0}};
    return ExperimentConfig::from_json(j);
}

} // namespace

TEST_CASE("config parsing: bad inputs rejected") {
    CHECK_THROWS(ExperimentConfig::from_json_file("/nonexistent/config.json"));
    nlohmann::json j;
    j["mode"] = "warp-drive";
    auto cfg = ExperimentConfig::from_json(j);
    CHECK_THROWS(cfg.validate());
    nlohmann::json empty;
    CHECK_THROWS(ExperimentConfig::from_json(empty)); // mode is required

    // empty config file: parse error surfaces as an exception
    std::ofstream("/tmp/empty_config.json");
    CHECK_THROWS(ExperimentConfig::from_json_file("/tmp/empty_config.json"));
}

TEST_CASE("config echo carries resolved constants") {
    auto cfg = base_config("ode-run", "/tmp/sfx");
    const nlohmann::json j = cfg.to_json();
    CHECK(j.at("constants").contains("rho0"));
    CHECK(j.at("sim").at("kernel").at("image_order").get<int>() == 64);
    CHECK(j.at("seed").get<std::uint64_t>() == 7);
}

TEST_CASE("ode-run campaign is reproducible byte for byte") {
    auto cfg = base_config("ode-run", "/tmp/sf_ode1");
    CHECK(run_experiment(cfg) == 0);
    auto cfg2 = base_config("ode-run", "/tmp/sf_ode2");
    CHECK(run_experiment(cfg2) == 0);
    CHECK(slurp("/tmp/sf_ode1/series.csv") == slurp("/tmp/sf_ode2/series.csv"));
    CHECK(!slurp("/tmp/sf_ode1/series.csv").empty());

    // report.json exists and carries per-check entries with anchors
    const std::string rep = slurp("/tmp/sf_ode1/report.json");
    CHECK(rep.find("\"anchor\"") != std::string::npos);
    CHECK(rep.find("\"all_pass\": true") != std::string::npos);
}

TEST_CASE("envelope-verify campaign passes") {
    auto cfg = base_config("envelope-verify", "/tmp/sf_env");
    CHECK(run_experiment(cfg) == 0);
}

TEST_CASE("steiner-verify campaign passes and is seed-stable") {
    auto cfg = base_config("steiner-verify", "/tmp/sf_st1");
    CHECK(run_experiment(cfg) == 0);
    auto cfg2 = base_config("steiner-verify", "/tmp/sf_st2");
    CHECK(run_experiment(cfg2) == 0);
    // identical seeds give identical reports modulo the echoed out_dir
    std::string a = slurp("/tmp/sf_st1/report.json");
    std::string b = slurp("/tmp/sf_st2/report.json");
    const auto strip_dir = [](std::string s) {
        size_t p;
        while ((p = s.find("sf_st")) != std::string::npos) s.erase(p, 6);
        return s;
    };
    CHECK(strip_dir(a) == strip_dir(b));
}
