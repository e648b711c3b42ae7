#ifndef STRIPFLOW_CLI_HPP
#define STRIPFLOW_CLI_HPP

#include <cstdint>
#include <string>

#include "json.hpp"

#include "stripflow/envelope.hpp"
#include "stripflow/growth_ode.hpp"
#include "stripflow/report.hpp"
#include "stripflow/sim.hpp"

namespace stripflow::cli {

struct OdeRunConfig {
    double t_end = 1e4;
    int steps = 1000;
    double rk_t_end = 10.0;  // horizon of the RK4-vs-closed-form comparison
    bool use_asymptotic_h = false;
};

struct ExperimentConfig {
    std::string mode = "full-report";
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    ode::Constants constants;
    envelope::EnvelopeParams env;
    sim::SimConfig simc;
    OdeRunConfig ode_run;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_json_file(const std::string& path);
    nlohmann::json to_json() const; // resolved config, echoed into reports
    void validate() const;
};

// campaigns; entries appended to the report, artifacts written under out_dir
void kernel_verify(const ExperimentConfig& cfg, report::Report& rep);
void envelope_verify(const ExperimentConfig& cfg, report::Report& rep);
void steiner_verify(const ExperimentConfig& cfg, report::Report& rep);
void ode_run(const ExperimentConfig& cfg, report::Report& rep);
void simulate(const ExperimentConfig& cfg, report::Report& rep);

// runs the configured mode, writes report.json (and series.csv / contours/*)
// under out_dir; returns 0 iff all enabled checks pass
int run_experiment(const ExperimentConfig& cfg);

} // namespace stripflow::cli

#endif
