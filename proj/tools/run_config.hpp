#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlskam/frequency.hpp>
#include <nlskam/hamiltonian.hpp>
#include <nlskam/kamflow.hpp>
#include <nlskam/projections.hpp>
#include <nlskam/sites.hpp>

namespace nlskam::cli
{

// Run configuration as read from YAML. See README.md for the grammar.
struct RunConfig {
    int J = 8;
    int D = 3;

    SiteKind site_kind = SiteKind::power2;
    double eta = 1.2;
    int i_star = 21;
    SiteVariant variant = SiteVariant::S1;
    std::vector<int> s0;
    std::optional<double> secondary_eta; // loggevrey S2, variant -S1+S2+S0 only

    std::vector<std::pair<int, double>> fcoeffs{{1, 1.0}};
    double f_radius = 1.0;

    double gamma = 1e-2;
    double tau = 1.5;

    double r0 = 0.02;
    double p0 = 1.0;
    double rho = 0.01;
    double delta = 0.5;

    // I_s = value * jjap(s)^{-decay} on the support, unless explicit values are given.
    std::vector<int> action_support; // empty: every tangential site in [-J, J]
    double action_value = 5e-5;
    double action_decay = 4.0;
    std::map<int, double> action_values;

    std::uint64_t potential_seed = 7;
    double potential_amplitude = 0.25;
    std::map<int, double> potential_values; // overrides sampled entries

    double kam_tol = 1e-10;
    int max_steps = 8;
    double smallness_gate = 1.0;
    double neumann_tol = 1e-13;
    double lie_tol = 1e-14;
    bool check_frequencies = true;

    int measure_lmax = 6;
    std::size_t measure_samples = 5000;
    std::vector<double> measure_gammas{0.2, 0.1, 0.05};
    std::uint64_t measure_seed = 1;
    int measure_threads = 1;

    double synth_t0 = 0.0;
    double synth_t1 = 1.0;
    int synth_nt = 256;
    int synth_nx = 256;
    int synth_steps = 16;

    std::string output_dir = "out";

    SiteSchedule site_schedule() const;
    std::vector<int> sites() const;
    ActionVector actions() const;
    // V_j on [-J, J]
    std::map<int, double> potential() const;
    FrequencyVector omega() const;
    HamParams ham_params() const;
    Schedules schedules() const;
    KamProblem kam_problem() const;
    RunOptions run_options() const;

    friend bool operator==(const RunConfig &, const RunConfig &) = default;
};

// Throws ConfigError (with the YAML line when known).
RunConfig parse_config(std::string_view yaml);
// Throws IoError when the file cannot be read.
RunConfig load_config(const std::string &path);

// Normalized YAML with every field spelled out; parse_config(echo(c)) == c.
std::string echo_config(const RunConfig &c);

// Output directory: explicit flag, then $NLSKAM_OUTPUT_DIR, then the config.
std::string resolve_output_dir(const RunConfig &c, const std::optional<std::string> &flag);

} // namespace nlskam::cli
