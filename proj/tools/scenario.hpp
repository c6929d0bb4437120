#pragma once

#include "wpk/concentration.hpp"
#include "wpk/field.hpp"
#include "wpk/potential.hpp"
#include "wpk/propagator.hpp"

#include <json.hpp>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace wpk::cli {

inline constexpr const char* kFormatVersion = "wpk-report/1";

/// Exit 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exit 3.
struct ValidityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Scenario {
    std::string potential = "zero";
    ParamMap potential_params;

    std::size_t n = 4096;
    double x_min = -40.0;
    double dx = 80.0 / 4096.0;

    double delta0 = 0.5;
    EvolveParams evolve{1e-3, 10};
    double t_start = -0.5;
    double t_end = 0.5;
    std::vector<std::pair<double, double>> norm_pairs{{6.0, 6.0}};

    std::vector<double> lambda_ladder; // empty: default ladder
    double t_stride = 0.0;
    std::size_t max_evals = 0;
    int refine_passes = 4;
    int max_bubbles = 4;
    double stop_threshold = -1.0;
    double hls_constant = 0.1;

    std::filesystem::path out_dir = "wpk_out";
    std::uint64_t seed = 20240611;

    Grid1D grid() const { return Grid1D(n, x_min, dx); }
    Potential make_potential() const;
    SearchParams search() const;
};

/// Reads key = value sections [potential], [grid], [evolve], [search] and
/// [output]. Missing file, unknown keys and bad values throw ConfigError.
Scenario load_scenario(const std::filesystem::path& path);

/// Checks the scenario invariants; throws ConfigError.
void validate(const Scenario& s);

nlohmann::json to_json(const Scenario& s);

/// Report header: format version, command and the resolved scenario.
nlohmann::json report_header(const std::string& command, const Scenario& s);

ComplexField load_input(const std::filesystem::path& path, const Scenario& s);

/// Throws ValidityError when |f| exceeds 1e-8 near the box edges.
void check_boundary(const ComplexField& f, const std::string& what);

void write_json(const nlohmann::json& j, const std::filesystem::path& path);

} // namespace wpk::cli
