// Configuration ingestion, scenario execution, and result emission for the
// CLI: one JSON config describes the chain, the initial state, the grids and
// the selected analysis; outputs are bit-stable CSV files plus a manifest.
#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "oscchain/chain.hpp"
#include "oscchain/hydro.hpp"

namespace oscchain {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error(field + ": " + what), field_path(field) {}
    std::string field_path;
};

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct GridSpec {
    std::vector<double> points;  // non-empty when explicit
    double start = 0.0, stop = 0.0;
    std::size_t count = 0;
    bool log_scale = false;

    std::vector<double> materialize() const;
};

struct StateSpec {
    std::string type = "product";  // product | coherent
    std::vector<double> dq2{0.5}, dp2{0.5}, sqp{0.0};  // scalar or per-site
    double drift_velocity = 0.0;
    long window_lo = 0;
    long window_size = 0;  // infinite chains; 0 = take chain size
    DisplacementProfile displacement;
    std::vector<std::complex<double>> amplitudes;  // coherent
    int excluded_mode_cluster = 3;
};

struct SubsectionSpec {
    int block = 5;
    std::string observable = "momentum";  // momentum | energy
    std::string method = "auto";          // auto | closed_form | trajectory
};

struct HydroSpec {
    std::string solver = "wave";  // wave | euler
    double dt = 0.0;              // 0 = auto from CFL
    std::string boundary = "periodic";
    // wave initial data: n1(x,0) = amplitude cos(kappa x), zero rate
    double wave_kappa = 0.0, wave_amplitude = 0.0, wave_speed = 1.0;
    // euler initial data: static Gaussian f ~ exp(-K x^2 / 2 theta0) with
    // optional multiplicative density bump and velocity ripple
    double theta0 = 1.0;
    double perturbation = 0.0;
    double perturbation_width = 1.0;
};

struct CompareSpec {
    std::string profile = "sine";  // sine | pulse
    double amplitude = 0.01;
    double wavelength = 50.0;
    double width = 8.0;
    double center = 0.0;
    double smear_width = 5.0;
    double grid_dx = 0.5;
};

struct ScenarioConfig {
    ChainParams chain;
    StateSpec state;
    std::string analysis;  // modes | evolve | subsection | densities | hydro | equilibrium | compare
    GridSpec time_grid, k_grid, space_grid;
    SubsectionSpec subsection;
    HydroSpec hydro;
    CompareSpec compare;
    double equilibrium_tolerance = 0.05;
    double decoherence_epsilon = 1e-3;
    std::uint64_t seed = 1;
};

ScenarioConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioConfig& config);

// FNV-1a 64 over the canonical (sorted-key) dump
std::uint64_t config_hash(const nlohmann::json& j);

struct RunManifest {
    std::string config_hash;
    std::string analysis;
    std::vector<std::string> files;
    std::map<std::string, double> wall_ms;
    std::map<std::string, double> summary;  // analysis-specific scalars
};

RunManifest run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir,
                         bool quiet = false);

void write_manifest(const RunManifest& manifest, const std::filesystem::path& out_dir);

}  // namespace oscchain
