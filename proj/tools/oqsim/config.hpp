// config.hpp — JSON run configuration: schema validation, overrides, hashing.
//
// Sections: system, bath, evolution, noise, readout, output, plus a top-level
// seed. All physical quantities are in units of the standard frequency.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace oqsim {

struct ScanSpec {
    double from = 0.0;
    double to = 0.0;
    double step = 0.0;
};

struct SystemSection {
    double omega_s = 1.0;
    std::size_t n_qubits = 1;
    std::string initial = "excited"; // excited | superposition
    std::optional<ScanSpec> omega_scan;
};

struct BathSection {
    std::string kind = "ohmic"; // ohmic | tabulated
    double alpha = 0.0;
    double omega_c = 0.0;
    std::string file;
    double beta = 0.0;
    double omega_min = 0.0;
    double delta_omega = 0.0;
    std::size_t d = 0;
    std::string couplings = "naive"; // naive | improved
};

struct EvolutionSection {
    double tau = 0.0;
    std::size_t steps = 0;
    std::string mode = "joint"; // joint | sequential
    std::size_t d_i = 1;
    std::size_t trotter_n0 = 1024;
    std::string backend = "density_matrix"; // density_matrix | trajectories
    std::size_t trajectories = 100;
    std::size_t snapshot_stride = 1;
};

struct NoiseSection {
    std::size_t n_fluctuators = 0;
    double gamma_min = 0.0;
    double gamma_max = 0.0;
    double v = 0.0;
    std::vector<std::pair<double, double>> explicit_fluctuators; // (v, gamma)
    double duration = 0.0;
    double dt = 0.0;
    std::size_t realizations = 1;
};

struct ReadoutSection {
    std::size_t shots = 0; // 0 = exact expectation values
};

struct OutputSection {
    std::string prefix = "run";
};

struct Config {
    std::uint64_t seed = 1;
    std::optional<SystemSection> system;
    std::optional<BathSection> bath;
    std::optional<EvolutionSection> evolution;
    std::optional<NoiseSection> noise;
    ReadoutSection readout;
    OutputSection output;
    nlohmann::json effective; // parsed document with defaults and overrides applied
};

// Loads, applies dotted-path overrides (key=value; value parsed as JSON when
// possible, else as a string), and validates. Throws oqs::config_error with a
// field-level message on any violation.
Config load_config(const std::string& path, const std::vector<std::string>& overrides);

// Parse + validate an already-loaded document (used by tests and load_config).
Config parse_config(nlohmann::json doc, const std::vector<std::string>& overrides);

// FNV-1a over the canonical serialization.
std::string config_hash(const nlohmann::json& doc);

} // namespace oqsim
