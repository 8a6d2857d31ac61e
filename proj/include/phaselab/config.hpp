#pragma once

#include <optional>
#include <string>
#include <vector>

#include "phaselab/evolution.hpp"
#include "phaselab/gauge.hpp"
#include "phaselab/phases.hpp"

namespace phaselab {

struct BlochParams {
    double r;      // purity radius in [0, 1]
    double theta;  // polar angle, radians
    double phi;    // azimuth, radians
};

struct GaugeConfig {
    std::vector<int> windings;
    ProfileShape profile = ProfileShape::Linear;
};

struct RunConfig {
    int dim = 2;
    Matrix rho0;
    std::optional<BlochParams> bloch;  // kept when rho0 came in Bloch form
    HamiltonianSpec hamiltonian;
    int steps = 4096;  // grid steps for the full evolution
    double tol_cyclic = 1e-8;
    double unwind_min_mag = kUnwindMinMag;
    std::optional<GaugeConfig> gauge;
    BranchMode branch_mode = BranchMode::Anchored;
    bool allow_noncyclic = false;
    bool lift = false;  // parallel-transport lift before phase extraction
    std::string report_path = "report.json";
    std::string series_path = "series.csv";
};

struct SweepConfig {
    RunConfig base;
    std::string parameter;  // tau | r | theta | winding_<k>
    double from = 0.0;
    double to = 0.0;
    int points = 0;
    std::string csv_path = "sweep.csv";
};

/// Expands (I + r n.sigma)/2 for a qubit.
Matrix bloch_density(const BlochParams& b);

RunConfig parse_config(const std::string& json_text);
SweepConfig parse_sweep(const std::string& json_text);

/// Canonical JSON form of a config (deterministic field order and float
/// formatting); also the input of the report's config hash.
std::string dump_config(const RunConfig& config);

RunConfig scenario_precession(double r, double theta, double omega, int turns);
RunConfig scenario_echo(double omega, double tau);
RunConfig scenario_gauge_demo(double r, double theta, double omega, int turns,
                              const std::vector<int>& windings, ProfileShape profile);

} // namespace phaselab
