#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phaselab/runner.hpp"

namespace {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw phaselab::SchemaError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void apply_out_dir(phaselab::RunConfig& config, const std::string& dir) {
    if (dir.empty()) return;
    config.report_path = (fs::path(dir) / config.report_path).string();
    config.series_path = (fs::path(dir) / config.series_path).string();
}

void emit_config(const phaselab::RunConfig& config, const std::string& path) {
    const std::string text = phaselab::dump_config(config) + "\n";
    if (path.empty()) {
        std::cout << text;
    } else {
        std::ofstream f(path, std::ios::binary | std::ios::trunc);
        f << text;
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Mixed-state geometric phase calculator"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    auto* run_cmd = app.add_subcommand("run", "Execute a run configuration");
    run_cmd->add_option("config", config_path, "Run configuration (JSON)")->required();
    run_cmd->add_option("--out", out_dir, "Directory prefix for output files");

    std::string sweep_path;
    auto* sweep_cmd = app.add_subcommand("sweep", "Execute a parameter sweep");
    sweep_cmd->add_option("config", sweep_path, "Sweep configuration (JSON)")->required();

    auto* scenario_cmd = app.add_subcommand("scenario", "Emit a shipped scenario configuration");
    double r = 0.5, theta = 0.0, omega = 1.0, tau = 2.0 * 3.14159265358979323846;
    int turns = 1;
    std::vector<int> windings{1, 0};
    std::string profile = "linear", emit_path;

    auto* precession = scenario_cmd->add_subcommand("precession", "Constant sigma_z precession");
    precession->add_option("--r", r, "Bloch purity radius");
    precession->add_option("--theta", theta, "Bloch polar angle (radians)");
    precession->add_option("--omega", omega, "Precession frequency");
    precession->add_option("--turns", turns, "Number of full turns");
    precession->add_option("--emit-config", emit_path, "Write config here instead of stdout")
        ->expected(0, 1);

    auto* echo = scenario_cmd->add_subcommand("echo", "Spin-echo sequence");
    echo->add_option("--omega", omega, "Precession frequency");
    echo->add_option("--tau", tau, "Total duration");
    echo->add_option("--emit-config", emit_path, "Write config here instead of stdout")->expected(0, 1);

    auto* gauge_demo = scenario_cmd->add_subcommand("gauge-demo", "Precession with a diagonal gauge twist");
    gauge_demo->add_option("--r", r, "Bloch purity radius");
    gauge_demo->add_option("--theta", theta, "Bloch polar angle (radians)");
    gauge_demo->add_option("--omega", omega, "Precession frequency");
    gauge_demo->add_option("--turns", turns, "Number of full turns");
    gauge_demo->add_option("--windings", windings, "Per-level winding numbers")->delimiter(',');
    gauge_demo->add_option("--profile", profile, "Gauge ramp shape: linear|smooth");
    gauge_demo->add_option("--emit-config", emit_path, "Write config here instead of stdout")
        ->expected(0, 1);

    scenario_cmd->require_subcommand(1);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) {
            phaselab::RunConfig config = phaselab::parse_config(read_file(config_path));
            apply_out_dir(config, out_dir);
            return phaselab::run(config, std::cerr);
        }
        if (sweep_cmd->parsed()) {
            return phaselab::sweep(phaselab::parse_sweep(read_file(sweep_path)), std::cerr);
        }
        if (precession->parsed()) {
            emit_config(phaselab::scenario_precession(r, theta, omega, turns), emit_path);
        } else if (echo->parsed()) {
            emit_config(phaselab::scenario_echo(omega, tau), emit_path);
        } else if (gauge_demo->parsed()) {
            const auto shape = profile == "smooth" ? phaselab::ProfileShape::Smooth
                                                   : phaselab::ProfileShape::Linear;
            emit_config(phaselab::scenario_gauge_demo(r, theta, omega, turns, windings, shape),
                        emit_path);
        }
        return phaselab::kExitOk;
    } catch (const phaselab::SchemaError& e) {
        std::cerr << "phase: " << e.what() << "\n";
        return phaselab::kExitConfigInvalid;
    } catch (const phaselab::DomainError& e) {
        std::cerr << "phase: " << e.what() << "\n";
        return phaselab::kExitConfigInvalid;
    } catch (const phaselab::NotCyclicError& e) {
        std::cerr << "phase: " << e.what() << "\n";
        return phaselab::kExitNotCyclic;
    } catch (const phaselab::Error& e) {
        std::cerr << "phase: " << e.what() << "\n";
        return phaselab::kExitNumerical;
    }
}
