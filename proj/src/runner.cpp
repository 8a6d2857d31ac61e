#include "phaselab/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <ostream>

#include <fmt/format.h>

#include "json_writer.hpp"

namespace phaselab {

namespace {

namespace fs = std::filesystem;
constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

std::string error_code(const Error& e) {
    if (dynamic_cast<const NearZeroCrossingError*>(&e)) return "NearZeroCrossing";
    if (dynamic_cast<const JumpTooLargeError*>(&e)) return "JumpTooLarge";
    if (dynamic_cast<const DegenerateSpectrumError*>(&e)) return "DegenerateSpectrum";
    if (dynamic_cast<const NotCyclicError*>(&e)) return "NotCyclic";
    if (dynamic_cast<const MissingSampleError*>(&e)) return "MissingSample";
    if (dynamic_cast<const MissingGeneratorsError*>(&e)) return "MissingGenerators";
    if (dynamic_cast<const CountMismatchError*>(&e)) return "CountMismatch";
    if (dynamic_cast<const GridMismatchError*>(&e)) return "GridMismatch";
    if (dynamic_cast<const DimensionMismatchError*>(&e)) return "DimensionMismatch";
    if (dynamic_cast<const SchemaError*>(&e)) return "SchemaError";
    if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
    return "Error";
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw Error(fmt::format("cannot open '{}' for writing", tmp.string()));
        f << content;
        if (!f.good()) throw Error(fmt::format("write to '{}' failed", tmp.string()));
    }
    fs::rename(tmp, target);
}

struct PipelineOutcome {
    CyclicityReport cyclicity{};
    std::vector<double> t;
    std::vector<Complex> trace;
    std::vector<double> phi_running;      // empty when unavailable
    std::vector<double> phi_dyn_running;
    std::vector<double> beta_cumulative;  // empty when unavailable
    double phi_total = kNan;
    double phi_total_principal = kNan;
    double phi_dyn = kNan;
    double phi_geo = kNan;
    double phi_geo_oneform = kNan;
    double route_discrepancy = kNan;
    double oneform_imag_residue = kNan;
    std::optional<PerLevelPhases> per_level;
    std::optional<GlobalCyclicityReport> global_cyclicity;
    std::optional<GaugeClassification> gauge_class;
    std::optional<GaugeShiftReport> gauge_shift;
    std::vector<std::pair<std::string, std::string>> errors;  // (code, message)
    bool lift_applied = false;

    bool clean() const { return errors.empty(); }
};

// Propagation inputs derived from a validated config.
struct Prepared {
    DensityOperator rho0;
    PropagatorPath path;
};

Prepared prepare(const RunConfig& config) {
    Prepared p;
    p.rho0 = validate_density(config.rho0);
    const double tau = config.hamiltonian.total_duration();
    if (!(tau > 0.0)) throw DomainError("total evolution duration must be positive");
    const int spu = std::max(1, static_cast<int>(std::ceil(config.steps / tau)));
    const TimeGrid grid = build_grid(config.hamiltonian, spu);
    p.path = propagate(config.hamiltonian, grid);
    return p;
}

PipelineOutcome evaluate(const RunConfig& config, const Prepared& p) {
    PipelineOutcome out;
    out.cyclicity = check_cyclic(p.path, p.rho0, config.tol_cyclic);

    const PropagatorPath* work = &p.path;
    PropagatorPath lifted;
    if (config.lift) {
        try {
            lifted = parallel_transport_lift(p.path, p.rho0);
            work = &lifted;
            out.lift_applied = true;
        } catch (const Error& e) {
            out.errors.emplace_back(error_code(e), e.what());
        }
    }

    PropagatorPath gauged;
    std::optional<GaugeTransform> transform;
    if (config.gauge) {
        try {
            transform = build_diagonal_gauge(p.rho0.spectrum, work->grid, config.gauge->windings,
                                             config.gauge->profile);
            out.gauge_class = classify_gauge(*transform);
        } catch (const Error& e) {
            out.errors.emplace_back(error_code(e), e.what());
        }
    }

    out.t = work->grid.nodes;
    out.trace.reserve(work->unitaries.size());
    for (const Matrix& u : work->unitaries) out.trace.push_back((p.rho0.matrix * u).trace());

    const DynamicalPhaseResult dyn = dynamical_phase(*work, p.rho0);
    out.phi_dyn = dyn.phi_d;
    out.phi_dyn_running = dyn.running;

    try {
        const TotalPhaseResult tp = total_phase(*work, p.rho0, config.unwind_min_mag);
        out.phi_total = tp.phi;
        out.phi_total_principal = principal_angle(tp.phi);
        out.phi_running = tp.phi_running;
        out.phi_geo = tp.phi - dyn.phi_d;

        const OneFormResult of = one_form(*work, p.rho0, config.unwind_min_mag);
        out.phi_geo_oneform = integrate_one_form(of.betas);
        out.route_discrepancy = std::abs(out.phi_geo_oneform - out.phi_geo);
        out.oneform_imag_residue = of.max_imag_residue;
        out.beta_cumulative.push_back(0.0);
        double acc = 0.0;
        for (double b : of.betas) out.beta_cumulative.push_back(acc += b);
    } catch (const Error& e) {
        out.errors.emplace_back(error_code(e), e.what());
    }

    try {
        out.per_level = per_level_phases(*work, p.rho0, config.branch_mode, config.unwind_min_mag);
    } catch (const Error& e) {
        out.errors.emplace_back(error_code(e), e.what());
    }
    try {
        out.global_cyclicity = check_global_cyclic(*work, p.rho0, config.tol_cyclic);
    } catch (const Error& e) {
        out.errors.emplace_back(error_code(e), e.what());
    }
    if (transform) {
        try {
            out.gauge_shift = gauge_shift_report(*work, p.rho0, *transform);
        } catch (const Error& e) {
            out.errors.emplace_back(error_code(e), e.what());
        }
    }
    return out;
}

std::string render_report(const RunConfig& config, const PipelineOutcome& out) {
    detail::JsonWriter w;
    w.begin_object();
    w.key("tool_version").value(kToolVersion);
    w.key("config_hash").value(fmt::format("{:016x}", detail::fnv1a(dump_config(config))));
    w.key("grid_nodes").value(static_cast<std::int64_t>(out.t.size()));
    w.key("parallel_transport_lift").value(out.lift_applied);

    w.key("cyclicity").begin_object();
    w.key("state_residual").value(out.cyclicity.state_residual);
    w.key("commutator_residual").value(out.cyclicity.commutator_residual);
    w.key("cyclic").value(out.cyclicity.cyclic);
    w.end_object();

    w.key("phases").begin_object();
    w.key("phi_total").value(out.phi_total);
    w.key("phi_total_principal").value(out.phi_total_principal);
    w.key("phi_dyn").value(out.phi_dyn);
    w.key("phi_geo").value(out.phi_geo);
    w.key("phi_geo_oneform").value(out.phi_geo_oneform);
    w.key("route_discrepancy").value(out.route_discrepancy);
    w.key("oneform_imag_residue").value(out.oneform_imag_residue);
    w.end_object();

    w.key("per_level");
    if (out.per_level) {
        const PerLevelPhases& pl = *out.per_level;
        w.begin_object();
        w.key("branch_mode").value(pl.branch_mode == BranchMode::Anchored ? "anchored" : "independent");
        auto write_list = [&w](const char* name, const std::vector<double>& xs) {
            w.key(name).begin_array();
            for (double x : xs) w.value(x);
            w.end_array();
        };
        write_list("weights", pl.weights);
        write_list("level_total", pl.level_total);
        write_list("level_dyn", pl.level_dyn);
        write_list("level_geo", pl.level_geo);
        w.key("weighted_geo").value(pl.weighted_geo);
        w.key("weighted_dyn").value(pl.weighted_dyn);
        w.key("endpoint_global_warning").value(pl.endpoint_global_warning);
        w.key("degenerate_warning").value(pl.degenerate_warning);
        w.end_object();
    } else {
        w.null();
    }

    w.key("global_cyclicity");
    if (out.global_cyclicity) {
        const GlobalCyclicityReport& g = *out.global_cyclicity;
        w.begin_object();
        w.key("endpoint_distance").value(g.endpoint_distance);
        w.key("endpoint_global").value(g.endpoint_global);
        w.key("unwound_level_phases").begin_array();
        for (double x : g.unwound_level_phases) w.value(x);
        w.end_array();
        w.key("unwound_global").value(g.unwound_global);
        w.end_object();
    } else {
        w.null();
    }

    w.key("gauge");
    if (config.gauge) {
        w.begin_object();
        w.key("windings").begin_array();
        for (int n : config.gauge->windings) w.value(n);
        w.end_array();
        w.key("profile").value(config.gauge->profile == ProfileShape::Linear ? "linear" : "smooth");
        if (out.gauge_class) {
            w.key("kind").value(out.gauge_class->kind == GaugeKind::GlobalU1 ? "GlobalU1"
                                                                             : "DiagonalNonAbelian");
            w.key("uniform_windings").value(out.gauge_class->uniform_windings);
        }
        w.key("shift");
        if (out.gauge_shift) {
            const GaugeShiftReport& s = *out.gauge_shift;
            w.begin_object();
            w.key("phi_geo_before").value(s.phi_geo_before);
            w.key("phi_geo_after").value(s.phi_geo_after);
            w.key("observed_shift").value(s.observed_shift);
            w.key("observed_shift_mod").value(s.observed_shift_mod);
            w.key("predicted_shift").value(s.predicted_shift);
            w.key("congruence_residual").value(s.congruence_residual);
            w.key("endpoint_global_after").value(s.endpoint_global_after);
            w.key("unwound_global_after").value(s.unwound_global_after);
            w.end_object();
        } else {
            w.null();
        }
        w.end_object();
    } else {
        w.null();
    }

    w.key("errors").begin_array();
    for (const auto& [code, message] : out.errors) {
        w.begin_object();
        w.key("code").value(code);
        w.key("message").value(message);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    return w.str();
}

std::string num(double v) {
    return std::isfinite(v) ? fmt::format("{:.12g}", v) : "nan";
}

std::string render_series(const PipelineOutcome& out) {
    std::string csv = "t,re_trace,im_trace,phi_running,phi_dyn_running,beta_cumulative\n";
    for (std::size_t j = 0; j < out.t.size(); ++j) {
        const double phi = j < out.phi_running.size() ? out.phi_running[j] : kNan;
        const double beta = j < out.beta_cumulative.size() ? out.beta_cumulative[j] : kNan;
        csv += fmt::format("{},{},{},{},{},{}\n", num(out.t[j]), num(out.trace[j].real()),
                           num(out.trace[j].imag()), num(phi), num(out.phi_dyn_running[j]), num(beta));
    }
    return csv;
}

} // namespace

int run(const RunConfig& config, std::ostream& err) {
    Prepared p;
    try {
        p = prepare(config);
    } catch (const Error& e) {
        err << "phase: invalid configuration: " << e.what() << "\n";
        return kExitConfigInvalid;
    }

    if (!check_cyclic(p.path, p.rho0, config.tol_cyclic).cyclic && !config.allow_noncyclic) {
        const CyclicityReport cyc = check_cyclic(p.path, p.rho0, config.tol_cyclic);
        err << fmt::format(
            "phase: evolution is not cyclic within {:.1e} (state residual {:.3e}, commutator residual {:.3e})\n",
            config.tol_cyclic, cyc.state_residual, cyc.commutator_residual);
        return kExitNotCyclic;
    }

    PipelineOutcome out;
    try {
        out = evaluate(config, p);
    } catch (const Error& e) {
        err << "phase: " << e.what() << "\n";
        return kExitNumerical;
    }

    try {
        write_file_atomic(config.report_path, render_report(config, out));
        write_file_atomic(config.series_path, render_series(out));
    } catch (const std::exception& e) {
        err << "phase: output failed: " << e.what() << "\n";
        return kExitNumerical;
    }

    if (!out.clean()) {
        for (const auto& [code, message] : out.errors)
            err << fmt::format("phase: {}: {}\n", code, message);
        return kExitNumerical;
    }
    return kExitOk;
}

namespace {

RunConfig point_config(const SweepConfig& sweep, double value) {
    RunConfig config = sweep.base;
    if (sweep.parameter == "tau") {
        const double tau_base = config.hamiltonian.total_duration();
        if (!(value > 0.0)) throw DomainError("tau sweep value must be positive");
        const double scale = value / tau_base;
        for (Segment& seg : config.hamiltonian.segments) {
            auto* cs = std::get_if<ConstantSegment>(&seg);
            if (!cs) throw DomainError("tau sweeps support constant segments only");
            cs->duration *= scale;
        }
        for (Pulse& pulse : config.hamiltonian.pulses) pulse.time *= scale;
    } else if (sweep.parameter == "r" || sweep.parameter == "theta") {
        if (!config.bloch) throw SchemaError("r/theta sweeps require a Bloch-form rho0");
        if (sweep.parameter == "r") config.bloch->r = value;
        else config.bloch->theta = value;
        config.rho0 = bloch_density(*config.bloch);
    } else if (sweep.parameter.rfind("winding_", 0) == 0) {
        if (!config.gauge) throw SchemaError("winding sweeps require a gauge block");
        const std::size_t k = std::stoul(sweep.parameter.substr(8));
        if (k >= config.gauge->windings.size())
            throw SchemaError(fmt::format("winding index {} out of range", k));
        config.gauge->windings[k] = static_cast<int>(std::lround(value));
    } else {
        throw SchemaError(fmt::format("unknown sweep parameter '{}'", sweep.parameter));
    }
    return config;
}

// For gauge-bearing sweeps the row reports the gauged path's phases.
struct SweepRow {
    double phi_total = kNan, phi_dyn = kNan, phi_geo = kNan, weighted_geo = kNan,
           cyclic_residual = kNan;
    std::string error;
};

SweepRow sweep_point(const SweepConfig& sweep, double value) {
    SweepRow row;
    try {
        const RunConfig config = point_config(sweep, value);
        Prepared p = prepare(config);

        const PropagatorPath* work = &p.path;
        PropagatorPath lifted, gauged;
        if (config.lift) {
            lifted = parallel_transport_lift(p.path, p.rho0);
            work = &lifted;
        }
        if (config.gauge) {
            const GaugeTransform transform = build_diagonal_gauge(
                p.rho0.spectrum, work->grid, config.gauge->windings, config.gauge->profile);
            gauged = apply_gauge(*work, transform);
            work = &gauged;
        }

        const CyclicityReport cyc = check_cyclic(*work, p.rho0, config.tol_cyclic);
        row.cyclic_residual = std::max(cyc.state_residual, cyc.commutator_residual);
        if (!cyc.cyclic && !config.allow_noncyclic)
            throw NotCyclicError("evolution not cyclic at this sweep point");

        const TotalPhaseResult tp = total_phase(*work, p.rho0, config.unwind_min_mag);
        const DynamicalPhaseResult dyn = dynamical_phase(*work, p.rho0);
        row.phi_total = tp.phi;
        row.phi_dyn = dyn.phi_d;
        row.phi_geo = tp.phi - dyn.phi_d;
        row.weighted_geo =
            per_level_phases(*work, p.rho0, config.branch_mode, config.unwind_min_mag).weighted_geo;
    } catch (const Error& e) {
        row.error = error_code(e);
    }
    return row;
}

} // namespace

int sweep(const SweepConfig& config, std::ostream& err) {
    std::string csv = "parameter,phi_total,phi_dyn,phi_geo,weighted_geo,cyclic_residual,error\n";
    for (int i = 0; i < config.points; ++i) {
        const double value =
            config.from + (config.to - config.from) * i / static_cast<double>(config.points - 1);
        const SweepRow row = sweep_point(config, value);
        csv += fmt::format("{},{},{},{},{},{},{}\n", num(value), num(row.phi_total),
                           num(row.phi_dyn), num(row.phi_geo), num(row.weighted_geo),
                           num(row.cyclic_residual), row.error);
    }
    try {
        write_file_atomic(config.csv_path, csv);
    } catch (const std::exception& e) {
        err << "phase: output failed: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}

} // namespace phaselab
