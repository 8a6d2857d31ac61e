#include "phaselab/config.hpp"

#include <cmath>
#include <cstdlib>
#include <numbers>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "json_writer.hpp"

namespace phaselab {

namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        throw SchemaError(fmt::format("missing field at {}/{}", where, key));
    return obj.at(key);
}

double number_at(const json& v, const std::string& where) {
    if (!v.is_number()) throw SchemaError(fmt::format("expected number at {}", where));
    return v.get<double>();
}

double number_field(const json& obj, const char* key, const std::string& where) {
    return number_at(require(obj, key, where), where + "/" + key);
}

Complex parse_complex(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw SchemaError(fmt::format("expected number or [re, im] at {}", where));
}

Matrix parse_matrix(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty())
        throw SchemaError(fmt::format("expected non-empty matrix (nested arrays) at {}", where));
    const std::size_t d = v.size();
    Matrix m(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        if (!v[i].is_array() || v[i].size() != d)
            throw SchemaError(fmt::format("row {} at {} is not length {}", i, where, d));
        for (std::size_t j = 0; j < d; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                parse_complex(v[i][j], fmt::format("{}/{}/{}", where, i, j));
    }
    return m;
}

void write_complex(detail::JsonWriter& w, Complex z) {
    w.begin_array().value(z.real()).value(z.imag()).end_array();
}

void write_matrix(detail::JsonWriter& w, const Matrix& m) {
    w.begin_array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        w.begin_array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) write_complex(w, m(i, j));
        w.end_array();
    }
    w.end_array();
}

int default_steps() {
    if (const char* env = std::getenv("PHASE_DEFAULT_STEPS")) {
        const int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 4096;
}

HamiltonianSpec parse_hamiltonian(const json& h, int dim) {
    HamiltonianSpec spec;
    spec.dim = dim;
    const json& segments = require(h, "segments", "/hamiltonian");
    if (!segments.is_array())
        throw SchemaError("expected array at /hamiltonian/segments");
    for (std::size_t i = 0; i < segments.size(); ++i) {
        const std::string where = fmt::format("/hamiltonian/segments/{}", i);
        const json& seg = segments[i];
        const std::string type = require(seg, "type", where).get<std::string>();
        const double duration = number_field(seg, "duration", where);
        if (!(duration > 0.0))
            throw DomainError(fmt::format("segment duration must be positive at {}", where));
        if (type == "constant") {
            spec.segments.push_back(
                ConstantSegment{duration, parse_matrix(require(seg, "matrix", where), where + "/matrix")});
        } else if (type == "sampled") {
            SampledSegment ss{duration, {}};
            const json& samples = require(seg, "samples", where);
            for (std::size_t k = 0; k < samples.size(); ++k) {
                const std::string sw = fmt::format("{}/samples/{}", where, k);
                ss.samples.emplace_back(number_field(samples[k], "t", sw),
                                        parse_matrix(require(samples[k], "matrix", sw), sw + "/matrix"));
            }
            std::sort(ss.samples.begin(), ss.samples.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            spec.segments.push_back(std::move(ss));
        } else {
            throw SchemaError(fmt::format("unknown segment type '{}' at {}", type, where));
        }
    }
    if (h.contains("pulses")) {
        const json& pulses = h.at("pulses");
        for (std::size_t i = 0; i < pulses.size(); ++i) {
            const std::string where = fmt::format("/hamiltonian/pulses/{}", i);
            spec.pulses.push_back(Pulse{number_field(pulses[i], "time", where),
                                        parse_matrix(require(pulses[i], "matrix", where), where + "/matrix")});
        }
    }
    return spec;
}

} // namespace

Matrix bloch_density(const BlochParams& b) {
    if (b.r < 0.0 || b.r > 1.0)
        throw DomainError(fmt::format("Bloch radius {} outside [0, 1]", b.r));
    const double nx = b.r * std::sin(b.theta) * std::cos(b.phi);
    const double ny = b.r * std::sin(b.theta) * std::sin(b.phi);
    const double nz = b.r * std::cos(b.theta);
    Matrix rho(2, 2);
    rho << Complex(0.5 * (1.0 + nz), 0.0), Complex(0.5 * nx, -0.5 * ny),
           Complex(0.5 * nx, 0.5 * ny), Complex(0.5 * (1.0 - nz), 0.0);
    return rho;
}

RunConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw SchemaError(fmt::format("config is not valid JSON: {}", e.what()));
    }

    RunConfig config;
    const json& system = require(doc, "system", "");
    config.dim = static_cast<int>(number_field(system, "dim", "/system"));
    if (config.dim < 1 || config.dim > 32)
        throw DomainError(fmt::format("dim {} outside supported range [1,32]", config.dim));

    if (system.contains("bloch")) {
        if (config.dim != 2) throw DomainError("bloch form is only valid for dim=2");
        const json& b = system.at("bloch");
        config.bloch = BlochParams{number_field(b, "r", "/system/bloch"),
                                   number_field(b, "theta", "/system/bloch"),
                                   number_field(b, "phi", "/system/bloch")};
        config.rho0 = bloch_density(*config.bloch);
    } else {
        config.rho0 = parse_matrix(require(system, "rho0", "/system"), "/system/rho0");
        if (config.rho0.rows() != config.dim)
            throw SchemaError("/system/rho0 dimension does not match /system/dim");
    }

    config.hamiltonian = parse_hamiltonian(require(doc, "hamiltonian", ""), config.dim);

    config.steps = default_steps();
    if (doc.contains("grid")) {
        const json& grid = doc.at("grid");
        if (grid.contains("steps")) config.steps = static_cast<int>(number_at(grid.at("steps"), "/grid/steps"));
        if (config.steps < 1) throw DomainError("/grid/steps must be positive");
    }
    if (doc.contains("tolerances")) {
        const json& tol = doc.at("tolerances");
        if (tol.contains("cyclic")) config.tol_cyclic = number_at(tol.at("cyclic"), "/tolerances/cyclic");
        if (tol.contains("unwind_min_mag"))
            config.unwind_min_mag = number_at(tol.at("unwind_min_mag"), "/tolerances/unwind_min_mag");
    }
    if (doc.contains("gauge") && !doc.at("gauge").is_null()) {
        const json& g = doc.at("gauge");
        GaugeConfig gauge;
        for (const json& n : require(g, "windings", "/gauge")) {
            const double v = number_at(n, "/gauge/windings");
            if (v != std::floor(v)) throw DomainError("gauge windings must be integers");
            gauge.windings.push_back(static_cast<int>(v));
        }
        if (g.contains("profile")) {
            const std::string p = g.at("profile").get<std::string>();
            if (p == "linear") gauge.profile = ProfileShape::Linear;
            else if (p == "smooth") gauge.profile = ProfileShape::Smooth;
            else throw SchemaError(fmt::format("unknown gauge profile '{}'", p));
        }
        config.gauge = std::move(gauge);
    }
    if (doc.contains("mode")) {
        const json& mode = doc.at("mode");
        if (mode.contains("branch_mode")) {
            const std::string b = mode.at("branch_mode").get<std::string>();
            if (b == "anchored") config.branch_mode = BranchMode::Anchored;
            else if (b == "independent") config.branch_mode = BranchMode::Independent;
            else throw SchemaError(fmt::format("unknown branch_mode '{}'", b));
        }
        if (mode.contains("allow_noncyclic")) config.allow_noncyclic = mode.at("allow_noncyclic").get<bool>();
        if (mode.contains("parallel_transport_lift"))
            config.lift = mode.at("parallel_transport_lift").get<bool>();
    }
    if (doc.contains("outputs")) {
        const json& out = doc.at("outputs");
        if (out.contains("report_path")) config.report_path = out.at("report_path").get<std::string>();
        if (out.contains("series_path")) config.series_path = out.at("series_path").get<std::string>();
    }
    return config;
}

SweepConfig parse_sweep(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw SchemaError(fmt::format("sweep config is not valid JSON: {}", e.what()));
    }
    SweepConfig sweep;
    sweep.base = parse_config(require(doc, "base", "").dump());
    sweep.parameter = require(doc, "parameter", "").get<std::string>();
    const json& range = require(doc, "range", "");
    sweep.from = number_field(range, "from", "/range");
    sweep.to = number_field(range, "to", "/range");
    sweep.points = static_cast<int>(number_field(range, "points", "/range"));
    if (sweep.points < 2) throw SchemaError("/range/points must be at least 2");
    if (!std::isfinite(sweep.from) || !std::isfinite(sweep.to))
        throw SchemaError("/range bounds must be finite");
    if (doc.contains("output")) sweep.csv_path = doc.at("output").get<std::string>();
    return sweep;
}

std::string dump_config(const RunConfig& config) {
    detail::JsonWriter w;
    w.begin_object();
    w.key("system").begin_object();
    w.key("dim").value(config.dim);
    if (config.bloch) {
        w.key("bloch").begin_object();
        w.key("r").value(config.bloch->r);
        w.key("theta").value(config.bloch->theta);
        w.key("phi").value(config.bloch->phi);
        w.end_object();
    } else {
        w.key("rho0");
        write_matrix(w, config.rho0);
    }
    w.end_object();

    w.key("hamiltonian").begin_object();
    w.key("segments").begin_array();
    for (const Segment& seg : config.hamiltonian.segments) {
        w.begin_object();
        if (const auto* cs = std::get_if<ConstantSegment>(&seg)) {
            w.key("type").value("constant");
            w.key("duration").value(cs->duration);
            w.key("matrix");
            write_matrix(w, cs->hamiltonian);
        } else {
            const auto& ss = std::get<SampledSegment>(seg);
            w.key("type").value("sampled");
            w.key("duration").value(ss.duration);
            w.key("samples").begin_array();
            for (const auto& [t, m] : ss.samples) {
                w.begin_object();
                w.key("t").value(t);
                w.key("matrix");
                write_matrix(w, m);
                w.end_object();
            }
            w.end_array();
        }
        w.end_object();
    }
    w.end_array();
    w.key("pulses").begin_array();
    for (const Pulse& p : config.hamiltonian.pulses) {
        w.begin_object();
        w.key("time").value(p.time);
        w.key("matrix");
        write_matrix(w, p.unitary);
        w.end_object();
    }
    w.end_array();
    w.end_object();

    w.key("grid").begin_object().key("steps").value(config.steps).end_object();
    w.key("tolerances").begin_object();
    w.key("cyclic").value(config.tol_cyclic);
    w.key("unwind_min_mag").value(config.unwind_min_mag);
    w.end_object();

    if (config.gauge) {
        w.key("gauge").begin_object();
        w.key("windings").begin_array();
        for (int n : config.gauge->windings) w.value(n);
        w.end_array();
        w.key("profile").value(config.gauge->profile == ProfileShape::Linear ? "linear" : "smooth");
        w.end_object();
    }

    w.key("mode").begin_object();
    w.key("branch_mode").value(config.branch_mode == BranchMode::Anchored ? "anchored" : "independent");
    w.key("allow_noncyclic").value(config.allow_noncyclic);
    w.key("parallel_transport_lift").value(config.lift);
    w.end_object();

    w.key("outputs").begin_object();
    w.key("report_path").value(config.report_path);
    w.key("series_path").value(config.series_path);
    w.end_object();
    w.end_object();
    return w.str();
}

RunConfig scenario_precession(double r, double theta, double omega, int turns) {
    if (r < 0.0 || r > 1.0) throw DomainError("precession: r must lie in [0, 1]");
    if (!(omega > 0.0)) throw DomainError("precession: omega must be positive");
    if (turns < 1) throw DomainError("precession: turns must be a positive integer");

    RunConfig config;
    config.dim = 2;
    config.bloch = BlochParams{r, theta, 0.0};
    config.rho0 = bloch_density(*config.bloch);
    Matrix h(2, 2);
    h << Complex(0.5 * omega, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0), Complex(-0.5 * omega, 0.0);
    config.hamiltonian.dim = 2;
    config.hamiltonian.segments.push_back(ConstantSegment{2.0 * kPi * turns / omega, h});
    return config;
}

RunConfig scenario_echo(double omega, double tau) {
    if (!(omega > 0.0)) throw DomainError("echo: omega must be positive");
    if (!(tau > 0.0)) throw DomainError("echo: tau must be positive");

    RunConfig config;
    config.dim = 2;
    config.bloch = BlochParams{0.5, 0.0, 0.0};
    config.rho0 = bloch_density(*config.bloch);
    Matrix h(2, 2);
    h << Complex(0.5 * omega, 0.0), Complex(0.0, 0.0), Complex(0.0, 0.0), Complex(-0.5 * omega, 0.0);
    // pi rotation about x: exp(-i (pi/2) sigma_x) = -i sigma_x
    Matrix pi_pulse(2, 2);
    pi_pulse << Complex(0.0, 0.0), Complex(0.0, -1.0), Complex(0.0, -1.0), Complex(0.0, 0.0);
    config.hamiltonian.dim = 2;
    config.hamiltonian.segments.push_back(ConstantSegment{0.5 * tau, h});
    config.hamiltonian.segments.push_back(ConstantSegment{0.5 * tau, h});
    config.hamiltonian.pulses.push_back(Pulse{0.5 * tau, pi_pulse});
    config.hamiltonian.pulses.push_back(Pulse{tau, pi_pulse});
    return config;
}

RunConfig scenario_gauge_demo(double r, double theta, double omega, int turns,
                              const std::vector<int>& windings, ProfileShape profile) {
    RunConfig config = scenario_precession(r, theta, omega, turns);
    config.gauge = GaugeConfig{windings, profile};
    return config;
}

} // namespace phaselab
