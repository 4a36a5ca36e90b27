#pragma once

// Config files, run-record persistence, and delimited-text exports.
// Both document formats are JSON; numbers are written in shortest
// round-trip form so re-reading reproduces values exactly.

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qop/interferometer.hpp"
#include "qop/optimizer.hpp"

namespace qop {

class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

class record_error : public std::runtime_error {
public:
    explicit record_error(const std::string& what) : std::runtime_error(what) {}
};

struct OutputPaths {
    std::string record_path;
    std::string pulses_csv;
    std::string fidelity_csv;
    std::string bloch_csv;
};

struct CliConfig {
    OptimizerConfig opt;
    OutputPaths outputs;
    bool allow_flat_phase = false;
};

// Distance from phi to the nearest odd multiple of pi/2.
inline double flat_phase_distance(double phi) {
    return std::abs(std::remainder(phi - 0.5 * kPi, kPi));
}

inline constexpr double kFlatPhaseHardTol = 1e-9;
inline constexpr double kFlatPhaseMargin = 1e-2;

// The mirror cost is flat (identically 1) at phi = (2n+1) pi/2, so phases
// at or near those points are rejected. The margin check can be waived;
// the hard tolerance cannot.
inline void validate_phase(double phi, bool allow_flat_phase) {
    const double dist = flat_phase_distance(phi);
    if (dist < kFlatPhaseHardTol) {
        throw config_error(
            "config: phi is an odd multiple of pi/2; the cost landscape is flat "
            "and optimization is ill-posed (phi != (2n+1) pi/2 required)");
    }
    if (!allow_flat_phase && dist < kFlatPhaseMargin) {
        throw config_error(
            "config: phi is within " + std::to_string(kFlatPhaseMargin) +
            " rad of an odd multiple of pi/2; pass allow_flat_phase to proceed anyway");
    }
}

namespace detail {

using json = nlohmann::json;

inline void reject_unknown_keys(const json& obj, const char* where,
                                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* name : allowed) {
            if (key == name) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw config_error(std::string("config: unknown field \"") + where + key +
                               "\"");
        }
    }
}

inline const json& require_field(const json& obj, const char* where, const char* name) {
    const auto it = obj.find(name);
    if (it == obj.end()) {
        throw config_error(std::string("config: missing required field \"") + where +
                           name + "\"");
    }
    return *it;
}

inline double require_number(const json& obj, const char* where, const char* name) {
    const json& v = require_field(obj, where, name);
    if (!v.is_number()) {
        throw config_error(std::string("config: field \"") + where + name +
                           "\" must be a number");
    }
    return v.get<double>();
}

inline std::string require_string(const json& obj, const char* where, const char* name) {
    const json& v = require_field(obj, where, name);
    if (!v.is_string()) {
        throw config_error(std::string("config: field \"") + where + name +
                           "\" must be a string");
    }
    return v.get<std::string>();
}

inline json parse_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) {
        throw config_error(std::string(what) + ": cannot open \"" + path + "\"");
    }
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        // nlohmann messages carry line/column context
        throw config_error(std::string(what) + ": " + path + ": " + e.what());
    }
}

}  // namespace detail

inline GateKind gate_kind_from_string(const std::string& name) {
    if (name == "mirror") {
        return GateKind::Mirror;
    }
    if (name == "beam_splitter") {
        return GateKind::BeamSplitter;
    }
    throw config_error("config: target must be \"mirror\" or \"beam_splitter\", got \"" +
                       name + "\"");
}

inline CliConfig parse_config(const std::string& path, bool allow_flat_override = false) {
    using detail::require_field;
    using detail::require_number;
    using detail::require_string;
    using json = nlohmann::json;

    const json root = detail::parse_json_file(path, "config");
    if (!root.is_object()) {
        throw config_error("config: " + path + ": top level must be an object");
    }
    detail::reject_unknown_keys(root, "",
                                {"target", "phi", "dt", "omega0", "delta0", "eta_omega",
                                 "eta_delta", "max_steps", "fidelity_threshold", "noise",
                                 "clamp", "allow_flat_phase", "outputs"});

    CliConfig cfg;
    cfg.opt.target = gate_kind_from_string(require_string(root, "", "target"));
    cfg.opt.phi = require_number(root, "", "phi");
    cfg.opt.dt = require_number(root, "", "dt");
    cfg.opt.omega0 = require_number(root, "", "omega0");
    cfg.opt.delta0 = require_number(root, "", "delta0");
    cfg.opt.eta_omega = require_number(root, "", "eta_omega");
    cfg.opt.eta_delta = require_number(root, "", "eta_delta");

    const json& steps = require_field(root, "", "max_steps");
    if (!steps.is_number_integer() || steps.get<long long>() < 1) {
        throw config_error("config: field \"max_steps\" must be a positive integer");
    }
    cfg.opt.max_steps = steps.get<std::size_t>();

    if (root.contains("fidelity_threshold")) {
        cfg.opt.fidelity_threshold = require_number(root, "", "fidelity_threshold");
    } else {
        cfg.opt.fidelity_threshold = default_fidelity_threshold(cfg.opt.target);
    }

    if (root.contains("noise")) {
        const json& noise = root.at("noise");
        if (!noise.is_object()) {
            throw config_error("config: field \"noise\" must be an object");
        }
        detail::reject_unknown_keys(noise, "noise.", {"sigma_omega", "sigma_delta", "seed"});
        NoiseConfig nc;
        nc.sigma_omega = require_number(noise, "noise.", "sigma_omega");
        nc.sigma_delta = require_number(noise, "noise.", "sigma_delta");
        const json& seed = require_field(noise, "noise.", "seed");
        if (!seed.is_number_integer()) {
            throw config_error("config: field \"noise.seed\" must be an integer");
        }
        nc.seed = seed.get<std::uint64_t>();
        cfg.opt.noise = nc;
    }

    if (root.contains("clamp")) {
        const json& clamp = root.at("clamp");
        if (!clamp.is_object()) {
            throw config_error("config: field \"clamp\" must be an object");
        }
        detail::reject_unknown_keys(clamp, "clamp.", {"omega_max", "delta_max"});
        ClampConfig cc;
        cc.omega_max = require_number(clamp, "clamp.", "omega_max");
        cc.delta_max = require_number(clamp, "clamp.", "delta_max");
        cfg.opt.clamp = cc;
    }

    if (root.contains("allow_flat_phase")) {
        const json& flag = root.at("allow_flat_phase");
        if (!flag.is_boolean()) {
            throw config_error("config: field \"allow_flat_phase\" must be a boolean");
        }
        cfg.allow_flat_phase = flag.get<bool>();
    }
    cfg.allow_flat_phase = cfg.allow_flat_phase || allow_flat_override;

    const json& outputs = require_field(root, "", "outputs");
    if (!outputs.is_object()) {
        throw config_error("config: field \"outputs\" must be an object");
    }
    detail::reject_unknown_keys(
        outputs, "outputs.", {"record_path", "pulses_csv", "fidelity_csv", "bloch_csv"});
    cfg.outputs.record_path = require_string(outputs, "outputs.", "record_path");
    cfg.outputs.pulses_csv = require_string(outputs, "outputs.", "pulses_csv");
    cfg.outputs.fidelity_csv = require_string(outputs, "outputs.", "fidelity_csv");
    cfg.outputs.bloch_csv = require_string(outputs, "outputs.", "bloch_csv");

    try {
        validate(cfg.opt);
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("config: ") + e.what());
    }
    validate_phase(cfg.opt.phi, cfg.allow_flat_phase);
    return cfg;
}

// Shortest decimal form that parses back to the same double.
inline std::string format_double(double value) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace detail {

inline json complex_to_json(const complexd& z) {
    return json::array({z.real(), z.imag()});
}

inline complexd complex_from_json(const json& j, const char* name) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
        throw record_error(std::string("record: field \"") + name +
                           "\" must be a [re, im] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

inline json unitary_to_json(const Unitary2& u) {
    return {{"u00", complex_to_json(u.u00)},
            {"u01", complex_to_json(u.u01)},
            {"u10", complex_to_json(u.u10)},
            {"u11", complex_to_json(u.u11)}};
}

inline Unitary2 unitary_from_json(const json& j) {
    if (!j.is_object()) {
        throw record_error("record: unitary must be an object");
    }
    return {complex_from_json(j.at("u00"), "u00"), complex_from_json(j.at("u01"), "u01"),
            complex_from_json(j.at("u10"), "u10"), complex_from_json(j.at("u11"), "u11")};
}

}  // namespace detail

inline constexpr const char* kRecordFormat = "qop-run-record";
inline constexpr int kRecordVersion = 1;

inline nlohmann::json run_record_to_json(const RunRecord& record) {
    using json = nlohmann::json;
    json entries = json::array();
    for (const StepEntry& e : record.entries) {
        entries.push_back({{"k", e.k},
                           {"omega", e.omega},
                           {"delta", e.delta},
                           {"s_omega", e.s_omega},
                           {"s_delta", e.s_delta},
                           {"alpha", e.alpha},
                           {"axis", json::array({e.axis.x, e.axis.y, e.axis.z})},
                           {"f_trace", e.f_trace},
                           {"f_squared", e.f_squared},
                           {"cost", e.cost}});
    }
    json bloch = json::object();
    for (const auto& [label, traj] : record.bloch_trajectories) {
        json points = json::array();
        for (const Vec3& v : traj) {
            points.push_back(json::array({v.x, v.y, v.z}));
        }
        bloch[label] = std::move(points);
    }
    return {{"format", kRecordFormat},
            {"version", kRecordVersion},
            {"target", to_string(record.target)},
            {"dt", record.dt},
            {"phi", record.phi},
            {"converged", record.converged},
            {"steps_used", record.steps_used},
            {"final_f_trace", record.final_f_trace},
            {"final_f_trace_product", record.final_f_trace_product},
            {"final_unitary", detail::unitary_to_json(record.final_unitary)},
            {"entries", std::move(entries)},
            {"bloch", std::move(bloch)}};
}

inline void write_run_record(const RunRecord& record, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw record_error("record: cannot open \"" + path + "\" for writing");
    }
    out << run_record_to_json(record).dump(2) << '\n';
}

inline RunRecord read_run_record(const std::string& path) {
    using json = nlohmann::json;
    json root;
    try {
        root = detail::parse_json_file(path, "record");
    } catch (const config_error& e) {
        throw record_error(e.what());
    }
    try {
        if (!root.is_object() || root.value("format", "") != kRecordFormat) {
            throw record_error("record: \"" + path + "\" is not a " +
                               std::string(kRecordFormat) + " document");
        }
        RunRecord record;
        record.target = gate_kind_from_string(root.at("target").get<std::string>());
        record.dt = root.at("dt").get<double>();
        record.phi = root.at("phi").get<double>();
        record.converged = root.at("converged").get<bool>();
        record.steps_used = root.at("steps_used").get<std::size_t>();
        record.final_f_trace = root.at("final_f_trace").get<double>();
        record.final_f_trace_product = root.at("final_f_trace_product").get<double>();
        record.final_unitary = detail::unitary_from_json(root.at("final_unitary"));
        if (!is_unitary(record.final_unitary)) {
            throw record_error("record: \"" + path +
                               "\" final_unitary fails the unitarity check");
        }
        for (const json& e : root.at("entries")) {
            StepEntry entry;
            entry.k = e.at("k").get<std::size_t>();
            entry.omega = e.at("omega").get<double>();
            entry.delta = e.at("delta").get<double>();
            entry.s_omega = e.at("s_omega").get<double>();
            entry.s_delta = e.at("s_delta").get<double>();
            entry.alpha = e.at("alpha").get<double>();
            const json& axis = e.at("axis");
            entry.axis = {axis.at(0).get<double>(), axis.at(1).get<double>(),
                          axis.at(2).get<double>()};
            entry.f_trace = e.at("f_trace").get<double>();
            entry.f_squared = e.at("f_squared").get<double>();
            entry.cost = e.at("cost").get<double>();
            record.entries.push_back(entry);
        }
        for (const auto& [label, points] : root.at("bloch").items()) {
            std::vector<Vec3> traj;
            for (const json& p : points) {
                traj.push_back(
                    {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()});
            }
            record.bloch_trajectories[label] = std::move(traj);
        }
        return record;
    } catch (const json::exception& e) {
        throw record_error("record: " + path + ": " + e.what());
    } catch (const config_error& e) {
        throw record_error("record: " + path + ": " + e.what());
    }
}

namespace detail {

inline std::ofstream open_csv(const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw record_error("csv: cannot open \"" + path + "\" for writing");
    }
    return out;
}

}  // namespace detail

inline void write_pulses_csv(const RunRecord& record, const std::string& path) {
    auto out = detail::open_csv(path);
    out << "k,omega,delta\n";
    for (const StepEntry& e : record.entries) {
        out << e.k << ',' << format_double(e.omega) << ',' << format_double(e.delta)
            << '\n';
    }
}

inline void write_fidelity_csv(const RunRecord& record, const std::string& path) {
    auto out = detail::open_csv(path);
    out << "k,f_trace,f_squared,cost\n";
    for (const StepEntry& e : record.entries) {
        out << e.k << ',' << format_double(e.f_trace) << ',' << format_double(e.f_squared)
            << ',' << format_double(e.cost) << '\n';
    }
}

inline void write_bloch_csv(const RunRecord& record, const std::string& path) {
    auto out = detail::open_csv(path);
    out << "state,k,x,y,z\n";
    for (const auto& [label, traj] : record.bloch_trajectories) {
        for (std::size_t k = 0; k < traj.size(); ++k) {
            out << label << ',' << k << ',' << format_double(traj[k].x) << ','
                << format_double(traj[k].y) << ',' << format_double(traj[k].z) << '\n';
        }
    }
}

inline void write_fringe_csv(const FringeScan& scan, const std::string& path) {
    auto out = detail::open_csv(path);
    out << "phi,p_transfer\n";
    for (std::size_t i = 0; i < scan.phases.size(); ++i) {
        out << format_double(scan.phases[i]) << ','
            << format_double(scan.transfer_probabilities[i]) << '\n';
    }
}

}  // namespace qop
