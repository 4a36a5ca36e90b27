#pragma once

// Sequential per-sample gradient descent: each optimizer step emits one
// physical pulse sample of duration dt, and the gradient is evaluated at
// the cumulative sums accumulated so far.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "qop/cost.hpp"

namespace qop {

// Optional zero-mean Gaussian kick added to each freshly emitted sample.
struct NoiseConfig {
    double sigma_omega = 0.0;  // rad/s
    double sigma_delta = 0.0;  // rad/s
    std::uint64_t seed = 0;
};

inline bool operator==(const NoiseConfig& a, const NoiseConfig& b) {
    return a.sigma_omega == b.sigma_omega && a.sigma_delta == b.sigma_delta &&
           a.seed == b.seed;
}

// Optional amplitude saturation. Physical drives clip.
struct ClampConfig {
    double omega_max = 0.0;  // rad/s, bound on |omega|
    double delta_max = 0.0;  // rad/s, bound on |delta|
};

inline bool operator==(const ClampConfig& a, const ClampConfig& b) {
    return a.omega_max == b.omega_max && a.delta_max == b.delta_max;
}

struct OptimizerConfig {
    GateKind target = GateKind::Mirror;
    double phi = 0.0;     // rad
    double dt = 0.0;      // s
    double omega0 = 0.0;  // rad/s
    double delta0 = 0.0;  // rad/s
    double eta_omega = 0.0;
    double eta_delta = 0.0;
    std::size_t max_steps = 0;
    double fidelity_threshold = 0.0;  // f_trace stop level
    std::optional<NoiseConfig> noise;
    std::optional<ClampConfig> clamp;
};

inline double default_fidelity_threshold(GateKind kind) {
    return kind == GateKind::Mirror ? 0.995 : 0.998;
}

inline void validate(const OptimizerConfig& cfg) {
    if (!(cfg.dt > 0.0)) {
        throw std::invalid_argument("OptimizerConfig: dt must be > 0");
    }
    if (cfg.max_steps < 1) {
        throw std::invalid_argument("OptimizerConfig: max_steps must be >= 1");
    }
    if (cfg.eta_omega < 0.0 || cfg.eta_delta < 0.0) {
        throw std::invalid_argument("OptimizerConfig: learning rates must be >= 0");
    }
    if (cfg.omega0 == 0.0 && cfg.delta0 == 0.0) {
        throw std::invalid_argument(
            "OptimizerConfig: initial pulse (omega0, delta0) must be nonzero");
    }
    if (std::abs(std::cos(cfg.phi)) == 0.0) {
        throw std::invalid_argument("OptimizerConfig: |cos(phi)| must be > 0");
    }
    if (!(cfg.fidelity_threshold > 0.0) || cfg.fidelity_threshold > 1.0) {
        throw std::invalid_argument(
            "OptimizerConfig: fidelity_threshold must lie in (0, 1]");
    }
    if (cfg.clamp) {
        if (!(cfg.clamp->omega_max > 0.0) || !(cfg.clamp->delta_max > 0.0)) {
            throw std::invalid_argument("OptimizerConfig: clamp bounds must be > 0");
        }
    }
    if (cfg.noise && (cfg.noise->sigma_omega < 0.0 || cfg.noise->sigma_delta < 0.0)) {
        throw std::invalid_argument("OptimizerConfig: noise sigmas must be >= 0");
    }
}

// One row per optimizer step / pulse sample.
struct StepEntry {
    std::size_t k = 0;
    double omega = 0.0;
    double delta = 0.0;
    double s_omega = 0.0;
    double s_delta = 0.0;
    double alpha = 0.0;
    Vec3 axis;
    double f_trace = 0.0;
    double f_squared = 0.0;
    double cost = 1.0;
};

struct RunRecord {
    GateKind target = GateKind::Mirror;
    double dt = 0.0;
    double phi = 0.0;
    std::vector<StepEntry> entries;
    Unitary2 final_unitary = Unitary2::identity();
    bool converged = false;
    std::size_t steps_used = 0;
    // f_trace against the summed propagator (the optimizer's own map) and
    // against the time-ordered product, reported side by side. Their gap
    // measures the summed-exponent approximation.
    double final_f_trace = 0.0;
    double final_f_trace_product = 0.0;
    std::map<std::string, std::vector<Vec3>> bloch_trajectories;
};

inline bool operator==(const Vec3& a, const Vec3& b) {
    return a.x == b.x && a.y == b.y && a.z == b.z;
}

inline bool operator==(const StepEntry& a, const StepEntry& b) {
    return a.k == b.k && a.omega == b.omega && a.delta == b.delta &&
           a.s_omega == b.s_omega && a.s_delta == b.s_delta && a.alpha == b.alpha &&
           a.axis == b.axis && a.f_trace == b.f_trace && a.f_squared == b.f_squared &&
           a.cost == b.cost;
}

inline bool operator==(const Unitary2& a, const Unitary2& b) {
    return a.u00 == b.u00 && a.u01 == b.u01 && a.u10 == b.u10 && a.u11 == b.u11;
}

inline bool operator==(const RunRecord& a, const RunRecord& b) {
    return a.target == b.target && a.dt == b.dt && a.phi == b.phi &&
           a.entries == b.entries && a.final_unitary == b.final_unitary &&
           a.converged == b.converged && a.steps_used == b.steps_used &&
           a.final_f_trace == b.final_f_trace &&
           a.final_f_trace_product == b.final_f_trace_product &&
           a.bloch_trajectories == b.bloch_trajectories;
}

// Rebuild the step-k unitary from a record entry's sums.
inline Unitary2 unitary_at_step(const RunRecord& record, std::size_t k) {
    if (k >= record.entries.size()) {
        throw std::out_of_range("unitary_at_step: no entry " + std::to_string(k));
    }
    const StepEntry& e = record.entries[k];
    return su2_from_axis_angle(
        axis_angle_from_sums(record.dt, record.phi, e.s_omega, e.s_delta));
}

// Pulse train emitted by a run, reassembled from the record.
inline PulseTrain train_of_record(const RunRecord& record) {
    PulseTrain train{record.dt, record.phi, {}};
    train.samples.reserve(record.entries.size());
    for (const StepEntry& e : record.entries) {
        train.samples.push_back({e.omega, e.delta});
    }
    return train;
}

// Run the sequential descent. Step 0 drives with (omega0, delta0); each
// later sample is the previous one moved against the gradient evaluated
// at the current cumulative sums. Stops at the first step whose f_trace
// reaches the threshold, or after max_steps samples.
inline RunRecord run_sequential_sgd(const OptimizerConfig& cfg) {
    validate(cfg);
    const GateTarget target = GateTarget::of(cfg.target);

    std::mt19937_64 rng(cfg.noise ? cfg.noise->seed : 0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    RunRecord record;
    record.target = cfg.target;
    record.dt = cfg.dt;
    record.phi = cfg.phi;

    PulseTrain train{cfg.dt, cfg.phi, {{cfg.omega0, cfg.delta0}}};
    train.samples.reserve(cfg.max_steps);

    SumPair sums;
    for (std::size_t k = 0; k < cfg.max_steps; ++k) {
        sums.s_omega += train.samples[k].omega;
        sums.s_delta += train.samples[k].delta;
        if (sums.s_omega == 0.0 && sums.s_delta == 0.0) {
            throw singular_origin_error();
        }

        const AxisAngle aa =
            axis_angle_from_sums(cfg.dt, cfg.phi, sums.s_omega, sums.s_delta);
        const Unitary2 u = su2_from_axis_angle(aa);
        const FidelityReport rep = trace_fidelity(target, u);

        StepEntry entry;
        entry.k = k;
        entry.omega = train.samples[k].omega;
        entry.delta = train.samples[k].delta;
        entry.s_omega = sums.s_omega;
        entry.s_delta = sums.s_delta;
        entry.alpha = aa.alpha;
        entry.axis = aa.axis;
        entry.f_trace = rep.f_trace;
        entry.f_squared = rep.f_squared;
        entry.cost = rep.cost;
        record.entries.push_back(entry);

        if (rep.f_trace >= cfg.fidelity_threshold) {
            record.converged = true;
            break;
        }
        if (k + 1 == cfg.max_steps) {
            break;
        }

        const Gradient g = analytic_gradient_from_sums(cfg.target, cfg.dt, cfg.phi,
                                                       sums.s_omega, sums.s_delta);
        double next_omega = train.samples[k].omega - cfg.eta_omega * g.d_omega;
        double next_delta = train.samples[k].delta - cfg.eta_delta * g.d_delta;
        if (cfg.noise) {
            next_omega += cfg.noise->sigma_omega * gauss(rng);
            next_delta += cfg.noise->sigma_delta * gauss(rng);
        }
        if (cfg.clamp) {
            next_omega = std::clamp(next_omega, -cfg.clamp->omega_max, cfg.clamp->omega_max);
            next_delta = std::clamp(next_delta, -cfg.clamp->delta_max, cfg.clamp->delta_max);
        }
        train.samples.push_back({next_omega, next_delta});
    }

    record.steps_used = record.entries.size();
    record.final_unitary = su2_from_axis_angle(
        axis_angle_from_sums(cfg.dt, cfg.phi, sums.s_omega, sums.s_delta));
    record.final_f_trace = record.entries.back().f_trace;
    record.final_f_trace_product =
        trace_fidelity(target, propagate_product(train, record.steps_used - 1)).f_trace;
    return record;
}

// Fig-style Bloch readout: the states whose transfer the two gates are
// meant to realize.
inline std::vector<std::pair<std::string, QubitState>> default_bloch_states(
    GateKind kind) {
    if (kind == GateKind::Mirror) {
        return {{"|0>", ket0()}, {"|1>", ket1()}};
    }
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    return {{"|0>", ket0()},
            {"(i|0>+|1>)/sqrt2", {complexd(0.0, inv_sqrt2), complexd(inv_sqrt2, 0.0)}}};
}

// Appends, for each labeled start state, the Bloch vector of U(k dt)|psi0>
// at every recorded step.
inline RunRecord record_bloch_trajectories(
    RunRecord record,
    const std::vector<std::pair<std::string, QubitState>>& initial_states) {
    for (const auto& [label, psi0] : initial_states) {
        std::vector<Vec3> traj;
        traj.reserve(record.entries.size());
        for (std::size_t k = 0; k < record.entries.size(); ++k) {
            traj.push_back(bloch_vector(apply_gate(unitary_at_step(record, k), psi0)));
        }
        record.bloch_trajectories[label] = std::move(traj);
    }
    return record;
}

inline RunRecord record_bloch_trajectories(RunRecord record) {
    return record_bloch_trajectories(std::move(record),
                                     default_bloch_states(record.target));
}

}  // namespace qop
