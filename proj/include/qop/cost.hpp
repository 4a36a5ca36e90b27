#pragma once

// Gate targets, trace-overlap fidelity, closed-form costs and their
// analytic gradients, plus the central finite-difference oracle.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "qop/core.hpp"

namespace qop {

enum class GateKind { Mirror, BeamSplitter };

inline const char* to_string(GateKind kind) {
    return kind == GateKind::Mirror ? "mirror" : "beam_splitter";
}

struct GateTarget {
    GateKind kind;
    Unitary2 matrix;

    static GateTarget mirror() { return {GateKind::Mirror, sigma_x()}; }

    static GateTarget beam_splitter() {
        const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
        return {GateKind::BeamSplitter,
                {inv_sqrt2, complexd(0.0, inv_sqrt2), complexd(0.0, inv_sqrt2), inv_sqrt2}};
    }

    static GateTarget of(GateKind kind) {
        return kind == GateKind::Mirror ? mirror() : beam_splitter();
    }
};

// Both overlap conventions side by side: f_trace = |Tr(G† U)|/d and its
// square. cost = 1 - f_trace^2.
struct FidelityReport {
    double f_trace = 0.0;
    double f_squared = 0.0;
    double cost = 1.0;
};

struct Gradient {
    double d_omega = 0.0;
    double d_delta = 0.0;
};

// The rotation axis (and with it the gradient) is undefined when both
// cumulative sums vanish.
class singular_origin_error : public std::domain_error {
public:
    singular_origin_error()
        : std::domain_error("cumulative sums are exactly (0, 0); rotation axis undefined") {}
};

inline FidelityReport trace_fidelity(const GateTarget& target, const Unitary2& u) {
    const complexd overlap = trace(adjoint(target.matrix) * u);
    FidelityReport rep;
    rep.f_trace = 0.5 * std::abs(overlap);
    rep.f_squared = rep.f_trace * rep.f_trace;
    rep.cost = 1.0 - rep.f_squared;
    return rep;
}

// Closed-form costs on the axis-angle parameters:
//   mirror:        J = 1 - sin^2(alpha/2) r_x^2
//   beam-splitter: J = 1 - (cos(alpha/2) - sin(alpha/2) r_x)^2 / 2
// with r_x carrying the cos(phi) factor. Equal to the trace cost.
inline double closed_form_cost_from_sums(GateKind kind, double dt, double phi,
                                         double s_omega, double s_delta) {
    const AxisAngle aa = axis_angle_from_sums(dt, phi, s_omega, s_delta);
    const double half = 0.5 * aa.alpha;
    const double c = std::cos(half);
    const double s = std::sin(half);
    // aa.axis.x already 0 for degenerate sums
    const double rx = (aa.alpha == 0.0) ? 0.0 : aa.axis.x;
    if (kind == GateKind::Mirror) {
        return 1.0 - s * s * rx * rx;
    }
    const double w = c - s * rx;
    return 1.0 - 0.5 * w * w;
}

inline double closed_form_cost(const GateTarget& target, const PulseTrain& train,
                               std::size_t k) {
    const SumPair sums = cumulative_sums(train, k);
    return closed_form_cost_from_sums(target.kind, train.dt, train.phi, sums.s_omega,
                                      sums.s_delta);
}

// Analytic gradient of the closed-form cost with respect to any single
// sample at or before index k. The cost touches the pulses only through
// the cumulative sums, so dJ/dOmega_j = dJ/dS_omega for every j <= k.
inline Gradient analytic_gradient_from_sums(GateKind kind, double dt, double phi,
                                            double s_omega, double s_delta) {
    const double u = s_omega;
    const double v = s_delta;
    const double s2 = u * u + v * v;
    if (s2 == 0.0) {
        throw singular_origin_error();
    }
    const double s = std::sqrt(s2);
    const double alpha = dt * s;
    const double sin_a = std::sin(alpha);
    const double sin_h = std::sin(0.5 * alpha);
    const double cos_h = std::cos(0.5 * alpha);
    const double cphi = std::cos(phi);

    Gradient g;
    if (kind == GateKind::Mirror) {
        const double c2 = cphi * cphi;
        const double s3 = s2 * s;
        const double s4 = s2 * s2;
        g.d_omega = -c2 * (0.5 * dt * sin_a * u * u * u / s3 +
                           2.0 * sin_h * sin_h * u * v * v / s4);
        g.d_delta = -c2 * (0.5 * dt * sin_a * u * u * v / s3 -
                           2.0 * sin_h * sin_h * u * u * v / s4);
        return g;
    }

    const double rx = cphi * u / s;
    const double w = cos_h - sin_h * rx;
    const double s3 = s2 * s;
    // dw/du, dw/dv via d(alpha/2)/d. = dt .*/(2 s) and d(u/s), chain rule
    const double dw_du =
        -sin_h * 0.5 * dt * u / s - cos_h * 0.5 * dt * u * rx / s - sin_h * cphi * v * v / s3;
    const double dw_dv =
        -sin_h * 0.5 * dt * v / s - cos_h * 0.5 * dt * v * rx / s + sin_h * cphi * u * v / s3;
    g.d_omega = -w * dw_du;
    g.d_delta = -w * dw_dv;
    return g;
}

inline Gradient analytic_gradient(const GateTarget& target, const PulseTrain& train,
                                  std::size_t k) {
    const SumPair sums = cumulative_sums(train, k);
    return analytic_gradient_from_sums(target.kind, train.dt, train.phi, sums.s_omega,
                                       sums.s_delta);
}

// Step scaled to the operating point; fixed steps fail across the rad/s
// dynamic range.
inline double default_fd_step(const PulseTrain& train, std::size_t k) {
    const SumPair sums = cumulative_sums(train, k);
    const double s = std::sqrt(sums.s_omega * sums.s_omega + sums.s_delta * sums.s_delta);
    return std::max(1e-6 * s, 1e-3);
}

// Central difference of the trace-route cost under perturbation of sample
// k. Independent of the closed-form path the analytic gradient uses.
inline Gradient finite_difference_gradient(const GateTarget& target,
                                           const PulseTrain& train, std::size_t k,
                                           double h = 0.0) {
    detail::check_index(train, k, "finite_difference_gradient");
    if (h < 0.0) {
        throw std::invalid_argument("finite_difference_gradient: step must be positive");
    }
    if (h == 0.0) {
        h = default_fd_step(train, k);
    }
    PulseTrain probe = train;
    const auto cost_at = [&](double omega, double delta) {
        probe.samples[k].omega = omega;
        probe.samples[k].delta = delta;
        return trace_fidelity(target, propagate_summed(probe, k)).cost;
    };
    const double omega = train.samples[k].omega;
    const double delta = train.samples[k].delta;
    Gradient g;
    g.d_omega = (cost_at(omega + h, delta) - cost_at(omega - h, delta)) / (2.0 * h);
    g.d_delta = (cost_at(omega, delta + h) - cost_at(omega, delta - h)) / (2.0 * h);
    return g;
}

// Relative disagreement between two gradients, sized against the larger
// of the two (infinity norm over both components).
inline double gradient_relative_error(const Gradient& a, const Gradient& b) {
    const double num =
        std::max(std::abs(a.d_omega - b.d_omega), std::abs(a.d_delta - b.d_delta));
    const double den = std::max({std::abs(a.d_omega), std::abs(a.d_delta),
                                 std::abs(b.d_omega), std::abs(b.d_delta)});
    if (den == 0.0) {
        return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return num / den;
}

}  // namespace qop
