#pragma once

// Two-level drive algebra: pulse trains, SU(2) rotations, Bloch vectors.
// All frequencies are angular (rad/s), times in seconds, hbar = 1.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace qop {

using complexd = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kUnitaryTol = 1e-12;

// One piecewise-constant drive sample.
struct PulseSample {
    double omega = 0.0;  // Rabi frequency, rad/s
    double delta = 0.0;  // detuning, rad/s
};

// Drive history: fixed step dt, fixed laser phase phi, ordered samples.
struct PulseTrain {
    double dt = 0.0;   // s
    double phi = 0.0;  // rad
    std::vector<PulseSample> samples;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline double norm(const Vec3& v) {
    return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
}

// Rotation angle alpha >= 0 and unit axis on the Bloch sphere.
struct AxisAngle {
    double alpha = 0.0;
    Vec3 axis{0.0, 0.0, 1.0};

    // Canonical form: alpha >= 0, axis flipped if needed.
    static AxisAngle canonical(double alpha, Vec3 axis) {
        if (alpha < 0.0) {
            return {-alpha, {-axis.x, -axis.y, -axis.z}};
        }
        return {alpha, axis};
    }
};

struct Unitary2 {
    complexd u00, u01, u10, u11;

    static Unitary2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
};

inline Unitary2 operator*(const Unitary2& a, const Unitary2& b) {
    return {a.u00 * b.u00 + a.u01 * b.u10, a.u00 * b.u01 + a.u01 * b.u11,
            a.u10 * b.u00 + a.u11 * b.u10, a.u10 * b.u01 + a.u11 * b.u11};
}

inline Unitary2 adjoint(const Unitary2& u) {
    return {std::conj(u.u00), std::conj(u.u10), std::conj(u.u01), std::conj(u.u11)};
}

inline complexd trace(const Unitary2& u) { return u.u00 + u.u11; }

inline complexd det(const Unitary2& u) { return u.u00 * u.u11 - u.u01 * u.u10; }

inline double max_abs_diff(const Unitary2& a, const Unitary2& b) {
    double m = std::abs(a.u00 - b.u00);
    m = std::max(m, std::abs(a.u01 - b.u01));
    m = std::max(m, std::abs(a.u10 - b.u10));
    m = std::max(m, std::abs(a.u11 - b.u11));
    return m;
}

// Max-entry norm of U†U - I plus |det| drift.
inline double unitarity_defect(const Unitary2& u) {
    const Unitary2 g = adjoint(u) * u;
    const double gram = max_abs_diff(g, Unitary2::identity());
    const double det_drift = std::abs(std::abs(det(u)) - 1.0);
    return std::max(gram, det_drift);
}

inline bool is_unitary(const Unitary2& u, double tol = kUnitaryTol) {
    return unitarity_defect(u) <= tol;
}

inline Unitary2 sigma_x() { return {0.0, 1.0, 1.0, 0.0}; }
inline Unitary2 sigma_y() {
    return {0.0, complexd(0.0, -1.0), complexd(0.0, 1.0), 0.0};
}
inline Unitary2 sigma_z() { return {1.0, 0.0, 0.0, -1.0}; }

// diag(1, e^{i phi})
inline Unitary2 phase_diag(double phi) {
    return {1.0, 0.0, 0.0, std::polar(1.0, phi)};
}

struct QubitState {
    complexd c0, c1;

    static QubitState normalized(complexd c0, complexd c1) {
        const double n = std::sqrt(std::norm(c0) + std::norm(c1));
        if (n == 0.0) {
            throw std::invalid_argument("QubitState: zero vector cannot be normalized");
        }
        return {c0 / n, c1 / n};
    }
};

inline QubitState ket0() { return {1.0, 0.0}; }
inline QubitState ket1() { return {0.0, 1.0}; }

struct SumPair {
    double s_omega = 0.0;  // rad/s
    double s_delta = 0.0;  // rad/s
};

namespace detail {
inline void check_index(const PulseTrain& train, std::size_t k, const char* who) {
    if (k >= train.samples.size()) {
        throw std::out_of_range(std::string(who) + ": sample index " + std::to_string(k) +
                                " out of range (train has " +
                                std::to_string(train.samples.size()) + " samples)");
    }
}
}  // namespace detail

// Partial sums of the drive through sample k. Strict left-to-right
// accumulation; the order is part of the contract (bit-reproducible runs).
inline SumPair cumulative_sums(const PulseTrain& train, std::size_t k) {
    detail::check_index(train, k, "cumulative_sums");
    SumPair s;
    for (std::size_t n = 0; n <= k; ++n) {
        s.s_omega += train.samples[n].omega;
        s.s_delta += train.samples[n].delta;
    }
    return s;
}

// Axis-angle of the summed-exponent rotation for given partial sums.
// Degenerate sums map to alpha = 0 about +z.
inline AxisAngle axis_angle_from_sums(double dt, double phi, double s_omega,
                                      double s_delta) {
    const double s = std::sqrt(s_omega * s_omega + s_delta * s_delta);
    if (s == 0.0) {
        return {0.0, {0.0, 0.0, 1.0}};
    }
    const double alpha = dt * s;
    const Vec3 axis{std::cos(phi) * s_omega / s, std::sin(phi) * s_omega / s,
                    s_delta / s};
    return {alpha, axis};
}

inline AxisAngle axis_angle_of_train(const PulseTrain& train, std::size_t k) {
    const SumPair s = cumulative_sums(train, k);
    return axis_angle_from_sums(train.dt, train.phi, s.s_omega, s.s_delta);
}

// U = exp(-i alpha/2 r.sigma) = cos(alpha/2) I - i sin(alpha/2) r.sigma
inline Unitary2 su2_from_axis_angle(const AxisAngle& aa) {
    const double c = std::cos(0.5 * aa.alpha);
    const double s = std::sin(0.5 * aa.alpha);
    const Vec3& r = aa.axis;
    return {complexd(c, -s * r.z), complexd(-s * r.y, -s * r.x),
            complexd(s * r.y, -s * r.x), complexd(c, s * r.z)};
}

// Summed-exponent propagator: exponent collects the partial sums through
// sample k. Exact only when all samples commute; this is the forward map
// the cost and optimizer are defined on.
inline Unitary2 propagate_summed(const PulseTrain& train, std::size_t k) {
    return su2_from_axis_angle(axis_angle_of_train(train, k));
}

// Time-ordered propagator: product of per-sample exponentials, latest on
// the left. Physical cross-check for the summed form.
inline Unitary2 propagate_product(const PulseTrain& train, std::size_t k) {
    detail::check_index(train, k, "propagate_product");
    Unitary2 u = Unitary2::identity();
    for (std::size_t n = 0; n <= k; ++n) {
        const PulseSample& p = train.samples[n];
        const AxisAngle aa =
            axis_angle_from_sums(train.dt, train.phi, p.omega, p.delta);
        u = su2_from_axis_angle(aa) * u;
    }
    return u;
}

inline QubitState apply_gate(const Unitary2& u, const QubitState& psi) {
    const complexd c0 = u.u00 * psi.c0 + u.u01 * psi.c1;
    const complexd c1 = u.u10 * psi.c0 + u.u11 * psi.c1;
    return QubitState::normalized(c0, c1);
}

// Pauli expectation vector; |0> maps to (0,0,+1).
inline Vec3 bloch_vector(const QubitState& psi) {
    const complexd cross = std::conj(psi.c0) * psi.c1;
    return {2.0 * cross.real(), 2.0 * cross.imag(),
            std::norm(psi.c0) - std::norm(psi.c1)};
}

// Two-beam Raman drive, common detuning delta off the intermediate level.
struct RamanParams {
    double omega1 = 0.0;  // rad/s
    double omega2 = 0.0;  // rad/s
    double delta = 0.0;   // rad/s, must be nonzero
    double phi1 = 0.0;    // rad
    double phi2 = 0.0;    // rad
};

struct RamanEffective {
    double omega = 0.0;            // rad/s
    double phi = 0.0;              // rad, in (-pi, pi]
    bool validity_warning = false; // set when |delta| is not >> omega1, omega2
};

// Wrap into (-pi, pi].
inline double wrap_phase(double phi) {
    double r = std::fmod(phi + kPi, 2.0 * kPi);
    if (r <= 0.0) {
        r += 2.0 * kPi;
    }
    return r - kPi;
}

// Effective two-level reduction: omega = omega1*omega2/(2 delta),
// phi = phi2 - phi1. Valid in the far-detuned regime; the warning flag
// trips when |delta| < ratio_threshold * max(|omega1|, |omega2|).
inline RamanEffective raman_effective(const RamanParams& p,
                                      double ratio_threshold = 10.0) {
    if (p.delta == 0.0) {
        throw std::domain_error("raman_effective: delta must be nonzero");
    }
    RamanEffective out;
    out.omega = p.omega1 * p.omega2 / (2.0 * p.delta);
    out.phi = wrap_phase(p.phi2 - p.phi1);
    out.validity_warning =
        std::abs(p.delta) < ratio_threshold * std::max(std::abs(p.omega1), std::abs(p.omega2));
    return out;
}

}  // namespace qop
