#pragma once

// Mach-Zehnder composition on the internal two-level space:
// BS, mirror, BS, with one lumped interferometer phase inserted between
// the mirror and the closing beam-splitter.

#include <stdexcept>
#include <vector>

#include "qop/core.hpp"

namespace qop {

struct MzSequence {
    Unitary2 bs_gate;
    Unitary2 mirror_gate;
    double phase = 0.0;  // rad, accumulated interferometer phase
};

struct FringeScan {
    std::vector<double> phases;
    std::vector<double> transfer_probabilities;
    double visibility = 0.0;  // (max - min) / (max + min)
};

// |<1| BS . diag(1, e^{i phase}) . M . BS |initial>|^2
inline double mz_transfer_probability(const MzSequence& seq, const QubitState& initial) {
    QubitState psi = apply_gate(seq.bs_gate, initial);
    psi = apply_gate(seq.mirror_gate, psi);
    psi = apply_gate(phase_diag(seq.phase), psi);
    psi = apply_gate(seq.bs_gate, psi);
    return std::norm(psi.c1);
}

inline double mz_transfer_probability(const MzSequence& seq) {
    return mz_transfer_probability(seq, ket0());
}

// n points spanning [lo, hi] inclusive.
inline std::vector<double> phase_grid(std::size_t n, double lo = 0.0,
                                      double hi = 2.0 * kPi) {
    if (n == 0) {
        throw std::invalid_argument("phase_grid: grid must be nonempty");
    }
    std::vector<double> grid(n);
    if (n == 1) {
        grid[0] = lo;
        return grid;
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = lo + step * static_cast<double>(i);
    }
    return grid;
}

inline FringeScan fringe_scan(const Unitary2& bs_gate, const Unitary2& mirror_gate,
                              const std::vector<double>& phases,
                              const QubitState& initial = ket0()) {
    if (phases.empty()) {
        throw std::invalid_argument("fringe_scan: phase grid must be nonempty");
    }
    FringeScan scan;
    scan.phases = phases;
    scan.transfer_probabilities.reserve(phases.size());
    double pmin = 1.0;
    double pmax = 0.0;
    for (double phase : phases) {
        const double p = mz_transfer_probability({bs_gate, mirror_gate, phase}, initial);
        scan.transfer_probabilities.push_back(p);
        pmin = std::min(pmin, p);
        pmax = std::max(pmax, p);
    }
    scan.visibility = (pmax + pmin) > 0.0 ? (pmax - pmin) / (pmax + pmin) : 0.0;
    return scan;
}

}  // namespace qop
