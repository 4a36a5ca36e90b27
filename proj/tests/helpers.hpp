#pragma once

#include <random>

#include "qop/qop.hpp"

namespace testutil {

inline qop::PulseTrain random_train(std::mt19937_64& rng, double dt, double phi,
                                    std::size_t max_len = 30, double amp_scale = 5e5) {
    std::uniform_int_distribution<std::size_t> len_dist(1, max_len);
    std::uniform_real_distribution<double> amp(-amp_scale, amp_scale);
    qop::PulseTrain train{dt, phi, {}};
    const std::size_t len = len_dist(rng);
    for (std::size_t i = 0; i < len; ++i) {
        train.samples.push_back({amp(rng), amp(rng)});
    }
    return train;
}

// Train whose summed drive satisfies |S| > 0.1/dt.
inline qop::PulseTrain random_train_off_origin(std::mt19937_64& rng, double dt,
                                               double phi, std::size_t max_len = 20) {
    while (true) {
        qop::PulseTrain train = random_train(rng, dt, phi, max_len, 0.5 / dt);
        const qop::SumPair s = qop::cumulative_sums(train, train.samples.size() - 1);
        if (std::hypot(s.s_omega, s.s_delta) > 0.1 / dt) {
            return train;
        }
    }
}

// Phase at least `margin` rad away from every odd multiple of pi/2.
inline double random_phase_with_margin(std::mt19937_64& rng, double margin = 0.1) {
    std::uniform_real_distribution<double> dist(-qop::kPi, qop::kPi);
    while (true) {
        const double phi = dist(rng);
        if (qop::flat_phase_distance(phi) >= margin) {
            return phi;
        }
    }
}

}  // namespace testutil
