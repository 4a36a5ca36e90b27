// Coarse hyperparameter sweep used to select the shipped default configs.
// Scans the initial pulse area omega0*dt and the dimensionless step
// kappa = eta*dt^2/2 on log grids, runs each candidate, and reports
// convergence plus gate-structure margins.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qop/qop.hpp"

namespace {

struct Candidate {
    double omega0_dt = 0.0;
    double kappa = 0.0;
    double delta0_ratio = 0.0;
    bool converged = false;
    std::size_t steps = 0;
    double f_trace = 0.0;
    double structure_margin = 0.0;  // positive = inside the structure window
    double visibility = 0.0;        // fringe vs ideal partner gate
    double score = 0.0;
};

double structure_margin_of(qop::GateKind kind, const qop::Unitary2& u) {
    const double off = std::min(std::abs(u.u01), std::abs(u.u10));
    if (kind == qop::GateKind::Mirror) {
        return off - 0.99;
    }
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    const double diag_dev =
        std::max(std::abs(std::abs(u.u00) - inv_sqrt2), std::abs(std::abs(u.u11) - inv_sqrt2));
    const double off_dev =
        std::max(std::abs(std::abs(u.u01) - inv_sqrt2), std::abs(std::abs(u.u10) - inv_sqrt2));
    return 0.02 - std::max(diag_dev, off_dev);
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
    std::vector<double> grid;
    grid.reserve(n);
    const double ratio = std::log(hi / lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        grid.push_back(lo * std::exp(ratio * static_cast<double>(i)));
    }
    return grid;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"qop-sweep: grid search for shipped optimizer defaults"};

    std::string target_name = "mirror";
    double dt = 1e-6;
    double threshold = 0.0;
    std::size_t max_steps = 0;
    std::size_t preferred_steps = 0;
    std::size_t top = 25;
    app.add_option("--target", target_name, "mirror or beam_splitter");
    app.add_option("--dt", dt, "time step, seconds");
    app.add_option("--threshold", threshold, "stop fidelity (default per target)");
    app.add_option("--max-steps", max_steps, "step budget (default per target)");
    app.add_option("--prefer-n", preferred_steps, "preferred step count (default per target)");
    app.add_option("--top", top, "rows to print");
    CLI11_PARSE(app, argc, argv);

    const qop::GateKind kind = qop::gate_kind_from_string(target_name);
    const bool mirror = kind == qop::GateKind::Mirror;
    if (threshold == 0.0) {
        threshold = mirror ? 0.9965 : 0.9997;
    }
    if (max_steps == 0) {
        max_steps = mirror ? 100 : 60;
    }
    if (preferred_steps == 0) {
        preferred_steps = mirror ? 50 : 26;
    }
    const qop::Unitary2 ideal_partner = mirror
                                            ? qop::GateTarget::beam_splitter().matrix
                                            : qop::GateTarget::mirror().matrix;

    std::vector<Candidate> results;
    for (double delta0_ratio : {0.0, 0.05}) {
        for (double omega0_dt : log_grid(0.01, 0.5, 28)) {
            for (double kappa : log_grid(1e-4, 1.0, 33)) {
                qop::OptimizerConfig cfg;
                cfg.target = kind;
                cfg.phi = qop::kPi;
                cfg.dt = dt;
                cfg.omega0 = omega0_dt / dt;
                cfg.delta0 = delta0_ratio * cfg.omega0;
                cfg.eta_omega = 2.0 * kappa / (dt * dt);
                cfg.eta_delta = cfg.eta_omega;
                cfg.max_steps = max_steps;
                cfg.fidelity_threshold = threshold;

                Candidate cand;
                cand.omega0_dt = omega0_dt;
                cand.kappa = kappa;
                cand.delta0_ratio = delta0_ratio;
                try {
                    const qop::RunRecord rec = qop::run_sequential_sgd(cfg);
                    cand.converged = rec.converged;
                    cand.steps = rec.steps_used;
                    cand.f_trace = rec.final_f_trace;
                    cand.structure_margin = structure_margin_of(kind, rec.final_unitary);
                    const qop::Unitary2 bs = mirror ? ideal_partner : rec.final_unitary;
                    const qop::Unitary2 m = mirror ? rec.final_unitary : ideal_partner;
                    cand.visibility =
                        qop::fringe_scan(bs, m, qop::phase_grid(101)).visibility;
                } catch (const qop::singular_origin_error&) {
                    cand.converged = false;
                }
                if (cand.converged && cand.structure_margin > 0.0) {
                    const double step_gap =
                        std::abs(static_cast<double>(cand.steps) -
                                 static_cast<double>(preferred_steps));
                    cand.score = step_gap - 100.0 * cand.structure_margin;
                    results.push_back(cand);
                }
            }
        }
    }

    std::sort(results.begin(), results.end(),
              [](const Candidate& a, const Candidate& b) { return a.score < b.score; });

    std::printf("target=%s dt=%g threshold=%g max_steps=%zu (preferred N=%zu)\n",
                target_name.c_str(), dt, threshold, max_steps, preferred_steps);
    std::printf("%12s %12s %8s %6s %10s %10s %10s %10s\n", "omega0*dt", "kappa", "d0/o0",
                "steps", "f_trace", "margin", "visib.", "score");
    for (std::size_t i = 0; i < std::min(top, results.size()); ++i) {
        const Candidate& c = results[i];
        std::printf("%12.6g %12.6g %8.3g %6zu %10.6f %10.6f %10.6f %10.4f\n", c.omega0_dt,
                    c.kappa, c.delta0_ratio, c.steps, c.f_trace, c.structure_margin,
                    c.visibility, c.score);
    }
    if (results.empty()) {
        std::printf("no candidate satisfied the constraints\n");
        return 2;
    }
    return 0;
}
