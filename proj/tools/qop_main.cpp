// qop: gate-synthesis CLI. Subcommands: optimize, gradcheck, fringe,
// export-bloch. Exit codes are a stable contract: 0 success/converged,
// 1 usage or config error, 2 quality failure (non-convergence or
// tolerance), 3 numerical abort.

#include <cstdint>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qop/qop.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitQuality = 2;
constexpr int kExitNumerical = 3;

int cmd_optimize(const std::string& config_path, bool allow_flat_phase) {
    const qop::CliConfig cfg = qop::parse_config(config_path, allow_flat_phase);
    qop::RunRecord record = qop::run_sequential_sgd(cfg.opt);
    record = qop::record_bloch_trajectories(std::move(record));

    qop::write_run_record(record, cfg.outputs.record_path);
    qop::write_pulses_csv(record, cfg.outputs.pulses_csv);
    qop::write_fidelity_csv(record, cfg.outputs.fidelity_csv);
    qop::write_bloch_csv(record, cfg.outputs.bloch_csv);

    std::cout << "target: " << qop::to_string(record.target) << '\n'
              << "steps_used: " << record.steps_used << '\n'
              << "converged: " << (record.converged ? "true" : "false") << '\n'
              << "f_trace (summed): " << qop::format_double(record.final_f_trace) << '\n'
              << "f_trace (product): " << qop::format_double(record.final_f_trace_product)
              << '\n'
              << "record: " << cfg.outputs.record_path << '\n';
    return record.converged ? kExitOk : kExitQuality;
}

struct GradcheckCase {
    qop::PulseTrain train;
    std::size_t k = 0;
    double h = 0.0;
    double rel_error = 0.0;
};

int cmd_gradcheck(const std::string& config_path, std::size_t trials, std::uint64_t seed) {
    if (trials == 0) {
        std::cerr << "gradcheck: --trials must be at least 1\n";
        return kExitUsage;
    }
    const qop::CliConfig cfg = qop::parse_config(config_path);
    const qop::GateTarget target = qop::GateTarget::of(cfg.opt.target);
    const double dt = cfg.opt.dt;
    const double scale = 0.5 / dt;

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> len_dist(1, 20);
    std::uniform_real_distribution<double> amp_dist(-scale, scale);

    GradcheckCase worst;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        qop::PulseTrain train{dt, cfg.opt.phi, {}};
        const std::size_t len = len_dist(rng);
        // resample until the summed drive is bounded away from the origin
        do {
            train.samples.clear();
            for (std::size_t i = 0; i < len; ++i) {
                train.samples.push_back({amp_dist(rng), amp_dist(rng)});
            }
            const qop::SumPair s = qop::cumulative_sums(train, len - 1);
            if (std::hypot(s.s_omega, s.s_delta) > 0.1 / dt) {
                break;
            }
        } while (true);

        const std::size_t k = len - 1;
        const double h = qop::default_fd_step(train, k);
        const qop::Gradient analytic = qop::analytic_gradient(target, train, k);
        const qop::Gradient fd = qop::finite_difference_gradient(target, train, k, h);
        const double rel = qop::gradient_relative_error(analytic, fd);
        if (rel >= worst.rel_error) {
            worst = {train, k, h, rel};
        }
    }

    std::cout << "gradcheck: target " << qop::to_string(cfg.opt.target) << ", " << trials
              << " trials, seed " << seed << '\n'
              << "max relative error (analytic vs central FD): "
              << qop::format_double(worst.rel_error) << '\n';

    const bool pass = worst.rel_error <= 1e-6;
    if (!pass) {
        // reproduce with these exact inputs
        std::cout << "worst case:\n"
                  << "  dt: " << qop::format_double(worst.train.dt) << '\n'
                  << "  phi: " << qop::format_double(worst.train.phi) << '\n'
                  << "  k: " << worst.k << '\n'
                  << "  h: " << qop::format_double(worst.h) << '\n'
                  << "  samples (omega, delta):\n";
        for (const qop::PulseSample& s : worst.train.samples) {
            std::cout << "    " << qop::format_double(s.omega) << ", "
                      << qop::format_double(s.delta) << '\n';
        }
    }
    std::cout << (pass ? "PASS" : "FAIL") << '\n';
    return pass ? kExitOk : kExitQuality;
}

int cmd_fringe(bool ideal, const std::string& bs_record_path,
               const std::string& mirror_record_path, std::size_t grid,
               const std::string& out_path) {
    if (grid < 2) {
        std::cerr << "fringe: --grid must be at least 2\n";
        return kExitUsage;
    }
    qop::Unitary2 bs_gate;
    qop::Unitary2 mirror_gate;
    if (ideal) {
        bs_gate = qop::GateTarget::beam_splitter().matrix;
        mirror_gate = qop::GateTarget::mirror().matrix;
    } else {
        if (bs_record_path.empty() || mirror_record_path.empty()) {
            std::cerr << "fringe: provide BS_RECORD and MIRROR_RECORD paths, or --ideal\n";
            return kExitUsage;
        }
        const qop::RunRecord bs = qop::read_run_record(bs_record_path);
        const qop::RunRecord mirror = qop::read_run_record(mirror_record_path);
        if (bs.target != qop::GateKind::BeamSplitter) {
            throw qop::record_error("fringe: \"" + bs_record_path +
                                    "\" is not a beam_splitter record");
        }
        if (mirror.target != qop::GateKind::Mirror) {
            throw qop::record_error("fringe: \"" + mirror_record_path +
                                    "\" is not a mirror record");
        }
        bs_gate = bs.final_unitary;
        mirror_gate = mirror.final_unitary;
    }

    const qop::FringeScan scan =
        qop::fringe_scan(bs_gate, mirror_gate, qop::phase_grid(grid));
    qop::write_fringe_csv(scan, out_path);
    std::cout << "fringe: " << grid << " phases over [0, 2pi] -> " << out_path << '\n'
              << "visibility: " << qop::format_double(scan.visibility) << '\n';
    return kExitOk;
}

int cmd_export_bloch(const std::string& record_path, const std::string& out_path) {
    qop::RunRecord record = qop::read_run_record(record_path);
    if (record.bloch_trajectories.empty()) {
        record = qop::record_bloch_trajectories(std::move(record));
    }
    qop::write_bloch_csv(record, out_path);
    std::cout << "bloch trajectories (" << record.bloch_trajectories.size()
              << " states, " << record.steps_used << " steps) -> " << out_path << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "qop: piecewise-constant pulse-train synthesis of atomic mirror and "
        "beam-splitter gates"};
    app.require_subcommand(1);

    std::string config_path;
    bool allow_flat_phase = false;
    CLI::App* optimize = app.add_subcommand(
        "optimize", "run the sequential gradient descent and write run outputs");
    optimize->add_option("--config", config_path, "JSON config file")->required();
    optimize->add_flag("--allow-flat-phase", allow_flat_phase,
                       "accept phi near an odd multiple of pi/2 despite the flat "
                       "mirror cost landscape");

    std::string gradcheck_config;
    std::size_t trials = 100;
    std::uint64_t seed = 12345;
    CLI::App* gradcheck = app.add_subcommand(
        "gradcheck", "compare analytic gradients against central finite differences");
    gradcheck->add_option("--config", gradcheck_config, "JSON config file")->required();
    gradcheck->add_option("--trials", trials, "number of random trains");
    gradcheck->add_option("--seed", seed, "RNG seed");

    bool ideal = false;
    std::string bs_record_path;
    std::string mirror_record_path;
    std::size_t grid = 101;
    std::string fringe_out = "fringe.csv";
    CLI::App* fringe = app.add_subcommand(
        "fringe", "scan the Mach-Zehnder transfer probability over the phase");
    fringe->add_option("bs_record", bs_record_path, "beam-splitter run record");
    fringe->add_option("mirror_record", mirror_record_path, "mirror run record");
    fringe->add_flag("--ideal", ideal, "use exact target gates instead of records");
    fringe->add_option("--grid", grid, "number of phase points");
    fringe->add_option("--out", fringe_out, "output CSV path");

    std::string bloch_record_path;
    std::string bloch_out = "bloch.csv";
    CLI::App* export_bloch =
        app.add_subcommand("export-bloch", "write Bloch trajectories from a run record");
    export_bloch->add_option("record", bloch_record_path, "run record path")->required();
    export_bloch->add_option("--out", bloch_out, "output CSV path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (optimize->parsed()) {
            return cmd_optimize(config_path, allow_flat_phase);
        }
        if (gradcheck->parsed()) {
            return cmd_gradcheck(gradcheck_config, trials, seed);
        }
        if (fringe->parsed()) {
            return cmd_fringe(ideal, bs_record_path, mirror_record_path, grid, fringe_out);
        }
        if (export_bloch->parsed()) {
            return cmd_export_bloch(bloch_record_path, bloch_out);
        }
    } catch (const qop::singular_origin_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const qop::config_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const qop::record_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
