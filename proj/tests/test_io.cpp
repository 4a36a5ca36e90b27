#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qop/io.hpp"

using namespace qop;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
    static const fs::path dir = [] {
        fs::path p = fs::temp_directory_path() / "qop_io_tests";
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

fs::path write_file(const std::string& name, const std::string& body) {
    const fs::path path = scratch_dir() / name;
    std::ofstream out(path);
    out << body;
    return path;
}

std::string minimal_config(const std::string& overrides = "",
                           const std::string& target = "mirror") {
    std::string body = R"({
  "target": ")" + target + R"(",
  "phi": 3.141592653589793,
  "dt": 1e-06,
  "omega0": 32000.0,
  "delta0": 1600.0,
  "eta_omega": 5e9,
  "eta_delta": 5e9,
  "max_steps": 100)";
    if (!overrides.empty()) {
        body += ",\n" + overrides;
    }
    body += R"(,
  "outputs": {
    "record_path": "r.json",
    "pulses_csv": "p.csv",
    "fidelity_csv": "f.csv",
    "bloch_csv": "b.csv"
  }
})";
    return body;
}

RunRecord small_noisy_run() {
    OptimizerConfig cfg;
    cfg.target = GateKind::BeamSplitter;
    cfg.phi = kPi;
    cfg.dt = 1e-6;
    cfg.omega0 = 13400.0;
    cfg.delta0 = 670.0;
    cfg.eta_omega = 8.4e9;
    cfg.eta_delta = 8.4e9;
    cfg.max_steps = 60;
    cfg.fidelity_threshold = 0.9997;
    cfg.noise = NoiseConfig{150.0, 40.0, 2024};
    return record_bloch_trajectories(run_sequential_sgd(cfg));
}

}  // namespace

TEST_CASE("a complete config parses into the optimizer settings") {
    const fs::path path = write_file("complete.json", minimal_config());
    const CliConfig cfg = parse_config(path.string());
    REQUIRE(cfg.opt.target == GateKind::Mirror);
    REQUIRE(cfg.opt.phi == kPi);
    REQUIRE(cfg.opt.dt == 1e-6);
    REQUIRE(cfg.opt.omega0 == 32000.0);
    REQUIRE(cfg.opt.delta0 == 1600.0);
    REQUIRE(cfg.opt.eta_omega == 5e9);
    REQUIRE(cfg.opt.max_steps == 100);
    // threshold defaulted per target
    REQUIRE(cfg.opt.fidelity_threshold == 0.995);
    REQUIRE_FALSE(cfg.opt.noise.has_value());
    REQUIRE_FALSE(cfg.opt.clamp.has_value());
    REQUIRE(cfg.outputs.record_path == "r.json");
    REQUIRE(cfg.outputs.bloch_csv == "b.csv");

    const fs::path bs_path =
        write_file("complete_bs.json", minimal_config("", "beam_splitter"));
    REQUIRE(parse_config(bs_path.string()).opt.fidelity_threshold == 0.998);
}

TEST_CASE("noise and clamp blocks parse with all fields required") {
    const fs::path path = write_file(
        "noise.json",
        minimal_config(R"(  "noise": {"sigma_omega": 100.0, "sigma_delta": 20.0, "seed": 7},
  "clamp": {"omega_max": 1e6, "delta_max": 1e5})"));
    const CliConfig cfg = parse_config(path.string());
    REQUIRE(cfg.opt.noise.has_value());
    REQUIRE(cfg.opt.noise->sigma_omega == 100.0);
    REQUIRE(cfg.opt.noise->seed == 7);
    REQUIRE(cfg.opt.clamp.has_value());
    REQUIRE(cfg.opt.clamp->omega_max == 1e6);

    const fs::path broken = write_file(
        "noise_missing.json", minimal_config(R"(  "noise": {"sigma_omega": 100.0})"));
    REQUIRE_THROWS_WITH(parse_config(broken.string()),
                        Catch::Matchers::ContainsSubstring("sigma_delta"));
}

TEST_CASE("missing fields are reported by name") {
    std::string body = minimal_config();
    body.erase(body.find("  \"dt\": 1e-06,\n"), std::string("  \"dt\": 1e-06,\n").size());
    const fs::path path = write_file("missing_dt.json", body);
    REQUIRE_THROWS_WITH(parse_config(path.string()),
                        Catch::Matchers::ContainsSubstring("\"dt\""));
}

TEST_CASE("unknown fields are rejected by name") {
    const fs::path path = write_file("unknown.json", minimal_config(R"(  "spam": 1)"));
    REQUIRE_THROWS_WITH(parse_config(path.string()),
                        Catch::Matchers::ContainsSubstring("spam"));
}

TEST_CASE("malformed numbers fail with line context") {
    const fs::path path = write_file("malformed.json", R"({
  "target": "mirror",
  "phi": 0..3
})");
    REQUIRE_THROWS_WITH(parse_config(path.string()),
                        Catch::Matchers::ContainsSubstring("line"));
}

TEST_CASE("wrongly typed fields fail with the field name") {
    const fs::path path = write_file(
        "badtype.json", [] {
            std::string body = minimal_config();
            const std::string needle = "\"dt\": 1e-06";
            body.replace(body.find(needle), needle.size(), "\"dt\": \"soon\"");
            return body;
        }());
    REQUIRE_THROWS_WITH(parse_config(path.string()),
                        Catch::Matchers::ContainsSubstring("\"dt\""));
}

TEST_CASE("nonexistent config path") {
    REQUIRE_THROWS_AS(parse_config((scratch_dir() / "nope.json").string()), config_error);
}

TEST_CASE("phases at and near odd multiples of pi/2") {
    // exactly pi/2: rejected unconditionally
    const fs::path hard = write_file("phi_hard.json", [] {
        std::string body = minimal_config(R"(  "allow_flat_phase": true)");
        const std::string needle = "\"phi\": 3.141592653589793";
        body.replace(body.find(needle), needle.size(), "\"phi\": 1.5707963267948966");
        return body;
    }());
    REQUIRE_THROWS_AS(parse_config(hard.string()), config_error);

    // pi/2 - 1e-3: inside the soft margin, needs the override
    const std::string near_phi = "\"phi\": " + format_double(0.5 * kPi - 1e-3);
    const fs::path soft = write_file("phi_soft.json", [&] {
        std::string body = minimal_config();
        const std::string needle = "\"phi\": 3.141592653589793";
        body.replace(body.find(needle), needle.size(), near_phi);
        return body;
    }());
    REQUIRE_THROWS_WITH(parse_config(soft.string()),
                        Catch::Matchers::ContainsSubstring("allow_flat_phase"));
    REQUIRE_NOTHROW(parse_config(soft.string(), /*allow_flat_override=*/true));

    const fs::path soft_flagged = write_file("phi_soft_flagged.json", [&] {
        std::string body = minimal_config(R"(  "allow_flat_phase": true)");
        const std::string needle = "\"phi\": 3.141592653589793";
        body.replace(body.find(needle), needle.size(), near_phi);
        return body;
    }());
    REQUIRE_NOTHROW(parse_config(soft_flagged.string()));
}

TEST_CASE("run records survive a write/read round trip unchanged") {
    const RunRecord record = small_noisy_run();
    const fs::path path = scratch_dir() / "roundtrip.json";
    write_run_record(record, path.string());
    const RunRecord back = read_run_record(path.string());
    REQUIRE(back == record);
}

TEST_CASE("reading a record rejects junk and non-record documents") {
    REQUIRE_THROWS_AS(read_run_record((scratch_dir() / "missing.json").string()),
                      record_error);

    const fs::path not_record = write_file("not_record.json", "{\"format\": \"other\"}");
    REQUIRE_THROWS_AS(read_run_record(not_record.string()), record_error);

    const fs::path garbled = write_file("garbled.json", "{\"format\": \"qop-run-record\"");
    REQUIRE_THROWS_AS(read_run_record(garbled.string()), record_error);

    // non-unitary final matrix is refused on load
    RunRecord record = small_noisy_run();
    record.final_unitary.u00 = 5.0;
    const fs::path bad_unitary = scratch_dir() / "bad_unitary.json";
    write_run_record(record, bad_unitary.string());
    REQUIRE_THROWS_WITH(read_run_record(bad_unitary.string()),
                        Catch::Matchers::ContainsSubstring("unitarity"));
}

TEST_CASE("format_double round-trips through text exactly") {
    for (const double v : {0.1, 1.0 / 3.0, kPi, 1e300, 5e-324, -0.0, 32000.0, 1e-6,
                           0.9946999999999999}) {
        const std::string s = format_double(v);
        REQUIRE(std::strtod(s.c_str(), nullptr) == v);
    }
}

TEST_CASE("CSV tables carry headers and full-precision values") {
    const RunRecord record = small_noisy_run();
    const fs::path pulses = scratch_dir() / "pulses.csv";
    const fs::path fidelity = scratch_dir() / "fidelity.csv";
    const fs::path bloch = scratch_dir() / "bloch.csv";
    write_pulses_csv(record, pulses.string());
    write_fidelity_csv(record, fidelity.string());
    write_bloch_csv(record, bloch.string());

    std::ifstream in(pulses);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "k,omega,delta");
    std::size_t k = 0;
    while (std::getline(in, line)) {
        std::stringstream row(line);
        std::string field;
        std::getline(row, field, ',');
        REQUIRE(std::stoul(field) == k);
        std::getline(row, field, ',');
        REQUIRE(std::strtod(field.c_str(), nullptr) == record.entries[k].omega);
        std::getline(row, field, ',');
        REQUIRE(std::strtod(field.c_str(), nullptr) == record.entries[k].delta);
        ++k;
    }
    REQUIRE(k == record.entries.size());

    std::ifstream fin(fidelity);
    std::getline(fin, line);
    REQUIRE(line == "k,f_trace,f_squared,cost");

    std::ifstream bin(bloch);
    std::getline(bin, line);
    REQUIRE(line == "state,k,x,y,z");
    std::size_t rows = 0;
    while (std::getline(bin, line)) {
        ++rows;
    }
    REQUIRE(rows == 2 * record.entries.size());
}

TEST_CASE("fringe CSV mirrors the scan") {
    const FringeScan scan = fringe_scan(GateTarget::beam_splitter().matrix,
                                        GateTarget::mirror().matrix, phase_grid(11));
    const fs::path path = scratch_dir() / "fringe.csv";
    write_fringe_csv(scan, path.string());
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    REQUIRE(line == "phi,p_transfer");
    std::size_t i = 0;
    while (std::getline(in, line)) {
        const auto comma = line.find(',');
        REQUIRE(std::strtod(line.substr(0, comma).c_str(), nullptr) == scan.phases[i]);
        REQUIRE(std::strtod(line.substr(comma + 1).c_str(), nullptr) ==
                scan.transfer_probabilities[i]);
        ++i;
    }
    REQUIRE(i == 11);
}

TEST_CASE("unwritable output paths raise errors") {
    const RunRecord record = small_noisy_run();
    REQUIRE_THROWS_AS(write_run_record(record, "/nonexistent_dir/record.json"),
                      record_error);
    REQUIRE_THROWS_AS(write_pulses_csv(record, "/nonexistent_dir/p.csv"), record_error);
}
