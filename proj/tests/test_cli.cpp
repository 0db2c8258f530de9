#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "surfnoise/constants.hpp"
#include "surfnoise/errors.hpp"
#include "surfnoise/runner.hpp"

#include "models.hpp"

using namespace surfnoise;
using namespace surfnoise::cli;
namespace k = surfnoise::constants;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json molecule_config() {
    return json::parse(R"({
      "material": {
        "oxide": {"type": "flat", "eps": [3.0, 0.003], "omega_min": 1e6, "omega_max": 1e14},
        "sc": {"type": "superconductor", "omega_p": 8e15, "gamma": 0,
               "t_c": {"value": 9.2, "unit": "K"}, "lambda0": 2e-21,
               "temperature": {"value": 100, "unit": "mK"}}
      },
      "geometry": {
        "type": "layered", "layer": "oxide", "bulk": "sc",
        "thickness": {"value": 4, "unit": "nm"},
        "temperature": {"value": 100, "unit": "mK"}
      },
      "particle": {
        "distribution": "dipole",
        "dipole": {"value": 4.36, "unit": "D"},
        "freq_omega0": {"value": 5.5, "unit": "GHz"}
      },
      "motion": {
        "kind": "free_rotor", "l_max": 2, "dipole_axis": "normal",
        "thermal_excitation": false
      },
      "compute": {
        "request": "rate",
        "r_cm": {"value": [0, 0, 100], "unit": "nm"}
      }
    })");
}

json scan_config(int n_alpha = 12, int n_beta = 7) {
    json j = json::parse(R"({
      "material": {
        "band": {"type": "drude_lorentz", "resonances": [
          {"f": 2e-5, "omega": 1e7, "gamma": 1e9},
          {"f": 2e-5, "omega": 1e8, "gamma": 1e10},
          {"f": 2e-5, "omega": 1e9, "gamma": 1e11},
          {"f": 2e-5, "omega": 1e10, "gamma": 1e12},
          {"f": 2.0, "omega": 1e13, "gamma": 1e12}]},
        "sc": {"type": "superconductor", "omega_p": 8e15, "gamma": 0,
               "t_c": 9.2, "lambda0": 2e-21, "temperature": 4.0}
      },
      "geometry": {"type": "layered", "layer": "band", "bulk": "sc",
                   "thickness": {"value": 5, "unit": "nm"},
                   "temperature": 300},
      "particle": {"distribution": "monopole", "charge": {"value": 1, "unit": "e"}},
      "motion": {"kind": "slow"},
      "compute": {
        "request": "scan",
        "ion_distance": {"value": 5, "unit": "um"},
        "height": {"value": 100, "unit": "um"},
        "fixed_alpha": 0.0,
        "fixed_beta": {"value": 90, "unit": "deg"},
        "n_alpha": 0, "n_beta": 0
      }
    })");
    j["compute"]["n_alpha"] = n_alpha;
    j["compute"]["n_beta"] = n_beta;
    return j;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag)
        : path(fs::temp_directory_path() / ("surfnoise_" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

} // namespace

TEST_CASE("scenario parsing resolves units to SI") {
    const Scenario s = parse_scenario(molecule_config());
    const auto* lay = std::get_if<greens::Layered>(&s.geometry.shape);
    REQUIRE(lay != nullptr);
    CHECK(lay->thickness == doctest::Approx(4e-9).epsilon(1e-14));
    CHECK(s.geometry.temperature == doctest::Approx(0.1).epsilon(1e-14));
    const auto* dip = std::get_if<rates::PointDipole>(&s.particle.distribution);
    REQUIRE(dip != nullptr);
    CHECK(dip->moment.norm() == doctest::Approx(4.36 * k::debye).epsilon(1e-14));
    // omega0 = 2 pi * 5.5 GHz via the freq_ key
    CHECK(s.particle.inertia ==
          doctest::Approx(k::hbar / (2 * k::pi * 5.5e9)).epsilon(1e-12));
    CHECK(s.motion.kind == MotionSpec::Kind::free_rotor);
    CHECK(s.compute.kind == ComputeSpec::Kind::rate);
    CHECK(s.compute.r.z() == doctest::Approx(1e-7).epsilon(1e-14));
}

TEST_CASE("frequency fields accept omega (rad/s) and freq (Hz)") {
    json j = molecule_config();
    j["particle"].erase("freq_omega0");
    j["particle"]["omega0"] = 2 * k::pi * 5.5e9;
    const Scenario s = parse_scenario(j);
    CHECK(s.particle.inertia == doctest::Approx(k::hbar / (2 * k::pi * 5.5e9)).epsilon(1e-12));
}

TEST_CASE("malformed configs raise config errors") {
    SUBCASE("missing geometry") {
        json j = molecule_config();
        j.erase("geometry");
        CHECK_THROWS_AS((void)parse_scenario(j), ConfigError);
    }
    SUBCASE("unknown unit") {
        json j = molecule_config();
        j["geometry"]["thickness"] = {{"value", 4}, {"unit", "furlong"}};
        CHECK_THROWS_AS((void)parse_scenario(j), ConfigError);
    }
    SUBCASE("unknown material reference") {
        json j = molecule_config();
        j["geometry"]["layer"] = "nope";
        CHECK_THROWS_AS((void)parse_scenario(j), ConfigError);
    }
    SUBCASE("unknown request") {
        json j = molecule_config();
        j["compute"]["request"] = "summon";
        CHECK_THROWS_AS((void)parse_scenario(j), ConfigError);
    }
    SUBCASE("config error category maps to 'config'") {
        try {
            json j = molecule_config();
            j.erase("compute");
            (void)parse_scenario(j);
            FAIL("expected ConfigError");
        } catch (const Error& e) {
            CHECK(e.category() == "config");
        }
    }
}

TEST_CASE("validity checks") {
    SUBCASE("30 GHz at 1 mm is flagged as a retardation boundary case") {
        json j = molecule_config();
        j["motion"]["l_max"] = 1;
        j["particle"]["freq_omega0"] = {{"value", 30}, {"unit", "GHz"}};
        j["compute"]["r_cm"] = {{"value", {0, 0, 1}}, {"unit", "mm"}};
        const Scenario s = parse_scenario(j);
        const ValidityReport rep = check_validity(s);
        CHECK(rep.retardation_parameter == doctest::Approx(0.63).epsilon(0.02));
        CHECK_FALSE(rep.quasistatic_ok);
    }
    SUBCASE("band-model surface correlation time is 10 us") {
        const Scenario s = parse_scenario(scan_config());
        const ValidityReport rep = check_validity(s);
        CHECK(rep.correlation_time == doctest::Approx(1e-5).epsilon(1e-6));
        CHECK(rep.markov_ok);
        CHECK(rep.regime == "slow-particle");
    }
    SUBCASE("vacuum geometry is trivially valid") {
        json j = molecule_config();
        j["geometry"] = {{"type", "vacuum"}, {"temperature", 300}};
        const Scenario s = parse_scenario(j);
        const ValidityReport rep = check_validity(s);
        CHECK(rep.quasistatic_ok);
        CHECK(rep.markov_ok);
    }
}

TEST_CASE("rate run reproduces the molecule decoherence scale") {
    TempDir dir("rate");
    const Scenario s = parse_scenario(molecule_config());
    RunOptions opts;
    opts.out_dir = dir.path.string();
    const RunResult res = run(s, opts);
    const std::string csv = slurp(dir.path / "rate.csv");
    CHECK(csv.rfind("gamma_rate\r\n", 0) == 0);
    const double gamma = std::stod(csv.substr(csv.find("\r\n") + 2));
    CHECK(gamma == doctest::Approx(3.6e2).epsilon(0.05));
    CHECK(fs::exists(dir.path / "manifest.json"));
}

TEST_CASE("scan runs deterministically and round-trips through the manifest") {
    TempDir dir1("scan1"), dir2("scan2"), dir3("scan3");
    const Scenario s = parse_scenario(scan_config());
    RunOptions opts1;
    opts1.out_dir = dir1.path.string();
    run(s, opts1);
    RunOptions opts2;
    opts2.out_dir = dir2.path.string();
    opts2.threads = 3;
    run(s, opts2);
    const std::string csv1 = slurp(dir1.path / "scan.csv");
    CHECK(csv1 == slurp(dir2.path / "scan.csv"));
    CHECK(slurp(dir1.path / "manifest.json") == slurp(dir2.path / "manifest.json"));

    // manifest is a valid config reproducing the run
    std::ifstream in(dir1.path / "manifest.json");
    json manifest;
    in >> manifest;
    CHECK(manifest.contains("constants"));
    CHECK(manifest["constants"]["hbar_J_s"].get<double>() == k::hbar);
    CHECK(manifest["constants"]["epsilon0_F_m"].get<double>() == k::epsilon0);
    CHECK(manifest["constants"]["k_boltzmann_J_K"].get<double>() == k::k_boltzmann);
    CHECK(manifest["constants"]["c_m_s"].get<double>() == k::c_light);
    CHECK(manifest["constants"]["elementary_charge_C"].get<double>() == k::elementary_charge);
    CHECK(manifest["constants"]["debye_C_m"].get<double>() == k::debye);
    const Scenario s2 = parse_scenario(manifest);
    RunOptions opts3;
    opts3.out_dir = dir3.path.string();
    run(s2, opts3);
    CHECK(csv1 == slurp(dir3.path / "scan.csv"));
}

TEST_CASE("scan csv layout: beta-major rows with normalized column") {
    TempDir dir("layout");
    const Scenario s = parse_scenario(scan_config(4, 3));
    RunOptions opts;
    opts.out_dir = dir.path.string();
    run(s, opts);
    std::ifstream in(dir.path / "scan.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "alpha,beta,gamma_rate,normalized_rate\r");
    int rows = 0;
    double prev_beta = -1.0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++rows;
        std::stringstream ss(line);
        std::string a, b;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        CHECK(std::stod(b) >= prev_beta - 1e-15);
        prev_beta = std::stod(b);
    }
    CHECK(rows == 12);
}

TEST_CASE("evolve run writes a trajectory and snapshots") {
    TempDir dir("evolve");
    json j = molecule_config();
    j["compute"] = json::parse(R"({
      "request": "evolve",
      "r_cm": {"value": [0, 0, 100], "unit": "nm"},
      "initial": {"kind": "rotor_superposition", "terms": [
        {"l": 1, "m": 0, "amplitude": [0.7071067811865476, 0]},
        {"l": 2, "m": 0, "amplitude": [0.7071067811865476, 0]}]},
      "times": {"start": 0, "stop": {"value": 2, "unit": "ms"}, "count": 5},
      "snapshots": true
    })");
    const Scenario s = parse_scenario(j);
    RunOptions opts;
    opts.out_dir = dir.path.string();
    run(s, opts);
    const std::string traj = slurp(dir.path / "trajectory.csv");
    CHECK(traj.rfind("time,pop_0_0,", 0) == 0);
    CHECK(traj.find("coh_1_0__2_0") != std::string::npos);
    const std::string snaps = slurp(dir.path / "snapshots.txt");
    CHECK(snaps.find("dim,9") != std::string::npos);
    CHECK(snaps.find("t,0.00000000000e+00") != std::string::npos);
}

TEST_CASE("oscillating ion evolve runs through the full pipeline") {
    TempDir dir("osc");
    json j = json::parse(R"({
      "material": {"gold": {"type": "gold"}},
      "geometry": {"type": "half_space", "bulk": "gold", "temperature": 300},
      "particle": {"distribution": "monopole", "charge": {"value": 1, "unit": "e"},
                   "mass": {"value": 40, "unit": "u"}},
      "motion": {"kind": "oscillating",
                 "modes": [{"freq": {"value": 1, "unit": "MHz"}, "direction": [0, 0, 1], "n_max": 4}]},
      "compute": {
        "request": "evolve",
        "r_cm": {"value": [0, 0, 50], "unit": "um"},
        "initial": {"kind": "fock", "occupation": [0]},
        "times": {"start": 0, "stop": 5.0, "count": 3}
      }
    })");
    const Scenario s = parse_scenario(j);
    RunOptions opts;
    opts.out_dir = dir.path.string();
    run(s, opts);
    const std::string traj = slurp(dir.path / "trajectory.csv");
    CHECK(traj.rfind("time,pop_0,pop_1,pop_2,pop_3,pop_4", 0) == 0);
    // ground-state ion heats: pop_0 at the last time below 1
    std::stringstream ss(traj);
    std::string line, last;
    while (std::getline(ss, line))
        if (!line.empty() && line[0] != 't') last = line;
    std::stringstream row(last);
    std::string cell;
    std::getline(row, cell, ',');
    std::getline(row, cell, ',');
    CHECK(std::stod(cell) < 1.0);
    CHECK(std::stod(cell) > 0.5);
}

TEST_CASE("kernel request supports the full Bessel integral method") {
    TempDir dir("kern");
    json j = json::parse(R"({
      "material": {
        "oxide": {"type": "flat", "eps": [3.0, 0.03], "omega_min": 1e3, "omega_max": 1e14},
        "gold": {"type": "gold"}
      },
      "geometry": {"type": "layered", "layer": "oxide", "bulk": "gold",
                   "thickness": {"value": 5, "unit": "nm"}, "temperature": 300},
      "particle": {"distribution": "monopole", "charge": 1e-19},
      "motion": {"kind": "slow"},
      "compute": {"request": "kernel",
                  "r": {"value": [0, 0, 200], "unit": "nm"},
                  "omega": {"value": 1, "unit": "MHz"},
                  "method": "full_bessel_integral"}
    })");
    const Scenario s = parse_scenario(j);
    RunOptions opts;
    opts.out_dir = dir.path.string();
    run(s, opts);
    const std::string csv = slurp(dir.path / "kernel.csv");
    // Im g of a lossy layer above a metal is negative at coincident points
    CHECK(csv.find(",-") != std::string::npos);
}

TEST_CASE("planar rotor evolve defaults the basis to four times the initial support") {
    TempDir dir("rotor");
    json j = json::parse(R"({
      "material": {"gold": {"type": "gold"}},
      "geometry": {"type": "half_space", "bulk": "gold", "temperature": 300},
      "particle": {"distribution": "dipole", "dipole": {"value": 10, "unit": "D"},
                   "inertia": 1e-39},
      "motion": {"kind": "rotating", "omega_rot": {"value": 100, "unit": "kHz"}},
      "compute": {
        "request": "evolve",
        "r_cm": {"value": [0, 0, 50], "unit": "um"},
        "initial": {"kind": "planar_superposition", "terms": [
          {"m": 2, "amplitude": [1, 0]}, {"m": -1, "amplitude": [1, 0]}]},
        "times": {"start": 0, "stop": 1e-4, "count": 3}
      }
    })");
    const Scenario s = parse_scenario(j);
    RunOptions opts;
    opts.out_dir = dir.path.string();
    run(s, opts);
    const std::string traj = slurp(dir.path / "trajectory.csv");
    // |m| support 2 -> m_max 8
    CHECK(traj.find("pop_-8,") != std::string::npos);
    CHECK(traj.find("pop_8") != std::string::npos);
    CHECK(traj.find("pop_-9") == std::string::npos);
}

TEST_CASE("thomson and heating runs produce csv outputs") {
    TempDir dir("aux");
    json j = json::parse(R"({
      "geometry": {"type": "vacuum", "temperature": 300},
      "particle": {"distribution": "monopole", "charge": {"value": 1, "unit": "e"},
                   "mass": 9.1093837015e-31},
      "motion": {"kind": "slow"},
      "compute": {"request": "thomson", "separations": {"value": [0, 1e-3], "unit": "m"}}
    })");
    const Scenario s = parse_scenario(j);
    RunOptions opts;
    opts.out_dir = dir.path.string();
    run(s, opts);
    const std::string csv = slurp(dir.path / "thomson.csv");
    CHECK(csv.rfind("separation,gamma_thomson,gamma_infinity\r\n", 0) == 0);
    CHECK(csv.find("0.00000000000e+00,0.00000000000e+00") != std::string::npos);
}

TEST_CASE("scientific formatting uses 12 significant digits") {
    CHECK(format_sci(3.7e3) == "3.70000000000e+03");
    CHECK(format_sci(-1.23456789012345e-7) == "-1.23456789012e-07");
    CHECK(format_sci(0.0) == "0.00000000000e+00");
}
