// config.hpp — Scenario ingestion: JSON config with per-field units, resolved
// into SI quantities. The run manifest re-emits the same sections in
// canonical SI form, so a manifest is itself a valid config.

#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "surfnoise/greens.hpp"
#include "surfnoise/rates.hpp"

// vendored single-header nlohmann/json
#include "json.hpp"

namespace surfnoise::cli {

struct ModeConfig {
    double omega = 0.0;  // rad/s
    Vec3 direction = Vec3::UnitZ();
    int n_max = 10;
};

struct MotionSpec {
    enum class Kind { slow, oscillating, librating, rotating, free_rotor };
    Kind kind = Kind::slow;

    // free rotor
    int l_max = 2;
    std::string dipole_axis = "normal";  // quantization axis: "normal" | "in_plane"
    bool thermal_excitation = true;
    bool rotating_frame = true;  // drop the diagonal rotor Hamiltonian (phases only)

    // oscillating / librating
    std::vector<ModeConfig> modes;
    Vec3 eps_eq = Vec3::UnitZ();

    // rotating
    double omega_rot = 0.0;
    int m_max = 0;  // 0: derive from the initial-state support
    Vec3 plane_e1 = Vec3::UnitX();
    Vec3 plane_e2 = Vec3::UnitY();
};

struct AmplitudeTerm {
    int l = 0;
    int m = 0;
    std::complex<double> amplitude{0.0, 0.0};
};

struct InitialState {
    enum class Kind { rotor_superposition, fock, planar_superposition };
    Kind kind = Kind::rotor_superposition;
    std::vector<AmplitudeTerm> terms;  // rotor / planar
    std::vector<int> occupation;       // fock, one entry per mode
};

struct CoherencePair {
    int l1 = 0, m1 = 0, l2 = 0, m2 = 0;
};

struct ComputeSpec {
    enum class Kind { kernel, psd, rate, scan, evolve, heating, thomson, check };
    Kind kind = Kind::check;

    // kernel / psd
    Vec3 r = Vec3::Zero();
    Vec3 rp = Vec3::Zero();
    double omega = 0.0;
    std::optional<greens::KernelEvalMethod> method;
    bool zero_point = true;

    // rate
    rates::SuperpositionPair pair;
    bool has_pair = false;

    // scan
    double ion_distance = 0.0;
    double height = 0.0;
    double fixed_alpha = 0.0;
    double fixed_beta = 0.0;
    int n_alpha = 0;
    int n_beta = 0;
    bool emit_great_circles = false;

    // evolve
    InitialState initial;
    std::vector<double> times;
    std::vector<CoherencePair> coherences;
    bool snapshots = false;

    // heating
    double omega0 = 0.0;
    Vec3 direction = Vec3::UnitZ();

    // thomson
    std::vector<double> separations;
};

struct ParticleSpec {
    rates::ChargeDistribution distribution = rates::Monopole{0.0};
    double mass = 0.0;     // kg, 0 when unset
    double inertia = 0.0;  // kg m^2, 0 when unset
};

struct Scenario {
    greens::SurfaceGeometry geometry{greens::HalfSpace{materials::Vacuum{}}, 0.0};
    ParticleSpec particle;
    MotionSpec motion;
    ComputeSpec compute;
};

// Parse / serialize. parse_scenario throws ConfigError with a field path on
// malformed input. Unknown top-level sections (constants, validity, ...) are
// ignored so manifests round-trip.
Scenario parse_scenario(const nlohmann::json& root);
Scenario load_scenario(const std::string& path);
nlohmann::json scenario_to_json(const Scenario& scenario);

const char* compute_kind_name(ComputeSpec::Kind kind);
std::optional<ComputeSpec::Kind> compute_kind_from_name(const std::string& name);

} // namespace surfnoise::cli
