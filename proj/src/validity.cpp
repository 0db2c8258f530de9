#include "surfnoise/validity.hpp"

#include <cmath>
#include <limits>

#include "surfnoise/angular.hpp"
#include "surfnoise/constants.hpp"
#include "surfnoise/errors.hpp"
#include "surfnoise/lindblad.hpp"
#include "surfnoise/noise.hpp"

namespace surfnoise::cli {

namespace {

namespace mat = surfnoise::materials;
constexpr double kRetardationThreshold = 0.1;
constexpr double kMarkovThreshold = 0.1;

bool geometry_is_vacuum(const greens::SurfaceGeometry& g) {
    if (const auto* hs = std::get_if<greens::HalfSpace>(&g.shape))
        return std::holds_alternative<mat::Vacuum>(hs->bulk);
    return false;
}

// slowest spectral feature: max_n gamma_n / omega_n^2 over all DL resonances
double dominant_resonance_timescale(const greens::SurfaceGeometry& g,
                                    std::vector<std::string>& notes) {
    double t = 0.0;
    auto scan_model = [&](const mat::DielectricModel& m, const char* which) {
        if (const auto* dl = std::get_if<mat::DrudeLorentzModel>(&m)) {
            for (const auto& r : dl->resonances)
                t = std::max(t, r.gamma / (r.omega * r.omega));
        } else if (const auto* drude = std::get_if<mat::DrudeMetal>(&m)) {
            if (drude->gamma > 0.0) t = std::max(t, 1.0 / drude->gamma);
        } else if (std::holds_alternative<mat::TabulatedResponse>(m)) {
            notes.push_back(std::string{"correlation width of the tabulated "} + which +
                            " response is not estimated");
        }
    };
    if (const auto* hs = std::get_if<greens::HalfSpace>(&g.shape)) {
        scan_model(hs->bulk, "bulk");
    } else {
        const auto& lay = std::get<greens::Layered>(g.shape);
        scan_model(lay.bulk, "bulk");
        scan_model(lay.layer, "layer");
    }
    return t;
}

double representative_height(const Scenario& s) {
    switch (s.compute.kind) {
        case ComputeSpec::Kind::kernel: return std::min(s.compute.r.z(), s.compute.rp.z());
        case ComputeSpec::Kind::psd:
        case ComputeSpec::Kind::heating:
        case ComputeSpec::Kind::check: return s.compute.r.z();
        case ComputeSpec::Kind::rate:
            if (s.compute.has_pair)
                return std::min(s.compute.pair.a.position.z(), s.compute.pair.b.position.z());
            return s.compute.r.z();
        case ComputeSpec::Kind::scan: return s.compute.height;
        case ComputeSpec::Kind::evolve: return s.compute.r.z() > 0.0 ? s.compute.r.z() : 0.0;
        case ComputeSpec::Kind::thomson: return 0.0;
    }
    return 0.0;
}

double motion_frequency(const Scenario& s) {
    switch (s.motion.kind) {
        case MotionSpec::Kind::slow: return 0.0;
        case MotionSpec::Kind::oscillating:
        case MotionSpec::Kind::librating: {
            double w = 0.0;
            for (const auto& m : s.motion.modes) w = std::max(w, m.omega);
            return w;
        }
        case MotionSpec::Kind::rotating: return s.motion.omega_rot;
        case MotionSpec::Kind::free_rotor:
            if (s.particle.inertia > 0.0)
                return constants::hbar * s.motion.l_max / s.particle.inertia;
            return 0.0;
    }
    return 0.0;
}

double free_rotor_rate_estimate(const Scenario& s, double height) {
    if (s.particle.inertia <= 0.0 || height <= 0.0) return 0.0;
    const auto* dip = std::get_if<rates::PointDipole>(&s.particle.distribution);
    if (!dip) return 0.0;
    const double omega0 = constants::hbar / s.particle.inertia;
    const Eigen::Matrix3d h = lindblad::resonant_kernel_matrix(
        Vec3{0.0, 0.0, height}, omega0, s.geometry,
        s.compute.method.value_or(std::holds_alternative<greens::HalfSpace>(s.geometry.shape)
                                      ? greens::KernelEvalMethod::closed_form
                                      : greens::KernelEvalMethod::thin_layer_expansion));
    return dip->moment.squaredNorm() * h.trace() / constants::hbar;
}

// Estimated surface-induced rate of the requested computation; 0 when the
// request carries no particle relaxation.
double estimate_rate(const Scenario& s, double height, std::vector<std::string>& notes) {
    try {
        switch (s.compute.kind) {
            case ComputeSpec::Kind::rate:
                if (s.motion.kind == MotionSpec::Kind::free_rotor)
                    return free_rotor_rate_estimate(s, height);
                if (!s.compute.has_pair) return 0.0;
                return rates::decoherence_rate(s.particle.distribution, s.compute.pair, s.geometry);
            case ComputeSpec::Kind::scan: {
                rates::TwoIonScanParams p;
                if (const auto* mono = std::get_if<rates::Monopole>(&s.particle.distribution))
                    p.charge = mono->charge;
                p.ion_distance = s.compute.ion_distance;
                p.height = s.compute.height;
                p.fixed_alpha = s.compute.fixed_alpha;
                p.fixed_beta = s.compute.fixed_beta;
                p.n_alpha = 4;
                p.n_beta = 3;
                return rates::two_ion_scan(p, s.geometry).max_rate;
            }
            case ComputeSpec::Kind::heating: {
                double mass = s.particle.mass;
                double q = 0.0;
                if (const auto* mono = std::get_if<rates::Monopole>(&s.particle.distribution))
                    q = mono->charge;
                if (mass <= 0.0 || q == 0.0) return 0.0;
                return noise::heating_rate_monopole(q, mass, s.compute.omega0, s.compute.direction,
                                                    s.compute.r, s.geometry)
                    .rate;
            }
            case ComputeSpec::Kind::evolve:
                if (s.motion.kind == MotionSpec::Kind::free_rotor)
                    return free_rotor_rate_estimate(s, height);
                return 0.0;
            default: return 0.0;
        }
    } catch (const Error& e) {
        notes.push_back(std::string{"rate estimate unavailable: "} + e.what());
        return 0.0;
    }
}

} // namespace

ValidityReport check_validity(const Scenario& s) {
    ValidityReport rep;
    rep.height = representative_height(s);
    rep.motion_frequency = motion_frequency(s);

    if (geometry_is_vacuum(s.geometry)) {
        rep.notes.push_back("vacuum geometry: no surface noise, checks trivially pass");
        rep.regime = s.motion.kind == MotionSpec::Kind::slow ? "slow-particle" : "resonant";
        rep.relaxation_time = std::numeric_limits<double>::infinity();
        return rep;
    }

    // quasistatic: retardation parameter and, for bare metals, the skin depth
    const double w0 = rep.motion_frequency;
    if (w0 > 0.0 && rep.height > 0.0) {
        double layer_path = 0.0;
        if (const auto* lay = std::get_if<greens::Layered>(&s.geometry.shape)) {
            try {
                layer_path = std::sqrt(std::abs(mat::eval_permittivity(lay->layer, w0))) *
                             lay->thickness;
            } catch (const Error&) {
                rep.notes.push_back("layer permittivity not evaluable at the motion frequency");
            }
        }
        rep.retardation_parameter = (layer_path + rep.height) * w0 / constants::c_light;
        if (rep.retardation_parameter >= kRetardationThreshold) {
            rep.quasistatic_ok = false;
            rep.notes.push_back("retardation parameter exceeds 0.1; quasistatic treatment marginal");
        }
        if (const auto* hs = std::get_if<greens::HalfSpace>(&s.geometry.shape)) {
            if (const auto* drude = std::get_if<mat::DrudeMetal>(&hs->bulk)) {
                if (drude->gamma > 0.0) {
                    rep.skin_depth = mat::skin_depth(*drude, w0);
                    if (rep.skin_depth <= rep.height) {
                        rep.quasistatic_ok = false;
                        rep.notes.push_back(
                            "skin depth below the particle height; quasistatic fields unreliable");
                    }
                }
            }
        }
    }

    // Born-Markov: surface correlations vs particle relaxation
    const double thermal_time =
        s.geometry.temperature > 0.0
            ? constants::hbar / (constants::k_boltzmann * s.geometry.temperature)
            : 0.0;
    const double resonance_time = dominant_resonance_timescale(s.geometry, rep.notes);
    rep.correlation_time = std::max(thermal_time, resonance_time);

    const double rate = estimate_rate(s, rep.height, rep.notes);
    rep.relaxation_time = rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
    if (rep.correlation_time > 0.0 && std::isfinite(rep.relaxation_time) &&
        rep.correlation_time / rep.relaxation_time >= kMarkovThreshold) {
        rep.markov_ok = false;
        rep.notes.push_back("surface correlations decay no faster than the particle relaxes; "
                            "Born-Markov treatment marginal");
    }

    // regime selection
    if (s.motion.kind == MotionSpec::Kind::slow) {
        const bool slow_ok =
            w0 <= 0.0 || rep.correlation_time <= 0.0 || w0 * rep.correlation_time < 1.0;
        rep.regime = slow_ok ? "slow-particle" : "neither";
    } else {
        const bool resonant_ok =
            w0 > 0.0 && (!std::isfinite(rep.relaxation_time) || w0 * rep.relaxation_time > 10.0);
        rep.regime = resonant_ok ? "resonant" : "neither";
    }
    if (rep.regime == "neither")
        rep.notes.push_back("WARNING: neither the slow-particle nor the resonant master equation "
                            "is cleanly justified for this scenario");
    return rep;
}

nlohmann::json to_json(const ValidityReport& rep) {
    nlohmann::json j;
    j["quasistatic_ok"] = rep.quasistatic_ok;
    j["markov_ok"] = rep.markov_ok;
    j["retardation_parameter"] = rep.retardation_parameter;
    if (rep.skin_depth > 0.0) j["skin_depth_m"] = rep.skin_depth;
    j["height_m"] = rep.height;
    j["motion_frequency_rad_s"] = rep.motion_frequency;
    j["correlation_time_s"] = rep.correlation_time;
    j["relaxation_time_s"] =
        std::isfinite(rep.relaxation_time) ? nlohmann::json(rep.relaxation_time) : nlohmann::json("inf");
    j["regime"] = rep.regime;
    j["notes"] = rep.notes;
    return j;
}

} // namespace surfnoise::cli
