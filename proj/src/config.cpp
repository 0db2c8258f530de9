#include "surfnoise/config.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include "surfnoise/constants.hpp"
#include "surfnoise/errors.hpp"

namespace surfnoise::cli {

namespace {

using nlohmann::json;
namespace mat = surfnoise::materials;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ConfigError(path + ": " + what);
}

const json& member(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.is_object() || !obj.contains(key)) fail(path, "missing field '" + key + "'");
    return obj.at(key);
}

double number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

// Unit multipliers per dimension; the first entry is the canonical SI unit.
const std::map<std::string, std::map<std::string, double>> kUnits = {
    {"length", {{"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"µm", 1e-6}, {"nm", 1e-9}, {"pm", 1e-12}}},
    {"time", {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"µs", 1e-6}, {"ns", 1e-9}}},
    {"angular_frequency",
     {{"rad/s", 1.0}, {"1/s", 1.0}, {"s^-1", 1.0},
      {"Hz", 2.0 * constants::pi}, {"kHz", 2.0e3 * constants::pi},
      {"MHz", 2.0e6 * constants::pi}, {"GHz", 2.0e9 * constants::pi},
      {"THz", 2.0e12 * constants::pi}}},
    {"temperature", {{"K", 1.0}, {"mK", 1e-3}, {"uK", 1e-6}, {"µK", 1e-6}}},
    {"charge", {{"C", 1.0}, {"e", constants::elementary_charge}}},
    {"dipole", {{"C*m", 1.0}, {"D", constants::debye}}},
    {"quadrupole", {{"C*m^2", 1.0}, {"D*nm", constants::debye * 1e-9}}},
    {"mass", {{"kg", 1.0}, {"u", constants::atomic_mass}, {"amu", constants::atomic_mass}}},
    {"inertia", {{"kg*m^2", 1.0}}},
    {"angle", {{"rad", 1.0}, {"deg", constants::pi / 180.0}}},
    {"inductance_length", {{"H*m", 1.0}}},
    {"dimensionless", {{"", 1.0}}},
};

double unit_factor(const std::string& dimension, const std::string& unit, const std::string& path) {
    const auto dim = kUnits.find(dimension);
    if (dim == kUnits.end()) fail(path, "unknown dimension '" + dimension + "'");
    const auto u = dim->second.find(unit);
    if (u == dim->second.end()) fail(path, "unknown unit '" + unit + "' for " + dimension);
    return u->second;
}

// Quantity: bare number (SI) or {"value": x, "unit": "..."}.
double quantity(const json& j, const std::string& dimension, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    if (j.is_object()) {
        const double v = number(member(j, path, "value"), path + ".value");
        std::string unit = j.value("unit", std::string{});
        if (unit.empty()) return v;
        return v * unit_factor(dimension, unit, path + ".unit");
    }
    fail(path, "expected a number or {value, unit}");
}

// Frequencies: key `omega` in rad/s-family units, or key `freq` in Hz-family
// (bare numbers are Hz, multiplied by 2 pi).
double frequency_field(const json& obj, const std::string& omega_key, const std::string& path,
                       std::optional<double> fallback = std::nullopt) {
    const std::string freq_key =
        (omega_key == "omega") ? "freq" : "freq_" + omega_key;
    if (obj.contains(omega_key))
        return quantity(obj.at(omega_key), "angular_frequency", path + "." + omega_key);
    if (obj.contains(freq_key)) {
        const json& j = obj.at(freq_key);
        if (j.is_number()) return 2.0 * constants::pi * j.get<double>();
        return quantity(j, "angular_frequency", path + "." + freq_key);
    }
    if (fallback) return *fallback;
    fail(path, "missing frequency field '" + omega_key + "' (or '" + freq_key + "')");
}

Vec3 vector3(const json& j, const std::string& dimension, const std::string& path) {
    const json* arr = &j;
    double factor = 1.0;
    if (j.is_object()) {
        arr = &member(j, path, "value");
        std::string unit = j.value("unit", std::string{});
        if (!unit.empty()) factor = unit_factor(dimension, unit, path + ".unit");
    }
    if (!arr->is_array() || arr->size() != 3) fail(path, "expected a 3-vector");
    return factor * Vec3{number(arr->at(0), path), number(arr->at(1), path), number(arr->at(2), path)};
}

json quantity_json(double value, const char* unit) {
    return json{{"value", value}, {"unit", unit}};
}

json vector_json(const Vec3& v, const char* unit) {
    return json{{"value", {v.x(), v.y(), v.z()}}, {"unit", unit}};
}

// --- materials --------------------------------------------------------------

mat::DielectricModel parse_material(const json& j, const std::string& path) {
    const std::string type = member(j, path, "type").get<std::string>();
    if (type == "vacuum") return mat::Vacuum{};
    if (type == "drude_lorentz") {
        mat::DrudeLorentzModel m;
        const json& rs = member(j, path, "resonances");
        if (!rs.is_array()) fail(path + ".resonances", "expected an array");
        for (std::size_t i = 0; i < rs.size(); ++i) {
            const std::string rp = path + ".resonances[" + std::to_string(i) + "]";
            const json& r = rs.at(i);
            mat::Resonance res;
            res.weight = number(member(r, rp, "f"), rp + ".f");
            res.omega = frequency_field(r, "omega", rp);
            res.gamma = frequency_field(r, "gamma", rp);
            m.resonances.push_back(res);
        }
        return m;
    }
    if (type == "drude" || type == "drude_metal" || type == "gold") {
        if (type == "gold") return mat::gold_drude();
        mat::DrudeMetal m;
        m.omega_p = frequency_field(j, "omega_p", path);
        m.gamma = frequency_field(j, "gamma", path);
        return m;
    }
    if (type == "superconductor") {
        mat::Superconductor m;
        m.omega_p = frequency_field(j, "omega_p", path);
        m.gamma = frequency_field(j, "gamma", path, 0.0);
        m.t_c = quantity(member(j, path, "t_c"), "temperature", path + ".t_c");
        m.lambda0 = quantity(member(j, path, "lambda0"), "inductance_length", path + ".lambda0");
        m.temperature = quantity(member(j, path, "temperature"), "temperature", path + ".temperature");
        return m;
    }
    if (type == "flat") {
        const json& e = member(j, path, "eps");
        if (!e.is_array() || e.size() != 2) fail(path + ".eps", "expected [re, im]");
        const double re = number(e.at(0), path), im = number(e.at(1), path);
        const double lo = frequency_field(j, "omega_min", path, 1.0);
        const double hi = frequency_field(j, "omega_max", path, 1e18);
        return mat::TabulatedResponse::flat({re, im}, lo, hi);
    }
    if (type == "tabulated") {
        mat::TabulatedResponse m;
        const json& samples = member(j, path, "samples");
        if (!samples.is_array()) fail(path + ".samples", "expected an array");
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const std::string sp = path + ".samples[" + std::to_string(i) + "]";
            const json& s = samples.at(i);
            m.omega.push_back(frequency_field(s, "omega", sp));
            const json& e = member(s, sp, "eps");
            if (!e.is_array() || e.size() != 2) fail(sp + ".eps", "expected [re, im]");
            m.eps.emplace_back(number(e.at(0), sp), number(e.at(1), sp));
        }
        return m;
    }
    fail(path + ".type", "unknown material type '" + type + "'");
}

json material_json(const mat::DielectricModel& model) {
    return std::visit(
        [](const auto& m) -> json {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, mat::Vacuum>) {
                return json{{"type", "vacuum"}};
            } else if constexpr (std::is_same_v<T, mat::DrudeLorentzModel>) {
                json rs = json::array();
                for (const auto& r : m.resonances)
                    rs.push_back(json{{"f", r.weight},
                                      {"omega", quantity_json(r.omega, "rad/s")},
                                      {"gamma", quantity_json(r.gamma, "rad/s")}});
                return json{{"type", "drude_lorentz"}, {"resonances", rs}};
            } else if constexpr (std::is_same_v<T, mat::DrudeMetal>) {
                return json{{"type", "drude"},
                            {"omega_p", quantity_json(m.omega_p, "rad/s")},
                            {"gamma", quantity_json(m.gamma, "rad/s")}};
            } else if constexpr (std::is_same_v<T, mat::Superconductor>) {
                return json{{"type", "superconductor"},
                            {"omega_p", quantity_json(m.omega_p, "rad/s")},
                            {"gamma", quantity_json(m.gamma, "rad/s")},
                            {"t_c", quantity_json(m.t_c, "K")},
                            {"lambda0", quantity_json(m.lambda0, "H*m")},
                            {"temperature", quantity_json(m.temperature, "K")}};
            } else {
                json samples = json::array();
                for (std::size_t i = 0; i < m.omega.size(); ++i)
                    samples.push_back(json{{"omega", quantity_json(m.omega[i], "rad/s")},
                                           {"eps", {m.eps[i].real(), m.eps[i].imag()}}});
                return json{{"type", "tabulated"}, {"samples", samples}};
            }
        },
        model);
}

// --- geometry ---------------------------------------------------------------

greens::SurfaceGeometry parse_geometry(const json& root) {
    const json& g = member(root, "$", "geometry");
    const std::string path = "geometry";
    const std::string type = member(g, path, "type").get<std::string>();
    greens::SurfaceGeometry geo;
    geo.temperature = quantity(member(g, path, "temperature"), "temperature", path + ".temperature");
    if (geo.temperature < 0.0) fail(path + ".temperature", "temperature must be >= 0");

    auto resolve = [&](const std::string& key) -> mat::DielectricModel {
        const json& ref = member(g, path, key);
        if (ref.is_string()) {
            const json& mats = member(root, "$", "material");
            const std::string name = ref.get<std::string>();
            if (!mats.contains(name)) fail("material", "no material named '" + name + "'");
            return parse_material(mats.at(name), "material." + name);
        }
        return parse_material(ref, path + "." + key);
    };

    if (type == "vacuum") {
        geo.shape = greens::HalfSpace{mat::Vacuum{}};
    } else if (type == "half_space") {
        geo.shape = greens::HalfSpace{resolve("bulk")};
    } else if (type == "layered") {
        greens::Layered lay;
        lay.bulk = resolve("bulk");
        lay.layer = resolve("layer");
        lay.thickness = quantity(member(g, path, "thickness"), "length", path + ".thickness");
        if (lay.thickness <= 0.0) fail(path + ".thickness", "layer thickness must be > 0");
        geo.shape = std::move(lay);
    } else {
        fail(path + ".type", "unknown geometry type '" + type + "'");
    }
    std::visit([](const auto& shape) {
        if constexpr (std::is_same_v<std::decay_t<decltype(shape)>, greens::HalfSpace>) {
            mat::validate(shape.bulk);
        } else {
            mat::validate(shape.bulk);
            mat::validate(shape.layer);
        }
    }, geo.shape);
    return geo;
}

// --- particle ---------------------------------------------------------------

ParticleSpec parse_particle(const json& root) {
    ParticleSpec p;
    if (!root.contains("particle")) return p;
    const json& j = root.at("particle");
    const std::string path = "particle";
    const std::string dist = j.value("distribution", std::string{"monopole"});
    if (dist == "monopole") {
        rates::Monopole m;
        if (j.contains("charge")) m.charge = quantity(j.at("charge"), "charge", path + ".charge");
        p.distribution = m;
    } else if (dist == "dipole") {
        rates::PointDipole d;
        if (j.contains("dipole_vector")) {
            d.moment = vector3(j.at("dipole_vector"), "dipole", path + ".dipole_vector");
        } else {
            const double mag = quantity(member(j, path, "dipole"), "dipole", path + ".dipole");
            d.moment = mag * Vec3::UnitZ();  // body axis n3
        }
        p.distribution = d;
    } else if (dist == "quadrupole") {
        rates::PointQuadrupole q;
        const double q33 = quantity(member(j, path, "quadrupole_q33"), "quadrupole",
                                    path + ".quadrupole_q33");
        q.tensor = rates::axial_quadrupole(q33, Vec3::UnitZ());
        p.distribution = q;
    } else if (dist == "point_charges") {
        rates::PointCharges pc;
        const json& sites = member(j, path, "point_charges");
        if (!sites.is_array() || sites.empty()) fail(path + ".point_charges", "expected a non-empty array");
        for (std::size_t i = 0; i < sites.size(); ++i) {
            const std::string sp = path + ".point_charges[" + std::to_string(i) + "]";
            rates::ChargeSite s;
            s.charge = quantity(member(sites.at(i), sp, "charge"), "charge", sp + ".charge");
            s.position = vector3(member(sites.at(i), sp, "position"), "length", sp + ".position");
            pc.sites.push_back(s);
        }
        p.distribution = pc;
    } else {
        fail(path + ".distribution", "unknown distribution '" + dist + "'");
    }
    if (j.contains("mass")) p.mass = quantity(j.at("mass"), "mass", path + ".mass");
    if (j.contains("inertia")) {
        p.inertia = quantity(j.at("inertia"), "inertia", path + ".inertia");
    } else if (j.contains("omega0") || j.contains("freq_omega0")) {
        p.inertia = constants::hbar / frequency_field(j, "omega0", path);
    }
    rates::validate(p.distribution);
    return p;
}

// --- motion -----------------------------------------------------------------

std::optional<greens::KernelEvalMethod> parse_method(const json& j, const std::string& path) {
    if (!j.contains("method")) return std::nullopt;
    const std::string m = j.at("method").get<std::string>();
    if (m == "closed_form") return greens::KernelEvalMethod::closed_form;
    if (m == "thin_layer_expansion") return greens::KernelEvalMethod::thin_layer_expansion;
    if (m == "full_bessel_integral") return greens::KernelEvalMethod::full_bessel_integral;
    if (m == "mirror_limit") return greens::KernelEvalMethod::mirror_limit;
    fail(path + ".method", "unknown kernel method '" + m + "'");
}

const char* method_name(greens::KernelEvalMethod m) {
    switch (m) {
        case greens::KernelEvalMethod::closed_form: return "closed_form";
        case greens::KernelEvalMethod::thin_layer_expansion: return "thin_layer_expansion";
        case greens::KernelEvalMethod::full_bessel_integral: return "full_bessel_integral";
        case greens::KernelEvalMethod::mirror_limit: return "mirror_limit";
    }
    return "closed_form";
}

MotionSpec parse_motion(const json& root) {
    MotionSpec m;
    if (!root.contains("motion")) return m;
    const json& j = root.at("motion");
    const std::string path = "motion";
    const std::string kind = j.value("kind", std::string{"slow"});
    if (kind == "slow") m.kind = MotionSpec::Kind::slow;
    else if (kind == "oscillating") m.kind = MotionSpec::Kind::oscillating;
    else if (kind == "librating") m.kind = MotionSpec::Kind::librating;
    else if (kind == "rotating") m.kind = MotionSpec::Kind::rotating;
    else if (kind == "free_rotor") m.kind = MotionSpec::Kind::free_rotor;
    else fail(path + ".kind", "unknown motion kind '" + kind + "'");

    m.l_max = j.value("l_max", 2);
    m.dipole_axis = j.value("dipole_axis", std::string{"normal"});
    if (m.dipole_axis != "normal" && m.dipole_axis != "in_plane")
        fail(path + ".dipole_axis", "expected 'normal' or 'in_plane'");
    m.thermal_excitation = j.value("thermal_excitation", true);
    m.rotating_frame = j.value("rotating_frame", true);
    if (j.contains("modes")) {
        const json& modes = j.at("modes");
        if (!modes.is_array()) fail(path + ".modes", "expected an array");
        for (std::size_t i = 0; i < modes.size(); ++i) {
            const std::string mp = path + ".modes[" + std::to_string(i) + "]";
            ModeConfig mc;
            mc.omega = frequency_field(modes.at(i), "omega", mp);
            if (modes.at(i).contains("direction"))
                mc.direction = vector3(modes.at(i).at("direction"), "dimensionless", mp + ".direction").normalized();
            mc.n_max = modes.at(i).value("n_max", 10);
            m.modes.push_back(mc);
        }
    }
    if (j.contains("eps_eq"))
        m.eps_eq = vector3(j.at("eps_eq"), "dimensionless", path + ".eps_eq").normalized();
    if (j.contains("omega_rot") || j.contains("freq_omega_rot"))
        m.omega_rot = frequency_field(j, "omega_rot", path);
    m.m_max = j.value("m_max", 0);
    if (j.contains("plane")) {
        const json& plane = j.at("plane");
        if (!plane.is_array() || plane.size() != 2) fail(path + ".plane", "expected two 3-vectors");
        m.plane_e1 = vector3(plane.at(0), "dimensionless", path + ".plane[0]").normalized();
        m.plane_e2 = vector3(plane.at(1), "dimensionless", path + ".plane[1]").normalized();
    }
    return m;
}

// --- compute ----------------------------------------------------------------

ComputeSpec parse_compute(const json& root) {
    ComputeSpec c;
    if (!root.contains("compute")) fail("$", "missing 'compute' section");
    const json& j = root.at("compute");
    const std::string path = "compute";
    const std::string request = member(j, path, "request").get<std::string>();
    const auto kind = compute_kind_from_name(request);
    if (!kind) fail(path + ".request", "unknown request '" + request + "'");
    c.kind = *kind;
    c.method = parse_method(j, path);

    auto pose = [&](const json& pj, const std::string& pp) {
        rates::Pose p;
        p.position = vector3(member(pj, pp, "position"), "length", pp + ".position");
        if (pj.contains("orientation")) {
            const json& o = pj.at("orientation");
            if (!o.is_array() || o.size() != 3) fail(pp + ".orientation", "expected [alpha, beta, gamma]");
            p.orientation.alpha = quantity(o.at(0), "angle", pp + ".orientation[0]");
            p.orientation.beta = quantity(o.at(1), "angle", pp + ".orientation[1]");
            p.orientation.gamma = quantity(o.at(2), "angle", pp + ".orientation[2]");
        }
        return p;
    };

    switch (c.kind) {
        case ComputeSpec::Kind::kernel:
            c.r = vector3(member(j, path, "r"), "length", path + ".r");
            c.rp = j.contains("rp") ? vector3(j.at("rp"), "length", path + ".rp") : c.r;
            c.omega = frequency_field(j, "omega", path, 0.0);
            break;
        case ComputeSpec::Kind::psd:
            c.r = vector3(member(j, path, "r0"), "length", path + ".r0");
            c.omega = frequency_field(j, "omega", path, 0.0);
            c.zero_point = j.value("zero_point", true);
            break;
        case ComputeSpec::Kind::rate:
            if (j.contains("pose_a") || j.contains("pose_b")) {
                c.pair.a = pose(member(j, path, "pose_a"), path + ".pose_a");
                c.pair.b = pose(member(j, path, "pose_b"), path + ".pose_b");
                c.has_pair = true;
            }
            if (j.contains("r_cm")) c.r = vector3(j.at("r_cm"), "length", path + ".r_cm");
            break;
        case ComputeSpec::Kind::scan:
            c.ion_distance = quantity(member(j, path, "ion_distance"), "length", path + ".ion_distance");
            c.height = quantity(member(j, path, "height"), "length", path + ".height");
            c.fixed_alpha = quantity(member(j, path, "fixed_alpha"), "angle", path + ".fixed_alpha");
            c.fixed_beta = quantity(member(j, path, "fixed_beta"), "angle", path + ".fixed_beta");
            c.n_alpha = member(j, path, "n_alpha").get<int>();
            c.n_beta = member(j, path, "n_beta").get<int>();
            c.emit_great_circles = j.value("great_circles", false);
            break;
        case ComputeSpec::Kind::evolve: {
            c.r = vector3(member(j, path, "r_cm"), "length", path + ".r_cm");
            const json& init = member(j, path, "initial");
            const std::string ip = path + ".initial";
            const std::string ikind = init.value("kind", std::string{"rotor_superposition"});
            if (ikind == "rotor_superposition") c.initial.kind = InitialState::Kind::rotor_superposition;
            else if (ikind == "fock") c.initial.kind = InitialState::Kind::fock;
            else if (ikind == "planar_superposition") c.initial.kind = InitialState::Kind::planar_superposition;
            else fail(ip + ".kind", "unknown initial-state kind '" + ikind + "'");
            if (c.initial.kind == InitialState::Kind::fock) {
                for (const auto& n : member(init, ip, "occupation")) c.initial.occupation.push_back(n.get<int>());
            } else {
                const json& terms = member(init, ip, "terms");
                if (!terms.is_array() || terms.empty()) fail(ip + ".terms", "expected a non-empty array");
                for (const auto& t : terms) {
                    AmplitudeTerm at;
                    at.l = t.value("l", 0);
                    at.m = member(t, ip, "m").get<int>();
                    const json& amp = member(t, ip, "amplitude");
                    if (!amp.is_array() || amp.size() != 2) fail(ip + ".amplitude", "expected [re, im]");
                    at.amplitude = {number(amp.at(0), ip), number(amp.at(1), ip)};
                    c.initial.terms.push_back(at);
                }
            }
            const json& times = member(j, path, "times");
            const std::string tp = path + ".times";
            if (times.is_array() || (times.is_object() && times.contains("value"))) {
                const json* arr = times.is_array() ? &times : &times.at("value");
                double factor = 1.0;
                if (times.is_object() && times.contains("unit"))
                    factor = unit_factor("time", times.at("unit").get<std::string>(), tp + ".unit");
                for (const auto& t : *arr) c.times.push_back(factor * number(t, tp));
            } else {
                const double start = quantity(member(times, tp, "start"), "time", tp + ".start");
                const double stop = quantity(member(times, tp, "stop"), "time", tp + ".stop");
                const int count = member(times, tp, "count").get<int>();
                if (count < 2 || stop < start) fail(tp, "need count >= 2 and stop >= start");
                for (int i = 0; i < count; ++i)
                    c.times.push_back(start + (stop - start) * i / (count - 1));
            }
            if (j.contains("coherences")) {
                for (const auto& pr : j.at("coherences")) {
                    if (!pr.is_array() || pr.size() != 2) fail(path + ".coherences", "expected pairs of states");
                    CoherencePair cp;
                    auto read_state = [&](const json& st, int& l, int& m) {
                        if (st.is_array() && st.size() == 2) { l = st.at(0).get<int>(); m = st.at(1).get<int>(); }
                        else fail(path + ".coherences", "state must be [l, m] (or [0, m] for planar)");
                    };
                    read_state(pr.at(0), cp.l1, cp.m1);
                    read_state(pr.at(1), cp.l2, cp.m2);
                    c.coherences.push_back(cp);
                }
            }
            c.snapshots = j.value("snapshots", false);
            break;
        }
        case ComputeSpec::Kind::heating:
            c.omega0 = frequency_field(j, "omega0", path);
            c.r = vector3(member(j, path, "r_eq"), "length", path + ".r_eq");
            if (j.contains("direction"))
                c.direction = vector3(j.at("direction"), "dimensionless", path + ".direction").normalized();
            break;
        case ComputeSpec::Kind::thomson: {
            const json& seps = member(j, path, "separations");
            const json* arr = &seps;
            double factor = 1.0;
            if (seps.is_object()) {
                arr = &member(seps, path + ".separations", "value");
                if (seps.contains("unit"))
                    factor = unit_factor("length", seps.at("unit").get<std::string>(),
                                         path + ".separations.unit");
            }
            if (!arr->is_array()) fail(path + ".separations", "expected an array");
            for (const auto& s : *arr) c.separations.push_back(factor * number(s, path + ".separations"));
            break;
        }
        case ComputeSpec::Kind::check:
            if (j.contains("r")) c.r = vector3(j.at("r"), "length", path + ".r");
            c.omega = frequency_field(j, "omega", path, 0.0);
            break;
    }
    return c;
}

json compute_json(const ComputeSpec& c) {
    json j{{"request", compute_kind_name(c.kind)}};
    if (c.method) j["method"] = method_name(*c.method);
    switch (c.kind) {
        case ComputeSpec::Kind::kernel:
            j["r"] = vector_json(c.r, "m");
            j["rp"] = vector_json(c.rp, "m");
            j["omega"] = quantity_json(c.omega, "rad/s");
            break;
        case ComputeSpec::Kind::psd:
            j["r0"] = vector_json(c.r, "m");
            j["omega"] = quantity_json(c.omega, "rad/s");
            j["zero_point"] = c.zero_point;
            break;
        case ComputeSpec::Kind::rate: {
            auto pose_json = [](const rates::Pose& p) {
                return json{{"position", vector_json(p.position, "m")},
                            {"orientation",
                             {quantity_json(p.orientation.alpha, "rad"),
                              quantity_json(p.orientation.beta, "rad"),
                              quantity_json(p.orientation.gamma, "rad")}}};
            };
            if (c.has_pair) {
                j["pose_a"] = pose_json(c.pair.a);
                j["pose_b"] = pose_json(c.pair.b);
            }
            if (c.r != Vec3::Zero()) j["r_cm"] = vector_json(c.r, "m");
            break;
        }
        case ComputeSpec::Kind::scan:
            j["ion_distance"] = quantity_json(c.ion_distance, "m");
            j["height"] = quantity_json(c.height, "m");
            j["fixed_alpha"] = quantity_json(c.fixed_alpha, "rad");
            j["fixed_beta"] = quantity_json(c.fixed_beta, "rad");
            j["n_alpha"] = c.n_alpha;
            j["n_beta"] = c.n_beta;
            j["great_circles"] = c.emit_great_circles;
            break;
        case ComputeSpec::Kind::evolve: {
            j["r_cm"] = vector_json(c.r, "m");
            json init;
            if (c.initial.kind == InitialState::Kind::fock) {
                init["kind"] = "fock";
                init["occupation"] = c.initial.occupation;
            } else {
                init["kind"] = c.initial.kind == InitialState::Kind::rotor_superposition
                                   ? "rotor_superposition"
                                   : "planar_superposition";
                json terms = json::array();
                for (const auto& t : c.initial.terms)
                    terms.push_back(json{{"l", t.l}, {"m", t.m},
                                         {"amplitude", {t.amplitude.real(), t.amplitude.imag()}}});
                init["terms"] = terms;
            }
            j["initial"] = init;
            j["times"] = json{{"value", c.times}, {"unit", "s"}};
            if (!c.coherences.empty()) {
                json pairs = json::array();
                for (const auto& cp : c.coherences)
                    pairs.push_back(json::array({{cp.l1, cp.m1}, {cp.l2, cp.m2}}));
                j["coherences"] = pairs;
            }
            j["snapshots"] = c.snapshots;
            break;
        }
        case ComputeSpec::Kind::heating:
            j["omega0"] = quantity_json(c.omega0, "rad/s");
            j["r_eq"] = vector_json(c.r, "m");
            j["direction"] = vector_json(c.direction, "");
            break;
        case ComputeSpec::Kind::thomson:
            j["separations"] = json{{"value", c.separations}, {"unit", "m"}};
            break;
        case ComputeSpec::Kind::check:
            j["omega"] = quantity_json(c.omega, "rad/s");
            if (c.r != Vec3::Zero()) j["r"] = vector_json(c.r, "m");
            break;
    }
    return j;
}

} // namespace

Scenario parse_scenario(const nlohmann::json& root) {
    if (!root.is_object()) throw ConfigError("$: config root must be an object");
    Scenario s;
    s.geometry = parse_geometry(root);
    s.particle = parse_particle(root);
    s.motion = parse_motion(root);
    s.compute = parse_compute(root);
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json root;
    try {
        in >> root;
    } catch (const std::exception& e) {
        throw ConfigError(std::string{"config is not valid JSON: "} + e.what());
    }
    return parse_scenario(root);
}

nlohmann::json scenario_to_json(const Scenario& s) {
    json root;
    // geometry + inline materials (canonical names)
    json geometry;
    geometry["temperature"] = quantity_json(s.geometry.temperature, "K");
    json materials;
    if (const auto* hs = std::get_if<greens::HalfSpace>(&s.geometry.shape)) {
        if (std::holds_alternative<materials::Vacuum>(hs->bulk)) {
            geometry["type"] = "vacuum";
        } else {
            geometry["type"] = "half_space";
            geometry["bulk"] = "bulk";
            materials["bulk"] = material_json(hs->bulk);
        }
    } else {
        const auto& lay = std::get<greens::Layered>(s.geometry.shape);
        geometry["type"] = "layered";
        geometry["bulk"] = "bulk";
        geometry["layer"] = "layer";
        geometry["thickness"] = quantity_json(lay.thickness, "m");
        materials["bulk"] = material_json(lay.bulk);
        materials["layer"] = material_json(lay.layer);
    }
    root["geometry"] = geometry;
    if (!materials.is_null()) root["material"] = materials;

    json particle;
    std::visit(
        [&particle](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, rates::Monopole>) {
                particle["distribution"] = "monopole";
                particle["charge"] = quantity_json(d.charge, "C");
            } else if constexpr (std::is_same_v<T, rates::PointDipole>) {
                particle["distribution"] = "dipole";
                particle["dipole_vector"] = vector_json(d.moment, "C*m");
            } else if constexpr (std::is_same_v<T, rates::PointQuadrupole>) {
                particle["distribution"] = "quadrupole";
                particle["quadrupole_q33"] = quantity_json(d.tensor(2, 2), "C*m^2");
            } else {
                particle["distribution"] = "point_charges";
                json sites = json::array();
                for (const auto& site : d.sites)
                    sites.push_back(json{{"charge", quantity_json(site.charge, "C")},
                                         {"position", vector_json(site.position, "m")}});
                particle["point_charges"] = sites;
            }
        },
        s.particle.distribution);
    if (s.particle.mass > 0.0) particle["mass"] = quantity_json(s.particle.mass, "kg");
    if (s.particle.inertia > 0.0) particle["inertia"] = quantity_json(s.particle.inertia, "kg*m^2");
    root["particle"] = particle;

    json motion;
    switch (s.motion.kind) {
        case MotionSpec::Kind::slow: motion["kind"] = "slow"; break;
        case MotionSpec::Kind::oscillating: motion["kind"] = "oscillating"; break;
        case MotionSpec::Kind::librating: motion["kind"] = "librating"; break;
        case MotionSpec::Kind::rotating: motion["kind"] = "rotating"; break;
        case MotionSpec::Kind::free_rotor: motion["kind"] = "free_rotor"; break;
    }
    if (s.motion.kind == MotionSpec::Kind::free_rotor) {
        motion["l_max"] = s.motion.l_max;
        motion["dipole_axis"] = s.motion.dipole_axis;
        motion["thermal_excitation"] = s.motion.thermal_excitation;
        motion["rotating_frame"] = s.motion.rotating_frame;
    }
    if (!s.motion.modes.empty()) {
        json modes = json::array();
        for (const auto& m : s.motion.modes)
            modes.push_back(json{{"omega", quantity_json(m.omega, "rad/s")},
                                 {"direction", vector_json(m.direction, "")},
                                 {"n_max", m.n_max}});
        motion["modes"] = modes;
    }
    if (s.motion.kind == MotionSpec::Kind::librating)
        motion["eps_eq"] = vector_json(s.motion.eps_eq, "");
    if (s.motion.kind == MotionSpec::Kind::rotating) {
        motion["omega_rot"] = quantity_json(s.motion.omega_rot, "rad/s");
        motion["m_max"] = s.motion.m_max;
        motion["plane"] = json::array({vector_json(s.motion.plane_e1, ""),
                                       vector_json(s.motion.plane_e2, "")});
    }
    root["motion"] = motion;
    root["compute"] = compute_json(s.compute);
    return root;
}

const char* compute_kind_name(ComputeSpec::Kind kind) {
    switch (kind) {
        case ComputeSpec::Kind::kernel: return "kernel";
        case ComputeSpec::Kind::psd: return "psd";
        case ComputeSpec::Kind::rate: return "rate";
        case ComputeSpec::Kind::scan: return "scan";
        case ComputeSpec::Kind::evolve: return "evolve";
        case ComputeSpec::Kind::heating: return "heating";
        case ComputeSpec::Kind::thomson: return "thomson";
        case ComputeSpec::Kind::check: return "check";
    }
    return "check";
}

std::optional<ComputeSpec::Kind> compute_kind_from_name(const std::string& name) {
    if (name == "kernel") return ComputeSpec::Kind::kernel;
    if (name == "psd") return ComputeSpec::Kind::psd;
    if (name == "rate") return ComputeSpec::Kind::rate;
    if (name == "scan") return ComputeSpec::Kind::scan;
    if (name == "evolve") return ComputeSpec::Kind::evolve;
    if (name == "heating") return ComputeSpec::Kind::heating;
    if (name == "thomson") return ComputeSpec::Kind::thomson;
    if (name == "check") return ComputeSpec::Kind::check;
    return std::nullopt;
}

} // namespace surfnoise::cli
