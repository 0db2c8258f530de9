#include "surfnoise/runner.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "surfnoise/constants.hpp"
#include "surfnoise/errors.hpp"
#include "surfnoise/lindblad.hpp"
#include "surfnoise/noise.hpp"

namespace surfnoise::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// RFC-4180: CRLF line endings, '.' decimal separator.
class CsvWriter {
public:
    explicit CsvWriter(const fs::path& path) : out_(path, std::ios::binary) {
        if (!out_) throw Error("io", "cannot open output file '" + path.string() + "'");
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << cells[i];
        }
        out_ << "\r\n";
    }

private:
    std::ofstream out_;
};

std::string fmt(double v) { return format_sci(v); }

greens::KernelEvalMethod default_method(const Scenario& s) {
    if (s.compute.method) return *s.compute.method;
    return std::holds_alternative<greens::HalfSpace>(s.geometry.shape)
               ? greens::KernelEvalMethod::closed_form
               : greens::KernelEvalMethod::thin_layer_expansion;
}

Eigen::Matrix3d quantization_frame(const MotionSpec& motion) {
    Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();
    if (motion.dipole_axis == "in_plane") {
        // eps_3 along lab x, right-handed completion
        frame.col(0) = Vec3::UnitY();
        frame.col(1) = Vec3::UnitZ();
        frame.col(2) = Vec3::UnitX();
    }
    return frame;
}

double rotor_dipole_magnitude(const Scenario& s) {
    const auto* dip = std::get_if<rates::PointDipole>(&s.particle.distribution);
    if (!dip) throw ConfigError("free-rotor computations require particle.distribution = dipole");
    return dip->moment.norm();
}

double rotor_inertia(const Scenario& s) {
    if (s.particle.inertia <= 0.0)
        throw ConfigError("free-rotor computations require particle.inertia (or omega0)");
    return s.particle.inertia;
}

// --- evolve helpers ---------------------------------------------------------

struct EvolveSetup {
    lindblad::DissipatorSpec dissipator;
    Eigen::MatrixXcd rho0;
    std::optional<Eigen::MatrixXcd> h0;
    std::vector<std::string> labels;             // per basis state
    std::vector<std::pair<int, int>> coh_index;  // matrix indices to report
    std::vector<std::string> coh_labels;
};

EvolveSetup setup_free_rotor(const Scenario& s) {
    EvolveSetup setup;
    const double p = rotor_dipole_magnitude(s);
    const double inertia = rotor_inertia(s);
    const Vec3 r_cm = s.compute.r;
    lindblad::FreeRotorOptions opts;
    opts.method = default_method(s);
    opts.include_excitation = s.motion.thermal_excitation;
    opts.frame = quantization_frame(s.motion);
    setup.dissipator = lindblad::build_free_rotor_dissipator(
        p, inertia, r_cm, s.geometry, s.motion.l_max, s.geometry.temperature, opts);

    const lindblad::AngularMomentumBasis basis{s.motion.l_max};
    const int dim = basis.dimension();
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    for (const auto& t : s.compute.initial.terms)
        psi[basis.index(t.l, t.m)] += t.amplitude;
    const double norm = psi.norm();
    if (norm == 0.0) throw ConfigError("initial state has zero norm");
    psi /= norm;
    setup.rho0 = psi * psi.adjoint();

    if (!s.motion.rotating_frame) {
        Eigen::MatrixXcd h0 = Eigen::MatrixXcd::Zero(dim, dim);
        for (int i = 0; i < dim; ++i) {
            const auto [l, m] = basis.labels(i);
            (void)m;
            h0(i, i) = basis.energy(l, inertia);
        }
        setup.h0 = h0;
    }
    for (int i = 0; i < dim; ++i) {
        const auto [l, m] = basis.labels(i);
        setup.labels.push_back("pop_" + std::to_string(l) + "_" + std::to_string(m));
    }
    std::vector<CoherencePair> pairs = s.compute.coherences;
    if (pairs.empty() && s.compute.initial.terms.size() >= 2) {
        for (std::size_t i = 0; i < s.compute.initial.terms.size(); ++i)
            for (std::size_t k = i + 1; k < s.compute.initial.terms.size(); ++k)
                pairs.push_back({s.compute.initial.terms[i].l, s.compute.initial.terms[i].m,
                                 s.compute.initial.terms[k].l, s.compute.initial.terms[k].m});
    }
    for (const auto& cp : pairs) {
        setup.coh_index.emplace_back(basis.index(cp.l1, cp.m1), basis.index(cp.l2, cp.m2));
        setup.coh_labels.push_back("coh_" + std::to_string(cp.l1) + "_" + std::to_string(cp.m1) +
                                   "__" + std::to_string(cp.l2) + "_" + std::to_string(cp.m2));
    }
    return setup;
}

EvolveSetup setup_modes(const Scenario& s) {
    EvolveSetup setup;
    std::vector<lindblad::BosonicModeSpec> modes;
    for (const auto& m : s.motion.modes) modes.push_back({m.omega, m.direction, m.n_max});
    if (modes.empty()) throw ConfigError("oscillating/librating motion requires motion.modes");
    if (s.motion.kind == MotionSpec::Kind::oscillating) {
        if (s.particle.mass <= 0.0) throw ConfigError("oscillating motion requires particle.mass");
        setup.dissipator = lindblad::build_oscillator_dissipator(
            s.particle.distribution, s.particle.mass, modes, s.compute.r, s.geometry, {s.compute.method});
    } else {
        setup.dissipator = lindblad::build_libration_dissipator(
            s.particle.distribution, rotor_inertia(s), modes, s.motion.eps_eq, s.compute.r,
            s.geometry, {s.compute.method});
    }
    int dim = 1;
    for (const auto& m : modes) dim *= m.n_max + 1;
    std::vector<int> occ = s.compute.initial.occupation;
    if (occ.empty()) occ.assign(modes.size(), 0);
    if (occ.size() != modes.size())
        throw ConfigError("initial occupation length must match the number of modes");
    int index = 0;
    for (std::size_t k = 0; k < modes.size(); ++k) {
        if (occ[k] < 0 || occ[k] > modes[k].n_max)
            throw ConfigError("initial occupation outside the Fock truncation");
        index = index * (modes[k].n_max + 1) + occ[k];
    }
    setup.rho0 = Eigen::MatrixXcd::Zero(dim, dim);
    setup.rho0(index, index) = 1.0;
    for (int i = 0; i < dim; ++i) {
        int rem = i;
        std::string label = "pop";
        std::vector<int> digits(modes.size());
        for (std::size_t k = modes.size(); k-- > 0;) {
            digits[k] = rem % (modes[k].n_max + 1);
            rem /= modes[k].n_max + 1;
        }
        for (int d : digits) label += "_" + std::to_string(d);
        setup.labels.push_back(label);
    }
    for (const auto& cp : s.compute.coherences) {
        setup.coh_index.emplace_back(cp.m1, cp.m2);  // flat indices
        setup.coh_labels.push_back("coh_" + std::to_string(cp.m1) + "__" + std::to_string(cp.m2));
    }
    return setup;
}

EvolveSetup setup_planar(const Scenario& s) {
    EvolveSetup setup;
    int support = 1;
    for (const auto& t : s.compute.initial.terms) support = std::max(support, std::abs(t.m));
    const int m_max = s.motion.m_max > 0 ? s.motion.m_max : 4 * support;
    lindblad::RotationOptions opts;
    opts.method = s.compute.method;
    opts.plane_e1 = s.motion.plane_e1;
    opts.plane_e2 = s.motion.plane_e2;
    opts.m_max = m_max;
    setup.dissipator = lindblad::build_rotation_dissipator(s.particle.distribution,
                                                           s.motion.omega_rot, s.compute.r,
                                                           s.geometry, opts);
    const int dim = 2 * m_max + 1;
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
    for (const auto& t : s.compute.initial.terms) {
        if (std::abs(t.m) > m_max) throw ConfigError("initial |m| outside the planar basis");
        psi[t.m + m_max] += t.amplitude;
    }
    const double norm = psi.norm();
    if (norm == 0.0) throw ConfigError("initial state has zero norm");
    psi /= norm;
    setup.rho0 = psi * psi.adjoint();
    for (int m = -m_max; m <= m_max; ++m) setup.labels.push_back("pop_" + std::to_string(m));
    for (const auto& cp : s.compute.coherences) {
        setup.coh_index.emplace_back(cp.m1 + m_max, cp.m2 + m_max);
        setup.coh_labels.push_back("coh_" + std::to_string(cp.m1) + "__" + std::to_string(cp.m2));
    }
    return setup;
}

void write_snapshots(const fs::path& path, std::span<const double> times,
                     const std::vector<lindblad::DensityMatrix>& traj) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("io", "cannot open output file '" + path.string() + "'");
    const Eigen::Index dim = traj.empty() ? 0 : traj.front().rho.rows();
    out << "# surfnoise rho snapshots: blocks of 't,<s>' then " << dim
        << " rows of re,im pairs (row-major)\r\n";
    out << "dim," << dim << "\r\n";
    for (std::size_t k = 0; k < traj.size(); ++k) {
        out << "t," << fmt(times[k]) << "\r\n";
        for (Eigen::Index i = 0; i < dim; ++i) {
            for (Eigen::Index j = 0; j < dim; ++j) {
                if (j) out << ',';
                out << fmt(traj[k].rho(i, j).real()) << ',' << fmt(traj[k].rho(i, j).imag());
            }
            out << "\r\n";
        }
    }
}

// --- computation dispatch ----------------------------------------------------

struct Outputs {
    std::vector<std::string> files;
    std::vector<std::string> warnings;
    json summary;
};

Outputs run_kernel(const Scenario& s, const fs::path& dir) {
    Outputs out;
    double value = 0.0;
    if (s.compute.omega == 0.0) {
        value = greens::kernel_h(s.compute.r, s.compute.rp, s.geometry, &out.warnings);
    } else if (s.compute.method &&
               *s.compute.method == greens::KernelEvalMethod::full_bessel_integral) {
        value = greens::im_green(s.compute.r, s.compute.rp, s.compute.omega, s.geometry,
                                 greens::KernelEvalMethod::full_bessel_integral);
    } else {
        value = greens::im_green(s.compute.r, s.compute.rp, s.compute.omega, s.geometry,
                                 default_method(s));
    }
    CsvWriter csv(dir / "kernel.csv");
    csv.row({"omega", "rx", "ry", "rz", "rpx", "rpy", "rpz", "value"});
    csv.row({fmt(s.compute.omega), fmt(s.compute.r.x()), fmt(s.compute.r.y()), fmt(s.compute.r.z()),
             fmt(s.compute.rp.x()), fmt(s.compute.rp.y()), fmt(s.compute.rp.z()), fmt(value)});
    out.files.push_back((dir / "kernel.csv").string());
    out.summary["value"] = value;
    return out;
}

Outputs run_psd(const Scenario& s, const fs::path& dir) {
    Outputs out;
    noise::PsdOptions opts;
    opts.method = s.compute.method;
    opts.include_zero_point = s.compute.zero_point;
    const noise::PsdTensor psd = noise::psd_E(s.compute.r, s.compute.omega, s.geometry, opts);
    CsvWriter csv(dir / "psd.csv");
    std::vector<std::string> header{"omega", "x", "y", "z"};
    for (const char* c : {"sxx", "sxy", "sxz", "syx", "syy", "syz", "szx", "szy", "szz", "trace"})
        header.push_back(c);
    csv.row(header);
    std::vector<std::string> row{fmt(psd.omega), fmt(psd.position.x()), fmt(psd.position.y()),
                                 fmt(psd.position.z())};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) row.push_back(fmt(psd.tensor(i, j)));
    row.push_back(fmt(psd.tensor.trace()));
    csv.row(row);
    out.files.push_back((dir / "psd.csv").string());
    out.summary["trace"] = psd.tensor.trace();
    return out;
}

Outputs run_rate(const Scenario& s, const fs::path& dir) {
    Outputs out;
    double gamma = 0.0;
    if (s.motion.kind == MotionSpec::Kind::free_rotor) {
        // characteristic rotational decoherence scale p^2 sum_i h_ii / hbar
        const double p = rotor_dipole_magnitude(s);
        const double omega0 = constants::hbar / rotor_inertia(s);
        const Eigen::Matrix3d h = lindblad::resonant_kernel_matrix(
            s.compute.r, omega0, s.geometry, default_method(s), quantization_frame(s.motion));
        gamma = p * p * h.trace() / constants::hbar;
    } else {
        if (!s.compute.has_pair)
            throw ConfigError("rate for slow motion requires compute.pose_a and compute.pose_b");
        gamma = rates::decoherence_rate(s.particle.distribution, s.compute.pair, s.geometry);
    }
    CsvWriter csv(dir / "rate.csv");
    csv.row({"gamma_rate"});
    csv.row({fmt(gamma)});
    out.files.push_back((dir / "rate.csv").string());
    out.summary["gamma_rate"] = gamma;
    return out;
}

Outputs run_scan(const Scenario& s, const fs::path& dir, int threads) {
    Outputs out;
    rates::TwoIonScanParams params;
    const auto* mono = std::get_if<rates::Monopole>(&s.particle.distribution);
    if (!mono) throw ConfigError("scan requires particle.distribution = monopole (charge per ion)");
    params.charge = mono->charge;
    params.ion_distance = s.compute.ion_distance;
    params.height = s.compute.height;
    params.fixed_alpha = s.compute.fixed_alpha;
    params.fixed_beta = s.compute.fixed_beta;
    params.n_alpha = s.compute.n_alpha;
    params.n_beta = s.compute.n_beta;
    params.threads = threads;
    const rates::TwoIonScanResult result = rates::two_ion_scan(params, s.geometry);

    CsvWriter csv(dir / "scan.csv");
    csv.row({"alpha", "beta", "gamma_rate", "normalized_rate"});
    for (int jb = 0; jb < params.n_beta; ++jb)
        for (int ia = 0; ia < params.n_alpha; ++ia) {
            const double g = result.rate[static_cast<std::size_t>(jb * params.n_alpha + ia)];
            csv.row({fmt(result.alpha[static_cast<std::size_t>(ia)]),
                     fmt(result.beta[static_cast<std::size_t>(jb)]), fmt(g),
                     fmt(result.max_rate > 0.0 ? g / result.max_rate : 0.0)});
        }
    out.files.push_back((dir / "scan.csv").string());
    if (s.compute.emit_great_circles) {
        const auto circles = rates::great_circles(params.fixed_alpha, params.fixed_beta, 6, 181);
        CsvWriter gc(dir / "great_circles.csv");
        gc.row({"circle", "alpha", "beta"});
        for (std::size_t c = 0; c < circles.size(); ++c)
            for (std::size_t k = 0; k < circles[c].alpha.size(); ++k)
                gc.row({std::to_string(c), fmt(circles[c].alpha[k]), fmt(circles[c].beta[k])});
        out.files.push_back((dir / "great_circles.csv").string());
    }
    out.summary["gamma_max"] = result.max_rate;
    std::cout << "scan: gamma_max = " << fmt(result.max_rate) << " 1/s\n";
    return out;
}

Outputs run_evolve(const Scenario& s, const fs::path& dir) {
    Outputs out;
    EvolveSetup setup;
    switch (s.motion.kind) {
        case MotionSpec::Kind::free_rotor: setup = setup_free_rotor(s); break;
        case MotionSpec::Kind::oscillating:
        case MotionSpec::Kind::librating: setup = setup_modes(s); break;
        case MotionSpec::Kind::rotating: setup = setup_planar(s); break;
        case MotionSpec::Kind::slow:
            throw ConfigError("evolve requires a resonant motion kind (not 'slow')");
    }
    const auto traj = lindblad::evolve({setup.rho0}, setup.h0 ? &*setup.h0 : nullptr,
                                       setup.dissipator, s.compute.times);
    CsvWriter csv(dir / "trajectory.csv");
    std::vector<std::string> header{"time"};
    header.insert(header.end(), setup.labels.begin(), setup.labels.end());
    header.insert(header.end(), setup.coh_labels.begin(), setup.coh_labels.end());
    csv.row(header);
    for (std::size_t k = 0; k < traj.size(); ++k) {
        std::vector<std::string> row{fmt(s.compute.times[k])};
        for (Eigen::Index i = 0; i < traj[k].rho.rows(); ++i)
            row.push_back(fmt(traj[k].rho(i, i).real()));
        for (const auto& [i, j] : setup.coh_index)
            row.push_back(fmt(std::abs(traj[k].rho(i, j))));
        csv.row(row);
    }
    out.files.push_back((dir / "trajectory.csv").string());
    if (s.compute.snapshots) {
        write_snapshots(dir / "snapshots.txt", s.compute.times, traj);
        out.files.push_back((dir / "snapshots.txt").string());
    }
    for (const auto& note : setup.dissipator.notes) out.warnings.push_back(note);
    if (!traj.empty())
        out.summary["final_trace"] = traj.back().rho.trace().real();
    return out;
}

Outputs run_heating(const Scenario& s, const fs::path& dir) {
    Outputs out;
    const auto* mono = std::get_if<rates::Monopole>(&s.particle.distribution);
    if (!mono) throw ConfigError("heating requires particle.distribution = monopole");
    if (s.particle.mass <= 0.0) throw ConfigError("heating requires particle.mass");
    noise::PsdOptions opts;
    opts.method = s.compute.method;
    const noise::HeatingResult h = noise::heating_rate_monopole(
        mono->charge, s.particle.mass, s.compute.omega0, s.compute.direction, s.compute.r,
        s.geometry, opts);
    CsvWriter csv(dir / "heating.csv");
    csv.row({"omega0", "rate_exact", "rate_psd_approx"});
    csv.row({fmt(h.omega0), fmt(h.rate), fmt(h.rate_psd)});
    out.files.push_back((dir / "heating.csv").string());
    out.summary["rate_exact"] = h.rate;
    return out;
}

Outputs run_thomson(const Scenario& s, const fs::path& dir) {
    Outputs out;
    const auto* mono = std::get_if<rates::Monopole>(&s.particle.distribution);
    if (!mono) throw ConfigError("thomson requires particle.distribution = monopole");
    if (s.particle.mass <= 0.0) throw ConfigError("thomson requires particle.mass");
    const double g_inf = rates::thomson_gamma_infinity(mono->charge, s.particle.mass,
                                                       s.geometry.temperature);
    CsvWriter csv(dir / "thomson.csv");
    csv.row({"separation", "gamma_thomson", "gamma_infinity"});
    for (double sep : s.compute.separations) {
        const double g = rates::thomson_rate(mono->charge, s.particle.mass,
                                             s.geometry.temperature, sep);
        csv.row({fmt(sep), fmt(g), fmt(g_inf)});
    }
    out.files.push_back((dir / "thomson.csv").string());
    out.summary["gamma_infinity"] = g_inf;
    return out;
}

json constants_json() {
    json j;
    j["c_m_s"] = constants::c_light;
    j["hbar_J_s"] = constants::hbar;
    j["h_J_s"] = constants::planck_h;
    j["k_boltzmann_J_K"] = constants::k_boltzmann;
    j["epsilon0_F_m"] = constants::epsilon0;
    j["elementary_charge_C"] = constants::elementary_charge;
    j["debye_C_m"] = constants::debye;
    j["atomic_mass_kg"] = constants::atomic_mass;
    j["source"] = "CODATA 2018";
    return j;
}

} // namespace

std::string format_sci(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.11e", value);
    return buf;
}

RunResult run(const Scenario& scenario, const RunOptions& options) {
    const fs::path dir(options.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (!fs::is_directory(dir))
        throw Error("io", "cannot create output directory '" + dir.string() + "'");

    RunResult result;
    result.validity = check_validity(scenario);
    for (const auto& n : result.validity.notes)
        if (n.rfind("WARNING", 0) == 0) std::cerr << n << "\n";

    Outputs outputs;
    if (options.check_only || scenario.compute.kind == ComputeSpec::Kind::check) {
        std::cout << to_json(result.validity).dump(2) << "\n";
    } else {
        switch (scenario.compute.kind) {
            case ComputeSpec::Kind::kernel: outputs = run_kernel(scenario, dir); break;
            case ComputeSpec::Kind::psd: outputs = run_psd(scenario, dir); break;
            case ComputeSpec::Kind::rate: outputs = run_rate(scenario, dir); break;
            case ComputeSpec::Kind::scan: outputs = run_scan(scenario, dir, options.threads); break;
            case ComputeSpec::Kind::evolve: outputs = run_evolve(scenario, dir); break;
            case ComputeSpec::Kind::heating: outputs = run_heating(scenario, dir); break;
            case ComputeSpec::Kind::thomson: outputs = run_thomson(scenario, dir); break;
            case ComputeSpec::Kind::check: break;
        }
    }

    json manifest = scenario_to_json(scenario);
    manifest["program"] = "surfnoise 0.1.0";
    manifest["constants"] = constants_json();
    manifest["validity"] = to_json(result.validity);
    manifest["warnings"] = outputs.warnings;
    if (!outputs.summary.is_null()) manifest["summary"] = outputs.summary;
    const fs::path manifest_path = dir / "manifest.json";
    {
        std::ofstream out(manifest_path, std::ios::binary);
        if (!out) throw Error("io", "cannot open '" + manifest_path.string() + "'");
        out << manifest.dump(2) << "\n";
    }
    result.files = outputs.files;
    result.files.push_back(manifest_path.string());
    return result;
}

} // namespace surfnoise::cli
