#include "surfnoise/lindblad.hpp"

#include <algorithm>
#include <cmath>

#include "surfnoise/constants.hpp"
#include "surfnoise/errors.hpp"

namespace surfnoise::lindblad {

namespace {

constexpr double hbar = constants::hbar;
using Matrix = Eigen::MatrixXcd;

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// a_k on the product of truncated Fock spaces
Matrix mode_operator(std::span<const BosonicModeSpec> modes, std::size_t which) {
    Matrix op = Matrix::Identity(1, 1);
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const int d = modes[k].n_max + 1;
        const Matrix block = (k == which) ? annihilation_operator(modes[k].n_max)
                                          : Matrix::Identity(d, d);
        op = kron(op, block);
    }
    return op;
}

greens::KernelEvalMethod pick_method(const greens::SurfaceGeometry& geometry,
                                     const std::optional<greens::KernelEvalMethod>& method) {
    if (method) return *method;
    return std::holds_alternative<greens::HalfSpace>(geometry.shape)
               ? greens::KernelEvalMethod::closed_form
               : greens::KernelEvalMethod::thin_layer_expansion;
}

// mode-resolved resonant kernel of an oscillating distribution
double mode_kernel(const rates::ChargeDistribution& dist, const BosonicModeSpec& mode,
                   const Vec3& r_eq, const greens::SurfaceGeometry& geometry,
                   greens::KernelEvalMethod method) {
    const greens::ImageKernel kernel = greens::im_green_image_form(mode.omega, geometry, method);
    const Vec3 eps = mode.direction.normalized();
    double h = 0.0;
    if (std::holds_alternative<rates::Monopole>(dist)) {
        const std::array<Vec3, 1> l{eps}, r{eps};
        h = -greens::eval_image_kernel(kernel, r_eq, r_eq, l, r);
    } else if (const auto* dip = std::get_if<rates::PointDipole>(&dist)) {
        const std::array<Vec3, 2> l{eps, dip->moment}, r{eps, dip->moment};
        h = -greens::eval_image_kernel(kernel, r_eq, r_eq, l, r);
    } else if (const auto* quad = std::get_if<rates::PointQuadrupole>(&dist)) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(quad->tensor);
        for (int a = 0; a < 3; ++a) {
            const double la = eig.eigenvalues()[a];
            if (la == 0.0) continue;
            const Vec3 va = eig.eigenvectors().col(a);
            for (int b = 0; b < 3; ++b) {
                const double lb = eig.eigenvalues()[b];
                if (lb == 0.0) continue;
                const Vec3 vb = eig.eigenvectors().col(b);
                const std::array<Vec3, 3> l{eps, va, va}, r{eps, vb, vb};
                h -= la * lb * greens::eval_image_kernel(kernel, r_eq, r_eq, l, r);
            }
        }
    } else {
        throw DomainError("oscillator dissipator supports monopole, dipole, or quadrupole");
    }
    return std::max(h, 0.0);
}

void check_mode_separation(std::span<const BosonicModeSpec> modes, double max_rate,
                           double factor) {
    for (std::size_t i = 0; i < modes.size(); ++i)
        for (std::size_t j = i + 1; j < modes.size(); ++j) {
            const double gap = std::abs(modes[i].omega - modes[j].omega);
            if (gap <= factor * max_rate)
                throw DegenerateModes("mode frequencies are not sufficiently well separated "
                                      "for the rotating-wave approximation");
        }
}

struct ThermalRates {
    double down = 0.0;
    double up = 0.0;
};

ThermalRates thermal_rates(double coefficient, double omega, double temperature) {
    const double n = materials::bose_occupation(omega, temperature);
    return {coefficient * (n + 1.0), coefficient * n};
}

} // namespace

Eigen::MatrixXcd annihilation_operator(int n_max) {
    if (n_max < 0) throw DomainError("annihilation_operator requires n_max >= 0");
    Matrix a = Matrix::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

void append_gks_block(DissipatorSpec& spec, const Eigen::MatrixXcd& coefficients,
                      std::span<const Eigen::MatrixXcd> ops, double psd_tol) {
    if (coefficients.rows() != coefficients.cols() ||
        coefficients.rows() != static_cast<Eigen::Index>(ops.size()))
        throw DomainError("GKS coefficient matrix must be square and match the operator list");
    const double scale = coefficients.norm();
    if ((coefficients - coefficients.adjoint()).norm() > 1e-10 * std::max(scale, 1e-300))
        throw DomainError("GKS coefficient matrix must be Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(coefficients);
    for (Eigen::Index k = 0; k < coefficients.rows(); ++k) {
        const double lambda = eig.eigenvalues()[k];
        if (lambda < -psd_tol * std::max(scale, 1e-300))
            throw DomainError("GKS coefficient matrix is not positive semidefinite");
        if (lambda <= 0.0) continue;
        Matrix jump = Matrix::Zero(ops.front().rows(), ops.front().cols());
        for (std::size_t i = 0; i < ops.size(); ++i)
            jump += eig.eigenvectors()(static_cast<Eigen::Index>(i), k) * ops[i];
        spec.channels.push_back({lambda, std::move(jump)});
    }
}

double DensityMatrix::trace_error() const { return std::abs(rho.trace() - std::complex<double>(1.0)); }

double DensityMatrix::hermiticity_error() const { return (rho - rho.adjoint()).norm(); }

void DensityMatrix::validate(double trace_tol, double herm_tol, double eig_tol) const {
    if (trace_error() > trace_tol) throw DomainError("density matrix trace deviates from 1");
    if (hermiticity_error() > herm_tol) throw DomainError("density matrix is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (rho + rho.adjoint()));
    if (eig.eigenvalues().minCoeff() < -eig_tol)
        throw DomainError("density matrix has a negative eigenvalue");
}

Eigen::Matrix3d resonant_kernel_matrix(const Vec3& r_cm, double omega,
                                       const greens::SurfaceGeometry& geometry,
                                       greens::KernelEvalMethod method,
                                       const Eigen::Matrix3d& frame) {
    const greens::ImageKernel kernel = greens::im_green_image_form(omega, geometry, method);
    Eigen::Matrix3d h;
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            const std::array<Vec3, 1> left{frame.col(j)};
            const std::array<Vec3, 1> right{frame.col(i)};
            h(i, j) = -greens::eval_image_kernel(kernel, r_cm, r_cm, left, right);
            h(j, i) = h(i, j);
        }
    return h;
}

DissipatorSpec build_free_rotor_dissipator(double dipole, double inertia, const Vec3& r_cm,
                                           const greens::SurfaceGeometry& geometry, int l_max,
                                           double temperature, const FreeRotorOptions& options) {
    if (l_max < 1) throw DomainError("free rotor dissipator requires l_max >= 1");
    if (inertia <= 0.0) throw DomainError("free rotor dissipator requires inertia > 0");
    const AngularMomentumBasis basis{l_max};
    DissipatorSpec spec;
    const double pref = 2.0 * dipole * dipole / hbar;
    for (int l = 0; l < l_max; ++l) {
        const double omega_l = basis.transition_frequency(l, inertia);
        const Eigen::Matrix3d h =
            resonant_kernel_matrix(r_cm, omega_l, geometry, options.method, options.frame);
        const auto ops = rotor_dipole_operators(basis, l);
        const double n = materials::bose_occupation(omega_l, temperature);

        const Eigen::MatrixXcd coeff_down = (pref * (n + 1.0)) * h.cast<std::complex<double>>();
        append_gks_block(spec, coeff_down, std::span<const Matrix>(ops.data(), ops.size()));

        if (options.include_excitation && n > 0.0) {
            std::array<Matrix, 3> raising{ops[0].adjoint(), ops[1].adjoint(), ops[2].adjoint()};
            const Eigen::MatrixXcd coeff_up = (pref * n) * h.cast<std::complex<double>>();
            append_gks_block(spec, coeff_up, std::span<const Matrix>(raising.data(), raising.size()));
        }
    }
    return spec;
}

DissipatorSpec build_oscillator_dissipator(const rates::ChargeDistribution& dist, double mass,
                                           std::span<const BosonicModeSpec> modes,
                                           const Vec3& r_eq, const greens::SurfaceGeometry& geometry,
                                           const OscillatorOptions& options) {
    if (modes.empty()) throw DomainError("oscillator dissipator requires at least one mode");
    if (mass <= 0.0) throw DomainError("oscillator dissipator requires mass > 0");
    const greens::KernelEvalMethod method = pick_method(geometry, options.method);

    double coupling2 = 1.0;
    if (const auto* mono = std::get_if<rates::Monopole>(&dist)) coupling2 = mono->charge * mono->charge;
    else if (std::holds_alternative<rates::PointDipole>(dist)) coupling2 = 1.0;
    else if (std::holds_alternative<rates::PointQuadrupole>(dist)) coupling2 = 1.0 / 36.0;
    else throw DomainError("oscillator dissipator supports monopole, dipole, or quadrupole");

    DissipatorSpec spec;
    std::vector<ThermalRates> rates_per_mode;
    double max_rate = 0.0;
    for (const auto& mode : modes) {
        if (mode.omega <= 0.0) throw DomainError("mode frequencies must be positive");
        const double h_k = mode_kernel(dist, mode, r_eq, geometry, method);
        const double coefficient = coupling2 * h_k / (mass * mode.omega);
        const ThermalRates tr = thermal_rates(coefficient, mode.omega, geometry.temperature);
        rates_per_mode.push_back(tr);
        max_rate = std::max(max_rate, tr.down);
    }
    check_mode_separation(modes, max_rate, options.separation_factor);
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const Matrix a = mode_operator(modes, k);
        spec.channels.push_back({rates_per_mode[k].down, a});
        spec.channels.push_back({rates_per_mode[k].up, a.adjoint()});
    }
    return spec;
}

DissipatorSpec build_libration_dissipator(const rates::ChargeDistribution& dist, double inertia,
                                          std::span<const BosonicModeSpec> modes,
                                          const Vec3& eps_eq, const Vec3& r_cm,
                                          const greens::SurfaceGeometry& geometry,
                                          const OscillatorOptions& options) {
    if (modes.size() != 2) throw DomainError("libration dissipator requires exactly two modes");
    if (inertia <= 0.0) throw DomainError("libration dissipator requires inertia > 0");
    const Vec3 eq = eps_eq.normalized();
    for (const auto& mode : modes)
        if (std::abs(mode.direction.normalized().dot(eq)) > 1e-9)
            throw DomainError("libration directions must be orthogonal to the equilibrium axis");
    const greens::KernelEvalMethod method = pick_method(geometry, options.method);

    DissipatorSpec spec;
    std::vector<ThermalRates> rates_per_mode;
    double max_rate = 0.0;
    for (const auto& mode : modes) {
        if (mode.omega <= 0.0) throw DomainError("mode frequencies must be positive");
        const greens::ImageKernel kernel = greens::im_green_image_form(mode.omega, geometry, method);
        const Vec3 eps = mode.direction.normalized();
        double coefficient = 0.0;
        if (const auto* dip = std::get_if<rates::PointDipole>(&dist)) {
            const std::array<Vec3, 1> l{eps}, r{eps};
            const double h_l = -greens::eval_image_kernel(kernel, r_cm, r_cm, l, r);
            coefficient = dip->moment.squaredNorm() * h_l / (inertia * mode.omega);
        } else if (const auto* quad = std::get_if<rates::PointQuadrupole>(&dist)) {
            const double q33 = eq.dot(quad->tensor * eq);
            const std::array<Vec3, 2> l{eq, eps}, r{eq, eps};
            const double h_l = -greens::eval_image_kernel(kernel, r_cm, r_cm, l, r);
            coefficient = q33 * q33 * h_l / (4.0 * inertia * mode.omega);
        } else {
            throw DomainError("libration dissipator supports dipole or quadrupole distributions");
        }
        const ThermalRates tr = thermal_rates(std::max(coefficient, 0.0), mode.omega,
                                              geometry.temperature);
        rates_per_mode.push_back(tr);
        max_rate = std::max(max_rate, tr.down);
    }
    check_mode_separation(modes, max_rate, options.separation_factor);
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const Matrix a = mode_operator(modes, k);
        spec.channels.push_back({rates_per_mode[k].down, a});
        spec.channels.push_back({rates_per_mode[k].up, a.adjoint()});
    }
    return spec;
}

DissipatorSpec build_rotation_dissipator(const rates::ChargeDistribution& dist, double omega_rot,
                                         const Vec3& r_cm, const greens::SurfaceGeometry& geometry,
                                         const RotationOptions& options) {
    if (omega_rot <= 0.0) throw DomainError("rotation dissipator requires omega_rot > 0");
    if (options.m_max < 1) throw DomainError("rotation dissipator requires m_max >= 1");
    const greens::KernelEvalMethod method = pick_method(geometry, options.method);
    const greens::ImageKernel kernel = greens::im_green_image_form(omega_rot, geometry, method);
    const Vec3 e1 = options.plane_e1.normalized();
    const Vec3 e2 = options.plane_e2.normalized();
    if (std::abs(e1.dot(e2)) > 1e-9)
        throw DomainError("rotation plane axes must be orthogonal");

    const int dim = 2 * options.m_max + 1;
    auto lower = [&](int steps) {
        Matrix u = Matrix::Zero(dim, dim);
        for (int m = -options.m_max; m <= options.m_max; ++m) {
            const int mp = m - steps;
            if (mp < -options.m_max) continue;
            u(mp + options.m_max, m + options.m_max) = 1.0;
        }
        return u;
    };

    double coefficient = 0.0;
    int steps = 1;
    if (const auto* dip = std::get_if<rates::PointDipole>(&dist)) {
        double h_sum = 0.0;
        for (const Vec3& eps : {e1, e2}) {
            const std::array<Vec3, 1> l{eps}, r{eps};
            h_sum += -greens::eval_image_kernel(kernel, r_cm, r_cm, l, r);
        }
        coefficient = dip->moment.squaredNorm() / (2.0 * hbar) * h_sum;
        steps = 1;
    } else if (const auto* quad = std::get_if<rates::PointQuadrupole>(&dist)) {
        // h_12 = -[(e1 - i e2).d]^2 [(e1 + i e2).d']^2 Im g, expanded into the
        // real 2+2 derivative combinations
        auto d22 = [&](const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
            const std::array<Vec3, 2> l{a, b}, r{c, d};
            return greens::eval_image_kernel(kernel, r_cm, r_cm, l, r);
        };
        const double aa = d22(e1, e1, e1, e1) - d22(e1, e1, e2, e2) - d22(e2, e2, e1, e1) +
                          d22(e2, e2, e2, e2);
        const double bb = 4.0 * d22(e1, e2, e1, e2);
        const double ab_minus_ba =
            2.0 * (d22(e1, e1, e1, e2) - d22(e2, e2, e1, e2)) -
            2.0 * (d22(e1, e2, e1, e1) - d22(e1, e2, e2, e2));
        const double h12_re = -(aa + bb);
        const double h12_im = -ab_minus_ba;
        if (std::abs(h12_im) > 1e-8 * std::max(std::abs(h12_re), 1e-300))
            throw DomainError("rotating quadrupole kernel h_12 has a non-real value");
        // body-frame axial tensor Q = Q33 [3 e3 (x) e3 - 1]/2: Q33 = e3.Q e3
        const double q33 = quad->tensor(2, 2);
        coefficient = q33 * q33 / (128.0 * hbar) * std::max(h12_re, 0.0);
        steps = 2;
    } else {
        throw DomainError("rotation dissipator supports dipole or quadrupole distributions");
    }

    const double n = materials::bose_occupation(omega_rot, geometry.temperature);
    DissipatorSpec spec;
    spec.notes.push_back("planar basis truncated at |m| = " + std::to_string(options.m_max) +
                         "; boundary rows drop out of the lowering operators");
    const Matrix down = lower(steps);
    spec.channels.push_back({coefficient * (n + 1.0), down});
    spec.channels.push_back({coefficient * n, down.adjoint()});
    return spec;
}

std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const Eigen::MatrixXcd* h0,
                                  const DissipatorSpec& dissipator, std::span<const double> t_grid,
                                  const EvolveOptions& options) {
    const Eigen::Index dim = rho0.rho.rows();
    if (rho0.rho.cols() != dim) throw DomainError("density matrix must be square");
    if (h0 && (h0->rows() != dim || h0->cols() != dim))
        throw DomainError("H0 dimension does not match the density matrix");
    for (const auto& ch : dissipator.channels) {
        if (ch.rate < 0.0) throw DomainError("channel rates must be non-negative");
        if (ch.jump.rows() != dim || ch.jump.cols() != dim)
            throw DomainError("jump operator dimension does not match the density matrix");
    }
    if (t_grid.empty()) return {};
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (t_grid[i] < t_grid[i - 1]) throw DomainError("t_grid must be non-decreasing");

    // drift K = -(i/hbar) H - (1/2) sum gamma L^+ L
    Matrix drift = Matrix::Zero(dim, dim);
    if (h0) drift -= std::complex<double>(0.0, 1.0 / hbar) * (*h0);
    std::vector<std::pair<double, Matrix>> jumps;
    for (const auto& ch : dissipator.channels) {
        if (ch.rate == 0.0) continue;
        drift -= 0.5 * ch.rate * (ch.jump.adjoint() * ch.jump);
        jumps.emplace_back(ch.rate, ch.jump);
    }

    auto rhs = [&](const Matrix& rho) {
        Matrix out = drift * rho + rho * drift.adjoint();
        for (const auto& [rate, jump] : jumps)
            out += rate * (jump * rho * jump.adjoint());
        return out;
    };

    // Dormand-Prince 5(4)
    static const double a21 = 1.0 / 5;
    static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
    static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static const double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                        e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                        e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

    std::vector<DensityMatrix> out;
    out.reserve(t_grid.size());
    Matrix rho = rho0.rho;
    double t = t_grid.front() >= 0.0 ? 0.0 : t_grid.front();
    const double t_end = t_grid.back();

    // characteristic rate sets the first trial step
    double rate_scale = drift.norm() / std::max<double>(static_cast<double>(dim), 1.0);
    for (const auto& [rate, jump] : jumps) rate_scale = std::max(rate_scale, rate);
    double h = (rate_scale > 0.0) ? 0.01 / rate_scale : (t_end > 0.0 ? 0.01 * t_end : 1.0);

    std::size_t next_output = 0;
    auto emit_outputs = [&](double t_now) {
        while (next_output < t_grid.size() && t_grid[next_output] <= t_now + 1e-300) {
            out.push_back({rho});
            ++next_output;
        }
    };
    if (jumps.empty() && !h0) {
        // free case: rho is constant
        for (std::size_t i = 0; i < t_grid.size(); ++i) out.push_back({rho});
        return out;
    }

    double steps = 0.0;
    emit_outputs(t);
    while (next_output < t_grid.size()) {
        const double t_target = t_grid[next_output];
        while (t < t_target) {
            if (steps++ > options.max_steps)
                throw IntegratorFailure("evolve exceeded the step budget");
            double dt = std::min(h, t_target - t);
            const Matrix k1 = rhs(rho);
            const Matrix k2 = rhs(rho + dt * (a21 * k1));
            const Matrix k3 = rhs(rho + dt * (a31 * k1 + a32 * k2));
            const Matrix k4 = rhs(rho + dt * (a41 * k1 + a42 * k2 + a43 * k3));
            const Matrix k5 = rhs(rho + dt * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
            const Matrix k6 = rhs(rho + dt * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
            const Matrix rho5 = rho + dt * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const Matrix k7 = rhs(rho5);
            const Matrix err_mat =
                dt * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double scale =
                options.abs_tol + options.rel_tol * rho.cwiseAbs().maxCoeff();
            const double err = err_mat.cwiseAbs().maxCoeff() / scale;
            if (err <= 1.0) {
                t += dt;
                rho = 0.5 * (rho5 + rho5.adjoint().eval());
            }
            const double grow = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
            h = dt * std::clamp(grow, 0.2, 5.0);
            if (h < 1e-16 * std::max(std::abs(t_end), 1e-300))
                throw IntegratorFailure("evolve step size underflow");
        }
        emit_outputs(t);
    }
    return out;
}

ImagePotential image_potential_monopole(double charge, const Vec3& r_eq, double mass,
                                        double omega0, const Vec3& direction) {
    const double z = r_eq.z();
    if (z <= 0.0) throw SiteBelowSurface("image potential requires the charge in vacuum (z > 0)");
    ImagePotential out;
    out.static_energy = -charge * charge * constants::coulomb / (4.0 * z);
    if (omega0 > 0.0 && mass > 0.0) {
        const double cz = direction.normalized().z();
        out.mode_shift = -charge * charge * constants::coulomb * hbar /
                         (2.0 * mass * omega0 * std::pow(2.0 * z, 3)) * (1.0 + cz * cz);
    }
    return out;
}

} // namespace surfnoise::lindblad
