// lindblad.hpp — Construction and time integration of finite-dimensional
// Lindblad master equations for the resonant limit: oscillating multipoles,
// librating and planar-rotating rotors, and the free dipolar rotor.

#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "surfnoise/angular.hpp"
#include "surfnoise/greens.hpp"
#include "surfnoise/rates.hpp"

namespace surfnoise::lindblad {

struct Channel {
    double rate = 0.0;        // 1/s, >= 0
    Eigen::MatrixXcd jump;    // dimensionless jump operator
};

struct DissipatorSpec {
    std::vector<Channel> channels;
    std::vector<std::string> notes;  // e.g. truncation flags

    int dimension() const { return channels.empty() ? 0 : static_cast<int>(channels.front().jump.rows()); }
};

// Appends the channels of a GKS block: sum_ij C_ij (A_i rho A_j^+ - ...).
// The coefficient matrix must be Hermitian positive semidefinite (checked to
// -tol * ||C||); it is diagonalized into at most ops.size() channels.
void append_gks_block(DissipatorSpec& spec, const Eigen::MatrixXcd& coefficients,
                      std::span<const Eigen::MatrixXcd> ops, double psd_tol = 1e-12);

struct DensityMatrix {
    Eigen::MatrixXcd rho;

    double trace_error() const;      // |tr rho - 1|
    double hermiticity_error() const;  // ||rho - rho^+||
    // throws DomainError when trace, hermiticity, or positivity fail
    void validate(double trace_tol = 1e-10, double herm_tol = 1e-12, double eig_tol = 1e-10) const;
};

struct BosonicModeSpec {
    double omega = 0.0;            // rad/s
    Vec3 direction = Vec3::UnitZ();
    int n_max = 10;                // Fock truncation (levels 0..n_max)
};

// --- free dipolar rotor -----------------------------------------------------

struct FreeRotorOptions {
    greens::KernelEvalMethod method = greens::KernelEvalMethod::thin_layer_expansion;
    bool include_excitation = true;   // thermal (n) sector on/off
    Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();  // columns: eps_1..3 in lab axes
};

// GKS dissipator (2 p^2/hbar) sum_l h_ij(w_l) over the
// lowering operators n_{l,i}, with (n+1) de-excitation and n excitation
// sectors; w_l = hbar (l+1) / I.
DissipatorSpec build_free_rotor_dissipator(double dipole, double inertia, const Vec3& r_cm,
                                           const greens::SurfaceGeometry& geometry, int l_max,
                                           double temperature, const FreeRotorOptions& options = {});

// kernel matrix h_ij(r_cm, omega) = -(eps_j . d)(eps_i . d') Im g
Eigen::Matrix3d resonant_kernel_matrix(const Vec3& r_cm, double omega,
                                       const greens::SurfaceGeometry& geometry,
                                       greens::KernelEvalMethod method,
                                       const Eigen::Matrix3d& frame = Eigen::Matrix3d::Identity());

// --- oscillating charge distributions ---------------------------------------

struct OscillatorOptions {
    std::optional<greens::KernelEvalMethod> method;
    double separation_factor = 10.0;  // min mode gap > factor * max damping rate
};

// Thermal dissipator of an oscillating monopole / dipole / quadrupole:
// per-mode channels a_k, a_k^+ with rates (coupling^2/(m w_k)) h_k {n+1, n}
// on the product of truncated number states. The distribution must be a
// Monopole, PointDipole, or PointQuadrupole (lab frame).
DissipatorSpec build_oscillator_dissipator(const rates::ChargeDistribution& dist, double mass,
                                           std::span<const BosonicModeSpec> modes,
                                           const Vec3& r_eq, const greens::SurfaceGeometry& geometry,
                                           const OscillatorOptions& options = {});

// Librating linear rotor (two modes orthogonal to the equilibrium axis):
// rates p^2 h_l/(I w_l) (dipole) or Q33^2 h_l/(4 I w_l) (quadrupole).
DissipatorSpec build_libration_dissipator(const rates::ChargeDistribution& dist, double inertia,
                                          std::span<const BosonicModeSpec> modes,
                                          const Vec3& eps_eq, const Vec3& r_cm,
                                          const greens::SurfaceGeometry& geometry,
                                          const OscillatorOptions& options = {});

// Planar rotor at constant rotation frequency; jump operators e^{-i alpha}
// (dipole) or e^{-2 i alpha} (quadrupole) on the m-basis of e^{i m alpha}.
struct RotationOptions {
    std::optional<greens::KernelEvalMethod> method;
    Vec3 plane_e1 = Vec3::UnitX();
    Vec3 plane_e2 = Vec3::UnitY();
    int m_max = 8;
};
DissipatorSpec build_rotation_dissipator(const rates::ChargeDistribution& dist, double omega_rot,
                                         const Vec3& r_cm, const greens::SurfaceGeometry& geometry,
                                         const RotationOptions& options = {});

// --- time evolution ---------------------------------------------------------

struct EvolveOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_steps = 5e7;
};

// Adaptive embedded Runge-Kutta 5(4) on d rho/dt = -(i/hbar)[H0, rho] + L rho.
// H0 in joules; pass nullptr to drop the coherent part. t_grid must be
// non-decreasing and start at >= 0; returns rho at each grid time.
std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const Eigen::MatrixXcd* h0,
                                  const DissipatorSpec& dissipator, std::span<const double> t_grid,
                                  const EvolveOptions& options = {});

// --- coherent image potential ------------------------------------------------

struct ImagePotential {
    double static_energy = 0.0;  // J, -(q^2/4 pi eps0)/(4 z)
    double mode_shift = 0.0;     // J per phonon of the a0^+ a0 term
};

// Perfect-mirror image potential of a monopole and the frequency shift of an
// oscillating mode along `direction`.
ImagePotential image_potential_monopole(double charge, const Vec3& r_eq, double mass,
                                        double omega0, const Vec3& direction);

// Truncated Fock-space ladder operator (levels 0..n_max).
Eigen::MatrixXcd annihilation_operator(int n_max);

} // namespace surfnoise::lindblad
