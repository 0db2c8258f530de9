// rates.hpp — Slow-particle decoherence rates for multipoles and point-charge
// bodies, the two-ion orientation scan, and Thomson-scattering decoherence.

#pragma once

#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "surfnoise/greens.hpp"

namespace surfnoise::rates {

struct Monopole {
    double charge = 0.0;  // C
};

struct PointDipole {
    Vec3 moment = Vec3::Zero();  // C m, body frame
};

// rho = div(Q grad) delta / 6 convention; tensor traceless symmetric.
struct PointQuadrupole {
    Eigen::Matrix3d tensor = Eigen::Matrix3d::Zero();  // C m^2, body frame
};

struct ChargeSite {
    double charge = 0.0;  // C
    Vec3 position = Vec3::Zero();  // body frame, m
};

struct PointCharges {
    std::vector<ChargeSite> sites;
};

using ChargeDistribution = std::variant<Monopole, PointDipole, PointQuadrupole, PointCharges>;

// z-y'-z'' Euler angles; beta in [0, pi]
struct EulerAngles {
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
};
Eigen::Matrix3d rotation_matrix(const EulerAngles& angles);

struct Pose {
    Vec3 position = Vec3::Zero();  // lab frame center, m
    EulerAngles orientation;
};

struct SuperpositionPair {
    Pose a;
    Pose b;
};

// Axial quadrupole Q33 [3 n (x) n - 1] / 2 about `axis`.
Eigen::Matrix3d axial_quadrupole(double q33, const Vec3& axis);

// Validates the quadrupole trace and point-charge list.
void validate(const ChargeDistribution& dist);

// Slow-particle decoherence rate between the two poses. Exactly zero for
// identical poses; multipoles use analytic kernel derivatives, point charges
// the signed double sum over kernel_h.
double decoherence_rate(const ChargeDistribution& dist, const SuperpositionPair& pair,
                        const greens::SurfaceGeometry& geometry);

// Orientational decoherence of a point quadrupole at fixed center of mass,
// (1/36 hbar) double-Hessian contraction of h.
double quadrupole_orientational_rate(const Eigen::Matrix3d& q_body, const EulerAngles& a,
                                     const EulerAngles& b, const Vec3& r_cm,
                                     const greens::SurfaceGeometry& geometry);

struct TwoIonScanParams {
    double charge = 0.0;        // per ion, C
    double ion_distance = 0.0;  // m
    double height = 0.0;        // center of mass above the surface, m
    double fixed_alpha = 0.0;
    double fixed_beta = 0.0;
    int n_alpha = 0;
    int n_beta = 0;
    int threads = 1;
};

struct TwoIonScanResult {
    std::vector<double> alpha;  // n_alpha values in [0, 2 pi)
    std::vector<double> beta;   // n_beta values in [0, pi]
    std::vector<double> rate;   // beta-major: rate[ib * n_alpha + ia], 1/s
    double max_rate = 0.0;
};

// Rotational decoherence of a two-ion crystal: superposition between the
// fixed orientation and every grid orientation of the ion axis.
TwoIonScanResult two_ion_scan(const TwoIonScanParams& params,
                              const greens::SurfaceGeometry& geometry);

// Great circles through the fixed orientation, for overlaying on the scan.
struct GreatCircle {
    std::vector<double> alpha;
    std::vector<double> beta;
};
std::vector<GreatCircle> great_circles(double fixed_alpha, double fixed_beta, int n_circles,
                                       int n_samples);

// Thomson saturation rate (q^2/4 pi eps0 c^3 m)^2 (8 pi / 9) (kB T / hbar)^3.
double thomson_gamma_infinity(double charge, double mass, double temperature);

// Thomson decoherence at finite superposition separation (spherical Bessel
// bracket integrated over the thermal photon spectrum).
double thomson_rate(double charge, double mass, double temperature, double separation);

} // namespace surfnoise::rates
