// noise.hpp — Electric-field power spectral densities, distance-scaling fits,
// and monopole heating rates.
//
// S_EE follows the two-sided convention: the Fourier transform of
// the symmetrized field autocorrelation, units (V/m)^2 s.

#pragma once

#include <optional>

#include <Eigen/Dense>

#include "surfnoise/greens.hpp"

namespace surfnoise::noise {

struct PsdTensor {
    Eigen::Matrix3d tensor = Eigen::Matrix3d::Zero();  // (V/m)^2 s
    Vec3 position = Vec3::Zero();
    double omega = 0.0;
};

struct PsdOptions {
    // nullopt: closed_form for half-spaces, thin_layer_expansion for layered.
    std::optional<greens::KernelEvalMethod> method;
    // + 1/2 zero-point term at omega > 0; drop for purely thermal (classical)
    // comparisons.
    bool include_zero_point = true;
};

// Field PSD at r0. omega == 0 routes through the static kernel h (explicit
// crossover, never a silent limit); omega > 0 uses the resonant Im g form.
PsdTensor psd_E(const Vec3& r0, double omega, const greens::SurfaceGeometry& geometry,
                const PsdOptions& options = {});

// Log-log least-squares slope of trace S(d e3) over n_points log-spaced
// distances in [d_min, d_max]. Needs at least 4 points.
double fit_distance_exponent(const greens::SurfaceGeometry& geometry, double omega,
                             double d_min, double d_max, int n_points,
                             const PsdOptions& options = {});

struct HeatingResult {
    double rate = 0.0;      // quanta/s, exact resonant expression
    double rate_psd = 0.0;  // high-temperature PSD approximation
    double omega0 = 0.0;
    Vec3 direction = Vec3::UnitZ();
};

// Ground-state heating rate of an oscillating monopole: exact
// q^2 n(w0) h_0 / (m w0) plus the PSD approximation q^2 (e.S e)/(2 m hbar w0).
HeatingResult heating_rate_monopole(double charge, double mass, double omega0,
                                    const Vec3& direction, const Vec3& r_eq,
                                    const greens::SurfaceGeometry& geometry,
                                    const PsdOptions& options = {});

} // namespace surfnoise::noise
