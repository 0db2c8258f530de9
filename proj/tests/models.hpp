// models.hpp — Shared model fixtures for the test suites

#pragma once

#include "surfnoise/greens.hpp"
#include "surfnoise/materials.hpp"

namespace fixtures {

using namespace surfnoise;

// Weak low-frequency resonances plus one strong THz resonance
// (f_n = 2e-5, w_n = 10^{6+n}, g_n = 10^{8+n} for n = 1..4; f = 2, w = 1e13, g = 1e12).
inline materials::DrudeLorentzModel low_freq_band_model() {
    materials::DrudeLorentzModel m;
    for (int n = 1; n <= 4; ++n)
        m.resonances.push_back({2e-5, std::pow(10.0, 6 + n), std::pow(10.0, 8 + n)});
    m.resonances.push_back({2.0, 1e13, 1e12});
    return m;
}

inline materials::DrudeLorentzModel single_resonance_model() {
    return {{{2.0, 1e13, 1e12}}};
}

// lossless superconductor bulk (niobium-like numbers)
inline materials::Superconductor lossless_superconductor(double temperature = 0.1) {
    return {8.0e15, 0.0, 9.2, 2.0e-21, temperature};
}

// Two-ion crystal surface: 5 nm lossy layer on a lossless superconductor, 300 K.
inline greens::SurfaceGeometry ion_crystal_surface() {
    greens::Layered lay;
    lay.layer = low_freq_band_model();
    lay.thickness = 5e-9;
    lay.bulk = lossless_superconductor(4.0);
    return {lay, 300.0};
}

// Polar-molecule surface: 4 nm oxide layer (eps = 3(1+0.001i)) on a lossless
// superconductor at 100 mK.
inline greens::SurfaceGeometry molecule_surface() {
    greens::Layered lay;
    lay.layer = materials::TabulatedResponse::flat({3.0, 0.003}, 1e6, 1e14);
    lay.thickness = 4e-9;
    lay.bulk = lossless_superconductor(0.1);
    return {lay, 0.1};
}

inline greens::SurfaceGeometry gold_half_space(double temperature = 300.0) {
    return {greens::HalfSpace{materials::gold_drude()}, temperature};
}

inline greens::SurfaceGeometry vacuum_geometry() {
    return {greens::HalfSpace{materials::Vacuum{}}, 300.0};
}

} // namespace fixtures
