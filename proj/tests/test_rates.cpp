#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "surfnoise/constants.hpp"
#include "surfnoise/errors.hpp"
#include "surfnoise/noise.hpp"
#include "surfnoise/rates.hpp"

#include "models.hpp"
#include "oracles.hpp"

using namespace surfnoise;
using namespace surfnoise::rates;
namespace k = surfnoise::constants;
namespace mat = surfnoise::materials;
using greens::SurfaceGeometry;

namespace {

SuperpositionPair pair_at(const Vec3& ra, const Vec3& rb, const EulerAngles& oa = {},
                          const EulerAngles& ob = {}) {
    SuperpositionPair p;
    p.a = {ra, oa};
    p.b = {rb, ob};
    return p;
}

} // namespace

TEST_CASE("identical poses decohere at exactly zero rate") {
    const SurfaceGeometry geo = fixtures::gold_half_space();
    const Pose pose{Vec3{1e-5, 2e-5, 1e-4}, {0.3, 0.7, 1.1}};
    CHECK(decoherence_rate(Monopole{k::elementary_charge}, {pose, pose}, geo) == 0.0);
    CHECK(decoherence_rate(PointDipole{Vec3{0, 0, 1e-29}}, {pose, pose}, geo) == 0.0);
    PointCharges pc{{{1e-19, Vec3{0, 0, 1e-6}}, {-1e-19, Vec3{0, 0, -1e-6}}}};
    CHECK(decoherence_rate(pc, {pose, pose}, geo) == 0.0);
}

TEST_CASE("monopole above a Drude metal reproduces the beam-decoherence formula") {
    const SurfaceGeometry geo = fixtures::gold_half_space(300.0);
    const mat::DrudeMetal gold = mat::gold_drude();
    const double q = k::elementary_charge;
    const double d = 1e-4;
    const double sep = 3e-5;
    const auto pair = pair_at(Vec3{0, 0, d}, Vec3{sep, 0, d});
    const double gamma = decoherence_rate(Monopole{q}, pair, geo);
    const double image = std::sqrt(sep * sep + 4.0 * d * d);
    const double expected = q * q * k::k_boltzmann * 300.0 * k::coulomb /
                            (k::hbar * k::hbar) * (2.0 * gold.gamma / (gold.omega_p * gold.omega_p)) *
                            (1.0 / (2.0 * d) + 1.0 / (2.0 * d) - 2.0 / image);
    CHECK(gamma == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("orientational dipole decoherence") {
    const SurfaceGeometry geo = fixtures::ion_crystal_surface();
    const double d = 1e-4;
    const Vec3 r_cm{0.0, 0.0, d};
    const double p = 30.0 * k::debye;
    const PointDipole dip{p * Vec3::UnitZ()};
    const EulerAngles oa{0.0, 0.0, 0.0};        // dipole along the normal
    const EulerAngles ob{0.0, k::pi / 2, 0.0};  // dipole in plane
    const double gamma = decoherence_rate(dip, pair_at(r_cm, r_cm, oa, ob), geo);

    SUBCASE("matches Delta p . S(0) Delta p / 2 hbar^2") {
        const auto s = noise::psd_E(r_cm, 0.0, geo);
        const Vec3 dp = p * (Vec3::UnitZ() - Vec3::UnitX());
        const double expected = dp.dot(s.tensor * dp) / (2.0 * k::hbar * k::hbar);
        CHECK(gamma == doctest::Approx(expected).epsilon(1e-10));
    }
    SUBCASE("finite-dipole point-charge realization converges to it") {
        auto finite_dipole_rate = [&](double ell) {
            const double q = p / ell;
            PointCharges pc{{{q, 0.5 * ell * Vec3::UnitZ()}, {-q, -0.5 * ell * Vec3::UnitZ()}}};
            return decoherence_rate(pc, pair_at(r_cm, r_cm, oa, ob), geo);
        };
        const double fine = finite_dipole_rate(1e-3 * d);
        CHECK(fine == doctest::Approx(gamma).epsilon(0.005));
        // convergence order >= 1 in ell/d
        const double coarse = finite_dipole_rate(1e-2 * d);
        const double err_fine = std::abs(fine - gamma);
        const double err_coarse = std::abs(coarse - gamma);
        CHECK(err_coarse >= 5.0 * err_fine);
    }
}

TEST_CASE("orientational quadrupole decoherence") {
    const SurfaceGeometry geo = fixtures::ion_crystal_surface();
    const double d = 1e-4;
    const Vec3 r_cm{0.0, 0.0, d};
    const double q33 = 1e-40;  // C m^2
    const Eigen::Matrix3d q_body = axial_quadrupole(q33, Vec3::UnitZ());

    SUBCASE("equal orientations give zero") {
        CHECK(quadrupole_orientational_rate(q_body, {0.1, 0.2, 0.3}, {0.1, 0.2, 0.3}, r_cm, geo) ==
              0.0);
    }
    SUBCASE("flipping the symmetry axis leaves the rate at zero") {
        const EulerAngles oa{0.0, 0.6, 0.0};
        const EulerAngles ob{k::pi, k::pi - 0.6, 0.0};  // n3 -> -n3
        const double scale =
            quadrupole_orientational_rate(q_body, oa, {0.0, 0.6 + 0.5, 0.0}, r_cm, geo);
        const double gamma = quadrupole_orientational_rate(q_body, oa, ob, r_cm, geo);
        CHECK(std::abs(gamma) <= 1e-20 * scale);
    }
    SUBCASE("four-charge linear realization reproduces the point formula") {
        const EulerAngles oa{0.0, 0.0, 0.0};
        const EulerAngles ob{0.0, k::pi / 3, 0.0};
        const double point = quadrupole_orientational_rate(q_body, oa, ob, r_cm, geo);
        auto finite_rate = [&](double ell) {
            // +-q at +-ell n3, -+q at +-(ell/2) n3: q33 = 3 q ell^2
            const double q = q33 / (3.0 * ell * ell);
            PointCharges pc{{{q, ell * Vec3::UnitZ()},
                             {q, -ell * Vec3::UnitZ()},
                             {-q, 0.5 * ell * Vec3::UnitZ()},
                             {-q, -0.5 * ell * Vec3::UnitZ()}}};
            return decoherence_rate(pc, pair_at(r_cm, r_cm, oa, ob), geo);
        };
        const double fine = finite_rate(1e-3 * d);
        CHECK(fine == doctest::Approx(point).epsilon(0.01));
        // convergence order >= 1, measured above the double-sum cancellation floor
        const double err_mid = std::abs(finite_rate(0.03 * d) - point);
        const double err_coarse = std::abs(finite_rate(0.1 * d) - point);
        CHECK(err_coarse >= 3.0 * err_mid);
    }
}

TEST_CASE("two-ion crystal scan") {
    const SurfaceGeometry geo = fixtures::ion_crystal_surface();
    TwoIonScanParams params;
    params.charge = k::elementary_charge;
    params.ion_distance = 5e-6;
    params.height = 1e-4;
    params.fixed_alpha = 0.0;
    params.fixed_beta = k::pi / 2;  // axis parallel to the surface
    params.n_alpha = 36;
    params.n_beta = 19;

    SUBCASE("maximum rate reproduces the 3.7 kHz scale") {
        const auto result = two_ion_scan(params, geo);
        CHECK(result.max_rate == doctest::Approx(3.7e3).epsilon(0.10));
    }
    SUBCASE("grid point at the fixed orientation is exactly zero") {
        TwoIonScanParams p2 = params;
        p2.fixed_alpha = 2.0 * k::pi * 3 / p2.n_alpha;
        p2.fixed_beta = k::pi * 9 / (p2.n_beta - 1);
        const auto result = two_ion_scan(p2, geo);
        CHECK(result.rate[static_cast<std::size_t>(9 * p2.n_alpha + 3)] == 0.0);
    }
    SUBCASE("rate pattern is symmetric under flipping the varying axis") {
        const auto result = two_ion_scan(params, geo);
        // (alpha, beta) and (alpha + pi, pi - beta) describe the same crystal
        for (int jb = 0; jb < params.n_beta; ++jb)
            for (int ia = 0; ia < params.n_alpha; ++ia) {
                const int ia2 = (ia + params.n_alpha / 2) % params.n_alpha;
                const int jb2 = params.n_beta - 1 - jb;
                const double g1 = result.rate[static_cast<std::size_t>(jb * params.n_alpha + ia)];
                const double g2 = result.rate[static_cast<std::size_t>(jb2 * params.n_alpha + ia2)];
                CHECK(g1 == doctest::Approx(g2).epsilon(1e-9).scale(result.max_rate));
            }
    }
    SUBCASE("grid rates equal the generic point-charge rate evaluator") {
        const auto result = two_ion_scan(params, geo);
        PointCharges crystal{{{params.charge, 0.5 * params.ion_distance * Vec3::UnitZ()},
                              {params.charge, -0.5 * params.ion_distance * Vec3::UnitZ()}}};
        const Vec3 center{0.0, 0.0, params.height};
        for (int jb = 2; jb < params.n_beta; jb += 7)
            for (int ia = 1; ia < params.n_alpha; ia += 11) {
                SuperpositionPair pair;
                pair.a = {center, {params.fixed_alpha, params.fixed_beta, 0.0}};
                pair.b = {center,
                          {result.alpha[static_cast<std::size_t>(ia)],
                           result.beta[static_cast<std::size_t>(jb)], 0.0}};
                const double direct = decoherence_rate(crystal, pair, geo);
                const double scanned =
                    result.rate[static_cast<std::size_t>(jb * params.n_alpha + ia)];
                // the two evaluators sum the 16 kernel terms in different
                // orders; agreement is limited by the partial cancellation,
                // so compare on the scale of the scan maximum
                CHECK(scanned == doctest::Approx(direct).epsilon(1e-8).scale(result.max_rate));
            }
    }
    SUBCASE("threaded scan matches the serial one exactly") {
        const auto serial = two_ion_scan(params, geo);
        TwoIonScanParams p2 = params;
        p2.threads = 4;
        const auto parallel = two_ion_scan(p2, geo);
        for (std::size_t i = 0; i < serial.rate.size(); ++i)
            CHECK(serial.rate[i] == parallel.rate[i]);
    }
    SUBCASE("ions below the surface are rejected") {
        TwoIonScanParams bad = params;
        bad.height = 2e-6;
        CHECK_THROWS_AS((void)two_ion_scan(bad, geo), SiteBelowSurface);
    }
}

TEST_CASE("decoherence rates are non-negative over random scenarios") {
    std::mt19937 rng(2718);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const std::vector<SurfaceGeometry> geos = {
        fixtures::gold_half_space(), fixtures::ion_crystal_surface(),
        SurfaceGeometry{greens::HalfSpace{fixtures::low_freq_band_model()}, 77.0}};
    for (int i = 0; i < 500; ++i) {
        const auto& geo = geos[static_cast<std::size_t>(i) % geos.size()];
        const double d = 1e-5 * std::pow(10.0, 2.0 * uni(rng));
        const Vec3 ra{1e-4 * uni(rng), 1e-4 * uni(rng), d};
        const Vec3 rb{1e-4 * uni(rng), 1e-4 * uni(rng), d * (0.5 + uni(rng))};
        const EulerAngles oa{2 * k::pi * uni(rng), k::pi * uni(rng), 2 * k::pi * uni(rng)};
        const EulerAngles ob{2 * k::pi * uni(rng), k::pi * uni(rng), 2 * k::pi * uni(rng)};
        double gamma = 0.0;
        switch (i % 3) {
            case 0:
                gamma = decoherence_rate(Monopole{k::elementary_charge * (1 + 3 * uni(rng))},
                                         pair_at(ra, rb, oa, ob), geo);
                break;
            case 1:
                gamma = decoherence_rate(PointDipole{1e-29 * Vec3{uni(rng), uni(rng), uni(rng)}},
                                         pair_at(ra, rb, oa, ob), geo);
                break;
            default:
                gamma = decoherence_rate(
                    PointCharges{{{1e-19, Vec3{0, 0, 0.2 * d}}, {-2e-19, Vec3{0.1 * d, 0, 0}}}},
                    pair_at(ra, rb, oa, ob), geo);
                break;
        }
        CHECK(gamma >= -1e-12 * std::abs(gamma));
    }
}

TEST_CASE("monopole decoherence saturates at large lateral separation") {
    const SurfaceGeometry geo = fixtures::gold_half_space();
    const double q = k::elementary_charge;
    const double d = 1e-4;
    double prev = 0.0;
    for (double s : {1e-5, 1e-4, 1e-3, 1e-2, 1e-1}) {
        const double g = decoherence_rate(Monopole{q}, pair_at(Vec3{0, 0, d}, Vec3{s, 0, d}), geo);
        CHECK(g >= prev);
        prev = g;
    }
    const double g4 = decoherence_rate(Monopole{q}, pair_at(Vec3{0, 0, d}, Vec3{1e4 * d, 0, d}), geo);
    const double g6 = decoherence_rate(Monopole{q}, pair_at(Vec3{0, 0, d}, Vec3{1e6 * d, 0, d}), geo);
    CHECK(g4 / g6 >= 0.99);
    CHECK(g4 / g6 <= 1.01);
}

TEST_CASE("thomson scattering") {
    const double q = k::elementary_charge;
    const double me = 9.1093837015e-31;
    SUBCASE("electron saturation rate at room temperature") {
        const double g = thomson_gamma_infinity(q, me, 300.0);
        CHECK(g == doctest::Approx(1.5e-5).epsilon(0.05));
    }
    SUBCASE("zero temperature and cubic scaling") {
        CHECK(thomson_gamma_infinity(q, me, 0.0) == 0.0);
        CHECK(thomson_gamma_infinity(q, me, 600.0) / thomson_gamma_infinity(q, me, 300.0) ==
              doctest::Approx(8.0).epsilon(1e-12));
    }
    SUBCASE("rate vanishes at zero separation") { CHECK(thomson_rate(q, me, 300.0, 0.0) == 0.0); }
    SUBCASE("rate saturates at large separation") {
        const double lam_th = 2.0 * k::pi * k::hbar * k::c_light / (k::k_boltzmann * 300.0);
        const double g = thomson_rate(q, me, 300.0, 100.0 * lam_th);
        const double g_inf = thomson_gamma_infinity(q, me, 300.0);
        CHECK(g == doctest::Approx(g_inf).epsilon(0.01));
    }
    SUBCASE("mid-curve value pinned against an independent quadrature") {
        // frozen from a scipy.integrate.quad evaluation of the same integral
        CHECK(thomson_rate(q, me, 300.0, 1e-5) == doctest::Approx(9.916146067e-06).epsilon(1e-6));
        CHECK(thomson_rate(q, me, 300.0, 1e-6) == doctest::Approx(6.325619888e-07).epsilon(1e-6));
    }
    SUBCASE("monotone growth towards saturation") {
        const double lam_th = 2.0 * k::pi * k::hbar * k::c_light / (k::k_boltzmann * 300.0);
        double prev = 0.0;
        for (double f : {0.01, 0.1, 1.0, 10.0}) {
            const double g = thomson_rate(q, me, 300.0, f * lam_th);
            CHECK(g > prev);
            prev = g;
        }
    }
    SUBCASE("negligible against the monopole saturation rate at 1 mm above gold") {
        const SurfaceGeometry geo = fixtures::gold_half_space(300.0);
        const double d = 1e-3;
        const double g_sat = decoherence_rate(Monopole{q},
                                              pair_at(Vec3{0, 0, d}, Vec3{1e4 * d, 0, d}), geo);
        CHECK(thomson_gamma_infinity(q, me, 300.0) < 1e-4 * g_sat);
    }
}

TEST_CASE("distribution validation") {
    Eigen::Matrix3d traceful = Eigen::Matrix3d::Identity();
    CHECK_THROWS_AS((void)validate(ChargeDistribution{PointQuadrupole{traceful}}), DomainError);
    CHECK_THROWS_AS((void)validate(ChargeDistribution{PointCharges{}}), DomainError);
    CHECK_NOTHROW(validate(ChargeDistribution{PointQuadrupole{axial_quadrupole(1e-40, Vec3::UnitZ())}}));
}

TEST_CASE("charge sites below the surface are rejected") {
    const SurfaceGeometry geo = fixtures::gold_half_space();
    const auto pair = pair_at(Vec3{0, 0, -1e-6}, Vec3{0, 0, 1e-6});
    CHECK_THROWS_AS((void)decoherence_rate(Monopole{1e-19}, pair, geo), SiteBelowSurface);
}
