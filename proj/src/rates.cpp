#include "surfnoise/rates.hpp"

#include <cmath>
#include <thread>

#include "surfnoise/constants.hpp"
#include "surfnoise/errors.hpp"

namespace surfnoise::rates {

namespace {

constexpr double hbar = constants::hbar;

struct SignedSite {
    double weight = 0.0;  // +-charge, C
    Vec3 position = Vec3::Zero();
};

double kernel_between(const greens::ImageKernel& kernel, const Vec3& a, const Vec3& b) {
    return greens::eval_image_kernel(kernel, a, b);
}

// (1/36) (d . P d)(d' . S d') h via eigendecompositions of the two tensors.
double quadrupole_contraction(const greens::ImageKernel& kernel, const Vec3& r, const Vec3& rp,
                              const Eigen::Matrix3d& p, const Eigen::Matrix3d& s) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> ep(p), es(s);
    double total = 0.0;
    for (int a = 0; a < 3; ++a) {
        const double la = ep.eigenvalues()[a];
        if (la == 0.0) continue;
        const Vec3 va = ep.eigenvectors().col(a);
        for (int b = 0; b < 3; ++b) {
            const double lb = es.eigenvalues()[b];
            if (lb == 0.0) continue;
            const Vec3 vb = es.eigenvectors().col(b);
            const std::array<Vec3, 2> left{va, va};
            const std::array<Vec3, 2> right{vb, vb};
            total += la * lb * greens::eval_image_kernel(kernel, r, rp, left, right);
        }
    }
    return total / 36.0;
}

double dipole_contraction(const greens::ImageKernel& kernel, const Vec3& r, const Vec3& rp,
                          const Vec3& pl, const Vec3& pr) {
    const std::array<Vec3, 1> left{pl};
    const std::array<Vec3, 1> right{pr};
    return greens::eval_image_kernel(kernel, r, rp, left, right);
}

bool same_pose(const Pose& a, const Pose& b) {
    return a.position == b.position && a.orientation.alpha == b.orientation.alpha &&
           a.orientation.beta == b.orientation.beta && a.orientation.gamma == b.orientation.gamma;
}

void require_above_surface(const Vec3& site) {
    if (site.z() <= 0.0)
        throw SiteBelowSurface("charge site is not in the vacuum half-space (z > 0)");
}

} // namespace

Eigen::Matrix3d rotation_matrix(const EulerAngles& angles) {
    const Eigen::AngleAxisd rz1(angles.alpha, Vec3::UnitZ());
    const Eigen::AngleAxisd ry(angles.beta, Vec3::UnitY());
    const Eigen::AngleAxisd rz2(angles.gamma, Vec3::UnitZ());
    return (rz1 * ry * rz2).toRotationMatrix();
}

Eigen::Matrix3d axial_quadrupole(double q33, const Vec3& axis) {
    const Vec3 n = axis.normalized();
    return q33 * (3.0 * n * n.transpose() - Eigen::Matrix3d::Identity()) / 2.0;
}

void validate(const ChargeDistribution& dist) {
    if (const auto* q = std::get_if<PointQuadrupole>(&dist)) {
        const double tr = std::abs(q->tensor.trace());
        const double norm = q->tensor.norm();
        if (norm > 0.0 && tr > 1e-12 * norm)
            throw DomainError("point quadrupole tensor must be traceless");
        if ((q->tensor - q->tensor.transpose()).norm() > 1e-12 * std::max(norm, 1.0))
            throw DomainError("point quadrupole tensor must be symmetric");
    } else if (const auto* pc = std::get_if<PointCharges>(&dist)) {
        if (pc->sites.empty()) throw DomainError("point-charge list must be non-empty");
    }
}

double decoherence_rate(const ChargeDistribution& dist, const SuperpositionPair& pair,
                        const greens::SurfaceGeometry& geometry) {
    validate(dist);
    if (same_pose(pair.a, pair.b)) return 0.0;

    const greens::ImageKernel kernel = greens::kernel_h_image_form(geometry);
    const Vec3& ra = pair.a.position;
    const Vec3& rb = pair.b.position;

    if (const auto* mono = std::get_if<Monopole>(&dist)) {
        require_above_surface(ra);
        require_above_surface(rb);
        const double q2 = mono->charge * mono->charge;
        return q2 / hbar *
               (kernel_between(kernel, ra, ra) + kernel_between(kernel, rb, rb) -
                2.0 * kernel_between(kernel, ra, rb));
    }
    if (const auto* dip = std::get_if<PointDipole>(&dist)) {
        require_above_surface(ra);
        require_above_surface(rb);
        const Vec3 pa = rotation_matrix(pair.a.orientation) * dip->moment;
        const Vec3 pb = rotation_matrix(pair.b.orientation) * dip->moment;
        return (dipole_contraction(kernel, ra, ra, pa, pa) +
                dipole_contraction(kernel, rb, rb, pb, pb) -
                2.0 * dipole_contraction(kernel, ra, rb, pa, pb)) /
               hbar;
    }
    if (const auto* quad = std::get_if<PointQuadrupole>(&dist)) {
        require_above_surface(ra);
        require_above_surface(rb);
        const Eigen::Matrix3d rota = rotation_matrix(pair.a.orientation);
        const Eigen::Matrix3d rotb = rotation_matrix(pair.b.orientation);
        const Eigen::Matrix3d qa = rota * quad->tensor * rota.transpose();
        const Eigen::Matrix3d qb = rotb * quad->tensor * rotb.transpose();
        return (quadrupole_contraction(kernel, ra, ra, qa, qa) +
                quadrupole_contraction(kernel, rb, rb, qb, qb) -
                2.0 * quadrupole_contraction(kernel, ra, rb, qa, qb)) /
               hbar;
    }
    const auto& pc = std::get<PointCharges>(dist);
    std::vector<SignedSite> sites;
    sites.reserve(2 * pc.sites.size());
    const Eigen::Matrix3d rota = rotation_matrix(pair.a.orientation);
    const Eigen::Matrix3d rotb = rotation_matrix(pair.b.orientation);
    for (const auto& s : pc.sites) {
        sites.push_back({s.charge, ra + rota * s.position});
        sites.push_back({-s.charge, rb + rotb * s.position});
    }
    for (const auto& s : sites) require_above_surface(s.position);
    double total = 0.0;
    for (const auto& s1 : sites)
        for (const auto& s2 : sites)
            total += s1.weight * s2.weight * kernel_between(kernel, s1.position, s2.position);
    return total / hbar;
}

double quadrupole_orientational_rate(const Eigen::Matrix3d& q_body, const EulerAngles& a,
                                     const EulerAngles& b, const Vec3& r_cm,
                                     const greens::SurfaceGeometry& geometry) {
    require_above_surface(r_cm);
    if (a.alpha == b.alpha && a.beta == b.beta && a.gamma == b.gamma) return 0.0;
    const Eigen::Matrix3d rota = rotation_matrix(a);
    const Eigen::Matrix3d rotb = rotation_matrix(b);
    const Eigen::Matrix3d dq =
        rota * q_body * rota.transpose() - rotb * q_body * rotb.transpose();
    if (dq.norm() == 0.0) return 0.0;
    const greens::ImageKernel kernel = greens::kernel_h_image_form(geometry);
    return quadrupole_contraction(kernel, r_cm, r_cm, dq, dq) / hbar;
}

TwoIonScanResult two_ion_scan(const TwoIonScanParams& params,
                              const greens::SurfaceGeometry& geometry) {
    if (params.n_alpha < 1 || params.n_beta < 2)
        throw DomainError("two_ion_scan requires n_alpha >= 1 and n_beta >= 2");
    if (params.height <= params.ion_distance / 2.0)
        throw SiteBelowSurface("two_ion_scan requires height > ion_distance / 2");

    const greens::ImageKernel kernel = greens::kernel_h_image_form(geometry);
    const Vec3 center{0.0, 0.0, params.height};
    const double half = params.ion_distance / 2.0;

    auto axis = [](double alpha, double beta) {
        return Vec3{std::cos(alpha) * std::sin(beta), std::sin(alpha) * std::sin(beta),
                    std::cos(beta)};
    };
    const Vec3 fixed_axis = axis(params.fixed_alpha, params.fixed_beta);
    const std::array<Vec3, 2> fixed_sites{center + half * fixed_axis, center - half * fixed_axis};

    TwoIonScanResult result;
    result.alpha.resize(static_cast<std::size_t>(params.n_alpha));
    result.beta.resize(static_cast<std::size_t>(params.n_beta));
    for (int i = 0; i < params.n_alpha; ++i)
        result.alpha[static_cast<std::size_t>(i)] = 2.0 * constants::pi * i / params.n_alpha;
    for (int j = 0; j < params.n_beta; ++j)
        result.beta[static_cast<std::size_t>(j)] = constants::pi * j / (params.n_beta - 1);
    result.rate.assign(static_cast<std::size_t>(params.n_alpha * params.n_beta), 0.0);

    const double q2_over_hbar = params.charge * params.charge / hbar;
    auto rate_at = [&](double alpha, double beta) {
        const Vec3 n3 = axis(alpha, beta);
        if (n3 == fixed_axis) return 0.0;
        const std::array<Vec3, 2> var_sites{center + half * n3, center - half * n3};
        std::array<std::pair<Vec3, double>, 4> sites{
            std::pair{fixed_sites[0], 1.0}, std::pair{fixed_sites[1], 1.0},
            std::pair{var_sites[0], -1.0}, std::pair{var_sites[1], -1.0}};
        double total = 0.0;
        for (const auto& [p1, s1] : sites)
            for (const auto& [p2, s2] : sites)
                total += s1 * s2 * kernel_between(kernel, p1, p2);
        return q2_over_hbar * total;
    };

    auto worker = [&](int j_begin, int j_end) {
        for (int j = j_begin; j < j_end; ++j)
            for (int i = 0; i < params.n_alpha; ++i)
                result.rate[static_cast<std::size_t>(j * params.n_alpha + i)] =
                    rate_at(result.alpha[static_cast<std::size_t>(i)],
                            result.beta[static_cast<std::size_t>(j)]);
    };

    const int threads = std::max(1, params.threads);
    if (threads == 1) {
        worker(0, params.n_beta);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (params.n_beta + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            const int begin = t * chunk;
            const int end = std::min(params.n_beta, begin + chunk);
            if (begin < end) pool.emplace_back(worker, begin, end);
        }
        for (auto& th : pool) th.join();
    }

    result.max_rate = 0.0;
    for (double g : result.rate) result.max_rate = std::max(result.max_rate, g);
    return result;
}

std::vector<GreatCircle> great_circles(double fixed_alpha, double fixed_beta, int n_circles,
                                       int n_samples) {
    if (n_circles < 1 || n_samples < 2)
        throw DomainError("great_circles requires n_circles >= 1 and n_samples >= 2");
    const Vec3 n0{std::cos(fixed_alpha) * std::sin(fixed_beta),
                  std::sin(fixed_alpha) * std::sin(fixed_beta), std::cos(fixed_beta)};
    // tangent frame at n0
    Vec3 t1 = n0.cross(Vec3::UnitZ());
    if (t1.norm() < 1e-12) t1 = n0.cross(Vec3::UnitX());
    t1.normalize();
    const Vec3 t2 = n0.cross(t1).normalized();
    std::vector<GreatCircle> circles;
    for (int c = 0; c < n_circles; ++c) {
        const double phi = constants::pi * c / n_circles;
        const Vec3 t = std::cos(phi) * t1 + std::sin(phi) * t2;
        GreatCircle gc;
        for (int s = 0; s < n_samples; ++s) {
            const double u = 2.0 * constants::pi * s / (n_samples - 1);
            const Vec3 p = std::cos(u) * n0 + std::sin(u) * t;
            gc.alpha.push_back(std::atan2(p.y(), p.x()));
            gc.beta.push_back(std::acos(std::clamp(p.z(), -1.0, 1.0)));
        }
        circles.push_back(std::move(gc));
    }
    return circles;
}

double thomson_gamma_infinity(double charge, double mass, double temperature) {
    if (temperature < 0.0) throw DomainError("thomson_gamma_infinity requires T >= 0");
    if (temperature == 0.0) return 0.0;
    const double pref = charge * charge * constants::coulomb /
                        (constants::c_light * constants::c_light * constants::c_light * mass);
    const double kt = constants::k_boltzmann * temperature / hbar;
    return pref * pref * (8.0 * constants::pi / 9.0) * kt * kt * kt;
}

namespace {

// 4/3 - 2[(j0 - j1/x)^2 + 2 (j1/x)^2]
double thomson_bracket(double x) {
    if (x < 1e-4) return (4.0 / 9.0) * x * x;  // small-x limit, keeps 0 at 0
    const double s = std::sin(x), c = std::cos(x);
    const double j0 = s / x;
    const double j1_over_x = (s / x - c) / (x * x);
    const double t = j0 - j1_over_x;
    return 4.0 / 3.0 - 2.0 * (t * t + 2.0 * j1_over_x * j1_over_x);
}

} // namespace

double thomson_rate(double charge, double mass, double temperature, double separation) {
    if (separation < 0.0) throw DomainError("thomson_rate requires separation >= 0");
    if (separation == 0.0 || temperature == 0.0) return 0.0;
    const double lam = hbar * constants::c_light / (constants::k_boltzmann * temperature);
    const double xi = separation / lam;  // x = u * xi
    if (xi > 1e6) return thomson_gamma_infinity(charge, mass, temperature);

    const double u_max = 45.0;
    auto weight = [](double u) {
        // u^2 e^u / (e^u - 1)^2, guarded for small and large u
        if (u < 1e-6) return 1.0;
        if (u > 500.0) return 0.0;
        const double em = std::expm1(u);
        return u * u * (em + 1.0) / (em * em);
    };
    auto integrand = [&](double u) { return weight(u) * thomson_bracket(u * xi); };

    const int panels = std::clamp(static_cast<int>(u_max * xi / constants::pi) + 1, 64, 40000);
    double integral = 0.0;
    const double du = u_max / panels;
    for (int p = 0; p < panels; ++p) {
        const auto r = quad::integrate(integrand, p * du, (p + 1) * du,
                                       {1e-9, 0.0, 16});
        integral += r.value;
    }
    const double pref = charge * charge * constants::coulomb /
                        (constants::c_light * constants::c_light * mass);
    return pref * pref * (2.0 * constants::c_light / constants::pi) * integral /
           (lam * lam * lam);
}

} // namespace surfnoise::rates
