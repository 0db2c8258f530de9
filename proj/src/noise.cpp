#include "surfnoise/noise.hpp"

#include <cmath>
#include <vector>

#include "surfnoise/constants.hpp"
#include "surfnoise/errors.hpp"

namespace surfnoise::noise {

namespace {

greens::KernelEvalMethod pick_method(const greens::SurfaceGeometry& geometry,
                                     const PsdOptions& options) {
    if (options.method) return *options.method;
    return std::holds_alternative<greens::HalfSpace>(geometry.shape)
               ? greens::KernelEvalMethod::closed_form
               : greens::KernelEvalMethod::thin_layer_expansion;
}

// Mixed Hessian d/dr_i d/drp_j of the image kernel at coincident points.
Eigen::Matrix3d image_kernel_hessian(const greens::ImageKernel& kernel, const Vec3& r0) {
    Eigen::Matrix3d h;
    const std::array<Vec3, 3> axes{Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
    for (int i = 0; i < 3; ++i)
        for (int j = i; j < 3; ++j) {
            const std::array<Vec3, 1> left{axes[static_cast<std::size_t>(i)]};
            const std::array<Vec3, 1> right{axes[static_cast<std::size_t>(j)]};
            h(i, j) = greens::eval_image_kernel(kernel, r0, r0, left, right);
            h(j, i) = h(i, j);
        }
    return h;
}

} // namespace

PsdTensor psd_E(const Vec3& r0, double omega, const greens::SurfaceGeometry& geometry,
                const PsdOptions& options) {
    if (r0.z() <= 0.0) throw DomainError("psd_E requires the field point in vacuum (z > 0)");
    if (omega < 0.0) throw DomainError("psd_E requires omega >= 0");
    PsdTensor out;
    out.position = r0;
    out.omega = omega;
    if (omega == 0.0) {
        // static route: S = 2 hbar grad grad' h
        const greens::ImageKernel kernel = greens::kernel_h_image_form(geometry);
        out.tensor = 2.0 * constants::hbar * image_kernel_hessian(kernel, r0);
        return out;
    }
    const greens::ImageKernel kernel =
        greens::im_green_image_form(omega, geometry, pick_method(geometry, options));
    const double occupancy = materials::bose_occupation(omega, geometry.temperature) +
                             (options.include_zero_point ? 0.5 : 0.0);
    out.tensor = -2.0 * constants::hbar * occupancy * image_kernel_hessian(kernel, r0);
    return out;
}

double fit_distance_exponent(const greens::SurfaceGeometry& geometry, double omega,
                             double d_min, double d_max, int n_points,
                             const PsdOptions& options) {
    if (n_points < 4) throw RangeTooNarrow("fit_distance_exponent needs at least 4 points");
    if (d_min <= 0.0 || d_max <= d_min)
        throw DomainError("fit_distance_exponent requires 0 < d_min < d_max");
    std::vector<double> x(static_cast<std::size_t>(n_points)), y(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) {
        const double t = static_cast<double>(i) / (n_points - 1);
        const double d = d_min * std::pow(d_max / d_min, t);
        const PsdTensor s = psd_E(Vec3{0.0, 0.0, d}, omega, geometry, options);
        const double tr = s.tensor.trace();
        if (tr <= 0.0)
            throw DomainError("fit_distance_exponent requires a lossy geometry (trace S > 0)");
        x[static_cast<std::size_t>(i)] = std::log(d);
        y[static_cast<std::size_t>(i)] = std::log(tr);
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (int i = 0; i < n_points; ++i) {
        sx += x[static_cast<std::size_t>(i)];
        sy += y[static_cast<std::size_t>(i)];
        sxx += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        sxy += x[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
    }
    const double n = static_cast<double>(n_points);
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

HeatingResult heating_rate_monopole(double charge, double mass, double omega0,
                                    const Vec3& direction, const Vec3& r_eq,
                                    const greens::SurfaceGeometry& geometry,
                                    const PsdOptions& options) {
    if (omega0 <= 0.0) throw DomainError("heating_rate_monopole requires omega0 > 0");
    if (mass <= 0.0) throw DomainError("heating_rate_monopole requires mass > 0");
    HeatingResult out;
    out.omega0 = omega0;
    out.direction = direction.normalized();
    const Vec3 eps0 = out.direction;
    // resonant kernel h_0 = -(e.d)(e.d') Im g
    const double h0 = -greens::im_green_directional(
        r_eq, r_eq, omega0, geometry, pick_method(geometry, options),
        std::array<Vec3, 1>{eps0}, std::array<Vec3, 1>{eps0});
    const double n = materials::bose_occupation(omega0, geometry.temperature);
    out.rate = charge * charge * n * h0 / (mass * omega0);
    PsdOptions psd_options = options;
    const PsdTensor s = psd_E(r_eq, omega0, geometry, psd_options);
    out.rate_psd = charge * charge * eps0.dot(s.tensor * eps0) /
                   (2.0 * mass * constants::hbar * omega0);
    return out;
}

} // namespace surfnoise::noise
