// greens.hpp — Quasistatic scalar Green functions for planar half-space and
// layered geometries, their imaginary parts, the static surface-fluctuation
// kernel h(r,r'), and analytic directional derivatives of the image kernels.
//
// Coordinates: surface plane at z = 0, vacuum at z > 0, outward normal e3.

#pragma once

#include <array>
#include <complex>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "surfnoise/materials.hpp"
#include "surfnoise/quadrature.hpp"

namespace surfnoise {
using Vec3 = Eigen::Vector3d;
}

namespace surfnoise::greens {

struct HalfSpace {
    materials::DielectricModel bulk;
};

struct Layered {
    materials::DielectricModel layer;
    double thickness = 0.0;  // d_s, m
    materials::DielectricModel bulk;
};

struct SurfaceGeometry {
    std::variant<HalfSpace, Layered> shape;
    double temperature = 0.0;  // K
};

enum class KernelEvalMethod {
    closed_form,           // homogeneous half-space image formula
    thin_layer_expansion,  // first order in k d_s (layered, z >> d_s)
    full_bessel_integral,  // semi-infinite J0 k-integral (layered)
    mirror_limit,          // |eps_b| >> |eps_s|: bulk acts as a mirror
};

inline Vec3 mirror(const Vec3& v) { return {v.x(), v.y(), -v.z()}; }
Eigen::Matrix3d mirror_tensor();  // M = 1 - 2 e3 (x) e3

// Mixed directional derivative of 1/|u| along the (constant) directions in
// `dirs`, any order 0..8.
double inv_distance_derivative(const Vec3& u, std::span<const Vec3> dirs);

// Image-kernel closed form: f(r,r') = k4pe * [c0 / |u| + c1 * (e3 . d/dr)(1/|u|)]
// with u = r - M r'. Both Im g (at fixed omega) and h take this shape.
struct ImageKernel {
    double direct = 0.0;  // c0
    double deriv = 0.0;   // c1 (carries the layer thickness)
};

double eval_image_kernel(const ImageKernel& kernel, const Vec3& r, const Vec3& rp,
                         std::span<const Vec3> left = {}, std::span<const Vec3> right = {});

// --- Green functions ------------------------------------------------------

// Half-space Green function, all four region pairings.
std::complex<double> green_halfspace(const Vec3& r, const Vec3& rp, double omega,
                                     const materials::DielectricModel& bulk);

// Appendix-style layer coefficients c1..c10 at wavenumber k.
struct LayerCoefficients {
    std::array<std::complex<double>, 10> c;  // c[0] = c1, ..., c[9] = c10
};
LayerCoefficients layer_coefficients(double k, double omega, const Layered& geom);

// Full layered Green function for arbitrary region placement (nine cases).
std::complex<double> green_layered_full(const Vec3& r, const Vec3& rp, double omega,
                                        const Layered& geom,
                                        const quad::Options& quad_opts = {});

// Im g for both points in vacuum via the semi-infinite Bessel integral.
double im_green_layered_integral(const Vec3& r, const Vec3& rp, double omega,
                                 const Layered& geom,
                                 const quad::Options& quad_opts = {});

// Im g dispatching on the evaluation method; points must be in vacuum.
double im_green(const Vec3& r, const Vec3& rp, double omega,
                const SurfaceGeometry& geometry, KernelEvalMethod method);

// Closed-form Im g coefficients at omega for the requested method
// (everything except full_bessel_integral). Throws MethodInvalid when the
// method does not apply to the geometry or its validity check fails.
ImageKernel im_green_image_form(double omega, const SurfaceGeometry& geometry,
                                KernelEvalMethod method,
                                double mirror_contrast_min = 50.0);

// Mixed directional derivatives of Im g (left on r, right on rp) for the
// closed-form methods.
double im_green_directional(const Vec3& r, const Vec3& rp, double omega,
                            const SurfaceGeometry& geometry, KernelEvalMethod method,
                            std::span<const Vec3> left, std::span<const Vec3> right);

// --- Static surface-fluctuation kernel -------------------------------------

// h(r,r') = -lim_{w->0} n(w) Im g(r,r',w); closed forms per model family,
// Richardson extrapolation for tabulated data (appends a warning).
double kernel_h(const Vec3& r, const Vec3& rp, const SurfaceGeometry& geometry,
                std::vector<std::string>* warnings = nullptr);

// Mixed directional derivatives of h; at most two directions per argument.
double kernel_h_directional(const Vec3& r, const Vec3& rp, const SurfaceGeometry& geometry,
                            std::span<const Vec3> left, std::span<const Vec3> right,
                            std::vector<std::string>* warnings = nullptr);

// Closed-form coefficients of h for this geometry.
ImageKernel kernel_h_image_form(const SurfaceGeometry& geometry,
                                std::vector<std::string>* warnings = nullptr);

// Static thermal weights entering the kernel closed forms:
//   image weight  a_h = -lim n(w) Im[(1-eps_b)/(1+eps_b)]          (>= 0)
//   layer weight  b_h =  lim n(w) Im[(eps_s^2-eps_b^2)/(eps_s (eps_b+1)^2)]
double static_image_weight(const materials::DielectricModel& bulk, double temperature,
                           std::vector<std::string>* warnings = nullptr);
double static_layer_weight(const materials::DielectricModel& layer,
                           const materials::DielectricModel& bulk, double temperature,
                           std::vector<std::string>* warnings = nullptr);

} // namespace surfnoise::greens
