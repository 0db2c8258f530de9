#include "surfnoise/greens.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "surfnoise/constants.hpp"
#include "surfnoise/errors.hpp"

namespace surfnoise::greens {

namespace {

namespace mat = surfnoise::materials;
using Complex = std::complex<double>;

constexpr double k4pe = constants::coulomb;

double double_factorial_odd(int m) {
    // (2m-1)!! with (-1)!! = 1
    double v = 1.0;
    for (int i = 2 * m - 1; i > 1; i -= 2) v *= i;
    return v;
}

// Sum over pairings: D_{a1..an}(1/u) =
//   sum_p (-1)^(n-p) (2(n-p)-1)!! u^-(2(n-p)+1)
//         sum_{p-pairings} prod(ai.aj) prod(ak.u)
struct PairingAccumulator {
    const Vec3* dirs;
    const Vec3* u;
    int n;
    double total = 0.0;

    void run() {
        std::vector<int> idx(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) idx[static_cast<std::size_t>(i)] = i;
        recurse(idx, 1.0, 0, 1.0);
    }

    void recurse(std::vector<int>& rest, double pair_prod, int pairs, double single_prod) {
        if (rest.empty()) {
            const int m = n - pairs;  // derivative order left on 1/u
            const double unorm = u->norm();
            const double sign = ((n - pairs) % 2 == 0) ? 1.0 : -1.0;
            total += sign * double_factorial_odd(m) * pair_prod * single_prod /
                     std::pow(unorm, 2 * m + 1);
            return;
        }
        const int i = rest.front();
        std::vector<int> rem(rest.begin() + 1, rest.end());
        // i stays unpaired
        recurse(rem, pair_prod, pairs, single_prod * dirs[i].dot(*u));
        // i pairs with j
        for (std::size_t jj = 0; jj < rem.size(); ++jj) {
            const int j = rem[jj];
            std::vector<int> rem2 = rem;
            rem2.erase(rem2.begin() + static_cast<long>(jj));
            recurse(rem2, pair_prod * dirs[i].dot(dirs[j]), pairs + 1, single_prod);
        }
    }
};

struct Xi {
    Complex b;  // (eps_s - eps_b)/(eps_s + eps_b)
    Complex v;  // (eps_s - 1)/(eps_s + 1)
    Complex eps_s;
    Complex eps_b;
};

Xi xi_coefficients(double omega, const Layered& geom) {
    const Complex es = mat::eval_permittivity(geom.layer, omega);
    const Complex eb = mat::eval_permittivity(geom.bulk, omega);
    return {(es - eb) / (es + eb), (es - 1.0) / (es + 1.0), es, eb};
}

double lateral_distance(const Vec3& r, const Vec3& rp) {
    const double dx = r.x() - rp.x();
    const double dy = r.y() - rp.y();
    return std::hypot(dx, dy);
}

void require_vacuum_points(const Vec3& r, const Vec3& rp, const char* who) {
    if (r.z() <= 0.0 || rp.z() <= 0.0)
        throw MethodInvalid(std::string(who) + " requires both points in vacuum (z > 0)");
}

// --- static thermal limits -------------------------------------------------

double kbt_over_hbar(double temperature) {
    return constants::k_boltzmann * temperature / constants::hbar;
}

bool uses_tabulated(const mat::DielectricModel& m) {
    return std::holds_alternative<mat::TabulatedResponse>(m);
}

// Polynomial extrapolation of F to omega -> 0 through the three lowest
// admissible tabulated frequencies.
double richardson_limit(const std::function<double(double)>& f,
                        const std::vector<const mat::TabulatedResponse*>& tabs,
                        double temperature, std::vector<std::string>* warnings) {
    double lo = 0.0, hi = std::numeric_limits<double>::infinity();
    std::vector<double> pts;
    for (const auto* t : tabs) {
        lo = std::max(lo, t->omega.front());
        hi = std::min(hi, t->omega.back());
        for (double w : t->omega) pts.push_back(w);
    }
    const double classical = 0.1 * constants::k_boltzmann * temperature / constants::hbar;
    if (lo > classical)
        throw UnsupportedStaticLimit(
            "tabulated response does not reach low enough frequencies for the static kernel limit");
    std::sort(pts.begin(), pts.end());
    pts.erase(std::remove_if(pts.begin(), pts.end(),
                             [&](double w) { return w < lo || w > std::min(hi, classical); }),
              pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    while (pts.size() < 3) pts.push_back(lo * std::pow(2.0, static_cast<double>(pts.size() + 1)));
    pts.resize(3);
    if (warnings)
        warnings->push_back("static kernel limit for tabulated response extrapolated from the "
                            "three lowest admissible frequencies");
    // Lagrange extrapolation to omega = 0
    double val = 0.0;
    for (int i = 0; i < 3; ++i) {
        double term = f(pts[static_cast<std::size_t>(i)]);
        for (int j = 0; j < 3; ++j) {
            if (i == j) continue;
            term *= -pts[static_cast<std::size_t>(j)] /
                    (pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(j)]);
        }
        val += term;
    }
    return val;
}

} // namespace

Eigen::Matrix3d mirror_tensor() {
    Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
    m(2, 2) = -1.0;
    return m;
}

double inv_distance_derivative(const Vec3& u, std::span<const Vec3> dirs) {
    const int n = static_cast<int>(dirs.size());
    if (n == 0) return 1.0 / u.norm();
    if (n > 8) throw OrderUnsupported("inv_distance_derivative supports at most 8 directions");
    PairingAccumulator acc{dirs.data(), &u, n};
    acc.run();
    return acc.total;
}

double eval_image_kernel(const ImageKernel& kernel, const Vec3& r, const Vec3& rp,
                         std::span<const Vec3> left, std::span<const Vec3> right) {
    const Vec3 u = r - mirror(rp);
    std::vector<Vec3> dirs;
    dirs.reserve(left.size() + right.size() + 1);
    for (const auto& a : left) dirs.push_back(a);
    for (const auto& b : right) dirs.push_back(-mirror(b));
    double val = 0.0;
    if (kernel.direct != 0.0)
        val += kernel.direct * inv_distance_derivative(u, dirs);
    if (kernel.deriv != 0.0) {
        std::vector<Vec3> dirs2;
        dirs2.reserve(dirs.size() + 1);
        dirs2.push_back(Vec3::UnitZ());
        dirs2.insert(dirs2.end(), dirs.begin(), dirs.end());
        val += kernel.deriv * inv_distance_derivative(u, dirs2);
    }
    return k4pe * val;
}

std::complex<double> green_halfspace(const Vec3& r, const Vec3& rp, double omega,
                                     const mat::DielectricModel& bulk) {
    const double dist = (r - rp).norm();
    if (dist == 0.0) throw CoincidentPoints("green_halfspace requires r != rp");
    const Complex eps = mat::eval_permittivity(bulk, omega);
    const bool rv = r.z() >= 0.0;
    const bool rpv = rp.z() >= 0.0;
    const Complex img = (1.0 - eps) / (1.0 + eps);
    if (rv && rpv)
        return k4pe * (1.0 / dist + img / (r - mirror(rp)).norm());
    if (!rv && !rpv)
        return k4pe / eps * (1.0 / dist - img / (r - mirror(rp)).norm());
    return k4pe * 2.0 / (1.0 + eps) / dist;
}

LayerCoefficients layer_coefficients(double k, double omega, const Layered& geom) {
    if (k <= 0.0) throw DomainError("layer_coefficients requires k > 0");
    const Xi xi = xi_coefficients(omega, geom);
    const double e2 = std::exp(-2.0 * k * geom.thickness);
    const Complex den = 1.0 - xi.b * xi.v * e2;
    LayerCoefficients lc;
    lc.c[0] = (xi.b * e2 - xi.v) / den;
    lc.c[1] = (1.0 - xi.v) / den;
    lc.c[2] = (1.0 - xi.v) * xi.b * e2 / den;
    lc.c[3] = (1.0 - xi.v) * (1.0 + xi.b) / den;
    lc.c[4] = xi.v * xi.b * e2 / den;
    lc.c[5] = xi.v / den;
    lc.c[6] = xi.b * e2 / den;
    lc.c[7] = (1.0 + xi.b) / den;
    lc.c[8] = (1.0 + xi.b) * xi.v / den;
    lc.c[9] = (xi.v - xi.b / e2) / den;
    return lc;
}

namespace {

// One exponential building block of g_k: coef(k) e^{-k zeta}, where coef has a
// finite k -> infinity limit that is peeled off and integrated analytically.
struct GreenTerm {
    std::function<Complex(double)> coef;
    Complex coef_inf;
    double zeta;  // >= 0 by construction of the table
};

Complex lipschitz(Complex amplitude, double zeta, double dr) {
    const double d = std::hypot(zeta, dr);
    if (d == 0.0) {
        if (amplitude == Complex{0.0, 0.0}) return 0.0;
        throw CoincidentPoints("green_layered_full hit an image-contact singularity");
    }
    return amplitude / d;
}

enum class Region { vacuum, layer, bulk };

Region classify(double z, double ds) {
    if (z > 0.0) return Region::vacuum;
    if (z <= -ds) return Region::bulk;
    return Region::layer;
}

} // namespace

std::complex<double> green_layered_full(const Vec3& r, const Vec3& rp, double omega,
                                        const Layered& geom, const quad::Options& quad_opts) {
    if ((r - rp).norm() == 0.0) throw CoincidentPoints("green_layered_full requires r != rp");
    const double ds = geom.thickness;
    if (ds <= 0.0) throw DomainError("layered geometry requires thickness > 0");
    const Xi xi = xi_coefficients(omega, geom);
    const double z = r.z(), zp = rp.z();
    const double dr = lateral_distance(r, rp);
    const double sum = z + zp;
    const double diff = std::abs(z - zp);

    const Region a = classify(z, ds), b = classify(zp, ds);
    Complex prefactor = 1.0;
    std::vector<GreenTerm> terms;
    bool direct = false;  // plain Coulomb term present in this cell

    auto den = [xi, ds](double k) { return 1.0 - xi.b * xi.v * std::exp(-2.0 * k * ds); };

    if (a == Region::vacuum && b == Region::vacuum) {
        direct = true;
        terms.push_back({[=](double k) { return (xi.b * std::exp(-2.0 * k * ds) - xi.v) / den(k); },
                         -xi.v, sum});
    } else if ((a == Region::vacuum && b == Region::bulk) ||
               (a == Region::bulk && b == Region::vacuum)) {
        terms.push_back({[=](double k) { return (1.0 - xi.v) * (1.0 + xi.b) / den(k); },
                         (1.0 - xi.v) * (1.0 + xi.b), diff});
    } else if ((a == Region::vacuum && b == Region::layer) ||
               (a == Region::layer && b == Region::vacuum)) {
        terms.push_back({[=](double k) { return (1.0 - xi.v) / den(k); }, 1.0 - xi.v, diff});
        terms.push_back({[=](double k) { return (1.0 - xi.v) * xi.b / den(k); },
                         (1.0 - xi.v) * xi.b, 2.0 * ds + sum});
    } else if (a == Region::layer && b == Region::layer) {
        prefactor = 1.0 / xi.eps_s;
        direct = true;
        terms.push_back({[=](double k) { return xi.v * xi.b / den(k); }, xi.v * xi.b,
                         2.0 * ds - diff});
        terms.push_back({[=](double k) { return xi.v * xi.b / den(k); }, xi.v * xi.b,
                         2.0 * ds + diff});
        terms.push_back({[=](double k) { return xi.v / den(k); }, xi.v, -sum});
        terms.push_back({[=](double k) { return xi.b / den(k); }, xi.b, 2.0 * ds + sum});
    } else if ((a == Region::layer && b == Region::bulk) ||
               (a == Region::bulk && b == Region::layer)) {
        prefactor = 1.0 / xi.eps_s;
        terms.push_back({[=](double k) { return (1.0 + xi.b) / den(k); }, 1.0 + xi.b, diff});
        terms.push_back({[=](double k) { return (1.0 + xi.b) * xi.v / den(k); },
                         (1.0 + xi.b) * xi.v, -sum});
    } else {  // bulk-bulk
        // c10 e^{k(z+z')} split into decaying pieces: -xi_b e^{k(2 d_s + z + z')}
        // and xi_v e^{k(z+z')}, both over the common denominator
        prefactor = 1.0 / xi.eps_b;
        direct = true;
        terms.push_back({[=](double k) { return -xi.b / den(k); }, -xi.b, -sum - 2.0 * ds});
        terms.push_back({[=](double k) { return xi.v / den(k); }, xi.v, -sum});
    }

    Complex value = 0.0;
    if (direct) value += 1.0 / (r - rp).norm();
    for (const auto& t : terms) value += lipschitz(t.coef_inf, t.zeta, dr);

    // Residual coefficients decay at least like e^{-2 k d_s}.
    auto integrand = [&](double k, bool imag_part) {
        Complex acc = 0.0;
        for (const auto& t : terms)
            acc += (t.coef(k) - t.coef_inf) * std::exp(-k * t.zeta);
        const double osc = (dr > 0.0) ? std::cyl_bessel_j(0.0, k * dr) : 1.0;
        return (imag_part ? acc.imag() : acc.real()) * osc;
    };
    const double decay = 2.0 * ds;
    const auto re = quad::integrate_semi_infinite(
        [&](double k) { return integrand(k, false); }, decay, dr, quad_opts);
    const auto im = quad::integrate_semi_infinite(
        [&](double k) { return integrand(k, true); }, decay, dr, quad_opts);
    value += Complex{re.value, im.value};
    return k4pe * prefactor * value;
}

double im_green_layered_integral(const Vec3& r, const Vec3& rp, double omega,
                                 const Layered& geom, const quad::Options& quad_opts) {
    require_vacuum_points(r, rp, "im_green_layered_integral");
    if (omega <= 0.0)
        throw DomainError("im_green_layered_integral requires omega > 0");
    if (geom.thickness <= 0.0)
        throw DomainError("layered geometry requires thickness > 0");
    const Xi xi = xi_coefficients(omega, geom);
    const double sum = r.z() + rp.z();
    const double dr = lateral_distance(r, rp);
    auto integrand = [&](double k) {
        const double e2 = std::exp(-2.0 * k * geom.thickness);
        const Complex c1 = (xi.b * e2 - xi.v) / (1.0 - xi.b * xi.v * e2);
        const double osc = (dr > 0.0) ? std::cyl_bessel_j(0.0, k * dr) : 1.0;
        return c1.imag() * std::exp(-k * sum) * osc;
    };
    const auto res = quad::integrate_semi_infinite(integrand, sum, dr, quad_opts);
    return k4pe * res.value;
}

ImageKernel im_green_image_form(double omega, const SurfaceGeometry& geometry,
                                KernelEvalMethod method, double mirror_contrast_min) {
    if (method == KernelEvalMethod::full_bessel_integral)
        throw MethodInvalid("full_bessel_integral has no closed image form");
    ImageKernel kernel;
    if (const auto* hs = std::get_if<HalfSpace>(&geometry.shape)) {
        const Complex eb = mat::eval_permittivity(hs->bulk, omega);
        if (method == KernelEvalMethod::closed_form) {
            kernel.direct = ((1.0 - eb) / (1.0 + eb)).imag();
        } else if (method == KernelEvalMethod::mirror_limit) {
            if (std::abs(eb) < mirror_contrast_min)
                throw MethodInvalid("mirror_limit requires |eps_b| >> 1 for a bare half-space");
            kernel.direct = -2.0 * eb.imag() / std::norm(eb);
        } else {
            throw MethodInvalid("thin_layer_expansion applies to layered geometries only");
        }
        return kernel;
    }
    const auto& lay = std::get<Layered>(geometry.shape);
    if (lay.thickness <= 0.0) throw DomainError("layered geometry requires thickness > 0");
    const Xi xi = xi_coefficients(omega, lay);
    if (method == KernelEvalMethod::thin_layer_expansion) {
        kernel.direct = ((1.0 - xi.eps_b) / (1.0 + xi.eps_b)).imag();
        const Complex big = (xi.eps_s * xi.eps_s - xi.eps_b * xi.eps_b) /
                            (xi.eps_s * (xi.eps_b + 1.0) * (xi.eps_b + 1.0));
        kernel.deriv = 2.0 * lay.thickness * big.imag();
    } else if (method == KernelEvalMethod::mirror_limit) {
        if (std::abs(xi.eps_b) < mirror_contrast_min * std::abs(xi.eps_s))
            throw MethodInvalid("mirror_limit requires |eps_b| >= contrast * |eps_s|");
        kernel.direct = -2.0 * xi.eps_b.imag() / std::norm(xi.eps_b);
        kernel.deriv = 2.0 * lay.thickness * xi.eps_s.imag() / std::norm(xi.eps_s);
    } else {
        throw MethodInvalid("closed_form applies to half-space geometries only");
    }
    return kernel;
}

double im_green(const Vec3& r, const Vec3& rp, double omega,
                const SurfaceGeometry& geometry, KernelEvalMethod method) {
    require_vacuum_points(r, rp, "im_green");
    if (method == KernelEvalMethod::full_bessel_integral) {
        const auto* lay = std::get_if<Layered>(&geometry.shape);
        if (!lay) throw MethodInvalid("full_bessel_integral applies to layered geometries only");
        return im_green_layered_integral(r, rp, omega, *lay);
    }
    const ImageKernel kernel = im_green_image_form(omega, geometry, method);
    return eval_image_kernel(kernel, r, rp);
}

double im_green_directional(const Vec3& r, const Vec3& rp, double omega,
                            const SurfaceGeometry& geometry, KernelEvalMethod method,
                            std::span<const Vec3> left, std::span<const Vec3> right) {
    require_vacuum_points(r, rp, "im_green_directional");
    const ImageKernel kernel = im_green_image_form(omega, geometry, method);
    return eval_image_kernel(kernel, r, rp, left, right);
}

double static_image_weight(const mat::DielectricModel& bulk, double temperature,
                           std::vector<std::string>* warnings) {
    if (temperature == 0.0) return 0.0;
    if (uses_tabulated(bulk)) {
        const auto* tab = std::get_if<mat::TabulatedResponse>(&bulk);
        auto f = [&](double w) {
            const Complex eps = mat::eval_permittivity(bulk, w);
            return -mat::bose_occupation(w, temperature) * ((1.0 - eps) / (1.0 + eps)).imag();
        };
        return richardson_limit(f, {tab}, temperature, warnings);
    }
    const mat::LowFreqForm f = mat::low_freq_form(bulk);
    const double kt = kbt_over_hbar(temperature);
    switch (f.family) {
        case mat::LowFreqForm::Family::regular: {
            const double d = 1.0 + f.eps0;
            return 2.0 * kt * f.slope / (d * d);
        }
        case mat::LowFreqForm::Family::conductor:
            return 2.0 * kt / f.sigma;
        case mat::LowFreqForm::Family::superfluid:
            return 0.0;
    }
    return 0.0;
}

double static_layer_weight(const mat::DielectricModel& layer,
                           const mat::DielectricModel& bulk, double temperature,
                           std::vector<std::string>* warnings) {
    if (temperature == 0.0) return 0.0;
    if (uses_tabulated(layer) || uses_tabulated(bulk)) {
        std::vector<const mat::TabulatedResponse*> tabs;
        if (const auto* t = std::get_if<mat::TabulatedResponse>(&layer)) tabs.push_back(t);
        if (const auto* t = std::get_if<mat::TabulatedResponse>(&bulk)) tabs.push_back(t);
        auto f = [&](double w) {
            const Complex es = mat::eval_permittivity(layer, w);
            const Complex eb = mat::eval_permittivity(bulk, w);
            const Complex big = (es * es - eb * eb) / (es * (eb + 1.0) * (eb + 1.0));
            return mat::bose_occupation(w, temperature) * big.imag();
        };
        return richardson_limit(f, tabs, temperature, warnings);
    }
    const mat::LowFreqForm fs = mat::low_freq_form(layer);
    if (fs.family != mat::LowFreqForm::Family::regular)
        throw UnsupportedStaticLimit(
            "static layer kernel supports regular (dielectric) layer responses only");
    const mat::LowFreqForm fb = mat::low_freq_form(bulk);
    const double kt = kbt_over_hbar(temperature);
    const double a = fs.eps0;
    switch (fb.family) {
        case mat::LowFreqForm::Family::regular: {
            const double b = fb.eps0;
            const double d = 1.0 + b;
            return kt * (fs.slope * (a * a + b * b) / (a * a * d * d) -
                         2.0 * fb.slope * (b + a * a) / (a * d * d * d));
        }
        case mat::LowFreqForm::Family::conductor:
            return kt * (fs.slope - 2.0 * a / fb.sigma) / (a * a);
        case mat::LowFreqForm::Family::superfluid:
            return kt * fs.slope / (a * a);
    }
    return 0.0;
}

ImageKernel kernel_h_image_form(const SurfaceGeometry& geometry,
                                std::vector<std::string>* warnings) {
    ImageKernel kernel;
    if (const auto* hs = std::get_if<HalfSpace>(&geometry.shape)) {
        kernel.direct = static_image_weight(hs->bulk, geometry.temperature, warnings);
    } else {
        const auto& lay = std::get<Layered>(geometry.shape);
        if (lay.thickness <= 0.0) throw DomainError("layered geometry requires thickness > 0");
        kernel.direct = static_image_weight(lay.bulk, geometry.temperature, warnings);
        kernel.deriv = -2.0 * lay.thickness *
                       static_layer_weight(lay.layer, lay.bulk, geometry.temperature, warnings);
    }
    return kernel;
}

double kernel_h(const Vec3& r, const Vec3& rp, const SurfaceGeometry& geometry,
                std::vector<std::string>* warnings) {
    if (r.z() <= 0.0 || rp.z() <= 0.0)
        throw DomainError("kernel_h requires both points in vacuum (z > 0)");
    const ImageKernel kernel = kernel_h_image_form(geometry, warnings);
    return eval_image_kernel(kernel, r, rp);
}

double kernel_h_directional(const Vec3& r, const Vec3& rp, const SurfaceGeometry& geometry,
                            std::span<const Vec3> left, std::span<const Vec3> right,
                            std::vector<std::string>* warnings) {
    if (r.z() <= 0.0 || rp.z() <= 0.0)
        throw DomainError("kernel_h_directional requires both points in vacuum (z > 0)");
    if (left.size() > 2 || right.size() > 2)
        throw OrderUnsupported("kernel_h_directional supports at most two derivatives per argument");
    const ImageKernel kernel = kernel_h_image_form(geometry, warnings);
    return eval_image_kernel(kernel, r, rp, left, right);
}

} // namespace surfnoise::greens
