#include "surfnoise/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "surfnoise/constants.hpp"
#include "surfnoise/errors.hpp"

namespace surfnoise::quad {

namespace {

// G7/K15 nodes on [0,1] of |x|; weights from Piessens et al. (QUADPACK).
constexpr double kKronrodNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
constexpr double kKronrodWeights[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double kGaussWeights[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct Panel {
    double a, b;
    double value;
    double error;
};

Panel evaluate_panel(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fv[15];
    for (int i = 0; i < 7; ++i) {
        fv[i] = f(c - h * kKronrodNodes[i]);
        fv[14 - i] = f(c + h * kKronrodNodes[i]);
    }
    fv[7] = f(c);
    double kronrod = kKronrodWeights[7] * fv[7];
    for (int i = 0; i < 7; ++i)
        kronrod += kKronrodWeights[i] * (fv[i] + fv[14 - i]);
    double gauss = kGaussWeights[3] * fv[7];
    for (int i = 0; i < 3; ++i)
        gauss += kGaussWeights[i] * (fv[2 * i + 1] + fv[13 - 2 * i]);
    kronrod *= h;
    gauss *= h;
    double err = std::abs(kronrod - gauss);
    // QUADPACK-style sharpening of the raw difference
    err = std::pow(200.0 * err, 1.5);
    if (err > std::abs(kronrod) || !std::isfinite(err)) err = std::abs(kronrod - gauss);
    return {a, b, kronrod, err};
}

} // namespace

Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts) {
    Result res;
    if (a == b) return res;
    std::vector<Panel> heap;
    heap.push_back(evaluate_panel(f, a, b));
    res.evaluations = 15;
    auto worse = [](const Panel& x, const Panel& y) { return x.error < y.error; };
    std::make_heap(heap.begin(), heap.end(), worse);
    while (true) {
        double total = 0.0, err = 0.0;
        for (const auto& p : heap) { total += p.value; err += p.error; }
        const double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(total));
        if (err <= tol || err < 1e-300) {
            res.value = total;
            res.error = err;
            return res;
        }
        if (static_cast<int>(heap.size()) >= opts.max_panels)
            throw QuadratureFailure("adaptive quadrature exhausted its panel budget");
        std::pop_heap(heap.begin(), heap.end(), worse);
        Panel p = heap.back();
        heap.pop_back();
        const double mid = 0.5 * (p.a + p.b);
        if (mid <= p.a || mid >= p.b) {
            // interval no longer splittable in double precision; accept as is
            double total2 = p.value, err2 = 0.0;
            for (const auto& q : heap) { total2 += q.value; err2 += q.error; }
            res.value = total2;
            res.error = err2;
            return res;
        }
        heap.push_back(evaluate_panel(f, p.a, mid));
        std::push_heap(heap.begin(), heap.end(), worse);
        heap.push_back(evaluate_panel(f, mid, p.b));
        std::push_heap(heap.begin(), heap.end(), worse);
        res.evaluations += 30;
    }
}

double bessel_j0_zero(int s) {
    if (s < 1) throw DomainError("bessel_j0_zero requires s >= 1");
    // McMahon expansion, then two Newton steps with J0' = -J1.
    const double beta = (s - 0.25) * constants::pi;
    const double b2 = beta * beta;
    double x = beta + 1.0 / (8.0 * beta) * (1.0 - (124.0 / 3.0) / (8.0 * b2) +
                                            (120928.0 / 15.0) / (64.0 * b2 * b2));
    for (int it = 0; it < 3; ++it) {
        const double j0 = std::cyl_bessel_j(0.0, x);
        const double j1 = std::cyl_bessel_j(1.0, x);
        if (j1 == 0.0) break;
        x += j0 / j1;
    }
    return x;
}

Result integrate_semi_infinite(const std::function<double(double)>& f,
                               double decay_scale, double osc_scale,
                               const Options& opts, int split_zeros,
                               double tail_cutoff) {
    if (decay_scale <= 0.0)
        throw DomainError("integrate_semi_infinite requires a positive decay scale");

    // Breakpoints: J0 zeros (oscillation) merged with decay-scale doubling.
    std::vector<double> breaks;
    breaks.push_back(0.0);
    if (osc_scale > 0.0) {
        for (int s = 1; s <= split_zeros; ++s)
            breaks.push_back(bessel_j0_zero(s) / osc_scale);
    }
    const double kd = 1.0 / decay_scale;
    for (double k = kd; k < 64.0 * kd; k *= 2.0) breaks.push_back(k);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    Result total;

    // scale pass: one Kronrod rule per segment, so panels whose integral
    // crosses zero still get a meaningful absolute tolerance
    double scale = 0.0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const Result probe = integrate(f, breaks[i], breaks[i + 1], {1.0, 1e300, 1});
        scale += std::abs(probe.value);
        total.evaluations += probe.evaluations;
    }
    if (scale == 0.0) return total;

    Options panel_opts = opts;
    panel_opts.max_panels = std::max(64, opts.max_panels / 16);
    panel_opts.abs_tol = std::max(opts.abs_tol, 0.125 * opts.rel_tol * scale);

    auto add_panel = [&](double a, double b) {
        Result r = integrate(f, a, b, panel_opts);
        total.value += r.value;
        total.error += r.error;
        total.evaluations += r.evaluations;
        return r.value;
    };

    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const double v = add_panel(breaks[i], breaks[i + 1]);
        scale = std::max(scale, std::abs(total.value));
        if (i > 4 && std::abs(v) < tail_cutoff * std::max(scale, 1e-300) &&
            breaks[i + 1] > 8.0 * kd)
            return total;
    }

    // Continue zero-to-zero (or decay-doubling) panels; accelerate the
    // alternating tail with iterated Aitken if plain truncation stalls.
    double a = breaks.back();
    std::vector<double> partials;
    partials.push_back(total.value);
    int zero_index = split_zeros;
    for (int extra = 0; extra < 400; ++extra) {
        double b;
        if (osc_scale > 0.0) {
            ++zero_index;
            b = bessel_j0_zero(zero_index) / osc_scale;
            if (b <= a) b = a + kd;
        } else {
            b = a + 2.0 * kd;
        }
        const double v = add_panel(a, b);
        partials.push_back(total.value);
        a = b;
        if (std::abs(v) < tail_cutoff * std::max(std::abs(total.value), 1e-300))
            return total;
        if (partials.size() >= 5 && a > 60.0 * kd) break;
    }

    if (partials.size() >= 3) {
        // iterated Aitken delta-squared on the partial sums
        std::vector<double> s = partials;
        while (s.size() >= 3) {
            std::vector<double> s2;
            for (std::size_t i = 0; i + 2 < s.size(); ++i) {
                const double d2 = s[i + 2] - 2.0 * s[i + 1] + s[i];
                s2.push_back(d2 != 0.0 ? s[i + 2] - (s[i + 2] - s[i + 1]) * (s[i + 2] - s[i + 1]) / d2
                                       : s[i + 2]);
            }
            s = std::move(s2);
        }
        if (!s.empty() && std::isfinite(s.back())) {
            total.error += std::abs(s.back() - total.value);
            total.value = s.back();
            return total;
        }
    }
    throw QuadratureFailure("semi-infinite quadrature did not converge within the panel budget");
}

} // namespace surfnoise::quad
