// quadrature.hpp — Adaptive Gauss-Kronrod panels and Bessel-zero splitting helpers

#pragma once

#include <functional>

namespace surfnoise::quad {

struct Options {
    double rel_tol = 1e-11;
    double abs_tol = 0.0;
    int max_panels = 20000;
};

struct Result {
    double value = 0.0;
    double error = 0.0;   // quadrature error estimate
    int evaluations = 0;
};

// Adaptive G7/K15 bisection on [a, b]. Throws QuadratureFailure when the panel
// budget runs out before the tolerance is met.
Result integrate(const std::function<double(double)>& f, double a, double b,
                 const Options& opts = {});

// s-th positive zero of J0 (s >= 1), McMahon expansion refined by Newton.
double bessel_j0_zero(int s);

// Semi-infinite integral of an exponentially damped, J0-oscillatory integrand.
// Splits at the scaled J0 zeros (osc_scale > 0: oscillation J0(k*osc_scale)),
// integrates panels adaptively, and stops once the running tail falls below
// tail_cutoff of the accumulated value; an Aitken-accelerated estimate of the
// alternating tail is added when truncation alone has not converged.
Result integrate_semi_infinite(const std::function<double(double)>& f,
                               double decay_scale, double osc_scale,
                               const Options& opts = {}, int split_zeros = 40,
                               double tail_cutoff = 1e-12);

} // namespace surfnoise::quad
