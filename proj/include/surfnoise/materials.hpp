// materials.hpp — Dielectric response models, thermal occupation, and loss functions

#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

namespace surfnoise::materials {

using Complex = std::complex<double>;

// eps(omega) == 1
struct Vacuum {};

struct Resonance {
    double weight = 0.0;  // dimensionless f_n (real, usually positive)
    double omega = 0.0;   // resonance frequency, rad/s
    double gamma = 0.0;   // damping rate, rad/s
};

// eps(w) = 1 + sum_n f_n w_n^2 / (w_n^2 - w^2 - i g_n w)
struct DrudeLorentzModel {
    std::vector<Resonance> resonances;

    double static_permittivity() const;  // eps(0) = 1 + sum f_n
    double loss_sum() const;             // sum f_n g_n / w_n^2, seconds
};

// eps(w) = 1 - w_p^2 / (w^2 + i g w)
struct DrudeMetal {
    double omega_p = 0.0;  // plasma frequency, rad/s
    double gamma = 0.0;    // damping rate, rad/s
};

// Two-fluid permittivity; normal-fluid weight (T/T_c)^4, superfluid 1/(w^2 Lambda0 eps0).
struct Superconductor {
    double omega_p = 0.0;      // rad/s
    double gamma = 0.0;        // rad/s
    double t_c = 0.0;          // K
    double lambda0 = 0.0;      // H m
    double temperature = 0.0;  // K
};

// Measured permittivity samples, interpolated linearly in log(omega), Re and Im
// separately. Extrapolation outside the sample span is an error.
struct TabulatedResponse {
    std::vector<double> omega;  // strictly increasing, > 0
    std::vector<Complex> eps;

    // Frequency-flat response on [omega_min, omega_max], e.g. a fixed loss tangent.
    static TabulatedResponse flat(Complex value, double omega_min, double omega_max);
};

using DielectricModel = std::variant<Vacuum, DrudeLorentzModel, DrudeMetal, Superconductor, TabulatedResponse>;

// eps_r(omega) for omega >= 0. At omega == 0 the Drude metal and the
// superconductor diverge and throw StaticDivergence; static-limit quantities
// are exposed through low_freq_form() instead.
Complex eval_permittivity(const DielectricModel& model, double omega);

// n(w) = 1/(exp(hbar w / kB T) - 1); 0 at T = 0.
double bose_occupation(double omega, double temperature);

// Im eps / |eps|^2
double energy_loss(const DielectricModel& model, double omega);

// l(w) = n(w) Im eps / |eps|^2
double thermal_loss(const DielectricModel& model, double omega, double temperature);

// sum f_n g_n / w_n^2, seconds
double static_loss_sum(const DrudeLorentzModel& model);

// Soft validation: returns human-readable warnings (e.g. f_n <= 0); throws
// DomainError on hard invariant violations (non-positive frequencies,
// non-increasing tabulated grid, negative Im eps in tabulated data).
std::vector<std::string> validate(const DielectricModel& model);

// Leading omega -> 0 behaviour, used by the static kernel limits:
//   regular:     eps ~ eps0 + i slope w
//   conductor:   eps ~ eps_inf + i sigma / w          (sigma = w_p^2 / g)
//   superfluid:  eps ~ -b / w^2 + i u / w
struct LowFreqForm {
    enum class Family { regular, conductor, superfluid };
    Family family = Family::regular;
    double eps0 = 1.0;
    double slope = 0.0;
    double sigma = 0.0;
    double b = 0.0;
    bool extrapolated = false;  // tabulated data; treat with care
};
LowFreqForm low_freq_form(const DielectricModel& model);

bool is_lossless(const DielectricModel& model);

// delta = sqrt(gamma c^2 / (omega omega_p^2)), quasistatic validity scale
double skin_depth(const DrudeMetal& metal, double omega);

// Literature-style gold parameters; kept only as a convenience default, no
// single measurement behind them.
DrudeMetal gold_drude();

} // namespace surfnoise::materials
