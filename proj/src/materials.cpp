#include "surfnoise/materials.hpp"

#include <algorithm>
#include <cmath>

#include "surfnoise/constants.hpp"
#include "surfnoise/errors.hpp"

namespace surfnoise::materials {

namespace {

constexpr Complex I{0.0, 1.0};

Complex eval_drude_lorentz(const DrudeLorentzModel& m, double w) {
    Complex sum = 1.0;
    for (const auto& res : m.resonances) {
        const double w2 = res.omega * res.omega;
        sum += res.weight * w2 / (w2 - w * w - I * res.gamma * w);
    }
    return sum;
}

Complex eval_drude(const DrudeMetal& m, double w) {
    if (w == 0.0)
        throw StaticDivergence("Drude metal permittivity diverges at omega = 0");
    return 1.0 - m.omega_p * m.omega_p / (w * w + I * m.gamma * w);
}

Complex eval_superconductor(const Superconductor& m, double w) {
    if (m.temperature < 0.0 || m.temperature > m.t_c)
        throw DomainError("superconductor requires 0 <= T <= T_c");
    if (w == 0.0)
        throw StaticDivergence("superconductor permittivity diverges at omega = 0");
    const double x4 = std::pow(m.temperature / m.t_c, 4);
    Complex eps = 1.0 - x4 * m.omega_p * m.omega_p / (w * w + I * m.gamma * w);
    eps -= (1.0 - x4) / (w * w * m.lambda0 * constants::epsilon0);
    return eps;
}

Complex eval_tabulated(const TabulatedResponse& m, double w) {
    if (m.omega.empty())
        throw DomainError("tabulated response has no samples");
    if (w < m.omega.front() || w > m.omega.back())
        throw OutOfRange("frequency outside tabulated span; extrapolation is not supported");
    auto it = std::lower_bound(m.omega.begin(), m.omega.end(), w);
    std::size_t hi = static_cast<std::size_t>(it - m.omega.begin());
    if (hi == 0) return m.eps.front();
    std::size_t lo = hi - 1;
    if (hi >= m.omega.size()) return m.eps.back();
    const double t = (std::log(w) - std::log(m.omega[lo])) /
                     (std::log(m.omega[hi]) - std::log(m.omega[lo]));
    const double re = (1.0 - t) * m.eps[lo].real() + t * m.eps[hi].real();
    const double im = (1.0 - t) * m.eps[lo].imag() + t * m.eps[hi].imag();
    return {re, im};
}

} // namespace

double DrudeLorentzModel::static_permittivity() const {
    double s = 1.0;
    for (const auto& r : resonances) s += r.weight;
    return s;
}

double DrudeLorentzModel::loss_sum() const {
    double s = 0.0;
    for (const auto& r : resonances) s += r.weight * r.gamma / (r.omega * r.omega);
    return s;
}

TabulatedResponse TabulatedResponse::flat(Complex value, double omega_min, double omega_max) {
    TabulatedResponse t;
    t.omega = {omega_min, omega_max};
    t.eps = {value, value};
    return t;
}

Complex eval_permittivity(const DielectricModel& model, double omega) {
    if (omega < 0.0)
        throw DomainError("eval_permittivity requires omega >= 0");
    return std::visit(
        [omega](const auto& m) -> Complex {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Vacuum>) return 1.0;
            else if constexpr (std::is_same_v<T, DrudeLorentzModel>) return eval_drude_lorentz(m, omega);
            else if constexpr (std::is_same_v<T, DrudeMetal>) return eval_drude(m, omega);
            else if constexpr (std::is_same_v<T, Superconductor>) return eval_superconductor(m, omega);
            else return eval_tabulated(m, omega);
        },
        model);
}

double bose_occupation(double omega, double temperature) {
    if (omega <= 0.0)
        throw DomainError("bose_occupation requires omega > 0");
    if (temperature < 0.0)
        throw DomainError("bose_occupation requires T >= 0");
    if (temperature == 0.0) return 0.0;
    const double x = constants::hbar * omega / (constants::k_boltzmann * temperature);
    if (x > 700.0) return 0.0;
    return 1.0 / std::expm1(x);
}

double energy_loss(const DielectricModel& model, double omega) {
    if (omega <= 0.0)
        throw DomainError("energy_loss requires omega > 0");
    const Complex eps = eval_permittivity(model, omega);
    return eps.imag() / std::norm(eps);
}

double thermal_loss(const DielectricModel& model, double omega, double temperature) {
    return bose_occupation(omega, temperature) * energy_loss(model, omega);
}

double static_loss_sum(const DrudeLorentzModel& model) { return model.loss_sum(); }

std::vector<std::string> validate(const DielectricModel& model) {
    std::vector<std::string> warnings;
    std::visit(
        [&warnings](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, DrudeLorentzModel>) {
                for (std::size_t i = 0; i < m.resonances.size(); ++i) {
                    const auto& r = m.resonances[i];
                    if (r.omega <= 0.0 || r.gamma <= 0.0)
                        throw DomainError("Drude-Lorentz resonance requires omega_n > 0 and gamma_n > 0");
                    if (r.weight <= 0.0)
                        warnings.push_back("Drude-Lorentz resonance " + std::to_string(i) +
                                           " has non-positive weight f_n");
                }
            } else if constexpr (std::is_same_v<T, DrudeMetal>) {
                if (m.omega_p <= 0.0) throw DomainError("Drude metal requires omega_p > 0");
                if (m.gamma < 0.0) throw DomainError("Drude metal requires gamma >= 0");
            } else if constexpr (std::is_same_v<T, Superconductor>) {
                if (m.omega_p <= 0.0) throw DomainError("superconductor requires omega_p > 0");
                if (m.gamma < 0.0) throw DomainError("superconductor requires gamma >= 0");
                if (m.t_c <= 0.0) throw DomainError("superconductor requires T_c > 0");
                if (m.lambda0 <= 0.0) throw DomainError("superconductor requires Lambda0 > 0");
                if (m.temperature < 0.0 || m.temperature > m.t_c)
                    throw DomainError("superconductor evaluation requires 0 <= T <= T_c");
            } else if constexpr (std::is_same_v<T, TabulatedResponse>) {
                if (m.omega.size() != m.eps.size() || m.omega.empty())
                    throw DomainError("tabulated response needs matching, non-empty sample arrays");
                for (std::size_t i = 0; i < m.omega.size(); ++i) {
                    if (m.omega[i] <= 0.0)
                        throw DomainError("tabulated frequencies must be positive");
                    if (i > 0 && m.omega[i] <= m.omega[i - 1])
                        throw DomainError("tabulated frequencies must be strictly increasing");
                    if (m.eps[i].imag() < 0.0)
                        throw DomainError("tabulated Im eps must be >= 0 for omega > 0");
                }
            }
        },
        model);
    return warnings;
}

LowFreqForm low_freq_form(const DielectricModel& model) {
    return std::visit(
        [](const auto& m) -> LowFreqForm {
            using T = std::decay_t<decltype(m)>;
            LowFreqForm f;
            if constexpr (std::is_same_v<T, Vacuum>) {
                f.family = LowFreqForm::Family::regular;
                f.eps0 = 1.0;
            } else if constexpr (std::is_same_v<T, DrudeLorentzModel>) {
                f.family = LowFreqForm::Family::regular;
                f.eps0 = m.static_permittivity();
                f.slope = m.loss_sum();
            } else if constexpr (std::is_same_v<T, DrudeMetal>) {
                if (m.gamma == 0.0) {
                    f.family = LowFreqForm::Family::superfluid;
                    f.b = m.omega_p * m.omega_p;
                } else {
                    f.family = LowFreqForm::Family::conductor;
                    f.sigma = m.omega_p * m.omega_p / m.gamma;
                    f.eps0 = 1.0 - m.omega_p * m.omega_p / (m.gamma * m.gamma);
                }
            } else if constexpr (std::is_same_v<T, Superconductor>) {
                const double x4 = std::pow(m.temperature / m.t_c, 4);
                const double b_sf = (1.0 - x4) / (m.lambda0 * constants::epsilon0);
                if (b_sf > 0.0) {
                    f.family = LowFreqForm::Family::superfluid;
                    f.b = b_sf;
                } else if (m.gamma == 0.0) {
                    // T = T_c, lossless: ideal electron gas
                    f.family = LowFreqForm::Family::superfluid;
                    f.b = m.omega_p * m.omega_p;
                } else {
                    // T = T_c: plain Drude metal
                    f.family = LowFreqForm::Family::conductor;
                    f.sigma = m.omega_p * m.omega_p / m.gamma;
                    f.eps0 = 1.0 - m.omega_p * m.omega_p / (m.gamma * m.gamma);
                }
            } else {
                // Tabulated data: regular family estimated from the lowest samples.
                f.family = LowFreqForm::Family::regular;
                f.eps0 = m.eps.front().real();
                f.slope = m.eps.front().imag() / m.omega.front();
                f.extrapolated = true;
            }
            return f;
        },
        model);
}

bool is_lossless(const DielectricModel& model) {
    return std::visit(
        [](const auto& m) -> bool {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Vacuum>) return true;
            else if constexpr (std::is_same_v<T, DrudeLorentzModel>) {
                for (const auto& r : m.resonances)
                    if (r.weight != 0.0 && r.gamma != 0.0) return false;
                return true;
            } else if constexpr (std::is_same_v<T, DrudeMetal>) return m.gamma == 0.0;
            else if constexpr (std::is_same_v<T, Superconductor>)
                return m.gamma == 0.0 || m.temperature == 0.0;
            else {
                for (const auto& e : m.eps)
                    if (e.imag() != 0.0) return false;
                return true;
            }
        },
        model);
}

double skin_depth(const DrudeMetal& metal, double omega) {
    if (omega <= 0.0) throw DomainError("skin_depth requires omega > 0");
    const double c2 = constants::c_light * constants::c_light;
    return std::sqrt(metal.gamma * c2 / (omega * metal.omega_p * metal.omega_p));
}

DrudeMetal gold_drude() { return {1.37e16, 4.05e13}; }

} // namespace surfnoise::materials
