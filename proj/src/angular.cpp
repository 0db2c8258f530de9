#include "surfnoise/angular.hpp"

#include <cmath>
#include <vector>

#include "surfnoise/constants.hpp"
#include "surfnoise/errors.hpp"

namespace surfnoise::lindblad {

namespace {

double log_factorial(int n) {
    static std::vector<double> cache{0.0, 0.0};
    while (static_cast<int>(cache.size()) <= n)
        cache.push_back(cache.back() + std::log(static_cast<double>(cache.size())));
    return cache[static_cast<std::size_t>(n)];
}

} // namespace

double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3) {
    if (std::abs(m1) > j1 || std::abs(m2) > j2 || std::abs(m3) > j3) return 0.0;
    if (m1 + m2 + m3 != 0) return 0.0;
    if (j3 < std::abs(j1 - j2) || j3 > j1 + j2) return 0.0;

    const double log_delta = 0.5 * (log_factorial(j1 + j2 - j3) + log_factorial(j1 - j2 + j3) +
                                    log_factorial(-j1 + j2 + j3) - log_factorial(j1 + j2 + j3 + 1));
    const double log_num = 0.5 * (log_factorial(j1 + m1) + log_factorial(j1 - m1) +
                                  log_factorial(j2 + m2) + log_factorial(j2 - m2) +
                                  log_factorial(j3 + m3) + log_factorial(j3 - m3));
    const int t_min = std::max({0, j2 - j3 - m1, j1 - j3 + m2});
    const int t_max = std::min({j1 + j2 - j3, j1 - m1, j2 + m2});
    double sum = 0.0;
    for (int t = t_min; t <= t_max; ++t) {
        const double log_den = log_factorial(t) + log_factorial(j3 - j2 + t + m1) +
                               log_factorial(j3 - j1 + t - m2) + log_factorial(j1 + j2 - j3 - t) +
                               log_factorial(j1 - t - m1) + log_factorial(j2 - t + m2);
        const double term = std::exp(log_delta + log_num - log_den);
        sum += (t % 2 == 0) ? term : -term;
    }
    const int phase = j1 - j2 - m3;
    return (phase % 2 == 0) ? sum : -sum;
}

DipoleCoefficients dipole_coefficients(int l, int m, int lp, int mp) {
    DipoleCoefficients out;
    if (std::abs(l - lp) != 1) return out;
    const int dm = m - mp;
    if (dm < -1 || dm > 1) return out;
    const double scale = std::sqrt((2.0 * l + 1.0) * (2.0 * lp + 1.0)) * wigner3j(l, lp, 1, 0, 0, 0);
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    const double w_minus = wigner3j(l, lp, 1, -m, mp, -1);
    const double w_plus = wigner3j(l, lp, 1, -m, mp, 1);
    const double w_zero = wigner3j(l, lp, 1, -m, mp, 0);
    out.n1 = sign * scale / std::sqrt(2.0) * (w_minus - w_plus);
    out.n2 = std::complex<double>{0.0, 1.0} * (sign * scale / std::sqrt(2.0) * (w_minus + w_plus));
    out.n3 = sign * scale * w_zero;
    return out;
}

int AngularMomentumBasis::index(int l, int m) const {
    if (l < 0 || l > l_max || std::abs(m) > l)
        throw DomainError("angular momentum state outside basis");
    return l * l + l + m;
}

std::pair<int, int> AngularMomentumBasis::labels(int index) const {
    if (index < 0 || index >= dimension())
        throw DomainError("basis index out of range");
    const int l = static_cast<int>(std::sqrt(static_cast<double>(index)));
    return {l, index - l * l - l};
}

double AngularMomentumBasis::energy(int l, double inertia) const {
    return constants::hbar * constants::hbar * l * (l + 1.0) / (2.0 * inertia);
}

double AngularMomentumBasis::transition_frequency(int l, double inertia) const {
    return constants::hbar * (l + 1.0) / inertia;
}

std::array<Eigen::MatrixXcd, 3> rotor_dipole_operators(const AngularMomentumBasis& basis, int l) {
    if (l < 0 || l + 1 > basis.l_max)
        throw DomainError("rotor_dipole_operators requires l+1 within the basis");
    const int dim = basis.dimension();
    std::array<Eigen::MatrixXcd, 3> ops{Eigen::MatrixXcd::Zero(dim, dim),
                                        Eigen::MatrixXcd::Zero(dim, dim),
                                        Eigen::MatrixXcd::Zero(dim, dim)};
    for (int m = -l; m <= l; ++m) {
        for (int mp = -(l + 1); mp <= l + 1; ++mp) {
            const DipoleCoefficients c = dipole_coefficients(l, m, l + 1, mp);
            const int row = basis.index(l, m);
            const int col = basis.index(l + 1, mp);
            ops[0](row, col) = c.n1;
            ops[1](row, col) = c.n2;
            ops[2](row, col) = c.n3;
        }
    }
    return ops;
}

} // namespace surfnoise::lindblad
