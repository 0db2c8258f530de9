// oracles.hpp — Independent reference computations used only by the tests.
// Nothing here may call the code paths it is checking.

#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracles {

// --- Clebsch-Gordan by ladder construction ---------------------------------
//
// Builds the coupled states |J,M> inside the product basis |j1,m1>|j2,m2> by
// starting from the stretched state and applying J- = J1- + J2-, orthogonalizing
// to reach lower J. No factorial formulas involved.
class ClebschGordan {
public:
    ClebschGordan(int j1, int j2) : j1_(j1), j2_(j2) {
        const int d1 = 2 * j1 + 1, d2 = 2 * j2 + 1;
        for (int j = j1 + j2; j >= std::abs(j1 - j2); --j) {
            // top state |j, j>: in the M = j subspace, orthogonal to all higher-j states
            Eigen::VectorXd top = Eigen::VectorXd::Zero(d1 * d2);
            if (j == j1 + j2) {
                top[index(j1, j2)] = 1.0;
            } else {
                // basis of the M = j subspace
                std::vector<int> members;
                for (int m1 = -j1_; m1 <= j1_; ++m1) {
                    const int m2 = j - m1;
                    if (std::abs(m2) <= j2_) members.push_back(index(m1, m2));
                }
                Eigen::VectorXd v = Eigen::VectorXd::Zero(d1 * d2);
                v[members.front()] = 1.0;
                for (int jp = j1 + j2; jp > j; --jp) {
                    const Eigen::VectorXd& u = states_.at({jp, j});
                    v -= u.dot(v) * u;
                }
                // if the seed was parallel to higher states, try the others
                int next = 1;
                while (v.norm() < 1e-8 && next < static_cast<int>(members.size())) {
                    v.setZero();
                    v[members[static_cast<std::size_t>(next++)]] = 1.0;
                    for (int jp = j1 + j2; jp > j; --jp) {
                        const Eigen::VectorXd& u = states_.at({jp, j});
                        v -= u.dot(v) * u;
                    }
                }
                top = v / v.norm();
                // sign convention: <j1, m1 = j1 | j, j> > 0 (Condon-Shortley)
                const int m2_top = j - j1_;
                if (std::abs(m2_top) <= j2_ && top[index(j1_, m2_top)] < 0.0) top = -top;
            }
            states_[{j, j}] = top;
            // ladder downwards
            Eigen::VectorXd cur = top;
            for (int m = j; m > -j; --m) {
                Eigen::VectorXd lowered = Eigen::VectorXd::Zero(d1 * d2);
                for (int m1 = -j1_; m1 <= j1_; ++m1)
                    for (int m2 = -j2_; m2 <= j2_; ++m2) {
                        const double c = cur[index(m1, m2)];
                        if (c == 0.0) continue;
                        if (m1 - 1 >= -j1_)
                            lowered[index(m1 - 1, m2)] += c * ladder(j1_, m1);
                        if (m2 - 1 >= -j2_)
                            lowered[index(m1, m2 - 1)] += c * ladder(j2_, m2);
                    }
                lowered /= lowered.norm();
                states_[{j, m - 1}] = lowered;
                cur = lowered;
            }
        }
    }

    // <j1 m1, j2 m2 | J M>
    double coefficient(int m1, int m2, int j, int m) const {
        if (std::abs(m1) > j1_ || std::abs(m2) > j2_ || m1 + m2 != m) return 0.0;
        const auto it = states_.find({j, m});
        if (it == states_.end()) return 0.0;
        return it->second[index(m1, m2)];
    }

private:
    static double ladder(int j, int m) { return std::sqrt(j * (j + 1.0) - m * (m - 1.0)); }
    int index(int m1, int m2) const { return (m1 + j1_) * (2 * j2_ + 1) + (m2 + j2_); }

    int j1_, j2_;
    std::map<std::pair<int, int>, Eigen::VectorXd> states_;
};

// 3-j from the ladder-built CG coefficients
inline double wigner3j_reference(int j1, int j2, int j3, int m1, int m2, int m3) {
    if (m1 + m2 + m3 != 0) return 0.0;
    if (j3 < std::abs(j1 - j2) || j3 > j1 + j2) return 0.0;
    ClebschGordan cg(j1, j2);
    const double c = cg.coefficient(m1, m2, j3, -m3);
    const int phase = j1 - j2 - m3;
    return ((phase % 2 + 2) % 2 == 0 ? 1.0 : -1.0) * c / std::sqrt(2.0 * j3 + 1.0);
}

// --- spherical harmonics (low l, explicit) -----------------------------------

inline std::complex<double> sph_harmonic(int l, int m, double beta, double alpha) {
    const double ct = std::cos(beta);
    const std::complex<double> phase = std::exp(std::complex<double>(0.0, m * alpha));
    const double st = std::sin(beta);
    const double pi = 3.14159265358979323846;
    double p = 0.0;  // P_l^m with Condon-Shortley
    const int am = std::abs(m);
    if (l == 0) p = 1.0;
    else if (l == 1) p = (am == 0) ? ct : -st;
    else if (l == 2) {
        if (am == 0) p = 0.5 * (3 * ct * ct - 1);
        else if (am == 1) p = -3 * st * ct;
        else p = 3 * st * st;
    } else if (l == 3) {
        if (am == 0) p = 0.5 * ct * (5 * ct * ct - 3);
        else if (am == 1) p = -1.5 * (5 * ct * ct - 1) * st;
        else if (am == 2) p = 15 * ct * st * st;
        else p = -15 * st * st * st;
    }
    double lf = 1.0;  // (l-|m|)!/(l+|m|)!
    for (int k = l - am + 1; k <= l + am; ++k) lf /= k;
    double norm = std::sqrt((2 * l + 1) / (4 * pi) * lf);
    std::complex<double> y = norm * p * phase;
    if (m < 0) {
        y = std::conj(norm * p * std::exp(std::complex<double>(0.0, am * alpha)));
        if (am % 2 == 1) y = -y;
    }
    return y;
}

// numerical integral of Y_{l m}^* f(beta, alpha) Y_{l' m'} over the sphere
inline std::complex<double> sphere_integral(
    int l, int m, int lp, int mp, const std::function<double(double, double)>& f) {
    const double pi = 3.14159265358979323846;
    const int nb = 200, na = 200;
    std::complex<double> acc = 0.0;
    for (int i = 0; i < nb; ++i) {
        const double beta = pi * (i + 0.5) / nb;
        for (int k = 0; k < na; ++k) {
            const double alpha = 2 * pi * k / na;
            acc += std::conj(sph_harmonic(l, m, beta, alpha)) * f(beta, alpha) *
                   sph_harmonic(lp, mp, beta, alpha) * std::sin(beta);
        }
    }
    return acc * (pi / nb) * (2 * pi / na);
}

// --- finite differences -------------------------------------------------------

// central difference of a scalar function along dir
inline double directional_fd(const std::function<double(const Eigen::Vector3d&)>& f,
                             const Eigen::Vector3d& x, const Eigen::Vector3d& dir, double h) {
    return (f(x + h * dir) - f(x - h * dir)) / (2.0 * h);
}

// mixed second: d/da d/db
inline double mixed_fd(const std::function<double(const Eigen::Vector3d&)>& f,
                       const Eigen::Vector3d& x, const Eigen::Vector3d& a,
                       const Eigen::Vector3d& b, double h) {
    return (f(x + h * a + h * b) - f(x + h * a - h * b) - f(x - h * a + h * b) +
            f(x - h * a - h * b)) /
           (4.0 * h * h);
}

// log-log least squares slope
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// R^2 of a linear fit of y against x
inline double linear_r2(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i]; syy += y[i] * y[i];
    }
    const double cov = n * sxy - sx * sy;
    const double vx = n * sxx - sx * sx;
    const double vy = n * syy - sy * sy;
    return cov * cov / (vx * vy);
}

} // namespace oracles
