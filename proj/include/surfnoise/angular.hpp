// angular.hpp — Wigner 3-j symbols, dipole matrix elements of the linear
// rotor, and the |l,m> basis bookkeeping

#pragma once

#include <array>
#include <complex>
#include <utility>

#include <Eigen/Dense>

namespace surfnoise::lindblad {

// Wigner 3-j symbol for integer angular momenta; 0 whenever the selection
// rules fail. Racah sum with log-factorials.
double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3);

// Expansion coefficients n^(1..3) of the unit dipole direction between
// |l,m> and |l',m'>; nonzero only for |l-l'| = 1 and m-m' in {-1,0,+1}.
struct DipoleCoefficients {
    std::complex<double> n1{0.0, 0.0};
    std::complex<double> n2{0.0, 0.0};
    std::complex<double> n3{0.0, 0.0};
};
DipoleCoefficients dipole_coefficients(int l, int m, int lp, int mp);

// States |l,m>, l = 0..l_max, m = -l..l, index l^2 + l + m.
struct AngularMomentumBasis {
    int l_max = 0;

    int dimension() const { return (l_max + 1) * (l_max + 1); }
    int index(int l, int m) const;
    std::pair<int, int> labels(int index) const;
    // E_l = hbar^2 l(l+1) / (2 I)
    double energy(int l, double inertia) const;
    // transition frequency of the l -> l+1 manifold: hbar (l+1) / I
    double transition_frequency(int l, double inertia) const;
};

// Lowering-sector operators n_{l,i}: sum_{m,m'} n^(i)_{l m, l+1 m'} |l,m><l+1,m'|
std::array<Eigen::MatrixXcd, 3> rotor_dipole_operators(const AngularMomentumBasis& basis, int l);

} // namespace surfnoise::lindblad
