#pragma once

#include <cmath>
#include <complex>

// Bulk material description and derived electromagnetic quantities.
// Fields are time harmonic with the exp(+j omega t) convention, so lossy
// media carry a negative imaginary part in both permittivity and wavenumber.

namespace hybridem {

namespace constants {
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double c0 = 299792458.0;
inline constexpr double mu0 = 4.0 * pi * 1e-7;
inline constexpr double eps0 = 1.0 / (mu0 * c0 * c0);
}  // namespace constants

struct Material {
    double eps_r = 1.0;  // relative permittivity
    double mu_r = 1.0;   // relative permeability
    double sigma = 0.0;  // conductivity [S/m]

    bool operator==(const Material&) const = default;
};

// Complex relative permittivity eps_r - j sigma / (omega eps0).
inline std::complex<double> relative_permittivity(const Material& m, double omega) {
    return {m.eps_r, -m.sigma / (omega * constants::eps0)};
}

// Complex wavenumber omega sqrt(mu eps_c) on the branch with Im(k) <= 0,
// so that exp(-j k rho) decays with distance.
inline std::complex<double> wavenumber(const Material& m, double omega) {
    std::complex<double> eps = constants::eps0 * relative_permittivity(m, omega);
    double mu = constants::mu0 * m.mu_r;
    // mu*eps sits in the lower-right quadrant; the principal square root then
    // has Re > 0 and Im <= 0 directly.
    return omega * std::sqrt(mu * eps);
}

inline std::complex<double> jomega_mu(const Material& m, double omega) {
    return std::complex<double>(0.0, omega * constants::mu0 * m.mu_r);
}

// Penetration depth of a good conductor.
inline double skin_depth(const Material& m, double omega) {
    return std::sqrt(2.0 / (omega * constants::mu0 * m.mu_r * m.sigma));
}

}  // namespace hybridem
