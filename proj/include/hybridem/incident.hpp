#pragma once

#include <complex>

#include "geometry.hpp"

// Incident excitation.  The solver is scalar (transverse magnetic, field
// E_z out of plane) and uses the exp(+j omega t) time convention, so a
// plane wave travelling along d carries the factor exp(-j k0 d.r).

namespace hybridem {

struct PlaneWave {
    double amplitude = 1.0;
    double angle_rad = 0.0;  // propagation direction measured from +x
    double k0 = 0.0;         // background wavenumber

    Point2 direction() const { return {std::cos(angle_rad), std::sin(angle_rad)}; }

    std::complex<double> field(Point2 r) const {
        Point2 d = direction();
        return amplitude * std::exp(std::complex<double>(0.0, -k0 * dot(d, r)));
    }

    // d/dn of the field for unit normal n.
    std::complex<double> normal_derivative(Point2 r, Point2 n) const {
        Point2 d = direction();
        return std::complex<double>(0.0, -k0 * dot(d, n)) * field(r);
    }
};

}  // namespace hybridem
