#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "hybridem/geometry.hpp"
#include "hybridem/oracle.hpp"

// Shared helpers for the test binaries: slow independent Bessel evaluations
// through integral representations, and a deterministic generator of segment
// and observation-point configurations.

namespace testutil {

using hybridem::cplx;
using hybridem::Point2;
using hybridem::SegmentGeometry;

// J_n(x) through its cosine integral representation, trapezoid rule (the
// integrand is entire and periodic enough for geometric convergence once the
// point count clears the argument).
inline double slow_bessel_j(int n, double x) {
    const double pi = 3.14159265358979323846;
    int m = 256 + 4 * (int)std::abs(x);
    long double sum = 0.0L;
    for (int i = 0; i <= m; ++i) {
        long double th = pi * (long double)i / m;
        long double v = std::cos(n * th - (long double)x * std::sin(th));
        sum += (i == 0 || i == m) ? 0.5L * v : v;
    }
    return (double)(sum / m);
}

// Y_n(x) through the Schlafli representation: an oscillatory part plus an
// exponentially decaying tail integral.  Unlike the J integrand the
// oscillatory part has no reflection symmetry, so it gets the adaptive rule
// rather than a trapezoid.
inline double slow_bessel_y(int n, double x) {
    const double pi = 3.14159265358979323846;
    double part1 = hybridem::oracle::adaptive_line_integral(
                       [&](double th) { return cplx(std::sin(x * std::sin(th) - n * th), 0.0); },
                       0.0, pi, 1e-14)
                       .real();
    // substitute u = sinh t in the tail integral
    auto tail = [&](double u) {
        double s = std::sqrt(1.0 + u * u);
        double enu = n == 0 ? 2.0 : (u + s) - 1.0 / (u + s);
        return cplx(enu * std::exp(-x * u) / s, 0.0);
    };
    double cut = 60.0 / x;
    cplx part2 = hybridem::oracle::adaptive_line_integral(tail, 0.0, cut, 1e-13, {1.0 / x});
    return (part1 - part2.real()) / pi;
}

// ---------------------------------------------------------------------------
// Deterministic random segment/observation configurations.

enum class ObsClass { generic, near, on_segment, on_line_outside, endpoint };

struct GeomSample {
    Point2 r1, r2, obs;
    ObsClass cls;
};

class GeomGen {
  public:
    explicit GeomGen(uint64_t seed) : rng_(seed) {}

    GeomSample sample(ObsClass cls) {
        GeomSample s;
        s.cls = cls;
        double len = uni(0.05, 1.5);
        double ang = uni(0.0, 6.283185307179586);
        s.r1 = {uni(-1.0, 1.0), uni(-1.0, 1.0)};
        s.r2 = s.r1 + len * Point2{std::cos(ang), std::sin(ang)};
        Point2 tau = {std::cos(ang), std::sin(ang)};
        Point2 nrm = {tau.y, -tau.x};
        switch (cls) {
            case ObsClass::generic: {
                double t = uni(-1.0, 2.0);
                double p = uni(0.02, 3.0) * len * (rng_() % 2 ? 1.0 : -1.0);
                s.obs = s.r1 + (t * len) * tau + p * nrm;
                break;
            }
            case ObsClass::near: {
                double t = uni(-0.5, 1.5);
                double p = std::pow(10.0, uni(-6.0, -2.0)) * len * (rng_() % 2 ? 1.0 : -1.0);
                s.obs = s.r1 + (t * len) * tau + p * nrm;
                break;
            }
            case ObsClass::on_segment: {
                double t = uni(0.03, 0.97);
                s.obs = s.r1 + (t * len) * tau;
                break;
            }
            case ObsClass::on_line_outside: {
                double t = rng_() % 2 ? uni(-1.5, -0.03) : uni(1.03, 2.5);
                s.obs = s.r1 + (t * len) * tau;
                break;
            }
            case ObsClass::endpoint:
                s.obs = rng_() % 2 ? s.r1 : s.r2;
                break;
        }
        return s;
    }

    SegmentGeometry geometry(const GeomSample& s) {
        return hybridem::make_segment_geometry(s.obs, s.r1, s.r2);
    }

    double uni(double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(rng_);
    }

  private:
    std::mt19937_64 rng_;
};

// Relative difference with a per-quantity absolute floor.
inline double rel_diff(double a, double b, double floor_scale = 1e-300) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor_scale});
}

inline double rel_diff(cplx a, cplx b, double floor_scale = 1e-300) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor_scale});
}

}  // namespace testutil
