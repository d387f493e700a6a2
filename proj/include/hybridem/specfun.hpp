#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"

// Cylinder functions, Gauss-Legendre rules and the closed-form line
// integrals that feed the boundary-operator assembly.

namespace hybridem {

using cplx = std::complex<double>;

// ---------------------------------------------------------------------------
// Bessel and Hankel functions.
//
// Real arguments delegate to the libm cylinder functions, which hold close
// to machine accuracy over the argument range used here.  The complex path
// is needed for lossy media only and accepts arguments in the lower half
// plane: an ascending series below |z| = 12 (long double accumulation to
// absorb the cancellation between J and Y) and the large-argument expansion
// of the outgoing Hankel function beyond.  Tested envelope: 1e-8 <= |z| <=
// 2e4 with arg(z) in [-0.3 pi, 0.1], which covers every realizable kp since
// lossy wavenumbers stay above the good-conductor limit arg(k) = -pi/4.
// Relative accuracy within the envelope: better than 1e-8 near |z| = 12 at
// the steepest tested argument, tightening to ~1e-12 near the real axis.

inline double bessel_j(int n, double x) {
    if (n == 0) return j0(x);
    if (n == 1) return j1(x);
    return jn(n, x);
}

inline double bessel_y(int n, double x) {
    if (x <= 0.0) throw std::domain_error("bessel_y requires x > 0");
    if (n == 0) return y0(x);
    if (n == 1) return y1(x);
    return yn(n, x);
}

// Hankel function of the second kind, J - jY, real argument.
inline cplx hankel2(int n, double x) {
    return {bessel_j(n, x), -bessel_y(n, x)};
}

namespace detail {

inline constexpr double euler_gamma = 0.57721566490153286061;
using cplxl = std::complex<long double>;

// Ascending series for J0, J1, Y0, Y1 of complex argument.
inline void bessel_series(cplxl z, int order, cplxl& jv, cplxl& yv) {
    const long double pil = 3.14159265358979323846264338328L;
    cplxl q = 0.25L * z * z;  // (z/2)^2
    cplxl lg = std::log(0.5L * z) + (long double)euler_gamma;
    if (order == 0) {
        cplxl term(1.0L, 0.0L), j(1.0L, 0.0L), h(0.0L, 0.0L);
        long double hm = 0.0L;
        for (int m = 1; m < 400; ++m) {
            term *= -q / (long double)(m * m);
            hm += 1.0L / m;
            j += term;
            h += term * hm;
            if (std::abs(term) < 1e-22L * (std::abs(j) + 1e-30L)) break;
        }
        jv = j;
        yv = (2.0L / pil) * (lg * j - h);
    } else {
        cplxl term = 0.5L * z, j = term, h = term;  // h accumulates (H_m + H_{m+1}) terms
        long double hm = 0.0L, hm1 = 1.0L;
        h = term * (hm + hm1);
        for (int m = 1; m < 400; ++m) {
            term *= -q / (long double)(m * (m + 1));
            hm += 1.0L / m;
            hm1 += 1.0L / (m + 1);
            j += term;
            h += term * (hm + hm1);
            if (std::abs(term) < 1e-22L * (std::abs(j) + 1e-30L)) break;
        }
        jv = j;
        yv = (2.0L / pil) * lg * j - (2.0L / pil) / z - (1.0L / pil) * h;
    }
}

// Large-argument expansion of H_n^(2), truncated at the smallest term.
inline cplx hankel2_asymptotic(int n, cplx z) {
    const long double pil = 3.14159265358979323846264338328L;
    cplxl zl(z.real(), z.imag());
    long double fournu2 = 4.0L * n * n;
    cplxl sum(1.0L, 0.0L), term(1.0L, 0.0L);
    long double best = 1e30L;
    cplxl mj(0.0L, -1.0L);
    for (int k = 0; k < 40; ++k) {
        long double odd = 2.0L * k + 1.0L;
        term *= (fournu2 - odd * odd) / (8.0L * (k + 1.0L));
        term *= mj / zl;
        long double mag = std::abs(term);
        if (mag >= best) break;  // divergent tail reached
        best = mag;
        sum += term;
        if (mag < 1e-20L * std::abs(sum)) break;
    }
    cplxl phase = zl - (0.5L * n + 0.25L) * pil;
    cplxl mjphase(phase.imag(), -phase.real());  // -j * phase
    cplxl val = std::sqrt(2.0L / (pil * zl)) * std::exp(mjphase) * sum;
    return {(double)val.real(), (double)val.imag()};
}

}  // namespace detail

// Hankel function of the second kind for complex argument, orders 0 and 1.
inline cplx hankel2(int n, cplx z) {
    if (n != 0 && n != 1) throw std::domain_error("complex hankel2 supports orders 0 and 1");
    if (!(std::abs(z) > 0.0)) throw std::domain_error("hankel2 requires z != 0");
    if (z.imag() == 0.0 && z.real() > 0.0) return hankel2(n, z.real());
    if (std::abs(z) < 12.0) {
        detail::cplxl jv, yv;
        detail::bessel_series(detail::cplxl(z.real(), z.imag()), n, jv, yv);
        detail::cplxl h = jv - detail::cplxl(0.0L, 1.0L) * yv;
        return {(double)h.real(), (double)h.imag()};
    }
    return detail::hankel2_asymptotic(n, z);
}

// Leading small-argument forms of H_0^(2) and H_1^(2).  Used both by the
// closed-form panel integrals and by the near-singular kernel splitting.
inline cplx hankel2_small(int n, cplx z) {
    const double pi = 3.14159265358979323846;
    const double gamma_exp = std::exp(detail::euler_gamma);  // 1.7810724...
    if (n == 0) return 1.0 - cplx(0.0, 2.0 / pi) * std::log(gamma_exp * z / 2.0);
    if (n == 1) return 0.5 * z + cplx(0.0, 2.0 / pi) / z;
    throw std::domain_error("hankel2_small supports orders 0 and 1");
}

// ---------------------------------------------------------------------------
// Gauss-Legendre rules.

struct GaussRule {
    std::vector<double> x;  // abscissas
    std::vector<double> w;  // weights
};

namespace detail {

inline GaussRule compute_gauss_legendre(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    const double pi = 3.14159265358979323846;
    int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(pi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            // Legendre recurrence for P_n(x) and its derivative.
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    if (n % 2 == 1) r.x[n / 2] = 0.0;
    return r;
}

}  // namespace detail

// Rule on [-1, 1], cached per point count.
inline const GaussRule& gauss_legendre(int n) {
    if (n < 1 || n > 64) throw std::domain_error("gauss_legendre supports 1..64 points");
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
    return it->second;
}

// Rule mapped onto [a, b].
inline GaussRule gauss_legendre(int n, double a, double b) {
    const GaussRule& base = gauss_legendre(n);
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    double mid = 0.5 * (a + b), hl = 0.5 * (b - a);
    for (int i = 0; i < n; ++i) {
        r.x[i] = mid + hl * base.x[i];
        r.w[i] = hl * base.w[i];
    }
    return r;
}

// ---------------------------------------------------------------------------
// Closed-form line integrals over a straight segment.
//
// With s the tangential coordinate relative to the observation point's
// projection and rho(s) = sqrt(p0^2 + s^2), the six primitives are
//   i1 = int s ds          i2 = int s ln(rho) ds    i3 = int ln(rho) ds
//   i4 = int ds            i5 = int s / rho^2 ds    i6 = int 1 / rho^2 ds
// taken over s in [l1, l2].

struct LineIdentities {
    double i1, i2, i3, i4, i5, i6;
    // i5/i6 lose their finite values for some on-line placements of the
    // observation point; the flags mark which entries are usable.
    bool i5_defined = true;
    bool i6_defined = true;
};

namespace detail {

inline double xlnx(double x) {  // x ln|x| with the limit at 0
    double a = std::abs(x);
    return a > 0.0 ? x * std::log(a) : 0.0;
}

inline double x2lnx(double x) {  // x^2 ln|x| with the limit at 0
    double a = std::abs(x);
    return a > 0.0 ? x * x * std::log(a) : 0.0;
}

struct Identities14 {
    double i1, i2, i3, i4;
};

// First four primitives; these stay finite for every placement of the
// observation point, including on the segment and at its endpoints.
inline Identities14 identities_i14(const SegmentGeometry& g) {
    Identities14 r;
    double on_tol = 1e-12 * segment_scale(g);
    r.i1 = 0.5 * (g.l2 * g.l2 - g.l1 * g.l1);
    r.i4 = g.l2 - g.l1;
    double t2 = g.rho2 > 0.0 ? g.rho2 * g.rho2 * std::log(g.rho2) : 0.0;
    double t1 = g.rho1 > 0.0 ? g.rho1 * g.rho1 * std::log(g.rho1) : 0.0;
    r.i2 = 0.5 * (t2 - t1 - r.i1);
    if (g.p0 > on_tol) {
        r.i3 = g.l2 * std::log(g.rho2) - g.l1 * std::log(g.rho1) +
               g.p0 * (std::atan(g.l2 / g.p0) - std::atan(g.l1 / g.p0)) - r.i4;
    } else {
        // observation point on the supporting line: arctangent terms vanish
        r.i3 = xlnx(g.l2) - xlnx(g.l1) - r.i4;
    }
    return r;
}

}  // namespace detail

// All six primitives.  i1..i4 stay finite for every placement of the
// observation point.  On the supporting line i6 diverges unless the point
// lies outside the closed segment, and i5 diverges at the endpoints; those
// entries come back as NaN with their defined-flag cleared.  For a point
// strictly inside the segment i5 is the principal value.  Callers that
// only multiply i5/i6 by the vanishing normal offset must short-circuit
// before coming here.
inline LineIdentities identities_I(const SegmentGeometry& g) {
    double on_tol = 1e-12 * segment_scale(g);
    double nan = std::numeric_limits<double>::quiet_NaN();
    detail::Identities14 a = detail::identities_i14(g);
    LineIdentities r{a.i1, a.i2, a.i3, a.i4, 0.0, 0.0, true, true};
    if (g.p0 > on_tol) {
        r.i5 = 0.5 * (std::log(g.rho2 * g.rho2) - std::log(g.rho1 * g.rho1));
        r.i6 = (std::atan(g.l2 / g.p0) - std::atan(g.l1 / g.p0)) / g.p0;
        return r;
    }
    if (g.rho1 <= on_tol || g.rho2 <= on_tol) {  // endpoint touch
        r.i5 = nan;
        r.i6 = nan;
        r.i5_defined = r.i6_defined = false;
        return r;
    }
    r.i5 = 0.5 * (std::log(g.rho2 * g.rho2) - std::log(g.rho1 * g.rho1));
    if (g.l1 < 0.0 && g.l2 > 0.0) {  // strictly inside: i5 is the principal value
        r.i6 = nan;
        r.i6_defined = false;
        return r;
    }
    // on the supporting line, outside the segment
    r.i6 = 1.0 / g.l1 - 1.0 / g.l2;
    return r;
}

// ---------------------------------------------------------------------------
// Closed-form half-rooftop panel integrals of the small-argument kernels.
//
// The source density is one half of a rooftop on the segment: "rising"
// grows linearly 0 -> 1 from r1 to r2, "falling" decays 1 -> 0.  Both
// integrals use the leading small-argument Hankel forms above, which keeps
// every term expressible through the six line primitives.

// jwmu * int G(r, r') f_half(r') ds'  with  G = -j/4 H_0^(2)(k rho).
inline cplx integrate_G_halfrooftop(const SegmentGeometry& g, cplx k, cplx jwmu, bool rising) {
    const double pi = 3.14159265358979323846;
    detail::Identities14 id = detail::identities_i14(g);
    const double gamma_exp = std::exp(detail::euler_gamma);
    cplx c0 = 1.0 - cplx(0.0, 2.0 / pi) * std::log(gamma_exp * k / 2.0);
    double lref = rising ? g.l1 : g.l2;
    double sgn = rising ? 1.0 : -1.0;
    cplx core = c0 * (id.i1 - lref * id.i4) - cplx(0.0, 2.0 / pi) * (id.i2 - lref * id.i3);
    return jwmu * cplx(0.0, -0.25) * (sgn / g.len) * core;
}

// int k (rho_vec . n / rho) G'(r, r') f_half(r') ds'  with the in-plane
// vector rho_vec taken source minus observation and G' = -j/4 H_1^(2).
// The integrand is proportional to the signed normal offset, so the value
// is defined as zero when the observation point lies on the supporting
// line; i5/i6 never get evaluated there.
inline cplx integrate_gradG_halfrooftop(const SegmentGeometry& g, cplx k, bool rising) {
    const double pi = 3.14159265358979323846;
    double on_tol = 1e-12 * segment_scale(g);
    if (g.p0 <= on_tol) return 0.0;
    LineIdentities id = identities_I(g);
    double lref = rising ? g.l1 : g.l2;
    double sgn = rising ? 1.0 : -1.0;
    cplx core = cplx(0.0, 0.125) * k * k * (id.i1 - lref * id.i4) -
                (0.5 / pi) * (id.i5 - lref * id.i6);
    return (sgn * g.h / g.len) * core;
}

}  // namespace hybridem
