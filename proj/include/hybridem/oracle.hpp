#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <vector>

#include "geometry.hpp"
#include "incident.hpp"
#include "material.hpp"
#include "specfun.hpp"

// Reference solutions used to validate the solver: an adaptive line
// integrator for the panel kernels and the modal series for a circular
// cylinder.  Nothing here reuses the production assembly routines; the
// only shared code is the cylinder-function evaluation in specfun.hpp.

namespace hybridem {
namespace oracle {

// ---------------------------------------------------------------------------
// Adaptive quadrature: 15-point Kronrod extension of 7-point Gauss with
// recursive bisection.  Node and weight constants are the standard ones.

namespace detail {

inline constexpr double gk_xk[8] = {
    0.991455371120812639206854697526, 0.949107912342758524526189684048,
    0.864864423359769072789712788641, 0.741531185599394439863864773281,
    0.586087235467691130294144838259, 0.405845151377397166906606412077,
    0.207784955007898467600689403773, 0.0};
inline constexpr double gk_wk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double gk_wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class F>
inline void gk15(F&& f, double a, double b, std::complex<double>& value, double& err) {
    double mid = 0.5 * (a + b), hl = 0.5 * (b - a);
    std::complex<double> fc = f(mid);
    std::complex<double> kron = gk_wk[7] * fc;
    std::complex<double> gauss = gk_wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        std::complex<double> fl = f(mid - hl * gk_xk[i]);
        std::complex<double> fr = f(mid + hl * gk_xk[i]);
        kron += gk_wk[i] * (fl + fr);
        if (i % 2 == 1) gauss += gk_wg[i / 2] * (fl + fr);
    }
    value = hl * kron;
    err = std::abs(hl * (kron - gauss));
}

// Children inherit the parent's tolerance: the Kronrod estimate is already
// conservative, and shrinking the target with depth makes machine-noise
// estimates on tiny subintervals unsatisfiable.
template <class F>
inline std::complex<double> adapt(F&& f, double a, double b, double tol, int depth) {
    std::complex<double> v;
    double err;
    gk15(f, a, b, v, err);
    if (err <= tol || depth <= 0) return v;
    if (b - a < 1e-15 * (std::abs(a) + std::abs(b) + 1.0)) return v;
    double mid = 0.5 * (a + b);
    return adapt(f, a, mid, tol, depth - 1) + adapt(f, mid, b, tol, depth - 1);
}

}  // namespace detail

// Integrates f over [a, b] to the requested relative accuracy, splitting at
// the caller-supplied interior break points first (typically the projection
// of the observation point, where kernels peak or kink).
template <class F>
inline std::complex<double> adaptive_line_integral(F&& f, double a, double b, double rel_tol = 1e-12,
                                                   const std::vector<double>& breaks = {},
                                                   int max_depth = 52) {
    std::vector<double> pts{a};
    for (double s : breaks)
        if (s > a && s < b) pts.push_back(s);
    pts.push_back(b);
    double rough = 0.0;  // scale estimate that survives cancellation across pieces
    for (size_t i = 0; i + 1 < pts.size(); ++i) {
        std::complex<double> v;
        double err;
        detail::gk15(f, pts[i], pts[i + 1], v, err);
        rough += std::abs(v) + err;
    }
    double tol = rel_tol * std::max(rough, 1e-280);
    std::complex<double> total = 0.0;
    for (size_t i = 0; i + 1 < pts.size(); ++i)
        total += detail::adapt(f, pts[i], pts[i + 1], tol / (pts.size() - 1), max_depth);
    return total;
}

// ---------------------------------------------------------------------------
// Reference evaluation of the panel integrals.

enum class PanelKernel {
    green,             // jwmu (-j/4) H02(k rho) f_half
    green_small,       // same with the leading small-argument H0 form
    grad_green,        // k ((r'-r).n / rho) (-j/4) H12(k rho) f_half
    grad_green_small,  // same with the leading small-argument H1 form
    ident_i1,
    ident_i2,
    ident_i3,
    ident_i4,
    ident_i5,
    ident_i6
};

namespace detail {

inline double analytic_int_ln(double a, double b) {  // int ln|s| ds
    auto prim = [](double s) { return s == 0.0 ? 0.0 : s * std::log(std::abs(s)) - s; };
    return prim(b) - prim(a);
}

inline double analytic_int_sln(double a, double b) {  // int s ln|s| ds
    auto prim = [](double s) {
        return s == 0.0 ? 0.0 : 0.5 * s * s * std::log(std::abs(s)) - 0.25 * s * s;
    };
    return prim(b) - prim(a);
}

}  // namespace detail

// Adaptive evaluation of one panel kernel against one half-rooftop.  For
// observation points on the segment the logarithmic part is subtracted and
// integrated in closed form; i5 on the segment is the principal value and
// i6 there has no finite value (domain_error).
inline std::complex<double> adaptive_panel_integral(const SegmentGeometry& g, PanelKernel kernel,
                                                    cplx k = 1.0, cplx jwmu = 1.0, bool rising = true,
                                                    double rel_tol = 1e-12) {
    const double pi = 3.14159265358979323846;
    double on_tol = 1e-12 * segment_scale(g);
    bool on_line = g.p0 <= on_tol;
    bool straddles = g.l1 < 0.0 && g.l2 > 0.0;
    auto rho = [&](double s) { return std::hypot(g.h, s); };
    auto fh = [&](double s) { return rising ? (s - g.l1) / g.len : (g.l2 - s) / g.len; };
    std::vector<double> breaks = {0.0};

    switch (kernel) {
        case PanelKernel::ident_i1:
            return adaptive_line_integral([&](double s) { return cplx(s, 0.0); }, g.l1, g.l2, rel_tol);
        case PanelKernel::ident_i2:
            return adaptive_line_integral([&](double s) { return cplx(s * std::log(rho(s)), 0.0); },
                                          g.l1, g.l2, rel_tol, breaks);
        case PanelKernel::ident_i3: {
            if (!on_line)
                return adaptive_line_integral([&](double s) { return cplx(std::log(rho(s)), 0.0); },
                                              g.l1, g.l2, rel_tol, breaks);
            cplx rest = adaptive_line_integral(
                [&](double s) { return cplx(std::log(rho(s)) - std::log(std::abs(s)), 0.0); }, g.l1,
                g.l2, rel_tol, breaks);
            return rest + detail::analytic_int_ln(g.l1, g.l2);
        }
        case PanelKernel::ident_i4:
            return cplx(g.l2 - g.l1, 0.0);
        case PanelKernel::ident_i5: {
            auto f = [&](double s) { return cplx(s / (g.h * g.h + s * s), 0.0); };
            if (!straddles) return adaptive_line_integral(f, g.l1, g.l2, rel_tol, breaks);
            // the symmetric window around zero cancels exactly (odd integrand)
            double d = std::min(-g.l1, g.l2);
            cplx tail = 0.0;
            if (-g.l1 > d) tail += adaptive_line_integral(f, g.l1, -d, rel_tol);
            if (g.l2 > d) tail += adaptive_line_integral(f, d, g.l2, rel_tol);
            return tail;
        }
        case PanelKernel::ident_i6: {
            if (on_line && straddles)
                throw std::domain_error("i6 has no finite value on the open segment");
            return adaptive_line_integral([&](double s) { return cplx(1.0 / (g.h * g.h + s * s), 0.0); },
                                          g.l1, g.l2, rel_tol, breaks);
        }
        case PanelKernel::green:
        case PanelKernel::green_small: {
            bool small = kernel == PanelKernel::green_small;
            auto kern = [&](double s) {
                cplx h0 = small ? hankel2_small(0, k * rho(s)) : hankel2(0, k * rho(s));
                return jwmu * cplx(0.0, -0.25) * h0 * fh(s);
            };
            if (!(on_line && g.l1 <= 0.0 && g.l2 >= 0.0))
                return adaptive_line_integral(kern, g.l1, g.l2, rel_tol, breaks);
            // subtract the logarithmic part c(s) ln|s| and add it back in closed form
            cplx c = jwmu * (-0.5 / pi);
            auto smooth = [&](double s) { return kern(s) - c * fh(s) * std::log(std::abs(s)); };
            double alpha = rising ? -g.l1 / g.len : g.l2 / g.len;
            double beta = (rising ? 1.0 : -1.0) / g.len;  // f_half(s) = alpha + beta s
            cplx logpart = c * (alpha * detail::analytic_int_ln(g.l1, g.l2) +
                                beta * detail::analytic_int_sln(g.l1, g.l2));
            return adaptive_line_integral(smooth, g.l1, g.l2, rel_tol, breaks) + logpart;
        }
        case PanelKernel::grad_green:
        case PanelKernel::grad_green_small: {
            bool small = kernel == PanelKernel::grad_green_small;
            auto kern = [&](double s) {
                double rr = rho(s);
                cplx h1 = small ? hankel2_small(1, k * rr) : hankel2(1, k * rr);
                return k * (-g.h / rr) * cplx(0.0, -0.25) * h1 * fh(s);
            };
            if (on_line) return 0.0;  // integrand carries the vanishing normal offset
            return adaptive_line_integral(kern, g.l1, g.l2, rel_tol, breaks);
        }
    }
    throw std::logic_error("unreachable panel kernel");
}

// ---------------------------------------------------------------------------
// Modal series for a homogeneous circular cylinder centred at the origin,
// illuminated by a plane wave in a lossless background.

namespace detail {

// J_n(z) for n = 0..nmax by backward recurrence.  The scale is fixed against
// sum_n J_n(z) p^n = exp(p z) with p = +/-j chosen so |exp(p z)| = e^{|Im z|}:
// that sum is as large as its largest terms, so the normalization keeps full
// relative accuracy for lossy arguments, where the textbook even-order sum
// (which equals 1) loses e^{2|Im z|} to cancellation.
inline std::vector<cplx> bessel_j_backward(int nmax, cplx z) {
    if (std::abs(z) < 1e-12) {
        std::vector<cplx> j(nmax + 1, 0.0);
        j[0] = 1.0;
        return j;
    }
    double az = std::abs(z);
    int m = std::max(nmax, (int)std::ceil(az)) + 15 + (int)(12.0 * std::cbrt(std::max(az, 1.0)));
    cplx p = z.imag() <= 0.0 ? cplx(0.0, 1.0) : cplx(0.0, -1.0);
    cplx pinv = std::conj(p);
    std::vector<cplx> j(nmax + 1, 0.0);
    cplx jp1 = 0.0, jc = 1e-30;
    cplx sum = 0.0;
    cplx pw = 1.0;
    switch (m % 4) {  // pw = p^m
        case 1: pw = p; break;
        case 2: pw = p * p; break;
        case 3: pw = pinv; break;
    }
    for (int n = m; n >= 0; --n) {
        if (n <= nmax) j[n] = jc;
        sum += (n > 0 ? 2.0 : 1.0) * pw * jc;
        pw *= pinv;
        cplx jm1 = (2.0 * n / z) * jc - jp1;
        jp1 = jc;
        jc = jm1;
        if (std::abs(jc) > 1e250) {  // rescale to dodge overflow
            double inv = 1e-250;
            jc *= inv;
            jp1 *= inv;
            sum *= inv;
            for (auto& v : j) v *= inv;
        }
    }
    cplx scale = std::exp(p * z) / sum;
    for (auto& v : j) v *= scale;
    return j;
}

}  // namespace detail

struct MieSolution {
    double radius = 1.0;
    Material inner;
    Material background;
    double frequency = 0.0;
    double amplitude = 1.0;
    double incidence_rad = 0.0;

    double omega = 0.0;
    double k0 = 0.0;  // background is required lossless
    cplx k1 = 0.0;
    std::vector<cplx> a;  // scattered-mode coefficients
    std::vector<cplx> c;  // interior-mode coefficients
};

inline MieSolution mie_solve(double radius, const Material& inner, const Material& background,
                             double frequency, double amplitude = 1.0, double incidence_rad = 0.0) {
    if (background.sigma != 0.0)
        throw std::invalid_argument("modal reference requires a lossless background");
    MieSolution s;
    s.radius = radius;
    s.inner = inner;
    s.background = background;
    s.frequency = frequency;
    s.amplitude = amplitude;
    s.incidence_rad = incidence_rad;
    s.omega = 2.0 * constants::pi * frequency;
    s.k0 = wavenumber(background, s.omega).real();
    s.k1 = wavenumber(inner, s.omega);

    double x0 = s.k0 * radius;
    int nmax = (int)std::ceil(x0 + 10.0 * std::cbrt(x0) + 12.0);
    cplx x1 = s.k1 * radius;
    std::vector<cplx> jin = detail::bessel_j_backward(nmax + 1, x1);
    double m0 = s.k0 / background.mu_r;
    cplx m1 = s.k1 / inner.mu_r;
    s.a.resize(nmax + 1);
    s.c.resize(nmax + 1);
    for (int n = 0; n <= nmax; ++n) {
        double A = bessel_j(n, x0);
        double Ap = n == 0 ? -bessel_j(1, x0) : bessel_j(n - 1, x0) - n / x0 * bessel_j(n, x0);
        cplx H = hankel2(n, x0);
        cplx Hp = n == 0 ? -hankel2(1, x0) : hankel2(n - 1, x0) - (double)n / x0 * hankel2(n, x0);
        cplx B = jin[n];
        cplx Bp = n == 0 ? -jin[1] : jin[n - 1] - (double)n / x1 * jin[n];
        cplx den = m0 * B * Hp - m1 * Bp * H;
        s.a[n] = (m1 * A * Bp - m0 * B * Ap) / den;
        s.c[n] = m0 * (A * Hp - Ap * H) / den;
    }
    return s;
}

// Total field at a point (fictitious-free: the interior series inside the
// cylinder, incident plus scattered outside).
inline cplx mie_field(const MieSolution& s, Point2 r) {
    double rho = norm(r);
    double phi = std::atan2(r.y, r.x) - s.incidence_rad;
    int nmax = (int)s.a.size() - 1;
    cplx total = 0.0;
    cplx minusj(0.0, -1.0);
    cplx pw = 1.0;  // (-j)^n
    if (rho < s.radius) {
        std::vector<cplx> jin = detail::bessel_j_backward(nmax, s.k1 * rho);
        for (int n = 0; n <= nmax; ++n) {
            double en = n == 0 ? 1.0 : 2.0;
            total += en * pw * s.c[n] * jin[n] * std::cos(n * phi);
            pw *= minusj;
        }
    } else {
        // The scattered series cuts off with the a_n, so it converges at any
        // radius; the incident wave is summed in closed form instead of through
        // its cylindrical expansion, which would need ~k0*rho terms.
        total = std::exp(cplx(0.0, -s.k0 * rho * std::cos(phi)));
        for (int n = 0; n <= nmax; ++n) {
            double en = n == 0 ? 1.0 : 2.0;
            total += en * pw * s.a[n] * hankel2(n, s.k0 * rho) * std::cos(n * phi);
            pw *= minusj;
        }
    }
    return s.amplitude * total;
}

// Two-dimensional scattering width (per unit length) on a linear scale.
inline std::vector<double> mie_rcs(const MieSolution& s, const std::vector<double>& angles_deg) {
    std::vector<double> out(angles_deg.size());
    int nmax = (int)s.a.size() - 1;
    for (size_t i = 0; i < angles_deg.size(); ++i) {
        double phi = angles_deg[i] * constants::pi / 180.0 - s.incidence_rad;
        cplx f = 0.0;
        for (int n = 0; n <= nmax; ++n) {
            double en = n == 0 ? 1.0 : 2.0;
            f += en * s.a[n] * std::cos(n * phi);
        }
        out[i] = 4.0 / s.k0 * std::norm(f);
    }
    return out;
}

}  // namespace oracle
}  // namespace hybridem
