#pragma once
// Surface admittance operators on closed contours.
//
// A homogeneous object is characterized by the map taking the tangential
// electric field on its boundary to the tangential magnetic field of the
// interior solution.  Discretized with rooftop functions on the polygon,
// that map becomes a dense matrix Y acting on nodal coefficients, obtained
// from the Galerkin single-layer matrix P, double-layer matrix U and Gram
// matrix L as the solve P * Y = T*L - U.  Subtracting the operator of the
// background medium yields the differential operator Y_s; J = Y_s * E is
// the equivalent surface current density that reproduces the object's
// exterior scattering when the interior is replaced by background material.
//
// Near panel pairs are integrated as the closed-form small-argument part
// plus Gauss quadrature of the smooth remainder kernel; far pairs use
// nested Gauss rules.  All rules are composites whose chunk count scales
// with |k| * segment length, so strongly lossy media (skin-effect regime)
// stay resolved without any special casing.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "material.hpp"
#include "mesh.hpp"
#include "specfun.hpp"

namespace hybridem {

struct ContourGeometry {
    std::vector<Point2> nodes;   // CCW closed polygon; segment i: nodes[i] -> nodes[i+1 mod n]
    std::vector<double> seg_len;
    std::vector<Point2> seg_tau;
    std::vector<Point2> seg_nrm;  // outward for a CCW polygon
    int size = 0;
    int contour_id = -1;
};

inline ContourGeometry make_contour_geometry(const std::vector<Point2>& pts, int contour_id = -1) {
    if (pts.size() < 3) throw std::invalid_argument("contour needs at least 3 nodes");
    ContourGeometry g;
    g.nodes = pts;
    g.size = (int)pts.size();
    g.contour_id = contour_id;
    if (polygon_signed_area(pts) <= 0.0)
        throw std::invalid_argument("contour must be counterclockwise");
    g.seg_len.resize(g.size);
    g.seg_tau.resize(g.size);
    g.seg_nrm.resize(g.size);
    for (int i = 0; i < g.size; ++i) {
        Point2 d = pts[(i + 1) % g.size] - pts[i];
        double l = norm(d);
        if (l <= 0.0)
            throw std::invalid_argument("zero-length segment at node " + std::to_string(i));
        g.seg_len[i] = l;
        g.seg_tau[i] = (1.0 / l) * d;
        g.seg_nrm[i] = right_normal(g.seg_tau[i]);
    }
    return g;
}

inline ContourGeometry make_contour_geometry(const Mesh& m, int contour_id) {
    if (contour_id < 0 || contour_id >= (int)m.contours.size())
        throw std::invalid_argument("contour id out of range");
    return make_contour_geometry(contour_points(m, m.contours[contour_id]), contour_id);
}

// Gram matrix of the rooftop basis: cyclic tridiagonal.
inline Eigen::MatrixXd assemble_L(const ContourGeometry& g) {
    int n = g.size;
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (int m = 0; m < n; ++m) {
        double lm = g.seg_len[m];
        double lprev = g.seg_len[(m + n - 1) % n];
        L(m, m) = (lprev + lm) / 3.0;
        int next = (m + 1) % n;
        L(m, next) += lm / 6.0;
        L(next, m) += lm / 6.0;
    }
    return L;
}

enum class PanelPath { automatic, forced_analytic, forced_quadrature };

namespace detail {

struct PanelRule {
    std::vector<double> t;  // parameter in [0, 1]
    std::vector<double> w;  // weights summing to 1
};

// Composite 8-point Gauss rule; chunk count follows the electrical length
// so the kernel's oscillation/decay scale 1/|k| is always sampled.
inline PanelRule panel_rule(double electrical_len, int min_chunks = 1) {
    int chunks = std::max((int)std::ceil(electrical_len / 2.5), min_chunks);
    chunks = std::clamp(chunks, 1, 64);
    const GaussRule& base = gauss_legendre(8);
    PanelRule r;
    r.t.reserve(8 * chunks);
    r.w.reserve(8 * chunks);
    double width = 1.0 / chunks;
    for (int c = 0; c < chunks; ++c) {
        double a = c * width;
        for (int i = 0; i < 8; ++i) {
            r.t.push_back(a + width * 0.5 * (base.x[i] + 1.0));
            r.w.push_back(base.w[i] * width * 0.5);
        }
    }
    return r;
}

inline cplx h2_scaled(int n, cplx k, double rho) {
    if (k.imag() == 0.0) return hankel2(n, k.real() * rho);
    return hankel2(n, k * rho);
}

// G = -j/4 H_0^(2)(k rho), with the jwmu factor folded in.
inline cplx green_exact(cplx k, cplx jwmu, double rho) {
    cplx z = k * rho;
    if (std::abs(z) < 1e-6) return jwmu * cplx(0.0, -0.25) * hankel2_small(0, z);
    return jwmu * cplx(0.0, -0.25) * h2_scaled(0, k, rho);
}

inline cplx green_remainder(cplx k, cplx jwmu, double rho) {
    cplx z = k * rho;
    if (std::abs(z) < 1e-6) return 0.0;
    return jwmu * cplx(0.0, -0.25) * (h2_scaled(0, k, rho) - hankel2_small(0, z));
}

// -dG/dn' = (jk/4) (d/rho) H_1^(2)(k rho), d = (r_obs - r_src) . n_src
inline cplx dlayer_exact(cplx k, double rho, double d) {
    cplx z = k * rho;
    if (std::abs(z) < 1e-6) return cplx(0.0, 0.25) * k * (d / rho) * hankel2_small(1, z);
    return cplx(0.0, 0.25) * k * (d / rho) * h2_scaled(1, k, rho);
}

inline cplx dlayer_remainder(cplx k, double rho, double d) {
    cplx z = k * rho;
    if (std::abs(z) < 1e-6) return 0.0;
    return cplx(0.0, 0.25) * k * (d / rho) * (h2_scaled(1, k, rho) - hankel2_small(1, z));
}

inline double min_endpoint_distance(const ContourGeometry& g, int a, int b) {
    Point2 a1 = g.nodes[a], a2 = g.nodes[(a + 1) % g.size];
    Point2 b1 = g.nodes[b], b2 = g.nodes[(b + 1) % g.size];
    return std::min(std::min(dist(a1, b1), dist(a1, b2)), std::min(dist(a2, b1), dist(a2, b2)));
}

// Shared Galerkin assembler for the single- and double-layer matrices.
// Rooftop halves on segment b belong to basis b (falling) and b+1 (rising);
// the same split applies to the test side on segment a.
inline Eigen::MatrixXcd assemble_galerkin(const ContourGeometry& g, cplx k, cplx jwmu,
                                          bool double_layer, PanelPath path) {
    int n = g.size;
    double absk = std::abs(k);
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
    for (int a = 0; a < n; ++a) {
        double la = g.seg_len[a];
        Point2 a1 = g.nodes[a];
        Point2 ta = g.seg_tau[a];
        PanelRule outer = panel_rule(absk * la, 2);
        for (int b = 0; b < n; ++b) {
            double lb = g.seg_len[b];
            Point2 b1 = g.nodes[b], b2 = g.nodes[(b + 1) % n];
            Point2 nb = g.seg_nrm[b];
            if (double_layer && a == b) continue;  // flat panel: (r-r') . n' = 0
            double dmin = a == b ? 0.0 : min_endpoint_distance(g, a, b);
            bool near = a == b || dmin < 1.5 * std::max(la, lb) || absk * dmin < 0.1;
            if (path == PanelPath::forced_analytic) near = true;
            if (path == PanelPath::forced_quadrature) near = false;
            cplx acc[2][2] = {{0.0, 0.0}, {0.0, 0.0}};  // [test fall/rise][basis fall/rise]
            if (near) {
                bool with_remainder = path == PanelPath::automatic;
                PanelRule inner = panel_rule(absk * lb);
                for (size_t q = 0; q < outer.t.size(); ++q) {
                    double tq = outer.t[q];
                    Point2 obs = a1 + (tq * la) * ta;
                    SegmentGeometry sg = make_segment_geometry(obs, b1, b2);
                    cplx rise, fall;
                    if (double_layer) {
                        rise = integrate_gradG_halfrooftop(sg, k, true);
                        fall = integrate_gradG_halfrooftop(sg, k, false);
                    } else {
                        rise = integrate_G_halfrooftop(sg, k, jwmu, true);
                        fall = integrate_G_halfrooftop(sg, k, jwmu, false);
                    }
                    if (with_remainder) {
                        for (size_t s = 0; s < inner.t.size(); ++s) {
                            double ts = inner.t[s];
                            Point2 src = b1 + ts * (b2 - b1);
                            double rho = dist(obs, src);
                            cplx rem;
                            if (double_layer) {
                                double d = dot(obs - src, nb);
                                rem = dlayer_remainder(k, rho, d);
                            } else {
                                rem = green_remainder(k, jwmu, rho);
                            }
                            cplx c = inner.w[s] * lb * rem;
                            rise += c * ts;
                            fall += c * (1.0 - ts);
                        }
                    }
                    double wt = outer.w[q] * la;
                    acc[0][0] += wt * (1.0 - tq) * fall;
                    acc[0][1] += wt * (1.0 - tq) * rise;
                    acc[1][0] += wt * tq * fall;
                    acc[1][1] += wt * tq * rise;
                }
            } else {
                PanelRule inner = panel_rule(absk * lb);
                for (size_t q = 0; q < outer.t.size(); ++q) {
                    Point2 obs = a1 + (outer.t[q] * la) * ta;
                    cplx rise = 0.0, fall = 0.0;
                    for (size_t s = 0; s < inner.t.size(); ++s) {
                        double ts = inner.t[s];
                        Point2 src = b1 + ts * (b2 - b1);
                        double rho = dist(obs, src);
                        cplx kv;
                        if (double_layer) {
                            kv = dlayer_exact(k, rho, dot(obs - src, nb));
                        } else {
                            kv = green_exact(k, jwmu, rho);
                        }
                        cplx c = inner.w[s] * lb * kv;
                        rise += c * ts;
                        fall += c * (1.0 - ts);
                    }
                    double wt = outer.w[q] * la;
                    double tq = outer.t[q];
                    acc[0][0] += wt * (1.0 - tq) * fall;
                    acc[0][1] += wt * (1.0 - tq) * rise;
                    acc[1][0] += wt * tq * fall;
                    acc[1][1] += wt * tq * rise;
                }
            }
            int rows[2] = {a, (a + 1) % n};
            int cols[2] = {b, (b + 1) % n};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) M(rows[i], cols[j]) += acc[i][j];
        }
    }
    return M;
}

}  // namespace detail

inline Eigen::MatrixXcd assemble_P(const ContourGeometry& g, const Material& mat, double omega,
                                   PanelPath path = PanelPath::automatic) {
    cplx k = wavenumber(mat, omega);
    cplx jwmu = jomega_mu(mat, omega);
    return detail::assemble_galerkin(g, k, jwmu, false, path);
}

inline Eigen::MatrixXcd assemble_U(const ContourGeometry& g, const Material& mat, double omega,
                                   PanelPath path = PanelPath::automatic) {
    cplx k = wavenumber(mat, omega);
    return detail::assemble_galerkin(g, k, 1.0, true, path);
}

// Surface admittance operator: the solve P * Y = T*L - U.  T is the jump
// factor of the boundary trace, 1/2 everywhere for on-boundary assembly
// (corners included, a documented accuracy limiter on polygons).
inline Eigen::MatrixXcd build_sao(const Eigen::MatrixXd& L, const Eigen::MatrixXcd& P,
                                  const Eigen::MatrixXcd& U, double T = 0.5) {
    if (L.rows() != P.rows() || P.rows() != U.rows() || P.rows() != P.cols())
        throw std::invalid_argument("operator matrices must share one square dimension");
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(P);
    double rc = lu.rcond();
    if (!(rc > 1e-14))
        throw std::runtime_error("single-layer matrix numerically singular, reciprocal condition " +
                                 std::to_string(rc));
    Eigen::MatrixXcd rhs = T * L.cast<cplx>() - U;
    return lu.solve(rhs);
}

struct BoundaryOperatorSet {
    Eigen::MatrixXd L;
    Eigen::MatrixXcd P, U;          // interior material
    Eigen::MatrixXcd P_hat, U_hat;  // background material
    Eigen::MatrixXcd Y, Y_hat, Y_s;
    cplx jwmu_bg = 0.0;  // j omega mu of the replaced background medium
    int contour_id = -1;
    int size = 0;
};

inline BoundaryOperatorSet build_dsao(const ContourGeometry& g, const Material& inner,
                                      const Material& background, double omega) {
    BoundaryOperatorSet s;
    s.contour_id = g.contour_id;
    s.size = g.size;
    s.jwmu_bg = jomega_mu(background, omega);
    s.L = assemble_L(g);
    s.P = assemble_P(g, inner, omega);
    s.U = assemble_U(g, inner, omega);
    s.P_hat = assemble_P(g, background, omega);
    s.U_hat = assemble_U(g, background, omega);
    s.Y = build_sao(s.L, s.P, s.U);
    s.Y_hat = build_sao(s.L, s.P_hat, s.U_hat);
    s.Y_s = s.Y - s.Y_hat;
    return s;
}

enum class FieldKind { E, H_t, J };

struct BoundaryField {
    Eigen::VectorXcd coefficients;
    FieldKind kind = FieldKind::E;
};

struct InteriorFieldResult {
    Eigen::VectorXcd values;
    std::vector<char> near_boundary;  // set when a point sits within 0.1 local h of the contour
};

// Field inside a homogeneous region from its boundary trace: the normal
// derivative is reconstructed through the admittance operator, then the
// representation integral (jump factor 1 off the boundary) is evaluated
// segment by segment with the same near/far quadrature as the assembly.
inline InteriorFieldResult recover_interior_fields(const ContourGeometry& g,
                                                   const BoundaryField& boundary_E,
                                                   const Material& mat, double omega,
                                                   const std::vector<Point2>& points) {
    if (boundary_E.kind != FieldKind::E)
        throw std::invalid_argument("boundary data must be the tangential electric field");
    if (boundary_E.coefficients.size() != g.size)
        throw std::invalid_argument("boundary coefficient count does not match contour");
    cplx k = wavenumber(mat, omega);
    cplx jwmu = jomega_mu(mat, omega);
    double absk = std::abs(k);
    Eigen::MatrixXcd Y = build_sao(assemble_L(g), assemble_P(g, mat, omega),
                                   assemble_U(g, mat, omega));
    Eigen::VectorXcd e = boundary_E.coefficients;
    Eigen::VectorXcd h = Y * e;

    InteriorFieldResult out;
    out.values.resize((Eigen::Index)points.size());
    out.near_boundary.assign(points.size(), 0);
    int n = g.size;
    for (size_t p = 0; p < points.size(); ++p) {
        Point2 r = points[p];
        cplx total = 0.0;
        for (int b = 0; b < n; ++b) {
            double lb = g.seg_len[b];
            Point2 b1 = g.nodes[b], b2 = g.nodes[(b + 1) % n];
            Point2 nb = g.seg_nrm[b];
            cplx eb = e[b], er = e[(b + 1) % n];
            cplx hb = h[b], hr = h[(b + 1) % n];
            SegmentGeometry sg = make_segment_geometry(r, b1, b2);
            bool foot_inside = sg.l1 < 0.0 && sg.l2 > 0.0;
            double dseg = foot_inside ? sg.p0 : std::min(sg.rho1, sg.rho2);
            if (dseg < 0.1 * lb) out.near_boundary[p] = 1;
            bool near = dseg < 1.5 * lb || absk * dseg < 0.1;
            cplx g_rise, g_fall, u_rise, u_fall;
            if (near) {
                g_rise = integrate_G_halfrooftop(sg, k, jwmu, true);
                g_fall = integrate_G_halfrooftop(sg, k, jwmu, false);
                u_rise = integrate_gradG_halfrooftop(sg, k, true);
                u_fall = integrate_gradG_halfrooftop(sg, k, false);
                detail::PanelRule inner = detail::panel_rule(absk * lb);
                for (size_t s = 0; s < inner.t.size(); ++s) {
                    double ts = inner.t[s];
                    Point2 src = b1 + ts * (b2 - b1);
                    double rho = dist(r, src);
                    cplx gr = detail::green_remainder(k, jwmu, rho);
                    cplx ur = detail::dlayer_remainder(k, rho, dot(r - src, nb));
                    double w = inner.w[s] * lb;
                    g_rise += w * gr * ts;
                    g_fall += w * gr * (1.0 - ts);
                    u_rise += w * ur * ts;
                    u_fall += w * ur * (1.0 - ts);
                }
            } else {
                g_rise = g_fall = u_rise = u_fall = 0.0;
                detail::PanelRule inner = detail::panel_rule(absk * lb);
                for (size_t s = 0; s < inner.t.size(); ++s) {
                    double ts = inner.t[s];
                    Point2 src = b1 + ts * (b2 - b1);
                    double rho = dist(r, src);
                    cplx gv = detail::green_exact(k, jwmu, rho);
                    cplx uv = detail::dlayer_exact(k, rho, dot(r - src, nb));
                    double w = inner.w[s] * lb;
                    g_rise += w * gv * ts;
                    g_fall += w * gv * (1.0 - ts);
                    u_rise += w * uv * ts;
                    u_fall += w * uv * (1.0 - ts);
                }
            }
            total += g_rise * hr + g_fall * hb + u_rise * er + u_fall * eb;
        }
        out.values[(Eigen::Index)p] = total;
    }
    return out;
}

}  // namespace hybridem
