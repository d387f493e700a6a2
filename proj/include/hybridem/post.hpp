#pragma once

// Observables computed from a solved system: near-field maps sampled on
// uniform grids, bistatic scattering width through an equivalence-contour
// near-to-far transform, the error metrics the comparisons report, conductor
// current density, and the two-run cost table.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "hybridem/incident.hpp"
#include "hybridem/mesh.hpp"
#include "hybridem/pde.hpp"
#include "hybridem/sie.hpp"

namespace hybridem {

struct GridSpec {
    Point2 origin{0.0, 0.0};  // lower-left sample
    double spacing = 0.0;
    int nx = 0;
    int ny = 0;
};

// Row-major with x fastest: sample (i, j) sits at origin + (i*dx, j*dx).
struct FieldGrid {
    Point2 origin{0.0, 0.0};
    double spacing = 0.0;
    int nx = 0;
    int ny = 0;
    std::vector<cplx> values;
    std::vector<std::uint8_t> masked;  // fictitious region or outside the mesh

    size_t index(int i, int j) const { return (size_t)j * (size_t)nx + (size_t)i; }
    Point2 point(int i, int j) const {
        return {origin.x + i * spacing, origin.y + j * spacing};
    }
};

struct RcsCurve {
    std::vector<double> angles_deg;  // strictly increasing, in [0, 360)
    std::vector<double> sigma_db;    // 10*log10(scattering width / 1 m)
    double frequency = 0.0;
};

// Uniform-bin point location over the triangulation.  Bins hold every
// triangle whose bounding box overlaps the cell, so a query only tests a
// handful of candidates.
class TriangleLocator {
public:
    explicit TriangleLocator(const Mesh& m) : mesh_(&m) {
        if (m.nodes.empty() || m.triangles.empty())
            throw std::invalid_argument("cannot build a locator over an empty mesh");
        xlo_ = ylo_ = 1e300;
        xhi_ = yhi_ = -1e300;
        for (const Point2& p : m.nodes) {
            xlo_ = std::min(xlo_, p.x);
            xhi_ = std::max(xhi_, p.x);
            ylo_ = std::min(ylo_, p.y);
            yhi_ = std::max(yhi_, p.y);
        }
        double span = std::max(xhi_ - xlo_, yhi_ - ylo_);
        if (!(span > 0.0)) throw std::invalid_argument("mesh has no spatial extent");
        ncell_ = std::max(1, (int)std::sqrt((double)m.triangles.size()));
        cell_ = span / ncell_;
        bins_.assign((size_t)ncell_ * (size_t)ncell_, {});
        for (size_t t = 0; t < m.triangles.size(); ++t) {
            const auto& ids = m.triangles[t].node_ids;
            double txlo = 1e300, txhi = -1e300, tylo = 1e300, tyhi = -1e300;
            for (int id : ids) {
                txlo = std::min(txlo, m.nodes[id].x);
                txhi = std::max(txhi, m.nodes[id].x);
                tylo = std::min(tylo, m.nodes[id].y);
                tyhi = std::max(tyhi, m.nodes[id].y);
            }
            int i0 = clamp_cell((txlo - xlo_) / cell_), i1 = clamp_cell((txhi - xlo_) / cell_);
            int j0 = clamp_cell((tylo - ylo_) / cell_), j1 = clamp_cell((tyhi - ylo_) / cell_);
            for (int j = j0; j <= j1; ++j)
                for (int i = i0; i <= i1; ++i)
                    bins_[(size_t)j * ncell_ + i].push_back((int)t);
        }
    }

    // Containing triangle index, -1 when the point is outside the mesh.
    int locate(Point2 p) const {
        if (p.x < xlo_ - 1e-12 || p.x > xhi_ + 1e-12 || p.y < ylo_ - 1e-12 ||
            p.y > yhi_ + 1e-12)
            return -1;
        int i = clamp_cell((p.x - xlo_) / cell_);
        int j = clamp_cell((p.y - ylo_) / cell_);
        for (int t : bins_[(size_t)j * ncell_ + i]) {
            TriangleBasis tb = triangle_basis(*mesh_, mesh_->triangles[(size_t)t]);
            std::array<double, 3> lam = barycentric(tb, p);
            if (lam[0] >= -1e-9 && lam[1] >= -1e-9 && lam[2] >= -1e-9) return t;
        }
        return -1;
    }

private:
    int clamp_cell(double v) const { return std::min(ncell_ - 1, std::max(0, (int)v)); }

    const Mesh* mesh_;
    double xlo_, xhi_, ylo_, yhi_, cell_;
    int ncell_;
    std::vector<std::vector<int>> bins_;
};

inline cplx interpolate_field(const Mesh& m, const Eigen::VectorXcd& nodal, int tri, Point2 p) {
    const Triangle& t = m.triangles[(size_t)tri];
    std::array<double, 3> lam = barycentric(triangle_basis(m, t), p);
    return lam[0] * nodal[t.node_ids[0]] + lam[1] * nodal[t.node_ids[1]] +
           lam[2] * nodal[t.node_ids[2]];
}

// Marks triangles lying inside a replaced contour.  A triangle with any
// strictly-interior node is flagged through the solve's node mask; a sliver
// whose three corners all sit on the contour needs the centroid test.
inline std::vector<std::uint8_t> fictitious_triangles(const Mesh& m, const HybridSystem& sys) {
    std::vector<std::uint8_t> flag(m.triangles.size(), 0);
    if (sys.fictitious.size() != m.nodes.size()) return flag;
    std::vector<std::uint8_t> on_sie(m.nodes.size(), 0);
    std::vector<std::vector<Point2>> polys;
    for (const Contour& c : m.contours) {
        if (c.kind != ContourKind::sie) continue;
        std::vector<Point2> poly;
        poly.reserve(c.node_ids.size());
        for (int id : c.node_ids) {
            poly.push_back(m.nodes[(size_t)id]);
            on_sie[(size_t)id] = 1;
        }
        polys.push_back(std::move(poly));
    }
    for (size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& ids = m.triangles[t].node_ids;
        bool interior = false, all_on = true;
        for (int id : ids) {
            interior = interior || sys.fictitious[(size_t)id];
            all_on = all_on && on_sie[(size_t)id];
        }
        if (!interior && all_on) {
            Point2 c = (1.0 / 3.0) * (m.nodes[ids[0]] + m.nodes[ids[1]] + m.nodes[ids[2]]);
            for (const auto& poly : polys) interior = interior || point_in_polygon(c, poly);
        }
        flag[t] = interior ? 1 : 0;
    }
    return flag;
}

// Nodal solution sampled on a uniform grid by linear interpolation inside the
// containing triangle.  Samples outside the mesh or in a fictitious region
// come back masked, never as an error.
inline FieldGrid sample_near_field(const HybridSystem& sys, const Mesh& m, const GridSpec& spec,
                                   const TriangleLocator* locator = nullptr) {
    if (!(spec.spacing > 0.0)) throw std::invalid_argument("grid spacing must be positive");
    if (spec.nx < 1 || spec.ny < 1) throw std::invalid_argument("grid must hold a sample");
    if (sys.E.size() != (Eigen::Index)m.nodes.size())
        throw std::invalid_argument("solution length does not match the mesh");

    std::unique_ptr<TriangleLocator> local;
    if (!locator) {
        local = std::make_unique<TriangleLocator>(m);
        locator = local.get();
    }
    const TriangleLocator& loc = *locator;
    std::vector<std::uint8_t> fict = fictitious_triangles(m, sys);

    FieldGrid g;
    g.origin = spec.origin;
    g.spacing = spec.spacing;
    g.nx = spec.nx;
    g.ny = spec.ny;
    g.values.assign((size_t)spec.nx * (size_t)spec.ny, cplx(0.0, 0.0));
    g.masked.assign(g.values.size(), 0);
    for (int j = 0; j < spec.ny; ++j) {
        for (int i = 0; i < spec.nx; ++i) {
            Point2 p = g.point(i, j);
            int t = loc.locate(p);
            size_t s = g.index(i, j);
            if (t < 0) {
                g.masked[s] = 1;
                continue;
            }
            g.values[s] = interpolate_field(m, sys.E, t, p);
            if (fict[(size_t)t]) g.masked[s] = 1;
        }
    }
    return g;
}

// Far-zone scattering width (linear scale, per unit length) from scattered
// field and normal-derivative samples on a closed contour with outward
// normals.  The radiated field is E(rho, phi) -> F(phi) exp(-j k0 rho) /
// sqrt(rho) and the width is 2*pi*|F|^2 / amplitude^2.
inline std::vector<double> scattering_width(const std::vector<Point2>& pts,
                                            const std::vector<Point2>& normals,
                                            const std::vector<double>& weights,
                                            const std::vector<cplx>& es,
                                            const std::vector<cplx>& des_dn, double k0,
                                            double amplitude,
                                            const std::vector<double>& angles_deg) {
    size_t n = pts.size();
    if (normals.size() != n || weights.size() != n || es.size() != n || des_dn.size() != n)
        throw std::invalid_argument("contour sample arrays must have equal length");
    if (n == 0) throw std::invalid_argument("no contour samples");
    if (!(k0 > 0.0)) throw std::invalid_argument("wavenumber must be positive");
    if (!(amplitude > 0.0)) throw std::invalid_argument("incident amplitude must be positive");

    cplx pref = cplx(0.0, -0.25) * std::sqrt(2.0 / (constants::pi * k0)) *
                std::exp(cplx(0.0, constants::pi / 4.0));
    std::vector<double> sigma(angles_deg.size());
    for (size_t a = 0; a < angles_deg.size(); ++a) {
        double phi = angles_deg[a] * constants::pi / 180.0;
        Point2 rhat{std::cos(phi), std::sin(phi)};
        cplx acc = 0.0;
        for (size_t s = 0; s < n; ++s) {
            cplx phase = std::exp(cplx(0.0, k0 * dot(rhat, pts[s])));
            cplx lobe = cplx(0.0, k0 * dot(rhat, normals[s])) * es[s] - des_dn[s];
            acc += weights[s] * lobe * phase;
        }
        cplx f = pref * acc;
        sigma[a] = 2.0 * constants::pi * std::norm(f) / (amplitude * amplitude);
    }
    return sigma;
}

namespace detail {

struct ContourSample {
    double theta;
    Point2 r;
    cplx es;
    cplx des_dn;
};

struct EdgeCrossing {
    int nt = 0;          // crossings of this edge (0..2)
    double t[2] = {};    // parameters along lo -> hi
    cplx gx = 0.0, gy = 0.0;  // summed P1 gradients of adjacent triangles
    int ntri = 0;
};

}  // namespace detail

// Bistatic scattering width by the near-to-far transform on a circle inside
// the background annulus.  The circle is cut against the triangulation: every
// crossed mesh edge yields one sample, taking the scattered field from the
// nodal interpolant and its normal derivative from the element gradients
// averaged across the edge's two triangles.  The scattered nodal values are
// formed first (solution minus incident at the nodes), so an exact-incident
// solution radiates identically zero.
inline RcsCurve compute_rcs(const HybridSystem& sys, const Mesh& m, Point2 center, double radius,
                            const std::vector<double>& angles_deg) {
    if (!(radius > 0.0)) throw std::invalid_argument("integration radius must be positive");
    if (angles_deg.empty()) throw std::invalid_argument("no observation angles");
    for (size_t i = 0; i < angles_deg.size(); ++i) {
        if (angles_deg[i] < 0.0 || angles_deg[i] >= 360.0)
            throw std::invalid_argument("observation angles must lie in [0, 360)");
        if (i > 0 && angles_deg[i] <= angles_deg[i - 1])
            throw std::invalid_argument("observation angles must be strictly increasing");
    }
    if (sys.E.size() != (Eigen::Index)m.nodes.size())
        throw std::invalid_argument("solution length does not match the mesh");
    double k0 = sys.incident.k0;
    double amplitude = sys.incident.amplitude;
    if (!(k0 > 0.0)) throw std::invalid_argument("system lacks its incident wavenumber");
    if (!(amplitude > 0.0)) throw std::invalid_argument("incident amplitude must be positive");

    Eigen::VectorXcd es(m.nodes.size());
    for (size_t i = 0; i < m.nodes.size(); ++i)
        es[(Eigen::Index)i] = sys.E[(Eigen::Index)i] - sys.incident.field(m.nodes[i]);

    std::vector<std::uint8_t> fict = fictitious_triangles(m, sys);
    std::unordered_map<std::uint64_t, detail::EdgeCrossing> edges;
    for (size_t ti = 0; ti < m.triangles.size(); ++ti) {
        const Triangle& tri = m.triangles[ti];
        TriangleBasis tb = triangle_basis(m, tri);
        bool touched = false;
        cplx gx = 0.0, gy = 0.0;
        for (int e = 0; e < 3; ++e) {
            int a = tri.node_ids[e], b = tri.node_ids[(e + 1) % 3];
            int lo = std::min(a, b), hi = std::max(a, b);
            Point2 p = m.nodes[(size_t)lo], q = m.nodes[(size_t)hi];
            double ax = p.x - center.x, ay = p.y - center.y;
            double dx = q.x - p.x, dy = q.y - p.y;
            double qa = dx * dx + dy * dy;
            double qb = 2.0 * (ax * dx + ay * dy);
            double qc = ax * ax + ay * ay - radius * radius;
            double disc = qb * qb - 4.0 * qa * qc;
            if (disc <= 0.0 || qa == 0.0) continue;
            double sq = std::sqrt(disc);
            double roots[2] = {(-qb - sq) / (2.0 * qa), (-qb + sq) / (2.0 * qa)};
            std::uint64_t key = ((std::uint64_t)(std::uint32_t)lo << 32) | (std::uint32_t)hi;
            detail::EdgeCrossing* hit = nullptr;
            for (double t : roots) {
                if (t < 0.0 || t > 1.0) continue;
                if (!hit) hit = &edges[key];
                if (hit->ntri == 0) hit->t[hit->nt++] = t;
            }
            if (hit) {
                if (tri.material_id != m.background_material_id)
                    throw std::invalid_argument(
                        "integration contour touches non-background material");
                if (fict[ti])
                    throw std::invalid_argument(
                        "integration contour crosses a replaced region");
                if (!touched) {
                    for (int i = 0; i < 3; ++i) {
                        cplx v = es[tri.node_ids[i]] / (2.0 * tb.area);
                        gx += v * tb.b[(size_t)i];
                        gy += v * tb.c[(size_t)i];
                    }
                    touched = true;
                }
                hit->gx += gx;
                hit->gy += gy;
                hit->ntri += 1;
            }
        }
    }

    std::vector<detail::ContourSample> samples;
    samples.reserve(2 * edges.size());
    for (const auto& kv : edges) {
        const detail::EdgeCrossing& ec = kv.second;
        if (ec.ntri == 0 || ec.nt == 0) continue;
        int lo = (int)(kv.first >> 32), hi = (int)(kv.first & 0xffffffffu);
        Point2 p = m.nodes[(size_t)lo], q = m.nodes[(size_t)hi];
        cplx gx = ec.gx / (double)ec.ntri, gy = ec.gy / (double)ec.ntri;
        for (int c = 0; c < ec.nt; ++c) {
            double t = ec.t[c];
            Point2 r = p + t * (q - p);
            Point2 rad = r - center;
            double rn = norm(rad);
            if (!(rn > 0.0)) continue;
            Point2 nrm = (1.0 / rn) * rad;
            detail::ContourSample s;
            s.theta = std::atan2(rad.y, rad.x);
            s.r = r;
            s.es = (1.0 - t) * es[lo] + t * es[hi];
            s.des_dn = gx * nrm.x + gy * nrm.y;
            samples.push_back(s);
        }
    }
    if (samples.size() < 16)
        throw std::runtime_error("integration contour crosses too few mesh edges");
    std::stable_sort(samples.begin(), samples.end(),
                     [](const detail::ContourSample& a, const detail::ContourSample& b) {
                         if (a.theta != b.theta) return a.theta < b.theta;
                         if (a.r.x != b.r.x) return a.r.x < b.r.x;
                         return a.r.y < b.r.y;
                     });

    size_t nsamp = samples.size();
    std::vector<Point2> pts(nsamp), nrms(nsamp);
    std::vector<double> wts(nsamp);
    std::vector<cplx> esv(nsamp), dnv(nsamp);
    for (size_t i = 0; i < nsamp; ++i) {
        const detail::ContourSample& s = samples[i];
        double prev = samples[(i + nsamp - 1) % nsamp].theta;
        double next = samples[(i + 1) % nsamp].theta;
        double gap = next - prev;
        if (gap <= 0.0) gap += 2.0 * constants::pi;  // wraparound neighbours
        pts[i] = s.r;
        Point2 rad = s.r - center;
        nrms[i] = (1.0 / norm(rad)) * rad;
        wts[i] = 0.5 * gap * radius;
        esv[i] = s.es;
        dnv[i] = s.des_dn;
    }

    std::vector<double> sigma =
        scattering_width(pts, nrms, wts, esv, dnv, k0, amplitude, angles_deg);
    RcsCurve curve;
    curve.angles_deg = angles_deg;
    curve.frequency = sys.omega / (2.0 * constants::pi);
    curve.sigma_db.resize(sigma.size());
    for (size_t i = 0; i < sigma.size(); ++i)
        curve.sigma_db[i] = 10.0 * std::log10(std::max(sigma[i], 1e-30));
    return curve;
}

// Contour-shaped entry point: the polyline must trace a circle (its vertices
// are checked against the fitted radius), which then drives the transform.
inline RcsCurve compute_rcs(const HybridSystem& sys, const Mesh& m, const Contour& c,
                            const std::vector<double>& angles_deg) {
    if (c.node_ids.size() < 8)
        throw std::invalid_argument("integration contour needs at least 8 vertices");
    Point2 center{0.0, 0.0};
    for (int id : c.node_ids) center = center + m.nodes[(size_t)id];
    center = (1.0 / (double)c.node_ids.size()) * center;
    double radius = 0.0;
    for (int id : c.node_ids) radius += norm(m.nodes[(size_t)id] - center);
    radius /= (double)c.node_ids.size();
    for (int id : c.node_ids)
        if (std::abs(norm(m.nodes[(size_t)id] - center) - radius) > 0.05 * radius)
            throw std::invalid_argument("integration contour must trace a circle");
    return compute_rcs(sys, m, center, radius, angles_deg);
}

// Aggregate relative error between two width curves on the same angle grid,
// computed on linear (not dB) values.
inline double relative_error_rcs(const RcsCurve& calc, const RcsCurve& ref) {
    if (calc.angles_deg.size() != ref.angles_deg.size() ||
        calc.sigma_db.size() != calc.angles_deg.size() ||
        ref.sigma_db.size() != ref.angles_deg.size())
        throw std::invalid_argument("width curves use different angle grids");
    for (size_t i = 0; i < calc.angles_deg.size(); ++i)
        if (std::abs(calc.angles_deg[i] - ref.angles_deg[i]) > 1e-9)
            throw std::invalid_argument("width curves use different angle grids");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < calc.sigma_db.size(); ++i) {
        double sc = std::pow(10.0, calc.sigma_db[i] / 10.0);
        double sr = std::pow(10.0, ref.sigma_db[i] / 10.0);
        num += (sc - sr) * (sc - sr);
        den += sr * sr;
    }
    if (!(den > 0.0)) throw std::invalid_argument("reference curve has no power");
    return num / den;
}

// Pointwise |E_cal - E_ref| / max|E_ref| over the unmasked intersection; the
// result grid carries the intersected mask and real values.
inline FieldGrid relative_error_field(const FieldGrid& calc, const FieldGrid& ref) {
    if (calc.nx != ref.nx || calc.ny != ref.ny || std::abs(calc.spacing - ref.spacing) > 1e-12 ||
        std::abs(calc.origin.x - ref.origin.x) > 1e-12 ||
        std::abs(calc.origin.y - ref.origin.y) > 1e-12)
        throw std::invalid_argument("field grids do not coincide");
    FieldGrid out;
    out.origin = calc.origin;
    out.spacing = calc.spacing;
    out.nx = calc.nx;
    out.ny = calc.ny;
    out.values.assign(calc.values.size(), cplx(0.0, 0.0));
    out.masked.resize(calc.values.size());
    double peak = 0.0;
    size_t live = 0;
    for (size_t i = 0; i < calc.values.size(); ++i) {
        out.masked[i] = (calc.masked[i] || ref.masked[i]) ? 1 : 0;
        if (!out.masked[i]) {
            peak = std::max(peak, std::abs(ref.values[i]));
            ++live;
        }
    }
    if (live == 0) throw std::invalid_argument("grids have no common unmasked samples");
    if (!(peak > 0.0)) throw std::invalid_argument("reference field is identically zero");
    for (size_t i = 0; i < calc.values.size(); ++i)
        if (!out.masked[i]) out.values[i] = std::abs(calc.values[i] - ref.values[i]) / peak;
    return out;
}

// Replaces masked samples inside one spliced contour with fields recovered
// from the boundary trace through the representation integral.  Samples
// within a tenth of the local segment length of the contour stay masked, the
// recovery loses accuracy there.  Returns the number of samples filled.
inline int recover_masked_samples(FieldGrid& grid, const Mesh& m, const HybridSystem& sys,
                                  int contour_id, const Material& inner) {
    if (contour_id < 0 || (size_t)contour_id >= m.contours.size())
        throw std::invalid_argument("contour id out of range");
    if (!(sys.omega > 0.0)) throw std::invalid_argument("system lacks its frequency");
    const Contour& c = m.contours[(size_t)contour_id];
    std::vector<Point2> poly;
    poly.reserve(c.node_ids.size());
    for (int id : c.node_ids) poly.push_back(m.nodes[(size_t)id]);

    std::vector<size_t> slots;
    std::vector<Point2> pts;
    for (int j = 0; j < grid.ny; ++j) {
        for (int i = 0; i < grid.nx; ++i) {
            size_t s = grid.index(i, j);
            if (!grid.masked[s]) continue;
            Point2 p = grid.point(i, j);
            if (!point_in_polygon(p, poly)) continue;
            slots.push_back(s);
            pts.push_back(p);
        }
    }
    if (slots.empty()) return 0;

    ContourGeometry g = make_contour_geometry(m, contour_id);
    BoundaryField trace;
    trace.kind = FieldKind::E;
    trace.coefficients.resize((Eigen::Index)c.node_ids.size());
    for (size_t i = 0; i < c.node_ids.size(); ++i)
        trace.coefficients[(Eigen::Index)i] = sys.E[c.node_ids[i]];

    InteriorFieldResult rec = recover_interior_fields(g, trace, inner, sys.omega, pts);
    int filled = 0;
    for (size_t i = 0; i < slots.size(); ++i) {
        if (rec.near_boundary[i]) continue;
        grid.values[slots[i]] = rec.values[(Eigen::Index)i];
        grid.masked[slots[i]] = 0;
        ++filled;
    }
    return filled;
}

struct CurrentDensity {
    FieldGrid j;        // real-valued sigma*|E|, A/m^2
    double peak = 0.0;  // over unmasked samples
};

// Conduction current magnitude over a sampled region.  The grid must already
// hold valid fields there; for a spliced conductor that means recovering the
// interior samples first.
inline CurrentDensity current_density(const FieldGrid& e, const Material& mat) {
    if (!(mat.sigma > 0.0))
        throw std::invalid_argument("current density needs a conductive material");
    CurrentDensity out;
    out.j.origin = e.origin;
    out.j.spacing = e.spacing;
    out.j.nx = e.nx;
    out.j.ny = e.ny;
    out.j.values.assign(e.values.size(), cplx(0.0, 0.0));
    out.j.masked = e.masked;
    for (size_t i = 0; i < e.values.size(); ++i) {
        if (e.masked[i]) continue;
        double j = mat.sigma * std::abs(e.values[i]);
        out.j.values[i] = j;
        out.peak = std::max(out.peak, j);
    }
    return out;
}

struct RunCost {
    double unknowns = 0.0;
    double peak_memory_mb = 0.0;
    double t_surface_operator = 0.0;  // admittance-operator generation
    double t_matrix_fill = 0.0;
    double t_solve = 0.0;

    double total() const { return t_surface_operator + t_matrix_fill + t_solve; }
};

struct CostRow {
    std::string metric;
    double fem = 0.0;
    double hybrid = 0.0;
    double ratio = 0.0;  // hybrid / fem, 0 when the fem entry is zero
};

inline std::vector<CostRow> cost_report(const RunCost& fem, const RunCost& hybrid) {
    auto row = [](const std::string& name, double f, double h) {
        CostRow r;
        r.metric = name;
        r.fem = f;
        r.hybrid = h;
        r.ratio = f != 0.0 ? h / f : 0.0;
        return r;
    };
    return {
        row("unknowns", fem.unknowns, hybrid.unknowns),
        row("peak_memory_mb", fem.peak_memory_mb, hybrid.peak_memory_mb),
        row("t_surface_operator_s", fem.t_surface_operator, hybrid.t_surface_operator),
        row("t_matrix_fill_s", fem.t_matrix_fill, hybrid.t_matrix_fill),
        row("t_solve_s", fem.t_solve, hybrid.t_solve),
        row("t_total_s", fem.total(), hybrid.total()),
    };
}

// High-water resident set of this process in MB, 0 when unavailable.
inline double peak_rss_mb() {
    std::ifstream st("/proc/self/status");
    std::string key;
    while (st >> key) {
        if (key == "VmHWM:") {
            double kb = 0.0;
            st >> kb;
            return kb / 1024.0;
        }
        st.ignore(4096, '\n');
    }
    return 0.0;
}

}  // namespace hybridem
