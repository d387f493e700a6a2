#pragma once

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "geometry.hpp"
#include "material.hpp"

// Triangular meshes whose edges conform to the boundary contours: types,
// structured generators, text-format IO, and validation.  Material index 0
// is the background medium by convention; generators follow it and the
// loader requires it.

namespace hybridem {

struct Triangle {
    std::array<int, 3> node_ids;  // counter-clockwise
    int material_id = 0;
};

enum class ContourKind { sie_eligible, sie, truncation };

inline const char* contour_kind_name(ContourKind k) {
    switch (k) {
        case ContourKind::sie_eligible: return "sie-eligible";
        case ContourKind::sie: return "sie";
        case ContourKind::truncation: return "truncation";
    }
    return "?";
}

struct Contour {
    std::vector<int> node_ids;  // closed: the successor of the last id is the first
    ContourKind kind = ContourKind::sie_eligible;
    bool outward_normals = true;  // holds after CCW normalization
};

struct Mesh {
    std::vector<Point2> nodes;
    std::vector<Triangle> triangles;
    std::vector<Material> materials;
    std::vector<Contour> contours;
    int background_material_id = 0;
};

// ---------------------------------------------------------------------------
// Small geometric helpers shared by generators, validation and field
// sampling.

inline double signed_area2(Point2 a, Point2 b, Point2 c) {
    return (b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y);
}

inline double triangle_area(const Mesh& m, const Triangle& t) {
    return 0.5 * signed_area2(m.nodes[t.node_ids[0]], m.nodes[t.node_ids[1]],
                              m.nodes[t.node_ids[2]]);
}

// Linear nodal basis on one triangle: N_i(x, y) = (a_i + b_i x + c_i y) / (2 area).
struct TriangleBasis {
    double area;
    std::array<double, 3> a, b, c;
};

inline TriangleBasis triangle_basis(const Mesh& m, const Triangle& t) {
    TriangleBasis tb;
    Point2 p[3] = {m.nodes[t.node_ids[0]], m.nodes[t.node_ids[1]], m.nodes[t.node_ids[2]]};
    tb.area = 0.5 * signed_area2(p[0], p[1], p[2]);
    for (int i = 0; i < 3; ++i) {
        int j = (i + 1) % 3, k = (i + 2) % 3;
        tb.a[i] = p[j].x * p[k].y - p[k].x * p[j].y;
        tb.b[i] = p[j].y - p[k].y;
        tb.c[i] = p[k].x - p[j].x;
    }
    return tb;
}

inline std::array<double, 3> barycentric(const TriangleBasis& tb, Point2 p) {
    std::array<double, 3> n;
    for (int i = 0; i < 3; ++i) n[i] = (tb.a[i] + tb.b[i] * p.x + tb.c[i] * p.y) / (2.0 * tb.area);
    return n;
}

// Even-odd crossing test; points assumed off the polygon edges.
inline bool point_in_polygon(Point2 p, const std::vector<Point2>& poly) {
    bool in = false;
    size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        bool straddles = (poly[i].y > p.y) != (poly[j].y > p.y);
        if (straddles) {
            double xc = poly[j].x + (p.y - poly[j].y) / (poly[i].y - poly[j].y) * (poly[i].x - poly[j].x);
            if (p.x < xc) in = !in;
        }
    }
    return in;
}

inline std::vector<Point2> contour_points(const Mesh& m, const Contour& c) {
    std::vector<Point2> pts;
    pts.reserve(c.node_ids.size());
    for (int id : c.node_ids) pts.push_back(m.nodes[id]);
    return pts;
}

inline double polygon_signed_area(const std::vector<Point2>& poly) {
    double s = 0.0;
    size_t n = poly.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) s += cross(poly[j], poly[i]);
    return 0.5 * s;
}

// ---------------------------------------------------------------------------
// Structured generation: rings of nodes around a center, stitched into
// triangle bands.  Everything is index-deterministic; no randomness.

namespace meshgen {

// Appends n ring nodes at angles 2 pi k / n and returns their indices.
// shape maps an angle to a point (circles, squares, blends).
template <class ShapeFn>
inline std::vector<int> add_ring(Mesh& m, int n, ShapeFn&& shape) {
    std::vector<int> ids(n);
    for (int k = 0; k < n; ++k) {
        double th = 2.0 * constants::pi * k / n;
        ids[k] = (int)m.nodes.size();
        m.nodes.push_back(shape(th));
    }
    return ids;
}

// Stitches two concentric CCW rings into a band.  Pointers advance by node
// angle about the center, so the rings may have different counts and
// non-uniform spacing as long as both are star-shaped about the center.
inline void stitch_band(Mesh& m, const std::vector<int>& inner, const std::vector<int>& outer,
                        Point2 center, int mat) {
    int p = (int)inner.size(), q = (int)outer.size();
    auto angle_of = [&](int id) {
        Point2 d = m.nodes[id] - center;
        return std::atan2(d.y, d.x);
    };
    auto start_of = [&](const std::vector<int>& ring) {
        int best = 0;
        double besta = angle_of(ring[0]);
        for (int i = 1; i < (int)ring.size(); ++i) {
            double a = angle_of(ring[i]);
            if (a < besta) {
                besta = a;
                best = i;
            }
        }
        return best;
    };
    int si = start_of(inner), so = start_of(outer);
    // unwrapped angle of the k-th node past the start, with a full-turn sentinel
    auto unwrapped = [&](const std::vector<int>& ring, int s, int k) {
        int n = (int)ring.size();
        if (k >= n) return angle_of(ring[s]) + 2.0 * constants::pi;
        double a0 = angle_of(ring[s]);
        double a = angle_of(ring[(s + k) % n]);
        if (a < a0 - 1e-12) a += 2.0 * constants::pi;
        return a;
    };
    int i = 0, o = 0;
    while (i < p || o < q) {
        int ii = inner[(si + i) % p], oo = outer[(so + o) % q];
        bool take_inner;
        if (i == p)
            take_inner = false;
        else if (o == q)
            take_inner = true;
        else
            take_inner = unwrapped(inner, si, i + 1) <= unwrapped(outer, so, o + 1);
        if (take_inner) {
            m.triangles.push_back({{ii, oo, inner[(si + i + 1) % p]}, mat});
            ++i;
        } else {
            m.triangles.push_back({{ii, oo, outer[(so + o + 1) % q]}, mat});
            ++o;
        }
    }
}

// Fan from a fresh center node to an innermost ring.
inline void fan_center(Mesh& m, const std::vector<int>& ring, Point2 center, int mat) {
    int c = (int)m.nodes.size();
    m.nodes.push_back(center);
    int n = (int)ring.size();
    for (int k = 0; k < n; ++k) m.triangles.push_back({{c, ring[k], ring[(k + 1) % n]}, mat});
}

// Radii marching from r0 outward: spacing starts at h, grows geometrically
// to cap, and the last step is stretched or split to land exactly on r1.
inline std::vector<double> graded_radii(double r0, double r1, double h, double cap) {
    std::vector<double> r{r0};
    double step = h;
    while (true) {
        double next = r.back() + step;
        if (next + 0.45 * step >= r1) break;
        r.push_back(next);
        step = std::min(step * 1.12, cap);
    }
    r.push_back(r1);
    return r;
}

// Ring sizes proportional to circumference over local spacing.
inline int ring_count(double circumference, double h) {
    return std::max(6, (int)std::llround(circumference / h));
}

// Fills the disk of the given radius around center with rings of spacing h,
// reusing the caller-provided boundary ring (whose count fixes the
// outermost interior ring).  Triangle material is mat.
inline void fill_disk_interior(Mesh& m, const std::vector<int>& boundary, Point2 center,
                               double radius, double h, int mat) {
    int layers = std::max(1, (int)std::llround(radius / h));
    std::vector<int> outer = boundary;
    for (int j = layers - 1; j >= 1; --j) {
        double r = radius * j / layers;
        int n = ring_count(2.0 * constants::pi * r, h);
        std::vector<int> inner =
            add_ring(m, n, [&](double th) { return center + r * Point2{std::cos(th), std::sin(th)}; });
        stitch_band(m, inner, outer, center, mat);
        outer = inner;
    }
    fan_center(m, outer, center, mat);
}

}  // namespace meshgen

// ---------------------------------------------------------------------------
// Validation.

namespace detail {

inline uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (uint64_t)a << 32 | (uint32_t)b;
}

inline bool segments_cross(Point2 a, Point2 b, Point2 c, Point2 d) {
    auto sgn = [](double v) { return v > 0.0 ? 1 : v < 0.0 ? -1 : 0; };
    int s1 = sgn(signed_area2(a, b, c)), s2 = sgn(signed_area2(a, b, d));
    int s3 = sgn(signed_area2(c, d, a)), s4 = sgn(signed_area2(c, d, b));
    return s1 * s2 < 0 && s3 * s4 < 0;
}

}  // namespace detail

// Normalizes orientations (CW triangles and contours are flipped to CCW)
// and checks every structural invariant; throws std::runtime_error naming
// the offending element.
inline void validate_mesh(Mesh& m) {
    int nn = (int)m.nodes.size();
    if (m.materials.empty()) throw std::runtime_error("mesh has no materials");
    if (m.background_material_id != 0)
        throw std::runtime_error("background material must be index 0");
    for (int i = 0; i < nn; ++i)
        if (!std::isfinite(m.nodes[i].x) || !std::isfinite(m.nodes[i].y))
            throw std::runtime_error("node " + std::to_string(i) + " has non-finite coordinates");
    std::vector<char> referenced(nn, 0);
    std::map<std::array<int, 3>, int> seen;
    for (int t = 0; t < (int)m.triangles.size(); ++t) {
        Triangle& tri = m.triangles[t];
        for (int v : tri.node_ids)
            if (v < 0 || v >= nn)
                throw std::runtime_error("triangle " + std::to_string(t) + " node id out of range");
        if (tri.node_ids[0] == tri.node_ids[1] || tri.node_ids[1] == tri.node_ids[2] ||
            tri.node_ids[0] == tri.node_ids[2])
            throw std::runtime_error("triangle " + std::to_string(t) + " has repeated nodes");
        if (tri.material_id < 0 || tri.material_id >= (int)m.materials.size())
            throw std::runtime_error("triangle " + std::to_string(t) + " material id out of range");
        double a2 = signed_area2(m.nodes[tri.node_ids[0]], m.nodes[tri.node_ids[1]],
                                 m.nodes[tri.node_ids[2]]);
        if (a2 < 0.0) {
            std::swap(tri.node_ids[1], tri.node_ids[2]);
            a2 = -a2;
        }
        if (!(a2 > 0.0))
            throw std::runtime_error("triangle " + std::to_string(t) + " is degenerate");
        for (int v : tri.node_ids) referenced[v] = 1;
        std::array<int, 3> key = tri.node_ids;
        std::sort(key.begin(), key.end());
        if (!seen.emplace(key, t).second)
            throw std::runtime_error("triangle " + std::to_string(t) + " duplicates another");
    }
    for (int i = 0; i < nn; ++i)
        if (!referenced[i]) throw std::runtime_error("node " + std::to_string(i) + " is orphaned");
    for (int c = 0; c < (int)m.contours.size(); ++c) {
        Contour& ct = m.contours[c];
        int k = (int)ct.node_ids.size();
        if (k < 3)
            throw std::runtime_error("contour " + std::to_string(c) + " has fewer than 3 nodes");
        std::vector<int> sorted = ct.node_ids;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::runtime_error("contour " + std::to_string(c) +
                                     " is not a simple closed polyline (repeated node)");
        for (int id : ct.node_ids)
            if (id < 0 || id >= nn)
                throw std::runtime_error("contour " + std::to_string(c) + " node id out of range");
        std::vector<Point2> pts = contour_points(m, ct);
        if (polygon_signed_area(pts) < 0.0) {
            std::reverse(ct.node_ids.begin(), ct.node_ids.end());
            pts = contour_points(m, ct);
        }
        ct.outward_normals = true;
        for (int i = 0; i < k; ++i) {
            Point2 a = pts[i], b = pts[(i + 1) % k];
            if (dist(a, b) <= 0.0)
                throw std::runtime_error("contour " + std::to_string(c) + " has a zero-length segment");
            for (int j = i + 1; j < k; ++j) {
                Point2 cc = pts[j], d = pts[(j + 1) % k];
                double lo_x = std::min(a.x, b.x) - 0.0, hi_x = std::max(a.x, b.x);
                if (std::max(cc.x, d.x) < lo_x || std::min(cc.x, d.x) > hi_x) continue;
                if (detail::segments_cross(a, b, cc, d))
                    throw std::runtime_error("contour " + std::to_string(c) +
                                             " self-intersects near segment " + std::to_string(i));
            }
        }
    }
}

struct ConformityIssue {
    int contour_id;
    int segment_index;
    int node_a, node_b;
};

// Lists every contour segment the triangulation fails to carry: segments
// that are not triangle edges at all (hanging nodes, chords), edges shared
// by more than two triangles, and truncation segments bounded by more than
// one triangle (the mesh may not extend past the truncation boundary).
// Object-contour segments may be carried by one triangle (standalone mesh
// boundary) or two (embedded contour).
inline std::vector<ConformityIssue> check_conformity(const Mesh& m) {
    std::unordered_map<uint64_t, int> edge_count;
    for (const Triangle& t : m.triangles)
        for (int e = 0; e < 3; ++e)
            ++edge_count[detail::edge_key(t.node_ids[e], t.node_ids[(e + 1) % 3])];
    std::vector<ConformityIssue> issues;
    for (int c = 0; c < (int)m.contours.size(); ++c) {
        const Contour& ct = m.contours[c];
        int max_allowed = ct.kind == ContourKind::truncation ? 1 : 2;
        int k = (int)ct.node_ids.size();
        for (int i = 0; i < k; ++i) {
            int a = ct.node_ids[i], b = ct.node_ids[(i + 1) % k];
            auto it = edge_count.find(detail::edge_key(a, b));
            int have = it == edge_count.end() ? 0 : it->second;
            if (have == 0 || have > max_allowed) issues.push_back({c, i, a, b});
        }
    }
    return issues;
}

// ---------------------------------------------------------------------------
// Generators.

inline Mesh generate_disk_mesh(double radius, Point2 center, double target_h,
                               Material mat = Material{}) {
    if (!(radius > 0.0) || !(target_h > 0.0) || !(target_h < radius))
        throw std::invalid_argument("disk mesh requires 0 < target_h < radius");
    int nb = meshgen::ring_count(2.0 * constants::pi * radius, target_h);
    if (nb < 8) throw std::invalid_argument("target_h leaves fewer than 8 boundary segments");
    Mesh m;
    m.materials = {mat};
    std::vector<int> boundary = meshgen::add_ring(
        m, nb, [&](double th) { return center + radius * Point2{std::cos(th), std::sin(th)}; });
    meshgen::fill_disk_interior(m, boundary, center, radius, target_h, 0);
    m.contours.push_back({boundary, ContourKind::sie_eligible, true});
    validate_mesh(m);
    return m;
}

struct ShapeSpec {
    enum class Kind { circle, rectangle } kind = Kind::circle;
    Point2 center{0.0, 0.0};
    double radius = 1.0;             // circle
    double width = 1.0, height = 1.0;  // rectangle
};

namespace meshgen {

// polar radius of an axis-aligned rectangle boundary about its center
inline double rect_radius(double w, double h, double th) {
    double cx = std::abs(std::cos(th)), sy = std::abs(std::sin(th));
    return std::min(cx > 0.0 ? 0.5 * w / cx : 1e300, sy > 0.0 ? 0.5 * h / sy : 1e300);
}

// Structured interior grid for a rectangle; returns the CCW boundary walk
// (corner nodes included exactly once, starting at the lower-left corner).
inline std::vector<int> fill_rect_interior(Mesh& m, Point2 center, double w, double h,
                                           double target_h, int mat) {
    int mx = std::max(2, (int)std::llround(w / target_h));
    int my = std::max(2, (int)std::llround(h / target_h));
    int base = (int)m.nodes.size();
    for (int j = 0; j <= my; ++j)
        for (int i = 0; i <= mx; ++i)
            m.nodes.push_back(center + Point2{-0.5 * w + w * i / mx, -0.5 * h + h * j / my});
    auto id = [&](int i, int j) { return base + j * (mx + 1) + i; };
    for (int j = 0; j < my; ++j)
        for (int i = 0; i < mx; ++i) {
            m.triangles.push_back({{id(i, j), id(i + 1, j), id(i + 1, j + 1)}, mat});
            m.triangles.push_back({{id(i, j), id(i + 1, j + 1), id(i, j + 1)}, mat});
        }
    std::vector<int> boundary;
    for (int i = 0; i < mx; ++i) boundary.push_back(id(i, 0));
    for (int j = 0; j < my; ++j) boundary.push_back(id(mx, j));
    for (int i = mx; i > 0; --i) boundary.push_back(id(i, my));
    for (int j = my; j > 0; --j) boundary.push_back(id(0, j));
    return boundary;
}

}  // namespace meshgen

// Mesh of the full truncation disk with one embedded object whose boundary
// and the truncation circle are both contours.  target_h controls the
// object region; far_h (defaulting to target_h) caps element growth toward
// the truncation boundary.
inline Mesh generate_annulus_scene(const ShapeSpec& object, double truncation_radius,
                                   double target_h, Material background, Material object_material,
                                   double far_h = 0.0) {
    if (far_h <= 0.0) far_h = target_h;
    far_h = std::max(far_h, target_h);
    double extent = object.kind == ShapeSpec::Kind::circle
                        ? object.radius
                        : 0.5 * std::hypot(object.width, object.height);
    double center_off = norm(object.center);
    if (!(extent > 0.0) || !(target_h > 0.0))
        throw std::invalid_argument("annulus scene requires positive sizes");
    if (center_off + extent >= truncation_radius - 2.0 * far_h)
        throw std::invalid_argument("object does not fit inside the truncation boundary");

    Mesh m;
    m.materials = {background, object_material};
    std::vector<int> object_boundary;

    if (object.kind == ShapeSpec::Kind::circle) {
        int nb = meshgen::ring_count(2.0 * constants::pi * object.radius, target_h);
        if (nb < 8) throw std::invalid_argument("target_h leaves fewer than 8 object segments");
        object_boundary = meshgen::add_ring(m, nb, [&](double th) {
            return object.center + object.radius * Point2{std::cos(th), std::sin(th)};
        });
        meshgen::fill_disk_interior(m, object_boundary, object.center, object.radius, target_h, 1);
    } else {
        object_boundary =
            meshgen::fill_rect_interior(m, object.center, object.width, object.height, target_h, 1);
        if ((int)object_boundary.size() < 8)
            throw std::invalid_argument("target_h leaves fewer than 8 object segments");
    }

    // outward bands: morph from the object silhouette to the truncation circle
    std::vector<double> radii = meshgen::graded_radii(extent, truncation_radius, target_h, far_h);
    std::vector<int> prev = object_boundary;
    int nlayer = (int)radii.size();
    for (int li = 1; li < nlayer; ++li) {
        double t = (radii[li] - extent) / (truncation_radius - extent);
        // silhouette and ring center relax to the concentric circle over the
        // first half of the gap; the outer half is pure circles
        double blend = std::min(1.0, 2.0 * t);
        double local_h = std::min(far_h, target_h * std::pow(1.12, li));
        int n = meshgen::ring_count(2.0 * constants::pi * radii[li], local_h);
        Point2 ring_center = (1.0 - blend) * object.center;
        auto shape = [&, blend, li, ring_center](double th) {
            double rs = object.kind == ShapeSpec::Kind::circle
                            ? object.radius
                            : meshgen::rect_radius(object.width, object.height, th);
            double r = (1.0 - blend) * rs + blend * extent + (radii[li] - extent);
            return ring_center + r * Point2{std::cos(th), std::sin(th)};
        };
        std::vector<int> ring = meshgen::add_ring(m, n, shape);
        meshgen::stitch_band(m, prev, ring, ring_center, 0);
        prev = ring;
    }
    m.contours.push_back({object_boundary, ContourKind::sie_eligible, true});
    m.contours.push_back({prev, ContourKind::truncation, true});
    validate_mesh(m);
    return m;
}

// ---------------------------------------------------------------------------
// Equivalent-model material replacement.

inline Mesh apply_equivalence(const Mesh& mesh, const std::vector<int>& contour_ids) {
    Mesh m = mesh;
    std::vector<std::vector<Point2>> polys;
    for (int cid : contour_ids) {
        if (cid < 0 || cid >= (int)m.contours.size())
            throw std::invalid_argument("contour id out of range");
        Contour& ct = m.contours[cid];
        if (ct.kind == ContourKind::truncation)
            throw std::invalid_argument("truncation boundary cannot carry equivalent currents");
        polys.push_back(contour_points(m, ct));
    }
    // reject nesting among the listed contours
    for (size_t i = 0; i < polys.size(); ++i)
        for (size_t j = 0; j < polys.size(); ++j)
            if (i != j && point_in_polygon(polys[i][0], polys[j]))
                throw std::invalid_argument("nested equivalence contours are unsupported");
    for (Triangle& t : m.triangles) {
        Point2 c = (1.0 / 3.0) * (m.nodes[t.node_ids[0]] + m.nodes[t.node_ids[1]] +
                                  m.nodes[t.node_ids[2]]);
        for (const auto& poly : polys)
            if (point_in_polygon(c, poly)) {
                t.material_id = m.background_material_id;
                break;
            }
    }
    for (int cid : contour_ids) m.contours[cid].kind = ContourKind::sie;
    return m;
}

// ---------------------------------------------------------------------------
// Text format IO.

namespace detail {

struct Token {
    std::string text;
    int line;
};

inline std::vector<Token> tokenize_mesh_file(std::istream& in) {
    std::vector<Token> toks;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string w;
        while (ls >> w) toks.push_back({w, lineno});
    }
    return toks;
}

class TokenReader {
  public:
    explicit TokenReader(std::vector<Token> t) : toks_(std::move(t)) {}

    [[noreturn]] void fail(const std::string& msg) const {
        int line = pos_ < toks_.size() ? toks_[pos_].line
                                       : (toks_.empty() ? 1 : toks_.back().line);
        throw std::runtime_error("line " + std::to_string(line) + ": " + msg);
    }

    // for complaints about a value that was already consumed
    [[noreturn]] void fail_prev(const std::string& msg) const {
        int line = pos_ > 0 ? toks_[pos_ - 1].line : 1;
        throw std::runtime_error("line " + std::to_string(line) + ": " + msg);
    }

    std::string word(const char* what) {
        if (pos_ >= toks_.size()) fail(std::string("unexpected end of file, wanted ") + what);
        return toks_[pos_++].text;
    }

    void expect(const std::string& kw) {
        std::string w = word(kw.c_str());
        if (w != kw) {
            --pos_;
            fail("expected '" + kw + "', got '" + w + "'");
        }
    }

    long integer(const char* what) {
        std::string w = word(what);
        long v = 0;
        auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
        if (ec != std::errc() || p != w.data() + w.size()) {
            --pos_;
            fail(std::string("bad integer for ") + what + ": '" + w + "'");
        }
        return v;
    }

    double number(const char* what) {
        std::string w = word(what);
        double v = 0.0;
        auto [p, ec] = std::from_chars(w.data(), w.data() + w.size(), v);
        if (ec != std::errc() || p != w.data() + w.size()) {
            --pos_;
            fail(std::string("bad number for ") + what + ": '" + w + "'");
        }
        return v;
    }

    bool done() const { return pos_ >= toks_.size(); }

  private:
    std::vector<Token> toks_;
    size_t pos_ = 0;
};

inline std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

}  // namespace detail

inline Mesh load_mesh(std::istream& in) {
    detail::TokenReader r(detail::tokenize_mesh_file(in));
    Mesh m;
    r.expect("nodes");
    long nn = r.integer("node count");
    if (nn < 3) r.fail_prev("node count must be at least 3");
    m.nodes.resize(nn);
    for (long i = 0; i < nn; ++i) {
        m.nodes[i].x = r.number("node x");
        m.nodes[i].y = r.number("node y");
    }
    r.expect("materials");
    long nm = r.integer("material count");
    if (nm < 1) r.fail_prev("at least one material required");
    m.materials.resize(nm);
    for (long i = 0; i < nm; ++i) {
        m.materials[i].eps_r = r.number("eps_r");
        m.materials[i].mu_r = r.number("mu_r");
        m.materials[i].sigma = r.number("sigma");
        if (!(m.materials[i].eps_r > 0.0) || !(m.materials[i].mu_r > 0.0) ||
            m.materials[i].sigma < 0.0)
            r.fail_prev("material " + std::to_string(i) + " out of range");
    }
    r.expect("triangles");
    long nt = r.integer("triangle count");
    if (nt < 1) r.fail_prev("triangle count must be positive");
    m.triangles.resize(nt);
    for (long i = 0; i < nt; ++i) {
        for (int v = 0; v < 3; ++v) m.triangles[i].node_ids[v] = (int)r.integer("triangle node");
        m.triangles[i].material_id = (int)r.integer("triangle material");
    }
    r.expect("contours");
    long nc = r.integer("contour count");
    m.contours.resize(nc);
    for (long i = 0; i < nc; ++i) {
        r.expect("contour");
        std::string kind = r.word("contour kind");
        if (kind == "sie-eligible")
            m.contours[i].kind = ContourKind::sie_eligible;
        else if (kind == "sie")
            m.contours[i].kind = ContourKind::sie;
        else if (kind == "truncation")
            m.contours[i].kind = ContourKind::truncation;
        else
            r.fail("unknown contour kind '" + kind + "'");
        long k = r.integer("contour node count");
        if (k < 3) r.fail_prev("contour " + std::to_string(i) + " is not closed (fewer than 3 nodes)");
        m.contours[i].node_ids.resize(k);
        for (long v = 0; v < k; ++v) m.contours[i].node_ids[v] = (int)r.integer("contour node id");
    }
    if (!r.done()) r.fail("trailing content after contours");
    validate_mesh(m);
    return m;
}

inline Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mesh file: " + path);
    return load_mesh(in);
}

inline void save_mesh(const Mesh& m, std::ostream& out) {
    out << "nodes " << m.nodes.size() << "\n";
    for (const Point2& p : m.nodes)
        out << detail::format_double(p.x) << " " << detail::format_double(p.y) << "\n";
    out << "materials " << m.materials.size() << "\n";
    for (const Material& mat : m.materials)
        out << detail::format_double(mat.eps_r) << " " << detail::format_double(mat.mu_r) << " "
            << detail::format_double(mat.sigma) << "\n";
    out << "triangles " << m.triangles.size() << "\n";
    for (const Triangle& t : m.triangles)
        out << t.node_ids[0] << " " << t.node_ids[1] << " " << t.node_ids[2] << " " << t.material_id
            << "\n";
    out << "contours " << m.contours.size() << "\n";
    for (const Contour& c : m.contours) {
        out << "contour " << contour_kind_name(c.kind) << " " << c.node_ids.size() << "\n";
        for (size_t i = 0; i < c.node_ids.size(); ++i)
            out << c.node_ids[i] << ((i + 1) % 12 == 0 || i + 1 == c.node_ids.size() ? "\n" : " ");
    }
}

inline void save_mesh(const Mesh& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open mesh file for writing: " + path);
    save_mesh(m, out);
}

}  // namespace hybridem
