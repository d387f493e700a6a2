#pragma once

#include <cmath>
#include <stdexcept>

// Plane geometry primitives shared by the mesh generators and the
// boundary-operator assembly.

namespace hybridem {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
inline Point2 operator*(Point2 a, double s) { return {s * a.x, s * a.y}; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double dist(Point2 a, Point2 b) { return norm(a - b); }

inline Point2 normalized(Point2 a) {
    double n = norm(a);
    if (n == 0.0) throw std::invalid_argument("cannot normalize a zero vector");
    return {a.x / n, a.y / n};
}

// Rotates the unit tangent onto the right-hand normal.  Contours are stored
// counterclockwise, so for contour segments this is the outward normal.
inline Point2 right_normal(Point2 tangent) { return {tangent.y, -tangent.x}; }

// Relative placement of one observation point and one straight source
// segment, expressed in the segment's tangential/normal frame.  All the
// closed-form line integrals operate on this view of the geometry.
//
//   tau      unit tangent, source runs r1 -> r2
//   nrm      right-hand unit normal of tau
//   l1, l2   tangential coordinates of r1 and r2 relative to r  (l2 - l1 = len)
//   p0       unsigned distance from r to the segment's supporting line
//   h        signed normal offset (r - projection) . nrm,  |h| = p0
//   rho1/2   distances from r to the segment endpoints
struct SegmentGeometry {
    Point2 r;
    Point2 r1, r2;
    double len = 0.0;
    Point2 tau, nrm;
    double l1 = 0.0, l2 = 0.0;
    double p0 = 0.0;
    double h = 0.0;
    double rho1 = 0.0, rho2 = 0.0;
};

inline SegmentGeometry make_segment_geometry(Point2 r, Point2 r1, Point2 r2) {
    SegmentGeometry g;
    g.r = r;
    g.r1 = r1;
    g.r2 = r2;
    g.len = dist(r1, r2);
    if (g.len <= 0.0) throw std::invalid_argument("degenerate source segment");
    g.tau = {(r2.x - r1.x) / g.len, (r2.y - r1.y) / g.len};
    g.nrm = right_normal(g.tau);
    g.l1 = dot(r1 - r, g.tau);
    g.l2 = dot(r2 - r, g.tau);
    Point2 proj = r1 + (-g.l1) * g.tau;  // foot of the perpendicular from r
    g.h = dot(r - proj, g.nrm);
    g.p0 = std::abs(g.h);
    g.rho1 = dist(r, r1);
    g.rho2 = dist(r, r2);
    return g;
}

// Scale used by the singular-configuration tolerances below.
inline double segment_scale(const SegmentGeometry& g) {
    return std::max({g.len, std::abs(g.l1), std::abs(g.l2)});
}

}  // namespace hybridem
