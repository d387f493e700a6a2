#pragma once

// Finite element half of the solver.  P1 triangles discretize the scalar
// out-of-plane field over the whole computational domain, a first-order
// absorbing condition closes the truncation circle, and the admittance
// operators from sie.hpp are spliced into the sparse system as dense blocks
// over their contour nodes.  The same assembly path with the splice left out
// is the conventional FEM baseline used for comparisons.
//
// Sign bookkeeping: element_K returns the weighted-residual block (negative
// stiffness plus k0^2 eps_r mass).  The assembled operator negates those
// blocks, so the Robin terms of the absorbing boundary and the contour
// coupling blocks enter with plus signs and the k0 -> 0 limit of the pure
// stiffness part is positive semi-definite.

#include <chrono>
#include <complex>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "incident.hpp"
#include "material.hpp"
#include "mesh.hpp"
#include "sie.hpp"
#include "specfun.hpp"

namespace hybridem {

// --------------------------------------------------------------------------
// Elemental blocks.

inline Eigen::Matrix3cd element_K(const Point2& p1, const Point2& p2, const Point2& p3,
                                  const Material& mat, double k0) {
    double two_a = signed_area2(p1, p2, p3);
    if (!(two_a > 0.0))
        throw std::invalid_argument("element_K needs a counter-clockwise, non-degenerate triangle");
    double area = 0.5 * two_a;
    double b[3] = {p2.y - p3.y, p3.y - p1.y, p1.y - p2.y};
    double c[3] = {p3.x - p2.x, p1.x - p3.x, p2.x - p1.x};
    // Conduction loss folds into the permittivity; at k0 = 0 the mass term is
    // gone entirely, so skip the 1/omega loss factor instead of dividing by 0.
    cplx eps = k0 > 0.0 ? relative_permittivity(mat, k0 * constants::c0) : cplx(mat.eps_r, 0.0);
    Eigen::Matrix3cd K;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double stiff = -(b[i] * b[j] + c[i] * c[j]) / (4.0 * area * mat.mu_r);
            double mass = (i == j ? area / 6.0 : area / 12.0);
            K(i, j) = stiff + k0 * k0 * eps * mass;
        }
    return K;
}

inline Eigen::Matrix3cd element_K(const Mesh& m, const Triangle& t, double k0) {
    return element_K(m.nodes[t.node_ids[0]], m.nodes[t.node_ids[1]], m.nodes[t.node_ids[2]],
                     m.materials.at(t.material_id), k0);
}

// Segment Gram block scaled by j omega mu of the background medium; couples a
// contour's boundary current into the two nodal unknowns of its segment.
inline Eigen::Matrix2cd element_B(double seg_len, double omega, double mu_bg = constants::mu0) {
    if (!(seg_len > 0.0)) throw std::invalid_argument("element_B: zero-length segment");
    cplx s(0.0, omega * mu_bg);
    Eigen::Matrix2cd B;
    B << s * seg_len / 3.0, s * seg_len / 6.0, s * seg_len / 6.0, s * seg_len / 3.0;
    return B;
}

// Load vector for an impressed current with nodal values j_nodes interpolated
// linearly over the element; exact for that interpolant.
inline Eigen::Vector3cd element_b(const Point2& p1, const Point2& p2, const Point2& p3,
                                  const std::array<cplx, 3>& j_nodes, double omega, double mu) {
    double area = 0.5 * signed_area2(p1, p2, p3);
    cplx s(0.0, omega * mu);
    Eigen::Vector3cd out;
    for (int i = 0; i < 3; ++i) {
        cplx acc = 0.0;
        for (int j = 0; j < 3; ++j) acc += (i == j ? area / 6.0 : area / 12.0) * j_nodes[j];
        out[i] = s * acc;
    }
    return out;
}

inline Eigen::Vector3cd element_b(const Point2& p1, const Point2& p2, const Point2& p3,
                                  cplx j_const, double omega, double mu) {
    return element_b(p1, p2, p3, {j_const, j_const, j_const}, omega, mu);
}

struct ElementMatrices {
    Eigen::Matrix3cd K_e;
    Eigen::Vector3cd b_e;
    bool contributes_g = false;  // element touches the truncation boundary
};

// --------------------------------------------------------------------------
// First-order absorbing truncation.  (1/mu_r) dE/dn + gamma E = q on the
// outer contour, with gamma = (j k0 + kappa/2)/mu_r and q the same expression
// applied to the incident wave, which makes an unscattered plane wave pass
// through exactly.  The robin triplets carry the operator-side sign: add them
// to the assembled system matrix as they are.

struct AbcResult {
    std::vector<Eigen::Triplet<cplx>> robin;
    Eigen::VectorXcd rhs;
};

inline AbcResult abc_contributions(const Mesh& m, const Contour& tc, const PlaneWave& inc,
                                   const std::function<double(const Point2&)>& kappa) {
    size_t ns = tc.node_ids.size();
    if (ns < 3) throw std::invalid_argument("truncation contour must be a closed loop");
    double k0 = inc.k0;
    double mur = m.materials.at(m.background_material_id).mu_r;

    AbcResult out;
    out.rhs = Eigen::VectorXcd::Zero((Eigen::Index)m.nodes.size());
    out.robin.reserve(4 * ns);
    const GaussRule rule = gauss_legendre(6, 0.0, 1.0);

    for (size_t s = 0; s < ns; ++s) {
        int ia = tc.node_ids[s];
        int ib = tc.node_ids[(s + 1) % ns];
        Point2 r1 = m.nodes[ia], r2 = m.nodes[ib];
        double len = norm(r2 - r1);
        if (!(len > 0.0)) throw std::invalid_argument("truncation contour has a zero-length edge");
        Point2 tau = (1.0 / len) * (r2 - r1);
        Point2 nrm{tau.y, -tau.x};  // outward for a counter-clockwise contour
        Point2 mid = 0.5 * (r1 + r2);
        // Curvature sampled once per edge: exact for a circle, first-order
        // consistent elsewhere, and it keeps the edge blocks closed-form.
        double kap = kappa(mid);
        cplx gamma = (cplx(0.0, k0) + 0.5 * kap) / mur;

        cplx g3 = gamma * len / 3.0, g6 = gamma * len / 6.0;
        out.robin.emplace_back(ia, ia, g3);
        out.robin.emplace_back(ia, ib, g6);
        out.robin.emplace_back(ib, ia, g6);
        out.robin.emplace_back(ib, ib, g3);

        for (size_t g = 0; g < rule.x.size(); ++g) {
            double t = rule.x[g];
            Point2 r = r1 + t * (r2 - r1);
            cplx q = (inc.normal_derivative(r, nrm) +
                      (cplx(0.0, k0) + 0.5 * kap) * inc.field(r)) /
                     mur;
            out.rhs[ia] += rule.w[g] * len * (1.0 - t) * q;
            out.rhs[ib] += rule.w[g] * len * t * q;
        }
    }
    return out;
}

inline std::function<double(const Point2&)> constant_curvature(double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("curvature radius must be positive");
    return [radius](const Point2&) { return 1.0 / radius; };
}

// --------------------------------------------------------------------------
// Contour splice.  Each operator set contributes jwmu_bg * L * Y_s spread
// over its contour's node indices: dense within the contour block, zero
// elsewhere.

inline Eigen::SparseMatrix<cplx> build_expansion_A(const Mesh& m,
                                                   const std::vector<BoundaryOperatorSet>& sets) {
    Eigen::Index n = (Eigen::Index)m.nodes.size();
    std::vector<Eigen::Triplet<cplx>> trips;
    for (const BoundaryOperatorSet& s : sets) {
        if (s.contour_id < 0 || s.contour_id >= (int)m.contours.size())
            throw std::invalid_argument("operator set refers to contour " +
                                        std::to_string(s.contour_id) + " which the mesh lacks");
        const Contour& c = m.contours[s.contour_id];
        if ((int)c.node_ids.size() != s.size)
            throw std::invalid_argument("operator set size does not match contour " +
                                        std::to_string(s.contour_id));
        for (int id : c.node_ids)
            if (id < 0 || id >= (int)m.nodes.size())
                throw std::invalid_argument("contour node not found in mesh");
        if (s.jwmu_bg == cplx(0.0))
            throw std::invalid_argument("operator set lacks its background frequency scale");
        Eigen::MatrixXcd block = s.jwmu_bg * (s.L.cast<cplx>() * s.Y_s);
        trips.reserve(trips.size() + (size_t)s.size * s.size);
        for (int i = 0; i < s.size; ++i)
            for (int j = 0; j < s.size; ++j)
                trips.emplace_back(c.node_ids[i], c.node_ids[j], block(i, j));
    }
    Eigen::SparseMatrix<cplx> A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

// --------------------------------------------------------------------------
// Global system.

struct SolveStats {
    int unknowns = 0;
    long long nonzeros = 0;
    long long factor_nonzeros = 0;  // L plus U fill of the sparse factorization
    double seconds_assemble = 0.0;
    double seconds_factor = 0.0;
    double seconds_solve = 0.0;
};

struct HybridSystem {
    Eigen::SparseMatrix<cplx> A_global;
    Eigen::VectorXcd rhs;
    std::vector<int> dof_map;  // node id -> unknown index; identity under Robin truncation
    Eigen::VectorXcd E;
    // 1 where the nodal value lives inside a replaced contour: the solve
    // stores a fictitious field there and post-processing must mask it.
    std::vector<std::uint8_t> fictitious;
    PlaneWave incident;  // the drive, kept so observables can subtract it
    double omega = 0.0;
    SolveStats stats;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

// Assembles and solves (stiffness + truncation + contour splice) E = rhs.
// Triplet order is a fixed function of the mesh, so repeated runs produce
// bit-identical matrices and solutions regardless of how the caller threads
// the surrounding code.
inline HybridSystem assemble_and_solve(const Mesh& m, const std::vector<BoundaryOperatorSet>& sets,
                                       const PlaneWave& inc, double omega) {
    if (std::abs(inc.k0 * constants::c0 - omega) > 1e-9 * std::max(omega, 1.0))
        throw std::invalid_argument("incident-wave wavenumber disagrees with omega");
    const Material& bg = m.materials.at(m.background_material_id);
    for (const BoundaryOperatorSet& s : sets)
        if (std::abs(s.jwmu_bg - jomega_mu(bg, omega)) > 1e-9 * std::abs(s.jwmu_bg))
            throw std::invalid_argument("operator set for contour " + std::to_string(s.contour_id) +
                                        " was built at a different frequency or background");

    double k0 = omega / constants::c0;
    Eigen::Index n = (Eigen::Index)m.nodes.size();
    auto t0 = std::chrono::steady_clock::now();

    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(9 * m.triangles.size());
    for (const Triangle& t : m.triangles) {
        Eigen::Matrix3cd K = element_K(m, t, k0);
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                trips.emplace_back(t.node_ids[i], t.node_ids[j], -K(i, j));
    }

    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
    int truncations = 0;
    for (const Contour& c : m.contours) {
        if (c.kind != ContourKind::truncation) continue;
        ++truncations;
        // Truncation circles are stored as polygons; recover the radius from
        // the node ring so kappa matches the intended circle.
        Point2 ctr{0.0, 0.0};
        for (int id : c.node_ids) ctr = ctr + m.nodes[id];
        ctr = (1.0 / (double)c.node_ids.size()) * ctr;
        double radius = norm(m.nodes[c.node_ids[0]] - ctr);
        AbcResult abc = abc_contributions(m, c, inc, constant_curvature(radius));
        for (const auto& tr : abc.robin) trips.push_back(tr);
        rhs += abc.rhs;
    }
    if (truncations == 0)
        throw std::runtime_error("mesh has no truncation contour; cannot close the system");

    HybridSystem sys;
    sys.A_global.resize(n, n);
    sys.A_global.setFromTriplets(trips.begin(), trips.end());
    if (!sets.empty()) sys.A_global += build_expansion_A(m, sets);
    sys.A_global.makeCompressed();
    sys.rhs = std::move(rhs);
    sys.stats.unknowns = (int)n;
    sys.stats.nonzeros = (long long)sys.A_global.nonZeros();
    sys.stats.seconds_assemble = detail::seconds_since(t0);

    auto t1 = std::chrono::steady_clock::now();
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu;
    lu.compute(sys.A_global);
    if (lu.info() != Eigen::Success)
        throw std::runtime_error("sparse factorization failed (" + std::to_string(n) +
                                 " unknowns, " + std::to_string(sets.size()) +
                                 " spliced contours, " + std::to_string(truncations) +
                                 " truncation contours)");
    sys.stats.factor_nonzeros = (long long)(lu.nnzL() + lu.nnzU());
    sys.stats.seconds_factor = detail::seconds_since(t1);

    auto t2 = std::chrono::steady_clock::now();
    sys.E = lu.solve(sys.rhs);
    if (lu.info() != Eigen::Success) throw std::runtime_error("sparse back-substitution failed");
    sys.stats.seconds_solve = detail::seconds_since(t2);

    sys.dof_map.resize((size_t)n);
    for (Eigen::Index i = 0; i < n; ++i) sys.dof_map[(size_t)i] = (int)i;
    sys.incident = inc;
    sys.omega = omega;

    sys.fictitious.assign((size_t)n, 0);
    for (const BoundaryOperatorSet& s : sets) {
        const Contour& c = m.contours[s.contour_id];
        std::vector<Point2> poly;
        poly.reserve(c.node_ids.size());
        double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
        for (int id : c.node_ids) {
            poly.push_back(m.nodes[id]);
            xlo = std::min(xlo, poly.back().x);
            xhi = std::max(xhi, poly.back().x);
            ylo = std::min(ylo, poly.back().y);
            yhi = std::max(yhi, poly.back().y);
        }
        std::vector<std::uint8_t> on_contour((size_t)n, 0);
        for (int id : c.node_ids) on_contour[(size_t)id] = 1;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (on_contour[(size_t)i]) continue;
            Point2 p = m.nodes[(size_t)i];
            if (p.x < xlo || p.x > xhi || p.y < ylo || p.y > yhi) continue;
            if (point_in_polygon(p, poly)) sys.fictitious[(size_t)i] = 1;
        }
    }
    return sys;
}

// Conventional FEM reference: same pipeline, no spliced contours, physical
// materials everywhere.
inline HybridSystem solve_fem_baseline(const Mesh& m, const PlaneWave& inc, double omega) {
    return assemble_and_solve(m, {}, inc, omega);
}

// Coordinate-format dump ("row col re im" per stored entry, zero-based) for
// checking the assembled operator with outside tools.
inline void dump_system(const HybridSystem& sys, std::ostream& os) {
    for (int k = 0; k < sys.A_global.outerSize(); ++k)
        for (Eigen::SparseMatrix<cplx>::InnerIterator it(sys.A_global, k); it; ++it)
            os << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' '
               << it.value().imag() << '\n';
}

}  // namespace hybridem
