/**
 * @file slcoloring.hpp
 * @brief Decorated SL2(C) colorings and shadow colorings of tangle diagrams.
 *
 * An arc is colored by a decorated matrix (g, [v], m): g in SL2(C) is the
 * meridian holonomy, [v] an invariant line represented by a nonzero row
 * vector with v g = m^{-1} v, and m the distinguished eigenvalue.  A shadow
 * coloring additionally assigns a nonzero column vector u to every region,
 * subject to the propagation rule: crossing a segment from its left side
 * (relative to the flow direction) to its right side multiplies by the
 * segment's holonomy, u_right = g u_left.  For a rightward strand this reads
 * u_below = g u_above; for a leftward strand u_below = g^{-1} u_above.
 *
 * Octahedral parameters: region parameter a_j = e1 . u_j, segment parameter
 * b_i = -(v_i e2)/(v_i u_i) with u_i the color of the region on the left of
 * the flow along segment i (constant along a segment), meridian parameter
 * m_i.  A coloring is admissible when all a_j and b_i are nonzero.
 *
 * Crossing classification: with crossing sign e and corner regions N/W/S/E,
 *   z0_N = (b2'/b1)^e            z0_W = (b2/(b1 m1))^e
 *   z0_S = (b2 m2/(b1' m1))^e    z0_E = (b2' m2/b1')^e
 *   K = a_N / (1 - z0_N)
 *   z1_N = K/a_N   z1_W = K m1^e/a_W   z1_S = K m1^e/(a_S m2^e)
 *   z1_E = K/(a_E m2^e)
 * and the segment ratios a1 = a_W/a_N, a2 = a_S/a_W, a2' = a_E/a_N,
 * a1' = a_S/a_E.  A crossing is pinched when the two invariant lines agree
 * (equivalently all z0 = 1) and E-nilpotent when in addition the four corner
 * shadows are eigenvectors of both meridian matrices.
 */

#pragma once

#include <optional>
#include <random>

#include "qinv/diagram.hpp"

namespace qinv {

// ---------------------------------------------------------------------------
// Small fixed-size linear algebra
// ---------------------------------------------------------------------------

/** @brief Column (or row, by context) 2-vector. */
struct Vec2 {
    cplx x{0.0, 0.0}, y{0.0, 0.0};
    Vec2 operator*(cplx s) const { return {x * s, y * s}; }
    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    double norm() const { return std::sqrt(std::norm(x) + std::norm(y)); }
};

/** @brief 2x2 complex matrix, row-major. */
struct Mat2 {
    cplx a{0.0, 0.0}, b{0.0, 0.0}, c{0.0, 0.0}, d{0.0, 0.0};
    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    cplx det() const { return a * d - b * c; }
    Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    /** Matrix acting on a column vector. */
    Vec2 apply(const Vec2& u) const { return {a * u.x + b * u.y, c * u.x + d * u.y}; }
    /** Row vector acting on the matrix from the left. */
    Vec2 applyRow(const Vec2& v) const { return {v.x * a + v.y * c, v.x * b + v.y * d}; }
    /** Inverse via the adjugate divided by the determinant. */
    Mat2 inverse() const {
        cplx dt = det();
        if (std::abs(dt) < 1e-300) throw std::domain_error("Mat2: singular matrix");
        return {d / dt, -b / dt, -c / dt, a / dt};
    }
    Mat2 power(int e) const {
        Mat2 base = e >= 0 ? *this : inverse();
        Mat2 out = identity();
        for (int k = std::abs(e); k > 0; --k) out = out * base;
        return out;
    }
    double norm() const {
        return std::sqrt(std::norm(a) + std::norm(b) + std::norm(c) + std::norm(d));
    }
};

/** @brief Normalized wedge |v1 ^ v2| / (|v1| |v2|): 0 iff the lines agree. */
inline double lineWedge(const Vec2& v1, const Vec2& v2) {
    double n1 = v1.norm(), n2 = v2.norm();
    if (n1 == 0.0 || n2 == 0.0) throw std::domain_error("lineWedge: zero vector");
    return std::abs(v1.x * v2.y - v1.y * v2.x) / (n1 * n2);
}

// ---------------------------------------------------------------------------
// Decorated matrices and shadow colorings
// ---------------------------------------------------------------------------

/**
 * @brief Arc color: meridian holonomy g with invariant line [v] and
 * distinguished eigenvalue m (so v g = m^{-1} v).
 */
struct DecoratedMatrix {
    Mat2 g = Mat2::identity();
    Vec2 v{1.0, 0.0};
    cplx m{1.0, 0.0};

    void validate() const {
        if (std::abs(g.det() - cplx(1.0, 0.0)) > 1e-12)
            throw std::domain_error("DecoratedMatrix: det(g) != 1");
        Vec2 vg = g.applyRow(v);
        Vec2 want = v * (1.0 / m);
        double scale = std::max(1.0, std::max(vg.norm(), want.norm()));
        if ((vg - want).norm() / scale > 1e-10)
            throw std::domain_error("DecoratedMatrix: v g != m^{-1} v");
    }
};

/** @brief Shadow coloring: arc colors plus a column vector per region. */
struct ShadowColoring {
    std::vector<DecoratedMatrix> arcColors;  ///< indexed by arc
    std::vector<Vec2> regionColors;          ///< indexed by region
};

/** @brief Region on the right of the flow along a segment. */
inline int segmentRightRegion(const DiagramCombinatorics& dc, const SegmentInfo& seg) {
    int w = seg.wires.front();
    int g = dc.wireGap(w), row = dc.wireRow(w);
    return dc.diagram.wireDir[w] > 0 ? dc.regionBelow(g, row) : dc.regionAbove(g, row);
}

/**
 * @brief Fill all region colors from the top region's color.
 *
 * Propagation (Design Decision D1): crossing segment i from its left side to
 * its right side (relative to flow) multiplies by the segment holonomy:
 * u_right = g_i u_left, i.e. u_below = g^{+1} u_above for rightward strands
 * and u_below = g^{-1} u_above for leftward ones.  Consistency across all
 * segments is re-verified (it is implied by the Wirtinger relations).
 *
 * @throws std::domain_error on inconsistency beyond 1e-9 or unreachable
 * regions (malformed combinatorics).
 */
inline ShadowColoring propagateShadows(const DiagramCombinatorics& dc,
                                       const std::vector<DecoratedMatrix>& arcColors,
                                       const Vec2& topShadow) {
    if ((int)arcColors.size() != dc.numArcs)
        throw std::domain_error("propagateShadows: wrong number of arc colors");
    if (topShadow.norm() == 0.0)
        throw std::domain_error("propagateShadows: zero top shadow");
    for (const DecoratedMatrix& dm : arcColors) dm.validate();

    ShadowColoring sc;
    sc.arcColors = arcColors;
    sc.regionColors.assign(dc.numRegions, Vec2{});
    std::vector<bool> known(dc.numRegions, false);
    sc.regionColors[dc.topRegion] = topShadow;
    known[dc.topRegion] = true;

    // Region adjacency through segments.
    struct Edge {
        int other;
        Mat2 fwd; ///< multiply when moving left -> right across the segment
    };
    std::vector<std::vector<Edge>> adj(dc.numRegions);
    for (const SegmentInfo& seg : dc.segments) {
        int l = seg.leftRegion, r = segmentRightRegion(dc, seg);
        const Mat2& g = arcColors[seg.arc].g;
        adj[l].push_back({r, g});
        adj[r].push_back({l, g.inverse()});
    }
    std::vector<int> queue{dc.topRegion};
    while (!queue.empty()) {
        int j = queue.back();
        queue.pop_back();
        for (const Edge& e : adj[j]) {
            Vec2 u = e.fwd.apply(sc.regionColors[j]);
            if (!known[e.other]) {
                sc.regionColors[e.other] = u;
                known[e.other] = true;
                queue.push_back(e.other);
            } else {
                Vec2 have = sc.regionColors[e.other];
                double scale = std::max(1.0, std::max(u.norm(), have.norm()));
                if ((u - have).norm() / scale > 1e-9)
                    throw std::domain_error(
                        "propagateShadows: inconsistent shadow coloring "
                        "(arc colors violate the Wirtinger relations)");
            }
        }
    }
    for (int j = 0; j < dc.numRegions; ++j)
        if (!known[j]) throw std::domain_error("propagateShadows: unreachable region");
    return sc;
}

// ---------------------------------------------------------------------------
// Octahedral parameters and admissibility
// ---------------------------------------------------------------------------

struct OctahedralParameters {
    std::vector<cplx> a; ///< per region: a_j = e1 . u_j
    std::vector<cplx> b; ///< per segment: b_i = -(v_i e2)/(v_i u_i)
    std::vector<cplx> m; ///< per segment: the arc's distinguished eigenvalue
};

inline OctahedralParameters octahedralParameters(const DiagramCombinatorics& dc,
                                                 const ShadowColoring& sc) {
    OctahedralParameters p;
    p.a.reserve(dc.numRegions);
    for (int j = 0; j < dc.numRegions; ++j) p.a.push_back(sc.regionColors[j].x);
    p.b.reserve(dc.segments.size());
    p.m.reserve(dc.segments.size());
    for (const SegmentInfo& seg : dc.segments) {
        const DecoratedMatrix& dm = sc.arcColors[seg.arc];
        const Vec2& u = sc.regionColors[seg.leftRegion];
        cplx vu = dm.v.x * u.x + dm.v.y * u.y;
        // b = -(v e2)/(v u); a vanishing denominator is reported as an
        // infinite (inadmissible) value rather than an exception.
        p.b.push_back(vu == cplx(0.0, 0.0) ? cplx(INFINITY, 0.0) : -dm.v.y / vu);
        p.m.push_back(dm.m);
    }
    return p;
}

struct AdmissibilityReport {
    bool admissible = true;
    std::vector<int> badRegions;
    std::vector<int> badSegments;
};

inline AdmissibilityReport checkAdmissible(const DiagramCombinatorics& dc,
                                           const ShadowColoring& sc) {
    AdmissibilityReport rep;
    OctahedralParameters p = octahedralParameters(dc, sc);
    auto bad = [](cplx z) { return z == cplx(0.0, 0.0) || !std::isfinite(std::abs(z)); };
    for (int j = 0; j < (int)p.a.size(); ++j)
        if (bad(p.a[j])) { rep.admissible = false; rep.badRegions.push_back(j); }
    for (int i = 0; i < (int)p.b.size(); ++i)
        if (bad(p.b[i])) { rep.admissible = false; rep.badSegments.push_back(i); }
    return rep;
}

// ---------------------------------------------------------------------------
// Crossing parameter relations and classification
// ---------------------------------------------------------------------------

struct CrossingOutputs {
    cplx b1p, b2p, aE;
};

/**
 * @brief Closed-form outgoing parameters of a crossing from the incoming
 * ones.  Inputs are the region parameters a_N, a_W, a_S, incoming segment
 * parameters b1, b2, meridian parameters m1, m2, and the crossing sign.
 */
inline CrossingOutputs crossingOutputs(cplx aN, cplx aW, cplx aS, cplx b1, cplx b2, cplx m1,
                                       cplx m2, int sign) {
    CrossingOutputs out;
    if (sign > 0) {
        cplx t = 1.0 - b2 / (m1 * b1);
        out.b1p = (m2 * b2 / m1) / (1.0 - m2 * aS / aW * t);
        out.b2p = b1 * (1.0 - (m1 / (aW / aN)) * t);
        out.aE = (aN * aS - (m1 * b1 / b2) * (aN - aW / m1) * (aS - aW / m2)) / aW;
    } else {
        cplx t = 1.0 - m1 * b1 / b2;
        out.b1p = (m2 * b2 / m1) * (1.0 - ((aS / aW) / m2) * t);
        out.b2p = b1 / (1.0 - (1.0 / (m1 * (aW / aN))) * t);
        out.aE = (aN * aS - (b2 / (m1 * b1)) * (aN - m1 * aW) * (aS - m2 * aW)) / aW;
    }
    if (!std::isfinite(std::abs(out.b1p)) || !std::isfinite(std::abs(out.b2p)) ||
        !std::isfinite(std::abs(out.aE)))
        throw std::domain_error("crossingOutputs: inadmissible output coloring");
    return out;
}

enum class CrossingKind { Generic, Pinched, ENilpotent };

/** @brief Shape parameters and classification of one crossing. */
struct CrossingClass {
    CrossingKind kind = CrossingKind::Generic;
    // Corner order: N, W, S, E.
    cplx z0[4];
    cplx z1[4];
    cplx kConst;
    cplx a1, a2, a1p, a2p; ///< segment ratios
};

/** @brief Raise to the power sign = +-1. */
inline cplx signPow(cplx z, int sign) { return sign > 0 ? z : 1.0 / z; }

inline CrossingClass classifyCrossing(const DiagramCombinatorics& dc, const ShadowColoring& sc,
                                      int crossing) {
    const CrossingInfo& ci = dc.crossings[crossing];
    OctahedralParameters p = octahedralParameters(dc, sc);
    const int e = ci.sign;
    cplx b1 = p.b[ci.seg1], b2 = p.b[ci.seg2], b1p = p.b[ci.seg1p], b2p = p.b[ci.seg2p];
    cplx m1 = p.m[ci.seg1], m2 = p.m[ci.seg2];
    cplx aN = p.a[ci.regN], aW = p.a[ci.regW], aS = p.a[ci.regS], aE = p.a[ci.regE];

    CrossingClass cc;
    cc.z0[0] = signPow(b2p / b1, e);
    cc.z0[1] = signPow(b2 / (b1 * m1), e);
    cc.z0[2] = signPow(b2 * m2 / (b1p * m1), e);
    cc.z0[3] = signPow(b2p * m2 / b1p, e);
    cc.kConst = aN / (1.0 - cc.z0[0]);
    cplx m1e = signPow(m1, e), m2e = signPow(m2, e);
    cc.z1[0] = cc.kConst / aN;
    cc.z1[1] = cc.kConst * m1e / aW;
    cc.z1[2] = cc.kConst * m1e / (aS * m2e);
    cc.z1[3] = cc.kConst / (aE * m2e);
    cc.a1 = aW / aN;
    cc.a2 = aS / aW;
    cc.a2p = aE / aN;
    cc.a1p = aS / aE;

    const Vec2& v1 = sc.arcColors[dc.segments[ci.seg1].arc].v;
    const Vec2& v2 = sc.arcColors[dc.segments[ci.seg2].arc].v;
    bool pinched = lineWedge(v1, v2) < 1e-9;
    if (pinched) {
        // E-nilpotent: every corner shadow is an eigenvector of both
        // meridian matrices of the crossing.
        const Mat2& g1 = sc.arcColors[dc.segments[ci.seg1].arc].g;
        const Mat2& g2 = sc.arcColors[dc.segments[ci.seg2].arc].g;
        bool eig = true;
        for (int reg : {ci.regN, ci.regW, ci.regS, ci.regE}) {
            const Vec2& u = sc.regionColors[reg];
            if (lineWedge(g1.apply(u), u) > 1e-9 || lineWedge(g2.apply(u), u) > 1e-9)
                eig = false;
        }
        cc.kind = eig ? CrossingKind::ENilpotent : CrossingKind::Pinched;
    }
    return cc;
}

// ---------------------------------------------------------------------------
// Gauge transformations and admissibility repair
// ---------------------------------------------------------------------------

enum class GaugeKind { A, B };

/**
 * @brief Gauge transformation by h in SL2(C).
 *
 * Type A (strand pulled over the diagram): arcs (h^{-1} g h, v h), all
 * regions h^{-1} u.  Type B (strand pulled under the diagram): arcs
 * unchanged; the swept strand's color is conjugated along the way, so the
 * net effect is to recolor the top region by h^{-1} and re-propagate.
 */
inline ShadowColoring gaugeTransform(const DiagramCombinatorics& dc, const ShadowColoring& sc,
                                     const Mat2& h, GaugeKind kind) {
    if (std::abs(h.det() - cplx(1.0, 0.0)) > 1e-12)
        throw std::domain_error("gaugeTransform: det(h) != 1");
    Mat2 hinv = h.inverse();
    if (kind == GaugeKind::A) {
        ShadowColoring out;
        out.arcColors.reserve(sc.arcColors.size());
        for (const DecoratedMatrix& dm : sc.arcColors)
            out.arcColors.push_back({hinv * dm.g * h, h.applyRow(dm.v), dm.m});
        out.regionColors.reserve(sc.regionColors.size());
        for (const Vec2& u : sc.regionColors) out.regionColors.push_back(hinv.apply(u));
        return out;
    }
    return propagateShadows(dc, sc.arcColors, hinv.apply(sc.regionColors[dc.topRegion]));
}

struct RepairResult {
    Mat2 h;
    GaugeKind kind = GaugeKind::A;
    ShadowColoring coloring;
    int attempts = 0;
};

/**
 * @brief Deterministic search for a gauge transformation making the coloring
 * admissible.
 *
 * Attempt 0 is the identity.  Subsequent attempts draw h from a seeded
 * mt19937 stream (complex entries uniform in the unit box, completed to
 * det = 1) and alternate type-A transforms with type-B top-shadow tweaks.
 *
 * @throws std::runtime_error after 64 failed attempts.
 */
inline RepairResult repairAdmissibility(const DiagramCombinatorics& dc,
                                        const ShadowColoring& sc, unsigned seed) {
    if (checkAdmissible(dc, sc).admissible)
        return {Mat2::identity(), GaugeKind::A, sc, 0};
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    auto randc = [&] { return cplx(coef(rng), coef(rng)); };
    for (int attempt = 1; attempt <= 64; ++attempt) {
        GaugeKind kind = (attempt % 2 == 1) ? GaugeKind::A : GaugeKind::B;
        Mat2 h;
        // Random SL2 element: lower * upper triangular with unit diagonal,
        // then a diagonal twist.
        cplx x = randc(), y = randc(), t = std::exp(0.5 * randc());
        h = Mat2{t, 0.0, 0.0, 1.0 / t} * Mat2{1.0, x, 0.0, 1.0} * Mat2{1.0, 0.0, y, 1.0};
        try {
            ShadowColoring cand = gaugeTransform(dc, sc, h, kind);
            if (checkAdmissible(dc, cand).admissible)
                return {h, kind, std::move(cand), attempt};
        } catch (const std::domain_error&) {
            // Degenerate sample; try the next one.
        }
    }
    throw std::runtime_error("repairAdmissibility: no admissible gauge found in 64 attempts");
}

// ---------------------------------------------------------------------------
// JSON serialization
// ---------------------------------------------------------------------------

inline nlohmann::json toJson(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }
inline cplx cplxFromJson(const nlohmann::json& j) {
    return {j.at(0).get<double>(), j.at(1).get<double>()};
}

inline nlohmann::json toJson(const Vec2& u) {
    return nlohmann::json::array({toJson(u.x), toJson(u.y)});
}
inline Vec2 vec2FromJson(const nlohmann::json& j) {
    return {cplxFromJson(j.at(0)), cplxFromJson(j.at(1))};
}

inline nlohmann::json toJson(const Mat2& g) {
    return nlohmann::json::array(
        {toJson(g.a), toJson(g.b), toJson(g.c), toJson(g.d)});
}
inline Mat2 mat2FromJson(const nlohmann::json& j) {
    return {cplxFromJson(j.at(0)), cplxFromJson(j.at(1)), cplxFromJson(j.at(2)),
            cplxFromJson(j.at(3))};
}

/** @brief Coloring input schema: per-arc (g, v, m) plus the top shadow. */
struct ColoringInput {
    std::vector<DecoratedMatrix> arcColors;
    Vec2 topShadow{1.0, 0.0};
};

inline nlohmann::json toJson(const ColoringInput& in) {
    nlohmann::json arcs = nlohmann::json::array();
    for (const DecoratedMatrix& dm : in.arcColors)
        arcs.push_back({{"g", toJson(dm.g)}, {"v", toJson(dm.v)}, {"m", toJson(dm.m)}});
    return {{"arcs", arcs}, {"topShadow", toJson(in.topShadow)}};
}

inline ColoringInput coloringInputFromJson(const nlohmann::json& j) {
    ColoringInput in;
    for (const auto& a : j.at("arcs")) {
        DecoratedMatrix dm;
        dm.g = mat2FromJson(a.at("g"));
        dm.v = vec2FromJson(a.at("v"));
        dm.m = cplxFromJson(a.at("m"));
        in.arcColors.push_back(dm);
    }
    in.topShadow = vec2FromJson(j.at("topShadow"));
    return in;
}

} // namespace qinv
