/**
 * @file test_logdata.cpp
 * @brief Unit tests for log-colorings, flattenings, induced log-decorations,
 * branch adjustment, and standard pinched log-colorings.
 */

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qinv/logdata.hpp"

using namespace qinv;

namespace {

cplx randc(std::mt19937& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> d(lo, hi);
    return {d(rng), d(rng)};
}

DecoratedMatrix makeDecorated(const Vec2& v, cplx m, const Vec2& w) {
    Mat2 B{v.x, v.y, w.x, w.y};
    Mat2 D{1.0 / m, 0.0, 0.0, m};
    DecoratedMatrix dm{B.inverse() * D * B, v, m};
    dm.validate();
    return dm;
}

DecoratedMatrix randomDecorated(std::mt19937& rng) {
    for (;;) {
        Vec2 v{randc(rng), randc(rng)};
        Vec2 w{randc(rng), randc(rng)};
        cplx m = std::exp(randc(rng, -0.4, 0.4));
        if (std::abs(v.x * w.y - v.y * w.x) < 0.1) continue;
        if (std::abs(v.y) < 0.05 || v.norm() < 0.1) continue;
        return makeDecorated(v, m, w);
    }
}

std::vector<DecoratedMatrix> oneCrossingArcs(const DiagramCombinatorics& dc,
                                             const DecoratedMatrix& in1,
                                             const DecoratedMatrix& in2, int sign) {
    const CrossingInfo& ci = dc.crossings[0];
    std::vector<DecoratedMatrix> arcs(dc.numArcs);
    arcs[dc.segments[ci.seg1].arc] = in1;
    arcs[dc.segments[ci.seg2].arc] = in2;
    if (sign > 0) {
        DecoratedMatrix out{in1.g.inverse() * in2.g * in1.g, in1.g.applyRow(in2.v), in2.m};
        arcs[dc.segments[ci.seg2p].arc] = out;
    } else {
        DecoratedMatrix out{in2.g * in1.g * in2.g.inverse(),
                            in2.g.inverse().applyRow(in1.v), in1.m};
        arcs[dc.segments[ci.seg1p].arc] = out;
    }
    return arcs;
}

/// Diagonal-representation coloring of the Hopf cut diagram; returns the
/// combinatorics, coloring, and the (open, circle) meridians.
struct DiagonalHopf {
    DiagramCombinatorics dc;
    ShadowColoring sc;
    cplx mOpen, mCirc;
    int openComp, circComp;
};

DiagonalHopf diagonalHopf(std::mt19937& rng) {
    DiagonalHopf H;
    H.dc = buildCombinatorics(parseDiagram("cupl id ; id xp ; id xp ; capl id"));
    Mat2 P{1.0 + randc(rng, -0.2, 0.2), randc(rng), randc(rng), 0.0};
    P.d = (1.0 + P.b * P.c) / P.a; // det = 1
    Mat2 Pinv = P.inverse();
    H.mOpen = std::exp(randc(rng, -0.4, 0.4));
    H.mCirc = std::exp(randc(rng, -0.4, 0.4));
    auto diagColor = [&](cplx m) {
        DecoratedMatrix dm{P * Mat2{m, 0.0, 0.0, 1.0 / m} * Pinv,
                           Pinv.applyRow(Vec2{0.0, 1.0}), m};
        dm.validate();
        return dm;
    };
    std::vector<DecoratedMatrix> arcs(H.dc.numArcs);
    for (int a = 0; a < H.dc.numArcs; ++a) {
        int comp = -1;
        for (const SegmentInfo& s : H.dc.segments)
            if (s.arc == a) { comp = s.component; break; }
        arcs[a] = diagColor(H.dc.componentClosed[comp] ? H.mCirc : H.mOpen);
    }
    H.sc = propagateShadows(H.dc, arcs, P.apply(Vec2{0.0, 1.0}));
    H.openComp = H.dc.componentClosed[0] ? 1 : 0;
    H.circComp = 1 - H.openComp;
    return H;
}

} // namespace

TEST_CASE("liftColoring principal branches and offsets") {
    auto dc = buildCombinatorics(parseDiagram("id"));
    // v = (1,1), u_top = (1,0): a_top = 1, b = -1.
    DecoratedMatrix dm = makeDecorated(Vec2{1.0, 1.0}, cplx(2.0, 0.0), Vec2{0.0, 1.0});
    auto sc = propagateShadows(dc, {dm}, Vec2{1.0, 0.0});
    auto lc = liftColoring(dc, sc);
    CHECK(std::abs(lc.alpha[dc.topRegion].value()) < 1e-15);      // a = 1 -> 0
    CHECK(std::abs(lc.beta[0].value() - cplx(0.5, 0.0)) < 1e-12); // b = -1 -> 1/2
    BranchOffsets off;
    off.beta = {3};
    auto lc3 = liftColoring(dc, sc, off);
    CHECK(std::abs(lc3.beta[0].value() - cplx(3.5, 0.0)) < 1e-12); // 1/2 + 3

    // Re-exponentiation across a random admissible coloring.
    std::mt19937 rng(11);
    auto xdc = buildCombinatorics(parseDiagram("xp"));
    auto arcs = oneCrossingArcs(xdc, randomDecorated(rng), randomDecorated(rng), +1);
    auto xsc = propagateShadows(xdc, arcs, Vec2{randc(rng), randc(rng)});
    REQUIRE(checkAdmissible(xdc, xsc).admissible);
    auto xlc = liftColoring(xdc, xsc);
    auto p = octahedralParameters(xdc, xsc);
    for (int j = 0; j < xdc.numRegions; ++j)
        CHECK(relDist(e2pi(xlc.alpha[j].value()), p.a[j]) < 1e-9);
    for (int i = 0; i < (int)xdc.segments.size(); ++i)
        CHECK(relDist(e2pi(xlc.beta[i].value()), p.b[i]) < 1e-9);
    for (int c = 0; c < xdc.numComponents; ++c)
        CHECK(relDist(e2pi(xlc.mu[c].value()), componentMeridian(xdc, xsc, c)) < 1e-9);
}

TEST_CASE("flattening of generic crossings") {
    std::mt19937 rng(22);
    for (int sign : {+1, -1}) {
        auto dc = buildCombinatorics(parseDiagram(sign > 0 ? "xp" : "xn"));
        for (int trial = 0; trial < 20; ++trial) {
            auto arcs =
                oneCrossingArcs(dc, randomDecorated(rng), randomDecorated(rng), sign);
            auto sc = propagateShadows(dc, arcs, Vec2{randc(rng), randc(rng)});
            if (!checkAdmissible(dc, sc).admissible) continue;
            auto lc = liftColoring(dc, sc);
            auto cc = classifyCrossing(dc, sc, 0);
            if (cc.kind != CrossingKind::Generic) continue;
            auto f = flattening(dc, lc, 0);
            REQUIRE(!f.pinched);
            for (int corner = 0; corner < 4; ++corner) {
                CAPTURE(sign, trial, corner);
                CHECK(relDist(e2pi(f.zeta0[corner]), cc.z0[corner]) < 1e-9);
                CHECK(relDist(e2pi(f.zeta1[corner]), cc.z1[corner]) < 1e-9);
                // Cover condition.
                CHECK(std::abs(e2pi(f.zeta0[corner]) + e2pi(-f.zeta1[corner]) - 1.0) <
                      1e-9);
            }
            // kappa-branch shift: zeta1 += 1, zeta0 unchanged.
            auto f1 = flattening(dc, lc, 0, 1);
            for (int corner = 0; corner < 4; ++corner) {
                CHECK(std::abs(f1.zeta0[corner] - f.zeta0[corner]) < 1e-12);
                CHECK(std::abs(f1.zeta1[corner] - f.zeta1[corner] - 1.0) < 1e-12);
            }
        }
    }
}

TEST_CASE("pinched flattening has integer zeta0") {
    std::mt19937 rng(33);
    auto dc = buildCombinatorics(parseDiagram("xp"));
    for (int trial = 0; trial < 15; ++trial) {
        Vec2 v{randc(rng), randc(rng)};
        if (std::abs(v.y) < 0.1) { --trial; continue; }
        DecoratedMatrix in1 =
            makeDecorated(v, std::exp(randc(rng, -0.4, 0.4)), Vec2{randc(rng), randc(rng)});
        DecoratedMatrix in2 =
            makeDecorated(v, std::exp(randc(rng, -0.4, 0.4)), Vec2{randc(rng), randc(rng)});
        auto sc = propagateShadows(dc, oneCrossingArcs(dc, in1, in2, +1),
                                   Vec2{randc(rng), randc(rng)});
        if (!checkAdmissible(dc, sc).admissible) continue;
        auto lc = liftColoring(dc, sc);
        auto f = flattening(dc, lc, 0);
        REQUIRE(f.pinched);
        for (int corner = 0; corner < 4; ++corner)
            CHECK(std::abs(f.zeta0[corner].real() - std::round(f.zeta0[corner].real())) <
                  1e-9);
        // Standardization zeroes them.
        auto std_lc = standardPinchedLogColoring(dc, sc, lc, 0);
        auto f0 = flattening(dc, std_lc, 0);
        for (int corner = 0; corner < 4; ++corner)
            CHECK(std::abs(f0.zeta0[corner]) < 1e-9);
        // Idempotent.
        auto again = standardPinchedLogColoring(dc, sc, std_lc, 0);
        for (size_t i = 0; i < again.beta.size(); ++i)
            CHECK(again.beta[i].shift == std_lc.beta[i].shift);
    }
}

TEST_CASE("standardPinchedLogColoring rejects generic crossings") {
    std::mt19937 rng(44);
    auto dc = buildCombinatorics(parseDiagram("xp"));
    auto sc = propagateShadows(
        dc, oneCrossingArcs(dc, randomDecorated(rng), randomDecorated(rng), +1),
        Vec2{randc(rng), randc(rng)});
    REQUIRE(checkAdmissible(dc, sc).admissible);
    auto lc = liftColoring(dc, sc);
    CHECK_THROWS_AS(standardPinchedLogColoring(dc, sc, lc, 0), std::domain_error);
}

TEST_CASE("diagonal Hopf: E-nilpotent standardization and lambda = lk mu") {
    std::mt19937 rng(55);
    for (int trial = 0; trial < 8; ++trial) {
        DiagonalHopf H = diagonalHopf(rng);
        REQUIRE(checkAdmissible(H.dc, H.sc).admissible);
        auto p = octahedralParameters(H.dc, H.sc);
        // Empirical eigen-direction: corner shadows are m^{-1}-eigenvectors,
        // so a_W/a_N = m1^{-1} at each crossing.
        const CrossingInfo& c0 = H.dc.crossings[0];
        CHECK(relDist(p.a[c0.regW] / p.a[c0.regN], 1.0 / p.m[c0.seg1]) < 1e-9);

        auto lc = liftColoring(H.dc, H.sc);
        for (int c = 0; c < (int)H.dc.crossings.size(); ++c)
            lc = standardPinchedLogColoring(H.dc, H.sc, lc, c);
        // Standardizing the second crossing must not unstandardize the first.
        for (int c = 0; c < (int)H.dc.crossings.size(); ++c) {
            auto f = flattening(H.dc, lc, c);
            REQUIRE(f.pinched);
            for (int corner = 0; corner < 4; ++corner)
                CHECK(std::abs(f.zeta0[corner]) < 1e-9);
        }
        // Standard alphas at an E-nilpotent crossing.
        cplx aN = lc.alpha[c0.regN].value();
        cplx mu1 = lc.mu[H.dc.segments[c0.seg1].component].value();
        cplx mu2 = lc.mu[H.dc.segments[c0.seg2].component].value();
        CHECK(std::abs(lc.alpha[c0.regW].value() - (aN - mu1)) < 1e-9);
        CHECK(std::abs(lc.alpha[c0.regS].value() - (aN - mu1 - mu2)) < 1e-9);
        CHECK(std::abs(lc.alpha[c0.regE].value() - (aN - mu2)) < 1e-9);

        // Induced log-decoration: lambda = lk mu = (mu_circ, mu_open).
        auto dec = inducedLogDecoration(H.dc, lc);
        CHECK(std::abs(dec.lambda[H.openComp] - dec.mu[H.circComp]) < 1e-9);
        CHECK(std::abs(dec.lambda[H.circComp] - dec.mu[H.openComp]) < 1e-9);
        // Closed-component rule: lambda = sum eta beta.
        cplx etaSum(0.0, 0.0);
        for (int s : H.dc.componentSegments[H.circComp])
            etaSum += (double)H.dc.segments[s].eta() * lc.beta[s].value();
        CHECK(std::abs(dec.lambda[H.circComp] - etaSum) < 1e-9);
    }
}

TEST_CASE("zero-crossing diagram has lambda = 0") {
    auto dc = buildCombinatorics(parseDiagram("id"));
    std::mt19937 rng(66);
    auto sc = propagateShadows(dc, {randomDecorated(rng)}, Vec2{1.0, 0.3});
    auto dec = inducedLogDecoration(dc, liftColoring(dc, sc));
    CHECK(std::abs(dec.lambda[0]) == 0.0);
}

TEST_CASE("adjustToTarget") {
    std::mt19937 rng(77);
    auto dc = buildCombinatorics(parseDiagram("xp ; xn"));
    // Two-crossing two-strand word: both crossings involve both components.
    DecoratedMatrix in1 = randomDecorated(rng), in2 = randomDecorated(rng);
    // Arc colors: build by walking the Wirtinger relations.
    std::vector<DecoratedMatrix> arcs(dc.numArcs);
    {
        const CrossingInfo& c0 = dc.crossings[0];
        arcs[dc.segments[c0.seg1].arc] = in1;
        arcs[dc.segments[c0.seg2].arc] = in2;
        DecoratedMatrix mid{in1.g.inverse() * in2.g * in1.g, in1.g.applyRow(in2.v), in2.m};
        arcs[dc.segments[c0.seg2p].arc] = mid;
        const CrossingInfo& c1 = dc.crossings[1];
        // Negative crossing: x_{1'} = x_2 x_1 x_2^{-1}.
        const DecoratedMatrix& a1 = arcs[dc.segments[c1.seg1].arc];
        const DecoratedMatrix& a2 = arcs[dc.segments[c1.seg2].arc];
        DecoratedMatrix out{a2.g * a1.g * a2.g.inverse(), a2.g.inverse().applyRow(a1.v),
                            a1.m};
        arcs[dc.segments[c1.seg1p].arc] = out;
    }
    auto sc = propagateShadows(dc, arcs, Vec2{randc(rng), randc(rng)});
    REQUIRE(checkAdmissible(dc, sc).admissible);
    auto lc = liftColoring(dc, sc);
    auto induced = inducedLogDecoration(dc, lc);

    // Identity target.
    auto same = adjustToTarget(dc, lc, induced);
    auto dec0 = inducedLogDecoration(dc, same);
    for (int c = 0; c < dc.numComponents; ++c) {
        CHECK(std::abs(dec0.mu[c] - induced.mu[c]) < 1e-12);
        CHECK(std::abs(dec0.lambda[c] - induced.lambda[c]) < 1e-12);
    }

    // Integer shifts in mu and lambda.
    LogDecoration target = induced;
    target.mu[0] += 1.0;
    target.lambda[0] += 1.0;
    target.lambda[1] -= 2.0;
    auto adj = adjustToTarget(dc, lc, target);
    auto dec1 = inducedLogDecoration(dc, adj);
    for (int c = 0; c < dc.numComponents; ++c) {
        CHECK(std::abs(dec1.mu[c] - target.mu[c]) < 1e-12);
        CHECK(std::abs(dec1.lambda[c] - target.lambda[c]) < 1e-9);
    }
    // Alphas untouched.
    for (int j = 0; j < dc.numRegions; ++j) CHECK(adj.alpha[j].shift == lc.alpha[j].shift);

    // Non-congruent targets fail.
    LogDecoration badMu = induced;
    badMu.mu[0] += 0.5;
    CHECK_THROWS_AS(adjustToTarget(dc, lc, badMu), std::domain_error);

    // Lambda shift on a crossingless diagram is unreachable.
    auto idDc = buildCombinatorics(parseDiagram("id"));
    auto idSc = propagateShadows(idDc, {randomDecorated(rng)}, Vec2{1.0, 0.2});
    auto idLc = liftColoring(idDc, idSc);
    auto idInduced = inducedLogDecoration(idDc, idLc);
    LogDecoration badLambda = idInduced;
    badLambda.lambda[0] += 1.0;
    CHECK_THROWS_AS(adjustToTarget(idDc, idLc, badLambda), std::domain_error);
}

TEST_CASE("log-decoration JSON round trip") {
    LogDecoration dec;
    dec.mu = {cplx(0.25, -0.5), cplx(1.5, 0.0)};
    dec.lambda = {cplx(-0.75, 0.1), cplx(2.0, -1.0)};
    auto back = logDecorationFromJson(toJson(dec));
    REQUIRE(back.mu.size() == 2);
    for (size_t c = 0; c < 2; ++c) {
        CHECK(back.mu[c] == dec.mu[c]);
        CHECK(back.lambda[c] == dec.lambda[c]);
    }
}
