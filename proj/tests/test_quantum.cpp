/**
 * @file test_quantum.cpp
 * @brief Unit tests for module actions, basis changes, ev/coev tensors, and
 * crossing tensors (generic, pinched, E-nilpotent) with independent oracles.
 */

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "qinv/quantum.hpp"
#include "test_helpers.hpp"

using namespace qinv;
using testutil::randc;

namespace {

ModuleBasisContext randomContext(std::mt19937& rng, int orientation) {
    return {randc(rng), randc(rng), randc(rng), randc(rng), orientation};
}

double relNorm(const CMatrix& a, const CMatrix& b) {
    return (a - b).norm() / (a.norm() + b.norm() + 1.0);
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

/// Operator matrix of a crossing tensor transported from the bases of `from`
/// to the bases of `to` (same characters, different branches).
CMatrix transportedMatrix(const RootOfUnityContext& ctx, const CrossingTensor& t,
                          const CrossingContexts& from, const CrossingContexts& to) {
    CMatrix bIn = kron(basisChange(ctx, to.s1, from.s1), basisChange(ctx, to.s2, from.s2));
    CMatrix bOut = kron(basisChange(ctx, to.s2p, from.s2p),
                        basisChange(ctx, to.s1p, from.s1p));
    return bOut.inverse() * t.asMatrix() * bIn;
}

} // namespace

TEST_CASE("Weyl and quantum-group action matrices") {
    std::mt19937 rng(101);
    for (int N : {2, 3, 5}) {
        RootOfUnityContext ctx(N);
        for (int orientation : {+1, -1}) {
            ModuleBasisContext mbc = randomContext(rng, orientation);
            CMatrix x = actionMatrix(ctx, AlgebraElement::X, mbc);
            CMatrix y = actionMatrix(ctx, AlgebraElement::Y, mbc);
            CMatrix z = actionMatrix(ctx, AlgebraElement::Z, mbc);
            // Weyl relations: xy = omega yx, z central.
            CHECK(relNorm(x * y, ctx.omega * y * x) < 1e-12);
            CHECK(relNorm(x * z, z * x) < 1e-12);
            CHECK(relNorm(y * z, z * y) < 1e-12);
            // Inverses are exact.
            CHECK(relNorm(x * actionMatrix(ctx, AlgebraElement::Xinv, mbc),
                          CMatrix::Identity(N, N)) < 1e-12);
            CHECK(relNorm(y * actionMatrix(ctx, AlgebraElement::Yinv, mbc),
                          CMatrix::Identity(N, N)) < 1e-12);
            // Central characters: x^N, y^N, z scalars.
            CentralCharacter chi = centralCharacter(ctx, mbc);
            CMatrix xN = CMatrix::Identity(N, N), yN = xN;
            for (int k = 0; k < N; ++k) { xN = x * xN; yN = y * yN; }
            cplx xNval = orientation > 0 ? chi.aDn / chi.aUp : chi.aUp / chi.aDn;
            cplx yNval = orientation > 0 ? chi.b : chi.b * chi.m * ctx.omegaPow((double)N);
            CHECK(relNorm(xN, xNval * CMatrix::Identity(N, N)) < 1e-10);
            CHECK(relNorm(yN, yNval * CMatrix::Identity(N, N)) < 1e-10);
        }
        // z scalar and dual y diagonal match the stated formulas.
        ModuleBasisContext mod = randomContext(rng, +1);
        CHECK(relNorm(actionMatrix(ctx, AlgebraElement::Z, mod),
                      ctx.omegaPow(mod.mu) * CMatrix::Identity(N, N)) < 1e-12);
        ModuleBasisContext dual = randomContext(rng, -1);
        CMatrix yd = actionMatrix(ctx, AlgebraElement::Y, dual);
        for (int n = 0; n < N; ++n)
            CHECK(std::abs(yd(n, n) -
                           ctx.omegaPow(dual.beta + (double)n + dual.mu + 1.0)) < 1e-12);
        // Quantum sl2 relations via phi: K E K^{-1} = omega E, K F K^{-1} = omega^{-1} F.
        CMatrix K = actionMatrix(ctx, AlgebraElement::K, mod);
        CMatrix Ki = actionMatrix(ctx, AlgebraElement::Kinv, mod);
        CMatrix E = actionMatrix(ctx, AlgebraElement::E, mod);
        CMatrix F = actionMatrix(ctx, AlgebraElement::F, mod);
        CHECK(relNorm(K * E * Ki, ctx.omega * E) < 1e-10);
        CHECK(relNorm(K * F * Ki, (1.0 / ctx.omega) * F) < 1e-10);
    }
}

TEST_CASE("basisChange conjugates the actions and obeys the stated factors") {
    std::mt19937 rng(202);
    for (int N : {2, 3, 4}) {
        RootOfUnityContext ctx(N);
        for (int orientation : {+1, -1}) {
            for (int trial = 0; trial < 6; ++trial) {
                ModuleBasisContext from = randomContext(rng, orientation);
                std::uniform_int_distribution<int> shift(-2, 2);
                ModuleBasisContext to = from;
                to.alphaUp += (double)shift(rng);
                to.alphaDn += (double)shift(rng);
                to.beta += (double)shift(rng);
                to.mu += (double)(N * shift(rng));
                CMatrix B = basisChange(ctx, from, to);
                CMatrix Binv = basisChange(ctx, to, from);
                CHECK(relNorm(B * Binv, CMatrix::Identity(N, N)) < 1e-10);
                for (AlgebraElement g : {AlgebraElement::X, AlgebraElement::Y,
                                         AlgebraElement::Z, AlgebraElement::K,
                                         AlgebraElement::E, AlgebraElement::F}) {
                    CMatrix af = actionMatrix(ctx, g, from);
                    CMatrix at = actionMatrix(ctx, g, to);
                    CHECK(relNorm(at, B * af * B.inverse()) < 1e-9);
                }
            }
        }
        // beta -> beta + 1: index shift with factor omega^{-(alphaDn-alphaUp)/2}.
        ModuleBasisContext f = randomContext(rng, +1);
        ModuleBasisContext fb = f;
        fb.beta += 1.0;
        CMatrix B = basisChange(ctx, f, fb);
        cplx C = ctx.omegaPow(-0.5 * (f.alphaDn - f.alphaUp));
        for (int n = 0; n < N; ++n)
            CHECK(std::abs(B(n, modN(n + 1, N)) - 1.0 / C) < 1e-12);
        // mu -> mu + N: overall scalar omega^{-N alphaDn / 2}.
        ModuleBasisContext fm = f;
        fm.mu += (double)N;
        CMatrix Bm = basisChange(ctx, f, fm);
        cplx s = ctx.omegaPow(-0.5 * (double)N * f.alphaDn);
        CHECK(relNorm(Bm, (1.0 / s) * CMatrix::Identity(N, N)) < 1e-12);
        // Identity on identical contexts; throws on non-congruent ones.
        CHECK(relNorm(basisChange(ctx, f, f), CMatrix::Identity(N, N)) < 1e-15);
        ModuleBasisContext bad = f;
        bad.mu += 1.0;
        CHECK_THROWS_AS(basisChange(ctx, f, bad), std::domain_error);
    }
}

TEST_CASE("ev/coev tensors: snakes and log-coloring independence") {
    std::mt19937 rng(303);
    for (int N : {2, 3, 5}) {
        RootOfUnityContext ctx(N);
        ModuleBasisContext f = randomContext(rng, +1);
        CMatrix cu = evCoevTensor(ctx, EvCoevKind::CoevUp, f);
        CMatrix eu = evCoevTensor(ctx, EvCoevKind::EvUp, f);
        CMatrix cd = evCoevTensor(ctx, EvCoevKind::CoevDown, f);
        CMatrix ed = evCoevTensor(ctx, EvCoevKind::EvDown, f);
        CHECK(relNorm(cu * eu, CMatrix::Identity(N, N)) < 1e-12);
        CHECK(relNorm(cd * ed, CMatrix::Identity(N, N)) < 1e-12);
        CHECK(relNorm(ed * cd, CMatrix::Identity(N, N)) < 1e-12);
        // coevDown expansion: index shift +1, factor omega^{(N-1)(alphaDn-alphaUp)}.
        for (int n = 0; n < N; ++n)
            CHECK(std::abs(cd(n, modN(n + 1, N)) -
                           ctx.omegaPow((double)(N - 1) * (f.alphaDn - f.alphaUp))) <
                  1e-12);
        // Invariance under basis change: legs transform contragradiently.
        ModuleBasisContext f2 = f;
        f2.alphaUp += 1.0;
        f2.alphaDn += -2.0;
        f2.beta += 1.0;
        ModuleBasisContext fd = f, f2d = f2;
        fd.orientation = f2d.orientation = -1;
        CMatrix Bm = basisChange(ctx, f, f2);
        CMatrix Bd = basisChange(ctx, fd, f2d);
        // coevUp legs (module, dual): coefficients transform by Bm (x) Bd.
        CMatrix cu2 = evCoevTensor(ctx, EvCoevKind::CoevUp, f2);
        CHECK(relNorm(Bm * cu * Bd.transpose(), cu2) < 1e-10);
        CMatrix cd2 = evCoevTensor(ctx, EvCoevKind::CoevDown, f2);
        CHECK(relNorm(Bd * cd * Bm.transpose(), cd2) < 1e-10);
        // ev legs are inputs: the tensor contracts coefficient vectors, so it
        // transforms by the inverse-transpose pair.
        CMatrix eu2 = evCoevTensor(ctx, EvCoevKind::EvUp, f2);
        CHECK(relNorm(Bd.inverse().transpose() * eu * Bm.inverse(), eu2) < 1e-10);
        CMatrix ed2 = evCoevTensor(ctx, EvCoevKind::EvDown, f2);
        CHECK(relNorm(Bm.inverse().transpose() * ed * Bd.inverse(), ed2) < 1e-10);
    }
}

TEST_CASE("generic crossing tensor: Theta-form cross-check and intertwining") {
    std::mt19937 rng(404);
    for (int N : {2, 3, 4, 5}) {
        RootOfUnityContext ctx(N);
        for (int sign : {+1, -1}) {
            for (int trial = 0; trial < 3; ++trial) {
                auto oc = testutil::randomOneCrossing(rng, sign);
                auto lc = liftColoring(oc.dc, oc.sc);
                auto f = flattening(oc.dc, lc, 0);
                auto cc = crossingContexts(oc.dc, lc, 0);
                CrossingTensor t = genericCrossingTensor(ctx, f, sign);
                if (sign > 0) {
                    CrossingTensor alt = genericPositiveThetaForm(ctx, f, cc);
                    double num = 0.0, den = 0.0;
                    for (size_t i = 0; i < t.entries.size(); ++i) {
                        num += std::abs(t.entries[i] - alt.entries[i]);
                        den += std::abs(t.entries[i]);
                    }
                    CAPTURE(N, trial);
                    CHECK(num / den < 1e-9);
                }
                CMatrix R = t.asMatrix();
                for (AlgebraElement g :
                     {AlgebraElement::K, AlgebraElement::E, AlgebraElement::F}) {
                    CMatrix in = coproductAction(ctx, g, cc.s1, cc.s2);
                    CMatrix out = coproductAction(ctx, g, cc.s2p, cc.s1p);
                    CAPTURE(N, sign, trial, (int)g);
                    CHECK((R * in - out * R).norm() /
                              (R.norm() * in.norm() + 1.0) <
                          1e-8);
                }
            }
        }
    }
}

TEST_CASE("crossing tensor log-decoration laws") {
    std::mt19937 rng(505);
    for (int N : {2, 3}) {
        RootOfUnityContext ctx(N);
        for (int sign : {+1, -1}) {
            auto oc = testutil::randomOneCrossing(rng, sign);
            auto lc = liftColoring(oc.dc, oc.sc);
            auto f = flattening(oc.dc, lc, 0);
            auto cc = crossingContexts(oc.dc, lc, 0);
            CMatrix R = genericCrossingTensor(ctx, f, sign).asMatrix();
            const CrossingInfo& ci = oc.dc.crossings[0];
            auto induced = inducedLogDecoration(oc.dc, lc);
            int comp1 = oc.dc.segments[ci.seg1].component;
            int comp2 = oc.dc.segments[ci.seg2].component;

            SECTION("independence: same induced decoration") {
                LogColoring lc2 = lc;
                lc2.alpha[ci.regW].shift += 2;
                lc2.alpha[ci.regN].shift -= 1;
                lc2.beta[ci.seg2].shift += 1;
                lc2.beta[ci.seg2p].shift += 1; // lambda_2 contribution cancels
                auto dec2 = inducedLogDecoration(oc.dc, lc2);
                REQUIRE(std::abs(dec2.lambda[comp2] - induced.lambda[comp2]) < 1e-12);
                auto f2 = flattening(oc.dc, lc2, 0);
                auto cc2 = crossingContexts(oc.dc, lc2, 0);
                CrossingTensor t2 = genericCrossingTensor(ctx, f2, sign);
                CMatrix M = transportedMatrix(ctx, t2, cc2, cc);
                CAPTURE(N, sign);
                CHECK(relNorm(M, R) < 1e-9);
            }

            SECTION("longitude rule") {
                LogColoring lc2 = lc;
                lc2.beta[ci.seg1p].shift += 1;
                lc2.beta[ci.seg1].shift -= 1;
                auto dec2 = inducedLogDecoration(oc.dc, lc2);
                cplx dl1 = dec2.lambda[comp1] - induced.lambda[comp1];
                REQUIRE(std::abs(dl1 - (double)sign) < 1e-12);
                auto f2 = flattening(oc.dc, lc2, 0);
                auto cc2 = crossingContexts(oc.dc, lc2, 0);
                CrossingTensor t2 = genericCrossingTensor(ctx, f2, sign);
                CMatrix M = transportedMatrix(ctx, t2, cc2, cc);
                cplx factor = ctx.omegaPow(-dl1 * lc.mu[comp1].value());
                CAPTURE(N, sign);
                CHECK(relNorm(M, factor * R) < 1e-9);
            }

            SECTION("meridian rule") {
                LogColoring lc2 = lc;
                lc2.mu[comp2].shift += N;
                auto f2 = flattening(oc.dc, lc2, 0);
                auto cc2 = crossingContexts(oc.dc, lc2, 0);
                CrossingTensor t2 = genericCrossingTensor(ctx, f2, sign);
                CMatrix M = transportedMatrix(ctx, t2, cc2, cc);
                cplx factor = ctx.omegaPow((double)N * induced.lambda[comp2]);
                CAPTURE(N, sign);
                CHECK(relNorm(M, factor * R) < 1e-9);
            }
        }
    }
}

TEST_CASE("determinant oracle") {
    std::mt19937 rng(606);
    for (int N : {2, 3, 4}) {
        RootOfUnityContext ctx(N);
        for (int sign : {+1, -1}) {
            for (int trial = 0; trial < 3; ++trial) {
                auto oc = testutil::randomOneCrossing(rng, sign);
                auto lc = liftColoring(oc.dc, oc.sc);
                auto f = flattening(oc.dc, lc, 0);
                auto cc = crossingContexts(oc.dc, lc, 0);
                CrossingTensor t = genericCrossingTensor(ctx, f, sign);
                cplx numeric = t.asMatrix().determinant();
                cplx formula = crossingDeterminant(ctx, cc, f);
                CAPTURE(N, sign, trial, numeric, formula);
                CHECK(relDist(numeric, formula) < 1e-7);
            }
        }
    }
}

TEST_CASE("pinched tensors: theta support, Fourier duality, inverse negatives") {
    std::mt19937 rng(707);
    for (int N : {2, 3, 4, 5}) {
        RootOfUnityContext ctx(N);
        // theta at n1=n2=n2'=n1'=0 equals 1 (direct evaluation).
        CHECK(cutoff(modN(0, N) + modN(-1, N), N) * cutoff(0, N) == 1);

        testutil::DiagonalHopf H = testutil::diagonalHopf(rng);
        auto lc = liftColoring(H.dc, H.sc);
        for (int c = 0; c < (int)H.dc.crossings.size(); ++c)
            lc = standardPinchedLogColoring(H.dc, H.sc, lc, c);
        auto cls = classifyCrossing(H.dc, H.sc, 0);
        REQUIRE(cls.kind == CrossingKind::ENilpotent);
        auto cc = crossingContexts(H.dc, lc, 0);
        CrossingTensor Rp = pinchedPositiveTensor(ctx, cc, cls.kind);

        SECTION("Fourier conjugation matches the weight-basis R-matrix") {
            CrossingTensor Rw = weightBasisR(ctx, cc.s2.mu);
            CMatrix G(N, N);
            for (int k = 0; k < N; ++k)
                for (int n = 0; n < N; ++n) G(k, n) = ctx.omegaPow((double)(n * k));
            CMatrix GG = kron(G, G);
            CMatrix lhs = GG * Rp.asMatrix() * GG.inverse();
            CAPTURE(N);
            CHECK(relNorm(lhs, Rw.asMatrix()) < 1e-9);
        }

        SECTION("pinched tensor intertwines the quantum-group action") {
            CMatrix R = Rp.asMatrix();
            for (AlgebraElement g :
                 {AlgebraElement::K, AlgebraElement::E, AlgebraElement::F}) {
                CMatrix in = coproductAction(ctx, g, cc.s1, cc.s2);
                CMatrix out = coproductAction(ctx, g, cc.s2p, cc.s1p);
                CAPTURE(N, (int)g);
                CHECK((R * in - out * R).norm() / (R.norm() * in.norm() + 1.0) < 1e-8);
            }
        }

        SECTION("negative pinched tensor inverts its matched positive") {
            // Build a negative crossing whose matched positive is cc.
            CrossingContexts neg;
            neg.sign = -1;
            neg.s2p = cc.s1;
            neg.s1p = cc.s2;
            neg.s1 = cc.s2p;
            neg.s2 = cc.s1p;
            CrossingFlattening unusedF;
            unusedF.pinched = true;
            CrossingTensor Rn = crossingTensor(ctx, neg, unusedF, cls.kind);
            CHECK(relNorm(Rn.asMatrix() * Rp.asMatrix(), CMatrix::Identity(N * N, N * N)) <
                  1e-9);
            // And it is an intertwiner for its own boundary contexts.
            CMatrix in = coproductAction(ctx, AlgebraElement::E, neg.s1, neg.s2);
            CMatrix out = coproductAction(ctx, AlgebraElement::E, neg.s2p, neg.s1p);
            CMatrix R = Rn.asMatrix();
            CHECK((R * in - out * R).norm() / (R.norm() * in.norm() + 1.0) < 1e-8);
        }
    }
}

TEST_CASE("continuity at the pinch") {
    std::mt19937 rng(808);
    for (int N : {2, 3, 4}) {
        RootOfUnityContext ctx(N);
        for (int sign : {+1, -1}) {
            auto dc = buildCombinatorics(parseDiagram(sign > 0 ? "xp" : "xn"));
            // Shared eigenline at t=0, perturbed by t along d.
            Vec2 v1{randc(rng), randc(rng)};
            while (v1.norm() < 0.3 || std::abs(v1.y) < 0.2)
                v1 = Vec2{randc(rng), randc(rng)};
            Vec2 w1{randc(rng), randc(rng)}, w2{randc(rng), randc(rng)};
            Vec2 d{randc(rng), randc(rng)};
            cplx m1 = std::exp(randc(rng, -0.3, 0.3)), m2 = std::exp(randc(rng, -0.3, 0.3));
            Vec2 u{randc(rng), randc(rng)};

            auto coloringAt = [&](double t) {
                Vec2 v2{v1.x + t * d.x, v1.y + t * d.y};
                auto arcs = testutil::oneCrossingArcs(
                    dc, testutil::makeDecorated(v1, m1, w1),
                    testutil::makeDecorated(v2, m2, w2), sign);
                return propagateShadows(dc, arcs, u);
            };

            ShadowColoring sc0 = coloringAt(0.0);
            if (!checkAdmissible(dc, sc0).admissible) continue;
            auto cls0 = classifyCrossing(dc, sc0, 0);
            REQUIRE(cls0.kind != CrossingKind::Generic);
            auto lc0 = standardPinchedLogColoring(dc, sc0, liftColoring(dc, sc0), 0);
            auto cc0 = crossingContexts(dc, lc0, 0);
            CrossingFlattening f0 = flattening(dc, lc0, 0);
            CrossingTensor pinched = crossingTensor(ctx, cc0, f0, cls0.kind);
            cplx csPinched = std::exp(diloct(f0, cc0));

            // Generic-formula tensor at perturbation t, with all branches
            // matched to the standard pinched lift.
            auto genericAt = [&](double t, cplx* csFactor) {
                ShadowColoring sct = coloringAt(t);
                REQUIRE(checkAdmissible(dc, sct).admissible);
                REQUIRE(classifyCrossing(dc, sct, 0).kind == CrossingKind::Generic);
                auto lct = liftColoring(dc, sct);
                auto match = [](std::vector<LogLift>& lifts,
                                const std::vector<LogLift>& ref) {
                    for (size_t i = 0; i < lifts.size(); ++i)
                        lifts[i].shift += (long long)std::llround(
                            (ref[i].value() - lifts[i].value()).real());
                };
                match(lct.alpha, lc0.alpha);
                match(lct.beta, lc0.beta);
                match(lct.mu, lc0.mu);
                auto ft = flattening(dc, lct, 0);
                REQUIRE(!ft.pinched);
                auto cct = crossingContexts(dc, lct, 0);
                *csFactor = std::exp(diloct(ft, cct));
                return genericCrossingTensor(ctx, ft, sign);
            };

            // The generic branch converges linearly in the perturbation, so
            // certify the limit by linear extrapolation from two points at
            // distance <= 1e-4: the extrapolant must hit the pinched-formula
            // values to 1e-6 (observed ~1e-8), and the direct error must
            // shrink with t.
            const double t = 1e-4;
            cplx cs1, cs2;
            CrossingTensor gHalf = genericAt(t * 0.5, &cs1);
            CrossingTensor gFull = genericAt(t, &cs2);
            double num = 0.0, den = 0.0, errHalf = 0.0, errFull = 0.0;
            for (size_t i = 0; i < pinched.entries.size(); ++i) {
                cplx extrap = 2.0 * gHalf.entries[i] - gFull.entries[i];
                num = std::max(num, std::abs(extrap - pinched.entries[i]));
                den = std::max(den, std::abs(pinched.entries[i]));
                errHalf = std::max(errHalf, std::abs(gHalf.entries[i] - pinched.entries[i]));
                errFull = std::max(errFull, std::abs(gFull.entries[i] - pinched.entries[i]));
            }
            CAPTURE(N, sign, num, den, errHalf, errFull);
            CHECK(num / den < 1e-6);
            CHECK(errHalf < 0.75 * errFull); // direct convergence toward the pinch
            // The Chern-Simons crossing factor e^{diloct} converges too.
            CHECK(std::abs(2.0 * cs1 - cs2 - csPinched) / std::abs(csPinched) < 1e-6);
        }
    }
}

TEST_CASE("strand bending closes up (pivotal plumbing)") {
    std::mt19937 rng(909);
    RootOfUnityContext ctx(3);
    auto oc = testutil::randomOneCrossing(rng, +1);
    auto lc = liftColoring(oc.dc, oc.sc);
    auto f = flattening(oc.dc, lc, 0);
    auto cc = crossingContexts(oc.dc, lc, 0);
    CrossingTensor R = genericCrossingTensor(ctx, f, +1);
    CMatrix cd = evCoevTensor(ctx, EvCoevKind::CoevDown, cc.s1);
    CMatrix ed = evCoevTensor(ctx, EvCoevKind::EvDown, cc.s1p);
    // Bending twice with a snake-dual pair returns the original tensor.
    CrossingTensor bent = bendStrand1(R, cd, 0, ed, 0);
    CMatrix cd2 = ed.inverse(); // snake-dual coev for the way back
    CMatrix ed2 = cd.inverse();
    CrossingTensor back = bendStrand1(bent, cd2, 0, ed2, 0);
    double err = 0.0;
    for (size_t i = 0; i < R.entries.size(); ++i)
        err = std::max(err, std::abs(R.entries[i] - back.entries[i]));
    CHECK(err < 1e-9);
    // Same for the second strand.
    CMatrix cd_b = evCoevTensor(ctx, EvCoevKind::CoevDown, cc.s2);
    CMatrix ed_b = evCoevTensor(ctx, EvCoevKind::EvDown, cc.s2p);
    CrossingTensor bent2 = bendStrand2(R, cd_b, 0, ed_b, 0);
    CrossingTensor back2 = bendStrand2(bent2, ed_b.inverse(), 0, cd_b.inverse(), 0);
    err = 0.0;
    for (size_t i = 0; i < R.entries.size(); ++i)
        err = std::max(err, std::abs(R.entries[i] - back2.entries[i]));
    CHECK(err < 1e-9);
}

TEST_CASE("crossing tensor JSON dump") {
    std::mt19937 rng(1001);
    RootOfUnityContext ctx(2);
    auto oc = testutil::randomOneCrossing(rng, +1);
    auto lc = liftColoring(oc.dc, oc.sc);
    auto t = genericCrossingTensor(ctx, flattening(oc.dc, lc, 0), +1);
    auto j = toJson(t);
    CHECK(j["N"] == 2);
    CHECK(j["kind"] == "generic");
    CHECK(j["entries"].size() == 16);
}
