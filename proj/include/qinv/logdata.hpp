/**
 * @file logdata.hpp
 * @brief Log-colorings, crossing flattenings, induced log-decorations, and
 * branch adjustment.
 *
 * A log-coloring lifts every octahedral parameter through z = e^{2 pi i zeta}:
 * alpha per region (e^{2 pi i alpha} = a), beta per segment (= b), mu per
 * component (= m).  Lifts are stored as (principal value, integer shift) so
 * branch arithmetic is exact.
 *
 * Flattening parameters at a crossing of sign e (corners N, W, S, E):
 *   zeta0_N = e (b2' - b1)            zeta0_W = e (b2 - b1 - mu1)
 *   zeta0_S = e (b2 - b1' + mu2 - mu1)  zeta0_E = e (b2' - b1' + mu2)
 *   zeta1_N = kappa - alpha_N         zeta1_W = kappa - alpha_W + e mu1
 *   zeta1_S = kappa - alpha_S + e (mu1 - mu2)
 *   zeta1_E = kappa - alpha_E - e mu2
 * (betas written b here), where e^{2 pi i kappa} = K = a_N/(1 - z0_N).  At a
 * pinched crossing all zeta0 are integers and K is undefined; only zeta0 are
 * produced.
 *
 * Induced log-decoration: per component the log-meridian mu_i and the
 * log-longitude lambda_i, the latter summed over crossings as
 * lambda(strand 1) += (e/2)(beta_1' - beta_1) and
 * lambda(strand 2) += (e/2)(beta_2 - beta_2'); for a closed component this
 * telescopes to sum_k eta_k beta_k over its segments.
 *
 * Standard log-colorings at pinched crossings satisfy exactly
 *   beta_2' = beta_1,  beta_2 = mu1 + beta_1,  mu2 + beta_2 = mu1 + beta_1'
 * (the fourth printed relation mu2 + beta_2' = beta_1' is then automatic).
 * At an E-nilpotent crossing the corner shadows are eigenvectors, which
 * forces a_W = a_N m1^{-1}, a_S = a_N (m1 m2)^{-1}, a_E = a_N m2^{-1}
 * (admissibility v.u != 0 selects the m^{-1} eigenvector), so the standard
 * alphas satisfy alpha_W = alpha_N - mu1 and so on.
 */

#pragma once

#include "qinv/slcoloring.hpp"

namespace qinv {

/** @brief A logarithm lift: principal value plus an exact integer shift. */
struct LogLift {
    cplx principal{0.0, 0.0};
    long long shift = 0;
    cplx value() const { return principal + cplx((double)shift, 0.0); }
};

/** @brief Principal lift of z through e^{2 pi i x} = z. */
inline LogLift logLift(cplx z, long long shift = 0) {
    return {plog(z) / cplx(0.0, TWO_PI), shift};
}

struct LogColoring {
    std::vector<LogLift> alpha; ///< per region
    std::vector<LogLift> beta;  ///< per segment
    std::vector<LogLift> mu;    ///< per component
};

/** @brief Integer branch offsets for liftColoring (empty = all zero). */
struct BranchOffsets {
    std::vector<long long> alpha, beta, mu;
};

/** @brief Meridian eigenvalue of a component (shared by all of its arcs). */
inline cplx componentMeridian(const DiagramCombinatorics& dc, const ShadowColoring& sc,
                              int component) {
    int seg = dc.componentSegments[component].front();
    return sc.arcColors[dc.segments[seg].arc].m;
}

/**
 * @brief Principal-branch lift of all octahedral parameters plus the given
 * integer offsets.
 */
inline LogColoring liftColoring(const DiagramCombinatorics& dc, const ShadowColoring& sc,
                                const BranchOffsets& offsets = {}) {
    OctahedralParameters p = octahedralParameters(dc, sc);
    auto off = [](const std::vector<long long>& v, int i) {
        return i < (int)v.size() ? v[i] : 0LL;
    };
    LogColoring lc;
    lc.alpha.reserve(dc.numRegions);
    for (int j = 0; j < dc.numRegions; ++j)
        lc.alpha.push_back(logLift(p.a[j], off(offsets.alpha, j)));
    lc.beta.reserve(dc.segments.size());
    for (int i = 0; i < (int)dc.segments.size(); ++i)
        lc.beta.push_back(logLift(p.b[i], off(offsets.beta, i)));
    lc.mu.reserve(dc.numComponents);
    for (int c = 0; c < dc.numComponents; ++c)
        lc.mu.push_back(logLift(componentMeridian(dc, sc, c), off(offsets.mu, c)));
    return lc;
}

// ---------------------------------------------------------------------------
// Flattenings
// ---------------------------------------------------------------------------

struct CrossingFlattening {
    bool pinched = false;
    cplx zeta0[4]; ///< corners N, W, S, E
    cplx zeta1[4]; ///< valid only when !pinched
    cplx kappa{0.0, 0.0};
};

inline CrossingFlattening flattening(const DiagramCombinatorics& dc, const LogColoring& lc,
                                     int crossing, long long kappaBranch = 0) {
    const CrossingInfo& ci = dc.crossings[crossing];
    const double e = ci.sign;
    cplx b1 = lc.beta[ci.seg1].value(), b2 = lc.beta[ci.seg2].value();
    cplx b1p = lc.beta[ci.seg1p].value(), b2p = lc.beta[ci.seg2p].value();
    cplx mu1 = lc.mu[dc.segments[ci.seg1].component].value();
    cplx mu2 = lc.mu[dc.segments[ci.seg2].component].value();

    CrossingFlattening f;
    f.zeta0[0] = e * (b2p - b1);
    f.zeta0[1] = e * (b2 - b1 - mu1);
    f.zeta0[2] = e * (b2 - b1p + mu2 - mu1);
    f.zeta0[3] = e * (b2p - b1p + mu2);

    cplx z0N = e2pi(f.zeta0[0]);
    if (std::abs(z0N - 1.0) < 1e-9) {
        f.pinched = true;
        for (int corner = 0; corner < 4; ++corner) {
            double nearest = std::round(f.zeta0[corner].real());
            if (std::abs(f.zeta0[corner] - cplx(nearest, 0.0)) > 1e-9)
                throw std::domain_error(
                    "flattening: pinched crossing with non-integer zeta0 "
                    "(inconsistent branches)");
        }
        return f;
    }
    cplx K = e2pi(lc.alpha[ci.regN].value()) / (1.0 - z0N);
    f.kappa = logLift(K, kappaBranch).value();
    f.zeta1[0] = f.kappa - lc.alpha[ci.regN].value();
    f.zeta1[1] = f.kappa - lc.alpha[ci.regW].value() + e * mu1;
    f.zeta1[2] = f.kappa - lc.alpha[ci.regS].value() + e * (mu1 - mu2);
    f.zeta1[3] = f.kappa - lc.alpha[ci.regE].value() - e * mu2;
    return f;
}

// ---------------------------------------------------------------------------
// Induced log-decoration
// ---------------------------------------------------------------------------

struct LogDecoration {
    std::vector<cplx> mu;     ///< per component
    std::vector<cplx> lambda; ///< per component
};

inline LogDecoration inducedLogDecoration(const DiagramCombinatorics& dc,
                                          const LogColoring& lc) {
    LogDecoration dec;
    dec.mu.reserve(dc.numComponents);
    for (const LogLift& m : lc.mu) dec.mu.push_back(m.value());
    dec.lambda.assign(dc.numComponents, cplx(0.0, 0.0));
    for (const CrossingInfo& ci : dc.crossings) {
        double e = ci.sign;
        int c1 = dc.segments[ci.seg1].component;
        int c2 = dc.segments[ci.seg2].component;
        dec.lambda[c1] += 0.5 * e * (lc.beta[ci.seg1p].value() - lc.beta[ci.seg1].value());
        dec.lambda[c2] += 0.5 * e * (lc.beta[ci.seg2].value() - lc.beta[ci.seg2p].value());
    }
    return dec;
}

// ---------------------------------------------------------------------------
// Branch adjustment
// ---------------------------------------------------------------------------

namespace detail {

/** @brief d(lambda of own component)/d(beta_k) for every segment k. */
inline std::vector<double> lambdaCoefficients(const DiagramCombinatorics& dc) {
    std::vector<double> coeff(dc.segments.size(), 0.0);
    for (const CrossingInfo& ci : dc.crossings) {
        double e = ci.sign;
        coeff[ci.seg1p] += 0.5 * e;
        coeff[ci.seg1] -= 0.5 * e;
        coeff[ci.seg2] += 0.5 * e;
        coeff[ci.seg2p] -= 0.5 * e;
    }
    return coeff;
}

inline bool nearInteger(cplx z, double tol = 1e-9) {
    return std::abs(z - cplx(std::round(z.real()), 0.0)) < tol;
}

} // namespace detail

/**
 * @brief Shift integer branches so the induced log-decoration equals the
 * target exactly.  Meridian shifts must be integers; each longitude shift is
 * realized on the leftmost segment of the component whose lambda-coefficient
 * divides it to an integer beta offset.
 *
 * @throws std::domain_error when the target is unreachable.
 */
inline LogColoring adjustToTarget(const DiagramCombinatorics& dc, const LogColoring& lc,
                                  const LogDecoration& target) {
    if ((int)target.mu.size() != dc.numComponents ||
        (int)target.lambda.size() != dc.numComponents)
        throw std::domain_error("adjustToTarget: wrong target size");
    LogColoring out = lc;
    for (int c = 0; c < dc.numComponents; ++c) {
        cplx dmu = target.mu[c] - lc.mu[c].value();
        if (!detail::nearInteger(dmu))
            throw std::domain_error("adjustToTarget: non-integer meridian shift");
        out.mu[c].shift += (long long)std::llround(dmu.real());
    }
    LogDecoration induced = inducedLogDecoration(dc, out);
    std::vector<double> coeff = detail::lambdaCoefficients(dc);
    for (int c = 0; c < dc.numComponents; ++c) {
        cplx dl = target.lambda[c] - induced.lambda[c];
        if (std::abs(dl) < 1e-12) continue;
        // Segments of the component ordered by leftmost wire.
        std::vector<int> segs = dc.componentSegments[c];
        std::sort(segs.begin(), segs.end(), [&](int a, int b) {
            return dc.segments[a].wires.front() < dc.segments[b].wires.front();
        });
        bool done = false;
        for (int s : segs) {
            if (coeff[s] == 0.0) continue;
            cplx db = dl / coeff[s];
            if (!detail::nearInteger(db)) continue;
            out.beta[s].shift += (long long)std::llround(db.real());
            done = true;
            break;
        }
        if (!done)
            throw std::domain_error("adjustToTarget: unreachable longitude shift");
    }
    return out;
}

// ---------------------------------------------------------------------------
// Standard pinched log-colorings
// ---------------------------------------------------------------------------

/**
 * @brief Shift the beta branches at one pinched crossing so the pinched-beta
 * relations hold exactly; at an E-nilpotent crossing additionally shift the
 * W/S/E alphas to the standard values relative to alpha_N.
 *
 * @throws std::domain_error if the crossing is not pinched or branches are
 * inconsistent (required shifts not integers).
 */
inline LogColoring standardPinchedLogColoring(const DiagramCombinatorics& dc,
                                              const ShadowColoring& sc, const LogColoring& lc,
                                              int crossing) {
    const CrossingInfo& ci = dc.crossings[crossing];
    CrossingClass cc = classifyCrossing(dc, sc, crossing);
    if (cc.kind == CrossingKind::Generic)
        throw std::domain_error("standardPinchedLogColoring: crossing not pinched");
    LogColoring out = lc;
    cplx mu1 = lc.mu[dc.segments[ci.seg1].component].value();
    cplx mu2 = lc.mu[dc.segments[ci.seg2].component].value();
    auto shiftTo = [&](LogLift& lift, cplx want) {
        cplx d = want - lift.value();
        if (!detail::nearInteger(d))
            throw std::domain_error("standardPinchedLogColoring: non-integer shift");
        lift.shift += (long long)std::llround(d.real());
    };
    cplx b1 = out.beta[ci.seg1].value();
    shiftTo(out.beta[ci.seg2p], b1);
    shiftTo(out.beta[ci.seg2], mu1 + b1);
    shiftTo(out.beta[ci.seg1p], mu2 + out.beta[ci.seg2].value() - mu1);
    if (cc.kind == CrossingKind::ENilpotent) {
        // Corner shadows are m^{-1}-eigenvectors (forced by admissibility),
        // so a_W = a_N m1^{-1} etc.; standard alphas follow suit.
        cplx aN = out.alpha[ci.regN].value();
        shiftTo(out.alpha[ci.regW], aN - mu1);
        shiftTo(out.alpha[ci.regS], aN - mu1 - mu2);
        shiftTo(out.alpha[ci.regE], aN - mu2);
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline nlohmann::json toJson(const LogDecoration& dec) {
    nlohmann::json per = nlohmann::json::array();
    for (size_t c = 0; c < dec.mu.size(); ++c)
        per.push_back({dec.mu[c].real(), dec.mu[c].imag(), dec.lambda[c].real(),
                       dec.lambda[c].imag()});
    return {{"perComponent", per}};
}

inline LogDecoration logDecorationFromJson(const nlohmann::json& j) {
    LogDecoration dec;
    for (const auto& row : j.at("perComponent")) {
        dec.mu.emplace_back(row.at(0).get<double>(), row.at(1).get<double>());
        dec.lambda.emplace_back(row.at(2).get<double>(), row.at(3).get<double>());
    }
    return dec;
}

} // namespace qinv
