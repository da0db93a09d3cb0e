/**
 * @file evaluator.hpp
 * @brief Tensor-network evaluation: contract colored, log-decorated diagrams
 * into operators, extract scalar link invariants, and compute the auxiliary
 * invariants psi, the shifted normalization, the modified dimension, and the
 * exponentiated Chern-Simons invariant.
 *
 * A diagram is contracted by a strict left-to-right slice sweep.  The state is
 * a flat coefficient vector over the wires of the current gap (top wire is the
 * most significant index); each item applies a local operator:
 *
 *   - crossings contract the two adjacent indices with the crossing tensor
 *     (inputs n1 = top, n2 = bottom; outputs n2' = top, n1' = bottom),
 *   - cups insert two indices with a coevaluation tensor,
 *   - caps contract two adjacent indices with an evaluation row.
 *
 * Cup/cap tensors follow the pivotal structure with pivot x^{N-1}: the plain
 * pairing when the top leg carries the module (cupr -> coevUp, capl -> evUp)
 * and the pivoted pairing when it carries the dual (cupl -> coevDown,
 * capr -> evDown).  Their basis context reads the regions left/right of the
 * turning segment's flow.
 *
 * Summation order is fixed index-lexicographic, so results are bit-stable.
 * Diagrams wider than 12 strands are refused.
 */

#pragma once

#include <optional>
#include <string>

#include "qinv/quantum.hpp"

namespace qinv {

// ---------------------------------------------------------------------------
// Tensor networks
// ---------------------------------------------------------------------------

/** @brief One node of the contraction schedule. */
struct NetworkNode {
    enum class Kind { Crossing, Cup, Cap };
    Kind kind = Kind::Crossing;
    int slice = 0;
    int row = 0;          ///< top state row the node acts on
    int crossing = -1;    ///< index into dc.crossings (crossings only)
    CrossingTensor tensor; ///< crossings only
    CMatrix turn;          ///< cups/caps: two-leg tensor, row = top leg
    std::array<int, 2> legs{-1, -1}; ///< segment ids (top, bottom) at the turn
};

/** @brief Slice-sweep contraction schedule with segment-labeled legs. */
struct TensorNetwork {
    int N = 0;
    int leftWidth = 0, rightWidth = 0, maxWidth = 0;
    std::vector<NetworkNode> nodes; ///< in sweep order
    std::vector<std::vector<int>> sliceNodes; ///< node indices per slice
    std::vector<int> openLegsLeft, openLegsRight; ///< boundary segment ids
};

namespace detail {

inline long intPow(int base, int expo) {
    long r = 1;
    while (expo-- > 0) r *= base;
    return r;
}

/** @brief Basis context of a turning segment: regions left/right of flow. */
inline ModuleBasisContext turnContext(const DiagramCombinatorics& dc, const LogColoring& lc,
                                      int gap, int row) {
    const SegmentInfo& seg = dc.segments[dc.wireSegment[dc.diagram.wire(gap, row)]];
    return {lc.alpha[seg.leftRegion].value(), lc.alpha[segmentRightRegion(dc, seg)].value(),
            lc.beta[dc.wireSegment[dc.diagram.wire(gap, row)]].value(),
            lc.mu[seg.component].value(), +1};
}

} // namespace detail

/**
 * @brief Assemble the contraction schedule: one tensor per crossing and per
 * critical point, legs keyed by segment ids.
 *
 * @throws std::domain_error on inadmissible colorings or width > 12.
 */
inline TensorNetwork buildNetwork(const RootOfUnityContext& ctx,
                                  const DiagramCombinatorics& dc, const ShadowColoring& sc,
                                  const LogColoring& lc) {
    if (!checkAdmissible(dc, sc).admissible)
        throw std::domain_error("buildNetwork: inadmissible coloring");
    const TangleDiagram& d = dc.diagram;
    TensorNetwork tn;
    tn.N = ctx.N;
    tn.leftWidth = d.leftWidth();
    tn.rightWidth = d.rightWidth();
    for (int w : d.gapWidth) tn.maxWidth = std::max(tn.maxWidth, w);
    if (tn.maxWidth > 12)
        throw std::domain_error("buildNetwork: diagrams wider than 12 strands are refused");

    for (int r = 0; r < tn.leftWidth; ++r)
        tn.openLegsLeft.push_back(dc.wireSegment[d.wire(0, r)]);
    for (int r = 0; r < tn.rightWidth; ++r)
        tn.openLegsRight.push_back(dc.wireSegment[d.wire(d.numGaps() - 1, r)]);

    tn.sliceNodes.resize(d.slices.size());
    for (int s = 0; s < (int)d.slices.size(); ++s) {
        int inRow = 0, curRow = 0;
        for (const SliceItem& it : d.slices[s]) {
            NetworkNode node;
            node.slice = s;
            node.row = curRow;
            switch (it.kind) {
                case ItemKind::Id:
                    ++inRow;
                    ++curRow;
                    continue;
                case ItemKind::Xp:
                case ItemKind::Xn: {
                    for (int c = 0; c < (int)dc.crossings.size(); ++c)
                        if (dc.crossings[c].slice == s && dc.crossings[c].rowTop == inRow)
                            node.crossing = c;
                    if (node.crossing < 0)
                        throw std::logic_error("buildNetwork: crossing not found");
                    node.kind = NetworkNode::Kind::Crossing;
                    CrossingClass cls = classifyCrossing(dc, sc, node.crossing);
                    CrossingContexts cc = crossingContexts(dc, lc, node.crossing);
                    CrossingFlattening f = flattening(dc, lc, node.crossing);
                    node.tensor = crossingTensor(ctx, cc, f, cls.kind);
                    const CrossingInfo& ci = dc.crossings[node.crossing];
                    node.legs = {ci.seg1, ci.seg2};
                    inRow += 2;
                    curRow += 2;
                    break;
                }
                case ItemKind::CupR:
                case ItemKind::CupL: {
                    node.kind = NetworkNode::Kind::Cup;
                    node.turn = evCoevTensor(ctx,
                                             it.kind == ItemKind::CupR ? EvCoevKind::CoevUp
                                                                       : EvCoevKind::CoevDown,
                                             detail::turnContext(dc, lc, s + 1, curRow));
                    node.legs = {dc.wireSegment[d.wire(s + 1, curRow)],
                                 dc.wireSegment[d.wire(s + 1, curRow + 1)]};
                    curRow += 2;
                    break;
                }
                case ItemKind::CapR:
                case ItemKind::CapL: {
                    node.kind = NetworkNode::Kind::Cap;
                    node.turn = evCoevTensor(ctx,
                                             it.kind == ItemKind::CapR ? EvCoevKind::EvDown
                                                                       : EvCoevKind::EvUp,
                                             detail::turnContext(dc, lc, s, inRow));
                    node.legs = {dc.wireSegment[d.wire(s, inRow)],
                                 dc.wireSegment[d.wire(s, inRow + 1)]};
                    inRow += 2;
                    break;
                }
            }
            tn.sliceNodes[s].push_back((int)tn.nodes.size());
            tn.nodes.push_back(std::move(node));
        }
    }
    return tn;
}

namespace detail {

/** @brief Contract state rows (r, r+1) with a crossing operator matrix. */
inline Eigen::VectorXcd applyCrossing(const Eigen::VectorXcd& v, int N, int width, int r,
                                      const CMatrix& M) {
    long outer = intPow(N, r), inner = intPow(N, width - 2 - r);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
    for (long o = 0; o < outer; ++o)
        for (long i = 0; i < inner; ++i) {
            long base = o * N * N * inner + i;
            for (int ap = 0; ap < N; ++ap)
                for (int bp = 0; bp < N; ++bp) {
                    cplx acc = 0.0;
                    for (int a = 0; a < N; ++a)
                        for (int b = 0; b < N; ++b)
                            acc += M(ap * N + bp, a * N + b) *
                                   v(base + (long)a * N * inner + (long)b * inner);
                    out(base + (long)ap * N * inner + (long)bp * inner) = acc;
                }
        }
    return out;
}

/** @brief Insert state rows (r, r+1) from a two-leg coevaluation tensor. */
inline Eigen::VectorXcd applyCup(const Eigen::VectorXcd& v, int N, int width, int r,
                                 const CMatrix& T) {
    long outer = intPow(N, r), inner = intPow(N, width - r);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size() * N * N);
    for (long o = 0; o < outer; ++o)
        for (int j = 0; j < N; ++j)
            for (int k = 0; k < N; ++k) {
                if (T(j, k) == cplx(0.0, 0.0)) continue;
                for (long i = 0; i < inner; ++i)
                    out((o * N + j) * N * inner + (long)k * inner + i) =
                        T(j, k) * v(o * inner + i);
            }
    return out;
}

/** @brief Contract state rows (r, r+1) with a two-leg evaluation tensor. */
inline Eigen::VectorXcd applyCap(const Eigen::VectorXcd& v, int N, int width, int r,
                                 const CMatrix& T) {
    long outer = intPow(N, r), inner = intPow(N, width - 2 - r);
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(outer * inner);
    for (long o = 0; o < outer; ++o)
        for (long i = 0; i < inner; ++i) {
            cplx acc = 0.0;
            for (int j = 0; j < N; ++j)
                for (int k = 0; k < N; ++k)
                    acc += T(j, k) * v((o * N + j) * N * inner + (long)k * inner + i);
            out(o * inner + i) = acc;
        }
    return out;
}

} // namespace detail

/**
 * @brief Contract the network to the boundary operator, as an
 * N^rightWidth x N^leftWidth matrix (top boundary wire = most significant
 * index digit).
 */
inline CMatrix contract(const TensorNetwork& tn) {
    const int N = tn.N;
    long cols = detail::intPow(N, tn.leftWidth), rows = detail::intPow(N, tn.rightWidth);
    CMatrix M(rows, cols);
    for (long col = 0; col < cols; ++col) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(cols);
        v(col) = 1.0;
        int width = tn.leftWidth;
        for (const auto& slice : tn.sliceNodes)
            for (int ni : slice) {
                const NetworkNode& node = tn.nodes[ni];
                switch (node.kind) {
                    case NetworkNode::Kind::Crossing:
                        v = detail::applyCrossing(v, N, width, node.row,
                                                  node.tensor.asMatrix());
                        break;
                    case NetworkNode::Kind::Cup:
                        v = detail::applyCup(v, N, width, node.row, node.turn);
                        width += 2;
                        break;
                    case NetworkNode::Kind::Cap:
                        v = detail::applyCap(v, N, width, node.row, node.turn);
                        width -= 2;
                        break;
                }
            }
        M.col(col) = v;
    }
    return M;
}

// ---------------------------------------------------------------------------
// psi and decoration transformations
// ---------------------------------------------------------------------------

/** @brief psi = mu^T . lk_D . lambda (the linking-form bilinear invariant). */
inline cplx psi(const DiagramCombinatorics& dc, const LogDecoration& dec) {
    std::vector<std::vector<double>> lk = linkingMatrix(dc);
    cplx total = 0.0;
    for (int i = 0; i < dc.numComponents; ++i)
        for (int j = 0; j < dc.numComponents; ++j)
            total += dec.mu[(size_t)i] * lk[(size_t)i][(size_t)j] * dec.lambda[(size_t)j];
    return total;
}

/**
 * @brief psi from a log-coloring as the sum over crossings of
 * eps*(mu1 * dlambda2 + mu2 * dlambda1), with dlambda the per-crossing
 * longitude contributions; equals psi(dc, induced decoration) exactly.
 */
inline cplx psiFromColoring(const DiagramCombinatorics& dc, const LogColoring& lc) {
    cplx total = 0.0;
    for (const CrossingInfo& ci : dc.crossings) {
        double e = ci.sign;
        cplx mu1 = lc.mu[dc.segments[ci.seg1].component].value();
        cplx mu2 = lc.mu[dc.segments[ci.seg2].component].value();
        cplx dl1 = 0.5 * e * (lc.beta[ci.seg1p].value() - lc.beta[ci.seg1].value());
        cplx dl2 = 0.5 * e * (lc.beta[ci.seg2].value() - lc.beta[ci.seg2p].value());
        total += mu1 * dl2 + mu2 * dl1;
    }
    return total;
}

/** @brief Invariant value with provenance. */
struct InvariantResult {
    cplx value{0.0, 0.0};
    int N = 0;
    LogDecoration decoration;
    std::string normalization = "raw"; ///< raw | shifted | cs
    nlohmann::json provenance;
};

/**
 * @brief Decoration shift laws: Delta lambda in Z multiplies the value by
 * exp(-(2 pi i/N) sum Delta lambda_i mu_i); Delta mu in N*Z multiplies by
 * exp(+(2 pi i/N) sum Delta mu_i lambda_i).
 *
 * @throws std::domain_error for shifts outside the allowed lattices.
 */
inline InvariantResult transformDecoration(const RootOfUnityContext& ctx,
                                           const InvariantResult& in,
                                           const LogDecoration& target) {
    if (target.mu.size() != in.decoration.mu.size())
        throw std::domain_error("transformDecoration: component count mismatch");
    InvariantResult out = in;
    cplx expo = 0.0;
    for (size_t c = 0; c < target.mu.size(); ++c) {
        cplx dmu = target.mu[c] - in.decoration.mu[c];
        cplx dl = target.lambda[c] - in.decoration.lambda[c];
        if (!detail::nearInteger(dl))
            throw std::domain_error("transformDecoration: non-integer longitude shift");
        if (!detail::nearInteger(dmu / (double)ctx.N))
            throw std::domain_error("transformDecoration: meridian shift not in N*Z");
        // Meridian shift first (acts at the old lambda), then the longitude
        // shift; the order does not matter up to the integer-lattice terms,
        // which cancel in omega powers.
        expo += dmu * in.decoration.lambda[c] - dl * target.mu[c];
    }
    out.value *= ctx.omegaPow(expo);
    out.decoration = target;
    return out;
}

// ---------------------------------------------------------------------------
// Link invariants
// ---------------------------------------------------------------------------

namespace detail {

/**
 * @brief Shift branches so every pinched crossing carries a standard
 * log-coloring; iterates to a fixed point since crossings can share segments.
 */
inline LogColoring standardizeAllPinched(const DiagramCombinatorics& dc,
                                         const ShadowColoring& sc, const LogColoring& lc0) {
    LogColoring lc = lc0;
    std::vector<int> pinched;
    for (int c = 0; c < (int)dc.crossings.size(); ++c)
        if (classifyCrossing(dc, sc, c).kind != CrossingKind::Generic) pinched.push_back(c);
    for (int pass = 0; pass < 8; ++pass) {
        bool changed = false;
        for (int c : pinched) {
            LogColoring next = standardPinchedLogColoring(dc, sc, lc, c);
            for (size_t i = 0; i < lc.beta.size(); ++i)
                changed |= next.beta[i].shift != lc.beta[i].shift;
            for (size_t i = 0; i < lc.alpha.size(); ++i)
                changed |= next.alpha[i].shift != lc.alpha[i].shift;
            lc = std::move(next);
        }
        if (!changed) return lc;
    }
    throw std::domain_error("standardizeAllPinched: no global standard log-coloring");
}

inline nlohmann::json diagramDigest(const DiagramCombinatorics& dc) {
    return {{"word", dc.diagram.source},
            {"crossings", (int)dc.crossings.size()},
            {"components", dc.numComponents}};
}

} // namespace detail

/**
 * @brief Prepared log-coloring of a diagram: admissibility repair, meridian
 * branch alignment, and standardization of all pinched crossings.
 */
struct PreparedColoring {
    ShadowColoring sc;
    LogColoring lc;
    LogDecoration induced;
    nlohmann::json provenance;
};

inline PreparedColoring prepareColoring(const DiagramCombinatorics& dc,
                                        const ShadowColoring& sc0,
                                        const std::optional<LogDecoration>& target = {},
                                        unsigned repairSeed = 20240901u) {
    PreparedColoring prep;
    prep.provenance = nlohmann::json::object();
    AdmissibilityReport rep = checkAdmissible(dc, sc0);
    if (rep.admissible) {
        prep.sc = sc0;
    } else {
        RepairResult fix = repairAdmissibility(dc, sc0, repairSeed);
        prep.sc = fix.coloring;
        prep.provenance["repair"] = {{"kind", fix.kind == GaugeKind::A ? "A" : "B"},
                                     {"attempts", fix.attempts},
                                     {"h", toJson(fix.h)}};
    }
    prep.lc = liftColoring(dc, prep.sc);
    if (target) {
        if ((int)target->mu.size() != dc.numComponents)
            throw std::domain_error("prepareColoring: wrong decoration size");
        for (int c = 0; c < dc.numComponents; ++c) {
            cplx dmu = target->mu[(size_t)c] - prep.lc.mu[(size_t)c].value();
            if (!detail::nearInteger(dmu))
                throw std::domain_error("prepareColoring: non-integer meridian shift");
            prep.lc.mu[(size_t)c].shift += (long long)std::llround(dmu.real());
        }
    }
    prep.lc = detail::standardizeAllPinched(dc, prep.sc, prep.lc);
    prep.induced = inducedLogDecoration(dc, prep.lc);
    return prep;
}

/**
 * @brief Scalar extraction <.> : the diagonal mean of an N x N operator after
 * asserting scalarity.
 *
 * @throws std::domain_error when off-diagonal residue exceeds 1e-8 * ||M|| or
 * the diagonal spread exceeds 1e-8.
 */
inline cplx scalarPart(const CMatrix& M) {
    if (M.rows() != M.cols()) throw std::domain_error("scalarPart: non-square operator");
    const int n = (int)M.rows();
    double off = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) off = std::max(off, std::abs(M(i, j)));
    if (off > 1e-8 * std::max(1.0, M.norm()))
        throw std::domain_error("scalarPart: operator is not scalar (off-diagonal)");
    cplx mean = 0.0;
    for (int i = 0; i < n; ++i) mean += M(i, i);
    mean /= (double)n;
    for (int i = 0; i < n; ++i)
        if (std::abs(M(i, i) - mean) > 1e-8 * std::max(1.0, std::abs(mean)))
            throw std::domain_error("scalarPart: operator is not scalar (diagonal spread)");
    return mean;
}

/**
 * @brief The link invariant of a cut presentation: contract, extract the
 * scalar, and move the value to the target decoration (integer longitude
 * shifts act by the exact scalar law, so standardization never has to be
 * undone).
 *
 * @param component index of the open (cut) component, recorded in provenance.
 */
inline InvariantResult linkInvariant(const RootOfUnityContext& ctx,
                                     const DiagramCombinatorics& dc, int component,
                                     const ShadowColoring& sc0,
                                     const std::optional<LogDecoration>& target = {},
                                     unsigned repairSeed = 20240901u) {
    if (dc.diagram.leftWidth() != 1 || dc.diagram.rightWidth() != 1)
        throw std::domain_error("linkInvariant: expected a cut presentation (1 -> 1)");
    if (component < 0 || component >= dc.numComponents || dc.componentClosed[component])
        throw std::domain_error("linkInvariant: component is not the open strand");
    PreparedColoring prep = prepareColoring(dc, sc0, target, repairSeed);
    TensorNetwork tn = buildNetwork(ctx, dc, prep.sc, prep.lc);
    InvariantResult res;
    res.value = scalarPart(contract(tn));
    res.N = ctx.N;
    res.decoration = prep.induced;
    res.provenance = prep.provenance;
    res.provenance["diagram"] = detail::diagramDigest(dc);
    res.provenance["component"] = component;
    if (target) res = transformDecoration(ctx, res, *target);
    return res;
}

/** @brief The meridian-longitude pairing sum_i mu_i lambda_i of a decoration. */
inline cplx decorationPairing(const LogDecoration& dec) {
    cplx total = 0.0;
    for (size_t c = 0; c < dec.mu.size(); ++c) total += dec.mu[c] * dec.lambda[c];
    return total;
}

/**
 * @brief The shifted normalization: value multiplied by
 * omega^{sum_i mu_i lambda_i}.  On the Hopf colorings this reproduces the
 * closed forms omega^{2 mu2 (mu1 - (N-1)/2)} Sum and its companion, which
 * agree when the alternate meridian is N - 1 - mu2.
 */
inline InvariantResult shiftedInvariant(const RootOfUnityContext& ctx,
                                        const InvariantResult& in) {
    InvariantResult out = in;
    out.value *= ctx.omegaPow(decorationPairing(in.decoration));
    out.normalization = "shifted";
    return out;
}

// ---------------------------------------------------------------------------
// Modified dimension
// ---------------------------------------------------------------------------

/**
 * @brief d(mu) = N / (omega^{(N-1)(mu+1/2)} + omega^{(N-3)(mu+1/2)} + ... +
 * omega^{(1-N)(mu+1/2)}).
 *
 * @throws std::domain_error for non-renormalizable mu (zero denominator).
 */
inline cplx modifiedDimension(const RootOfUnityContext& ctx, cplx mu) {
    cplx denom = 0.0;
    for (int j = 0; j < ctx.N; ++j)
        denom += ctx.omegaPow((double)(ctx.N - 1 - 2 * j) * (mu + 0.5));
    if (std::abs(denom) < 1e-9)
        throw std::domain_error("modifiedDimension: mu is not renormalizable");
    return (double)ctx.N / denom;
}

// ---------------------------------------------------------------------------
// Chern-Simons invariant
// ---------------------------------------------------------------------------

/** @brief e^{diloct} of one crossing. */
inline cplx csCrossingFactor(const CrossingFlattening& f, const CrossingContexts& cc) {
    return std::exp(diloct(f, cc));
}

/**
 * @brief Exponentiated Chern-Simons invariant of a closed link diagram: the
 * product over crossings of e^{diloct} under one global log-coloring (cups
 * and caps contribute 1), moved to the target decoration by the scalar law
 * exp(2 pi i sum Delta lambda_i mu_i).
 */
inline InvariantResult csLinkInvariant(const RootOfUnityContext& ctx,
                                       const DiagramCombinatorics& dc,
                                       const ShadowColoring& sc0,
                                       const std::optional<LogDecoration>& target = {},
                                       unsigned repairSeed = 20240901u) {
    if (dc.openStrands != 0)
        throw std::domain_error("csLinkInvariant: expected a closed link diagram");
    PreparedColoring prep = prepareColoring(dc, sc0, target, repairSeed);
    InvariantResult res;
    res.N = ctx.N;
    res.normalization = "cs";
    res.value = 1.0;
    for (int c = 0; c < (int)dc.crossings.size(); ++c) {
        CrossingContexts cc = crossingContexts(dc, prep.lc, c);
        CrossingFlattening f = flattening(dc, prep.lc, c);
        res.value *= csCrossingFactor(f, cc);
    }
    res.decoration = prep.induced;
    res.provenance = prep.provenance;
    res.provenance["diagram"] = detail::diagramDigest(dc);
    if (target) {
        cplx expo = 0.0;
        for (size_t c = 0; c < target->mu.size(); ++c) {
            cplx dl = target->lambda[c] - res.decoration.lambda[c];
            if (!detail::nearInteger(dl))
                throw std::domain_error("csLinkInvariant: non-integer longitude shift");
            expo += dl * target->mu[c];
        }
        res.value *= std::exp(cplx(0.0, TWO_PI) * expo);
        res.decoration = *target;
    }
    return res;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

inline nlohmann::json toJson(const InvariantResult& r) {
    return {{"value", {r.value.real(), r.value.imag()}},
            {"N", r.N},
            {"normalization", r.normalization},
            {"decoration", toJson(r.decoration)},
            {"provenance", r.provenance}};
}

} // namespace qinv
