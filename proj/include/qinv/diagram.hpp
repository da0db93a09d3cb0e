/**
 * @file diagram.hpp
 * @brief Tangle diagrams as slice words, and their combinatorics.
 *
 * A diagram is entered as a slice word: a ';'-separated sequence of vertical
 * slices read left to right, each slice a whitespace-separated list of items
 * stacked top to bottom:
 *
 *   id     single strand passing through
 *   xp     positive crossing (for two rightward strands the strand running
 *          from top-left to bottom-right passes over)
 *   xn     negative crossing (the other strand passes over)
 *   cupr   cup (left-pointing turn) with top leg rightward, bottom leftward
 *   cupl   cup with top leg leftward, bottom rightward
 *   capr   cap (right-pointing turn) with top leg rightward (flow enters the
 *          top), bottom leftward
 *   capl   cap with top leg leftward, bottom rightward (flow enters bottom)
 *
 * id/xp/xn may carry orientation marks '>' (rightward) or '<' (leftward);
 * crossings accept two marks (top then bottom strand).  Orientations are
 * propagated from cups/caps, marks, and boundary defaults (rightward) and
 * validated globally.
 *
 * Crossings whose strands are not both rightward are eliminated at parse
 * time: such a crossing is rewritten as an isotopic three-slice composite
 * (cup + left-to-right crossing + cap) that routes the leftward strand
 * around the crossing.  The crossing token flips xp <-> xn at each rewrite
 * step so that the over/under assignment of the physical strands (and hence
 * the intrinsic crossing sign) is preserved; after expansion the token sign
 * equals the intrinsic sign.
 *
 * Combinatorics: the diagram is a 4-valent graph in the horizontal strip.
 * - wires: the elementary horizontal strand pieces, one per (gap, row) where
 *   gap g is the vertical boundary between slice g-1 and slice g.
 * - segments: maximal strand pieces not interrupted by a crossing (edges of
 *   the 4-valent graph); cups and caps do not split segments.
 * - arcs: maximal chains of segments joined across crossings where the
 *   strand passes over.  At a positive crossing the segments 1 and 1' belong
 *   to the same arc.
 * - regions: faces of the diagram, enumerated by union-find on the gap
 *   intervals (interval r of gap g = the face slot above row r).
 * - components: strand connectivity classes, each traversed in flow order.
 *
 * Crossing conventions (all crossings left-to-right after expansion):
 * segments 1 (incoming top), 2 (incoming bottom), 2' (outgoing top),
 * 1' (outgoing bottom); strand 1 runs top-left -> bottom-right and strand 2
 * bottom-left -> top-right.  Regions N (above), W (left), S (below),
 * E (right).  Sign +1 when strand 1 is over.  Wirtinger relation per
 * crossing: x_out = x_over^{-sign} x_in x_over^{sign} for the under-strand.
 */

#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qinv/complexutil.hpp"

namespace qinv {

// ---------------------------------------------------------------------------
// Tokens and parse errors
// ---------------------------------------------------------------------------

enum class ItemKind { Id, Xp, Xn, CupR, CupL, CapR, CapL };

/** @brief One slice item; marks are +1 (rightward), -1 (leftward), 0 (none). */
struct SliceItem {
    ItemKind kind;
    int mark0 = 0; ///< orientation mark for the (top) strand
    int mark1 = 0; ///< orientation mark for the bottom strand of a crossing
};

inline int itemInArity(ItemKind k) {
    switch (k) {
        case ItemKind::Id: return 1;
        case ItemKind::Xp:
        case ItemKind::Xn:
        case ItemKind::CapR:
        case ItemKind::CapL: return 2;
        default: return 0; // cups
    }
}

inline int itemOutArity(ItemKind k) {
    switch (k) {
        case ItemKind::Id: return 1;
        case ItemKind::Xp:
        case ItemKind::Xn:
        case ItemKind::CupR:
        case ItemKind::CupL: return 2;
        default: return 0; // caps
    }
}

/** @brief Parse/validation failure with the source position of the offender. */
struct ParseError : std::runtime_error {
    size_t position;
    ParseError(const std::string& msg, size_t pos)
        : std::runtime_error(msg + " (at position " + std::to_string(pos) + ")"),
          position(pos) {}
};

// ---------------------------------------------------------------------------
// TangleDiagram
// ---------------------------------------------------------------------------

/**
 * @brief A validated tangle diagram: expanded slices, gap widths, and a
 * globally consistent orientation (+1 rightward / -1 leftward) per wire.
 */
struct TangleDiagram {
    std::vector<std::vector<SliceItem>> slices;
    std::vector<int> gapWidth;   ///< size slices.size() + 1
    std::vector<int> wireOffset; ///< prefix sums of gapWidth, per gap
    std::vector<int> wireDir;    ///< +1 rightward, -1 leftward, per wire
    std::string source;          ///< original slice word

    int numGaps() const { return (int)gapWidth.size(); }
    int numWires() const { return wireOffset.back() + gapWidth.back(); }
    int wire(int gap, int row) const { return wireOffset[gap] + row; }
    int leftWidth() const { return gapWidth.front(); }
    int rightWidth() const { return gapWidth.back(); }
};

namespace detail {

struct Token {
    SliceItem item;
    size_t position;
};

inline std::vector<std::vector<Token>> tokenize(const std::string& text) {
    std::vector<std::vector<Token>> slices(1);
    size_t i = 0;
    const size_t n = text.size();
    while (i < n) {
        char c = text[i];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r') { ++i; continue; }
        if (c == ';') { slices.emplace_back(); ++i; continue; }
        size_t start = i;
        std::string word;
        while (i < n && !isspace((unsigned char)text[i]) && text[i] != ';') word += text[i++];
        // Split trailing orientation marks off the base token.
        size_t baseLen = word.size();
        while (baseLen > 0 && (word[baseLen - 1] == '>' || word[baseLen - 1] == '<')) --baseLen;
        std::string base = word.substr(0, baseLen);
        std::string marks = word.substr(baseLen);
        SliceItem item;
        if (base == "id") item.kind = ItemKind::Id;
        else if (base == "xp") item.kind = ItemKind::Xp;
        else if (base == "xn") item.kind = ItemKind::Xn;
        else if (base == "cupr") item.kind = ItemKind::CupR;
        else if (base == "cupl") item.kind = ItemKind::CupL;
        else if (base == "capr") item.kind = ItemKind::CapR;
        else if (base == "capl") item.kind = ItemKind::CapL;
        else throw ParseError("unknown token '" + word + "'", start);
        bool crossing = item.kind == ItemKind::Xp || item.kind == ItemKind::Xn;
        bool plain = item.kind == ItemKind::Id || crossing;
        if (!marks.empty() && !plain)
            throw ParseError("orientation marks not allowed on cups/caps", start);
        if (marks.size() > (crossing ? 2u : 1u))
            throw ParseError("too many orientation marks", start);
        if (marks.size() >= 1) item.mark0 = marks[0] == '>' ? 1 : -1;
        if (marks.size() == 2) item.mark1 = marks[1] == '>' ? 1 : -1;
        else if (crossing && marks.size() == 1) item.mark1 = item.mark0;
        slices.back().push_back({item, start});
    }
    if (slices.size() == 1 && slices[0].empty())
        throw ParseError("empty diagram", 0);
    for (auto& s : slices)
        if (s.empty()) throw ParseError("empty slice", 0);
    return slices;
}

/** @brief Compute gap widths and check slice arities; fills wireOffset. */
inline void computeWidths(TangleDiagram& d, const std::vector<std::vector<Token>>& toks) {
    int width = 0;
    for (const auto& t : toks[0]) width += itemInArity(t.item.kind);
    d.gapWidth = {width};
    for (size_t s = 0; s < toks.size(); ++s) {
        int in = 0, out = 0;
        for (const auto& t : toks[s]) {
            in += itemInArity(t.item.kind);
            out += itemOutArity(t.item.kind);
        }
        if (in != d.gapWidth.back())
            throw ParseError("arity mismatch: slice consumes " + std::to_string(in) +
                                 " strands but " + std::to_string(d.gapWidth.back()) +
                                 " are available",
                             toks[s].front().position);
        d.gapWidth.push_back(out);
    }
    d.wireOffset.assign(d.gapWidth.size(), 0);
    for (size_t g = 1; g < d.gapWidth.size(); ++g)
        d.wireOffset[g] = d.wireOffset[g - 1] + d.gapWidth[g - 1];
}

/**
 * @brief Propagate orientations: equality constraints along strands, fixed
 * directions from cups/caps and marks, rightward default for free strands.
 */
inline void solveOrientations(TangleDiagram& d, const std::vector<std::vector<Token>>& toks) {
    int W = d.numWires();
    std::vector<std::vector<int>> eq(W);        // equality adjacency
    std::vector<int> fixedDir(W, 0);            // 0 = unconstrained
    std::vector<size_t> fixedPos(W, 0);
    auto fix = [&](int w, int dir, size_t pos) {
        if (fixedDir[w] != 0 && fixedDir[w] != dir)
            throw ParseError("orientation mismatch at a cup/cap", pos);
        fixedDir[w] = dir;
        fixedPos[w] = pos;
    };
    for (size_t s = 0; s < toks.size(); ++s) {
        int ri = 0, ro = 0;
        for (const auto& t : toks[s]) {
            const ItemKind k = t.item.kind;
            int inTop = d.wire((int)s, ri), outTop = d.wire((int)s + 1, ro);
            switch (k) {
                case ItemKind::Id:
                    eq[inTop].push_back(outTop);
                    eq[outTop].push_back(inTop);
                    if (t.item.mark0) fix(inTop, t.item.mark0, t.position);
                    break;
                case ItemKind::Xp:
                case ItemKind::Xn: {
                    int inBot = inTop + 1, outBot = outTop + 1;
                    eq[inTop].push_back(outBot);
                    eq[outBot].push_back(inTop);
                    eq[inBot].push_back(outTop);
                    eq[outTop].push_back(inBot);
                    if (t.item.mark0) fix(inTop, t.item.mark0, t.position);
                    if (t.item.mark1) fix(inBot, t.item.mark1, t.position);
                    break;
                }
                case ItemKind::CupR:
                    fix(outTop, 1, t.position);
                    fix(outTop + 1, -1, t.position);
                    break;
                case ItemKind::CupL:
                    fix(outTop, -1, t.position);
                    fix(outTop + 1, 1, t.position);
                    break;
                case ItemKind::CapR:
                    fix(inTop, 1, t.position);
                    fix(inTop + 1, -1, t.position);
                    break;
                case ItemKind::CapL:
                    fix(inTop, -1, t.position);
                    fix(inTop + 1, 1, t.position);
                    break;
            }
            ri += itemInArity(k);
            ro += itemOutArity(k);
        }
    }
    d.wireDir.assign(W, 0);
    // BFS from every fixed wire; then default remaining strands to rightward.
    std::vector<int> queue;
    for (int w = 0; w < W; ++w)
        if (fixedDir[w]) { d.wireDir[w] = fixedDir[w]; queue.push_back(w); }
    auto flood = [&] {
        while (!queue.empty()) {
            int w = queue.back();
            queue.pop_back();
            for (int v : eq[w]) {
                if (d.wireDir[v] == 0) {
                    d.wireDir[v] = d.wireDir[w];
                    queue.push_back(v);
                } else if (d.wireDir[v] != d.wireDir[w]) {
                    throw ParseError("orientation mismatch at a cup/cap", fixedPos[w]);
                }
            }
        }
    };
    flood();
    for (int w = 0; w < W; ++w)
        if (d.wireDir[w] == 0) { d.wireDir[w] = 1; queue.push_back(w); flood(); }
}

/**
 * @brief Rewrite the first crossing whose strands are not both rightward.
 *
 * If the bottom-left wire is leftward (a crossing output), the strand that
 * enters at the top-right is routed over the top (cup above, crossing,
 * cap below).  Otherwise the top-left wire is leftward and the strand
 * entering at the bottom-right is routed under the bottom.  Each rewrite
 * flips xp <-> xn (the strands change diagonals) and may leave one more
 * mixed crossing, handled on the next pass; at most two passes per crossing.
 *
 * @return true if a rewrite happened.
 */
inline bool expandOneMixedCrossing(std::vector<std::vector<Token>>& toks, const TangleDiagram& d) {
    for (size_t s = 0; s < toks.size(); ++s) {
        int ri = 0;
        for (size_t it = 0; it < toks[s].size(); ++it) {
            const Token& t = toks[s][it];
            ItemKind k = t.item.kind;
            if (k == ItemKind::Xp || k == ItemKind::Xn) {
                int dT = d.wireDir[d.wire((int)s, ri)];
                int dB = d.wireDir[d.wire((int)s, ri + 1)];
                if (!(dT == 1 && dB == 1)) {
                    ItemKind flipped = (k == ItemKind::Xp) ? ItemKind::Xn : ItemKind::Xp;
                    Token cross{{flipped, 0, 0}, t.position};
                    Token id{{ItemKind::Id, 0, 0}, t.position};
                    // Keep the solved directions of the two original strands
                    // as explicit marks so the rewritten word stays oriented.
                    Token idT{{ItemKind::Id, dT, 0}, t.position};
                    Token idB{{ItemKind::Id, dB, 0}, t.position};
                    // Three replacement slices; other items of slice s stay in
                    // the middle slice, padded by ids in the outer slices.
                    std::vector<Token> A, B, C;
                    bool routeOverTop = (dB == -1);
                    for (size_t jt = 0; jt < toks[s].size(); ++jt) {
                        const Token& u = toks[s][jt];
                        int inA = itemInArity(u.item.kind), outA = itemOutArity(u.item.kind);
                        if (jt == it) {
                            if (routeOverTop) {
                                // cup above the crossing: rows r, r+1 created.
                                A.push_back({{ItemKind::CupL, 0, 0}, t.position});
                                A.push_back(idT);
                                A.push_back(idB);
                                B.push_back(id);
                                B.push_back(cross);
                                B.push_back(id);
                                C.push_back(id);
                                C.push_back(id);
                                C.push_back({{ItemKind::CapR, 0, 0}, t.position});
                            } else {
                                // cup below the crossing: rows r+2, r+3 created.
                                A.push_back(idT);
                                A.push_back(idB);
                                A.push_back({{ItemKind::CupR, 0, 0}, t.position});
                                B.push_back(id);
                                B.push_back(cross);
                                B.push_back(id);
                                C.push_back({{ItemKind::CapL, 0, 0}, t.position});
                                C.push_back(id);
                                C.push_back(id);
                            }
                        } else {
                            // Pass-through: ids around, the item itself in B.
                            for (int r = 0; r < inA; ++r) A.push_back(id);
                            B.push_back(u);
                            for (int r = 0; r < outA; ++r) C.push_back(id);
                        }
                    }
                    std::vector<std::vector<Token>> result;
                    result.reserve(toks.size() + 2);
                    for (size_t q = 0; q < s; ++q) result.push_back(toks[q]);
                    result.push_back(A);
                    result.push_back(B);
                    result.push_back(C);
                    for (size_t q = s + 1; q < toks.size(); ++q) result.push_back(toks[q]);
                    toks = std::move(result);
                    return true;
                }
            }
            ri += itemInArity(k);
        }
    }
    return false;
}

inline void buildDiagram(TangleDiagram& d, std::vector<std::vector<Token>>& toks) {
    for (int guard = 0;; ++guard) {
        if (guard > 4096) throw ParseError("crossing expansion did not terminate", 0);
        d.slices.clear();
        computeWidths(d, toks);
        solveOrientations(d, toks);
        if (!expandOneMixedCrossing(toks, d)) break;
    }
    d.slices.assign(toks.size(), {});
    for (size_t s = 0; s < toks.size(); ++s)
        for (const auto& t : toks[s]) d.slices[s].push_back(t.item);
    // Final validation: caps must agree with the solved orientations (cup
    // constraints were enforced during the solve).
    for (size_t s = 0; s < toks.size(); ++s) {
        int ri = 0;
        for (const auto& t : toks[s]) {
            ItemKind k = t.item.kind;
            if (k == ItemKind::CapR || k == ItemKind::CapL) {
                int top = d.wireDir[d.wire((int)s, ri)];
                int want = (k == ItemKind::CapR) ? 1 : -1;
                if (top != want)
                    throw ParseError("orientation mismatch at a cup/cap", t.position);
            }
            ri += itemInArity(k);
        }
    }
}

} // namespace detail

/** @brief Parse and validate a slice word; expands mixed-orientation crossings. */
inline TangleDiagram parseDiagram(const std::string& text) {
    TangleDiagram d;
    d.source = text;
    auto toks = detail::tokenize(text);
    detail::buildDiagram(d, toks);
    return d;
}

/** @brief Serialize back to a slice word (orientation marks made explicit). */
inline std::string serializeDiagram(const TangleDiagram& d) {
    std::ostringstream out;
    for (size_t s = 0; s < d.slices.size(); ++s) {
        if (s) out << " ; ";
        int ri = 0;
        for (size_t i = 0; i < d.slices[s].size(); ++i) {
            if (i) out << ' ';
            const SliceItem& item = d.slices[s][i];
            auto markChar = [&](int row) {
                return d.wireDir[d.wire((int)s, row)] > 0 ? '>' : '<';
            };
            switch (item.kind) {
                case ItemKind::Id: out << "id" << markChar(ri); break;
                case ItemKind::Xp: out << "xp" << markChar(ri) << markChar(ri + 1); break;
                case ItemKind::Xn: out << "xn" << markChar(ri) << markChar(ri + 1); break;
                case ItemKind::CupR: out << "cupr"; break;
                case ItemKind::CupL: out << "cupl"; break;
                case ItemKind::CapR: out << "capr"; break;
                case ItemKind::CapL: out << "capl"; break;
            }
            ri += itemInArity(item.kind);
        }
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// DiagramCombinatorics
// ---------------------------------------------------------------------------

/** @brief One crossing with its four segments and four adjacent regions. */
struct CrossingInfo {
    int slice = 0;   ///< slice index
    int rowTop = 0;  ///< top input row (rows rowTop, rowTop+1 at the left gap)
    int sign = +1;   ///< +1 for xp, -1 for xn (intrinsic sign after expansion)
    int seg1 = -1;   ///< incoming top segment
    int seg2 = -1;   ///< incoming bottom segment
    int seg2p = -1;  ///< outgoing top segment
    int seg1p = -1;  ///< outgoing bottom segment
    int regN = -1, regW = -1, regS = -1, regE = -1;
};

/** @brief One segment: a maximal strand piece between crossing passages. */
struct SegmentInfo {
    int component = -1;
    int arc = -1;
    int leftRegion = -1;      ///< region on the left of the flow direction
    std::vector<int> wires;   ///< member wires in flow order
    int startCrossing = -1;   ///< crossing where the flow enters (-1 = boundary)
    int endCrossing = -1;     ///< crossing where the flow leaves (-1 = boundary)
    bool startOver = false;   ///< flow enters from an over-passage
    bool endOver = false;     ///< flow leaves into an over-passage
    /** eta = +1 for over->under segments, -1 for under->over, 0 otherwise. */
    int eta() const {
        if (startCrossing < 0 || endCrossing < 0) return 0;
        if (startOver && !endOver) return 1;
        if (!startOver && endOver) return -1;
        return 0;
    }
};

struct DiagramCombinatorics {
    TangleDiagram diagram;
    std::vector<CrossingInfo> crossings;
    std::vector<SegmentInfo> segments;
    std::vector<int> wireSegment;    ///< per wire
    int numArcs = 0;
    int numRegions = 0;
    int numComponents = 0;
    int topRegion = -1;
    std::vector<int> intervalRegion; ///< per gap-interval (see intervalIndex)
    std::vector<std::vector<int>> componentSegments; ///< flow order per component
    std::vector<bool> componentClosed;
    int openStrands = 0;

    int intervalIndex(int gap, int iv) const {
        int off = 0;
        for (int g = 0; g < gap; ++g) off += diagram.gapWidth[g] + 1;
        return off + iv;
    }
    /** Region above a wire in the plane. */
    int regionAbove(int gap, int row) const {
        return intervalRegion[intervalIndex(gap, row)];
    }
    /** Region below a wire in the plane. */
    int regionBelow(int gap, int row) const {
        return intervalRegion[intervalIndex(gap, row + 1)];
    }
    int wireGap(int w) const {
        int g = (int)diagram.wireOffset.size() - 1;
        while (diagram.wireOffset[g] > w) --g;
        return g;
    }
    int wireRow(int w) const { return w - diagram.wireOffset[wireGap(w)]; }
};

namespace detail {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

/** @brief Endpoint connection of a wire: next wire plus crossing tag. */
struct WireConn {
    int next = -1;
    int crossing = -1; ///< -1 for id/cup/cap connections
    bool over = false; ///< whether the strand passes over at the crossing
};

} // namespace detail

/**
 * @brief Enumerate segments, arcs, regions, components, and the crossing
 * table of a parsed diagram.
 */
inline DiagramCombinatorics buildCombinatorics(const TangleDiagram& d) {
    DiagramCombinatorics dc;
    dc.diagram = d;
    const int W = d.numWires();
    const int S = (int)d.slices.size();

    // --- crossings and wire connections -----------------------------------
    std::vector<detail::WireConn> connL(W), connR(W); // at left/right end of a wire
    for (int s = 0; s < S; ++s) {
        int ri = 0, ro = 0;
        for (const SliceItem& item : d.slices[s]) {
            int inTop = d.wire(s, ri), outTop = d.wire(s + 1, ro);
            switch (item.kind) {
                case ItemKind::Id:
                    connR[inTop] = {outTop, -1, false};
                    connL[outTop] = {inTop, -1, false};
                    break;
                case ItemKind::Xp:
                case ItemKind::Xn: {
                    int c = (int)dc.crossings.size();
                    CrossingInfo ci;
                    ci.slice = s;
                    ci.rowTop = ri;
                    ci.sign = (item.kind == ItemKind::Xp) ? 1 : -1;
                    dc.crossings.push_back(ci);
                    bool topOver = (item.kind == ItemKind::Xp); // strand 1 over iff positive
                    int inBot = inTop + 1, outBot = outTop + 1;
                    connR[inTop] = {outBot, c, topOver};
                    connL[outBot] = {inTop, c, topOver};
                    connR[inBot] = {outTop, c, !topOver};
                    connL[outTop] = {inBot, c, !topOver};
                    break;
                }
                case ItemKind::CupR:
                case ItemKind::CupL:
                    connL[outTop] = {outTop + 1, -1, false};
                    connL[outTop + 1] = {outTop, -1, false};
                    break;
                case ItemKind::CapR:
                case ItemKind::CapL:
                    connR[inTop] = {inTop + 1, -1, false};
                    connR[inTop + 1] = {inTop, -1, false};
                    break;
            }
            ri += itemInArity(item.kind);
            ro += itemOutArity(item.kind);
        }
    }

    // --- strand traversal: segments and components -------------------------
    dc.wireSegment.assign(W, -1);
    std::vector<bool> visited(W, false);
    auto exitConn = [&](int w) -> const detail::WireConn& {
        return d.wireDir[w] > 0 ? connR[w] : connL[w];
    };

    auto traverse = [&](int startWire, bool closed) {
        int comp = (int)dc.componentSegments.size();
        dc.componentSegments.emplace_back();
        dc.componentClosed.push_back(closed);
        SegmentInfo seg;
        seg.component = comp;
        int w = startWire;
        int firstSegment = (int)dc.segments.size();
        while (true) {
            visited[w] = true;
            seg.wires.push_back(w);
            const detail::WireConn& c = exitConn(w);
            bool atBoundary = (c.next < 0);
            bool backAtStart = closed && !atBoundary && c.next == startWire;
            if (c.crossing >= 0) {
                // Passage: close the current segment, open the next.
                seg.endCrossing = c.crossing;
                seg.endOver = c.over;
                int segId = (int)dc.segments.size();
                for (int wr : seg.wires) dc.wireSegment[wr] = segId;
                dc.componentSegments[comp].push_back(segId);
                dc.segments.push_back(std::move(seg));
                seg = SegmentInfo{};
                seg.component = comp;
                seg.startCrossing = c.crossing;
                seg.startOver = c.over;
            }
            if (atBoundary || backAtStart) {
                if (backAtStart && c.crossing < 0 && !seg.wires.empty() &&
                    firstSegment < (int)dc.segments.size() && seg.startCrossing >= 0) {
                    // A cycle entered mid-segment: merge the dangling piece
                    // into the first recorded segment.
                    SegmentInfo& first = dc.segments[firstSegment];
                    first.startCrossing = seg.startCrossing;
                    first.startOver = seg.startOver;
                    for (int wr : seg.wires) dc.wireSegment[wr] = firstSegment;
                    first.wires.insert(first.wires.begin(), seg.wires.begin(), seg.wires.end());
                } else if (!seg.wires.empty()) {
                    int segId = (int)dc.segments.size();
                    for (int wr : seg.wires) dc.wireSegment[wr] = segId;
                    dc.componentSegments[comp].push_back(segId);
                    dc.segments.push_back(std::move(seg));
                } else if (backAtStart && c.crossing >= 0) {
                    // The cycle closed exactly at a passage: the first segment
                    // starts at this crossing.
                    SegmentInfo& first = dc.segments[firstSegment];
                    first.startCrossing = c.crossing;
                    first.startOver = c.over;
                }
                break;
            }
            w = c.next;
        }
    };

    // Open strands first: flow enters at left-gap rightward wires and
    // right-gap leftward wires.
    for (int r = 0; r < d.gapWidth.front(); ++r) {
        int w = d.wire(0, r);
        if (!visited[w] && d.wireDir[w] > 0) { traverse(w, false); ++dc.openStrands; }
    }
    for (int r = 0; r < d.gapWidth.back(); ++r) {
        int w = d.wire((int)d.slices.size(), r);
        if (!visited[w] && d.wireDir[w] < 0) { traverse(w, false); ++dc.openStrands; }
    }
    for (int w = 0; w < W; ++w)
        if (!visited[w]) traverse(w, true);
    dc.numComponents = (int)dc.componentSegments.size();

    // --- arcs: segments joined across over-passages ------------------------
    detail::UnionFind arcUF((int)dc.segments.size());
    for (int i = 0; i < (int)dc.segments.size(); ++i) {
        const SegmentInfo& s = dc.segments[i];
        if (s.endCrossing >= 0 && s.endOver) {
            // Find the segment that starts at the same crossing as over.
            // Follow the wire connection directly.
            int lastWire = s.wires.back();
            const detail::WireConn& c =
                (d.wireDir[lastWire] > 0) ? connR[lastWire] : connL[lastWire];
            if (c.next >= 0) arcUF.unite(i, dc.wireSegment[c.next]);
        }
    }
    {
        std::map<int, int> arcIds;
        for (int i = 0; i < (int)dc.segments.size(); ++i) {
            int root = arcUF.find(i);
            auto [it, inserted] = arcIds.try_emplace(root, (int)arcIds.size());
            dc.segments[i].arc = it->second;
        }
        dc.numArcs = (int)arcIds.size();
    }

    // --- regions: union-find over gap intervals ----------------------------
    int totalIntervals = 0;
    for (int g = 0; g <= S; ++g) totalIntervals += d.gapWidth[g] + 1;
    detail::UnionFind regUF(totalIntervals);
    std::vector<int> ivOffset(S + 1, 0);
    for (int g = 1; g <= S; ++g) ivOffset[g] = ivOffset[g - 1] + d.gapWidth[g - 1] + 1;
    auto IV = [&](int g, int i) { return ivOffset[g] + i; };
    for (int s = 0; s < S; ++s) {
        int ri = 0, ro = 0;
        regUF.unite(IV(s, 0), IV(s + 1, 0));
        for (const SliceItem& item : d.slices[s]) {
            switch (item.kind) {
                case ItemKind::Id:
                    regUF.unite(IV(s, ri + 1), IV(s + 1, ro + 1));
                    ri += 1; ro += 1;
                    break;
                case ItemKind::Xp:
                case ItemKind::Xn:
                    // The middle faces on either side of the crossing point
                    // stay separate (they are the W and E regions).
                    regUF.unite(IV(s, ri + 2), IV(s + 1, ro + 2));
                    ri += 2; ro += 2;
                    break;
                case ItemKind::CupR:
                case ItemKind::CupL:
                    // Face left of the cup wraps above and below its legs.
                    regUF.unite(IV(s, ri), IV(s + 1, ro));
                    regUF.unite(IV(s, ri), IV(s + 1, ro + 2));
                    ro += 2;
                    break;
                case ItemKind::CapR:
                case ItemKind::CapL:
                    regUF.unite(IV(s, ri), IV(s + 1, ro));
                    regUF.unite(IV(s, ri + 2), IV(s + 1, ro));
                    ri += 2;
                    break;
            }
        }
    }
    {
        std::map<int, int> regionIds;
        dc.intervalRegion.assign(totalIntervals, -1);
        for (int i = 0; i < totalIntervals; ++i) {
            int root = regUF.find(i);
            auto [it, inserted] = regionIds.try_emplace(root, (int)regionIds.size());
            dc.intervalRegion[i] = it->second;
        }
        dc.numRegions = (int)regionIds.size();
        dc.topRegion = dc.intervalRegion[IV(0, 0)];
    }

    // --- crossing table: segments and regions ------------------------------
    for (CrossingInfo& ci : dc.crossings) {
        int s = ci.slice, r = ci.rowTop;
        ci.seg1 = dc.wireSegment[d.wire(s, r)];
        ci.seg2 = dc.wireSegment[d.wire(s, r + 1)];
        ci.seg2p = dc.wireSegment[d.wire(s + 1, r)];
        ci.seg1p = dc.wireSegment[d.wire(s + 1, r + 1)];
        ci.regN = dc.intervalRegion[IV(s, r)];
        ci.regW = dc.intervalRegion[IV(s, r + 1)];
        ci.regS = dc.intervalRegion[IV(s, r + 2)];
        ci.regE = dc.intervalRegion[IV(s + 1, r + 1)];
    }

    // --- per-segment region on the left of the flow ------------------------
    for (SegmentInfo& seg : dc.segments) {
        int w = seg.wires.front();
        int g = dc.wireGap(w), row = dc.wireRow(w);
        seg.leftRegion =
            d.wireDir[w] > 0 ? dc.regionAbove(g, row) : dc.regionBelow(g, row);
    }

    return dc;
}

// ---------------------------------------------------------------------------
// Wirtinger presentation and linking matrix
// ---------------------------------------------------------------------------

/**
 * @brief One Wirtinger relation: outArc = overArc^{-sign} inArc overArc^{sign}.
 */
struct WirtingerRelation {
    int overArc;
    int inArc;
    int outArc;
    int sign;
};

/** @brief Wirtinger presentation: one generator per arc, one relation per crossing. */
struct WirtingerPresentation {
    int numGenerators = 0; ///< = number of arcs
    std::vector<WirtingerRelation> relations;
};

inline WirtingerPresentation wirtinger(const DiagramCombinatorics& dc) {
    WirtingerPresentation wp;
    wp.numGenerators = dc.numArcs;
    for (const CrossingInfo& ci : dc.crossings) {
        WirtingerRelation rel;
        rel.sign = ci.sign;
        if (ci.sign > 0) {
            // Strand 1 over: the under strand enters at 2 and leaves at 2'.
            rel.overArc = dc.segments[ci.seg1].arc;
            rel.inArc = dc.segments[ci.seg2].arc;
            rel.outArc = dc.segments[ci.seg2p].arc;
        } else {
            // Strand 2 over: the under strand enters at 1 and leaves at 1'.
            rel.overArc = dc.segments[ci.seg2].arc;
            rel.inArc = dc.segments[ci.seg1].arc;
            rel.outArc = dc.segments[ci.seg1p].arc;
        }
        wp.relations.push_back(rel);
    }
    return wp;
}

/**
 * @brief Linking matrix: lk(i,j) = half the signed count of crossings between
 * components i and j; self-crossings count twice, so the diagonal is the
 * blackboard-framing writhe of each component.
 */
inline std::vector<std::vector<double>> linkingMatrix(const DiagramCombinatorics& dc) {
    std::vector<std::vector<double>> lk(dc.numComponents,
                                        std::vector<double>(dc.numComponents, 0.0));
    for (const CrossingInfo& ci : dc.crossings) {
        int c1 = dc.segments[ci.seg1].component;
        int c2 = dc.segments[ci.seg2].component;
        lk[c1][c2] += 0.5 * ci.sign;
        lk[c2][c1] += 0.5 * ci.sign;
    }
    return lk;
}

// ---------------------------------------------------------------------------
// Composition, union, serialization
// ---------------------------------------------------------------------------

/**
 * @brief Horizontal composition: d2 drawn to the right of d1.  The right
 * boundary of d1 must match the left boundary of d2 (width and orientations).
 */
inline TangleDiagram composeDiagrams(const TangleDiagram& d1, const TangleDiagram& d2) {
    if (d1.rightWidth() != d2.leftWidth())
        throw ParseError("compose: boundary widths differ", 0);
    for (int r = 0; r < d1.rightWidth(); ++r)
        if (d1.wireDir[d1.wire((int)d1.slices.size(), r)] != d2.wireDir[d2.wire(0, r)])
            throw ParseError("compose: boundary orientations differ", 0);
    return parseDiagram(serializeDiagram(d1) + " ; " + serializeDiagram(d2));
}

/**
 * @brief Vertical union: d2 drawn below d1.  The shorter diagram is padded on
 * the right with identity slices.
 */
inline TangleDiagram unionDiagrams(const TangleDiagram& d1, const TangleDiagram& d2) {
    size_t len = std::max(d1.slices.size(), d2.slices.size());
    std::ostringstream out;
    auto emitSlicePart = [&](const TangleDiagram& d, size_t s) {
        // Slice s of d, or identity padding on its right-boundary wires.
        if (s < d.slices.size()) {
            std::ostringstream part;
            int ri = 0;
            for (size_t i = 0; i < d.slices[s].size(); ++i) {
                if (i) part << ' ';
                const SliceItem& item = d.slices[s][i];
                auto markChar = [&](int row) {
                    return d.wireDir[d.wire((int)s, row)] > 0 ? '>' : '<';
                };
                switch (item.kind) {
                    case ItemKind::Id: part << "id" << markChar(ri); break;
                    case ItemKind::Xp: part << "xp" << markChar(ri) << markChar(ri + 1); break;
                    case ItemKind::Xn: part << "xn" << markChar(ri) << markChar(ri + 1); break;
                    case ItemKind::CupR: part << "cupr"; break;
                    case ItemKind::CupL: part << "cupl"; break;
                    case ItemKind::CapR: part << "capr"; break;
                    case ItemKind::CapL: part << "capl"; break;
                }
                ri += itemInArity(item.kind);
            }
            return part.str();
        }
        std::ostringstream part;
        for (int r = 0; r < d.rightWidth(); ++r) {
            if (r) part << ' ';
            part << "id" << (d.wireDir[d.wire((int)d.slices.size(), r)] > 0 ? '>' : '<');
        }
        return part.str();
    };
    for (size_t s = 0; s < len; ++s) {
        if (s) out << " ; ";
        std::string top = emitSlicePart(d1, s);
        std::string bottom = emitSlicePart(d2, s);
        out << top;
        if (!top.empty() && !bottom.empty()) out << ' ';
        out << bottom;
    }
    return parseDiagram(out.str());
}

/** @brief Debug serialization of the combinatorics. */
inline nlohmann::json toJson(const DiagramCombinatorics& dc) {
    nlohmann::json j;
    j["sliceWord"] = serializeDiagram(dc.diagram);
    j["numSegments"] = dc.segments.size();
    j["numArcs"] = dc.numArcs;
    j["numRegions"] = dc.numRegions;
    j["numComponents"] = dc.numComponents;
    j["openStrands"] = dc.openStrands;
    j["topRegion"] = dc.topRegion;
    nlohmann::json cs = nlohmann::json::array();
    for (const CrossingInfo& ci : dc.crossings) {
        cs.push_back({{"slice", ci.slice},
                      {"rowTop", ci.rowTop},
                      {"sign", ci.sign},
                      {"segments", {ci.seg1, ci.seg2, ci.seg2p, ci.seg1p}},
                      {"regions", {ci.regN, ci.regW, ci.regS, ci.regE}}});
    }
    j["crossings"] = cs;
    nlohmann::json segs = nlohmann::json::array();
    for (const SegmentInfo& s : dc.segments) {
        segs.push_back({{"component", s.component},
                        {"arc", s.arc},
                        {"leftRegion", s.leftRegion},
                        {"eta", s.eta()},
                        {"wires", s.wires}});
    }
    j["segments"] = segs;
    return j;
}

/** @brief Euler-count consistency: #regions == #crossings + #open strands + 1. */
inline bool eulerCountHolds(const DiagramCombinatorics& dc) {
    return dc.numRegions == (int)dc.crossings.size() + dc.openStrands + 1;
}

} // namespace qinv
