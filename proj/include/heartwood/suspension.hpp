#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "system.hpp"
#include "tree.hpp"
#include "words.hpp"

namespace heartwood {

/*
 * A finite piece of the suspension tree T_K = F(A) x K / ~, where
 * (u, x) ~ (v, y) iff x(u^-1 v) = y.  One isometric copy of K per word of a
 * prefix-closed set, glued along its parent letter only: the copy of u = pz
 * identifies x in image(z) with the parent point x z^-1.  Chains between any
 * two copies of the set factor through parents, so parent gluing generates
 * the full equivalence, and the glued union is an exact subtree of T_K with
 * the induced path metric.
 *
 * Copy embeddings are recorded as host vertex ids per K vertex; host vertex
 * ids are stable under the edge splits that later gluings perform, interior
 * points are recovered by walking host geodesics.
 */
class SuspensionComplex {
public:
    struct CopyRec {
        ReducedWord word;
        std::vector<int> vmap; // K vertex index -> host vertex id
    };

    static SuspensionComplex ball(const IsometrySystem& sys, int radius, long long budget = 200000) {
        if (radius < 0) throw InputError("ball radius must be nonnegative");
        if (sys.generator_count() == 0) throw InputError("degenerate system: no generators");
        long long need = 1;
        long long level = 1;
        const long long n2 = 2LL * sys.alphabet().size();
        for (int r = 1; r <= radius; ++r) {
            level = (r == 1) ? n2 : level * (n2 - 1);
            if (level > budget || need + level > budget)
                throw ResourceError("ball of radius " + std::to_string(radius) + " needs more than " +
                                        std::to_string(budget) + " copies",
                                    need + level);
            need += level;
        }
        std::vector<ReducedWord> words{ReducedWord()};
        for (int r = 1; r <= radius; ++r)
            for (const auto& w : enumerate_reduced(sys.alphabet(), r)) words.push_back(w);
        SuspensionComplex c = for_words(sys, words, budget);
        c.radius_ = radius;
        return c;
    }

    static SuspensionComplex for_words(const IsometrySystem& sys, std::vector<ReducedWord> words,
                                       long long budget = 200000) {
        if (sys.generator_count() == 0) throw InputError("degenerate system: no generators");
        std::sort(words.begin(), words.end(), [&](const ReducedWord& a, const ReducedWord& b) {
            return word_order_less(sys.alphabet(), a, b);
        });
        words.erase(std::unique(words.begin(), words.end()), words.end());
        if (words.empty() || !words.front().empty())
            throw InputError("word complex must contain the empty word");
        if (static_cast<long long>(words.size()) > budget)
            throw ResourceError("word complex needs " + std::to_string(words.size()) + " copies",
                                static_cast<long long>(words.size()));
        SuspensionComplex c(sys);
        for (const auto& w : words) c.add_copy(w);
        c.host_.validate();
        c.subtree_memo_.assign(c.copies_.size(), std::nullopt);
        return c;
    }

    // Prefix closure of a set of words, ready for for_words.
    static std::vector<ReducedWord> prefix_closure(const std::vector<ReducedWord>& words) {
        std::vector<ReducedWord> out;
        for (const auto& w : words)
            for (int k = 0; k <= w.length(); ++k) out.push_back(w.prefix(k));
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        return out;
    }

    const FiniteMetricTree& host() const { return host_; }
    const IsometrySystem& system() const { return sys_; }
    int radius() const { return radius_; }
    int copy_count() const { return static_cast<int>(copies_.size()); }
    const CopyRec& copy(int i) const { return copies_.at(static_cast<size_t>(i)); }

    std::optional<int> copy_index(const ReducedWord& u) const {
        auto it = index_.find(u);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    // phi_u(x): the host point of (u, x).
    TreePoint locate(const ReducedWord& u, const TreePoint& x) const {
        auto ci = copy_index(u);
        if (!ci) {
            if (radius_ >= 0 && u.length() > radius_)
                throw OutOfBallError("word leaves the radius-" + std::to_string(radius_) + " ball");
            throw OutOfBallError("word has no copy in this complex");
        }
        return embed_point(*ci, x);
    }

    TreePoint embed_point(int copy_idx, const TreePoint& x) const {
        sys_.tree().check_point(x);
        const CopyRec& rec = copies_.at(static_cast<size_t>(copy_idx));
        if (x.is_vertex()) return TreePoint::at_vertex(rec.vmap[static_cast<size_t>(x.vertex)]);
        const auto& ed = sys_.tree().edge(x.edge);
        TreePoint hu = TreePoint::at_vertex(rec.vmap[static_cast<size_t>(ed.u)]);
        TreePoint hv = TreePoint::at_vertex(rec.vmap[static_cast<size_t>(ed.v)]);
        return host_.point_on_geodesic(hu, hv, x.offset);
    }

    // phi_u^-1(p) when p lies in the copy of u.
    std::optional<TreePoint> preimage(int copy_idx, const TreePoint& p) const {
        const CopyRec& rec = copies_.at(static_cast<size_t>(copy_idx));
        for (size_t v = 0; v < rec.vmap.size(); ++v)
            if (TreePoint::at_vertex(rec.vmap[v]) == p) return TreePoint::at_vertex(static_cast<int>(v));
        for (int e : sys_.tree().alive_edges()) {
            const auto& ed = sys_.tree().edge(e);
            TreePoint hu = TreePoint::at_vertex(rec.vmap[static_cast<size_t>(ed.u)]);
            TreePoint hv = TreePoint::at_vertex(rec.vmap[static_cast<size_t>(ed.v)]);
            if (host_.on_geodesic(hu, p, hv))
                return sys_.tree().normalized(e, host_.distance(hu, p));
        }
        return std::nullopt;
    }

    // The host subtree phi_u(K).
    const ClosedSubtree& copy_subtree(int copy_idx) const {
        auto& memo = subtree_memo_.at(static_cast<size_t>(copy_idx));
        if (!memo) {
            std::vector<TreePoint> pts;
            const CopyRec& rec = copies_[static_cast<size_t>(copy_idx)];
            for (int leaf : sys_.tree().leaves())
                pts.push_back(TreePoint::at_vertex(rec.vmap[static_cast<size_t>(leaf)]));
            memo = ClosedSubtree::hull(host_, std::move(pts));
        }
        return *memo;
    }

    // Left action w(u, x) = (wu, x) on host points.
    TreePoint act(const ReducedWord& w, const TreePoint& p) const {
        host_.check_point(p);
        for (int i = 0; i < copy_count(); ++i) {
            if (!copy_subtree(i).contains(host_, p)) continue;
            ReducedWord target = w * copies_[static_cast<size_t>(i)].word;
            auto ti = copy_index(target);
            if (!ti) continue;
            auto x = preimage(i, p);
            internal_check(x.has_value(), "copy subtree membership without preimage");
            return embed_point(*ti, *x);
        }
        throw OutOfBallError("action image leaves the complex; enlarge the radius");
    }

private:
    explicit SuspensionComplex(const IsometrySystem& sys) : sys_(sys) {}

    void add_copy(const ReducedWord& u) {
        const FiniteMetricTree& k = sys_.tree();
        CopyRec rec;
        rec.word = u;
        rec.vmap.assign(static_cast<size_t>(k.vertex_count()), -1);

        if (u.empty()) {
            for (int v = 0; v < k.vertex_count(); ++v) rec.vmap[static_cast<size_t>(v)] = host_.add_vertex();
            for (int e : k.alive_edges()) {
                const auto& ed = k.edge(e);
                host_.add_edge(rec.vmap[static_cast<size_t>(ed.u)], rec.vmap[static_cast<size_t>(ed.v)],
                               ed.len);
            }
            index_[u] = static_cast<int>(copies_.size());
            copies_.push_back(std::move(rec));
            return;
        }

        const int z = u.last();
        auto pi = copy_index(u.prefix(u.length() - 1));
        internal_check(pi.has_value(), "word set is not prefix-closed");
        const ClosedSubtree& glue = sys_.letter_image(z); // identified with parent dom(z) via z^-1

        // Subdivide K at the glue boundary so every node is a vertex or a
        // marked interior point; each subdivision segment is then entirely
        // inside or outside the glue region.
        std::vector<TreePoint> nodes;
        for (int v = 0; v < k.vertex_count(); ++v) nodes.push_back(TreePoint::at_vertex(v));
        for (const auto& e : glue.extremals())
            if (!e.is_vertex()) nodes.push_back(e);
        std::sort(nodes.begin(), nodes.end());
        nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

        std::vector<char> inglue(nodes.size(), 0);
        std::vector<int> hid(nodes.size(), -1);
        for (size_t i = 0; i < nodes.size(); ++i) {
            inglue[i] = glue.contains(k, nodes[i]) ? 1 : 0;
            if (inglue[i]) {
                auto y = sys_.apply_letter(nodes[i], -z);
                internal_check(y.has_value(), "glue node outside the letter image");
                hid[i] = materialize(embed_point(*pi, *y));
            } else {
                hid[i] = host_.add_vertex();
            }
        }

        auto node_at = [&](const TreePoint& p) {
            auto it = std::lower_bound(nodes.begin(), nodes.end(), p);
            internal_check(it != nodes.end() && *it == p, "subdivision node lookup failed");
            return static_cast<size_t>(it - nodes.begin());
        };

        for (int e : k.alive_edges()) {
            const auto& ed = k.edge(e);
            // interior nodes on e in offset order
            std::vector<std::pair<Scalar, size_t>> on_edge;
            for (size_t i = 0; i < nodes.size(); ++i)
                if (!nodes[i].is_vertex() && nodes[i].edge == e) on_edge.push_back({nodes[i].offset, i});
            std::sort(on_edge.begin(), on_edge.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });
            std::vector<size_t> chain{node_at(TreePoint::at_vertex(ed.u))};
            for (auto& [off, i] : on_edge) chain.push_back(i);
            chain.push_back(node_at(TreePoint::at_vertex(ed.v)));
            Scalar prev(0);
            for (size_t s = 0; s + 1 < chain.size(); ++s) {
                size_t i = chain[s], j = chain[s + 1];
                Scalar next = nodes[j].is_vertex() ? ed.len : nodes[j].offset;
                if (!(inglue[i] && inglue[j])) host_.add_edge(hid[i], hid[j], next - prev);
                prev = next;
            }
        }

        for (int v = 0; v < k.vertex_count(); ++v)
            rec.vmap[static_cast<size_t>(v)] = hid[node_at(TreePoint::at_vertex(v))];
        index_[u] = static_cast<int>(copies_.size());
        copies_.push_back(std::move(rec));
    }

    int materialize(const TreePoint& p) {
        if (p.is_vertex()) return p.vertex;
        return host_.split_edge(p.edge, p.offset);
    }

    IsometrySystem sys_;
    FiniteMetricTree host_;
    std::vector<CopyRec> copies_;
    std::map<ReducedWord, int> index_;
    int radius_ = -1;
    mutable std::vector<std::optional<ClosedSubtree>> subtree_memo_;
};

using BallTree = SuspensionComplex;

// ---------------------------------------------------------------------------
// Bridges between K and wK
// ---------------------------------------------------------------------------

struct BridgeCertificate {
    SuspensionComplex complex;       // copies along the prefixes of w
    TreePoint from;                  // bridge endpoint in K (host coords)
    TreePoint to;                    // bridge endpoint in wK (host coords)
    Scalar length;                   // d(K, wK)
    std::vector<TreePoint> prefix_witness; // a bridge point inside each w_i K
    bool covered = false;            // bridge subseteq union of prefix copies
};

/*
 * For non-admissible w, the segment [K, wK] together with the covering
 * certificate: the bridge lies inside the union of the prefix translates and
 * meets each of them.  Everything is computed on the chain complex of the
 * prefixes of w, which contains the whole bridge.
 */
inline BridgeCertificate bridge_to_translate(const IsometrySystem& sys, const ReducedWord& w) {
    if (sys.is_admissible(w))
        throw InputError("bridge_to_translate: word is admissible, bridge is degenerate");
    std::vector<ReducedWord> words = SuspensionComplex::prefix_closure({w});
    SuspensionComplex c = SuspensionComplex::for_words(sys, words);
    const auto& host = c.host();
    Bridge b = bridge(host, c.copy_subtree(*c.copy_index(ReducedWord())),
                      c.copy_subtree(*c.copy_index(w)));
    internal_check(!b.degenerate, "non-admissible word with touching translates");

    std::vector<TreePoint> witnesses;
    ClosedSubtree arc = ClosedSubtree::hull(host, {b.from, b.to});
    for (int k = 0; k <= w.length(); ++k) {
        auto ci = c.copy_index(w.prefix(k));
        ClosedSubtree hit = subtree_intersection(host, arc, c.copy_subtree(*ci));
        internal_check(!hit.empty(), "bridge misses a prefix translate");
        witnesses.push_back(hit.any_point());
    }
    // covering: every straight piece of the bridge lies in some prefix copy
    // (copy boundaries are host vertices, and the arc lists all vertices).
    bool covered = true;
    std::vector<TreePoint> pts = host.geodesic(b.from, b.to);
    for (size_t i = 0; i + 1 < pts.size() && covered; ++i) {
        bool inside = false;
        for (int k = 0; k <= w.length() && !inside; ++k) {
            const ClosedSubtree& ck = c.copy_subtree(*c.copy_index(w.prefix(k)));
            inside = ck.contains(host, pts[i]) && ck.contains(host, pts[i + 1]);
        }
        covered = inside;
    }
    return BridgeCertificate{std::move(c), b.from, b.to, b.length, std::move(witnesses), covered};
}

// d(K, wK) in T_K; zero iff w is admissible.
inline Scalar translate_gap(const IsometrySystem& sys, const ReducedWord& w) {
    if (sys.is_admissible(w)) return Scalar(0);
    SuspensionComplex c = SuspensionComplex::for_words(sys, SuspensionComplex::prefix_closure({w}));
    Bridge b = bridge(c.host(), c.copy_subtree(*c.copy_index(ReducedWord())),
                      c.copy_subtree(*c.copy_index(w)));
    return b.length;
}

// ---------------------------------------------------------------------------
// Translation length and axes
// ---------------------------------------------------------------------------

enum class IsometryKind { Hyperbolic, Elliptic };

struct TranslationResult {
    Scalar length;
    IsometryKind kind;
    TreePoint witness_in_K;   // axis point (hyperbolic) or fixed point (elliptic), K coords
    int dead_power = 0;       // least n with w^n non-admissible (hyperbolic case)
};

/*
 * ||w|| = max(0, d(p, w^2 p) - d(p, w p)) for any p, evaluated exactly on the
 * chain complex of the prefixes of w^2.  For hyperbolic w the axis meets K:
 * the first non-admissible power w^n yields the bridge [K, w^n K] whose
 * endpoint in K lies on the axis.  For elliptic w the midpoint of [x, xw] is
 * a fixed point in K.
 */
inline TranslationResult translation_length(const IsometrySystem& sys, const ReducedWord& w) {
    if (w.empty()) throw InputError("translation_length needs a nonempty word");
    if (!w.is_cyclically_reduced())
        throw InputError("translation_length needs a cyclically reduced word");
    ReducedWord w2 = w * w;
    internal_check(w2.length() == 2 * w.length(), "cyclically reduced square cancelled");
    SuspensionComplex c = SuspensionComplex::for_words(sys, SuspensionComplex::prefix_closure({w2}));
    TreePoint base = TreePoint::at_vertex(0);
    TreePoint p0 = c.locate(ReducedWord(), base);
    TreePoint p1 = c.locate(w, base);
    TreePoint p2 = c.locate(w2, base);
    Scalar d1 = c.host().distance(p0, p1);
    Scalar d2 = c.host().distance(p0, p2);
    Scalar len = d2 >= d1 ? d2 - d1 : Scalar(0);

    if (len.sign() > 0) {
        // first dead power exists: n <= diam(K)/||w|| + 1
        int n = 1;
        while (sys.is_admissible(w.pow(n))) {
            n++;
            Scalar bound = sys.whole().diameter(sys.tree()) / len + Scalar(2);
            if (Scalar(n) > bound) throw InternalError("hyperbolic word with all powers admissible");
        }
        ReducedWord wn = w.pow(n);
        SuspensionComplex cb = SuspensionComplex::for_words(sys, SuspensionComplex::prefix_closure({wn}));
        Bridge b = bridge(cb.host(), cb.copy_subtree(*cb.copy_index(ReducedWord())),
                          cb.copy_subtree(*cb.copy_index(wn)));
        auto x = cb.preimage(*cb.copy_index(ReducedWord()), b.from);
        internal_check(x.has_value(), "bridge endpoint outside the base copy");
        // verify the witness exactly: d(x, wx) = ||w||
        Scalar disp = c.host().distance(c.locate(ReducedWord(), *x), c.locate(w, *x));
        internal_check(disp == len, "axis witness displacement differs from ||w||");
        return TranslationResult{len, IsometryKind::Hyperbolic, *x, n};
    }

    ClosedSubtree d = sys.dom(w);
    internal_check(!d.empty(), "elliptic cyclically reduced word with empty domain");
    TreePoint x0 = d.any_point();
    auto x1 = sys.apply(x0, w);
    internal_check(x1.has_value(), "domain point with undefined image");
    Scalar half = sys.tree().distance(x0, *x1) / Scalar(2);
    TreePoint m = sys.tree().point_on_geodesic(x0, *x1, half);
    auto fixed = sys.apply(m, w);
    internal_check(fixed.has_value() && *fixed == m, "midpoint of [x, xw] is not fixed");
    return TranslationResult{Scalar(0), IsometryKind::Elliptic, m, 0};
}

// ---------------------------------------------------------------------------
// Restriction morphisms j : T_{K'} -> T_K
// ---------------------------------------------------------------------------

/*
 * For K' a closed subtree of K, the canonical equivariant morphism
 * j(u, x) = (u, x) between radius-R balls.  It restricts to the identity on
 * K' and is 1-Lipschitz.
 */
struct RestrictionMorphism {
    InducedSystem induced;
    SuspensionComplex small; // ball of T_{K'}
    SuspensionComplex big;   // ball of T_K

    TreePoint map(const TreePoint& p_small) const {
        for (int i = 0; i < small.copy_count(); ++i) {
            if (!small.copy_subtree(i).contains(small.host(), p_small)) continue;
            auto x = small.preimage(i, p_small);
            internal_check(x.has_value(), "morphism source outside its copy");
            TreePoint xbig = induced.to_big(big.system().tree(), *x);
            return big.locate(small.copy(i).word, xbig);
        }
        throw InputError("point outside the source ball");
    }
};

inline RestrictionMorphism restriction_morphism(const IsometrySystem& host_sys, const ClosedSubtree& sub,
                                                int radius, long long budget = 200000) {
    InducedSystem ind = induce(host_sys, sub);
    if (!ind.valid) {
        std::string names;
        for (const auto& n : ind.empty_generators) names += (names.empty() ? "" : ", ") + n;
        throw InputError("induced system undefined: empty generators " + names);
    }
    SuspensionComplex small = SuspensionComplex::ball(ind.sys, radius, budget);
    SuspensionComplex big = SuspensionComplex::ball(host_sys, radius, budget);
    return RestrictionMorphism{std::move(ind), std::move(small), std::move(big)};
}

} // namespace heartwood
