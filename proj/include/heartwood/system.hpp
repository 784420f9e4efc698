#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "scalar.hpp"
#include "tree.hpp"
#include "words.hpp"

namespace heartwood {

/*
 * A partial isometry of the tree K, specified by the canonical extremal
 * points of its domain together with their images.  Matching pairwise
 * distances force a unique isometry on the convex hull, so this is minimal
 * checkable data.
 */
struct PartialIsometry {
    std::string name;
    std::vector<TreePoint> dom_ext;
    std::vector<TreePoint> img_ext;
    ClosedSubtree domain;
    ClosedSubtree image;
};

/*
 * A system of isometries (K, A): a finite metric tree plus named nonempty
 * partial isometries.  Words act as the right pseudo-action x(uv) = (xu)v;
 * dom(w) is computed by pulling the domain constraint back letter by letter,
 * which realizes dom(w) as the intersection of the prefix translates of K.
 */
class IsometrySystem {
public:
    IsometrySystem() = default;

    IsometrySystem(FiniteMetricTree tree,
                   std::vector<std::tuple<std::string, std::vector<TreePoint>, std::vector<TreePoint>>> gens)
        : tree_(std::move(tree)) {
        tree_.validate();
        whole_ = ClosedSubtree::whole(tree_);
        std::vector<std::string> names;
        for (auto& [name, dom_pts, img_pts] : gens) {
            names.push_back(name);
            gens_.push_back(make_isometry(name, dom_pts, img_pts));
        }
        alphabet_ = Alphabet(std::move(names));
    }

    const FiniteMetricTree& tree() const { return tree_; }
    const Alphabet& alphabet() const { return alphabet_; }
    const ClosedSubtree& whole() const { return whole_; }
    int generator_count() const { return static_cast<int>(gens_.size()); }
    const PartialIsometry& generator(int i) const { return gens_.at(static_cast<size_t>(i)); }

    const ClosedSubtree& letter_domain(int z) const {
        const PartialIsometry& g = gens_.at(static_cast<size_t>((z < 0 ? -z : z) - 1));
        return z > 0 ? g.domain : g.image;
    }
    const ClosedSubtree& letter_image(int z) const { return letter_domain(-z); }

    // Right pseudo-action of a single letter; nullopt = point outside dom(z).
    std::optional<TreePoint> apply_letter(const TreePoint& p, int z) const {
        tree_.check_point(p);
        if (!alphabet_.valid_letter(z)) throw InputError("letter code out of range");
        const PartialIsometry& g = gens_[static_cast<size_t>((z < 0 ? -z : z) - 1)];
        const auto& from = z > 0 ? g.dom_ext : g.img_ext;
        const auto& to = z > 0 ? g.img_ext : g.dom_ext;
        for (size_t i = 0; i < from.size(); ++i)
            for (size_t j = i; j < from.size(); ++j) {
                if (!tree_.on_geodesic(from[i], p, from[j])) continue;
                return tree_.point_on_geodesic(to[i], to[j], tree_.distance(from[i], p));
            }
        return std::nullopt;
    }

    // x . w, or nullopt when x is outside dom(w).
    std::optional<TreePoint> apply(const TreePoint& p, const ReducedWord& w) const {
        tree_.check_point(p);
        TreePoint cur = p;
        for (int z : w.letters()) {
            auto nxt = apply_letter(cur, z);
            if (!nxt) return std::nullopt;
            cur = *nxt;
        }
        return cur;
    }

    // Image of a subtree S contained in dom(z); isometries map hulls to hulls.
    ClosedSubtree apply_letter_subtree(const ClosedSubtree& s, int z) const {
        if (s.empty()) return s;
        std::vector<TreePoint> imgs;
        for (const auto& e : s.extremals()) {
            auto img = apply_letter(e, z);
            if (!img) throw InternalError("subtree escapes the domain of a letter");
            imgs.push_back(*img);
        }
        return ClosedSubtree::hull(tree_, std::move(imgs));
    }

    ClosedSubtree apply_subtree(const ClosedSubtree& s, const ReducedWord& w) const {
        ClosedSubtree cur = s;
        for (int z : w.letters()) cur = apply_letter_subtree(cur, z);
        return cur;
    }

    // dom(w), backward pullback: dom(z . rest) = (image(z) cap dom(rest)) . z^-1.
    ClosedSubtree dom(const ReducedWord& w) const {
        ClosedSubtree d = whole_;
        for (int i = w.length() - 1; i >= 0; --i) {
            int z = w.letter(i);
            ClosedSubtree g = subtree_intersection(tree_, letter_image(z), d);
            if (g.empty()) return ClosedSubtree::empty_set();
            d = apply_letter_subtree(g, -z);
        }
        return d;
    }

    ClosedSubtree image_subtree(const ReducedWord& w) const { return dom(w.inverse()); }

    bool is_admissible(const ReducedWord& w) const { return !dom(w).empty(); }

    // Forward state F(w) = dom(w) . w; F(wz) = (F(w) cap dom(z)) . z.
    // Nonempty F is exactly admissibility, and the step is O(1) subtree ops,
    // which makes word-tree searches cheap.
    ClosedSubtree forward_step(const ClosedSubtree& f, int z) const {
        ClosedSubtree g = subtree_intersection(tree_, f, letter_domain(z));
        if (g.empty()) return g;
        return apply_letter_subtree(g, z);
    }

    enum class DomStatus { Alive, Dead };

    struct InfiniteDomResult {
        DomStatus status = DomStatus::Alive;
        int first_dead = -1;     // prefix length at which dom became empty
        ClosedSubtree domain;    // dom(prefix(n)) when alive
        Scalar diameter;
        std::vector<Scalar> diameters; // per prefix length 1..n while alive
    };

    InfiniteDomResult infinite_dom(const InfiniteWordGen& x, int n) const {
        if (n < 1) throw InputError("infinite_dom needs n >= 1");
        InfiniteDomResult res;
        for (int k = 1; k <= n; ++k) {
            ClosedSubtree d = dom(x.prefix(k));
            if (d.empty()) {
                res.status = DomStatus::Dead;
                res.first_dead = k;
                res.domain = ClosedSubtree::empty_set();
                res.diameter = Scalar(0);
                return res;
            }
            res.diameters.push_back(d.diameter(tree_));
            if (k == n) res.domain = d;
        }
        res.diameter = res.domain.diameter(tree_);
        return res;
    }

    struct ProbeReport {
        bool fails = false;
        ReducedWord certificate;       // nontrivial admissible word fixing its domain
        ClosedSubtree fixed_domain;    // that domain (diameter > 0)
        Scalar max_diameter;           // over alive words of length == depth
        long long alive_at_depth = 0;
        bool truncated = false;        // width cap hit
    };

    /*
     * Enumerates admissible words to `depth`.  A nontrivial admissible word
     * whose positive-diameter domain is fixed pointwise certifies that
     * independent generators FAILS; otherwise the report is UNDECIDED and
     * carries the worst domain diameter among survivors at full depth.
     */
    ProbeReport independent_generators_probe(int depth, long long width = 100000) const {
        if (depth < 1) throw InputError("probe depth must be >= 1");
        ProbeReport rep;
        rep.max_diameter = Scalar(0);
        struct Frame {
            ReducedWord w;
            ClosedSubtree f;
        };
        std::vector<Frame> stack{{ReducedWord(), whole_}};
        while (!stack.empty()) {
            Frame fr = std::move(stack.back());
            stack.pop_back();
            if (!fr.w.empty()) {
                ClosedSubtree d = dom(fr.w);
                internal_check(!d.empty(), "alive forward state with empty domain");
                if (!rep.fails && d.diameter(tree_).sign() > 0 && fixes_pointwise(fr.w, d)) {
                    rep.fails = true;
                    rep.certificate = fr.w;
                    rep.fixed_domain = d;
                }
                if (fr.w.length() == depth) {
                    if (rep.alive_at_depth < width) {
                        rep.alive_at_depth++;
                        rep.max_diameter = max(rep.max_diameter, d.diameter(tree_));
                    } else {
                        rep.truncated = true;
                    }
                    continue;
                }
            }
            if (fr.w.length() == depth) continue;
            auto order = alphabet_.letters_in_order();
            for (auto it = order.rbegin(); it != order.rend(); ++it) {
                int z = *it;
                if (!fr.w.empty() && fr.w.last() == -z) continue;
                ClosedSubtree f2 = forward_step(fr.f, z);
                if (f2.empty()) continue;
                stack.push_back({fr.w * ReducedWord::single(z), std::move(f2)});
            }
        }
        return rep;
    }

    bool fixes_pointwise(const ReducedWord& w, const ClosedSubtree& d) const {
        for (const auto& e : d.extremals()) {
            auto img = apply(e, w);
            if (!img || *img != e) return false;
        }
        return true;
    }

private:
    PartialIsometry make_isometry(const std::string& name, const std::vector<TreePoint>& dom_pts,
                                  const std::vector<TreePoint>& img_pts) {
        if (dom_pts.empty()) throw InputError("partial isometry '" + name + "' must be non-empty");
        if (dom_pts.size() != img_pts.size())
            throw InputError("partial isometry '" + name + "': domain/image point counts differ");
        for (const auto& p : dom_pts) tree_.check_point(p);
        for (const auto& p : img_pts) tree_.check_point(p);
        for (size_t i = 0; i < dom_pts.size(); ++i)
            for (size_t j = i + 1; j < dom_pts.size(); ++j)
                if (tree_.distance(dom_pts[i], dom_pts[j]) != tree_.distance(img_pts[i], img_pts[j]))
                    throw InputError("ISOMETRY_VIOLATION in '" + name + "': extremal pair (" +
                                     std::to_string(i) + "," + std::to_string(j) +
                                     ") changes distance");
        PartialIsometry iso;
        iso.name = name;
        iso.domain = ClosedSubtree::hull(tree_, dom_pts);
        // Canonicalization keeps a subset of the input points; keep images aligned.
        for (const auto& e : iso.domain.extremals()) {
            size_t idx = 0;
            while (idx < dom_pts.size() && !(dom_pts[idx] == e)) idx++;
            internal_check(idx < dom_pts.size(), "hull extremal not among input points");
            iso.dom_ext.push_back(dom_pts[idx]);
            iso.img_ext.push_back(img_pts[idx]);
        }
        iso.image = ClosedSubtree::hull(tree_, iso.img_ext);
        internal_check(iso.image.extremals().size() == iso.dom_ext.size(),
                       "image extremal list not in bijection with domain");
        return iso;
    }

    FiniteMetricTree tree_;
    ClosedSubtree whole_;
    std::vector<PartialIsometry> gens_;
    Alphabet alphabet_;
};

/*
 * The system induced on a closed subtree K' of K: each generator restricts
 * to {x in K' : x in dom(a), xa in K'}.  The subtree is materialized as a
 * standalone tree whose vertices are the extremal points and branch points
 * of K', with exact coordinate maps in both directions.
 */
struct InducedSystem {
    bool valid = false;
    std::vector<std::string> empty_generators;
    IsometrySystem sys; // meaningful only when valid
    FiniteMetricTree skeleton;
    std::vector<TreePoint> vertex_to_big;
    std::vector<std::pair<int, int>> edge_endpoints; // small edge -> small vertex pair

    TreePoint to_big(const FiniteMetricTree& big, const TreePoint& small_pt) const {
        if (small_pt.is_vertex()) return vertex_to_big.at(static_cast<size_t>(small_pt.vertex));
        auto [a, b] = edge_endpoints.at(static_cast<size_t>(small_pt.edge));
        return big.point_on_geodesic(vertex_to_big[static_cast<size_t>(a)],
                                     vertex_to_big[static_cast<size_t>(b)], small_pt.offset);
    }

    std::optional<TreePoint> to_small(const FiniteMetricTree& big, const TreePoint& big_pt) const {
        for (size_t v = 0; v < vertex_to_big.size(); ++v)
            if (vertex_to_big[v] == big_pt) return TreePoint::at_vertex(static_cast<int>(v));
        for (size_t e = 0; e < edge_endpoints.size(); ++e) {
            auto [a, b] = edge_endpoints[e];
            const TreePoint& ba = vertex_to_big[static_cast<size_t>(a)];
            const TreePoint& bb = vertex_to_big[static_cast<size_t>(b)];
            if (big.on_geodesic(ba, big_pt, bb))
                return skeleton.normalized(static_cast<int>(e), big.distance(ba, big_pt));
        }
        return std::nullopt;
    }
};

inline InducedSystem induce(const IsometrySystem& host, const ClosedSubtree& sub) {
    if (sub.empty()) throw InputError("cannot induce a system on the empty subtree");
    const FiniteMetricTree& big = host.tree();
    sub.check_tree(big);

    // Vertex set: extremal points plus medians of extremal triples (the
    // branch points of the hull), connected by betweenness.
    std::vector<TreePoint> nodes = sub.extremals();
    const auto& ext = sub.extremals();
    for (size_t i = 0; i < ext.size(); ++i)
        for (size_t j = i + 1; j < ext.size(); ++j)
            for (size_t k = j + 1; k < ext.size(); ++k) nodes.push_back(big.median(ext[i], ext[j], ext[k]));
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    InducedSystem out;
    FiniteMetricTree small;
    for (size_t i = 0; i < nodes.size(); ++i) small.add_vertex();
    out.vertex_to_big = nodes;
    for (size_t i = 0; i < nodes.size(); ++i)
        for (size_t j = i + 1; j < nodes.size(); ++j) {
            bool adjacent = true;
            for (size_t k = 0; k < nodes.size() && adjacent; ++k) {
                if (k == i || k == j) continue;
                if (big.on_geodesic(nodes[i], nodes[k], nodes[j])) adjacent = false;
            }
            if (!adjacent) continue;
            small.add_edge(static_cast<int>(i), static_cast<int>(j), big.distance(nodes[i], nodes[j]));
            out.edge_endpoints.push_back({static_cast<int>(i), static_cast<int>(j)});
        }
    out.skeleton = small;

    // Induced generator: x in K' with x in dom(a) and xa in K'.
    std::vector<std::tuple<std::string, std::vector<TreePoint>, std::vector<TreePoint>>> gens;
    bool all_nonempty = true;
    for (int gi = 0; gi < host.generator_count(); ++gi) {
        int z = gi + 1;
        ClosedSubtree t1 = subtree_intersection(big, host.letter_domain(z), sub);
        ClosedSubtree d_big = ClosedSubtree::empty_set();
        if (!t1.empty()) {
            ClosedSubtree u = host.apply_letter_subtree(t1, z);
            ClosedSubtree u2 = subtree_intersection(big, u, sub);
            if (!u2.empty()) d_big = host.apply_letter_subtree(u2, -z);
        }
        if (d_big.empty()) {
            all_nonempty = false;
            out.empty_generators.push_back(host.generator(gi).name);
            continue;
        }
        std::vector<TreePoint> dom_small, img_small;
        for (const auto& e : d_big.extremals()) {
            auto ds = out.to_small(big, e);
            auto img_big = host.apply_letter(e, z);
            internal_check(ds.has_value() && img_big.has_value(), "induced domain escapes the subtree");
            auto is = out.to_small(big, *img_big);
            internal_check(is.has_value(), "induced image escapes the subtree");
            dom_small.push_back(*ds);
            img_small.push_back(*is);
        }
        gens.push_back({host.generator(gi).name, dom_small, img_small});
    }
    out.valid = all_nonempty;
    if (all_nonempty) out.sys = IsometrySystem(out.skeleton, gens);
    return out;
}

} // namespace heartwood
