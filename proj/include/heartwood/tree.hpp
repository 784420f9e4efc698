#pragma once

#include <algorithm>
#include <atomic>
#include <optional>
#include <tuple>
#include <vector>

#include "errors.hpp"
#include "scalar.hpp"

namespace heartwood {

/*
 * A point of a finite metric tree: either a vertex, or a position strictly
 * inside an edge.  Canonical form is unique per geometric point: an offset of
 * 0 or of the full edge length is normalized to the corresponding vertex, so
 * operator== is geometric equality.  Ties in searches are broken by the
 * (kind, id, offset) order below.
 */
struct TreePoint {
    int vertex = -1;          // >= 0 iff vertex point
    int edge = -1;            // >= 0 iff interior edge point
    Scalar offset;            // distance from the edge's u endpoint

    static TreePoint at_vertex(int v) {
        TreePoint p;
        p.vertex = v;
        return p;
    }
    static TreePoint interior(int e, Scalar off) {
        TreePoint p;
        p.edge = e;
        p.offset = std::move(off);
        return p;
    }
    bool is_vertex() const { return vertex >= 0; }

    friend bool operator==(const TreePoint& p, const TreePoint& q) {
        if (p.is_vertex() != q.is_vertex()) return false;
        if (p.is_vertex()) return p.vertex == q.vertex;
        return p.edge == q.edge && p.offset == q.offset;
    }
    friend bool operator!=(const TreePoint& p, const TreePoint& q) { return !(p == q); }
    friend bool operator<(const TreePoint& p, const TreePoint& q) {
        if (p.is_vertex() != q.is_vertex()) return p.is_vertex();
        if (p.is_vertex()) return p.vertex < q.vertex;
        if (p.edge != q.edge) return p.edge < q.edge;
        return p.offset < q.offset;
    }
};

/*
 * Finite simplicial tree with positive exact edge lengths.  Vertices are
 * dense indices 0..V-1; edges carry stable ids, with split_edge retiring an
 * id and minting two new ones (so TreePoints referring to a split edge go
 * stale -- callers materialize points as vertices before mutating further).
 *
 * Distance queries go through a lazily rebuilt root/parent index:
 *   d(u, v) = rdist(u) + rdist(v) - 2 rdist(lca(u, v)).
 */
class FiniteMetricTree {
public:
    struct Edge {
        int u = -1, v = -1;
        Scalar len;
        bool alive = false;
    };

    FiniteMetricTree() : serial_(next_serial()++) {}

    int add_vertex() {
        dirty_ = true;
        vertex_count_++;
        return vertex_count_ - 1;
    }

    int add_edge(int u, int v, Scalar len) {
        check_vertex(u);
        check_vertex(v);
        if (u == v) throw InputError("tree edge endpoints must differ");
        if (len.sign() <= 0) throw InputError("tree edge length must be positive");
        dirty_ = true;
        edges_.push_back(Edge{u, v, std::move(len), true});
        return static_cast<int>(edges_.size()) - 1;
    }

    // Splits edge e at 0 < off < len(e); returns the new middle vertex.
    int split_edge(int e, const Scalar& off) {
        const Edge ed = edge(e);
        if (off.sign() <= 0 || off >= ed.len) throw InternalError("split offset outside edge interior");
        dirty_ = true;
        edges_[e].alive = false;
        int m = add_vertex();
        edges_.push_back(Edge{ed.u, m, off, true});
        edges_.push_back(Edge{m, ed.v, ed.len - off, true});
        return m;
    }

    int vertex_count() const { return vertex_count_; }
    int edge_slots() const { return static_cast<int>(edges_.size()); }
    bool edge_alive(int e) const { return e >= 0 && e < edge_slots() && edges_[e].alive; }
    const Edge& edge(int e) const {
        if (!edge_alive(e)) throw InputError("invalid edge reference");
        return edges_[e];
    }
    unsigned long serial() const { return serial_; }

    std::vector<int> alive_edges() const {
        std::vector<int> out;
        for (int e = 0; e < edge_slots(); ++e)
            if (edges_[e].alive) out.push_back(e);
        return out;
    }

    int degree(int v) const {
        check_vertex(v);
        int d = 0;
        for (const auto& ed : edges_)
            if (ed.alive && (ed.u == v || ed.v == v)) d++;
        return d;
    }

    std::vector<int> leaves() const {
        std::vector<int> out;
        if (vertex_count_ == 1) return {0};
        for (int v = 0; v < vertex_count_; ++v)
            if (degree(v) == 1) out.push_back(v);
        return out;
    }

    // Connected + acyclic + positive lengths (lengths enforced on insertion).
    void validate() const {
        if (vertex_count_ == 0) throw InputError("tree must have at least one vertex");
        int ne = 0;
        for (const auto& ed : edges_)
            if (ed.alive) ne++;
        if (ne != vertex_count_ - 1) throw InputError("tree must have exactly V-1 edges");
        build_index();
        for (int v = 0; v < vertex_count_; ++v)
            if (v != root_ && parent_[v] < 0) throw InputError("tree must be connected");
    }

    TreePoint normalized(int e, const Scalar& off) const {
        const Edge& ed = edge(e);
        if (off.sign() < 0 || off > ed.len) throw InputError("point offset outside edge");
        if (off.sign() == 0) return TreePoint::at_vertex(ed.u);
        if (off == ed.len) return TreePoint::at_vertex(ed.v);
        return TreePoint::interior(e, off);
    }

    void check_point(const TreePoint& p) const {
        if (p.is_vertex()) {
            check_vertex(p.vertex);
            return;
        }
        const Edge& ed = edge(p.edge);
        if (p.offset.sign() <= 0 || p.offset >= ed.len)
            throw InputError("edge point offset must be strictly interior");
    }

    Scalar distance(const TreePoint& p, const TreePoint& q) const {
        check_point(p);
        check_point(q);
        if (p == q) return Scalar(0);
        if (!p.is_vertex() && !q.is_vertex() && p.edge == q.edge) return (p.offset - q.offset).abs();
        // Unique tree path: the detour option through the wrong endpoint is
        // always strictly longer, so min over endpoint choices is exact.
        auto from = end_options(p);
        auto to = end_options(q);
        std::optional<Scalar> best;
        for (const auto& [u, du] : from)
            for (const auto& [v, dv] : to) {
                Scalar cand = du + vertex_distance(u, v) + dv;
                if (!best || cand < *best) best = cand;
            }
        return *best;
    }

    // The arc [p, q]: p, the vertices passed in order, then q.
    std::vector<TreePoint> geodesic(const TreePoint& p, const TreePoint& q) const {
        check_point(p);
        check_point(q);
        if (p == q) return {p};
        std::vector<TreePoint> arc{p};
        if (!p.is_vertex() && !q.is_vertex() && p.edge == q.edge) {
            arc.push_back(q);
            return arc;
        }
        const int exit = exit_vertex(p, q);
        const int entry = exit_vertex(q, p);
        std::vector<int> path = vertex_path(exit, entry);
        for (int v : path) {
            TreePoint tp = TreePoint::at_vertex(v);
            if (arc.back() != tp) arc.push_back(tp);
        }
        if (arc.back() != q) arc.push_back(q);
        return arc;
    }

    bool on_geodesic(const TreePoint& p, const TreePoint& mid, const TreePoint& q) const {
        return distance(p, mid) + distance(mid, q) == distance(p, q);
    }

    // The point of [p, q] at distance s from p (0 <= s <= d(p, q)).
    TreePoint point_on_geodesic(const TreePoint& p, const TreePoint& q, const Scalar& s) const {
        if (s.sign() < 0) throw InputError("negative arc position");
        if (s.sign() == 0) return p;
        std::vector<TreePoint> arc = geodesic(p, q);
        Scalar walked(0);
        for (size_t i = 0; i + 1 < arc.size(); ++i) {
            Scalar step = distance(arc[i], arc[i + 1]);
            if (walked + step >= s) {
                return between(arc[i], arc[i + 1], s - walked);
            }
            walked += step;
        }
        if (walked == s) return arc.back();
        throw InputError("arc position beyond d(p, q)");
    }

    // Tripod center: the unique point on all three of [p,q], [q,r], [p,r].
    // It sits on [p, q] at distance (d(p,q) + d(p,r) - d(q,r)) / 2 from p.
    TreePoint median(const TreePoint& p, const TreePoint& q, const TreePoint& r) const {
        Scalar gp = (distance(p, q) + distance(p, r) - distance(q, r)) / Scalar(2);
        return point_on_geodesic(p, q, gp);
    }

private:
    static std::atomic<unsigned long>& next_serial() {
        static std::atomic<unsigned long> counter{1};
        return counter;
    }

    void check_vertex(int v) const {
        if (v < 0 || v >= vertex_count_) throw InputError("invalid vertex reference");
    }

    // (endpoint vertex, distance from the point to it); one pair for vertices.
    std::vector<std::pair<int, Scalar>> end_options(const TreePoint& p) const {
        if (p.is_vertex()) return {{p.vertex, Scalar(0)}};
        const Edge& ed = edge(p.edge);
        return {{ed.u, p.offset}, {ed.v, ed.len - p.offset}};
    }

    // First vertex of the arc from p toward q (p != q, not the same-edge case).
    int exit_vertex(const TreePoint& p, const TreePoint& q) const {
        if (p.is_vertex()) return p.vertex;
        const Edge& ed = edge(p.edge);
        Scalar via_u = p.offset + raw_vertex_to_point(ed.u, q);
        Scalar via_v = (ed.len - p.offset) + raw_vertex_to_point(ed.v, q);
        return via_u <= via_v ? ed.u : ed.v;
    }

    Scalar raw_vertex_to_point(int u, const TreePoint& q) const {
        Scalar best(0);
        bool first = true;
        for (const auto& [v, dv] : end_options(q)) {
            Scalar cand = vertex_distance(u, v) + dv;
            if (first || cand < best) best = cand;
            first = false;
        }
        return best;
    }

    // Point at distance s from a toward b, where [a, b] has no vertex strictly
    // between (consecutive points of a geodesic arc).
    TreePoint between(const TreePoint& a, const TreePoint& b, const Scalar& s) const {
        if (s.sign() == 0) return a;
        if (s == distance(a, b)) return b;
        int e;
        if (!a.is_vertex()) e = a.edge;
        else if (!b.is_vertex()) e = b.edge;
        else e = find_edge(a.vertex, b.vertex);
        Scalar off_a = offset_on(e, a);
        Scalar off_b = offset_on(e, b);
        Scalar off = off_a <= off_b ? off_a + s : off_a - s;
        return normalized(e, off);
    }

    Scalar offset_on(int e, const TreePoint& p) const {
        if (!p.is_vertex()) {
            internal_check(p.edge == e, "arc step spans two edges");
            return p.offset;
        }
        if (edge(e).u == p.vertex) return Scalar(0);
        internal_check(edge(e).v == p.vertex, "arc step endpoint off its edge");
        return edge(e).len;
    }

    int find_edge(int u, int v) const {
        for (int e = 0; e < edge_slots(); ++e)
            if (edges_[e].alive && ((edges_[e].u == u && edges_[e].v == v) || (edges_[e].u == v && edges_[e].v == u)))
                return e;
        throw InternalError("adjacent vertices without an edge");
    }

    // Vertex sequence from u to v inclusive, via the lowest common ancestor.
    std::vector<int> vertex_path(int u, int v) const {
        build_index();
        std::vector<int> up, down;
        int a = u, b = v;
        while (depth_[a] > depth_[b]) {
            up.push_back(a);
            a = parent_[a];
        }
        while (depth_[b] > depth_[a]) {
            down.push_back(b);
            b = parent_[b];
        }
        while (a != b) {
            up.push_back(a);
            down.push_back(b);
            a = parent_[a];
            b = parent_[b];
            if (a < 0 || b < 0) throw InputError("tree is not connected");
        }
        up.push_back(a);
        up.insert(up.end(), down.rbegin(), down.rend());
        return up;
    }

    Scalar vertex_distance(int u, int v) const {
        if (u == v) return Scalar(0);
        build_index();
        Scalar du = rdist_[u], dv = rdist_[v];
        int a = u, b = v;
        while (depth_[a] > depth_[b]) a = parent_[a];
        while (depth_[b] > depth_[a]) b = parent_[b];
        while (a != b) {
            a = parent_[a];
            b = parent_[b];
            if (a < 0 || b < 0) throw InputError("tree is not connected");
        }
        return du + dv - Scalar(2) * rdist_[a];
    }

    void build_index() const {
        if (!dirty_) return;
        parent_.assign(vertex_count_, -1);
        depth_.assign(vertex_count_, 0);
        rdist_.assign(vertex_count_, Scalar(0));
        std::vector<std::vector<std::pair<int, int>>> adj(vertex_count_); // (other, edge)
        for (int e = 0; e < edge_slots(); ++e) {
            if (!edges_[e].alive) continue;
            adj[edges_[e].u].push_back({edges_[e].v, e});
            adj[edges_[e].v].push_back({edges_[e].u, e});
        }
        root_ = 0;
        std::vector<int> stack{root_};
        std::vector<char> seen(vertex_count_, 0);
        seen[root_] = 1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (auto [w, e] : adj[v]) {
                if (seen[w]) continue;
                seen[w] = 1;
                parent_[w] = v;
                depth_[w] = depth_[v] + 1;
                rdist_[w] = rdist_[v] + edges_[e].len;
                stack.push_back(w);
            }
        }
        dirty_ = false;
    }

    int vertex_count_ = 0;
    std::vector<Edge> edges_;
    unsigned long serial_;

    mutable bool dirty_ = true;
    mutable int root_ = 0;
    mutable std::vector<int> parent_, depth_;
    mutable std::vector<Scalar> rdist_;
};

/*
 * A closed subtree, stored as its minimal list of extremal points; the
 * subtree is the union of pairwise arcs between them.  The empty list is the
 * empty subtree.  Canonical: sorted, no listed point inside the hull of the
 * others.
 */
class ClosedSubtree {
public:
    ClosedSubtree() = default;

    static ClosedSubtree empty_set() { return ClosedSubtree(); }

    static ClosedSubtree hull(const FiniteMetricTree& t, std::vector<TreePoint> pts) {
        for (const auto& p : pts) t.check_point(p);
        std::sort(pts.begin(), pts.end());
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        // Removing a point that lies in the hull of the others never changes
        // the hull, so one pass in canonical order yields the minimal list.
        std::vector<TreePoint> kept;
        for (size_t i = 0; i < pts.size(); ++i) {
            std::vector<TreePoint> others = kept;
            others.insert(others.end(), pts.begin() + i + 1, pts.end());
            if (!raw_contains(t, others, pts[i])) kept.push_back(pts[i]);
        }
        ClosedSubtree s;
        s.ext_ = std::move(kept);
        s.serial_ = t.serial();
        return s;
    }

    static ClosedSubtree whole(const FiniteMetricTree& t) {
        std::vector<TreePoint> pts;
        for (int v : t.leaves()) pts.push_back(TreePoint::at_vertex(v));
        return hull(t, std::move(pts));
    }

    bool empty() const { return ext_.empty(); }
    bool is_point() const { return ext_.size() == 1; }
    const std::vector<TreePoint>& extremals() const { return ext_; }
    const TreePoint& any_point() const {
        if (empty()) throw InputError("empty subtree has no points");
        return ext_.front();
    }

    bool contains(const FiniteMetricTree& t, const TreePoint& p) const {
        check_tree(t);
        return raw_contains(t, ext_, p);
    }

    Scalar diameter(const FiniteMetricTree& t) const {
        check_tree(t);
        Scalar best(0);
        for (size_t i = 0; i < ext_.size(); ++i)
            for (size_t j = i + 1; j < ext_.size(); ++j) best = max(best, t.distance(ext_[i], ext_[j]));
        return best;
    }

    // Nearest point of the subtree; the projection onto a union of pairwise
    // arcs is the best of the per-arc medians.
    TreePoint project(const FiniteMetricTree& t, const TreePoint& p) const {
        check_tree(t);
        if (empty()) throw InputError("cannot project onto the empty subtree");
        TreePoint best = ext_.front();
        Scalar bd = t.distance(p, best);
        for (size_t i = 0; i < ext_.size(); ++i)
            for (size_t j = i; j < ext_.size(); ++j) {
                TreePoint m = (i == j) ? ext_[i] : t.median(ext_[i], ext_[j], p);
                Scalar d = t.distance(p, m);
                if (d < bd || (d == bd && m < best)) {
                    bd = d;
                    best = m;
                }
            }
        return best;
    }

    bool subset_of(const FiniteMetricTree& t, const ClosedSubtree& other) const {
        for (const auto& e : ext_)
            if (!other.contains(t, e)) return false;
        return true;
    }

    friend bool operator==(const ClosedSubtree& a, const ClosedSubtree& b) { return a.ext_ == b.ext_; }
    friend bool operator!=(const ClosedSubtree& a, const ClosedSubtree& b) { return !(a == b); }

    void check_tree(const FiniteMetricTree& t) const {
        if (!ext_.empty() && serial_ != 0 && serial_ != t.serial())
            throw InputError("subtree does not belong to this tree");
    }

private:
    static bool raw_contains(const FiniteMetricTree& t, const std::vector<TreePoint>& ext, const TreePoint& p) {
        if (ext.empty()) return false;
        if (ext.size() == 1) return ext.front() == p;
        for (size_t i = 0; i < ext.size(); ++i)
            for (size_t j = i + 1; j < ext.size(); ++j)
                if (t.on_geodesic(ext[i], p, ext[j])) return true;
        return false;
    }

    std::vector<TreePoint> ext_;
    unsigned long serial_ = 0;
};

/*
 * Intersection of two closed subtrees.  If the intersection is nonempty,
 * every leaf of it is the projection onto one subtree of an extremal point
 * of the other, so projecting all extremals both ways and keeping the points
 * that land in both spans the intersection.  An empty candidate set then
 * certifies empty intersection.
 */
inline ClosedSubtree subtree_intersection(const FiniteMetricTree& t, const ClosedSubtree& s1,
                                          const ClosedSubtree& s2) {
    s1.check_tree(t);
    s2.check_tree(t);
    if (s1.empty() || s2.empty()) return ClosedSubtree::empty_set();
    std::vector<TreePoint> cands;
    for (const auto& e : s1.extremals()) cands.push_back(s2.project(t, e));
    for (const auto& f : s2.extremals()) cands.push_back(s1.project(t, f));
    std::vector<TreePoint> in_both;
    for (const auto& c : cands)
        if (s1.contains(t, c) && s2.contains(t, c)) in_both.push_back(c);
    if (in_both.empty()) return ClosedSubtree::empty_set();
    return ClosedSubtree::hull(t, std::move(in_both));
}

struct Bridge {
    TreePoint from;  // in S1
    TreePoint to;    // in S2
    Scalar length;
    bool degenerate = false; // subtrees were not disjoint
};

// The unique segment [x, x'] joining S1 to S2; for non-disjoint inputs the
// degenerate bridge at a canonical common point, flagged.
inline Bridge bridge(const FiniteMetricTree& t, const ClosedSubtree& s1, const ClosedSubtree& s2) {
    if (s1.empty() || s2.empty()) throw InputError("bridge endpoints must be nonempty subtrees");
    ClosedSubtree common = subtree_intersection(t, s1, s2);
    if (!common.empty()) {
        TreePoint x = *std::min_element(common.extremals().begin(), common.extremals().end());
        return Bridge{x, x, Scalar(0), true};
    }
    TreePoint x2 = s2.project(t, s1.any_point());
    TreePoint x1 = s1.project(t, x2);
    TreePoint x2b = s2.project(t, x1);
    return Bridge{x1, x2b, t.distance(x1, x2b), false};
}

// Endpoint of the intersection of all arcs [Q, P_n]: the deepest point from
// Q common to the whole sequence of arcs.  This is the finite evaluation of
// the inferior limit from Q over the given list.
inline TreePoint liminf_from(const FiniteMetricTree& t, const TreePoint& q, const std::vector<TreePoint>& seq) {
    if (seq.empty()) throw InputError("liminf needs a nonempty sequence");
    TreePoint y = seq.front();
    for (size_t i = 1; i < seq.size(); ++i) y = t.median(q, y, seq[i]);
    return y;
}

} // namespace heartwood
