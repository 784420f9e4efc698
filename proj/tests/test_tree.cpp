#include <catch2/catch_amalgamated.hpp>

#include <random>

#include <heartwood/tree.hpp>

using namespace heartwood;

namespace {

// [0, 2] as a single edge.
FiniteMetricTree segment2() {
    FiniteMetricTree t;
    t.add_vertex();
    t.add_vertex();
    t.add_edge(0, 1, Scalar(2));
    return t;
}

// Center vertex 0, legs of length 1 to leaves 1, 2, 3.
FiniteMetricTree tripod() {
    FiniteMetricTree t;
    for (int i = 0; i < 4; ++i) t.add_vertex();
    for (int leaf = 1; leaf <= 3; ++leaf) t.add_edge(0, leaf, Scalar(1));
    return t;
}

TreePoint seg_pt(const FiniteMetricTree& t, const Scalar& c) { return t.normalized(0, c); }

} // namespace

TEST_CASE("segment distances and geodesics") {
    auto t = segment2();
    CHECK(t.distance(TreePoint::at_vertex(0), TreePoint::at_vertex(1)) == Scalar(2));
    auto p = seg_pt(t, Scalar::rational(1, 3));
    auto q = seg_pt(t, Scalar::rational(5, 3));
    CHECK(t.distance(p, q) == Scalar::rational(4, 3));
    auto arc = t.geodesic(p, q);
    CHECK(arc.front() == p);
    CHECK(arc.back() == q);
    Scalar len(0);
    for (size_t i = 0; i + 1 < arc.size(); ++i) len += t.distance(arc[i], arc[i + 1]);
    CHECK(len == Scalar::rational(4, 3));
    CHECK(t.geodesic(p, p) == std::vector<TreePoint>{p});
}

TEST_CASE("point canonical form") {
    auto t = segment2();
    CHECK(t.normalized(0, Scalar(0)) == TreePoint::at_vertex(0));
    CHECK(t.normalized(0, Scalar(2)) == TreePoint::at_vertex(1));
    CHECK_FALSE(t.normalized(0, Scalar(1)).is_vertex());
    CHECK_THROWS_AS(t.normalized(0, Scalar(3)), InputError);
    CHECK_THROWS_AS(t.distance(TreePoint::at_vertex(7), TreePoint::at_vertex(0)), InputError);
}

TEST_CASE("tripod distances, medians, liminf") {
    auto t = tripod();
    auto l1 = TreePoint::at_vertex(1), l2 = TreePoint::at_vertex(2), l3 = TreePoint::at_vertex(3);
    auto c = TreePoint::at_vertex(0);
    CHECK(t.distance(l1, l2) == Scalar(2));
    CHECK(t.median(l1, l2, l3) == c);
    CHECK(t.median(l2, l3, l1) == c);
    CHECK(t.median(l1, l1, l3) == l1);
    auto arc = t.geodesic(l1, l2);
    REQUIRE(arc.size() == 3);
    CHECK(arc[1] == c);

    SECTION("liminf over cycling legs is the center") {
        // 5-pod would need two more legs; the tripod version captures the same effect
        CHECK(liminf_from(t, l1, {l2, l3, l2, l3}) == c);
        CHECK(liminf_from(t, l1, {l2, l2, l2}) == l2);
    }
    SECTION("liminf on a segment") {
        auto s = segment2();
        CHECK(liminf_from(s, TreePoint::at_vertex(0),
                          {seg_pt(s, Scalar(2)), seg_pt(s, Scalar(1)), seg_pt(s, Scalar(2)),
                           seg_pt(s, Scalar(1))}) == seg_pt(s, Scalar(1)));
    }
}

TEST_CASE("median via Gromov product agrees with betweenness") {
    auto t = segment2();
    auto m = t.median(seg_pt(t, Scalar(0)), seg_pt(t, Scalar(1)), seg_pt(t, Scalar(2)));
    CHECK(m == t.normalized(0, Scalar(1)));
}

TEST_CASE("convex hull canonicalization") {
    auto t = segment2();
    auto h = ClosedSubtree::hull(t, {seg_pt(t, Scalar::rational(1, 2)), seg_pt(t, Scalar::rational(3, 2)),
                                     seg_pt(t, Scalar(1))});
    REQUIRE(h.extremals().size() == 2);
    CHECK(h.contains(t, seg_pt(t, Scalar(1))));
    CHECK_FALSE(h.contains(t, seg_pt(t, Scalar::rational(1, 4))));
    CHECK(h.diameter(t) == Scalar(1));

    auto single = ClosedSubtree::hull(t, {seg_pt(t, Scalar(1))});
    CHECK(single.is_point());

    auto tri = tripod();
    auto whole = ClosedSubtree::hull(
        tri, {TreePoint::at_vertex(1), TreePoint::at_vertex(2), TreePoint::at_vertex(3)});
    CHECK(whole.contains(tri, TreePoint::at_vertex(0)));
    CHECK(whole == ClosedSubtree::whole(tri));

    SECTION("hull is idempotent and monotone") {
        auto again = ClosedSubtree::hull(t, h.extremals());
        CHECK(again == h);
        auto bigger = ClosedSubtree::hull(t, {seg_pt(t, Scalar::rational(1, 4)), seg_pt(t, Scalar::rational(3, 2))});
        for (const auto& e : h.extremals()) CHECK(bigger.contains(t, e) == (e.offset >= Scalar::rational(1, 4)));
    }
}

TEST_CASE("subtree intersection") {
    auto t = segment2();
    auto s01 = ClosedSubtree::hull(t, {seg_pt(t, Scalar(0)), seg_pt(t, Scalar(1))});
    auto s12 = ClosedSubtree::hull(t, {seg_pt(t, Scalar(1)), seg_pt(t, Scalar(2))});
    auto inter = subtree_intersection(t, s01, s12);
    CHECK(inter.is_point());
    CHECK(inter.any_point() == seg_pt(t, Scalar(1)));
    CHECK(subtree_intersection(t, s01, s01) == s01);

    auto tri = tripod();
    auto a1 = ClosedSubtree::hull(tri, {TreePoint::at_vertex(1), TreePoint::at_vertex(0)});
    auto a23 = ClosedSubtree::hull(tri, {TreePoint::at_vertex(2), TreePoint::at_vertex(3)});
    auto c = subtree_intersection(tri, a1, a23);
    CHECK(c.is_point());
    CHECK(c.any_point() == TreePoint::at_vertex(0));

    auto far1 = ClosedSubtree::hull(t, {seg_pt(t, Scalar(0)), seg_pt(t, Scalar::rational(1, 2))});
    auto far2 = ClosedSubtree::hull(t, {seg_pt(t, Scalar(1)), seg_pt(t, Scalar(2))});
    CHECK(subtree_intersection(t, far1, far2).empty());
}

TEST_CASE("bridge between subtrees") {
    FiniteMetricTree t;
    t.add_vertex();
    t.add_vertex();
    t.add_edge(0, 1, Scalar(3));
    auto pt = [&](long num, long den = 1) { return t.normalized(0, Scalar::rational(num, den)); };
    auto s1 = ClosedSubtree::hull(t, {pt(0), pt(1)});
    auto s2 = ClosedSubtree::hull(t, {pt(2), pt(3)});
    auto b = bridge(t, s1, s2);
    CHECK_FALSE(b.degenerate);
    CHECK(b.length == Scalar(1));
    CHECK(b.from == pt(1));
    CHECK(b.to == pt(2));

    SECTION("touching subtrees give the degenerate flagged bridge") {
        auto s3 = ClosedSubtree::hull(t, {pt(1), pt(2)});
        auto d = bridge(t, s1, s3);
        CHECK(d.degenerate);
        CHECK(d.length == Scalar(0));
        CHECK(d.from == pt(1));
    }
    SECTION("tripod leaves bridge through the center") {
        auto tri = tripod();
        auto b2 = bridge(tri, ClosedSubtree::hull(tri, {TreePoint::at_vertex(1)}),
                         ClosedSubtree::hull(tri, {TreePoint::at_vertex(2)}));
        CHECK(b2.length == Scalar(2));
    }
}

TEST_CASE("projection minimizes distance (brute check on a fine grid)") {
    auto t = segment2();
    auto s = ClosedSubtree::hull(t, {seg_pt(t, Scalar::rational(1, 2)), seg_pt(t, Scalar(1))});
    auto p = seg_pt(t, Scalar::rational(7, 4));
    auto pr = s.project(t, p);
    CHECK(pr == seg_pt(t, Scalar(1)));
    for (int i = 0; i <= 16; ++i) {
        auto grid = t.normalized(0, Scalar::rational(i, 8));
        if (s.contains(t, grid)) CHECK(t.distance(p, pr) <= t.distance(p, grid));
    }
}

TEST_CASE("four point condition holds on random trees") {
    std::mt19937_64 rng(20240517);
    for (int trial = 0; trial < 20; ++trial) {
        FiniteMetricTree t;
        t.add_vertex();
        int n = 2 + static_cast<int>(rng() % 10);
        for (int v = 1; v < n; ++v) {
            t.add_vertex();
            int parent = static_cast<int>(rng() % static_cast<unsigned long>(v));
            t.add_edge(parent, v, Scalar::rational(1 + static_cast<long>(rng() % 7), 1 + static_cast<long>(rng() % 5)));
        }
        t.validate();
        std::vector<TreePoint> pts;
        for (int v = 0; v < n; ++v) pts.push_back(TreePoint::at_vertex(v));
        for (int rep = 0; rep < 40; ++rep) {
            auto pick = [&] { return pts[rng() % pts.size()]; };
            TreePoint p = pick(), q = pick(), r = pick(), s = pick();
            Scalar d1 = t.distance(p, q) + t.distance(r, s);
            Scalar d2 = t.distance(p, r) + t.distance(q, s);
            Scalar d3 = t.distance(p, s) + t.distance(q, r);
            Scalar m1 = max(d1, max(d2, d3));
            // two largest must be equal
            int at_max = (d1 == m1) + (d2 == m1) + (d3 == m1);
            CHECK(at_max >= 2);
        }
    }
}

TEST_CASE("betweenness characterizes geodesics") {
    auto t = tripod();
    auto l1 = TreePoint::at_vertex(1), l2 = TreePoint::at_vertex(2);
    auto c = TreePoint::at_vertex(0);
    CHECK(t.on_geodesic(l1, c, l2));
    CHECK_FALSE(t.on_geodesic(l1, TreePoint::at_vertex(3), l2));
    CHECK(t.point_on_geodesic(l1, l2, Scalar(1)) == c);
    // 3/2 from l1 lands halfway down the leg to l2, which is edge 1 = (0, 2)
    CHECK(t.point_on_geodesic(l1, l2, Scalar::rational(3, 2)) == t.normalized(1, Scalar::rational(1, 2)));
}

TEST_CASE("split edge keeps the metric") {
    auto t = segment2();
    int m = t.split_edge(0, Scalar::rational(1, 2));
    t.validate();
    CHECK(t.distance(TreePoint::at_vertex(0), TreePoint::at_vertex(m)) == Scalar::rational(1, 2));
    CHECK(t.distance(TreePoint::at_vertex(0), TreePoint::at_vertex(1)) == Scalar(2));
    CHECK(t.degree(m) == 2);
}
