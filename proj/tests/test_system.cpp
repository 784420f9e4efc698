#include <catch2/catch_amalgamated.hpp>

#include <heartwood/system.hpp>
#include <heartwood/systems_io.hpp>

using namespace heartwood;

namespace {
TreePoint ipt(const IsometrySystem& s, const Scalar& c) { return s.tree().normalized(0, c); }
Scalar al() { return gold_alpha(); }
} // namespace

TEST_CASE("SYS-SHIFT pseudo-action") {
    auto sys = catalog_system("SYS-SHIFT").sys;
    auto ab = sys.alphabet();
    auto a2 = ReducedWord::parse(ab, "a.a");

    CHECK(*sys.apply(ipt(sys, Scalar(0)), a2) == ipt(sys, Scalar(2)));
    CHECK(*sys.apply(ipt(sys, Scalar(0)), ReducedWord()) == ipt(sys, Scalar(0)));
    CHECK_FALSE(sys.apply(ipt(sys, Scalar(2)), ReducedWord::parse(ab, "a")).has_value());

    SECTION("dom of powers shrinks to a point then dies") {
        CHECK(sys.dom(ReducedWord::parse(ab, "a")).diameter(sys.tree()) == Scalar(1));
        auto d2 = sys.dom(a2);
        CHECK(d2.is_point());
        CHECK(d2.any_point() == ipt(sys, Scalar(0)));
        CHECK_FALSE(sys.is_admissible(ReducedWord::parse(ab, "a.a.a")));
        CHECK(sys.is_admissible(ReducedWord()));
    }
    SECTION("dom(w^-1) = image(w), apply round trip") {
        auto a = ReducedWord::parse(ab, "a");
        CHECK(sys.dom(a.inverse()) == sys.image_subtree(a));
        auto x = ipt(sys, Scalar::rational(1, 2));
        auto y = *sys.apply(x, a);
        CHECK(*sys.apply(y, a.inverse()) == x);
    }
}

TEST_CASE("SYS-GOLD domains") {
    auto sys = catalog_system("SYS-GOLD").sys;
    auto ab = sys.alphabet();
    Scalar alpha = al();
    Scalar alpha2 = alpha * alpha;

    SECTION("generators match the golden IET") {
        CHECK(sys.dom(ReducedWord::parse(ab, "a")) ==
              ClosedSubtree::hull(sys.tree(), {ipt(sys, Scalar(0)), ipt(sys, alpha2)}));
        CHECK(sys.dom(ReducedWord::parse(ab, "b")) ==
              ClosedSubtree::hull(sys.tree(), {ipt(sys, alpha2), ipt(sys, Scalar(1))}));
        CHECK(*sys.apply(ipt(sys, Scalar(0)), ReducedWord::parse(ab, "a")) == ipt(sys, alpha));
        CHECK(*sys.apply(ipt(sys, Scalar(1)), ReducedWord::parse(ab, "b")) == ipt(sys, alpha));
    }
    SECTION("aa is dead, ab has the full dom(a)") {
        CHECK_FALSE(sys.is_admissible(ReducedWord::parse(ab, "a.a")));
        auto dab = sys.dom(ReducedWord::parse(ab, "a.b"));
        CHECK(dab == sys.dom(ReducedWord::parse(ab, "a")));
    }
    SECTION("distance example in Q(sqrt 5)") {
        // d(alpha^2, 1) = 1 - alpha^2 = alpha = (sqrt5 - 1)/2
        CHECK(sys.tree().distance(ipt(sys, alpha2), ipt(sys, Scalar(1))) == alpha);
    }
    SECTION("apply preserves distances where defined") {
        auto w = ReducedWord::parse(ab, "a.b");
        auto d = sys.dom(w);
        auto e = d.extremals();
        REQUIRE(e.size() == 2);
        auto i0 = *sys.apply(e[0], w);
        auto i1 = *sys.apply(e[1], w);
        CHECK(sys.tree().distance(i0, i1) == sys.tree().distance(e[0], e[1]));
    }
}

TEST_CASE("dom is monotone under prefixes and admissibility is subword closed") {
    for (const auto& name : {"SYS-SHIFT", "SYS-GOLD", "SYS-REFLECT"}) {
        auto sys = catalog_system(name).sys;
        auto ab = sys.alphabet();
        for (int n = 1; n <= 4; ++n)
            for (const auto& w : enumerate_reduced(ab, n)) {
                auto dw = sys.dom(w);
                for (int k = 0; k <= w.length(); ++k) {
                    auto dk = sys.dom(w.prefix(k));
                    if (!dw.empty()) CHECK(dw.subset_of(sys.tree(), dk));
                }
                if (sys.is_admissible(w)) {
                    for (int i = 0; i < w.length(); ++i)
                        for (int j = i + 1; j <= w.length(); ++j)
                            CHECK(sys.is_admissible(w.subword(i, j)));
                }
            }
    }
}

TEST_CASE("infinite domains") {
    SECTION("identity system stays alive with full domain") {
        auto sys = catalog_system("SYS-ID").sys;
        auto res = sys.infinite_dom(InfiniteWordGen::periodic(ReducedWord::single(1)), 10);
        CHECK(res.status == IsometrySystem::DomStatus::Alive);
        CHECK(res.diameter == Scalar(1));
    }
    SECTION("point system dies at index 2") {
        auto sys = catalog_system("SYS-POINT").sys;
        auto res = sys.infinite_dom(InfiniteWordGen::periodic(ReducedWord::single(1)), 5);
        CHECK(res.status == IsometrySystem::DomStatus::Dead);
        CHECK(res.first_dead == 2);
    }
    SECTION("gold fibonacci word shrinks to alpha^4 by depth 8") {
        auto sys = catalog_system("SYS-GOLD").sys;
        auto res = sys.infinite_dom(fib_gen(1, 2), 8);
        Scalar alpha = al();
        Scalar a4 = alpha * alpha * alpha * alpha;
        CHECK(res.status == IsometrySystem::DomStatus::Alive);
        CHECK(res.diameter <= a4);
        SECTION("diameters are non-increasing") {
            for (size_t i = 0; i + 1 < res.diameters.size(); ++i)
                CHECK(res.diameters[i] >= res.diameters[i + 1]);
        }
    }
}

TEST_CASE("independent generators probe") {
    SECTION("identity fails via the generator itself") {
        auto rep = catalog_system("SYS-ID").sys.independent_generators_probe(5);
        CHECK(rep.fails);
        CHECK(rep.certificate.length() >= 1);
    }
    SECTION("reflection fails via a^2") {
        auto sys = catalog_system("SYS-REFLECT").sys;
        auto rep = sys.independent_generators_probe(4);
        REQUIRE(rep.fails);
        CHECK(rep.certificate == ReducedWord::reduce({1, 1}));
        CHECK(rep.fixed_domain.diameter(sys.tree()) == Scalar(2));
    }
    SECTION("gold is undecided with shrinking diameters") {
        auto sys = catalog_system("SYS-GOLD").sys;
        auto rep = sys.independent_generators_probe(8);
        CHECK_FALSE(rep.fails);
        CHECK(rep.alive_at_depth > 0);
        Scalar alpha = al();
        CHECK(rep.max_diameter <= alpha * alpha); // depth-8 cylinders are small
    }
}

TEST_CASE("isometry validation rejects distance mismatches") {
    FiniteMetricTree t;
    t.add_vertex();
    t.add_vertex();
    t.add_edge(0, 1, Scalar(2));
    std::vector<std::tuple<std::string, std::vector<TreePoint>, std::vector<TreePoint>>> gens{
        {"a",
         {TreePoint::at_vertex(0), TreePoint::at_vertex(1)},
         {TreePoint::at_vertex(0), t.normalized(0, Scalar(1))}}};
    CHECK_THROWS_AS(IsometrySystem(t, gens), InputError);
}

TEST_CASE("induced system on a subtree") {
    auto sys = catalog_system("SYS-SHIFT").sys;
    auto k1 = ClosedSubtree::hull(sys.tree(), {ipt(sys, Scalar(0)), ipt(sys, Scalar(1))});
    auto ind = induce(sys, k1);
    REQUIRE(ind.valid);
    // induced dom(a) on [0,1] is the single point 0
    auto d = ind.sys.dom(ReducedWord::single(1));
    CHECK(d.is_point());
    CHECK(ind.to_big(sys.tree(), d.any_point()) == ipt(sys, Scalar(0)));

    SECTION("induce on the whole tree reproduces the generators") {
        auto whole = induce(sys, ClosedSubtree::whole(sys.tree()));
        REQUIRE(whole.valid);
        CHECK(whole.sys.dom(ReducedWord::single(1)).diameter(whole.sys.tree()) == Scalar(1));
    }
    SECTION("gold on [0, alpha^4] induces nothing") {
        auto gold = catalog_system("SYS-GOLD").sys;
        Scalar alpha = al();
        Scalar a4 = alpha * alpha * alpha * alpha;
        auto small = ClosedSubtree::hull(gold.tree(), {ipt(gold, Scalar(0)), ipt(gold, a4)});
        auto ind2 = induce(gold, small);
        CHECK_FALSE(ind2.valid);
        CHECK(ind2.empty_generators.size() == 2);
    }
}
