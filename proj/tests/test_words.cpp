#include <catch2/catch_amalgamated.hpp>

#include <set>

#include <heartwood/words.hpp>

using namespace heartwood;

TEST_CASE("free reduction") {
    auto ab = Alphabet::standard(2);
    CHECK(ReducedWord::reduce({1, 2, -2}) == ReducedWord::reduce({1}));
    CHECK(ReducedWord::reduce({}) == ReducedWord());
    CHECK(ReducedWord::reduce({1, -1, 1}) == ReducedWord::single(1));
    // idempotent
    auto w = ReducedWord::reduce({1, 2, -2, -1, 2});
    CHECK(ReducedWord::reduce(w.letters()) == w);
    // |uv| <= |u| + |v|
    auto u = ReducedWord::parse(ab, "a.b");
    auto v = ReducedWord::parse(ab, "B.a");
    CHECK((u * v).length() == 2);
    CHECK((u * u).length() == 4);
    CHECK_THROWS_AS(ReducedWord::reduce({0}), InputError);
}

TEST_CASE("word parsing and formatting") {
    auto ab = Alphabet::standard(2);
    auto w = ReducedWord::parse(ab, "a.b.A.B");
    CHECK(w.length() == 4);
    CHECK(w.str(ab) == "a.b.A.B");
    CHECK(ReducedWord::parse(ab, "1").empty());
    CHECK(ReducedWord().str(ab) == "1");
    CHECK_THROWS_AS(ReducedWord::parse(ab, "a.x"), InputError);
    CHECK_THROWS_AS(ReducedWord::parse(ab, "a.A"), InputError); // not reduced
    CHECK(w.inverse().str(ab) == "b.a.B.A");
}

TEST_CASE("enumeration counts 2N(2N-1)^(n-1) and is lexicographic") {
    auto ab2 = Alphabet::standard(2);
    CHECK(enumerate_reduced(ab2, 1).size() == 4);
    CHECK(enumerate_reduced(ab2, 2).size() == 12);
    CHECK(enumerate_reduced(ab2, 3).size() == 36);
    auto ab1 = Alphabet::standard(1);
    auto cube = enumerate_reduced(ab1, 3);
    REQUIRE(cube.size() == 2);
    CHECK(cube[0].str(ab1) == "a.a.a");
    CHECK(cube[1].str(ab1) == "A.A.A");
    CHECK(enumerate_reduced(ab2, 0).size() == 1);

    SECTION("lexicographic order") {
        auto words = enumerate_reduced(ab2, 2);
        for (size_t i = 0; i + 1 < words.size(); ++i)
            CHECK(word_order_less(ab2, words[i], words[i + 1]));
        CHECK(words.front().str(ab2) == "a.a");
    }

    SECTION("shards partition the enumeration and restart") {
        std::set<std::vector<int>> whole;
        for (const auto& w : enumerate_reduced(ab2, 3)) whole.insert(w.letters());
        std::set<std::vector<int>> sharded;
        for (int z : ab2.letters_in_order()) {
            ReducedWordStream st(ab2, 3, z);
            while (auto w = st.next()) sharded.insert(w->letters());
            st.restart();
            auto again = st.next();
            REQUIRE(again.has_value());
            CHECK(again->first() == z);
        }
        CHECK(whole == sharded);
    }
}

TEST_CASE("cyclic reduction") {
    auto ab = Alphabet::standard(2);
    auto [u1, c1] = ReducedWord::parse(ab, "a.b.A").cyclic_reduce();
    CHECK(u1.str(ab) == "a");
    CHECK(c1.str(ab) == "b");
    auto [u2, c2] = ReducedWord::parse(ab, "a.b").cyclic_reduce();
    CHECK(u2.empty());
    CHECK(c2.str(ab) == "a.b");
    auto [u3, c3] = ReducedWord::parse(ab, "a.b.b.A").cyclic_reduce();
    CHECK(u3.str(ab) == "a");
    CHECK(c3.str(ab) == "b.b");
    CHECK(c3.is_cyclically_reduced());

    SECTION("core is cyclically reduced and |w| = 2|u| + |c| for all short words") {
        for (int n = 0; n <= 6; ++n)
            for (const auto& w : enumerate_reduced(ab, n)) {
                auto [u, c] = w.cyclic_reduce();
                CHECK(c.is_cyclically_reduced());
                CHECK(w.length() == 2 * u.length() + c.length());
                CHECK(u * c * u.inverse() == w);
            }
    }
}

TEST_CASE("chop") {
    auto ab = Alphabet::standard(2);
    auto v = ReducedWord::parse(ab, "a.b.a.b");
    CHECK(v.chop(1).str(ab) == "b.a");
    CHECK(v.chop(0) == v);
    CHECK(ReducedWord::parse(ab, "a.b.b.a").chop(2).empty());
    CHECK_THROWS_AS(v.chop(3), InputError);
}

TEST_CASE("fibonacci substitution generator") {
    auto g = fib_gen(1, 2); // a=1, b=2
    auto ab = Alphabet::standard(2);
    CHECK(g.prefix(1).str(ab) == "b");
    CHECK(g.prefix(3).str(ab) == "b.a.b");
    CHECK(g.prefix(5).str(ab) == "b.a.b.b.a");
    CHECK(g.prefix(8).str(ab) == "b.a.b.b.a.b.a.b");
    SECTION("prefixes are nested") {
        auto p12 = g.prefix(12);
        for (int m = 0; m <= 12; ++m) CHECK(g.prefix(m) == p12.prefix(m));
    }
}

TEST_CASE("periodic and explicit generators") {
    auto ab = Alphabet::standard(2);
    auto per = InfiniteWordGen::periodic(ReducedWord::parse(ab, "a.b"));
    CHECK(per.prefix(5).str(ab) == "a.b.a.b.a");
    CHECK_THROWS_AS(InfiniteWordGen::periodic(ReducedWord::parse(ab, "a.b.A")), InputError);
    auto ex = InfiniteWordGen::explicit_word(ReducedWord::parse(ab, "a.b.a"));
    CHECK(ex.prefix(3).str(ab) == "a.b.a");
    CHECK_THROWS_AS(ex.prefix(4), DepthError);
    CHECK(per.suffix(1).prefix(4).str(ab) == "b.a.b.a");
}

TEST_CASE("biinfinite shift") {
    auto ab = Alphabet::standard(2);
    auto pos = InfiniteWordGen::periodic(ReducedWord::parse(ab, "a.b"));
    auto neg = InfiniteWordGen::periodic(ReducedWord::parse(ab, "B.A"));
    BiinfiniteWord z(neg, pos);

    SECTION("shift by period returns the same word") {
        auto z2 = z.shift(2);
        CHECK(z2.equal_to_depth(z, 10));
        auto zm2 = z.shift(-2);
        CHECK(zm2.equal_to_depth(z, 10));
    }
    SECTION("single shift moves the marker") {
        auto z1 = z.shift(1);
        CHECK(z1.pos.prefix(3).str(ab) == "b.a.b");
        CHECK(z1.neg.prefix(3).str(ab) == "A.B.A");
        CHECK(z1.shift(-1).equal_to_depth(z, 8));
    }
    SECTION("shift(0) is the identity") { CHECK(z.shift(0).equal_to_depth(z, 8)); }
    SECTION("unit cylinder condition enforced") {
        CHECK_THROWS_AS(BiinfiniteWord(pos, pos), InputError);
    }
}
