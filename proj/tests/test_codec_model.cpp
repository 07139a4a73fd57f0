#include "navseg/codec_model.hpp"
#include "navseg/io.hpp"
#include "navseg/partition.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace navseg;

TEST_CASE("segment cost of an IPP segment") {
    const RateTable t = RateTable::constant(6, 10, 2);
    CHECK(segment_cost(t, {3, 3}) == 10.0);
    CHECK(segment_cost(t, {1, 4}) == 16.0);
    CHECK(segment_cost(t, {1, 6}) == storage_cost(t, Partition::single(6)));
    CHECK_THROWS_AS(segment_cost(t, {4, 3}), ValidationError);
    CHECK_THROWS_AS(segment_cost(t, {1, 7}), ValidationError);
}

TEST_CASE("segment cost uses the first view's intra cost") {
    const RateTable t("q", {5, 7, 11, 13}, {0, 1, 2, 3});
    CHECK(segment_cost(t, {2, 4}) == 7.0 + 2.0 + 3.0);
    CHECK(segment_cost(t, {1, 2}) == 5.0 + 1.0);
}

TEST_CASE("storage cost") {
    const RateTable t = RateTable::constant(4, 10, 2);
    CHECK(storage_cost(t, Partition::single(4)) == 16.0);
    CHECK(storage_cost(t, Partition({1, 2, 3, 4})) == 40.0);
    CHECK(storage_cost(t, Partition({2, 4})) == 24.0);
}

TEST_CASE("prefix sums agree with direct loops") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto inst = testing::random_instance(seed, 1, 40);
        const RateTable t = testing::table_of(inst);
        const std::size_t n = inst.h_i.size();
        for (std::size_t a = 1; a <= n; ++a) {
            double expected = inst.h_i[a - 1];
            for (std::size_t b = a; b <= n; ++b) {
                if (b > a) expected += inst.h_p[b - 1];
                CHECK(segment_cost(t, {a, b}) == doctest::Approx(expected).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("constant table layout") {
    const RateTable t = RateTable::constant(3, 10, 2);
    CHECK(t.h_i(1) == 10.0);
    CHECK(t.h_i(3) == 10.0);
    CHECK(t.h_p(1) == 0.0);
    CHECK(t.h_p(2) == 2.0);
    CHECK(t.h_p(3) == 2.0);
    CHECK_THROWS_AS(RateTable::constant(3, 2, 10), ValidationError);
    CHECK_THROWS_AS(RateTable::constant(3, 10, 0), ValidationError);
}

TEST_CASE("seeded random tables") {
    const RateTable a = RateTable::seeded_random(1000, 100, 20, 0.1, 42);
    const RateTable b = RateTable::seeded_random(1000, 100, 20, 0.1, 42);
    CHECK(a == b);
    CHECK_FALSE(a == RateTable::seeded_random(1000, 100, 20, 0.1, 43));
    for (std::size_t n = 1; n <= 1000; ++n) {
        CHECK(a.h_i(n) >= 90.0);
        CHECK(a.h_i(n) <= 110.0);
        if (n > 1) {
            CHECK(a.h_p(n) >= 18.0);
            CHECK(a.h_p(n) <= 22.0);
        }
    }
    CHECK_THROWS_AS(RateTable::seeded_random(10, 20, 100, 0.1, 1), ValidationError);
    CHECK_THROWS_AS(RateTable::seeded_random(10, 100, 20, 1.0, 1), ValidationError);
}

TEST_CASE("rate table validation") {
    CHECK_THROWS_WITH_AS(RateTable("q", {10, 0}, {0, 1}), doctest::Contains("non-positive I-frame cost"),
                         ValidationError);
    CHECK_THROWS_AS(RateTable("q", {10, 10}, {0, -1}), ValidationError);
    CHECK_THROWS_AS(RateTable("q", {10, 10}, {0}), ValidationError);
    CHECK_THROWS_AS(RateTable("q", {}, {}), ValidationError);
}

TEST_CASE("rate table CSV") {
    const auto dir = testing::scratch_dir("rates");
    SUBCASE("well-formed file") {
        io::write_text(dir / "ok.csv", "index,h_I,h_P\n1,10,0\n2,11,2\n3,12,3\n");
        const RateTable t = RateTable::load_csv(dir / "ok.csv", "QP");
        CHECK(t.size() == 3);
        CHECK(t.q_label() == "QP");
        CHECK(t.h_i(3) == 12.0);
        CHECK(t.h_p(2) == 2.0);
    }
    SUBCASE("zero intra cost") {
        io::write_text(dir / "zero.csv", "index,h_I,h_P\n1,10,0\n2,0,2\n");
        CHECK_THROWS_WITH_AS(RateTable::load_csv(dir / "zero.csv", "QP"), doctest::Contains("non-positive I-frame cost"),
                             ValidationError);
    }
    SUBCASE("missing rows") {
        io::write_text(dir / "short.csv", "index,h_I,h_P\n1,10,0\n2,11,2\n");
        CHECK_THROWS_AS(RateTable::load_csv(dir / "short.csv", "QP", 3), ValidationError);
    }
    SUBCASE("bad header") {
        io::write_text(dir / "hdr.csv", "view,I,P\n1,10,0\n");
        CHECK_THROWS_AS(RateTable::load_csv(dir / "hdr.csv", "QP"), ValidationError);
    }
    SUBCASE("missing file") {
        CHECK_THROWS_AS(RateTable::load_csv(dir / "nope.csv", "QP"), ValidationError);
    }
    SUBCASE("round trip") {
        const RateTable t = RateTable::seeded_random(50, 1e5, 2e4, 0.3, 9, "QP30");
        t.save_csv(dir / "rt.csv");
        CHECK(RateTable::load_csv(dir / "rt.csv", "QP30", 50) == t);
    }
}
