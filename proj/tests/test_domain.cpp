#include "navseg/domain.hpp"
#include "navseg/io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

using namespace navseg;

TEST_CASE("distance along the manifold") {
    CHECK(distance(on_manifold(5.0), on_manifold(5.0)) == 0.0);
    CHECK(distance(on_manifold(3.0), on_manifold(7.5)) == doctest::Approx(4.5));
    CHECK(distance(on_manifold(1.0), on_manifold(450.0)) == doctest::Approx(449.0));
}

TEST_CASE("nearest camera") {
    CHECK(nearest_camera(12.3, 450) == 12);
    CHECK(nearest_camera(12.5, 450) == 12);
    CHECK(nearest_camera(12.51, 450) == 13);
    CHECK(nearest_camera(450.0, 450) == 450);
    CHECK(nearest_camera(0.2, 450) == 1);
    CHECK(nearest_camera(600.0, 450) == 450);
}

TEST_CASE("nearest camera cells do not overlap") {
    // scan a fine grid: the chosen index never decreases and each jump happens at n + 1/2
    std::size_t prev = 1;
    for (int i = 0; i <= 20000; ++i) {
        const double s = 1.0 + i * 0.001;
        const std::size_t n = nearest_camera(s, 25);
        CHECK(n >= prev);
        CHECK(std::abs(static_cast<double>(n) - s) <= 0.5);
        prev = n;
    }
}

TEST_CASE("ball view range") {
    CHECK(ball_view_range({on_manifold(100), 0.0}, 450) == ViewRange{100, 100});
    CHECK(ball_view_range({on_manifold(100), 80.0}, 450) == ViewRange{20, 180});
    CHECK(ball_view_range({on_manifold(5), 80.0}, 450) == ViewRange{1, 85});
    CHECK(ball_view_range({on_manifold(440), 80.0}, 450) == ViewRange{360, 450});
    CHECK(ball_view_range({on_manifold(1), 1000.0}, 450) == ViewRange{1, 450});
    // off-grid center with a zero radius still yields its nearest camera
    CHECK(ball_view_range({on_manifold(7.3), 0.0}, 450).size() == 1);
}

TEST_CASE("ball reference range contains the view range") {
    navseg::Rng rng(3);
    for (int i = 0; i < 2000; ++i) {
        const double s = rng.uniform(1.0, 60.0);
        const double radius = rng.uniform(0.0, 15.0);
        const ViewRange view = ball_view_range({on_manifold(s), radius}, 60);
        const ViewRange ref = ball_reference_range({on_manifold(s), radius}, 60);
        CHECK(ref.lo <= view.lo);
        CHECK(ref.hi >= view.hi);
        CHECK(ref.lo == nearest_camera(s - radius, 60));
        CHECK(ref.hi == nearest_camera(s + radius, 60));
    }
    CHECK(ball_reference_range({on_manifold(100), 80.0}, 450) == ViewRange{20, 180});
}

TEST_CASE("angles wrap into [-pi, pi)") {
    CHECK(wrap_angle(0.0) == 0.0);
    CHECK(wrap_angle(std::numbers::pi) == doctest::Approx(-std::numbers::pi));
    CHECK(wrap_angle(3 * std::numbers::pi / 2) == doctest::Approx(-std::numbers::pi / 2));
    CHECK(wrap_angle(-std::numbers::pi) == doctest::Approx(-std::numbers::pi));
    const Pose6D d = pose_difference({0, 0, 0, 3.0, 0, 0}, {0, 0, 0, -3.0, 0, 0});
    CHECK(d.theta == doctest::Approx(6.0 - 2 * std::numbers::pi));
}

TEST_CASE("camera rig") {
    const CameraRig rig = CameraRig::linear(5, 0.5);
    CHECK(rig.count() == 5);
    CHECK(rig.pose(1).x == 0.0);
    CHECK(rig.pose(5).x == doctest::Approx(2.0));
    CHECK(rig.pose_at(2.5).x == doctest::Approx(0.75));
    CHECK_THROWS_AS(rig.pose(0), ValidationError);
    CHECK_THROWS_AS(rig.pose(6), ValidationError);
    CHECK_THROWS_AS(CameraRig(std::vector<Pose6D>{}), ValidationError);
}

TEST_CASE("camera rig from CSV") {
    const auto dir = testing::scratch_dir("rig");
    io::write_text(dir / "rig.csv", "index,x,y,z,theta,phi,psi\n1,0,0,0,0,0,0\n2,1,0,0,0.1,0,0\n");
    const CameraRig rig = CameraRig::load_csv(dir / "rig.csv");
    CHECK(rig.count() == 2);
    CHECK(rig.pose(2).theta == doctest::Approx(0.1));
    io::write_text(dir / "bad.csv", "index,x,y,z,theta,phi,psi\n2,0,0,0,0,0,0\n");
    CHECK_THROWS_AS(CameraRig::load_csv(dir / "bad.csv"), ValidationError);
}

TEST_CASE("uniform popularity") {
    const Popularity p = Popularity::uniform(4);
    for (std::size_t n = 1; n <= 4; ++n) CHECK(p[n] == doctest::Approx(0.25));
}

TEST_CASE("gaussian popularity") {
    SUBCASE("delta limit") {
        const Popularity p = Popularity::gaussian(5, {0.5, 0.0});
        CHECK(p[3] == 1.0);
        CHECK(p[1] == 0.0);
        CHECK(p[5] == 0.0);
    }
    SUBCASE("unit sigma over three views is symmetric") {
        const Popularity p = Popularity::gaussian(3, {0.5, 1.0 / 3.0});
        CHECK(p[1] == doctest::Approx(p[3]));
        const double e = std::exp(-0.5);
        CHECK(p[2] == doctest::Approx(1.0 / (1.0 + 2.0 * e)));
    }
    SUBCASE("right-skewed peak") {
        const Popularity p = Popularity::make(PopularityKind::right, 451, default_shape(PopularityKind::right));
        std::size_t argmax = 1;
        for (std::size_t n = 1; n <= 451; ++n) {
            if (p[n] > p[argmax]) argmax = n;
        }
        CHECK(argmax == 1 + static_cast<std::size_t>(std::lround(0.9 * 450)));
    }
    CHECK_THROWS_AS(Popularity::gaussian(5, {0.5, -1.0}), ValidationError);
}

TEST_CASE("popularity invariants hold for random shapes") {
    navseg::Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const std::size_t n = testing::draw_index(rng, 1, 500);
        const Popularity p = Popularity::gaussian(n, {rng.uniform01(), rng.uniform(0.0, 0.5)});
        double sum = 0.0;
        for (double x : p.values()) {
            CHECK(x >= 0.0);
            sum += x;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(p.mass({1, n}) == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("popularity mass over ranges matches direct sums") {
    const Popularity p = Popularity::from_weights({1, 2, 3, 4});
    CHECK(p.mass({1, 1}) == doctest::Approx(0.1));
    CHECK(p.mass({2, 3}) == doctest::Approx(0.5));
    CHECK(p.mass({1, 4}) == doctest::Approx(1.0));
}

TEST_CASE("popularity weights are validated") {
    CHECK_THROWS_AS(Popularity::from_weights({}), ValidationError);
    CHECK_THROWS_AS(Popularity::from_weights({0, 0}), ValidationError);
    CHECK_THROWS_AS(Popularity::from_weights({1, -1, 1}), ValidationError);
    CHECK_THROWS_AS(Popularity::make(PopularityKind::custom, 4, {}), ValidationError);
    CHECK(parse_popularity_kind("right") == PopularityKind::right);
    CHECK_THROWS_AS(parse_popularity_kind("left"), ValidationError);
}

TEST_CASE("popularity CSV") {
    const auto dir = testing::scratch_dir("popularity");
    SUBCASE("round trip") {
        const Popularity p = Popularity::make(PopularityKind::center, 40, default_shape(PopularityKind::center));
        p.save_csv(dir / "p.csv");
        const Popularity q = Popularity::load_csv(dir / "p.csv");
        REQUIRE(q.size() == 40);
        for (std::size_t n = 1; n <= 40; ++n) CHECK(q[n] == doctest::Approx(p[n]).epsilon(1e-12));
    }
    SUBCASE("sum within 1% is renormalized") {
        io::write_text(dir / "near.csv", "index,p\n1,0.5\n2,0.505\n");
        const Popularity q = Popularity::load_csv(dir / "near.csv");
        CHECK(q[1] + q[2] == doctest::Approx(1.0));
    }
    SUBCASE("sum far from one is rejected") {
        io::write_text(dir / "far.csv", "index,p\n1,0.5\n2,0.7\n");
        CHECK_THROWS_AS(Popularity::load_csv(dir / "far.csv"), ValidationError);
    }
    SUBCASE("malformed number names the field") {
        io::write_text(dir / "bad.csv", "index,p\n1,abc\n");
        CHECK_THROWS_WITH_AS(Popularity::load_csv(dir / "bad.csv"), doctest::Contains("p"), ValidationError);
    }
}
