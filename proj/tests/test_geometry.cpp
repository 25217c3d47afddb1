#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <set>
#include <sstream>

#include "persistome/geometry.hpp"
#include "persistome/rng.hpp"

using namespace persistome;

namespace {

PointCloud cloud(std::initializer_list<Vec3> pts) {
    PointCloud pc;
    pc.points = pts;
    return pc;
}

std::multiset<std::array<double, 3>> as_multiset(const PointCloud& pc) {
    std::multiset<std::array<double, 3>> s;
    for (const auto& p : pc.points) s.insert({p.x, p.y, p.z});
    return s;
}

PointCloud random_cloud(size_t n, uint64_t seed, double span = 1.0) {
    Rng rng(seed);
    PointCloud pc;
    for (size_t i = 0; i < n; ++i)
        pc.points.push_back({rng.uniform(0, span), rng.uniform(0, span), rng.uniform(0, span)});
    return pc;
}

} // namespace

TEST_CASE("xyz parsing echoes points in file order") {
    const PointCloud pc = parse_point_cloud("0 0 0\n1 0 0", CloudFormat::xyz);
    REQUIRE(pc.size() == 2);
    CHECK(pc.points[0].x == 0.0);
    CHECK(pc.points[1].x == 1.0);
}

TEST_CASE("xyz parsing allows comments and blank lines") {
    const PointCloud pc =
        parse_point_cloud("# header\n\n1 2 3\n  4 5 6  \n", CloudFormat::xyz);
    REQUIRE(pc.size() == 2);
    CHECK(pc.points[1].z == 6.0);
}

TEST_CASE("off parsing reads the vertex block and discards faces") {
    const PointCloud pc =
        parse_point_cloud("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2", CloudFormat::off);
    REQUIRE(pc.size() == 3);
    CHECK(pc.points[2].y == 1.0);
}

TEST_CASE("non-numeric token reports the line number") {
    try {
        parse_point_cloud("a b c", CloudFormat::xyz);
        FAIL("expected parse error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 1") != std::string::npos);
        CHECK(e.code() == "parse");
    }
}

TEST_CASE("csv parsing skips an optional header") {
    const PointCloud pc = parse_point_cloud("x,y,z\n1,2,3\n4, 5, 6", CloudFormat::csv);
    REQUIRE(pc.size() == 2);
    CHECK(pc.points[1].y == 5.0);
}

TEST_CASE("empty input is an error") {
    CHECK_THROWS_AS(parse_point_cloud("", CloudFormat::xyz), Error);
    CHECK_THROWS_AS(parse_point_cloud("# only comments\n", CloudFormat::xyz), Error);
}

TEST_CASE("random_sample draws without replacement, deterministically") {
    const PointCloud pc = random_cloud(2048, 1);
    const PointCloud sub = random_sample(pc, 1024, 7);
    REQUIRE(sub.size() == 1024);

    auto all = as_multiset(pc);
    for (const auto& p : sub.points) {
        auto it = all.find({p.x, p.y, p.z});
        REQUIRE(it != all.end());
        all.erase(it); // without replacement
    }

    const PointCloud again = random_sample(pc, 1024, 7);
    CHECK(as_multiset(sub) == as_multiset(again));
    const PointCloud other = random_sample(pc, 1024, 8);
    CHECK(as_multiset(sub) != as_multiset(other));
}

TEST_CASE("random_sample with k = n is the identity multiset") {
    const PointCloud pc = random_cloud(50, 2);
    const PointCloud sub = random_sample(pc, 50, 123);
    CHECK(as_multiset(sub) == as_multiset(pc));
}

TEST_CASE("random_sample rejects k = 0 and k > n") {
    const PointCloud pc = random_cloud(5, 3);
    CHECK_THROWS_AS(random_sample(pc, 0, 1), Error);
    CHECK_THROWS_AS(random_sample(pc, 6, 1), Error);
}

TEST_CASE("distance_matrix basics") {
    SUBCASE("3-4-5 triangle") {
        const auto d = distance_matrix(cloud({{0, 0, 0}, {3, 4, 0}}));
        CHECK(d(0, 1) == 5.0);
        CHECK(d(1, 0) == 5.0);
    }
    SUBCASE("single point") {
        const auto d = distance_matrix(cloud({{1, 1, 1}}));
        REQUIRE(d.n == 1);
        CHECK(d(0, 0) == 0.0);
    }
    SUBCASE("unit square off-diagonals are 1 or sqrt 2") {
        const auto d =
            distance_matrix(cloud({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}));
        const double r2 = std::sqrt(2.0);
        for (size_t i = 0; i < 4; ++i)
            for (size_t j = 0; j < 4; ++j) {
                if (i == j) CHECK(d(i, j) == 0.0);
                else CHECK((d(i, j) == 1.0 || d(i, j) == r2));
            }
    }
}

TEST_CASE("distance_matrix matches pairwise recomputation exactly") {
    const PointCloud pc = random_cloud(40, 4);
    const auto d = distance_matrix(pc);
    for (size_t i = 0; i < pc.size(); ++i)
        for (size_t j = 0; j < pc.size(); ++j)
            CHECK(d(i, j) == distance(pc.points[i], pc.points[j]));
}

TEST_CASE("hausdorff examples") {
    const PointCloud a = cloud({{0, 0, 0}});
    CHECK(hausdorff(a, a) == 0.0);
    CHECK(hausdorff(a, cloud({{1, 0, 0}})) == 1.0);
    // brute force over the min-max definition: directed(a->b) = 0,
    // directed(b->a) = max(0, 2) = 2
    CHECK(hausdorff(a, cloud({{0, 0, 0}, {2, 0, 0}})) == 2.0);
}

TEST_CASE("hausdorff is a metric on random triples") {
    for (uint64_t s = 0; s < 20; ++s) {
        const PointCloud a = random_cloud(12, 100 + s);
        const PointCloud b = random_cloud(9, 200 + s);
        const PointCloud c = random_cloud(15, 300 + s);
        const double ab = hausdorff(a, b), ba = hausdorff(b, a);
        CHECK(ab == ba);
        CHECK(hausdorff(a, a) == 0.0);
        CHECK(ab <= hausdorff(a, c) + hausdorff(c, b) + 1e-9);
    }
}

TEST_CASE("perturb honours the hausdorff bound by construction") {
    const PointCloud pc = random_cloud(50, 5);
    SUBCASE("eps = 0 is the identity") {
        const PointCloud out = perturb(pc, 0.0, 9);
        CHECK(as_multiset(out) == as_multiset(pc));
    }
    SUBCASE("eps bound holds on a grid") {
        for (double eps : {0.01, 0.05, 0.1, 0.5}) {
            const PointCloud out = perturb(pc, eps, 11);
            CHECK(hausdorff(pc, out) <= eps);
        }
    }
    SUBCASE("deterministic for a fixed seed") {
        const PointCloud x = perturb(pc, 0.1, 17);
        const PointCloud y = perturb(pc, 0.1, 17);
        CHECK(as_multiset(x) == as_multiset(y));
    }
    CHECK_THROWS_AS(perturb(pc, -0.1, 1), Error);
}

TEST_CASE("generated shapes satisfy their construction constraints") {
    SUBCASE("circle points sit on the radius") {
        const PointCloud pc = generate_shape(ShapeKind::circle, 60, {}, 0.0, 1);
        REQUIRE(pc.size() == 60);
        for (const auto& p : pc.points) {
            CHECK(p.z == 0.0);
            CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-12));
        }
    }
    SUBCASE("torus points stay within the tube annulus") {
        ShapeParams params;
        params.radius = 2.0;
        params.tube_radius = 0.5;
        const PointCloud pc = generate_shape(ShapeKind::torus, 256, params, 0.0, 1);
        REQUIRE(pc.size() == 256);
        for (const auto& p : pc.points) {
            const double axial = std::hypot(p.x, p.y);
            CHECK(axial >= 1.5 - 1e-12);
            CHECK(axial <= 2.5 + 1e-12);
        }
    }
    SUBCASE("sphere points sit on the radius") {
        const PointCloud pc = generate_shape(ShapeKind::sphere, 100, {}, 0.0, 1);
        for (const auto& p : pc.points)
            CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("noise is deterministic per seed") {
        const PointCloud a = generate_shape(ShapeKind::sphere, 50, {}, 0.05, 3);
        const PointCloud b = generate_shape(ShapeKind::sphere, 50, {}, 0.05, 3);
        CHECK(as_multiset(a) == as_multiset(b));
    }
    CHECK_THROWS_AS(generate_shape(ShapeKind::circle, 3, {}, 0.0, 1), Error);
    ShapeParams bad;
    bad.tube_radius = 2.0;
    CHECK_THROWS_AS(generate_shape(ShapeKind::torus, 64, bad, 0.0, 1), Error);
}

TEST_CASE("xyz round trip preserves coordinates exactly") {
    const PointCloud pc = random_cloud(25, 6);
    std::ostringstream out;
    write_xyz(pc, out);
    const PointCloud back = parse_point_cloud(out.str(), CloudFormat::xyz);
    REQUIRE(back.size() == pc.size());
    for (size_t i = 0; i < pc.size(); ++i) {
        CHECK(back.points[i].x == pc.points[i].x);
        CHECK(back.points[i].y == pc.points[i].y);
        CHECK(back.points[i].z == pc.points[i].z);
    }
}
