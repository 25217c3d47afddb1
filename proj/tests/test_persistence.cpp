#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

#include "persistome/persistence.hpp"
#include "persistome/rng.hpp"

using namespace persistome;

namespace {

PointCloud cloud(std::initializer_list<Vec3> pts) {
    PointCloud pc;
    pc.points = pts;
    return pc;
}

PointCloud random_cloud(size_t n, uint64_t seed) {
    Rng rng(seed);
    PointCloud pc;
    for (size_t i = 0; i < n; ++i)
        pc.points.push_back({rng.uniform01(), rng.uniform01(), rng.uniform01()});
    return pc;
}

using PairKey = std::tuple<int, double, double>;

std::multiset<PairKey> as_multiset(const std::vector<PersistenceDiagram>& diagrams) {
    std::multiset<PairKey> out;
    for (const auto& pd : diagrams)
        for (const auto& p : pd.pairs) out.insert({pd.dim, p.birth, p.death});
    return out;
}

std::vector<double> sorted_persistences(const PersistenceDiagram& pd) {
    std::vector<double> p;
    for (const auto& pair : pd.pairs) p.push_back(pair.persistence());
    std::sort(p.rbegin(), p.rend());
    return p;
}

} // namespace

TEST_CASE("three equidistant points yield an empty H1 diagram") {
    const auto d = distance_matrix(cloud({{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0}}));
    FiltrationOptions opts;
    opts.threshold = 1.0;
    const Filtration f = build_filtration(d, 2, opts);
    for (const auto* reduce : {&reduce_standard, &reduce_fast}) {
        const auto diagrams = (*reduce)(f, 1);
        CHECK(diagrams[1].empty()); // loop filled at the same value it forms
    }
}

TEST_CASE("unit square has the single H1 pair (1, sqrt 2)") {
    const auto d = distance_matrix(cloud({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}));
    FiltrationOptions opts;
    opts.threshold = std::sqrt(2.0);
    const Filtration f = build_filtration(d, 2, opts);
    for (const auto* reduce : {&reduce_standard, &reduce_fast}) {
        const auto diagrams = (*reduce)(f, 1);
        REQUIRE(diagrams[1].size() == 1);
        CHECK(diagrams[1].pairs[0].birth == 1.0);
        CHECK(diagrams[1].pairs[0].death == std::sqrt(2.0));
        CHECK_FALSE(diagrams[1].pairs[0].truncated);
    }
}

TEST_CASE("H0 pairs of a path are its merge edges") {
    // three collinear points spaced 1 and 2 apart
    const auto d = distance_matrix(cloud({{0, 0, 0}, {1, 0, 0}, {3, 0, 0}}));
    const Filtration f = build_filtration(d, 1, {});
    for (const auto* reduce : {&reduce_standard, &reduce_fast}) {
        const auto diagrams = (*reduce)(f, 0);
        REQUIRE(diagrams[0].size() == 3); // two merges + one class alive at threshold
        CHECK(diagrams[0].pairs[0].death == 1.0);
        CHECK(diagrams[0].pairs[1].death == 2.0);
        CHECK(diagrams[0].pairs[2].truncated);
    }
}

TEST_CASE("noise-free circle: one dominant H1 class dying at sqrt 3") {
    const PointCloud pc = generate_shape(ShapeKind::circle, 60, {}, 0.0, 1);
    const DiagramSet ds = compute_pd(pc, 1);
    const auto pers = sorted_persistences(ds.h1);
    REQUIRE(!pers.empty());
    CHECK(pers[0] > 1.0);
    if (pers.size() > 1) CHECK(pers[1] < 0.3);
    double death = 0.0;
    for (const auto& p : ds.h1.pairs)
        if (p.persistence() == pers[0]) death = p.death;
    CHECK(death == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
}

TEST_CASE("two points produce empty H1 and H2") {
    const DiagramSet ds = compute_pd(cloud({{0, 0, 0}, {1, 0, 0}}), 2);
    CHECK(ds.h1.empty());
    CHECK(ds.h2.empty());
}

TEST_CASE("eyeglass shows exactly two dominant H1 features") {
    const PointCloud pc = generate_shape(ShapeKind::eyeglass, 100, {}, 0.0, 1);
    const DiagramSet ds = compute_pd(pc, 1);
    const auto pers = sorted_persistences(ds.h1);
    REQUIRE(pers.size() >= 2);
    const double floor = pers.size() > 2 ? pers[2] : 0.0;
    CHECK(pers[0] > 3.0 * floor);
    CHECK(pers[1] > 3.0 * floor);
}

TEST_CASE("sphere sample: fast equals standard and H2 is dominant") {
    const PointCloud pc = generate_shape(ShapeKind::sphere, 60, {}, 0.0, 1);
    const Filtration f = build_filtration(distance_matrix(pc), 3, {});
    const auto fast = reduce_fast(f, 2);
    const auto standard = reduce_standard(f, 2);
    CHECK(as_multiset(fast) == as_multiset(standard));
    const auto pers = sorted_persistences(fast[2]);
    REQUIRE(!pers.empty());
    if (pers.size() > 1) CHECK(pers[0] >= 3.0 * pers[1]);
}

TEST_CASE("oracle equivalence on random clouds") {
    for (uint64_t seed = 0; seed < 60; ++seed) {
        const PointCloud pc = random_cloud(5 + seed % 21, 1000 + seed);
        const Filtration f = build_filtration(distance_matrix(pc), 3, {});
        const auto fast = reduce_fast(f, 2);
        const auto standard = reduce_standard(f, 2);
        REQUIRE(as_multiset(fast) == as_multiset(standard));
    }
}

TEST_CASE("births and deaths are filtration values of the right dimension") {
    const PointCloud pc = random_cloud(18, 3);
    const Filtration f = build_filtration(distance_matrix(pc), 3, {});
    const auto diagrams = reduce_fast(f, 2);
    for (int k = 0; k <= 2; ++k) {
        std::set<double> births(f.values[k].begin(), f.values[k].end());
        std::set<double> deaths;
        if (k + 1 <= f.max_dim)
            deaths.insert(f.values[k + 1].begin(), f.values[k + 1].end());
        for (const auto& p : diagrams[k].pairs) {
            CHECK(births.count(p.birth) == 1);
            if (!p.truncated) CHECK(deaths.count(p.death) == 1);
            else CHECK(p.death == f.threshold);
        }
    }
}

TEST_CASE("a forced small threshold reports truncated classes") {
    const PointCloud pc = generate_shape(ShapeKind::circle, 40, {}, 0.0, 1);
    ComputeOptions opts;
    opts.threshold = 1.0; // below the sqrt(3) death of the circle class
    const DiagramSet ds = compute_pd(pc, 1, opts);
    bool found = false;
    for (const auto& p : ds.h1.pairs)
        if (p.truncated) {
            found = true;
            CHECK(p.death == 1.0);
        }
    CHECK(found);
}

TEST_CASE("diagram csv round trip preserves exact doubles") {
    const PointCloud pc = random_cloud(14, 8);
    const DiagramSet ds = compute_pd(pc, 2);
    std::ostringstream out;
    write_diagram_csv(ds.h1, out);
    std::istringstream in(out.str());
    const PersistenceDiagram back = read_diagram_csv(in);
    REQUIRE(back.size() == ds.h1.size());
    for (size_t i = 0; i < back.size(); ++i) {
        CHECK(back.pairs[i].birth == ds.h1.pairs[i].birth);
        CHECK(back.pairs[i].death == ds.h1.pairs[i].death);
        CHECK(back.pairs[i].dim == 1);
    }
}

TEST_CASE("csv header and malformed rows are handled") {
    std::istringstream empty("dim,birth,death\n");
    CHECK(read_diagram_csv(empty).empty());
    std::istringstream bad("dim,birth,death\n1,0.5\n");
    CHECK_THROWS_AS(read_diagram_csv(bad), Error);
}

TEST_CASE("compute_pd validates its arguments") {
    CHECK_THROWS_AS(compute_pd(cloud({{0, 0, 0}}), 1), Error);
    CHECK_THROWS_AS(compute_pd(cloud({{0, 0, 0}, {1, 0, 0}}), 0), Error);
    CHECK_THROWS_AS(compute_pd(cloud({{0, 0, 0}, {1, 0, 0}}), 3), Error);
}
