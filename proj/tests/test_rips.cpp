#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>
#include <vector>

#include "persistome/rips.hpp"
#include "persistome/rng.hpp"

using namespace persistome;

namespace {

PointCloud cloud(std::initializer_list<Vec3> pts) {
    PointCloud pc;
    pc.points = pts;
    return pc;
}

PointCloud unit_square() { return cloud({{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}}); }

PointCloud equilateral() {
    return cloud({{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2.0, 0}});
}

PointCloud random_cloud(size_t n, uint64_t seed) {
    Rng rng(seed);
    PointCloud pc;
    for (size_t i = 0; i < n; ++i)
        pc.points.push_back({rng.uniform01(), rng.uniform01(), rng.uniform01()});
    return pc;
}

// brute-force oracle: all vertex subsets of size <= max_dim+1 whose diameter
// is within the threshold
std::set<std::vector<uint32_t>> brute_force_cliques(const DistanceMatrix& d,
                                                    int max_dim, double threshold) {
    std::set<std::vector<uint32_t>> out;
    const uint32_t n = static_cast<uint32_t>(d.n);
    std::vector<uint32_t> subset;
    auto rec = [&](auto&& self, uint32_t next) -> void {
        if (!subset.empty()) {
            double diam = 0.0;
            for (size_t i = 0; i < subset.size(); ++i)
                for (size_t j = i + 1; j < subset.size(); ++j)
                    diam = std::max(diam, d(subset[i], subset[j]));
            if (diam <= threshold) out.insert(subset);
            else return; // supersets only get bigger diameters
        }
        if (subset.size() == size_t(max_dim) + 1) return;
        for (uint32_t v = next; v < n; ++v) {
            subset.push_back(v);
            self(self, v + 1);
            subset.pop_back();
        }
    };
    rec(rec, 0);
    return out;
}

std::set<std::vector<uint32_t>> filtration_cliques(const Filtration& f) {
    std::set<std::vector<uint32_t>> out;
    for (int dim = 0; dim <= f.max_dim; ++dim)
        for (size_t i = 0; i < f.count(dim); ++i) {
            const Simplex s = f.simplex(dim, i);
            out.insert(std::vector<uint32_t>(s.vertices.begin(),
                                             s.vertices.begin() + dim + 1));
        }
    return out;
}

std::string dump(const Filtration& f) {
    std::ostringstream out;
    dump_filtration(f, out);
    return out.str();
}

} // namespace

TEST_CASE("enclosing radius") {
    CHECK(enclosing_radius(distance_matrix(cloud({{5, 5, 5}}))) == 0.0);
    CHECK(enclosing_radius(distance_matrix(cloud({{0, 0, 0}, {2, 0, 0}}))) == 2.0);
    // oracle: enumerate min over i of max over j on the 4x4 matrix
    const auto d = distance_matrix(unit_square());
    double expect = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < 4; ++i) {
        double row = 0.0;
        for (size_t j = 0; j < 4; ++j) row = std::max(row, d(i, j));
        expect = std::min(expect, row);
    }
    CHECK(expect == std::sqrt(2.0));
    CHECK(enclosing_radius(d) == expect);
}

TEST_CASE("three equidistant points at threshold form a filled triangle") {
    const auto d = distance_matrix(equilateral());
    FiltrationOptions opts;
    opts.threshold = 1.0;
    const Filtration f = build_filtration(d, 2, opts);
    CHECK(f.count(0) == 3);
    CHECK(f.count(1) == 3);
    CHECK(f.count(2) == 1);
    for (size_t e = 0; e < 3; ++e)
        CHECK(f.values[1][e] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.values[2][0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("unit square at threshold 1 has no triangles") {
    FiltrationOptions opts;
    opts.threshold = 1.0;
    const Filtration f = build_filtration(distance_matrix(unit_square()), 2, opts);
    CHECK(f.count(0) == 4);
    CHECK(f.count(1) == 4); // diagonals exceed the threshold
    CHECK(f.count(2) == 0);
}

TEST_CASE("threshold zero keeps vertices only") {
    FiltrationOptions opts;
    opts.threshold = 0.0;
    const Filtration f = build_filtration(distance_matrix(random_cloud(7, 1)), 3, opts);
    CHECK(f.count(0) == 7);
    CHECK(f.count(1) == 0);
    CHECK(f.count(2) == 0);
    CHECK(f.count(3) == 0);
}

TEST_CASE("clique completeness against brute force on small clouds") {
    for (uint64_t seed = 0; seed < 12; ++seed) {
        const PointCloud pc = random_cloud(5 + seed % 6, 40 + seed);
        const auto d = distance_matrix(pc);
        const double threshold = enclosing_radius(d) * (0.4 + 0.15 * (seed % 4));
        FiltrationOptions opts;
        opts.threshold = threshold;
        for (int max_dim : {1, 2, 3}) {
            const Filtration f = build_filtration(d, max_dim, opts);
            CHECK(filtration_cliques(f) == brute_force_cliques(d, max_dim, threshold));
        }
    }
}

TEST_CASE("filtration values are monotone over faces and sorted per dim") {
    const PointCloud pc = random_cloud(15, 77);
    const auto d = distance_matrix(pc);
    const Filtration f = build_filtration(d, 3, {});
    for (int dim = 1; dim <= 3; ++dim) {
        for (size_t i = 0; i < f.count(dim); ++i) {
            const Simplex s = f.simplex(dim, i);
            if (i + 1 < f.count(dim)) {
                CHECK(f.values[dim][i] <= f.values[dim][i + 1]);
                if (f.values[dim][i] == f.values[dim][i + 1])
                    CHECK(f.keys[dim][i] < f.keys[dim][i + 1]);
            }
            // every facet value is dominated by the simplex value
            double facet_max = 0.0;
            for (int a = 0; a <= dim; ++a)
                for (int b = a + 1; b <= dim; ++b)
                    facet_max = std::max(facet_max, d(s.vertices[a], s.vertices[b]));
            CHECK(s.value == facet_max);
        }
    }
}

TEST_CASE("identical inputs produce byte-identical filtrations") {
    const PointCloud pc = random_cloud(20, 5);
    const auto d = distance_matrix(pc);
    const Filtration a = build_filtration(d, 3, {});
    const Filtration b = build_filtration(d, 3, {});
    CHECK(dump(a) == dump(b));
    CHECK(!dump(a).empty());
}

TEST_CASE("simplex cap raises a structured error naming the dimension") {
    const PointCloud pc = random_cloud(30, 9);
    FiltrationOptions opts;
    opts.simplex_cap = 100;
    try {
        build_filtration(distance_matrix(pc), 3, opts);
        FAIL("expected cap overflow");
    } catch (const Error& e) {
        CHECK(e.code() == "simplex_cap");
        CHECK(std::string(e.what()).find("dimension") != std::string::npos);
    }
}

TEST_CASE("auto threshold defaults to the enclosing radius") {
    const auto d = distance_matrix(random_cloud(12, 13));
    const Filtration f = build_filtration(d, 2, {});
    CHECK(f.threshold == enclosing_radius(d));
}
