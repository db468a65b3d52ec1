#include <cmath>
#include <random>

#include "bclab/manifold.hpp"
#include "doctest.h"

using namespace bclab;

TEST_CASE("presets build with consistent weights")
{
    for (const std::string& name : preset_names()) {
        CAPTURE(name);
        const GridManifold m = metric_from_preset(name);
        CHECK(m.num_nodes() == static_cast<int>(m.interior_weights.size()));
        CHECK(m.volume() > 0);
        CHECK(m.boundary_weights.size() == static_cast<int>(m.boundary_nodes.size()));
        for (int n = 0; n < m.num_nodes(); ++n) CHECK(m.metric_node(n).determinant() > 0);
    }
    CHECK_THROWS_AS(metric_from_preset("no-such-preset"), Error);
}

TEST_CASE("flat interval distances are exact")
{
    const GridManifold m = metric_from_preset("flat-interval", {{"N", 101}});
    const Vec d = distance_map(m, {0});
    for (int n = 0; n < m.num_nodes(); ++n) CHECK(d[n] == doctest::Approx(m.coords(n)[0]).epsilon(1e-12));
    CHECK(m.volume() == doctest::Approx(kPi).epsilon(1e-12));
}

TEST_CASE("speed profile travel time matches quadrature")
{
    const GridManifold m = metric_from_preset("speed-profile-1d", {{"N", 2048}});
    const Vec d = distance_map(m, {0});
    const int n = 20000;
    double L = 0.0;
    for (int i = 0; i <= n; ++i)
        L += (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2)) / (1.0 + 0.3 * std::sin(kPi * i / n));
    L *= kPi / n / 3.0;
    CHECK(d[m.num_nodes() - 1] == doctest::Approx(L).epsilon(1e-5));
}

TEST_CASE("flat rectangle graph distances approach Euclidean with the wider stencil")
{
    const GridManifold m = metric_from_preset("flat-rectangle", {{"nx", 33}, {"ny", 33}});
    const Vec d = distance_map(m, {m.node(0, 0)}, DistanceOptions{3});
    double worst = 0.0;
    for (int n = 0; n < m.num_nodes(); ++n) {
        const double e = m.coords(n).norm();
        if (e > 0.5) worst = std::max(worst, std::abs(d[n] - e) / e);
    }
    CHECK(worst < 0.02);
}

TEST_CASE("boundary distance functions are 1-Lipschitz along the boundary")
{
    const GridManifold m = metric_from_preset("warped-rectangle", {{"nx", 16}, {"ny", 16}});
    const Mat table = boundary_distance_table(m, DistanceOptions{3});
    const int nb = table.cols();
    for (int x = 0; x < m.num_nodes(); x += 7)
        for (int b = 0; b < nb; ++b)
            CHECK(std::abs(table(x, (b + 1) % nb) - table(x, b)) <= m.boundary_edge_lengths[b] + 1e-9);
}

TEST_CASE("domain of influence grows with t")
{
    const GridManifold m = metric_from_preset("warped-rectangle", {{"nx", 16}, {"ny", 16}});
    const BoundaryRegion g = boundary_ball(m, 0, 0.3);
    int prev = 0;
    for (double t : {0.1, 0.3, 0.6, 1.2, 4.0}) {
        InfluenceSpec s{{g}, {t}, {0.0}};
        const auto mask = domain_of_influence(m, s);
        int c = 0;
        for (char v : mask) c += v;
        CHECK(c >= prev);
        prev = c;
    }
    CHECK(prev == m.num_nodes());
}

TEST_CASE("manifold files round-trip")
{
    const GridManifold m = metric_from_preset("warped-rectangle", {{"nx", 8}, {"ny", 9}});
    const std::string path = "manifold_roundtrip.bclab";
    write_manifold(m, path);
    const GridManifold r = read_manifold(path);
    CHECK(r.shape == m.shape);
    CHECK((r.metric - m.metric).cwiseAbs().maxCoeff() == 0.0);
    CHECK((r.interior_weights - m.interior_weights).cwiseAbs().maxCoeff() == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("hartman factors")
{
    CHECK(hartman_h(HartmanKind::power, 1, 0.0) == doctest::Approx(1.0));
    // derivative by central differences
    for (double v : {-0.7, -0.2, 0.3, 0.8}) {
        const double fd = (hartman_h(HartmanKind::power, 1, v + 1e-6) - hartman_h(HartmanKind::power, 1, v - 1e-6)) / 2e-6;
        CHECK(hartman_dh(HartmanKind::power, 1, v) == doctest::Approx(fd).epsilon(1e-6));
    }
}
