#include <cmath>

#include "bclab/geodesics.hpp"
#include "doctest.h"

using namespace bclab;

TEST_CASE("flat hamiltonian and straight geodesics")
{
    const GridManifold m = metric_from_preset("flat-rectangle");
    const PhasePoint p{Point(0.5, 0.7), Point(0.6, 0.8)};
    CHECK(hamiltonian(m, p) == doctest::Approx(0.5));
    CHECK(hamiltonian_gradient(m, p).norm() < 1e-9);
    const GeodesicPath path = integrate_geodesic(m, p, 1.0, 0.01);
    const int last = path.positions.rows() - 1;
    CHECK(path.times[last] == doctest::Approx(1.0));
    CHECK(path.positions(last, 0) == doctest::Approx(1.1).epsilon(1e-12));
    CHECK(path.positions(last, 1) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(path.drift < 1e-12);
    CHECK((exp_map(m, Point(0.5, 0.7), Point(1.0, -0.5), 0.4) - Point(0.9, 0.5)).norm() < 1e-10);
}

TEST_CASE("hamiltonian is conserved on the warped rectangle")
{
    const GridManifold m = metric_from_preset("warped-rectangle");
    const GeodesicPath p = integrate_geodesic(m, {Point(0.2, 0.3), Point(1.0, 0.5)}, 0.5, 0.005);
    CHECK(p.drift < 1e-8);
}

TEST_CASE("step halving converges at fourth order")
{
    const GridManifold m = metric_from_preset("warped-rectangle");
    const PhasePoint s{Point(0.2, 0.3), Point(1.0, 0.5)};
    auto end = [&](double dt) {
        const GeodesicPath p = integrate_geodesic(m, s, 0.5, dt);
        return Point(p.positions.row(p.positions.rows() - 1).transpose());
    };
    const Point a = end(0.04), b = end(0.02), c = end(0.01);
    const double ratio = (a - b).norm() / (b - c).norm();
    CHECK(ratio == doctest::Approx(16.0).epsilon(0.25));
}

TEST_CASE("branching witness for both Hartman families")
{
    for (HartmanKind kind : {HartmanKind::power, HartmanKind::log}) {
        const BranchingWitness w = branching_witness(kind, 1);
        CHECK(w.trivial.max_residual < 1e-6);
        CHECK(w.branch.max_residual < 1e-6);
        CHECK(w.branch.max_first_integral < 1e-6);
        CHECK(w.jet_gap < 1e-9);
        CHECK(w.separation_at_end > 0.1);
    }
}

TEST_CASE("residual detects a non-geodesic")
{
    const Vec u = Vec::LinSpaced(201, -1.0, 1.0);
    const Vec v = u.array().square();  // v = u² is not a solution
    CHECK(geodesic_residual(HartmanKind::power, 1, u, v).max_residual > 1e-2);
}

TEST_CASE("osgood classification")
{
    const int n = 40;
    Vec t(n), lip(n), loglip(n), holder(n);
    for (int i = 0; i < n; ++i) {
        t[i] = std::pow(2.0, -(i + 1));
        lip[i] = t[i];
        loglip[i] = t[i] * std::log(1.0 / t[i]);
        holder[i] = std::pow(t[i], 0.6);
    }
    CHECK(osgood_classify(t, lip).unique_flow);
    CHECK(osgood_classify(t, loglip).unique_flow);
    CHECK_FALSE(osgood_classify(t, holder).unique_flow);
}

TEST_CASE("minimality on the flat rectangle")
{
    const GridManifold m = metric_from_preset("flat-rectangle");
    CHECK(minimality_check(m, m.node(16, 16), 0.8).max_deviation < 2 * m.spacing[0]);
    const MinimalityReport b = minimality_check(m, m.node(16, 0), 0.8);
    CHECK(b.boundary);
    CHECK(b.max_deviation < 1e-9);
}
