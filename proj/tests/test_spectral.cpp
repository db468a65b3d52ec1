#include <cmath>

#include "bclab/spectral.hpp"
#include "doctest.h"

using namespace bclab;

TEST_CASE("neumann interval eigenvalues converge at second order")
{
    double prev = 0.0;
    for (int N : {257, 513, 1025}) {
        const GridManifold m = metric_from_preset("flat-interval", {{"N", N}});
        const EigenSystem es = solve_eigensystem(assemble_laplacian(m, BoundaryCondition::neumann), m, 6);
        const double err = std::abs(es.eigenvalues[5] - 25.0);
        if (prev > 0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.1));
        prev = err;
        CHECK(orthonormality_residual(es) < 1e-10);
        CHECK(std::abs(es.eigenvalues[0]) < 1e-9);
    }
}

TEST_CASE("dirichlet interval eigenvalues are k^2")
{
    const GridManifold m = metric_from_preset("flat-interval", {{"N", 2049}});
    const EigenSystem es = solve_eigensystem(assemble_laplacian(m, BoundaryCondition::dirichlet), m, 5);
    for (int k = 0; k < 5; ++k) CHECK(es.eigenvalues[k] == doctest::Approx((k + 1.0) * (k + 1.0)).epsilon(1e-5));
}

TEST_CASE("rectangle has the expected multiplicity-2 clusters")
{
    const GridManifold m = metric_from_preset("flat-rectangle", {{"nx", 24}, {"ny", 24}});
    const EigenSystem es = solve_eigensystem(assemble_laplacian(m, BoundaryCondition::neumann), m, 6);
    const auto cl = eigen_clusters(es.eigenvalues, 1e-6);
    // 0 | 1,1 | 2 | 4,4
    REQUIRE(cl.size() == 4);
    CHECK(cl[1] == std::pair<int, int>{1, 2});
    CHECK(cl[3] == std::pair<int, int>{4, 5});
}

TEST_CASE("first significant trace is positive")
{
    const BoundarySpectralData d = forward_data(metric_from_preset("speed-profile-1d", {{"N", 512}}), 20);
    for (int k = 0; k < d.K(); ++k) {
        const Eigen::Index n = d.traces.cols();
        Eigen::Index j = 0;
        while (j < n && std::abs(d.traces(k, j)) < 1e-8) ++j;
        REQUIRE(j < n);
        CHECK(d.traces(k, j) > 0);
    }
}

TEST_CASE("perturbation: sigma zero keeps eigenvalues, mixing stays orthogonal per cluster")
{
    const BoundarySpectralData d = forward_data(metric_from_preset("flat-rectangle", {{"nx", 20}, {"ny", 20}}), 12);
    const BoundarySpectralData p = perturb_data(d, PerturbOptions{-1, 0.0, true, 3, 1e-6});
    CHECK((p.eigenvalues - d.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
    // Gram matrix of traces in the dS inner product is invariant under orthogonal mixing
    const Mat G1 = d.traces * d.dS.asDiagonal() * d.traces.transpose();
    const Mat G2 = p.traces * p.dS.asDiagonal() * p.traces.transpose();
    for (auto [a, b] : eigen_clusters(d.eigenvalues, 1e-6)) {
        const int l = b - a + 1;
        CHECK(G1.block(a, a, l, l).trace() == doctest::Approx(G2.block(a, a, l, l).trace()).epsilon(1e-10));
    }
    const BoundarySpectralData t = perturb_data(d, PerturbOptions{5, 0.0, false, 1, 1e-6});
    CHECK(t.K() == 5);
}

TEST_CASE("spectral data files round-trip bit-exactly")
{
    const BoundarySpectralData d = forward_data(metric_from_preset("warped-rectangle", {{"nx", 10}, {"ny", 10}}), 8);
    const std::string path = "data_roundtrip.bclab";
    write_spectral_data(d, path);
    const BoundarySpectralData r = read_spectral_data(path);
    CHECK(r.K() == d.K());
    CHECK((r.eigenvalues - d.eigenvalues).cwiseAbs().maxCoeff() == 0.0);
    CHECK((r.traces - d.traces).cwiseAbs().maxCoeff() == 0.0);
    CHECK((r.dS - d.dS).cwiseAbs().maxCoeff() == 0.0);
    std::remove(path.c_str());
    CHECK_THROWS_AS(read_spectral_data("does-not-exist.bclab"), Error);
}
