#include <cmath>
#include <random>

#include "bclab/reconstruction.hpp"
#include "doctest.h"

using namespace bclab;

TEST_CASE("metric system recovers a synthetic operator exactly")
{
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int n : {1, 2}) {
        CAPTURE(n);
        Mat A = Mat::Random(n, n);
        const Mat ginv = A * A.transpose() + Mat::Identity(n, n);
        Vec b(n);
        for (int i = 0; i < n; ++i) b[i] = g(rng);
        const int modes = 8;
        std::vector<Vec> grad;
        std::vector<Mat> hess;
        Vec values(modes), lambda(modes);
        for (int k = 0; k < modes; ++k) {
            Vec gr(n);
            Mat H(n, n);
            for (int i = 0; i < n; ++i) gr[i] = g(rng);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j <= i; ++j) H(i, j) = H(j, i) = g(rng);
            grad.push_back(gr);
            hess.push_back(H);
            lambda[k] = 1.0 + k;
            values[k] = (-(ginv.cwiseProduct(H)).sum() - b.dot(gr)) / lambda[k];
        }
        const MetricSolve s = solve_metric_system(grad, hess, values, lambda);
        CHECK((s.g_inv - ginv).cwiseAbs().maxCoeff() < 1e-9);
        CHECK((s.drift - b).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(s.spd);
        CHECK(s.residual < 1e-9);
    }
}

TEST_CASE("total volume from the constant mode")
{
    const BoundarySpectralData d = forward_data(metric_from_preset("speed-profile-1d", {{"N", 512}}), 10);
    const GridManifold m = metric_from_preset("speed-profile-1d", {{"N", 512}});
    CHECK(recover_total_volume(d).volume == doctest::Approx(m.volume()).epsilon(1e-8));
}

TEST_CASE("interior eigenfunction values on the flat interval")
{
    const BoundarySpectralData d = forward_data(metric_from_preset("flat-interval"), 100);
    const double x = 1.3;
    Vec h(2);
    h << x, kPi - x;
    const double phi1 = 1.0 / std::sqrt(kPi);
    ValueOptions opt;
    opt.modes = 5;
    // an exact candidate loses the 1/32 slab at K = 100, see the travel-length band bias
    opt.widths = {1.0 / 8.0, 1.0 / 16.0};
    const ValueEstimate v = eigenfunction_values_at(d, h, phi1, opt);
    for (int j = 0; j < 5; ++j) {
        const double truth = j == 0 ? phi1 : std::sqrt(2.0 / kPi) * std::cos(j * x);
        CHECK(std::abs(v.values[j] - truth) < 5e-3);
    }
}

TEST_CASE("recovered distance matrix is symmetric with zero diagonal")
{
    std::vector<InteriorPoint> pts(5);
    for (int i = 0; i < 5; ++i) {
        pts[i].id = i;
        pts[i].label = Vec::Constant(1, 0.3 * i);
        pts[i].chart = {1};
        pts[i].values = Vec::Constant(3, 0.0);
        pts[i].values[1] = 0.3 * i;  // chart coordinate equals the label
        pts[i].g_inv = Mat::Constant(1, 1, 4.0);
        pts[i].valid = true;
    }
    const Mat D = recovered_distance_matrix(pts);
    CHECK((D - D.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(D.diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK(D(0, 4) == doctest::Approx(0.6));  // g = 1/4, length 1.2 / 2
}
