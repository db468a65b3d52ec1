#include <cmath>

#include "bclab/stability.hpp"
#include "doctest.h"

using namespace bclab;

TEST_CASE("spearman")
{
    CHECK(spearman({1, 2, 3, 4}, {10, 20, 25, 100}) == doctest::Approx(1.0));
    CHECK(spearman({1, 2, 3, 4}, {4, 3, 2, 1}) == doctest::Approx(-1.0));
    CHECK(spearman({1, 2, 3}, {1, 1, 2}) == doctest::Approx(std::sqrt(0.75)));
    CHECK(std::isnan(spearman({1, 2, 3}, {5, 5, 5})));
}

TEST_CASE("spectral data distance is a pseudometric on gauge classes")
{
    const BoundarySpectralData d = forward_data(metric_from_preset("flat-rectangle", {{"nx", 20}, {"ny", 20}}), 15);
    const BoundarySpectralData mixed = perturb_data(d, PerturbOptions{-1, 0.0, true, 9, 1e-6});
    CHECK(spectral_data_distance(d, d).total < 1e-14);
    CHECK(spectral_data_distance(d, mixed).total < 1e-8);
    CHECK(spectral_data_distance(d, mixed).structure_match);

    std::vector<BoundarySpectralData> v;
    for (std::uint64_t s = 1; s <= 4; ++s) v.push_back(perturb_data(d, PerturbOptions{-1, 1e-3 * s, false, s, 1e-6}));
    for (size_t a = 0; a < v.size(); ++a)
        for (size_t b = 0; b < v.size(); ++b)
            for (size_t c = 0; c < v.size(); ++c) {
                const double ab = spectral_data_distance(v[a], v[b], 5e-2).total;
                const double bc = spectral_data_distance(v[b], v[c], 5e-2).total;
                const double ac = spectral_data_distance(v[a], v[c], 5e-2).total;
                CHECK(ac <= ab + bc + 1e-6);
            }
    // symmetric by construction
    CHECK(spectral_data_distance(v[0], v[1], 5e-2).total ==
          doctest::Approx(spectral_data_distance(v[1], v[0], 5e-2).total));
}

TEST_CASE("distance grows with noise")
{
    const BoundarySpectralData d = forward_data(metric_from_preset("flat-interval", {{"N", 256}}), 20);
    double prev = 0.0;
    for (double s : {1e-4, 1e-3, 1e-2}) {
        const double x = spectral_data_distance(d, perturb_data(d, PerturbOptions{-1, s, false, 2, 1e-6})).total;
        CHECK(x > prev);
        prev = x;
    }
}
