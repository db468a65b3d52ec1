#include <cmath>

#include "bclab/wave.hpp"
#include "doctest.h"

using namespace bclab;

TEST_CASE("time weights are exact for linear integrands vanishing at t")
{
    const Vec t = Vec::LinSpaced(101, 0.0, 1.0);
    for (double T : {1.0, 0.537, 0.25}) {
        double s = 0.0;
        for (auto [i, w] : time_weights(t, T)) s += w * (T - t[i]);
        CHECK(s == doctest::Approx(0.5 * T * T).epsilon(1e-12));
    }
}

TEST_CASE("sine kernel limit")
{
    CHECK(sine_kernel(0.0, 0.7, 1e-12) == doctest::Approx(0.7));
    CHECK(sine_kernel(4.0, 0.7, 1e-12) == doctest::Approx(std::sin(1.4) / 2.0));
}

TEST_CASE("blagovestchenskii agrees with the direct solver and improves under refinement")
{
    const GridManifold m = metric_from_preset("flat-interval", {{"N", 512}});
    const BoundarySource f = pulse_source({0}, 1.0, 0.1, 0.5, 2001);
    const SynthComparison a = compare_synthesis(m, 60, f, 1.0);
    const SynthComparison b = compare_synthesis(m, 120, f, 1.0, 0.5 * a.dt);
    CHECK(a.mismatch < 1e-2);
    CHECK(b.mismatch < a.mismatch);
}

TEST_CASE("synthesis is linear in the source")
{
    const BoundarySpectralData d = forward_data(metric_from_preset("flat-interval", {{"N", 256}}), 30);
    const BoundarySource f = pulse_source({0}, 1.0, 0.1, 0.5, 801);
    BoundarySource g = f;
    g.values *= 3.0;
    CHECK((blagovestchenskii(d, g, 0.9) - 3.0 * blagovestchenskii(d, f, 0.9)).norm() < 1e-12);
    // nothing has happened before the pulse starts
    CHECK(blagovestchenskii(d, f, 0.05).norm() == 0.0);
}

TEST_CASE("direct solver conserves energy after the source stops")
{
    const GridManifold m = metric_from_preset("flat-interval", {{"N", 256}});
    const BoundarySource f = pulse_source({0}, 2.0, 0.1, 0.4, 2001);
    const DirectWaveResult r = direct_wave_solve(m, f, 2.0, 0.5 * leapfrog_dt_limit(m));
    const int n = r.energy.size();
    double lo = 1e300, hi = 0.0;
    for (int i = 0; i < n; ++i)
        if (r.times[i] > 0.6) {
            lo = std::min(lo, r.energy[i]);
            hi = std::max(hi, r.energy[i]);
        }
    CHECK((hi - lo) / hi < 1e-2);
}
