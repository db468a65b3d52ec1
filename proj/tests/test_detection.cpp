#include <cmath>

#include "bclab/detection.hpp"
#include "doctest.h"

using namespace bclab;

namespace {

const BoundarySpectralData& interval_data()
{
    static const BoundarySpectralData d = forward_data(metric_from_preset("flat-interval", {{"N", 512}}), 80);
    return d;
}

Vec h1(double a, double b)
{
    Vec h(2);
    h << a, b;
    return h;
}

}  // namespace

TEST_CASE("prefilter rejects impossible candidates")
{
    const BoundarySpectralData& d = interval_data();
    CHECK(lipschitz_prefilter(d, h1(1.0, kPi - 1.0)));
    CHECK_FALSE(lipschitz_prefilter(d, h1(-0.1, 1.0)));
    CHECK_FALSE(lipschitz_prefilter(d, h1(NAN, 1.0)));
    CHECK_FALSE(lipschitz_prefilter(d, Vec::Ones(3)));
}

TEST_CASE("1D slab spec clamps t minus at zero")
{
    const InfluenceSpec s = slab_spec(interval_data(), h1(0.05, 3.0), 0.1, 2, 0.5);
    REQUIRE(s.t_minus.size() == 2);
    CHECK(s.t_minus[0] == 0.0);
    CHECK(s.t_plus[0] == doctest::Approx(0.15));
    CHECK(s.t_minus[1] == doctest::Approx(2.9));
}

TEST_CASE("true boundary distance functions pass, shifted ones fail")
{
    const BoundarySpectralData& d = interval_data();
    for (double x : {0.8, 1.5, 2.2}) {
        CAPTURE(x);
        CHECK(is_boundary_distance(d, h1(x, kPi - x)).accepted);
        CHECK_FALSE(is_boundary_distance(d, h1(x + 0.3, kPi - x + 0.3)).accepted);
        CHECK_FALSE(is_boundary_distance(d, h1(x - 0.3, kPi - x - 0.3)).accepted);
    }
}

TEST_CASE("travel length of the flat interval")
{
    const TravelLength t = recover_travel_length(interval_data());
    CHECK(t.coarse == doctest::Approx(kPi).epsilon(0.03));
    CHECK(t.refined == doctest::Approx(kPi).epsilon(0.01));
}

TEST_CASE("candidate margin and representation distance")
{
    Mat table(3, 2);
    table << 0, 3, 1, 2, 2, 1;
    CHECK(candidate_margin(table, h1(1.0, 2.0)) == 0.0);
    CHECK(candidate_margin(table, h1(1.2, 2.1)) == doctest::Approx(0.2));
    DistanceRepresentation a, b;
    a.candidates = table;
    a.accepted = {1, 1, 0};
    b.candidates = table;
    b.accepted = {1, 1, 1};
    CHECK(representation_distance(a, a) == 0.0);
    CHECK(representation_distance(a, b) == doctest::Approx(1.0));
}
