#include <random>

#include "bclab/subspace.hpp"
#include "doctest.h"

using namespace bclab;

namespace {

struct Interval {
    GridManifold m = metric_from_preset("flat-interval", {{"N", 512}});
    EigenSystem es = solve_eigensystem(assemble_laplacian(m, BoundaryCondition::neumann), m, 60);
    BoundarySpectralData d = boundary_traces(es, m);
    BoundaryRegion left{{0}, "endpoint0"};
};

const Interval& interval()
{
    static const Interval s;
    return s;
}

}  // namespace

TEST_CASE("principal angles of a subspace with itself vanish")
{
    const Subspace s = wave_span(interval().d, interval().left, 1.0);
    REQUIRE(s.dim() > 0);
    CHECK(principal_angles(s, s).maxCoeff() < 1e-5);
    CHECK((s.basis.transpose() * s.basis - Mat::Identity(s.dim(), s.dim())).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("wave spans grow with t")
{
    int prev = 0;
    for (double t : {0.3, 0.8, 1.5, 2.5}) {
        const int dim = wave_span(interval().d, interval().left, t).dim();
        CHECK(dim >= prev);
        prev = dim;
    }
    CHECK(prev > 0);
}

TEST_CASE("wave span sits inside the oracle of its domain of influence")
{
    const Interval& s = interval();
    std::vector<char> mask(s.m.num_nodes());
    for (int v = 0; v < s.m.num_nodes(); ++v) mask[v] = s.m.coords(v)[0] <= 1.2 + 1e-12;
    const Subspace w = wave_span(s.d, s.left, 1.2);
    CHECK(principal_angles(w, oracle_subspace(s.es, mask)).maxCoeff() < 5.0);
    CHECK(concentration_angles(s.es, mask, w).maxCoeff() < 10.0);
}

TEST_CASE("oracle of every node is the full space")
{
    const Interval& s = interval();
    const Subspace o = oracle_subspace(s.es, std::vector<char>(s.m.num_nodes(), 1));
    CHECK(o.dim() == s.es.K());
    CHECK_THROWS_AS(oracle_subspace(s.es, std::vector<char>(s.m.num_nodes(), 0)), Error);
}

TEST_CASE("kappa leaves spans unchanged")
{
    const Interval& s = interval();
    Vec kappa(s.d.num_boundary());
    kappa.setConstant(3.7);
    const Subspace a = wave_span(s.d, s.left, 1.0);
    const Subspace b = wave_span(with_kappa(s.d, kappa), s.left, 1.0);
    REQUIRE(a.dim() == b.dim());
    CHECK(principal_angles(a, b).maxCoeff() < 1e-3);
}

TEST_CASE("intersection: idempotent, full space is neutral, order does not matter")
{
    const Interval& s = interval();
    const Subspace a = wave_span(s.d, s.left, 2.0);
    const Subspace b = wave_span(s.d, {{1}, "endpoint1"}, 2.0);
    const int K = s.es.K();
    const Subspace aa = stacked_intersection(K, {a, a}, {});
    CHECK(aa.dim() == a.dim());
    CHECK(stacked_intersection(K, {a, full_subspace(K)}, {}).dim() == a.dim());
    const Subspace ab = subspace_algebra(SubspaceExpr::intersect({SubspaceExpr::of(a), SubspaceExpr::of(b)}));
    const Subspace ba = subspace_algebra(SubspaceExpr::intersect({SubspaceExpr::of(b), SubspaceExpr::of(a)}));
    REQUIRE(ab.dim() == ba.dim());
    if (ab.dim()) CHECK(principal_angles(ab, ba).maxCoeff() < 10.0);
    // a ⊖ a is empty
    CHECK(subspace_algebra(SubspaceExpr::minus(SubspaceExpr::of(a), SubspaceExpr::of(a))).dim() == 0);
}

TEST_CASE("projector entries match the explicit projector")
{
    const Subspace a = wave_span(interval().d, interval().left, 1.0);
    const Mat P = a.projector();
    CHECK(projector_entry(a, 0, 0) == doctest::Approx(P(0, 0)));
    CHECK(projector_entry(a, 3, 5) == doctest::Approx(P(3, 5)));
}
