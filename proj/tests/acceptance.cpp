// acceptance <n>: runs criterion n (1-9) and prints one PASS/FAIL line.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>

#include "bclab/geodesics.hpp"
#include "bclab/stability.hpp"

using namespace bclab;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool report(int n, bool ok, const std::string& detail)
{
    std::printf("criterion %d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
    return ok;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0, double e = 0)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a, b, c, d, e);
    return buf;
}

bool criterion1()
{
    const auto t0 = Clock::now();
    const GridManifold m = metric_from_preset("flat-interval", {{"N", 4096}});
    const EigenSystem es = solve_eigensystem(assemble_laplacian(m, BoundaryCondition::neumann), m, 10);
    double err = 0.0;
    for (int k = 1; k < 10; ++k) err = std::max(err, std::abs(es.eigenvalues[k] - k * k) / (k * k));
    err = std::max(err, std::abs(es.eigenvalues[0]));
    const double ortho = orthonormality_residual(es);
    const double t = seconds_since(t0);
    return report(1, err < 1e-4 && ortho < 1e-10 && t < 10,
                  fmt("max rel eigenvalue error %.2e, orthonormality %.2e, %.1fs", err, ortho, t));
}

bool criterion2()
{
    const auto t0 = Clock::now();
    const GridManifold m = metric_from_preset("flat-interval");
    const double t = 1.5;
    const BoundarySource f = pulse_source({0}, t, 0.1, 0.6, 3001);
    const SynthComparison a = compare_synthesis(m, 200, f, t);
    const SynthComparison b = compare_synthesis(m, 400, f, t, 0.5 * a.dt);
    const double s = seconds_since(t0);
    return report(2, a.mismatch < 1e-2 && b.mismatch < a.mismatch && s < 30,
                  fmt("K=200 mismatch %.2e, K=400 dt/2 mismatch %.2e, %.1fs", a.mismatch, b.mismatch, s));
}

bool criterion3()
{
    const auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    {
        const GridManifold m = metric_from_preset("flat-interval");
        const EigenSystem es = solve_eigensystem(assemble_laplacian(m, BoundaryCondition::neumann), m, 150);
        const BoundarySpectralData d = boundary_traces(es, m);
        const BoundaryRegion g0{{0}, "endpoint0"};
        std::vector<char> mask(m.num_nodes());
        for (int v = 0; v < m.num_nodes(); ++v) mask[v] = m.coords(v)[0] <= kPi / 2 + 1e-12;
        const double span = principal_angles(wave_span(d, g0, kPi / 2), oracle_subspace(es, mask)).maxCoeff();

        const Subspace shell = stacked_intersection(150, {wave_span(d, g0, 2 * kPi / 3, FamilyOptions{0.9})},
                                                    {wave_span(d, g0, kPi / 3, FamilyOptions{1.0})});
        for (int v = 0; v < m.num_nodes(); ++v) {
            const double x = m.coords(v)[0];
            mask[v] = x > kPi / 3 && x <= 2 * kPi / 3;
        }
        const double sh = principal_angles(shell, oracle_subspace(es, mask)).maxCoeff();
        ok = span < 5 && sh < 10;
        detail = fmt("1D max angle %.2f deg, shell max %.2f deg", span, sh);
    }
    {
        const GridManifold m = metric_from_preset("warped-rectangle");
        const EigenSystem es = solve_eigensystem(assemble_laplacian(m, BoundaryCondition::neumann), m, 150);
        const BoundarySpectralData d = boundary_traces(es, m);
        InfluenceSpec spec;
        spec.regions = {boundary_ball(m, 0, 0.35), boundary_ball(m, m.shape[0] - 1, 0.35)};
        spec.t_plus = {0.8, 0.8};
        spec.t_minus = {0.3, 0.3};
        const Subspace s = sliced_subspace(d, spec);
        const std::vector<char> mask = domain_of_influence(m, spec, DistanceOptions{3});
        const Subspace o = oracle_subspace(es, mask);
        auto median = [](Vec a) {
            if (!a.size()) return 90.0;
            std::sort(a.data(), a.data() + a.size());
            const int n = a.size();
            return n % 2 ? a[n / 2] : 0.5 * (a[n / 2 - 1] + a[n / 2]);
        };
        const double med = median(principal_angles(s, o));
        const double conc = median(concentration_angles(es, mask, s));
        // A full oracle contains every slice, so its angles carry no information.
        const bool informative = o.dim() < o.K();
        ok = ok && s.dim() > 0 && informative && med < 15;
        detail += fmt(", 2D slice dim %.0f oracle dim %.0f/%.0f median %.2f deg, concentration median %.2f deg", s.dim(),
                      o.dim(), o.K(), med, conc);
        if (!informative) detail += " (oracle is the full space)";
    }
    const double t = seconds_since(t0);
    return report(3, ok && t < 180, detail + fmt(", %.1fs", t));
}

bool criterion4()
{
    const auto t0 = Clock::now();
    const GridManifold m = metric_from_preset("speed-profile-1d");
    const EigenSystem es = solve_eigensystem(assemble_laplacian(m, BoundaryCondition::neumann), m, 100);
    const BoundarySpectralData d = boundary_traces(es, m);
    const ReconstructionResult r = reconstruct(d);
    const ComparisonReport cmp = compare_reconstruction(r, m, es);
    // ∫ dx / (1 + 0.3 sin x) over [0, π], composite Simpson
    const int n = 20000;
    double L = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double x = kPi * i / n;
        L += (i == 0 || i == n ? 1 : (i % 2 ? 4 : 2)) / (1.0 + 0.3 * std::sin(x));
    }
    L *= kPi / n / 3.0;
    const double rel = std::abs(r.representation.L_hat - L) / L;
    const double t = seconds_since(t0);
    const bool ok = rel < 0.01 && cmp.distance_error < 0.05 && r.distances.rows() == 20 && t < 300;
    return report(4, ok,
                  fmt("L_hat %.5f vs %.5f (rel %.2e), distance error %.2e on %.0f points", r.representation.L_hat, L,
                      rel, cmp.distance_error, r.distances.rows()) +
                      fmt(", %.1fs", t));
}

bool criterion5()
{
    const auto t0 = Clock::now();
    const BranchingWitness w = branching_witness(HartmanKind::power, 1, 1.0, 1e-3);
    const double res = std::max(w.trivial.max_residual, w.branch.max_residual);
    const double fi = std::max(w.trivial.max_first_integral, w.branch.max_first_integral);
    const double t = seconds_since(t0);
    const bool ok = res < 1e-6 && fi < 1e-6 && w.jet_gap < 1e-9 && std::abs(w.separation_at_end - 1.0) < 1e-9 && t < 5;
    return report(5, ok,
                  fmt("residual %.2e, first integral %.2e, jet gap %.2e, separation %.6f, %.2fs", res, fi, w.jet_gap,
                      w.separation_at_end, t));
}

bool criterion6()
{
    const GridManifold m = metric_from_preset("warped-rectangle");
    const std::vector<Point> ps{Point(0.3, 0.3), Point(0.5, 0.5), Point(0.6, 0.4)};
    const std::vector<Point> vs{Point(1, 0), Point(0, 1), Point(0.7, 0.7), Point(-0.6, 0.5)};
    const ExpRate r = exp_map_convergence(m, {1e-1, 1e-2, 1e-3, 1e-4}, ps, vs, 0.2, 1e-3);
    return report(6, std::abs(r.slope - 1.0) <= 0.2,
                  fmt("slope %.4f, errors %.2e .. %.2e", r.slope, r.max_error.front(), r.max_error.back()));
}

bool criterion7()
{
    const GridManifold m = metric_from_preset("flat-interval");
    const BoundarySpectralData d = forward_data(m, 100);
    const BoundarySpectralData mixed = perturb_data(d, PerturbOptions{-1, 0.0, true, 7, 1e-6});
    const double sd = spectral_data_distance(d, mixed).total;
    const ReconstructionResult a = reconstruct(d);
    const ReconstructionResult b = reconstruct(mixed);
    double dd = a.distances.rows() == b.distances.rows() ? (a.distances - b.distances).cwiseAbs().maxCoeff() : 1e300;

    // κ only rescales source amplitudes, so the spans must not move.
    const GridManifold r = metric_from_preset("warped-rectangle");
    const BoundarySpectralData d2 = forward_data(r, 100);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.5, 2.0);
    Vec kappa(d2.num_boundary());
    for (int i = 0; i < kappa.size(); ++i) kappa[i] = u(rng);
    const BoundarySpectralData dk = with_kappa(d2, kappa);
    const BoundaryRegion g = boundary_ball(r, 0, 0.5);
    const double ang = principal_angles(wave_span(d2, g, 0.6), wave_span(dk, g, 0.6)).maxCoeff();
    const bool ok = sd < 1e-8 && dd < 1e-8 && ang < 1.0;
    return report(7, ok, fmt("spectral distance %.2e, distance-matrix change %.2e, kappa angle %.2e deg", sd, dd, ang));
}

bool criterion8()
{
    const auto t0 = Clock::now();
    const StabilityReport r = run_stability_sweep(ExperimentConfig{});
    const TrendStat& tr = r.trends.front();
    bool baseline = true;
    int failed = 0;
    for (const StabilityRow& row : r.rows) {
        failed += row.status != "ok";
        if (row.sigma == 0.0)
            baseline = baseline && row.status == "ok" && row.representation_distance == 0.0 &&
                       std::abs(row.metric_error - r.clean_metric_error) <= 1e-12 * std::max(1.0, r.clean_metric_error);
    }
    const double t = seconds_since(t0);
    // NaN Spearman (too few surviving σ levels) compares false
    const bool ok = tr.spearman_representation > 0.9 && tr.spearman_metric > 0.9 && baseline && t < 900;
    return report(8, ok,
                  fmt("spearman(sigma, representation) %.3f, spearman(sigma, metric) %.3f", tr.spearman_representation,
                      tr.spearman_metric) +
                      (baseline ? ", baseline matches" : ", baseline differs") + fmt(", failed cells %.0f, %.1fs", failed, t));
}

// Accuracy of is_boundary_distance on true rows and margin ≥ 0.1 negatives.
struct Battery {
    int correct = 0, total = 0, false_accept = 0, false_reject = 0;
};

void score(Battery& b, const BoundarySpectralData& d, const Vec& h, bool truth, const DetectionOptions& opt)
{
    const bool acc = is_boundary_distance(d, h, opt).accepted;
    b.total++;
    if (acc == truth) b.correct++;
    else if (acc) b.false_accept++;
    else b.false_reject++;
}

Battery battery(const GridManifold& m, int K, int positives, int negatives, std::uint64_t seed)
{
    const BoundarySpectralData d = forward_data(m, K);
    const Mat table = boundary_distance_table(m, DistanceOptions{3});
    const DetectionOptions opt;
    std::mt19937_64 rng(seed);
    Battery b;
    IVec interior;
    for (int x = 0; x < m.num_nodes(); ++x)
        if (table.row(x).minCoeff() > 0.15) interior.push_back(x);
    std::uniform_int_distribution<size_t> pick(0, interior.size() - 1);
    for (int i = 0; i < positives; ++i) score(b, d, table.row(interior[pick(rng)]).transpose(), true, opt);
    std::normal_distribution<double> gauss(0.0, 0.1);
    int made = 0;
    for (int tries = 0; made < negatives && tries < 100 * negatives; ++tries) {
        const Vec r = table.row(interior[pick(rng)]).transpose();
        Vec h;
        if (tries % 2 == 0) {
            h = r.array() + (rng() % 2 ? 0.1 : -0.1) * (1.0 + 0.5 * std::abs(gauss(rng)));
        } else {
            h = r;
            for (int z = 0; z < h.size(); ++z) h[z] += 2.0 * gauss(rng);
        }
        h = h.cwiseMax(0.0);
        if (candidate_margin(table, h) < 0.1) continue;
        score(b, d, h, false, opt);
        ++made;
    }
    return b;
}

bool criterion9()
{
    const auto t0 = Clock::now();
    const Battery a = battery(metric_from_preset("flat-interval"), 100, 20, 20, 3);
    const Battery b = battery(metric_from_preset("warped-rectangle"), 150, 10, 10, 5);
    const double acc1 = double(a.correct) / a.total, acc2 = double(b.correct) / b.total;
    const double t = seconds_since(t0);
    return report(9, acc1 >= 0.95 && acc2 >= 0.95,
                  fmt("flat-interval %.3f (false accept %.0f, false reject %.0f), ", acc1, a.false_accept,
                      a.false_reject) +
                      fmt("warped-rectangle %.3f (false accept %.0f, false reject %.0f), %.1fs", acc2, b.false_accept,
                          b.false_reject, t));
}

}  // namespace

int main(int argc, char** argv)
{
    if (argc != 2) {
        std::fprintf(stderr, "usage: acceptance <1-9>\n");
        return 2;
    }
    const int n = std::atoi(argv[1]);
    try {
        switch (n) {
        case 1: return criterion1() ? 0 : 1;
        case 2: return criterion2() ? 0 : 1;
        case 3: return criterion3() ? 0 : 1;
        case 4: return criterion4() ? 0 : 1;
        case 5: return criterion5() ? 0 : 1;
        case 6: return criterion6() ? 0 : 1;
        case 7: return criterion7() ? 0 : 1;
        case 8: return criterion8() ? 0 : 1;
        case 9: return criterion9() ? 0 : 1;
        default: std::fprintf(stderr, "criterion must be 1-9\n"); return 2;
        }
    } catch (const std::exception& e) {
        report(n, false, std::string("error: ") + e.what());
        return 1;
    }
}
