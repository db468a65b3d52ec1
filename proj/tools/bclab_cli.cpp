// bclab: batch front-end. Exit codes: 0 ok, 1-6 ErrorCode, 7 usage, 8 internal.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "bclab/config.hpp"
#include "bclab/geodesics.hpp"
#include "bclab/io.hpp"
#include "bclab/stability.hpp"
#include "bclab/wave.hpp"

using namespace bclab;

namespace {

constexpr int kExitUsage = 7;
constexpr int kExitInternal = 8;

struct Common {
    std::string config_file;
    std::vector<std::string> sets;

    Config load() const
    {
        Config c;
        if (!config_file.empty()) c.load_file(config_file);
        for (const std::string& s : sets) c.set_assignment(s);
        c.validate();
        return c;
    }
};

void add_common(CLI::App* app, Common& common)
{
    app->add_option("--config", common.config_file, "key = value config file");
    app->add_option("--set", common.sets, "override, key=value (repeatable)");
}

std::ofstream open_out(const std::string& path)
{
    std::ofstream out(path);
    require(out.good(), ErrorCode::io, "cannot write " + path);
    return out;
}

GridManifold build_manifold(const Config& c) { return metric_from_preset(c.str("preset"), c.preset_params()); }

json vec_json(const Vec& v)
{
    json a = json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

// ---- forward

struct ForwardArgs {
    std::string out, manifold_out, candidates_out;
};

int cmd_forward(const Config& c, const ForwardArgs& a)
{
    const GridManifold m = build_manifold(c);
    const BoundaryCondition bc = parse_boundary_condition(c.str("bc"));
    const EigenSystem es = solve_eigensystem(assemble_laplacian(m, bc), m, c.integer("K"));
    BoundarySpectralData d = boundary_traces(es, m);
    const double sigma = c.num("sigma");
    const int K_trunc = c.integer("K_trunc");
    if (sigma > 0 || c.flag("mix") || K_trunc > 0)
        d = perturb_data(d, PerturbOptions{K_trunc, sigma, c.flag("mix"), static_cast<std::uint64_t>(c.integer("seed")),
                                           c.num("cluster_tol")});
    write_spectral_data(d, a.out);
    if (!a.manifold_out.empty()) write_manifold(m, a.manifold_out);
    if (!a.candidates_out.empty()) {
        require(m.dim == 2, ErrorCode::invalid_argument, "candidate lattices are only needed in 2D");
        json h;
        h["format"] = "bclab-candidates/1";
        h["preset"] = m.preset;
        write_tagged(a.candidates_out, h, boundary_distance_table(m, distance_options(c)));
    }
    std::printf("# %s %s K=%d orthonormality=%.3e\n", m.preset.c_str(), to_string(bc).c_str(), d.K(),
                orthonormality_residual(es));
    std::printf("k,lambda\n");
    for (int k = 0; k < d.K(); ++k) std::printf("%d,%.12g\n", k + 1, d.eigenvalues[k]);
    return 0;
}

// ---- synth

struct SynthArgs {
    std::string out;
    bool refine = false;
};

int cmd_synth(const Config& c, const SynthArgs& a)
{
    const GridManifold m = build_manifold(c);
    require(m.dim == 1, ErrorCode::invalid_argument, "synth compares on 1D presets");
    const std::vector<double> pulse = c.nums("synth.pulse");
    require(pulse.size() == 2 && pulse[0] < pulse[1], ErrorCode::config, "synth.pulse must be t0,t1 with t0 < t1");
    const double t = c.num("synth.t");
    const int K = c.integer("K");
    const BoundarySource f = pulse_source({0}, t, pulse[0], pulse[1], 3001);
    const SynthComparison base = compare_synthesis(m, K, f, t, c.num("synth.dt"), c.num("synth.cfl"));
    std::printf("K,dt,mismatch\n%d,%.6e,%.6e\n", K, base.dt, base.mismatch);
    if (a.refine) {
        const SynthComparison fine = compare_synthesis(m, 2 * K, f, t, 0.5 * base.dt);
        std::printf("%d,%.6e,%.6e\n", 2 * K, fine.dt, fine.mismatch);
        std::printf("# refinement %s\n", fine.mismatch < base.mismatch ? "decreases" : "does not decrease");
    }
    if (!a.out.empty()) {
        Mat rows(K, 3);
        for (int k = 0; k < K; ++k) rows.row(k) << k + 1, base.spectral[k], base.direct[k];
        write_csv(a.out, {"k", "blagovestchenskii", "direct"}, rows);
    }
    return 0;
}

// ---- reconstruct

struct ReconstructArgs {
    std::string data, out, candidates, manifold;
    bool validate = false;
};

int cmd_reconstruct(const Config& c, const ReconstructArgs& a)
{
    require(!a.validate || !a.manifold.empty(), ErrorCode::invalid_argument, "--validate needs --manifold");
    require(a.validate || a.manifold.empty(), ErrorCode::invalid_argument, "--manifold is only read under --validate");
    const BoundarySpectralData d = read_spectral_data(a.data);
    Mat lattice;
    if (d.dim == 2) {
        require(!a.candidates.empty(), ErrorCode::invalid_argument, "2D data needs --candidates");
        lattice = read_tagged(a.candidates, "bclab-candidates/1").second;
    }
    const ReconstructionOptions opt = reconstruction_options(c);
    const Mat* lat = d.dim == 2 ? &lattice : nullptr;
    const ReconstructionResult r =
        d.kind == BoundaryCondition::dirichlet ? dirichlet_recover(d, opt, lat) : reconstruct(d, opt, lat);

    ComparisonReport cmp;
    if (a.validate) {
        const GridManifold m = read_manifold(a.manifold);
        const EigenSystem es = solve_eigensystem(assemble_laplacian(m, d.kind), m, d.K());
        cmp = compare_reconstruction(r, m, es, distance_options(c));
    }

    std::ofstream out = open_out(a.out);
    json head{{"format", "bclab-reconstruction/1"},
              {"kind", to_string(r.kind)},
              {"dim", r.dim},
              {"K", d.K()},
              {"volume", r.volume.volume},
              {"L_hat", r.representation.L_hat},
              {"config", c.to_json()}};
    out << head.dump() << '\n';
    for (size_t i = 0; i < r.points.size(); ++i) {
        const InteriorPoint& p = r.points[i];
        json j{{"id", p.id},        {"label", vec_json(p.label)}, {"values", vec_json(p.values)},
               {"chart", p.chart},  {"chart_sigma", p.chart_sigma}, {"residual", p.residual},
               {"valid", p.valid},  {"flag", p.flag}};
        j["g_inv"] = vec_json(Eigen::Map<const Vec>(p.g_inv.data(), p.g_inv.size()));
        j["drift"] = vec_json(p.drift);
        if (r.kind == BoundaryCondition::dirichlet) j["psi1"] = p.psi1;
        if (a.validate && i < cmp.matched_nodes.size()) j["truth_node"] = cmp.matched_nodes[i];
        out << j.dump() << '\n';
    }
    json summary{{"summary", true},
                 {"points", r.points.size()},
                 {"accepted_candidates", r.representation.accepted_rows().rows()},
                 {"spd_rate", r.spd_rate},
                 {"report_subnet", r.report_subnet}};
    json D = json::array();
    for (int i = 0; i < r.distances.rows(); ++i) D.push_back(vec_json(r.distances.row(i).transpose()));
    summary["distances"] = D;
    if (a.validate) {
        summary["value_error"] = cmp.value_error;
        summary["distance_error"] = cmp.distance_error;
        summary["metric_error"] = cmp.metric_error;
        summary["match_margin"] = cmp.match_margin;
    }
    out << summary.dump() << '\n';

    std::printf("points %zu  spd_rate %.3f", r.points.size(), r.spd_rate);
    if (r.dim == 1) std::printf("  L_hat %.6f", r.representation.L_hat);
    if (a.validate) std::printf("  distance_error %.4e  metric_error %.4e", cmp.distance_error, cmp.metric_error);
    std::printf("\n");
    return 0;
}

// ---- geodesics

HartmanKind hartman_kind(const Config& c)
{
    const std::string& k = c.str("geodesics.kind");
    if (k == "power") return HartmanKind::power;
    if (k == "log") return HartmanKind::log;
    fail(ErrorCode::config, "geodesics.kind must be power or log");
}

GridManifold geodesic_manifold(const Config& c)
{
    const std::string& name = c.str("geodesics.preset");
    return metric_from_preset(name, name == c.str("preset") ? c.preset_params() : Params{});
}

int cmd_geodesics(const Config& c, const std::string& out)
{
    const std::string& demo = c.str("geodesics.demo");
    if (demo == "branching") {
        const BranchingWitness w =
            branching_witness(hartman_kind(c), c.integer("geodesics.k"), c.num("geodesics.u_max"), c.num("geodesics.du"));
        std::printf("curve,max_residual,max_first_integral,v0,dv0\n");
        std::printf("trivial,%.3e,%.3e,%.3e,%.3e\n", w.trivial.max_residual, w.trivial.max_first_integral,
                    w.trivial.value_at_zero, w.trivial.slope_at_zero);
        std::printf("branch,%.3e,%.3e,%.3e,%.3e\n", w.branch.max_residual, w.branch.max_first_integral,
                    w.branch.value_at_zero, w.branch.slope_at_zero);
        std::printf("# jet_gap %.3e separation_at_end %.6f\n", w.jet_gap, w.separation_at_end);
        if (!out.empty()) {
            const int n = w.trivial.u.size();
            Mat rows(n, 5);
            for (int i = 0; i < n; ++i)
                rows.row(i) << w.trivial.u[i], w.trivial.residual[i], w.trivial.first_integral[i], w.branch.residual[i],
                    w.branch.first_integral[i];
            write_csv(out, {"u", "trivial_residual", "trivial_first_integral", "branch_residual", "branch_first_integral"},
                      rows);
        }
    } else if (demo == "exp-rate") {
        const GridManifold m = geodesic_manifold(c);
        require(m.dim == 2, ErrorCode::invalid_argument, "exp-rate runs on 2D presets");
        const auto e = m.extent();
        std::vector<Point> ps, vs{Point(1, 0), Point(0, 1), Point(0.7, 0.7), Point(-0.6, 0.5)};
        for (auto [fx, fy] : {std::pair{0.3, 0.3}, {0.5, 0.5}, {0.6, 0.4}})
            ps.emplace_back(m.origin[0] + fx * e[0], m.origin[1] + fy * e[1]);
        const ExpRate r = exp_map_convergence(m, c.nums("geodesics.eps"), ps, vs, c.num("geodesics.t"), c.num("geodesics.dt"));
        std::printf("eps,max_error\n");
        for (size_t i = 0; i < r.eps.size(); ++i) std::printf("%.3e,%.6e\n", r.eps[i], r.max_error[i]);
        std::printf("# slope %.4f\n", r.slope);
        if (!out.empty()) {
            Mat rows(r.eps.size(), 2);
            for (size_t i = 0; i < r.eps.size(); ++i) rows.row(i) << r.eps[i], r.max_error[i];
            write_csv(out, {"eps", "max_error"}, rows);
        }
    } else if (demo == "osgood") {
        const std::string& w = c.str("geodesics.omega");
        const double p = c.num("geodesics.omega_power");
        const int n = c.integer("geodesics.scales");
        Vec t(n), om(n);
        for (int i = 0; i < n; ++i) {
            t[i] = std::pow(2.0, -(i + 1));
            if (w == "t") om[i] = t[i];
            else if (w == "tlog") om[i] = t[i] * std::log(1.0 / t[i]);
            else if (w == "power") om[i] = std::pow(t[i], p);
            else fail(ErrorCode::config, "geodesics.omega must be t, tlog or power");
        }
        const OsgoodReport r =
            osgood_classify(t, om, OsgoodOptions{c.num("osgood.decay_threshold"), c.integer("osgood.min_scales")});
        std::printf("omega %s unique_flow %s decay_exponent %.4f log_slope %.4f\n", w.c_str(),
                    r.unique_flow ? "yes" : "no", r.decay_exponent, r.log_slope);
        if (!out.empty()) {
            Mat rows(r.t_min.size(), 2);
            rows << r.t_min, r.partial_integrals;
            write_csv(out, {"t_min", "partial_integral"}, rows);
        }
    } else if (demo == "minimality") {
        const GridManifold m = geodesic_manifold(c);
        require(m.dim == 2, ErrorCode::invalid_argument, "minimality runs on 2D presets");
        int node = c.integer("geodesics.node");
        if (node < 0) node = m.node(m.shape[0] / 2, m.shape[1] / 2);
        require(node < m.num_nodes(), ErrorCode::config, "geodesics.node out of range");
        const MinimalityReport r = minimality_check(m, node, c.num("geodesics.rho"), 16, 8, distance_options(c));
        std::printf("node %d boundary %s max_deviation %.6f spacing %.6f\n", node, r.boundary ? "yes" : "no",
                    r.max_deviation, m.spacing[0]);
        if (!out.empty()) {
            Mat rows(r.t.size(), 2);
            rows << r.t, r.deviation;
            write_csv(out, {"t", "deviation"}, rows);
        }
    } else if (demo == "path") {
        const GridManifold m = geodesic_manifold(c);
        const std::vector<double> s = c.nums("geodesics.start");
        require(s.size() == 4, ErrorCode::config, "geodesics.start must be x0,x1,xi0,xi1");
        const GeodesicPath p =
            integrate_geodesic(m, {Point(s[0], s[1]), Point(s[2], s[3])}, c.num("geodesics.t"), c.num("geodesics.dt"));
        std::printf("steps %ld exited %s drift %.3e\n", static_cast<long>(p.times.size()), p.exited ? "yes" : "no",
                    p.drift);
        if (!out.empty()) write_path_csv(p, out);
    } else {
        fail(ErrorCode::config, "unknown geodesics.demo: " + demo);
    }
    return 0;
}

// ---- stability

int cmd_stability(const Config& c, const std::string& prefix)
{
    const StabilityReport r = run_stability_sweep(experiment_config(c));
    write_stability_csv(r, prefix + ".csv");
    write_stability_json(r, prefix + ".json");
    std::printf("K,spearman_representation,spearman_metric\n");
    for (const TrendStat& t : r.trends)
        std::printf("%d,%.4f,%.4f\n", t.K, t.spearman_representation, t.spearman_metric);
    int failed = 0;
    for (const StabilityRow& row : r.rows) failed += row.status != "ok";
    if (failed) std::printf("# %d of %zu cells failed; see %s.csv\n", failed, r.rows.size(), prefix.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"boundary-control reconstruction lab"};
    app.require_subcommand(1);
    Common common;

    ForwardArgs fa;
    auto* forward = app.add_subcommand("forward", "solve the eigenproblem and write boundary spectral data");
    add_common(forward, common);
    forward->add_option("--out", fa.out, "data file")->required();
    forward->add_option("--manifold-out", fa.manifold_out, "also write the manifold (ground truth)");
    forward->add_option("--candidates-out", fa.candidates_out, "2D: write the boundary-distance lattice");

    SynthArgs sa;
    auto* synth = app.add_subcommand("synth", "Blagovestchenskii coefficients vs a direct wave solve");
    add_common(synth, common);
    synth->add_option("--out", sa.out, "coefficient CSV");
    synth->add_flag("--refine", sa.refine, "repeat with 2K modes and dt/2");

    ReconstructArgs ra;
    auto* recon = app.add_subcommand("reconstruct", "inverse pipeline on a data file");
    add_common(recon, common);
    recon->add_option("--data", ra.data, "data file from forward")->required();
    recon->add_option("--out", ra.out, "JSON-lines output")->required();
    recon->add_option("--candidates", ra.candidates, "2D candidate lattice");
    recon->add_flag("--validate", ra.validate, "compare against the ground-truth manifold");
    recon->add_option("--manifold", ra.manifold, "ground truth, read only with --validate");

    std::string geo_out;
    auto* geo = app.add_subcommand("geodesics", "geodesic experiments (geodesics.demo)");
    add_common(geo, common);
    geo->add_option("--out", geo_out, "CSV output");

    std::string stab_out = "stability";
    auto* stab = app.add_subcommand("stability", "noise sweep; writes <out>.csv and <out>.json");
    add_common(stab, common);
    stab->add_option("--out", stab_out, "output prefix");

    auto* defaults = app.add_subcommand("defaults", "print every config key with its default");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (defaults->parsed()) {
            std::cout << defaults_text();
            return 0;
        }
        const Config c = common.load();
        if (forward->parsed()) return cmd_forward(c, fa);
        if (synth->parsed()) return cmd_synth(c, sa);
        if (recon->parsed()) return cmd_reconstruct(c, ra);
        if (geo->parsed()) return cmd_geodesics(c, geo_out);
        if (stab->parsed()) return cmd_stability(c, stab_out);
    } catch (const Error& e) {
        std::fprintf(stderr, "bclab: %s\n", e.what());
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        std::fprintf(stderr, "bclab: internal error: %s\n", e.what());
        return kExitInternal;
    }
    return kExitUsage;
}
