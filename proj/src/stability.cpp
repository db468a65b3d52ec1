#include "bclab/stability.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>

#include "bclab/io.hpp"

namespace bclab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// ‖Q T2 - T1‖ over clusters of `ref`, Q the best orthogonal map per cluster; relative to ‖T1‖.
double aligned_trace_gap(const Mat& T1, const Mat& T2, const Vec& w, const std::vector<std::pair<int, int>>& clusters)
{
    const Vec sw = w.cwiseSqrt();
    const Mat A = T1 * sw.asDiagonal();
    const Mat B = T2 * sw.asDiagonal();
    double num = 0.0;
    for (auto [a, b] : clusters) {
        const int l = b - a + 1;
        Eigen::JacobiSVD<Mat> svd(A.middleRows(a, l) * B.middleRows(a, l).transpose(),
                                  Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Mat Q = svd.matrixU() * svd.matrixV().transpose();
        num += (Q * B.middleRows(a, l) - A.middleRows(a, l)).squaredNorm();
    }
    const double den = A.squaredNorm();
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace

SpectralDistance spectral_data_distance(const BoundarySpectralData& d1, const BoundarySpectralData& d2,
                                        double cluster_tol)
{
    require(d1.num_boundary() == d2.num_boundary() && d1.dim == d2.dim, ErrorCode::invalid_argument,
            "boundary mesh mismatch");
    require(d1.kind == d2.kind, ErrorCode::invalid_argument, "boundary condition mismatch");
    const int K = std::min(d1.K(), d2.K());
    require(K >= 1, ErrorCode::invalid_argument, "no modes to compare");
    const Vec l1 = d1.eigenvalues.head(K), l2 = d2.eigenvalues.head(K);
    double floor = 0.0;
    for (int k = 0; k < K && floor == 0.0; ++k)
        if (l1[k] > 1e-9 * std::max(1.0, std::abs(l1[K - 1]))) floor = l1[k];
    if (floor == 0.0) floor = 1.0;

    SpectralDistance out;
    for (int k = 0; k < K; ++k)
        out.eigenvalue =
            std::max(out.eigenvalue, std::abs(l1[k] - l2[k]) / std::max({std::abs(l1[k]), std::abs(l2[k]), floor}));

    const auto c1 = eigen_clusters(l1, cluster_tol);
    const auto c2 = eigen_clusters(l2, cluster_tol);
    out.structure_match = c1 == c2;
    out.cluster_penalty = out.structure_match ? 0.0 : std::numeric_limits<double>::infinity();
    const Mat T1 = d1.traces.topRows(K), T2 = d2.traces.topRows(K);
    out.trace = std::max(aligned_trace_gap(T1, T2, d1.dS, c1), aligned_trace_gap(T2, T1, d2.dS, c2));
    out.total = out.eigenvalue + out.trace;
    return out;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y)
{
    require(x.size() == y.size(), ErrorCode::invalid_argument, "spearman inputs differ in length");
    const size_t n = x.size();
    if (n < 2) return kNaN;
    auto ranks = [n](const std::vector<double>& v) {
        std::vector<size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
        Vec r(n);
        for (size_t i = 0; i < n;) {
            size_t j = i;
            while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
            for (size_t k = i; k <= j; ++k) r[idx[k]] = 0.5 * (i + j) + 1.0;
            i = j + 1;
        }
        return r;
    };
    const Vec rx = ranks(x), ry = ranks(y);
    const Vec dx = rx.array() - rx.mean(), dy = ry.array() - ry.mean();
    const double den = std::sqrt(dx.squaredNorm() * dy.squaredNorm());
    return den > 0 ? dx.dot(dy) / den : kNaN;
}

StabilityReport run_stability_sweep(const ExperimentConfig& cfg)
{
    require(!cfg.K_list.empty() && !cfg.sigma_list.empty() && !cfg.seeds.empty(), ErrorCode::config,
            "K, σ and seed lists must be nonempty");
    for (double s : cfg.sigma_list) require(s >= 0, ErrorCode::config, "σ must be nonnegative");
    const GridManifold m = metric_from_preset(cfg.preset, cfg.params);
    const int Kmax = *std::max_element(cfg.K_list.begin(), cfg.K_list.end());
    const EigenSystem es = solve_eigensystem(assemble_laplacian(m, BoundaryCondition::neumann), m, Kmax);
    const BoundarySpectralData clean_all = boundary_traces(es, m);
    const bool one_d = m.dim == 1;

    Mat lattice;
    if (!one_d) lattice = boundary_distance_table(m);

    StabilityReport rep;
    rep.note = "compactness class not certified; presets are smooth by construction";
    for (int K : cfg.K_list) {
        const BoundarySpectralData clean = perturb_data(clean_all, PerturbOptions{K, 0.0, false, 1, cfg.cluster_tol});
        const ReconstructionResult base = reconstruct(clean, cfg.pipeline, one_d ? nullptr : &lattice);
        const double base_metric = compare_reconstruction(base, m, es).distance_error;
        if (K == Kmax) rep.clean_metric_error = base_metric;

        std::map<double, std::pair<std::vector<double>, std::vector<double>>> by_sigma;
        for (double sigma : cfg.sigma_list) {
            for (std::uint64_t seed : cfg.seeds) {
                const auto t0 = std::chrono::steady_clock::now();
                StabilityRow row;
                row.K = K;
                row.sigma = sigma;
                row.seed = seed;
                try {
                    const BoundarySpectralData noisy =
                        perturb_data(clean_all, PerturbOptions{K, sigma, cfg.mix, seed, cfg.cluster_tol});
                    row.spectral_distance = spectral_data_distance(clean, noisy, cfg.cluster_tol + 3 * sigma).total;
                    const ReconstructionResult r = reconstruct(noisy, cfg.pipeline, one_d ? nullptr : &lattice);
                    row.representation_distance = representation_distance(base.representation, r.representation);
                    row.metric_error = compare_reconstruction(r, m, es).distance_error;
                } catch (const Error& e) {
                    row.status = e.what();
                    row.representation_distance = row.metric_error = kNaN;
                }
                row.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                rep.rows.push_back(row);
                if (row.status == "ok") {
                    by_sigma[sigma].first.push_back(row.representation_distance);
                    by_sigma[sigma].second.push_back(row.metric_error);
                }
            }
        }

        TrendStat tr;
        tr.K = K;
        tr.baseline_representation = 0.0;
        tr.baseline_metric = base_metric;
        std::vector<double> s, rd, me;
        for (auto& [sigma, vals] : by_sigma) {
            auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
            s.push_back(sigma);
            rd.push_back(mean(vals.first));
            me.push_back(mean(vals.second));
            if (sigma == 0.0) {
                tr.baseline_representation = rd.back();
                tr.baseline_metric = me.back();
            }
        }
        tr.spearman_representation = spearman(s, rd);
        tr.spearman_metric = spearman(s, me);
        rep.trends.push_back(tr);
    }
    return rep;
}

void write_stability_csv(const StabilityReport& r, const std::string& path)
{
    std::ofstream out(path);
    require(out.good(), ErrorCode::io, "cannot write " + path);
    out << "K,sigma,seed,spectral_distance,representation_distance,metric_error,runtime,status\n";
    for (const StabilityRow& row : r.rows)
        out << row.K << ',' << format_double(row.sigma) << ',' << row.seed << ',' << format_double(row.spectral_distance)
            << ',' << format_double(row.representation_distance) << ',' << format_double(row.metric_error) << ','
            << format_double(row.runtime) << ',' << '"' << row.status << '"' << '\n';
}

void write_stability_json(const StabilityReport& r, const std::string& path)
{
    json j;
    j["format"] = "bclab-stability/1";
    j["note"] = r.note;
    j["clean_metric_error"] = r.clean_metric_error;
    for (const TrendStat& t : r.trends)
        j["trends"].push_back({{"K", t.K},
                               {"spearman_representation", t.spearman_representation},
                               {"spearman_metric", t.spearman_metric},
                               {"baseline_representation", t.baseline_representation},
                               {"baseline_metric", t.baseline_metric}});
    j["cells"] = r.rows.size();
    int failed = 0;
    for (const StabilityRow& row : r.rows) failed += row.status != "ok";
    j["failed_cells"] = failed;
    std::ofstream out(path);
    require(out.good(), ErrorCode::io, "cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace bclab
