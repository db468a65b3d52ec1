#include "bclab/reconstruction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>

namespace bclab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Exponent tuples of the monomials of total degree ≤ deg in n variables (n = 1, 2).
std::vector<std::array<int, 2>> monomials(int n, int deg)
{
    std::vector<std::array<int, 2>> out;
    for (int total = 0; total <= deg; ++total) {
        if (n == 1) {
            out.push_back({total, 0});
            continue;
        }
        for (int p = total; p >= 0; --p) out.push_back({p, total - p});
    }
    return out;
}

IVec nearest(const std::vector<InteriorPoint>& pts, int i, int count)
{
    IVec idx(pts.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return (pts[a].label - pts[i].label).squaredNorm() < (pts[b].label - pts[i].label).squaredNorm();
    });
    idx.resize(std::min<int>(count, idx.size()));
    return idx;
}

}  // namespace

VolumeEstimate recover_total_volume(const BoundarySpectralData& d)
{
    require(d.kind == BoundaryCondition::neumann, ErrorCode::invalid_argument, "total volume needs Neumann data");
    require(d.K() >= 1, ErrorCode::invalid_argument, "no modes in the data");
    const Vec t = d.traces.row(0).transpose();
    const double mean = t.mean();
    require(std::abs(mean) > 1e-12, ErrorCode::pipeline, "first trace vanishes");
    require((t.array() * mean > 0).all(), ErrorCode::pipeline, "first trace changes sign");
    VolumeEstimate v;
    v.phi1 = std::abs(mean);
    v.volume = 1.0 / (mean * mean);
    v.trace_variance = (t.array() - mean).square().mean() / (mean * mean);
    return v;
}

ValueEstimate eigenfunction_values_at(const BoundarySpectralData& d, const Vec& h, double scale,
                                      const ValueOptions& opt)
{
    require(!opt.widths.empty(), ErrorCode::invalid_argument, "empty shrink schedule");
    const int J = std::min(opt.modes, d.K());
    ValueEstimate out;
    out.self_overlap.resize(opt.widths.size());
    for (size_t w = 0; w < opt.widths.size(); ++w) {
        const InfluenceSpec spec = slab_spec(d, h, opt.widths[w], opt.net_points, opt.patch_factor);
        const Subspace S = sliced_subspace(d, spec, opt.slice);
        const Vec row = S.basis * S.basis.row(0).transpose();
        require(row[0] > opt.floor, ErrorCode::pipeline, "slice is empty around the candidate");
        out.self_overlap[w] = row[0];
        out.per_width.push_back(scale * row.head(J) / row[0]);
    }
    out.values = out.per_width.back();
    if (opt.widths.size() >= 2) {
        const size_t n = opt.widths.size();
        const double r = opt.widths[n - 2] / opt.widths[n - 1];
        out.values += (out.per_width[n - 1] - out.per_width[n - 2]) / (std::pow(r, opt.bias_order) - 1.0);
    }
    return out;
}

std::vector<std::vector<Jet>> label_jets(const std::vector<InteriorPoint>& points, const JetOptions& opt)
{
    require(!points.empty(), ErrorCode::invalid_argument, "no points");
    const int n = static_cast<int>(points[0].label.size());
    const int J = static_cast<int>(points[0].values.size());
    const auto mono = monomials(n, opt.degree);
    const int nm = static_cast<int>(mono.size());
    require(static_cast<int>(points.size()) >= nm, ErrorCode::pipeline, "too few points for the jet degree");

    std::vector<std::vector<Jet>> jets(points.size());
    for (size_t i = 0; i < points.size(); ++i) {
        int count = std::max(opt.neighbors, nm);
        Mat A;
        IVec nb;
        double radius = 1.0;
        for (;; ++count) {
            nb = nearest(points, static_cast<int>(i), count);
            radius = 0.0;
            for (int j : nb) radius = std::max(radius, (points[j].label - points[i].label).norm());
            radius = std::max(radius, 1e-300);
            A.resize(nb.size(), nm);
            for (size_t r = 0; r < nb.size(); ++r) {
                const Vec x = (points[nb[r]].label - points[i].label) / radius;
                for (int c = 0; c < nm; ++c)
                    A(r, c) = std::pow(x[0], mono[c][0]) * (n > 1 ? std::pow(x[1], mono[c][1]) : 1.0);
            }
            const Vec sv = Eigen::JacobiSVD<Mat>(A).singularValues();
            const double cond = sv[sv.size() - 1] > 0 ? sv[0] / sv[sv.size() - 1] : INFINITY;
            if (cond <= opt.condition_cap || count >= static_cast<int>(points.size())) break;
        }
        Mat Y(nb.size(), J);
        for (size_t r = 0; r < nb.size(); ++r) Y.row(r) = points[nb[r]].values.transpose();
        Eigen::CompleteOrthogonalDecomposition<Mat> cod(A);
        const Mat C = cod.solve(Y);
        const Mat R = A * C - Y;
        jets[i].resize(J);
        for (int k = 0; k < J; ++k) {
            Jet& jt = jets[i][k];
            jt.grad = Vec::Zero(n);
            jt.hess = Mat::Zero(n, n);
            for (int c = 0; c < nm; ++c) {
                const int p = mono[c][0], q = mono[c][1];
                if (p + q == 1) jt.grad[p == 1 ? 0 : 1] = C(c, k) / radius;
                if (p + q != 2) continue;
                const double s = C(c, k) / (radius * radius);
                if (p == 2) jt.hess(0, 0) = 2 * s;
                else if (q == 2) jt.hess(1, 1) = 2 * s;
                else jt.hess(0, 1) = jt.hess(1, 0) = s;
            }
            jt.fit_residual = std::sqrt(R.col(k).squaredNorm() / nb.size());
        }
    }
    return jets;
}

void build_chart(std::vector<InteriorPoint>& points, const std::vector<std::vector<Jet>>& jets, const Vec& lambda,
                 const ChartOptions& opt)
{
    require(points.size() == jets.size(), ErrorCode::invalid_argument, "jets do not match the points");
    int usable = 0;
    for (size_t i = 0; i < points.size(); ++i) {
        InteriorPoint& p = points[i];
        const int n = static_cast<int>(p.label.size());
        const int last = std::min<int>(opt.last_mode, static_cast<int>(jets[i].size()) - 1);
        IVec cand;
        for (int k = opt.first_mode; k <= last; ++k) cand.push_back(k);
        p.chart.clear();
        p.chart_sigma = 0.0;
        auto scaled = [&](int k) {
            return Vec(jets[i][k].grad / std::sqrt(std::max(lambda[k], 1e-300)));
        };
        auto consider = [&](const IVec& combo) {
            Mat G(n, n);
            for (int c = 0; c < n; ++c) G.row(c) = scaled(combo[c]).transpose();
            const double s = Eigen::JacobiSVD<Mat>(G).singularValues().minCoeff();
            if (s > p.chart_sigma) {
                p.chart_sigma = s;
                p.chart = combo;
            }
        };
        if (n == 1) {
            for (int k : cand) consider({k});
        } else {
            for (size_t a = 0; a < cand.size(); ++a)
                for (size_t b = a + 1; b < cand.size(); ++b) consider({cand[a], cand[b]});
        }
        if (p.chart.empty() || p.chart_sigma < opt.min_sigma) {
            p.valid = false;
            p.flag = "no chart";
            p.chart.clear();
        } else {
            ++usable;
        }
    }
    require(usable > 0, ErrorCode::pipeline, "no point admits an eigenfunction chart");
}

MetricSolve solve_metric_system(const std::vector<Vec>& grad, const std::vector<Mat>& hess, const Vec& values,
                                const Vec& lambda, double rcond)
{
    require(!grad.empty() && grad.size() == hess.size() && values.size() == static_cast<int>(grad.size()) &&
                lambda.size() == values.size(),
            ErrorCode::invalid_argument, "metric system inputs disagree in size");
    const int n = static_cast<int>(grad[0].size());
    const int ng = n * (n + 1) / 2;
    const int rows = static_cast<int>(grad.size());
    MetricSolve out;
    if (rows < ng + n) {
        out.g_inv = Mat::Constant(n, n, kNaN);
        out.drift = Vec::Constant(n, kNaN);
        return out;
    }
    Mat A(rows, ng + n);
    Vec rhs(rows);
    for (int k = 0; k < rows; ++k) {
        int c = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) A(k, c++) = -(i == j ? 1.0 : 2.0) * hess[k](i, j);
        for (int i = 0; i < n; ++i) A(k, c++) = -grad[k][i];
        rhs[k] = lambda[k] * values[k];
    }
    Eigen::JacobiSVD<Mat> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vec& s = svd.singularValues();
    Vec inv = Vec::Zero(s.size());
    for (int i = 0; i < s.size(); ++i)
        if (s[i] > rcond * s[0]) inv[i] = 1.0 / s[i];
    const Vec x = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() * rhs;
    out.design_sigma = s[0] > 0 ? s[s.size() - 1] / s[0] : 0.0;
    out.residual = rhs.norm() > 0 ? (A * x - rhs).norm() / rhs.norm() : (A * x).norm();
    out.g_inv.resize(n, n);
    int c = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) out.g_inv(i, j) = out.g_inv(j, i) = x[c++];
    out.drift = x.tail(n);
    out.spd = Eigen::SelfAdjointEigenSolver<Mat>(out.g_inv).eigenvalues().minCoeff() > 0;
    return out;
}

void chart_jets(const std::vector<Jet>& label, const IVec& chart, const IVec& modes, std::vector<Vec>& grad,
                std::vector<Mat>& hess)
{
    const int n = static_cast<int>(chart.size());
    Mat Ju(n, n);
    for (int c = 0; c < n; ++c) Ju.row(c) = label[chart[c]].grad.transpose();
    const Mat Jinv = Ju.inverse();
    grad.clear();
    hess.clear();
    for (int k : modes) {
        const Vec gu = Jinv.transpose() * label[k].grad;
        Mat H = label[k].hess;
        for (int c = 0; c < n; ++c) H -= gu[c] * label[chart[c]].hess;
        grad.push_back(gu);
        hess.push_back(Jinv.transpose() * H * Jinv);
    }
}

void recover_metric_at(InteriorPoint& p, const std::vector<Jet>& jets, const Vec& lambda, const MetricOptions& opt)
{
    if (p.chart.empty()) return;
    IVec modes;
    const int last = std::min<int>(opt.last_mode, static_cast<int>(jets.size()) - 1);
    for (int k = opt.first_mode; k <= last; ++k) modes.push_back(k);
    std::vector<Vec> grad;
    std::vector<Mat> hess;
    chart_jets(jets, p.chart, modes, grad, hess);
    Vec vals(modes.size()), lam(modes.size());
    for (size_t r = 0; r < modes.size(); ++r) {
        vals[r] = p.values[modes[r]];
        lam[r] = lambda[modes[r]] - opt.lambda_shift;
    }
    const MetricSolve s = solve_metric_system(grad, hess, vals, lam, opt.rcond);
    p.g_inv = s.g_inv;
    p.drift = s.drift;
    p.residual = s.residual;
    p.design_sigma = s.design_sigma;
    p.valid = s.g_inv.allFinite() && s.spd;
    if (!s.g_inv.allFinite()) p.flag = "rank deficient";
    else if (!s.spd) p.flag = "not SPD";
    else p.flag.clear();
}

Mat recovered_distance_matrix(const std::vector<InteriorPoint>& points, int graph_neighbors)
{
    const int np = static_cast<int>(points.size());
    Mat D = Mat::Constant(np, np, kNaN);
    IVec valid;
    for (int i = 0; i < np; ++i)
        if (points[i].valid) valid.push_back(i);
    if (valid.empty()) return D;
    const int n = static_cast<int>(points[valid[0]].label.size());

    // Length of the step i -> j measured in i's chart.
    auto chart_length = [&](int i, int j) {
        const InteriorPoint& p = points[i];
        Vec du(n);
        for (int c = 0; c < n; ++c) du[c] = points[j].values[p.chart[c]] - p.values[p.chart[c]];
        return std::sqrt(std::max(du.dot(p.g_inv.inverse() * du), 0.0));
    };
    auto edge = [&](int i, int j) { return 0.5 * (chart_length(i, j) + chart_length(j, i)); };

    if (n == 1) {
        std::stable_sort(valid.begin(), valid.end(),
                         [&](int a, int b) { return points[a].label[0] < points[b].label[0]; });
        Vec cum = Vec::Zero(valid.size());
        for (size_t r = 1; r < valid.size(); ++r) cum[r] = cum[r - 1] + edge(valid[r - 1], valid[r]);
        for (size_t a = 0; a < valid.size(); ++a)
            for (size_t b = 0; b < valid.size(); ++b) D(valid[a], valid[b]) = std::abs(cum[a] - cum[b]);
        return D;
    }

    std::vector<std::vector<std::pair<int, double>>> adj(np);
    std::vector<InteriorPoint> vp;
    for (int i : valid) vp.push_back(points[i]);
    for (size_t a = 0; a < valid.size(); ++a) {
        for (int b : nearest(vp, static_cast<int>(a), graph_neighbors + 1)) {
            if (b == static_cast<int>(a)) continue;
            const double w = edge(valid[a], valid[b]);
            adj[valid[a]].push_back({valid[b], w});
            adj[valid[b]].push_back({valid[a], w});
        }
    }
    for (int s : valid) {
        Vec dist = Vec::Constant(np, INFINITY);
        using Item = std::pair<double, int>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> q;
        dist[s] = 0;
        q.push({0.0, s});
        while (!q.empty()) {
            auto [du, u] = q.top();
            q.pop();
            if (du > dist[u]) continue;
            for (auto [v, w] : adj[u])
                if (du + w < dist[v]) {
                    dist[v] = du + w;
                    q.push({dist[v], v});
                }
        }
        for (int t : valid) D(s, t) = dist[t];
    }
    return D;
}

SpectralEmbedding spectral_embedding(const std::vector<InteriorPoint>& points, int k, const Vec* ground,
                                     const JetOptions& jet)
{
    require(!points.empty() && k >= 1, ErrorCode::invalid_argument, "embedding needs points and k ≥ 1");
    const int np = static_cast<int>(points.size());
    const int off = ground ? 1 : 0;
    require(!ground || ground->size() == np, ErrorCode::invalid_argument, "ground-state values misaligned");
    SpectralEmbedding e;
    for (int j = 0; j < k; ++j) e.modes.push_back(j);
    e.values.resize(np, k + off);
    for (int i = 0; i < np; ++i) {
        require(points[i].values.size() >= k, ErrorCode::invalid_argument, "fewer recovered values than k");
        if (ground) e.values(i, 0) = (*ground)[i];
        e.values.row(i).tail(k) = points[i].values.head(k).transpose();
    }
    e.min_separation = INFINITY;
    for (int i = 0; i < np; ++i)
        for (int j = i + 1; j < np; ++j)
            e.min_separation = std::min(e.min_separation, (e.values.row(i) - e.values.row(j)).norm());
    if (np < 2) e.min_separation = 0.0;

    std::vector<InteriorPoint> tmp = points;
    for (int i = 0; i < np; ++i) tmp[i].values = e.values.row(i).transpose();
    const auto jets = label_jets(tmp, jet);
    const int n = static_cast<int>(points[0].label.size());
    e.min_differential_sigma = INFINITY;
    for (int i = 0; i < np; ++i) {
        Mat Dm(e.values.cols(), n);
        for (int c = 0; c < e.values.cols(); ++c) Dm.row(c) = jets[i][c].grad.transpose();
        e.min_differential_sigma =
            std::min(e.min_differential_sigma, Eigen::JacobiSVD<Mat>(Dm).singularValues()[n - 1]);
    }
    return e;
}

int smallest_embedding_k(const std::vector<InteriorPoint>& points, int k_max, double separation_tol,
                         double sigma_tol, const Vec* ground, const JetOptions& jet)
{
    for (int k = 1; k <= k_max; ++k) {
        const SpectralEmbedding e = spectral_embedding(points, k, ground, jet);
        if (e.min_separation > separation_tol && e.min_differential_sigma > sigma_tol) return k;
    }
    return -1;
}

std::vector<InteriorPoint> make_points(const BoundarySpectralData& d, const Mat& candidates, const IVec& label_nodes)
{
    require(candidates.cols() == d.num_boundary(), ErrorCode::invalid_argument, "candidate width mismatch");
    IVec lab = d.dim == 1 ? IVec{0} : label_nodes;
    for (int& b : lab) {
        if (b < 0) b = d.num_boundary() / 4;
        require(b < d.num_boundary(), ErrorCode::invalid_argument, "label node out of range");
    }
    require(static_cast<int>(lab.size()) == d.dim, ErrorCode::invalid_argument, "need one label node per dimension");
    std::vector<InteriorPoint> pts(candidates.rows());
    for (Eigen::Index i = 0; i < candidates.rows(); ++i) {
        pts[i].id = static_cast<int>(i);
        pts[i].h = candidates.row(i).transpose();
        pts[i].label.resize(d.dim);
        for (int c = 0; c < d.dim; ++c) pts[i].label[c] = candidates(i, lab[c]);
    }
    return pts;
}

namespace {

Mat interior_candidates(const BoundarySpectralData& d, const ReconstructionOptions& opt,
                        const DistanceRepresentation& R)
{
    if (d.dim != 1) return R.accepted_rows();
    const Mat acc = R.accepted_rows();
    require(acc.rows() >= 2, ErrorCode::pipeline, "too few accepted candidates to span the interval");
    const double lo = acc.col(0).minCoeff() + opt.net_margin;
    const double hi = acc.col(0).maxCoeff() - opt.net_margin;
    require(hi > lo && opt.net_points >= 2, ErrorCode::pipeline, "interior net is empty");
    Mat c(opt.net_points, 2);
    for (int i = 0; i < opt.net_points; ++i) {
        const double a = lo + (hi - lo) * i / (opt.net_points - 1);
        c.row(i) << a, R.L_hat - a;
    }
    return c;
}

void finish(ReconstructionResult& res, const ReconstructionOptions& opt)
{
    IVec valid;
    for (size_t i = 0; i < res.points.size(); ++i)
        if (res.points[i].valid) valid.push_back(static_cast<int>(i));
    res.spd_rate = res.points.empty() ? 0.0 : double(valid.size()) / res.points.size();
    const Mat D = recovered_distance_matrix(res.points);
    const int nr = std::min<int>(opt.report_points, valid.size());
    res.report_subnet.clear();
    for (int r = 0; r < nr; ++r) {
        const double pos = nr == 1 ? 0.0 : double(r) * (valid.size() - 1) / (nr - 1);
        res.report_subnet.push_back(valid[static_cast<size_t>(std::lround(pos))]);
    }
    res.distances.resize(nr, nr);
    for (int a = 0; a < nr; ++a)
        for (int b = 0; b < nr; ++b) res.distances(a, b) = D(res.report_subnet[a], res.report_subnet[b]);
}

ReconstructionResult run_pipeline(const BoundarySpectralData& d, const ReconstructionOptions& opt, const Mat* lattice,
                                  double scale, double lambda_shift)
{
    ReconstructionResult res;
    res.kind = d.kind;
    res.dim = d.dim;
    res.representation = reconstruct_R(d, opt.representation, lattice);
    const Mat cand = interior_candidates(d, opt, res.representation);
    res.points = make_points(d, cand, opt.label_nodes);

    std::vector<char> ok(res.points.size(), 1);
    std::vector<ValueEstimate> est(res.points.size());
    parallel_for(static_cast<int>(res.points.size()), opt.threads, [&](int i) {
        InteriorPoint& p = res.points[i];
        if (d.dim == 1 && !is_boundary_distance(d, p.h, opt.representation.detection).accepted) {
            ok[i] = 0;
            p.flag = "rejected";
        }
        try {
            est[i] = eigenfunction_values_at(d, p.h, scale, opt.values);
            p.values = est[i].values;
        } catch (const Error&) {
            ok[i] = 0;
            p.flag = "empty slice";
        }
    });
    std::vector<InteriorPoint> kept;
    std::vector<ValueEstimate> kept_est;
    for (size_t i = 0; i < res.points.size(); ++i)
        if (ok[i]) {
            kept.push_back(res.points[i]);
            kept_est.push_back(est[i]);
        }
    require(!kept.empty(), ErrorCode::pipeline, "no interior point survived value recovery");

    const auto jets = label_jets(kept, d.dim == 1 ? opt.jets : opt.jets_2d);
    const Vec lambda = d.eigenvalues.head(kept[0].values.size());
    build_chart(kept, jets, lambda, opt.chart);
    MetricOptions mo = opt.metric;
    mo.lambda_shift = lambda_shift;
    for (size_t i = 0; i < kept.size(); ++i) recover_metric_at(kept[i], jets[i], lambda, mo);

    if (d.kind == BoundaryCondition::dirichlet) {
        // ψ_1(x)² ≈ (P e_1, e_1)/Vol(slab); in 1D the slab has length 2w.
        for (size_t i = 0; i < kept.size(); ++i) {
            if (d.dim != 1) {
                kept[i].psi1 = kNaN;
                continue;
            }
            const auto& w = opt.values.widths;
            const Vec& s = kept_est[i].self_overlap;
            double v = std::sqrt(s[s.size() - 1] / (2 * w.back()));
            if (w.size() >= 2) {
                const double prev = std::sqrt(s[s.size() - 2] / (2 * w[w.size() - 2]));
                v += (v - prev) / (std::pow(w[w.size() - 2] / w.back(), opt.values.bias_order) - 1.0);
            }
            kept[i].psi1 = v;
        }
    }
    res.points = kept;
    finish(res, opt);
    return res;
}

}  // namespace

ReconstructionResult reconstruct(const BoundarySpectralData& d, const ReconstructionOptions& opt, const Mat* lattice)
{
    require(d.kind == BoundaryCondition::neumann, ErrorCode::invalid_argument,
            "reconstruct expects Neumann data; use dirichlet_recover");
    const VolumeEstimate vol = recover_total_volume(d);
    ReconstructionResult res = run_pipeline(d, opt, lattice, vol.phi1, 0.0);
    res.volume = vol;
    return res;
}

ReconstructionResult dirichlet_recover(const BoundarySpectralData& d, const ReconstructionOptions& opt,
                                       const Mat* lattice)
{
    require(d.kind == BoundaryCondition::dirichlet, ErrorCode::invalid_argument, "dirichlet_recover expects Dirichlet data");
    return run_pipeline(d, opt, lattice, 1.0, d.eigenvalues[0]);
}

ComparisonReport compare_reconstruction(const ReconstructionResult& r, const GridManifold& truth,
                                        const EigenSystem& truth_modes, const DistanceOptions& dist)
{
    require(truth.dim == r.dim, ErrorCode::invalid_argument, "dimension mismatch");
    require(!r.points.empty(), ErrorCode::pipeline, "nothing to compare");
    const Mat table = boundary_distance_table(truth, dist);
    require(table.cols() == r.points[0].h.size(), ErrorCode::invalid_argument, "boundary mesh mismatch");
    ComparisonReport rep;
    for (const InteriorPoint& p : r.points) {
        const Vec gap = (table.rowwise() - p.h.transpose()).cwiseAbs().rowwise().maxCoeff();
        Eigen::Index best;
        rep.match_margin = std::max(rep.match_margin, gap.minCoeff(&best));
        rep.matched_nodes.push_back(static_cast<int>(best));
    }
    require(rep.match_margin < 0.5, ErrorCode::pipeline, "some points match no manifold node");

    // Values up to the within-cluster gauge.
    const int np = static_cast<int>(r.points.size());
    const int J = std::min<int>(r.points[0].values.size(), truth_modes.K());
    Mat V(np, J), T(np, J);
    for (int i = 0; i < np; ++i) {
        V.row(i) = r.points[i].values.head(J).transpose();
        for (int j = 0; j < J; ++j) {
            T(i, j) = truth_modes.modes(rep.matched_nodes[i], j);
            if (r.kind == BoundaryCondition::dirichlet) T(i, j) /= truth_modes.modes(rep.matched_nodes[i], 0);
        }
    }
    for (auto [a, b] : eigen_clusters(truth_modes.eigenvalues.head(J), 1e-6)) {
        const int l = b - a + 1;
        Eigen::JacobiSVD<Mat> svd(V.middleCols(a, l).transpose() * T.middleCols(a, l),
                                  Eigen::ComputeFullU | Eigen::ComputeFullV);
        V.middleCols(a, l) = V.middleCols(a, l) * (svd.matrixU() * svd.matrixV().transpose());
    }
    rep.value_error = (V - T).cwiseAbs().maxCoeff();

    DistanceGraph graph(truth, dist);
    const int nr = static_cast<int>(r.report_subnet.size());
    rep.truth_distances.resize(nr, nr);
    for (int a = 0; a < nr; ++a) {
        const Vec da = graph.distances({rep.matched_nodes[r.report_subnet[a]]});
        for (int b = 0; b < nr; ++b) rep.truth_distances(a, b) = da[rep.matched_nodes[r.report_subnet[b]]];
    }
    rep.distance_error = nr ? (r.distances - rep.truth_distances).norm() / rep.truth_distances.norm() : kNaN;

    rep.metric_error = kNaN;
    if (r.dim == 1) {
        // Truth g^{uu} in the chart u = φ_k is (dφ_k/ds)² with s the arclength.
        std::vector<double> rel;
        const int N = truth.num_nodes();
        for (const InteriorPoint& p : r.points) {
            const int x = rep.matched_nodes[&p - r.points.data()];
            if (!p.valid || x <= 0 || x >= N - 1) continue;
            const int k = p.chart[0];
            const double ds = truth.spacing[0] * (std::sqrt(truth.metric(x - 1, 0)) + 2 * std::sqrt(truth.metric(x, 0)) +
                                                  std::sqrt(truth.metric(x + 1, 0))) / 2;
            double dphi = (truth_modes.modes(x + 1, k) - truth_modes.modes(x - 1, k)) / ds;
            if (r.kind == BoundaryCondition::dirichlet) {
                const double q1 = truth_modes.modes(x + 1, k) / truth_modes.modes(x + 1, 0);
                const double q0 = truth_modes.modes(x - 1, k) / truth_modes.modes(x - 1, 0);
                dphi = (q1 - q0) / ds;
            }
            // Undo the gauge sign by comparing magnitudes.
            rel.push_back(std::abs(p.g_inv(0, 0) - dphi * dphi) / (dphi * dphi));
        }
        if (!rel.empty()) {
            std::nth_element(rel.begin(), rel.begin() + rel.size() / 2, rel.end());
            rep.metric_error = rel[rel.size() / 2];
        }
    }
    return rep;
}

}  // namespace bclab
