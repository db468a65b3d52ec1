#include "bclab/detection.hpp"

#include <cmath>
#include <limits>

#include "bclab/io.hpp"

namespace bclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Boundary indices within loop arclength `radius` of `center`, contiguous along the loop.
IVec data_ball(const BoundarySpectralData& d, int center, double radius)
{
    const int nb = d.num_boundary();
    if (d.dim == 1) return {center};
    const Vec s = d.arclength();
    const double total = d.boundary_length();
    auto dist = [&](int b) {
        const double x = std::abs(s[b] - s[center]);
        return std::min(x, total - x);
    };
    IVec fwd, bwd;
    for (int step = 1; step < nb; ++step) {
        const int b = (center + step) % nb;
        if (dist(b) > radius + 1e-12) break;
        fwd.push_back(b);
    }
    for (int step = 1; step < nb - static_cast<int>(fwd.size()); ++step) {
        const int b = (center - step + nb) % nb;
        if (dist(b) > radius + 1e-12) break;
        bwd.push_back(b);
    }
    IVec out(bwd.rbegin(), bwd.rend());
    out.push_back(center);
    out.insert(out.end(), fwd.begin(), fwd.end());
    return out;
}

}  // namespace

bool lipschitz_prefilter(const BoundarySpectralData& d, const Vec& h, double slack)
{
    if (h.size() != d.num_boundary() || !h.allFinite() || h.minCoeff() < 0) return false;
    if (d.dim == 1) return true;
    const int nb = d.num_boundary();
    for (int b = 0; b < nb; ++b)
        if (std::abs(h[b] - h[(b + 1) % nb]) > d.edge_lengths[b] + slack) return false;
    return true;
}

InfluenceSpec slab_spec(const BoundarySpectralData& d, const Vec& h, double width, int net_points,
                        double patch_factor)
{
    require(width > 0, ErrorCode::invalid_argument, "slab width must be positive");
    require(h.size() == d.num_boundary(), ErrorCode::invalid_argument, "candidate width mismatch");
    InfluenceSpec spec;
    if (d.dim == 1) {
        for (int b = 0; b < 2; ++b) {
            spec.regions.push_back({{b}, "endpoint" + std::to_string(b)});
            spec.t_plus.push_back(h[b] + width);
            spec.t_minus.push_back(std::max(h[b] - width, 0.0));
        }
        return spec;
    }
    require(net_points >= 1, ErrorCode::invalid_argument, "net must have at least one point");
    const Vec s = d.arclength();
    const double spacing = d.boundary_length() / net_points;
    for (int j = 0; j < net_points; ++j) {
        const double target = j * spacing;
        int z = 0;
        for (int b = 1; b < d.num_boundary(); ++b)
            if (std::abs(s[b] - target) < std::abs(s[z] - target)) z = b;
        BoundaryRegion r{data_ball(d, z, patch_factor * spacing), "net" + std::to_string(j)};
        double hmin = kInf;
        for (int b : r.nodes) hmin = std::min(hmin, h[b]);
        spec.regions.push_back(r);
        spec.t_plus.push_back(h[z] + width);
        // Points of the slab may sit closer to other patch nodes than to z.
        spec.t_minus.push_back(std::max(hmin - width, 0.0));
    }
    return spec;
}

InfluenceSpec detection_spec(const BoundarySpectralData& d, const Vec& h, int m, const DetectionOptions& opt)
{
    require(m >= 1, ErrorCode::invalid_argument, "net level must be positive");
    return slab_spec(d, h, 1.0 / m, m, opt.patch_factor);
}

DetectionResult is_boundary_distance(const BoundarySpectralData& d, const Vec& h, const DetectionOptions& opt)
{
    require(!opt.m_schedule.empty(), ErrorCode::invalid_argument, "m_schedule is empty");
    DetectionResult res;
    res.score = kInf;
    res.prefilter_passed = lipschitz_prefilter(d, h);
    if (!res.prefilter_passed) return res;
    int evaluated = 0;
    res.accepted = true;
    for (int m : opt.m_schedule) {
        const double w = 1.0 / m;
        if (w < opt.resolvable_width) continue;
        ++evaluated;
        const Subspace S = sliced_subspace(d, detection_spec(d, h, m, opt), opt.slice);
        DetectionStep step;
        step.m = m;
        step.width = w;
        step.nonempty = is_nonempty(S, opt.dim_tol);
        step.min_violation = S.spectrum.size() ? S.spectrum[0] : 0.0;
        step.slice_dim = S.dim();
        res.steps.push_back(step);
        if (!step.nonempty) {
            res.accepted = false;
            break;
        }
        res.score = std::min(res.score, w);
    }
    require(evaluated > 0, ErrorCode::pipeline, "every level of m_schedule lies below the resolvable width");
    return res;
}

double measure_resolvable_width(const BoundarySpectralData& d, const std::vector<Vec>& candidates,
                                const std::vector<int>& m_levels, const DetectionOptions& opt)
{
    double width = kInf;
    for (int m : m_levels) {
        bool all = true;
        for (const Vec& h : candidates) {
            const Subspace S = sliced_subspace(d, detection_spec(d, h, m, opt), opt.slice);
            if (!is_nonempty(S, opt.dim_tol)) {
                all = false;
                break;
            }
        }
        if (!all) break;
        width = 1.0 / m;
    }
    return width;
}

TravelLength recover_travel_length(const BoundarySpectralData& d, const TravelLengthOptions& opt)
{
    require(d.dim == 1, ErrorCode::invalid_argument, "travel length recovery is one-dimensional");
    const int K = d.K();
    const BoundaryRegion left{{0}, "endpoint0"};
    // Coarse scan uses the wider out-family: band-limited sources cannot fill modes above their band.
    const FamilyOptions& fam = opt.slice.out_family;
    auto full = [&](double t) { return wave_span(d, left, t, fam, opt.slice.rank_tol).dim() == K; };
    // A span has at most n_t columns per source, so nothing below t0 can be full.
    const double lamK = std::max(d.eigenvalues[K - 1], 1e-12);
    const double t0 = (K - 1) * kPi / (fam.alpha * std::sqrt(lamK));
    double lo = 0.0, hi = opt.t_max > 0 ? opt.t_max : std::max(t0, 1e-3);
    for (int doubling = 0; !full(hi); ++doubling) {
        require(doubling < 3, ErrorCode::pipeline, "wave span from one endpoint never becomes full");
        lo = hi;
        hi *= 2.0;
    }
    while (hi - lo > opt.coarse_tol) {
        const double mid = 0.5 * (lo + hi);
        (full(mid) ? hi : lo) = mid;
    }
    TravelLength out;
    out.coarse = hi;

    // Slabs (a ± w) from 0 and (b ± w) from the far end meet iff |a + b - L| ≲ 2w,
    // so the accepted b-band is centred on L - a.
    const double w = opt.band_width;
    auto accepted = [&](double a, double b) {
        InfluenceSpec spec;
        spec.regions = {{{0}, "endpoint0"}, {{1}, "endpoint1"}};
        spec.t_plus = {a + w, b + w};
        spec.t_minus = {std::max(a - w, 0.0), std::max(b - w, 0.0)};
        return is_nonempty(sliced_subspace(d, spec, opt.slice));
    };
    double sum = 0.0;
    int used = 0;
    for (double p : opt.probe_fractions) {
        const double a = p * out.coarse;
        double b0 = out.coarse - a;
        bool found = accepted(a, b0);
        for (double step = w / 2; !found && step <= opt.band_half_range; step += w / 2) {
            if (accepted(a, out.coarse - a + step)) {
                b0 = out.coarse - a + step;
                found = true;
            } else if (accepted(a, out.coarse - a - step)) {
                b0 = out.coarse - a - step;
                found = true;
            }
        }
        if (!found) continue;
        auto edge = [&](double inside, double outside) {
            while (std::abs(outside - inside) > opt.edge_tol) {
                const double mid = 0.5 * (inside + outside);
                (accepted(a, mid) ? inside : outside) = mid;
            }
            return 0.5 * (inside + outside);
        };
        const double upper = edge(b0, b0 + opt.band_half_range);
        const double lower = edge(b0, std::max(b0 - opt.band_half_range, 0.0));
        sum += a + 0.5 * (upper + lower);
        ++used;
    }
    require(used > 0, ErrorCode::pipeline, "no accepted slab band while refining the travel length");
    out.refined = sum / used;
    return out;
}

Mat DistanceRepresentation::accepted_rows() const
{
    int n = 0;
    for (char a : accepted) n += a ? 1 : 0;
    Mat out(n, candidates.cols());
    int r = 0;
    for (Eigen::Index i = 0; i < candidates.rows(); ++i)
        if (accepted[i]) out.row(r++) = candidates.row(i);
    return out;
}

Mat DistanceRepresentation::pairwise() const
{
    const Mat A = accepted_rows();
    Mat D(A.rows(), A.rows());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.rows(); ++j) D(i, j) = (A.row(i) - A.row(j)).cwiseAbs().maxCoeff();
    return D;
}

DistanceRepresentation reconstruct_R(const BoundarySpectralData& d, const ReconstructROptions& opt, const Mat* lattice)
{
    DistanceRepresentation R;
    if (d.dim == 1) {
        require(opt.resolution > 0, ErrorCode::invalid_argument, "resolution must be positive");
        R.L_hat = recover_travel_length(d, opt.travel).refined;
        const int n = static_cast<int>(std::floor(R.L_hat / opt.resolution + 1e-9)) + 1;
        R.candidates.resize(n, 2);
        for (int i = 0; i < n; ++i) R.candidates.row(i) << i * opt.resolution, R.L_hat - i * opt.resolution;
    } else {
        require(lattice != nullptr, ErrorCode::invalid_argument,
                "blind search is one-dimensional; 2D needs a candidate lattice");
        require(lattice->cols() == d.num_boundary(), ErrorCode::invalid_argument, "lattice width mismatch");
        R.candidates = *lattice;
    }
    R.accepted.assign(R.candidates.rows(), 0);
    R.scores.assign(R.candidates.rows(), kInf);
    for (Eigen::Index i = 0; i < R.candidates.rows(); ++i) {
        const DetectionResult r = is_boundary_distance(d, R.candidates.row(i).transpose(), opt.detection);
        R.accepted[i] = r.accepted;
        R.scores[i] = r.score;
    }
    return R;
}

double representation_distance(const DistanceRepresentation& r1, const DistanceRepresentation& r2)
{
    require(r1.candidates.cols() == r2.candidates.cols(), ErrorCode::invalid_argument, "boundary mesh mismatch");
    const Mat A = r1.accepted_rows(), B = r2.accepted_rows();
    if (A.rows() == 0 && B.rows() == 0) return 0.0;
    if (A.rows() == 0 || B.rows() == 0) return kInf;
    auto directed = [](const Mat& X, const Mat& Y) {
        double worst = 0.0;
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            double best = kInf;
            for (Eigen::Index j = 0; j < Y.rows(); ++j)
                best = std::min(best, (X.row(i) - Y.row(j)).cwiseAbs().maxCoeff());
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(A, B), directed(B, A));
}

double candidate_margin(const Mat& truth_table, const Vec& h)
{
    require(truth_table.cols() == h.size(), ErrorCode::invalid_argument, "candidate width mismatch");
    return (truth_table.rowwise() - h.transpose()).cwiseAbs().rowwise().maxCoeff().minCoeff();
}

InjectivityWitness injectivity_witness(const GridManifold& m, const Mat& truth_table, double resolution, int stride,
                                       const DistanceOptions& opt)
{
    require(stride >= 1, ErrorCode::invalid_argument, "stride must be positive");
    DistanceGraph graph(m, opt);
    InjectivityWitness w;
    w.min_separation = kInf;
    for (int x = 0; x < m.num_nodes(); x += stride) {
        const Vec dx = graph.distances({x});
        for (int y = x + stride; y < m.num_nodes(); y += stride) {
            if (dx[y] <= resolution) continue;
            const double sep = (truth_table.row(x) - truth_table.row(y)).cwiseAbs().maxCoeff();
            if (sep < w.min_separation) {
                w.min_separation = sep;
                w.x = x;
                w.y = y;
            }
        }
    }
    return w;
}

void write_candidates_csv(const std::string& path, const Mat& candidates)
{
    Mat rows(candidates.size(), 3);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < candidates.rows(); ++i)
        for (Eigen::Index b = 0; b < candidates.cols(); ++b) rows.row(r++) << double(i), double(b), candidates(i, b);
    write_csv(path, {"candidate", "boundary_node", "value"}, rows);
}

}  // namespace bclab
