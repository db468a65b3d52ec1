#include "bclab/subspace.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "bclab/io.hpp"

namespace bclab {

Subspace zero_subspace(int K)
{
    Subspace s;
    s.basis = Mat::Zero(K, 0);
    s.provenance = "zero";
    return s;
}

Subspace full_subspace(int K)
{
    Subspace s;
    s.basis = Mat::Identity(K, K);
    s.provenance = "full";
    return s;
}

Vec principal_angles(const Subspace& a, const Subspace& b)
{
    require(a.K() == b.K(), ErrorCode::invalid_argument, "subspaces live in different truncations");
    const int m = std::min(a.dim(), b.dim());
    if (m == 0) return Vec(0);
    Eigen::BDCSVD<Mat> svd(a.basis.transpose() * b.basis);
    Vec s = svd.singularValues().head(m);
    Vec ang(m);
    for (int i = 0; i < m; ++i) ang[m - 1 - i] = std::acos(std::clamp(s[i], -1.0, 1.0)) * 180.0 / kPi;
    return ang;
}

Subspace range_subspace(const Mat& A, double rel_tol, const std::string& provenance)
{
    Subspace s;
    s.rank_tol = rel_tol;
    s.provenance = provenance;
    if (A.cols() == 0 || A.norm() == 0.0) {
        s.basis = Mat::Zero(A.rows(), 0);
        return s;
    }
    Eigen::BDCSVD<Mat> svd(A, Eigen::ComputeThinU);
    const Vec& sv = svd.singularValues();
    int r = 0;
    while (r < sv.size() && sv[r] >= rel_tol * sv[0]) ++r;
    s.basis = svd.matrixU().leftCols(r);
    return s;
}

Vec SourceFamily::temporal(int b) const
{
    const Vec t = times();
    const double norm = std::sqrt((b == 0 ? 1.0 : 2.0) / horizon);
    return ((kPi * b / horizon) * t).array().cos().matrix() * norm;
}

BoundarySource SourceFamily::member(int index) const
{
    require(index >= 0 && index < size(), ErrorCode::invalid_argument, "family member out of range");
    return separable_source(region, spatial.col(index / n_t), times(), temporal(index % n_t));
}

SourceFamily default_source_family(const BoundarySpectralData& d, const BoundaryRegion& region, double T,
                                   const FamilyOptions& opt)
{
    require(!region.nodes.empty(), ErrorCode::invalid_argument, "empty boundary region");
    require(T > 0, ErrorCode::invalid_argument, "family horizon must be positive");
    const double kmax = std::sqrt(std::max(d.eigenvalues.maxCoeff(), 0.0));
    SourceFamily f;
    f.region = region.nodes;
    f.horizon = T;
    f.n_t = opt.n_t > 0 ? opt.n_t : std::max(1, static_cast<int>(std::ceil(opt.alpha * T * kmax / kPi)));
    f.time_samples = std::max(opt.min_time_samples, opt.samples_per_mode * f.n_t);
    const int nr = static_cast<int>(region.nodes.size());
    const Vec mu = d.measure();
    if (opt.spatial == SpatialBasis::nodes) {
        // L²-normalized node indicators.
        f.spatial = Mat::Zero(nr, nr);
        for (int r = 0; r < nr; ++r) f.spatial(r, r) = 1.0 / std::sqrt(mu[region.nodes[r]]);
        if (opt.n_s > 0) require(opt.n_s <= nr, ErrorCode::invalid_argument, "region too small for n_s modes");
        return f;
    }
    Vec s = Vec::Zero(nr);
    for (int r = 1; r < nr; ++r) s[r] = s[r - 1] + (d.edge_lengths.size() ? d.edge_lengths[region.nodes[r - 1]] : 0.0);
    const double ell = std::max(s[nr - 1], 1e-300);
    int n_s = opt.n_s > 0 ? opt.n_s
                          : (nr > 1 ? static_cast<int>(std::ceil(opt.alpha * ell * kmax / kPi)) : 1);
    require(n_s <= nr, ErrorCode::invalid_argument, "region too small for n_s modes");
    n_s = std::max(n_s, 1);
    f.spatial.resize(nr, n_s);
    for (int a = 0; a < n_s; ++a)
        for (int r = 0; r < nr; ++r) f.spatial(r, a) = nr > 1 ? std::cos(kPi * a * s[r] / ell) : 1.0;
    return f;
}

Mat wave_coefficient_matrix(const BoundarySpectralData& d, const SourceFamily& family, double t)
{
    require(t <= family.horizon + 1e-12, ErrorCode::invalid_argument, "span time exceeds the family horizon");
    const int K = d.K();
    const int ns = static_cast<int>(family.spatial.cols());
    const Vec mu = d.measure();
    // Dirichlet-data waves pick up the outward normal derivative with a minus sign.
    const double sign = d.kind == BoundaryCondition::dirichlet ? -1.0 : 1.0;
    Mat S(K, ns);
    for (int a = 0; a < ns; ++a) {
        Vec acc = Vec::Zero(K);
        for (size_t r = 0; r < family.region.size(); ++r) {
            const int z = family.region[r];
            acc += d.traces.col(z) * (mu[z] * family.spatial(static_cast<Eigen::Index>(r), a));
        }
        S.col(a) = sign * acc;
    }
    const Vec times = family.times();
    const auto tw = time_weights(times, t);
    const double floor = lambda_floor(d.eigenvalues);
    Mat ker(K, tw.size());
    Mat theta(tw.size(), family.n_t);
    for (size_t q = 0; q < tw.size(); ++q) {
        const auto [i, w] = tw[q];
        for (int k = 0; k < K; ++k) ker(k, static_cast<Eigen::Index>(q)) = sine_kernel(d.eigenvalues[k], t - times[i], floor);
        for (int b = 0; b < family.n_t; ++b) {
            const double norm = std::sqrt((b == 0 ? 1.0 : 2.0) / family.horizon);
            theta(static_cast<Eigen::Index>(q), b) = w * norm * std::cos(kPi * b * times[i] / family.horizon);
        }
    }
    const Mat Tk = ker * theta;  // K x n_t
    Mat U(K, ns * family.n_t);
    for (int a = 0; a < ns; ++a)
        for (int b = 0; b < family.n_t; ++b) U.col(a * family.n_t + b) = S.col(a).cwiseProduct(Tk.col(b));
    return U;
}

Subspace wave_span(const BoundarySpectralData& d, const SourceFamily& family, double t, double rank_tol)
{
    if (t <= 0) {
        Subspace z = zero_subspace(d.K());
        z.provenance = "wave-span";
        z.rank_tol = rank_tol;
        return z;
    }
    const Mat U = wave_coefficient_matrix(d, family, t);
    require(U.cwiseAbs().maxCoeff() > 0, ErrorCode::invalid_argument, "degenerate source family");
    return range_subspace(U, rank_tol, "wave-span");
}

Subspace wave_span(const BoundarySpectralData& d, const BoundaryRegion& region, double t, const FamilyOptions& opt,
                   double rank_tol)
{
    if (t <= 0) return wave_span(d, SourceFamily{}, 0.0, rank_tol);
    return wave_span(d, default_source_family(d, region, t, opt), t, rank_tol);
}

Subspace oracle_subspace(const EigenSystem& es, const std::vector<char>& mask, double rank_tol)
{
    require(mask.size() == static_cast<size_t>(es.modes.rows()), ErrorCode::invalid_argument, "mask size mismatch");
    const int K = es.K();
    Mat C = Mat::Zero(K, K);
    int count = 0;
    for (Eigen::Index v = 0; v < es.modes.rows(); ++v)
        if (mask[v]) {
            C.noalias() += es.mass_weights[v] * es.modes.row(v).transpose() * es.modes.row(v);
            ++count;
        }
    require(count > 0, ErrorCode::invalid_argument, "empty oracle mask");
    // C = A Aᵀ, so σ_k² are its eigenvalues.
    Eigen::SelfAdjointEigenSolver<Mat> eig(C);
    const Vec& ev = eig.eigenvalues();
    const double cut = rank_tol * rank_tol * ev.maxCoeff();
    Subspace s;
    s.provenance = "oracle";
    s.rank_tol = rank_tol;
    int r = 0;
    for (int k = K - 1; k >= 0 && ev[k] >= cut; --k) ++r;
    s.basis = eig.eigenvectors().rightCols(r).rowwise().reverse();
    return s;
}

Vec concentration_angles(const EigenSystem& es, const std::vector<char>& mask, const Subspace& s)
{
    require(mask.size() == static_cast<size_t>(es.modes.rows()), ErrorCode::invalid_argument, "mask size mismatch");
    require(s.K() <= es.K(), ErrorCode::invalid_argument, "subspace has more modes than the eigensystem");
    const int K = s.K();
    Mat C = Mat::Zero(K, K);
    for (Eigen::Index v = 0; v < es.modes.rows(); ++v)
        if (mask[v]) C.noalias() += es.mass_weights[v] * es.modes.row(v).head(K).transpose() * es.modes.row(v).head(K);
    Eigen::SelfAdjointEigenSolver<Mat> eig(s.basis.transpose() * C * s.basis, Eigen::EigenvaluesOnly);
    const Vec& ev = eig.eigenvalues();  // ascending, cos² of the angles
    Vec out(ev.size());
    for (int i = 0; i < ev.size(); ++i)
        out[ev.size() - 1 - i] = std::acos(std::sqrt(std::clamp(ev[i], 0.0, 1.0))) * 180.0 / kPi;
    return out;
}

SubspaceExpr SubspaceExpr::of(Subspace s)
{
    SubspaceExpr e;
    e.op = Op::leaf;
    e.leaf = std::move(s);
    return e;
}

SubspaceExpr SubspaceExpr::intersect(std::vector<SubspaceExpr> parts)
{
    SubspaceExpr e;
    e.op = Op::intersect;
    e.args = std::move(parts);
    return e;
}

SubspaceExpr SubspaceExpr::minus(SubspaceExpr a, SubspaceExpr b)
{
    SubspaceExpr e;
    e.op = Op::complement_intersect;
    e.args = {std::move(a), std::move(b)};
    return e;
}

Subspace stacked_intersection(int K, const std::vector<Subspace>& ins, const std::vector<Subspace>& outs,
                              const AlgebraOptions& opt)
{
    Mat Q = Mat::Zero(K, K);
    for (const auto& a : ins) {
        require(a.K() == K, ErrorCode::invalid_argument, "inconsistent K in subspace algebra");
        Q += Mat::Identity(K, K) - a.projector();
    }
    for (const auto& b : outs) {
        require(b.K() == K, ErrorCode::invalid_argument, "inconsistent K in subspace algebra");
        Q += b.projector();
    }
    Eigen::SelfAdjointEigenSolver<Mat> eig(Q);
    const double cut = std::pow(std::sin(opt.angle_tol_deg * kPi / 180.0), 2);
    int r = 0;
    while (r < K && eig.eigenvalues()[r] <= cut) ++r;
    Subspace s;
    s.provenance = "algebra";
    s.angle_tol_deg = opt.angle_tol_deg;
    s.basis = eig.eigenvectors().leftCols(r);
    s.spectrum = eig.eigenvalues();
    return s;
}

namespace {

int expr_K(const SubspaceExpr& e)
{
    if (e.op == SubspaceExpr::Op::leaf) return e.leaf.K();
    require(!e.args.empty(), ErrorCode::invalid_argument, "empty subspace expression");
    return expr_K(e.args.front());
}

void collect(const SubspaceExpr& e, std::vector<Subspace>& ins, std::vector<Subspace>& outs, const AlgebraOptions& opt)
{
    switch (e.op) {
    case SubspaceExpr::Op::leaf:
        ins.push_back(e.leaf);
        break;
    case SubspaceExpr::Op::intersect:
        for (const auto& a : e.args) collect(a, ins, outs, opt);
        break;
    case SubspaceExpr::Op::complement_intersect:
        require(e.args.size() == 2, ErrorCode::invalid_argument, "⊖ takes two operands");
        collect(e.args[0], ins, outs, opt);
        outs.push_back(e.args[1].op == SubspaceExpr::Op::leaf ? e.args[1].leaf : subspace_algebra(e.args[1], opt));
        break;
    }
}

}  // namespace

Subspace subspace_algebra(const SubspaceExpr& expr, const AlgebraOptions& opt)
{
    const int K = expr_K(expr);
    std::vector<Subspace> ins, outs;
    collect(expr, ins, outs, opt);
    return stacked_intersection(K, ins, outs, opt);
}

Subspace sliced_subspace(const BoundarySpectralData& d, const InfluenceSpec& spec, const SliceOptions& opt)
{
    spec.validate();
    const int K = d.K();
    std::vector<Subspace> ins, outs;
    for (size_t i = 0; i < spec.regions.size(); ++i) {
        if (spec.t_minus[i] >= spec.t_plus[i]) {
            Subspace z = zero_subspace(K);
            z.provenance = "algebra";
            z.spectrum = Vec::Constant(K, 1.0);
            z.angle_tol_deg = opt.algebra.angle_tol_deg;
            return z;
        }
        ins.push_back(wave_span(d, spec.regions[i], spec.t_plus[i], opt.in_family, opt.rank_tol));
        if (spec.t_minus[i] > 0) outs.push_back(wave_span(d, spec.regions[i], spec.t_minus[i], opt.out_family, opt.rank_tol));
    }
    return stacked_intersection(K, ins, outs, opt.algebra);
}

double projector_entry(const Subspace& s, int i, int j)
{
    require(i >= 0 && j >= 0 && i < s.K() && j < s.K(), ErrorCode::invalid_argument, "projector index out of range");
    return s.basis.row(i).dot(s.basis.row(j));
}

bool is_nonempty(const Subspace& s, double dim_tol)
{
    if (s.spectrum.size()) {
        const double tol = dim_tol >= 0 ? dim_tol : std::pow(std::sin(s.angle_tol_deg * kPi / 180.0), 2);
        return s.spectrum[0] <= tol;
    }
    return s.dim() >= 1;
}

void write_subspace(const Subspace& s, const std::string& path)
{
    json h;
    h["format"] = "bclab-subspace/1";
    h["K"] = s.K();
    h["m"] = s.dim();
    h["rank_tol"] = s.rank_tol;
    h["angle_tol_deg"] = s.angle_tol_deg;
    h["provenance"] = s.provenance;
    h["spectrum"] = to_json(s.spectrum);
    write_tagged(path, h, s.basis);
}

Subspace read_subspace(const std::string& path)
{
    auto [h, P] = read_tagged(path, "bclab-subspace/1");
    Subspace s;
    try {
        s.rank_tol = h.at("rank_tol");
        s.angle_tol_deg = h.at("angle_tol_deg");
        s.provenance = h.at("provenance");
        s.spectrum = vec_from_json(h.at("spectrum"));
        require(h.at("K").get<Eigen::Index>() == P.rows() && h.at("m").get<Eigen::Index>() == P.cols(),
                ErrorCode::format, path + ": basis shape mismatch");
    } catch (const json::exception& e) {
        fail(ErrorCode::format, path + ": " + e.what());
    }
    s.basis = P;
    return s;
}

}  // namespace bclab
