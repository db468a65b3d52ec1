#include "bclab/spectral.hpp"

#include <lapacke.h>

#include <cmath>
#include <random>

#include "bclab/io.hpp"

namespace bclab {

std::string to_string(BoundaryCondition bc) { return bc == BoundaryCondition::neumann ? "neumann" : "dirichlet"; }

BoundaryCondition parse_boundary_condition(const std::string& s)
{
    if (s == "neumann") return BoundaryCondition::neumann;
    if (s == "dirichlet") return BoundaryCondition::dirichlet;
    fail(ErrorCode::invalid_argument, "unknown boundary condition: " + s);
}

namespace {

// √det g · g⁻¹, the divergence-form coefficient.
Eigen::Matrix2d flux_coefficient(const GridManifold& m, const Point& x)
{
    const Eigen::Matrix2d g = m.metric_at(x);
    if (m.dim == 1) {
        Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
        require(g(0, 0) > 0, ErrorCode::invalid_argument, "metric not positive definite");
        a(0, 0) = 1.0 / std::sqrt(g(0, 0));
        return a;
    }
    const double det = g.determinant();
    require(det > 0 && g(0, 0) > 0, ErrorCode::invalid_argument, "metric not positive definite");
    return std::sqrt(det) * g.inverse();
}

}  // namespace

LaplaceOperator assemble_laplacian(const GridManifold& m, BoundaryCondition bc)
{
    const int n = m.num_nodes();
    std::vector<Eigen::Triplet<double>> trip;
    if (m.dim == 1) {
        const double h = m.spacing[0];
        for (int i = 0; i + 1 < n; ++i) {
            const Point mid(m.origin[0] + (i + 0.5) * h, 0.0);
            const double a = flux_coefficient(m, mid)(0, 0) / h;
            trip.emplace_back(i, i, a);
            trip.emplace_back(i + 1, i + 1, a);
            trip.emplace_back(i, i + 1, -a);
            trip.emplace_back(i + 1, i, -a);
        }
    } else {
        const int nx = m.shape[0], ny = m.shape[1];
        const int tris[2][3][2] = {{{0, 0}, {1, 0}, {1, 1}}, {{0, 0}, {1, 1}, {0, 1}}};
        for (int j = 0; j + 1 < ny; ++j)
            for (int i = 0; i + 1 < nx; ++i)
                for (const auto& tri : tris) {
                    int ids[3];
                    Eigen::Matrix3d V;
                    Point c = Point::Zero();
                    for (int a = 0; a < 3; ++a) {
                        ids[a] = m.node(i + tri[a][0], j + tri[a][1]);
                        const Point p = m.coords(ids[a]);
                        V.row(a) << 1.0, p[0], p[1];
                        c += p / 3.0;
                    }
                    const double area = std::abs(V.determinant()) / 2.0;
                    const Eigen::Matrix<double, 2, 3> G = V.inverse().bottomRows<2>();
                    const Eigen::Matrix3d Ke = area * G.transpose() * flux_coefficient(m, c) * G;
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b) trip.emplace_back(ids[a], ids[b], Ke(a, b));
                }
    }
    Eigen::SparseMatrix<double> full(n, n);
    full.setFromTriplets(trip.begin(), trip.end());

    LaplaceOperator op;
    op.bc = bc;
    std::vector<char> fixed(n, 0);
    if (bc == BoundaryCondition::dirichlet)
        for (int b : m.boundary_nodes) fixed[b] = 1;
    IVec index(n, -1);
    for (int v = 0; v < n; ++v)
        if (!fixed[v]) {
            index[v] = static_cast<int>(op.free_nodes.size());
            op.free_nodes.push_back(v);
        }
    const int nf = static_cast<int>(op.free_nodes.size());
    std::vector<Eigen::Triplet<double>> kept;
    for (int col = 0; col < full.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(full, col); it; ++it)
            if (index[it.row()] >= 0 && index[it.col()] >= 0)
                kept.emplace_back(index[it.row()], index[it.col()], it.value());
    op.stiffness.resize(nf, nf);
    op.stiffness.setFromTriplets(kept.begin(), kept.end());
    op.mass.resize(nf);
    for (int r = 0; r < nf; ++r) op.mass[r] = m.interior_weights[op.free_nodes[r]];
    return op;
}

namespace {

void apply_sign_convention(EigenSystem& es, const Mat& traces)
{
    for (int k = 0; k < es.K(); ++k) {
        const double mx = traces.row(k).cwiseAbs().maxCoeff();
        for (Eigen::Index b = 0; b < traces.cols(); ++b)
            if (std::abs(traces(k, b)) > 1e-8 * mx) {
                if (traces(k, b) < 0) es.modes.col(k) *= -1.0;
                break;
            }
    }
}

}  // namespace

EigenSystem solve_eigensystem(const LaplaceOperator& op, const GridManifold& m, int K)
{
    const int nf = static_cast<int>(op.free_nodes.size());
    require(K >= 1 && K <= nf, ErrorCode::invalid_argument, "K must be in 1..free node count");
    const Vec isq = op.mass.cwiseSqrt().cwiseInverse();
    Vec w(nf);
    Mat Z(nf, K);
    lapack_int found = 0;
    std::vector<lapack_int> support(2 * static_cast<size_t>(nf));
    lapack_int info = 0;
    if (m.dim == 1) {
        // Mass-symmetrized operator is tridiagonal because dV is lumped.
        Vec d(nf), e(std::max(nf - 1, 1));
        for (int i = 0; i < nf; ++i) d[i] = op.stiffness.coeff(i, i) * isq[i] * isq[i];
        for (int i = 0; i + 1 < nf; ++i) e[i] = op.stiffness.coeff(i, i + 1) * isq[i] * isq[i + 1];
        info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', nf, d.data(), e.data(), 0.0, 0.0, 1, K, 0.0, &found,
                              w.data(), Z.data(), nf, support.data());
    } else {
        Mat S = isq.asDiagonal() * Mat(op.stiffness) * isq.asDiagonal();
        info = LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'U', nf, S.data(), nf, 0.0, 0.0, 1, K, 0.0, &found,
                              w.data(), Z.data(), nf, support.data());
    }
    require(info == 0 && found == K, ErrorCode::solver, "eigensolver failed (info " + std::to_string(info) + ")");

    EigenSystem es;
    es.bc = op.bc;
    es.eigenvalues = w.head(K);
    es.mass_weights = m.interior_weights;
    es.modes = Mat::Zero(m.num_nodes(), K);
    for (int r = 0; r < nf; ++r) es.modes.row(op.free_nodes[r]) = Z.row(r) * isq[r];

    if (op.bc == BoundaryCondition::neumann) {
        // The discrete kernel is exactly the constants; pin it and re-orthogonalize.
        const Vec& W = es.mass_weights;
        Vec one = Vec::Constant(m.num_nodes(), 1.0 / std::sqrt(W.sum()));
        es.modes.col(0) = one;
        es.eigenvalues[0] = 0.0;
        for (int k = 1; k < K; ++k) {
            Vec v = es.modes.col(k);
            for (int pass = 0; pass < 2; ++pass)
                for (int j = 0; j < k; ++j) v -= es.modes.col(j).dot(W.asDiagonal() * v) * es.modes.col(j);
            es.modes.col(k) = v / std::sqrt(v.dot(W.asDiagonal() * v));
        }
    }
    Mat traces(K, m.boundary_nodes.size());
    if (op.bc == BoundaryCondition::neumann) {
        for (size_t b = 0; b < m.boundary_nodes.size(); ++b)
            traces.col(static_cast<Eigen::Index>(b)) = es.modes.row(m.boundary_nodes[b]).transpose();
    } else {
        traces = normal_derivative_traces(es, m);
    }
    apply_sign_convention(es, traces);
    return es;
}

double orthonormality_residual(const EigenSystem& es)
{
    const Mat G = es.modes.transpose() * es.mass_weights.asDiagonal() * es.modes;
    return (G - Mat::Identity(es.K(), es.K())).cwiseAbs().maxCoeff();
}

Mat normal_derivative_traces(const EigenSystem& es, const GridManifold& m)
{
    const int K = es.K();
    const int nb = static_cast<int>(m.boundary_nodes.size());
    Mat out = Mat::Zero(K, nb);
    // One-sided second-order difference into the interior along axis a from node v,
    // scaled to the outward unit normal (sign: outward = -inward).
    auto face = [&](int v, int axis, int inward_step) -> Vec {
        const double h = m.spacing[axis];
        const int stride = axis == 0 ? 1 : m.shape[0];
        const int v1 = v + inward_step * stride, v2 = v + 2 * inward_step * stride;
        const Vec d_in = (-3.0 * es.modes.row(v) + 4.0 * es.modes.row(v1) - es.modes.row(v2)).transpose() / (2.0 * h);
        const Eigen::Matrix2d gi = m.metric_node(v).inverse();
        return -std::sqrt(gi(axis, axis)) * d_in;
    };
    for (int b = 0; b < nb; ++b) {
        const int v = m.boundary_nodes[b];
        if (m.dim == 1) {
            out.col(b) = face(v, 0, v == 0 ? 1 : -1);
            continue;
        }
        const int i = v % m.shape[0], j = v / m.shape[0];
        Vec acc = Vec::Zero(K);
        int faces = 0;
        if (i == 0) acc += face(v, 0, 1), ++faces;
        if (i == m.shape[0] - 1) acc += face(v, 0, -1), ++faces;
        if (j == 0) acc += face(v, 1, 1), ++faces;
        if (j == m.shape[1] - 1) acc += face(v, 1, -1), ++faces;
        out.col(b) = acc / faces;
    }
    return out;
}

Vec BoundarySpectralData::arclength() const
{
    Vec s = Vec::Zero(num_boundary());
    for (int b = 1; b < num_boundary() && edge_lengths.size(); ++b) s[b] = s[b - 1] + edge_lengths[b - 1];
    return s;
}

BoundarySpectralData boundary_traces(const EigenSystem& es, const GridManifold& m)
{
    BoundarySpectralData d;
    d.kind = es.bc;
    d.dim = m.dim;
    d.eigenvalues = es.eigenvalues;
    const int nb = static_cast<int>(m.boundary_nodes.size());
    if (es.bc == BoundaryCondition::neumann) {
        d.traces.resize(es.K(), nb);
        for (int b = 0; b < nb; ++b) d.traces.col(b) = es.modes.row(m.boundary_nodes[b]).transpose();
    } else {
        d.traces = normal_derivative_traces(es, m);
    }
    d.boundary_coords.resize(nb, m.dim);
    for (int b = 0; b < nb; ++b) d.boundary_coords.row(b) = m.coords(m.boundary_nodes[b]).head(m.dim).transpose();
    d.dS = m.boundary_weights;
    d.edge_lengths = m.boundary_edge_lengths;
    return d;
}

BoundarySpectralData forward_data(const GridManifold& m, int K, BoundaryCondition bc)
{
    return boundary_traces(solve_eigensystem(assemble_laplacian(m, bc), m, K), m);
}

std::vector<std::pair<int, int>> eigen_clusters(const Vec& eigenvalues, double rel_tol)
{
    std::vector<std::pair<int, int>> out;
    const int K = static_cast<int>(eigenvalues.size());
    int first = 0;
    for (int k = 1; k <= K; ++k) {
        const bool split = k == K || (eigenvalues[k] - eigenvalues[k - 1]) >
                                         rel_tol * std::max(std::abs(eigenvalues[k]), 1e-300);
        if (split) {
            out.emplace_back(first, k - 1);
            first = k;
        }
    }
    return out;
}

BoundarySpectralData perturb_data(const BoundarySpectralData& d, const PerturbOptions& opt)
{
    BoundarySpectralData out = d;
    const int K = opt.K_trunc < 0 ? d.K() : opt.K_trunc;
    require(K >= 1 && K <= d.K(), ErrorCode::invalid_argument, "K_trunc exceeds available modes");
    out.eigenvalues = d.eigenvalues.head(K);
    out.traces = d.traces.topRows(K);
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    if (opt.mix) {
        for (auto [a, b] : eigen_clusters(out.eigenvalues, opt.cluster_tol)) {
            const int l = b - a + 1;
            if (l == 1) {
                if (normal(rng) < 0) out.traces.row(a) *= -1.0;
                continue;
            }
            Mat G(l, l);
            for (int i = 0; i < l; ++i)
                for (int j = 0; j < l; ++j) G(i, j) = normal(rng);
            Eigen::HouseholderQR<Mat> qr(G);
            Mat Q = qr.householderQ();
            const Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
            for (int i = 0; i < l; ++i)
                if (R(i, i) < 0) Q.col(i) *= -1.0;
            out.traces.middleRows(a, l) = Q * out.traces.middleRows(a, l);
        }
    }
    if (opt.sigma > 0) {
        for (int k = 0; k < K; ++k) out.eigenvalues[k] *= 1.0 + opt.sigma * normal(rng);
        for (Eigen::Index i = 0; i < out.traces.size(); ++i) out.traces.data()[i] += opt.sigma * normal(rng);
        // Keep the ordering contract after noise.
        std::vector<int> order(K);
        for (int k = 0; k < K; ++k) order[k] = k;
        std::stable_sort(order.begin(), order.end(),
                         [&](int x, int y) { return out.eigenvalues[x] < out.eigenvalues[y]; });
        Vec lam(K);
        Mat tr(K, out.traces.cols());
        for (int k = 0; k < K; ++k) {
            lam[k] = out.eigenvalues[order[k]];
            tr.row(k) = out.traces.row(order[k]);
        }
        out.eigenvalues = lam;
        out.traces = tr;
    }
    return out;
}

BoundarySpectralData with_kappa(const BoundarySpectralData& d, const Vec& kappa)
{
    require(kappa.size() == d.num_boundary(), ErrorCode::invalid_argument, "kappa size mismatch");
    require(kappa.minCoeff() > 0, ErrorCode::invalid_argument, "kappa must be positive");
    BoundarySpectralData out = d;
    out.kappa = kappa;
    return out;
}

void write_spectral_data(const BoundarySpectralData& d, const std::string& path)
{
    json h;
    h["format"] = "bclab-spectral/1";
    h["kind"] = to_string(d.kind);
    h["dim"] = d.dim;
    h["K"] = d.K();
    h["boundary_nodes"] = d.num_boundary();
    h["adjacency"] = d.dim == 1 ? "none" : "cyclic";
    h["eigenvalues"] = to_json(d.eigenvalues);
    h["has_kappa"] = d.kappa.size() > 0;
    std::vector<std::string> cols;
    for (int a = 0; a < d.dim; ++a) cols.push_back(a == 0 ? "x" : "y");
    cols.insert(cols.end(), {"dS", "kappa", "edge_length"});
    for (int k = 1; k <= d.K(); ++k) cols.push_back("trace" + std::to_string(k));
    h["columns"] = cols;
    const int nb = d.num_boundary();
    Mat P(nb, d.dim + 3 + d.K());
    for (int b = 0; b < nb; ++b) {
        P.row(b).head(d.dim) = d.boundary_coords.row(b);
        P(b, d.dim) = d.dS[b];
        P(b, d.dim + 1) = d.kappa.size() ? d.kappa[b] : 1.0;
        P(b, d.dim + 2) = d.edge_lengths.size() ? d.edge_lengths[b] : 0.0;
        P.row(b).tail(d.K()) = d.traces.col(b).transpose();
    }
    write_tagged(path, h, P);
}

BoundarySpectralData read_spectral_data(const std::string& path)
{
    auto [h, P] = read_tagged(path, "bclab-spectral/1");
    BoundarySpectralData d;
    try {
        d.kind = parse_boundary_condition(h.at("kind"));
        d.dim = h.at("dim");
        d.eigenvalues = vec_from_json(h.at("eigenvalues"));
    } catch (const json::exception& e) {
        fail(ErrorCode::format, path + ": " + e.what());
    }
    const int K = d.K();
    require(P.cols() == d.dim + 3 + K, ErrorCode::format, path + ": payload width does not match K");
    d.boundary_coords = P.leftCols(d.dim);
    d.dS = P.col(d.dim);
    if (h.value("has_kappa", false)) d.kappa = P.col(d.dim + 1);
    if (d.dim == 2) d.edge_lengths = P.col(d.dim + 2);
    d.traces = P.rightCols(K).transpose();
    for (int k = 1; k < K; ++k)
        require(d.eigenvalues[k] >= d.eigenvalues[k - 1], ErrorCode::format, path + ": eigenvalues not ascending");
    return d;
}

}  // namespace bclab
