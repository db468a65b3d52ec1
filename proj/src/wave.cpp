#include "bclab/wave.hpp"

#include <cmath>

namespace bclab {

void BoundarySource::validate() const
{
    require(!region.empty(), ErrorCode::invalid_argument, "source region is empty");
    require(times.size() >= 2 && times[0] == 0.0, ErrorCode::invalid_argument, "source times must start at 0");
    require(values.rows() == static_cast<Eigen::Index>(region.size()) && values.cols() == times.size(),
            ErrorCode::invalid_argument, "source values shape mismatch");
    require(values.allFinite(), ErrorCode::invalid_argument, "source values not finite");
}

Vec BoundarySource::at(double t) const
{
    const Eigen::Index n = times.size();
    if (t < 0 || t > horizon()) return Vec::Zero(values.rows());
    const double dt = times[1] - times[0];
    const double s = t / dt;
    const Eigen::Index i = std::min<Eigen::Index>(static_cast<Eigen::Index>(s), n - 2);
    const double a = s - i;
    return (1 - a) * values.col(i) + a * values.col(i + 1);
}

BoundarySource separable_source(const IVec& region, const Vec& spatial, const Vec& times, const Vec& temporal)
{
    BoundarySource f;
    f.region = region;
    f.times = times;
    f.values = spatial * temporal.transpose();
    f.validate();
    return f;
}

BoundarySource pulse_source(const IVec& region, double T, double t0, double t1, int samples)
{
    require(samples >= 2 && T > 0 && t1 > t0 && t0 >= 0, ErrorCode::invalid_argument, "bad pulse parameters");
    const Vec times = Vec::LinSpaced(samples, 0.0, T);
    Vec th(samples);
    for (int i = 0; i < samples; ++i) {
        const double t = times[i];
        th[i] = (t > t0 && t < t1) ? std::pow(std::sin(kPi * (t - t0) / (t1 - t0)), 2) : 0.0;
    }
    return separable_source(region, Vec::Ones(static_cast<Eigen::Index>(region.size())), times, th);
}

double lambda_floor(const Vec& eigenvalues)
{
    for (Eigen::Index k = 0; k < eigenvalues.size(); ++k)
        if (eigenvalues[k] > 1e-8 * eigenvalues.cwiseAbs().maxCoeff()) return 1e-12 * eigenvalues[k];
    return 1e-300;
}

double sine_kernel(double lambda, double tau, double floor)
{
    if (lambda < floor) return tau;
    const double w = std::sqrt(lambda);
    return std::sin(w * tau) / w;
}

std::vector<std::pair<int, double>> time_weights(const Vec& times, double t)
{
    std::vector<std::pair<int, double>> out;
    if (t <= 0) return out;
    const Eigen::Index n = times.size();
    const double dt = times[1] - times[0];
    const Eigen::Index last = std::min<Eigen::Index>(static_cast<Eigen::Index>(std::floor(t / dt + 1e-9)), n - 1);
    for (Eigen::Index i = 0; i <= last; ++i) out.emplace_back(static_cast<int>(i), (i == 0 || i == last) ? 0.5 * dt : dt);
    if (last == 0) out[0].second = 0.0;
    // Partial interval up to t: the integrand vanishes at t' = t because the kernel does.
    const double rem = t - times[last];
    if (rem > 1e-12 * dt) out.back().second += 0.5 * rem;
    return out;
}

Vec blagovestchenskii(const BoundarySpectralData& d, const BoundarySource& f, double t)
{
    require(d.kind == BoundaryCondition::neumann, ErrorCode::invalid_argument,
            "Blagovestchenskii synthesis needs Neumann data");
    f.validate();
    require(t <= f.horizon() + 1e-12, ErrorCode::invalid_argument, "t exceeds the source horizon");
    const int K = d.K();
    const Vec dS = d.measure();
    const double floor = lambda_floor(d.eigenvalues);
    // Time-integrate against the kernel per node, then sum against traces.
    Vec u = Vec::Zero(K);
    const auto tw = time_weights(f.times, t);
    for (int k = 0; k < K; ++k) {
        double acc = 0.0;
        for (auto [i, w] : tw) {
            const double s = sine_kernel(d.eigenvalues[k], t - f.times[i], floor);
            double space = 0.0;
            for (size_t r = 0; r < f.region.size(); ++r)
                space += f.values(static_cast<Eigen::Index>(r), i) * d.traces(k, f.region[r]) * dS[f.region[r]];
            acc += w * s * space;
        }
        u[k] = acc;
    }
    return u;
}

double leapfrog_dt_limit(const GridManifold& m)
{
    const LaplaceOperator op = assemble_laplacian(m, BoundaryCondition::neumann);
    double bound = 0.0;
    for (int col = 0; col < op.stiffness.outerSize(); ++col) {
        double row = 0.0;
        for (Eigen::SparseMatrix<double>::InnerIterator it(op.stiffness, col); it; ++it) row += std::abs(it.value());
        bound = std::max(bound, row / op.mass[col]);
    }
    return 2.0 / std::sqrt(bound);
}

DirectWaveResult direct_wave_solve(const GridManifold& m, const BoundarySource& f, double T, double dt, double cfl)
{
    f.validate();
    require(T > 0 && dt > 0, ErrorCode::invalid_argument, "T and dt must be positive");
    const LaplaceOperator op = assemble_laplacian(m, BoundaryCondition::neumann);
    const double limit = leapfrog_dt_limit(m);
    const int steps = static_cast<int>(std::ceil(T / dt - 1e-9));
    const double h = T / steps;
    require(h <= cfl * limit, ErrorCode::invalid_argument,
            "CFL violation: dt " + std::to_string(h) + " exceeds " + std::to_string(cfl * limit));
    const int n = m.num_nodes();
    const Vec minv = op.mass.cwiseInverse();
    auto load = [&](double t) {
        Vec b = Vec::Zero(n);
        const Vec fv = f.at(t);
        for (size_t r = 0; r < f.region.size(); ++r) {
            const int z = f.region[r];
            b[m.boundary_nodes.at(z)] += fv[static_cast<Eigen::Index>(r)] * m.boundary_weights[z];
        }
        return b;
    };
    DirectWaveResult res;
    res.dt = h;
    res.times.resize(steps + 1);
    res.boundary_trace.resize(steps + 1, m.boundary_nodes.size());
    res.energy.resize(steps + 1);
    Vec prev = Vec::Zero(n);
    Vec cur = 0.5 * h * h * minv.cwiseProduct(load(0.0));
    auto record = [&](int s, const Vec& u) {
        res.times[s] = s * h;
        for (size_t b = 0; b < m.boundary_nodes.size(); ++b)
            res.boundary_trace(s, static_cast<Eigen::Index>(b)) = u[m.boundary_nodes[b]];
    };
    record(0, prev);
    res.energy[0] = 0.0;
    for (int s = 1; s <= steps; ++s) {
        record(s, cur);
        const Vec Ku = op.stiffness * cur;
        const Vec next = 2.0 * cur - prev + h * h * minv.cwiseProduct(load(s * h) - Ku);
        const Vec vel = (next - prev) / (2.0 * h);
        res.energy[s] = 0.5 * (vel.dot(op.mass.cwiseProduct(vel)) + cur.dot(Ku));
        prev = cur;
        cur = next;
    }
    res.u = prev;  // value at step `steps`
    return res;
}

Vec project_onto_modes(const EigenSystem& es, const Vec& u)
{
    return es.modes.transpose() * es.mass_weights.cwiseProduct(u);
}

SynthComparison compare_synthesis(const GridManifold& m, int K, const BoundarySource& f, double t, double dt,
                                  double cfl)
{
    const EigenSystem es = solve_eigensystem(assemble_laplacian(m, BoundaryCondition::neumann), m, K);
    const BoundarySpectralData d = boundary_traces(es, m);
    if (dt <= 0) dt = cfl * leapfrog_dt_limit(m);
    SynthComparison c;
    c.spectral = blagovestchenskii(d, f, t);
    const DirectWaveResult w = direct_wave_solve(m, f, t, dt, cfl);
    c.direct = project_onto_modes(es, w.u);
    c.dt = w.dt;
    c.mismatch = (c.spectral - c.direct).norm() / c.direct.norm();
    return c;
}

}  // namespace bclab
