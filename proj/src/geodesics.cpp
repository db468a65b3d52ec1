#include "bclab/geodesics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "bclab/io.hpp"

namespace bclab {

namespace {

Point clamp_to_chart(const GridManifold& m, Point x)
{
    const auto e = m.extent();
    for (int a = 0; a < m.dim; ++a) x[a] = std::clamp(x[a], m.origin[a], m.origin[a] + e[a]);
    return x;
}

Eigen::Matrix2d inverse_metric(const GridManifold& m, const Point& x) { return m.metric_at(x).inverse(); }

double half_quadratic(const Eigen::Matrix2d& ginv, const Point& xi) { return 0.5 * xi.dot(ginv * xi); }

struct State {
    Point x, xi;
};

State rhs(const GridManifold& m, const State& s)
{
    const Point x = clamp_to_chart(m, s.x);
    PhasePoint p{x, s.xi};
    return {inverse_metric(m, x) * s.xi, -hamiltonian_gradient(m, p)};
}

// Bilinear interpolation of a node field at a chart point.
double interpolate(const GridManifold& m, const Vec& f, const Point& x)
{
    const Point c = clamp_to_chart(m, x);
    double fi = (c[0] - m.origin[0]) / m.spacing[0];
    double fj = m.dim > 1 ? (c[1] - m.origin[1]) / m.spacing[1] : 0.0;
    const int i0 = std::min(static_cast<int>(fi), m.shape[0] - 2);
    const int j0 = m.dim > 1 ? std::min(static_cast<int>(fj), m.shape[1] - 2) : 0;
    const double s = fi - i0, t = fj - j0;
    if (m.dim == 1) return (1 - s) * f[i0] + s * f[i0 + 1];
    return (1 - s) * (1 - t) * f[m.node(i0, j0)] + s * (1 - t) * f[m.node(i0 + 1, j0)] +
           (1 - s) * t * f[m.node(i0, j0 + 1)] + s * t * f[m.node(i0 + 1, j0 + 1)];
}

// Inward Euclidean normal of the chart face at x; zero in the interior, error at corners.
Point inward_normal(const GridManifold& m, const Point& x, double tol = 1e-12)
{
    const auto e = m.extent();
    Point n = Point::Zero();
    int faces = 0;
    for (int a = 0; a < m.dim; ++a) {
        if (std::abs(x[a] - m.origin[a]) <= tol) {
            n[a] = 1.0;
            ++faces;
        } else if (std::abs(x[a] - m.origin[a] - e[a]) <= tol) {
            n[a] = -1.0;
            ++faces;
        }
    }
    if (faces > 1 && m.dim > 1) n.setZero();  // corner: caller decides
    return n;
}

bool on_boundary(const GridManifold& m, const Point& x, double tol = 1e-12)
{
    const auto e = m.extent();
    for (int a = 0; a < m.dim; ++a)
        if (std::abs(x[a] - m.origin[a]) <= tol || std::abs(x[a] - m.origin[a] - e[a]) <= tol) return true;
    return false;
}

}  // namespace

double hamiltonian(const GridManifold& m, const PhasePoint& p)
{
    require(m.inside(p.x, 1e-9), ErrorCode::invalid_argument, "position outside the chart");
    Point xi = p.xi;
    if (m.dim == 1) xi[1] = 0.0;
    return half_quadratic(inverse_metric(m, p.x), xi);
}

Point hamiltonian_gradient(const GridManifold& m, const PhasePoint& p, double delta)
{
    Point grad = Point::Zero();
    const auto e = m.extent();
    for (int a = 0; a < m.dim; ++a) {
        Point lo = p.x, hi = p.x;
        lo[a] = std::max(p.x[a] - delta, m.origin[a]);
        hi[a] = std::min(p.x[a] + delta, m.origin[a] + e[a]);
        grad[a] = (half_quadratic(inverse_metric(m, hi), p.xi) - half_quadratic(inverse_metric(m, lo), p.xi)) /
                  (hi[a] - lo[a]);
    }
    return grad;
}

GeodesicPath integrate_geodesic(const GridManifold& m, const PhasePoint& start, double T, double dt)
{
    require(dt > 0 && T >= 0, ErrorCode::invalid_argument, "need dt > 0 and T ≥ 0");
    require(dt >= 1e-14 * std::max(T, 1.0), ErrorCode::invalid_argument, "step underflow");
    require(m.inside(start.x, 1e-12), ErrorCode::invalid_argument, "start outside the chart");
    State s{start.x, start.xi};
    if (m.dim == 1) s.xi[1] = 0.0;

    const int steps = static_cast<int>(std::ceil(T / dt - 1e-9));
    std::vector<double> ts{0.0};
    std::vector<State> traj{s};
    double t = 0.0;
    bool exited = false;
    for (int n = 0; n < steps; ++n) {
        const double h = std::min(dt, T - t);
        const State k1 = rhs(m, s);
        const State k2 = rhs(m, {s.x + 0.5 * h * k1.x, s.xi + 0.5 * h * k1.xi});
        const State k3 = rhs(m, {s.x + 0.5 * h * k2.x, s.xi + 0.5 * h * k2.xi});
        const State k4 = rhs(m, {s.x + h * k3.x, s.xi + h * k3.xi});
        State next{s.x + h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x),
                   s.xi + h / 6 * (k1.xi + 2 * k2.xi + 2 * k3.xi + k4.xi)};
        if (!m.inside(next.x, 1e-12)) {
            exited = true;
            break;
        }
        s = next;
        t += h;
        ts.push_back(t);
        traj.push_back(s);
    }
    require(traj.size() > 1 || steps == 0, ErrorCode::pipeline, "geodesic leaves the chart immediately");

    GeodesicPath path;
    path.exited = exited;
    const int n = static_cast<int>(traj.size());
    path.times.resize(n);
    path.positions.resize(n, 2);
    path.momenta.resize(n, 2);
    path.hamiltonian_values.resize(n);
    for (int i = 0; i < n; ++i) {
        path.times[i] = ts[i];
        path.positions.row(i) = traj[i].x.transpose();
        path.momenta.row(i) = traj[i].xi.transpose();
        path.hamiltonian_values[i] = hamiltonian(m, {traj[i].x, traj[i].xi});
    }
    path.drift = (path.hamiltonian_values.array() - path.hamiltonian_values[0]).abs().maxCoeff();
    return path;
}

void write_path_csv(const GeodesicPath& path, const std::string& file)
{
    Mat rows(path.times.size(), 6);
    for (Eigen::Index i = 0; i < path.times.size(); ++i)
        rows.row(i) << path.times[i], path.positions(i, 0), path.positions(i, 1), path.momenta(i, 0),
            path.momenta(i, 1), path.hamiltonian_values[i];
    write_csv(file, {"t", "x0", "x1", "xi0", "xi1", "G"}, rows);
}

ResidualReport geodesic_residual(const ConformalFactor& h, const ConformalFactor& dh, const Vec& u, const Vec& v)
{
    require(u.size() == v.size(), ErrorCode::invalid_argument, "u and v differ in length");
    require(u.size() >= 5, ErrorCode::invalid_argument, "grid too coarse for second differences");
    const double du = u[1] - u[0];
    require(du > 0, ErrorCode::invalid_argument, "u-grid must increase");
    for (Eigen::Index i = 1; i < u.size(); ++i)
        require(std::abs(u[i] - u[i - 1] - du) <= 1e-9 * std::max(1.0, std::abs(du)), ErrorCode::invalid_argument,
                "u-grid must be uniform");
    const int n = static_cast<int>(u.size()) - 4;
    ResidualReport r;
    r.u = u.segment(2, n);
    r.residual.resize(n);
    r.first_integral.resize(n);
    double best = INFINITY;
    for (int j = 0; j < n; ++j) {
        const int i = j + 2;
        const double d1 = (-v[i + 2] + 8 * v[i + 1] - 8 * v[i - 1] + v[i - 2]) / (12 * du);
        const double d2 = (-v[i + 2] + 16 * v[i + 1] - 30 * v[i] + 16 * v[i - 1] - v[i - 2]) / (12 * du * du);
        const double hv = h(v[i]);
        r.residual[j] = 2 * d2 - (1 + d1 * d1) * dh(v[i]) / hv;
        r.first_integral[j] = hv - (1 + d1 * d1);
        if (std::abs(u[i]) < best) {
            best = std::abs(u[i]);
            r.value_at_zero = v[i];
            r.slope_at_zero = d1;
        }
    }
    r.max_residual = r.residual.cwiseAbs().maxCoeff();
    r.max_first_integral = r.first_integral.cwiseAbs().maxCoeff();
    return r;
}

ResidualReport geodesic_residual(HartmanKind kind, int k, const Vec& u, const Vec& v)
{
    return geodesic_residual([=](double x) { return hartman_h(kind, k, x); },
                             [=](double x) { return hartman_dh(kind, k, x); }, u, v);
}

BranchingWitness branching_witness(HartmanKind kind, int k, double u_max, double du)
{
    require(u_max > 0 && du > 0 && k >= 1, ErrorCode::invalid_argument, "need u_max > 0, du > 0, k ≥ 1");
    const int half = static_cast<int>(std::lround(u_max / du));
    // Two extra points per side so the reported grid covers [-u_max, u_max].
    const Vec u = Vec::LinSpaced(2 * half + 5, -(half + 2) * du, (half + 2) * du);
    Vec v0 = Vec::Zero(u.size()), v1(u.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        const double x = u[i];
        if (kind == HartmanKind::power)
            v1[i] = std::pow(x, 2 * k + 1);
        else
            v1[i] = x == 0.0 ? 0.0 : std::copysign(std::exp(-1.0 / std::pow(std::abs(x), k)), x);
    }
    BranchingWitness w;
    w.trivial = geodesic_residual(kind, k, u, v0);
    w.branch = geodesic_residual(kind, k, u, v1);
    w.jet_gap = std::abs(w.trivial.value_at_zero - w.branch.value_at_zero) +
                std::abs(w.trivial.slope_at_zero - w.branch.slope_at_zero);
    w.separation_at_end = std::abs(v1[half + 2 + half] - v0[half + 2 + half]);
    return w;
}

OsgoodReport osgood_classify(const Vec& t, const Vec& omega, const OsgoodOptions& opt)
{
    require(t.size() == omega.size(), ErrorCode::invalid_argument, "t and ω differ in length");
    require(t.size() >= opt.min_scales, ErrorCode::invalid_argument, "fewer dyadic scales than required");
    for (Eigen::Index i = 0; i < t.size(); ++i) {
        require(omega[i] > 0 && t[i] > 0, ErrorCode::invalid_argument, "ω and t must be positive");
        if (i > 0) {
            require(t[i] < t[i - 1], ErrorCode::invalid_argument, "t must decrease");
            require(omega[i] <= omega[i - 1], ErrorCode::invalid_argument, "ω must be nondecreasing in t");
        }
    }
    const int n = static_cast<int>(t.size());
    OsgoodReport r;
    r.t_min = t;
    r.partial_integrals = Vec::Zero(n);
    Vec inc(n - 1);
    for (int i = 1; i < n; ++i) {
        // ∫ dt/ω = ∫ (t/ω) d log t, trapezoid in log t.
        inc[i - 1] = std::log(t[i - 1] / t[i]) * 0.5 * (t[i - 1] / omega[i - 1] + t[i] / omega[i]);
        r.partial_integrals[i] = r.partial_integrals[i - 1] + inc[i - 1];
    }
    auto fit = [](const Vec& x, const Vec& y) {
        const double mx = x.mean(), my = y.mean();
        return ((x.array() - mx) * (y.array() - my)).sum() / (x.array() - mx).square().sum();
    };
    const int first = (n - 1) / 2;
    const int count = n - 1 - first;
    Vec li(count), la(count), lt(count), pi(count);
    for (int j = 0; j < count; ++j) {
        const int i = first + j;
        li[j] = std::log(double(i + 1));
        la[j] = std::log(inc[i]);
        lt[j] = std::log(1.0 / t[i + 1]);
        pi[j] = r.partial_integrals[i + 1];
    }
    r.decay_exponent = count >= 2 ? -fit(li, la) : 0.0;
    r.log_slope = count >= 2 ? fit(lt, pi) : 0.0;
    r.unique_flow = r.decay_exponent <= opt.decay_threshold;
    return r;
}

Point exp_map(const GridManifold& m, const Point& p, const Point& v, double t, double dt)
{
    require(m.inside(p, 1e-12), ErrorCode::invalid_argument, "base point outside the chart");
    if (t == 0.0) return p;
    if (on_boundary(m, p)) {
        const auto e = m.extent();
        for (int a = 0; a < m.dim; ++a) {
            double n = 0.0;
            if (std::abs(p[a] - m.origin[a]) <= 1e-12) n = 1.0;
            if (std::abs(p[a] - m.origin[a] - e[a]) <= 1e-12) n = -1.0;
            if (n != 0.0)
                require(n * v[a] > 1e-9 * v.norm(), ErrorCode::invalid_argument,
                        "boundary start must point strictly inward");
        }
    }
    Point vv = v;
    if (m.dim == 1) vv[1] = 0.0;
    const PhasePoint start{p, m.metric_at(p) * vv};
    const GeodesicPath path = integrate_geodesic(m, start, t, dt);
    require(!path.exited, ErrorCode::pipeline, "geodesic left the chart before time t");
    return path.positions.row(path.positions.rows() - 1).transpose();
}

ExpRate exp_map_convergence(const GridManifold& m, const std::vector<double>& eps, const std::vector<Point>& ps,
                            const std::vector<Point>& vs, double t, double dt)
{
    require(eps.size() >= 2, ErrorCode::invalid_argument, "need at least two ε values");
    std::vector<Point> base;
    for (const Point& p : ps)
        for (const Point& v : vs) base.push_back(exp_map(m, p, v, t, dt));
    ExpRate r;
    r.eps = eps;
    for (double e : eps) {
        const GridManifold me = with_conformal_perturbation(m, e);
        double worst = 0.0;
        size_t idx = 0;
        for (const Point& p : ps)
            for (const Point& v : vs) worst = std::max(worst, (exp_map(me, p, v, t, dt) - base[idx++]).norm());
        r.max_error.push_back(worst);
    }
    Vec x(eps.size()), y(eps.size());
    for (size_t i = 0; i < eps.size(); ++i) {
        x[i] = std::log(eps[i]);
        y[i] = std::log(r.max_error[i]);
    }
    const double mx = x.mean(), my = y.mean();
    r.slope = ((x.array() - mx) * (y.array() - my)).sum() / (x.array() - mx).square().sum();
    return r;
}

MinimalityReport minimality_check(const GridManifold& m, int node, double rho, int directions, int samples,
                                  const DistanceOptions& opt)
{
    require(m.dim == 2, ErrorCode::invalid_argument, "minimality check runs on 2D charts");
    require(node >= 0 && node < m.num_nodes(), ErrorCode::invalid_argument, "node out of range");
    require(rho > 0 && directions >= 1 && samples >= 1, ErrorCode::invalid_argument, "need ρ > 0 and samples");
    DistanceGraph graph(m, opt);
    const Vec to_boundary = graph.distances(m.boundary_nodes);
    const Point p = m.coords(node);
    MinimalityReport r;
    r.boundary = on_boundary(m, p);
    r.t = Vec::LinSpaced(samples + 1, 0.0, rho);
    r.deviation = Vec::Zero(samples + 1);
    const double dt = std::min(1e-3, rho / 50);

    if (r.boundary) {
        const Point n = inward_normal(m, p);
        require(n.squaredNorm() > 0, ErrorCode::invalid_argument, "inward normal undefined at a corner");
        const Eigen::Matrix2d ginv = m.metric_at(p).inverse();
        // Unit inward normal: the g-dual of the conormal, normalized.
        const Point nu = ginv * n / std::sqrt(n.dot(ginv * n));
        const double reach = m.extent()[0] + m.extent()[1];
        require(rho < reach, ErrorCode::invalid_argument, "ρ exceeds the chart reach");
        for (int s = 1; s <= samples; ++s) {
            const Point x = exp_map(m, p, nu, r.t[s], dt);
            r.deviation[s] = std::abs(interpolate(m, to_boundary, x) - r.t[s]);
        }
    } else {
        require(rho <= to_boundary[node], ErrorCode::invalid_argument, "ρ exceeds the distance to the boundary");
        const Vec from_p = graph.distances({node});
        const Eigen::Matrix2d g = m.metric_at(p);
        for (int dir = 0; dir < directions; ++dir) {
            const double th = 2 * kPi * dir / directions;
            Point v(std::cos(th), std::sin(th));
            v /= std::sqrt(v.dot(g * v));
            for (int s = 1; s <= samples; ++s) {
                const Point x = exp_map(m, p, v, r.t[s], dt);
                r.deviation[s] = std::max(r.deviation[s], std::abs(interpolate(m, from_p, x) - r.t[s]));
            }
        }
    }
    r.max_deviation = r.deviation.maxCoeff();
    return r;
}

}  // namespace bclab
