#include "bclab/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>

#include "bclab/io.hpp"

namespace bclab {

double hartman_h(HartmanKind kind, int k, double v)
{
    const double a = std::abs(v);
    if (kind == HartmanKind::power) {
        const double c = 2.0 * k + 1.0;
        return 1.0 + c * c * std::pow(a, 4.0 * k / c);
    }
    if (a == 0.0) return 1.0;
    const double q = 2.0 + 2.0 / k;
    return 1.0 + k * k * std::pow(std::abs(std::log(a)), q) * v * v;
}

double hartman_dh(HartmanKind kind, int k, double v)
{
    const double a = std::abs(v);
    if (a == 0.0) return 0.0;
    const double s = v > 0 ? 1.0 : -1.0;
    if (kind == HartmanKind::power) {
        const double c = 2.0 * k + 1.0;
        const double p = 4.0 * k / c;
        return c * c * p * std::pow(a, p - 1.0) * s;
    }
    const double q = 2.0 + 2.0 / k;
    const double l = std::log(a);
    const double al = std::abs(l);
    const double sl = l > 0 ? 1.0 : (l < 0 ? -1.0 : 0.0);
    return k * k * (q * std::pow(al, q - 1.0) * sl * v + 2.0 * v * std::pow(al, q));
}

namespace {

bool is_2d(const std::string& name)
{
    return name == "flat-rectangle" || name == "warped-rectangle" || name == "hartman-power" ||
           name == "hartman-log";
}

double get(const Params& p, const std::string& key)
{
    auto it = p.find(key);
    require(it != p.end(), ErrorCode::invalid_argument, "missing preset parameter: " + key);
    return it->second;
}

// Closed-form metric of a preset at chart point x, without perturbation.
Eigen::Matrix2d preset_metric(const std::string& name, const Params& p, const Point& x)
{
    Eigen::Matrix2d g = Eigen::Matrix2d::Identity();
    if (name == "flat-interval" || name == "flat-rectangle") return g;
    if (name == "speed-profile-1d") {
        const double c = 1.0 + get(p, "amp") * std::sin(x[0]);
        g(0, 0) = 1.0 / (c * c);
        return g;
    }
    if (name == "warped-rectangle") {
        const double w = 1.0 + get(p, "amp") * std::sin(kPi * x[0] / get(p, "Lx"));
        g(1, 1) = w * w;
        return g;
    }
    if (name == "hartman-power" || name == "hartman-log") {
        const auto kind = name == "hartman-power" ? HartmanKind::power : HartmanKind::log;
        return g * hartman_h(kind, static_cast<int>(get(p, "k")), x[1]);
    }
    fail(ErrorCode::invalid_argument, "unknown preset: " + name);
}

double simpson_length(const GridManifold& m, const Point& a, const Point& b)
{
    const Point d = b - a;
    auto f = [&](double s) {
        const Point x = a + s * d;
        return std::sqrt(std::max(0.0, d.dot(m.metric_at(x) * d)));
    };
    return (f(0.0) + 4.0 * f(0.5) + f(1.0)) / 6.0;
}

}  // namespace

const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{"flat-interval", "speed-profile-1d", "flat-rectangle",
                                                "warped-rectangle", "hartman-power", "hartman-log"};
    return names;
}

Params preset_defaults(const std::string& name)
{
    if (name == "flat-interval") return {{"L", kPi}, {"N", 1024}};
    if (name == "speed-profile-1d") return {{"L", kPi}, {"N", 1024}, {"amp", 0.3}};
    if (name == "flat-rectangle") return {{"Lx", kPi}, {"Ly", kPi}, {"nx", 32}, {"ny", 32}};
    if (name == "warped-rectangle") return {{"Lx", 1.0}, {"Ly", 1.0}, {"nx", 32}, {"ny", 32}, {"amp", 0.3}};
    if (name == "hartman-power" || name == "hartman-log")
        return {{"U", 1.0}, {"V", 1.0}, {"nx", 33}, {"ny", 33}, {"k", 1}};
    fail(ErrorCode::invalid_argument, "unknown preset: " + name);
}

Point GridManifold::coords(int n) const
{
    const int i = n % shape[0];
    const int j = n / shape[0];
    return {origin[0] + i * spacing[0], origin[1] + j * spacing[1]};
}

bool GridManifold::inside(const Point& x, double slack) const
{
    const auto e = extent();
    for (int a = 0; a < dim; ++a)
        if (x[a] < origin[a] - slack || x[a] > origin[a] + e[a] + slack) return false;
    return true;
}

Eigen::Matrix2d GridManifold::metric_node(int n) const
{
    Eigen::Matrix2d g = Eigen::Matrix2d::Identity();
    if (dim == 1) {
        g(0, 0) = metric(n, 0);
    } else {
        g << metric(n, 0), metric(n, 1), metric(n, 1), metric(n, 2);
    }
    return g;
}

double GridManifold::perturbation_q(const Point& x) const
{
    const auto e = extent();
    double q = std::cos(kPi * (x[0] - origin[0]) / e[0]);
    if (dim == 2) q *= std::cos(0.5 * kPi * (x[1] - origin[1]) / e[1]) + 0.5;
    return q;
}

Eigen::Matrix2d GridManifold::metric_bilinear(const Point& x) const
{
    double fi = (x[0] - origin[0]) / spacing[0];
    fi = std::clamp(fi, 0.0, shape[0] - 1.0);
    int i0 = std::min(static_cast<int>(fi), shape[0] - 2);
    if (shape[0] < 2) i0 = 0;
    const double s = fi - i0;
    if (dim == 1) {
        const double g = (1 - s) * metric(i0, 0) + s * metric(std::min(i0 + 1, shape[0] - 1), 0);
        Eigen::Matrix2d out = Eigen::Matrix2d::Identity();
        out(0, 0) = g;
        return out;
    }
    double fj = std::clamp((x[1] - origin[1]) / spacing[1], 0.0, shape[1] - 1.0);
    const int j0 = std::min(static_cast<int>(fj), shape[1] - 2);
    const double t = fj - j0;
    return (1 - s) * (1 - t) * metric_node(node(i0, j0)) + s * (1 - t) * metric_node(node(i0 + 1, j0)) +
           (1 - s) * t * metric_node(node(i0, j0 + 1)) + s * t * metric_node(node(i0 + 1, j0 + 1));
}

Eigen::Matrix2d GridManifold::metric_at(const Point& x) const
{
    Eigen::Matrix2d g = preset.empty() ? metric_bilinear(x) : preset_metric(preset, params, x);
    if (conformal_eps != 0.0) {
        const double f = 1.0 + conformal_eps * perturbation_q(x);
        if (dim == 1)
            g(0, 0) *= f;
        else
            g *= f;
    }
    return g;
}

Vec GridManifold::boundary_arclength() const
{
    Vec s(boundary_nodes.size());
    if (dim == 1) return Vec::Zero(s.size());
    s[0] = 0.0;
    for (Eigen::Index i = 1; i < s.size(); ++i) s[i] = s[i - 1] + boundary_edge_lengths[i - 1];
    return s;
}

double GridManifold::boundary_length() const { return dim == 1 ? 0.0 : boundary_edge_lengths.sum(); }

void finalize_geometry(GridManifold& m)
{
    const int n = m.num_nodes();
    m.interior_weights.resize(n);
    for (int v = 0; v < n; ++v) {
        const int i = v % m.shape[0];
        const int j = v / m.shape[0];
        double w = m.spacing[0] * ((i == 0 || i == m.shape[0] - 1) ? 0.5 : 1.0);
        if (m.dim == 2) w *= m.spacing[1] * ((j == 0 || j == m.shape[1] - 1) ? 0.5 : 1.0);
        const Eigen::Matrix2d g = m.metric_node(v);
        const double det = m.dim == 1 ? g(0, 0) : g.determinant();
        require(det > 0 && g(0, 0) > 0, ErrorCode::invalid_argument, "metric not positive definite at node " +
                                                                          std::to_string(v));
        m.interior_weights[v] = w * std::sqrt(det);
    }
    m.boundary_nodes.clear();
    if (m.dim == 1) {
        m.boundary_nodes = {0, m.shape[0] - 1};
        m.boundary_weights = Vec::Ones(2);
        m.boundary_edge_lengths.resize(0);
        return;
    }
    const int nx = m.shape[0], ny = m.shape[1];
    for (int i = 0; i < nx; ++i) m.boundary_nodes.push_back(m.node(i, 0));
    for (int j = 1; j < ny; ++j) m.boundary_nodes.push_back(m.node(nx - 1, j));
    for (int i = nx - 2; i >= 0; --i) m.boundary_nodes.push_back(m.node(i, ny - 1));
    for (int j = ny - 2; j >= 1; --j) m.boundary_nodes.push_back(m.node(0, j));
    const int nb = static_cast<int>(m.boundary_nodes.size());
    m.boundary_edge_lengths.resize(nb);
    for (int b = 0; b < nb; ++b)
        m.boundary_edge_lengths[b] =
            simpson_length(m, m.coords(m.boundary_nodes[b]), m.coords(m.boundary_nodes[(b + 1) % nb]));
    m.boundary_weights.resize(nb);
    for (int b = 0; b < nb; ++b)
        m.boundary_weights[b] = 0.5 * (m.boundary_edge_lengths[b] + m.boundary_edge_lengths[(b + nb - 1) % nb]);
}

GridManifold metric_from_preset(const std::string& name, const Params& params)
{
    Params p = preset_defaults(name);
    for (const auto& [k, v] : params) p[k] = v;
    GridManifold m;
    m.preset = name;
    if (!is_2d(name)) {
        const int N = static_cast<int>(get(p, "N"));
        require(N >= 3, ErrorCode::invalid_argument, "grid size must be at least 3");
        require(get(p, "L") > 0, ErrorCode::invalid_argument, "length must be positive");
        m.dim = 1;
        m.shape = {N, 1};
        m.spacing = {get(p, "L") / (N - 1), 1.0};
    } else {
        const int nx = static_cast<int>(get(p, "nx"));
        const int ny = static_cast<int>(get(p, "ny"));
        require(nx >= 3 && ny >= 3, ErrorCode::invalid_argument, "grid size must be at least 3 per axis");
        m.dim = 2;
        m.shape = {nx, ny};
        if (name == "hartman-power" || name == "hartman-log") {
            const double k = get(p, "k");
            require(k >= 1 && std::floor(k) == k, ErrorCode::invalid_argument, "Hartman k must be a positive integer");
            const double U = get(p, "U"), V = get(p, "V");
            require(U > 0 && V > 0, ErrorCode::invalid_argument, "Hartman half-widths must be positive");
            m.origin = {-U, -V};
            m.spacing = {2 * U / (nx - 1), 2 * V / (ny - 1)};
        } else {
            require(get(p, "Lx") > 0 && get(p, "Ly") > 0, ErrorCode::invalid_argument, "lengths must be positive");
            m.spacing = {get(p, "Lx") / (nx - 1), get(p, "Ly") / (ny - 1)};
        }
    }
    m.params = p;
    const int n = m.num_nodes();
    m.metric.resize(n, m.dim == 1 ? 1 : 3);
    for (int v = 0; v < n; ++v) {
        const Eigen::Matrix2d g = preset_metric(name, p, m.coords(v));
        if (m.dim == 1)
            m.metric(v, 0) = g(0, 0);
        else
            m.metric.row(v) << g(0, 0), g(0, 1), g(1, 1);
    }
    finalize_geometry(m);
    return m;
}

GridManifold with_conformal_perturbation(const GridManifold& m, double eps)
{
    GridManifold out = m;
    out.conformal_eps = eps;
    for (int v = 0; v < out.num_nodes(); ++v) out.metric.row(v) *= 1.0 + eps * out.perturbation_q(out.coords(v));
    finalize_geometry(out);
    return out;
}

DistanceGraph::DistanceGraph(const GridManifold& m, const DistanceOptions& opt)
{
    require(opt.stencil_radius >= 1 && opt.stencil_radius <= 4, ErrorCode::invalid_argument,
            "stencil radius must be in 1..4");
    std::vector<std::pair<int, int>> offsets;
    if (m.dim == 1) {
        offsets = {{-1, 0}, {1, 0}};
    } else {
        const int r = opt.stencil_radius;
        for (int a = -r; a <= r; ++a)
            for (int b = -r; b <= r; ++b)
                if ((a || b) && std::gcd(std::abs(a), std::abs(b)) == 1) offsets.emplace_back(a, b);
    }
    const int n = m.num_nodes();
    start_.assign(n + 1, 0);
    for (int v = 0; v < n; ++v) {
        const int i = v % m.shape[0], j = v / m.shape[0];
        for (auto [a, b] : offsets) {
            const int i2 = i + a, j2 = j + b;
            if (i2 < 0 || i2 >= m.shape[0] || j2 < 0 || j2 >= m.shape[1]) continue;
            const int w = m.node(i2, j2);
            target_.push_back(w);
            length_.push_back(simpson_length(m, m.coords(v), m.coords(w)));
        }
        start_[v + 1] = static_cast<int>(target_.size());
    }
}

Vec DistanceGraph::distances(const IVec& source) const
{
    require(!source.empty(), ErrorCode::invalid_argument, "distance source is empty");
    const int n = num_nodes();
    Vec d = Vec::Constant(n, std::numeric_limits<double>::infinity());
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (int s : source) {
        require(s >= 0 && s < n, ErrorCode::invalid_argument, "source node out of range");
        d[s] = 0.0;
        pq.emplace(0.0, s);
    }
    while (!pq.empty()) {
        auto [dv, v] = pq.top();
        pq.pop();
        if (dv > d[v]) continue;
        for (int e = start_[v]; e < start_[v + 1]; ++e) {
            const double nd = dv + length_[e];
            if (nd < d[target_[e]]) {
                d[target_[e]] = nd;
                pq.emplace(nd, target_[e]);
            }
        }
    }
    return d;
}

Vec distance_map(const GridManifold& m, const IVec& source, const DistanceOptions& opt)
{
    return DistanceGraph(m, opt).distances(source);
}

void InfluenceSpec::validate() const
{
    require(!regions.empty(), ErrorCode::invalid_argument, "influence spec needs at least one region");
    require(t_plus.size() == regions.size() && t_minus.size() == regions.size(), ErrorCode::invalid_argument,
            "influence spec time vectors must match the region count");
    for (size_t i = 0; i < regions.size(); ++i) {
        require(!regions[i].nodes.empty(), ErrorCode::invalid_argument, "empty boundary region");
        require(t_plus[i] >= 0 && t_minus[i] >= 0, ErrorCode::invalid_argument, "negative influence time");
    }
}

std::vector<char> domain_of_influence(const GridManifold& m, const InfluenceSpec& spec, const DistanceOptions& opt)
{
    spec.validate();
    DistanceGraph graph(m, opt);
    std::vector<char> mask(m.num_nodes(), 1);
    for (size_t r = 0; r < spec.regions.size(); ++r) {
        IVec src;
        for (int b : spec.regions[r].nodes) src.push_back(m.boundary_nodes.at(b));
        const Vec d = graph.distances(src);
        // t_minus = 0 removes nothing: M(Γ,0) is measure zero.
        for (int v = 0; v < m.num_nodes(); ++v) {
            const bool in_plus = d[v] <= spec.t_plus[r];
            const bool in_minus = spec.t_minus[r] > 0 && d[v] <= spec.t_minus[r];
            if (!in_plus || in_minus) mask[v] = 0;
        }
    }
    return mask;
}

Vec boundary_distance_function(const GridManifold& m, int x, const DistanceOptions& opt)
{
    require(x >= 0 && x < m.num_nodes(), ErrorCode::invalid_argument, "node out of range");
    const Vec d = distance_map(m, {x}, opt);
    Vec r(m.boundary_nodes.size());
    for (size_t b = 0; b < m.boundary_nodes.size(); ++b) r[b] = d[m.boundary_nodes[b]];
    return r;
}

Mat boundary_distance_table(const GridManifold& m, const DistanceOptions& opt)
{
    DistanceGraph graph(m, opt);
    const int nb = static_cast<int>(m.boundary_nodes.size());
    Mat table(m.num_nodes(), nb);
    for (int b = 0; b < nb; ++b) table.col(b) = graph.distances({m.boundary_nodes[b]});
    return table;
}

BoundaryRegion boundary_ball(const GridManifold& m, int center, double radius)
{
    const int nb = static_cast<int>(m.boundary_nodes.size());
    require(center >= 0 && center < nb, ErrorCode::invalid_argument, "boundary index out of range");
    BoundaryRegion r;
    r.label = "ball(" + std::to_string(center) + "," + format_double(radius) + ")";
    if (m.dim == 1) {
        r.nodes = {center};
        return r;
    }
    const Vec s = m.boundary_arclength();
    const double total = m.boundary_length();
    // Walk outwards so the region is contiguous along the loop.
    r.nodes.push_back(center);
    for (int step = 1; step < nb; ++step) {
        const int b = (center + step) % nb;
        double d = std::abs(s[b] - s[center]);
        d = std::min(d, total - d);
        if (d > radius + 1e-12) break;
        r.nodes.push_back(b);
    }
    for (int step = 1; step < nb; ++step) {
        const int b = (center - step + nb) % nb;
        if (std::find(r.nodes.begin(), r.nodes.end(), b) != r.nodes.end()) break;
        double d = std::abs(s[b] - s[center]);
        d = std::min(d, total - d);
        if (d > radius + 1e-12) break;
        r.nodes.insert(r.nodes.begin(), b);
    }
    return r;
}

void write_manifold(const GridManifold& m, const std::string& path)
{
    json h;
    h["format"] = "bclab-manifold/1";
    h["dim"] = m.dim;
    h["shape"] = m.shape;
    h["spacing"] = m.spacing;
    h["origin"] = m.origin;
    h["preset"] = m.preset;
    h["params"] = m.params;
    h["conformal_eps"] = m.conformal_eps;
    h["node_order"] = "row-major, x fastest";
    h["columns"] = m.dim == 1 ? json{"g11"} : json{"g11", "g12", "g22"};
    write_tagged(path, h, m.metric);
}

GridManifold read_manifold(const std::string& path)
{
    auto [h, payload] = read_tagged(path, "bclab-manifold/1");
    GridManifold m;
    try {
        m.dim = h.at("dim");
        m.shape = h.at("shape");
        m.spacing = h.at("spacing");
        m.origin = h.at("origin");
        m.preset = h.at("preset");
        m.params = h.at("params").get<Params>();
        m.conformal_eps = h.value("conformal_eps", 0.0);
    } catch (const json::exception& e) {
        fail(ErrorCode::format, path + ": " + e.what());
    }
    require(payload.rows() == m.num_nodes() && payload.cols() == (m.dim == 1 ? 1 : 3), ErrorCode::format,
            path + ": metric payload shape mismatch");
    m.metric = payload;
    finalize_geometry(m);
    return m;
}

}  // namespace bclab
