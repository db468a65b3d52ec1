#include "bclab/config.hpp"

#include <fstream>
#include <sstream>

#include "bclab/io.hpp"

namespace bclab {

namespace {

std::string trim(const std::string& s)
{
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_number(const std::string& key, const std::string& v)
{
    try {
        size_t used = 0;
        const double x = std::stod(v, &used);
        if (used == v.size()) return x;
    } catch (const std::exception&) {
    }
    fail(ErrorCode::config, "config key " + key + ": not a number: '" + v + "'");
}

}  // namespace

const std::vector<ConfigKey>& config_schema()
{
    static const std::vector<ConfigKey> schema{
        {"preset", "flat-interval", "manifold preset"},
        {"bc", "neumann", "boundary condition: neumann | dirichlet"},
        {"K", "100", "number of eigenpairs"},
        {"seed", "1", "seed for perturbations"},
        {"threads", "1", "worker threads; results do not depend on it"},
        {"sigma", "0", "forward: trace and relative eigenvalue noise"},
        {"mix", "false", "forward: random orthogonal mixing within clusters"},
        {"K_trunc", "-1", "forward: keep only the first K_trunc modes (-1: all)"},
        {"cluster_tol", "1e-6", "relative eigenvalue gap below which modes share a cluster"},
        {"span.alpha_in", "0.9", "bandwidth factor of the inner (t+) source families"},
        {"span.alpha_out", "1.0", "bandwidth factor of the outer (t-) source families"},
        {"span.rank_tol", "1e-6", "relative singular-value cutoff of wave spans"},
        {"span.samples_per_mode", "40", "time samples per temporal mode"},
        {"span.min_time_samples", "400", "minimum time samples per family"},
        {"span.spatial", "nodes", "spatial source basis: nodes | cosine"},
        {"algebra.angle_tol_deg", "10", "angle tolerance of the subspace algebra"},
        {"distance.stencil_radius", "3", "grid-graph stencil radius for ground-truth distances"},
        {"detect.m_schedule", "2,4,8,16", "net levels m; slab width 1/m"},
        {"detect.resolvable_width", "0", "skip widths below this"},
        {"detect.patch_factor", "0.5", "2D patch radius as a fraction of the net spacing"},
        {"travel.coarse_tol", "1e-3", "bisection tolerance of the coarse travel length"},
        {"travel.band_width", "0.0625", "slab half-width used to locate the accepted band"},
        {"travel.edge_tol", "1e-3", "bisection tolerance of the band edges"},
        {"travel.probe_fractions", "0.3,0.5,0.7", "probe positions as fractions of the coarse length"},
        {"recon.resolution", "0.05", "a-grid step of the 1D blind search"},
        {"recon.net_points", "40", "1D interior net size"},
        {"recon.net_margin", "0.3", "distance kept from the endpoints"},
        {"recon.report_points", "20", "points in the reported distance matrix"},
        {"recon.widths", "0.0625,0.03125", "shrinking slab widths, decreasing"},
        {"recon.modes", "10", "recovered eigenfunction values per point"},
        {"recon.jet_neighbors", "7", "moving least-squares window (1D)"},
        {"recon.jet_degree", "4", "moving least-squares degree (1D)"},
        {"recon.jet_neighbors_2d", "12", "moving least-squares window (2D)"},
        {"recon.jet_degree_2d", "2", "moving least-squares degree (2D)"},
        {"recon.chart_last_mode", "3", "last chart candidate mode (0-based)"},
        {"recon.metric_last_mode", "6", "last mode used in the metric solve (0-based)"},
        {"recon.rcond", "1e-10", "truncated-SVD threshold of the metric solve"},
        {"recon.label_nodes", "0,-1", "2D boundary nodes whose distances label points (-1: quarter loop)"},
        {"synth.t", "1.5", "synth: evaluation time"},
        {"synth.pulse", "0.1,0.6", "synth: pulse support (t0,t1)"},
        {"synth.dt", "0", "synth: leapfrog step (0: from the stability limit)"},
        {"synth.cfl", "0.9", "synth: fraction of the stability limit"},
        {"geodesics.demo", "branching", "branching | exp-rate | osgood | minimality | path"},
        {"geodesics.preset", "warped-rectangle", "exp-rate, minimality, path: manifold preset"},
        {"geodesics.kind", "power", "Hartman family: power | log"},
        {"geodesics.k", "1", "Hartman family index"},
        {"geodesics.u_max", "1", "branching: half-width of the u-interval"},
        {"geodesics.du", "1e-3", "branching: u-grid step"},
        {"geodesics.eps", "0.1,0.01,0.001,0.0001", "exp-rate: perturbation sizes"},
        {"geodesics.t", "0.2", "exp-rate, path: flow time"},
        {"geodesics.dt", "1e-3", "integrator step"},
        {"geodesics.start", "0.5,0.5,1,0", "path: x0,x1,xi0,xi1"},
        {"geodesics.omega", "t", "osgood: t | tlog | power"},
        {"geodesics.omega_power", "0.6", "osgood: exponent for omega = power"},
        {"geodesics.scales", "40", "osgood: dyadic scales"},
        {"geodesics.rho", "0.3", "minimality: radius"},
        {"geodesics.node", "-1", "minimality: node index (-1: centre)"},
        {"osgood.decay_threshold", "1.25", "increment decay exponent above which the integral looks finite"},
        {"osgood.min_scales", "4", "fewest dyadic scales accepted"},
        {"stability.K_list", "100", "stability: truncations"},
        {"stability.sigma_list", "0,1e-4,1e-3,1e-2", "stability: noise levels"},
        {"stability.seeds", "1,2,3", "stability: seeds per cell"},
    };
    return schema;
}

Config::Config()
{
    for (const ConfigKey& k : config_schema()) values_[k.key] = k.value;
}

void Config::set(const std::string& key, const std::string& value)
{
    if (key.rfind("param.", 0) == 0) {
        parse_number(key, value);
    } else {
        require(values_.count(key) > 0, ErrorCode::config, "unknown config key: " + key);
    }
    values_[key] = value;
}

void Config::set_assignment(const std::string& line)
{
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorCode::config, "expected key=value, got '" + line + "'");
    set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
}

void Config::load_file(const std::string& path)
{
    std::ifstream in(path);
    require(in.good(), ErrorCode::io, "cannot open config " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        try {
            set_assignment(line);
        } catch (const Error& e) {
            fail(ErrorCode::config, path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

const std::string& Config::str(const std::string& key) const
{
    auto it = values_.find(key);
    require(it != values_.end(), ErrorCode::config, "unknown config key: " + key);
    return it->second;
}

double Config::num(const std::string& key) const { return parse_number(key, str(key)); }

int Config::integer(const std::string& key) const
{
    const double v = num(key);
    require(v == std::floor(v), ErrorCode::config, "config key " + key + " must be an integer");
    return static_cast<int>(v);
}

bool Config::flag(const std::string& key) const
{
    const std::string& v = str(key);
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(ErrorCode::config, "config key " + key + " must be true or false");
}

std::vector<double> Config::nums(const std::string& key) const
{
    std::vector<double> out;
    for (const std::string& s : split_list(str(key))) out.push_back(parse_number(key, s));
    return out;
}

std::vector<int> Config::ints(const std::string& key) const
{
    std::vector<int> out;
    for (double v : nums(key)) {
        require(v == std::floor(v), ErrorCode::config, "config key " + key + " must list integers");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

Params Config::preset_params() const
{
    Params p;
    for (const auto& [k, v] : values_)
        if (k.rfind("param.", 0) == 0) p[k.substr(6)] = parse_number(k, v);
    return p;
}

void Config::validate() const
{
    for (const char* k : {"span.rank_tol", "algebra.angle_tol_deg", "travel.coarse_tol", "travel.band_width",
                          "travel.edge_tol", "recon.resolution", "recon.rcond", "cluster_tol", "geodesics.du",
                          "geodesics.dt", "osgood.decay_threshold", "detect.patch_factor", "span.alpha_in",
                          "span.alpha_out", "synth.cfl"})
        require(num(k) > 0, ErrorCode::config, std::string("config key ") + k + " must be positive");
    require(integer("K") >= 1, ErrorCode::config, "K must be positive");
    require(integer("threads") >= 1, ErrorCode::config, "threads must be positive");
    require(num("sigma") >= 0, ErrorCode::config, "sigma must be nonnegative");
    for (const char* k : {"detect.m_schedule", "recon.widths", "travel.probe_fractions", "stability.K_list",
                          "stability.sigma_list", "stability.seeds", "geodesics.eps"})
        require(!nums(k).empty(), ErrorCode::config, std::string("config list ") + k + " is empty");
    for (double w : nums("recon.widths")) require(w > 0, ErrorCode::config, "recon.widths must be positive");
    for (int m : ints("detect.m_schedule")) require(m >= 1, ErrorCode::config, "detect.m_schedule entries must be ≥ 1");
    const std::string sp = str("span.spatial");
    require(sp == "nodes" || sp == "cosine", ErrorCode::config, "span.spatial must be nodes or cosine");
}

json Config::to_json() const
{
    json j = json::object();
    for (const auto& [k, v] : values_) j[k] = v;
    return j;
}

std::string defaults_text()
{
    std::ostringstream out;
    out << "# bclab configuration defaults; pass with --config and override with --set key=value\n";
    out << "# preset parameters: param.<name> = <number>\n";
    for (const ConfigKey& k : config_schema()) out << k.key << " = " << k.value << "  # " << k.help << '\n';
    return out.str();
}

namespace {

SliceOptions slice_options(const Config& c)
{
    SliceOptions s;
    s.in_family.alpha = c.num("span.alpha_in");
    s.out_family.alpha = c.num("span.alpha_out");
    for (FamilyOptions* f : {&s.in_family, &s.out_family}) {
        f->samples_per_mode = c.integer("span.samples_per_mode");
        f->min_time_samples = c.integer("span.min_time_samples");
        f->spatial = c.str("span.spatial") == "cosine" ? SpatialBasis::cosine : SpatialBasis::nodes;
    }
    s.rank_tol = c.num("span.rank_tol");
    s.algebra.angle_tol_deg = c.num("algebra.angle_tol_deg");
    return s;
}

}  // namespace

ReconstructionOptions reconstruction_options(const Config& c)
{
    const SliceOptions slice = slice_options(c);
    ReconstructionOptions o;
    o.representation.resolution = c.num("recon.resolution");
    o.representation.detection.m_schedule = c.ints("detect.m_schedule");
    o.representation.detection.resolvable_width = c.num("detect.resolvable_width");
    o.representation.detection.patch_factor = c.num("detect.patch_factor");
    o.representation.detection.slice = slice;
    o.representation.travel.coarse_tol = c.num("travel.coarse_tol");
    o.representation.travel.band_width = c.num("travel.band_width");
    o.representation.travel.edge_tol = c.num("travel.edge_tol");
    o.representation.travel.probe_fractions = c.nums("travel.probe_fractions");
    o.representation.travel.slice = slice;
    o.values.widths = c.nums("recon.widths");
    o.values.modes = c.integer("recon.modes");
    o.values.patch_factor = c.num("detect.patch_factor");
    o.values.slice = slice;
    o.jets.neighbors = c.integer("recon.jet_neighbors");
    o.jets.degree = c.integer("recon.jet_degree");
    o.jets_2d.neighbors = c.integer("recon.jet_neighbors_2d");
    o.jets_2d.degree = c.integer("recon.jet_degree_2d");
    o.chart.last_mode = c.integer("recon.chart_last_mode");
    o.metric.last_mode = c.integer("recon.metric_last_mode");
    o.metric.rcond = c.num("recon.rcond");
    o.net_points = c.integer("recon.net_points");
    o.net_margin = c.num("recon.net_margin");
    o.report_points = c.integer("recon.report_points");
    o.label_nodes = c.ints("recon.label_nodes");
    o.threads = c.integer("threads");
    return o;
}

ExperimentConfig experiment_config(const Config& c)
{
    ExperimentConfig e;
    e.preset = c.str("preset");
    e.params = c.preset_params();
    e.K_list = c.ints("stability.K_list");
    e.sigma_list = c.nums("stability.sigma_list");
    e.mix = c.flag("mix");
    e.seeds.clear();
    for (int s : c.ints("stability.seeds")) e.seeds.push_back(static_cast<std::uint64_t>(s));
    e.cluster_tol = c.num("cluster_tol");
    e.pipeline = reconstruction_options(c);
    return e;
}

DistanceOptions distance_options(const Config& c)
{
    DistanceOptions d;
    d.stencil_radius = c.integer("distance.stencil_radius");
    return d;
}

}  // namespace bclab
