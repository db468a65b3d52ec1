#pragma once

#include <functional>

#include "bclab/manifold.hpp"

namespace bclab {

struct PhasePoint {
    Point x = Point::Zero();
    Point xi = Point::Zero();  // covector; 1D uses component 0
};

struct GeodesicPath {
    Vec times;
    Mat positions;  // steps x 2
    Mat momenta;    // steps x 2
    Vec hamiltonian_values;
    bool exited = false;  // stopped early at the chart boundary
    double drift = 0.0;   // max |G(t) - G(0)|
};

// G = ½ g^{jk}(x) ξ_j ξ_k.
double hamiltonian(const GridManifold& m, const PhasePoint& p);

// ∂G/∂x by central differences of the evaluated metric (one-sided at the chart faces).
Point hamiltonian_gradient(const GridManifold& m, const PhasePoint& p, double delta = 1e-5);

// Classical RK4 on ẋ = ∂G/∂ξ, ξ̇ = -∂G/∂x. The last step is shortened to land on T.
GeodesicPath integrate_geodesic(const GridManifold& m, const PhasePoint& start, double T, double dt);

void write_path_csv(const GeodesicPath& path, const std::string& file);

struct ResidualReport {
    Vec u;               // interior grid points where both forms are evaluated
    Vec residual;        // 2 v'' - (1 + v'²) H'(v), H = log h
    Vec first_integral;  // h(v) - (1 + v'²)
    double max_residual = 0.0;
    double max_first_integral = 0.0;
    double value_at_zero = 0.0;  // v and v' at the grid point nearest u = 0
    double slope_at_zero = 0.0;
};

using ConformalFactor = std::function<double(double)>;

// Fourth-order central differences on a uniform u-grid (at least 5 points).
ResidualReport geodesic_residual(const ConformalFactor& h, const ConformalFactor& dh, const Vec& u, const Vec& v);
ResidualReport geodesic_residual(HartmanKind kind, int k, const Vec& u, const Vec& v);

struct BranchingWitness {
    ResidualReport trivial;  // v ≡ 0
    ResidualReport branch;   // v = u^{2k+1}, or e^{-1/|u|^k} sgn u for the log family
    double jet_gap = 0.0;    // |Δv(0)| + |Δv'(0)|
    double separation_at_end = 0.0;  // |Δv| at u = u_max
};

BranchingWitness branching_witness(HartmanKind kind, int k, double u_max = 1.0, double du = 1e-3);

struct OsgoodOptions {
    double decay_threshold = 1.25;  // increments decaying like index^{-p}, p above this, look summable
    int min_scales = 4;
};

struct OsgoodReport {
    bool unique_flow = false;
    Vec t_min;
    Vec partial_integrals;  // ∫_{t_min}^{1/2} dt/ω
    double decay_exponent = 0.0;
    double log_slope = 0.0;  // d(partial integral)/d log(1/t_min) over the finest half
};

// t: dyadic samples 1/2, 1/4, ... (descending); omega: ω at those samples.
OsgoodReport osgood_classify(const Vec& t, const Vec& omega, const OsgoodOptions& opt = {});

// Point reached at time t from p with initial velocity v (ξ = g v). Boundary starts need
// v strictly inward.
Point exp_map(const GridManifold& m, const Point& p, const Point& v, double t, double dt = 1e-3);

struct ExpRate {
    std::vector<double> eps;
    std::vector<double> max_error;
    double slope = 0.0;  // log-log fit of max_error against eps
};

// max over the (p, v) grid of |Exp under (1 + ε q) g - Exp under g| for each ε.
ExpRate exp_map_convergence(const GridManifold& m, const std::vector<double>& eps, const std::vector<Point>& ps,
                            const std::vector<Point>& vs, double t, double dt = 1e-3);

struct MinimalityReport {
    bool boundary = false;
    Vec t;              // sample times
    Vec deviation;      // max over directions at each t
    double max_deviation = 0.0;
};

// Interior node: max |dist(p, Exp_p(t v)) - t| over unit v. Boundary node: max
// |dist(Exp_p(t ν), ∂M) - t| along the inward unit normal. Distances from the grid graph.
MinimalityReport minimality_check(const GridManifold& m, int node, double rho, int directions = 16,
                                  int samples = 8, const DistanceOptions& opt = {3});

}  // namespace bclab
