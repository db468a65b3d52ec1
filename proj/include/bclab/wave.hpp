#pragma once

#include "bclab/spectral.hpp"

namespace bclab {

// f(z, t') on region × uniform samples of [0, T].
struct BoundarySource {
    IVec region;  // indices into the boundary node list
    Vec times;    // uniform, times[0] = 0
    Mat values;   // |region| x |times|

    double horizon() const { return times.size() ? times[times.size() - 1] : 0.0; }
    void validate() const;
    // Linear interpolation in time; zero outside [0, T].
    Vec at(double t) const;
};

BoundarySource separable_source(const IVec& region, const Vec& spatial, const Vec& times, const Vec& temporal);

// Smooth sin² pulse on (t0, t1), uniform in space over the region.
BoundarySource pulse_source(const IVec& region, double T, double t0, double t1, int samples);

// Sine kernel sin(√λ τ)/√λ with the τ limit below the floor.
double sine_kernel(double lambda, double tau, double lambda_floor);
double lambda_floor(const Vec& eigenvalues);

// Fourier coefficients u_k^f(t), k = 1..K, from boundary spectral data alone.
Vec blagovestchenskii(const BoundarySpectralData& d, const BoundarySource& f, double t);

// Trapezoid weights for the samples in [0, t] with the partial last interval folded in.
// Assumes the integrand vanishes at t' = t, as the sine kernel does. Returns (sample index, weight) pairs.
std::vector<std::pair<int, double>> time_weights(const Vec& times, double t);

struct DirectWaveResult {
    Vec u;               // field at T
    Vec times;           // step times
    Mat boundary_trace;  // steps x boundary nodes
    Vec energy;          // discrete energy per step (centred velocity)
    double dt = 0.0;
};

// Largest stable leapfrog step for the assembled Neumann operator (Gershgorin bound).
double leapfrog_dt_limit(const GridManifold& m);

DirectWaveResult direct_wave_solve(const GridManifold& m, const BoundarySource& f, double T, double dt,
                                   double cfl = 0.9);

// c_k = Σ_v W_v φ_k(v) u(v).
Vec project_onto_modes(const EigenSystem& es, const Vec& u);

struct SynthComparison {
    Vec spectral;  // from boundary data
    Vec direct;    // leapfrog field projected onto the first K modes
    double mismatch = 0.0;  // ‖spectral - direct‖ / ‖direct‖
    double dt = 0.0;
};

// dt ≤ 0 picks cfl times the stability limit.
SynthComparison compare_synthesis(const GridManifold& m, int K, const BoundarySource& f, double t, double dt = 0.0,
                                  double cfl = 0.9);

}  // namespace bclab
