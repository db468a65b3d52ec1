#pragma once

#include "bclab/detection.hpp"

namespace bclab {

struct VolumeEstimate {
    double volume = 0.0;
    double phi1 = 0.0;            // boundary mean of the first trace
    double trace_variance = 0.0;  // relative; zero for clean data
};

VolumeEstimate recover_total_volume(const BoundarySpectralData& d);

struct ValueOptions {
    std::vector<double> widths{1.0 / 16.0, 1.0 / 32.0};  // decreasing
    int modes = 10;
    int net_points = 4;  // 2D slab net
    double patch_factor = 0.5;
    double bias_order = 2.0;  // localization bias ~ width^order
    double floor = 1e-8;      // on (P e_1, e_1)
    SliceOptions slice;
};

struct ValueEstimate {
    Vec values;                  // extrapolated
    std::vector<Vec> per_width;  // one per width
    Vec self_overlap;            // (P e_1, e_1) per width
};

// scale · (P e_1, e_j)/(P e_1, e_1) on slabs around h. Neumann: scale = φ_1 gives φ_j(x);
// Dirichlet: scale = 1 gives ψ_j(x)/ψ_1(x).
ValueEstimate eigenfunction_values_at(const BoundarySpectralData& d, const Vec& h, double scale,
                                      const ValueOptions& opt = {});

struct InteriorPoint {
    int id = 0;
    Vec h;      // defining candidate r_x
    Vec label;  // coordinates read off h (1D: h(0); 2D: h at the label nodes)
    Vec values;
    IVec chart;  // mode indices (0-based) forming the chart
    double chart_sigma = 0.0;
    Mat g_inv;  // n x n
    Vec drift;  // b^i, or the modified drift for Dirichlet data
    double residual = 0.0;
    double design_sigma = 0.0;
    bool valid = false;
    std::string flag;
    double psi1 = 0.0;  // Dirichlet only
};

struct Jet {
    Vec grad;  // n
    Mat hess;  // n x n
    double fit_residual = 0.0;
};

struct JetOptions {
    int neighbors = 7;
    int degree = 4;
    double condition_cap = 1e10;
};

// Moving least-squares jets of every recovered value in label coordinates; [point][mode].
std::vector<std::vector<Jet>> label_jets(const std::vector<InteriorPoint>& points, const JetOptions& opt);

struct ChartOptions {
    int first_mode = 1;  // candidates first_mode .. last_mode (0-based)
    int last_mode = 3;
    double min_sigma = 1e-8;
};

// Picks, per point, the n modes whose √λ-normalized label gradients have the largest
// smallest singular value. Throws if no point has a usable chart.
void build_chart(std::vector<InteriorPoint>& points, const std::vector<std::vector<Jet>>& jets, const Vec& lambda,
                 const ChartOptions& opt = {});

struct MetricSolve {
    Mat g_inv;
    Vec drift;
    double residual = 0.0;
    double design_sigma = 0.0;
    bool spd = false;
};

// Least squares for -g^{ij} ∂_i∂_j φ_k - b^i ∂_i φ_k = λ_k φ_k over the supplied modes, with jets
// already in chart coordinates. Truncated SVD at rcond.
MetricSolve solve_metric_system(const std::vector<Vec>& grad, const std::vector<Mat>& hess, const Vec& values,
                                const Vec& lambda, double rcond = 1e-10);

// Chain rule from label to chart coordinates for the modes in `modes`.
void chart_jets(const std::vector<Jet>& label, const IVec& chart, const IVec& modes, std::vector<Vec>& grad,
                std::vector<Mat>& hess);

struct MetricOptions {
    int first_mode = 1;  // usable modes first_mode .. last_mode (0-based)
    int last_mode = 6;
    double lambda_shift = 0.0;  // Dirichlet: λ_1
    double rcond = 1e-10;
};

void recover_metric_at(InteriorPoint& p, const std::vector<Jet>& jets, const Vec& lambda,
                       const MetricOptions& opt = {});

// Geodesic distances between valid points using each point's metric in its own chart.
// 1D: chain along the label order; 2D: shortest paths on a k-nearest-neighbour graph.
Mat recovered_distance_matrix(const std::vector<InteriorPoint>& points, int graph_neighbors = 8);

struct SpectralEmbedding {
    IVec modes;
    Mat values;  // points x coordinates
    double min_separation = 0.0;
    double min_differential_sigma = 0.0;
};

// Ψ_k = (φ_1..φ_k) on the net, or (ψ_0, φ_1..φ_k) when ground is supplied.
SpectralEmbedding spectral_embedding(const std::vector<InteriorPoint>& points, int k, const Vec* ground = nullptr,
                                     const JetOptions& jet = {});

// Smallest k ≤ k_max whose embedding clears both thresholds; -1 if none.
int smallest_embedding_k(const std::vector<InteriorPoint>& points, int k_max, double separation_tol,
                         double sigma_tol, const Vec* ground = nullptr, const JetOptions& jet = {});

struct ReconstructionOptions {
    ReconstructROptions representation;
    ValueOptions values;
    JetOptions jets;               // 1D
    JetOptions jets_2d{12, 2};
    ChartOptions chart;
    MetricOptions metric;
    int net_points = 40;        // 1D interior net
    double net_margin = 0.3;    // kept away from the endpoints
    int report_points = 20;     // distance-matrix subnet
    IVec label_nodes{0, -1};    // 2D; -1: a quarter of the loop
    int threads = 1;
};

struct ReconstructionResult {
    BoundaryCondition kind = BoundaryCondition::neumann;
    int dim = 1;
    VolumeEstimate volume;
    DistanceRepresentation representation;
    std::vector<InteriorPoint> points;
    IVec report_subnet;  // indices into points
    Mat distances;       // report_subnet x report_subnet
    double spd_rate = 0.0;
};

// Points for the given candidates (rows of h); fills labels.
std::vector<InteriorPoint> make_points(const BoundarySpectralData& d, const Mat& candidates, const IVec& label_nodes);

// Full inverse pipeline: detection, values, charts, metric, distances. Reads only d.
// 2D runs need the candidate lattice.
ReconstructionResult reconstruct(const BoundarySpectralData& d, const ReconstructionOptions& opt = {},
                                 const Mat* lattice = nullptr);

// Dirichlet data: ξ_k = ψ_k/ψ_1, shifted eigenvalues, then ψ_1 from the
// slab volume (1D) and ψ_k = ξ_k ψ_1.
ReconstructionResult dirichlet_recover(const BoundarySpectralData& d, const ReconstructionOptions& opt = {},
                                       const Mat* lattice = nullptr);

struct ComparisonReport {
    IVec matched_nodes;
    double match_margin = 0.0;   // worst ‖r_x - h‖∞ over matches
    double value_error = 0.0;    // max over points and modes after cluster alignment
    double distance_error = 0.0;  // relative Frobenius on the report subnet
    double metric_error = 0.0;   // median relative error of g^{ij} pulled back from truth (1D)
    Mat truth_distances;
};

ComparisonReport compare_reconstruction(const ReconstructionResult& r, const GridManifold& truth,
                                        const EigenSystem& truth_modes, const DistanceOptions& dist = {});

}  // namespace bclab
