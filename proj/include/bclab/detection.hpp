#pragma once

#include "bclab/subspace.hpp"

namespace bclab {

struct BoundaryDistanceCandidate {
    Vec h;  // one value per boundary node
    std::string source = "search";  // truth | perturbed | search
};

// Necessary conditions: h ≥ 0 and |h(z) - h(z')| ≤ edge length + slack on adjacent nodes.
bool lipschitz_prefilter(const BoundarySpectralData& d, const Vec& h, double slack = 1e-9);

struct DetectionOptions {
    std::vector<int> m_schedule{2, 4, 8, 16};
    double resolvable_width = 0.0;  // widths 1/m below this are skipped
    double patch_factor = 0.5;      // 2D: Γ_j radius = patch_factor · net spacing
    SliceOptions slice;
    double dim_tol = -1.0;  // -1: sin²(angle_tol)
};

struct DetectionStep {
    int m = 0;
    double width = 0.0;
    bool nonempty = false;
    double min_violation = 0.0;
    int slice_dim = 0;
};

struct DetectionResult {
    bool prefilter_passed = false;
    bool accepted = false;
    double score = 0.0;  // smallest width at which the slice survived; +inf if none
    std::vector<DetectionStep> steps;
};

// Slab of half-width `width` around the level sets of h. 1D: both endpoints; 2D: a uniform net
// of `net_points` boundary points with patches of radius patch_factor · net spacing.
InfluenceSpec slab_spec(const BoundarySpectralData& d, const Vec& h, double width, int net_points,
                        double patch_factor);

// slab_spec at width 1/m over an m-point net.
InfluenceSpec detection_spec(const BoundarySpectralData& d, const Vec& h, int m, const DetectionOptions& opt);

DetectionResult is_boundary_distance(const BoundarySpectralData& d, const Vec& h, const DetectionOptions& opt = {});

// Smallest width 1/m over the ascending m levels at which every candidate's slice is still
// nonempty; +inf when even the coarsest level fails.
double measure_resolvable_width(const BoundarySpectralData& d, const std::vector<Vec>& candidates,
                                const std::vector<int>& m_levels, const DetectionOptions& opt = {});

struct TravelLengthOptions {
    double t_max = -1.0;  // -1: bracket by doubling
    double coarse_tol = 1e-3;
    double band_width = 1.0 / 16.0;
    double edge_tol = 1e-3;
    double band_half_range = 0.4;
    std::vector<double> probe_fractions{0.3, 0.5, 0.7};
    SliceOptions slice;
};

struct TravelLength {
    double coarse = 0.0;  // smallest t with 𝐋({0}, t) full
    double refined = 0.0;  // centre of the accepted slab band
};

// 1D only: length of the interval in travel time.
TravelLength recover_travel_length(const BoundarySpectralData& d, const TravelLengthOptions& opt = {});

struct DistanceRepresentation {
    Mat candidates;  // rows: candidates, cols: boundary nodes
    std::vector<char> accepted;
    std::vector<double> scores;
    double L_hat = 0.0;  // 1D only
    Mat accepted_rows() const;
    Mat pairwise() const;  // L∞ distances between accepted rows
};

struct ReconstructROptions {
    double resolution = 0.05;  // a-grid step (1D)
    DetectionOptions detection;
    TravelLengthOptions travel;
};

// 1D: blind search over h = (a, L̂ - a); 2D: filters the supplied lattice.
DistanceRepresentation reconstruct_R(const BoundarySpectralData& d, const ReconstructROptions& opt = {},
                                     const Mat* lattice = nullptr);

double representation_distance(const DistanceRepresentation& r1, const DistanceRepresentation& r2);

// min_y ‖h - r_y‖∞ over the rows of a truth table (validation mode).
double candidate_margin(const Mat& truth_table, const Vec& h);

struct InjectivityWitness {
    double min_separation = 0.0;
    int x = -1, y = -1;
};

// Over node pairs at distance > resolution, the smallest ‖r_x - r_y‖∞.
InjectivityWitness injectivity_witness(const GridManifold& m, const Mat& truth_table, double resolution,
                                       int stride = 1, const DistanceOptions& opt = {});

void write_candidates_csv(const std::string& path, const Mat& candidates);

}  // namespace bclab
