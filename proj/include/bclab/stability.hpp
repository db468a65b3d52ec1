#pragma once

#include <cstdint>

#include "bclab/reconstruction.hpp"

namespace bclab {

struct SpectralDistance {
    double total = 0.0;  // eigenvalue + trace; the cluster penalty is reported separately
    double eigenvalue = 0.0;  // sup_k |λ1 - λ2| / max(|λ1|, |λ2|, first positive λ)
    double trace = 0.0;       // relative dS-weighted mismatch after per-cluster Procrustes
    double cluster_penalty = 0.0;  // +inf when the multiplicity structures differ
    bool structure_match = true;
};

// Compares the first min(K1, K2) modes; symmetrized by the max over both alignment directions.
SpectralDistance spectral_data_distance(const BoundarySpectralData& d1, const BoundarySpectralData& d2,
                                        double cluster_tol = 1e-6);

// Spearman rank correlation with average ranks for ties; NaN if either input is constant.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

struct ExperimentConfig {
    std::string preset = "flat-interval";
    Params params;
    std::vector<int> K_list{100};
    std::vector<double> sigma_list{0.0, 1e-4, 1e-3, 1e-2};
    bool mix = false;
    std::vector<std::uint64_t> seeds{1, 2, 3};
    double cluster_tol = 1e-6;  // widened by 3σ per cell
    ReconstructionOptions pipeline;
};

struct StabilityRow {
    int K = 0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    double spectral_distance = 0.0;
    double representation_distance = 0.0;
    double metric_error = 0.0;  // relative Frobenius error of the recovered distance matrix
    double runtime = 0.0;       // seconds
    std::string status = "ok";
};

struct TrendStat {
    int K = 0;
    double spearman_representation = 0.0;
    double spearman_metric = 0.0;
    double baseline_representation = 0.0;  // σ = 0 cells, or the clean pipeline if σ = 0 is absent
    double baseline_metric = 0.0;
};

struct StabilityReport {
    std::vector<StabilityRow> rows;
    std::vector<TrendStat> trends;  // seed-averaged per σ, one per K
    double clean_metric_error = 0.0;  // clean pipeline at the largest K
    std::string note;
};

// Every cell perturbs the clean data, runs the inverse pipeline and compares against the clean
// representation and the ground truth. Cell failures are recorded and the sweep continues.
StabilityReport run_stability_sweep(const ExperimentConfig& cfg);

void write_stability_csv(const StabilityReport& r, const std::string& path);
void write_stability_json(const StabilityReport& r, const std::string& path);

}  // namespace bclab
