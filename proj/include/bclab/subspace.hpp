#pragma once

#include "bclab/wave.hpp"

namespace bclab {

struct Subspace {
    Mat basis;  // K x m, orthonormal columns
    double rank_tol = 0.0;
    std::string provenance;  // wave-span | oracle | algebra | full | zero
    Vec spectrum;            // algebra only: eigenvalues of the stacked constraint operator, ascending
    double angle_tol_deg = 0.0;

    int K() const { return static_cast<int>(basis.rows()); }
    int dim() const { return static_cast<int>(basis.cols()); }
    Mat projector() const { return basis * basis.transpose(); }
};

Subspace zero_subspace(int K);
Subspace full_subspace(int K);

// Principal angles in degrees, ascending; min(dim a, dim b) entries.
Vec principal_angles(const Subspace& a, const Subspace& b);

// Orthonormal basis of the left singular vectors of A with σ ≥ rel_tol·σ_max.
Subspace range_subspace(const Mat& A, double rel_tol, const std::string& provenance);

enum class SpatialBasis { nodes, cosine };

// Tensor family χ_a(z)·θ_b(t'): spatial profiles on the region × normalized cosines
// cos(π b t'/T) on (0, T).
struct SourceFamily {
    IVec region;
    double horizon = 0.0;
    Mat spatial;  // |region| x n_s
    int n_t = 1;
    int time_samples = 400;

    int size() const { return static_cast<int>(spatial.cols()) * n_t; }
    Vec times() const { return Vec::LinSpaced(time_samples, 0.0, horizon); }
    Vec temporal(int b) const;
    // Member a·n_t + b as an explicit source.
    BoundarySource member(int index) const;
};

struct FamilyOptions {
    double alpha = 0.9;  // bandwidth factor: n_t = ceil(alpha·T·√λ_K/π)
    SpatialBasis spatial = SpatialBasis::nodes;
    int n_s = -1;  // -1: derive from alpha and the region length (cosine basis only)
    int n_t = -1;  // -1: derive from alpha
    int min_time_samples = 400;
    int samples_per_mode = 40;
};

SourceFamily default_source_family(const BoundarySpectralData& d, const BoundaryRegion& region, double T,
                                   const FamilyOptions& opt = {});

// K x |family| matrix of synthesized coefficients at time t (t ≤ family horizon).
Mat wave_coefficient_matrix(const BoundarySpectralData& d, const SourceFamily& family, double t);

Subspace wave_span(const BoundarySpectralData& d, const SourceFamily& family, double t, double rank_tol = 1e-6);

// Convenience: family with horizon t built from opt, then wave_span.
Subspace wave_span(const BoundarySpectralData& d, const BoundaryRegion& region, double t,
                   const FamilyOptions& opt = {}, double rank_tol = 1e-6);

// Ground-truth subspace of functions supported on mask; rank_tol relative to σ_max of
// the K x |mask| matrix φ_k(v)·√dV_v.
Subspace oracle_subspace(const EigenSystem& es, const std::vector<char>& mask, double rank_tol = 1e-3);

// Angles in degrees between the functions Σ v_k φ_k, v in s, and L²(mask); ascending.
// No truncation, so unlike oracle_subspace it cannot saturate at the full space.
Vec concentration_angles(const EigenSystem& es, const std::vector<char>& mask, const Subspace& s);

struct SubspaceExpr {
    enum class Op { leaf, intersect, complement_intersect };
    Op op = Op::leaf;
    Subspace leaf;
    std::vector<SubspaceExpr> args;

    static SubspaceExpr of(Subspace s);
    static SubspaceExpr intersect(std::vector<SubspaceExpr> parts);
    // a ⊖ b = a ∩ b^⊥
    static SubspaceExpr minus(SubspaceExpr a, SubspaceExpr b);
};

struct AlgebraOptions {
    double angle_tol_deg = 10.0;
};

// Vectors v with Σ_in |(I-P_A)v|² + Σ_out |P_B v|² ≤ sin²(angle_tol).
Subspace stacked_intersection(int K, const std::vector<Subspace>& ins, const std::vector<Subspace>& outs,
                              const AlgebraOptions& opt = {});

Subspace subspace_algebra(const SubspaceExpr& expr, const AlgebraOptions& opt = {});

struct SliceOptions {
    FamilyOptions in_family{0.9};
    FamilyOptions out_family{1.0};
    double rank_tol = 1e-6;
    AlgebraOptions algebra;
};

Subspace sliced_subspace(const BoundarySpectralData& d, const InfluenceSpec& spec, const SliceOptions& opt = {});

double projector_entry(const Subspace& s, int i, int j);

// Nonempty when the best direction violates the constraints by at most dim_tol
// (algebra results), or when any direction survived rank truncation (spans).
bool is_nonempty(const Subspace& s, double dim_tol = -1.0);

void write_subspace(const Subspace& s, const std::string& path);
Subspace read_subspace(const std::string& path);

}  // namespace bclab
