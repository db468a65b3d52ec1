#pragma once

#include <Eigen/Sparse>
#include <cstdint>

#include "bclab/manifold.hpp"

namespace bclab {

enum class BoundaryCondition { neumann, dirichlet };

std::string to_string(BoundaryCondition bc);
BoundaryCondition parse_boundary_condition(const std::string& s);

// Weak-form discretization of -Δ: stiffness K and lumped mass M (= dV weights),
// restricted to the free nodes. The generalized problem K φ = λ M φ is symmetric definite.
struct LaplaceOperator {
    BoundaryCondition bc = BoundaryCondition::neumann;
    Eigen::SparseMatrix<double> stiffness;
    Vec mass;
    IVec free_nodes;  // operator row -> manifold node
};

LaplaceOperator assemble_laplacian(const GridManifold& m, BoundaryCondition bc);

struct EigenSystem {
    BoundaryCondition bc = BoundaryCondition::neumann;
    Vec eigenvalues;  // ascending
    Mat modes;        // nodes x K, zero on eliminated nodes
    Vec mass_weights;
    int K() const { return static_cast<int>(eigenvalues.size()); }
};

EigenSystem solve_eigensystem(const LaplaceOperator& op, const GridManifold& m, int K);

// max |Φᵀ W Φ - I|.
double orthonormality_residual(const EigenSystem& es);

struct BoundarySpectralData {
    BoundaryCondition kind = BoundaryCondition::neumann;
    int dim = 1;
    Vec eigenvalues;
    Mat traces;           // K x boundary nodes; Dirichlet: outward normal derivatives
    Mat boundary_coords;  // boundary nodes x dim
    Vec dS;               // boundary measure per node
    Vec edge_lengths;     // 2D: loop edge b -> b+1; empty in 1D
    Vec kappa;            // optional density factor; empty means 1

    int K() const { return static_cast<int>(eigenvalues.size()); }
    int num_boundary() const { return static_cast<int>(traces.cols()); }
    Vec measure() const { return kappa.size() ? Vec(dS.cwiseProduct(kappa)) : dS; }
    Vec arclength() const;
    double boundary_length() const { return edge_lengths.sum(); }
};

// Outward unit-normal derivatives of the modes at the boundary nodes.
Mat normal_derivative_traces(const EigenSystem& es, const GridManifold& m);

BoundarySpectralData boundary_traces(const EigenSystem& es, const GridManifold& m);

// Convenience: preset manifold -> data, Neumann unless stated.
BoundarySpectralData forward_data(const GridManifold& m, int K, BoundaryCondition bc = BoundaryCondition::neumann);

// Index ranges [first, last] of eigenvalue clusters whose consecutive relative gap is below tol.
std::vector<std::pair<int, int>> eigen_clusters(const Vec& eigenvalues, double rel_tol);

struct PerturbOptions {
    int K_trunc = -1;  // -1 keeps all
    double sigma = 0.0;
    bool mix = false;  // random orthogonal map per cluster; sign flips for simple eigenvalues
    std::uint64_t seed = 1;
    double cluster_tol = 1e-6;
};

BoundarySpectralData perturb_data(const BoundarySpectralData& d, const PerturbOptions& opt);

// Multiplies the boundary measure by kappa; spans must not notice.
BoundarySpectralData with_kappa(const BoundarySpectralData& d, const Vec& kappa);

void write_spectral_data(const BoundarySpectralData& d, const std::string& path);
BoundarySpectralData read_spectral_data(const std::string& path);

}  // namespace bclab
