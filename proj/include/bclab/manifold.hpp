#pragma once

#include <array>
#include <map>
#include <string>

#include "bclab/common.hpp"

namespace bclab {

using Params = std::map<std::string, double>;
using Point = Eigen::Vector2d;  // 1D manifolds use component 0 only

enum class HartmanKind { power, log };

// Conformal factors of the two branching families and their v-derivatives.
double hartman_h(HartmanKind kind, int k, double v);
double hartman_dh(HartmanKind kind, int k, double v);

struct GridManifold {
    int dim = 1;
    std::array<int, 2> shape{1, 1};
    std::array<double, 2> spacing{1.0, 1.0};
    std::array<double, 2> origin{0.0, 0.0};
    std::string preset;  // empty for manifolds loaded with a sampled metric only
    Params params;
    Mat metric;  // per node: g11 (1D) or g11, g12, g22 (2D)
    IVec boundary_nodes;
    Vec boundary_weights;       // dS per boundary node
    Vec boundary_edge_lengths;  // 2D: loop edge i -> i+1 in the induced metric
    Vec interior_weights;       // dV per node
    double conformal_eps = 0.0;  // metric multiplied by (1 + eps q) when nonzero

    int num_nodes() const { return shape[0] * shape[1]; }
    int node(int i, int j = 0) const { return j * shape[0] + i; }
    Point coords(int n) const;
    std::array<double, 2> extent() const
    {
        return {spacing[0] * (shape[0] - 1), spacing[1] * (shape[1] - 1)};
    }
    bool inside(const Point& x, double slack = 1e-12) const;
    Eigen::Matrix2d metric_node(int n) const;
    // Closed-form preset when known, bilinear interpolation of the node field otherwise.
    Eigen::Matrix2d metric_at(const Point& x) const;
    Eigen::Matrix2d metric_bilinear(const Point& x) const;
    double perturbation_q(const Point& x) const;
    double volume() const { return interior_weights.sum(); }
    // Boundary-loop arclength positions (2D); endpoint coordinates (1D).
    Vec boundary_arclength() const;
    double boundary_length() const;
};

const std::vector<std::string>& preset_names();
Params preset_defaults(const std::string& name);

// Builds a manifold; unspecified params fall back to preset_defaults.
GridManifold metric_from_preset(const std::string& name, const Params& params = {});

// Recomputes dV, dS and boundary edge lengths from the metric field.
void finalize_geometry(GridManifold& m);

GridManifold with_conformal_perturbation(const GridManifold& m, double eps);

struct DistanceOptions {
    int stencil_radius = 1;  // 1: 8-connected; 2, 3: extra coprime offsets
};

// Weighted grid graph; edge length is Simpson's rule for the metric length of the segment.
class DistanceGraph {
public:
    explicit DistanceGraph(const GridManifold& m, const DistanceOptions& opt = {});
    Vec distances(const IVec& source) const;
    int num_nodes() const { return static_cast<int>(start_.size()) - 1; }

private:
    std::vector<int> start_;
    std::vector<int> target_;
    std::vector<double> length_;
};

Vec distance_map(const GridManifold& m, const IVec& source, const DistanceOptions& opt = {});

struct BoundaryRegion {
    IVec nodes;  // indices into boundary_nodes
    std::string label;
};

struct InfluenceSpec {
    std::vector<BoundaryRegion> regions;
    std::vector<double> t_plus;
    std::vector<double> t_minus;
    void validate() const;
};

std::vector<char> domain_of_influence(const GridManifold& m, const InfluenceSpec& spec,
                                      const DistanceOptions& opt = {});

// r_x(z) for every boundary node z.
Vec boundary_distance_function(const GridManifold& m, int x, const DistanceOptions& opt = {});

// All r_x at once: row x, column z. Uses one distance map per boundary node.
Mat boundary_distance_table(const GridManifold& m, const DistanceOptions& opt = {});

// Boundary nodes whose loop arclength lies within radius of boundary index center.
BoundaryRegion boundary_ball(const GridManifold& m, int center, double radius);

void write_manifold(const GridManifold& m, const std::string& path);
GridManifold read_manifold(const std::string& path);

}  // namespace bclab
