#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bclab/config.hpp"
#include "bclab/geodesics.hpp"
#include "bclab/stability.hpp"
#include "bclab/wave.hpp"

namespace py = pybind11;
using namespace bclab;

namespace {

Config make_config(const std::map<std::string, std::string>& overrides)
{
    Config c;
    for (const auto& [k, v] : overrides) c.set(k, v);
    c.validate();
    return c;
}

py::dict comparison_dict(const ComparisonReport& r)
{
    py::dict d;
    d["value_error"] = r.value_error;
    d["distance_error"] = r.distance_error;
    d["metric_error"] = r.metric_error;
    d["match_margin"] = r.match_margin;
    d["matched_nodes"] = r.matched_nodes;
    d["truth_distances"] = r.truth_distances;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m)
{
    m.doc() = "boundary-control reconstruction lab";

    py::register_exception<Error>(m, "BclabError", PyExc_RuntimeError);

    py::class_<GridManifold>(m, "GridManifold")
        .def_readonly("dim", &GridManifold::dim)
        .def_readonly("shape", &GridManifold::shape)
        .def_readonly("spacing", &GridManifold::spacing)
        .def_readonly("preset", &GridManifold::preset)
        .def_readonly("metric", &GridManifold::metric)
        .def_readonly("boundary_nodes", &GridManifold::boundary_nodes)
        .def_property_readonly("num_nodes", &GridManifold::num_nodes)
        .def_property_readonly("volume", &GridManifold::volume)
        .def("coords", [](const GridManifold& g, int n) { return Eigen::Vector2d(g.coords(n)); });

    py::class_<BoundarySpectralData>(m, "BoundarySpectralData")
        .def_property_readonly("kind", [](const BoundarySpectralData& d) { return to_string(d.kind); })
        .def_readonly("dim", &BoundarySpectralData::dim)
        .def_readonly("eigenvalues", &BoundarySpectralData::eigenvalues)
        .def_readonly("traces", &BoundarySpectralData::traces)
        .def_readonly("dS", &BoundarySpectralData::dS)
        .def_property_readonly("K", &BoundarySpectralData::K);

    m.def("presets", &preset_names);
    m.def("defaults_text", &defaults_text);
    m.def("manifold", [](const std::string& name, const Params& p) { return metric_from_preset(name, p); },
          py::arg("preset"), py::arg("params") = Params{});
    m.def(
        "forward",
        [](const GridManifold& g, int K, const std::string& bc) { return forward_data(g, K, parse_boundary_condition(bc)); },
        py::arg("manifold"), py::arg("K"), py::arg("bc") = "neumann");
    m.def(
        "perturb",
        [](const BoundarySpectralData& d, double sigma, bool mix, std::uint64_t seed, int K_trunc) {
            return perturb_data(d, PerturbOptions{K_trunc, sigma, mix, seed, 1e-6});
        },
        py::arg("data"), py::arg("sigma") = 0.0, py::arg("mix") = false, py::arg("seed") = 1, py::arg("K_trunc") = -1);
    m.def("write_data", &write_spectral_data);
    m.def("read_data", &read_spectral_data);
    m.def("distance_map", [](const GridManifold& g, const IVec& src, int radius) {
        return distance_map(g, src, DistanceOptions{radius});
    }, py::arg("manifold"), py::arg("source"), py::arg("stencil_radius") = 3);

    m.def(
        "compare_synthesis",
        [](const GridManifold& g, int K, double t, double t0, double t1, double dt) {
            const SynthComparison c = compare_synthesis(g, K, pulse_source({0}, t, t0, t1, 3001), t, dt);
            py::dict d;
            d["spectral"] = c.spectral;
            d["direct"] = c.direct;
            d["mismatch"] = c.mismatch;
            d["dt"] = c.dt;
            return d;
        },
        py::arg("manifold"), py::arg("K"), py::arg("t") = 1.5, py::arg("t0") = 0.1, py::arg("t1") = 0.6,
        py::arg("dt") = 0.0);

    m.def(
        "wave_span",
        [](const BoundarySpectralData& d, const IVec& region, double t, double alpha) {
            return wave_span(d, BoundaryRegion{region, "region"}, t, FamilyOptions{alpha}).basis;
        },
        py::arg("data"), py::arg("region"), py::arg("t"), py::arg("alpha") = 0.9);
    m.def(
        "principal_angles",
        [](const Mat& a, const Mat& b) {
            Subspace sa, sb;
            sa.basis = a;
            sb.basis = b;
            return principal_angles(sa, sb);
        },
        "principal angles in degrees between two orthonormal bases");

    m.def(
        "is_boundary_distance",
        [](const BoundarySpectralData& d, const Vec& h) {
            const DetectionResult r = is_boundary_distance(d, h);
            return py::make_tuple(r.accepted, r.score);
        },
        py::arg("data"), py::arg("h"));
    m.def("travel_length", [](const BoundarySpectralData& d) { return recover_travel_length(d).refined; });

    m.def(
        "reconstruct",
        [](const BoundarySpectralData& d, const std::map<std::string, std::string>& config,
           const GridManifold* truth) {
            const Config c = make_config(config);
            ReconstructionResult r;
            {
                py::gil_scoped_release release;
                r = reconstruct(d, reconstruction_options(c));
            }
            py::dict out;
            out["L_hat"] = r.representation.L_hat;
            out["volume"] = r.volume.volume;
            out["spd_rate"] = r.spd_rate;
            out["distances"] = r.distances;
            std::vector<Vec> labels;
            for (const InteriorPoint& p : r.points) labels.push_back(p.label);
            out["labels"] = labels;
            if (truth) {
                const EigenSystem es =
                    solve_eigensystem(assemble_laplacian(*truth, d.kind), *truth, d.K());
                out["validation"] = comparison_dict(compare_reconstruction(r, *truth, es, distance_options(c)));
            }
            return out;
        },
        py::arg("data"), py::arg("config") = std::map<std::string, std::string>{}, py::arg("truth") = nullptr);

    m.def(
        "branching_witness",
        [](const std::string& kind, int k, double u_max, double du) {
            const BranchingWitness w =
                branching_witness(kind == "log" ? HartmanKind::log : HartmanKind::power, k, u_max, du);
            py::dict d;
            d["trivial_residual"] = w.trivial.max_residual;
            d["branch_residual"] = w.branch.max_residual;
            d["branch_first_integral"] = w.branch.max_first_integral;
            d["jet_gap"] = w.jet_gap;
            d["separation_at_end"] = w.separation_at_end;
            return d;
        },
        py::arg("kind") = "power", py::arg("k") = 1, py::arg("u_max") = 1.0, py::arg("du") = 1e-3);

    m.def(
        "spectral_data_distance",
        [](const BoundarySpectralData& a, const BoundarySpectralData& b, double tol) {
            return spectral_data_distance(a, b, tol).total;
        },
        py::arg("a"), py::arg("b"), py::arg("cluster_tol") = 1e-6);
    m.def("spearman", &spearman);
}
