#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <sstream>

#include "graphvario/experiment.hpp"
#include "graphvario/spectral.hpp"

namespace py = pybind11;
using namespace graphvario;

namespace {

// Undefined bins become NaN on the Python side.
Eigen::VectorXd with_nan(const std::vector<std::optional<double>>& v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = v[i].value_or(std::nan(""));
    return out;
}

SpatialSample sample_from_array(const Eigen::MatrixX2d& xy) {
    std::vector<Point> points(static_cast<std::size_t>(xy.rows()));
    for (Eigen::Index i = 0; i < xy.rows(); ++i) points[static_cast<std::size_t>(i)] = {xy(i, 0), xy(i, 1)};
    return {std::move(points), SamplingScheme::uniform, 0};
}

Eigen::MatrixX2d positions_array(const SpatialSample& s) {
    Eigen::MatrixX2d out(static_cast<Eigen::Index>(s.size()), 2);
    for (std::size_t i = 0; i < s.size(); ++i) out.row(static_cast<Eigen::Index>(i)) << s[i].x, s[i].y;
    return out;
}

ExperimentConfig config_from_kwargs(const py::kwargs& kwargs) {
    io::KeyValues values;
    for (const auto& [key, value] : kwargs) {
        if (py::isinstance<py::bool_>(value))
            values[py::str(key)] = value.cast<bool>() ? "1" : "0";
        else
            values[py::str(key)] = py::str(value);
    }
    return config_from_key_values(values);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Graph variogram estimation on spatial sensor graphs";

    py::register_exception<UnsupportedModelError>(m, "UnsupportedModelError", PyExc_ValueError);
    py::register_exception<FactorizationError>(m, "FactorizationError", PyExc_RuntimeError);

    py::enum_<SamplingScheme>(m, "SamplingScheme")
        .value("uniform", SamplingScheme::uniform)
        .value("nonuniform", SamplingScheme::nonuniform);

    py::class_<SpatialSample>(m, "SpatialSample")
        .def(py::init(&sample_from_array), py::arg("positions"))
        .def("__len__", &SpatialSample::size)
        .def_property_readonly("positions", &positions_array)
        .def_property_readonly("scheme", &SpatialSample::scheme)
        .def_property_readonly("seed", &SpatialSample::seed);

    m.def("sample_positions", &sample_positions, py::arg("n"), py::arg("scheme") = SamplingScheme::uniform,
          py::arg("seed") = 1);

    py::class_<VariogramModel>(m, "VariogramModel")
        .def_static("exponential", &VariogramModel::exponential, py::arg("sill"), py::arg("range"),
                    py::arg("nugget") = 0.0)
        .def_static("pure_nugget", &VariogramModel::pure_nugget, py::arg("sill"))
        .def_static("linear", &VariogramModel::linear, py::arg("slope_sill"), py::arg("range"),
                    py::arg("nugget") = 0.0)
        .def_static("parse", &parse_model)
        .def("semivariogram", py::vectorize(&VariogramModel::semivariogram))
        .def("covariance", py::vectorize(&VariogramModel::covariance))
        .def_readonly("sill", &VariogramModel::sill)
        .def_readonly("range", &VariogramModel::range)
        .def_readonly("nugget", &VariogramModel::nugget)
        .def("__repr__", [](const VariogramModel& v) { return "VariogramModel('" + format_model(v) + "')"; });

    m.def("covariance_from_model", &covariance_from_model, py::arg("sample"), py::arg("model"),
          py::arg("jitter") = kDefaultCovarianceJitter);
    m.def(
        "generate_ensemble",
        [](const SpatialSample& s, const VariogramModel& model, std::size_t r, std::uint64_t seed, double jitter,
           unsigned threads) { return generate_ensemble(s, model, r, seed, jitter, threads).signals; },
        py::arg("sample"), py::arg("model"), py::arg("realizations"), py::arg("seed") = 1,
        py::arg("jitter") = kDefaultCovarianceJitter, py::arg("threads") = 1,
        "N x R matrix, one realization per column.");

    py::class_<ConnectivitySpec>(m, "Connectivity")
        .def_static("full", &ConnectivitySpec::full)
        .def_static("knn", &ConnectivitySpec::knn, py::arg("k"));

    py::class_<SensorGraph>(m, "SensorGraph")
        .def("__len__", &SensorGraph::size)
        .def_property_readonly("sample", &SensorGraph::sample)
        .def_property_readonly("adjacency", &SensorGraph::adjacency)
        .def_property_readonly("max_distance", &SensorGraph::max_distance)
        .def_property_readonly("edge_count", [](const SensorGraph& g) { return g.edges().size(); })
        .def("edge_list", [](const SensorGraph& g) {
            std::ostringstream out;
            write_edge_list(out, g);
            return out.str();
        });

    m.def("build_graph", &build_graph, py::arg("sample"), py::arg("connectivity") = ConnectivitySpec::full(),
          py::arg("sigma") = 0.05);
    m.def(
        "laplacian", [](const SensorGraph& g) { return laplacian(g).laplacian; }, py::arg("graph"));
    m.def(
        "quadratic_form",
        [](const SparseMatrix& m, const Eigen::VectorXd& x) { return laplacian_quadratic_form(m, x); },
        py::arg("laplacian"), py::arg("signal"));

    py::class_<BinPartition>(m, "BinPartition")
        .def(py::init<std::vector<double>>(), py::arg("edges"))
        .def_static("equal_width", &BinPartition::equal_width, py::arg("d_max"), py::arg("count"))
        .def("__len__", &BinPartition::size)
        .def_property_readonly("edges", &BinPartition::edges)
        .def_property_readonly("centers", &BinPartition::centers);
    m.def("make_bins", &make_bins, py::arg("graph"), py::arg("count") = kDefaultBinCount);

    py::class_<VertexWindow>(m, "VertexWindow")
        .def_static("ones", &VertexWindow::ones)
        .def_static("ball", &VertexWindow::ball, py::arg("radius"))
        .def_static("gaussian", &VertexWindow::gaussian, py::arg("rho"))
        .def_static("parse", &parse_window);

    py::class_<VariogramEstimate>(m, "VariogramEstimate")
        .def_readonly("bins", &VariogramEstimate::bins)
        .def_property_readonly("values", [](const VariogramEstimate& e) { return with_nan(e.values); })
        .def_property_readonly("semivariogram", [](const VariogramEstimate& e) -> Eigen::VectorXd { return with_nan(e.values) / 2.0; })
        .def_readonly("pair_counts", &VariogramEstimate::pair_counts);

    m.def("global_graph_variogram", &global_graph_variogram, py::arg("signal"), py::arg("graph"), py::arg("bins"),
          py::arg("window") = VertexWindow::ones());
    m.def(
        "local_graph_variogram",
        [](const Eigen::VectorXd& x, const SensorGraph& g, const BinPartition& bins, const VertexWindow& w,
           std::size_t center) { return local_graph_variogram(x, binned_family(g, bins, w, center)); },
        py::arg("signal"), py::arg("graph"), py::arg("bins"), py::arg("window"), py::arg("center"));
    m.def("global_graph_variograms", &global_graph_variograms, py::arg("signals"), py::arg("graph"), py::arg("bins"),
          py::arg("window") = VertexWindow::ones(), py::arg("threads") = 1);
    m.def("classical_empirical_variogram", &classical_empirical_variogram, py::arg("signal"), py::arg("sample"),
          py::arg("bins"));

    py::class_<EnsembleStatistics>(m, "EnsembleStatistics")
        .def_readonly("bins", &EnsembleStatistics::bins)
        .def_property_readonly("mean", [](const EnsembleStatistics& s) { return with_nan(s.mean); })
        .def_property_readonly("stddev", [](const EnsembleStatistics& s) { return with_nan(s.stddev); })
        .def_readonly("samples", &EnsembleStatistics::samples)
        .def_readonly("pair_counts", &EnsembleStatistics::pair_counts);
    m.def(
        "ensemble_statistics",
        [](const std::vector<VariogramEstimate>& e) { return ensemble_statistics(e); }, py::arg("estimates"));

    py::class_<StationarityScores>(m, "StationarityScores")
        .def_readonly("bins", &StationarityScores::bins)
        .def_readonly("scores", &StationarityScores::scores)
        .def_readonly("local_mean", &StationarityScores::local_mean)
        .def_readonly("global_mean", &StationarityScores::global_mean);
    m.def("stationarity_diagnostic", &stationarity_diagnostic, py::arg("signals"), py::arg("graph"),
          py::arg("bins"), py::arg("window"), py::arg("threads") = 1);

    py::class_<SpectralDecomposition>(m, "SpectralDecomposition")
        .def_readonly("eigenvalues", &SpectralDecomposition::eigenvalues)
        .def_readonly("eigenvectors", &SpectralDecomposition::eigenvectors)
        .def_readonly("normalized_frequencies", &SpectralDecomposition::normalized_frequencies)
        .def("forward", &SpectralDecomposition::forward, py::arg("signal"));
    m.def(
        "decompose", [](const SensorGraph& g) { return decompose(laplacian(g)); }, py::arg("graph"));

    py::class_<PsdStatistics>(m, "PsdStatistics")
        .def_readonly("frequencies", &PsdStatistics::frequencies)
        .def_readonly("mean", &PsdStatistics::mean)
        .def_readonly("stddev", &PsdStatistics::stddev);
    m.def("empirical_psd", &empirical_psd, py::arg("signals"), py::arg("decomposition"));
    m.def("to_decibels", &to_decibels);

    // Experiment drivers take the same keys as the CLI config file.
    m.def(
        "run_variogram_experiment",
        [](const py::kwargs& kw) {
            const auto r = run_variogram_experiment(config_from_kwargs(kw));
            return py::make_tuple(r.statistics, r.truth, r.summary);
        },
        "Returns (statistics, truth, summary).");
    m.def("run_psd_experiment", [](const py::kwargs& kw) {
        const auto r = run_psd_experiment(config_from_kwargs(kw));
        return py::make_tuple(r.psd, r.summary);
    });
    m.def("run_stationarity_diagnostic", [](const py::kwargs& kw) {
        const auto r = run_stationarity_diagnostic(config_from_kwargs(kw));
        return py::make_tuple(r.scores, r.summary);
    });
}
