#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rso2stat/config.hpp"
#include "rso2stat/estimators.hpp"
#include "rso2stat/imputation.hpp"
#include "rso2stat/lpb.hpp"
#include "rso2stat/permtest.hpp"
#include "rso2stat/report.hpp"
#include "rso2stat/rng.hpp"
#include "rso2stat/series.hpp"
#include "rso2stat/simulator.hpp"
#include "rso2stat/spline.hpp"
#include "rso2stat/tomlmini.hpp"

namespace py = pybind11;
using namespace rso2stat;

namespace {

SmootherConfig smoother_from_kwargs(int max_interior_knots, int degree, double lambda_log10_min,
                                    double lambda_log10_max, int grid_points) {
    SmootherConfig cfg;
    cfg.max_interior_knots = max_interior_knots;
    cfg.degree = degree;
    cfg.lambda_log10_min = lambda_log10_min;
    cfg.lambda_log10_max = lambda_log10_max;
    cfg.grid_points = grid_points;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Detection-limit-aware rSO2 time-series analysis: penalized-spline "
              "smoothing, multiple imputation, MAUC/slope estimation, permutation "
              "tests, and the linear-process-bootstrap simulator.";
    m.attr("__version__") = RSO2STAT_VERSION;

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    py::class_<Rso2Series>(m, "Rso2Series")
        .def_readonly("times", &Rso2Series::times)
        .def_readonly("values", &Rso2Series::values)
        .def_readonly("censored", &Rso2Series::censored)
        .def_readonly("detection_limit", &Rso2Series::detection_limit)
        .def("__len__", &Rso2Series::size)
        .def("span", [](const Rso2Series& s) {
            return py::make_tuple(s.span_start(), s.span_end());
        });

    py::class_<TransfusionWindow>(m, "TransfusionWindow")
        .def_readonly("start_s", &TransfusionWindow::start_s)
        .def_readonly("end_s", &TransfusionWindow::end_s);

    py::class_<Session>(m, "Session")
        .def_readonly("subject_id", &Session::subject_id)
        .def_readonly("pre", &Session::pre)
        .def_readonly("post", &Session::post)
        .def_readonly("window", &Session::window);

    py::class_<SessionMeta>(m, "SessionMeta")
        .def(py::init([](std::string subject_id, double start, double end, double limit) {
                 SessionMeta meta;
                 meta.subject_id = std::move(subject_id);
                 meta.transfusion_start_s = start;
                 meta.transfusion_end_s = end;
                 meta.detection_limit = limit;
                 return meta;
             }),
             py::arg("subject_id"), py::arg("transfusion_start_s"), py::arg("transfusion_end_s"),
             py::arg("detection_limit") = 15.0)
        .def_readonly("subject_id", &SessionMeta::subject_id)
        .def_readonly("detection_limit", &SessionMeta::detection_limit);

    m.def("make_series", &make_series, py::arg("times"), py::arg("values"),
          py::arg("detection_limit") = 15.0);
    m.def("parse_session", &parse_session, py::arg("csv_text"), py::arg("meta"));
    m.def("parse_session_meta", &parse_session_meta, py::arg("json_text"));
    m.def("censoring_fraction", &censoring_fraction);
    m.def("series_to_csv", &series_to_csv);

    py::class_<SmootherConfig>(m, "SmootherConfig")
        .def(py::init(&smoother_from_kwargs), py::arg("max_interior_knots") = 40,
             py::arg("degree") = 3, py::arg("lambda_log10_min") = -6.0,
             py::arg("lambda_log10_max") = 8.0, py::arg("grid_points") = 25)
        .def_readwrite("max_interior_knots", &SmootherConfig::max_interior_knots)
        .def_readwrite("degree", &SmootherConfig::degree)
        .def_readwrite("grid_points", &SmootherConfig::grid_points);

    py::class_<SplineFit>(m, "SplineFit")
        .def_readonly("lambda_", &SplineFit::lambda)
        .def_readonly("edf", &SplineFit::edf)
        .def_property_readonly("interior_knots", &SplineFit::interior_knots)
        .def_property_readonly("domain",
                               [](const SplineFit& f) {
                                   return py::make_tuple(f.t_min(), f.t_max());
                               })
        .def("evaluate", &SplineFit::evaluate, py::arg("t"))
        .def("evaluate",
             [](const SplineFit& f, const std::vector<double>& ts) {
                 std::vector<double> out(ts.size());
                 for (std::size_t i = 0; i < ts.size(); ++i) out[i] = f.evaluate(ts[i]);
                 return out;
             })
        .def("integrate", &SplineFit::integrate, py::arg("a"), py::arg("b"));

    m.def(
        "fit_spline",
        [](const std::vector<double>& t, const std::vector<double>& y, const SmootherConfig& cfg) {
            return fit_spline(t, y, cfg);
        },
        py::arg("times"), py::arg("values"), py::arg("config") = SmootherConfig{});
    m.def(
        "gcv_score",
        [](double lam, const std::vector<double>& t, const std::vector<double>& y,
           const SmootherConfig& cfg) { return gcv_score(lam, t, y, cfg); },
        py::arg("lambda_"), py::arg("times"), py::arg("values"),
        py::arg("config") = SmootherConfig{});

    py::class_<RngStream>(m, "RngStream")
        .def(py::init<std::uint64_t>(), py::arg("master_seed"))
        .def("child", &RngStream::child, py::arg("label"), py::arg("index") = 0)
        .def("uniform01", &RngStream::uniform01)
        .def("normal", &RngStream::normal)
        .def_property_readonly("key", &RngStream::key);

    m.def(
        "impute",
        [](const Rso2Series& s, int m_index, const RngStream& rng) {
            return impute(s, m_index, rng).values;
        },
        py::arg("series"), py::arg("m"), py::arg("rng"));

    py::class_<MaucEstimate>(m, "MaucEstimate")
        .def_readonly("value", &MaucEstimate::value)
        .def_readonly("per_imputation", &MaucEstimate::per_imputation)
        .def_readonly("se", &MaucEstimate::se)
        .def_readonly("M", &MaucEstimate::M);

    py::class_<SlopeEstimate>(m, "SlopeEstimate")
        .def_readonly("value", &SlopeEstimate::value)
        .def_readonly("per_imputation", &SlopeEstimate::per_imputation)
        .def_readonly("se", &SlopeEstimate::se)
        .def_readonly("M", &SlopeEstimate::M);

    py::class_<BaselineEstimate>(m, "BaselineEstimate")
        .def_readonly("value", &BaselineEstimate::value)
        .def_readonly("se", &BaselineEstimate::se);

    m.def("mauc", &mauc, py::arg("series"), py::arg("a"), py::arg("b"), py::arg("M"),
          py::arg("rng"), py::arg("smoother") = SmootherConfig{});
    m.def("mauc_with_se", &mauc_with_se, py::arg("series"), py::arg("a"), py::arg("b"),
          py::arg("M"), py::arg("B_boot"), py::arg("block_len"), py::arg("rng"),
          py::arg("smoother") = SmootherConfig{});
    m.def("slope", &slope, py::arg("series"), py::arg("M"), py::arg("rng"),
          py::arg("smoother") = SmootherConfig{});
    m.def("slope_with_se", &slope_with_se, py::arg("series"), py::arg("M"), py::arg("B_boot"),
          py::arg("block_len"), py::arg("rng"), py::arg("smoother") = SmootherConfig{});
    m.def("sample_mean_baseline", &sample_mean_baseline, py::arg("series"), py::arg("B_boot"),
          py::arg("block_len"), py::arg("rng"));
    m.def("naive_slope_baseline", &naive_slope_baseline, py::arg("series"), py::arg("B_boot"),
          py::arg("block_len"), py::arg("rng"));

    py::class_<PermTestResult>(m, "PermTestResult")
        .def_readonly("statistic_name", &PermTestResult::statistic_name)
        .def_readonly("delta_obs", &PermTestResult::delta_obs)
        .def_readonly("delta_perm", &PermTestResult::delta_perm)
        .def_readonly("p_value", &PermTestResult::p_value)
        .def_readonly("G", &PermTestResult::G)
        .def_readonly("M", &PermTestResult::M)
        .def_readonly("degenerate", &PermTestResult::degenerate);

    py::class_<BaselineTestResult>(m, "BaselineTestResult")
        .def_readonly("delta", &BaselineTestResult::delta)
        .def_readonly("p_value", &BaselineTestResult::p_value);

    m.def(
        "mauc_perm_test",
        [](const Session& s, int G, int M, const RngStream& rng, const SmootherConfig& sm,
           int workers) {
            PermTestOptions opts;
            opts.workers = workers;
            return mauc_perm_test(s, G, M, rng, sm, opts);
        },
        py::arg("session"), py::arg("G"), py::arg("M"), py::arg("rng"),
        py::arg("smoother") = SmootherConfig{}, py::arg("workers") = 1);
    m.def(
        "slope_perm_test",
        [](const Session& s, int G, int M, const RngStream& rng, const SmootherConfig& sm,
           int workers) {
            PermTestOptions opts;
            opts.workers = workers;
            return slope_perm_test(s, G, M, rng, sm, opts);
        },
        py::arg("session"), py::arg("G"), py::arg("M"), py::arg("rng"),
        py::arg("smoother") = SmootherConfig{}, py::arg("workers") = 1);
    m.def("t_test_baseline", &t_test_baseline, py::arg("session"));
    m.def("naive_slope_test", &naive_slope_test, py::arg("session"), py::arg("B_boot"),
          py::arg("block_len"), py::arg("rng"));

    py::class_<LpbModel>(m, "LpbModel")
        .def_readonly("gamma", &LpbModel::gamma)
        .def_readonly("band", &LpbModel::band)
        .def_readonly("floor_value", &LpbModel::floor_value)
        .def_readonly("innovations", &LpbModel::innovations);

    m.def(
        "fit_lpb",
        [](const std::vector<double>& residuals, int band, double eps) {
            return fit_lpb(residuals, band, eps);
        },
        py::arg("residuals"), py::arg("band"), py::arg("eigen_floor_eps") = 1e-6);
    m.def(
        "lpb_resample",
        [](const LpbModel& model, std::size_t n_out, RngStream rng) {
            return lpb_resample(model, n_out, rng);
        },
        py::arg("model"), py::arg("n_out"), py::arg("rng"));

    py::class_<PeriodSpec>(m, "PeriodSpec")
        .def(py::init([](double mean, double slope, double sd, int n_points, double cadence_s,
                         std::vector<double> shape, double amplitude, double censor_target) {
                 PeriodSpec p;
                 p.mean = mean;
                 p.slope = slope;
                 p.noise_sd = sd;
                 p.n_points = n_points;
                 p.cadence_s = cadence_s;
                 p.shape = std::move(shape);
                 p.amplitude = amplitude;
                 p.censor_target = censor_target;
                 return p;
             }),
             py::arg("mean"), py::arg("slope") = 0.0, py::arg("sd") = 3.0,
             py::arg("n_points") = 360, py::arg("cadence_s") = 30.0,
             py::arg("shape") = std::vector<double>{}, py::arg("amplitude") = 1.0,
             py::arg("censor_target") = 0.0);

    py::class_<ResidualSpec>(m, "ResidualSpec")
        .def(py::init([](double phi, int band, int source_length) {
                 ResidualSpec r;
                 r.phi = phi;
                 r.band = band;
                 r.source_length = source_length;
                 return r;
             }),
             py::arg("phi") = 0.6, py::arg("band") = 20, py::arg("source_length") = 2000);

    py::class_<LatentTruth>(m, "LatentTruth")
        .def_readonly("latent_pre", &LatentTruth::latent_pre)
        .def_readonly("latent_post", &LatentTruth::latent_post)
        .def_readonly("template_pre", &LatentTruth::template_pre)
        .def_readonly("template_post", &LatentTruth::template_post);

    m.def(
        "generate_session",
        [](const PeriodSpec& pre, const PeriodSpec& post, const ResidualSpec& residual,
           double detection_limit, double gap_s, std::uint64_t replicate_id,
           const RngStream& rng, const std::string& name) {
            ScenarioCase c;
            c.name = name;
            c.pre = pre;
            c.post = post;
            return generate_session(c, residual, detection_limit, gap_s, replicate_id, rng);
        },
        py::arg("pre"), py::arg("post"), py::arg("residual") = ResidualSpec{},
        py::arg("detection_limit") = 15.0, py::arg("gap_s") = 1800.0, py::arg("replicate_id") = 1,
        py::arg("rng") = RngStream(20180701), py::arg("name") = std::string("sim"));

    m.def(
        "run_scenario_file",
        [](const std::string& path, int workers, py::object seed) {
            ScenarioDoc doc = parse_scenario(load_config_file(path));
            if (!seed.is_none()) doc.seed = seed.cast<std::uint64_t>();
            const SimulationOutput out = run_simulation(doc, workers);
            py::dict files;
            for (const auto& [name, content] : out.files) files[py::str(name)] = content;
            return py::make_tuple(files, out.summary.dump());
        },
        py::arg("path"), py::arg("workers") = 1, py::arg("seed") = py::none(),
        "Run a scenario file; returns (files dict, summary JSON string).");

    m.def(
        "analyze",
        [](const Session& session, std::uint64_t seed, int M, int M_test, int G, int B_boot,
           int block_len, int workers) {
            AnalysisConfig cfg;
            cfg.M = M;
            cfg.M_test = M_test;
            cfg.G = G;
            cfg.B_boot = B_boot;
            cfg.block_len = block_len;
            cfg.workers = workers;
            validate_config(cfg);
            const SessionAnalysis res =
                analyze_session(session, cfg, RngStream(seed).child(session.subject_id, 0));
            return analysis_to_json({res}, cfg, seed).dump();
        },
        py::arg("session"), py::arg("seed") = 20180701, py::arg("M") = 20, py::arg("M_test") = 10,
        py::arg("G") = 1000, py::arg("B_boot") = 500, py::arg("block_len") = 0,
        py::arg("workers") = 1,
        "Full per-session analysis; returns the report JSON for this session.");
}
