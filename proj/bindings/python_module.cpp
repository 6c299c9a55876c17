#include "fdpboot/bootstrap.hpp"
#include "fdpboot/bounds.hpp"
#include "fdpboot/grf.hpp"
#include "fdpboot/model.hpp"
#include "fdpboot/scenario.hpp"
#include "fdpboot/simulate.hpp"
#include "fdpboot/student.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace fdpboot;

namespace {

Dataset make_dataset(const Matrix& design, const Matrix& response, const Matrix& contrasts,
                     const std::vector<std::string>& point_labels) {
  Dataset ds;
  ds.design = design;
  ds.response = response;
  ds.contrasts = contrasts;
  ds.point_labels = point_labels;
  validate(ds);
  return ds;
}

py::dict summary_to_dict(const SimReport& report) {
  py::dict methods;
  for (const auto& [method, ms] : report.methods) {
    py::dict entry;
    entry["empirical_jer"] = ms.empirical_jer;
    entry["jer_se"] = ms.jer_se;
    entry["power"] = ms.power;
    entry["power_se"] = ms.power_se;
    entry["power_reps"] = ms.power_reps;
    entry["reps_used"] = ms.reps_used;
    methods[py::str(method_tag(method))] = entry;
  }
  return methods;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Post hoc false positive bounds in the linear model, calibrated "
            "by residual bootstrap or Simes/ARI";

  py::enum_<Sidedness>(m, "Sidedness")
      .value("two_sided", Sidedness::TwoSided)
      .value("one_sided", Sidedness::OneSided);

  py::enum_<StatKind>(m, "StatKind")
      .value("t_statistic", StatKind::TStatistic)
      .value("p_value_two_sided", StatKind::PValueTwoSided)
      .value("p_value_one_sided", StatKind::PValueOneSided);

  py::enum_<CalibrationMethod>(m, "Method")
      .value("bootstrap", CalibrationMethod::SingleStep)
      .value("bootstrap_stepdown", CalibrationMethod::StepDown)
      .value("simes", CalibrationMethod::Simes)
      .value("ari", CalibrationMethod::Ari)
      .value("fwer", CalibrationMethod::FwerMinP);

  py::class_<Dataset>(m, "Dataset")
      .def(py::init(&make_dataset), py::arg("design"), py::arg("response"),
           py::arg("contrasts"), py::arg("point_labels") = std::vector<std::string>{})
      .def_readonly("design", &Dataset::design)
      .def_readonly("response", &Dataset::response)
      .def_readonly("contrasts", &Dataset::contrasts)
      .def_readonly("point_labels", &Dataset::point_labels)
      .def_property_readonly("n_hypotheses", &Dataset::n_hypotheses);

  py::class_<ModelFit>(m, "ModelFit")
      .def_readonly("beta_hat", &ModelFit::beta_hat)
      .def_readonly("residuals", &ModelFit::residuals)
      .def_readonly("sigma_hat", &ModelFit::sigma_hat)
      .def_readonly("rank", &ModelFit::rank)
      .def_readonly("gram_inverse", &ModelFit::gram_inverse);

  py::class_<StatField>(m, "StatField")
      .def(py::init([](const Matrix& values, int dof, StatKind kind) {
             StatField f;
             f.values = values;
             f.dof = dof;
             f.kind = kind;
             return f;
           }),
           py::arg("values"), py::arg("dof"), py::arg("kind"))
      .def_readonly("values", &StatField::values)
      .def_readonly("dof", &StatField::dof)
      .def_readonly("kind", &StatField::kind);

  py::class_<TemplateFamily>(m, "TemplateFamily")
      .def_static("linear", &TemplateFamily::linear, py::arg("size"),
                  py::arg("total_hypotheses"))
      .def("threshold", &TemplateFamily::threshold, py::arg("k"), py::arg("lam"))
      .def("inverse_threshold", &TemplateFamily::inverse_threshold, py::arg("k"),
           py::arg("p"))
      .def_property_readonly("size", &TemplateFamily::size)
      .def_property_readonly("total_hypotheses", &TemplateFamily::total_hypotheses);

  py::class_<HypothesisSet>(m, "HypothesisSet")
      .def(py::init([](const std::vector<int>& ids, int m, const std::string& label) {
             return HypothesisSet::from_ids(ids, m, label);
           }),
           py::arg("ids"), py::arg("m"), py::arg("label") = "")
      .def_static("full", &HypothesisSet::full, py::arg("m"), py::arg("label") = "all")
      .def_readonly("indices", &HypothesisSet::indices)
      .def_readonly("label", &HypothesisSet::label)
      .def("__len__", &HypothesisSet::size);

  py::class_<BoundReport>(m, "BoundReport")
      .def_readonly("set_size", &BoundReport::set_size)
      .def_readonly("v_bar", &BoundReport::false_positive_bound)
      .def_readonly("tdp_lower", &BoundReport::tdp_lower)
      .def_readonly("fdp_upper", &BoundReport::fdp_upper)
      .def_readonly("lambda_used", &BoundReport::lambda_used)
      .def("__repr__", [](const BoundReport& r) {
        return "BoundReport(size=" + std::to_string(r.set_size) +
               ", v_bar=" + std::to_string(r.false_positive_bound) + ")";
      });

  py::class_<BootstrapSample>(m, "BootstrapSample")
      .def_readonly("stat_fields", &BootstrapSample::stat_fields)
      .def_readonly("seed", &BootstrapSample::seed)
      .def_readonly("B", &BootstrapSample::B)
      .def_readonly("dof", &BootstrapSample::dof);

  py::class_<CalibrationResult>(m, "CalibrationResult")
      .def_readonly("lambda_star", &CalibrationResult::lambda_star)
      .def_readonly("alpha", &CalibrationResult::alpha)
      .def_readonly("B", &CalibrationResult::B)
      .def_readonly("method", &CalibrationResult::method)
      .def_readonly("surviving_set", &CalibrationResult::surviving_set)
      .def_readonly("f_samples", &CalibrationResult::f_samples)
      .def_readonly("iterations", &CalibrationResult::iterations);

  m.def("student_cdf", &student_cdf, py::arg("t"), py::arg("dof"));
  m.def("fit", &fit, py::arg("dataset"));
  m.def("t_statistics",
        [](const ModelFit& f, const Dataset& ds) { return t_statistics(f, ds); },
        py::arg("fit"), py::arg("dataset"));
  m.def("f_statistics", &f_statistics, py::arg("fit"), py::arg("dataset"));
  m.def("p_values", &p_values, py::arg("stats"), py::arg("sidedness") = Sidedness::TwoSided);

  m.def("vbar",
        [](const StatField& p, const HypothesisSet& subset, const TemplateFamily& fam,
           double lam) { return vbar(p, subset, fam, lam); },
        py::arg("p_values"), py::arg("subset"), py::arg("family"), py::arg("lam"));
  m.def("simes_lambda", &simes_lambda, py::arg("alpha"));
  m.def("hommel_factor",
        py::overload_cast<const StatField&, double>(&hommel_factor), py::arg("p_values"),
        py::arg("alpha"));
  m.def("ari_lambda", py::overload_cast<const StatField&, double>(&ari_lambda),
        py::arg("p_values"), py::arg("alpha"));
  m.def("bh_rejection_set", &bh_rejection_set, py::arg("p_values"), py::arg("q"));
  m.def("topk_curves",
        [](const StatField& p, const TemplateFamily& fam, double lam, int k_max) {
          py::list out;
          for (const CurvePoint& pt : topk_curves(p, fam, lam, k_max)) {
            py::dict d;
            d["k"] = pt.k;
            d["v_bar"] = pt.v_bar;
            d["tp_lower"] = pt.tp_lower;
            d["fdp_upper"] = pt.fdp_upper;
            out.append(d);
          }
          return out;
        },
        py::arg("p_values"), py::arg("family"), py::arg("lam"), py::arg("k_max"));

  m.def("draw_bootstrap", &draw_bootstrap, py::arg("fit"), py::arg("dataset"), py::arg("B"),
        py::arg("seed"), py::arg("sidedness") = Sidedness::TwoSided, py::arg("threads") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def("f_statistic", &f_statistic, py::arg("field"), py::arg("subset"), py::arg("family"),
        py::arg("sidedness") = Sidedness::TwoSided);
  m.def("calibrate_single_step", &calibrate_single_step, py::arg("sample"), py::arg("subset"),
        py::arg("family"), py::arg("alpha"), py::arg("threads") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def("calibrate_step_down", &calibrate_step_down, py::arg("sample"),
        py::arg("observed_p_values"), py::arg("family"), py::arg("alpha"),
        py::arg("max_iterations") = 100, py::arg("threads") = 1,
        py::call_guard<py::gil_scoped_release>());
  m.def("fwer_threshold", &fwer_threshold, py::arg("sample"), py::arg("alpha"),
        py::arg("threads") = 1);
  m.def("fwer_rejections", &fwer_rejections, py::arg("p_values"), py::arg("lam"));

  m.def("generate_grf",
        [](int rows, int cols, double fwhm, int n_fields, std::uint64_t seed, int threads) {
          return generate_grf(GrfConfig{rows, cols, fwhm, n_fields, seed}, threads);
        },
        py::arg("rows"), py::arg("cols"), py::arg("fwhm"), py::arg("n_fields"),
        py::arg("seed"), py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>());

  m.def("run_simulation",
        [](int rows, int cols, double fwhm, int n_subjects, double pi0, double alpha,
           int reps, int bootstraps, const std::vector<CalibrationMethod>& methods,
           std::uint64_t seed, int threads) {
          ScenarioConfig config;
          config.grf = {rows, cols, fwhm, 1, 0};
          config.n_subjects = n_subjects;
          config.pi0 = pi0;
          config.alpha = alpha;
          config.reps = reps;
          config.bootstraps = bootstraps;
          config.methods = methods;
          config.seed = seed;
          SimReport report;
          {
            py::gil_scoped_release release;
            report = run_simulation(config, threads);
          }
          return summary_to_dict(report);
        },
        py::arg("rows"), py::arg("cols"), py::arg("fwhm"), py::arg("n_subjects"),
        py::arg("pi0"), py::arg("alpha"), py::arg("reps"), py::arg("bootstraps"),
        py::arg("methods"), py::arg("seed"), py::arg("threads") = 1);
}
