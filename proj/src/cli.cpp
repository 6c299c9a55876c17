#include "fdpboot/cli.hpp"

#include "fdpboot/bootstrap.hpp"
#include "fdpboot/bounds.hpp"
#include "fdpboot/csv.hpp"
#include "fdpboot/model.hpp"
#include "fdpboot/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <random>
#include <sstream>

namespace fdpboot {

namespace {

using ordered_json = nlohmann::ordered_json;

struct DataOptions {
  std::string design_path;
  std::string response_path;
  std::string contrasts_path;
  std::string subsets_path;
  bool transpose = false;
};

struct CalibOptions {
  double alpha = 0.1;
  int bootstraps = 1000;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string method = "bootstrap-stepdown";
  std::string template_kind = "linear";
  int K = 0;  // 0 -> K = m
  bool one_sided = false;
  double bh_q = 0.05;
  int threads = 0;  // 0 -> hardware
};

void add_data_options(CLI::App* cmd, DataOptions* data, bool subsets_required) {
  cmd->add_option("--design", data->design_path, "design matrix CSV (n x p)")->required();
  cmd->add_option("--response", data->response_path, "response matrix CSV (n x points)")
      ->required();
  cmd->add_option("--contrasts", data->contrasts_path, "contrast matrix CSV (L x p)")
      ->required();
  auto* sub = cmd->add_option("--subsets", data->subsets_path,
                              "subset file: one `label,id,...` line per set");
  if (subsets_required) sub->required();
  cmd->add_flag("--transpose", data->transpose,
                "response file is points x subjects (genomics orientation)");
}

void add_calib_options(CLI::App* cmd, CalibOptions* calib) {
  cmd->add_option("--alpha", calib->alpha, "confidence level parameter")
      ->check(CLI::Range(1e-12, 1.0 - 1e-12))
      ->capture_default_str();
  cmd->add_option("--bootstraps", calib->bootstraps, "number of bootstrap replicates")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--seed", calib->seed, "RNG seed (default: OS entropy, echoed in output)");
  cmd->add_option("--method", calib->method, "calibration method")
      ->check(CLI::IsMember({"bootstrap", "bootstrap-stepdown", "simes", "ari", "fwer"}))
      ->capture_default_str();
  cmd->add_option("--template", calib->template_kind, "template family")
      ->check(CLI::IsMember({"linear"}))
      ->capture_default_str();
  cmd->add_option("--K", calib->K, "template size (default: m)")->check(CLI::PositiveNumber);
  cmd->add_flag("--one-sided", calib->one_sided, "use one-sided p-values");
  cmd->add_option("--bh-q", calib->bh_q, "Benjamini-Hochberg level for the BH set")
      ->check(CLI::Range(1e-12, 1.0 - 1e-12))
      ->capture_default_str();
  cmd->add_option("--threads", calib->threads, "cap internal parallelism (0 = all cores)");
}

std::uint64_t resolve_seed(CalibOptions* calib) {
  if (!calib->seed_given) {
    std::random_device rd;
    calib->seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  return calib->seed;
}

CalibrationMethod parse_method(const std::string& tag) {
  if (tag == "bootstrap") return CalibrationMethod::SingleStep;
  if (tag == "bootstrap-stepdown") return CalibrationMethod::StepDown;
  if (tag == "simes") return CalibrationMethod::Simes;
  if (tag == "ari") return CalibrationMethod::Ari;
  if (tag == "fwer") return CalibrationMethod::FwerMinP;
  throw std::invalid_argument("unknown method '" + tag + "'");
}

Dataset load_dataset(const DataOptions& data) {
  Dataset ds;
  ds.design = read_matrix_csv(data.design_path).values;
  CsvMatrix response = read_matrix_csv(data.response_path, data.transpose);
  ds.response = std::move(response.values);
  ds.point_labels = std::move(response.header);
  ds.contrasts = read_matrix_csv(data.contrasts_path).values;

  if (ds.response.rows() != ds.design.rows()) {
    throw DimensionError("response rows (" + std::to_string(ds.response.rows()) + ", " +
                         data.response_path + ") do not match design rows (" +
                         std::to_string(ds.design.rows()) + ", " + data.design_path + ")");
  }
  if (ds.contrasts.cols() != ds.design.cols()) {
    throw DimensionError("contrast columns (" + std::to_string(ds.contrasts.cols()) + ", " +
                         data.contrasts_path + ") do not match design columns (" +
                         std::to_string(ds.design.cols()) + ", " + data.design_path + ")");
  }
  validate(ds);
  return ds;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  write_text_atomic(path, content);
}

std::string curves_csv(const std::vector<CurvePoint>& curve) {
  std::ostringstream os;
  os << "k,v_bar,tp_lower,fdp_upper\n";
  for (const CurvePoint& pt : curve) {
    os << pt.k << ',' << pt.v_bar << ',' << pt.tp_lower << ',' << format_double(pt.fdp_upper)
       << '\n';
  }
  return os.str();
}

struct Calibrated {
  CalibrationMethod method;
  double lambda = 0.0;          // raw lambda* (or lambda' for fwer)
  double lambda_bound = 0.0;    // clamped to the template domain for V-bar
  int iterations = 0;
  bool used_bootstrap = false;
  HypothesisSet fwer_set;       // only for fwer
};

Calibrated calibrate(const CalibOptions& calib, const Dataset& ds, const ModelFit& fitted,
                     const StatField& p_field, const TemplateFamily& family,
                     bool bootstraps_given) {
  Calibrated out;
  out.method = parse_method(calib.method);
  const Sidedness sided = calib.one_sided ? Sidedness::OneSided : Sidedness::TwoSided;
  switch (out.method) {
    case CalibrationMethod::Simes:
      out.lambda = simes_lambda(calib.alpha);
      break;
    case CalibrationMethod::Ari:
      out.lambda = ari_lambda(p_field, calib.alpha);
      break;
    case CalibrationMethod::SingleStep:
    case CalibrationMethod::StepDown:
    case CalibrationMethod::FwerMinP: {
      const BootstrapSample sample =
          draw_bootstrap(fitted, ds, calib.bootstraps, calib.seed, sided, calib.threads);
      out.used_bootstrap = true;
      if (out.method == CalibrationMethod::SingleStep) {
        out.lambda = calibrate_single_step(sample, HypothesisSet::full(ds.n_hypotheses()),
                                           family, calib.alpha, calib.threads)
                         .lambda_star;
      } else if (out.method == CalibrationMethod::StepDown) {
        const CalibrationResult res =
            calibrate_step_down(sample, p_field, family, calib.alpha, 100, calib.threads);
        out.lambda = res.lambda_star;
        out.iterations = res.iterations;
      } else {
        out.lambda = fwer_threshold(sample, calib.alpha, calib.threads).lambda_star;
        out.fwer_set = fwer_rejections(p_field, out.lambda);
      }
      break;
    }
  }
  if (!out.used_bootstrap && bootstraps_given) {
    std::cerr << "warning: --bootstraps is ignored by method '" << calib.method << "'\n";
  }
  out.lambda_bound = std::clamp(out.lambda, 0.0, 1.0);
  return out;
}

ordered_json set_entry(const std::string& label, const BoundReport& report) {
  ordered_json j;
  j["label"] = label;
  j["size"] = report.set_size;
  j["v_bar"] = report.false_positive_bound;
  j["tp_lower"] = report.set_size - report.false_positive_bound;
  j["tdp_lower"] = report.tdp_lower;
  j["fdp_upper"] = report.fdp_upper;
  return j;
}

// Under min-p FWER calibration the zero-false-rejection event bounds the
// nulls in H by |H \ R|.
BoundReport fwer_bound(const HypothesisSet& subset, const HypothesisSet& rejections,
                       double lambda) {
  BoundReport report;
  report.lambda_used = lambda;
  report.set_size = subset.size();
  report.method = "fwer";
  if (subset.empty()) return report;
  std::vector<int> inter;
  std::set_intersection(subset.indices.begin(), subset.indices.end(),
                        rejections.indices.begin(), rejections.indices.end(),
                        std::back_inserter(inter));
  report.false_positive_bound = subset.size() - static_cast<int>(inter.size());
  report.tdp_lower =
      static_cast<double>(subset.size() - report.false_positive_bound) / subset.size();
  report.fdp_upper = static_cast<double>(report.false_positive_bound) / subset.size();
  return report;
}

int cmd_report(const DataOptions& data, CalibOptions& calib, const std::string& output,
               const std::string& curves_out, int curve_k_max, bool bootstraps_given,
               bool include_default_sets) {
  const Dataset ds = load_dataset(data);
  const ModelFit fitted = fit(ds);
  if (fitted.rank_deficient(ds.n_covariates())) {
    std::cerr << "warning: design is rank deficient (rank " << fitted.rank
              << "); minimum-norm solution used\n";
  }
  const Sidedness sided = calib.one_sided ? Sidedness::OneSided : Sidedness::TwoSided;
  const StatField t_field = t_statistics(fitted, ds);
  const StatField p_field = p_values(t_field, sided);
  const int m = ds.n_hypotheses();
  const int K = calib.K > 0 ? std::min(calib.K, m) : m;
  const auto family = TemplateFamily::linear(K, m);
  resolve_seed(&calib);
  if (curve_k_max == 0 && !curves_out.empty()) curve_k_max = m;

  const Calibrated cal = calibrate(calib, ds, fitted, p_field, family, bootstraps_given);
  if (curve_k_max > 0 && cal.method == CalibrationMethod::FwerMinP) {
    std::cerr << "error: top-k curves are not defined for method 'fwer'\n";
    return 1;
  }

  ordered_json report;
  report["method"] = method_tag(cal.method);
  report["alpha"] = calib.alpha;
  report["lambda"] = cal.lambda;
  // seed is echoed only when randomness was used or one was given explicitly
  if (cal.used_bootstrap || calib.seed_given) report["seed"] = calib.seed;
  if (cal.used_bootstrap) report["bootstraps"] = calib.bootstraps;
  if (cal.method == CalibrationMethod::StepDown) report["iterations"] = cal.iterations;

  auto bound_for = [&](const HypothesisSet& subset) {
    if (cal.method == CalibrationMethod::FwerMinP) {
      return fwer_bound(subset, cal.fwer_set, cal.lambda);
    }
    return vbar(p_field, subset, family, cal.lambda_bound);
  };

  report["sets"] = ordered_json::array();
  if (include_default_sets) {
    report["sets"].push_back(set_entry("all", bound_for(HypothesisSet::full(m))));
    const HypothesisSet bh = bh_rejection_set(p_field, calib.bh_q);
    report["sets"].push_back(set_entry("bh", bound_for(bh)));
  }
  if (!data.subsets_path.empty()) {
    const auto subsets =
        read_subsets_file(data.subsets_path, ds.point_labels, ds.n_contrasts(), ds.n_points());
    for (const NamedIdSet& s : subsets) {
      const HypothesisSet subset = HypothesisSet::from_ids(s.ids, m, s.label);
      report["sets"].push_back(set_entry(s.label, bound_for(subset)));
    }
  }

  if (curve_k_max > 0) {
    const auto curve = topk_curves(p_field, family, cal.lambda_bound,
                                   std::min(curve_k_max, m));
    ordered_json arr = ordered_json::array();
    for (const CurvePoint& pt : curve) {
      arr.push_back({{"k", pt.k},
                     {"v_bar", pt.v_bar},
                     {"tp_lower", pt.tp_lower},
                     {"fdp_upper", pt.fdp_upper}});
    }
    report["curves"] = std::move(arr);
    if (!curves_out.empty()) emit(curves_out, curves_csv(curve));
  }

  emit(output, report.dump(2) + "\n");
  return 0;
}

int cmd_curves(const DataOptions& data, CalibOptions& calib, const std::string& output,
               int curve_k_max, bool bootstraps_given) {
  const Dataset ds = load_dataset(data);
  const ModelFit fitted = fit(ds);
  const Sidedness sided = calib.one_sided ? Sidedness::OneSided : Sidedness::TwoSided;
  const StatField p_field = p_values(t_statistics(fitted, ds), sided);
  const int m = ds.n_hypotheses();
  const int K = calib.K > 0 ? std::min(calib.K, m) : m;
  const auto family = TemplateFamily::linear(K, m);
  resolve_seed(&calib);

  const Calibrated cal = calibrate(calib, ds, fitted, p_field, family, bootstraps_given);
  if (cal.method == CalibrationMethod::FwerMinP) {
    std::cerr << "error: top-k curves are not defined for method 'fwer'\n";
    return 1;
  }
  const int k_max = curve_k_max > 0 ? std::min(curve_k_max, m) : m;
  emit(output, curves_csv(topk_curves(p_field, family, cal.lambda_bound, k_max)));
  return 0;
}

int cmd_simulate(CalibOptions& calib, const std::string& dim, double fwhm, double pi0,
                 int n_subjects, int reps, const std::vector<std::string>& methods,
                 const std::string& output, const std::string& reps_out) {
  ScenarioConfig config;
  const auto sep = dim.find('x');
  if (sep == std::string::npos) {
    throw ScenarioError("--dim must look like 25x25, got '" + dim + "'");
  }
  try {
    config.grf.rows = std::stoi(dim.substr(0, sep));
    config.grf.cols = std::stoi(dim.substr(sep + 1));
  } catch (const std::exception&) {
    throw ScenarioError("--dim must look like 25x25, got '" + dim + "'");
  }
  if (config.grf.rows < 1 || config.grf.cols < 1) {
    throw ScenarioError("--dim must be positive, got '" + dim + "'");
  }
  config.grf.fwhm = fwhm;
  config.pi0 = pi0;
  config.n_subjects = n_subjects;
  config.alpha = calib.alpha;
  config.reps = reps;
  config.bootstraps = calib.bootstraps;
  config.seed = resolve_seed(&calib);
  config.bh_q = calib.bh_q;
  config.sidedness = calib.one_sided ? Sidedness::OneSided : Sidedness::TwoSided;
  config.template_size = calib.K;
  config.methods.clear();
  for (const std::string& tag : methods.empty()
           ? std::vector<std::string>{calib.method}
           : methods) {
    const CalibrationMethod method = parse_method(tag);
    if (method == CalibrationMethod::FwerMinP) {
      throw ScenarioError("method 'fwer' is not a JER simulation method");
    }
    config.methods.push_back(method);
  }

  const SimReport result = run_simulation(config, calib.threads);

  ordered_json summary;
  summary["dim"] = {config.grf.rows, config.grf.cols};
  summary["fwhm"] = config.grf.fwhm;
  summary["pi0"] = config.pi0;
  summary["n"] = config.n_subjects;
  summary["reps"] = config.reps;
  summary["bootstraps"] = config.bootstraps;
  summary["alpha"] = config.alpha;
  summary["bh_q"] = config.bh_q;
  summary["seed"] = config.seed;
  summary["methods"] = ordered_json::object();
  for (const auto& [method, ms] : result.methods) {
    ordered_json j;
    j["empirical_jer"] = ms.empirical_jer;
    j["jer_se"] = ms.jer_se;
    j["power"] = ordered_json::object();
    j["power_se"] = ordered_json::object();
    j["power_reps"] = ordered_json::object();
    for (const auto& [tag, value] : ms.power) j["power"][tag] = value;
    for (const auto& [tag, value] : ms.power_se) j["power_se"][tag] = value;
    for (const auto& [tag, count] : ms.power_reps) j["power_reps"][tag] = count;
    j["reps_used"] = ms.reps_used;
    summary["methods"][method_tag(method)] = std::move(j);
  }

  if (!reps_out.empty()) {
    std::ostringstream os;
    write_records_csv(os, result);
    emit(reps_out, os.str());
  }
  emit(output, summary.dump(2) + "\n");
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Post hoc false positive bounds over hypothesis subsets in the "
               "linear model, calibrated by residual bootstrap or Simes/ARI"};
  app.require_subcommand(1);

  DataOptions fit_data, bound_data, curve_data;
  CalibOptions fit_calib, bound_calib, curve_calib, sim_calib;
  std::string fit_output, bound_output, curve_output, sim_output, sim_reps_out;
  std::string fit_curves_out;
  int fit_curve_k_max = 0, curve_k_max = 0;

  CLI::App* fit_cmd = app.add_subcommand(
      "fit", "calibrate lambda on CSV data and bound the requested subsets");
  add_data_options(fit_cmd, &fit_data, false);
  add_calib_options(fit_cmd, &fit_calib);
  fit_cmd->add_option("--output", fit_output, "JSON report path (default: stdout)");
  fit_cmd->add_option("--curve-k-max", fit_curve_k_max,
                      "also emit top-k curves up to this k");
  fit_cmd->add_option("--curves-out", fit_curves_out, "top-k curve CSV path");

  CLI::App* bound_cmd =
      app.add_subcommand("bound", "bound the subsets in --subsets (no default sets)");
  add_data_options(bound_cmd, &bound_data, true);
  add_calib_options(bound_cmd, &bound_calib);
  bound_cmd->add_option("--output", bound_output, "JSON report path (default: stdout)");

  CLI::App* curves_cmd =
      app.add_subcommand("curves", "top-k confidence curve CSV over the smallest p-values");
  add_data_options(curves_cmd, &curve_data, false);
  add_calib_options(curves_cmd, &curve_calib);
  curves_cmd->add_option("--output", curve_output, "curve CSV path (default: stdout)");
  curves_cmd->add_option("--curve-k-max", curve_k_max, "largest k (default: m)");

  std::string sim_dim = "25x25";
  double sim_fwhm = 0.0, sim_pi0 = 1.0;
  int sim_n = 50, sim_reps = 500;
  std::vector<std::string> sim_methods;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "run the Monte-Carlo JER/power study");
  sim_calib.bootstraps = 100;  // simulation default
  add_calib_options(sim_cmd, &sim_calib);
  sim_cmd->add_option("--dim", sim_dim, "grid size, e.g. 25x25")->capture_default_str();
  sim_cmd->add_option("--fwhm", sim_fwhm, "smoothing kernel FWHM in pixels")
      ->capture_default_str();
  sim_cmd->add_option("--pi0", sim_pi0, "proportion of true nulls")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  sim_cmd->add_option("--n", sim_n, "number of subjects")->capture_default_str();
  sim_cmd->add_option("--reps", sim_reps, "Monte-Carlo repetitions")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sim_cmd->add_option("--sim-method", sim_methods,
                      "methods to simulate (repeatable; default: --method)")
      ->check(CLI::IsMember({"bootstrap", "bootstrap-stepdown", "simes", "ari"}));
  sim_cmd->add_option("--output", sim_output, "summary JSON path (default: stdout)");
  sim_cmd->add_option("--out-reps", sim_reps_out, "per-repetition CSV path");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (fit_cmd->parsed()) {
      fit_calib.seed_given = fit_cmd->count("--seed") > 0;
      return cmd_report(fit_data, fit_calib, fit_output, fit_curves_out, fit_curve_k_max,
                        fit_cmd->count("--bootstraps") > 0, true);
    }
    if (bound_cmd->parsed()) {
      bound_calib.seed_given = bound_cmd->count("--seed") > 0;
      return cmd_report(bound_data, bound_calib, bound_output, "", 0,
                        bound_cmd->count("--bootstraps") > 0, false);
    }
    if (curves_cmd->parsed()) {
      curve_calib.seed_given = curves_cmd->count("--seed") > 0;
      return cmd_curves(curve_data, curve_calib, curve_output, curve_k_max,
                        curves_cmd->count("--bootstraps") > 0);
    }
    if (sim_cmd->parsed()) {
      sim_calib.seed_given = sim_cmd->count("--seed") > 0;
      return cmd_simulate(sim_calib, sim_dim, sim_fwhm, sim_pi0, sim_n, sim_reps,
                          sim_methods, sim_output, sim_reps_out);
    }
  } catch (const CsvParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DimensionError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const ScenarioError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace fdpboot
