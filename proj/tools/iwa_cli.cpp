// iwa: command-line front end for the accident analysis pipeline.
//
// Exit codes: 0 success, 1 usage/other, 2 I/O, 3 parse, 4 no model, 5 schema.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iwa/iwa.hpp"

namespace fs = std::filesystem;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kIo = 2, kParse = 3, kNoModel = 4, kSchema = 5 };

struct RunConfig {
  std::string input;
  std::string aliases;
  std::optional<int> from_year;
  std::optional<int> to_year;
  double alpha = 0.05;
  double vif_threshold = iwa::kDefaultVifThreshold;
  std::string policy = "max-r2";
  std::size_t holdout = 3;
  bool exclude_holdout = false;
  std::string out = "iwa_out";
  std::string format = "both";
  std::vector<std::string> predictors;

  // predict
  std::string model;
  std::vector<std::string> values;
  std::optional<double> actual;

  bool want_csv() const { return format != "json"; }
  bool want_json() const { return format != "csv"; }
  iwa::SelectionPolicy selection_policy() const {
    return policy == "balanced" ? iwa::SelectionPolicy::BalancedCriteria : iwa::SelectionPolicy::MaxR2Full;
  }
};

class IoError : public iwa::Error {
 public:
  explicit IoError(const std::string& what) : iwa::Error(iwa::ErrorKind::Io, what) {}
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string fixed17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Writes one output file and prints its manifest line.
class OutputDir {
 public:
  explicit OutputDir(fs::path root) : root_(std::move(root)) {
    std::error_code ec;
    fs::create_directories(root_, ec);
    if (ec) throw IoError("cannot create output directory '" + root_.string() + "': " + ec.message());
  }

  void write(const std::string& name, const std::function<std::size_t(std::ostream&)>& body) {
    const fs::path path = root_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    const std::size_t rows = body(out);
    out.flush();
    if (!out) throw IoError("write failed for '" + path.string() + "'");
    std::cout << "wrote " << path.string() << " (" << rows << " rows)\n";
  }

  void write_json(const std::string& name, const iwa::json& j, std::size_t rows) {
    write(name, [&](std::ostream& out) {
      out << j.dump(2) << '\n';
      return rows;
    });
  }

 private:
  fs::path root_;
};

std::vector<iwa::AccidentRecord> load_records(const RunConfig& cfg) {
  iwa::CauseAliases aliases;
  if (!cfg.aliases.empty()) {
    std::ifstream in(cfg.aliases, std::ios::binary);
    if (!in) throw IoError("cannot read alias file '" + cfg.aliases + "'");
    aliases = iwa::CauseAliases::parse(in);
  }
  std::ifstream in(cfg.input, std::ios::binary);
  if (!in) throw IoError("cannot read input '" + cfg.input + "'");
  return iwa::parse_records(in, aliases);
}

iwa::YearWindow window_for(const RunConfig& cfg, const std::vector<iwa::AccidentRecord>& records) {
  const auto span = iwa::span_of(records);
  return {cfg.from_year.value_or(span.from), cfg.to_year.value_or(span.to)};
}

std::vector<iwa::AccidentRecord> in_window(const std::vector<iwa::AccidentRecord>& records, iwa::YearWindow w) {
  std::vector<iwa::AccidentRecord> out;
  for (const auto& r : records) {
    if (w.contains(r.year)) out.push_back(r);
  }
  if (out.empty()) throw iwa::Error(iwa::ErrorKind::EmptyInput, "no records inside the year window");
  return out;
}

void validate(const RunConfig& cfg) {
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw iwa::Error(iwa::ErrorKind::Domain, "--alpha must lie in (0, 1)");
  if (!(cfg.vif_threshold > 1.0)) throw iwa::Error(iwa::ErrorKind::Domain, "--vif-threshold must exceed 1");
  if (cfg.from_year && cfg.to_year && *cfg.from_year > *cfg.to_year) {
    throw iwa::Error(iwa::ErrorKind::Domain, "--from-year is after --to-year");
  }
}

struct Study {
  iwa::CauseYearMatrix matrix;
  iwa::RegressionTable table;
  iwa::RegressionTable fit_table;  // table minus holdout rows when --exclude-holdout
};

Study load_study(const RunConfig& cfg) {
  const auto records = load_records(cfg);
  Study s;
  s.matrix = iwa::aggregate(records, window_for(cfg, records));
  s.table = iwa::to_table(s.matrix);
  if (cfg.holdout >= s.table.rows()) {
    throw iwa::Error(iwa::ErrorKind::Domain, "--holdout must be shorter than the year window");
  }
  s.fit_table = cfg.exclude_holdout ? s.table.slice(0, s.table.rows() - cfg.holdout) : s.table;
  return s;
}

std::optional<iwa::HoldoutReport> run_holdout(const RunConfig& cfg, const Study& s, const iwa::FitResult& f) {
  if (cfg.holdout == 0) return std::nullopt;
  return iwa::holdout_error(s.table, f, iwa::trailing_keys(s.table, cfg.holdout));
}

void print_holdout(const iwa::HoldoutReport& h) {
  for (const auto& row : h.rows) {
    std::cout << "  " << row.year << ": actual " << fixed(row.actual, 0) << ", predicted " << fixed(row.predicted, 3)
              << ", error " << (row.percent_error ? fixed(*row.percent_error, 2) + "%" : std::string("undefined"))
              << '\n';
  }
  std::cout << "max error: "
            << (h.max_percent_error ? fixed(*h.max_percent_error, 2) + "%" : std::string("undefined")) << '\n';
  if (h.max_percent_error) std::cout << "max error exact: " << fixed17(*h.max_percent_error) << '\n';
}

void print_fit(const iwa::FitResult& f) {
  std::cout << iwa::equation_string(f) << '\n';
  std::cout << "n=" << f.n << " k=" << f.k << " R2=" << fixed(f.r2, 4) << " R2_adj=" << fixed(f.r2_adj, 4)
            << " s=" << fixed(f.s, 4) << " MSE=" << fixed(f.mse, 4) << " F=" << fixed(f.f_stat, 4)
            << " F_critical(" << f.alpha << ")=" << fixed(f.f_critical, 4);
  if (f.cp) std::cout << " Cp=" << fixed(*f.cp, 4);
  std::cout << '\n';
}

iwa::ModelSpec requested_spec(const RunConfig& cfg, const iwa::RegressionTable& t) {
  if (cfg.predictors.empty()) return iwa::full_model(t);
  iwa::ModelSpec spec;
  for (const auto& p : cfg.predictors) {
    std::string label = p;
    for (const auto& l : t.labels) {
      if (iwa::predictor_symbol(l) == p) label = l;
    }
    t.index_of(label);
    spec.predictors.push_back(label);
  }
  return spec;
}

// Residual series as CSV files (when requested) and as plot-bundle entries.
void emit_residual_series(OutputDir& out, bool csv, const std::string& prefix, const iwa::ResidualAnalysis& ra,
                          iwa::json& plots) {
  if (csv) {
    out.write(prefix + "residuals_vs_fitted.csv", [&](std::ostream& o) { return iwa::write_series_csv(o, ra.vs_fitted); });
  }
  plots.push_back(iwa::series_to_json(prefix + "residuals_vs_fitted", "fitted", "residual", ra.vs_fitted));
  for (const auto& [label, series] : ra.vs_predictor) {
    if (csv) {
      out.write(prefix + "residuals_vs_" + label + ".csv", [&](std::ostream& o) { return iwa::write_series_csv(o, series); });
    }
    plots.push_back(iwa::series_to_json(prefix + "residuals_vs_" + label, label, "residual", series));
  }
}

int cmd_histogram(const RunConfig& cfg, OutputDir& out) {
  const auto all = load_records(cfg);
  const auto records = (cfg.from_year || cfg.to_year) ? in_window(all, window_for(cfg, all)) : all;
  const auto districts = iwa::district_distribution(records);
  const auto hours = iwa::hourly_distribution(records);
  if (cfg.want_csv()) {
    out.write("district_histogram.csv", [&](std::ostream& o) { return iwa::write_district_csv(o, districts); });
    out.write("hourly_histogram.csv", [&](std::ostream& o) { return iwa::write_hourly_csv(o, hours); });
  }
  if (cfg.want_json()) {
    out.write_json("histograms.json", iwa::histograms_to_json(districts, hours), districts.bins.size() + 25);
  }
  std::cout << "records: " << records.size() << ", districts: " << districts.bins.size() << '\n';
  if (!districts.bins.empty()) {
    std::cout << "most accidents: " << districts.bins.front().first << " (" << districts.bins.front().second << ")\n";
  }
  std::cout << "AM: " << hours.am_total() << ", PM: " << hours.pm_total() << ", unknown time: " << hours.unknown
            << ", 10:00-16:00: " << hours.peak_window_total() << '\n';
  return kOk;
}

int cmd_fit(const RunConfig& cfg, OutputDir& out) {
  const Study s = load_study(cfg);
  const auto spec = requested_spec(cfg, s.fit_table);
  const auto f = iwa::fit(s.fit_table, spec, std::nullopt, cfg.alpha);
  if (cfg.want_csv()) {
    out.write("matrix.csv", [&](std::ostream& o) {
      iwa::write_matrix_csv(o, s.matrix);
      return s.matrix.rows();
    });
    out.write("fit_table.csv", [&](std::ostream& o) { return iwa::write_model_table_csv(o, s.table.labels, {f}); });
  }
  if (cfg.want_json()) out.write_json("fit.json", iwa::fit_to_json(f), f.n);
  print_fit(f);
  if (auto h = run_holdout(cfg, s, f)) {
    if (cfg.want_csv()) out.write("fit_holdout.csv", [&](std::ostream& o) { return iwa::write_holdout_csv(o, *h); });
    std::cout << "holdout comparison (last " << cfg.holdout << " years):\n";
    print_holdout(*h);
  }
  return kOk;
}

int cmd_diagnose(const RunConfig& cfg, OutputDir& out) {
  const Study s = load_study(cfg);
  const auto& t = s.fit_table;
  const auto vif = iwa::vif(t, t.labels, cfg.vif_threshold);
  iwa::json plots = iwa::json::array();
  iwa::json relevancy = iwa::json::array();
  std::vector<iwa::RelevancyEntry> entries;
  for (const auto& label : t.labels) {
    try {
      entries.push_back(iwa::multiple_r(t, label));
    } catch (const iwa::Error& e) {
      if (e.kind() != iwa::ErrorKind::Domain) throw;
      std::cout << "relevancy " << label << ": " << e.what() << '\n';
    }
  }

  if (cfg.want_csv()) {
    out.write("vif.csv", [&](std::ostream& o) {
      o << "predictor,vif,flagged\n";
      for (std::size_t j = 0; j < vif.labels.size(); ++j) {
        o << vif.labels[j] << ',' << iwa::format_number(vif.values[j]) << ',' << (vif.is_flagged(vif.labels[j]) ? 1 : 0)
          << '\n';
      }
      return vif.labels.size();
    });
    out.write("relevancy.csv", [&](std::ostream& o) {
      o << "predictor,multiple_r,slope\n";
      for (const auto& e : entries) o << e.label << ',' << iwa::format_number(e.r) << ',' << iwa::format_number(e.slope) << '\n';
      return entries.size();
    });
  }
  for (const auto& e : entries) {
    if (cfg.want_csv()) {
      out.write("scatter_" + e.label + ".csv", [&](std::ostream& o) { return iwa::write_series_csv(o, e.scatter); });
    }
    plots.push_back(iwa::series_to_json("scatter_" + e.label, e.label, "accidents", e.scatter));
    relevancy.push_back({{"predictor", e.label}, {"multiple_r", iwa::json_number(e.r)}, {"slope", iwa::json_number(e.slope)}});
  }

  for (std::size_t j = 0; j < vif.labels.size(); ++j) {
    std::cout << "VIF " << vif.labels[j] << " = " << iwa::format_number(vif.values[j])
              << (vif.is_flagged(vif.labels[j]) ? " (flagged)" : "") << '\n';
  }
  for (const auto& e : entries) std::cout << "Multiple R " << e.label << " = " << fixed(e.r, 6) << '\n';

  iwa::json bundle = {{"vif", {{"threshold", vif.threshold}, {"flagged", vif.flagged}}}, {"relevancy", relevancy}};
  iwa::json vif_values = iwa::json::object();
  for (std::size_t j = 0; j < vif.labels.size(); ++j) vif_values[vif.labels[j]] = iwa::json_number(vif.values[j]);
  bundle["vif"]["values"] = vif_values;

  try {
    const auto full = iwa::fit(t, iwa::full_model(t), std::nullopt, cfg.alpha);
    const auto ra = iwa::residual_analysis(full, t);
    emit_residual_series(out, cfg.want_csv(), "full_", ra, plots);
    bundle["full_model_residual_runs"] = iwa::runs_to_json(ra.runs);
    std::cout << "full-model residual runs test: z=" << fixed(ra.runs.z, 4) << " (" << iwa::to_string(ra.runs.verdict)
              << ")\n";
  } catch (const iwa::CollinearityError& e) {
    std::cout << "full-model residual analysis skipped: " << e.what() << '\n';
  }
  bundle["kind"] = "plot-bundle";
  bundle["plots"] = plots;
  if (cfg.want_json()) out.write_json("diagnostics.json", bundle, plots.size());
  return kOk;
}

int cmd_select(const RunConfig& cfg, OutputDir& out) {
  const Study s = load_study(cfg);
  iwa::PipelineOptions opts;
  opts.policy = cfg.selection_policy();
  opts.alpha = cfg.alpha;
  opts.vif_threshold = cfg.vif_threshold;
  const auto rep = iwa::run_pipeline(s.fit_table, opts);
  const auto& best = rep.best_fit();

  if (cfg.want_csv()) {
    // Best model of each size, largest first.
    std::vector<iwa::FitResult> table3;
    for (std::size_t size = rep.best_by_size.size(); size-- > 0;) {
      if (rep.best_by_size[size] != iwa::SelectionReport::npos) table3.push_back(rep.candidate_fits[rep.best_by_size[size]]);
    }
    out.write("model_table.csv", [&](std::ostream& o) { return iwa::write_model_table_csv(o, rep.predictors, table3); });
    std::vector<iwa::FitResult> all;
    for (std::size_t c : rep.ranking) all.push_back(rep.candidate_fits[c]);
    for (std::size_t c = 0; c < rep.candidates.size(); ++c) {
      if (!rep.gates[c].passed_f && rep.gates[c].fitted) all.push_back(rep.candidate_fits[c]);
    }
    out.write("candidates.csv", [&](std::ostream& o) { return iwa::write_model_table_csv(o, rep.predictors, all); });
  }
  iwa::json plots = iwa::json::array();
  emit_residual_series(out, cfg.want_csv(), "best_", rep.residuals, plots);
  if (cfg.want_json()) {
    out.write_json("selection.json", iwa::selection_to_json(rep), rep.candidates.size());
    out.write_json("best_fit.json", iwa::fit_to_json(best), best.n);
    out.write_json("selection_plots.json", iwa::plot_bundle(plots), plots.size());
  }

  for (const auto& line : rep.pipeline_log) std::cout << "  " << line << '\n';
  std::cout << "best model " << iwa::model_name(best.spec) << " (policy " << iwa::to_string(opts.policy) << "):\n";
  print_fit(best);
  if (auto h = run_holdout(cfg, s, best)) {
    if (cfg.want_csv()) out.write("best_holdout.csv", [&](std::ostream& o) { return iwa::write_holdout_csv(o, *h); });
    std::cout << "holdout comparison (last " << cfg.holdout << " years):\n";
    print_holdout(*h);
  }
  return kOk;
}

iwa::FitResult load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read model '" + path + "'");
  iwa::json j;
  try {
    j = iwa::json::parse(in);
  } catch (const iwa::json::exception& e) {
    throw iwa::Error(iwa::ErrorKind::Schema, std::string("model file is not valid JSON: ") + e.what());
  }
  return iwa::fit_from_json(j);
}

int cmd_predict(const RunConfig& cfg) {
  const auto model = load_model(cfg.model);
  if (!cfg.values.empty()) {
    std::map<std::string, double> values;
    for (const auto& kv : cfg.values) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw iwa::Error(iwa::ErrorKind::Domain, "--value expects label=number, got '" + kv + "'");
      std::string label = kv.substr(0, eq);
      for (const auto& p : model.spec.predictors) {
        if (iwa::predictor_symbol(p) == label) label = p;
      }
      try {
        values[label] = std::stod(kv.substr(eq + 1));
      } catch (const std::exception&) {
        throw iwa::Error(iwa::ErrorKind::Domain, "--value '" + kv + "' has a non-numeric value");
      }
    }
    const auto p = iwa::predict(model, values);
    std::cout << "prediction: " << fixed(p.value, 3) << (p.negative ? " (warning: negative)" : "") << '\n';
    if (cfg.actual) {
      if (*cfg.actual > 0.0) {
        std::cout << "error: " << fixed(100.0 * std::abs(p.value - *cfg.actual) / *cfg.actual, 2) << "%\n";
      } else {
        std::cout << "error: undefined (actual is zero)\n";
      }
    }
  }
  if (!cfg.input.empty()) {
    if (cfg.holdout == 0) throw iwa::Error(iwa::ErrorKind::Domain, "--holdout must be positive when --input is given");
    const Study s = load_study(cfg);
    const auto h = iwa::holdout_error(s.table, model, iwa::trailing_keys(s.table, cfg.holdout));
    std::cout << "holdout comparison (last " << cfg.holdout << " years):\n";
    print_holdout(h);
  }
  if (cfg.values.empty() && cfg.input.empty()) {
    throw iwa::Error(iwa::ErrorKind::EmptyInput, "predict needs --value pairs or --input");
  }
  return kOk;
}

int exit_code_for(const iwa::Error& e) {
  switch (e.kind()) {
    case iwa::ErrorKind::Io: return kIo;
    case iwa::ErrorKind::Parse: return kParse;
    case iwa::ErrorKind::NoModel:
    case iwa::ErrorKind::Degenerate:
    case iwa::ErrorKind::Collinearity: return kNoModel;
    case iwa::ErrorKind::Schema: return kSchema;
    default: return kUsage;
  }
}

void add_data_options(CLI::App* cmd, RunConfig& cfg, bool input_required) {
  auto* in = cmd->add_option("--input", cfg.input, "Accident records CSV (year,district,hour,cause,casualties)");
  if (input_required) in->required();
  cmd->add_option("--aliases", cfg.aliases, "Cause alias CSV (alias,canonical)");
  cmd->add_option("--from-year", cfg.from_year, "First year of the study window");
  cmd->add_option("--to-year", cfg.to_year, "Last year of the study window");
}

void add_model_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--alpha", cfg.alpha, "Significance level of the F test")->capture_default_str();
  cmd->add_option("--vif-threshold", cfg.vif_threshold, "VIF rejection threshold (inclusive)")->capture_default_str();
  cmd->add_option("--policy", cfg.policy, "Selection policy")
      ->check(CLI::IsMember({"max-r2", "balanced"}))
      ->capture_default_str();
  cmd->add_option("--holdout", cfg.holdout, "Number of trailing years compared against predictions")
      ->capture_default_str();
  cmd->add_flag("--exclude-holdout", cfg.exclude_holdout, "Fit without the holdout years");
}

void add_output_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--out", cfg.out, "Output directory")->capture_default_str();
  cmd->add_option("--format", cfg.format, "Output formats")
      ->check(CLI::IsMember({"csv", "json", "both"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inland waterway accident analysis: histograms, regression, best-subset selection"};
  app.require_subcommand(1);
  RunConfig cfg;

  auto* histogram = app.add_subcommand("histogram", "District-wise and hourly accident distributions");
  add_data_options(histogram, cfg, true);
  add_output_options(histogram, cfg);

  auto* fitc = app.add_subcommand("fit", "Least-squares fit of yearly accidents on cause counts");
  add_data_options(fitc, cfg, true);
  add_model_options(fitc, cfg);
  add_output_options(fitc, cfg);
  fitc->add_option("--predictors", cfg.predictors, "Predictor subset (column names or C,SW,EC,G,O)")->delimiter(',');

  auto* diagnose = app.add_subcommand("diagnose", "VIF, Multiple R, scatter and residual series");
  add_data_options(diagnose, cfg, true);
  add_model_options(diagnose, cfg);
  add_output_options(diagnose, cfg);

  auto* select = app.add_subcommand("select", "Exhaustive best-subset selection");
  add_data_options(select, cfg, true);
  add_model_options(select, cfg);
  add_output_options(select, cfg);

  auto* predictc = app.add_subcommand("predict", "Predict accident counts from a saved model");
  predictc->add_option("--model", cfg.model, "Model JSON written by fit or select")->required();
  predictc->add_option("--value", cfg.values, "Predictor value as label=number (repeatable)");
  predictc->add_option("--actual", cfg.actual, "Actual count for the --value prediction");
  add_data_options(predictc, cfg, false);
  predictc->add_option("--holdout", cfg.holdout, "Trailing years of --input to compare")->capture_default_str();

  auto* report = app.add_subcommand("report", "histogram, fit, diagnose and select into one directory");
  add_data_options(report, cfg, true);
  add_model_options(report, cfg);
  add_output_options(report, cfg);

  CLI11_PARSE(app, argc, argv);

  try {
    validate(cfg);
    if (predictc->parsed()) return cmd_predict(cfg);
    OutputDir out(cfg.out);
    if (histogram->parsed()) return cmd_histogram(cfg, out);
    if (fitc->parsed()) return cmd_fit(cfg, out);
    if (diagnose->parsed()) return cmd_diagnose(cfg, out);
    if (select->parsed()) return cmd_select(cfg, out);
    if (report->parsed()) {
      std::cout << "== histogram\n";
      cmd_histogram(cfg, out);
      std::cout << "== fit\n";
      cmd_fit(cfg, out);
      std::cout << "== diagnose\n";
      cmd_diagnose(cfg, out);
      std::cout << "== select\n";
      return cmd_select(cfg, out);
    }
  } catch (const iwa::Error& e) {
    std::cerr << "iwa: " << iwa::to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "iwa: " << e.what() << '\n';
    return kUsage;
  }
  return kOk;
}
