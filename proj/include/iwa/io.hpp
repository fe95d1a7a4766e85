#pragma once

// JSON and CSV writers for fits, selection reports, histograms and plot
// series. Requires nlohmann/json on the include path.

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "iwa/diagnostics.hpp"
#include "iwa/error.hpp"
#include "iwa/ols.hpp"
#include "iwa/selection.hpp"
#include "iwa/spatiotemporal.hpp"

namespace iwa {

using nlohmann::json;

inline constexpr const char* kFitSchema = "iwa-fit/1";

// JSON has no infinities: non-finite values are written as "inf", "-inf", "nan".
inline json json_number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

inline double number_from_json(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorKind::Schema, "field '" + what + "' must be a number");
}

inline json number_array(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(json_number(x));
  return a;
}

inline std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

inline json fit_to_json(const FitResult& f) {
  json j;
  j["schema"] = kFitSchema;
  j["predictors"] = f.spec.predictors;
  json coef = json::object();
  coef["intercept"] = json_number(f.coefficients.at(0));
  for (std::size_t i = 0; i < f.spec.size(); ++i) coef[f.spec.predictors[i]] = json_number(f.coefficients.at(i + 1));
  j["coefficients"] = coef;
  j["equation"] = equation_string(f);
  j["n"] = f.n;
  j["k"] = f.k;
  j["sse"] = json_number(f.sse);
  j["ssr"] = json_number(f.ssr);
  j["sst"] = json_number(f.sst);
  j["r2"] = json_number(f.r2);
  j["r2_adj"] = json_number(f.r2_adj);
  j["s"] = json_number(f.s);
  j["mse"] = json_number(f.mse);
  j["f_stat"] = json_number(f.f_stat);
  j["alpha"] = f.alpha;
  j["f_critical"] = json_number(f.f_critical);
  j["cp"] = f.cp ? json_number(*f.cp) : json(nullptr);
  j["years"] = f.keys;
  j["fitted"] = number_array(f.fitted);
  j["residuals"] = number_array(f.residuals);
  return j;
}

/// Reads a model file. Only `predictors` and `coefficients` are required;
/// statistics and series are restored when present.
inline FitResult fit_from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::Schema, "model file must hold a JSON object");
  if (j.contains("schema") && j["schema"] != kFitSchema) {
    throw Error(ErrorKind::Schema, "unsupported model schema " + j["schema"].dump());
  }
  if (!j.contains("predictors") || !j["predictors"].is_array() || j["predictors"].empty()) {
    throw Error(ErrorKind::Schema, "model needs a non-empty 'predictors' array");
  }
  if (!j.contains("coefficients") || !j["coefficients"].is_object()) {
    throw Error(ErrorKind::Schema, "model needs a 'coefficients' object");
  }
  FitResult f;
  for (const auto& p : j["predictors"]) {
    if (!p.is_string()) throw Error(ErrorKind::Schema, "predictor names must be strings");
    f.spec.predictors.push_back(p.get<std::string>());
  }
  try {
    f.spec.validate();
  } catch (const Error& e) {
    throw Error(ErrorKind::Schema, e.what());
  }
  const auto& coef = j["coefficients"];
  if (!coef.contains("intercept")) throw Error(ErrorKind::Schema, "coefficients lack 'intercept'");
  f.coefficients.push_back(number_from_json(coef["intercept"], "intercept"));
  for (const auto& p : f.spec.predictors) {
    if (!coef.contains(p)) throw Error(ErrorKind::Schema, "coefficients lack '" + p + "'");
    f.coefficients.push_back(number_from_json(coef[p], p));
  }
  f.k = f.spec.size();

  auto opt_number = [&](const char* key, double& out) {
    if (j.contains(key) && !j[key].is_null()) out = number_from_json(j[key], key);
  };
  if (j.contains("n")) {
    if (!j["n"].is_number_unsigned()) throw Error(ErrorKind::Schema, "'n' must be a non-negative integer");
    f.n = j["n"].get<std::size_t>();
  }
  opt_number("sse", f.sse);
  opt_number("ssr", f.ssr);
  opt_number("sst", f.sst);
  opt_number("r2", f.r2);
  opt_number("r2_adj", f.r2_adj);
  opt_number("s", f.s);
  opt_number("mse", f.mse);
  opt_number("f_stat", f.f_stat);
  opt_number("alpha", f.alpha);
  opt_number("f_critical", f.f_critical);
  if (j.contains("cp") && !j["cp"].is_null()) f.cp = number_from_json(j["cp"], "cp");
  try {
    if (j.contains("years")) f.keys = j["years"].get<std::vector<int>>();
    for (const char* key : {"fitted", "residuals"}) {
      if (!j.contains(key)) continue;
      auto& dst = std::string(key) == "fitted" ? f.fitted : f.residuals;
      for (const auto& v : j[key]) dst.push_back(number_from_json(v, key));
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Schema, e.what());
  }
  return f;
}

inline json runs_to_json(const RunsSummary& r) {
  return json{{"positives", r.positives}, {"negatives", r.negatives},       {"zeros", r.zeros},
              {"runs", r.runs},           {"expected_runs", json_number(r.expected_runs)},
              {"z", json_number(r.z)},    {"verdict", to_string(r.verdict)}};
}

inline json series_to_json(const std::string& name, const std::string& x_label, const std::string& y_label,
                           const Series& s) {
  json pts = json::array();
  for (const auto& p : s) pts.push_back(json::array({json_number(p.x), json_number(p.y)}));
  return json{{"name", name}, {"x_label", x_label}, {"y_label", y_label}, {"points", pts}};
}

inline json plot_bundle(json plots) { return json{{"kind", "plot-bundle"}, {"plots", std::move(plots)}}; }

inline json selection_to_json(const SelectionReport& rep) {
  json j;
  j["policy"] = to_string(rep.options.policy);
  j["alpha"] = rep.options.alpha;
  j["predictors"] = rep.predictors;
  json vif = json::object();
  for (std::size_t i = 0; i < rep.vif.labels.size(); ++i) vif[rep.vif.labels[i]] = json_number(rep.vif.values[i]);
  j["vif"] = {{"threshold", rep.vif.threshold}, {"values", vif}, {"flagged", rep.vif.flagged}};
  j["retained"] = rep.retained;
  json rel = json::array();
  for (const auto& e : rep.relevancy.entries) {
    rel.push_back({{"predictor", e.label}, {"multiple_r", json_number(e.r)}, {"slope", json_number(e.slope)}});
  }
  j["relevancy"] = rel;
  j["full_model_mse"] = json_number(rep.full_model_mse);

  json cands = json::array();
  for (std::size_t c = 0; c < rep.candidates.size(); ++c) {
    json e = {{"index", c},
              {"model", model_name(rep.candidates[c])},
              {"predictors", rep.candidates[c].predictors},
              {"fitted", rep.gates[c].fitted},
              {"passed_f", rep.gates[c].passed_f},
              {"reason", rep.gates[c].reason}};
    if (rep.gates[c].fitted) {
      json fj = fit_to_json(rep.candidate_fits[c]);
      fj.erase("years");
      fj.erase("fitted");
      fj.erase("residuals");
      e["fit"] = fj;
    }
    cands.push_back(e);
  }
  j["candidates"] = cands;
  j["ranking"] = rep.ranking;
  json by_size = json::array();
  for (std::size_t size = 1; size <= rep.best_by_size.size(); ++size) {
    const auto idx = rep.best_by_size[size - 1];
    by_size.push_back({{"size", size}, {"index", idx == SelectionReport::npos ? json(nullptr) : json(idx)}});
  }
  j["best_by_size"] = by_size;
  j["best_index"] = rep.best;
  j["best_fit"] = fit_to_json(rep.best_fit());
  j["residual_runs"] = runs_to_json(rep.residuals.runs);
  j["pipeline_log"] = rep.pipeline_log;
  return j;
}

/// Writes fits side by side, one column per model, rows a / slopes / s /
/// R2 / R2_adj / MSE / Cp / f / f_critical. Absent predictors print NA.
/// Returns the number of data rows written.
inline std::size_t write_model_table_csv(std::ostream& out, const std::vector<std::string>& predictors,
                                         const std::vector<FitResult>& fits) {
  out << "statistic";
  for (const auto& f : fits) out << ",\"" << model_name(f.spec) << '"';
  out << '\n';
  std::size_t rows = 0;
  auto row = [&](const std::string& name, auto value) {
    out << name;
    for (const auto& f : fits) out << ',' << value(f);
    out << '\n';
    ++rows;
  };
  row("a", [](const FitResult& f) { return format_number(f.intercept()); });
  for (const auto& p : predictors) {
    row(predictor_symbol(p), [&](const FitResult& f) {
      for (std::size_t i = 0; i < f.spec.size(); ++i) {
        if (f.spec.predictors[i] == p) return format_number(f.coefficients[i + 1]);
      }
      return std::string("NA");
    });
  }
  row("s", [](const FitResult& f) { return format_number(f.s); });
  row("R2", [](const FitResult& f) { return format_number(f.r2); });
  row("R2_adj", [](const FitResult& f) { return format_number(f.r2_adj); });
  row("MSE", [](const FitResult& f) { return format_number(f.mse); });
  row("Cp", [](const FitResult& f) { return f.cp ? format_number(*f.cp) : std::string("NA"); });
  row("f", [](const FitResult& f) { return format_number(f.f_stat); });
  row("f_critical", [](const FitResult& f) { return format_number(f.f_critical); });
  return rows;
}

inline std::size_t write_series_csv(std::ostream& out, const Series& s) {
  out << "x,y\n";
  for (const auto& p : s) out << format_number(p.x) << ',' << format_number(p.y) << '\n';
  return s.size();
}

inline std::size_t write_district_csv(std::ostream& out, const DistrictHistogram& h) {
  out << "district,count\n";
  for (const auto& [name, c] : h.bins) {
    const bool quote = name.find_first_of(",\"") != std::string::npos;
    if (quote) {
      out << '"';
      for (char ch : name) out << (ch == '"' ? std::string("\"\"") : std::string(1, ch));
      out << '"';
    } else {
      out << name;
    }
    out << ',' << c << '\n';
  }
  return h.bins.size();
}

inline std::size_t write_hourly_csv(std::ostream& out, const HourlyHistogram& h) {
  out << "hour,count\n";
  for (std::size_t i = 0; i < h.bins.size(); ++i) out << i << ',' << h.bins[i] << '\n';
  out << "unknown," << h.unknown << '\n';
  return h.bins.size() + 1;
}

inline json histograms_to_json(const DistrictHistogram& d, const HourlyHistogram& h) {
  json districts = json::array();
  for (const auto& [name, c] : d.bins) districts.push_back({{"district", name}, {"count", c}});
  json hours = json::array();
  for (std::size_t i = 0; i < h.bins.size(); ++i) hours.push_back({{"hour", i}, {"count", h.bins[i]}});
  return {{"kind", "plot-bundle"},
          {"district", {{"total", d.total}, {"bins", districts}}},
          {"hourly",
           {{"bins", hours},
            {"unknown", h.unknown},
            {"am_total", h.am_total()},
            {"pm_total", h.pm_total()},
            {"peak_window", {{"from_hour", 10}, {"to_hour", 16}, {"total", h.peak_window_total()}}}}}};
}

inline std::size_t write_holdout_csv(std::ostream& out, const HoldoutReport& r) {
  out << "year,actual,predicted,percent_error\n";
  for (const auto& row : r.rows) {
    out << row.year << ',' << format_number(row.actual) << ',' << format_number(row.predicted) << ','
        << (row.percent_error ? format_number(*row.percent_error) : std::string("undefined")) << '\n';
  }
  return r.rows.size();
}

}  // namespace iwa
