#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "iwa/error.hpp"
#include "iwa/ols.hpp"

namespace iwa {

inline constexpr double kDefaultVifThreshold = 5.0;

struct Point {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Point&) const = default;
};

using Series = std::vector<Point>;

inline double vif_from_r2(double auxiliary_r2) {
  if (auxiliary_r2 >= 1.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (1.0 - auxiliary_r2);
}

// The rejection rule is inclusive: a VIF of exactly the threshold is flagged.
inline bool vif_flagged(double vif, double threshold = kDefaultVifThreshold) { return vif >= threshold; }

struct VifReport {
  std::vector<std::string> labels;
  std::vector<double> values;  // +inf marks perfect collinearity
  double threshold = kDefaultVifThreshold;
  std::vector<std::string> flagged;

  double at(const std::string& label) const {
    for (std::size_t j = 0; j < labels.size(); ++j) {
      if (labels[j] == label) return values[j];
    }
    throw Error(ErrorKind::Arity, "no VIF for '" + label + "'");
  }
  bool is_flagged(const std::string& label) const {
    return std::find(flagged.begin(), flagged.end(), label) != flagged.end();
  }
};

namespace detail {

inline bool is_constant(const Vector& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
}

}  // namespace detail

/// Variance inflation factors: each predictor regressed on the rest of the
/// subset (with intercept), VIF = 1 / (1 - R2_aux).
///
/// A constant predictor lies in the intercept's span and gets +inf. It is
/// left out of the other predictors' auxiliary regressions, which does not
/// change their R2.
inline VifReport vif(const RegressionTable& table, const std::vector<std::string>& labels,
                     double threshold = kDefaultVifThreshold) {
  if (labels.empty()) throw Error(ErrorKind::EmptyInput, "vif needs at least one predictor");
  if (!(threshold > 1.0)) throw Error(ErrorKind::Domain, "VIF threshold must exceed 1");
  if (table.rows() <= labels.size() + 1) {
    throw Error(ErrorKind::InsufficientData, "vif needs more rows than predictors + 1");
  }
  VifReport report;
  report.labels = labels;
  report.threshold = threshold;

  std::vector<bool> constant(labels.size());
  for (std::size_t j = 0; j < labels.size(); ++j) constant[j] = detail::is_constant(table.columns[table.index_of(labels[j])]);

  for (std::size_t j = 0; j < labels.size(); ++j) {
    double value = 1.0;
    if (constant[j]) {
      value = std::numeric_limits<double>::infinity();
    } else {
      RegressionTable aux;
      aux.response = table.columns[table.index_of(labels[j])];
      aux.keys = table.keys;
      for (std::size_t m = 0; m < labels.size(); ++m) {
        if (m == j || constant[m]) continue;
        aux.labels.push_back(labels[m]);
        aux.columns.push_back(table.columns[table.index_of(labels[m])]);
      }
      if (!aux.labels.empty()) {
        try {
          value = vif_from_r2(fit(aux, full_model(aux)).r2);
        } catch (const CollinearityError&) {
          value = std::numeric_limits<double>::infinity();
        }
      }
    }
    report.values.push_back(value);
    if (vif_flagged(value, threshold)) report.flagged.push_back(labels[j]);
  }
  return report;
}

struct RelevancyEntry {
  std::string label;
  double r = 0.0;      // Pearson correlation with the response
  double slope = 0.0;  // simple-regression slope, same sign as r
  Series scatter;      // (predictor, response) in row order
};

/// Multiple R of one predictor against the response, plus its scatter series.
inline RelevancyEntry multiple_r(const RegressionTable& table, const std::string& label) {
  const auto& x = table.columns[table.index_of(label)];
  const auto& y = table.response;
  const std::size_t n = y.size();
  if (n < 3) throw Error(ErrorKind::InsufficientData, "multiple R needs at least 3 rows");

  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double syy = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (detail::is_constant(x) || sxx == 0.0) throw Error(ErrorKind::Domain, "correlation undefined: '" + label + "' is constant");
  if (detail::is_constant(y) || syy == 0.0) throw Error(ErrorKind::Domain, "correlation undefined: response is constant");

  RelevancyEntry e;
  e.label = label;
  e.r = std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
  e.slope = sxy / sxx;
  e.scatter.reserve(n);
  for (std::size_t i = 0; i < n; ++i) e.scatter.push_back({x[i], y[i]});
  return e;
}

struct RelevancyReport {
  std::vector<RelevancyEntry> entries;
};

inline RelevancyReport relevancy(const RegressionTable& table, const std::vector<std::string>& labels) {
  RelevancyReport report;
  for (const auto& label : labels) report.entries.push_back(multiple_r(table, label));
  return report;
}

enum class RunsVerdict { Random, Structured, Degenerate };

inline const char* to_string(RunsVerdict v) {
  switch (v) {
    case RunsVerdict::Random: return "random";
    case RunsVerdict::Structured: return "structured";
    case RunsVerdict::Degenerate: return "degenerate";
  }
  return "degenerate";
}

/// Wald-Wolfowitz runs screen over residual signs. Zero residuals are skipped.
struct RunsSummary {
  std::size_t positives = 0;
  std::size_t negatives = 0;
  std::size_t zeros = 0;
  std::size_t runs = 0;
  double expected_runs = 0.0;
  double z = 0.0;
  RunsVerdict verdict = RunsVerdict::Degenerate;
  bool passes() const { return verdict == RunsVerdict::Random; }
};

inline constexpr double kRunsZLimit = 2.0;

inline RunsSummary runs_test(std::span<const double> residuals, double zero_tolerance = 0.0) {
  RunsSummary s;
  int last = 0;
  for (double e : residuals) {
    int sign = 0;
    if (e > zero_tolerance) sign = 1;
    else if (e < -zero_tolerance) sign = -1;
    if (sign == 0) {
      ++s.zeros;
      continue;
    }
    (sign > 0 ? s.positives : s.negatives)++;
    if (sign != last) ++s.runs;
    last = sign;
  }
  const double n1 = static_cast<double>(s.positives);
  const double n2 = static_cast<double>(s.negatives);
  const double total = n1 + n2;
  if (s.positives == 0 || s.negatives == 0) return s;
  s.expected_runs = 2.0 * n1 * n2 / total + 1.0;
  const double variance = 2.0 * n1 * n2 * (2.0 * n1 * n2 - total) / (total * total * (total - 1.0));
  if (!(variance > 0.0)) return s;
  s.z = (static_cast<double>(s.runs) - s.expected_runs) / std::sqrt(variance);
  s.verdict = std::abs(s.z) < kRunsZLimit ? RunsVerdict::Random : RunsVerdict::Structured;
  return s;
}

struct ResidualAnalysis {
  Series vs_fitted;
  std::vector<std::pair<std::string, Series>> vs_predictor;
  RunsSummary runs;
};

/// Plot-ready residual series for a fit, plus the runs screen over residual signs.
inline ResidualAnalysis residual_analysis(const FitResult& fit, const RegressionTable& table) {
  const std::size_t n = table.rows();
  if (fit.n != n || fit.residuals.size() != n || fit.keys != table.keys) {
    throw Error(ErrorKind::Consistency, "fit was not produced from this data (row mismatch)");
  }
  double scale = 1.0;
  for (double y : table.response) scale = std::max(scale, std::abs(y));
  for (std::size_t i = 0; i < n; ++i) {
    const double yhat = predict(fit, row_values(table, i)).value;
    if (std::abs(yhat - fit.fitted[i]) > 1e-6 * scale ||
        std::abs(table.response[i] - fit.fitted[i] - fit.residuals[i]) > 1e-6 * scale) {
      throw Error(ErrorKind::Consistency, "fit was not produced from this data (values differ)");
    }
  }

  ResidualAnalysis out;
  out.vs_fitted.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.vs_fitted.push_back({fit.fitted[i], fit.residuals[i]});
  for (const auto& label : fit.spec.predictors) {
    const auto& x = table.columns[table.index_of(label)];
    Series s;
    s.reserve(n);
    for (std::size_t i = 0; i < n; ++i) s.push_back({x[i], fit.residuals[i]});
    out.vs_predictor.emplace_back(label, std::move(s));
  }
  out.runs = runs_test(fit.residuals, 1e-9 * scale);
  return out;
}

inline ResidualAnalysis residual_analysis(const FitResult& fit, const CauseYearMatrix& matrix) {
  return residual_analysis(fit, to_table(matrix));
}

}  // namespace iwa
