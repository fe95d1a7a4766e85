#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "iwa/error.hpp"
#include "iwa/fdist.hpp"
#include "iwa/ingest.hpp"
#include "iwa/linalg.hpp"

namespace iwa {

/// Column-oriented regression data: named predictor columns, one response,
/// and an integer key per row (the year for accident data).
struct RegressionTable {
  std::vector<std::string> labels;
  std::vector<Vector> columns;
  Vector response;
  std::vector<int> keys;

  std::size_t rows() const noexcept { return response.size(); }
  std::size_t predictor_count() const noexcept { return columns.size(); }

  void validate() const {
    if (labels.size() != columns.size()) throw Error(ErrorKind::Shape, "label count does not match column count");
    if (keys.size() != response.size()) throw Error(ErrorKind::Shape, "key count does not match row count");
    std::set<std::string> seen;
    for (std::size_t j = 0; j < columns.size(); ++j) {
      if (columns[j].size() != response.size()) {
        throw Error(ErrorKind::Shape, "column '" + labels[j] + "' has wrong length");
      }
      if (!seen.insert(labels[j]).second) throw Error(ErrorKind::Shape, "duplicate label '" + labels[j] + "'");
      for (double x : columns[j]) {
        if (!std::isfinite(x)) throw Error(ErrorKind::Domain, "non-finite value in column '" + labels[j] + "'");
      }
    }
    for (double y : response) {
      if (!std::isfinite(y)) throw Error(ErrorKind::Domain, "non-finite response value");
    }
  }

  std::optional<std::size_t> find(const std::string& label) const {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) return std::nullopt;
    return static_cast<std::size_t>(it - labels.begin());
  }

  std::size_t index_of(const std::string& label) const {
    auto j = find(label);
    if (!j) throw Error(ErrorKind::Arity, "unknown predictor '" + label + "'");
    return *j;
  }

  std::optional<std::size_t> row_of_key(int key) const {
    auto it = std::find(keys.begin(), keys.end(), key);
    if (it == keys.end()) return std::nullopt;
    return static_cast<std::size_t>(it - keys.begin());
  }

  /// Rows [first, first + count).
  RegressionTable slice(std::size_t first, std::size_t count) const {
    if (first + count > rows()) throw Error(ErrorKind::Shape, "row slice out of range");
    RegressionTable out;
    out.labels = labels;
    for (const auto& c : columns) out.columns.emplace_back(c.begin() + first, c.begin() + first + count);
    out.response.assign(response.begin() + first, response.begin() + first + count);
    out.keys.assign(keys.begin() + first, keys.begin() + first + count);
    return out;
  }
};

inline RegressionTable to_table(const CauseYearMatrix& m) {
  RegressionTable t;
  for (Cause c : kPredictorCauses) t.labels.emplace_back(cause_column(c));
  t.columns.assign(kPredictorCount, Vector(m.rows()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < kPredictorCount; ++j) t.columns[j][i] = static_cast<double>(m.predictor_counts[i][j]);
  }
  t.response.reserve(m.rows());
  for (long y : m.response) t.response.push_back(static_cast<double>(y));
  t.keys = m.years;
  return t;
}

struct ModelSpec {
  std::vector<std::string> predictors;  // intercept is implicit

  std::size_t size() const noexcept { return predictors.size(); }
  bool operator==(const ModelSpec&) const = default;

  void validate() const {
    if (predictors.empty()) throw Error(ErrorKind::EmptyInput, "model needs at least one predictor");
    std::set<std::string> seen(predictors.begin(), predictors.end());
    if (seen.size() != predictors.size()) throw Error(ErrorKind::Shape, "model predictors must be distinct");
  }
};

inline ModelSpec full_model(const RegressionTable& t) { return {t.labels}; }

struct FitResult {
  ModelSpec spec;
  std::size_t n = 0;
  std::size_t k = 0;
  Vector coefficients;  // intercept first, then one slope per spec predictor
  double sse = 0.0;
  double ssr = 0.0;
  double sst = 0.0;
  double r2 = 0.0;
  double r2_adj = 0.0;
  double s = 0.0;
  double mse = 0.0;
  double f_stat = 0.0;
  double alpha = 0.05;
  double f_critical = 0.0;
  std::optional<double> cp;
  Vector residuals;
  Vector fitted;
  std::vector<int> keys;

  double intercept() const { return coefficients.at(0); }
  double slope(const std::string& label) const {
    for (std::size_t j = 0; j < spec.predictors.size(); ++j) {
      if (spec.predictors[j] == label) return coefficients.at(j + 1);
    }
    throw Error(ErrorKind::Arity, "model has no predictor '" + label + "'");
  }
  bool passes_f_test() const { return f_stat > f_critical; }
};

inline double adjusted_r2(double r2, std::size_t n, std::size_t k) {
  if (n <= k + 1) throw Error(ErrorKind::InsufficientData, "adjusted R2 needs n > k + 1");
  return 1.0 - (1.0 - r2) * static_cast<double>(n - 1) / static_cast<double>(n - k - 1);
}

/// F statistic written through R2: (R2/k) / ((1 - R2)/(n - k - 1)).
inline double f_from_r2(double r2, std::size_t n, std::size_t k) {
  if (n <= k + 1 || k == 0) throw Error(ErrorKind::InsufficientData, "F statistic needs k >= 1 and n > k + 1");
  if (r2 >= 1.0) return std::numeric_limits<double>::infinity();
  return (r2 / static_cast<double>(k)) / ((1.0 - r2) / static_cast<double>(n - k - 1));
}

/// Mallows' Cp with p = k predictors: SSE_p / MSE_full + 2(k + 1) - n.
inline double mallows_cp(double sse, double full_model_mse, std::size_t n, std::size_t k) {
  if (!(full_model_mse > 0.0)) throw Error(ErrorKind::Domain, "Mallows Cp needs a positive full-model MSE");
  return sse / full_model_mse + 2.0 * static_cast<double>(k + 1) - static_cast<double>(n);
}

/// Least-squares fit of response on an intercept plus the model's predictors,
/// solved through the normal equations X'X b = X'y.
inline FitResult fit(const RegressionTable& table, const ModelSpec& spec,
                     std::optional<double> full_model_mse = std::nullopt, double alpha = 0.05) {
  table.validate();
  spec.validate();
  const std::size_t n = table.rows();
  const std::size_t k = spec.size();
  if (n <= k + 1) {
    throw Error(ErrorKind::InsufficientData, "need more than " + std::to_string(k + 1) + " rows to fit " +
                                                 std::to_string(k) + " predictors, have " + std::to_string(n));
  }

  std::vector<std::span<const double>> x;
  x.reserve(k);
  for (const auto& label : spec.predictors) x.emplace_back(table.columns[table.index_of(label)]);
  const auto& y = table.response;

  // Design column 0 is the intercept.
  auto design = [&](std::size_t col, std::size_t row) { return col == 0 ? 1.0 : x[col - 1][row]; };

  const std::size_t p = k + 1;
  Matrix normal(p, p);
  Vector rhs(p, 0.0);
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = a; b < p; ++b) {
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) acc += design(a, i) * design(b, i);
      normal(a, b) = acc;
      normal(b, a) = acc;
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += design(a, i) * y[i];
    rhs[a] = acc;
  }

  FitResult r;
  try {
    r.coefficients = solve_linear_system(std::move(normal), std::move(rhs));
  } catch (const SingularSystemError& e) {
    const std::size_t col = e.pivot_index();
    throw CollinearityError(col == 0 ? std::string("intercept") : spec.predictors[col - 1]);
  }

  r.spec = spec;
  r.n = n;
  r.k = k;
  r.alpha = alpha;
  r.keys = table.keys;
  r.fitted.resize(n);
  r.residuals.resize(n);
  double mean_y = 0.0;
  for (double v : y) mean_y += v;
  mean_y /= static_cast<double>(n);

  for (std::size_t i = 0; i < n; ++i) {
    double yhat = r.coefficients[0];
    for (std::size_t j = 0; j < k; ++j) yhat += r.coefficients[j + 1] * x[j][i];
    r.fitted[i] = yhat;
    r.residuals[i] = y[i] - yhat;
    r.sse += r.residuals[i] * r.residuals[i];
    r.ssr += (yhat - mean_y) * (yhat - mean_y);
    r.sst += (y[i] - mean_y) * (y[i] - mean_y);
  }

  const double dof = static_cast<double>(n - k - 1);
  r.mse = r.sse / dof;
  r.s = std::sqrt(r.mse);
  if (r.sst > 0.0) {
    r.r2 = std::clamp(r.ssr / r.sst, 0.0, 1.0);
  } else {
    // Constant response: only an exact fit is meaningful.
    double scale = 1.0;
    for (double v : y) scale = std::max(scale, v * v);
    if (r.sse > 1e-20 * scale * static_cast<double>(n)) {
      throw Error(ErrorKind::Degenerate, "constant response with non-zero residuals");
    }
    r.r2 = 1.0;
  }
  r.r2_adj = 1.0 - (1.0 - r.r2) * static_cast<double>(n - 1) / dof;
  if (r.mse > 0.0) {
    r.f_stat = (r.ssr / static_cast<double>(k)) / r.mse;
  } else {
    r.f_stat = r.ssr > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  r.f_critical = f_critical(alpha, static_cast<int>(k), static_cast<int>(n - k - 1));
  if (full_model_mse) r.cp = mallows_cp(r.sse, *full_model_mse, n, k);
  return r;
}

inline FitResult fit(const CauseYearMatrix& matrix, const ModelSpec& spec,
                     std::optional<double> full_model_mse = std::nullopt, double alpha = 0.05) {
  return fit(to_table(matrix), spec, full_model_mse, alpha);
}

struct Prediction {
  double value = 0.0;
  bool negative = false;  // reported as-is; clamping is left to the caller
};

inline Prediction predict(const FitResult& fit, const std::map<std::string, double>& predictor_values) {
  if (fit.coefficients.size() != fit.spec.size() + 1) throw Error(ErrorKind::Shape, "fit has inconsistent coefficients");
  double v = fit.coefficients[0];
  for (std::size_t j = 0; j < fit.spec.size(); ++j) {
    auto it = predictor_values.find(fit.spec.predictors[j]);
    if (it == predictor_values.end()) {
      throw Error(ErrorKind::Arity, "missing value for predictor '" + fit.spec.predictors[j] + "'");
    }
    v += fit.coefficients[j + 1] * it->second;
  }
  return {v, v < 0.0};
}

inline std::map<std::string, double> row_values(const RegressionTable& table, std::size_t row) {
  std::map<std::string, double> values;
  for (std::size_t j = 0; j < table.predictor_count(); ++j) values[table.labels[j]] = table.columns[j][row];
  return values;
}

struct HoldoutRow {
  int year = 0;
  double actual = 0.0;
  double predicted = 0.0;
  std::optional<double> percent_error;  // empty when actual == 0
};

struct HoldoutReport {
  std::vector<HoldoutRow> rows;
  std::optional<double> max_percent_error;
};

/// Percent error 100·|predicted − actual|/actual for each requested year.
inline HoldoutReport holdout_error(const RegressionTable& table, const FitResult& fit,
                                   const std::vector<int>& holdout_years) {
  if (holdout_years.empty()) throw Error(ErrorKind::EmptyInput, "no holdout years given");
  HoldoutReport report;
  for (int year : holdout_years) {
    auto row = table.row_of_key(year);
    if (!row) throw Error(ErrorKind::Consistency, "holdout year " + std::to_string(year) + " not in data");
    HoldoutRow h;
    h.year = year;
    h.actual = table.response[*row];
    h.predicted = predict(fit, row_values(table, *row)).value;
    if (h.actual > 0.0) {
      h.percent_error = 100.0 * std::abs(h.predicted - h.actual) / h.actual;
      report.max_percent_error = std::max(report.max_percent_error.value_or(0.0), *h.percent_error);
    }
    report.rows.push_back(h);
  }
  return report;
}

inline HoldoutReport holdout_error(const CauseYearMatrix& matrix, const FitResult& fit,
                                   const std::vector<int>& holdout_years) {
  return holdout_error(to_table(matrix), fit, holdout_years);
}

/// The last `count` keys of the table, in row order.
inline std::vector<int> trailing_keys(const RegressionTable& table, std::size_t count) {
  if (count > table.rows()) throw Error(ErrorKind::InsufficientData, "holdout longer than the data");
  return {table.keys.end() - static_cast<std::ptrdiff_t>(count), table.keys.end()};
}

/// Matrix column label to equation symbol (collision -> C); other labels pass through.
inline std::string predictor_symbol(const std::string& label) {
  for (Cause c : kPredictorCauses) {
    if (cause_column(c) == label) return std::string(cause_symbol(c));
  }
  return label;
}

/// Rounds to three decimals and drops trailing zeros: 1.520 -> "1.52", 2.0 -> "2".
inline std::string format_coefficient(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3f", std::abs(v) < 5e-4 ? 0.0 : v);
  std::string s(buf);
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  return s;
}

/// `y = a + b1*C + b2*SW ...` in spec predictor order.
inline std::string equation_string(const FitResult& fit) {
  std::string out = "y = " + format_coefficient(fit.coefficients.at(0));
  for (std::size_t j = 0; j < fit.spec.size(); ++j) {
    const double b = fit.coefficients.at(j + 1);
    std::string mag = format_coefficient(std::abs(b));
    const bool neg = b < 0.0 && mag != "0";
    out += neg ? " - " : " + ";
    out += mag + "*" + predictor_symbol(fit.spec.predictors[j]);
  }
  return out;
}

}  // namespace iwa
