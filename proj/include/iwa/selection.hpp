#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "iwa/diagnostics.hpp"
#include "iwa/error.hpp"
#include "iwa/ols.hpp"

namespace iwa {

inline constexpr std::size_t kMaxSubsetPredictors = 16;

/// Every non-empty subset, ordered by size and then lexicographically by
/// label position within a size.
inline std::vector<ModelSpec> enumerate_subsets(const std::vector<std::string>& labels) {
  const std::size_t k = labels.size();
  if (k == 0) throw Error(ErrorKind::EmptyInput, "no predictors to enumerate");
  if (k > kMaxSubsetPredictors) {
    throw Error(ErrorKind::SizeCap, "exhaustive enumeration is capped at " + std::to_string(kMaxSubsetPredictors) +
                                        " predictors, got " + std::to_string(k));
  }
  std::vector<ModelSpec> out;
  out.reserve((std::size_t{1} << k) - 1);
  for (std::size_t size = 1; size <= k; ++size) {
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
      ModelSpec spec;
      for (std::size_t i : idx) spec.predictors.push_back(labels[i]);
      out.push_back(std::move(spec));
      // Advance to the next combination in lexicographic order.
      std::size_t pos = size;
      while (pos > 0 && idx[pos - 1] == k - size + pos - 1) --pos;
      if (pos == 0) break;
      ++idx[pos - 1];
      for (std::size_t j = pos; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  return out;
}

enum class SelectionPolicy {
  MaxR2Full,         // highest R2, which the all-variable model attains
  BalancedCriteria,  // max adj-R2, then min MSE, then Cp closest to k+1, then min s
};

inline const char* to_string(SelectionPolicy p) {
  return p == SelectionPolicy::MaxR2Full ? "max-r2" : "balanced";
}

namespace detail {

inline double cp_distance(const FitResult& f) {
  if (!f.cp) throw Error(ErrorKind::Domain, "balanced ranking needs Mallows Cp on every fit");
  return std::abs(*f.cp - static_cast<double>(f.k + 1));
}

// Strict "a ranks before b", ignoring the enumeration-order tie break.
inline bool ranks_before(const FitResult& a, const FitResult& b, SelectionPolicy policy) {
  if (policy == SelectionPolicy::MaxR2Full) {
    if (a.r2 != b.r2) return a.r2 > b.r2;
  } else {
    if (a.r2_adj != b.r2_adj) return a.r2_adj > b.r2_adj;
    if (a.mse != b.mse) return a.mse < b.mse;
    const double da = cp_distance(a);
    const double db = cp_distance(b);
    if (da != db) return da < db;
    if (a.s != b.s) return a.s < b.s;
  }
  return a.k < b.k;
}

}  // namespace detail

/// Positions of `fits` in ranked order. Input order is taken as enumeration
/// order and breaks any remaining tie.
inline std::vector<std::size_t> rank_order(const std::vector<FitResult>& fits, SelectionPolicy policy) {
  if (fits.empty()) throw Error(ErrorKind::EmptyInput, "nothing to rank");
  if (policy == SelectionPolicy::BalancedCriteria) {
    for (const auto& f : fits) detail::cp_distance(f);
  }
  std::vector<std::size_t> order(fits.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return detail::ranks_before(fits[a], fits[b], policy);
  });
  return order;
}

inline std::vector<FitResult> rank(const std::vector<FitResult>& fits, SelectionPolicy policy) {
  std::vector<FitResult> out;
  for (std::size_t i : rank_order(fits, policy)) out.push_back(fits[i]);
  return out;
}

struct PipelineOptions {
  SelectionPolicy policy = SelectionPolicy::MaxR2Full;
  double alpha = 0.05;
  double vif_threshold = kDefaultVifThreshold;
};

struct CandidateGate {
  bool fitted = false;  // false when the subset fit itself failed
  bool passed_f = false;
  std::string reason;   // empty when ranked
};

struct SelectionReport {
  PipelineOptions options;
  std::vector<std::string> predictors;  // all predictors offered
  VifReport vif;
  std::vector<std::string> retained;    // survivors of the VIF gate
  RelevancyReport relevancy;
  double full_model_mse = 0.0;
  std::vector<ModelSpec> candidates;    // enumeration order over `retained`
  std::vector<FitResult> candidate_fits;  // parallel to candidates; default-constructed when the fit failed
  std::vector<CandidateGate> gates;     // parallel to candidates
  std::vector<std::size_t> ranking;     // candidate indices, best first
  std::vector<std::size_t> best_by_size;  // index per subset size 1..k; npos when no candidate of that size passed
  std::size_t best = 0;
  ResidualAnalysis residuals;
  std::vector<std::string> pipeline_log;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  const FitResult& best_fit() const { return candidate_fits.at(best); }
};

namespace detail {

inline std::string fmt(const char* pattern, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

inline std::string join(const std::vector<std::string>& items, const char* sep = ",") {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

}  // namespace detail

inline std::string model_name(const ModelSpec& spec) {
  std::vector<std::string> syms;
  for (const auto& p : spec.predictors) syms.push_back(predictor_symbol(p));
  return "f(" + detail::join(syms) + ")";
}

/// Runs the model-development flow: VIF gate, relevancy check, full-model
/// fit for MSE_all, exhaustive subset fits, F gate, ranking, and residual
/// analysis of the winner.
inline SelectionReport run_pipeline(const RegressionTable& table, const PipelineOptions& options = {}) {
  table.validate();
  SelectionReport rep;
  rep.options = options;
  rep.predictors = table.labels;
  const std::size_t n = table.rows();
  if (table.labels.empty()) throw Error(ErrorKind::EmptyInput, "no predictors");
  if (n <= table.labels.size() + 1) {
    throw Error(ErrorKind::InsufficientData, "need more than " + std::to_string(table.labels.size() + 1) +
                                                 " rows, have " + std::to_string(n));
  }
  auto& log = rep.pipeline_log;

  // (1) multicollinearity
  rep.vif = vif(table, table.labels, options.vif_threshold);
  for (std::size_t j = 0; j < rep.vif.labels.size(); ++j) {
    const auto& label = rep.vif.labels[j];
    const bool flagged = rep.vif.is_flagged(label);
    log.push_back("vif " + label + " " + detail::fmt("%.6f", rep.vif.values[j]) +
                  (flagged ? " excluded (>= threshold)" : " ok"));
    if (!flagged) rep.retained.push_back(label);
  }
  if (rep.retained.empty()) throw Error(ErrorKind::Degenerate, "VIF gate removed every predictor");

  // (2) relevancy and linearity; weak or negative predictors are kept
  rep.relevancy = relevancy(table, rep.retained);
  for (const auto& e : rep.relevancy.entries) {
    log.push_back("relevancy " + e.label + " R=" + detail::fmt("%.6f", e.r) +
                  (e.slope > 0.0 ? " slope positive" : " slope non-positive (warning, retained)"));
  }

  // (3) full model over the retained predictors
  const FitResult full = fit(table, ModelSpec{rep.retained}, std::nullopt, options.alpha);
  rep.full_model_mse = full.mse;
  log.push_back("full model " + model_name(ModelSpec{rep.retained}) + " MSE=" + detail::fmt("%.6f", full.mse));

  // (4) every subset, (5) F gate
  rep.candidates = enumerate_subsets(rep.retained);
  std::vector<FitResult> passing;
  std::vector<std::size_t> passing_index;
  for (std::size_t c = 0; c < rep.candidates.size(); ++c) {
    const auto& spec = rep.candidates[c];
    CandidateGate gate;
    FitResult f;
    try {
      f = fit(table, spec, std::nullopt, options.alpha);
      if (full.mse > 0.0) {
        f.cp = mallows_cp(f.sse, full.mse, n, f.k);
      } else {
        // Exact full-model fit: Cp is k+1 for other exact fits and unbounded otherwise.
        f.cp = f.sse == 0.0 ? static_cast<double>(f.k + 1) : std::numeric_limits<double>::infinity();
      }
      gate.fitted = true;
      gate.passed_f = f.passes_f_test();
      if (!gate.passed_f) {
        gate.reason = "F " + detail::fmt("%.6f", f.f_stat) + " <= F_critical " + detail::fmt("%.6f", f.f_critical);
      }
    } catch (const CollinearityError& e) {
      gate.reason = std::string("fit failed: ") + e.what();
    }
    if (gate.passed_f) {
      passing.push_back(f);
      passing_index.push_back(c);
    }
    log.push_back("candidate " + model_name(spec) + (gate.passed_f ? " passed F gate" : " rejected: " + gate.reason));
    rep.candidate_fits.push_back(std::move(f));
    rep.gates.push_back(std::move(gate));
  }
  if (passing.empty()) {
    std::string detail = "no candidate model passes the F test at alpha=" + detail::fmt("%g", options.alpha);
    if (rep.gates.back().fitted) {
      detail += "; full model F=" + detail::fmt("%.6f", full.f_stat) + ", F_critical=" + detail::fmt("%.6f", full.f_critical);
    }
    throw Error(ErrorKind::NoModel, detail);
  }

  // (6) rank
  for (std::size_t i : rank_order(passing, options.policy)) rep.ranking.push_back(passing_index[i]);
  rep.best = rep.ranking.front();
  rep.best_by_size.assign(rep.retained.size(), SelectionReport::npos);
  for (std::size_t c : rep.ranking) {
    auto& slot = rep.best_by_size[rep.candidates[c].size() - 1];
    if (slot == SelectionReport::npos) slot = c;
  }
  log.push_back(std::string("ranked ") + std::to_string(rep.ranking.size()) + " models by " + to_string(options.policy) +
                "; best " + model_name(rep.candidates[rep.best]));

  // (7) residual analysis of the winner
  rep.residuals = residual_analysis(rep.best_fit(), table);
  log.push_back(std::string("residual runs test: runs=") + std::to_string(rep.residuals.runs.runs) + " z=" +
                detail::fmt("%.6f", rep.residuals.runs.z) + " " + to_string(rep.residuals.runs.verdict));
  return rep;
}

inline SelectionReport run_pipeline(const CauseYearMatrix& matrix, const PipelineOptions& options = {}) {
  return run_pipeline(to_table(matrix), options);
}

}  // namespace iwa
