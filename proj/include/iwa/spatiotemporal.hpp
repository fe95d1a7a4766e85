#pragma once

#include <algorithm>
#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "iwa/error.hpp"
#include "iwa/ingest.hpp"

namespace iwa {

/// Accident counts per district, sorted by count descending, then name.
struct DistrictHistogram {
  std::vector<std::pair<std::string, std::size_t>> bins;
  std::size_t total = 0;

  std::size_t count(const std::string& district) const {
    for (const auto& [name, c] : bins) {
      if (name == district) return c;
    }
    return 0;
  }
  bool operator==(const DistrictHistogram&) const = default;
};

struct HourlyHistogram {
  std::array<std::size_t, 24> bins{};
  std::size_t unknown = 0;

  // AM is [0, 12), PM is [12, 24). Unknown-hour records are in neither.
  std::size_t am_total() const { return sum(0, 12); }
  std::size_t pm_total() const { return sum(12, 24); }
  // Peak window [10, 16), i.e. 10 AM up to but excluding 4 PM.
  std::size_t peak_window_total() const { return sum(10, 16); }
  std::size_t total() const { return am_total() + pm_total() + unknown; }

  std::size_t sum(std::size_t from, std::size_t to) const {
    std::size_t s = 0;
    for (std::size_t h = from; h < to; ++h) s += bins[h];
    return s;
  }
  bool operator==(const HourlyHistogram&) const = default;
};

namespace detail {

inline DistrictHistogram sorted_histogram(const std::map<std::string, std::size_t>& counts) {
  DistrictHistogram h;
  h.bins.assign(counts.begin(), counts.end());
  std::stable_sort(h.bins.begin(), h.bins.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
  for (const auto& bin : h.bins) h.total += bin.second;
  return h;
}

}  // namespace detail

inline DistrictHistogram district_distribution(const std::vector<AccidentRecord>& records) {
  if (records.empty()) throw Error(ErrorKind::EmptyInput, "no records for district distribution");
  std::map<std::string, std::size_t> counts;
  for (const auto& r : records) ++counts[r.district];
  return detail::sorted_histogram(counts);
}

inline HourlyHistogram hourly_distribution(const std::vector<AccidentRecord>& records) {
  if (records.empty()) throw Error(ErrorKind::EmptyInput, "no records for hourly distribution");
  HourlyHistogram h;
  for (const auto& r : records) {
    if (r.hour) {
      ++h.bins[static_cast<std::size_t>(*r.hour)];
    } else {
      ++h.unknown;
    }
  }
  return h;
}

inline DistrictHistogram merge(const DistrictHistogram& a, const DistrictHistogram& b) {
  std::map<std::string, std::size_t> counts;
  for (const auto& [name, c] : a.bins) counts[name] += c;
  for (const auto& [name, c] : b.bins) counts[name] += c;
  return detail::sorted_histogram(counts);
}

inline HourlyHistogram merge(const HourlyHistogram& a, const HourlyHistogram& b) {
  HourlyHistogram h;
  for (std::size_t i = 0; i < h.bins.size(); ++i) h.bins[i] = a.bins[i] + b.bins[i];
  h.unknown = a.unknown + b.unknown;
  return h;
}

}  // namespace iwa
