#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <random>

#include "iwa/spatiotemporal.hpp"

namespace {

iwa::AccidentRecord record(const std::string& district, std::optional<int> hour) {
  iwa::AccidentRecord r;
  r.year = 2005;
  r.district = district;
  r.hour = hour;
  r.cause = iwa::Cause::Other;
  return r;
}

std::vector<iwa::AccidentRecord> random_records(std::mt19937_64& rng, std::size_t n) {
  static const std::vector<std::string> districts = {"dhaka", "khulna", "barisal", "chandpur", "bhola", "narayanganj"};
  std::uniform_int_distribution<std::size_t> pick(0, districts.size() - 1);
  std::uniform_int_distribution<int> hour(-1, 23);
  std::vector<iwa::AccidentRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    const int h = hour(rng);
    out.push_back(record(districts[pick(rng)], h < 0 ? std::nullopt : std::optional<int>(h)));
  }
  return out;
}

}  // namespace

TEST(DistrictDistribution, SingleDistrict) {
  const auto h = iwa::district_distribution({record("dhaka", 1), record("dhaka", 2), record("dhaka", 3)});
  ASSERT_EQ(h.bins.size(), 1u);
  EXPECT_EQ(h.bins[0], (std::pair<std::string, std::size_t>{"dhaka", 3}));
  EXPECT_EQ(h.total, 3u);
}

TEST(DistrictDistribution, TiesSortAlphabetically) {
  const auto h = iwa::district_distribution(
      {record("khulna", 1), record("dhaka", 1), record("barisal", 1), record("khulna", 1), record("dhaka", 1)});
  ASSERT_EQ(h.bins.size(), 3u);
  EXPECT_EQ(h.bins[0].first, "dhaka");
  EXPECT_EQ(h.bins[1].first, "khulna");
  EXPECT_EQ(h.bins[2].first, "barisal");
  EXPECT_EQ(h.count("khulna"), 2u);
  EXPECT_EQ(h.count("sylhet"), 0u);
}

TEST(HourlyDistribution, MidnightIsAm) {
  const auto h = iwa::hourly_distribution({record("dhaka", 0)});
  EXPECT_EQ(h.bins[0], 1u);
  EXPECT_EQ(h.am_total(), 1u);
  EXPECT_EQ(h.pm_total(), 0u);
}

TEST(HourlyDistribution, PeakWindowAndUnknown) {
  const auto h = iwa::hourly_distribution(
      {record("a", 10), record("a", 11), record("a", 14), record("a", 15), record("a", std::nullopt)});
  EXPECT_EQ(h.peak_window_total(), 4u);
  EXPECT_EQ(h.unknown, 1u);
  EXPECT_EQ(h.total(), 5u);
  EXPECT_EQ(h.am_total() + h.pm_total(), 4u);
}

TEST(HourlyDistribution, WindowBoundariesAreHalfOpen) {
  const auto h = iwa::hourly_distribution({record("a", 9), record("a", 16), record("a", 12), record("a", 23)});
  EXPECT_EQ(h.peak_window_total(), 1u);
  EXPECT_EQ(h.am_total(), 1u);
  EXPECT_EQ(h.pm_total(), 3u);
}

TEST(HourlyDistribution, AfternoonHeavySampleHasMorePm) {
  std::vector<iwa::AccidentRecord> rs;
  for (int h : {13, 14, 15, 17, 18, 9, 22, 11}) rs.push_back(record("a", h));
  const auto hist = iwa::hourly_distribution(rs);
  EXPECT_GT(hist.pm_total(), hist.am_total());
}

TEST(Histograms, EmptyInputIsError) {
  for (auto call : {+[] { iwa::district_distribution({}); }, +[] { iwa::hourly_distribution({}); }}) {
    try {
      call();
      FAIL();
    } catch (const iwa::Error& e) {
      EXPECT_EQ(e.kind(), iwa::ErrorKind::EmptyInput);
    }
  }
}

TEST(Histograms, MatchBruteForceTallies) {
  std::mt19937_64 rng(307);
  for (int trial = 0; trial < 50; ++trial) {
    const auto rs = random_records(rng, 1 + static_cast<std::size_t>(trial) * 13);
    std::map<std::string, std::size_t> by_district;
    std::array<std::size_t, 24> by_hour{};
    std::size_t unknown = 0;
    for (const auto& r : rs) {
      ++by_district[r.district];
      if (r.hour) {
        ++by_hour[static_cast<std::size_t>(*r.hour)];
      } else {
        ++unknown;
      }
    }
    const auto d = iwa::district_distribution(rs);
    const auto h = iwa::hourly_distribution(rs);
    EXPECT_EQ(d.total, rs.size());
    EXPECT_EQ(h.total(), rs.size());
    EXPECT_EQ(d.bins.size(), by_district.size());
    for (const auto& [name, c] : by_district) EXPECT_EQ(d.count(name), c);
    for (std::size_t i = 1; i < d.bins.size(); ++i) {
      const auto& prev = d.bins[i - 1];
      const auto& cur = d.bins[i];
      EXPECT_TRUE(prev.second > cur.second || (prev.second == cur.second && prev.first < cur.first));
    }
    for (std::size_t i = 0; i < 24; ++i) EXPECT_EQ(h.bins[i], by_hour[i]);
    EXPECT_EQ(h.unknown, unknown);
  }
}

TEST(Histograms, PermutationInvariant) {
  std::mt19937_64 rng(311);
  auto rs = random_records(rng, 200);
  const auto d = iwa::district_distribution(rs);
  const auto h = iwa::hourly_distribution(rs);
  for (int i = 0; i < 10; ++i) {
    std::shuffle(rs.begin(), rs.end(), rng);
    EXPECT_EQ(iwa::district_distribution(rs), d);
    EXPECT_EQ(iwa::hourly_distribution(rs), h);
  }
}

TEST(Histograms, MergeOfSplitsEqualsWhole) {
  std::mt19937_64 rng(313);
  for (int trial = 0; trial < 30; ++trial) {
    const auto rs = random_records(rng, 50 + static_cast<std::size_t>(trial));
    const std::size_t cut = 1 + static_cast<std::size_t>(trial) % (rs.size() - 1);
    const std::vector<iwa::AccidentRecord> left(rs.begin(), rs.begin() + static_cast<std::ptrdiff_t>(cut));
    const std::vector<iwa::AccidentRecord> right(rs.begin() + static_cast<std::ptrdiff_t>(cut), rs.end());
    EXPECT_EQ(iwa::merge(iwa::district_distribution(left), iwa::district_distribution(right)),
              iwa::district_distribution(rs));
    EXPECT_EQ(iwa::merge(iwa::hourly_distribution(left), iwa::hourly_distribution(right)),
              iwa::hourly_distribution(rs));
  }
}
