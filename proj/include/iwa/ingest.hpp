#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "iwa/error.hpp"

namespace iwa {

enum class Cause { Collision, StormyWeather, ExcessiveCurrent, Grounding, Overloading, Other };

inline constexpr std::size_t kPredictorCount = 5;

// Predictor causes in matrix column order. Other is response-only.
inline constexpr std::array<Cause, kPredictorCount> kPredictorCauses = {
    Cause::Collision, Cause::StormyWeather, Cause::ExcessiveCurrent, Cause::Grounding, Cause::Overloading};

inline constexpr std::string_view cause_name(Cause c) {
  switch (c) {
    case Cause::Collision: return "Collision";
    case Cause::StormyWeather: return "StormyWeather";
    case Cause::ExcessiveCurrent: return "ExcessiveCurrent";
    case Cause::Grounding: return "Grounding";
    case Cause::Overloading: return "Overloading";
    case Cause::Other: return "Other";
  }
  return "Other";
}

// Column label used in matrix CSV and fit JSON.
inline constexpr std::string_view cause_column(Cause c) {
  switch (c) {
    case Cause::Collision: return "collision";
    case Cause::StormyWeather: return "stormy_weather";
    case Cause::ExcessiveCurrent: return "excessive_current";
    case Cause::Grounding: return "grounding";
    case Cause::Overloading: return "overloading";
    case Cause::Other: return "other";
  }
  return "other";
}

// Short symbol used when printing equations: C, SW, EC, G, O.
inline constexpr std::string_view cause_symbol(Cause c) {
  switch (c) {
    case Cause::Collision: return "C";
    case Cause::StormyWeather: return "SW";
    case Cause::ExcessiveCurrent: return "EC";
    case Cause::Grounding: return "G";
    case Cause::Overloading: return "O";
    case Cause::Other: return "Other";
  }
  return "Other";
}

struct AccidentRecord {
  int year = 0;
  std::string district;
  std::optional<int> hour;
  Cause cause = Cause::Other;
  std::optional<int> casualties;
  std::size_t line = 0;  // source line, 0 when constructed in code

  friend bool operator==(const AccidentRecord& a, const AccidentRecord& b) {
    return a.year == b.year && a.district == b.district && a.hour == b.hour && a.cause == b.cause &&
           a.casualties == b.casualties;
  }
};

struct YearWindow {
  int from = 0;
  int to = 0;
  bool contains(int year) const noexcept { return year >= from && year <= to; }
  std::size_t length() const noexcept { return to >= from ? static_cast<std::size_t>(to - from + 1) : 0; }
};

struct CauseYearMatrix {
  std::vector<int> years;
  std::vector<std::array<long, kPredictorCount>> predictor_counts;
  std::vector<long> response;

  std::size_t rows() const noexcept { return years.size(); }
  bool operator==(const CauseYearMatrix&) const = default;
};

namespace detail {

inline std::string trim(std::string_view s) {
  auto b = s.begin();
  auto e = s.end();
  while (b != e && std::isspace(static_cast<unsigned char>(*b))) ++b;
  while (e != b && std::isspace(static_cast<unsigned char>(*(e - 1)))) --e;
  return std::string(b, e);
}

inline std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Lowercased with separators stripped: "Stormy_Weather" and "stormy weather" both give "stormyweather".
inline std::string cause_key(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == ' ' || c == '_' || c == '-' || c == '\t') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

// Splits one CSV line. Double-quoted fields may contain commas; "" is an escaped quote.
inline std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

inline std::optional<long> parse_int(std::string_view s) {
  long v = 0;
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline bool is_unknown(std::string_view s) { return s.empty() || lower(s) == "unknown"; }

inline bool getline_stripped(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace detail

/// Maps free-text cause labels onto the six categories. Canonical names are
/// always recognized; user aliases (for the many causes outside the five
/// modeled ones) are layered on top.
class CauseAliases {
 public:
  CauseAliases() {
    for (Cause c : {Cause::Collision, Cause::StormyWeather, Cause::ExcessiveCurrent, Cause::Grounding,
                    Cause::Overloading, Cause::Other}) {
      table_[detail::cause_key(cause_name(c))] = c;
    }
  }

  void add(std::string_view alias, Cause canonical) { table_[detail::cause_key(alias)] = canonical; }

  std::optional<Cause> lookup(std::string_view label) const {
    auto it = table_.find(detail::cause_key(label));
    if (it == table_.end()) return std::nullopt;
    return it->second;
  }

  /// Reads `alias,canonical` rows. A header row naming those two columns is optional.
  static CauseAliases parse(std::istream& in) {
    CauseAliases aliases;
    std::string line;
    std::size_t lineno = 0;
    while (detail::getline_stripped(in, line)) {
      ++lineno;
      if (detail::trim(line).empty()) continue;
      auto fields = detail::split_csv(line);
      if (fields.size() != 2) throw ParseError(lineno, "alias row must have 2 fields");
      const std::string alias = detail::trim(fields[0]);
      const std::string canonical = detail::trim(fields[1]);
      if (lineno == 1 && detail::lower(alias) == "alias" && detail::lower(canonical) == "canonical") continue;
      auto target = CauseAliases{}.lookup(canonical);
      if (!target) throw ParseError(lineno, "unknown canonical cause '" + canonical + "'");
      if (alias.empty()) throw ParseError(lineno, "empty alias");
      aliases.add(alias, *target);
    }
    return aliases;
  }

 private:
  std::map<std::string, Cause> table_;
};

inline constexpr int kMinYear = 1995;
inline constexpr int kMaxYear = 2099;

/// Parses accident records from CSV with header `year,district,hour,cause,casualties`.
inline std::vector<AccidentRecord> parse_records(std::istream& in, const CauseAliases& aliases = {}) {
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::vector<AccidentRecord> records;

  while (detail::getline_stripped(in, line)) {
    ++lineno;
    if (lineno == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv(line);
    if (!have_header) {
      static constexpr std::array<std::string_view, 5> kHeader = {"year", "district", "hour", "cause",
                                                                   "casualties"};
      bool ok = fields.size() == kHeader.size();
      for (std::size_t i = 0; ok && i < kHeader.size(); ++i) ok = detail::lower(detail::trim(fields[i])) == kHeader[i];
      if (!ok) throw ParseError(lineno, "expected header 'year,district,hour,cause,casualties'");
      have_header = true;
      continue;
    }
    if (fields.size() != 5) {
      throw ParseError(lineno, "expected 5 fields, found " + std::to_string(fields.size()));
    }
    for (auto& f : fields) f = detail::trim(f);

    AccidentRecord rec;
    rec.line = lineno;
    auto year = detail::parse_int(fields[0]);
    if (!year) throw ParseError(lineno, "non-integer year '" + fields[0] + "'");
    if (*year < kMinYear || *year > kMaxYear) throw ParseError(lineno, "year out of range");
    rec.year = static_cast<int>(*year);

    rec.district = detail::lower(fields[1]);
    if (rec.district.empty()) throw ParseError(lineno, "empty district");

    if (!detail::is_unknown(fields[2])) {
      auto hour = detail::parse_int(fields[2]);
      if (!hour) throw ParseError(lineno, "non-integer hour '" + fields[2] + "'");
      if (*hour < 0 || *hour > 23) throw ParseError(lineno, "hour out of range");
      rec.hour = static_cast<int>(*hour);
    }

    auto cause = aliases.lookup(fields[3]);
    if (!cause) throw ParseError(lineno, "unrecognized cause '" + fields[3] + "'");
    rec.cause = *cause;

    if (!detail::is_unknown(fields[4])) {
      auto cas = detail::parse_int(fields[4]);
      if (!cas) throw ParseError(lineno, "non-integer casualties '" + fields[4] + "'");
      if (*cas < 0) throw ParseError(lineno, "negative casualties");
      rec.casualties = static_cast<int>(*cas);
    }
    records.push_back(std::move(rec));
  }
  if (records.empty()) throw Error(ErrorKind::EmptyInput, "no accident records in input");
  return records;
}

inline std::vector<AccidentRecord> parse_records(std::string_view text, const CauseAliases& aliases = {}) {
  std::istringstream in{std::string(text)};
  return parse_records(in, aliases);
}

/// Smallest window covering every record.
inline YearWindow span_of(const std::vector<AccidentRecord>& records) {
  if (records.empty()) throw Error(ErrorKind::EmptyInput, "no accident records");
  auto [lo, hi] = std::minmax_element(records.begin(), records.end(),
                                      [](const auto& a, const auto& b) { return a.year < b.year; });
  return {lo->year, hi->year};
}

/// Tallies records into one row per year of `window`. Empty years become zero rows.
inline CauseYearMatrix aggregate(const std::vector<AccidentRecord>& records, YearWindow window) {
  if (window.length() < kPredictorCount + 2) {
    throw Error(ErrorKind::InsufficientData, "year window " + std::to_string(window.from) + "-" +
                                                 std::to_string(window.to) + " spans fewer than " +
                                                 std::to_string(kPredictorCount + 2) + " years");
  }
  CauseYearMatrix m;
  const std::size_t n = window.length();
  m.years.resize(n);
  m.predictor_counts.assign(n, {});
  m.response.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) m.years[i] = window.from + static_cast<int>(i);

  std::size_t used = 0;
  for (const auto& r : records) {
    if (!window.contains(r.year)) continue;
    const auto row = static_cast<std::size_t>(r.year - window.from);
    ++m.response[row];
    if (r.cause != Cause::Other) ++m.predictor_counts[row][static_cast<std::size_t>(r.cause)];
    ++used;
  }
  if (used == 0) throw Error(ErrorKind::EmptyInput, "no accident records inside the year window");
  return m;
}

inline CauseYearMatrix aggregate(const std::vector<AccidentRecord>& records) {
  return aggregate(records, span_of(records));
}

inline constexpr std::string_view kMatrixHeader =
    "year,collision,stormy_weather,excessive_current,grounding,overloading,total";

inline void write_matrix_csv(std::ostream& out, const CauseYearMatrix& m) {
  out << kMatrixHeader << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    out << m.years[i];
    for (long c : m.predictor_counts[i]) out << ',' << c;
    out << ',' << m.response[i] << '\n';
  }
}

inline CauseYearMatrix read_matrix_csv(std::istream& in) {
  CauseYearMatrix m;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (detail::getline_stripped(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    if (!have_header) {
      if (detail::lower(detail::trim(line)) != kMatrixHeader) throw ParseError(lineno, "unexpected matrix header");
      have_header = true;
      continue;
    }
    auto fields = detail::split_csv(line);
    if (fields.size() != kPredictorCount + 2) throw ParseError(lineno, "expected 7 fields");
    std::array<long, kPredictorCount + 2> v{};
    for (std::size_t j = 0; j < fields.size(); ++j) {
      auto x = detail::parse_int(detail::trim(fields[j]));
      if (!x || *x < 0) throw ParseError(lineno, "invalid count '" + fields[j] + "'");
      v[j] = *x;
    }
    const int year = static_cast<int>(v[0]);
    if (!m.years.empty() && year <= m.years.back()) throw ParseError(lineno, "years must be strictly ascending");
    std::array<long, kPredictorCount> counts{};
    for (std::size_t j = 0; j < kPredictorCount; ++j) {
      counts[j] = v[j + 1];
      if (counts[j] > v[kPredictorCount + 1]) throw ParseError(lineno, "cause count exceeds total");
    }
    m.years.push_back(year);
    m.predictor_counts.push_back(counts);
    m.response.push_back(v[kPredictorCount + 1]);
  }
  if (m.years.empty()) throw Error(ErrorKind::EmptyInput, "matrix CSV has no rows");
  return m;
}

}  // namespace iwa
