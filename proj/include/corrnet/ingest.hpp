#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "corrnet/csv.hpp"
#include "corrnet/date.hpp"
#include "corrnet/error.hpp"

namespace corrnet {

/// Label of one instrument ("SKOR", "US", ...). Identity for link matching
/// across windows, so it must be stable and unique within a panel.
struct InstrumentId {
  std::string label;

  InstrumentId() = default;
  explicit InstrumentId(std::string l) : label(std::move(l)) {}

  friend auto operator<=>(const InstrumentId&, const InstrumentId&) = default;
};

enum class Layout { Long, Wide };
enum class FillPolicy { Intersect, ForwardFill };

/// One instrument's observations, sorted by date, before alignment.
struct PriceSeries {
  InstrumentId id;
  std::vector<std::pair<Date, double>> points;
};

/// Rectangular date x instrument panel of closing prices.
struct PricePanel {
  std::vector<Date> dates;
  std::vector<InstrumentId> instruments;
  Eigen::MatrixXd closes;                               // [date][instrument]
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> filled;  // true where forward-filled

  std::size_t rows() const { return dates.size(); }
  std::size_t cols() const { return instruments.size(); }

  PricePanel slice_rows(std::size_t begin, std::size_t count) const {
    PricePanel out;
    out.dates.assign(dates.begin() + static_cast<std::ptrdiff_t>(begin),
                     dates.begin() + static_cast<std::ptrdiff_t>(begin + count));
    out.instruments = instruments;
    out.closes = closes.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(count));
    out.filled = filled.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(count));
    return out;
  }

  /// Keeps only the listed instruments, in panel order. Unknown labels are ignored.
  PricePanel select(const std::set<std::string>& keep) const {
    std::vector<Eigen::Index> columns;
    for (std::size_t j = 0; j < instruments.size(); ++j)
      if (keep.count(instruments[j].label)) columns.push_back(static_cast<Eigen::Index>(j));
    PricePanel out;
    out.dates = dates;
    out.closes.resize(closes.rows(), static_cast<Eigen::Index>(columns.size()));
    out.filled.resize(filled.rows(), static_cast<Eigen::Index>(columns.size()));
    for (std::size_t k = 0; k < columns.size(); ++k) {
      out.instruments.push_back(instruments[static_cast<std::size_t>(columns[k])]);
      out.closes.col(static_cast<Eigen::Index>(k)) = closes.col(columns[k]);
      out.filled.col(static_cast<Eigen::Index>(k)) = filled.col(columns[k]);
    }
    return out;
  }
};

enum class WindowMode { CalendarYear, FixedLength };

struct WindowSpec {
  WindowMode mode = WindowMode::CalendarYear;
  std::size_t length = 260;   // fixed-length mode only
  std::size_t step = 260;     // fixed-length mode only
  std::size_t min_days = 50;  // calendar-year mode only

  void validate() const {
    if (step < 1) throw Error(ErrorKind::InvalidArgument, "window step must be >= 1");
    if (mode == WindowMode::FixedLength && length < 3)
      throw Error(ErrorKind::InvalidArgument, "fixed window length must be >= 3");
  }
};

/// One analysis window. When `has_leading_row` is set, `prices` row 0 is the
/// last close before the window so that the window yields one return per
/// core row.
struct PriceWindow {
  std::string label;
  PricePanel prices;
  bool has_leading_row = false;

  std::size_t core_rows() const { return prices.rows() - (has_leading_row ? 1 : 0); }
};

namespace detail {

inline bool blank(std::string_view line) { return csv::trim(line).empty(); }

inline double parse_close(std::string_view field, std::size_t line_no) {
  auto value = csv::parse_double(field);
  if (!value) throw Error(ErrorKind::MalformedRow, "unparseable close '" + std::string(field) + "'", line_no);
  if (!(*value > 0.0) || !std::isfinite(*value))
    throw Error(ErrorKind::NonPositivePrice, "close must be positive and finite, got '" +
                                                 std::string(csv::trim(field)) + "'",
                line_no);
  return *value;
}

inline Date parse_date(std::string_view field, std::size_t line_no) {
  auto date = Date::parse(csv::trim(field));
  if (!date) throw Error(ErrorKind::MalformedRow, "date must be YYYY-MM-DD, got '" + std::string(field) + "'", line_no);
  return *date;
}

}  // namespace detail

/// Parses a CSV price file into per-instrument sparse series, ordered by
/// first appearance (wide layout: header order).
inline std::vector<PriceSeries> parse_prices(std::string_view content, Layout layout) {
  auto all_lines = csv::lines(content);
  std::size_t header_idx = 0;
  while (header_idx < all_lines.size() && detail::blank(all_lines[header_idx])) ++header_idx;
  if (header_idx == all_lines.size()) throw Error(ErrorKind::EmptyFile, "no header row");

  auto header = csv::split(all_lines[header_idx]);
  if (!header) throw Error(ErrorKind::MalformedRow, "unbalanced quotes in header", header_idx + 1);
  for (auto& h : *header) h = std::string(csv::trim(h));

  std::vector<PriceSeries> series;
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::map<Date, double>> observed;

  auto slot = [&](const std::string& label, std::size_t line_no) -> std::size_t {
    if (label.empty()) throw Error(ErrorKind::MalformedRow, "empty instrument label", line_no);
    auto [it, inserted] = index.emplace(label, series.size());
    if (inserted) {
      series.push_back(PriceSeries{InstrumentId(label), {}});
      observed.emplace_back();
    }
    return it->second;
  };
  auto record = [&](std::size_t s, Date date, double close, std::size_t line_no) {
    if (!observed[s].emplace(date, close).second)
      throw Error(ErrorKind::DuplicateObservation,
                  "duplicate observation for " + series[s].id.label + " on " + date.to_string(), line_no);
  };

  std::size_t data_rows = 0;
  if (layout == Layout::Long) {
    if (*header != std::vector<std::string>{"date", "instrument", "close"})
      throw Error(ErrorKind::MalformedRow, "long layout header must be exactly date,instrument,close",
                  header_idx + 1);
    for (std::size_t k = header_idx + 1; k < all_lines.size(); ++k) {
      std::size_t line_no = k + 1;
      if (detail::blank(all_lines[k])) continue;
      auto fields = csv::split(all_lines[k]);
      if (!fields || fields->size() != 3)
        throw Error(ErrorKind::MalformedRow, "expected 3 fields", line_no);
      Date date = detail::parse_date((*fields)[0], line_no);
      std::string label(csv::trim((*fields)[1]));
      double close = detail::parse_close((*fields)[2], line_no);
      record(slot(label, line_no), date, close, line_no);
      ++data_rows;
    }
  } else {
    if (header->size() < 2 || (*header)[0] != "date")
      throw Error(ErrorKind::MalformedRow, "wide layout header must be date,<id1>,<id2>,...", header_idx + 1);
    std::vector<std::size_t> columns;
    for (std::size_t c = 1; c < header->size(); ++c) {
      if (index.count((*header)[c]))
        throw Error(ErrorKind::MalformedRow, "duplicate instrument column '" + (*header)[c] + "'", header_idx + 1);
      columns.push_back(slot((*header)[c], header_idx + 1));
    }
    for (std::size_t k = header_idx + 1; k < all_lines.size(); ++k) {
      std::size_t line_no = k + 1;
      if (detail::blank(all_lines[k])) continue;
      auto fields = csv::split(all_lines[k]);
      if (!fields || fields->size() != header->size())
        throw Error(ErrorKind::MalformedRow,
                    "expected " + std::to_string(header->size()) + " fields", line_no);
      Date date = detail::parse_date((*fields)[0], line_no);
      for (std::size_t c = 1; c < fields->size(); ++c) {
        // empty cell = no trading on that date for this instrument
        if (csv::trim((*fields)[c]).empty()) continue;
        record(columns[c - 1], date, detail::parse_close((*fields)[c], line_no), line_no);
      }
      ++data_rows;
    }
  }
  if (data_rows == 0) throw Error(ErrorKind::EmptyFile, "no data rows");

  for (std::size_t s = 0; s < series.size(); ++s)
    series[s].points.assign(observed[s].begin(), observed[s].end());
  return series;
}

/// Aligns sparse series onto one date axis. Non-fatal notices (dropped
/// instruments) are appended to `warnings` when given.
inline PricePanel align_calendars(const std::vector<PriceSeries>& series, FillPolicy policy,
                                  std::vector<std::string>* warnings = nullptr) {
  auto warn = [&](std::string message) {
    if (warnings) warnings->push_back(std::move(message));
  };

  std::vector<const PriceSeries*> usable;
  for (const auto& s : series) {
    if (s.points.empty()) warn("instrument " + s.id.label + " has no observations; dropped");
    else usable.push_back(&s);
  }
  if (usable.size() < 2)
    throw Error(ErrorKind::TooFewInstruments, "alignment needs at least 2 instruments with data");

  std::vector<Date> axis;
  if (policy == FillPolicy::Intersect) {
    axis.reserve(usable.front()->points.size());
    for (const auto& p : usable.front()->points) axis.push_back(p.first);
    for (std::size_t s = 1; s < usable.size(); ++s) {
      std::vector<Date> theirs;
      for (const auto& p : usable[s]->points) theirs.push_back(p.first);
      std::vector<Date> common;
      std::set_intersection(axis.begin(), axis.end(), theirs.begin(), theirs.end(), std::back_inserter(common));
      axis = std::move(common);
    }
    if (axis.empty()) throw Error(ErrorKind::EmptyIntersection, "instrument calendars share no date");
  } else {
    std::set<Date> all;
    for (const auto* s : usable)
      for (const auto& p : s->points) all.insert(p.first);
    axis.assign(all.begin(), all.end());
    std::vector<const PriceSeries*> kept;
    for (const auto* s : usable) {
      if (s->points.front().first > axis.front())
        warn("instrument " + s->id.label + " has no observation on or before " + axis.front().to_string() +
             "; dropped");
      else
        kept.push_back(s);
    }
    if (kept.size() < 2)
      throw Error(ErrorKind::TooFewInstruments, "fewer than 2 instruments remain after forward-fill alignment");
    usable = std::move(kept);
  }

  PricePanel panel;
  panel.dates = axis;
  const auto rows = static_cast<Eigen::Index>(axis.size());
  const auto cols = static_cast<Eigen::Index>(usable.size());
  panel.closes.resize(rows, cols);
  panel.filled.setConstant(rows, cols, false);
  for (Eigen::Index c = 0; c < cols; ++c) {
    const auto& points = usable[static_cast<std::size_t>(c)]->points;
    panel.instruments.push_back(usable[static_cast<std::size_t>(c)]->id);
    std::size_t cursor = 0;
    double last = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Date& d = axis[static_cast<std::size_t>(r)];
      while (cursor < points.size() && points[cursor].first < d) last = points[cursor++].second;
      if (cursor < points.size() && points[cursor].first == d) {
        last = points[cursor++].second;
        panel.closes(r, c) = last;
      } else {
        panel.closes(r, c) = last;
        panel.filled(r, c) = true;
      }
    }
  }
  return panel;
}

/// Cuts an aligned panel into analysis windows.
inline std::vector<PriceWindow> slice_windows(const PricePanel& panel, const WindowSpec& spec,
                                              std::vector<std::string>* warnings = nullptr) {
  spec.validate();
  std::vector<PriceWindow> out;
  auto make = [&](std::string label, std::size_t begin, std::size_t count) {
    PriceWindow w;
    w.label = std::move(label);
    w.has_leading_row = begin > 0;
    std::size_t first = w.has_leading_row ? begin - 1 : begin;
    w.prices = panel.slice_rows(first, begin + count - first);
    out.push_back(std::move(w));
  };

  if (spec.mode == WindowMode::CalendarYear) {
    std::size_t begin = 0;
    while (begin < panel.rows()) {
      int year = panel.dates[begin].year();
      std::size_t end = begin;
      while (end < panel.rows() && panel.dates[end].year() == year) ++end;
      std::size_t count = end - begin;
      if (count >= spec.min_days) {
        make(std::to_string(year), begin, count);
      } else if (warnings) {
        warnings->push_back("calendar year " + std::to_string(year) + " has " + std::to_string(count) +
                            " rows (< " + std::to_string(spec.min_days) + "); dropped");
      }
      begin = end;
    }
  } else {
    for (std::size_t begin = 0; begin + spec.length <= panel.rows(); begin += spec.step)
      make(panel.dates[begin].to_string(), begin, spec.length);
  }
  if (out.empty()) throw Error(ErrorKind::NoWindow, "no window satisfies the minimum size");
  return out;
}

}  // namespace corrnet
