#pragma once

#include <chrono>
#include <compare>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>

namespace corrnet {

/// Calendar date on the proleptic Gregorian calendar. Only ISO-8601
/// `YYYY-MM-DD` is accepted on input and produced on output.
class Date {
 public:
  constexpr Date() = default;
  constexpr explicit Date(std::chrono::year_month_day ymd) : ymd_(ymd) {}
  constexpr Date(int y, unsigned m, unsigned d)
      : ymd_(std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}) {}

  static std::optional<Date> parse(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    auto digits = [&](std::size_t from, std::size_t count) -> std::optional<int> {
      int value = 0;
      for (std::size_t k = from; k < from + count; ++k) {
        if (text[k] < '0' || text[k] > '9') return std::nullopt;
        value = value * 10 + (text[k] - '0');
      }
      return value;
    };
    auto y = digits(0, 4);
    auto m = digits(5, 2);
    auto d = digits(8, 2);
    if (!y || !m || !d) return std::nullopt;
    Date out(*y, static_cast<unsigned>(*m), static_cast<unsigned>(*d));
    if (!out.ymd_.ok()) return std::nullopt;
    return out;
  }

  int year() const { return static_cast<int>(ymd_.year()); }
  unsigned month() const { return static_cast<unsigned>(ymd_.month()); }
  unsigned day() const { return static_cast<unsigned>(ymd_.day()); }

  std::chrono::sys_days days() const { return std::chrono::sys_days{ymd_}; }

  Date plus_days(int n) const {
    return Date(std::chrono::year_month_day{days() + std::chrono::days{n}});
  }

  bool is_weekend() const {
    auto wd = std::chrono::weekday{days()}.c_encoding();
    return wd == 0 || wd == 6;
  }

  std::string to_string() const {
    char buf[11];
    int y = year();
    unsigned m = month(), d = day();
    buf[0] = static_cast<char>('0' + (y / 1000) % 10);
    buf[1] = static_cast<char>('0' + (y / 100) % 10);
    buf[2] = static_cast<char>('0' + (y / 10) % 10);
    buf[3] = static_cast<char>('0' + y % 10);
    buf[4] = '-';
    buf[5] = static_cast<char>('0' + m / 10);
    buf[6] = static_cast<char>('0' + m % 10);
    buf[7] = '-';
    buf[8] = static_cast<char>('0' + d / 10);
    buf[9] = static_cast<char>('0' + d % 10);
    buf[10] = '\0';
    return std::string(buf, 10);
  }

  friend constexpr auto operator<=>(const Date& a, const Date& b) { return a.ymd_ <=> b.ymd_; }
  friend constexpr bool operator==(const Date& a, const Date& b) = default;
  friend std::ostream& operator<<(std::ostream& os, const Date& d) { return os << d.to_string(); }

 private:
  std::chrono::year_month_day ymd_{std::chrono::year{1970}, std::chrono::month{1},
                                   std::chrono::day{1}};
};

}  // namespace corrnet
