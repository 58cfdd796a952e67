#include "confine/timestamp.hpp"

#include <charconv>
#include <cstdio>

#include "confine/error.hpp"

namespace confine {
namespace {

// Howard Hinnant's days_from_civil.
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const auto yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const auto doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

class Cursor {
 public:
  explicit Cursor(std::string_view s) : s_(s) {}

  bool done() const { return pos_ >= s_.size(); }
  char peek() const { return done() ? '\0' : s_[pos_]; }
  bool accept(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  bool digits(std::size_t n, int& out) {
    if (pos_ + n > s_.size()) return false;
    const auto* first = s_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, first + n, out);
    if (ec != std::errc{} || ptr != first + n) return false;
    pos_ += n;
    return true;
  }
  std::size_t fraction(int& millis) {
    std::size_t n = 0;
    millis = 0;
    while (!done() && peek() >= '0' && peek() <= '9') {
      if (n < 3) millis = millis * 10 + (peek() - '0');
      ++n;
      ++pos_;
    }
    for (std::size_t i = n; i < 3; ++i) millis *= 10;
    return n;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

[[noreturn]] void fail(std::string_view text) {
  throw Error(Errc::kUnparsableTimestamp, "cannot parse '" + std::string(text) + "'");
}

}  // namespace

Timestamp parse_timestamp(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
    text.remove_suffix(1);
  if (text.empty()) fail(text);

  // Bare integer milliseconds.
  if (text.find_first_not_of("-0123456789") == std::string_view::npos) {
    Timestamp v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) fail(text);
    return v;
  }

  Cursor c(text);
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0, millis = 0;
  if (!c.digits(4, year) || !c.accept('-') || !c.digits(2, month) || !c.accept('-') ||
      !c.digits(2, day))
    fail(text);
  if (!c.done()) {
    if (!c.accept('T') && !c.accept(' ')) fail(text);
    if (!c.digits(2, hour) || !c.accept(':') || !c.digits(2, minute)) fail(text);
    if (c.accept(':')) {
      if (!c.digits(2, second)) fail(text);
      if (c.accept('.') || c.accept(',')) {
        if (c.fraction(millis) == 0) fail(text);
      }
    }
  }
  int offset_minutes = 0;
  if (!c.done()) {
    if (c.accept('Z')) {
    } else {
      const char sign = c.peek();
      if (sign != '+' && sign != '-') fail(text);
      c.accept(sign);
      int oh = 0, om = 0;
      if (!c.digits(2, oh)) fail(text);
      c.accept(':');
      if (!c.done() && !c.digits(2, om)) fail(text);
      offset_minutes = (oh * 60 + om) * (sign == '+' ? 1 : -1);
    }
  }
  if (!c.done()) fail(text);
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60)
    fail(text);

  const std::int64_t days =
      days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  const std::int64_t secs = days * 86400 + hour * 3600 + minute * 60 + second -
                            static_cast<std::int64_t>(offset_minutes) * 60;
  return secs * 1000 + millis;
}

std::string format_timestamp(Timestamp ts) {
  std::int64_t secs = ts / 1000;
  std::int64_t millis = ts % 1000;
  if (millis < 0) {
    millis += 1000;
    secs -= 1;
  }
  std::int64_t days = secs / 86400;
  std::int64_t rem = secs % 86400;
  if (rem < 0) {
    rem += 86400;
    days -= 1;
  }
  std::int64_t y = 0;
  unsigned m = 0, d = 0;
  civil_from_days(days, y, m, d);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lld.%03lldZ",
                static_cast<long long>(y), m, d, static_cast<long long>(rem / 3600),
                static_cast<long long>((rem % 3600) / 60), static_cast<long long>(rem % 60),
                static_cast<long long>(millis));
  return buf;
}

}  // namespace confine
