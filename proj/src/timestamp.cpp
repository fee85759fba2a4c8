#include "ppmaudit/timestamp.hpp"

#include <cctype>
#include <cstdio>
#include <ctime>
#include <string>

namespace ppmaudit {
namespace {

using namespace std::chrono;

class Cursor {
 public:
  explicit Cursor(std::string_view text) : text_(text) {}

  bool done() const { return pos_ >= text_.size(); }
  char peek() const { return done() ? '\0' : text_[pos_]; }
  std::size_t pos() const { return pos_; }

  bool consume(char c) {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  // Exactly `width` digits.
  std::optional<int> digits(int width) {
    int value = 0;
    for (int i = 0; i < width; ++i) {
      if (done() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) return std::nullopt;
      value = value * 10 + (text_[pos_++] - '0');
    }
    return value;
  }

  // One or more digits, first three kept as milliseconds.
  std::optional<int> fraction_millis() {
    int millis = 0;
    int seen = 0;
    while (!done() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      if (seen < 3) millis = millis * 10 + (text_[pos_] - '0');
      ++seen;
      ++pos_;
    }
    if (seen == 0) return std::nullopt;
    for (int i = seen; i < 3; ++i) millis *= 10;
    return millis;
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

std::optional<Timestamp> assemble(int y, int mo, int d, int h, int mi, int s, int ms, int offset_minutes) {
  const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 60) return std::nullopt;
  const auto local = sys_days{ymd} + hours{h} + minutes{mi} + seconds{s} + milliseconds{ms};
  return time_point_cast<milliseconds>(local - minutes{offset_minutes});
}

}  // namespace

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  Cursor c(text);
  const auto y = c.digits(4);
  if (!y || !c.consume('-')) return std::nullopt;
  const auto mo = c.digits(2);
  if (!mo || !c.consume('-')) return std::nullopt;
  const auto d = c.digits(2);
  if (!d) return std::nullopt;
  if (c.done()) return assemble(*y, *mo, *d, 0, 0, 0, 0, 0);
  if (!c.consume('T') && !c.consume(' ')) return std::nullopt;

  const auto h = c.digits(2);
  if (!h || !c.consume(':')) return std::nullopt;
  const auto mi = c.digits(2);
  if (!mi) return std::nullopt;
  int s = 0;
  int ms = 0;
  if (c.consume(':')) {
    const auto sec = c.digits(2);
    if (!sec) return std::nullopt;
    s = *sec;
    if (c.consume('.') || c.consume(',')) {
      const auto frac = c.fraction_millis();
      if (!frac) return std::nullopt;
      ms = *frac;
    }
  }

  int offset = 0;
  if (c.consume('Z') || c.consume('z')) {
  } else if (c.peek() == '+' || c.peek() == '-') {
    const int sign = c.peek() == '-' ? -1 : 1;
    c.consume(c.peek());
    const auto oh = c.digits(2);
    if (!oh) return std::nullopt;
    c.consume(':');
    const auto om = c.digits(2);
    if (!om) return std::nullopt;
    offset = sign * (*oh * 60 + *om);
  }
  if (!c.done()) return std::nullopt;
  return assemble(*y, *mo, *d, *h, *mi, s, ms, offset);
}

std::optional<Timestamp> parse_timestamp(std::string_view text, std::string_view format) {
  const std::string input(text);
  const std::string fmt(format);
  std::tm tm{};
  const char* end = ::strptime(input.c_str(), fmt.c_str(), &tm);
  if (end == nullptr) return std::nullopt;

  Cursor rest{std::string_view(end)};
  int ms = 0;
  if (rest.consume('.')) {
    const auto frac = rest.fraction_millis();
    if (!frac) return std::nullopt;
    ms = *frac;
  }
  if (!rest.done()) return std::nullopt;
  return assemble(tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, ms, 0);
}

std::string format_iso8601(Timestamp ts) {
  const auto day_point = floor<days>(ts);
  const year_month_day ymd{day_point};
  const hh_mm_ss<milliseconds> tod{ts - day_point};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d.%03d+00:00", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(tod.hours().count()), static_cast<int>(tod.minutes().count()),
                static_cast<int>(tod.seconds().count()), static_cast<int>(tod.subseconds().count()));
  return buf;
}

Timestamp month_start(int y, unsigned m) {
  return time_point_cast<milliseconds>(sys_days{year{y} / month{m} / day{1}});
}

}  // namespace ppmaudit
