#include "traceview/time.hpp"

#include <charconv>
#include <cstdio>
#include <cstdlib>

#include "traceview/error.hpp"

namespace traceview {

using namespace std::chrono;

Clock system_clock() {
  return [] { return floor<seconds>(std::chrono::system_clock::now()); };
}

Clock fixed_clock(TimePoint at) {
  return [at] { return at; };
}

Clock clock_from_environment() {
  if (const char* pinned = std::getenv("TRACEVIEW_CLOCK"); pinned && *pinned) {
    auto t = parse_timestamp(pinned);
    if (!t) throw ValidationError(std::string("TRACEVIEW_CLOCK is not an ISO timestamp: ") + pinned);
    return fixed_clock(*t);
  }
  return system_clock();
}

std::string format_timestamp(TimePoint t) {
  auto day = floor<days>(t);
  year_month_day ymd{day};
  hh_mm_ss<seconds> hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), int(hms.hours().count()),
                int(hms.minutes().count()), int(hms.seconds().count()));
  return buf;
}

namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > text.size()) return false;
  for (std::size_t i = pos; i < pos + len; ++i) {
    if (text[i] < '0' || text[i] > '9') return false;
  }
  auto [p, ec] = std::from_chars(text.data() + pos, text.data() + pos + len, out);
  return ec == std::errc{};
}

}  // namespace

std::optional<TimePoint> parse_timestamp(std::string_view text) {
  // YYYY-MM-DDTHH:MM:SSZ
  if (text.size() != 20 || text[4] != '-' || text[7] != '-' || text[10] != 'T' ||
      text[13] != ':' || text[16] != ':' || text[19] != 'Z') {
    return std::nullopt;
  }
  int y, mo, d, h, mi, s;
  if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, mo) || !read_int(text, 8, 2, d) ||
      !read_int(text, 11, 2, h) || !read_int(text, 14, 2, mi) || !read_int(text, 17, 2, s)) {
    return std::nullopt;
  }
  year_month_day ymd{year{y}, month{unsigned(mo)}, day{unsigned(d)}};
  if (!ymd.ok() || h > 23 || mi > 59 || s > 59) return std::nullopt;
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{s};
}

std::optional<DateSpan> parse_iso_date(std::string_view text) {
  int y = 0, mo = 0, d = 0;
  if (text.size() == 4) {
    if (!read_int(text, 0, 4, y)) return std::nullopt;
    return DateSpan{year{y} / January / 1, year{y} / December / 31};
  }
  if (text.size() == 7 && text[4] == '-') {
    if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, mo)) return std::nullopt;
    year_month ym{year{y}, month{unsigned(mo)}};
    if (!ym.ok()) return std::nullopt;
    return DateSpan{ym / 1, year_month_day{ym / last}};
  }
  if (text.size() == 10 && text[4] == '-' && text[7] == '-') {
    if (!read_int(text, 0, 4, y) || !read_int(text, 5, 2, mo) || !read_int(text, 8, 2, d)) {
      return std::nullopt;
    }
    year_month_day ymd{year{y}, month{unsigned(mo)}, day{unsigned(d)}};
    if (!ymd.ok()) return std::nullopt;
    return DateSpan{ymd, ymd};
  }
  return std::nullopt;
}

std::string format_date(year_month_day d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", int(d.year()), unsigned(d.month()),
                unsigned(d.day()));
  return buf;
}

}  // namespace traceview
