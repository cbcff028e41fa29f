#include "botscan/types.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>

#include "botscan/error.hpp"

namespace botscan {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::credential: return "credential error";
    case ErrorCode::not_found: return "not found";
    case ErrorCode::rate_limited: return "rate limit exhausted";
    case ErrorCode::network: return "network error";
    case ErrorCode::malformed_response: return "malformed response";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::parse: return "parse error";
    case ErrorCode::data: return "data error";
  }
  return "unknown error";
}

namespace {

bool read_int(std::string_view text, std::size_t pos, std::size_t width, int& out) {
  if (pos + width > text.size()) return false;
  for (std::size_t i = pos; i < pos + width; ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
  }
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + pos + width, out);
  return ec == std::errc{} && ptr == text.data() + pos + width;
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
  using namespace std::chrono;
  int y = 0, mo = 0, d = 0, h = 0, mi = 0, s = 0;
  if (!read_int(text, 0, 4, y) || text.size() < 10 || text[4] != '-' ||
      !read_int(text, 5, 2, mo) || text[7] != '-' || !read_int(text, 8, 2, d)) {
    return std::nullopt;
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;

  std::size_t pos = 10;
  seconds offset{0};
  if (pos < text.size()) {
    if (text[pos] != 'T' && text[pos] != 't' && text[pos] != ' ') return std::nullopt;
    if (!read_int(text, pos + 1, 2, h) || text.size() < pos + 9 || text[pos + 3] != ':' ||
        !read_int(text, pos + 4, 2, mi) || text[pos + 6] != ':' ||
        !read_int(text, pos + 7, 2, s)) {
      return std::nullopt;
    }
    if (h > 23 || mi > 59 || s > 60) return std::nullopt;
    pos += 9;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      std::size_t digits = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        ++pos;
        ++digits;
      }
      if (digits == 0) return std::nullopt;
    }
    if (pos < text.size()) {
      char sign = text[pos];
      if (sign == 'Z' || sign == 'z') {
        ++pos;
      } else if (sign == '+' || sign == '-') {
        int oh = 0, om = 0;
        if (!read_int(text, pos + 1, 2, oh) || text.size() < pos + 6 || text[pos + 3] != ':' ||
            !read_int(text, pos + 4, 2, om) || oh > 23 || om > 59) {
          return std::nullopt;
        }
        offset = hours{oh} + minutes{om};
        if (sign == '-') offset = -offset;
        pos += 6;
      } else {
        return std::nullopt;
      }
    }
    if (pos != text.size()) return std::nullopt;
  }
  return Timestamp{sys_days{ymd}} + hours{h} + minutes{mi} + seconds{s} - offset;
}

Timestamp parse_timestamp_or_throw(std::string_view text) {
  if (auto ts = parse_timestamp(text)) return *ts;
  throw Error(ErrorCode::parse, "unparseable timestamp '" + std::string(text) + "'");
}

std::string format_timestamp(Timestamp ts) {
  using namespace std::chrono;
  const auto day_point = floor<days>(ts);
  const year_month_day ymd{day_point};
  const hh_mm_ss<seconds> tod{ts - day_point};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ",
                static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()), static_cast<long long>(tod.hours().count()),
                static_cast<long long>(tod.minutes().count()),
                static_cast<long long>(tod.seconds().count()));
  return buf;
}

RepoRef RepoRef::parse(std::string_view text) {
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    throw Error(ErrorCode::invalid_argument,
                "repository must be OWNER/NAME, got '" + std::string(text) + "'");
  }
  RepoRef ref{std::string(text.substr(0, slash)), std::string(text.substr(slash + 1))};
  if (ref.owner.empty() || ref.name.empty() || ref.name.find('/') != std::string::npos) {
    throw Error(ErrorCode::invalid_argument,
                "repository must be OWNER/NAME, got '" + std::string(text) + "'");
  }
  return ref;
}

FetchWindow::FetchWindow(Timestamp since_, Timestamp until_) : since(since_), until(until_) {
  if (!(since < until)) {
    throw Error(ErrorCode::invalid_argument,
                "window start " + format_timestamp(since) + " is not before end " +
                    format_timestamp(until));
  }
}

FetchWindow FetchWindow::unbounded() {
  using namespace std::chrono;
  return FetchWindow{Timestamp{sys_days{year{1970} / January / 1}},
                     Timestamp{sys_days{year{9999} / December / 31}}};
}

std::string_view to_string(ActivityKind kind) noexcept {
  return kind == ActivityKind::issue ? "issue" : "pull_request";
}

std::optional<ActivityKind> parse_activity_kind(std::string_view text) {
  if (text == "issue") return ActivityKind::issue;
  if (text == "pull_request") return ActivityKind::pull_request;
  return std::nullopt;
}

}  // namespace botscan
