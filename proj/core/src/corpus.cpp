#include "botscan/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <utility>

#include "botscan/atomic_file.hpp"
#include "botscan/csv.hpp"
#include "botscan/error.hpp"

namespace botscan {

namespace {

const std::vector<std::string>& activity_header() {
  static const std::vector<std::string> header{"repository", "activity_type", "number",
                                               "author",     "created_at",    "body"};
  return header;
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

}  // namespace

std::string render_activity_csv(const std::vector<ActivityComment>& records) {
  std::string out;
  csv::append_row(out, activity_header());
  for (const auto& r : records) {
    csv::append_row(out, {r.repo.str(), std::string(to_string(r.kind)), std::to_string(r.number),
                          r.author, format_timestamp(r.created_at), r.body});
  }
  return out;
}

void write_activity_csv(const std::vector<ActivityComment>& records,
                        const std::filesystem::path& destination) {
  write_file_atomic(destination, render_activity_csv(records));
}

std::vector<ActivityComment> parse_activity_csv(std::string_view text, std::string_view source) {
  const auto rows = csv::parse(text, source);
  csv::expect_header(rows, activity_header(), source);

  std::vector<ActivityComment> records;
  records.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const auto fail = [&](const std::string& what) {
      throw Error(ErrorCode::parse,
                  std::string(source) + ":" + std::to_string(row.line) + ": " + what);
    };
    if (row.fields.size() != 6) {
      fail("expected 6 fields, got " + std::to_string(row.fields.size()));
    }
    ActivityComment rec;
    try {
      rec.repo = RepoRef::parse(row.fields[0]);
    } catch (const Error& e) {
      fail(e.what());
    }
    auto kind = parse_activity_kind(row.fields[1]);
    if (!kind) fail("unknown activity_type '" + row.fields[1] + "'");
    rec.kind = *kind;
    const auto& num = row.fields[2];
    auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), rec.number);
    if (ec != std::errc{} || ptr != num.data() + num.size() || rec.number <= 0) {
      fail("invalid number '" + num + "'");
    }
    rec.author = row.fields[3];
    if (rec.author.empty()) fail("empty author");
    auto ts = parse_timestamp(row.fields[4]);
    if (!ts) fail("unparseable created_at '" + row.fields[4] + "'");
    rec.created_at = *ts;
    rec.body = row.fields[5];
    rec.comment_id = static_cast<std::int64_t>(i);
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<ActivityComment> read_activity_csv(const std::filesystem::path& source) {
  return parse_activity_csv(read_file(source), source.string());
}

std::string normalize_comment(std::string_view body) {
  std::string out;
  out.reserve(body.size());
  bool pending_space = false;
  for (char c : body) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  }
  return out;
}

std::vector<ContributorProfile> build_profiles(const std::vector<ActivityComment>& records,
                                               const FetchWindow& window, std::size_t cap) {
  if (cap == 0) throw Error(ErrorCode::invalid_argument, "comment cap must be at least 1");

  std::map<std::pair<RepoRef, std::string>, std::vector<const ActivityComment*>> groups;
  for (const auto& r : records) {
    if (window.contains(r.created_at)) groups[{r.repo, r.author}].push_back(&r);
  }

  std::vector<ContributorProfile> profiles;
  profiles.reserve(groups.size());
  for (auto& [key, items] : groups) {
    std::sort(items.begin(), items.end(), [](const ActivityComment* a, const ActivityComment* b) {
      if (a->created_at != b->created_at) return a->created_at > b->created_at;
      return a->comment_id > b->comment_id;
    });
    ContributorProfile p{key.first, key.second, {}, items.size()};
    const auto kept = std::min(cap, items.size());
    p.comments.reserve(kept);
    for (std::size_t i = 0; i < kept; ++i) p.comments.push_back(normalize_comment(items[i]->body));
    profiles.push_back(std::move(p));
  }
  return profiles;
}

}  // namespace botscan
