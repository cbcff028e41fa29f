#include "botscan/store.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <unordered_map>

#include "botscan/atomic_file.hpp"
#include "botscan/csv.hpp"
#include "botscan/error.hpp"

namespace botscan {

namespace {

const std::vector<std::string>& predictions_header() {
  static const std::vector<std::string> header{
      "repository", "login",     "num_comments", "num_empty",  "num_patterns", "gini",
      "pattern_ratio", "predicted", "confidence", "override", "effective"};
  return header;
}

std::string fixed6(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

bool parse_size(const std::string& text, std::size_t& out) {
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc{} && ptr == text.data() + text.size() && !text.empty();
}

bool parse_real(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return end == text.c_str() + text.size() && std::isfinite(out);
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

Label effective_of(const PredictionRecord& r) { return r.override_label.value_or(r.predicted); }

}  // namespace

double quantize(double value) { return std::strtod(fixed6(value).c_str(), nullptr); }

nlohmann::json record_to_json(const PredictionRecord& r) {
  nlohmann::json doc = {
      {"repository", r.repo.str()},
      {"login", r.login},
      {"num_comments", r.features.num_comments},
      {"num_empty", r.features.num_empty},
      {"num_patterns", r.features.num_patterns},
      {"gini", r.features.gini},
      {"pattern_ratio", r.features.pattern_ratio},
      {"predicted", to_string(r.predicted)},
      {"confidence", r.confidence},
      {"override", nullptr},
      {"effective", to_string(r.effective)},
  };
  if (r.override_label) doc["override"] = to_string(*r.override_label);
  return doc;
}

nlohmann::json summary_to_json(const RepoSummary& s) {
  return {{"repository", s.repo.str()},
          {"total", s.total},
          {"bots", s.bots},
          {"humans", s.humans},
          {"unknowns", s.unknowns}};
}

std::string render_predictions_csv(const Records& records) {
  std::string out;
  csv::append_row(out, predictions_header());
  for (const auto& r : records) {
    csv::append_row(out, {r.repo.str(), r.login, std::to_string(r.features.num_comments),
                          std::to_string(r.features.num_empty),
                          std::to_string(r.features.num_patterns), fixed6(r.features.gini),
                          fixed6(r.features.pattern_ratio), std::string(to_string(r.predicted)),
                          fixed6(r.confidence),
                          r.override_label ? std::string(to_string(*r.override_label)) : "",
                          std::string(to_string(r.effective))});
  }
  return out;
}

Records parse_predictions_csv(std::string_view text, std::string_view source) {
  const auto rows = csv::parse(text, source);
  csv::expect_header(rows, predictions_header(), source);
  Records records;
  records.reserve(rows.size() - 1);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const auto& f = row.fields;
    const auto fail = [&](const std::string& what) {
      throw Error(ErrorCode::parse,
                  std::string(source) + ":" + std::to_string(row.line) + ": " + what);
    };
    if (f.size() != 11) fail("expected 11 fields, got " + std::to_string(f.size()));
    PredictionRecord r;
    try {
      r.repo = RepoRef::parse(f[0]);
    } catch (const Error& e) {
      fail(e.what());
    }
    r.login = f[1];
    if (r.login.empty()) fail("empty login");
    if (!parse_size(f[2], r.features.num_comments)) fail("invalid num_comments '" + f[2] + "'");
    if (!parse_size(f[3], r.features.num_empty)) fail("invalid num_empty '" + f[3] + "'");
    if (!parse_size(f[4], r.features.num_patterns)) fail("invalid num_patterns '" + f[4] + "'");
    if (!parse_real(f[5], r.features.gini)) fail("invalid gini '" + f[5] + "'");
    if (!parse_real(f[6], r.features.pattern_ratio)) fail("invalid pattern_ratio '" + f[6] + "'");
    auto predicted = parse_label(f[7]);
    if (!predicted) fail("invalid predicted '" + f[7] + "'");
    r.predicted = *predicted;
    if (!parse_real(f[8], r.confidence) || r.confidence < 0 || r.confidence > 1) {
      fail("invalid confidence '" + f[8] + "'");
    }
    if (!f[9].empty()) {
      auto ov = parse_label(f[9]);
      if (!ov || *ov == Label::unknown) fail("invalid override '" + f[9] + "'");
      r.override_label = *ov;
    }
    auto effective = parse_label(f[10]);
    if (!effective) fail("invalid effective '" + f[10] + "'");
    r.effective = *effective;
    if (r.effective != effective_of(r)) {
      fail("effective '" + f[10] + "' disagrees with predicted/override columns");
    }
    records.push_back(std::move(r));
  }
  return records;
}

void persist_predictions(const Records& records, const std::filesystem::path& path) {
  write_file_atomic(path, render_predictions_csv(records));
}

Records load_predictions(const std::filesystem::path& path) {
  return parse_predictions_csv(read_file(path), path.string());
}

std::optional<OverrideAction> parse_override_action(std::string_view text) {
  if (text == "bot") return OverrideAction::bot;
  if (text == "human") return OverrideAction::human;
  if (text == "clear") return OverrideAction::clear;
  return std::nullopt;
}

std::string_view to_string(OverrideAction action) noexcept {
  switch (action) {
    case OverrideAction::bot: return "bot";
    case OverrideAction::human: return "human";
    case OverrideAction::clear: return "clear";
  }
  return "clear";
}

Records apply_override(const Records& records, const RepoRef& repo, std::string_view login,
                       OverrideAction action) {
  auto it = std::find_if(records.begin(), records.end(), [&](const PredictionRecord& r) {
    return r.repo == repo && r.login == login;
  });
  if (it == records.end()) {
    throw Error(ErrorCode::not_found,
                "no prediction for '" + std::string(login) + "' in " + repo.str());
  }
  Records out = records;
  auto& target = out[static_cast<std::size_t>(it - records.begin())];
  switch (action) {
    case OverrideAction::bot: target.override_label = Label::bot; break;
    case OverrideAction::human: target.override_label = Label::human; break;
    case OverrideAction::clear: target.override_label.reset(); break;
  }
  target.effective = effective_of(target);
  return out;
}

std::vector<OverrideEntry> parse_overrides_csv(std::string_view text, std::string_view source) {
  static const std::vector<std::string> header{"repository", "login", "override"};
  const auto rows = csv::parse(text, source);
  csv::expect_header(rows, header, source);
  std::vector<OverrideEntry> entries;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const auto fail = [&](const std::string& what) {
      throw Error(ErrorCode::parse,
                  std::string(source) + ":" + std::to_string(row.line) + ": " + what);
    };
    if (row.fields.size() != 3) fail("expected 3 fields, got " + std::to_string(row.fields.size()));
    OverrideEntry e;
    try {
      e.repo = RepoRef::parse(row.fields[0]);
    } catch (const Error& err) {
      fail(err.what());
    }
    e.login = row.fields[1];
    if (e.login.empty()) fail("empty login");
    auto action = parse_override_action(row.fields[2]);
    if (!action) fail("override must be bot, human or clear, got '" + row.fields[2] + "'");
    e.action = *action;
    entries.push_back(std::move(e));
  }
  return entries;
}

std::vector<OverrideEntry> load_overrides(const std::filesystem::path& path) {
  return parse_overrides_csv(read_file(path), path.string());
}

AliasMap parse_alias_map(std::string_view text, std::string_view source) {
  AliasMap map;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;

    const auto fail = [&](const std::string& what) {
      throw Error(ErrorCode::parse,
                  std::string(source) + ":" + std::to_string(line_no) + ": " + what);
    };
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) fail("expected 'canonical: alias, ...'");
    const std::string canonical(trim(line.substr(0, colon)));
    if (canonical.empty()) fail("empty canonical login");
    auto& group = map[canonical];
    std::string_view rest = line.substr(colon + 1);
    while (true) {
      const auto comma = rest.find(',');
      const auto alias = trim(rest.substr(0, comma));
      if (!alias.empty() && alias != canonical) group.emplace(alias);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  return map;
}

AliasMap load_alias_map(const std::filesystem::path& path) {
  return parse_alias_map(read_file(path), path.string());
}

Records merge_identities(const Records& records, const AliasMap& aliases) {
  std::unordered_map<std::string, std::string> canonical_of;
  for (const auto& [canonical, group] : aliases) {
    for (const auto& alias : group) {
      if (aliases.count(alias)) {
        throw Error(ErrorCode::invalid_argument,
                    "alias '" + alias + "' is also a canonical login");
      }
      auto [it, inserted] = canonical_of.emplace(alias, canonical);
      if (!inserted && it->second != canonical) {
        throw Error(ErrorCode::invalid_argument, "alias '" + alias + "' belongs to both '" +
                                                     it->second + "' and '" + canonical + "'");
      }
    }
    canonical_of.emplace(canonical, canonical);
  }
  if (canonical_of.empty()) return records;

  // Group constituents per (repo, canonical) in first-appearance order.
  std::map<std::pair<RepoRef, std::string>, std::vector<std::size_t>> groups;
  std::vector<std::pair<RepoRef, std::string>> order;
  std::vector<std::optional<std::pair<RepoRef, std::string>>> key_of(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    auto it = canonical_of.find(records[i].login);
    if (it == canonical_of.end()) continue;
    std::pair<RepoRef, std::string> key{records[i].repo, it->second};
    auto& members = groups[key];
    if (members.empty()) order.push_back(key);
    members.push_back(i);
    key_of[i] = key;
  }

  const auto merge = [&](const std::vector<std::size_t>& members, const std::string& canonical) {
    PredictionRecord merged;
    merged.repo = records[members.front()].repo;
    merged.login = canonical;
    const PredictionRecord* busiest = nullptr;
    bool any_override = false;
    const auto any_label = [&](Label PredictionRecord::*field, Label wanted) {
      return std::any_of(members.begin(), members.end(),
                         [&](std::size_t i) { return records[i].*field == wanted; });
    };
    for (auto i : members) {
      const auto& r = records[i];
      merged.features.num_comments += r.features.num_comments;
      merged.features.num_empty += r.features.num_empty;
      merged.features.num_patterns += r.features.num_patterns;
      if (!busiest || r.features.num_comments > busiest->features.num_comments) busiest = &r;
      any_override = any_override || r.override_label.has_value();
    }
    merged.features.gini = busiest->features.gini;
    merged.features.pattern_ratio = busiest->features.pattern_ratio;

    const auto fold = [&](Label PredictionRecord::*field) {
      if (any_label(field, Label::bot)) return Label::bot;
      if (any_label(field, Label::human)) return Label::human;
      return Label::unknown;
    };
    merged.predicted = fold(&PredictionRecord::predicted);
    merged.effective = fold(&PredictionRecord::effective);
    if (any_override) merged.override_label = merged.effective;
    merged.effective = effective_of(merged);

    for (auto i : members) {
      if (records[i].effective == merged.effective) {
        merged.confidence = std::max(merged.confidence, records[i].confidence);
      }
    }
    // An override can carry the merged label while every matching constituent
    // is unknown; fall back to the predicted label's confidence then.
    if (merged.predicted != Label::unknown && merged.confidence == 0.0) {
      for (auto i : members) {
        if (records[i].predicted == merged.predicted) {
          merged.confidence = std::max(merged.confidence, records[i].confidence);
        }
      }
    }
    if (merged.predicted == Label::unknown) merged.confidence = 0.0;
    return merged;
  };

  Records out;
  out.reserve(records.size());
  std::set<std::pair<RepoRef, std::string>> emitted;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!key_of[i]) {
      out.push_back(records[i]);
      continue;
    }
    const auto& key = *key_of[i];
    if (!emitted.insert(key).second) continue;
    out.push_back(merge(groups.at(key), key.second));
  }
  return out;
}

std::vector<RepoSummary> summarize(const Records& records) {
  std::map<std::string, RepoSummary> by_repo;
  for (const auto& r : records) {
    auto& s = by_repo[r.repo.str()];
    s.repo = r.repo;
    ++s.total;
    switch (r.effective) {
      case Label::bot: ++s.bots; break;
      case Label::human: ++s.humans; break;
      case Label::unknown: ++s.unknowns; break;
    }
  }
  std::vector<RepoSummary> out;
  out.reserve(by_repo.size());
  for (auto& [_, s] : by_repo) out.push_back(std::move(s));
  return out;
}

std::string export_bulk_ndjson(const Records& records, std::string_view index_name,
                               Timestamp generated_at) {
  if (index_name.empty()) throw Error(ErrorCode::invalid_argument, "index name must not be empty");
  const std::string stamp = format_timestamp(generated_at);
  std::string out;
  for (const auto& r : records) {
    const nlohmann::json action = {
        {"index", {{"_index", index_name}, {"_id", r.repo.str() + "#" + r.login}}}};
    nlohmann::json source = record_to_json(r);
    source["generated_at"] = stamp;
    out += action.dump();
    out += '\n';
    out += source.dump();
    out += '\n';
  }
  return out;
}

std::string render_report(const std::vector<RepoSummary>& summaries, ReportFormat format) {
  if (format == ReportFormat::json) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& s : summaries) doc.push_back(summary_to_json(s));
    return doc.dump(2) + "\n";
  }
  if (summaries.empty()) return "no predictions\n";
  std::string out = "repository  total  bots  humans  unknowns\n";
  for (const auto& s : summaries) {
    out += s.repo.str() + "  " + std::to_string(s.total) + "  " + std::to_string(s.bots) + "  " +
           std::to_string(s.humans) + "  " + std::to_string(s.unknowns) + "\n";
  }
  return out;
}

}  // namespace botscan
