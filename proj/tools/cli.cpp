#include "cli.hpp"

#include <algorithm>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "botscan/atomic_file.hpp"
#include "botscan/classifier.hpp"
#include "botscan/corpus.hpp"
#include "botscan/csv.hpp"
#include "botscan/error.hpp"
#include "botscan/github_fetcher.hpp"
#include "botscan/pipeline.hpp"
#include "botscan/review_service.hpp"
#include "botscan/store.hpp"

namespace botscan::cli {

namespace {

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return kUsageError;
    case ErrorCode::credential: return kEnvironmentError;
    case ErrorCode::io:
    case ErrorCode::parse:
    case ErrorCode::data: return kDataError;
    case ErrorCode::not_found:
    case ErrorCode::rate_limited:
    case ErrorCode::network:
    case ErrorCode::malformed_response: return kNetworkError;
  }
  return kDataError;
}

struct FetchArgs {
  std::string repo;
  std::string token_env;
  std::string since;
  std::string until;
  std::string kinds = "issues,prs";
  std::string base_url;
  std::string cache_dir;
  std::string out;
  bool no_review_comments = false;
  std::size_t per_page = 100;
};

struct PredictArgs {
  std::string in;
  std::string model = "default";
  double eps = kDefaultEps;
  std::size_t min_comments = kDefaultMinComments;
  std::size_t cap = kDefaultCommentCap;
  std::string since;
  std::string until;
  unsigned threads = 0;
  std::string out;
};

struct TrainArgs {
  std::string features;
  std::string labels;
  std::size_t max_depth = 4;
  std::size_t min_leaf = 2;
  std::string out;
};

struct ReportArgs {
  std::string in;
  std::string format = "table";
  std::string index = "botscan-predictions";
  std::string aliases;
  std::string out;
};

struct OverrideArgs {
  std::string in;
  std::string repo;
  std::string login;
  std::string set;
  std::string overrides;
  std::string out;
};

struct ServeArgs {
  std::string in;
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string ui_dir;
  std::string activity;
};

std::set<ActivityKind> parse_kinds(const std::string& text) {
  std::set<ActivityKind> kinds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "issues" || item == "issue") {
      kinds.insert(ActivityKind::issue);
    } else if (item == "prs" || item == "pr" || item == "pull_request") {
      kinds.insert(ActivityKind::pull_request);
    } else {
      throw Error(ErrorCode::invalid_argument, "unknown kind '" + item + "', expected issues or prs");
    }
  }
  if (kinds.empty()) throw Error(ErrorCode::invalid_argument, "--kinds must not be empty");
  return kinds;
}

Timestamp timestamp_flag(const std::string& flag, const std::string& value) {
  if (auto ts = parse_timestamp(value)) return *ts;
  throw Error(ErrorCode::invalid_argument, flag + ": cannot parse timestamp '" + value + "'");
}

int do_fetch(const FetchArgs& a, const Environment& env, std::ostream& err) {
  FetchRequest request;
  request.repo = RepoRef::parse(a.repo);
  request.window = FetchWindow{timestamp_flag("--since", a.since), timestamp_flag("--until", a.until)};
  request.kinds = parse_kinds(a.kinds);
  request.include_review_comments = !a.no_review_comments;
  request.per_page = a.per_page;
  if (!a.cache_dir.empty()) request.cache_dir = a.cache_dir;
  if (!a.base_url.empty()) {
    request.base_url = a.base_url;
  } else if (auto it = env.find(kBaseUrlEnv); it != env.end() && !it->second.empty()) {
    request.base_url = it->second;
  }

  auto token = env.find(a.token_env);
  if (token == env.end() || token->second.empty()) {
    err << "botscan fetch: environment variable " << a.token_env << " is not set\n";
    return kEnvironmentError;
  }
  request.token = token->second;

  HttplibTransport transport;
  SystemClock clock;
  FetchStats stats;
  const auto records = GithubFetcher(transport, clock).fetch_comments(request, &stats);
  write_activity_csv(records, a.out);
  err << "fetched " << records.size() << " comments from " << request.repo.str() << " ("
      << stats.network_requests << " requests, " << stats.cache_hits << " cached)\n";
  return kSuccess;
}

int do_predict(const PredictArgs& a, std::ostream& err) {
  if (!(a.eps > 0.0 && a.eps <= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "--eps must lie in (0, 1]");
  }
  if (a.cap == 0) throw Error(ErrorCode::invalid_argument, "--cap must be at least 1");
  const auto activity = read_activity_csv(a.in);
  const TrainedModel model = a.model == "default" ? default_model() : load_model(a.model);

  auto window = FetchWindow::unbounded();
  if (!a.since.empty() || !a.until.empty()) {
    window = FetchWindow{a.since.empty() ? window.since : timestamp_flag("--since", a.since),
                         a.until.empty() ? window.until : timestamp_flag("--until", a.until)};
  }
  PredictOptions options;
  options.eps = a.eps;
  options.min_comments = a.min_comments;
  options.cap = a.cap;
  options.threads = a.threads;
  const auto records = predict_contributors(activity, window, model, options);
  persist_predictions(records, a.out);

  const auto bots = std::count_if(records.begin(), records.end(),
                                  [](const PredictionRecord& r) { return r.predicted == Label::bot; });
  err << "classified " << records.size() << " contributors, " << bots << " predicted bot\n";
  return kSuccess;
}

int do_train(const TrainArgs& a, std::ostream& err) {
  const auto features = load_predictions(a.features);
  const auto rows = csv::parse(read_file(a.labels), a.labels);
  csv::expect_header(rows, {"repository", "login", "label"}, a.labels);

  std::map<std::pair<std::string, std::string>, const PredictionRecord*> by_key;
  for (const auto& r : features) by_key[{r.repo.str(), r.login}] = &r;

  std::vector<LabeledSample> dataset;
  std::size_t unmatched = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const auto where = a.labels + ":" + std::to_string(row.line) + ": ";
    if (row.fields.size() != 3) {
      throw Error(ErrorCode::parse, where + "expected 3 fields, got " + std::to_string(row.fields.size()));
    }
    const auto label = parse_label(row.fields[2]);
    if (!label || *label == Label::unknown) {
      throw Error(ErrorCode::parse, where + "label must be bot or human, got '" + row.fields[2] + "'");
    }
    auto it = by_key.find({row.fields[0], row.fields[1]});
    if (it == by_key.end()) {
      ++unmatched;
      continue;
    }
    dataset.push_back({it->second->features, *label});
  }
  if (unmatched) err << "skipped " << unmatched << " labels without a matching feature row\n";

  TrainParams params;
  params.max_depth = a.max_depth;
  params.min_leaf = a.min_leaf;
  const auto model = train_tree(dataset, params);
  save_model(model, a.out);
  err << "trained tree on " << dataset.size() << " samples: depth " << model.depth() << ", "
      << model.leaf_count() << " leaves\n";
  return kSuccess;
}

int do_report(const ReportArgs& a, std::ostream& out) {
  auto records = load_predictions(a.in);
  if (!a.aliases.empty()) records = merge_identities(records, load_alias_map(a.aliases));

  std::string text;
  if (a.format == "ndjson") {
    SystemClock clock;
    text = export_bulk_ndjson(records, a.index, clock.now());
  } else {
    text = render_report(summarize(records),
                         a.format == "json" ? ReportFormat::json : ReportFormat::table);
  }
  if (a.out.empty()) {
    out << text;
  } else {
    write_file_atomic(a.out, text);
  }
  return kSuccess;
}

int do_override(const OverrideArgs& a, std::ostream& err) {
  const bool single = !a.repo.empty() || !a.login.empty() || !a.set.empty();
  if (single == !a.overrides.empty()) {
    throw Error(ErrorCode::invalid_argument,
                "give either --repo, --login and --set, or --overrides FILE");
  }
  auto records = load_predictions(a.in);
  std::vector<OverrideEntry> entries;
  if (single) {
    if (a.repo.empty() || a.login.empty() || a.set.empty()) {
      throw Error(ErrorCode::invalid_argument, "--repo, --login and --set are all required");
    }
    auto action = parse_override_action(a.set);
    if (!action) throw Error(ErrorCode::invalid_argument, "--set must be bot, human or clear");
    entries.push_back({RepoRef::parse(a.repo), a.login, *action});
  } else {
    entries = load_overrides(a.overrides);
  }
  for (const auto& e : entries) {
    try {
      records = apply_override(records, e.repo, e.login, e.action);
    } catch (const Error& ex) {
      if (ex.code() == ErrorCode::not_found) throw Error(ErrorCode::data, ex.what());
      throw;
    }
  }
  persist_predictions(records, a.out);
  err << "applied " << entries.size() << " override(s)\n";
  return kSuccess;
}

int do_serve(const ServeArgs& a, std::ostream& out) {
  std::optional<std::filesystem::path> activity;
  if (!a.activity.empty()) activity = a.activity;
  std::optional<std::filesystem::path> ui_dir;
  if (!a.ui_dir.empty()) ui_dir = a.ui_dir;

  ReviewStore store(a.in, activity);
  ReviewService service(store);
  ReviewServer server(service, ui_dir);
  const int port = server.bind(a.host, a.port);
  out << "serving " << a.in << " on http://" << a.host << ":" << port << std::endl;
  server.listen();
  return kSuccess;
}

}  // namespace

int run(const std::vector<std::string>& args, const Environment& env, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Bot detection over GitHub issue and pull-request comments", "botscan"};
  app.require_subcommand(1);
  app.failure_message(CLI::FailureMessage::help);

  FetchArgs fetch;
  auto* fetch_cmd = app.add_subcommand("fetch", "Retrieve issue/PR comments into an activity CSV");
  fetch_cmd->add_option("--repo", fetch.repo, "Repository as OWNER/NAME")->required();
  fetch_cmd->add_option("--token-env", fetch.token_env, "Environment variable holding the API token")
      ->required();
  fetch_cmd->add_option("--since", fetch.since, "Window start (inclusive), ISO-8601 UTC")->required();
  fetch_cmd->add_option("--until", fetch.until, "Window end (exclusive), ISO-8601 UTC")->required();
  fetch_cmd->add_option("--kinds", fetch.kinds, "Comma-separated kinds: issues,prs")
      ->capture_default_str();
  fetch_cmd->add_option("--base-url", fetch.base_url,
                        std::string("API base URL (default: $") + kBaseUrlEnv + " or " +
                            std::string(kDefaultGithubApiUrl) + ")");
  fetch_cmd->add_option("--cache", fetch.cache_dir, "Response cache directory");
  fetch_cmd->add_option("--per-page", fetch.per_page, "Page size (1-100)")->capture_default_str();
  fetch_cmd->add_flag("--no-review-comments", fetch.no_review_comments,
                      "Skip inline pull-request review comments");
  fetch_cmd->add_option("--out", fetch.out, "Output activity CSV")->required();

  PredictArgs predict_args;
  auto* predict_cmd = app.add_subcommand("predict", "Classify contributors of an activity CSV");
  predict_cmd->add_option("--in", predict_args.in, "Input activity CSV")->required();
  predict_cmd->add_option("--model", predict_args.model, "'default' or a model JSON file")
      ->capture_default_str();
  predict_cmd->add_option("--eps", predict_args.eps, "Pattern distance threshold in (0,1]")
      ->capture_default_str();
  predict_cmd->add_option("--min-comments", predict_args.min_comments,
                          "Contributors with fewer comments are labeled unknown")
      ->capture_default_str();
  predict_cmd->add_option("--cap", predict_args.cap, "Most recent comments kept per contributor")
      ->capture_default_str();
  predict_cmd->add_option("--since", predict_args.since, "Only use comments at or after this time");
  predict_cmd->add_option("--until", predict_args.until, "Only use comments before this time");
  predict_cmd->add_option("--threads", predict_args.threads, "Worker threads (0 = all cores)")
      ->capture_default_str();
  predict_cmd->add_option("--out", predict_args.out, "Output predictions CSV")->required();

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Fit a decision tree from labeled contributors");
  train_cmd->add_option("--features", train.features, "Predictions CSV providing feature columns")
      ->required();
  train_cmd->add_option("--labels", train.labels, "CSV with header repository,login,label")->required();
  train_cmd->add_option("--max-depth", train.max_depth, "Maximum tree depth")->capture_default_str();
  train_cmd->add_option("--min-leaf", train.min_leaf, "Minimum samples per leaf")->capture_default_str();
  train_cmd->add_option("--out", train.out, "Output model JSON")->required();

  ReportArgs report;
  auto* report_cmd = app.add_subcommand("report", "Summarize or export a predictions CSV");
  report_cmd->add_option("--in", report.in, "Predictions CSV")->required();
  report_cmd->add_option("--format", report.format, "table, json or ndjson")
      ->check(CLI::IsMember({"table", "json", "ndjson"}))
      ->capture_default_str();
  report_cmd->add_option("--index", report.index, "Index name for ndjson output")
      ->capture_default_str();
  report_cmd->add_option("--aliases", report.aliases, "Alias map file (canonical: alias, ...)");
  report_cmd->add_option("--out", report.out, "Write to a file instead of stdout");

  OverrideArgs ov;
  auto* override_cmd = app.add_subcommand("override", "Rectify predicted contributor types");
  override_cmd->add_option("--in", ov.in, "Predictions CSV")->required();
  override_cmd->add_option("--repo", ov.repo, "Repository as OWNER/NAME");
  override_cmd->add_option("--login", ov.login, "Contributor login");
  override_cmd->add_option("--set", ov.set, "bot, human or clear")
      ->check(CLI::IsMember({"bot", "human", "clear"}));
  override_cmd->add_option("--overrides", ov.overrides, "CSV with header repository,login,override");
  override_cmd->add_option("--out", ov.out, "Output predictions CSV")->required();

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the review API and dashboard");
  serve_cmd->add_option("--in", serve.in, "Predictions CSV (overrides are written back)")->required();
  serve_cmd->add_option("--port", serve.port, "TCP port")->required();
  serve_cmd->add_option("--host", serve.host, "Bind address")->capture_default_str();
  serve_cmd->add_option("--ui-dir", serve.ui_dir, "Static dashboard directory");
  serve_cmd->add_option("--activity", serve.activity, "Activity CSV for sample comments");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsageError;
  }

  try {
    if (*fetch_cmd) return do_fetch(fetch, env, err);
    if (*predict_cmd) return do_predict(predict_args, err);
    if (*train_cmd) return do_train(train, err);
    if (*report_cmd) return do_report(report, out);
    if (*override_cmd) return do_override(ov, err);
    if (*serve_cmd) return do_serve(serve, out);
  } catch (const Error& e) {
    err << "botscan: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "botscan: " << e.what() << "\n";
    return kDataError;
  }
  return kUsageError;
}

}  // namespace botscan::cli
