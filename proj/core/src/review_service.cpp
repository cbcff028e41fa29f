#include "botscan/review_service.hpp"

#include <algorithm>

#include <httplib.h>

#include "botscan/corpus.hpp"
#include "botscan/error.hpp"

namespace botscan {

ReviewStore::ReviewStore(std::filesystem::path predictions_csv,
                         std::optional<std::filesystem::path> activity_csv)
    : path_(std::move(predictions_csv)),
      snapshot_(std::make_shared<const Records>(load_predictions(path_))) {
  if (!activity_csv) return;
  const auto profiles =
      build_profiles(read_activity_csv(*activity_csv), FetchWindow::unbounded(), kSampleCommentCount);
  for (const auto& p : profiles) samples_[{p.repo, p.login}] = p.comments;
}

std::shared_ptr<const Records> ReviewStore::snapshot() const {
  std::lock_guard lock(snapshot_mutex_);
  return snapshot_;
}

PredictionRecord ReviewStore::apply(const RepoRef& repo, std::string_view login,
                                    OverrideAction action) {
  std::lock_guard writer(writer_mutex_);
  auto updated = std::make_shared<const Records>(apply_override(*snapshot(), repo, login, action));
  persist_predictions(*updated, path_);
  {
    std::lock_guard lock(snapshot_mutex_);
    snapshot_ = updated;
  }
  return *std::find_if(updated->begin(), updated->end(), [&](const PredictionRecord& r) {
    return r.repo == repo && r.login == login;
  });
}

std::vector<std::string> ReviewStore::samples(const RepoRef& repo, const std::string& login) const {
  auto it = samples_.find({repo, login});
  return it == samples_.end() ? std::vector<std::string>{} : it->second;
}

namespace {

ApiResponse error_response(int status, const std::string& message) {
  return {status, {{"error", message}}};
}

}  // namespace

ApiResponse ReviewService::get_summaries() const {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& s : summarize(*store_.snapshot())) doc.push_back(summary_to_json(s));
  return {200, std::move(doc)};
}

ApiResponse ReviewService::get_contributors(const std::string& owner, const std::string& name,
                                            const std::optional<std::string>& type,
                                            const std::optional<std::string>& sort) const {
  std::optional<Label> wanted;
  if (type && !type->empty() && *type != "all") {
    wanted = parse_label(*type);
    if (!wanted) return error_response(422, "type must be all, bot, human or unknown");
  }
  const std::string order = sort && !sort->empty() ? *sort : "login";
  if (order != "login" && order != "confidence") {
    return error_response(422, "sort must be login or confidence");
  }

  const auto records = store_.snapshot();
  const RepoRef repo{owner, name};
  std::vector<const PredictionRecord*> rows;
  bool repo_known = false;
  for (const auto& r : *records) {
    if (r.repo != repo) continue;
    repo_known = true;
    if (!wanted || r.effective == *wanted) rows.push_back(&r);
  }
  if (!repo_known) return error_response(404, "unknown repository " + repo.str());

  std::sort(rows.begin(), rows.end(), [&](const PredictionRecord* a, const PredictionRecord* b) {
    if (order == "confidence" && a->confidence != b->confidence) {
      return a->confidence > b->confidence;
    }
    return a->login < b->login;
  });

  nlohmann::json doc = nlohmann::json::array();
  for (const auto* r : rows) {
    auto item = record_to_json(*r);
    item["samples"] = store_.samples(r->repo, r->login);
    doc.push_back(std::move(item));
  }
  return {200, std::move(doc)};
}

ApiResponse ReviewService::post_override(std::string_view body) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error&) {
    return error_response(400, "request body is not JSON");
  }
  if (!doc.is_object()) return error_response(422, "request body must be an object");
  for (const char* key : {"repository", "login", "type"}) {
    if (!doc.contains(key) || !doc[key].is_string()) {
      return error_response(422, std::string("'") + key + "' must be a string");
    }
  }
  RepoRef repo;
  try {
    repo = RepoRef::parse(doc["repository"].get<std::string>());
  } catch (const Error& e) {
    return error_response(422, e.what());
  }
  const auto action = parse_override_action(doc["type"].get<std::string>());
  if (!action) return error_response(422, "type must be bot, human or clear");
  try {
    return {200, record_to_json(store_.apply(repo, doc["login"].get<std::string>(), *action))};
  } catch (const Error& e) {
    if (e.code() == ErrorCode::not_found) return error_response(404, e.what());
    return error_response(500, e.what());
  }
}

struct ReviewServer::Impl {
  httplib::Server server;
};

ReviewServer::ReviewServer(ReviewService& service, std::optional<std::filesystem::path> ui_dir)
    : impl_(std::make_unique<Impl>()) {
  auto& server = impl_->server;
  const auto reply = [](httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    res.set_content(api.body.dump(), "application/json");
  };
  const auto query = [](const httplib::Request& req, const char* key) -> std::optional<std::string> {
    if (!req.has_param(key)) return std::nullopt;
    return req.get_param_value(key);
  };

  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(/api/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.status = 204;
  });
  server.Get("/api/repos", [&service, reply](const httplib::Request&, httplib::Response& res) {
    reply(res, service.get_summaries());
  });
  server.Get(R"(/api/repos/([^/]+)/([^/]+)/contributors)",
             [&service, reply, query](const httplib::Request& req, httplib::Response& res) {
               reply(res, service.get_contributors(req.matches[1], req.matches[2],
                                                   query(req, "type"), query(req, "sort")));
             });
  server.Post("/api/overrides", [&service, reply](const httplib::Request& req, httplib::Response& res) {
    reply(res, service.post_override(req.body));
  });
  if (ui_dir && !server.set_mount_point("/", ui_dir->string())) {
    throw Error(ErrorCode::io, "ui directory '" + ui_dir->string() + "' does not exist");
  }
}

ReviewServer::~ReviewServer() { stop(); }

int ReviewServer::bind(const std::string& host, int port) {
  auto& server = impl_->server;
  const int bound = port == 0 ? server.bind_to_any_port(host) : (server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) {
    throw Error(ErrorCode::io, "cannot bind " + host + ":" + std::to_string(port));
  }
  return bound;
}

void ReviewServer::listen() { impl_->server.listen_after_bind(); }

void ReviewServer::stop() {
  if (impl_) impl_->server.stop();
}

void ReviewServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

}  // namespace botscan
