#include "evoml/service.hpp"

#include <condition_variable>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <httplib.h>

#include "evoml/error.hpp"
#include "evoml/random.hpp"

namespace evoml {

struct SessionService::Slot {
  explicit Slot(Session s) : session(std::move(s)) {}

  mutable std::shared_mutex mutex;  // guards session
  Session session;
  mutable std::mutex status_mutex;  // guards status, orders mutations before session locks
  mutable std::condition_variable idle;
  JobStatus status;
  std::jthread job;
};

namespace {

std::string_view to_string(JobState s) {
  switch (s) {
    case JobState::Idle: return "idle";
    case JobState::Running: return "running";
    case JobState::Failed: return "failed";
  }
  return "idle";
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::Conflict: return 409;
    case ErrorCode::NotFound:
    case ErrorCode::UnknownModelId: return 404;
    case ErrorCode::ParseError: return 400;
    case ErrorCode::Io: return 500;
    default: return 422;
  }
}

void send(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  send(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

// Runs a handler body and maps library errors onto HTTP statuses.
template <class F>
void guarded(httplib::Response& res, F&& body) {
  try {
    body();
  } catch (const Error& e) {
    send_error(res, http_status(e.code()), to_string(e.code()), e.what());
  } catch (const Json::exception& e) {
    send_error(res, 400, "ParseError", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "Internal", e.what());
  }
}

Json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    return Json::parse(req.body);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("request body is not valid JSON: ") + e.what());
  }
}

std::string new_token() {
  std::random_device rd;
  std::ostringstream out;
  out << std::hex;
  for (int i = 0; i < 4; ++i) out << std::setw(8) << std::setfill('0') << rd();
  return out.str();
}

std::vector<std::string> optional_ids(const Json& body, std::initializer_list<std::string_view> keys) {
  for (auto key : keys) {
    if (auto it = body.find(key); it != body.end()) return string_list(*it);
  }
  return {};
}

bool has_any(const Json& body, std::initializer_list<std::string_view> keys) {
  for (auto key : keys) {
    if (body.contains(key)) return true;
  }
  return false;
}

SessionSettings merge_settings(SessionSettings s, const Json& body) {
  if (auto it = body.find("metrics"); it != body.end()) {
    if (it->is_string()) {
      const auto group = group_from_string(it->get<std::string>());
      if (!group) throw Error(ErrorCode::InvalidArgument, "unknown metric group '" + it->get<std::string>() + "'");
      s.metrics = metrics_in(*group);
    } else {
      s.metrics = metrics_from_json(*it);
    }
  }
  if (auto it = body.find("n"); it != body.end()) s.n = it->get<int>();
  if (auto it = body.find("k"); it != body.end()) s.k = it->get<int>();
  if (auto it = body.find("seed"); it != body.end()) s.seed = it->get<std::uint64_t>();
  return s;
}

Json settings_view(const SessionSettings& s) {
  return {{"metrics", to_json(std::span<const MetricId>(s.metrics))},
          {"group", to_string(s.group())},
          {"n", s.n},
          {"k", s.k},
          {"seed", s.seed}};
}

Json session_view(const Session& s, const JobStatus& job) {
  return {{"id", s.id()},
          {"job", to_json(job)},
          {"settings", settings_view(s.settings())},
          {"searched", s.searched()},
          {"model_count", s.models().size()},
          {"stage_count", s.stages().size()},
          {"bucket", s.bucket()},
          {"ensemble_count", s.ensembles().size()},
          {"best", s.best() ? to_json(*s.best()) : Json(nullptr)},
          {"search_failures", s.search_failures()},
          {"instances", s.dataset().size()},
          {"class_names", {s.dataset().class_names[0], s.dataset().class_names[1]}}};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "no saved session at " + path.string());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

Json to_json(const JobStatus& s) {
  Json out = {{"state", to_string(s.state)}, {"progress", s.progress}};
  if (!s.kind.empty()) out["kind"] = s.kind;
  if (s.kind == "stage") out["stage"] = s.stage;
  if (s.state == JobState::Failed) out["reason"] = s.reason;
  return out;
}

SessionService::SessionService(ServiceOptions options) : options_(std::move(options)) {}

SessionService::~SessionService() {
  std::lock_guard lock(registry_mutex_);
  for (auto& [id, s] : sessions_) {
    if (s->job.joinable()) s->job.join();
  }
}

std::string SessionService::create(Dataset data) {
  auto id = new_token();
  auto s = std::make_shared<Slot>(Session(id, std::move(data)));
  std::lock_guard lock(registry_mutex_);
  sessions_[id] = std::move(s);
  return id;
}

std::shared_ptr<SessionService::Slot> SessionService::slot(const std::string& id) const {
  std::lock_guard lock(registry_mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::NotFound, "no session '" + id + "'");
  return it->second;
}

JobStatus SessionService::status(const std::string& id) const {
  auto s = slot(id);
  std::lock_guard lock(s->status_mutex);
  return s->status;
}

void SessionService::wait_idle(const std::string& id) const {
  auto s = slot(id);
  std::unique_lock lock(s->status_mutex);
  s->idle.wait(lock, [&] { return s->status.state != JobState::Running; });
}

void SessionService::start_job(const std::shared_ptr<Slot>& s, std::string kind, int stage,
                               std::function<void(Session&, const ProgressFn&)> work) {
  std::lock_guard status_lock(s->status_mutex);
  if (s->status.state == JobState::Running) throw Error(ErrorCode::Conflict, "a job is already running");
  std::optional<Session> copy;
  {
    std::shared_lock read(s->mutex);
    copy.emplace(s->session);
  }
  if (s->job.joinable()) s->job.join();
  s->status = {JobState::Running, std::move(kind), stage, 0.0, {}};
  s->job = std::jthread([s, work = std::move(work), copy = std::move(*copy)]() mutable {
    const ProgressFn progress = [&](double p) {
      std::lock_guard lock(s->status_mutex);
      s->status.progress = std::max(s->status.progress, p);
    };
    std::string failure;
    try {
      work(copy, progress);
      std::unique_lock write(s->mutex);
      s->session = std::move(copy);
    } catch (const std::exception& e) {
      failure = e.what();
    }
    std::lock_guard lock(s->status_mutex);
    if (failure.empty()) {
      s->status.state = JobState::Idle;
      s->status.progress = 1.0;
    } else {
      s->status.state = JobState::Failed;
      s->status.reason = failure;
    }
    s->idle.notify_all();
  });
}

void SessionService::mount(httplib::Server& server) {
  // Synchronous mutation: refused while a job runs.
  auto mutate = [this](const std::string& id, auto&& fn) {
    auto s = slot(id);
    std::lock_guard status_lock(s->status_mutex);
    if (s->status.state == JobState::Running) throw Error(ErrorCode::Conflict, "a job is running");
    std::unique_lock write(s->mutex);
    return fn(s->session, s->status);
  };
  auto read = [this](const std::string& id, auto&& fn) {
    auto s = slot(id);
    JobStatus job;
    {
      std::lock_guard lock(s->status_mutex);
      job = s->status;
    }
    std::shared_lock lock(s->mutex);
    return fn(s->session, job);
  };

  server.Get("/space", [](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { send(res, 200, space_document()); });
  });

  server.Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::string csv, label;
      Json settings = Json::object();
      if (req.is_multipart_form_data()) {
        if (!req.has_file("dataset")) throw Error(ErrorCode::InvalidArgument, "multipart field 'dataset' is required");
        csv = req.get_file_value("dataset").content;
        if (req.has_file("label_column")) label = req.get_file_value("label_column").content;
        if (req.has_file("settings")) settings = Json::parse(req.get_file_value("settings").content);
      } else {
        const auto body = parse_body(req);
        csv = require(body, "csv").get<std::string>();
        if (body.contains("label_column")) label = body["label_column"].get<std::string>();
        if (body.contains("settings")) settings = body["settings"];
      }
      if (label.empty() && req.has_param("label_column")) label = req.get_param_value("label_column");
      if (label.empty()) throw Error(ErrorCode::InvalidArgument, "label_column is required");
      auto data = parse_csv(csv, label);
      Session session(new_token(), std::move(data));
      if (!settings.empty()) session.configure(merge_settings(session.settings(), settings));
      const auto id = session.id();
      Json view = session_view(session, {});
      {
        std::lock_guard lock(registry_mutex_);
        sessions_[id] = std::make_shared<Slot>(std::move(session));
      }
      send(res, 201, view);
    });
  });

  server.Get("/sessions/:id", [read](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      send(res, 200, read(req.path_params.at("id"), [](const Session& s, const JobStatus& job) {
             return session_view(s, job);
           }));
    });
  });

  server.Put("/sessions/:id/settings", [mutate](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = parse_body(req);
      send(res, 200, mutate(req.path_params.at("id"), [&](Session& s, const JobStatus& job) {
             s.configure(merge_settings(s.settings(), body));
             return session_view(s, job);
           }));
    });
  });

  server.Post("/sessions/:id/search", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto s = slot(req.path_params.at("id"));
      {
        std::shared_lock lock(s->mutex);
        if (s->session.searched()) throw Error(ErrorCode::Conflict, "the random search has already run");
      }
      const unsigned workers = options_.workers;
      start_job(s, "search", 0, [workers](Session& session, const ProgressFn& p) { session.run_search(workers, p); });
      send(res, 202, {{"job", to_json(status(req.path_params.at("id")))}});
    });
  });

  server.Post("/sessions/:id/stages", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = parse_body(req);
      auto s = slot(req.path_params.at("id"));
      StagePlan plan;
      {
        std::shared_lock lock(s->mutex);
        if (!s->session.searched()) throw Error(ErrorCode::Conflict, "run the random search first");
        plan = plan_from_request(body, s->session.next_stage(), s->session.settings().n);
        plan.validate(s->session.settings().n);
      }
      const unsigned workers = options_.workers;
      start_job(s, "stage", plan.stage,
                [workers, plan](Session& session, const ProgressFn& p) { session.run_stage(plan, workers, p); });
      send(res, 202, {{"job", to_json(status(req.path_params.at("id")))}, {"plan", to_json(plan)}});
    });
  });

  server.Get("/sessions/:id/stages/:s", [read](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const int stage = std::stoi(req.path_params.at("s"));
      send(res, 200, read(req.path_params.at("id"), [&](const Session& s, const JobStatus&) {
             if (stage < 1 || stage > static_cast<int>(s.stages().size())) {
               throw Error(ErrorCode::NotFound, "no stage " + std::to_string(stage));
             }
             return to_json(s.stages()[static_cast<std::size_t>(stage - 1)]);
           }));
    });
  });

  server.Get("/sessions/:id/models", [read](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      std::optional<int> stage;
      if (req.has_param("stage")) stage = std::stoi(req.get_param_value("stage"));
      const bool oof = req.has_param("oof") && req.get_param_value("oof") == "1";
      send(res, 200, read(req.path_params.at("id"), [&](const Session& s, const JobStatus&) {
             Json models = Json::array();
             for (const auto* m : s.models_at(stage)) models.push_back(to_json(*m, oof));
             return Json{{"models", models}};
           }));
    });
  });

  server.Post("/sessions/:id/projection", [read](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = parse_body(req);
      send(res, 200, read(req.path_params.at("id"), [&](const Session& s, const JobStatus&) {
             const auto ids = optional_ids(body, {"model_ids", "ids"});
             const auto models = has_any(body, {"model_ids", "ids"}) ? s.resolve(ids) : s.all_models();
             const auto method_name = body.value("method", std::string("mds"));
             const auto method = projection_from_string(method_name);
             if (!method) throw Error(ErrorCode::InvalidArgument, "unknown projection method '" + method_name + "'");
             const auto& metrics = s.settings().metrics;
             if (*method == ProjectionMethod::MDS) return to_json(project_mds(models, metrics));
             return to_json(project_tsne(models, metrics, body.value("perplexity", 30.0), body.value("iterations", 1000),
                                         derive_seed(s.settings().seed, "tsne")));
           }));
    });
  });

  server.Post("/sessions/:id/grid", [read](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = parse_body(req);
      send(res, 200, read(req.path_params.at("id"), [&](const Session& s, const JobStatus&) {
             const auto selected = s.resolve(optional_ids(body, {"selected", "model_ids"}));
             return to_json(build_grid(s.dataset(), s.all_models(), selected, derive_seed(s.settings().seed, "grid")));
           }));
    });
  });

  server.Post("/sessions/:id/panels", [read](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = parse_body(req);
      send(res, 200, read(req.path_params.at("id"), [&](const Session& s, const JobStatus&) {
             const auto selected = s.resolve(optional_ids(body, {"selected", "model_ids"}));
             return to_json(aggregate_panels(s.all_models(), selected, s.settings().metrics));
           }));
    });
  });

  server.Post("/sessions/:id/bucket", [mutate](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = parse_body(req);
      const auto add = optional_ids(body, {"add"});
      const auto remove = optional_ids(body, {"remove"});
      send(res, 200, mutate(req.path_params.at("id"), [&](Session& s, const JobStatus&) {
             s.update_bucket(add, remove);
             return Json{{"bucket", s.bucket()}};
           }));
    });
  });

  server.Post("/sessions/:id/ensemble/evaluate", [mutate](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = parse_body(req);
      send(res, 200, mutate(req.path_params.at("id"), [&](Session& s, const JobStatus&) {
             const auto ids = has_any(body, {"ids", "model_ids"}) ? optional_ids(body, {"ids", "model_ids"}) : s.bucket();
             const auto outcome = s.evaluate_ensemble(ids);
             return Json{{"spec", to_json(outcome.spec)},
                         {"best", to_json(outcome.best)},
                         {"ordinal", s.ensembles().size() - 1}};
           }));
    });
  });

  server.Post("/sessions/:id/ensemble/auto", [mutate](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = parse_body(req);
      const auto max_size = body.value("max_size", std::size_t{4});
      send(res, 200, mutate(req.path_params.at("id"), [&](Session& s, const JobStatus&) {
             const auto result = s.auto_ensemble(max_size);
             return Json{{"result", to_json(result)}, {"best", to_json(*s.best())}};
           }));
    });
  });

  server.Get("/sessions/:id/ensembles", [read](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      send(res, 200, read(req.path_params.at("id"), [](const Session& s, const JobStatus&) {
             Json history = Json::array();
             for (const auto& e : s.ensembles()) history.push_back(to_json(e));
             return Json{{"history", history}, {"best", s.best() ? to_json(*s.best()) : Json(nullptr)}};
           }));
    });
  });

  server.Post("/sessions/:id/save", [this, mutate](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto id = req.path_params.at("id");
      const auto document = mutate(id, [](Session& s, const JobStatus&) { return save_session(s); });
      std::error_code ec;
      std::filesystem::create_directories(options_.data_dir, ec);
      const auto path = options_.data_dir / (id + ".json");
      const auto tmp = options_.data_dir / (id + ".json.tmp");
      {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << document;
        if (!out) throw Error(ErrorCode::Io, "cannot write " + tmp.string());
      }
      std::filesystem::rename(tmp, path, ec);
      if (ec) throw Error(ErrorCode::Io, "cannot move session into place: " + ec.message());
      send(res, 200, {{"path", path.string()}, {"bytes", document.size()}});
    });
  });

  server.Post("/sessions/load", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = parse_body(req);
      std::string document;
      if (auto it = body.find("document"); it != body.end()) {
        document = it->is_string() ? it->get<std::string>() : it->dump();
      } else {
        const auto id = require(body, "id").get<std::string>();
        if (id.find('/') != std::string::npos || id.find("..") != std::string::npos) {
          throw Error(ErrorCode::InvalidArgument, "invalid session id");
        }
        document = read_file(options_.data_dir / (id + ".json"));
      }
      auto session = load_session(document);
      const auto id = session.id();
      Json view = session_view(session, {});
      std::lock_guard lock(registry_mutex_);
      if (auto it = sessions_.find(id); it != sessions_.end()) {
        std::lock_guard status_lock(it->second->status_mutex);
        if (it->second->status.state == JobState::Running) {
          throw Error(ErrorCode::Conflict, "session '" + id + "' has a running job");
        }
        std::unique_lock write(it->second->mutex);
        it->second->session = std::move(session);
        it->second->status = {};
      } else {
        sessions_[id] = std::make_shared<Slot>(std::move(session));
      }
      send(res, 200, view);
    });
  });
}

}  // namespace evoml
