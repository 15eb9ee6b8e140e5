#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>

#include "evoml/session.hpp"
#include "evoml/wire.hpp"

namespace httplib {
class Server;
}

namespace evoml {

enum class JobState { Idle, Running, Failed };

struct JobStatus {
  JobState state = JobState::Idle;
  std::string kind;  // "search" or "stage"
  int stage = 0;
  double progress = 0.0;  // non-decreasing while running
  std::string reason;     // set when failed
};

Json to_json(const JobStatus& s);

struct ServiceOptions {
  std::filesystem::path data_dir = "sessions";
  unsigned workers = 1;
};

// Session registry plus the HTTP routes over it. Reads run concurrently;
// mutations are serialized per session and refused while a job runs.
class SessionService {
 public:
  explicit SessionService(ServiceOptions options);
  ~SessionService();

  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  void mount(httplib::Server& server);

  std::string create(Dataset data);
  JobStatus status(const std::string& id) const;
  // Blocks until the session has no running job.
  void wait_idle(const std::string& id) const;

 private:
  struct Slot;

  std::shared_ptr<Slot> slot(const std::string& id) const;
  void start_job(const std::shared_ptr<Slot>& s, std::string kind, int stage,
                 std::function<void(Session&, const ProgressFn&)> work);

  ServiceOptions options_;
  mutable std::mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> sessions_;
};

}  // namespace evoml
