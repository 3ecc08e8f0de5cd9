#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace httplib {
class Server;
}

namespace guidefill::tools {

struct ServiceConfig {
  std::filesystem::path data_dir = "guidefill-data";
  // Inpaint requests on larger images run in the background (202 + poll URL).
  std::size_t sync_pixel_limit = 2'000'000;

  // data_dir from GUIDEFILL_DATA_DIR when set.
  static ServiceConfig from_env();
};

struct Project;

// Project store plus the /api/v1 routes. One directory per project under
// data_dir holding manifest.json, image.png, mask_<k>.pgm, splines.json,
// result.png, report.json and audit.log. Existing projects are loaded at
// construction.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  void mount(httplib::Server& server);
  // Blocks until background inpaint jobs have finished.
  void wait_for_jobs();

  const ServiceConfig& config() const { return config_; }

  // Public for the route handlers in service.cpp.
  std::shared_ptr<Project> find(const std::string& id) const;
  std::shared_ptr<Project> add(std::shared_ptr<Project> project);
  void spawn(std::thread job);

 private:
  void load_existing();

  ServiceConfig config_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Project>> projects_;
  std::mutex jobs_mutex_;
  std::vector<std::thread> jobs_;
};

}  // namespace guidefill::tools
