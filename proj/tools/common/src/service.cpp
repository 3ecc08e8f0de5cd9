#include "guidefill/tools/service.hpp"

#include <charconv>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <random>
#include <shared_mutex>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "guidefill/guide.hpp"
#include "guidefill/image_io.hpp"
#include "guidefill/spline.hpp"
#include "guidefill/tools/pipeline.hpp"

namespace guidefill::tools {

namespace fs = std::filesystem;
using nlohmann::json;

struct Project {
  std::string id;
  fs::path dir;
  std::shared_mutex mutex;

  // Set once at creation, read without the lock.
  ImageBuffer image;
  std::vector<LabelMask> masks;

  std::string splines_json;
  PipelineOptions options;
  std::string result_key;
  std::string result_hash;
  std::string job_state = "idle";
  std::string job_error;
};

namespace {

constexpr const char* kJson = "application/json";

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

std::string random_id() {
  static std::mutex m;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lock(m);
  return hex64(rng());
}

std::uint64_t fnv1a(std::string_view text, std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string result_key(const Project& p, int mask_index) {
  std::uint64_t h = fnv1a(p.splines_json);
  h = fnv1a(params_to_json(p.options), h);
  h = fnv1a(std::to_string(mask_index), h);
  return hex64(h);
}

void write_text(const fs::path& path, std::string_view text) {
  write_file_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

std::string read_text(const fs::path& path) {
  const auto bytes = read_file_bytes(path);
  return std::string(bytes.begin(), bytes.end());
}

void audit(const Project& p, const std::string& event, json detail = json::object()) {
  json line{{"time", utc_now()}, {"event", event}, {"detail", std::move(detail)}};
  std::ofstream out(p.dir / "audit.log", std::ios::app);
  out << line.dump() << '\n';
}

// Caller holds the unique lock.
void save_manifest(const Project& p) {
  json m;
  m["id"] = p.id;
  m["width"] = p.image.width();
  m["height"] = p.image.height();
  m["channels"] = p.image.channels();
  m["masks"] = p.masks.size();
  m["params"] = json::parse(params_to_json(p.options));
  if (p.result_hash.empty()) {
    m["result"] = nullptr;
  } else {
    m["result"] = {{"key", p.result_key}, {"hash", p.result_hash}};
  }
  write_text(p.dir / "manifest.json", m.dump(2));
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", message}}.dump(), kJson);
}

int status_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kDimensionMismatch: return 409;
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kIo: return 400;
    default: return 500;
  }
}

// Absent is fine; present must be a whole integer ("2.5" is rejected).
bool int_param(const httplib::Request& req, const char* key, int& out) {
  if (!req.has_param(key)) return true;
  const std::string text = req.get_param_value(key);
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && end == text.data() + text.size() && !text.empty();
}

std::string base_url(const Project& p) { return "/api/v1/projects/" + p.id; }

struct Outcome {
  std::string hash;
  json report;
  bool cached = false;
};

// Snapshot under the shared lock, fill unlocked, commit under the unique
// lock unless the splines or params changed in the meantime.
Outcome run_inpaint(Project& p, int mask_index) {
  std::string splines_json;
  PipelineOptions options;
  std::string key;
  {
    std::shared_lock lock(p.mutex);
    splines_json = p.splines_json;
    options = p.options;
    key = result_key(p, mask_index);
    if (key == p.result_key && !p.result_hash.empty() && fs::exists(p.dir / "result.png")) {
      Outcome o;
      o.hash = p.result_hash;
      o.report = json::parse(read_text(p.dir / "report.json"));
      o.cached = true;
      return o;
    }
  }
  const std::vector<Spline> splines = splines_from_json(splines_json);
  const PipelineOutput out =
      run_pipeline(p.image, p.masks[static_cast<std::size_t>(mask_index)], &splines, options);
  Outcome o;
  o.hash = hex64(content_hash(out.fill.image));
  const std::string report = report_to_json(out.fill.report);
  o.report = json::parse(report);

  std::unique_lock lock(p.mutex);
  if (result_key(p, mask_index) == key) {
    write_png(p.dir / "result.png", out.fill.image);
    write_text(p.dir / "report.json", report);
    p.result_key = key;
    p.result_hash = o.hash;
    save_manifest(p);
    audit(p, "inpaint", {{"mask", mask_index}, {"hash", o.hash}});
  }
  return o;
}

json outcome_json(const Project& p, const Outcome& o) {
  json r = o.report;
  r.erase("per_iteration");
  return {{"hash", o.hash}, {"cached", o.cached}, {"result", base_url(p) + "/result"}, {"report", r}};
}

std::shared_ptr<Project> load_project(const fs::path& dir) {
  const json m = json::parse(read_text(dir / "manifest.json"));
  auto p = std::make_shared<Project>();
  p->id = m.at("id").get<std::string>();
  p->dir = dir;
  p->image = read_png(dir / "image.png");
  const auto n = m.at("masks").get<std::size_t>();
  for (std::size_t k = 0; k < n; ++k) {
    p->masks.push_back(read_mask_pgm(dir / ("mask_" + std::to_string(k) + ".pgm")));
  }
  p->splines_json = read_text(dir / "splines.json");
  apply_params_json(p->options, m.at("params").dump());
  if (!m.at("result").is_null()) {
    p->result_key = m["result"].at("key").get<std::string>();
    p->result_hash = m["result"].at("hash").get<std::string>();
  }
  return p;
}

}  // namespace

ServiceConfig ServiceConfig::from_env() {
  ServiceConfig c;
  if (const char* dir = std::getenv("GUIDEFILL_DATA_DIR"); dir && *dir) c.data_dir = dir;
  return c;
}

Service::Service(ServiceConfig config) : config_(std::move(config)) {
  fs::create_directories(config_.data_dir);
  load_existing();
}

Service::~Service() { wait_for_jobs(); }

void Service::wait_for_jobs() {
  std::vector<std::thread> jobs;
  {
    std::lock_guard lock(jobs_mutex_);
    jobs.swap(jobs_);
  }
  for (auto& t : jobs) t.join();
}

void Service::spawn(std::thread job) {
  std::lock_guard lock(jobs_mutex_);
  jobs_.push_back(std::move(job));
}

std::shared_ptr<Project> Service::find(const std::string& id) const {
  std::lock_guard lock(mutex_);
  const auto it = projects_.find(id);
  return it == projects_.end() ? nullptr : it->second;
}

std::shared_ptr<Project> Service::add(std::shared_ptr<Project> project) {
  std::lock_guard lock(mutex_);
  projects_[project->id] = project;
  return project;
}

void Service::load_existing() {
  for (const auto& entry : fs::directory_iterator(config_.data_dir)) {
    if (!entry.is_directory() || !fs::exists(entry.path() / "manifest.json")) continue;
    auto p = load_project(entry.path());
    projects_[p->id] = std::move(p);
  }
}

void Service::mount(httplib::Server& server) {
  const std::string id_re = "([0-9a-f]{16})";
  const std::string root = "/api/v1/projects";

  auto with_project = [this](const httplib::Request& req, httplib::Response& res, auto&& body) {
    const auto p = find(req.matches[1]);
    if (!p) {
      send_error(res, 404, "unknown project");
      return;
    }
    try {
      body(*p);
    } catch (const Error& e) {
      send_error(res, status_for(e), e.what());
    } catch (const json::exception& e) {
      send_error(res, 400, e.what());
    }
  };

  server.Post(root, [this](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_file("image")) {
      send_error(res, 400, "multipart field 'image' is required");
      return;
    }
    const auto mask_parts = req.get_file_values("mask");
    if (mask_parts.empty()) {
      send_error(res, 400, "at least one multipart field 'mask' is required");
      return;
    }
    auto p = std::make_shared<Project>();
    try {
      const auto& image_part = req.get_file_value("image");
      const std::vector<std::uint8_t> image_bytes(image_part.content.begin(), image_part.content.end());
      p->image = decode_png(image_bytes);
      for (const auto& part : mask_parts) {
        const std::vector<std::uint8_t> bytes(part.content.begin(), part.content.end());
        p->masks.push_back(decode_mask_pgm(bytes));
        check_same_size(p->image, p->masks.back());
      }
      std::vector<Spline> all;
      for (const auto& mask : p->masks) {
        for (auto& s : detect_or_empty(p->image, mask)) {
          s.id = "auto-" + std::to_string(all.size());
          all.push_back(std::move(s));
        }
      }
      p->splines_json = splines_to_json(all);
      p->id = random_id();
      while (find(p->id)) p->id = random_id();
      p->dir = config_.data_dir / p->id;
      fs::create_directories(p->dir);
      write_file_bytes(p->dir / "image.png", image_bytes);
      for (std::size_t k = 0; k < mask_parts.size(); ++k) {
        write_text(p->dir / ("mask_" + std::to_string(k) + ".pgm"), mask_parts[k].content);
      }
      write_text(p->dir / "splines.json", p->splines_json);
      save_manifest(*p);
      audit(*p, "create", {{"masks", p->masks.size()}, {"auto_splines", all.size()}});
      add(p);
      res.status = 201;
      res.set_content(json{{"id", p->id},
                           {"width", p->image.width()},
                           {"height", p->image.height()},
                           {"masks", p->masks.size()},
                           {"splines", all.size()}}
                          .dump(),
                      kJson);
    } catch (const Error& e) {
      send_error(res, status_for(e), e.what());
    }
  });

  server.Get(root + "/" + id_re, [with_project](const httplib::Request& req, httplib::Response& res) {
    with_project(req, res, [&](Project& p) {
      std::shared_lock lock(p.mutex);
      res.set_content(read_text(p.dir / "manifest.json"), kJson);
    });
  });

  server.Get(root + "/" + id_re + "/splines",
             [with_project](const httplib::Request& req, httplib::Response& res) {
               with_project(req, res, [&](Project& p) {
                 std::shared_lock lock(p.mutex);
                 res.set_content(p.splines_json, kJson);
               });
             });

  server.Put(root + "/" + id_re + "/splines",
             [with_project](const httplib::Request& req, httplib::Response& res) {
               with_project(req, res, [&](Project& p) {
                 const auto splines = splines_from_json(req.body);
                 std::unique_lock lock(p.mutex);
                 p.splines_json = req.body;
                 write_text(p.dir / "splines.json", p.splines_json);
                 p.result_key.clear();
                 p.result_hash.clear();
                 fs::remove(p.dir / "result.png");
                 fs::remove(p.dir / "report.json");
                 save_manifest(p);
                 audit(p, "splines", {{"count", splines.size()}});
                 res.set_content(json{{"splines", splines.size()}}.dump(), kJson);
               });
             });

  server.Post(root + "/" + id_re + "/inpaint",
              [this, with_project](const httplib::Request& req, httplib::Response& res) {
                with_project(req, res, [&](Project& p) {
                  int mask_index = 0;
                  if (!req.body.empty()) {
                    const json body = json::parse(req.body, nullptr, false);
                    if (body.is_discarded() || !body.is_object()) {
                      send_error(res, 400, "body must be a JSON object");
                      return;
                    }
                    mask_index = body.value("mask", 0);
                    if (mask_index < 0 || static_cast<std::size_t>(mask_index) >= p.masks.size()) {
                      send_error(res, 400, "mask index out of range");
                      return;
                    }
                    if (body.contains("params")) {
                      std::unique_lock lock(p.mutex);
                      PipelineOptions next = p.options;
                      apply_params_json(next, body["params"].dump());
                      if (params_to_json(next) != params_to_json(p.options)) {
                        p.options = next;
                        save_manifest(p);
                        audit(p, "params", json::parse(params_to_json(next)));
                      }
                    }
                  }
                  const std::size_t pixels = static_cast<std::size_t>(p.image.width()) *
                                             static_cast<std::size_t>(p.image.height());
                  if (pixels <= config_.sync_pixel_limit) {
                    res.set_content(outcome_json(p, run_inpaint(p, mask_index)).dump(), kJson);
                    return;
                  }
                  const std::string status_url = base_url(p) + "/inpaint/status";
                  {
                    std::unique_lock lock(p.mutex);
                    if (p.job_state != "running") {
                      p.job_state = "running";
                      p.job_error.clear();
                      auto self = find(p.id);
                      spawn(std::thread([self, mask_index] {
                        std::string state = "done";
                        std::string error;
                        try {
                          run_inpaint(*self, mask_index);
                        } catch (const std::exception& e) {
                          state = "failed";
                          error = e.what();
                        }
                        std::unique_lock job_lock(self->mutex);
                        self->job_state = state;
                        self->job_error = error;
                      }));
                    }
                  }
                  res.status = 202;
                  res.set_header("Location", status_url);
                  res.set_content(json{{"state", "running"}, {"status", status_url}}.dump(), kJson);
                });
              });

  server.Get(root + "/" + id_re + "/inpaint/status",
             [with_project](const httplib::Request& req, httplib::Response& res) {
               with_project(req, res, [&](Project& p) {
                 std::shared_lock lock(p.mutex);
                 json j{{"state", p.job_state}};
                 if (!p.result_hash.empty()) {
                   j["hash"] = p.result_hash;
                   j["result"] = base_url(p) + "/result";
                 }
                 if (!p.job_error.empty()) j["error"] = p.job_error;
                 res.set_content(j.dump(), kJson);
               });
             });

  server.Get(root + "/" + id_re + "/result",
             [with_project](const httplib::Request& req, httplib::Response& res) {
               with_project(req, res, [&](Project& p) {
                 std::shared_lock lock(p.mutex);
                 if (p.result_hash.empty() || !fs::exists(p.dir / "result.png")) {
                   send_error(res, 404, "no result yet");
                   return;
                 }
                 res.set_header("X-Result-Hash", p.result_hash);
                 res.set_content(read_text(p.dir / "result.png"), "image/png");
               });
             });

  server.Get(root + "/" + id_re + "/guide-field",
             [with_project](const httplib::Request& req, httplib::Response& res) {
               with_project(req, res, [&](Project& p) {
                 int step = 8;
                 int mask_index = 0;
                 if (!int_param(req, "step", step) || !int_param(req, "mask", mask_index)) {
                   send_error(res, 400, "step and mask must be integers");
                   return;
                 }
                 if (step < 1) {
                   send_error(res, 400, "step must be >= 1");
                   return;
                 }
                 if (mask_index < 0 || static_cast<std::size_t>(mask_index) >= p.masks.size()) {
                   send_error(res, 400, "mask index out of range");
                   return;
                 }
                 std::string splines_json;
                 double eta = 3.0;
                 {
                   std::shared_lock lock(p.mutex);
                   splines_json = p.splines_json;
                   eta = p.options.eta;
                 }
                 const LabelMask& mask = p.masks[static_cast<std::size_t>(mask_index)];
                 const GuideField field = build_guide_field(splines_from_json(splines_json), mask, eta);
                 json vectors = json::array();
                 int rows = 0, cols = 0;
                 for (int j = 0; j < field.height; j += step, ++rows) {
                   cols = 0;
                   for (int i = 0; i < field.width; i += step, ++cols) {
                     const Vec2 g = field.at(i, j);
                     vectors.push_back({g.x, g.y});
                   }
                 }
                 res.set_content(json{{"width", field.width},
                                      {"height", field.height},
                                      {"step", step},
                                      {"columns", cols},
                                      {"rows", rows},
                                      {"vectors", std::move(vectors)}}
                                     .dump(),
                                 kJson);
               });
             });
}

}  // namespace guidefill::tools
