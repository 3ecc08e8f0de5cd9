#include <cmath>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "guidefill/engine.hpp"
#include "guidefill/guide.hpp"
#include "guidefill/harness.hpp"
#include "guidefill/image_io.hpp"
#include "guidefill/limits.hpp"
#include "guidefill/spline.hpp"
#include "guidefill/tools/pipeline.hpp"
#include "guidefill/tools/service.hpp"

namespace fs = std::filesystem;
using namespace guidefill;

namespace {

constexpr int kExitDimensionMismatch = 2;
constexpr int kExitUnreadable = 3;
constexpr int kExitUnfillable = 4;

httplib::Server* g_server = nullptr;

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  out << text;
}

// Prints to stdout when path is empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

struct Inputs {
  ImageBuffer image;
  LabelMask mask;
};

// Reads and checks the image/mask pair, mapping failures onto exit codes.
int load_inputs(const std::string& image_path, const std::string& mask_path, Inputs& in) {
  try {
    in.image = read_png(image_path);
    in.mask = read_mask_pgm(mask_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUnreadable;
  }
  try {
    check_same_size(in.image, in.mask);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDimensionMismatch;
  }
  return 0;
}

int run_inpaint(const std::string& image_path, const std::string& mask_path,
                const std::string& splines_path, const std::vector<std::string>& params,
                const std::string& out_path, std::string report_path) {
  tools::PipelineOptions options;
  try {
    options = tools::parse_params(params);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  Inputs in;
  if (const int rc = load_inputs(image_path, mask_path, in)) return rc;
  std::vector<Spline> splines;
  if (!splines_path.empty()) {
    try {
      const auto bytes = read_file_bytes(splines_path);
      splines = splines_from_json(std::string(bytes.begin(), bytes.end()));
    } catch (const Error& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitUnreadable;
    }
  }
  const tools::PipelineOutput out =
      tools::run_pipeline(in.image, in.mask, splines_path.empty() ? nullptr : &splines, options);
  write_png(out_path, out.fill.image);
  if (report_path.empty()) report_path = fs::path(out_path).replace_extension(".report.json").string();
  write_text(report_path, tools::report_to_json(out.fill.report));
  std::cout << hex64(content_hash(out.fill.image)) << "\n";
  if (out.fill.report.unfillable_pixels > 0) {
    std::cerr << "warning: " << out.fill.report.unfillable_pixels
              << " pixels unreachable from readable data\n";
    return kExitUnfillable;
  }
  return 0;
}

std::string fit_json(const std::vector<ScalingRow>& rows) {
  std::vector<std::pair<double, double>> threads, wall;
  for (const auto& r : rows) {
    threads.emplace_back(static_cast<double>(r.n), static_cast<double>(r.threads_max));
    wall.emplace_back(static_cast<double>(r.n), std::max(r.wall_ms, 1e-3));
  }
  nlohmann::json j;
  const PowerLawFit bt = fit_power_law(threads);
  const PowerLawFit aw = fit_power_law(wall);
  j["beta"] = bt.alpha;
  j["beta_residual"] = bt.residual;
  j["alpha_wall"] = aw.alpha;
  j["alpha_wall_residual"] = aw.residual;
  return j.dump(2);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"guidefill: shell-based geometric inpainting"};
  app.require_subcommand(1);

  // inpaint
  std::string image_path, mask_path, splines_path, out_path, report_path;
  std::vector<std::string> params;
  auto* inpaint_cmd = app.add_subcommand("inpaint", "Fill the Inpaint region of an image");
  inpaint_cmd->add_option("--image", image_path, "Input PNG")->required();
  inpaint_cmd->add_option("--mask", mask_path, "PGM label mask (0 readable, 128 bystander, 255 inpaint)")
      ->required();
  inpaint_cmd->add_option("--splines", splines_path, "Spline JSON; detected automatically when absent");
  inpaint_cmd->add_option("--params,--param", params, "key=value settings, e.g. mu=50 r=3 order=smart");
  inpaint_cmd->add_option("--out,-o", out_path, "Output PNG")->required();
  inpaint_cmd->add_option("--report", report_path, "Report JSON (default: <out>.report.json)");

  // splines detect
  auto* splines_cmd = app.add_subcommand("splines", "Spline utilities");
  splines_cmd->require_subcommand(1);
  auto* detect_cmd = splines_cmd->add_subcommand("detect", "Detect edge splines around the mask");
  std::string detect_out;
  detect_cmd->add_option("--image", image_path, "Input PNG")->required();
  detect_cmd->add_option("--mask", mask_path, "PGM label mask")->required();
  detect_cmd->add_option("--out,-o", detect_out, "Output JSON (default stdout)");

  // limits curve
  auto* limits_cmd = app.add_subcommand("limits", "Continuum-limit predictions");
  limits_cmd->require_subcommand(1);
  auto* curve_cmd = limits_cmd->add_subcommand("curve", "theta* against theta as CSV");
  std::string kind = "rotated", mu_text = "50", curve_out;
  int radius = 3, samples = 179;
  curve_cmd->add_option("--kind", kind, "axis or rotated")->check(CLI::IsMember({"axis", "rotated"}));
  curve_cmd->add_option("--r", radius, "Ball radius")->check(CLI::PositiveNumber);
  curve_cmd->add_option("--mu", mu_text, "Anisotropy (number or inf)");
  curve_cmd->add_option("--samples", samples, "Number of angles in (0, 180)")->check(CLI::Range(2, 1000000));
  curve_cmd->add_option("--out,-o", curve_out, "Output CSV (default stdout)");

  // bench scale
  auto* bench_cmd = app.add_subcommand("bench", "Benchmarks");
  bench_cmd->require_subcommand(1);
  auto* scale_cmd = bench_cmd->add_subcommand("scale", "Stripe-family scaling study");
  bool untracked = false;
  std::vector<int> widths{280, 396, 560, 792, 1120, 1584, 2240};
  std::string out_dir = ".";
  scale_cmd->add_flag("--tracked", "Frontier tracking (default)");
  scale_cmd->add_flag("--untracked", untracked, "Full rescan every iteration");
  scale_cmd->add_option("--widths", widths, "Stripe widths W (H = W/4)");
  scale_cmd->add_option("--out-dir", out_dir, "Directory for the CSV and gnuplot script");

  // degrade
  auto* degrade_cmd = app.add_subcommand("degrade", "Signal degradation study");
  std::vector<int> degrade_widths{200, 400, 800, 1000, 2000, 4000};
  std::vector<double> sections{0.0, 0.25};
  degrade_cmd->add_option("--widths", degrade_widths, "Widths W (H = W/2)");
  degrade_cmd->add_option("--y", sections, "Cross-section heights");
  degrade_cmd->add_option("--out-dir", out_dir, "Directory for the CSV and gnuplot script");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service (/api/v1)");
  std::string host = "127.0.0.1", data_dir;
  int port = 8080;
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));
  serve_cmd->add_option("--data-dir", data_dir, "Project root (default $GUIDEFILL_DATA_DIR)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (inpaint_cmd->parsed()) {
      return run_inpaint(image_path, mask_path, splines_path, params, out_path, report_path);
    }
    if (detect_cmd->parsed()) {
      Inputs in;
      if (const int rc = load_inputs(image_path, mask_path, in)) return rc;
      emit(detect_out, splines_to_json(detect_splines(in.image, in.mask)) + "\n");
      return 0;
    }
    if (curve_cmd->parsed()) {
      tools::PipelineOptions o;
      tools::apply_param(o, "mu=" + mu_text);
      const auto points = theta_star_curve(kind == "axis" ? BallKind::kAxis : BallKind::kRotated,
                                           radius, o.fill.mu, samples);
      std::ostringstream csv;
      csv << std::setprecision(17) << "theta_deg,theta_star_deg\n";
      for (const auto& p : points) csv << p.theta_deg << ',' << p.theta_star_deg << '\n';
      emit(curve_out, csv.str());
      return 0;
    }
    if (scale_cmd->parsed()) {
      const auto rows = scaling_study(widths, !untracked);
      const std::string study = untracked ? "scale_untracked" : "scale_tracked";
      const fs::path csv = study_csv_path(out_dir, study);
      std::ostringstream s;
      s << "width,height,n,wall_ms,threads_max,iterations,analytic_iterations\n";
      for (const auto& r : rows) {
        s << r.width << ',' << r.height << ',' << r.n << ',' << r.wall_ms << ',' << r.threads_max << ','
          << r.iterations << ',' << r.analytic_iterations << '\n';
      }
      write_text(csv, s.str());
      write_text(fs::path(csv).replace_extension(".gp"),
                 gnuplot_script(csv, 3, 5, study + ": threads requested against N"));
      std::cout << fit_json(rows) << "\n" << csv.string() << "\n";
      return 0;
    }
    if (degrade_cmd->parsed()) {
      std::vector<std::pair<int, int>> res;
      for (int w : degrade_widths) res.emplace_back(w, w / 2);
      const auto rows = degradation_study(res, sections);
      const fs::path csv = study_csv_path(out_dir, "degradation");
      std::ostringstream s;
      s << std::setprecision(17) << "width,height,y,transition_width\n";
      for (const auto& r : rows) s << r.width << ',' << r.height << ',' << r.y << ',' << r.transition_width << '\n';
      write_text(csv, s.str());
      write_text(fs::path(csv).replace_extension(".gp"),
                 gnuplot_script(csv, 1, 4, "transition width against resolution"));
      std::cout << s.str() << csv.string() << "\n";
      return 0;
    }
    if (serve_cmd->parsed()) {
      tools::ServiceConfig config = tools::ServiceConfig::from_env();
      if (!data_dir.empty()) config.data_dir = data_dir;
      tools::Service service(config);
      httplib::Server server;
      service.mount(server);
      g_server = &server;
      std::signal(SIGINT, [](int) {
        if (g_server) g_server->stop();
      });
      std::signal(SIGTERM, [](int) {
        if (g_server) g_server->stop();
      });
      std::cerr << "serving " << config.data_dir.string() << " on http://" << host << ':' << port
                << "/api/v1\n";
      if (!server.listen(host, port)) {
        std::cerr << "error: cannot listen on " << host << ':' << port << "\n";
        return 1;
      }
      return 0;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (e.code() == ErrorCode::kDimensionMismatch) return kExitDimensionMismatch;
    return 1;
  }
  return 0;
}
