#include "guidefill/tools/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include <json.hpp>

#include "guidefill/guide.hpp"

namespace guidefill::tools {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); }

double to_double(std::string_view key, std::string_view text) {
  if (text == "inf" || text == "infinity") return kInfiniteMu;
  double v = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || end != text.data() + text.size()) {
    bad("bad number for " + std::string(key) + ": " + std::string(text));
  }
  return v;
}

bool to_bool(std::string_view key, std::string_view text) {
  if (text == "true" || text == "1" || text == "on") return true;
  if (text == "false" || text == "0" || text == "off") return false;
  bad("bad boolean for " + std::string(key) + ": " + std::string(text));
}

const char* order_name(FillOrder o) {
  switch (o) {
    case FillOrder::kOnion: return "onion";
    case FillOrder::kSmart: return "smart";
    case FillOrder::kSmartWithDataTerm: return "smart-data";
  }
  return "smart";
}

const char* source_name(GuideSource s) {
  switch (s) {
    case GuideSource::kGuideField: return "splines";
    case GuideSource::kModifiedStructureTensor: return "tensor";
    case GuideSource::kFixed: return "fixed";
  }
  return "splines";
}

void set(PipelineOptions& o, std::string_view key, std::string_view value) {
  FillParams& p = o.fill;
  if (key == "preset") {
    if (value == "guidefill") {
      p = guidefill_params();
    } else if (value == "coherence") {
      p = coherence_transport_params();
    } else if (value == "telea") {
      p = telea_params();
    } else {
      bad("unknown preset: " + std::string(value));
    }
  } else if (key == "r") {
    const double r = to_double(key, value);
    if (r != std::floor(r) || r < 1 || r > 1000) bad("r must be a positive integer");
    p.r = static_cast<int>(r);
  } else if (key == "mu") {
    p.mu = to_double(key, value);
  } else if (key == "c") {
    p.c = to_double(key, value);
  } else if (key == "c2") {
    p.c2 = to_double(key, value);
  } else if (key == "order") {
    if (value == "onion") {
      p.order = FillOrder::kOnion;
    } else if (value == "smart") {
      p.order = FillOrder::kSmart;
    } else if (value == "smart-data") {
      p.order = FillOrder::kSmartWithDataTerm;
    } else {
      bad("unknown order: " + std::string(value));
    }
  } else if (key == "neighborhood") {
    if (value == "axis") {
      p.neighborhood = Neighborhood::kAxisBall;
    } else if (value == "rotated") {
      p.neighborhood = Neighborhood::kRotatedBall;
    } else {
      bad("unknown neighborhood: " + std::string(value));
    }
  } else if (key == "guide") {
    if (value == "splines") {
      p.g_source = GuideSource::kGuideField;
    } else if (value == "tensor") {
      p.g_source = GuideSource::kModifiedStructureTensor;
    } else if (value == "fixed") {
      p.g_source = GuideSource::kFixed;
    } else {
      bad("unknown guide source: " + std::string(value));
    }
  } else if (key == "gx") {
    p.fixed_g.x = to_double(key, value);
  } else if (key == "gy") {
    p.fixed_g.y = to_double(key, value);
  } else if (key == "sigma") {
    p.sigma = to_double(key, value);
  } else if (key == "rho") {
    p.rho = to_double(key, value);
  } else if (key == "lambda") {
    p.lambda = to_double(key, value);
  } else if (key == "eta") {
    o.eta = to_double(key, value);
    if (!(o.eta > 0.0) || !std::isfinite(o.eta)) bad("eta must be positive");
  } else if (key == "tracked") {
    p.tracked = to_bool(key, value);
  } else {
    bad("unknown parameter: " + std::string(key));
  }
}

}  // namespace

std::vector<Spline> detect_or_empty(const ImageBuffer& image, const LabelMask& mask) {
  try {
    return detect_splines(image, mask);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kEmptyRing) throw;
    return {};
  }
}

PipelineOutput run_pipeline(const ImageBuffer& image, const LabelMask& mask,
                            const std::vector<Spline>* splines, const PipelineOptions& options) {
  check_same_size(image, mask);
  validate(options.fill);
  PipelineOutput out;
  if (options.fill.g_source != GuideSource::kGuideField) {
    out.fill = inpaint(image, mask, options.fill);
    return out;
  }
  if (splines) {
    out.splines = *splines;
  } else {
    out.splines = detect_or_empty(image, mask);
    out.detected = true;
  }
  const GuideField field = build_guide_field(out.splines, mask, options.eta);
  out.fill = inpaint(image, mask, field, options.fill);
  return out;
}

void apply_param(PipelineOptions& options, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0) bad("expected key=value, got " + std::string(assignment));
  set(options, assignment.substr(0, eq), assignment.substr(eq + 1));
}

PipelineOptions parse_params(const std::vector<std::string>& assignments) {
  PipelineOptions o;
  for (const auto& a : assignments) apply_param(o, a);
  validate(o.fill);
  return o;
}

std::string params_to_json(const PipelineOptions& options) {
  const FillParams& p = options.fill;
  json j;
  j["r"] = p.r;
  j["mu"] = std::isinf(p.mu) ? json("inf") : json(p.mu);
  j["c"] = p.c;
  j["c2"] = p.c2;
  j["order"] = order_name(p.order);
  j["neighborhood"] = p.neighborhood == Neighborhood::kAxisBall ? "axis" : "rotated";
  j["guide"] = source_name(p.g_source);
  j["gx"] = p.fixed_g.x;
  j["gy"] = p.fixed_g.y;
  j["sigma"] = p.sigma;
  j["rho"] = p.rho;
  j["lambda"] = p.lambda;
  j["eta"] = options.eta;
  j["tracked"] = p.tracked;
  return j.dump();
}

void apply_params_json(PipelineOptions& options, std::string_view text) {
  const json j = json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) bad("params must be a JSON object");
  // preset first so the other keys refine it
  if (j.contains("preset")) {
    if (!j["preset"].is_string()) bad("preset must be a string");
    set(options, "preset", j["preset"].get<std::string>());
  }
  for (const auto& [key, value] : j.items()) {
    if (key == "preset") continue;
    std::string text_value;
    if (value.is_string()) {
      text_value = value.get<std::string>();
    } else if (value.is_boolean()) {
      text_value = value.get<bool>() ? "true" : "false";
    } else if (value.is_number()) {
      // dump() keeps full precision for doubles
      text_value = value.dump();
    } else {
      bad("unsupported value for " + key);
    }
    set(options, key, text_value);
  }
  validate(options.fill);
}

std::string report_to_json(const FillReport& report) {
  json j;
  j["iterations"] = report.iteration_count();
  j["inpaint_pixels"] = report.inpaint_pixels;
  j["forced_fills"] = report.forced_fills;
  j["unfillable_pixels"] = report.unfillable_pixels;
  j["initial_scan"] = report.initial_scan;
  j["total_ms"] = report.total_ms;
  std::size_t threads_max = 0;
  json per = json::array();
  for (const auto& it : report.iterations) {
    threads_max = std::max(threads_max, it.threads_requested);
    per.push_back({{"frontier", it.frontier_size},
                   {"candidates", it.candidates},
                   {"threads", it.threads_requested},
                   {"filled", it.filled},
                   {"forced", it.forced}});
  }
  j["threads_max"] = threads_max;
  j["per_iteration"] = std::move(per);
  return j.dump(2);
}

}  // namespace guidefill::tools
