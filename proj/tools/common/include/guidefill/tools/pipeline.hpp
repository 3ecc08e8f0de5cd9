#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "guidefill/engine.hpp"
#include "guidefill/grid.hpp"
#include "guidefill/spline.hpp"

// The one detect -> guide field -> inpaint path shared by the CLI and the
// service, plus the text forms of its parameters and report.
namespace guidefill::tools {

struct PipelineOptions {
  FillParams fill = guidefill_params();
  double eta = 3.0;
};

struct PipelineOutput {
  FillResult fill;
  std::vector<Spline> splines;  // what the guide field was built from
  bool detected = false;
};

// splines == nullptr runs detection first; a mask without a ring simply gets
// no splines (g = 0).
PipelineOutput run_pipeline(const ImageBuffer& image, const LabelMask& mask,
                            const std::vector<Spline>* splines, const PipelineOptions& options);

std::vector<Spline> detect_or_empty(const ImageBuffer& image, const LabelMask& mask);

// key=value, e.g. "mu=inf", "order=onion", "preset=telea". Presets replace the
// whole parameter set, so list them first. kInvalidArgument on unknown keys.
void apply_param(PipelineOptions& options, std::string_view assignment);
PipelineOptions parse_params(const std::vector<std::string>& assignments);

// Flat JSON object of the same keys; from_json accepts any subset.
std::string params_to_json(const PipelineOptions& options);
void apply_params_json(PipelineOptions& options, std::string_view json);

std::string report_to_json(const FillReport& report);

}  // namespace guidefill::tools
