#pragma once

#include <cstdint>
#include <filesystem>

#include <json.hpp>

#include "matteforge/image_io.hpp"
#include "matteforge/multires.hpp"
#include "matteforge/pipeline.hpp"
#include "matteforge/superpixel.hpp"

namespace matteforge::debug {

/// RGB PNG painting each patch a random color drawn from `seed`.
io::Bytes render_patch_map(const PatchMap& pm, std::uint32_t seed = 1);
/// [{id, area, mean_lab, centroid, bbox_overlap}, ...]
nlohmann::json patch_stats_json(const PatchMap& pm);
/// Writes <stem>.png and <stem>.json into `dir`.
void dump_patch_map(const PatchMap& pm, const std::filesystem::path& dir, const std::string& stem);

/// [{factor, patch_count, score, skipped, selected}, ...]; skipped scores are null.
nlohmann::json candidate_manifest(const CandidateSet& cs);
/// Reduced-resolution mask PNG of a viable candidate.
io::Bytes candidate_mask_png(const Candidate& c);
/// candidate-<factor>.png for each viable candidate plus manifest.json.
void dump_candidate_gallery(const CandidateSet& cs, const std::filesystem::path& dir);

/// final_mask.png, and with `intermediates` also matte.png, trimap.png,
/// pre_refine_mask.png and the candidates/ gallery.
void write_result(const PipelineResult& result, const std::filesystem::path& dir, bool intermediates);

}  // namespace matteforge::debug
