#pragma once

#include <map>
#include <optional>
#include <string>

#include "matteforge/deadline.hpp"
#include "matteforge/figureground.hpp"
#include "matteforge/image.hpp"
#include "matteforge/matting.hpp"
#include "matteforge/multires.hpp"
#include "matteforge/superpixel.hpp"
#include "matteforge/trimap.hpp"

namespace matteforge {

struct PipelineConfig {
    MeanShiftConfig mean_shift;
    FgConfig figure_ground;
    MultiresConfig multires;
    TrimapConfig trimap;
    MattingConfig matting;

    void validate() const;
};

struct PipelineResult {
    BinaryMask final_mask;
    CandidateSet candidates;
    Trimap trimap;
    AlphaMatte matte;
    BinaryMask pre_refine_mask;
    int matting_iterations = 0;
    /// Stage name -> wall time in milliseconds.
    std::map<std::string, double> timings_ms;

    int selected_factor() const { return candidates.selected().factor; }
};

/// Candidates -> selection (or the candidate at `override_factor`) -> trimap
/// -> matting -> binarize -> apply_refinement. Errors carry the failing stage name.
PipelineResult segment_image(const Image& img, const BoundingBox& box, const PipelineConfig& cfg,
                             std::optional<int> override_factor = std::nullopt, const Deadline& deadline = {});

/// Runs trimap -> matting -> refinement from an existing candidate set using
/// its selected index. Candidates are not recomputed.
PipelineResult finish_from_candidates(const Image& img, const BoundingBox& box, CandidateSet candidates,
                                      const PipelineConfig& cfg, const Deadline& deadline = {});

/// Re-applies an override by factor to an existing result's candidates.
/// Throws InvalidOverride when no candidate has that factor or it was skipped.
CandidateSet override_by_factor(const CandidateSet& cs, int factor);

/// Final figure/ground pass at full resolution: patches whose pixel majority
/// lies in matting background (or that miss the box entirely) seed the
/// background, then classification steps 2-5 run as usual. Falls back to
/// `matting_mask` when full resolution gives too few patches or no seeds.
BinaryMask refine_mask(const Image& img, const BinaryMask& matting_mask, const BoundingBox& box,
                       const PipelineConfig& cfg);

/// The final mask the pipeline reports: `matting_mask` with the pixels of
/// every matting-foreground patch that refine_mask's classification sends to
/// background removed. Seed patches keep the matting decision, so the
/// boundary comes from the matte and the result is a subset of it.
BinaryMask apply_refinement(const Image& img, const BinaryMask& matting_mask, const BoundingBox& box,
                            const PipelineConfig& cfg);

}  // namespace matteforge
