#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "matteforge/deadline.hpp"
#include "matteforge/figureground.hpp"
#include "matteforge/image.hpp"
#include "matteforge/superpixel.hpp"

namespace matteforge {

inline constexpr double kSkippedScore = -std::numeric_limits<double>::infinity();

/// One resolution's segmentation. A skipped candidate has no labeling and a
/// score of -inf; its patch count is still recorded when segmentation ran.
struct Candidate {
    int factor = 1;
    Image image;
    BoundingBox box;
    int patch_count = 0;
    std::optional<FgLabeling> labeling;
    double score = kSkippedScore;
    std::string skip_reason;

    bool skipped() const noexcept { return !labeling.has_value(); }
};

struct CandidateSet {
    std::vector<Candidate> candidates;
    std::optional<int> selected_index;

    const Candidate& selected() const;
    /// Index of the candidate with the given factor, if any.
    std::optional<int> index_of_factor(int factor) const;
};

struct MultiresConfig {
    std::vector<int> factors{2, 4, 6, 8, 10};

    void validate() const;
};

/// Maps a box to an image reduced by k: corners are divided by k and rounded
/// to nearest, then clamped to keep the 1-pixel margin. Throws
/// InvalidBoundingBox when the reduced image cannot hold a valid box.
BoundingBox scale_box(const BoundingBox& box, int k, int reduced_w, int reduced_h);

/// downsample -> segment -> classify -> mcut_score for one factor. Failures
/// of any step yield a skipped candidate instead of an exception.
Candidate make_candidate(const Image& img, const BoundingBox& box, int factor, const MeanShiftConfig& ms_cfg,
                         const FgConfig& fg_cfg);

/// One candidate per configured factor, in factor order, with the
/// selection already applied. Throws NoViableCandidate if all are skipped.
CandidateSet generate_candidates(const Image& img, const BoundingBox& box, const MeanShiftConfig& ms_cfg,
                                 const FgConfig& fg_cfg, const MultiresConfig& mr_cfg = {},
                                 const Deadline& deadline = {});

/// Argmax over scores, -inf meaning skipped; ties go to the lower index.
int select_index(std::span<const double> scores);
int select(const CandidateSet& cs);

/// Returns a copy with selected_index = i. Throws InvalidOverride when i is
/// out of range or skipped.
CandidateSet override_selection(const CandidateSet& cs, int i);

}  // namespace matteforge
