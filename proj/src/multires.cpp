#include "matteforge/multires.hpp"

#include <algorithm>
#include <cmath>

#include "matteforge/error.hpp"
#include "matteforge/imaging.hpp"

namespace matteforge {

const Candidate& CandidateSet::selected() const {
    if (!selected_index) throw Error(ErrorCode::NoViableCandidate, "no candidate selected");
    return candidates.at(size_t(*selected_index));
}

std::optional<int> CandidateSet::index_of_factor(int factor) const {
    for (size_t i = 0; i < candidates.size(); ++i)
        if (candidates[i].factor == factor) return int(i);
    return std::nullopt;
}

void MultiresConfig::validate() const {
    if (factors.empty()) throw Error(ErrorCode::InvalidArgument, "at least one resolution factor is required");
    for (int k : factors)
        if (k < 1) throw Error(ErrorCode::InvalidArgument, "resolution factors must be >= 1");
}

BoundingBox scale_box(const BoundingBox& box, int k, int reduced_w, int reduced_h) {
    auto scale = [k](int v) { return int(std::lround(double(v) / double(k))); };
    int x0 = std::max(1, scale(box.x));
    int y0 = std::max(1, scale(box.y));
    int x1 = std::min(reduced_w - 1, scale(box.x + box.w));
    int y1 = std::min(reduced_h - 1, scale(box.y + box.h));
    x0 = std::min(x0, reduced_w - 2);
    y0 = std::min(y0, reduced_h - 2);
    x1 = std::max(x1, x0 + 1);
    y1 = std::max(y1, y0 + 1);
    BoundingBox out{x0, y0, x1 - x0, y1 - y0};
    out.validate(reduced_w, reduced_h);
    return out;
}

Candidate make_candidate(const Image& img, const BoundingBox& box, int factor, const MeanShiftConfig& ms_cfg,
                         const FgConfig& fg_cfg) {
    Candidate c;
    c.factor = factor;
    try {
        c.image = downsample(img, factor);
        c.box = scale_box(box, factor, c.image.width(), c.image.height());
        const PatchMap pm = segment(c.image, ms_cfg);
        c.patch_count = pm.count();
        FgLabeling labeling = classify(pm, c.box, fg_cfg);
        c.score = mcut_score(labeling, pm);
        c.labeling = std::move(labeling);
    } catch (const Error& e) {
        c.labeling.reset();
        c.score = kSkippedScore;
        c.skip_reason = e.what();
    }
    return c;
}

CandidateSet generate_candidates(const Image& img, const BoundingBox& box, const MeanShiftConfig& ms_cfg,
                                 const FgConfig& fg_cfg, const MultiresConfig& mr_cfg, const Deadline& deadline) {
    mr_cfg.validate();
    ms_cfg.validate();
    fg_cfg.validate();
    box.validate(img.width(), img.height());

    CandidateSet cs;
    cs.candidates.resize(mr_cfg.factors.size());
    // Candidates are independent; the mean-shift inside each one already
    // spreads over the worker pool, so they run one after another here.
    for (size_t i = 0; i < mr_cfg.factors.size(); ++i) {
        deadline.check("candidates");
        cs.candidates[i] = make_candidate(img, box, mr_cfg.factors[i], ms_cfg, fg_cfg);
    }
    cs.selected_index = select(cs);
    return cs;
}

int select_index(std::span<const double> scores) {
    int best = -1;
    for (size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] == kSkippedScore || std::isnan(scores[i])) continue;
        if (best < 0 || scores[i] > scores[size_t(best)]) best = int(i);
    }
    if (best < 0) throw Error(ErrorCode::NoViableCandidate, "every resolution was skipped");
    return best;
}

int select(const CandidateSet& cs) {
    std::vector<double> scores;
    scores.reserve(cs.candidates.size());
    for (const auto& c : cs.candidates) scores.push_back(c.skipped() ? kSkippedScore : c.score);
    return select_index(scores);
}

CandidateSet override_selection(const CandidateSet& cs, int i) {
    if (i < 0 || size_t(i) >= cs.candidates.size()) {
        throw Error(ErrorCode::InvalidOverride, "candidate index " + std::to_string(i) + " out of range");
    }
    if (cs.candidates[size_t(i)].skipped()) {
        throw Error(ErrorCode::InvalidOverride,
                    "candidate at factor " + std::to_string(cs.candidates[size_t(i)].factor) + " was skipped");
    }
    CandidateSet out = cs;
    out.selected_index = i;
    return out;
}

}  // namespace matteforge
