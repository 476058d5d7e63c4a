#include "matteforge/pipeline.hpp"

#include <chrono>

#include "matteforge/error.hpp"
#include "matteforge/imaging.hpp"

namespace matteforge {

namespace {

class StageTimer {
public:
    StageTimer(std::map<std::string, double>& sink, std::string stage)
        : sink_(sink), stage_(std::move(stage)), start_(std::chrono::steady_clock::now()) {}
    ~StageTimer() {
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        sink_[stage_] = std::chrono::duration<double, std::milli>(elapsed).count();
    }

private:
    std::map<std::string, double>& sink_;
    std::string stage_;
    std::chrono::steady_clock::time_point start_;
};

// Runs fn, tagging any Error that escapes with the stage name.
template <typename Fn>
auto run_stage(const std::string& stage, const Deadline& deadline, Fn&& fn) {
    deadline.check(stage);
    try {
        return fn();
    } catch (Error& e) {
        if (e.stage().empty()) e.with_stage(stage);
        throw;
    }
}

}  // namespace

void PipelineConfig::validate() const {
    mean_shift.validate();
    figure_ground.validate();
    multires.validate();
    trimap.validate();
    matting.validate();
}

CandidateSet override_by_factor(const CandidateSet& cs, int factor) {
    const auto index = cs.index_of_factor(factor);
    if (!index) throw Error(ErrorCode::InvalidOverride, "no candidate at factor " + std::to_string(factor));
    return override_selection(cs, *index);
}

PipelineResult segment_image(const Image& img, const BoundingBox& box, const PipelineConfig& cfg,
                             std::optional<int> override_factor, const Deadline& deadline) {
    run_stage("validate", deadline, [&] {
        cfg.validate();
        box.validate(img.width(), img.height());
        return 0;
    });
    std::map<std::string, double> timings;
    CandidateSet candidates;
    {
        StageTimer timer(timings, "candidates");
        candidates = run_stage("candidates", deadline, [&] {
            return generate_candidates(img, box, cfg.mean_shift, cfg.figure_ground, cfg.multires, deadline);
        });
    }
    if (override_factor) {
        candidates = run_stage("override", deadline, [&] { return override_by_factor(candidates, *override_factor); });
    }
    PipelineResult result = finish_from_candidates(img, box, std::move(candidates), cfg, deadline);
    result.timings_ms.insert(timings.begin(), timings.end());
    return result;
}

PipelineResult finish_from_candidates(const Image& img, const BoundingBox& box, CandidateSet candidates,
                                      const PipelineConfig& cfg, const Deadline& deadline) {
    PipelineResult result;
    result.candidates = std::move(candidates);
    const Candidate& chosen = run_stage("select", deadline, [&]() -> const Candidate& {
        return result.candidates.selected();
    });
    if (chosen.skipped()) {
        throw Error(ErrorCode::InvalidOverride, "selected candidate was skipped").with_stage("select");
    }
    {
        StageTimer timer(result.timings_ms, "trimap");
        result.trimap = run_stage("trimap", deadline, [&] {
            return build_trimap(chosen.labeling->mask, img.width(), img.height(), chosen.factor, cfg.trimap);
        });
    }
    {
        StageTimer timer(result.timings_ms, "matting");
        auto solution = run_stage("matting", deadline, [&] {
            const MattingLaplacian lap = build_laplacian(img, cfg.matting);
            return solve_alpha_detailed(lap, result.trimap, cfg.matting, deadline);
        });
        result.matte = std::move(solution.matte);
        result.matting_iterations = solution.iterations;
        result.pre_refine_mask = binarize(result.matte);
    }
    {
        StageTimer timer(result.timings_ms, "refine");
        result.final_mask =
            run_stage("refine", deadline, [&] { return apply_refinement(img, result.pre_refine_mask, box, cfg); });
    }
    return result;
}

namespace {

struct Refinement {
    enum class Status { Classified, AllSeeded, Fallback };
    Status status = Status::Fallback;
    PatchMap pm;
    std::vector<std::uint8_t> seeds;
    FgLabeling labeling;
};

// Re-seeded classification at full resolution. Falls back when the image is
// too small, yields too few patches, or nothing can be seeded.
Refinement refine_patches(const Image& img, const BinaryMask& matting_mask, const BoundingBox& box,
                          const PipelineConfig& cfg) {
    if (matting_mask.width() != img.width() || matting_mask.height() != img.height()) {
        throw Error(ErrorCode::DimensionMismatch, "matting mask must be at the original resolution");
    }
    Refinement r;
    if (matting_mask.foreground_count() == 0) return r;
    try {
        r.pm = segment(img, cfg.mean_shift);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ImageTooSmall) return r;
        throw;
    }
    if (r.pm.count() < cfg.figure_ground.min_patches) return r;

    std::vector<size_t> background_pixels(size_t(r.pm.count()), 0);
    for (size_t i = 0; i < matting_mask.pixel_count(); ++i)
        if (!matting_mask.foreground(i)) ++background_pixels[size_t(r.pm.id_at(i))];
    const auto overlap = box_overlap(r.pm, box);
    r.seeds.assign(size_t(r.pm.count()), 0);
    bool any_seed = false;
    bool any_candidate = false;
    for (int id = 0; id < r.pm.count(); ++id) {
        const bool majority_bg = 2 * background_pixels[size_t(id)] > r.pm.patch(id).area;
        r.seeds[size_t(id)] = majority_bg || overlap[size_t(id)] == 0.0 ? 1 : 0;
        any_seed |= r.seeds[size_t(id)] != 0;
        any_candidate |= r.seeds[size_t(id)] == 0;
    }
    if (!any_seed) return r;
    if (!any_candidate) {
        r.status = Refinement::Status::AllSeeded;
        return r;
    }
    r.labeling = classify_with_seeds(r.pm, r.seeds, cfg.figure_ground);
    r.status = Refinement::Status::Classified;
    return r;
}

}  // namespace

BinaryMask refine_mask(const Image& img, const BinaryMask& matting_mask, const BoundingBox& box,
                       const PipelineConfig& cfg) {
    const Refinement r = refine_patches(img, matting_mask, box, cfg);
    switch (r.status) {
        case Refinement::Status::Classified: return r.labeling.mask;
        case Refinement::Status::AllSeeded: return BinaryMask(img.width(), img.height());
        case Refinement::Status::Fallback: break;
    }
    return matting_mask;
}

BinaryMask apply_refinement(const Image& img, const BinaryMask& matting_mask, const BoundingBox& box,
                            const PipelineConfig& cfg) {
    const Refinement r = refine_patches(img, matting_mask, box, cfg);
    BinaryMask out = matting_mask;
    if (r.status != Refinement::Status::Classified) return out;
    for (size_t i = 0; i < out.pixel_count(); ++i) {
        const int id = r.pm.id_at(i);
        if (!r.seeds[size_t(id)] && !r.labeling.patch_foreground[size_t(id)]) out.set(i, false);
    }
    return out;
}

}  // namespace matteforge
