#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "matteforge/image.hpp"
#include "matteforge/image_io.hpp"
#include "matteforge/pipeline.hpp"

namespace matteforge::bench {

inline constexpr int kClutterThreshold = 300;

struct DatasetEntry {
    std::string id;
    std::filesystem::path image;
    std::filesystem::path ground_truth;
    /// Explicit box from the manifest or an imported annotation. Absent means
    /// "tight ground-truth box dilated by the looseness factor".
    std::optional<BoundingBox> box;
};

/// Manifest format:
///   {"entries": [{"id": "...", "image": "a.png", "ground_truth": "a_gt.png",
///                 "bbox": [x, y, w, h], "annotation": "a_rect.png"}]}
/// "bbox" and "annotation" are optional. Relative paths resolve against the
/// manifest's directory. Throws InvalidArgument for malformed manifests.
std::vector<DatasetEntry> load_manifest(const std::filesystem::path& path);
std::vector<DatasetEntry> parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Importer for grabcut-style rect/lasso annotation rasters: every nonzero
/// pixel belongs to the user's region, and the box is its tight extent
/// clamped to keep a 1 px margin.
BoundingBox box_from_annotation(const io::GrayImage& annotation);

/// Scales `box` about its center by `looseness` and clamps it to keep a 1 px
/// margin inside a width x height image.
BoundingBox dilate_box(const BoundingBox& box, double looseness, int width, int height);

struct MaskScores {
    double f_measure = 0.0;
    double precision = 0.0;
    double recall = 0.0;
};

/// Pixel precision/recall/F of `pred` against `gt`. Both empty scores 1,
/// exactly one empty scores 0. Throws DimensionMismatch.
MaskScores score_masks(const BinaryMask& pred, const BinaryMask& gt);
double f_measure(const BinaryMask& pred, const BinaryMask& gt);

/// True iff the segmentation has more than `threshold` patches touching the box.
bool exceeds_clutter_threshold(int roi_patches, int threshold = kClutterThreshold);
bool is_cluttered(const Image& img, const BoundingBox& box, const MeanShiftConfig& ms_cfg,
                  int threshold = kClutterThreshold);

enum class Strategy { Full, NoRefine, SingleResolution };
std::string_view strategy_name(Strategy s);
/// Accepts "full", "no-refine", "single-resolution".
std::optional<Strategy> parse_strategy(std::string_view name);
const std::vector<Strategy>& all_strategies();

struct BenchConfig {
    PipelineConfig pipeline;
    std::vector<double> looseness{1.0};
    bool filter_cluttered = false;
    int clutter_threshold = kClutterThreshold;
    int workers = 1;
    /// When set, each prediction is written to <mask_dir>/<id>/<strategy>_l<looseness>.png.
    std::optional<std::filesystem::path> mask_dir;
};

struct StrategyResult {
    std::string strategy;
    double looseness = 1.0;
    bool ok = false;
    std::string error;
    MaskScores scores;
    int selected_factor = 0;
    /// Candidate patch counts in factor order (full and no-refine), or the
    /// single full-resolution count.
    std::vector<int> patch_counts;
    std::map<std::string, double> timings_ms;
};

struct EntryRecord {
    std::string id;
    bool ok = false;
    std::string error;
    std::optional<int> roi_patches;
    std::vector<StrategyResult> results;
};

struct StrategySummary {
    std::string strategy;
    double looseness = 1.0;
    size_t evaluated = 0;
    size_t failed = 0;
    double mean_f_measure = 0.0;
    double mean_precision = 0.0;
    double mean_recall = 0.0;
};

struct EvalReport {
    std::vector<EntryRecord> records;
    std::vector<StrategySummary> aggregates;
    std::vector<std::string> filtered_out;
    std::vector<std::string> warnings;

    const StrategySummary* summary(std::string_view strategy, double looseness) const;
};

/// Evaluates every strategy at every looseness on every entry. A pipeline
/// failure scores the strategy as an empty prediction and records the error;
/// an entry whose inputs cannot be loaded is marked failed and left out of
/// the aggregates. Entries run concurrently on cfg.workers threads; the
/// report does not depend on scheduling.
EvalReport run_benchmark(const std::vector<DatasetEntry>& dataset, const std::vector<Strategy>& strategies,
                         const BenchConfig& cfg);

/// Report as JSON. Timings are included only when `include_timings`.
nlohmann::json report_to_json(const EvalReport& report, const BenchConfig& cfg, bool include_timings = true);
/// One row per (entry, strategy, looseness); timings are not included.
std::string report_to_csv(const EvalReport& report);

}  // namespace matteforge::bench
