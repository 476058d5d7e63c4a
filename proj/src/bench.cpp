#include "matteforge/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "matteforge/config.hpp"
#include "matteforge/error.hpp"
#include "matteforge/figureground.hpp"
#include "matteforge/fixtures.hpp"
#include "matteforge/parallel.hpp"
#include "matteforge/superpixel.hpp"

namespace matteforge::bench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string looseness_tag(double looseness) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", looseness);
    return buf;
}

BoundingBox clamp_box(double x0, double y0, double x1, double y1, int width, int height) {
    const int bx0 = std::max(1, int(std::floor(x0)));
    const int by0 = std::max(1, int(std::floor(y0)));
    const int bx1 = std::min(width - 1, int(std::ceil(x1)));
    const int by1 = std::min(height - 1, int(std::ceil(y1)));
    return BoundingBox{bx0, by0, bx1 - bx0, by1 - by0};
}

BoundingBox entry_box(const DatasetEntry& entry, const BinaryMask& gt, double looseness) {
    if (entry.box) return dilate_box(*entry.box, looseness, gt.width(), gt.height());
    return fixtures::box_around(gt, looseness);
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

void write_prediction(const BenchConfig& cfg, const std::string& id, const StrategyResult& r,
                      const BinaryMask& mask) {
    if (!cfg.mask_dir) return;
    const fs::path dir = *cfg.mask_dir / id;
    fs::create_directories(dir);
    io::write_file(dir / (r.strategy + "_l" + looseness_tag(r.looseness) + ".png"), io::encode_mask_png(mask));
}

StrategyResult make_result(Strategy s, double looseness) {
    StrategyResult r;
    r.strategy = std::string(strategy_name(s));
    r.looseness = looseness;
    return r;
}

void fill_scores(StrategyResult& r, const BinaryMask& pred, const BinaryMask& gt) { r.scores = score_masks(pred, gt); }

// Full and no-refine share one pipeline run.
void run_pipeline_strategies(const Image& img, const BinaryMask& gt, const BoundingBox& box, double looseness,
                             bool want_full, bool want_no_refine, const BenchConfig& cfg, EntryRecord& record) {
    StrategyResult full = make_result(Strategy::Full, looseness);
    StrategyResult raw = make_result(Strategy::NoRefine, looseness);
    const BinaryMask empty(img.width(), img.height());
    try {
        const PipelineResult result = segment_image(img, box, cfg.pipeline);
        std::vector<int> counts;
        for (const auto& c : result.candidates.candidates) counts.push_back(c.patch_count);
        for (auto* r : {&full, &raw}) {
            r->ok = true;
            r->selected_factor = result.selected_factor();
            r->patch_counts = counts;
            r->timings_ms = result.timings_ms;
        }
        fill_scores(full, result.final_mask, gt);
        fill_scores(raw, result.pre_refine_mask, gt);
        if (want_full) write_prediction(cfg, record.id, full, result.final_mask);
        if (want_no_refine) write_prediction(cfg, record.id, raw, result.pre_refine_mask);
    } catch (const Error& e) {
        for (auto* r : {&full, &raw}) {
            r->error = e.stage().empty() ? e.what() : e.stage() + ": " + e.what();
            fill_scores(*r, empty, gt);
        }
    }
    if (want_full) record.results.push_back(std::move(full));
    if (want_no_refine) record.results.push_back(std::move(raw));
}

void run_single_resolution(const Image& img, const BinaryMask& gt, const BoundingBox& box, double looseness,
                           const BenchConfig& cfg, EntryRecord& record) {
    StrategyResult r = make_result(Strategy::SingleResolution, looseness);
    const auto start = std::chrono::steady_clock::now();
    try {
        const PatchMap pm = segment(img, cfg.pipeline.mean_shift);
        r.patch_counts = {pm.count()};
        const FgLabeling labeling = classify(pm, box, cfg.pipeline.figure_ground);
        r.ok = true;
        r.selected_factor = 1;
        fill_scores(r, labeling.mask, gt);
        write_prediction(cfg, record.id, r, labeling.mask);
    } catch (const Error& e) {
        r.error = e.what();
        fill_scores(r, BinaryMask(img.width(), img.height()), gt);
    }
    r.timings_ms["total"] = elapsed_ms(start);
    record.results.push_back(std::move(r));
}

struct EntryOutcome {
    EntryRecord record;
    bool filtered = false;
};

EntryOutcome evaluate_entry(const DatasetEntry& entry, const std::vector<Strategy>& strategies,
                            const BenchConfig& cfg) {
    EntryOutcome out;
    out.record.id = entry.id;
    Image img;
    BinaryMask gt;
    try {
        img = io::read_image(entry.image);
        gt = io::read_mask(entry.ground_truth);
        if (gt.width() != img.width() || gt.height() != img.height()) {
            throw Error(ErrorCode::DimensionMismatch, "ground truth size differs from the image");
        }
        if (cfg.filter_cluttered) {
            const BoundingBox box = entry_box(entry, gt, 1.0);
            box.validate(img.width(), img.height());
            const int roi = count_patches_in_roi(segment(img, cfg.pipeline.mean_shift), box);
            out.record.roi_patches = roi;
            if (!exceeds_clutter_threshold(roi, cfg.clutter_threshold)) {
                out.filtered = true;
                return out;
            }
        }
    } catch (const Error& e) {
        out.record.error = e.what();
        return out;
    }
    out.record.ok = true;

    const auto wants = [&](Strategy s) { return std::find(strategies.begin(), strategies.end(), s) != strategies.end(); };
    for (const double looseness : cfg.looseness) {
        BoundingBox box;
        try {
            box = entry_box(entry, gt, looseness);
        } catch (const Error& e) {
            out.record.ok = false;
            out.record.error = e.what();
            out.record.results.clear();
            return out;
        }
        if (wants(Strategy::Full) || wants(Strategy::NoRefine)) {
            run_pipeline_strategies(img, gt, box, looseness, wants(Strategy::Full), wants(Strategy::NoRefine), cfg,
                                    out.record);
        }
        if (wants(Strategy::SingleResolution)) run_single_resolution(img, gt, box, looseness, cfg, out.record);
    }
    return out;
}

std::optional<BoundingBox> parse_bbox(const json& v) {
    if (v.is_null()) return std::nullopt;
    if (!v.is_array() || v.size() != 4) throw Error(ErrorCode::InvalidArgument, "bbox must be [x, y, w, h]");
    return BoundingBox{v[0].get<int>(), v[1].get<int>(), v[2].get<int>(), v[3].get<int>()};
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string format_measure(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

}  // namespace

std::vector<DatasetEntry> parse_manifest(const json& doc, const fs::path& base_dir) {
    if (!doc.is_object() || !doc.contains("entries") || !doc["entries"].is_array()) {
        throw Error(ErrorCode::InvalidArgument, "manifest must be an object with an \"entries\" array");
    }
    const auto resolve = [&](const std::string& p) {
        const fs::path path(p);
        return path.is_absolute() ? path : base_dir / path;
    };
    std::vector<DatasetEntry> out;
    try {
        for (const auto& e : doc["entries"]) {
            DatasetEntry entry;
            entry.image = resolve(e.at("image").get<std::string>());
            entry.ground_truth = resolve(e.at("ground_truth").get<std::string>());
            entry.id = e.contains("id") ? e["id"].get<std::string>() : entry.image.stem().string();
            if (e.contains("bbox")) entry.box = parse_bbox(e["bbox"]);
            if (!entry.box && e.contains("annotation")) {
                entry.box = box_from_annotation(
                    io::decode_gray_png(io::read_file(resolve(e["annotation"].get<std::string>()))));
            }
            out.push_back(std::move(entry));
        }
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::InvalidArgument, std::string("malformed manifest entry: ") + ex.what());
    }
    return out;
}

std::vector<DatasetEntry> load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open manifest " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& ex) {
        throw Error(ErrorCode::InvalidArgument, std::string("manifest is not valid JSON: ") + ex.what());
    }
    return parse_manifest(doc, path.parent_path());
}

BoundingBox box_from_annotation(const io::GrayImage& annotation) {
    int x0 = annotation.width, y0 = annotation.height, x1 = -1, y1 = -1;
    for (int y = 0; y < annotation.height; ++y) {
        for (int x = 0; x < annotation.width; ++x) {
            if (annotation.values[size_t(y) * size_t(annotation.width) + size_t(x)] == 0) continue;
            x0 = std::min(x0, x);
            y0 = std::min(y0, y);
            x1 = std::max(x1, x);
            y1 = std::max(y1, y);
        }
    }
    if (x1 < 0) throw Error(ErrorCode::InvalidBoundingBox, "annotation marks no pixels");
    return clamp_box(x0, y0, x1 + 1, y1 + 1, annotation.width, annotation.height);
}

BoundingBox dilate_box(const BoundingBox& box, double looseness, int width, int height) {
    const double cx = box.x + 0.5 * box.w;
    const double cy = box.y + 0.5 * box.h;
    const double hw = 0.5 * box.w * looseness;
    const double hh = 0.5 * box.h * looseness;
    return clamp_box(cx - hw, cy - hh, cx + hw, cy + hh, width, height);
}

MaskScores score_masks(const BinaryMask& pred, const BinaryMask& gt) {
    if (pred.width() != gt.width() || pred.height() != gt.height()) {
        throw Error(ErrorCode::DimensionMismatch, "prediction and ground truth differ in size");
    }
    size_t np = 0, ng = 0, both = 0;
    for (size_t i = 0; i < gt.pixel_count(); ++i) {
        const bool p = pred.foreground(i);
        const bool g = gt.foreground(i);
        np += p;
        ng += g;
        both += p && g;
    }
    if (np == 0 && ng == 0) return {1.0, 1.0, 1.0};
    if (np == 0 || ng == 0) return {0.0, 0.0, 0.0};
    MaskScores s;
    s.precision = double(both) / double(np);
    s.recall = double(both) / double(ng);
    s.f_measure = both == 0 ? 0.0 : 2.0 * s.precision * s.recall / (s.precision + s.recall);
    return s;
}

double f_measure(const BinaryMask& pred, const BinaryMask& gt) { return score_masks(pred, gt).f_measure; }

bool exceeds_clutter_threshold(int roi_patches, int threshold) { return roi_patches > threshold; }

bool is_cluttered(const Image& img, const BoundingBox& box, const MeanShiftConfig& ms_cfg, int threshold) {
    return exceeds_clutter_threshold(count_patches_in_roi(segment(img, ms_cfg), box), threshold);
}

std::string_view strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Full: return "full";
        case Strategy::NoRefine: return "no-refine";
        case Strategy::SingleResolution: return "single-resolution";
    }
    return "unknown";
}

std::optional<Strategy> parse_strategy(std::string_view name) {
    for (Strategy s : all_strategies())
        if (strategy_name(s) == name) return s;
    return std::nullopt;
}

const std::vector<Strategy>& all_strategies() {
    static const std::vector<Strategy> all{Strategy::Full, Strategy::NoRefine, Strategy::SingleResolution};
    return all;
}

const StrategySummary* EvalReport::summary(std::string_view strategy, double looseness) const {
    for (const auto& s : aggregates)
        if (s.strategy == strategy && s.looseness == looseness) return &s;
    return nullptr;
}

EvalReport run_benchmark(const std::vector<DatasetEntry>& dataset, const std::vector<Strategy>& strategies,
                         const BenchConfig& cfg) {
    cfg.pipeline.validate();
    if (cfg.looseness.empty()) throw Error(ErrorCode::InvalidArgument, "looseness list is empty");
    for (double l : cfg.looseness)
        if (!(l >= 1.0)) throw Error(ErrorCode::InvalidArgument, "looseness factors must be >= 1");

    std::vector<EntryOutcome> outcomes(dataset.size());
    parallel_for(dataset.size(), std::max(1, cfg.workers), [&](size_t begin, size_t end) {
        for (size_t i = begin; i < end; ++i) outcomes[i] = evaluate_entry(dataset[i], strategies, cfg);
    });

    EvalReport report;
    for (auto& o : outcomes) {
        if (o.filtered) {
            report.filtered_out.push_back(o.record.id);
            continue;
        }
        if (!o.record.ok) report.warnings.push_back("entry '" + o.record.id + "' failed: " + o.record.error);
        report.records.push_back(std::move(o.record));
    }
    if (cfg.filter_cluttered && report.records.empty()) {
        report.warnings.push_back("clutter filter left no entries to evaluate");
    }

    // Aggregates in (strategy order, looseness order).
    for (Strategy s : strategies) {
        for (double l : cfg.looseness) {
            StrategySummary sum;
            sum.strategy = std::string(strategy_name(s));
            sum.looseness = l;
            for (const auto& rec : report.records) {
                for (const auto& r : rec.results) {
                    if (r.strategy != sum.strategy || r.looseness != l) continue;
                    ++sum.evaluated;
                    sum.failed += r.ok ? 0 : 1;
                    sum.mean_f_measure += r.scores.f_measure;
                    sum.mean_precision += r.scores.precision;
                    sum.mean_recall += r.scores.recall;
                }
            }
            if (sum.evaluated > 0) {
                const double n = double(sum.evaluated);
                sum.mean_f_measure /= n;
                sum.mean_precision /= n;
                sum.mean_recall /= n;
            }
            report.aggregates.push_back(sum);
        }
    }
    return report;
}

json report_to_json(const EvalReport& report, const BenchConfig& cfg, bool include_timings) {
    json config = json::object();
    for (const auto& [k, v] : describe(cfg.pipeline)) config[k] = v;
    config["looseness"] = cfg.looseness;
    config["filter-cluttered"] = cfg.filter_cluttered;
    config["clutter-threshold"] = cfg.clutter_threshold;

    json records = json::array();
    for (const auto& rec : report.records) {
        json results = json::array();
        for (const auto& r : rec.results) {
            json jr{{"strategy", r.strategy},
                    {"looseness", r.looseness},
                    {"status", r.ok ? "ok" : "failed"},
                    {"f_measure", r.scores.f_measure},
                    {"precision", r.scores.precision},
                    {"recall", r.scores.recall},
                    {"selected_factor", r.selected_factor},
                    {"patch_counts", r.patch_counts}};
            if (!r.ok) jr["error"] = r.error;
            if (include_timings) jr["timings_ms"] = r.timings_ms;
            results.push_back(std::move(jr));
        }
        json jrec{{"id", rec.id}, {"status", rec.ok ? "ok" : "failed"}, {"results", std::move(results)}};
        if (!rec.ok) jrec["error"] = rec.error;
        if (rec.roi_patches) jrec["roi_patches"] = *rec.roi_patches;
        records.push_back(std::move(jrec));
    }

    json aggregates = json::array();
    for (const auto& s : report.aggregates) {
        aggregates.push_back({{"strategy", s.strategy},
                              {"looseness", s.looseness},
                              {"evaluated", s.evaluated},
                              {"failed", s.failed},
                              {"mean_f_measure", s.mean_f_measure},
                              {"mean_precision", s.mean_precision},
                              {"mean_recall", s.mean_recall}});
    }
    return json{{"config", std::move(config)},
                {"records", std::move(records)},
                {"aggregates", std::move(aggregates)},
                {"filtered_out", report.filtered_out},
                {"warnings", report.warnings}};
}

std::string report_to_csv(const EvalReport& report) {
    std::ostringstream out;
    out << "id,strategy,looseness,status,f_measure,precision,recall,selected_factor,patch_counts,error\n";
    for (const auto& rec : report.records) {
        if (!rec.ok) {
            out << csv_escape(rec.id) << ",,,failed,,,,,," << csv_escape(rec.error) << "\n";
            continue;
        }
        for (const auto& r : rec.results) {
            std::string counts;
            for (size_t i = 0; i < r.patch_counts.size(); ++i) {
                if (i) counts += ";";
                counts += std::to_string(r.patch_counts[i]);
            }
            out << csv_escape(rec.id) << ',' << r.strategy << ',' << looseness_tag(r.looseness) << ','
                << (r.ok ? "ok" : "failed") << ',' << format_measure(r.scores.f_measure) << ','
                << format_measure(r.scores.precision) << ',' << format_measure(r.scores.recall) << ','
                << r.selected_factor << ',' << counts << ',' << csv_escape(r.error) << "\n";
        }
    }
    return out.str();
}

}  // namespace matteforge::bench
