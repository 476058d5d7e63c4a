#include "matteforge/debug_dump.hpp"

#include <fstream>
#include <random>

namespace matteforge::debug {

namespace fs = std::filesystem;
using nlohmann::json;

io::Bytes render_patch_map(const PatchMap& pm, std::uint32_t seed) {
    std::mt19937 engine(seed);
    std::vector<std::array<float, 3>> colors(size_t(pm.count()));
    for (auto& c : colors)
        for (auto& v : c) v = float(engine() % 256u) / 255.0f;
    Image img(pm.width(), pm.height());
    for (int y = 0; y < pm.height(); ++y)
        for (int x = 0; x < pm.width(); ++x) img.set_pixel(x, y, colors[size_t(pm.id_at(x, y))]);
    return io::encode_png(img);
}

json patch_stats_json(const PatchMap& pm) {
    json out = json::array();
    for (const auto& p : pm.patches()) {
        out.push_back({{"id", p.id},
                       {"area", p.area},
                       {"mean_lab", p.mean_lab},
                       {"centroid", p.centroid},
                       {"bbox_overlap", p.bbox_overlap}});
    }
    return out;
}

void dump_patch_map(const PatchMap& pm, const fs::path& dir, const std::string& stem) {
    fs::create_directories(dir);
    io::write_file(dir / (stem + ".png"), render_patch_map(pm));
    std::ofstream(dir / (stem + ".json")) << patch_stats_json(pm).dump(2) << "\n";
}

json candidate_manifest(const CandidateSet& cs) {
    json out = json::array();
    for (size_t i = 0; i < cs.candidates.size(); ++i) {
        const Candidate& c = cs.candidates[i];
        json rec{{"factor", c.factor},
                 {"patch_count", c.patch_count},
                 {"score", c.skipped() ? json(nullptr) : json(c.score)},
                 {"skipped", c.skipped()},
                 {"selected", cs.selected_index && size_t(*cs.selected_index) == i}};
        if (c.skipped()) rec["skip_reason"] = c.skip_reason;
        out.push_back(std::move(rec));
    }
    return out;
}

io::Bytes candidate_mask_png(const Candidate& c) { return io::encode_mask_png(c.labeling.value().mask); }

void dump_candidate_gallery(const CandidateSet& cs, const fs::path& dir) {
    fs::create_directories(dir);
    for (const auto& c : cs.candidates) {
        if (c.skipped()) continue;
        io::write_file(dir / ("candidate-" + std::to_string(c.factor) + ".png"), candidate_mask_png(c));
    }
    std::ofstream(dir / "manifest.json") << candidate_manifest(cs).dump(2) << "\n";
}

void write_result(const PipelineResult& result, const fs::path& dir, bool intermediates) {
    fs::create_directories(dir);
    io::write_file(dir / "final_mask.png", io::encode_mask_png(result.final_mask));
    if (!intermediates) return;
    io::write_file(dir / "matte.png",
                   io::encode_gray_png(result.matte.width(), result.matte.height(), result.matte.gray_values()));
    io::write_file(dir / "trimap.png",
                   io::encode_gray_png(result.trimap.width(), result.trimap.height(), result.trimap.gray_values()));
    io::write_file(dir / "pre_refine_mask.png", io::encode_mask_png(result.pre_refine_mask));
    dump_candidate_gallery(result.candidates, dir / "candidates");
}

}  // namespace matteforge::debug
