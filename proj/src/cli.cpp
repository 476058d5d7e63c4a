#include "matteforge/cli.hpp"

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "matteforge/bench.hpp"
#include "matteforge/config.hpp"
#include "matteforge/debug_dump.hpp"
#include "matteforge/error.hpp"
#include "matteforge/fixtures.hpp"
#include "matteforge/image_io.hpp"
#include "matteforge/parallel.hpp"
#include "matteforge/pipeline.hpp"

namespace matteforge::cli {

namespace fs = std::filesystem;

namespace {

// Flags that mirror configuration keys, collected as raw strings so the
// config file can be applied first and flags override it.
struct ConfigFlags {
    std::string config_file;
    std::map<std::string, std::string> values;

    void attach(CLI::App& app) {
        app.add_option("--config", config_file, "Flat key = value configuration file")->check(CLI::ExistingFile);
        for (const auto& key : config_keys()) {
            app.add_option_function<std::string>(
                "--" + key, [this, key](const std::string& v) { values[key] = v; }, "Overrides '" + key + "'");
        }
    }

    PipelineConfig resolve() const {
        PipelineConfig cfg;
        if (!config_file.empty()) {
            std::ifstream in(config_file);
            std::stringstream text;
            text << in.rdbuf();
            for (const auto& [k, v] : parse_config_text(text.str())) apply_setting(cfg, k, v);
        }
        for (const auto& [k, v] : values) apply_setting(cfg, k, v);
        cfg.validate();
        return cfg;
    }
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(item);
    return out;
}

BoundingBox parse_bbox(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 4) throw Error(ErrorCode::InvalidArgument, "--bbox expects X,Y,W,H");
    int v[4];
    for (size_t i = 0; i < 4; ++i) {
        try {
            size_t used = 0;
            v[i] = std::stoi(parts[i], &used);
            if (used != parts[i].size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "--bbox component '" + parts[i] + "' is not an integer");
        }
    }
    return BoundingBox{v[0], v[1], v[2], v[3]};
}

struct SegmentArgs {
    std::string input;
    std::string bbox;
    std::string out;
    std::optional<int> override_factor;
    bool dump = false;
    ConfigFlags config;
};

int cmd_segment(const SegmentArgs& a, std::ostream& out, std::ostream& err) {
    PipelineConfig cfg;
    Image img;
    BoundingBox box;
    try {
        cfg = a.config.resolve();
        box = parse_bbox(a.bbox);
        img = io::read_image(a.input);
        box.validate(img.width(), img.height());
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidArgs;
    }
    try {
        const PipelineResult result = segment_image(img, box, cfg, a.override_factor);
        debug::write_result(result, a.out, a.dump);
        if (a.dump) {
            std::ofstream(fs::path(a.out) / "config.txt") << render_config_text(cfg);
        }
        out << "selected factor " << result.selected_factor() << ", foreground "
            << result.final_mask.foreground_count() << " px\n";
    } catch (const Error& e) {
        err << "error";
        if (!e.stage().empty()) err << " in stage '" << e.stage() << "'";
        err << ": " << e.what() << "\n";
        return kExitPipelineError;
    }
    return kExitOk;
}

struct BenchArgs {
    std::string manifest;
    std::string out;
    std::string strategies = "full,no-refine,single-resolution";
    std::string looseness = "1.0";
    bool filter_cluttered = false;
    int workers = 0;
    ConfigFlags config;
};

int cmd_bench(const BenchArgs& a, std::ostream& out, std::ostream& err) {
    bench::BenchConfig cfg;
    std::vector<bench::Strategy> strategies;
    std::vector<bench::DatasetEntry> entries;
    try {
        cfg.pipeline = a.config.resolve();
        for (const auto& name : split(a.strategies, ',')) {
            if (name.empty()) continue;
            const auto s = bench::parse_strategy(name);
            if (!s) throw Error(ErrorCode::InvalidArgument, "unknown strategy '" + name + "'");
            strategies.push_back(*s);
        }
        cfg.looseness.clear();
        for (const auto& l : split(a.looseness, ',')) {
            try {
                cfg.looseness.push_back(std::stod(l));
            } catch (const std::exception&) {
                throw Error(ErrorCode::InvalidArgument, "--looseness value '" + l + "' is not a number");
            }
        }
        cfg.filter_cluttered = a.filter_cluttered;
        cfg.workers = a.workers > 0 ? std::min(a.workers, worker_count()) : worker_count();
        cfg.mask_dir = fs::path(a.out) / "masks";
        entries = bench::load_manifest(a.manifest);
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidArgs;
    }
    try {
        const bench::EvalReport report = bench::run_benchmark(entries, strategies, cfg);
        fs::create_directories(a.out);
        std::ofstream(fs::path(a.out) / "report.json") << bench::report_to_json(report, cfg).dump(2) << "\n";
        std::ofstream(fs::path(a.out) / "report.csv") << bench::report_to_csv(report);
        for (const auto& w : report.warnings) err << "warning: " << w << "\n";
        for (const auto& s : report.aggregates) {
            out << s.strategy << " looseness " << s.looseness << ": mean F " << s.mean_f_measure << " over "
                << s.evaluated << " images\n";
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidArgs;
    }
    return kExitOk;
}

struct FixtureArgs {
    std::string out;
    int count = 10;
    unsigned seed = 1;
    int size = 200;
};

int cmd_fixtures(const FixtureArgs& a, std::ostream& out, std::ostream& err) {
    try {
        const auto manifest = fixtures::write_disk_corpus(a.out, a.count, a.seed, a.size);
        out << manifest.string() << "\n";
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidArgs;
    }
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Foreground extraction from a bounding box", "matteforge"};
    app.require_subcommand(1);

    SegmentArgs seg;
    auto* segment_cmd = app.add_subcommand("segment", "Segment one image");
    segment_cmd->add_option("--input", seg.input, "Input PNG or JPEG")->required()->check(CLI::ExistingFile);
    segment_cmd->add_option("--bbox", seg.bbox, "Bounding box X,Y,W,H")->required();
    segment_cmd->add_option("--out", seg.out, "Output directory")->required();
    segment_cmd->add_option("--override-factor", seg.override_factor, "Use this factor instead of the m-cut choice");
    segment_cmd->add_flag("--dump-intermediates", seg.dump, "Also write matte, trimap and candidate gallery");
    seg.config.attach(*segment_cmd);

    BenchArgs ben;
    auto* bench_cmd = app.add_subcommand("bench", "Evaluate strategies over a dataset manifest");
    bench_cmd->add_option("--manifest", ben.manifest, "Manifest JSON")->required();
    bench_cmd->add_option("--out", ben.out, "Output directory")->required();
    bench_cmd->add_option("--strategies", ben.strategies, "Comma list of full,no-refine,single-resolution");
    bench_cmd->add_option("--looseness", ben.looseness, "Comma list of box dilation factors");
    bench_cmd->add_flag("--filter-cluttered", ben.filter_cluttered, "Evaluate only images with > 300 ROI patches");
    bench_cmd->add_option("--workers", ben.workers, "Concurrent entries (capped by MATTEFORGE_THREADS)");
    ben.config.attach(*bench_cmd);

    FixtureArgs fix;
    auto* fixtures_cmd = app.add_subcommand("fixtures", "Write the synthetic disk corpus");
    fixtures_cmd->add_option("--out", fix.out, "Output directory")->required();
    fixtures_cmd->add_option("--count", fix.count, "Number of images")->check(CLI::PositiveNumber);
    fixtures_cmd->add_option("--seed", fix.seed, "First seed");
    fixtures_cmd->add_option("--size", fix.size, "Image side in pixels")->check(CLI::Range(32, 4096));

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalidArgs;
    }

    if (segment_cmd->parsed()) return cmd_segment(seg, out, err);
    if (bench_cmd->parsed()) return cmd_bench(ben, out, err);
    return cmd_fixtures(fix, out, err);
}

}  // namespace matteforge::cli
