#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "matteforge/cli.hpp"
#include "matteforge/fixtures.hpp"
#include "matteforge/image_io.hpp"
#include "temp_dir.hpp"

using namespace matteforge;

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run_cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string bbox_arg(const BoundingBox& b) {
    return std::to_string(b.x) + "," + std::to_string(b.y) + "," + std::to_string(b.w) + "," + std::to_string(b.h);
}

std::string write_fixture(const TempDir& tmp, std::uint32_t seed, BoundingBox& box) {
    const auto fx = fixtures::disk_on_texture(seed);
    box = fx.box;
    const auto path = tmp / ("disk-" + std::to_string(seed) + ".png");
    io::write_file(path, io::encode_png(fx.image));
    return path.string();
}

nlohmann::json read_json(const std::filesystem::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

}  // namespace

TEST(Cli, SegmentWritesMask) {
    TempDir tmp;
    BoundingBox box;
    const std::string input = write_fixture(tmp, 1, box);
    const auto r = run_cli({"segment", "--input", input, "--bbox", bbox_arg(box), "--out", (tmp / "out").string()});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    const BinaryMask mask = io::read_mask(tmp / "out" / "final_mask.png");
    EXPECT_EQ(mask.width(), 200);
    EXPECT_GT(mask.foreground_count(), 0u);
    EXPECT_NE(r.out.find("selected factor"), std::string::npos);
    EXPECT_FALSE(std::filesystem::exists(tmp / "out" / "matte.png"));
}

TEST(Cli, SegmentDumpsIntermediatesAndConfig) {
    TempDir tmp;
    BoundingBox box;
    const std::string input = write_fixture(tmp, 1, box);
    const auto r = run_cli({"segment", "--input", input, "--bbox", bbox_arg(box), "--out", (tmp / "out").string(),
                            "--dump-intermediates", "--matting-lambda", "200"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    for (const char* f : {"matte.png", "trimap.png", "pre_refine_mask.png", "candidates/manifest.json", "config.txt"})
        EXPECT_TRUE(std::filesystem::exists(tmp / "out" / f)) << f;
    std::ifstream cfg(tmp / "out" / "config.txt");
    std::stringstream text;
    text << cfg.rdbuf();
    EXPECT_NE(text.str().find("matting-lambda = 200\n"), std::string::npos);
}

TEST(Cli, ConfigFileThenFlags) {
    TempDir tmp;
    BoundingBox box;
    const std::string input = write_fixture(tmp, 1, box);
    std::ofstream(tmp / "cfg.txt") << "factors = 4\nmatting-lambda = 300\n";
    const auto r = run_cli({"segment", "--input", input, "--bbox", bbox_arg(box), "--out", (tmp / "out").string(),
                            "--config", (tmp / "cfg.txt").string(), "--matting-lambda", "150", "--dump-intermediates"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    EXPECT_NE(r.out.find("selected factor 4"), std::string::npos);
    std::ifstream cfg(tmp / "out" / "config.txt");
    std::stringstream text;
    text << cfg.rdbuf();
    EXPECT_NE(text.str().find("matting-lambda = 150\n"), std::string::npos);
    EXPECT_NE(text.str().find("factors = 4\n"), std::string::npos);
}

TEST(Cli, InvalidArguments) {
    TempDir tmp;
    BoundingBox box;
    const std::string input = write_fixture(tmp, 1, box);
    const std::string out = (tmp / "out").string();
    EXPECT_EQ(run_cli({"segment", "--input", input, "--bbox", "0,0,200,200", "--out", out}).code, cli::kExitInvalidArgs);
    EXPECT_EQ(run_cli({"segment", "--input", input, "--bbox", "150,150,100,100", "--out", out}).code,
              cli::kExitInvalidArgs);
    EXPECT_EQ(run_cli({"segment", "--input", input, "--bbox", "1,2,3", "--out", out}).code, cli::kExitInvalidArgs);
    EXPECT_EQ(run_cli({"segment", "--input", input, "--bbox", "1,2,x,4", "--out", out}).code, cli::kExitInvalidArgs);
    EXPECT_EQ(run_cli({"segment", "--input", (tmp / "none.png").string(), "--bbox", "5,5,10,10", "--out", out}).code,
              cli::kExitInvalidArgs);
    EXPECT_EQ(run_cli({"segment", "--input", input, "--bbox", bbox_arg(box), "--out", out, "--ms-min-area", "0"}).code,
              cli::kExitInvalidArgs);
    EXPECT_EQ(run_cli({"segment", "--input", input, "--bbox", bbox_arg(box), "--out", out, "--bogus", "1"}).code,
              cli::kExitInvalidArgs);
    EXPECT_EQ(run_cli({}).code, cli::kExitInvalidArgs);
    EXPECT_EQ(run_cli({"frobnicate"}).code, cli::kExitInvalidArgs);
    EXPECT_FALSE(std::filesystem::exists(out));
}

TEST(Cli, OverrideToSkippedFactorIsAPipelineError) {
    TempDir tmp;
    BoundingBox box;
    const std::string input = write_fixture(tmp, 29, box);
    const auto r = run_cli({"segment", "--input", input, "--bbox", bbox_arg(box), "--out", (tmp / "out").string(),
                            "--override-factor", "10"});
    EXPECT_EQ(r.code, cli::kExitPipelineError);
    EXPECT_NE(r.err.find("stage 'override'"), std::string::npos) << r.err;
    const auto ok = run_cli({"segment", "--input", input, "--bbox", bbox_arg(box), "--out", (tmp / "out").string(),
                             "--override-factor", "6"});
    EXPECT_EQ(ok.code, cli::kExitOk) << ok.err;
    EXPECT_NE(ok.out.find("selected factor 6"), std::string::npos);
}

TEST(Cli, ConstantImageIsAPipelineError) {
    TempDir tmp;
    Image img(60, 60);
    io::write_file(tmp / "flat.png", io::encode_png(img));
    const auto r = run_cli({"segment", "--input", (tmp / "flat.png").string(), "--bbox", "10,10,40,40", "--out",
                            (tmp / "out").string()});
    EXPECT_EQ(r.code, cli::kExitPipelineError);
    EXPECT_NE(r.err.find("stage 'candidates'"), std::string::npos);
}

TEST(Cli, FixturesAndBench) {
    TempDir tmp;
    const auto fx = run_cli({"fixtures", "--out", (tmp / "corpus").string(), "--count", "2", "--size", "100"});
    ASSERT_EQ(fx.code, cli::kExitOk) << fx.err;
    const std::string manifest = (tmp / "corpus" / "manifest.json").string();
    ASSERT_TRUE(std::filesystem::exists(manifest));

    const auto r = run_cli({"bench", "--manifest", manifest, "--out", (tmp / "report").string(), "--strategies",
                            "full,single-resolution", "--looseness", "1.0,1.2", "--workers", "2"});
    ASSERT_EQ(r.code, cli::kExitOk) << r.err;
    const auto doc = read_json(tmp / "report" / "report.json");
    ASSERT_EQ(doc["records"].size(), 2u);
    EXPECT_EQ(doc["records"][0]["results"].size(), 4u);
    EXPECT_EQ(doc["aggregates"].size(), 4u);
    EXPECT_TRUE(std::filesystem::exists(tmp / "report" / "report.csv"));
    EXPECT_TRUE(std::filesystem::exists(tmp / "report" / "masks" / "disk-001" / "full_l1.20.png"));
    EXPECT_NE(r.out.find("full looseness 1"), std::string::npos);
}

TEST(Cli, BenchEdgeCases) {
    TempDir tmp;
    const auto manifest = fixtures::write_disk_corpus(tmp / "corpus", 1, 1, 100);
    const auto filtered = run_cli({"bench", "--manifest", manifest.string(), "--out", (tmp / "f").string(),
                                   "--filter-cluttered", "--strategies", "full"});
    EXPECT_EQ(filtered.code, cli::kExitOk);
    EXPECT_NE(filtered.err.find("warning"), std::string::npos);
    EXPECT_TRUE(read_json(tmp / "f" / "report.json")["records"].empty());

    auto doc = read_json(manifest);
    doc["entries"][0]["ground_truth"] = "missing.png";
    std::ofstream(tmp / "corpus" / "broken.json") << doc.dump();
    const auto missing = run_cli({"bench", "--manifest", (tmp / "corpus" / "broken.json").string(), "--out",
                                  (tmp / "m").string(), "--strategies", "single-resolution"});
    EXPECT_EQ(missing.code, cli::kExitOk);
    EXPECT_EQ(read_json(tmp / "m" / "report.json")["records"][0]["status"], "failed");

    std::ofstream(tmp / "bad.json") << "[]";
    EXPECT_EQ(run_cli({"bench", "--manifest", (tmp / "bad.json").string(), "--out", (tmp / "b").string()}).code,
              cli::kExitInvalidArgs);
    EXPECT_EQ(run_cli({"bench", "--manifest", manifest.string(), "--out", (tmp / "b").string(), "--strategies",
                       "magic"})
                  .code,
              cli::kExitInvalidArgs);
    EXPECT_EQ(run_cli({"bench", "--manifest", manifest.string(), "--out", (tmp / "b").string(), "--looseness",
                       "0.5"})
                  .code,
              cli::kExitInvalidArgs);
}
