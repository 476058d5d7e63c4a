#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "matteforge/error.hpp"
#include "matteforge/figureground.hpp"
#include "matteforge/imaging.hpp"

using namespace matteforge;

namespace {

using Lab = std::array<float, 3>;

// Patch map from a label grid with one flat Lab color per label.
PatchMap make_map(int w, int h, const std::vector<int>& labels, const std::map<int, Lab>& colors) {
    LabImage lab(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) lab.set_pixel(x, y, colors.at(labels[size_t(y) * size_t(w) + size_t(x)]));
    return PatchMap::from_labels(w, h, labels, lab);
}

std::vector<int> grid(int w, int h, int fill) { return std::vector<int>(static_cast<size_t>(w * h), fill); }

void paint(std::vector<int>& labels, int w, int x0, int y0, int x1, int y1, int label) {
    for (int y = y0; y <= y1; ++y)
        for (int x = x0; x <= x1; ++x) labels[size_t(y) * size_t(w) + size_t(x)] = label;
}

FgConfig small_cfg() {
    FgConfig cfg;
    cfg.min_patches = 3;
    return cfg;
}

ErrorCode code_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorCode::InvalidArgument;
}

// 12x12: background 0 around the edge, object 1 at cols 3-5 and a
// background-colored patch 2 at cols 6-8, rows 3-8.
PatchMap three_regions(int scale = 1) {
    const int w = 12 * scale;
    auto labels = grid(w, w, 0);
    paint(labels, w, 3 * scale, 3 * scale, 6 * scale - 1, 9 * scale - 1, 1);
    paint(labels, w, 6 * scale, 3 * scale, 9 * scale - 1, 9 * scale - 1, 2);
    return make_map(w, w, labels, {{0, {50, 0, 0}}, {1, {50, 60, 0}}, {2, {52, 0, 0}}});
}

}  // namespace

TEST(Classify, ThreeRegionHandTrace) {
    const PatchMap pm = three_regions();
    ASSERT_EQ(pm.count(), 3);
    const BoundingBox box{2, 2, 8, 8};
    // Overlap of patch 0: 64 - 36 box pixels out of 108, below 0.5.
    EXPECT_NEAR(box_overlap(pm, box)[0], 28.0 / 108.0, 1e-12);

    // d_bg: patch 1 -> 60, patch 2 -> 2; the two-means split puts 1 alone
    // in the high group. The closest fg/bg pair is then (1, 0).
    const FgLabeling fl = classify(pm, box, small_cfg());
    EXPECT_EQ(fl.patch_foreground, (std::vector<std::uint8_t>{0, 1, 0}));
    EXPECT_EQ(fl.mask.foreground_count(), 18u);
    EXPECT_TRUE(fl.mask.foreground(3, 3));
    EXPECT_FALSE(fl.mask.foreground(6, 3));
    EXPECT_NEAR(mcut_score(fl, pm), 60.0, 1e-9);
}

TEST(Classify, PatchOutsideBoxIsBackground) {
    auto labels = grid(12, 12, 0);
    paint(labels, 12, 3, 3, 8, 8, 1);
    paint(labels, 12, 0, 0, 1, 1, 2);  // vivid corner patch, no overlap with the box
    paint(labels, 12, 6, 6, 8, 8, 3);
    const PatchMap pm = make_map(12, 12, labels,
                                 {{0, {50, 0, 0}}, {1, {50, 60, 0}}, {2, {20, -70, 70}}, {3, {51, 0, 0}}});
    EXPECT_DOUBLE_EQ(box_overlap(pm, {2, 2, 8, 8})[size_t(pm.id_at(0, 0))], 0.0);
    const FgLabeling fl = classify(pm, {2, 2, 8, 8}, small_cfg());
    EXPECT_EQ(fl.patch_foreground[size_t(pm.id_at(0, 0))], 0);
    EXPECT_EQ(fl.patch_foreground[size_t(pm.id_at(3, 3))], 1);
}

TEST(Classify, ZeroContrastMakesEveryCandidateForeground) {
    auto labels = grid(12, 12, 0);
    paint(labels, 12, 3, 3, 5, 8, 1);
    paint(labels, 12, 6, 3, 8, 8, 2);
    const PatchMap pm = make_map(12, 12, labels, {{0, {50, 0, 0}}, {1, {50, 60, 0}}, {2, {50, -60, 0}}});
    const FgLabeling fl = classify(pm, {2, 2, 8, 8}, small_cfg());
    EXPECT_EQ(fl.patch_foreground, (std::vector<std::uint8_t>{0, 1, 1}));
}

TEST(Classify, BorderTouchingComponentsBecomeBackground) {
    auto labels = grid(12, 12, 0);
    paint(labels, 12, 3, 3, 11, 8, 1);
    paint(labels, 12, 3, 9, 4, 10, 2);
    const PatchMap pm = make_map(12, 12, labels, {{0, {50, 0, 0}}, {1, {50, 60, 0}}, {2, {52, 1, 0}}});
    const BoundingBox box{2, 2, 9, 9};
    ASSERT_GE(box_overlap(pm, box)[1], 0.5);
    const FgLabeling fl = classify(pm, box, small_cfg());
    EXPECT_EQ(fl.patch_foreground[1], 0);
    EXPECT_EQ(fl.mask.foreground_count(), 0u);
}

TEST(Classify, SmallFragmentsAreDropped) {
    auto labels = grid(20, 20, 0);
    paint(labels, 20, 5, 5, 10, 10, 1);
    paint(labels, 20, 15, 15, 15, 15, 2);
    const PatchMap pm = make_map(20, 20, labels, {{0, {50, 0, 0}}, {1, {50, 60, 0}}, {2, {50, 60, 0}}});
    const BoundingBox box{3, 3, 14, 14};
    FgConfig cfg = small_cfg();
    // Largest component 36 px: cutoff 1.8 drops the single pixel.
    FgLabeling fl = classify(pm, box, cfg);
    EXPECT_EQ(fl.patch_foreground, (std::vector<std::uint8_t>{0, 1, 0}));
    cfg.fragment_area_fraction = 0.02;
    fl = classify(pm, box, cfg);
    EXPECT_EQ(fl.patch_foreground, (std::vector<std::uint8_t>{0, 1, 1}));
}

TEST(Classify, TooFewPatches) {
    EXPECT_EQ(code_of([] { classify(three_regions(), {2, 2, 8, 8}, FgConfig{}); }), ErrorCode::TooFewPatches);
}

TEST(Classify, BoxSeedingNothingIsInvalid) {
    EXPECT_EQ(code_of([] { classify(three_regions(), {1, 1, 10, 10}, small_cfg()); }),
              ErrorCode::InvalidBoundingBox);
    EXPECT_EQ(code_of([] { classify(three_regions(), {0, 0, 5, 5}, small_cfg()); }), ErrorCode::InvalidBoundingBox);
}

TEST(Classify, SeedVectorMustMatch) {
    EXPECT_EQ(code_of([] { classify_with_seeds(three_regions(), {1, 0}, small_cfg()); }),
              ErrorCode::DimensionMismatch);
}

TEST(Classify, TranslationInvariant) {
    const PatchMap base = three_regions();
    auto shifted = grid(20, 16, 0);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 12; ++x) {
            const int id = base.id_at(x, y);
            if (id != 0) shifted[size_t(y + 3) * 20 + size_t(x + 5)] = id;
        }
    const PatchMap moved = make_map(20, 16, shifted, {{0, {50, 0, 0}}, {1, {50, 60, 0}}, {2, {52, 0, 0}}});
    const FgLabeling a = classify(base, {2, 2, 8, 8}, small_cfg());
    const FgLabeling b = classify(moved, {7, 5, 8, 8}, small_cfg());
    EXPECT_EQ(a.patch_foreground, b.patch_foreground);
    EXPECT_DOUBLE_EQ(mcut_score(a, base), mcut_score(b, moved));
}

TEST(Classify, ScaleInvariant) {
    const PatchMap base = three_regions(1);
    const PatchMap big = three_regions(3);
    const FgLabeling a = classify(base, {2, 2, 8, 8}, small_cfg());
    const FgLabeling b = classify(big, {6, 6, 24, 24}, small_cfg());
    EXPECT_EQ(a.patch_foreground, b.patch_foreground);
    EXPECT_EQ(b.mask.foreground_count(), 9 * a.mask.foreground_count());
    EXPECT_DOUBLE_EQ(mcut_score(a, base), mcut_score(b, big));
}

TEST(Mcut, Examples) {
    auto labels = grid(4, 4, 0);
    paint(labels, 4, 2, 0, 3, 3, 1);
    FgLabeling fl;
    fl.patch_foreground = {1, 0};
    const PatchMap same = make_map(4, 4, labels, {{0, {40, 10, 10}}, {1, {40, 10, 10}}});
    EXPECT_DOUBLE_EQ(mcut_score(fl, same), 0.0);
    const PatchMap three = make_map(4, 4, labels, {{0, {50, 3, 0}}, {1, {50, 0, 0}}});
    EXPECT_NEAR(mcut_score(fl, three), 3.0, 1e-12);
}

TEST(Mcut, MinimumOverAllPairsAndPermutationInvariant) {
    // Four vertical stripes; foreground = stripes 1 and 2.
    std::vector<int> labels(16 * 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 16; ++x) labels[size_t(y) * 16 + size_t(x)] = x / 4;
    const std::map<int, Lab> colors{{0, {10, 0, 0}}, {1, {30, 0, 0}}, {2, {80, 0, 0}}, {3, {95, 0, 0}}};
    const PatchMap pm = make_map(16, 4, labels, colors);
    FgLabeling fl;
    fl.patch_foreground = {0, 1, 1, 0};
    // Non-adjacent pair (2,3) is the closest: 15.
    EXPECT_NEAR(mcut_score(fl, pm), 15.0, 1e-12);

    // Mirror: ids are reassigned in scan order but the score stays.
    std::vector<int> mirrored(labels.size());
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 16; ++x) mirrored[size_t(y) * 16 + size_t(x)] = labels[size_t(y) * 16 + size_t(15 - x)];
    const PatchMap pm2 = make_map(16, 4, mirrored, colors);
    FgLabeling fl2;
    fl2.patch_foreground.resize(4);
    for (int id = 0; id < 4; ++id) fl2.patch_foreground[size_t(pm2.id_at(15 - 4 * id, 0))] = fl.patch_foreground[size_t(id)];
    EXPECT_NEAR(mcut_score(fl2, pm2), 15.0, 1e-12);
}

TEST(Mcut, NeedsBothSides) {
    const PatchMap pm = three_regions();
    FgLabeling fl;
    fl.patch_foreground = {0, 0, 0};
    EXPECT_EQ(code_of([&] { mcut_score(fl, pm); }), ErrorCode::DegenerateSegmentation);
    fl.patch_foreground = {1, 1, 1};
    EXPECT_EQ(code_of([&] { mcut_score(fl, pm); }), ErrorCode::DegenerateSegmentation);
}

TEST(Classify, RealSegmentationOfASquare) {
    Image img(40, 40);
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 40; ++x) {
            const bool obj = x >= 14 && x < 26 && y >= 14 && y < 26;
            const float stripe = float((x / 5 + y / 5) % 3) * 0.08f;
            img.set_pixel(x, y, obj ? Lab{0.9f, 0.1f, 0.1f} : Lab{0.2f + stripe, 0.4f, 0.6f - stripe});
        }
    const PatchMap pm = segment(img, {});
    FgConfig cfg;
    cfg.min_patches = 2;
    const FgLabeling fl = classify(pm, {10, 10, 20, 20}, cfg);
    for (int y = 0; y < 40; ++y)
        for (int x = 0; x < 40; ++x) EXPECT_EQ(fl.mask.foreground(x, y), x >= 14 && x < 26 && y >= 14 && y < 26);
}

TEST(Mcut, ClosestPairAmongThreePatches) {
    std::vector<int> labels(12 * 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 12; ++x) labels[size_t(y) * 12 + size_t(x)] = x / 4;
    const PatchMap pm = make_map(12, 4, labels, {{0, {10, 0, 0}}, {1, {0, 0, 0}}, {2, {7, 0, 0}}});
    FgLabeling fl;
    fl.patch_foreground = {1, 0, 0};
    EXPECT_NEAR(mcut_score(fl, pm), 3.0, 1e-12);
}

TEST(Mcut, TranslatesAndScalesWithFeatures) {
    std::vector<int> labels(16 * 4);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 16; ++x) labels[size_t(y) * 16 + size_t(x)] = x / 4;
    const std::vector<Lab> base{{20, 5, -3}, {35, 12, 8}, {60, -20, 4}, {44, 0, 30}};
    FgLabeling fl;
    fl.patch_foreground = {0, 1, 0, 1};
    auto score_with = [&](double s, const Lab& t) {
        std::map<int, Lab> colors;
        for (int i = 0; i < 4; ++i)
            for (int c = 0; c < 3; ++c) colors[i][size_t(c)] = float(s * base[size_t(i)][size_t(c)] + t[size_t(c)]);
        return mcut_score(fl, make_map(16, 4, labels, colors));
    };
    const double ref = score_with(1.0, {0, 0, 0});
    EXPECT_NEAR(score_with(1.0, {7, -11, 4}), ref, 1e-4);
    EXPECT_NEAR(score_with(2.0, {0, 0, 0}), 2.0 * ref, 1e-4);
    EXPECT_NEAR(score_with(0.5, {3, 3, 3}), 0.5 * ref, 1e-4);
}

TEST(Classify, ShrinkingBoxOnlyAddsSeeds) {
    // 8x8 grid of 4x4 cells with varied colors.
    const int w = 32;
    std::vector<int> labels(size_t(w) * size_t(w));
    std::map<int, Lab> colors;
    for (int y = 0; y < w; ++y)
        for (int x = 0; x < w; ++x) labels[size_t(y) * size_t(w) + size_t(x)] = (y / 4) * 8 + x / 4;
    for (int i = 0; i < 64; ++i) colors[i] = {float(20 + (i * 37) % 60), float((i * 13) % 40 - 20), float((i * 7) % 30)};
    const PatchMap pm = make_map(w, w, labels, colors);
    FgConfig cfg = small_cfg();

    const BoundingBox outer{5, 5, 22, 22};
    const BoundingBox inner{9, 9, 14, 14};
    const FgLabeling a = classify(pm, outer, cfg);
    const FgLabeling b = classify(pm, inner, cfg);
    const auto ov_outer = box_overlap(pm, outer);
    const auto ov_inner = box_overlap(pm, inner);
    for (int id = 0; id < pm.count(); ++id) {
        const bool seed_outer = ov_outer[size_t(id)] < cfg.seed_outside_fraction;
        const bool seed_inner = ov_inner[size_t(id)] < cfg.seed_outside_fraction;
        if (seed_outer) {
            EXPECT_TRUE(seed_inner) << id;
            EXPECT_EQ(b.patch_foreground[size_t(id)], 0) << id;
        }
        // Patches foreground under the tight box fit inside the loose one.
        if (b.patch_foreground[size_t(id)]) {
            EXPECT_FALSE(seed_outer) << id;
        }
    }
    EXPECT_GT(a.mask.foreground_count(), 0u);
    EXPECT_GT(b.mask.foreground_count(), 0u);
}

TEST(Classify, PatchIdRelabelingGivesSameMask) {
    const PatchMap pm = three_regions(2);
    // Same partition, enumerated from the bottom right.
    std::vector<int> flipped(size_t(pm.width()) * size_t(pm.height()));
    std::map<int, Lab> colors;
    for (int y = 0; y < pm.height(); ++y)
        for (int x = 0; x < pm.width(); ++x) {
            const int id = pm.id_at(pm.width() - 1 - x, pm.height() - 1 - y);
            flipped[size_t(y) * size_t(pm.width()) + size_t(x)] = 2 - id;
            const auto& m = pm.patch(id).mean_lab;
            colors[2 - id] = {float(m[0]), float(m[1]), float(m[2])};
        }
    const PatchMap pm2 = make_map(pm.width(), pm.height(), flipped, colors);
    const BoundingBox box{4, 4, 16, 16};
    const FgLabeling a = classify(pm, box, small_cfg());
    const FgLabeling b = classify(pm2, box, small_cfg());
    ASSERT_EQ(a.mask.foreground_count(), b.mask.foreground_count());
    for (int y = 0; y < pm.height(); ++y)
        for (int x = 0; x < pm.width(); ++x)
            EXPECT_EQ(a.mask.foreground(x, y), b.mask.foreground(pm.width() - 1 - x, pm.height() - 1 - y));
}
