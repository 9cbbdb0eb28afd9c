#include <gtest/gtest.h>

#include <cmath>

#include "fixtures.hpp"
#include "intentflow/core/digest.hpp"
#include "intentflow/core/error.hpp"
#include "intentflow/image/image.hpp"
#include "intentflow/ingest/imageops.hpp"

using namespace intentflow;
using namespace intentflow::ingest;

namespace {

Image gradient(int w, int h) {
    Image img(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            img.set(x, y, Rgb{static_cast<std::uint8_t>(x % 256), static_cast<std::uint8_t>(y % 256),
                              static_cast<std::uint8_t>((x * 7 + y * 3) % 256)});
        }
    }
    return img;
}

}  // namespace

TEST(Png, RoundTripAndStableBytes) {
    const auto img = gradient(33, 17);
    const auto a = encode_png(img);
    EXPECT_EQ(decode_png(a), img);
    EXPECT_EQ(encode_png(img), a);
    EXPECT_THROW(decode_png(std::vector<std::uint8_t>{0, 1, 2}), Error);
}

TEST(Crop, ReproducibleForSeed) {
    const auto page = gradient(1400, 3000);
    const Rect bbox{0, 0, 100, 40};
    const auto a = crop_for_web(page, bbox, CropSpec{1280, 768, 99});
    const auto b = crop_for_web(page, bbox, CropSpec{1280, 768, 99});
    EXPECT_EQ(a.window, b.window);
    EXPECT_EQ(encode_png(a.image), encode_png(b.image));
}

TEST(Crop, BoxOfWindowSizeHasZeroMargin) {
    const auto page = gradient(2000, 2000);
    const Rect bbox{300, 500, 1280, 768};
    const auto r = crop_for_web(page, bbox, CropSpec{1280, 768, 1});
    EXPECT_EQ(r.window, bbox);
    EXPECT_EQ(r.bbox_in_crop, (Rect{0, 0, 1280, 768}));
    EXPECT_TRUE(r.warnings.empty());
}

TEST(Crop, FullPageMidBox) {
    const auto page = gradient(1280, 5000);
    const Rect bbox{400, 2400, 200, 60};
    const auto r = crop_for_web(page, bbox, CropSpec{1280, 768, 3});
    EXPECT_EQ(r.image.width(), 1280);
    EXPECT_EQ(r.image.height(), 768);
    EXPECT_TRUE(r.window.contains(bbox));
    // Pixels are copied, not resampled.
    EXPECT_EQ(r.image.at(0, 0), page.at(static_cast<int>(r.window.x), static_cast<int>(r.window.y)));
}

TEST(Crop, ContainmentProperty) {
    Rng rng(2024);
    for (int i = 0; i < 200; ++i) {
        const int w = static_cast<int>(rng.between(1280, 1600));
        const int h = static_cast<int>(rng.between(768, 3000));
        const auto bw = rng.between(1, 1280);
        const auto bh = rng.between(1, 768);
        const Rect bbox{rng.between(0, w - bw), rng.between(0, h - bh), bw, bh};
        const Image page(w, h, Rgb{9, 9, 9});
        const auto r = crop_for_web(page, bbox, CropSpec{1280, 768, rng.below(1000)});
        EXPECT_EQ(r.image.width(), 1280);
        EXPECT_EQ(r.image.height(), 768);
        EXPECT_TRUE(r.window.contains(bbox)) << i;
        EXPECT_EQ(r.bbox_in_crop.width, bw);
        EXPECT_EQ(r.bbox_in_crop.height, bh);
    }
}

TEST(Crop, SmallImageIsPaddedWithWarning) {
    const auto page = gradient(800, 600);
    const auto r = crop_for_web(page, Rect{10, 10, 50, 50}, CropSpec{1280, 768, 0});
    EXPECT_EQ(r.image.width(), 1280);
    EXPECT_EQ(r.image.height(), 768);
    EXPECT_EQ(r.image.at(1000, 700), kPadColor);
    EXPECT_EQ(r.image.at(5, 5), page.at(5, 5));
    EXPECT_FALSE(r.warnings.empty());
}

TEST(Crop, OversizedBoxIsCenteredThenClamped) {
    const auto page = gradient(3000, 3000);
    const auto r = crop_for_web(page, Rect{0, 0, 2000, 1000}, CropSpec{1280, 768, 0});
    EXPECT_EQ(r.window.x, 1000 - 640);
    EXPECT_EQ(r.window.y, 500 - 384);
    EXPECT_FALSE(r.warnings.empty());
}

TEST(Crop, DisjointBoxThrows) {
    EXPECT_THROW(crop_for_web(gradient(100, 100), Rect{200, 200, 5, 5}, CropSpec{}), InvalidArgument);
}

TEST(Highlight, OnlyOutlinePixelsChange) {
    const auto img = gradient(100, 100);
    const Rect bbox{40, 40, 10, 10};
    const auto out = highlight_element(img, bbox);
    for (int y = 0; y < 100; ++y) {
        for (int x = 0; x < 100; ++x) {
            const bool inside = bbox.contains(x, y);
            const bool interior = x >= 44 && x < 46 && y >= 44 && y < 46;
            if (inside && !interior) {
                EXPECT_EQ(out.at(x, y), kHighlightColor);
            } else {
                EXPECT_EQ(out.at(x, y), img.at(x, y));
            }
        }
    }
}

TEST(Highlight, PartiallyOffscreenIsClipped) {
    const auto img = gradient(50, 50);
    const auto out = highlight_element(img, Rect{40, -5, 20, 20});
    EXPECT_EQ(out.at(40, 0), kHighlightColor);
    EXPECT_EQ(out.at(49, 14), kHighlightColor);
    EXPECT_EQ(out.at(45, 5), img.at(45, 5));
}

TEST(Highlight, DisjointThrowsAndOutputIsDeterministic) {
    const auto img = gradient(20, 20);
    EXPECT_THROW(highlight_element(img, Rect{30, 30, 4, 4}), InvalidArgument);
    EXPECT_EQ(encode_png(highlight_element(img, Rect{2, 2, 9, 9})), encode_png(highlight_element(img, Rect{2, 2, 9, 9})));
}

TEST(Downsize, Dimensions) {
    EXPECT_EQ(downsize(Image(1080, 2400)).width(), 270);
    EXPECT_EQ(downsize(Image(1080, 2400)).height(), 600);
    const auto one = downsize(Image(4, 4, Rgb{8, 16, 32}));
    EXPECT_EQ(one.width(), 1);
    EXPECT_EQ(one.height(), 1);
    EXPECT_EQ(one.at(0, 0), (Rgb{8, 16, 32}));
    const auto odd = downsize(Image(1081, 2401));
    EXPECT_EQ(odd.width(), 271);
    EXPECT_EQ(odd.height(), 601);
    EXPECT_THROW(downsize(Image(3, 9)), InvalidArgument);
}

TEST(Downsize, MatchesAreaAverageOracle) {
    const auto img = gradient(13, 10);
    const auto out = downsize(img, 4);
    for (int oy = 0; oy < out.height(); ++oy) {
        for (int ox = 0; ox < out.width(); ++ox) {
            double sum = 0;
            int n = 0;
            for (int y = oy * 4; y < std::min(oy * 4 + 4, 10); ++y) {
                for (int x = ox * 4; x < std::min(ox * 4 + 4, 13); ++x) {
                    sum += img.at(x, y).r;
                    ++n;
                }
            }
            EXPECT_NEAR(out.at(ox, oy).r, sum / n, 0.5 + 1e-9);
        }
    }
}
