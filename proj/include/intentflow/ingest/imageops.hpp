#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "intentflow/core/types.hpp"
#include "intentflow/image/image.hpp"

namespace intentflow::ingest {

inline constexpr Rgb kHighlightColor{255, 0, 0};
inline constexpr Rgb kPadColor{128, 128, 128};
inline constexpr int kHighlightStroke = 4;
inline constexpr int kAndroidDownsizeFactor = 4;

struct CropSpec {
    int target_width = 1280;
    int target_height = 768;
    std::uint64_t margin_seed = 0;
};

struct CropResult {
    Image image;
    Rect window;          // crop window in source-image coordinates
    Rect bbox_in_crop;    // interaction box translated into the crop
    std::vector<std::string> warnings;
};

/// Cuts a fixed-size window out of a (typically full-page) web screenshot so
/// that the interaction box lands inside it at a random, seeded offset.
/// Boxes larger than the window are centered and clamped. Images smaller
/// than the window are padded with neutral gray and a warning is recorded.
/// Throws InvalidArgument if the box does not intersect the image.
CropResult crop_for_web(const Image& image, const Rect& interaction_bbox, const CropSpec& spec);

/// Draws a red outline `stroke` pixels wide along the inside of `bbox`,
/// clipped to the image. Throws InvalidArgument if bbox misses the image.
Image highlight_element(const Image& image, const Rect& bbox, int stroke = kHighlightStroke);

/// Area-averaging downscale; output is ceil(dim / factor) on each axis.
/// Edge blocks average only the source pixels they cover.
Image downsize(const Image& image, int factor = kAndroidDownsizeFactor);

}  // namespace intentflow::ingest
