#include "intentflow/ingest/imageops.hpp"

#include <algorithm>
#include <cstring>

#include "intentflow/core/digest.hpp"
#include "intentflow/core/error.hpp"

namespace intentflow::ingest {

namespace {

struct AxisPlacement {
    std::int64_t origin = 0;
    bool padded = false;
    bool clamped = false;
};

// Chooses the window start along one axis of length `length`.
AxisPlacement place_axis(std::int64_t length, std::int64_t window, std::int64_t b0, std::int64_t b1,
                         Rng& rng) {
    if (length <= window) {
        return AxisPlacement{0, length < window, false};
    }
    if (b1 - b0 >= window) {
        const auto centered = (b0 + b1) / 2 - window / 2;
        const bool clamped = b1 - b0 > window;
        return AxisPlacement{std::clamp<std::int64_t>(centered, 0, length - window), false, clamped};
    }
    const auto lo = std::max<std::int64_t>(0, b1 - window);
    const auto hi = std::min<std::int64_t>(b0, length - window);
    return AxisPlacement{rng.between(lo, hi), false, false};
}

}  // namespace

CropResult crop_for_web(const Image& image, const Rect& interaction_bbox, const CropSpec& spec) {
    if (spec.target_width <= 0 || spec.target_height <= 0) {
        throw InvalidArgument("crop target size must be positive");
    }
    const Rect bounds{0, 0, image.width(), image.height()};
    const Rect box = intersection(interaction_bbox, bounds);
    if (box.empty()) throw InvalidArgument("interaction bbox does not intersect the screenshot");

    CropResult result;
    if (box != interaction_bbox) {
        result.warnings.emplace_back("interaction bbox clipped to screenshot bounds");
    }

    Rng rng(spec.margin_seed);
    const auto px = place_axis(image.width(), spec.target_width, box.x, box.right(), rng);
    const auto py = place_axis(image.height(), spec.target_height, box.y, box.bottom(), rng);
    if (px.padded || py.padded) {
        result.warnings.push_back("screenshot " + std::to_string(image.width()) + "x" +
                                  std::to_string(image.height()) +
                                  " is smaller than the crop window; padded with gray");
    }
    if (px.clamped || py.clamped) {
        result.warnings.emplace_back("interaction bbox larger than the crop window; clamped after centering");
    }

    result.window = Rect{px.origin, py.origin, spec.target_width, spec.target_height};
    result.image = Image(spec.target_width, spec.target_height, kPadColor);
    const Rect copy = intersection(result.window, bounds);
    const auto span = static_cast<std::size_t>(copy.width) * 3;
    for (auto y = copy.y; y < copy.bottom(); ++y) {
        const auto* src = image.row(static_cast<int>(y)) + copy.x * 3;
        auto* dst = result.image.row(static_cast<int>(y - py.origin)) + (copy.x - px.origin) * 3;
        std::memcpy(dst, src, span);
    }
    const Rect in_window = intersection(box, result.window);
    result.bbox_in_crop = Rect{in_window.x - px.origin, in_window.y - py.origin, in_window.width,
                               in_window.height};
    return result;
}

Image highlight_element(const Image& image, const Rect& bbox, int stroke) {
    if (stroke <= 0) throw InvalidArgument("highlight stroke must be positive");
    const Rect bounds{0, 0, image.width(), image.height()};
    const Rect visible = intersection(bbox, bounds);
    if (visible.empty()) throw InvalidArgument("highlight bbox does not intersect the image");

    Image out = image;
    for (auto y = visible.y; y < visible.bottom(); ++y) {
        for (auto x = visible.x; x < visible.right(); ++x) {
            const bool on_edge = x < bbox.x + stroke || x >= bbox.right() - stroke ||
                                 y < bbox.y + stroke || y >= bbox.bottom() - stroke;
            if (on_edge) out.set(static_cast<int>(x), static_cast<int>(y), kHighlightColor);
        }
    }
    return out;
}

Image downsize(const Image& image, int factor) {
    if (factor < 1) throw InvalidArgument("downsize factor must be >= 1");
    if (image.width() < factor || image.height() < factor) {
        throw InvalidArgument("image smaller than the downsize factor");
    }
    const int ow = (image.width() + factor - 1) / factor;
    const int oh = (image.height() + factor - 1) / factor;
    Image out(ow, oh);
    for (int oy = 0; oy < oh; ++oy) {
        for (int ox = 0; ox < ow; ++ox) {
            const int x0 = ox * factor;
            const int y0 = oy * factor;
            const int x1 = std::min(x0 + factor, image.width());
            const int y1 = std::min(y0 + factor, image.height());
            unsigned r = 0, g = 0, b = 0;
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) {
                    const auto c = image.at(x, y);
                    r += c.r;
                    g += c.g;
                    b += c.b;
                }
            }
            const auto n = static_cast<unsigned>((x1 - x0) * (y1 - y0));
            out.set(ox, oy,
                    Rgb{static_cast<std::uint8_t>((r + n / 2) / n), static_cast<std::uint8_t>((g + n / 2) / n),
                        static_cast<std::uint8_t>((b + n / 2) / n)});
        }
    }
    return out;
}

}  // namespace intentflow::ingest
