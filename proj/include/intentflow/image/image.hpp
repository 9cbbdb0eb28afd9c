#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace intentflow {

struct Rgb {
    std::uint8_t r = 0;
    std::uint8_t g = 0;
    std::uint8_t b = 0;

    friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// 8-bit RGB raster, row-major, no padding.
class Image {
public:
    Image() = default;
    Image(int width, int height, Rgb fill = {});

    [[nodiscard]] int width() const noexcept { return width_; }
    [[nodiscard]] int height() const noexcept { return height_; }
    [[nodiscard]] bool empty() const noexcept { return width_ == 0 || height_ == 0; }

    [[nodiscard]] Rgb at(int x, int y) const;
    void set(int x, int y, Rgb c);

    [[nodiscard]] std::span<const std::uint8_t> bytes() const noexcept { return data_; }
    // Start of row y (3 bytes per pixel). Throws InvalidArgument when out of range.
    [[nodiscard]] const std::uint8_t* row(int y) const;
    [[nodiscard]] std::uint8_t* row(int y);

    friend bool operator==(const Image&, const Image&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<std::uint8_t> data_;
};

// PNG codec. Any bit depth / color type is decoded to 8-bit RGB (alpha is
// composited over black). Encoding uses fixed settings, so equal images
// always produce equal bytes.
Image decode_png(std::span<const std::uint8_t> png);
std::vector<std::uint8_t> encode_png(const Image& image);
Image read_png(const std::filesystem::path& file);
void write_png(const std::filesystem::path& file, const Image& image);

}  // namespace intentflow
