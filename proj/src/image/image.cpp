#include "intentflow/image/image.hpp"

#include <png.h>

#include <cstring>

#include "intentflow/core/error.hpp"
#include "intentflow/core/serialize.hpp"

namespace intentflow {

Image::Image(int width, int height, Rgb fill) : width_(width), height_(height) {
    if (width < 0 || height < 0) throw InvalidArgument("negative image dimensions");
    data_.resize(static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 3);
    for (std::size_t i = 0; i < data_.size(); i += 3) {
        data_[i] = fill.r;
        data_[i + 1] = fill.g;
        data_[i + 2] = fill.b;
    }
}

Rgb Image::at(int x, int y) const {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) throw InvalidArgument("pixel out of range");
    const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                    static_cast<std::size_t>(x)) * 3;
    return Rgb{data_[i], data_[i + 1], data_[i + 2]};
}

const std::uint8_t* Image::row(int y) const {
    if (y < 0 || y >= height_) throw InvalidArgument("row out of range");
    return data_.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) * 3;
}

std::uint8_t* Image::row(int y) {
    if (y < 0 || y >= height_) throw InvalidArgument("row out of range");
    return data_.data() + static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) * 3;
}

void Image::set(int x, int y, Rgb c) {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) throw InvalidArgument("pixel out of range");
    const auto i = (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
                    static_cast<std::size_t>(x)) * 3;
    data_[i] = c.r;
    data_[i + 1] = c.g;
    data_[i + 2] = c.b;
}

Image decode_png(std::span<const std::uint8_t> png) {
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&img, png.data(), png.size())) {
        throw ParseError(std::string("PNG decode failed: ") + img.message);
    }
    img.format = PNG_FORMAT_RGB;
    Image out(static_cast<int>(img.width), static_cast<int>(img.height));
    std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(img));
    if (!png_image_finish_read(&img, nullptr, buffer.data(), 0, nullptr)) {
        std::string msg = img.message;
        png_image_free(&img);
        throw ParseError("PNG decode failed: " + msg);
    }
    for (int y = 0; y < out.height(); ++y) {
        for (int x = 0; x < out.width(); ++x) {
            const auto i = (static_cast<std::size_t>(y) * img.width + static_cast<std::size_t>(x)) * 3;
            out.set(x, y, Rgb{buffer[i], buffer[i + 1], buffer[i + 2]});
        }
    }
    return out;
}

std::vector<std::uint8_t> encode_png(const Image& image) {
    if (image.empty()) throw InvalidArgument("cannot encode an empty image");
    png_image img;
    std::memset(&img, 0, sizeof img);
    img.version = PNG_IMAGE_VERSION;
    img.width = static_cast<png_uint_32>(image.width());
    img.height = static_cast<png_uint_32>(image.height());
    img.format = PNG_FORMAT_RGB;

    png_alloc_size_t size = 0;
    if (!png_image_write_get_memory_size(img, size, 0, image.bytes().data(), 0, nullptr)) {
        throw Error(std::string("PNG encode failed: ") + img.message);
    }
    std::vector<std::uint8_t> out(size);
    if (!png_image_write_to_memory(&img, out.data(), &size, 0, image.bytes().data(), 0, nullptr)) {
        throw Error(std::string("PNG encode failed: ") + img.message);
    }
    out.resize(size);
    return out;
}

Image read_png(const std::filesystem::path& file) {
    const auto data = read_file(file);
    return decode_png(std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

void write_png(const std::filesystem::path& file, const Image& image) {
    const auto bytes = encode_png(image);
    write_file(file, std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace intentflow
