#include "intentflow/core/digest.hpp"

#include <openssl/evp.h>
#include <openssl/sha.h>

#include <array>
#include <limits>

#include "intentflow/core/error.hpp"

namespace intentflow {

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, SHA256_DIGEST_LENGTH> md{};
    SHA256(reinterpret_cast<const unsigned char*>(data.data()), data.size(), md.data());
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(md.size() * 2);
    for (auto b : md) {
        out += hex[b >> 4];
        out += hex[b & 0xF];
    }
    return out;
}

std::string base64_encode(std::span<const std::uint8_t> data) {
    if (data.empty()) return {};
    std::string out(4 * ((data.size() + 2) / 3), '\0');
    const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()), data.data(),
                                  static_cast<int>(data.size()));
    out.resize(static_cast<std::size_t>(n));
    return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
    if (text.empty()) return {};
    if (text.size() % 4 != 0) throw ParseError("base64 input length is not a multiple of 4");
    std::vector<std::uint8_t> out(3 * text.size() / 4);
    const int n = EVP_DecodeBlock(out.data(), reinterpret_cast<const unsigned char*>(text.data()),
                                  static_cast<int>(text.size()));
    if (n < 0) throw ParseError("invalid base64 input");
    // EVP_DecodeBlock keeps the zero bytes produced by '=' padding.
    std::size_t size = static_cast<std::size_t>(n);
    if (text.ends_with("==")) {
        size -= 2;
    } else if (text.ends_with("=")) {
        size -= 1;
    }
    out.resize(size);
    return out;
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis) {
    std::uint64_t h = basis;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

namespace {
std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view item_id,
                          std::int64_t sub_index) {
    auto h = splitmix(global_seed);
    h = splitmix(h ^ fnv1a64(item_id));
    return splitmix(h ^ static_cast<std::uint64_t>(sub_index));
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw InvalidArgument("Rng::below requires a positive bound");
    const auto limit = std::numeric_limits<std::uint64_t>::max() -
                       std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v = 0;
    do {
        v = engine_();
    } while (v >= limit);
    return v % bound;
}

std::int64_t Rng::between(std::int64_t lo, std::int64_t hi) {
    if (hi < lo) throw InvalidArgument("Rng::between with empty range");
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>(below(span));
}

}  // namespace intentflow
