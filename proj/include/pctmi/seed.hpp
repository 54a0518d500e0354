#pragma once

#include <cstdint>
#include <string_view>

namespace pctmi {

// splitmix64 finalizer.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t value) {
    return mix_seed(seed ^ mix_seed(value));
}

constexpr std::uint64_t combine_seed(std::uint64_t seed, std::string_view text) {
    // FNV-1a over the bytes, then mixed.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return combine_seed(seed, h);
}

}  // namespace pctmi
