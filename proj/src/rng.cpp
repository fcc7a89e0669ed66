// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#include "homwalk/rng.hpp"

#include <charconv>
#include <cmath>
#include <numbers>

#include <fmt/core.h>

#include "homwalk/errors.hpp"

namespace homwalk
{
namespace
{
constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                    std::uint64_t& lo)
{
    unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
    hi = static_cast<std::uint64_t>(p >> 64);
    lo = static_cast<std::uint64_t>(p);
}
}  // namespace

Philox4x64Counter philox4x64(Philox4x64Counter ctr, Philox4x64Key key)
{
    for (int round = 0; round < 10; ++round)
    {
        if (round > 0)
        {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

Seed Seed::from_hex(std::string_view text)
{
    Seed result;
    auto colon = text.find(':');
    std::string_view hex = text.substr(0, colon);
    if (hex.starts_with("0x") || hex.starts_with("0X"))
        hex.remove_prefix(2);
    if (hex.empty() || hex.size() > 32)
        throw ParseError(fmt::format("seed '{}': expected 1-32 hex digits", text));
    // Low 16 digits go to key[0], the rest to key[1]
    auto parse_part = [&](std::string_view part) {
        std::uint64_t v = 0;
        if (part.empty())
            return v;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v, 16);
        if (ec != std::errc{} || ptr != part.data() + part.size())
            throw ParseError(fmt::format("seed '{}': invalid hex", text));
        return v;
    };
    std::size_t split = hex.size() > 16 ? hex.size() - 16 : 0;
    result.key[1] = parse_part(hex.substr(0, split));
    result.key[0] = parse_part(hex.substr(split));
    if (colon != std::string_view::npos)
    {
        auto s = text.substr(colon + 1);
        auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), result.stream);
        if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
            throw ParseError(fmt::format("seed '{}': invalid stream", text));
    }
    return result;
}

std::string Seed::key_hex() const
{
    return fmt::format("{:016x}{:016x}", key[1], key[0]);
}

std::string Seed::to_string() const
{
    return fmt::format("{}:{}", key_hex(), stream);
}

CounterRng::CounterRng(Seed const& seed, std::uint64_t purpose,
                       std::uint64_t index)
    : key_(seed.key), ctr_{0, index, seed.stream, purpose}
{
}

std::uint64_t CounterRng::next_u64()
{
    if (used_ == 4)
    {
        block_ = philox4x64(ctr_, key_);
        ++ctr_[0];
        used_ = 0;
    }
    return block_[used_++];
}

std::uint64_t CounterRng::below(std::uint64_t n)
{
    // Lemire's threshold: reject the low partial interval
    std::uint64_t threshold = (0 - n) % n;
    for (;;)
    {
        std::uint64_t x = next_u64();
        unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
        if (static_cast<std::uint64_t>(m) >= threshold)
            return static_cast<std::uint64_t>(m >> 64);
    }
}

double CounterRng::normal()
{
    double u1 = 1 - uniform();  // (0, 1]
    double u2 = uniform();
    return std::sqrt(-2 * std::log(u1))
           * std::cos(2 * std::numbers::pi * u2);
}

}  // namespace homwalk
