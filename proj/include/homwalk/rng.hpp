// SPDX-License-Identifier: Apache-2.0
// Copyright the homwalk authors
#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace homwalk
{
using Philox4x64Counter = std::array<std::uint64_t, 4>;
using Philox4x64Key = std::array<std::uint64_t, 2>;

//! Philox4x64 with 10 rounds (Salmon et al. 2011).
Philox4x64Counter philox4x64(Philox4x64Counter ctr, Philox4x64Key key);

//---------------------------------------------------------------------------//
/*!
 * 128-bit key plus 64-bit stream.
 *
 * Hex form is up to 32 hex digits for the key, optionally followed by
 * ":stream" in decimal.
 */
struct Seed
{
    Philox4x64Key key{0, 0};
    std::uint64_t stream{0};

    static Seed from_hex(std::string_view text);
    std::string key_hex() const;
    std::string to_string() const;

    friend bool operator==(Seed const&, Seed const&) = default;
};

//---------------------------------------------------------------------------//
/*!
 * Counter-mode generator over one (seed, purpose, index) substream.
 *
 * The counter is (block, index, seed.stream, purpose) so every trial of
 * every experiment draws from its own disjoint block sequence without any
 * shared state.
 */
class CounterRng
{
  public:
    CounterRng(Seed const& seed, std::uint64_t purpose, std::uint64_t index);

    std::uint64_t next_u64();

    //! Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1p-53; }

    //! Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    //! Uniform integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n);

    //! Standard normal by Box-Muller.
    double normal();

  private:
    Philox4x64Key key_;
    Philox4x64Counter ctr_;
    Philox4x64Counter block_{};
    int used_{4};
};

//! Purpose tags keep independent uses of one seed in disjoint substreams.
enum class Purpose : std::uint64_t
{
    walk = 1,
    haar = 2,
    net_repair = 3,
    centers = 4,
    volume = 5,
    perturb = 6,
    pairs = 7,
    conjugates = 8,
    test_function = 9,
};

inline CounterRng
make_rng(Seed const& seed, Purpose p, std::uint64_t index = 0)
{
    return CounterRng(seed, static_cast<std::uint64_t>(p), index);
}

}  // namespace homwalk
