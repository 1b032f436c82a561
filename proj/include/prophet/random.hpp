#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace prophet {

// SplitMix64, used only to expand a 64-bit seed into generator state.
inline std::uint64_t splitmix64(std::uint64_t& x)
{
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256** 1.0 (Blackman & Vigna). Satisfies UniformRandomBitGenerator.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed)
    {
        std::uint64_t x = seed;
        for (auto& w : s_)
            w = splitmix64(x);
    }

    // Stream `index` of `seed`: the base stream advanced by (index + 1)
    // jumps of 2^128 draws, so sub-streams never overlap in practice.
    static Rng substream(std::uint64_t seed, std::uint64_t index)
    {
        Rng r(seed);
        for (std::uint64_t i = 0; i <= index; ++i)
            r.jump();
        return r;
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()()
    {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() { return double((*this)() >> 11) * 0x1.0p-53; }

    void jump()
    {
        static constexpr std::array<std::uint64_t, 4> poly = {
            0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL, 0xa9582618e03fc9aaULL, 0x39abdc4529b1661cULL};
        std::array<std::uint64_t, 4> acc{};
        for (std::uint64_t word : poly)
            for (int b = 0; b < 64; ++b) {
                if (word & (std::uint64_t(1) << b))
                    for (int i = 0; i < 4; ++i)
                        acc[i] ^= s_[i];
                (*this)();
            }
        s_ = acc;
    }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::array<std::uint64_t, 4> s_{};
};

inline Rng seeded_rng(std::uint64_t seed) { return Rng(seed); }

} // namespace prophet
