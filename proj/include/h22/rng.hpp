#pragma once
#include <cstdint>
#include <cmath>

namespace h22 {

// xoshiro256++ with splitmix64 seeding.  Self-contained so that streams are
// byte-stable across platforms and standard-library versions (std::normal_distribution
// is not); artifact determinism depends on this.
class Rng {
public:
    explicit Rng(uint64_t seed) { reseed(seed); }

    void reseed(uint64_t seed) {
        uint64_t x = seed;
        for (auto& w : s_) w = splitmix64(x);
        have_cached_normal_ = false;
    }

    // stream derivation for parallel chains: independent generator per (seed, id)
    static Rng substream(uint64_t seed, uint64_t id) {
        uint64_t x = seed;
        uint64_t a = splitmix64(x);
        x ^= 0x9e3779b97f4a7c15ULL * (id + 1);
        uint64_t b = splitmix64(x);
        Rng r(a ^ (b + id));
        r.next(); r.next();
        return r;
    }

    uint64_t next() {
        uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on [0,1) with 53 random bits
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }

    // uniform on [a,b)
    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    // unbiased integer in [0,n)
    uint64_t uniform_index(uint64_t n) {
        uint64_t x = next();
        __uint128_t m = (__uint128_t)x * n;
        uint64_t lo = (uint64_t)m;
        if (lo < n) {
            uint64_t thresh = (-n) % n;
            while (lo < thresh) {
                x = next();
                m = (__uint128_t)x * n;
                lo = (uint64_t)m;
            }
        }
        return (uint64_t)(m >> 64);
    }

    // standard normal, Box-Muller (pair cached)
    double normal() {
        if (have_cached_normal_) {
            have_cached_normal_ = false;
            return cached_normal_;
        }
        double u1 = uniform(), u2 = uniform();
        while (u1 <= 0x1.0p-60) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double c = std::cos(6.283185307179586476925286766559 * u2);
        double s = std::sin(6.283185307179586476925286766559 * u2);
        cached_normal_ = r * s;
        have_cached_normal_ = true;
        return r * c;
    }

private:
    static uint64_t splitmix64(uint64_t& x) {
        uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    static uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    uint64_t s_[4];
    double cached_normal_ = 0.0;
    bool have_cached_normal_ = false;
};

} // namespace h22
