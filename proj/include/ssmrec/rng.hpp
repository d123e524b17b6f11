#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace ssmrec {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Deterministic random stream. All draws are hand-rolled on top of the raw
// 64-bit generator output so sequences are identical across standard
// libraries and platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Independent substream keyed by (seed, stream_id).
    static Rng stream(std::uint64_t seed, std::uint64_t stream_id) {
        std::uint64_t s = seed;
        std::uint64_t a = splitmix64(s);
        s = a ^ (0xd1b54a32d192ed03ULL * (stream_id + 1));
        return Rng(splitmix64(s));
    }

    std::uint64_t next_u64() { return gen_(); }

    // [0, 1)
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // (0, 1]
    double uniform_open0() { return 1.0 - uniform(); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // [0, bound), bound >= 1
    std::uint64_t bounded(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * bound) >> 64);
    }

    int uniform_int(int bound) { return static_cast<int>(bounded(static_cast<std::uint64_t>(bound))); }

    // Box-Muller; the second deviate is cached.
    double normal(double mu = 0.0, double sigma = 1.0) {
        if (has_cached_) {
            has_cached_ = false;
            return mu + sigma * cached_;
        }
        double u1 = uniform_open0();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double t = 2.0 * 3.14159265358979323846 * u2;
        cached_ = r * std::sin(t);
        has_cached_ = true;
        return mu + sigma * r * std::cos(t);
    }

    // Fisher-Yates with the bounded draw above.
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(bounded(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 gen_;
    double cached_ = 0.0;
    bool has_cached_ = false;
};

}  // namespace ssmrec
