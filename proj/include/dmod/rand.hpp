#pragma once

#include <cstdint>
#include <random>

namespace dmod {

using u64 = std::uint64_t;

/// splitmix64 step.  Used to derive independent child seeds from a master
/// seed; the output sequence is fixed by the algorithm, not the platform.
inline u64 splitmix64(u64& state) {
    u64 z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Child seed for stream `index` of a master seed.
inline u64 derive_seed(u64 master, u64 index) {
    u64 s = master ^ (0x517cc1b727220a95ULL * (index + 1));
    return splitmix64(s);
}

/// Deterministic RNG wrapper.  std::mt19937_64 output is pinned by the
/// standard; draws below a bound use rejection so results never depend on
/// library-specific distribution code.
class Rng {
public:
    explicit Rng(u64 seed) : eng_(seed) {}

    u64 next() { return eng_(); }

    /// Uniform value in [0, bound).  bound must be nonzero.
    u64 below(u64 bound) {
        const u64 limit = bound * (UINT64_MAX / bound);  // multiple of bound
        for (;;) {
            u64 x = eng_();
            if (x < limit || limit == 0) return x % bound;
        }
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace dmod
