#ifndef RISO_RNG_HPP
#define RISO_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace riso {

// Deterministic random stream. Gaussian draws are hand-rolled Box-Muller so
// results do not depend on the standard library's distribution internals.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed)
        : eng_(mix(0x9e3779b97f4a7c15ull, seed)), seed_path_(seed) {}

    // uniform on (0,1), never returns exactly 0 or 1
    double uniform() {
        // 53-bit mantissa draw, shifted into the open interval
        std::uint64_t bits = eng_() >> 11;
        double u = (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
        return u;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    double gauss() {
        double u1 = uniform();
        double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // CN(0, var): real and imaginary parts each N(0, var/2)
    std::complex<double> cgauss(double var = 1.0) {
        double s = std::sqrt(var * 0.5);
        return {s * gauss(), s * gauss()};
    }

    std::uint64_t next_u64() { return eng_(); }

    // independent substream derived from this stream's seed path
    RandomStream substream(std::uint64_t tag) const {
        return RandomStream(mix(seed_path_, tag));
    }

private:
    static std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
        // splitmix64 finalizer over the combined word
        std::uint64_t z = a ^ (b + 0x9e3779b97f4a7c15ull + (a << 6) + (a >> 2));
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::mt19937_64 eng_;
    std::uint64_t seed_path_ = 0;
};

} // namespace riso

#endif
