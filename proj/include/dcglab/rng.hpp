#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace dcglab {

/// Seeded generator with platform-independent output. The engine is
/// std::mt19937_64; the conversions to uniform/normal/bounded values are
/// spelled out here because the std distributions are implementation-defined.
class Rng {
public:
    explicit Rng(std::uint64_t seed);
    /// Seeds from a key of several integers (e.g. {seed, epoch}).
    Rng(std::initializer_list<std::uint64_t> key);

    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal via Box-Muller.
    double normal();
    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n);

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    /// A uniformly random permutation of 0..n-1.
    std::vector<std::size_t> permutation(std::size_t n);

private:
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace dcglab
