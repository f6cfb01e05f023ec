#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gpexperts {

// Derive an independent stream seed from (seed, stream id), splitmix64-style.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// mt19937_64 engine with hand-rolled distributions. The std:: distributions are
// implementation-defined, which would break bitwise reproducibility of seeded
// runs across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform in [0, 1), 53-bit resolution
    double uniform();
    double uniform(double lo, double hi);

    // standard normal via Box-Muller
    double normal();

    // uniform over {0, ..., n-1}, unbiased (rejection sampling); n >= 1
    std::size_t uniform_index(std::size_t n);

    // k distinct values from {0, ..., n-1}, uniform over k-subsets, in draw order
    std::vector<int> sample_without_replacement(int n, int k);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[uniform_index(i)]);
        }
    }

private:
    std::mt19937_64 eng_;
};

}  // namespace gpexperts
