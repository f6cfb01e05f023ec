#include "gpexperts/rng.hpp"

#include "gpexperts/types.hpp"

#include <cmath>
#include <numbers>

namespace gpexperts {

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

double Rng::uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
}

double Rng::normal() {
    // (0, 1] for the log argument
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t Rng::uniform_index(std::size_t n) {
    if (n == 0) throw InputError("uniform_index: n must be >= 1");
    if (n == 1) return 0;
    // rejection sampling over the largest multiple of n
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = eng_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % n);
}

std::vector<int> Rng::sample_without_replacement(int n, int k) {
    if (k > n || k < 0) throw InputError("sample_without_replacement: need 0 <= k <= n");
    // partial Fisher-Yates on a scratch index array
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    std::vector<int> out(k);
    for (int i = 0; i < k; ++i) {
        std::size_t j = i + uniform_index(static_cast<std::size_t>(n - i));
        std::swap(idx[i], idx[j]);
        out[i] = idx[i];
    }
    return out;
}

}  // namespace gpexperts
