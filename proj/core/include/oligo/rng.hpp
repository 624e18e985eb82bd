#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace oligo {

// Uniform double in [0,1). Derived directly from the raw 64-bit stream so
// output does not depend on the standard library's distribution internals.
inline double uniform01(std::mt19937_64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n).
inline int uniform_below(std::mt19937_64& g, int n) {
    return static_cast<int>(static_cast<unsigned __int128>(g()) * static_cast<unsigned>(n) >> 64);
}

// Index sampled from unnormalized non-negative weights. Returns -1 when all
// weights are zero.
inline int sample_weighted(std::mt19937_64& g, const std::vector<double>& w) {
    double total = 0;
    for (double x : w) total += x;
    if (total <= 0) return -1;
    double u = uniform01(g) * total;
    double acc = 0;
    for (size_t i = 0; i < w.size(); ++i) {
        acc += w[i];
        if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(w.size()) - 1;
}

}  // namespace oligo
