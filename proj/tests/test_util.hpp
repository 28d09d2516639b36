#pragma once

// Small deterministic helpers shared by the test suites.

#include "msstab/matrix.hpp"

#include <cstdint>

// Deterministic xorshift-based generator; independent of the library's
// simulation RNG so tests do not depend on the code under test.
class test_rng {
public:
    explicit test_rng(uint64_t seed) : state_(seed * 2685821657736338717ULL + 1442695040888963407ULL) {}

    uint64_t next_u64() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 2685821657736338717ULL;
    }

    // uniform in [lo, hi)
    double uniform(double lo = -1.0, double hi = 1.0) {
        const double u = (next_u64() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    msstab::Mat random_mat(int rows, int cols, double lo = -1.0, double hi = 1.0) {
        msstab::Mat m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) m(i, j) = uniform(lo, hi);
        return m;
    }

private:
    uint64_t state_;
};
