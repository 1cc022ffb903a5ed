#pragma once

#include <vector>

#include "rso2stat/rng.hpp"
#include "rso2stat/series.hpp"

namespace rso2stat {

/// One completed copy of a censored series: censored slots replaced by
/// independent U(0, detection_limit) draws, everything else untouched.
struct ImputedSeries {
    const Rso2Series* base = nullptr;
    std::vector<double> values;
    int m = 0;

    [[nodiscard]] std::size_t size() const { return values.size(); }
};

/// m-th imputation of the series. Draws are taken from rng.child("impute", m),
/// so the same (stream, m) pair always produces the same completed copy.
ImputedSeries impute(const Rso2Series& series, int m, const RngStream& rng);

/// M independent completions (m = 1..M). M must be >= 2.
std::vector<ImputedSeries> impute_set(const Rso2Series& series, int M, const RngStream& rng);

}  // namespace rso2stat
