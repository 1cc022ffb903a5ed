#include "rso2stat/imputation.hpp"

#include <stdexcept>

namespace rso2stat {

ImputedSeries impute(const Rso2Series& series, int m, const RngStream& rng) {
    if (m < 1) throw std::invalid_argument("impute: imputation index m must be >= 1");
    ImputedSeries out;
    out.base = &series;
    out.m = m;
    out.values = series.values;
    RngStream draw = rng.child("impute", static_cast<std::uint64_t>(m));
    for (std::size_t k = 0; k < series.size(); ++k)
        if (series.censored[k])
            out.values[k] = series.detection_limit * draw.uniform01();
    return out;
}

std::vector<ImputedSeries> impute_set(const Rso2Series& series, int M, const RngStream& rng) {
    if (M < 2) throw std::invalid_argument("impute_set: need M >= 2 for Rubin variance");
    std::vector<ImputedSeries> out;
    out.reserve(M);
    for (int m = 1; m <= M; ++m) out.push_back(impute(series, m, rng));
    return out;
}

}  // namespace rso2stat
