#pragma once

#include <szo/core.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace szo {

/// Euclidean projection onto {x : ||x||_1 <= radius} by sorting magnitudes
/// and soft-thresholding at the unique theta with ||result||_1 = radius.
inline Vector project_l1(const Vector& v, double radius) {
    require(radius > 0.0, "l1 radius must be positive");
    const Vector mag = v.cwiseAbs();
    if (mag.sum() <= radius) return v;

    std::vector<double> sorted(mag.data(), mag.data() + mag.size());
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t k = 0; k < sorted.size(); ++k) {
        cumulative += sorted[k];
        const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
        if (k + 1 == sorted.size() || sorted[k + 1] <= candidate) {
            theta = candidate;
            break;
        }
    }
    Vector out(v.size());
    for (Index i = 0; i < v.size(); ++i) {
        const double m = std::max(mag[i] - theta, 0.0);
        out[i] = v[i] < 0.0 ? -m : m;
    }
    return out;
}

}  // namespace szo
