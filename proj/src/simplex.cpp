#include "proxpen/simplex.hpp"

#include <algorithm>
#include <functional>
#include <vector>

namespace proxpen {

Vector project_simplex(const Vector& x)
{
    const Index n = x.size();
    require(n >= 1, "project_simplex: empty vector");
    std::vector<double> sorted(x.data(), x.data() + n);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());

    // Largest k with sorted[k-1] - (sum_{i<k} sorted[i] - 1)/k > 0.
    double cumsum = 0.0;
    double theta = 0.0;
    for (Index k = 1; k <= n; ++k) {
        cumsum += sorted[k - 1];
        const double candidate = (cumsum - 1.0) / static_cast<double>(k);
        if (sorted[k - 1] - candidate > 0.0) theta = candidate;
    }
    return (x.array() - theta).cwiseMax(0.0).matrix();
}

bool in_simplex(const Vector& z)
{
    if (z.size() == 0 || !z.allFinite()) return false;
    return z.minCoeff() >= -1e-12 && std::abs(z.sum() - 1.0) <= 1e-9;
}

} // namespace proxpen
