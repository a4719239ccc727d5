#pragma once

#include <algorithm>
#include <cmath>

#include "wradon/grids.hpp"

namespace wradon::test {

inline double max_abs(const std::vector<Complex>& v)
{
    double m = 0.0;
    for (const Complex& c : v) m = std::max(m, std::abs(c));
    return m;
}

inline double max_diff(const std::vector<Complex>& a, const std::vector<Complex>& b)
{
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// One-direction-per-row sinogram filled from fn(s, theta).
template <typename Fn>
Sinogram tabulate(const SphereGrid& sphere, const SinogramLayout& layout, Fn fn)
{
    Sinogram g(sphere, layout);
    for (std::size_t j = 0; j < sphere.size(); ++j)
        for (std::size_t i = 0; i < g.s_count; ++i) g.at(j, i) = fn(g.s(i), sphere.nodes[j]);
    return g;
}

}  // namespace wradon::test
