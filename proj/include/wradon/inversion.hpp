#pragma once

#include <json.hpp>

#include "wradon/filters.hpp"
#include "wradon/grids.hpp"

namespace wradon {

/// x -> sum_j mu_j g(x . theta_j, theta_j), linear in s.
/// Throws DataError when the offsets do not reach max |x . theta| over the grid.
ScalarField backproject(const Sinogram& g, const GridSpec& grid, unsigned threads = 0);

struct Reconstruction {
    ScalarField f_appr;
    nlohmann::json metadata = nlohmann::json::object();
};

/// (-1)^((n-2)/2) / (2 (2 pi)^(n-1)) for even n, (-1)^((n-1)/2) / (2 (2 pi)^(n-1)) for odd n.
double chang_constant(int n);

/// f_appr = chang_constant(n) * backproject(chang_filter(g, n)) / w0, on the grid of `w0`.
Reconstruction chang_invert(const Sinogram& g, const ScalarField& w0, int n, const SpectralPlan& plan = {},
                            double w0_floor = 1e-8);

struct ResidualMetrics {
    double rel_l2 = 0.0;  // over the support of f
    double max_err = 0.0;
    double rel_l2_interior = 0.0;  // support shrunk by the boundary shell
    double max_err_interior = 0.0;
    std::size_t support_count = 0;
    std::size_t interior_count = 0;
    double interior_fraction = 0.9;

    nlohmann::json to_json() const;
};

/// Support = nodes with |f| > 1e-12 max|f|. The interior keeps support nodes within
/// interior_fraction * R of the support's bounding-box center, R being the support's
/// largest distance from that center. Throws std::invalid_argument on grid mismatch.
ResidualMetrics exactness_residual(const ScalarField& f, const ScalarField& rec, double interior_fraction = 0.9);

}  // namespace wradon
