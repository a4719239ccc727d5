#include "wradon/inversion.hpp"

#include <algorithm>
#include <sstream>

namespace wradon {

ScalarField backproject(const Sinogram& g, const GridSpec& grid, unsigned threads)
{
    if (g.directions.ambient_dim() != grid.dim)
        throw std::invalid_argument("sinogram directions do not match the grid dimension");
    const double need = grid.half_diagonal();
    if (g.s_max() < need * (1.0 - 1e-12))
        throw DataError("sinogram s-range " + std::to_string(g.s_max()) + " does not cover max |x.theta| = " +
                        std::to_string(need));
    ScalarField out(grid);
    const SphereGrid& dirs = g.directions;
    parallel_for(
        grid.shape[0],
        [&](std::size_t i) {
            for (std::size_t j = 0; j < grid.shape[1]; ++j)
                for (std::size_t k = 0; k < grid.shape[2]; ++k) {
                    const Vec3 x = grid.node(i, j, k);
                    Complex sum{};
                    for (std::size_t d = 0; d < dirs.size(); ++d)
                        sum += dirs.weights[d] * g.sample(d, dot(x, dirs.nodes[d]));
                    out.values[grid.index(i, j, k)] = sum;
                }
        },
        threads);
    return out;
}

double chang_constant(int n)
{
    const double sign = (n % 2 == 0) ? (((n - 2) / 2) % 2 == 0 ? 1.0 : -1.0) : (((n - 1) / 2) % 2 == 0 ? 1.0 : -1.0);
    return sign / (2.0 * std::pow(2.0 * kPi, n - 1));
}

Reconstruction chang_invert(const Sinogram& g, const ScalarField& w0, int n, const SpectralPlan& plan, double w0_floor)
{
    if (n != 2 && n != 3) throw std::invalid_argument("chang inversion supports n = 2 or 3");
    if (w0.dim() != n || g.directions.ambient_dim() != n)
        throw std::invalid_argument("dimension mismatch between sinogram, w0 and n");
    for (std::size_t i = 0; i < w0.values.size(); ++i) {
        if (std::abs(w0.values[i]) <= w0_floor) {
            std::ostringstream msg;
            const Vec3 x = w0.grid.node(i);
            msg << "w0 below floor " << w0_floor << " at node " << i << " x = (" << x[0] << ", " << x[1] << ", " << x[2]
                << ")";
            throw DataError(msg.str());
        }
    }
    SpectralPlan p = plan;
    p.n_dim = n;
    const Sinogram filtered = chang_filter(g, n, p);
    Reconstruction rec;
    rec.f_appr = backproject(filtered, w0.grid);
    const double c = chang_constant(n);
    for (std::size_t i = 0; i < rec.f_appr.values.size(); ++i) rec.f_appr.values[i] *= c / w0.values[i];
    rec.metadata = {{"dimension", n},
                    {"constant", c},
                    {"pad_factor", p.pad_factor},
                    {"window", p.window == SpectralPlan::Window::none ? "none" : "cosine_taper"},
                    {"w0_floor", w0_floor},
                    {"directions", g.directions.size()},
                    {"s_count", g.s_count}};
    if (filtered.meta.contains("warnings")) rec.metadata["warnings"] = filtered.meta["warnings"];
    return rec;
}

nlohmann::json ResidualMetrics::to_json() const
{
    return {{"rel_l2", rel_l2},
            {"max_err", max_err},
            {"rel_l2_interior", rel_l2_interior},
            {"max_err_interior", max_err_interior},
            {"support_count", support_count},
            {"interior_count", interior_count},
            {"interior_fraction", interior_fraction}};
}

ResidualMetrics exactness_residual(const ScalarField& f, const ScalarField& rec, double interior_fraction)
{
    if (!(f.grid == rec.grid)) throw std::invalid_argument("reference and reconstruction grids differ");
    ResidualMetrics m;
    m.interior_fraction = interior_fraction;
    double peak = 0.0;
    for (const Complex& v : f.values) peak = std::max(peak, std::abs(v));
    if (peak == 0.0) return m;
    const double thresh = 1e-12 * peak;

    Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (std::abs(f.values[i]) <= thresh) continue;
        const Vec3 x = f.grid.node(i);
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], x[a]);
            hi[a] = std::max(hi[a], x[a]);
        }
    }
    const Vec3 center = 0.5 * (lo + hi);
    double radius = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i)
        if (std::abs(f.values[i]) > thresh) radius = std::max(radius, norm(f.grid.node(i) - center));
    const double r_in = interior_fraction * radius;

    double err2 = 0.0, ref2 = 0.0, err2_in = 0.0, ref2_in = 0.0;
    for (std::size_t i = 0; i < f.values.size(); ++i) {
        if (std::abs(f.values[i]) <= thresh) continue;
        const double e = std::abs(rec.values[i] - f.values[i]);
        const double r = std::abs(f.values[i]);
        err2 += e * e;
        ref2 += r * r;
        m.max_err = std::max(m.max_err, e);
        ++m.support_count;
        if (norm(f.grid.node(i) - center) <= r_in) {
            err2_in += e * e;
            ref2_in += r * r;
            m.max_err_interior = std::max(m.max_err_interior, e);
            ++m.interior_count;
        }
    }
    m.rel_l2 = std::sqrt(err2 / ref2);
    m.rel_l2_interior = ref2_in > 0.0 ? std::sqrt(err2_in / ref2_in) : 0.0;
    return m;
}

}  // namespace wradon
