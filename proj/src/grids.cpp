#include "wradon/grids.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>
#include <thread>

namespace wradon {

namespace {
std::atomic<unsigned> g_default_threads{0};
}

void set_default_threads(unsigned threads) { g_default_threads = threads; }

unsigned default_threads()
{
    const unsigned t = g_default_threads.load();
    if (t != 0) return t;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn, unsigned threads)
{
    if (threads == 0) threads = default_threads();
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

Frame orthonormal_frame(const Vec3& n)
{
    std::size_t k = 0;
    for (std::size_t a = 1; a < 3; ++a)
        if (std::abs(n[a]) < std::abs(n[k])) k = a;
    Vec3 e{0.0, 0.0, 0.0};
    e[k] = 1.0;
    const Vec3 u = normalized(cross(n, e));
    return {u, cross(n, u)};
}

Frame plane_basis(const Vec3& pole)
{
    if (pole[0] == 0.0 && pole[1] == 0.0 && pole[2] == 1.0) return {{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
    return orthonormal_frame(pole);
}

// ---------------------------------------------------------------------------
// GridSpec

GridSpec GridSpec::centered(int dim, std::size_t n, double h)
{
    return centered(dim, {n, n, dim == 3 ? n : 1}, {h, h, dim == 3 ? h : 1.0});
}

GridSpec GridSpec::centered(int dim, std::array<std::size_t, 3> shape, std::array<double, 3> spacing)
{
    GridSpec g;
    g.dim = dim;
    g.shape = shape;
    g.spacing = spacing;
    if (dim == 2) {
        g.shape[2] = 1;
        g.spacing[2] = 1.0;
    }
    for (int a = 0; a < dim; ++a) g.origin[a] = -0.5 * static_cast<double>(g.shape[a] - 1) * g.spacing[a];
    g.validate();
    return g;
}

void GridSpec::validate() const
{
    if (dim != 2 && dim != 3) throw std::invalid_argument("grid dimension must be 2 or 3");
    for (int a = 0; a < dim; ++a) {
        if (shape[a] < 2) throw std::invalid_argument("grid needs at least 2 nodes per axis");
        if (!(spacing[a] > 0.0)) throw std::invalid_argument("grid spacing must be positive");
    }
    if (dim == 2 && shape[2] != 1) throw std::invalid_argument("2D grid must have shape[2] == 1");
}

Vec3 GridSpec::node(std::size_t flat) const
{
    const std::size_t k = flat % shape[2];
    const std::size_t j = (flat / shape[2]) % shape[1];
    const std::size_t i = flat / (shape[1] * shape[2]);
    return node(i, j, k);
}

Vec3 GridSpec::upper() const
{
    Vec3 u = origin;
    for (int a = 0; a < dim; ++a) u[a] += static_cast<double>(shape[a] - 1) * spacing[a];
    return u;
}

double GridSpec::min_spacing() const
{
    double h = spacing[0];
    for (int a = 1; a < dim; ++a) h = std::min(h, spacing[a]);
    return h;
}

double GridSpec::cell_volume() const
{
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= spacing[a];
    return v;
}

double GridSpec::half_diagonal() const
{
    const Vec3 up = upper();
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) {
        const double m = std::max(std::abs(origin[a]), std::abs(up[a]));
        r2 += m * m;
    }
    return std::sqrt(r2);
}

// ---------------------------------------------------------------------------
// ScalarField

ScalarField::ScalarField(GridSpec g, Complex fill) : grid(g), values(g.size(), fill) { grid.validate(); }

Complex interpolate(const ScalarField& field, const Vec3& x)
{
    const GridSpec& g = field.grid;
    std::array<std::size_t, 3> i0{0, 0, 0};
    std::array<double, 3> t{0.0, 0.0, 0.0};
    for (int a = 0; a < g.dim; ++a) {
        const double u = (x[a] - g.origin[a]) / g.spacing[a];
        const double last = static_cast<double>(g.shape[a] - 1);
        if (!(u >= 0.0 && u <= last)) return {};
        auto c = static_cast<std::size_t>(u);
        if (c >= g.shape[a] - 1) c = g.shape[a] - 2;
        i0[a] = c;
        t[a] = u - static_cast<double>(c);
    }
    const auto& v = field.values;
    if (g.dim == 2) {
        const std::size_t b = i0[0] * g.shape[1] + i0[1];
        const std::size_t n1 = g.shape[1];
        const Complex a0 = v[b] * (1.0 - t[1]) + v[b + 1] * t[1];
        const Complex a1 = v[b + n1] * (1.0 - t[1]) + v[b + n1 + 1] * t[1];
        return a0 * (1.0 - t[0]) + a1 * t[0];
    }
    const std::size_t n2 = g.shape[2];
    const std::size_t n12 = g.shape[1] * n2;
    const std::size_t b = i0[0] * n12 + i0[1] * n2 + i0[2];
    auto lerp_k = [&](std::size_t base) { return v[base] * (1.0 - t[2]) + v[base + 1] * t[2]; };
    const Complex c00 = lerp_k(b);
    const Complex c01 = lerp_k(b + n2);
    const Complex c10 = lerp_k(b + n12);
    const Complex c11 = lerp_k(b + n12 + n2);
    const Complex c0 = c00 * (1.0 - t[1]) + c01 * t[1];
    const Complex c1 = c10 * (1.0 - t[1]) + c11 * t[1];
    return c0 * (1.0 - t[0]) + c1 * t[0];
}

double support_radius(const ScalarField& field)
{
    double r2 = -1.0;
    for (std::size_t i = 0; i < field.values.size(); ++i) {
        if (field.values[i] == Complex{}) continue;
        const Vec3 x = field.grid.node(i);
        r2 = std::max(r2, dot(x, x));
    }
    if (r2 < 0.0) return 0.0;
    double cell2 = 0.0;
    for (int a = 0; a < field.grid.dim; ++a) cell2 += field.grid.spacing[a] * field.grid.spacing[a];
    return std::sqrt(r2) + std::sqrt(cell2);
}

// ---------------------------------------------------------------------------
// Sphere grids

namespace {

// Unit circle node for angle 2 pi j / m; quadrant points are exact.
std::array<double, 2> circle_point(std::size_t j, std::size_t m)
{
    if ((4 * j) % m == 0) {
        switch ((4 * j) / m) {
        case 0: return {1.0, 0.0};
        case 1: return {0.0, 1.0};
        case 2: return {-1.0, 0.0};
        default: return {0.0, -1.0};
        }
    }
    const double phi = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(m);
    return {std::cos(phi), std::sin(phi)};
}

// First half computed, second half negated, so node[j + m/2] == -node[j].
std::vector<std::array<double, 2>> closed_circle(std::size_t m)
{
    std::vector<std::array<double, 2>> pts(m);
    for (std::size_t j = 0; j < m / 2; ++j) {
        pts[j] = circle_point(j, m);
        pts[j + m / 2] = {-pts[j][0], -pts[j][1]};
    }
    return pts;
}

}  // namespace

SphereGrid make_circle_grid(std::size_t count)
{
    if (count < 4 || count % 2 != 0)
        throw std::invalid_argument("circle grid needs an even node count >= 4 for antipodal closure");
    SphereGrid g;
    g.kind = SphereGrid::Kind::circle;
    g.dim_sphere = 1;
    g.azimuth_count = count;
    const auto pts = closed_circle(count);
    g.nodes.resize(count);
    g.weights.assign(count, 2.0 * kPi / static_cast<double>(count));
    g.antipode.resize(count);
    for (std::size_t j = 0; j < count; ++j) {
        g.nodes[j] = {pts[j][0], pts[j][1], 0.0};
        g.antipode[j] = (j + count / 2) % count;
    }
    return g;
}

void gauss_legendre(std::size_t count, std::vector<double>& nodes, std::vector<double>& weights)
{
    nodes.assign(count, 0.0);
    weights.assign(count, 0.0);
    const double n = static_cast<double>(count);
    for (std::size_t i = 0; i < (count + 1) / 2; ++i) {
        // i-th root from the top, refined by Newton on P_n.
        double x = std::cos(kPi * (static_cast<double>(i) + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (std::size_t k = 2; k <= count; ++k) {
                const double kk = static_cast<double>(k);
                const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        if (count % 2 == 1 && i == count / 2) x = 0.0;
        // recompute derivative at the final root for the weight
        double p0 = 1.0, p1 = x;
        for (std::size_t k = 2; k <= count; ++k) {
            const double kk = static_cast<double>(k);
            const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[count - 1 - i] = x;
        nodes[i] = -x;
        weights[count - 1 - i] = w;
        weights[i] = w;
    }
}

SphereGrid make_sphere_grid(std::size_t polar_count, std::size_t azimuth_count, const Vec3& pole)
{
    if (polar_count < 2) throw std::invalid_argument("sphere grid needs at least 2 polar nodes");
    if (azimuth_count < 4 || azimuth_count % 2 != 0)
        throw std::invalid_argument("sphere grid needs an even azimuth count >= 4 for antipodal closure");
    SphereGrid g;
    g.kind = SphereGrid::Kind::gauss_legendre;
    g.dim_sphere = 2;
    g.polar_count = polar_count;
    g.azimuth_count = azimuth_count;
    g.pole = normalized(pole);

    const Frame basis = plane_basis(g.pole);
    const Vec3& e1 = basis.u;
    const Vec3& e2 = basis.v;

    std::vector<double> x, w;
    gauss_legendre(polar_count, x, w);
    const auto az = closed_circle(azimuth_count);
    const double dphi = 2.0 * kPi / static_cast<double>(azimuth_count);

    const std::size_t total = polar_count * azimuth_count;
    g.nodes.resize(total);
    g.weights.resize(total);
    g.antipode.resize(total);
    for (std::size_t i = 0; i < polar_count; ++i) {
        const double sin_psi = std::sqrt((1.0 - x[i]) * (1.0 + x[i]));
        for (std::size_t k = 0; k < azimuth_count; ++k) {
            const double a = sin_psi * az[k][0];
            const double b = sin_psi * az[k][1];
            const double c = x[i];
            const std::size_t j = i * azimuth_count + k;
            g.nodes[j] = {a * e1[0] + b * e2[0] + c * g.pole[0], a * e1[1] + b * e2[1] + c * g.pole[1],
                          a * e1[2] + b * e2[2] + c * g.pole[2]};
            g.weights[j] = w[i] * dphi;
            g.antipode[j] = (polar_count - 1 - i) * azimuth_count + (k + azimuth_count / 2) % azimuth_count;
        }
    }
    return g;
}

// ---------------------------------------------------------------------------
// Sinogram

Sinogram::Sinogram(SphereGrid dirs, const SinogramLayout& layout)
    : s_count(layout.s_count), directions(std::move(dirs))
{
    if (layout.s_count < 2) throw std::invalid_argument("sinogram needs at least 2 offsets");
    if (!(layout.s_max > 0.0)) throw std::invalid_argument("sinogram s_max must be positive");
    s_step = layout.s_step();
    values.assign(directions.size() * s_count, Complex{});
}

Complex Sinogram::sample(std::size_t dir, double s) const
{
    const double u = s / s_step + 0.5 * static_cast<double>(s_count - 1);
    const double last = static_cast<double>(s_count - 1);
    if (!(u >= 0.0 && u <= last)) return {};
    auto i = static_cast<std::size_t>(u);
    if (i >= s_count - 1) i = s_count - 2;
    const double t = u - static_cast<double>(i);
    const Complex* row = values.data() + dir * s_count;
    return row[i] * (1.0 - t) + row[i + 1] * t;
}

bool Sinogram::same_layout(const Sinogram& o) const
{
    return s_count == o.s_count && s_step == o.s_step && directions.nodes == o.directions.nodes;
}

// ---------------------------------------------------------------------------
// Phantoms

double smooth_step_down(double t)
{
    if (t <= -0.5) return 1.0;
    if (t >= 0.5) return 0.0;
    return 0.5 * (1.0 - std::sin(kPi * t));
}

namespace {

void require_inside(const GridSpec& g, const Vec3& center, double reach)
{
    const Vec3 up = g.upper();
    for (int a = 0; a < g.dim; ++a) {
        if (!(center[a] - reach > g.origin[a] && center[a] + reach < up[a]))
            throw std::invalid_argument("phantom support exceeds the grid bounding box");
    }
}

double edge_width(const GridSpec& g, double edge) { return edge < 0.0 ? 2.0 * g.min_spacing() : edge; }

double dist(const Vec3& a, const Vec3& b, int dim)
{
    double r2 = 0.0;
    for (int k = 0; k < dim; ++k) r2 += (a[k] - b[k]) * (a[k] - b[k]);
    return std::sqrt(r2);
}

}  // namespace

ScalarField make_phantom(const GridSpec& grid, const PhantomSpec& spec)
{
    grid.validate();
    ScalarField f(grid);
    const int dim = grid.dim;

    if (const auto* ball = std::get_if<BallPhantom>(&spec)) {
        if (!(ball->radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
        const double w = edge_width(grid, ball->edge);
        require_inside(grid, ball->center, ball->raw ? ball->radius : ball->radius + 0.5 * w);
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            const double r = dist(grid.node(i), ball->center, dim);
            const double v = ball->raw ? (r <= ball->radius ? 1.0 : 0.0) : smooth_step_down((r - ball->radius) / w);
            f.values[i] = ball->amplitude * v;
        }
    } else if (const auto* gs = std::get_if<GaussianPhantom>(&spec)) {
        if (!(gs->sigma > 0.0)) throw std::invalid_argument("gaussian sigma must be positive");
        const double cutoff = gs->sigma * std::sqrt(2.0 * std::log(1e12));
        require_inside(grid, gs->center, cutoff);
        for (std::size_t i = 0; i < f.values.size(); ++i) {
            const double r = dist(grid.node(i), gs->center, dim);
            if (r < cutoff) f.values[i] = gs->amplitude * std::exp(-r * r / (2.0 * gs->sigma * gs->sigma));
        }
    } else {
        const auto& el = std::get<EllipsoidsPhantom>(spec);
        const double w = edge_width(grid, el.edge);
        for (const auto& e : el.items) {
            double amax = 0.0, amin = e.semi_axes[0];
            for (int a = 0; a < dim; ++a) {
                if (!(e.semi_axes[a] > 0.0)) throw std::invalid_argument("ellipsoid semi-axes must be positive");
                amax = std::max(amax, e.semi_axes[a]);
                amin = std::min(amin, e.semi_axes[a]);
            }
            require_inside(grid, e.center, el.raw ? amax : amax + 0.5 * w);
            const double ca = std::cos(e.angle), sa = std::sin(e.angle);
            for (std::size_t i = 0; i < f.values.size(); ++i) {
                const Vec3 d = grid.node(i) - e.center;
                const Vec3 l{ca * d[0] + sa * d[1], -sa * d[0] + ca * d[1], d[2]};
                double rho2 = 0.0;
                for (int a = 0; a < dim; ++a) rho2 += (l[a] / e.semi_axes[a]) * (l[a] / e.semi_axes[a]);
                const double rho = std::sqrt(rho2);
                const double v = el.raw ? (rho <= 1.0 ? 1.0 : 0.0) : smooth_step_down((rho - 1.0) * amin / w);
                f.values[i] += e.amplitude * v;
            }
        }
    }
    return f;
}

}  // namespace wradon
