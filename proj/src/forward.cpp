#include "wradon/forward.hpp"

#include <algorithm>
#include <limits>
#include <random>

namespace wradon {

namespace {

double quad_step(const ScalarField& f, const ProjectorSettings& settings)
{
    return settings.step > 0.0 ? settings.step : 0.5 * f.grid.min_spacing();
}

// Sum of step^(n-1) * W f over lattice points of the hyperplane x . theta = s
// inside the ball of radius rho.
Complex plane_sum(const ScalarField& f, const Weight& w, double s, const Vec3& theta, double dt, double rho)
{
    const double r2 = rho * rho - s * s;
    if (r2 <= 0.0) return {};
    const double r = std::sqrt(r2);
    const Vec3 center = s * theta;
    Complex sum{};
    if (f.dim() == 2) {
        const Vec3 perp{theta[1], -theta[0], 0.0};
        const auto kmax = static_cast<long>(r / dt);
        for (long k = -kmax; k <= kmax; ++k) {
            const Vec3 x = center + (static_cast<double>(k) * dt) * perp;
            const Complex fx = interpolate(f, x);
            if (fx != Complex{}) sum += w(x, theta) * fx;
        }
        return sum * dt;
    }
    const Frame fr = orthonormal_frame(theta);
    const auto amax = static_cast<long>(r / dt);
    for (long a = -amax; a <= amax; ++a) {
        const double p = static_cast<double>(a) * dt;
        const double rq = std::sqrt(std::max(r2 - p * p, 0.0));
        const auto bmax = static_cast<long>(rq / dt);
        const Vec3 row = center + p * fr.u;
        for (long b = -bmax; b <= bmax; ++b) {
            const Vec3 x = row + (static_cast<double>(b) * dt) * fr.v;
            const Complex fx = interpolate(f, x);
            if (fx != Complex{}) sum += w(x, theta) * fx;
        }
    }
    return sum * (dt * dt);
}

}  // namespace

Sinogram radon_w(const ScalarField& f, const Weight& w, const SphereGrid& directions, const SinogramLayout& layout,
                 const ProjectorSettings& settings)
{
    if (directions.ambient_dim() != f.dim())
        throw std::invalid_argument("direction grid dimension does not match the field");
    Sinogram out(directions, layout);
    const double rho = support_radius(f);
    if (layout.s_max < rho)
        throw DataError("sinogram s-range " + std::to_string(layout.s_max) + " does not cover the support radius " +
                        std::to_string(rho));
    if (rho == 0.0) return out;
    const double dt = quad_step(f, settings);
    parallel_for(
        directions.size(),
        [&](std::size_t j) {
            for (std::size_t i = 0; i < out.s_count; ++i)
                out.at(j, i) = plane_sum(f, w, out.s(i), directions.nodes[j], dt, rho);
        },
        settings.threads);
    out.meta["projector"] = {{"step", dt}, {"support_radius", rho}, {"weight", w.description()}};
    return out;
}

Complex radon_sample(const ScalarField& f, const Weight& w, double s, const Vec3& theta,
                     const ProjectorSettings& settings)
{
    const double rho = support_radius(f);
    if (rho == 0.0) return {};
    return plane_sum(f, w, s, theta, quad_step(f, settings), rho);
}

// ---------------------------------------------------------------------------
// Rays

void RayLayout::validate() const
{
    if (std::abs(norm(eta) - 1.0) > 1e-12) throw std::invalid_argument("eta must be a unit vector");
    if (slice_count < 2 || offset_count < 2) throw std::invalid_argument("ray layout needs >= 2 slices and offsets");
    if (alpha_count < 4 || alpha_count % 2 != 0) throw std::invalid_argument("ray alpha count must be even and >= 4");
    if (!(slice_step > 0.0) || !(offset_step > 0.0)) throw std::invalid_argument("ray steps must be positive");
}

Vec3 RayLayout::alpha(std::size_t k) const
{
    const SphereGrid circle = make_circle_grid(alpha_count);
    const Frame b = plane_basis(eta);
    const Vec3& c = circle.nodes[k];
    return c[0] * b.u + c[1] * b.v;
}

Vec3 RayLayout::beta(std::size_t k) const { return cross(eta, alpha(k)); }

Vec3 RayLayout::base(std::size_t l, std::size_t k, std::size_t m) const
{
    return zeta(l) * eta + offset(m) * beta(k);
}

RayData ray_transform(const ScalarField& f, const Weight& w, const RayLayout& layout, const ProjectorSettings& settings)
{
    layout.validate();
    if (f.dim() != 3) throw std::invalid_argument("ray transform is defined for 3D fields");
    RayData out;
    out.layout = layout;
    out.values.assign(layout.size(), Complex{});
    const double rho = support_radius(f);
    if (rho == 0.0) return out;
    const double dt = quad_step(f, settings);

    std::vector<Vec3> alphas(layout.alpha_count), betas(layout.alpha_count);
    for (std::size_t k = 0; k < layout.alpha_count; ++k) {
        alphas[k] = layout.alpha(k);
        betas[k] = cross(layout.eta, alphas[k]);
    }
    parallel_for(
        layout.slice_count * layout.alpha_count,
        [&](std::size_t lk) {
            const std::size_t l = lk / layout.alpha_count;
            const std::size_t k = lk % layout.alpha_count;
            const Vec3& a = alphas[k];
            for (std::size_t m = 0; m < layout.offset_count; ++m) {
                const Vec3 x0 = layout.zeta(l) * layout.eta + layout.offset(m) * betas[k];
                const double r2 = rho * rho - dot(x0, x0);
                if (r2 <= 0.0) continue;
                const auto kmax = static_cast<long>(std::sqrt(r2) / dt);
                Complex sum{};
                for (long t = -kmax; t <= kmax; ++t) {
                    const Vec3 x = x0 + (static_cast<double>(t) * dt) * a;
                    const Complex fx = interpolate(f, x);
                    if (fx != Complex{}) sum += w(x, a) * fx;
                }
                out.values[layout.index(l, k, m)] = sum * dt;
            }
        },
        settings.threads);
    return out;
}

RayData add_noise(const RayData& rays, double sigma, std::uint64_t seed)
{
    if (!(sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
    RayData out = rays;
    out.noise_sigma = sigma;
    out.noise_seed = seed;
    out.noisy = true;
    if (sigma == 0.0) return out;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    for (Complex& v : out.values) v += normal(rng);
    return out;
}

// ---------------------------------------------------------------------------
// Reduction

Vec3 reduction_alpha(const Vec3& eta, const Vec3& theta) { return normalized(cross(eta, theta)); }

Weight induced_plane_weight(const Weight& ray_weight, const Vec3& eta)
{
    const Vec3 fallback = plane_basis(eta).u;
    auto eval = [ray_weight, eta, fallback](const Vec3& x, const Vec3& theta) {
        const Vec3 n = cross(eta, theta);
        const double nn = norm(n);
        return ray_weight(x, nn > 0.0 ? Vec3{n[0] / nn, n[1] / nn, n[2] / nn} : fallback);
    };
    return Weight(Weight::Kind::custom, eval, ray_weight.bound(),
                  {{"kind", "induced"}, {"eta", eta}, {"of", ray_weight.description()}});
}

namespace {

struct RayStencil {
    std::size_t index[8];
    double coeff[8];
    int count = 0;
};

}  // namespace

Reduction reduce_rays_to_planes(const RayData& rays, const SphereGrid& directions, const SinogramLayout& layout,
                                const ReductionOptions& options, const Weight* ray_weight)
{
    const RayLayout& rl = rays.layout;
    rl.validate();
    if (directions.dim_sphere != 2) throw std::invalid_argument("reduction needs directions on S^2");
    if (rays.values.size() != rl.size()) throw DataError("ray data size does not match its layout");

    Reduction red;
    red.sinogram = Sinogram(directions, layout);
    red.missing.assign(directions.size(), 0);
    red.tau.assign(directions.size() * layout.s_count, TauStats{});
    if (ray_weight) red.induced_weight = induced_plane_weight(*ray_weight, rl.eta);

    const Frame basis = plane_basis(rl.eta);
    const double zeta_c = 0.5 * static_cast<double>(rl.slice_count - 1);
    const double off_c = 0.5 * static_cast<double>(rl.offset_count - 1);
    const double zeta_max = zeta_c * rl.slice_step;
    const double off_max = off_c * rl.offset_step;
    const double dtau_max = options.tau_step > 0.0 ? options.tau_step : std::min(rl.slice_step, rl.offset_step);
    const double dphi = 2.0 * kPi / static_cast<double>(rl.alpha_count);

    std::vector<Vec3> betas(rl.alpha_count);
    for (std::size_t k = 0; k < rl.alpha_count; ++k) betas[k] = rl.beta(k);

    // Bilinear stencil in (zeta, r) for ray direction k at point y.
    auto stencil_add = [&](RayStencil& st, std::size_t k, const Vec3& y, double weight) {
        const double u = dot(y, rl.eta) / rl.slice_step + zeta_c;
        const double v = dot(y, betas[k]) / rl.offset_step + off_c;
        if (!(u >= 0.0 && u <= 2.0 * zeta_c && v >= 0.0 && v <= 2.0 * off_c)) return;
        auto l0 = static_cast<std::size_t>(u);
        auto m0 = static_cast<std::size_t>(v);
        if (l0 >= rl.slice_count - 1) l0 = rl.slice_count - 2;
        if (m0 >= rl.offset_count - 1) m0 = rl.offset_count - 2;
        const double tu = u - static_cast<double>(l0);
        const double tv = v - static_cast<double>(m0);
        const double cs[4] = {(1 - tu) * (1 - tv), (1 - tu) * tv, tu * (1 - tv), tu * tv};
        const std::size_t ix[4] = {rl.index(l0, k, m0), rl.index(l0, k, m0 + 1), rl.index(l0 + 1, k, m0),
                                   rl.index(l0 + 1, k, m0 + 1)};
        for (int q = 0; q < 4; ++q) {
            if (cs[q] == 0.0) continue;
            st.index[st.count] = ix[q];
            st.coeff[st.count] = weight * cs[q];
            ++st.count;
        }
    };

    parallel_for(
        directions.size(),
        [&](std::size_t j) {
            const Vec3& theta = directions.nodes[j];
            const Vec3 n = cross(rl.eta, theta);
            const double nn = norm(n);
            if (nn <= options.polar_cap_tol) {
                red.missing[j] = 1;
                return;
            }
            const Vec3 alpha{n[0] / nn, n[1] / nn, n[2] / nn};
            const Vec3 step_dir = cross(theta, alpha);
            const Vec3 beta = cross(rl.eta, alpha);

            // angular position of alpha between stored rays
            double phi = std::atan2(dot(alpha, basis.v), dot(alpha, basis.u));
            if (phi < 0.0) phi += 2.0 * kPi;
            double ua = phi / dphi;
            auto k0 = static_cast<std::size_t>(ua);
            double ta = ua - static_cast<double>(k0);
            if (ta < 1e-12) ta = 0.0;
            if (ta > 1.0 - 1e-12) {
                ta = 0.0;
                ++k0;
            }
            k0 %= rl.alpha_count;
            const std::size_t k1 = (k0 + 1) % rl.alpha_count;

            const double dz = dot(step_dir, rl.eta);
            const double dr = dot(step_dir, beta);
            std::vector<std::pair<std::size_t, double>> coeffs;
            for (std::size_t i = 0; i < layout.s_count; ++i) {
                const double s = red.sinogram.s(i);
                const Vec3 y0 = s * theta;
                const double z0 = dot(y0, rl.eta);
                const double r0 = dot(y0, beta);
                double lo = -std::numeric_limits<double>::infinity();
                double hi = std::numeric_limits<double>::infinity();
                auto clip = [&](double c0, double rate, double bound) {
                    if (std::abs(rate) < 1e-15) {
                        if (std::abs(c0) > bound) {
                            lo = 1.0;
                            hi = 0.0;
                        }
                        return;
                    }
                    double a = (-bound - c0) / rate, b = (bound - c0) / rate;
                    if (a > b) std::swap(a, b);
                    lo = std::max(lo, a);
                    hi = std::min(hi, b);
                };
                clip(z0, dz, zeta_max);
                clip(r0, dr, off_max);
                if (!(hi > lo)) continue;
                const double len = hi - lo;
                const auto nint = static_cast<std::size_t>(std::ceil(len / dtau_max - 1e-9));
                const double dtau = len / static_cast<double>(nint);

                TauStats& ts = red.tau[j * layout.s_count + i];
                Complex sum{};
                coeffs.clear();
                for (std::size_t q = 0; q <= nint; ++q) {
                    const double c = (q == 0 || q == nint) ? 0.5 * dtau : dtau;
                    const Vec3 y = y0 + (lo + static_cast<double>(q) * dtau) * step_dir;
                    RayStencil st;
                    stencil_add(st, k0, y, c * (1.0 - ta));
                    if (ta > 0.0) stencil_add(st, k1, y, c * ta);
                    for (int p = 0; p < st.count; ++p) {
                        sum += st.coeff[p] * rays.values[st.index[p]];
                        if (options.track_noise_weights) coeffs.emplace_back(st.index[p], st.coeff[p]);
                    }
                    ts.sum += c;
                    ts.sum_sq += c * c;
                }
                ts.count = nint + 1;
                red.sinogram.at(j, i) = sum;
                if (options.track_noise_weights) {
                    std::sort(coeffs.begin(), coeffs.end());
                    double eff = 0.0;
                    for (std::size_t p = 0; p < coeffs.size();) {
                        double acc = 0.0;
                        const std::size_t idx = coeffs[p].first;
                        for (; p < coeffs.size() && coeffs[p].first == idx; ++p) acc += coeffs[p].second;
                        eff += acc * acc;
                    }
                    ts.effective_sq = eff;
                }
            }
        },
        options.threads);

    std::vector<int> missing_list;
    for (std::size_t j = 0; j < red.missing.size(); ++j)
        if (red.missing[j]) missing_list.push_back(static_cast<int>(j));
    red.sinogram.meta["reduction"] = {{"eta", rl.eta},
                                      {"polar_cap_tol", options.polar_cap_tol},
                                      {"tau_step", dtau_max},
                                      {"missing_directions", missing_list}};
    return red;
}

}  // namespace wradon
