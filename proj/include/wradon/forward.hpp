#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wradon/grids.hpp"
#include "wradon/weights.hpp"

namespace wradon {

struct ProjectorSettings {
    double step = 0.0;     // quadrature step; <= 0 means half the smallest grid spacing
    unsigned threads = 0;  // 0 = default_threads()
};

/// Weighted Radon transform over lines (2D) or planes (3D) x . theta = s.
///
/// Quadrature nodes sit on the integer lattice t = k * step inside the plane,
/// so the rule does not depend on the support of f and the map is exactly
/// linear. Throws DataError when the offsets do not cover the support.
Sinogram radon_w(const ScalarField& f, const Weight& w, const SphereGrid& directions, const SinogramLayout& layout,
                 const ProjectorSettings& settings = {});

/// One sample R_W f(s, theta) with the same quadrature as radon_w.
Complex radon_sample(const ScalarField& f, const Weight& w, double s, const Vec3& theta,
                     const ProjectorSettings& settings = {});

/// Rays parallel to the plane {x . eta = 0}.
///
/// Slices sit at offsets zeta_l along eta; within each slice the ray
/// directions alpha_k follow a closed circle grid in the plane and base points
/// are zeta_l eta + r_m (eta x alpha_k), so base . alpha = 0.
struct RayLayout {
    Vec3 eta{0.0, 0.0, 1.0};
    std::size_t slice_count = 0;
    double slice_step = 0.0;
    std::size_t alpha_count = 0;
    std::size_t offset_count = 0;
    double offset_step = 0.0;

    void validate() const;
    std::size_t size() const { return slice_count * alpha_count * offset_count; }
    double zeta(std::size_t l) const { return (static_cast<double>(l) - 0.5 * static_cast<double>(slice_count - 1)) * slice_step; }
    double offset(std::size_t m) const { return (static_cast<double>(m) - 0.5 * static_cast<double>(offset_count - 1)) * offset_step; }
    Vec3 alpha(std::size_t k) const;
    Vec3 beta(std::size_t k) const;  // eta x alpha_k
    Vec3 base(std::size_t l, std::size_t k, std::size_t m) const;
    std::size_t index(std::size_t l, std::size_t k, std::size_t m) const { return (l * alpha_count + k) * offset_count + m; }
    bool operator==(const RayLayout&) const = default;
};

struct RayData {
    RayLayout layout;
    std::vector<Complex> values;  // [slice][alpha][offset]
    double noise_sigma = 0.0;
    std::uint64_t noise_seed = 0;
    bool noisy = false;
};

/// P_w f(x, alpha) = int w(x + alpha t, alpha) f(x + alpha t) dt for every ray of the layout.
RayData ray_transform(const ScalarField& f, const Weight& w, const RayLayout& layout,
                      const ProjectorSettings& settings = {});

/// Adds i.i.d. N(0, sigma^2) to the real part of every ray value, deterministic in seed.
RayData add_noise(const RayData& rays, double sigma, std::uint64_t seed);

inline constexpr double kDefaultPolarCapTol = 0.05;

struct ReductionOptions {
    double polar_cap_tol = kDefaultPolarCapTol;
    double tau_step = 0.0;  // <= 0: min(slice_step, offset_step)
    bool track_noise_weights = false;
    unsigned threads = 0;
};

/// Per-sample quadrature bookkeeping of the tau integral.
struct TauStats {
    std::size_t count = 0;   // N_tau
    double sum = 0.0;        // sum c_i
    double sum_sq = 0.0;     // sum c_i^2
    double effective_sq = 0.0;  // sum over stored rays of (total linear coefficient)^2
};

struct Reduction {
    Sinogram sinogram;
    std::vector<std::uint8_t> missing;  // per direction: inside the excluded polar cap
    std::vector<TauStats> tau;          // [direction][s]
    std::optional<Weight> induced_weight;
};

/// alpha(eta, theta) = (eta x theta) / |eta x theta|.
Vec3 reduction_alpha(const Vec3& eta, const Vec3& theta);

/// W(x, theta) = w(x, alpha(eta, theta)). At the poles (eta x theta = 0) alpha falls back to the
/// first basis vector of the plane.
Weight induced_plane_weight(const Weight& ray_weight, const Vec3& eta);

/// R_W f(s, theta) = int P_w f(s theta + tau (theta x alpha), alpha) d tau, interpolating
/// bilinearly in (zeta, r) and linearly in the angle of alpha between stored rays. The tau
/// range is truncated to the slab of stored rays. Directions with |eta x theta| <= polar_cap_tol
/// are flagged missing and left at 0.
Reduction reduce_rays_to_planes(const RayData& rays, const SphereGrid& directions, const SinogramLayout& layout,
                                const ReductionOptions& options = {}, const Weight* ray_weight = nullptr);

}  // namespace wradon
