#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "wradon/filters.hpp"
#include "wradon/forward.hpp"
#include "wradon/weights.hpp"

namespace wradon {

// ---------------------------------------------------------------------------
// Fourier-dual identities of the backprojection

enum class DualIdentity {
    backprojection,             // FT of int g(x.theta, theta) d theta
    derivative_backprojection,  // FT of int g^(n-1)(x.theta, theta) d theta
};

/// Frequency xi = radius * theta_direction; -xi/|xi| is the antipodal node.
struct XiSample {
    std::size_t direction = 0;
    double radius = 0.0;
};

struct FourierSliceResult {
    double residual = 0.0;  // max |lhs - rhs| / max |rhs| over used samples
    double max_abs_rhs = 0.0;
    std::size_t used = 0;
    std::vector<XiSample> excluded;  // |xi| below one frequency bin of the grid
    std::vector<Complex> lhs;
    std::vector<Complex> rhs;

    nlohmann::json to_json() const;
};

/// Compares the n-D Fourier transform of a backprojection on `grid` (direct sum over the
/// grid) with the right-hand side built from 1D transforms
/// ghat(tau, theta) = (2 pi)^(-1/2) int exp(i tau s) g(s, theta) ds, evaluated by direct
/// sums over the s samples, with c = (2 pi)^(n-1) sqrt(2 pi):
///   backprojection:            c |xi|^(1-n) (ghat(|xi|, th) + ghat(-|xi|, -th))
///   derivative_backprojection: c (-i)^(n-1) (ghat(|xi|, th) + (-1)^(n-1) ghat(-|xi|, -th))
/// For the derivative form the backprojected data are s_derivative(g, n-1, plan).
FourierSliceResult fourier_slice_residual(const Sinogram& g, const GridSpec& grid, const std::vector<XiSample>& xi,
                                          DualIdentity identity, const SpectralPlan& plan = {});

/// ghat(tau, theta_j) by direct quadrature over the s samples.
Complex sinogram_ft(const Sinogram& g, std::size_t direction, double tau);

// ---------------------------------------------------------------------------
// Parity arguments behind the reconstruction identity

struct ParityReport {
    int n = 0;
    double g_max = 0.0;        // max |g| with g = R_{W_s} f - R_{w0} f (odd n) or its Hilbert transform (even n)
    double data_scale = 0.0;   // max |R_{w0} f|
    double parity_error = 0.0;  // max |g(s, th) - sign g(-s, -th)|, sign = +1 odd n, -1 even n
    double fourier_parity_error = 0.0;  // same on ghat at lattice frequencies
    double ghat_max = 0.0;
    double combination_max = 0.0;  // max |ghat(t, th) + sign ghat(-t, -th)|
    bool vanishing_consistent = false;  // combination == 0 <=> g == 0 at tolerance

    nlohmann::json to_json() const;
};

ParityReport lemma1_parity_check(const Weight& w, const ScalarField& f, int n, const SphereGrid& sphere,
                                 const SinogramLayout& layout, const SpectralPlan& plan = {},
                                 const ProjectorSettings& settings = {}, double tol = 1e-10);

// ---------------------------------------------------------------------------
// Bump discrimination

struct BumpProbe {
    Vec3 y{0.0, 0.0, 0.0};
    Vec3 theta{1.0, 0.0, 0.0};
    double delta = 0.0;
    Complex z{};
    double epsilon = 0.0;
};

/// z = W_s(y, theta) - w0(y), epsilon = epsilon_fraction |z|, delta the largest radius
/// (bisection, capped at delta_max) for which |W_s(y', theta) - w0(y') - z| < epsilon at every
/// sampled y' with |y' - y| <= 1.1 delta. Empty when |z| <= 1e-12 (no violation exists).
std::optional<BumpProbe> make_bump_probe(const Weight& w, int dim, const Vec3& y, const Vec3& theta,
                                         const SphereGrid& sphere, double epsilon_fraction = 0.25,
                                         double delta_max = 0.5);

/// Max of |W_s(y', theta) - w0(y') - z| over the sampled ball of radius `radius` about y.
double continuity_gap(const Weight& w, int dim, const BumpProbe& probe, double radius, const SphereGrid& sphere);

struct BumpReport {
    BumpProbe probe;
    double difference = 0.0;  // |R_{W_s} f - R_{w0} f|(y.theta, theta)
    double plane_mass = 0.0;  // int_{x.theta = y.theta} f
    double lower_bound = 0.0;  // (|z| - epsilon) * plane_mass
    double quadrature_tol = 0.0;
    bool certified = false;

    nlohmann::json to_json() const;
};

struct BumpSettings {
    std::size_t cells_per_delta = 20;
};

/// Projects the plateau bump (1 on B_{delta/2}(y), 0 outside B_delta(y)) with W_s and w0 at
/// (y.theta, theta). Throws std::invalid_argument if the probe violates 0 < epsilon < |z|.
BumpReport bump_discrimination(const Weight& w, int dim, const BumpProbe& probe, const SphereGrid& sphere,
                               const BumpSettings& settings = {});

// ---------------------------------------------------------------------------
// Noise reduction of the ray-to-plane averaging

struct NoiseReport {
    double ray_variance = 0.0;           // per-ray noise variance
    double reduced_variance = 0.0;       // mean over samples of Var(reduced) / (sum c)^2
    double measured_ratio = 0.0;         // reduced_variance / ray_variance
    double closed_form_ratio = 0.0;      // mean of sum c^2 / (sum c)^2
    double effective_ratio = 0.0;        // mean of sum a^2 / (sum c)^2 with interpolation weights
    double mean_tau_count = 0.0;
    std::size_t samples = 0;
    std::size_t trials = 0;

    nlohmann::json to_json() const;
};

/// Accumulates noisy trials against one clean reduction over selected (direction, s) samples.
class NoiseAccumulator {
public:
    /// Empty `directions` selects every non-missing direction.
    NoiseAccumulator(const RayData& clean, const Reduction& reduced_clean, std::vector<std::size_t> directions = {});

    void add(const RayData& noisy, const Reduction& reduced_noisy);
    NoiseReport report() const;

private:
    const RayData& clean_;
    const Reduction& reduced_clean_;
    std::vector<std::size_t> samples_;  // flat [direction][s] indices
    std::vector<double> sum_, sum_sq_;
    double ray_sum_ = 0.0, ray_sum_sq_ = 0.0;
    std::size_t ray_count_ = 0;
    std::size_t trials_ = 0;
};

/// Single-trial report; throws std::invalid_argument on mismatched layouts.
NoiseReport noise_reduction_report(const RayData& clean, const RayData& noisy, const Reduction& reduced_clean,
                                   const Reduction& reduced_noisy, std::vector<std::size_t> directions = {});

/// Monte-Carlo over `trials` noise draws with per-trial seeds derived from root_seed.
NoiseReport run_noise_experiment(const RayData& clean, const SphereGrid& directions, const SinogramLayout& layout,
                                 double sigma, std::size_t trials, std::uint64_t root_seed,
                                 std::vector<std::size_t> measured_directions = {}, const ReductionOptions& options = {});

/// Seed of trial `k` (splitmix64 of root + k).
std::uint64_t trial_seed(std::uint64_t root, std::uint64_t k);

}  // namespace wradon
