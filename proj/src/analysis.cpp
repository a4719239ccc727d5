#include "wradon/analysis.hpp"

#include <algorithm>

#include "wradon/inversion.hpp"

namespace wradon {

// ---------------------------------------------------------------------------
// Fourier-dual identities

Complex sinogram_ft(const Sinogram& g, std::size_t direction, double tau)
{
    Complex sum{};
    for (std::size_t i = 0; i < g.s_count; ++i) sum += std::polar(1.0, tau * g.s(i)) * g.at(direction, i);
    return sum * (g.s_step / std::sqrt(2.0 * kPi));
}

nlohmann::json FourierSliceResult::to_json() const
{
    nlohmann::json ex = nlohmann::json::array();
    for (const auto& x : excluded) ex.push_back({{"direction", x.direction}, {"radius", x.radius}});
    return {{"residual", residual}, {"max_abs_rhs", max_abs_rhs}, {"used", used}, {"excluded", ex}};
}

FourierSliceResult fourier_slice_residual(const Sinogram& g, const GridSpec& grid, const std::vector<XiSample>& xi,
                                          DualIdentity identity, const SpectralPlan& plan)
{
    const int n = grid.dim;
    if (g.directions.ambient_dim() != n) throw std::invalid_argument("sinogram and grid dimensions differ");

    double bin = 1e300;
    for (int a = 0; a < n; ++a)
        bin = std::min(bin, 2.0 * kPi / (static_cast<double>(grid.shape[a]) * grid.spacing[a]));

    const Sinogram data = identity == DualIdentity::backprojection ? g : s_derivative(g, n - 1, plan);
    const ScalarField bp = backproject(data, grid);

    FourierSliceResult res;
    const double root2pi = std::sqrt(2.0 * kPi);
    // the plane integrals of exp(i xi x) contribute (2 pi)^(n-1) delta
    const double scale = std::pow(2.0 * kPi, n - 1);
    double max_diff = 0.0;
    for (const XiSample& x : xi) {
        if (x.radius < bin) {
            res.excluded.push_back(x);
            continue;
        }
        const Vec3& th = g.directions.nodes[x.direction];
        const Vec3 xv = x.radius * th;

        // n-D transform of the backprojection, separable over axes
        std::array<std::vector<Complex>, 3> ph;
        for (int a = 0; a < 3; ++a) {
            ph[a].assign(grid.shape[a], Complex{1.0, 0.0});
            if (a < n)
                for (std::size_t k = 0; k < grid.shape[a]; ++k)
                    ph[a][k] = std::polar(1.0, xv[a] * (grid.origin[a] + static_cast<double>(k) * grid.spacing[a]));
        }
        Complex lhs{};
        for (std::size_t i = 0; i < grid.shape[0]; ++i) {
            Complex row{};
            for (std::size_t j = 0; j < grid.shape[1]; ++j) {
                Complex col{};
                for (std::size_t k = 0; k < grid.shape[2]; ++k) col += ph[2][k] * bp.values[grid.index(i, j, k)];
                row += ph[1][j] * col;
            }
            lhs += ph[0][i] * row;
        }
        lhs *= grid.cell_volume();

        const Complex plus = sinogram_ft(g, x.direction, x.radius);
        const Complex minus = sinogram_ft(g, g.directions.antipode[x.direction], -x.radius);
        Complex rhs;
        if (identity == DualIdentity::backprojection) {
            rhs = scale * root2pi / std::pow(x.radius, n - 1) * (plus + minus);
        } else {
            const Complex mi_pow = n % 2 == 0 ? Complex{0.0, -1.0} : Complex{-1.0, 0.0};  // (-i)^(n-1), n in {2, 3}
            const double sign = (n - 1) % 2 == 0 ? 1.0 : -1.0;
            rhs = scale * mi_pow * root2pi * (plus + sign * minus);
        }
        res.lhs.push_back(lhs);
        res.rhs.push_back(rhs);
        res.max_abs_rhs = std::max(res.max_abs_rhs, std::abs(rhs));
        max_diff = std::max(max_diff, std::abs(lhs - rhs));
        ++res.used;
    }
    res.residual = res.max_abs_rhs > 0.0 ? max_diff / res.max_abs_rhs : max_diff;
    return res;
}

// ---------------------------------------------------------------------------
// Parity

nlohmann::json ParityReport::to_json() const
{
    return {{"n", n},
            {"g_max", g_max},
            {"data_scale", data_scale},
            {"parity_error", parity_error},
            {"fourier_parity_error", fourier_parity_error},
            {"ghat_max", ghat_max},
            {"combination_max", combination_max},
            {"vanishing_consistent", vanishing_consistent}};
}

ParityReport lemma1_parity_check(const Weight& w, const ScalarField& f, int n, const SphereGrid& sphere,
                                 const SinogramLayout& layout, const SpectralPlan& plan,
                                 const ProjectorSettings& settings, double tol)
{
    if (f.dim() != n || sphere.ambient_dim() != n) throw std::invalid_argument("dimension mismatch in parity check");
    const Weight ws = symmetrize(w);
    const Weight w0 = Weight::from_field(w0_field(w, f.grid, sphere), w.bound());
    const Sinogram rs = radon_w(f, ws, sphere, layout, settings);
    const Sinogram r0 = radon_w(f, w0, sphere, layout, settings);

    Sinogram diff = rs;
    for (std::size_t i = 0; i < diff.values.size(); ++i) diff.values[i] = rs.values[i] - r0.values[i];
    const bool even = n % 2 == 0;
    const Sinogram g = even ? hilbert(diff, plan) : diff;
    const double sign = even ? -1.0 : 1.0;

    ParityReport rep;
    rep.n = n;
    for (const Complex& v : r0.values) rep.data_scale = std::max(rep.data_scale, std::abs(v));
    const std::size_t ns = g.s_count;
    for (std::size_t j = 0; j < sphere.size(); ++j) {
        const std::size_t ja = sphere.antipode[j];
        for (std::size_t i = 0; i < ns; ++i) {
            rep.g_max = std::max(rep.g_max, std::abs(g.at(j, i)));
            rep.parity_error = std::max(rep.parity_error, std::abs(g.at(j, i) - sign * g.at(ja, ns - 1 - i)));
        }
    }

    // lattice frequencies tau_k = 2 pi k / (N ds), symmetric about 0
    const auto kmax = static_cast<long>((ns - 1) / 2);
    const double dtau = 2.0 * kPi / (static_cast<double>(ns) * g.s_step);
    for (std::size_t j = 0; j < sphere.size(); ++j) {
        const std::size_t ja = sphere.antipode[j];
        for (long k = -kmax; k <= kmax; ++k) {
            const double tau = static_cast<double>(k) * dtau;
            const Complex a = sinogram_ft(g, j, tau);
            const Complex b = sinogram_ft(g, ja, -tau);
            rep.ghat_max = std::max(rep.ghat_max, std::abs(a));
            rep.fourier_parity_error = std::max(rep.fourier_parity_error, std::abs(a - sign * b));
            // the backprojection identities only see this combination
            rep.combination_max = std::max(rep.combination_max, std::abs(a + sign * b));
        }
    }
    const double scale = std::max(rep.data_scale, 1e-300);
    const bool comb_zero = rep.combination_max <= tol * scale;
    const bool g_zero = rep.g_max <= tol * scale;
    rep.vanishing_consistent = comb_zero == g_zero;
    return rep;
}

// ---------------------------------------------------------------------------
// Bump discrimination

namespace {

std::vector<Vec3> ball_samples(int dim, const Vec3& y, double radius)
{
    std::vector<Vec3> pts{y};
    constexpr int shells = 8;
    for (int q = 1; q <= shells; ++q) {
        const double r = radius * q / shells;
        if (dim == 2) {
            constexpr int m = 32;
            for (int k = 0; k < m; ++k) {
                const double phi = 2.0 * kPi * k / m;
                pts.push_back(y + Vec3{r * std::cos(phi), r * std::sin(phi), 0.0});
            }
        } else {
            constexpr int m = 64;  // Fibonacci sphere
            const double golden = kPi * (3.0 - std::sqrt(5.0));
            for (int k = 0; k < m; ++k) {
                const double zc = 1.0 - 2.0 * (k + 0.5) / m;
                const double rc = std::sqrt(1.0 - zc * zc);
                pts.push_back(y + r * Vec3{rc * std::cos(golden * k), rc * std::sin(golden * k), zc});
            }
        }
    }
    return pts;
}

constexpr double kProbeMargin = 1.1;

}  // namespace

double continuity_gap(const Weight& w, int dim, const BumpProbe& probe, double radius, const SphereGrid& sphere)
{
    double gap = 0.0;
    for (const Vec3& p : ball_samples(dim, probe.y, radius)) {
        const Complex ws = 0.5 * (w(p, probe.theta) + w(p, -probe.theta));
        gap = std::max(gap, std::abs(ws - eval_w0(w, p, sphere) - probe.z));
    }
    return gap;
}

std::optional<BumpProbe> make_bump_probe(const Weight& w, int dim, const Vec3& y, const Vec3& theta,
                                         const SphereGrid& sphere, double epsilon_fraction, double delta_max)
{
    if (!(epsilon_fraction > 0.0 && epsilon_fraction < 1.0))
        throw std::invalid_argument("epsilon fraction must lie in (0, 1)");
    BumpProbe p;
    p.y = y;
    p.theta = theta;
    p.z = 0.5 * (w(y, theta) + w(y, -theta)) - eval_w0(w, y, sphere);
    if (std::abs(p.z) <= 1e-12) return std::nullopt;
    p.epsilon = epsilon_fraction * std::abs(p.z);

    auto ok = [&](double delta) { return continuity_gap(w, dim, p, kProbeMargin * delta, sphere) < p.epsilon; };
    if (ok(delta_max)) {
        p.delta = delta_max;
        return p;
    }
    double lo = 0.0, hi = delta_max;
    for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    if (lo <= 0.0) return std::nullopt;
    p.delta = lo;
    return p;
}

nlohmann::json BumpReport::to_json() const
{
    return {{"y", probe.y},
            {"theta", probe.theta},
            {"delta", probe.delta},
            {"z", {probe.z.real(), probe.z.imag()}},
            {"abs_z", std::abs(probe.z)},
            {"epsilon", probe.epsilon},
            {"difference", difference},
            {"plane_mass", plane_mass},
            {"lower_bound", lower_bound},
            {"quadrature_tol", quadrature_tol},
            {"certified", certified}};
}

BumpReport bump_discrimination(const Weight& w, int dim, const BumpProbe& probe, const SphereGrid& sphere,
                               const BumpSettings& settings)
{
    if (!(probe.epsilon > 0.0 && probe.epsilon < std::abs(probe.z)))
        throw std::invalid_argument("bump probe needs 0 < epsilon < |z|");
    if (!(probe.delta > 0.0)) throw std::invalid_argument("bump probe needs delta > 0");

    const double h = probe.delta / static_cast<double>(settings.cells_per_delta);
    const auto cells = static_cast<std::size_t>(2 * settings.cells_per_delta + 5);
    GridSpec grid;
    grid.dim = dim;
    grid.shape = {cells, cells, dim == 3 ? cells : 1};
    grid.spacing = {h, h, dim == 3 ? h : 1.0};
    for (int a = 0; a < dim; ++a) grid.origin[a] = probe.y[a] - 0.5 * static_cast<double>(cells - 1) * h;
    BallPhantom bump;
    bump.center = probe.y;
    bump.radius = 0.75 * probe.delta;
    bump.edge = 0.5 * probe.delta;
    const ScalarField f = make_phantom(grid, bump);

    const double s = dot(probe.y, probe.theta);
    const ProjectorSettings ps{0.5 * h, 1};
    const Complex rs = radon_sample(f, symmetrize(w), s, probe.theta, ps);
    const Complex r0 = radon_sample(f, w0_weight(w, sphere), s, probe.theta, ps);
    const Complex mass = radon_sample(f, Weight::constant(1.0), s, probe.theta, ps);

    BumpReport rep;
    rep.probe = probe;
    rep.difference = std::abs(rs - r0);
    rep.plane_mass = mass.real();
    rep.lower_bound = (std::abs(probe.z) - probe.epsilon) * rep.plane_mass;
    rep.quadrature_tol = 1e-12 * rep.plane_mass;
    rep.certified = rep.difference > 0.0 && rep.difference >= rep.lower_bound - rep.quadrature_tol;
    return rep;
}

// ---------------------------------------------------------------------------
// Noise

nlohmann::json NoiseReport::to_json() const
{
    return {{"ray_variance", ray_variance},
            {"reduced_variance", reduced_variance},
            {"measured_ratio", measured_ratio},
            {"closed_form_ratio", closed_form_ratio},
            {"effective_ratio", effective_ratio},
            {"mean_tau_count", mean_tau_count},
            {"samples", samples},
            {"trials", trials}};
}

NoiseAccumulator::NoiseAccumulator(const RayData& clean, const Reduction& reduced_clean,
                                   std::vector<std::size_t> directions)
    : clean_(clean), reduced_clean_(reduced_clean)
{
    const Sinogram& sg = reduced_clean.sinogram;
    if (directions.empty())
        for (std::size_t j = 0; j < sg.directions.size(); ++j) directions.push_back(j);
    for (std::size_t j : directions) {
        if (j >= sg.directions.size()) throw std::invalid_argument("direction index out of range");
        if (reduced_clean.missing[j]) continue;
        for (std::size_t i = 0; i < sg.s_count; ++i) {
            const std::size_t flat = j * sg.s_count + i;
            if (reduced_clean.tau[flat].count > 0) samples_.push_back(flat);
        }
    }
    sum_.assign(samples_.size(), 0.0);
    sum_sq_.assign(samples_.size(), 0.0);
}

void NoiseAccumulator::add(const RayData& noisy, const Reduction& reduced_noisy)
{
    if (!(noisy.layout == clean_.layout) || noisy.values.size() != clean_.values.size())
        throw std::invalid_argument("noisy ray layout does not match the clean data");
    if (!reduced_noisy.sinogram.same_layout(reduced_clean_.sinogram))
        throw std::invalid_argument("noisy reduction layout does not match the clean reduction");
    for (std::size_t r = 0; r < noisy.values.size(); ++r) {
        const double d = (noisy.values[r] - clean_.values[r]).real();
        ray_sum_ += d;
        ray_sum_sq_ += d * d;
    }
    ray_count_ += noisy.values.size();
    for (std::size_t q = 0; q < samples_.size(); ++q) {
        const std::size_t flat = samples_[q];
        const double d = (reduced_noisy.sinogram.values[flat] - reduced_clean_.sinogram.values[flat]).real();
        sum_[q] += d;
        sum_sq_[q] += d * d;
    }
    ++trials_;
}

NoiseReport NoiseAccumulator::report() const
{
    NoiseReport rep;
    rep.trials = trials_;
    rep.samples = samples_.size();
    if (ray_count_ > 1) {
        const double mean = ray_sum_ / static_cast<double>(ray_count_);
        rep.ray_variance = (ray_sum_sq_ - ray_sum_ * mean) / static_cast<double>(ray_count_ - 1);
    }
    double red = 0.0, closed = 0.0, eff = 0.0, taus = 0.0;
    for (std::size_t q = 0; q < samples_.size(); ++q) {
        const TauStats& ts = reduced_clean_.tau[samples_[q]];
        const double norm2 = ts.sum * ts.sum;
        double var = 0.0;
        if (trials_ > 1) {
            const double mean = sum_[q] / static_cast<double>(trials_);
            var = (sum_sq_[q] - sum_[q] * mean) / static_cast<double>(trials_ - 1);
        } else if (trials_ == 1) {
            var = sum_sq_[q];  // zero-mean noise, single draw
        }
        red += var / norm2;
        closed += ts.sum_sq / norm2;
        eff += ts.effective_sq / norm2;
        taus += static_cast<double>(ts.count);
    }
    if (!samples_.empty()) {
        const auto m = static_cast<double>(samples_.size());
        rep.reduced_variance = red / m;
        rep.closed_form_ratio = closed / m;
        rep.effective_ratio = eff / m;
        rep.mean_tau_count = taus / m;
    }
    rep.measured_ratio = rep.ray_variance > 0.0 ? rep.reduced_variance / rep.ray_variance : 0.0;
    return rep;
}

NoiseReport noise_reduction_report(const RayData& clean, const RayData& noisy, const Reduction& reduced_clean,
                                   const Reduction& reduced_noisy, std::vector<std::size_t> directions)
{
    NoiseAccumulator acc(clean, reduced_clean, std::move(directions));
    acc.add(noisy, reduced_noisy);
    return acc.report();
}

std::uint64_t trial_seed(std::uint64_t root, std::uint64_t k)
{
    std::uint64_t z = root + (k + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

NoiseReport run_noise_experiment(const RayData& clean, const SphereGrid& directions, const SinogramLayout& layout,
                                 double sigma, std::size_t trials, std::uint64_t root_seed,
                                 std::vector<std::size_t> measured_directions, const ReductionOptions& options)
{
    ReductionOptions opts = options;
    opts.track_noise_weights = true;
    const Reduction clean_red = reduce_rays_to_planes(clean, directions, layout, opts);
    opts.track_noise_weights = false;
    NoiseAccumulator acc(clean, clean_red, std::move(measured_directions));
    for (std::size_t t = 0; t < trials; ++t) {
        const RayData noisy = add_noise(clean, sigma, trial_seed(root_seed, t));
        acc.add(noisy, reduce_rays_to_planes(noisy, directions, layout, opts));
    }
    return acc.report();
}

}  // namespace wradon
