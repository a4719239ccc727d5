#include "wradon/filters.hpp"

#include <fftw3.h>

#include <algorithm>
#include <memory>
#include <mutex>

namespace wradon {

namespace {

std::mutex g_fftw_planner;

bool is_odd_smooth(std::size_t n)
{
    if (n % 2 == 0) return false;
    for (std::size_t p : {3, 5, 7})
        while (n % p == 0) n /= p;
    return n == 1;
}

struct FftwFree {
    void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex, FftwFree>;

FftwBuffer make_buffer(std::size_t n)
{
    return FftwBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

class PlanPair {
public:
    explicit PlanPair(std::size_t n) : n_(n)
    {
        FftwBuffer tmp = make_buffer(n);
        std::lock_guard<std::mutex> lock(g_fftw_planner);
        const int len = static_cast<int>(n);
        // FFTW_BACKWARD carries exp(+i ...), matching ghat(tau) = int exp(i tau s) g ds.
        to_freq_ = fftw_plan_dft_1d(len, tmp.get(), tmp.get(), FFTW_BACKWARD, FFTW_ESTIMATE);
        to_space_ = fftw_plan_dft_1d(len, tmp.get(), tmp.get(), FFTW_FORWARD, FFTW_ESTIMATE);
    }
    ~PlanPair()
    {
        std::lock_guard<std::mutex> lock(g_fftw_planner);
        fftw_destroy_plan(to_freq_);
        fftw_destroy_plan(to_space_);
    }
    PlanPair(const PlanPair&) = delete;
    PlanPair& operator=(const PlanPair&) = delete;

    void forward(fftw_complex* buf) const { fftw_execute_dft(to_freq_, buf, buf); }
    void inverse(fftw_complex* buf) const { fftw_execute_dft(to_space_, buf, buf); }
    std::size_t size() const { return n_; }

private:
    std::size_t n_;
    fftw_plan to_freq_;
    fftw_plan to_space_;
};

double taper(double frac)
{
    if (frac <= 0.9) return 1.0;
    if (frac >= 1.0) return 0.0;
    return 0.5 * (1.0 + std::cos(kPi * (frac - 0.9) / 0.1));
}

template <typename Multiplier>
Sinogram apply_multiplier(const Sinogram& g, const SpectralPlan& plan, Multiplier&& mult, const char* op)
{
    plan.validate();
    const std::size_t n = g.s_count;
    const std::size_t len = plan.padded_length(n);
    const PlanPair fft(len);

    const auto half = static_cast<long>(len / 2);
    const double dtau = 2.0 * kPi / (static_cast<double>(len) * g.s_step);
    const double tau_max = static_cast<double>(half) * dtau;
    std::vector<Complex> m(len);
    for (std::size_t k = 0; k < len; ++k) {
        const long ks = static_cast<long>(k) <= half ? static_cast<long>(k) : static_cast<long>(k) - static_cast<long>(len);
        const double tau = static_cast<double>(ks) * dtau;
        m[k] = mult(tau);
        if (plan.window == SpectralPlan::Window::cosine_taper) m[k] *= taper(std::abs(tau) / tau_max);
        m[k] /= static_cast<double>(len);
    }

    Sinogram out = g;
    std::vector<std::uint8_t> undecayed(g.directions.size(), 0);
    parallel_for(g.directions.size(), [&](std::size_t j) {
        FftwBuffer buf = make_buffer(len);
        auto* c = reinterpret_cast<Complex*>(buf.get());
        const Complex* row = g.values.data() + j * n;
        std::copy(row, row + n, c);
        std::fill(c + n, c + len, Complex{});

        double peak = 0.0;
        for (std::size_t i = 0; i < n; ++i) peak = std::max(peak, std::abs(row[i]));
        if (peak > 0.0 && std::max(std::abs(row[0]), std::abs(row[n - 1])) > 1e-6 * peak) undecayed[j] = 1;

        fft.forward(buf.get());
        for (std::size_t k = 0; k < len; ++k) c[k] *= m[k];
        fft.inverse(buf.get());
        std::copy(c, c + n, out.values.data() + j * n);
    });

    nlohmann::json entry{{"op", op},
                         {"pad_factor", plan.pad_factor},
                         {"padded_length", len},
                         {"window", plan.window == SpectralPlan::Window::none ? "none" : "cosine_taper"}};
    const auto bad = std::count(undecayed.begin(), undecayed.end(), std::uint8_t{1});
    if (bad > 0) {
        const std::string w = std::string(op) + ": data not decayed at the s-boundary in " + std::to_string(bad) +
                              " direction(s)";
        out.meta["warnings"].push_back(w);
    }
    out.meta["filters"].push_back(entry);
    return out;
}

}  // namespace

void SpectralPlan::validate() const
{
    if (pad_factor < 2) throw std::invalid_argument("pad_factor must be >= 2");
}

std::size_t SpectralPlan::padded_length(std::size_t s_count) const
{
    std::size_t n = std::max<std::size_t>(pad_factor * s_count, 3);
    while (!is_odd_smooth(n)) ++n;
    return n;
}

Complex derivative_multiplier(int order, double tau)
{
    Complex m{1.0, 0.0};
    for (int k = 0; k < order; ++k) m *= Complex{0.0, -tau};
    return m;
}

Complex hilbert_multiplier(double tau)
{
    if (tau > 0.0) return {0.0, 1.0};
    if (tau < 0.0) return {0.0, -1.0};
    return {};
}

Complex chang_multiplier(int n, double tau)
{
    if (n < 2) throw std::invalid_argument("chang filter needs n >= 2");
    if (n % 2 == 0) return hilbert_multiplier(tau) * derivative_multiplier(n - 1, tau);
    return derivative_multiplier(n - 1, tau);
}

Sinogram s_derivative(const Sinogram& g, int order, const SpectralPlan& plan)
{
    if (order < 0) throw std::invalid_argument("derivative order must be >= 0");
    return apply_multiplier(g, plan, [order](double tau) { return derivative_multiplier(order, tau); }, "derivative");
}

Sinogram hilbert(const Sinogram& g, const SpectralPlan& plan)
{
    return apply_multiplier(g, plan, [](double tau) { return hilbert_multiplier(tau); }, "hilbert");
}

Sinogram chang_filter(const Sinogram& g, int n, const SpectralPlan& plan)
{
    if (n != 2 && n != 3) throw std::invalid_argument("chang filter supports n = 2 or 3");
    if (n % 2 == 0) {
        return apply_multiplier(g, plan, [n](double tau) { return hilbert_multiplier(tau) * derivative_multiplier(n - 1, tau); },
                                "chang_even");
    }
    // odd n: pure derivative, no Hilbert factor
    return apply_multiplier(g, plan, [n](double tau) { return derivative_multiplier(n - 1, tau); }, "chang_odd");
}

}  // namespace wradon
