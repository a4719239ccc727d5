#pragma once

#include <cstddef>

#include "wradon/grids.hpp"

namespace wradon {

/// Settings shared by the 1D spectral operators in s.
///
/// The zero-padded length is the smallest odd 3-5-7-smooth integer >= pad_factor * s_count.
/// An odd length has no Nyquist bin, so odd multipliers such as i sign(tau) stay odd on
/// the discrete frequency lattice and commute with s -> -s exactly as in the continuum.
struct SpectralPlan {
    enum class Window { none, cosine_taper };

    std::size_t pad_factor = 4;
    Window window = Window::none;
    int n_dim = 2;

    void validate() const;
    std::size_t padded_length(std::size_t s_count) const;
};

/// Fourier convention: ghat(tau) = int exp(i tau s) g(s) ds. Under it d/ds acts as
/// multiplication by (-i tau) and the Hilbert transform as i sign(tau).
Complex derivative_multiplier(int order, double tau);
Complex hilbert_multiplier(double tau);
/// Even n: i sign(tau) (-i tau)^(n-1); odd n: (-i tau)^(n-1).
Complex chang_multiplier(int n, double tau);

/// d^m/ds^m along every direction.
Sinogram s_derivative(const Sinogram& g, int order, const SpectralPlan& plan = {});

/// (1/pi) p.v. int g(t) / (s - t) dt along every direction.
Sinogram hilbert(const Sinogram& g, const SpectralPlan& plan = {});

/// Single-pass filter of the inversion formulas: H d^(n-1) for even n, d^(n-1) for odd n.
/// Throws std::invalid_argument for n outside {2, 3}.
Sinogram chang_filter(const Sinogram& g, int n, const SpectralPlan& plan = {});

}  // namespace wradon
