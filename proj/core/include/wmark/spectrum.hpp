#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace wmark {

/// DFT coefficients of one whole clip.
///
/// Bin convention: coeffs[k] holds frequency k*fs/n for k <= n/2 and
/// (k-n)*fs/n above. The forward transform is the plain unnormalized sum
/// X[k] = sum_n x[n] exp(-2*pi*i*k*n/n); the inverse applies the 1/n factor.
struct Spectrum {
    std::vector<std::complex<double>> coeffs;
    int sample_rate = 0;

    std::size_t size() const noexcept { return coeffs.size(); }
    double bin_frequency(std::size_t k) const;  // signed Hz
};

/// Forward DFT of a real signal. Any length >= 1 is transformed directly
/// (power-of-two lengths via radix-2, everything else via Bluestein);
/// no zero padding is applied.
Spectrum forward_dft(std::span<const double> x, int sample_rate);

/// Forward DFT of a complex signal.
Spectrum forward_dft(std::span<const std::complex<double>> x, int sample_rate);

/// Inverse DFT, 1/n normalized. inverse_dft(forward_dft(x)) == x within
/// round-off.
std::vector<std::complex<double>> inverse_dft(const Spectrum& s);

/// Elementwise real projection.
std::vector<double> real_part(std::span<const std::complex<double>> x);

}  // namespace wmark
