#include "wmark/spectrum.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

#include "wmark/errors.hpp"

namespace wmark {

namespace {

using cd = std::complex<double>;

// In-place iterative radix-2 Cooley-Tukey; size must be a power of two.
// Twiddles come from one table filled with direct sin/cos calls, which
// keeps the phase error at a few ulps even for 2^20 points.
void fft_pow2(std::vector<cd>& a, bool invert) {
    const std::size_t n = a.size();
    if (n < 2) return;

    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }

    std::vector<cd> twiddle(n / 2);
    const double sign = invert ? 1.0 : -1.0;
    for (std::size_t j = 0; j < n / 2; ++j) {
        const double ang =
            sign * 2.0 * std::numbers::pi * static_cast<double>(j) / static_cast<double>(n);
        twiddle[j] = cd(std::cos(ang), std::sin(ang));
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t stride = n / len;
        const std::size_t half = len / 2;
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t j = 0; j < half; ++j) {
                const cd w = twiddle[j * stride];
                const cd u = a[i + j];
                const cd v = a[i + j + half] * w;
                a[i + j] = u + v;
                a[i + j + half] = u - v;
            }
        }
    }
}

// Bluestein chirp-z transform: expresses a DFT of arbitrary length as a
// power-of-two circular convolution. Chirp exponents are reduced mod 2n
// in integer arithmetic so the sin/cos arguments stay small.
void fft_bluestein(std::vector<cd>& a, bool invert) {
    const std::size_t n = a.size();
    const double sign = invert ? 1.0 : -1.0;

    std::vector<cd> chirp(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t sq =
            (static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(i)) %
            (2 * static_cast<std::uint64_t>(n));
        const double ang =
            sign * std::numbers::pi * static_cast<double>(sq) / static_cast<double>(n);
        chirp[i] = cd(std::cos(ang), std::sin(ang));
    }

    const std::size_t m = std::bit_ceil(2 * n - 1);
    std::vector<cd> fa(m), fb(m);
    for (std::size_t i = 0; i < n; ++i) fa[i] = a[i] * chirp[i];
    fb[0] = std::conj(chirp[0]);
    for (std::size_t i = 1; i < n; ++i) fb[i] = fb[m - i] = std::conj(chirp[i]);

    fft_pow2(fa, false);
    fft_pow2(fb, false);
    for (std::size_t i = 0; i < m; ++i) fa[i] *= fb[i];
    fft_pow2(fa, true);

    const double inv_m = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < n; ++i) a[i] = fa[i] * inv_m * chirp[i];
}

// Unnormalized transform, either direction.
void fft_any(std::vector<cd>& a, bool invert) {
    if (a.empty()) throw Error(ErrorKind::Usage, "dft: empty input");
    if (std::has_single_bit(a.size())) {
        fft_pow2(a, invert);
    } else {
        fft_bluestein(a, invert);
    }
}

void require_finite(std::span<const cd> x) {
    for (const cd& v : x) {
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw Error(ErrorKind::Usage, "dft: non-finite input sample");
    }
}

}  // namespace

double Spectrum::bin_frequency(std::size_t k) const {
    const auto n = static_cast<double>(coeffs.size());
    const auto fs = static_cast<double>(sample_rate);
    const auto kd = static_cast<double>(k);
    return (kd <= n / 2.0) ? kd * fs / n : (kd - n) * fs / n;
}

Spectrum forward_dft(std::span<const double> x, int sample_rate) {
    if (x.empty()) throw Error(ErrorKind::Usage, "dft: empty input");
    std::vector<cd> a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i]))
            throw Error(ErrorKind::Usage, "dft: non-finite input sample");
        a[i] = cd(x[i], 0.0);
    }
    fft_any(a, false);
    return Spectrum{std::move(a), sample_rate};
}

Spectrum forward_dft(std::span<const std::complex<double>> x, int sample_rate) {
    if (x.empty()) throw Error(ErrorKind::Usage, "dft: empty input");
    require_finite(x);
    std::vector<cd> a(x.begin(), x.end());
    fft_any(a, false);
    return Spectrum{std::move(a), sample_rate};
}

std::vector<std::complex<double>> inverse_dft(const Spectrum& s) {
    if (s.coeffs.empty()) throw Error(ErrorKind::Usage, "dft: empty spectrum");
    require_finite(s.coeffs);
    std::vector<cd> a = s.coeffs;
    fft_any(a, true);
    const double inv_n = 1.0 / static_cast<double>(a.size());
    for (cd& v : a) v *= inv_n;
    return a;
}

std::vector<double> real_part(std::span<const std::complex<double>> x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i].real();
    return out;
}

}  // namespace wmark
