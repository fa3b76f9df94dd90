#include "wmark/watermark.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "wmark/errors.hpp"
#include "wmark/spectrum.hpp"

namespace wmark {

namespace {

// exp() of anything beyond this would swamp the host spectrum and the
// inverse would lose the payload in round-off.
constexpr double kOverflowGuard = 16.0;

void check_capacity(std::size_t n, std::size_t k, EmbedMode mode) {
    const std::size_t k_max = capacity(n, mode);
    if (k > k_max)
        throw Error(ErrorKind::Capacity,
                    "payload length " + std::to_string(k) + " exceeds capacity " +
                        std::to_string(k_max) + " of a " + std::to_string(n) +
                        "-sample host in " + to_string(mode) + " mode");
}

ExtractResult extract_from_spectrum(const Spectrum& spectrum, const SidecarMeta& meta,
                                    bool strict) {
    validate(meta);
    check_capacity(spectrum.size(), meta.k, meta.mode);

    const auto bins = embed_bin_indices(spectrum.size(), meta.k);
    std::vector<double> values(meta.k);
    double max_imag = 0.0;
    for (std::size_t i = 0; i < meta.k; ++i) {
        const auto& c = spectrum.coeffs[bins[i]];
        values[i] = c.real();
        max_imag = std::max(max_imag, std::abs(c.imag()));
    }

    auto inv = inverse_transform(values, meta.eps, strict);

    ExtractResult result;
    result.payload.samples = std::move(inv.values);
    result.payload.sample_rate = meta.payload_sample_rate;
    result.report.clamped_count = inv.clamped_count;
    result.report.max_imag_residual = max_imag;
    return result;
}

}  // namespace

void validate(const WatermarkPayload& payload) {
    if (payload.samples.empty()) throw Error(ErrorKind::Usage, "payload is empty");
    if (payload.sample_rate < 1)
        throw Error(ErrorKind::Usage, "payload sample rate must be >= 1");
    for (double v : payload.samples) {
        if (!std::isfinite(v)) throw Error(ErrorKind::Usage, "payload contains non-finite sample");
        if (std::abs(v) > kOverflowGuard)
            throw Error(ErrorKind::Usage, "payload sample magnitude exceeds overflow guard of " +
                                              std::to_string(kOverflowGuard));
    }
}

std::vector<double> transform_payload(const WatermarkPayload& payload) {
    validate(payload);
    std::vector<double> out(payload.samples.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(payload.samples[i]);
    return out;
}

InverseTransformResult inverse_transform(std::span<const double> v, double eps, bool strict) {
    if (!(eps > 0.0)) throw Error(ErrorKind::Usage, "eps must be > 0");

    InverseTransformResult result;
    result.values.resize(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!std::isfinite(v[i]))
            throw Error(ErrorKind::Usage, "inverse transform input is non-finite");
        if (strict && v[i] <= 0.0)
            throw Error(ErrorKind::Extraction,
                        "extracted value at index " + std::to_string(i) +
                            " is nonpositive (" + std::to_string(v[i]) + ") in strict mode");
        double x = v[i];
        if (x < eps) {
            x = eps;
            ++result.clamped_count;
        }
        result.values[i] = std::log(x);
    }
    return result;
}

std::size_t capacity(std::size_t n, EmbedMode mode) {
    if (n == 0) return 0;
    if (mode == EmbedMode::Verbatim) return n - 1;  // everything but DC
    // Symmetric: embed bins and their mirrors must be disjoint, and the
    // DC and (even n) Nyquist bins stay untouched.
    return (n + 1) / 2 - 1;
}

std::vector<std::size_t> embed_bin_indices(std::size_t n, std::size_t k) {
    std::vector<std::size_t> bins(k);
    for (std::size_t i = 0; i < k; ++i) bins[i] = n - k + i;
    return bins;
}

EmbedResult embed(const AudioClip& host, const WatermarkPayload& payload,
                  const EmbedConfig& cfg) {
    validate(host);
    validate(payload);
    if (!(cfg.eps > 0.0)) throw Error(ErrorKind::Usage, "eps must be > 0");

    const std::size_t n = host.samples.size();
    const std::size_t k = payload.samples.size();
    check_capacity(n, k, cfg.mode);

    WatermarkPayload prepared = payload;
    if (cfg.denoise) {
        AudioClip tmp{payload.samples, payload.sample_rate, SampleFormat::Float64};
        prepared.samples = wiener_denoise(tmp, *cfg.denoise).samples;
    }
    const std::vector<double> transformed = transform_payload(prepared);

    Spectrum spectrum = forward_dft(std::span<const double>(host.samples), host.sample_rate);
    const auto bins = embed_bin_indices(n, k);

    std::vector<std::size_t> modified = bins;
    for (std::size_t i = 0; i < k; ++i) {
        spectrum.coeffs[bins[i]] = transformed[i];
        if (cfg.mode == EmbedMode::Symmetric) {
            // mirror bin; conj(t) == t because the transformed payload is real
            const std::size_t mirror = (n - bins[i]) % n;
            spectrum.coeffs[mirror] = transformed[i];
            modified.push_back(mirror);
        }
    }
    std::sort(modified.begin(), modified.end());

    std::vector<std::complex<double>> time_signal = inverse_dft(spectrum);

    EmbedResult result;
    result.meta = SidecarMeta{k, cfg.mode, payload.sample_rate, cfg.eps, 1, std::nullopt};
    result.modified_bins = std::move(modified);

    if (cfg.mode == EmbedMode::Verbatim) {
        result.watermarked = ComplexClip{std::move(time_signal), host.sample_rate};
    } else {
        double max_imag = 0.0;
        for (const auto& v : time_signal) max_imag = std::max(max_imag, std::abs(v.imag()));
        result.max_imag_residual = max_imag;
        result.watermarked = AudioClip{real_part(time_signal), host.sample_rate,
                                       SampleFormat::Float64};
    }
    return result;
}

ExtractResult extract(const AudioClip& watermarked, const SidecarMeta& meta, bool strict) {
    validate(watermarked);
    return extract_from_spectrum(
        forward_dft(std::span<const double>(watermarked.samples), watermarked.sample_rate),
        meta, strict);
}

ExtractResult extract(const ComplexClip& watermarked, const SidecarMeta& meta, bool strict) {
    validate(watermarked);
    return extract_from_spectrum(
        forward_dft(std::span<const std::complex<double>>(watermarked.samples),
                    watermarked.sample_rate),
        meta, strict);
}

}  // namespace wmark
