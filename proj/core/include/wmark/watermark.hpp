#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "wmark/denoise.hpp"
#include "wmark/wav_io.hpp"

namespace wmark {

/// The secret message: K amplitude samples plus their nominal rate.
/// Samples must stay within [-16, 16] so the exponential transform
/// cannot overflow.
struct WatermarkPayload {
    std::vector<double> samples;
    int sample_rate = 0;
};

void validate(const WatermarkPayload& payload);

struct EmbedConfig {
    EmbedMode mode = EmbedMode::Symmetric;
    double eps = 1e-12;
    std::optional<WienerParams> denoise;
};

struct EmbedResult {
    /// AudioClip in Symmetric mode, ComplexClip in Verbatim mode.
    std::variant<AudioClip, ComplexClip> watermarked;
    SidecarMeta meta;
    std::vector<std::size_t> modified_bins;  // sorted, unique
    /// Largest |imag| of the time signal before it was discarded
    /// (Symmetric mode only; 0 in Verbatim mode, which keeps the signal
    /// complex).
    double max_imag_residual = 0.0;
};

struct ExtractionReport {
    std::size_t clamped_count = 0;
    double max_imag_residual = 0.0;  // max |imag(Y[b])| over the read bins
};

struct ExtractResult {
    WatermarkPayload payload;
    ExtractionReport report;
};

/// Elementwise exp(). Errors if any |sample| exceeds the overflow guard.
std::vector<double> transform_payload(const WatermarkPayload& payload);

struct InverseTransformResult {
    std::vector<double> values;
    std::size_t clamped_count = 0;
};

/// Elementwise log. Lenient mode clamps inputs below eps and counts the
/// clamps; strict mode errors on any nonpositive input.
InverseTransformResult inverse_transform(std::span<const double> v, double eps,
                                         bool strict);

/// Largest payload length a host of n samples can carry.
/// Verbatim keeps only the DC bin; Symmetric additionally reserves the
/// mirror bins and the Nyquist bin.
std::size_t capacity(std::size_t n, EmbedMode mode);

/// 0-based indices receiving the payload: n-k .. n-1, payload index 0 at
/// the lowest of them.
std::vector<std::size_t> embed_bin_indices(std::size_t n, std::size_t k);

/// Replace the tail DFT bins of the host with the transformed payload and
/// inverse transform. Verbatim mode reproduces that arithmetic exactly and
/// yields a complex signal; Symmetric mode also writes the mirror bins so
/// the result is real and playable.
EmbedResult embed(const AudioClip& host, const WatermarkPayload& payload,
                  const EmbedConfig& cfg);

/// Blind extraction: forward transform, read the tail bins, invert the
/// payload transform. Needs only the sidecar, not the host.
ExtractResult extract(const AudioClip& watermarked, const SidecarMeta& meta,
                      bool strict = false);
ExtractResult extract(const ComplexClip& watermarked, const SidecarMeta& meta,
                      bool strict = false);

}  // namespace wmark
