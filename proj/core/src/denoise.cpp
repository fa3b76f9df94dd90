#include "wmark/denoise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "wmark/errors.hpp"
#include "wmark/spectrum.hpp"

namespace wmark {

void validate(const WienerParams& p) {
    if (p.hop == 0 || p.hop > p.frame_len)
        throw Error(ErrorKind::Usage, "wiener: hop must satisfy 0 < hop <= frame_len");
    if (p.frame_len < 2) throw Error(ErrorKind::Usage, "wiener: frame_len must be >= 2");
    if (p.noise_frames < 1) throw Error(ErrorKind::Usage, "wiener: noise_frames must be >= 1");
    if (!(p.gain_floor > 0.0) || p.gain_floor > 1.0)
        throw Error(ErrorKind::Usage, "wiener: gain_floor must be in (0, 1]");
}

AudioClip wiener_denoise(const AudioClip& clip, const WienerParams& p) {
    validate(clip);
    validate(p);

    const std::size_t len = clip.samples.size();
    const std::size_t frame = p.frame_len;
    if (len < frame)
        throw Error(ErrorKind::Usage, "wiener: clip shorter than one frame (" +
                                          std::to_string(len) + " < " + std::to_string(frame) + ")");

    // Periodic Hann; shifted copies at hop = frame/2 sum to one.
    std::vector<double> window(frame);
    for (std::size_t i = 0; i < frame; ++i)
        window[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                          static_cast<double>(frame)));

    // enough frames to cover every sample, reading zeros past the end
    std::size_t num_frames = 1;
    while ((num_frames - 1) * p.hop + frame < len) ++num_frames;

    auto frame_spectrum = [&](std::size_t start, std::vector<double>& buf) {
        for (std::size_t i = 0; i < frame; ++i) {
            const std::size_t idx = start + i;
            buf[i] = (idx < len ? clip.samples[idx] : 0.0) * window[i];
        }
        return forward_dft(std::span<const double>(buf), clip.sample_rate);
    };

    // noise power spectrum from the leading frames
    std::vector<double> noise_psd(frame, 0.0);
    const std::size_t est_frames = std::min<std::size_t>(p.noise_frames, num_frames);
    std::vector<double> buf(frame);
    for (std::size_t m = 0; m < est_frames; ++m) {
        const Spectrum s = frame_spectrum(m * p.hop, buf);
        for (std::size_t i = 0; i < frame; ++i) noise_psd[i] += std::norm(s.coeffs[i]);
    }
    for (double& v : noise_psd) v /= static_cast<double>(est_frames);

    std::vector<double> out(len, 0.0);
    std::vector<double> weight(len, 0.0);

    for (std::size_t m = 0; m < num_frames; ++m) {
        const std::size_t start = m * p.hop;
        Spectrum s = frame_spectrum(start, buf);
        for (std::size_t i = 0; i < frame; ++i) {
            const double power = std::norm(s.coeffs[i]);
            const double gain =
                power > 0.0 ? std::max(1.0 - noise_psd[i] / power, p.gain_floor) : p.gain_floor;
            s.coeffs[i] *= gain;
        }
        const auto denoised = inverse_dft(s);
        for (std::size_t i = 0; i < frame; ++i) {
            const std::size_t idx = start + i;
            if (idx >= len) break;
            out[idx] += denoised[i].real();
            weight[idx] += window[i];
        }
    }

    AudioClip result;
    result.sample_rate = clip.sample_rate;
    result.source_format = clip.source_format;
    result.samples.resize(len);
    for (std::size_t i = 0; i < len; ++i) {
        // samples no analysis frame weights (the very first one, since the
        // periodic Hann starts at zero) pass through untouched
        result.samples[i] = weight[i] > 1e-12 ? out[i] / weight[i] : clip.samples[i];
    }
    return result;
}

}  // namespace wmark
