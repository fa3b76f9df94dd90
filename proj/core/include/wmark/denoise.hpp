#pragma once

#include <cstddef>

#include "wmark/wav_io.hpp"

namespace wmark {

/// Parameters for the spectral Wiener gain denoiser. The noise power
/// spectrum is estimated from the first `noise_frames` frames, so the
/// input is assumed to lead with noise-only content.
struct WienerParams {
    std::size_t frame_len = 256;
    std::size_t hop = 128;
    std::size_t noise_frames = 5;
    double gain_floor = 0.1;
};

void validate(const WienerParams& p);

/// Frame-based Wiener denoiser: Hann analysis window, per-frame gain
/// G[k] = max(1 - N[k]/P[k], gain_floor), overlap-add reconstruction.
/// Output length equals input length.
AudioClip wiener_denoise(const AudioClip& clip, const WienerParams& p);

}  // namespace wmark
