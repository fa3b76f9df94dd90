#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wmark/wav_io.hpp"

namespace wmark {

/// One attack configuration. Unset fields are skipped; a spec with no
/// attacks set is the explicit identity channel. Attacks compose in the
/// fixed order gain -> requantize -> AWGN.
struct ChannelSpec {
    std::optional<double> awgn_snr_db;
    std::optional<double> gain;
    std::optional<int> requantize_bits;  // [4, 16]
    std::uint64_t seed = 0;

    bool identity() const noexcept {
        return !awgn_snr_db && !gain && !requantize_bits;
    }
};

void validate(const ChannelSpec& spec);

/// Deterministic sub-seed for (seed, index) pairs; used for channels of a
/// complex clip and for independent trials.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Additive white Gaussian noise at an exact measured SNR: the realized
/// noise vector is scaled so 10*log10(sum x^2 / sum n^2) == snr_db up to
/// round-off. +infinity means no noise. Deterministic given the seed.
std::vector<double> apply_awgn(std::span<const double> x, double snr_db,
                               std::uint64_t seed);

std::vector<double> apply_gain(std::span<const double> x, double gain);

/// Midtread requantization to `bits` bits over [-1, 1]; idempotent.
std::vector<double> apply_requantize(std::span<const double> x, int bits);

AudioClip apply_channel(const AudioClip& clip, const ChannelSpec& spec);

/// Real and imaginary channels are attacked independently with sub-seeds
/// derive_seed(seed, 0) and derive_seed(seed, 1).
ComplexClip apply_channel(const ComplexClip& clip, const ChannelSpec& spec);

}  // namespace wmark
