#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace wmark {

enum class SampleFormat { Pcm16, Float32, Float64 };
enum class WavEncoding { Pcm16, Float64 };
enum class EmbedMode { Verbatim, Symmetric };

std::string to_string(EmbedMode mode);
EmbedMode embed_mode_from_string(const std::string& s);

/// Mono audio held in double precision, amplitudes nominally in [-1, 1].
struct AudioClip {
    std::vector<double> samples;
    int sample_rate = 0;
    SampleFormat source_format = SampleFormat::Pcm16;
};

/// Complex-valued signal. On disk this is a 2-channel float64 WAV,
/// channel 0 = real part, channel 1 = imaginary part.
struct ComplexClip {
    std::vector<std::complex<double>> samples;
    int sample_rate = 0;
};

/// Sidecar metadata written beside every embed output; extraction is
/// blind apart from this file. Serialized as `<audio>.wmmeta.json`.
struct SidecarMeta {
    std::size_t k = 0;
    EmbedMode mode = EmbedMode::Symmetric;
    int payload_sample_rate = 0;
    double eps = 1e-12;
    int format_version = 1;
    std::optional<double> embed_snr_db;  // informational, filled in by the CLI
};

void validate(const AudioClip& clip);
void validate(const ComplexClip& clip);
void validate(const SidecarMeta& meta);

/// Read a RIFF/WAVE file (PCM16 or IEEE float 32/64). PCM16 samples are
/// scaled by 1/32768. Stereo files require an explicit channel selection;
/// more than two channels are rejected.
AudioClip read_wav(const std::filesystem::path& path,
                   std::optional<int> channel = std::nullopt);

/// Write a mono WAV. For Pcm16, samples are clamped to [-1, 1] first and
/// the number of clamped samples is returned (always 0 for Float64).
std::size_t write_wav(const AudioClip& clip, const std::filesystem::path& path,
                      WavEncoding encoding);

ComplexClip read_complex(const std::filesystem::path& path);
void write_complex(const ComplexClip& clip, const std::filesystem::path& path);

SidecarMeta read_meta(const std::filesystem::path& path);
void write_meta(const SidecarMeta& meta, const std::filesystem::path& path);

/// Sidecar naming convention: "<audio>.wmmeta.json" next to the audio file.
std::filesystem::path sidecar_path(const std::filesystem::path& audio_path);

}  // namespace wmark
