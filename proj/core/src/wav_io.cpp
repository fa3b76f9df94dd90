#include "wmark/wav_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "wmark/errors.hpp"

namespace wmark {

namespace {

constexpr double kPcm16Scale = 32768.0;

uint16_t read_u16(const uint8_t* p) {
    return static_cast<uint16_t>(p[0] | (static_cast<uint16_t>(p[1]) << 8));
}

uint32_t read_u32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, uint16_t v) {
    out.push_back(static_cast<char>(v & 0xFF));
    out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

double decode_f32(const uint8_t* p) {
    uint32_t bits = read_u32(p);
    float f;
    std::memcpy(&f, &bits, sizeof f);
    return static_cast<double>(f);
}

double decode_f64(const uint8_t* p) {
    uint64_t bits = static_cast<uint64_t>(read_u32(p)) |
                    (static_cast<uint64_t>(read_u32(p + 4)) << 32);
    double d;
    std::memcpy(&d, &bits, sizeof d);
    return d;
}

void put_f64(std::string& out, double d) {
    uint64_t bits;
    std::memcpy(&bits, &d, sizeof bits);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

struct RawWav {
    int sample_rate = 0;
    int channels = 0;
    SampleFormat format = SampleFormat::Pcm16;
    std::vector<double> interleaved;  // frames * channels

    std::size_t frames() const {
        return channels > 0 ? interleaved.size() / static_cast<std::size_t>(channels) : 0;
    }
};

RawWav parse_wav(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Format, "cannot open file: " + path.string());

    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const auto* data = reinterpret_cast<const uint8_t*>(bytes.data());
    const std::size_t size = bytes.size();

    if (size < 12 || std::memcmp(data, "RIFF", 4) != 0 || std::memcmp(data + 8, "WAVE", 4) != 0)
        throw Error(ErrorKind::Format, "not a RIFF/WAVE file: " + path.string());

    bool have_fmt = false;
    uint16_t format_tag = 0, channels = 0, bits = 0, block_align = 0;
    uint32_t sample_rate = 0;
    const uint8_t* pcm = nullptr;
    std::size_t pcm_size = 0;
    bool have_data = false;

    std::size_t pos = 12;
    while (pos + 8 <= size) {
        const uint8_t* hdr = data + pos;
        const uint32_t chunk_size = read_u32(hdr + 4);
        const std::size_t body = pos + 8;

        if (std::memcmp(hdr, "fmt ", 4) == 0) {
            if (body + chunk_size > size || chunk_size < 16)
                throw Error(ErrorKind::Format, "malformed fmt chunk: " + path.string());
            format_tag = read_u16(data + body);
            channels = read_u16(data + body + 2);
            sample_rate = read_u32(data + body + 4);
            block_align = read_u16(data + body + 12);
            bits = read_u16(data + body + 14);
            have_fmt = true;
        } else if (std::memcmp(hdr, "data", 4) == 0) {
            if (body + chunk_size > size)
                throw Error(ErrorKind::Format, "truncated data chunk: " + path.string());
            pcm = data + body;
            pcm_size = chunk_size;
            have_data = true;
        }
        // other chunks (LIST, fact, ...) are skipped
        pos = body + chunk_size + (chunk_size & 1);
    }

    if (!have_fmt) throw Error(ErrorKind::Format, "missing fmt chunk: " + path.string());
    if (!have_data) throw Error(ErrorKind::Format, "missing data chunk: " + path.string());
    if (sample_rate < 1) throw Error(ErrorKind::Format, "invalid sample rate: " + path.string());
    if (channels < 1) throw Error(ErrorKind::Format, "invalid channel count: " + path.string());

    SampleFormat format;
    if (format_tag == 1 && bits == 16) {
        format = SampleFormat::Pcm16;
    } else if (format_tag == 3 && bits == 32) {
        format = SampleFormat::Float32;
    } else if (format_tag == 3 && bits == 64) {
        format = SampleFormat::Float64;
    } else {
        throw Error(ErrorKind::Format,
                    "unsupported codec (format tag " + std::to_string(format_tag) + ", " +
                        std::to_string(bits) + " bits): " + path.string());
    }

    const std::size_t bytes_per_sample = bits / 8;
    if (block_align != channels * bytes_per_sample)
        throw Error(ErrorKind::Format, "inconsistent block alignment: " + path.string());
    if (pcm_size % block_align != 0)
        throw Error(ErrorKind::Format, "truncated data chunk: " + path.string());

    const std::size_t total = pcm_size / bytes_per_sample;
    if (total == 0) throw Error(ErrorKind::Format, "empty data chunk: " + path.string());

    RawWav raw;
    raw.sample_rate = static_cast<int>(sample_rate);
    raw.channels = channels;
    raw.format = format;
    raw.interleaved.resize(total);

    for (std::size_t i = 0; i < total; ++i) {
        const uint8_t* p = pcm + i * bytes_per_sample;
        double v;
        switch (format) {
            case SampleFormat::Pcm16:
                v = static_cast<double>(static_cast<int16_t>(read_u16(p))) / kPcm16Scale;
                break;
            case SampleFormat::Float32:
                v = decode_f32(p);
                break;
            default:
                v = decode_f64(p);
                break;
        }
        if (!std::isfinite(v))
            throw Error(ErrorKind::Format, "non-finite sample in float data: " + path.string());
        raw.interleaved[i] = v;
    }
    return raw;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::Format, "cannot open file for writing: " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw Error(ErrorKind::Format, "write failed: " + path.string());
}

// Container for one mono or interleaved stereo payload. Float formats get
// a fact chunk as the WAVE spec asks for non-PCM data.
std::string wav_bytes(int sample_rate, int channels, WavEncoding encoding,
                      std::span<const double> interleaved,
                      std::size_t* clipped_out) {
    const bool is_float = encoding == WavEncoding::Float64;
    const uint16_t bits = is_float ? 64 : 16;
    const uint16_t block_align = static_cast<uint16_t>(channels * bits / 8);
    const uint32_t data_size = static_cast<uint32_t>(interleaved.size() * bits / 8);
    const uint32_t fact_bytes = is_float ? 12 : 0;
    const uint32_t riff_size = 4 + 24 + fact_bytes + 8 + data_size;

    std::string out;
    out.reserve(8 + riff_size);
    out.append("RIFF");
    put_u32(out, riff_size);
    out.append("WAVE");
    out.append("fmt ");
    put_u32(out, 16);
    put_u16(out, is_float ? 3 : 1);
    put_u16(out, static_cast<uint16_t>(channels));
    put_u32(out, static_cast<uint32_t>(sample_rate));
    put_u32(out, static_cast<uint32_t>(sample_rate) * block_align);
    put_u16(out, block_align);
    put_u16(out, bits);
    if (is_float) {
        out.append("fact");
        put_u32(out, 4);
        put_u32(out, static_cast<uint32_t>(interleaved.size() / static_cast<std::size_t>(channels)));
    }
    out.append("data");
    put_u32(out, data_size);

    std::size_t clipped = 0;
    if (is_float) {
        for (double v : interleaved) put_f64(out, v);
    } else {
        for (double v : interleaved) {
            if (v > 1.0) {
                v = 1.0;
                ++clipped;
            } else if (v < -1.0) {
                v = -1.0;
                ++clipped;
            }
            long q = std::lrint(v * kPcm16Scale);
            if (q > 32767) q = 32767;
            if (q < -32768) q = -32768;
            put_u16(out, static_cast<uint16_t>(static_cast<int16_t>(q)));
        }
    }
    if (clipped_out) *clipped_out = clipped;
    return out;
}

std::string json_mode(EmbedMode mode) { return to_string(mode); }

}  // namespace

std::string to_string(EmbedMode mode) {
    return mode == EmbedMode::Verbatim ? "verbatim" : "symmetric";
}

EmbedMode embed_mode_from_string(const std::string& s) {
    if (s == "verbatim") return EmbedMode::Verbatim;
    if (s == "symmetric") return EmbedMode::Symmetric;
    throw Error(ErrorKind::Usage, "unknown mode: " + s + " (expected verbatim|symmetric)");
}

void validate(const AudioClip& clip) {
    if (clip.samples.empty()) throw Error(ErrorKind::Usage, "audio clip is empty");
    if (clip.sample_rate < 1) throw Error(ErrorKind::Usage, "audio clip sample rate must be >= 1");
    for (double v : clip.samples)
        if (!std::isfinite(v)) throw Error(ErrorKind::Usage, "audio clip contains non-finite sample");
}

void validate(const ComplexClip& clip) {
    if (clip.samples.empty()) throw Error(ErrorKind::Usage, "complex clip is empty");
    if (clip.sample_rate < 1) throw Error(ErrorKind::Usage, "complex clip sample rate must be >= 1");
    for (const auto& v : clip.samples)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw Error(ErrorKind::Usage, "complex clip contains non-finite sample");
}

void validate(const SidecarMeta& meta) {
    if (meta.k < 1) throw Error(ErrorKind::Format, "sidecar: k must be >= 1");
    if (!(meta.eps > 0.0)) throw Error(ErrorKind::Format, "sidecar: eps must be > 0");
    if (meta.payload_sample_rate < 1)
        throw Error(ErrorKind::Format, "sidecar: payload_sample_rate must be >= 1");
    if (meta.format_version != 1)
        throw Error(ErrorKind::Format, "sidecar: unsupported format_version " +
                                           std::to_string(meta.format_version) +
                                           " (this build reads version 1)");
}

AudioClip read_wav(const std::filesystem::path& path, std::optional<int> channel) {
    RawWav raw = parse_wav(path);

    if (raw.channels > 2)
        throw Error(ErrorKind::Format,
                    "unsupported channel count " + std::to_string(raw.channels) + ": " + path.string());
    if (raw.channels == 2 && !channel)
        throw Error(ErrorKind::Usage,
                    "stereo file requires an explicit channel selection: " + path.string());

    int ch = channel.value_or(0);
    if (ch < 0 || ch >= raw.channels)
        throw Error(ErrorKind::Usage, "channel index " + std::to_string(ch) + " out of range (file has " +
                                          std::to_string(raw.channels) + " channel(s))");

    AudioClip clip;
    clip.sample_rate = raw.sample_rate;
    clip.source_format = raw.format;
    clip.samples.resize(raw.frames());
    for (std::size_t i = 0; i < clip.samples.size(); ++i)
        clip.samples[i] = raw.interleaved[i * static_cast<std::size_t>(raw.channels) +
                                          static_cast<std::size_t>(ch)];
    return clip;
}

std::size_t write_wav(const AudioClip& clip, const std::filesystem::path& path,
                      WavEncoding encoding) {
    validate(clip);
    std::size_t clipped = 0;
    write_file(path, wav_bytes(clip.sample_rate, 1, encoding, clip.samples, &clipped));
    return clipped;
}

ComplexClip read_complex(const std::filesystem::path& path) {
    RawWav raw = parse_wav(path);
    if (raw.channels != 2)
        throw Error(ErrorKind::Format,
                    "complex carrier must be a 2-channel file, got " +
                        std::to_string(raw.channels) + " channel(s): " + path.string());
    if (raw.format != SampleFormat::Float64)
        throw Error(ErrorKind::Format, "complex carrier must be float64 encoded: " + path.string());

    ComplexClip clip;
    clip.sample_rate = raw.sample_rate;
    clip.samples.resize(raw.frames());
    for (std::size_t i = 0; i < clip.samples.size(); ++i)
        clip.samples[i] = {raw.interleaved[2 * i], raw.interleaved[2 * i + 1]};
    return clip;
}

void write_complex(const ComplexClip& clip, const std::filesystem::path& path) {
    validate(clip);
    std::vector<double> interleaved(clip.samples.size() * 2);
    for (std::size_t i = 0; i < clip.samples.size(); ++i) {
        interleaved[2 * i] = clip.samples[i].real();
        interleaved[2 * i + 1] = clip.samples[i].imag();
    }
    write_file(path, wav_bytes(clip.sample_rate, 2, WavEncoding::Float64, interleaved, nullptr));
}

SidecarMeta read_meta(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Format, "cannot open sidecar: " + path.string());

    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Format, "corrupt sidecar " + path.string() + ": " + e.what());
    }

    SidecarMeta meta;
    try {
        meta.format_version = j.at("format_version").get<int>();
        if (meta.format_version != 1)
            throw Error(ErrorKind::Format, "sidecar: unsupported format_version " +
                                               std::to_string(meta.format_version) +
                                               " (this build reads version 1)");
        meta.k = j.at("k").get<std::size_t>();
        meta.mode = embed_mode_from_string(j.at("mode").get<std::string>());
        meta.payload_sample_rate = j.at("payload_sample_rate").get<int>();
        meta.eps = j.at("eps").get<double>();
        if (j.contains("embed_snr_db") && j["embed_snr_db"].is_number())
            meta.embed_snr_db = j["embed_snr_db"].get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Format, "corrupt sidecar " + path.string() + ": " + e.what());
    }
    validate(meta);
    return meta;
}

void write_meta(const SidecarMeta& meta, const std::filesystem::path& path) {
    validate(meta);
    nlohmann::ordered_json j;
    j["format_version"] = meta.format_version;
    j["k"] = meta.k;
    j["mode"] = json_mode(meta.mode);
    j["payload_sample_rate"] = meta.payload_sample_rate;
    j["eps"] = meta.eps;
    if (meta.embed_snr_db) j["embed_snr_db"] = *meta.embed_snr_db;

    write_file(path, j.dump(2) + "\n");
}

std::filesystem::path sidecar_path(const std::filesystem::path& audio_path) {
    std::filesystem::path p = audio_path;
    p += ".wmmeta.json";
    return p;
}

}  // namespace wmark
