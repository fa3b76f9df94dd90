#include "cli.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <utility>

#include <CLI11.hpp>

#include "wmark/channel.hpp"
#include "wmark/denoise.hpp"
#include "wmark/errors.hpp"
#include "wmark/metrics.hpp"
#include "wmark/spectrum.hpp"
#include "wmark/watermark.hpp"
#include "wmark/wav_io.hpp"

namespace fs = std::filesystem;

namespace wmark::cli {

namespace {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

LogLevel g_log_level = LogLevel::Warn;

LogLevel log_level_from_env() {
    const char* env = std::getenv("WM_LOG");
    if (!env) return LogLevel::Warn;
    const std::string v(env);
    if (v == "error") return LogLevel::Error;
    if (v == "warn") return LogLevel::Warn;
    if (v == "info") return LogLevel::Info;
    if (v == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
}

void log(LogLevel level, const std::string& msg) {
    if (level > g_log_level) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::cerr << "wmark: " << names[static_cast<int>(level)] << ": " << msg << "\n";
}

void log_warn(const std::string& msg) { log(LogLevel::Warn, msg); }
void log_info(const std::string& msg) { log(LogLevel::Info, msg); }

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Usage: return kExitUsage;
        case ErrorKind::Capacity: return kExitCapacity;
        case ErrorKind::Format: return kExitFormat;
        case ErrorKind::Extraction: return kExitExtraction;
    }
    return 1;
}

// All file outputs go to a temp name first and are renamed into place
// only after the whole command has succeeded, so a nonzero exit never
// leaves (or clobbers) an output file.
class OutputStage {
public:
    OutputStage() = default;
    OutputStage(const OutputStage&) = delete;
    OutputStage& operator=(const OutputStage&) = delete;

    fs::path stage(const fs::path& final_path) {
        fs::path tmp = final_path;
        tmp += ".tmp";
        staged_.emplace_back(tmp, final_path);
        return tmp;
    }

    void commit() {
        for (const auto& [tmp, final_path] : staged_) {
            std::error_code ec;
            fs::rename(tmp, final_path, ec);
            if (ec)
                throw Error(ErrorKind::Format,
                            "cannot move " + tmp.string() + " to " + final_path.string() + ": " +
                                ec.message());
        }
        staged_.clear();
    }

    ~OutputStage() {
        for (const auto& [tmp, final_path] : staged_) {
            std::error_code ec;
            fs::remove(tmp, ec);
        }
    }

private:
    std::vector<std::pair<fs::path, fs::path>> staged_;
};

struct EmbedArgs {
    std::string host, payload, out;
    std::string mode = "symmetric";
    double eps = 1e-12;
    bool denoise = false;
    WienerParams wiener;
    std::optional<int> host_channel, payload_channel;
};

struct ExtractArgs {
    std::string in, out;
    std::optional<std::size_t> k;
    std::optional<std::string> mode;
    std::optional<double> eps;
    bool strict = false;
    std::optional<int> channel;
};

struct AttackArgs {
    std::string in, out;
    std::optional<double> awgn_snr_db;
    std::optional<double> gain;
    std::optional<int> requantize_bits;
    std::uint64_t seed = 0;
    bool identity = false;
    std::optional<int> channel;
};

struct EvaluateArgs {
    std::string host, payload, json_out;
    std::string mode = "symmetric";
    std::string snr_list;
    std::size_t seeds = 1;
    double eps = 1e-12;
    std::optional<int> host_channel, payload_channel;
};

struct InspectArgs {
    std::string in;
};

double embed_snr_of(const AudioClip& host, const EmbedResult& result) {
    if (const auto* audio = std::get_if<AudioClip>(&result.watermarked))
        return snr_db(host.samples, audio->samples);
    const auto& complex_clip = std::get<ComplexClip>(result.watermarked);
    return snr_db(host.samples, real_part(complex_clip.samples));
}

int run_embed(const EmbedArgs& args) {
    AudioClip host = read_wav(args.host, args.host_channel);
    AudioClip payload_clip = read_wav(args.payload, args.payload_channel);
    WatermarkPayload payload{payload_clip.samples, payload_clip.sample_rate};

    EmbedConfig cfg;
    cfg.mode = embed_mode_from_string(args.mode);
    cfg.eps = args.eps;
    if (args.denoise) cfg.denoise = args.wiener;

    EmbedResult result = embed(host, payload, cfg);
    result.meta.embed_snr_db = embed_snr_of(host, result);

    OutputStage stage;
    const fs::path audio_tmp = stage.stage(args.out);
    const fs::path meta_tmp = stage.stage(sidecar_path(args.out));
    if (const auto* audio = std::get_if<AudioClip>(&result.watermarked)) {
        write_wav(*audio, audio_tmp, WavEncoding::Float64);
    } else {
        write_complex(std::get<ComplexClip>(result.watermarked), audio_tmp);
    }
    write_meta(result.meta, meta_tmp);
    stage.commit();

    std::ostringstream line;
    line << "embedded k=" << payload.samples.size() << " into n=" << host.samples.size() << " ("
         << args.mode << "), embed snr " << *result.meta.embed_snr_db << " dB";
    if (cfg.mode == EmbedMode::Verbatim) line << ", complex carrier";
    if (cfg.mode == EmbedMode::Symmetric)
        log_info("imag residual before discard: " + std::to_string(result.max_imag_residual));
    std::cout << line.str() << "\n";
    std::cout << "wrote " << args.out << " and " << sidecar_path(args.out).string() << "\n";
    return kExitOk;
}

int run_extract(const ExtractArgs& args) {
    const fs::path meta_path = sidecar_path(args.in);
    std::optional<SidecarMeta> meta;
    if (fs::exists(meta_path)) meta = read_meta(meta_path);

    if (!meta && !args.k)
        throw Error(ErrorKind::Usage, "sidecar " + meta_path.string() +
                                          " not found and no --k/--mode given; cannot extract");

    SidecarMeta effective;
    if (meta) {
        effective = *meta;
        if (args.k) {
            log_warn("--k overrides sidecar k=" + std::to_string(effective.k));
            effective.k = *args.k;
        }
        if (args.mode) {
            log_warn("--mode overrides sidecar mode=" + to_string(effective.mode));
            effective.mode = embed_mode_from_string(*args.mode);
        }
    } else {
        effective.k = *args.k;
        effective.mode = args.mode ? embed_mode_from_string(*args.mode) : EmbedMode::Symmetric;
        if (!args.mode) log_warn("no sidecar and no --mode; assuming symmetric");
        effective.payload_sample_rate = 0;  // filled from the carrier below
    }
    if (args.eps) effective.eps = *args.eps;

    ExtractResult result;
    if (effective.mode == EmbedMode::Verbatim) {
        ComplexClip carrier = read_complex(args.in);
        if (effective.payload_sample_rate < 1) {
            effective.payload_sample_rate = carrier.sample_rate;
            log_warn("payload sample rate unknown; using carrier rate");
        }
        result = extract(carrier, effective, args.strict);
    } else {
        AudioClip carrier = read_wav(args.in, args.channel);
        if (effective.payload_sample_rate < 1) {
            effective.payload_sample_rate = carrier.sample_rate;
            log_warn("payload sample rate unknown; using carrier rate");
        }
        result = extract(carrier, effective, args.strict);
    }

    OutputStage stage;
    const fs::path out_tmp = stage.stage(args.out);
    AudioClip recovered{result.payload.samples, result.payload.sample_rate, SampleFormat::Float64};
    write_wav(recovered, out_tmp, WavEncoding::Float64);
    stage.commit();

    std::cout << "extracted k=" << result.payload.samples.size()
              << ", clamped=" << result.report.clamped_count
              << ", max imag residual=" << result.report.max_imag_residual << "\n";
    std::cout << "wrote " << args.out << "\n";
    return kExitOk;
}

int run_attack(const AttackArgs& args) {
    ChannelSpec spec;
    spec.awgn_snr_db = args.awgn_snr_db;
    spec.gain = args.gain;
    spec.requantize_bits = args.requantize_bits;
    spec.seed = args.seed;
    if (spec.identity() && !args.identity)
        throw Error(ErrorKind::Usage,
                    "no attack selected; pass --identity to run the identity channel");

    const fs::path meta_path = sidecar_path(args.in);
    std::optional<SidecarMeta> meta;
    if (fs::exists(meta_path)) meta = read_meta(meta_path);

    OutputStage stage;
    const fs::path out_tmp = stage.stage(args.out);

    if (meta && meta->mode == EmbedMode::Verbatim) {
        write_complex(apply_channel(read_complex(args.in), spec), out_tmp);
    } else {
        AudioClip attacked = apply_channel(read_wav(args.in, args.channel), spec);
        attacked.source_format = SampleFormat::Float64;
        write_wav(attacked, out_tmp, WavEncoding::Float64);
    }
    if (meta) {
        const fs::path meta_tmp = stage.stage(sidecar_path(args.out));
        write_meta(*meta, meta_tmp);
        log_info("copied sidecar to " + sidecar_path(args.out).string());
    }
    stage.commit();

    std::cout << "wrote " << args.out << "\n";
    return kExitOk;
}

std::vector<double> parse_snr_list(const std::string& csv) {
    std::vector<double> values;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        if (item == "inf" || item == "+inf") {
            values.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        try {
            std::size_t used = 0;
            const double v = std::stod(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            values.push_back(v);
        } catch (const std::exception&) {
            throw Error(ErrorKind::Usage, "bad --snr-list entry: '" + item + "'");
        }
    }
    return values;
}

int run_evaluate(const EvaluateArgs& args) {
    AudioClip host = read_wav(args.host, args.host_channel);
    AudioClip payload_clip = read_wav(args.payload, args.payload_channel);
    WatermarkPayload payload{payload_clip.samples, payload_clip.sample_rate};

    EmbedConfig cfg;
    cfg.mode = embed_mode_from_string(args.mode);
    cfg.eps = args.eps;

    std::vector<ChannelSpec> specs;
    for (double snr : parse_snr_list(args.snr_list)) {
        ChannelSpec spec;
        spec.awgn_snr_db = snr;
        spec.seed = 0;
        specs.push_back(spec);
    }

    const std::vector<MetricsReport> reports =
        evaluate_pipeline(host, payload, cfg, specs, args.seeds);

    OutputStage stage;
    const fs::path json_tmp = stage.stage(args.json_out);
    std::ofstream out(json_tmp);
    if (!out) throw Error(ErrorKind::Format, "cannot open for writing: " + json_tmp.string());
    out << reports_to_json(reports);
    out.flush();
    if (!out) throw Error(ErrorKind::Format, "write failed: " + json_tmp.string());
    out.close();
    stage.commit();

    // per-spec mean correlation, one line each
    for (std::size_t s = 0; s < specs.size(); ++s) {
        double mean_corr = 0.0;
        for (std::size_t t = 0; t < args.seeds; ++t)
            mean_corr += reports[s * args.seeds + t].payload_corr;
        mean_corr /= static_cast<double>(args.seeds == 0 ? 1 : args.seeds);
        std::cout << "awgn " << *specs[s].awgn_snr_db << " dB: mean payload_corr = " << mean_corr
                  << " over " << args.seeds << " trial(s)\n";
    }
    std::cout << "wrote " << args.json_out << "\n";
    return kExitOk;
}

int run_inspect(const InspectArgs& args) {
    const fs::path meta_path = sidecar_path(args.in);
    if (!fs::exists(meta_path))
        throw Error(ErrorKind::Usage,
                    "sidecar " + meta_path.string() + " not found; nothing to inspect");
    const SidecarMeta meta = read_meta(meta_path);

    std::size_t n = 0;
    if (meta.mode == EmbedMode::Verbatim) {
        n = read_complex(args.in).samples.size();
    } else {
        n = read_wav(args.in, std::nullopt).samples.size();
    }

    const auto bins = embed_bin_indices(n, meta.k);
    std::cout << "file: " << args.in << "\n";
    std::cout << "n: " << n << "\n";
    std::cout << "k: " << meta.k << "\n";
    std::cout << "mode: " << to_string(meta.mode) << "\n";
    std::cout << "embed bins: [" << bins.front() << ", " << bins.back() << "]\n";
    if (meta.mode == EmbedMode::Symmetric)
        std::cout << "mirror bins: [" << (n - bins.back()) << ", " << (n - bins.front()) << "]\n";
    std::cout << "modified bin count: " << (meta.mode == EmbedMode::Verbatim ? meta.k : 2 * meta.k)
              << "\n";
    std::cout << "capacity: " << capacity(n, meta.mode) << "\n";
    std::cout << "payload_sample_rate: " << meta.payload_sample_rate << "\n";
    std::cout << "eps: " << meta.eps << "\n";
    std::cout << "embed_snr_db: ";
    if (meta.embed_snr_db)
        std::cout << *meta.embed_snr_db << "\n";
    else
        std::cout << "n/a\n";
    std::cout << "dft: direct, " << (std::has_single_bit(n) ? "radix-2" : "bluestein")
              << " (no zero padding)\n";
    return kExitOk;
}

}  // namespace

int run(std::vector<std::string> args) {
    g_log_level = log_level_from_env();

    CLI::App app{"blind speech watermarking toolkit"};
    app.require_subcommand(1);

    EmbedArgs embed_args;
    auto* embed_cmd = app.add_subcommand("embed", "hide a payload clip inside a host clip");
    embed_cmd->add_option("--host", embed_args.host, "host WAV")->required();
    embed_cmd->add_option("--payload", embed_args.payload, "payload WAV")->required();
    embed_cmd->add_option("--out", embed_args.out, "watermarked output WAV")->required();
    embed_cmd->add_option("--mode", embed_args.mode, "symmetric|verbatim")
        ->check(CLI::IsMember({"symmetric", "verbatim"}));
    embed_cmd->add_option("--eps", embed_args.eps, "extraction clamp epsilon");
    embed_cmd->add_flag("--denoise", embed_args.denoise, "Wiener-denoise the payload first");
    embed_cmd->add_option("--wiener-frame", embed_args.wiener.frame_len, "denoiser frame length");
    embed_cmd->add_option("--wiener-hop", embed_args.wiener.hop, "denoiser hop size");
    embed_cmd->add_option("--wiener-noise-frames", embed_args.wiener.noise_frames,
                          "frames used for the noise estimate");
    embed_cmd->add_option("--wiener-floor", embed_args.wiener.gain_floor, "gain floor in (0,1]");
    embed_cmd->add_option("--host-channel", embed_args.host_channel,
                          "channel to use from a stereo host");
    embed_cmd->add_option("--payload-channel", embed_args.payload_channel,
                          "channel to use from a stereo payload");

    ExtractArgs extract_args;
    auto* extract_cmd = app.add_subcommand("extract", "recover the payload from a watermarked clip");
    extract_cmd->add_option("--in", extract_args.in, "watermarked WAV")->required();
    extract_cmd->add_option("--out", extract_args.out, "recovered payload WAV")->required();
    extract_cmd->add_option("--k", extract_args.k, "payload length (overrides sidecar)");
    extract_cmd->add_option("--mode", extract_args.mode, "symmetric|verbatim (overrides sidecar)")
        ->check(CLI::IsMember({"symmetric", "verbatim"}));
    extract_cmd->add_option("--eps", extract_args.eps, "clamp epsilon (overrides sidecar)");
    extract_cmd->add_flag("--strict", extract_args.strict,
                          "fail instead of clamping nonpositive bin values");
    extract_cmd->add_option("--channel", extract_args.channel,
                            "channel to use from a stereo carrier");

    AttackArgs attack_args;
    auto* attack_cmd = app.add_subcommand("attack", "simulate channel distortions");
    attack_cmd->add_option("--in", attack_args.in, "input WAV")->required();
    attack_cmd->add_option("--out", attack_args.out, "attacked output WAV")->required();
    attack_cmd->add_option("--awgn-snr-db", attack_args.awgn_snr_db, "additive noise target SNR");
    attack_cmd->add_option("--gain", attack_args.gain, "amplitude scale");
    attack_cmd->add_option("--requantize-bits", attack_args.requantize_bits,
                           "requantize to this many bits [4,16]");
    attack_cmd->add_option("--seed", attack_args.seed, "noise seed")->required();
    attack_cmd->add_flag("--identity", attack_args.identity, "explicitly run the identity channel");
    attack_cmd->add_option("--channel", attack_args.channel,
                           "channel to use from a stereo input");

    EvaluateArgs evaluate_args;
    auto* evaluate_cmd =
        app.add_subcommand("evaluate", "embed/attack/extract sweep with a JSON report");
    evaluate_cmd->add_option("--host", evaluate_args.host, "host WAV")->required();
    evaluate_cmd->add_option("--payload", evaluate_args.payload, "payload WAV")->required();
    evaluate_cmd->add_option("--mode", evaluate_args.mode, "symmetric|verbatim")
        ->check(CLI::IsMember({"symmetric", "verbatim"}));
    evaluate_cmd->add_option("--snr-list", evaluate_args.snr_list, "comma-separated AWGN SNRs (dB)")
        ->required();
    evaluate_cmd->add_option("--seeds", evaluate_args.seeds, "trials per SNR")->required();
    evaluate_cmd->add_option("--json", evaluate_args.json_out, "report output path")->required();
    evaluate_cmd->add_option("--eps", evaluate_args.eps, "extraction clamp epsilon");
    evaluate_cmd->add_option("--host-channel", evaluate_args.host_channel,
                             "channel to use from a stereo host");
    evaluate_cmd->add_option("--payload-channel", evaluate_args.payload_channel,
                             "channel to use from a stereo payload");

    InspectArgs inspect_args;
    auto* inspect_cmd = app.add_subcommand("inspect", "describe an embed output (read-only)");
    inspect_cmd->add_option("--in", inspect_args.in, "watermarked WAV")->required();

    int code = kExitOk;
    embed_cmd->callback([&] { code = run_embed(embed_args); });
    extract_cmd->callback([&] { code = run_extract(extract_args); });
    attack_cmd->callback([&] { code = run_attack(attack_args); });
    evaluate_cmd->callback([&] { code = run_evaluate(evaluate_args); });
    inspect_cmd->callback([&] { code = run_inspect(inspect_args); });

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "wmark: error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "wmark: internal error: " << e.what() << "\n";
        return 1;
    }
    return code;
}

}  // namespace wmark::cli
