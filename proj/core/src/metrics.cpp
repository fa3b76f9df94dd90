#include "wmark/metrics.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "wmark/errors.hpp"
#include "wmark/spectrum.hpp"

namespace wmark {

namespace {

double energy(std::span<const double> x) {
    double e = 0.0;
    for (double v : x) e += v * v;
    return e;
}

std::span<const double> real_view(const std::variant<AudioClip, ComplexClip>& wm,
                                  std::vector<double>& scratch) {
    if (const auto* audio = std::get_if<AudioClip>(&wm)) return audio->samples;
    const auto& clip = std::get<ComplexClip>(wm);
    scratch = real_part(clip.samples);
    return scratch;
}

}  // namespace

double snr_db(std::span<const double> ref, std::span<const double> test) {
    if (ref.size() != test.size())
        throw Error(ErrorKind::Usage, "snr: length mismatch (" + std::to_string(ref.size()) +
                                          " vs " + std::to_string(test.size()) + ")");
    const double ref_energy = energy(ref);
    if (ref_energy <= 0.0) throw Error(ErrorKind::Usage, "snr: reference has zero energy");

    double err_energy = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        const double d = ref[i] - test[i];
        err_energy += d * d;
    }
    if (err_energy <= 0.0) return kSnrCapDb;
    return std::min(10.0 * std::log10(ref_energy / err_energy), kSnrCapDb);
}

double correlation(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw Error(ErrorKind::Usage, "correlation: length mismatch");
    if (a.size() < 2) throw Error(ErrorKind::Usage, "correlation: need at least 2 samples");

    const double n = static_cast<double>(a.size());
    double mean_a = 0.0, mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= n;
    mean_b /= n;

    double cov = 0.0, var_a = 0.0, var_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if (var_a <= 0.0 || var_b <= 0.0)
        throw Error(ErrorKind::Usage, "correlation: undefined for a constant vector");
    return std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
}

std::vector<MetricsReport> evaluate_pipeline(const AudioClip& host,
                                             const WatermarkPayload& payload,
                                             const EmbedConfig& cfg,
                                             std::span<const ChannelSpec> specs,
                                             std::size_t trials) {
    std::vector<MetricsReport> reports;
    if (specs.empty() || trials == 0) return reports;

    const EmbedResult embedded = embed(host, payload, cfg);
    std::vector<double> scratch;
    const double embed_snr = snr_db(host.samples, real_view(embedded.watermarked, scratch));

    reports.reserve(specs.size() * trials);
    for (const ChannelSpec& spec : specs) {
        for (std::size_t trial = 0; trial < trials; ++trial) {
            ChannelSpec trial_spec = spec;
            trial_spec.seed = derive_seed(spec.seed, trial);

            ExtractResult extracted = std::visit(
                [&](const auto& clip) {
                    return extract(apply_channel(clip, trial_spec), embedded.meta, false);
                },
                embedded.watermarked);

            MetricsReport report;
            report.embed_snr_db = embed_snr;
            report.clamped_count = extracted.report.clamped_count;
            report.modified_bin_count = embedded.modified_bins.size();
            report.mode = cfg.mode;
            report.k = payload.samples.size();
            report.awgn_snr_db = spec.awgn_snr_db;
            report.gain = spec.gain;
            report.requantize_bits = spec.requantize_bits;
            report.seed = trial_spec.seed;

            double max_err = 0.0;
            for (std::size_t i = 0; i < payload.samples.size(); ++i)
                max_err = std::max(max_err,
                                   std::abs(payload.samples[i] - extracted.payload.samples[i]));
            report.payload_max_abs_err = max_err;
            report.payload_corr = correlation(payload.samples, extracted.payload.samples);

            reports.push_back(report);
        }
    }
    return reports;
}

std::string reports_to_json(std::span<const MetricsReport> reports) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const MetricsReport& r : reports) {
        nlohmann::ordered_json j;
        j["embed_snr_db"] = r.embed_snr_db;
        j["payload_max_abs_err"] = r.payload_max_abs_err;
        j["payload_corr"] = r.payload_corr;
        j["clamped_count"] = r.clamped_count;
        j["modified_bin_count"] = r.modified_bin_count;
        j["mode"] = to_string(r.mode);
        j["k"] = r.k;
        j["awgn_snr_db"] = r.awgn_snr_db ? nlohmann::ordered_json(*r.awgn_snr_db)
                                         : nlohmann::ordered_json(nullptr);
        j["gain"] = r.gain ? nlohmann::ordered_json(*r.gain) : nlohmann::ordered_json(nullptr);
        j["requantize_bits"] = r.requantize_bits ? nlohmann::ordered_json(*r.requantize_bits)
                                                 : nlohmann::ordered_json(nullptr);
        j["seed"] = r.seed;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

}  // namespace wmark
