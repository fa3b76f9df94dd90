#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wmark/channel.hpp"
#include "wmark/watermark.hpp"

namespace wmark {

/// Quantitative result of one embed -> attack -> extract trial.
struct MetricsReport {
    double embed_snr_db = 0.0;       // host vs watermarked (real parts)
    double payload_max_abs_err = 0.0;
    double payload_corr = 0.0;       // Pearson, in [-1, 1]
    std::size_t clamped_count = 0;
    std::size_t modified_bin_count = 0;

    // trial context
    EmbedMode mode = EmbedMode::Symmetric;
    std::size_t k = 0;
    std::optional<double> awgn_snr_db;
    std::optional<double> gain;
    std::optional<int> requantize_bits;
    std::uint64_t seed = 0;
};

/// Maximum SNR reported; identical signals hit this cap instead of +inf.
inline constexpr double kSnrCapDb = 200.0;

/// 10*log10(sum ref^2 / sum (ref-test)^2), capped at kSnrCapDb.
double snr_db(std::span<const double> ref, std::span<const double> test);

/// Pearson correlation coefficient. Errors if either input is constant.
double correlation(std::span<const double> a, std::span<const double> b);

/// Run embed -> attack -> extract once per (spec, trial) pair with
/// `trials` derived seeds per spec, and collect the metrics. Reports are
/// ordered by (spec index, trial index).
std::vector<MetricsReport> evaluate_pipeline(const AudioClip& host,
                                             const WatermarkPayload& payload,
                                             const EmbedConfig& cfg,
                                             std::span<const ChannelSpec> specs,
                                             std::size_t trials);

/// JSON array, one object per report, field names as in MetricsReport.
std::string reports_to_json(std::span<const MetricsReport> reports);

}  // namespace wmark
