#include "wmark/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "wmark/errors.hpp"

namespace wmark {

namespace {

// Box-Muller over explicitly constructed uniforms; std::normal_distribution
// sequences are implementation-defined and would break cross-platform
// reproducibility of a given seed.
class GaussianGen {
public:
    explicit GaussianGen(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double ang = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(ang);
        have_spare_ = true;
        return r * std::cos(ang);
    }

private:
    double uniform01() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

    std::mt19937_64 rng_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// skip_awgn_if_silent: a component channel of a complex carrier may be
// all-zero (SNR relative to it is undefined), so it passes through.
std::vector<double> run_real_channel(std::span<const double> x, const ChannelSpec& spec,
                                     std::uint64_t sub_seed, bool skip_awgn_if_silent) {
    std::vector<double> y(x.begin(), x.end());
    if (spec.gain) y = apply_gain(y, *spec.gain);
    if (spec.requantize_bits) y = apply_requantize(y, *spec.requantize_bits);
    if (spec.awgn_snr_db) {
        double energy = 0.0;
        for (double v : y) energy += v * v;
        if (!(skip_awgn_if_silent && energy <= 0.0))
            y = apply_awgn(y, *spec.awgn_snr_db, sub_seed);
    }
    return y;
}

}  // namespace

void validate(const ChannelSpec& spec) {
    if (spec.requantize_bits && (*spec.requantize_bits < 4 || *spec.requantize_bits > 16))
        throw Error(ErrorKind::Usage, "requantize bits must be in [4, 16]");
    if (spec.gain && !(*spec.gain > 0.0))
        throw Error(ErrorKind::Usage, "gain must be positive");
    if (spec.awgn_snr_db && std::isnan(*spec.awgn_snr_db))
        throw Error(ErrorKind::Usage, "awgn snr is NaN");
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 step keyed by (seed, index)
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::vector<double> apply_awgn(std::span<const double> x, double snr_db, std::uint64_t seed) {
    if (std::isnan(snr_db)) throw Error(ErrorKind::Usage, "awgn snr is NaN");
    if (std::isinf(snr_db) && snr_db > 0.0) return {x.begin(), x.end()};

    double signal_energy = 0.0;
    for (double v : x) signal_energy += v * v;
    if (signal_energy <= 0.0)
        throw Error(ErrorKind::Usage, "awgn: zero-energy input has undefined SNR");

    GaussianGen gen(seed);
    std::vector<double> noise(x.size());
    double noise_energy = 0.0;
    for (double& v : noise) {
        v = gen.next();
        noise_energy += v * v;
    }
    if (noise_energy <= 0.0)
        throw Error(ErrorKind::Usage, "awgn: degenerate noise realization");

    // Scale the realized noise so the measured SNR hits the target exactly,
    // rather than relying on the expected noise power.
    const double target_ratio = std::pow(10.0, snr_db / 10.0);
    const double scale = std::sqrt(signal_energy / (noise_energy * target_ratio));

    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + scale * noise[i];
    return y;
}

std::vector<double> apply_gain(std::span<const double> x, double gain) {
    if (!(gain > 0.0)) throw Error(ErrorKind::Usage, "gain must be positive");
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = gain * x[i];
    return y;
}

std::vector<double> apply_requantize(std::span<const double> x, int bits) {
    if (bits < 4 || bits > 16) throw Error(ErrorKind::Usage, "requantize bits must be in [4, 16]");
    const double levels = static_cast<double>(1 << (bits - 1));
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double clamped = std::clamp(x[i], -1.0, 1.0);
        y[i] = std::round(clamped * levels) / levels;
    }
    return y;
}

AudioClip apply_channel(const AudioClip& clip, const ChannelSpec& spec) {
    validate(clip);
    validate(spec);
    AudioClip out = clip;
    if (spec.identity()) return out;
    out.samples = run_real_channel(clip.samples, spec, derive_seed(spec.seed, 0), false);
    return out;
}

ComplexClip apply_channel(const ComplexClip& clip, const ChannelSpec& spec) {
    validate(clip);
    validate(spec);
    ComplexClip out = clip;
    if (spec.identity()) return out;

    std::vector<double> re(clip.samples.size()), im(clip.samples.size());
    for (std::size_t i = 0; i < clip.samples.size(); ++i) {
        re[i] = clip.samples[i].real();
        im[i] = clip.samples[i].imag();
    }
    re = run_real_channel(re, spec, derive_seed(spec.seed, 0), true);
    im = run_real_channel(im, spec, derive_seed(spec.seed, 1), true);
    for (std::size_t i = 0; i < out.samples.size(); ++i) out.samples[i] = {re[i], im[i]};
    return out;
}

}  // namespace wmark
