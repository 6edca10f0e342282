///
/// \file channel_model.hpp
///
/// Link budget and per-round SNR sampling for a source reaching a destination
/// only through an N-element reflecting surface with ideal phase alignment.
/// Each reflected path is a product of two independent Rayleigh amplitudes,
/// so the received amplitude is a sum of N double-Rayleigh terms.
///
#ifndef IRS_HARQ_CHANNEL_MODEL_HPP
#define IRS_HARQ_CHANNEL_MODEL_HPP

#include <irs_harq/errors.hpp>
#include <irs_harq/random.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <string_view>

namespace irs_harq
{

/// Physical and protocol parameters of one link.
struct SystemConfig
{
    std::int64_t n_reflectors = 64; ///< N
    double tx_power     = 1.0;      ///< Ps, linear
    double noise_power  = 1.0;      ///< N0, linear
    double dist_sr      = 1.0;      ///< d1, source to surface
    double dist_rd      = 1.0;      ///< d2, surface to destination
    double pathloss_exp = 2.0;      ///< n
    double rate         = 1.0;      ///< R, bits/s/Hz
    std::int64_t max_rounds = 1;    ///< K

    void validate() const
    {
        auto positive_finite = [](double v) { return std::isfinite(v) && v > 0.0; };
        if (n_reflectors < 1)
        {
            throw domain_error("SystemConfig: n_reflectors must be >= 1");
        }
        if (max_rounds < 1)
        {
            throw domain_error("SystemConfig: max_rounds must be >= 1");
        }
        if (!positive_finite(tx_power) || !positive_finite(noise_power))
        {
            throw domain_error("SystemConfig: tx_power and noise_power must be positive");
        }
        if (!positive_finite(dist_sr) || !positive_finite(dist_rd))
        {
            throw domain_error("SystemConfig: distances must be positive");
        }
        if (!std::isfinite(pathloss_exp) || pathloss_exp < 1.0)
        {
            throw domain_error("SystemConfig: pathloss_exp must be >= 1");
        }
        if (!positive_finite(rate))
        {
            throw domain_error("SystemConfig: rate must be positive");
        }
    }
};

/// Mean of the aligned amplitude sum, squared: (N pi / 4)^2.
inline double cascade_lambda(std::int64_t n_reflectors)
{
    const double mean = static_cast<double>(n_reflectors) * std::numbers::pi / 4.0;
    return mean * mean;
}

/// Variance of the aligned amplitude sum: N (1 - pi^2 / 16).
inline double cascade_sigma2(std::int64_t n_reflectors)
{
    return static_cast<double>(n_reflectors) * (1.0 - std::numbers::pi * std::numbers::pi / 16.0);
}

/// Per-round average SNR and the noncentral chi-square shape it induces.
struct GammaBarParams
{
    double gamma_bar = 1.0;
    double lambda    = 0.0;
    double sigma2    = 0.0;

    static GammaBarParams for_reflectors(std::int64_t n_reflectors, double gamma_bar)
    {
        if (n_reflectors < 1)
        {
            throw domain_error("GammaBarParams: n_reflectors must be >= 1");
        }
        if (!std::isfinite(gamma_bar) || gamma_bar < 0.0)
        {
            throw domain_error("GammaBarParams: gamma_bar must be finite and non-negative");
        }
        return {gamma_bar, cascade_lambda(n_reflectors), cascade_sigma2(n_reflectors)};
    }

    bool consistent_with(std::int64_t n_reflectors) const
    {
        return n_reflectors >= 1 && lambda == cascade_lambda(n_reflectors) &&
               sigma2 == cascade_sigma2(n_reflectors);
    }
};

/// gamma_bar = Ps / (N0 d1^n d2^n), with lambda and sigma^2 from N.
inline GammaBarParams avg_snr(const SystemConfig& cfg)
{
    cfg.validate();
    const double log_loss = cfg.pathloss_exp * (std::log(cfg.dist_sr) + std::log(cfg.dist_rd));
    const double gamma_bar = cfg.tx_power / cfg.noise_power * std::exp(-log_loss);
    return GammaBarParams::for_reflectors(cfg.n_reflectors, gamma_bar);
}

//==============================================================================
// Sampling
//==============================================================================

enum class FadingMode
{
    exact, ///< sum of N double-Rayleigh products
    clt,   ///< Gaussian with the same mean and variance
};

inline FadingMode parse_fading_mode(std::string_view name)
{
    if (name == "exact")
    {
        return FadingMode::exact;
    }
    if (name == "clt")
    {
        return FadingMode::clt;
    }
    throw domain_error("unknown fading mode '" + std::string(name) + "'");
}

inline std::string_view to_string(FadingMode mode)
{
    return mode == FadingMode::exact ? "exact" : "clt";
}

/// Rayleigh amplitude with scale 1/sqrt(2) (unit mean power), by inversion.
template <bit_source64 G>
double sample_rayleigh(G& gen)
{
    return std::sqrt(-std::log(uniform_open_closed(gen)));
}

/// sum_{l=1}^{N} alpha_l beta_l with 2N independent unit-power Rayleigh draws,
/// alpha_l drawn before beta_l.
template <bit_source64 G>
double sample_cascade_sum(std::int64_t n_reflectors, G& gen)
{
    double sum = 0.0;
    for (std::int64_t l = 0; l < n_reflectors; ++l)
    {
        const double alpha = sample_rayleigh(gen);
        const double beta  = sample_rayleigh(gen);
        sum += alpha * beta;
    }
    return sum;
}

/// One round's received SNR. exact: gamma_bar * S^2 with S the sampled
/// amplitude sum; clt: gamma_bar * G^2 with G ~ Normal(sqrt(lambda), sigma^2),
/// not truncated.
template <bit_source64 G>
double sample_round_snr(const GammaBarParams& params, std::int64_t n_reflectors,
                        FadingMode mode, G& gen)
{
    switch (mode)
    {
    case FadingMode::exact:
    {
        const double s = sample_cascade_sum(n_reflectors, gen);
        return params.gamma_bar * s * s;
    }
    case FadingMode::clt:
    {
        const double g = std::sqrt(params.lambda) + std::sqrt(params.sigma2) * standard_normal(gen);
        return params.gamma_bar * g * g;
    }
    }
    throw domain_error("sample_round_snr: unknown fading mode");
}

} // namespace irs_harq

#endif // IRS_HARQ_CHANNEL_MODEL_HPP
