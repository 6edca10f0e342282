///
/// \file analysis.hpp
///
/// Closed-form outage of chase-combining HARQ over the reflecting-surface link.
///
/// Under the Gaussian approximation of the aligned amplitude sum, one round's
/// SNR is gamma_bar * sigma^2 times a one-degree noncentral chi-square with
/// noncentrality lambda / sigma^2. Summing K i.i.d. rounds keeps the family,
/// giving K degrees of freedom and K times the noncentrality, hence
///
///     P_out(K) = 1 - Q_{K/2}( sqrt(N K) pi / sqrt(16 - pi^2),
///                             sqrt(16 Theta / (N (16 - pi^2) gamma_bar)) ),
///
/// with Theta = 2^R - 1.
///
#ifndef IRS_HARQ_ANALYSIS_HPP
#define IRS_HARQ_ANALYSIS_HPP

#include <irs_harq/channel_model.hpp>
#include <irs_harq/errors.hpp>
#include <irs_harq/specfun.hpp>

#include <cmath>
#include <cstdint>
#include <numbers>

namespace irs_harq
{

inline constexpr double pi2 = std::numbers::pi * std::numbers::pi;

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

/// Theta = 2^R - 1, the accumulated-SNR threshold for rate R.
inline double outage_threshold(double rate)
{
    if (!std::isfinite(rate) || rate <= 0.0)
    {
        throw domain_error("outage_threshold: rate must be positive and finite");
    }
    return std::expm1(rate * std::numbers::ln2);
}

struct OutageQuery
{
    GammaBarParams params;
    std::int64_t n_reflectors = 1;
    std::int64_t rounds       = 1;
    double rate               = 1.0;

    static OutageQuery from_config(const SystemConfig& cfg)
    {
        return {avg_snr(cfg), cfg.n_reflectors, cfg.max_rounds, cfg.rate};
    }

    void validate() const
    {
        if (rounds < 1)
        {
            throw domain_error("OutageQuery: rounds must be >= 1");
        }
        if (!std::isfinite(rate) || rate <= 0.0)
        {
            throw domain_error("OutageQuery: rate must be positive and finite");
        }
        if (!params.consistent_with(n_reflectors))
        {
            throw domain_error("OutageQuery: lambda/sigma2 do not match n_reflectors");
        }
        if (!std::isfinite(params.gamma_bar) || params.gamma_bar <= 0.0)
        {
            throw domain_error("OutageQuery: gamma_bar must be positive and finite");
        }
    }
};

/// Marcum arguments of the K-round closed form.
inline specfun::MarcumArgs<double> outage_marcum_args(const OutageQuery& q)
{
    q.validate();
    const double n     = static_cast<double>(q.n_reflectors);
    const double k     = static_cast<double>(q.rounds);
    const double theta = outage_threshold(q.rate);
    return {k / 2.0, std::sqrt(n * k) * std::numbers::pi / std::sqrt(16.0 - pi2),
            std::sqrt(16.0 * theta / (n * (16.0 - pi2) * q.params.gamma_bar))};
}

/// Per-round SNR CDF, 1 - Q_{1/2}(sqrt(lambda)/sigma, sqrt(x/gamma_bar)/sigma).
/// Only q.params is used.
inline double snr_cdf(double x, const OutageQuery& q)
{
    q.validate();
    if (std::isnan(x) || x < 0.0)
    {
        throw domain_error("snr_cdf: x must be non-negative");
    }
    if (std::isinf(x))
    {
        return 1.0;
    }
    const double sigma = std::sqrt(q.params.sigma2);
    const specfun::MarcumArgs<double> args{0.5, std::sqrt(q.params.lambda) / sigma,
                                           std::sqrt(x / q.params.gamma_bar) / sigma};
    return specfun::marcum_p(args);
}

/// Per-round SNR density
///     1/(2 sigma^2 gbar) (x/(gbar lambda))^{-1/4} exp(-(x + lambda gbar)/(2 gbar sigma^2))
///     * I_{-1/2}( sqrt(x lambda / (gbar sigma^4)) ),
/// evaluated in log space with the scaled Bessel function.
inline double snr_pdf(double x, const OutageQuery& q)
{
    q.validate();
    if (!std::isfinite(x) || x <= 0.0)
    {
        throw domain_error("snr_pdf: x must be positive and finite");
    }
    const double gbar   = q.params.gamma_bar;
    const double lambda = q.params.lambda;
    const double sigma2 = q.params.sigma2;
    const double z      = std::sqrt(x * lambda / gbar) / sigma2;
    const double log_f  = -std::log(2.0 * sigma2 * gbar) - 0.25 * std::log(x / (gbar * lambda)) -
                         (x + lambda * gbar) / (2.0 * gbar * sigma2) + z +
                         specfun::log_bessel_i_scaled(-0.5, z);
    return std::exp(log_f);
}

/// P_out after K chase-combined rounds.
inline double outage_probability(const OutageQuery& q)
{
    return specfun::marcum_p(outage_marcum_args(q));
}

struct AsymptoticConstants
{
    double c1;
    double c2;
};

/// c1 = K pi^2 / (2 (16 - pi^2)),
/// c2 = (16 Theta / (16 - pi^2))^{K/2} / (2^{K/2 - 1} Gamma(K/2) K).
inline AsymptoticConstants asymptotic_constants(std::int64_t rounds, double theta)
{
    if (rounds < 1 || !std::isfinite(theta) || theta <= 0.0)
    {
        throw domain_error("asymptotic_constants: need rounds >= 1 and theta > 0");
    }
    const double k  = static_cast<double>(rounds);
    const double c1 = k * pi2 / (2.0 * (16.0 - pi2));
    const double c2 = std::pow(16.0 * theta / (16.0 - pi2), k / 2.0) /
                      (std::pow(2.0, k / 2.0 - 1.0) * specfun::gamma_fn(k / 2.0) * k);
    return {c1, c2};
}

/// Large-N outage: exp(-c1 N) c2 / (N gamma_bar)^{K/2}. Computed in log space.
inline double outage_asymptotic(const OutageQuery& q)
{
    q.validate();
    const auto [c1, c2] = asymptotic_constants(q.rounds, outage_threshold(q.rate));
    const double n      = static_cast<double>(q.n_reflectors);
    const double half_k = static_cast<double>(q.rounds) / 2.0;
    return std::exp(-c1 * n + std::log(c2) - half_k * std::log(n * q.params.gamma_bar));
}

/// gamma_bar in dB at which outage_probability equals target_pout, by
/// bisection on the dB scale to a bracket width of 1e-4 dB. Only gamma_bar in
/// q.params is varied.
inline double required_snr_db(const OutageQuery& q, double target_pout)
{
    q.validate();
    if (!(target_pout > 0.0 && target_pout < 1.0))
    {
        throw domain_error("required_snr_db: target must lie in (0, 1)");
    }
    auto pout_at = [&](double db)
    {
        OutageQuery probe      = q;
        probe.params.gamma_bar = from_db(db);
        return outage_probability(probe);
    };

    constexpr double limit_db = 2000.0;
    double lo = -20.0;
    double hi = 40.0;
    while (pout_at(lo) <= target_pout)
    {
        lo -= 2.0 * (hi - lo);
        if (lo < -limit_db)
        {
            throw convergence_error("required_snr_db: target outage not bracketed from below");
        }
    }
    while (pout_at(hi) > target_pout)
    {
        hi += 2.0 * (hi - lo);
        if (hi > limit_db)
        {
            throw convergence_error("required_snr_db: target outage not bracketed from above");
        }
    }
    while (hi - lo > 1e-4)
    {
        const double mid = 0.5 * (lo + hi);
        if (pout_at(mid) > target_pout)
        {
            lo = mid;
        }
        else
        {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace irs_harq

#endif // IRS_HARQ_ANALYSIS_HPP
