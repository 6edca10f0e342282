///
/// \file mc_simulator.hpp
///
/// Monte Carlo estimate of HARQ chase-combining outage. Each trial is one
/// session: draw a fresh channel every round, accumulate the per-round SNR,
/// stop as soon as log2(1 + sum) reaches the rate, and count an outage if K
/// rounds were not enough.
///
#ifndef IRS_HARQ_MC_SIMULATOR_HPP
#define IRS_HARQ_MC_SIMULATOR_HPP

#include <irs_harq/analysis.hpp>
#include <irs_harq/channel_model.hpp>
#include <irs_harq/errors.hpp>
#include <irs_harq/random.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

namespace irs_harq
{

inline unsigned default_shard_count()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

struct McRunSpec
{
    SystemConfig cfg;
    FadingMode mode     = FadingMode::clt;
    std::uint64_t trials = 1'000'000;
    std::uint64_t seed   = 0;
    unsigned shards      = 1;
    /// Optional per-round gamma_bar (size K) replacing the link-budget value.
    std::vector<double> round_gamma_bar;

    void validate() const
    {
        cfg.validate();
        if (trials < 1000)
        {
            throw domain_error("McRunSpec: trials must be >= 1000");
        }
        if (shards < 1)
        {
            throw domain_error("McRunSpec: shards must be >= 1");
        }
        if (!round_gamma_bar.empty())
        {
            if (round_gamma_bar.size() != static_cast<std::size_t>(cfg.max_rounds))
            {
                throw domain_error("McRunSpec: round_gamma_bar must have max_rounds entries");
            }
            for (double g : round_gamma_bar)
            {
                if (!std::isfinite(g) || g < 0.0)
                {
                    throw domain_error("McRunSpec: round_gamma_bar entries must be >= 0");
                }
            }
        }
    }
};

struct McEstimate
{
    double p_hat            = 0.0;
    std::uint64_t trials    = 0;
    std::uint64_t outages   = 0;
    double std_err          = 0.0;
    double ci_low           = 0.0;
    double ci_high          = 0.0;
    double rounds_used_mean = 0.0;
    std::uint64_t seed      = 0;

    bool operator==(const McEstimate&) const = default;
};

struct SessionOutcome
{
    bool outage;
    int rounds_used;
};

/// Precomputed per-round parameters of one session.
struct SessionPlan
{
    std::int64_t n_reflectors;
    FadingMode mode;
    double threshold; ///< Theta
    std::vector<GammaBarParams> rounds;

    static SessionPlan from_spec(const McRunSpec& spec)
    {
        spec.validate();
        SessionPlan plan{spec.cfg.n_reflectors, spec.mode, outage_threshold(spec.cfg.rate), {}};
        const GammaBarParams base = avg_snr(spec.cfg);
        plan.rounds.assign(static_cast<std::size_t>(spec.cfg.max_rounds), base);
        for (std::size_t k = 0; k < spec.round_gamma_bar.size(); ++k)
        {
            plan.rounds[k].gamma_bar = spec.round_gamma_bar[k];
        }
        return plan;
    }
};

template <bit_source64 G>
SessionOutcome run_session(const SessionPlan& plan, G& gen)
{
    double accumulated = 0.0;
    int round          = 0;
    for (const GammaBarParams& params : plan.rounds)
    {
        ++round;
        accumulated += sample_round_snr(params, plan.n_reflectors, plan.mode, gen);
        // log2(1 + sum) >= R  <=>  sum >= 2^R - 1
        if (accumulated >= plan.threshold)
        {
            return {false, round};
        }
    }
    return {true, round};
}

template <bit_source64 G>
SessionOutcome run_session(const SystemConfig& cfg, FadingMode mode, G& gen)
{
    McRunSpec spec;
    spec.cfg  = cfg;
    spec.mode = mode;
    return run_session(SessionPlan::from_spec(spec), gen);
}

namespace detail
{

struct ShardTally
{
    std::uint64_t outages = 0;
    std::uint64_t rounds  = 0;
};

inline ShardTally run_trial_range(const SessionPlan& plan, std::uint64_t seed,
                                  std::uint64_t first, std::uint64_t last)
{
    ShardTally tally;
    for (std::uint64_t trial = first; trial < last; ++trial)
    {
        CounterStream stream(seed, trial);
        const SessionOutcome outcome = run_session(plan, stream);
        tally.outages += outcome.outage ? 1 : 0;
        tally.rounds += static_cast<std::uint64_t>(outcome.rounds_used);
    }
    return tally;
}

} // namespace detail

/// Estimate from an outage count: normal 95% interval clipped to [0, 1];
/// zero outages report [0, 3 / trials].
inline McEstimate make_estimate(std::uint64_t outages, std::uint64_t trials,
                                std::uint64_t rounds_total, std::uint64_t seed)
{
    McEstimate est;
    est.trials  = trials;
    est.outages = outages;
    est.seed    = seed;
    const double n = static_cast<double>(trials);
    est.p_hat   = static_cast<double>(outages) / n;
    est.std_err = std::sqrt(est.p_hat * (1.0 - est.p_hat) / n);
    if (outages == 0)
    {
        est.ci_low  = 0.0;
        est.ci_high = std::min(1.0, 3.0 / n);
    }
    else
    {
        constexpr double z95 = 1.959963984540054;
        est.ci_low  = std::max(0.0, est.p_hat - z95 * est.std_err);
        est.ci_high = std::min(1.0, est.p_hat + z95 * est.std_err);
    }
    est.rounds_used_mean = static_cast<double>(rounds_total) / n;
    return est;
}

/// Trial i always uses CounterStream(seed, i); shard s of S covers a
/// contiguous block of trials and the last shard takes the remainder. Shard
/// tallies are summed in shard order.
inline McEstimate run_outage_mc(const McRunSpec& spec)
{
    const SessionPlan plan = SessionPlan::from_spec(spec);
    const std::uint64_t shards =
        std::min<std::uint64_t>(spec.shards, spec.trials);
    const std::uint64_t block = spec.trials / shards;

    std::vector<detail::ShardTally> tallies(shards);
    {
        std::vector<std::jthread> workers;
        workers.reserve(shards);
        for (std::uint64_t s = 0; s < shards; ++s)
        {
            const std::uint64_t first = s * block;
            const std::uint64_t last  = s + 1 == shards ? spec.trials : first + block;
            workers.emplace_back([&plan, &tallies, &spec, s, first, last]
                                 { tallies[s] = detail::run_trial_range(plan, spec.seed, first, last); });
        }
    }

    std::uint64_t outages = 0;
    std::uint64_t rounds  = 0;
    for (const auto& t : tallies)
    {
        outages += t.outages;
        rounds += t.rounds;
    }
    return make_estimate(outages, spec.trials, rounds, spec.seed);
}

} // namespace irs_harq

#endif // IRS_HARQ_MC_SIMULATOR_HPP
