#include <irs_harq/analysis.hpp>
#include <irs_harq/random.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace irs_harq;

namespace
{

OutageQuery make_query(std::int64_t n, std::int64_t k, double rate, double gamma_bar)
{
    return {GammaBarParams::for_reflectors(n, gamma_bar), n, k, rate};
}

OutageQuery with_gamma_bar(OutageQuery q, double gamma_bar)
{
    q.params.gamma_bar = gamma_bar;
    return q;
}

/// Fraction of clt-mode chase-combining sessions in outage, drawn directly
/// from the Gaussian amplitude model (no simulator code involved).
double clt_outage_frequency(const OutageQuery& q, std::size_t trials, std::uint64_t seed)
{
    const double theta = std::exp2(q.rate) - 1.0;
    const double mean  = std::sqrt(q.params.lambda);
    const double sd    = std::sqrt(q.params.sigma2);
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> g(mean, sd);
    std::size_t outages = 0;
    for (std::size_t t = 0; t < trials; ++t)
    {
        double acc = 0.0;
        for (std::int64_t k = 0; k < q.rounds; ++k)
        {
            const double a = g(gen);
            acc += q.params.gamma_bar * a * a;
        }
        outages += acc < theta ? 1 : 0;
    }
    return static_cast<double>(outages) / static_cast<double>(trials);
}

} // namespace

TEST(OutageThreshold, Values)
{
    EXPECT_DOUBLE_EQ(outage_threshold(1.0), 1.0);
    EXPECT_DOUBLE_EQ(outage_threshold(3.0), 7.0);
    EXPECT_NEAR(outage_threshold(1e-12), 1e-12 * std::numbers::ln2, 1e-24);
    EXPECT_THROW(outage_threshold(0.0), domain_error);
}

TEST(SnrCdf, Endpoints)
{
    const auto q = make_query(32, 1, 1.0, 0.5);
    EXPECT_EQ(snr_cdf(0.0, q), 0.0);
    EXPECT_EQ(snr_cdf(std::numeric_limits<double>::infinity(), q), 1.0);
    EXPECT_NEAR(snr_cdf(1e6 * q.params.lambda, q), 1.0, 1e-15);
    EXPECT_THROW(snr_cdf(-1.0, q), domain_error);
}

TEST(SnrCdf, MatchesMonteCarloAtMean)
{
    constexpr std::int64_t N = 64;
    const auto q   = make_query(N, 1, 1.0, 1.0);
    const double x = q.params.lambda * q.params.gamma_bar;
    constexpr std::size_t n = 10'000'000;
    std::mt19937_64 gen(31);
    std::normal_distribution<double> g(std::sqrt(q.params.lambda), std::sqrt(q.params.sigma2));
    std::size_t below = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
        const double a = g(gen);
        below += a * a < x ? 1 : 0;
    }
    const double p_hat = static_cast<double>(below) / n;
    const double se    = std::sqrt(p_hat * (1 - p_hat) / n);
    EXPECT_NEAR(snr_cdf(x, q), p_hat, 3.0 * se);
}

TEST(SnrPdf, IntegratesToOne)
{
    for (std::int64_t N : {1, 8, 64, 256})
    {
        for (double gbar : {0.01, 1.0, 37.0})
        {
            const auto q  = make_query(N, 1, 1.0, gbar);
            // x = u^2 removes the x^{-1/2} singularity at the origin.
            auto integrand = [&](double u) { return u == 0.0 ? 0.0 : 2.0 * u * snr_pdf(u * u, q); };
            const double centre = std::sqrt(gbar * q.params.lambda);
            const double width  = std::sqrt(gbar * q.params.sigma2);
            double total = 0.0, lo = 0.0;
            for (double edge : {centre - 10 * width, centre - 3 * width, centre + 3 * width,
                                centre + 10 * width, centre + 45 * width})
            {
                if (edge <= lo)
                {
                    continue;
                }
                total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, lo, edge, 12, 1e-12);
                lo = edge;
            }
            EXPECT_NEAR(total, 1.0, 1e-9) << "N=" << N << " gbar=" << gbar;
        }
    }
}

TEST(SnrPdf, IsDerivativeOfCdf)
{
    for (std::int64_t N : {4, 64, 200})
    {
        const auto q = make_query(N, 1, 1.0, 2.0);
        const double centre = q.params.lambda * q.params.gamma_bar;
        const double spread = 2.0 * std::sqrt(q.params.lambda * q.params.sigma2) * q.params.gamma_bar;
        for (double z : {-2.0, -1.0, -0.3, 0.0, 0.5, 1.5, 2.5})
        {
            const double x = centre + z * spread;
            if (x <= 0.0)
            {
                continue;
            }
            const double h  = 1e-5 * x;
            const double fd = (snr_cdf(x + h, q) - snr_cdf(x - h, q)) / (2.0 * h);
            const double pdf = snr_pdf(x, q);
            EXPECT_NEAR(fd / pdf, 1.0, 1e-6) << "N=" << N << " z=" << z;
        }
    }
}

TEST(SnrPdf, InverseSquareRootAtOrigin)
{
    const auto q = make_query(2, 1, 1.0, 1.0);
    const double a = snr_pdf(1e-10, q) * std::sqrt(1e-10);
    const double b = snr_pdf(1e-14, q) * std::sqrt(1e-14);
    EXPECT_NEAR(a / b, 1.0, 1e-4);
    EXPECT_THROW(snr_pdf(0.0, q), domain_error);
}

TEST(OutageProbability, SingleRoundIsPerRoundCdfAtThreshold)
{
    std::mt19937_64 gen(1);
    std::uniform_int_distribution<std::int64_t> n_dist(1, 512);
    std::uniform_real_distribution<double> db(-20.0, 30.0);
    std::uniform_real_distribution<double> rate(0.05, 6.0);
    for (int i = 0; i < 500; ++i)
    {
        const auto q = make_query(n_dist(gen), 1, rate(gen), from_db(db(gen)));
        EXPECT_NEAR(outage_probability(q), snr_cdf(outage_threshold(q.rate), q), 1e-12);
    }
}

TEST(OutageProbability, VanishesAtHighSnr)
{
    const auto q = make_query(16, 2, 1.0, 1e12);
    EXPECT_LT(outage_probability(q), 1e-20);
}

TEST(OutageProbability, MatchesCltMonteCarloTwoRounds)
{
    auto q           = make_query(64, 2, 1.0, 1.0);
    const double gdb = required_snr_db(q, 1e-2);
    q                = with_gamma_bar(q, from_db(gdb));
    const double analytic = outage_probability(q);
    ASSERT_NEAR(analytic, 1e-2, 1e-5);
    constexpr std::size_t trials = 10'000'000;
    const double p_hat = clt_outage_frequency(q, trials, 8);
    const double se    = std::sqrt(p_hat * (1 - p_hat) / trials);
    EXPECT_NEAR(p_hat, analytic, 3.0 * se);
}

TEST(OutageProbability, MonotoneInParameters)
{
    std::mt19937_64 gen(4);
    std::uniform_int_distribution<std::int64_t> n_dist(1, 300);
    std::uniform_int_distribution<std::int64_t> k_dist(1, 6);
    std::uniform_real_distribution<double> db(-35.0, 10.0);
    std::uniform_real_distribution<double> rate(0.1, 4.0);
    for (int i = 0; i < 300; ++i)
    {
        const auto q   = make_query(n_dist(gen), k_dist(gen), rate(gen), from_db(db(gen)));
        const double p = outage_probability(q);
        ASSERT_GE(p, 0.0);
        ASSERT_LE(p, 1.0);
        if (p > 1e-300 && p < 1.0)
        {
            EXPECT_LT(outage_probability(with_gamma_bar(q, q.params.gamma_bar * 1.05)), p);
        }
        auto more_n = make_query(q.n_reflectors + 1, q.rounds, q.rate, q.params.gamma_bar);
        EXPECT_LE(outage_probability(more_n), p * (1 + 1e-12));
        auto more_k = q;
        more_k.rounds += 1;
        EXPECT_LE(outage_probability(more_k), p * (1 + 1e-12));
        auto more_r = q;
        more_r.rate += 0.1;
        EXPECT_GE(outage_probability(more_r), p * (1 - 1e-12));
    }
}

TEST(OutageProbability, PathlossDirectionFollowsDistanceProduct)
{
    for (double d : {3.0, 0.5})
    {
        SystemConfig cfg;
        cfg.n_reflectors = 32;
        cfg.max_rounds   = 2;
        cfg.dist_sr = cfg.dist_rd = d;
        cfg.tx_power = d > 1.0 ? 1e4 : 1e-3;
        double prev  = d > 1.0 ? 0.0 : 1.0;
        for (double n = 1.0; n <= 4.0; n += 0.25)
        {
            cfg.pathloss_exp = n;
            const double p   = outage_probability(OutageQuery::from_config(cfg));
            if (d > 1.0)
            {
                EXPECT_GE(p, prev) << "n=" << n;
            }
            else
            {
                EXPECT_LE(p, prev) << "n=" << n;
            }
            prev = p;
        }
    }
}

TEST(OutageProbability, RejectsInconsistentParams)
{
    auto q = make_query(16, 1, 1.0, 1.0);
    q.n_reflectors = 17;
    EXPECT_THROW(outage_probability(q), domain_error);
    q = make_query(16, 0, 1.0, 1.0);
    EXPECT_THROW(outage_probability(q), domain_error);
}

TEST(OutageAsymptotic, ConstantsForTwoRounds)
{
    const auto c = asymptotic_constants(2, 1.0);
    EXPECT_NEAR(c.c1, std::numbers::pi * std::numbers::pi / (16.0 - std::numbers::pi * std::numbers::pi), 1e-15);
    EXPECT_NEAR(c.c1, 1.6100, 1e-4);
    // K = 2: c2 = 16 Theta / (16 - pi^2) / (2^0 Gamma(1) 2).
    EXPECT_NEAR(c.c2, 8.0 / (16.0 - std::numbers::pi * std::numbers::pi), 1e-14);
}

TEST(OutageAsymptotic, RatioToExactTendsToOneAtHighSnr)
{
    auto q = make_query(16, 2, 1.0, 1.0);
    double prev_gap = std::numeric_limits<double>::infinity();
    double ratio    = 0.0;
    for (double gdb = 10.0; gdb <= 70.0; gdb += 10.0)
    {
        q           = with_gamma_bar(q, from_db(gdb));
        ratio       = outage_asymptotic(q) / outage_probability(q);
        const double gap = std::abs(ratio - 1.0);
        EXPECT_LT(gap, prev_gap) << "gbar_db=" << gdb;
        prev_gap = gap;
    }
    EXPECT_NEAR(ratio, 1.0, 0.05);
}

TEST(OutageAsymptotic, LogScaleIsLinearPlusLogInN)
{
    // log P = log c2 - (K/2) log gbar - c1 N - (K/2) log N exactly; fitting
    // [1, N, log N] must recover -c1 and -K/2.
    constexpr std::int64_t K = 3;
    const auto c = asymptotic_constants(K, outage_threshold(1.0));
    std::vector<double> ns, ys;
    for (std::int64_t n = 20; n <= 200; n += 10)
    {
        ns.push_back(static_cast<double>(n));
        ys.push_back(std::log(outage_asymptotic(make_query(n, K, 1.0, 100.0))));
    }
    // Normal equations for three columns.
    double a[3][4] = {};
    for (std::size_t i = 0; i < ns.size(); ++i)
    {
        const double row[3] = {1.0, ns[i], std::log(ns[i])};
        for (int r = 0; r < 3; ++r)
        {
            for (int col = 0; col < 3; ++col)
            {
                a[r][col] += row[r] * row[col];
            }
            a[r][3] += row[r] * ys[i];
        }
    }
    for (int p = 0; p < 3; ++p)
    {
        for (int r = p + 1; r < 3; ++r)
        {
            const double f = a[r][p] / a[p][p];
            for (int col = p; col < 4; ++col)
            {
                a[r][col] -= f * a[p][col];
            }
        }
    }
    double coef[3];
    for (int r = 2; r >= 0; --r)
    {
        double s = a[r][3];
        for (int col = r + 1; col < 3; ++col)
        {
            s -= a[r][col] * coef[col];
        }
        coef[r] = s / a[r][r];
    }
    EXPECT_NEAR(coef[1], -c.c1, 1e-6);
    EXPECT_NEAR(coef[2], -K / 2.0, 1e-4);
}

TEST(RequiredSnr, HitsTargetWithinTolerance)
{
    const auto q   = make_query(32, 2, 1.0, 1.0);
    const double g = required_snr_db(q, 1e-3);
    EXPECT_GT(outage_probability(with_gamma_bar(q, from_db(g - 1e-4))), 1e-3);
    EXPECT_LT(outage_probability(with_gamma_bar(q, from_db(g + 1e-4))), 1e-3);
}

TEST(RequiredSnr, MoreRoundsNeedLessSnrWithDiminishingReturns)
{
    for (std::int64_t N : {16, 64})
    {
        std::vector<double> need;
        for (std::int64_t K = 1; K <= 5; ++K)
        {
            need.push_back(required_snr_db(make_query(N, K, 1.0, 1.0), 1e-3));
        }
        for (std::size_t k = 1; k < need.size(); ++k)
        {
            EXPECT_LT(need[k], need[k - 1]);
        }
        for (std::size_t k = 2; k < need.size(); ++k)
        {
            EXPECT_GT(need[k - 2] - need[k - 1], need[k - 1] - need[k]) << "N=" << N;
        }
    }
}

TEST(RequiredSnr, AgreesWithDenseGridInterpolation)
{
    for (std::int64_t K : {1, 3})
    {
        const auto q = make_query(48, K, 2.0, 1.0);
        for (double target : {1e-2, 1e-4, 1e-7})
        {
            // Oracle: scan the closed form on a 0.001 dB grid and interpolate
            // log P linearly between the bracketing grid points. A 1 dB scan
            // first narrows the window.
            double start_db = -60.0;
            while (outage_probability(with_gamma_bar(q, from_db(start_db + 1.0))) >= target)
            {
                start_db += 1.0;
            }
            double prev_db = start_db;
            double prev_lp = std::log(outage_probability(with_gamma_bar(q, from_db(prev_db))));
            double oracle  = std::nan("");
            for (double db = prev_db + 1e-3; db < start_db + 2.0; db += 1e-3)
            {
                const double lp = std::log(outage_probability(with_gamma_bar(q, from_db(db))));
                if (lp < std::log(target))
                {
                    oracle = prev_db + (std::log(target) - prev_lp) / (lp - prev_lp) * (db - prev_db);
                    break;
                }
                prev_db = db;
                prev_lp = lp;
            }
            ASSERT_FALSE(std::isnan(oracle));
            EXPECT_NEAR(required_snr_db(q, target), oracle, 0.01) << "K=" << K << " target=" << target;
        }
    }
}

TEST(RequiredSnr, RejectsTargetsOutsideUnitInterval)
{
    const auto q = make_query(8, 1, 1.0, 1.0);
    EXPECT_THROW(required_snr_db(q, 0.0), domain_error);
    EXPECT_THROW(required_snr_db(q, 1.0), domain_error);
    EXPECT_THROW(required_snr_db(q, 1e-320), convergence_error);
}

TEST(Decibels, ConversionSpotChecks)
{
    EXPECT_DOUBLE_EQ(from_db(0.0), 1.0);
    EXPECT_DOUBLE_EQ(from_db(10.0), 10.0);
    EXPECT_DOUBLE_EQ(to_db(10.0), 10.0);
    EXPECT_DOUBLE_EQ(to_db(1.0), 0.0);
}
