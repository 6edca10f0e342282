///
/// \file specfun.hpp
///
/// Gamma, regularized incomplete gamma, modified Bessel I of real order and
/// the generalized Marcum Q-function of real order.
///
#ifndef IRS_HARQ_SPECFUN_HPP
#define IRS_HARQ_SPECFUN_HPP

#include <irs_harq/errors.hpp>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

namespace irs_harq::specfun
{

inline constexpr std::uint64_t max_series_iterations = 1'000'000;

//==============================================================================
// Gamma
//==============================================================================

template <std::floating_point T>
T gamma_fn(T x)
{
    if (!std::isfinite(x) || x <= T(0))
    {
        throw domain_error("gamma_fn: argument must be positive and finite, got " +
                           std::to_string(x));
    }
    return std::tgamma(x);
}

//==============================================================================
// Regularized incomplete gamma functions
//==============================================================================
namespace detail
{

template <std::floating_point T>
void check_incomplete_gamma_args(T s, T x, const char* who)
{
    if (!std::isfinite(s) || s <= T(0))
    {
        throw domain_error(std::string(who) + ": shape must be positive and finite");
    }
    if (std::isnan(x) || x < T(0))
    {
        throw domain_error(std::string(who) + ": argument must be non-negative");
    }
}

//
// log of x^s e^{-x} / Gamma(s)
//
template <std::floating_point T>
T log_gamma_prefactor(T s, T x)
{
    return s * std::log(x) - x - std::lgamma(s);
}

//
// log P(s,x) by the power series
//   P(s,x) = x^s e^{-x} / Gamma(s+1) * sum_n x^n / ((s+1)...(s+n)).
// Converges for all x; used when x < s + 1.
//
template <std::floating_point T>
T log_lower_gamma_series(T s, T x)
{
    constexpr T eps = std::numeric_limits<T>::epsilon();
    T sum  = T(1);
    T term = T(1);
    for (std::uint64_t n = 1; n < max_series_iterations; ++n)
    {
        term *= x / (s + static_cast<T>(n));
        sum += term;
        if (term < sum * eps)
        {
            return log_gamma_prefactor(s, x) - std::log(s) + std::log(sum);
        }
    }
    throw convergence_error("incomplete gamma series did not converge");
}

//
// log Q(s,x) by the Legendre continued fraction (modified Lentz); used when
// x >= s + 1.
//
template <std::floating_point T>
T log_upper_gamma_cont_frac(T s, T x)
{
    constexpr T eps  = std::numeric_limits<T>::epsilon();
    constexpr T tiny = std::numeric_limits<T>::min() / eps;
    T b = x + T(1) - s;
    T c = T(1) / tiny;
    T d = T(1) / b;
    T f = d;
    for (std::uint64_t n = 1; n < max_series_iterations; ++n)
    {
        const T an = -static_cast<T>(n) * (static_cast<T>(n) - s);
        b += T(2);
        d = an * d + b;
        if (std::abs(d) < tiny)
        {
            d = tiny;
        }
        c = b + an / c;
        if (std::abs(c) < tiny)
        {
            c = tiny;
        }
        d           = T(1) / d;
        const T del = d * c;
        f *= del;
        if (std::abs(del - T(1)) < eps)
        {
            return log_gamma_prefactor(s, x) + std::log(f);
        }
    }
    throw convergence_error("incomplete gamma continued fraction did not converge");
}

} // namespace detail

/// log of the regularized lower incomplete gamma P(s,x); -inf at x = 0.
template <std::floating_point T>
T log_reg_lower_gamma(T s, T x)
{
    detail::check_incomplete_gamma_args(s, x, "log_reg_lower_gamma");
    if (x == T(0))
    {
        return -std::numeric_limits<T>::infinity();
    }
    if (std::isinf(x))
    {
        return T(0);
    }
    if (x < s + T(1))
    {
        return detail::log_lower_gamma_series(s, x);
    }
    return std::log1p(-std::exp(detail::log_upper_gamma_cont_frac(s, x)));
}

/// log of the regularized upper incomplete gamma Q(s,x); 0 at x = 0.
template <std::floating_point T>
T log_reg_upper_gamma(T s, T x)
{
    detail::check_incomplete_gamma_args(s, x, "log_reg_upper_gamma");
    if (x == T(0))
    {
        return T(0);
    }
    if (std::isinf(x))
    {
        return -std::numeric_limits<T>::infinity();
    }
    if (x < s + T(1))
    {
        return std::log1p(-std::exp(detail::log_lower_gamma_series(s, x)));
    }
    return detail::log_upper_gamma_cont_frac(s, x);
}

template <std::floating_point T>
T reg_lower_gamma(T s, T x)
{
    return std::exp(log_reg_lower_gamma(s, x));
}

/// Q(s,x) = Gamma(s,x) / Gamma(s).
template <std::floating_point T>
T reg_upper_gamma(T s, T x)
{
    return std::exp(log_reg_upper_gamma(s, x));
}

//==============================================================================
// Modified Bessel function of the first kind
//==============================================================================
namespace detail
{

template <std::floating_point T>
void check_bessel_args(T nu, T x)
{
    if (!std::isfinite(nu) || nu < T(-0.5))
    {
        throw domain_error("bessel_i: order must be finite and >= -1/2");
    }
    if (!std::isfinite(x) || x < T(0))
    {
        throw domain_error("bessel_i: argument must be finite and non-negative");
    }
}

//
// log(e^{-x} I_nu(x)) from the ascending series. Every term is positive for
// nu >= -1/2, so there is no cancellation; the running sum is rescaled to stay
// finite for large x.
//
template <std::floating_point T>
T log_bessel_i_scaled_series(T nu, T x)
{
    constexpr T eps     = std::numeric_limits<T>::epsilon();
    constexpr T rescale = T(1e250);
    const T quarter_x2  = x * x / T(4);
    T log_offset = nu * std::log(x / T(2)) - std::lgamma(nu + T(1)) - x;
    T term       = T(1);
    T sum        = T(1);
    for (std::uint64_t k = 0; k < max_series_iterations; ++k)
    {
        const T kk = static_cast<T>(k);
        term *= quarter_x2 / ((kk + T(1)) * (kk + nu + T(1)));
        sum += term;
        if (sum > rescale)
        {
            sum /= rescale;
            term /= rescale;
            log_offset += std::log(rescale);
        }
        if (term < sum * eps && kk + T(1) > quarter_x2 / (kk + nu + T(1)))
        {
            return log_offset + std::log(sum);
        }
    }
    throw convergence_error("bessel_i series did not converge");
}

//
// Hankel large-argument expansion of e^{-x} I_nu(x); the e^{-2x} branch is
// dropped, which is below double precision for the x where this is used.
//
template <std::floating_point T>
T log_bessel_i_scaled_asymptotic(T nu, T x)
{
    constexpr T eps = std::numeric_limits<T>::epsilon();
    const T mu      = T(4) * nu * nu;
    T term          = T(1);
    T sum           = T(1);
    for (int k = 1; k < 500; ++k)
    {
        const T odd  = static_cast<T>(2 * k - 1);
        const T next = -term * (mu - odd * odd) / (static_cast<T>(k) * T(8) * x);
        if (std::abs(next) > std::abs(term))
        {
            break;
        }
        term = next;
        sum += term;
        if (std::abs(term) < std::abs(sum) * eps)
        {
            break;
        }
    }
    return std::log(sum) - T(0.5) * std::log(T(2) * std::numbers::pi_v<T> * x);
}

template <std::floating_point T>
bool use_bessel_asymptotic(T nu, T x)
{
    return x > T(40) && x > T(2) * nu * nu;
}

} // namespace detail

/// log(e^{-x} I_nu(x)). Finite for every valid argument except x = 0 with
/// nu != 0 (returns -inf for nu > 0, +inf for nu < 0).
template <std::floating_point T>
T log_bessel_i_scaled(T nu, T x)
{
    detail::check_bessel_args(nu, x);
    if (x == T(0))
    {
        if (nu == T(0))
        {
            return T(0);
        }
        return nu > T(0) ? -std::numeric_limits<T>::infinity()
                         : std::numeric_limits<T>::infinity();
    }
    if (detail::use_bessel_asymptotic(nu, x))
    {
        return detail::log_bessel_i_scaled_asymptotic(nu, x);
    }
    return detail::log_bessel_i_scaled_series(nu, x);
}

/// e^{-x} I_nu(x), finite for large x where I_nu itself overflows.
template <std::floating_point T>
T bessel_i_scaled(T nu, T x)
{
    return std::exp(log_bessel_i_scaled(nu, x));
}

/// I_nu(x) for nu >= -1/2, x >= 0. Overflows to +inf beyond x ~ 709.
template <std::floating_point T>
T bessel_i(T nu, T x)
{
    return std::exp(log_bessel_i_scaled(nu, x) + x);
}

//==============================================================================
// Generalized Marcum Q-function
//==============================================================================

/// Arguments of Q_m(p, q): order m >= 1/2, p >= 0, q >= 0.
template <std::floating_point T>
struct MarcumArgs
{
    T m;
    T p;
    T q;

    void validate() const
    {
        if (!std::isfinite(m) || !std::isfinite(p) || !std::isfinite(q))
        {
            throw domain_error("marcum_q: arguments must be finite");
        }
        if (m < T(0.5))
        {
            throw domain_error("marcum_q: order must be >= 1/2");
        }
        if (p < T(0) || q < T(0))
        {
            throw domain_error("marcum_q: arguments p and q must be non-negative");
        }
    }
};

template <std::floating_point T>
MarcumArgs(T, T, T) -> MarcumArgs<T>;

/// Both tails of the noncentral chi-square law behind Q_m(p, q).
template <std::floating_point T>
struct MarcumTails
{
    T lower; ///< 1 - Q_m(p,q)
    T upper; ///< Q_m(p,q)
};

namespace detail
{

//
// Poisson mixture
//   Q_m(p,q) = sum_j w_j Q(m+j, q^2/2),  1 - Q_m(p,q) = sum_j w_j P(m+j, q^2/2),
// w_j = e^{-p^2/2} (p^2/2)^j / j!. The summands are log-concave in j, so once
// they decrease in a direction they keep decreasing; the sum starts at the
// Poisson mode and walks outward in both directions until the bounded
// remainder drops below rel_tol of the running sum. Terms are formed in log
// space so tiny weights times tiny tails stay representable.
//
template <std::floating_point T>
T marcum_poisson_sum(T m, T lambda, T y, bool lower_tail)
{
    constexpr T rel_tol = T(1e-15);
    const T log_lambda  = std::log(lambda);
    auto log_weight     = [&](std::uint64_t j)
    {
        const T jj = static_cast<T>(j);
        return -lambda + jj * log_lambda - std::lgamma(jj + T(1));
    };
    auto log_tail = [&](std::uint64_t j)
    {
        const T a = m + static_cast<T>(j);
        return lower_tail ? log_reg_lower_gamma(a, y) : log_reg_upper_gamma(a, y);
    };

    const auto mode = static_cast<std::uint64_t>(std::floor(lambda));
    std::uint64_t iterations = 0;
    T sum = T(0);

    // Backward from the mode: remaining terms j' < j are each <= t_j once
    // the sequence decreases, so j * t_j bounds the remainder.
    T previous = T(-1);
    for (std::uint64_t j = mode + 1; j-- > 0;)
    {
        if (++iterations > max_series_iterations)
        {
            throw convergence_error("marcum_q: series exceeded the iteration cap");
        }
        const T term = std::exp(log_weight(j) + log_tail(j));
        sum += term;
        const bool decreasing = previous >= T(0) && term <= previous;
        if (decreasing && sum > T(0) && static_cast<T>(j) * term <= rel_tol * sum)
        {
            break;
        }
        previous = term;
    }

    // Forward past the mode: w_{j+1}/w_j = lambda/(j+1) < 1. For the lower
    // tail the gamma factor also decreases, giving a geometric bound on t_j;
    // for the upper tail the gamma factor is <= 1 so the Poisson tail bounds it.
    previous = T(-1);
    for (std::uint64_t j = mode + 1;; ++j)
    {
        if (++iterations > max_series_iterations)
        {
            throw convergence_error("marcum_q: series exceeded the iteration cap");
        }
        const T lw   = log_weight(j);
        const T term = std::exp(lw + log_tail(j));
        sum += term;
        const T ratio = lambda / static_cast<T>(j + 1);
        if (ratio < T(1) && previous >= T(0) && term <= previous)
        {
            const T bound_base = lower_tail ? term : std::exp(lw);
            const T remainder  = bound_base * ratio / (T(1) - ratio);
            if (remainder <= rel_tol * sum)
            {
                break;
            }
        }
        previous = term;
    }
    return sum;
}

} // namespace detail

/// Both tails of Q_m(p,q). The tail that is small is summed directly, the
/// other is its complement, so the small one keeps relative accuracy.
template <std::floating_point T>
MarcumTails<T> marcum_tails(const MarcumArgs<T>& args)
{
    args.validate();
    const T m = args.m;
    const T y = args.q * args.q / T(2);
    const T lambda = args.p * args.p / T(2);

    if (y == T(0))
    {
        return {T(0), T(1)};
    }
    if (lambda == T(0))
    {
        const T lower = reg_lower_gamma(m, y);
        const T upper = reg_upper_gamma(m, y);
        return {lower, upper};
    }

    const bool lower_is_small = y < m + lambda;
    T small = detail::marcum_poisson_sum(m, lambda, y, lower_is_small);
    if (!std::isfinite(small))
    {
        throw convergence_error("marcum_q: non-finite partial sum");
    }
    small = std::clamp(small, T(0), T(1));
    if (lower_is_small)
    {
        return {small, T(1) - small};
    }
    return {T(1) - small, small};
}

/// Q_m(p,q) = Pr{X > q^2}, X noncentral chi-square with 2m degrees of
/// freedom and noncentrality p^2.
template <std::floating_point T>
T marcum_q(const MarcumArgs<T>& args)
{
    return marcum_tails(args).upper;
}

/// 1 - Q_m(p,q), accurate in relative terms when it is tiny.
template <std::floating_point T>
T marcum_p(const MarcumArgs<T>& args)
{
    return marcum_tails(args).lower;
}

/// Leading small-q expansion
///   Q_m(p,q) ~ 1 - q^{2m} / (2^m Gamma(m) m) exp(-p^2/2).
/// Clamped at 0 for large q where the two-term form goes negative.
template <std::floating_point T>
T marcum_q_asymptotic_small_q(const MarcumArgs<T>& args)
{
    args.validate();
    if (args.q == T(0))
    {
        return T(1);
    }
    const T m = args.m;
    const T log_term = T(2) * m * std::log(args.q) - m * std::numbers::ln2_v<T> -
                       std::lgamma(m) - std::log(m) - args.p * args.p / T(2);
    return std::max(T(0), T(1) - std::exp(log_term));
}

} // namespace irs_harq::specfun

#endif // IRS_HARQ_SPECFUN_HPP
