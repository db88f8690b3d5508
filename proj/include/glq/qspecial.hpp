#pragma once

// Scalar q-special functions: q-numbers, q-factorials, q-Pochhammer symbols of
// finite, negative and infinite order, the q-exponential and the general
// bilateral basic hypergeometric series r_psi_s.
//
// Convention: (a;q)_n = prod_{j=0}^{n-1} (1 - a q^j) for n >= 0 and
// (a;q)_n = 1 / (a q^n; q)_{-n} for n < 0.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "glq/errors.hpp"

namespace glq {

using cplx = std::complex<double>;

/// The real deformation parameter q in (0,1) together with nu = 1/(1-q).
class DeformationParameter
{
public:
    explicit DeformationParameter(double q)
        : q_(q)
    {
        if (!(q > 0.0 && q < 1.0))
            throw ContractViolation("deformation parameter q must lie in (0,1), got " + std::to_string(q));
        nu_ = 1.0 / (1.0 - q_);
    }

    double q() const noexcept { return q_; }
    double nu() const noexcept { return nu_; }
    double sqrt_q() const noexcept { return std::sqrt(q_); }
    double log_q() const noexcept { return std::log(q_); }

    /// q^x for real x.
    double pow(double x) const { return std::pow(q_, x); }

    friend bool operator==(const DeformationParameter&, const DeformationParameter&) = default;

private:
    double q_;
    double nu_;
};

/// Value of a (possibly infinite) sum or product together with how it was obtained.
struct SeriesValue
{
    cplx value{0.0, 0.0};
    long terms_used = 0;
    double tail_estimate = 0.0;
    bool converged = false;
};

/// Bilateral sums keep per-direction diagnostics.
struct BilateralSeriesValue : SeriesValue
{
    long forward_terms = 0;   // terms with n > 0
    long backward_terms = 0;  // terms with n < 0
    double forward_tail = 0.0;
    double backward_tail = 0.0;
};

class PochhammerOrder
{
public:
    static PochhammerOrder finite(int n) { return PochhammerOrder(false, n); }
    static PochhammerOrder infinite() { return PochhammerOrder(true, 0); }

    bool is_infinite() const noexcept { return infinite_; }
    int n() const noexcept { return n_; }

private:
    PochhammerOrder(bool inf, int n) : infinite_(inf), n_(n) {}
    bool infinite_;
    int n_;
};

namespace detail {

/// A factor 1 - x counts as zero when it is within a few ulps of x's scale.
inline bool vanishes(cplx factor, cplx x)
{
    constexpr double eps = std::numeric_limits<double>::epsilon();
    return std::abs(factor) <= 16.0 * eps * std::max(1.0, std::abs(x));
}

inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

} // namespace detail

/// Principal square root with sqrt(-x) = i sqrt(x) for real x > 0, independent
/// of the sign of a zero imaginary part.
inline cplx principal_sqrt(cplx z)
{
    if (z.imag() == 0.0) {
        if (z.real() >= 0.0)
            return {std::sqrt(z.real()), 0.0};
        return {0.0, std::sqrt(-z.real())};
    }
    return std::sqrt(z);
}

/// z^n for integer n by repeated multiplication.
inline cplx ipow(cplx z, int n)
{
    cplx r{1.0, 0.0};
    cplx b = n < 0 ? 1.0 / z : z;
    for (int k = 0, e = n < 0 ? -n : n; k < e; ++k)
        r *= b;
    return r;
}

/// [x] = (q^x - 1)/(q - 1)
inline double q_number(const DeformationParameter& dp, double x)
{
    return (dp.pow(x) - 1.0) / (dp.q() - 1.0);
}

/// [n]! = [n][n-1]...[1], [0]! = 1
inline double q_factorial(const DeformationParameter& dp, int n)
{
    if (n < 0)
        throw ContractViolation("q_factorial requires n >= 0, got " + std::to_string(n));
    double p = 1.0;
    for (int k = 1; k <= n; ++k)
        p *= q_number(dp, k);
    return p;
}

/// Finite-order Pochhammer (a;q)_n, n of either sign.
inline cplx q_pochhammer(cplx a, const DeformationParameter& dp, int n)
{
    if (n >= 0) {
        cplx p{1.0, 0.0};
        for (int j = 0; j < n; ++j)
            p *= 1.0 - a * dp.pow(j);
        return p;
    }
    // (a;q)_n = 1 / prod_{i=n}^{-1} (1 - a q^i)
    cplx den{1.0, 0.0};
    for (int i = n; i <= -1; ++i) {
        const cplx x = a * dp.pow(i);
        const cplx f = 1.0 - x;
        if (detail::vanishes(f, x))
            throw PoleError("(a;q)_" + std::to_string(n) + " has a vanishing denominator factor at q^" +
                            std::to_string(i));
        den *= f;
    }
    return 1.0 / den;
}

/// (a;q)_n for finite n, or (a;q)_inf truncated at the first j with |a| q^j < tol q.
inline SeriesValue q_pochhammer(cplx a, const DeformationParameter& dp, PochhammerOrder order, double tol)
{
    SeriesValue out;
    if (!order.is_infinite()) {
        out.value = q_pochhammer(a, dp, order.n());
        out.terms_used = std::abs(order.n());
        out.converged = true;
        return out;
    }
    if (!(tol > 0.0))
        throw ContractViolation("q_pochhammer: tol must be positive");
    const double cut = tol * dp.q();
    cplx p{1.0, 0.0};
    long j = 0;
    double mag = std::abs(a);
    while (mag >= cut) {
        p *= 1.0 - a * dp.pow(static_cast<double>(j));
        ++j;
        mag = std::abs(a) * dp.pow(static_cast<double>(j));
    }
    out.value = p;
    out.terms_used = j;
    out.tail_estimate = mag;
    out.converged = true;
    return out;
}

struct ShiftIdentity
{
    cplx lhs;
    cplx rhs;
};

/// Both sides of (a q^{-m}; q)_n = (-a)^m q^{-m(m+1)/2} (q/a; q)_m (a; q)_{n-m},
/// each evaluated by its own products.
inline ShiftIdentity verify_shift_identity(cplx a, const DeformationParameter& dp, int m, int n)
{
    if (a == cplx{0.0, 0.0})
        throw ZeroArgumentError("verify_shift_identity: a must be nonzero");
    if (m < 0 || n < 0)
        throw ContractViolation("verify_shift_identity: m and n must be nonnegative");
    ShiftIdentity out;
    out.lhs = q_pochhammer(a * dp.pow(-m), dp, n);
    out.rhs = ipow(-a, m) * dp.pow(-0.5 * m * (m + 1)) * q_pochhammer(dp.q() / a, dp, m) *
              q_pochhammer(a, dp, n - m);
    return out;
}

/// e_q(x) = sum x^n / [n]!, valid for |x| < nu.
///
/// Summation stops once the geometric tail bound |t_n| rho/(1-rho), with
/// rho = |x|/[n+1] (decreasing in n), drops below tol * max(1, |partial|).
inline SeriesValue q_exp(const DeformationParameter& dp, cplx x, double tol, long max_terms = 10'000'000)
{
    if (!(tol > 0.0))
        throw ContractViolation("q_exp: tol must be positive");
    const double ax = std::abs(x);
    if (!(ax < dp.nu()))
        throw DivergenceError("q_exp: |x| = " + std::to_string(ax) + " outside the radius of convergence nu = " +
                              std::to_string(dp.nu()));
    SeriesValue out;
    out.value = 1.0;
    out.terms_used = 1;
    if (ax == 0.0) {
        out.converged = true;
        return out;
    }
    cplx term{1.0, 0.0};
    for (long n = 0; n + 1 < max_terms; ++n) {
        term *= x / q_number(dp, static_cast<double>(n + 1));
        out.value += term;
        out.terms_used = n + 2;
        const double rho = ax / q_number(dp, static_cast<double>(n + 2));
        if (rho < 1.0) {
            const double tail = std::abs(term) * rho / (1.0 - rho);
            out.tail_estimate = tail;
            if (tail <= tol * std::max(1.0, std::abs(out.value))) {
                out.converged = true;
                return out;
            }
        } else {
            out.tail_estimate = std::numeric_limits<double>::infinity();
        }
    }
    return out;
}

namespace detail {

// Ratio t_{n+1}/t_n of consecutive bilateral terms. Throws on a vanishing b-factor.
inline cplx psi_forward_ratio(std::span<const cplx> a, std::span<const cplx> b, const DeformationParameter& dp,
                              cplx z, int n)
{
    const double qn = dp.pow(n);
    cplx r = z;
    for (const cplx ai : a) {
        const cplx x = ai * qn;
        r *= vanishes(1.0 - x, x) ? cplx{0.0, 0.0} : 1.0 - x;
    }
    for (const cplx bj : b) {
        const cplx x = bj * qn;
        const cplx f = 1.0 - x;
        if (vanishes(f, x))
            throw PoleError("bilateral_psi: (b;q)_n vanishes at n = " + std::to_string(n + 1));
        r /= f;
    }
    const int sr = static_cast<int>(b.size()) - static_cast<int>(a.size());
    r *= std::pow(-qn, sr);
    return r;
}

// Ratio t_{n-1}/t_n. Throws on a vanishing a-factor (pole of (a;q)_{n-1}).
inline cplx psi_backward_ratio(std::span<const cplx> a, std::span<const cplx> b, const DeformationParameter& dp,
                               cplx z, int n)
{
    const double qn = dp.pow(n - 1);
    cplx r = 1.0 / z;
    for (const cplx bj : b) {
        const cplx x = bj * qn;
        r *= vanishes(1.0 - x, x) ? cplx{0.0, 0.0} : 1.0 - x;
    }
    for (const cplx ai : a) {
        const cplx x = ai * qn;
        const cplx f = 1.0 - x;
        if (vanishes(f, x))
            throw PoleError("bilateral_psi: (a;q)_n has a pole at n = " + std::to_string(n - 1));
        r /= f;
    }
    const int rs = static_cast<int>(a.size()) - static_cast<int>(b.size());
    r *= std::pow(-qn, rs);
    return r;
}

} // namespace detail

/// Single term of r_psi_s at index n, computed from Pochhammer products directly.
inline cplx bilateral_psi_term(std::span<const cplx> a, std::span<const cplx> b, const DeformationParameter& dp,
                               cplx z, int n)
{
    cplx t = ipow(z, n);
    for (const cplx ai : a)
        t *= q_pochhammer(ai, dp, n);
    for (const cplx bj : b) {
        // 1/(b;q)_n; for n < 0 this is the finite product (b q^n; q)_{-n}.
        if (n < 0)
            t *= q_pochhammer(bj * dp.pow(n), dp, -n);
        else {
            const cplx d = q_pochhammer(bj, dp, n);
            if (d == cplx{0.0, 0.0})
                throw PoleError("bilateral_psi_term: (b;q)_n vanishes at n = " + std::to_string(n));
            t /= d;
        }
    }
    const int sr = static_cast<int>(b.size()) - static_cast<int>(a.size());
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    t *= std::pow(sign * dp.pow(0.5 * n * (n - 1)), sr);
    return t;
}

/// r_psi_s(a; b; q, z) = sum_{n in Z} prod (a_i;q)_n / prod (b_j;q)_n ((-1)^n q^{n(n-1)/2})^{s-r} z^n
///
/// Both directions are grown from n = 0 with independent tail monitors. A
/// direction is closed once its tail bound stays below tol/2 * max(1, |sum|)
/// for two consecutive terms, or once a term vanishes exactly (a zero factor
/// persists in every later term). Terms that overflow, or that are still
/// growing when max_terms is reached, raise NonConvergenceError; otherwise an
/// unfinished sum is returned with converged = false.
inline BilateralSeriesValue bilateral_psi(std::span<const cplx> a, std::span<const cplx> b,
                                          const DeformationParameter& dp, cplx z, double tol, int max_terms)
{
    if (z == cplx{0.0, 0.0})
        throw ZeroArgumentError("bilateral_psi: z must be nonzero");
    if (b.size() < a.size())
        throw ContractViolation("bilateral_psi: only s >= r is supported");
    if (!(tol > 0.0))
        throw ContractViolation("bilateral_psi: tol must be positive");

    struct Direction
    {
        cplx term{1.0, 0.0};
        cplx sum{0.0, 0.0};
        long count = 0;
        int passes = 0;
        bool done = false;
        double tail = std::numeric_limits<double>::infinity();
        double half_mark = 0.0;  // |term| at count == max_terms/2
    };
    Direction fwd, bwd;
    cplx total{1.0, 0.0};

    auto step = [&](Direction& d, bool forward) {
        const int n = forward ? static_cast<int>(d.count) : -static_cast<int>(d.count);
        const cplx ratio = forward ? detail::psi_forward_ratio(a, b, dp, z, n)
                                   : detail::psi_backward_ratio(a, b, dp, z, n);
        d.term *= ratio;
        ++d.count;
        if (!detail::finite(d.term) || std::abs(d.term) > 1e250)
            throw NonConvergenceError(std::string("bilateral_psi: ") + (forward ? "n -> +inf" : "n -> -inf") +
                                      " terms grow without bound (|t| > 1e250 after " + std::to_string(d.count) +
                                      " terms)");
        d.sum += d.term;
        if (d.count == max_terms / 2)
            d.half_mark = std::abs(d.term);
        if (d.term == cplx{0.0, 0.0}) {
            d.tail = 0.0;
            d.done = true;
            return;
        }
        const int next = forward ? n + 1 : n - 1;
        const double rho_next = std::abs(forward ? detail::psi_forward_ratio(a, b, dp, z, next)
                                                 : detail::psi_backward_ratio(a, b, dp, z, next));
        const double scale = std::max(1.0, std::abs(total + d.term));
        if (rho_next < 1.0) {
            d.tail = std::abs(d.term) * rho_next / (1.0 - rho_next);
            if (d.tail <= 0.5 * tol * scale) {
                if (++d.passes >= 2)
                    d.done = true;
                return;
            }
        } else {
            d.tail = std::numeric_limits<double>::infinity();
        }
        d.passes = 0;
    };

    for (int k = 0; k < max_terms && !(fwd.done && bwd.done); ++k) {
        if (!fwd.done) {
            step(fwd, true);
            total = 1.0 + fwd.sum + bwd.sum;
        }
        if (!bwd.done) {
            step(bwd, false);
            total = 1.0 + fwd.sum + bwd.sum;
        }
    }

    BilateralSeriesValue out;
    out.value = total;
    out.forward_terms = fwd.count;
    out.backward_terms = bwd.count;
    out.forward_tail = fwd.count ? fwd.tail : std::numeric_limits<double>::infinity();
    out.backward_tail = bwd.count ? bwd.tail : std::numeric_limits<double>::infinity();
    out.terms_used = 1 + fwd.count + bwd.count;
    out.tail_estimate = out.forward_tail + out.backward_tail;
    out.converged = fwd.done && bwd.done && out.tail_estimate <= tol * std::max(1.0, std::abs(total));

    if (!out.converged && max_terms >= 8) {
        for (const auto* d : {&fwd, &bwd}) {
            if (!d->done && d->half_mark > 0.0 && std::abs(d->term) >= d->half_mark)
                throw NonConvergenceError(std::string("bilateral_psi: ") +
                                          (d == &fwd ? "n -> +inf" : "n -> -inf") +
                                          " terms are not decaying after " + std::to_string(d->count) + " terms");
        }
    }
    return out;
}

inline BilateralSeriesValue bilateral_psi(std::initializer_list<cplx> a, std::initializer_list<cplx> b,
                                          const DeformationParameter& dp, cplx z, double tol, int max_terms)
{
    return bilateral_psi(std::span<const cplx>(a.begin(), a.size()), std::span<const cplx>(b.begin(), b.size()), dp,
                         z, tol, max_terms);
}

} // namespace glq
