#pragma once

// Continuous-spectrum family of creator eigenstates on (lambda, mu) in (0,inf)^2,
// restricted to the pole-free region lambda < mu/q:
//   amplitude  lambda^{delta_s} mu^{eps} / sqrt((q lambda/mu; q)_inf (-q mu/nu; q)_inf)
//   norm       integral of lambda^{2Re d+1} mu^{2Re eps+1} |h(lambda)|^2
//                          / ((q lambda/mu; q)_inf (-q mu/nu; q)_inf)

#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "glq/qspecial.hpp"

namespace glq::lattice_rep {

/// h with h(q lambda) = h(lambda).
class LogPeriodic
{
public:
    static LogPeriodic constant(cplx c = 1.0)
    {
        return LogPeriodic([c](double) { return c; }, std::abs(c));
    }

    /// sum_s c_s lambda^{2 pi i s / ln q}
    static LogPeriodic fourier(const DeformationParameter& dp, std::vector<std::pair<int, cplx>> modes)
    {
        double bound = 0.0;
        for (const auto& [_, c] : modes)
            bound += std::abs(c);
        const double w = 2.0 * std::numbers::pi / dp.log_q();
        return LogPeriodic(
            [modes = std::move(modes), w](double lambda) {
                cplx v{0.0, 0.0};
                for (const auto& [s, c] : modes)
                    v += c * std::exp(cplx{0.0, w * s * std::log(lambda)});
                return v;
            },
            bound);
    }

    cplx operator()(double lambda) const { return f_(lambda); }
    double bound() const noexcept { return bound_; }

    /// max |h(q lambda) - h(lambda)| over the given sample points.
    double periodicity_defect(const DeformationParameter& dp, const std::vector<double>& lambdas) const
    {
        double r = 0.0;
        for (double l : lambdas)
            r = std::max(r, std::abs(f_(dp.q() * l) - f_(l)));
        return r;
    }

private:
    LogPeriodic(std::function<cplx(double)> f, double bound) : f_(std::move(f)), bound_(bound) {}
    std::function<cplx(double)> f_;
    double bound_;
};

struct ContinuumParams
{
    cplx z1;
    cplx z2;
    cplx d;      // -ln(q z1)/ln q
    cplx eps;    // ln((z1/(q z2)) sqrt(nu))/ln q
    double tau;  // ln(1/(q|z1|^2))/ln q
    double xi;   // ln(|z1|^2 nu/(q^2 |z2|^2))/ln q
    double log_q;

    /// d + 2 pi i s / ln q
    cplx delta(int s) const { return d + cplx{0.0, 2.0 * std::numbers::pi * s / log_q}; }

    bool convergent() const { return d.real() > -1.0 && eps.real() > -1.0; }
};

inline ContinuumParams continuum_params(const DeformationParameter& dp, cplx z1, cplx z2)
{
    if (z1 == cplx{0.0, 0.0} || z2 == cplx{0.0, 0.0})
        throw ZeroArgumentError("continuum_params: z1 and z2 must be nonzero");
    const double lq = dp.log_q();
    const double q = dp.q();
    ContinuumParams p{};
    p.z1 = z1;
    p.z2 = z2;
    p.d = -std::log(q * z1) / lq;
    p.eps = std::log(z1 / (q * z2) * std::sqrt(dp.nu())) / lq;
    p.tau = std::log(1.0 / (q * std::norm(z1))) / lq;
    p.xi = std::log(std::norm(z1) * dp.nu() / (q * q * std::norm(z2))) / lq;
    p.log_q = lq;
    return p;
}

namespace detail {

inline double inf_poch(double a, const DeformationParameter& dp)
{
    return q_pochhammer(a, dp, PochhammerOrder::infinite(), 1e-18).value.real();
}

} // namespace detail

/// Norm integrand at (lambda, mu); meaningful (and nonnegative) for lambda < mu/q.
inline double continuum_integrand(const DeformationParameter& dp, const ContinuumParams& p, const LogPeriodic& h,
                                  double lambda, double mu)
{
    const double num = std::pow(lambda, 2.0 * p.d.real() + 1.0) * std::pow(mu, 2.0 * p.eps.real() + 1.0) *
                       std::norm(h(lambda));
    return num / (detail::inf_poch(dp.q() * lambda / mu, dp) * detail::inf_poch(-dp.q() * mu / dp.nu(), dp));
}

struct FamilyAmplitude
{
    cplx value;
    bool pole_warning;  // (lambda, mu) outside the pole-free region lambda < mu/q
};

/// Unnormalized coefficient of |lambda, mu> in the s-th family member.
inline FamilyAmplitude continuum_family_amplitude(const DeformationParameter& dp, const ContinuumParams& p, int s,
                                                  double lambda, double mu)
{
    if (!(lambda > 0.0) || !(mu > 0.0))
        throw ContractViolation("continuum_family_amplitude: lambda and mu must be positive");
    const double P1 = detail::inf_poch(dp.q() * lambda / mu, dp);
    const double P2 = detail::inf_poch(-dp.q() * mu / dp.nu(), dp);
    if (P1 == 0.0)
        throw PoleError("continuum_family_amplitude: (q lambda/mu; q)_inf vanishes");
    const cplx v = std::exp(p.delta(s) * std::log(lambda) + p.eps * std::log(mu)) / principal_sqrt(P1 * P2);
    return {v, lambda >= mu / dp.q()};
}

struct ContinuumOptions
{
    double quad_tol = 1e-8;
    double boundary_gap = 0.0;  // integrate lambda < (1 - gap) mu/q; 0 means the whole restricted region
    LogPeriodic h = LogPeriodic::constant();
    int max_doublings = 60;
};

struct GapSample
{
    double gap;
    double value;
};

struct ContinuumIntegral
{
    bool finite = false;
    double value = std::numeric_limits<double>::infinity();
    double error_estimate = 0.0;
    double mu_max = 0.0;
    double mu_tail = 0.0;  // contribution of the last mu segment
    double refined_value = std::numeric_limits<double>::infinity();
    double refinement_change = std::numeric_limits<double>::infinity();  // relative, tol vs tol/100
    double boundary_gap = 0.0;
    bool boundary_divergent = false;
    std::vector<GapSample> gap_sequence;  // evidence for the behaviour at lambda -> mu/q
    std::string status;
};

namespace detail {

struct Quadrature
{
    double value;
    double error;
    double mu_max;
    double tail;
};

// lambda = mu u/q, u in (0, 1-gap); inner integral in u, outer in mu grown by doubling.
inline Quadrature continuum_quadrature(const DeformationParameter& dp, const ContinuumParams& p,
                                       const LogPeriodic& h, double gap, double tol, int max_doublings)
{
    const double q = dp.q();
    const double a = 2.0 * p.d.real() + 1.0;
    const double b = 2.0 * p.eps.real() + 1.0;
    boost::math::quadrature::tanh_sinh<double> inner_rule;
    boost::math::quadrature::tanh_sinh<double> outer_rule;
    double err_total = 0.0;

    auto inner = [&](double mu) {
        if (mu <= 0.0)
            return 0.0;
        auto f = [&](double u) {
            if (u <= 0.0)
                return 0.0;
            return std::pow(u, a) * std::norm(h(mu * u / q)) / inf_poch(u, dp);
        };
        double err = 0.0;
        const double I = inner_rule.integrate(f, 0.0, 1.0 - gap, tol, &err);
        const double scale = std::pow(mu / q, a + 1.0) * std::pow(mu, b) / inf_poch(-q * mu / dp.nu(), dp);
        return scale * I;
    };
    auto segment = [&](double lo, double hi) {
        double err = 0.0;
        const double v = outer_rule.integrate(inner, lo, hi, tol, &err);
        err_total += err;
        return v;
    };

    double M = 1.0;
    double total = segment(0.0, M);
    double tail = std::numeric_limits<double>::infinity();
    int quiet = 0;
    for (int k = 0; k < max_doublings; ++k) {
        tail = segment(M, 2.0 * M);
        total += tail;
        M *= 2.0;
        if (std::abs(tail) <= tol * std::abs(total)) {
            if (++quiet >= 2)
                break;
        } else {
            quiet = 0;
        }
    }
    return {total, err_total, M, tail};
}

} // namespace detail

/// Restricted-domain norm integral. DomainError unless Re d > -1 and Re eps > -1.
/// With boundary_gap = 0 the lambda -> mu/q boundary is probed through a shrinking
/// gap sequence; logarithmic growth marks the integral as divergent.
inline ContinuumIntegral continuum_norm_integral(const DeformationParameter& dp, const ContinuumParams& p,
                                                 const ContinuumOptions& opt = {})
{
    if (!(opt.quad_tol > 0.0))
        throw ContractViolation("continuum_norm_integral: quad_tol must be positive");
    if (opt.boundary_gap < 0.0 || opt.boundary_gap >= 1.0)
        throw ContractViolation("continuum_norm_integral: boundary_gap must lie in [0,1)");
    if (!(p.d.real() > -1.0))
        throw DomainError("continuum_norm_integral: Re d = " + std::to_string(p.d.real()) +
                          " <= -1, the integral diverges at lambda -> 0");
    if (!(p.eps.real() > -1.0))
        throw DomainError("continuum_norm_integral: Re eps = " + std::to_string(p.eps.real()) +
                          " <= -1, the integral diverges at mu -> 0");

    ContinuumIntegral out;
    out.boundary_gap = opt.boundary_gap;
    if (opt.boundary_gap > 0.0) {
        const auto c = detail::continuum_quadrature(dp, p, opt.h, opt.boundary_gap, opt.quad_tol, opt.max_doublings);
        const auto r =
            detail::continuum_quadrature(dp, p, opt.h, opt.boundary_gap, opt.quad_tol / 100.0, opt.max_doublings);
        out.value = c.value;
        out.error_estimate = c.error;
        out.mu_max = c.mu_max;
        out.mu_tail = c.tail;
        out.refined_value = r.value;
        out.refinement_change = std::abs(r.value - c.value) / std::abs(r.value);
        out.finite = std::isfinite(c.value);
        out.status = "ok";
        return out;
    }

    for (double gap = 1e-2; gap >= 1e-6; gap /= 10.0)
        out.gap_sequence.push_back(
            {gap, detail::continuum_quadrature(dp, p, opt.h, gap, opt.quad_tol, opt.max_doublings).value});
    const auto& g = out.gap_sequence;
    const double first = g[1].value - g[0].value;
    const double last = g.back().value - g[g.size() - 2].value;
    if (last > 0.5 * first) {
        out.boundary_divergent = true;
        out.finite = false;
        out.status = "divergent: the integrand has a non-integrable pole at lambda = mu/q";
        return out;
    }
    const auto c = detail::continuum_quadrature(dp, p, opt.h, 1e-14, opt.quad_tol, opt.max_doublings);
    const auto r = detail::continuum_quadrature(dp, p, opt.h, 1e-14, opt.quad_tol / 100.0, opt.max_doublings);
    out.value = c.value;
    out.error_estimate = c.error;
    out.mu_max = c.mu_max;
    out.mu_tail = c.tail;
    out.refined_value = r.value;
    out.refinement_change = std::abs(r.value - c.value) / std::abs(r.value);
    out.finite = std::isfinite(c.value);
    out.status = "ok";
    return out;
}

struct PositivitySample
{
    int samples = 0;
    int negative = 0;
    int non_finite = 0;
    double min_value = std::numeric_limits<double>::infinity();
};

/// Integrand at uniformly drawn (u, mu) in (0,1) x (0, mu_max], lambda = mu u/q.
inline PositivitySample integrand_positivity(const DeformationParameter& dp, const ContinuumParams& p,
                                             const LogPeriodic& h, int samples, double mu_max = 50.0,
                                             std::uint64_t seed = 20240611)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PositivitySample out;
    out.samples = samples;
    for (int i = 0; i < samples; ++i) {
        const double u = std::max(unit(rng), 1e-300);
        const double mu = std::max(unit(rng), 1e-300) * mu_max;
        const double v = continuum_integrand(dp, p, h, mu * u / dp.q(), mu);
        if (!std::isfinite(v))
            ++out.non_finite;
        else {
            out.min_value = std::min(out.min_value, v);
            if (v < 0.0)
                ++out.negative;
        }
    }
    return out;
}

} // namespace glq::lattice_rep
