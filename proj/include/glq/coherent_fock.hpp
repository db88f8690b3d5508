#pragma once

// Coherent states |z1,z2>_- of the annihilators on the truncated Fock space.

#include <cmath>

#include "glq/fockrep.hpp"

namespace glq::coherent_fock {

using fockrep::Matrix;
using fockrep::Mode;
using fockrep::TruncatedFockSpace;
using fockrep::Vector;

struct CoherentMinusState
{
    TruncatedFockSpace space;
    cplx z1;
    cplx z2;
    bool normalized = false;
    double norm_constant = 1.0;  // c(z1,z2); 1 when unnormalized
    Vector coeffs;               // row-major over (n,m)
    bool truncation_warning = false;
    double boundary_ratio = 0.0;  // max |c| on the n = N or m = N edge over max |c|
};

/// Coefficients z1^n z2^m / sqrt([n]! [m]!) by the recurrence
/// c_{n,m} = c_{n-1,m} z1 / sqrt([n]), c_{0,m} = c_{0,m-1} z2 / sqrt([m]).
inline Vector minus_coefficients(const TruncatedFockSpace& space, cplx z1, cplx z2)
{
    const auto& dp = space.dp();
    const int N = space.cutoff();
    Vector c = Vector::Zero(space.dimension());
    cplx col0{1.0, 0.0};
    for (int m = 0; m <= N; ++m) {
        if (m > 0)
            col0 *= z2 / std::sqrt(q_number(dp, m));
        cplx v = col0;
        for (int n = 0; n <= N; ++n) {
            if (n > 0)
                v *= z1 / std::sqrt(q_number(dp, n));
            c(space.index(n, m)) = v;
        }
    }
    return c;
}

/// Ratio of the largest edge coefficient to the largest coefficient.
inline double boundary_ratio(const TruncatedFockSpace& space, const Vector& c)
{
    const int N = space.cutoff();
    const double top = c.cwiseAbs().maxCoeff();
    if (top == 0.0)
        return 0.0;
    double edge = 0.0;
    for (int k = 0; k <= N; ++k)
        edge = std::max({edge, std::abs(c(space.index(N, k))), std::abs(c(space.index(k, N)))});
    return edge / top;
}

inline CoherentMinusState build_minus(const TruncatedFockSpace& space, cplx z1, cplx z2, bool normalized,
                                      double tol = 1e-14, double truncation_threshold = 1e-8)
{
    CoherentMinusState st{space, z1, z2, normalized, 1.0, minus_coefficients(space, z1, z2)};
    if (normalized) {
        const auto& dp = space.dp();
        const SeriesValue e1 = q_exp(dp, std::norm(z1), tol);
        const SeriesValue e2 = q_exp(dp, std::norm(z2), tol);
        st.norm_constant = 1.0 / std::sqrt(e1.value.real() * e2.value.real());
        st.coeffs *= st.norm_constant;
    }
    st.boundary_ratio = boundary_ratio(space, st.coeffs);
    st.truncation_warning = st.boundary_ratio > truncation_threshold;
    return st;
}

enum class Region { interior, full };

namespace detail {

inline double masked_norm(const TruncatedFockSpace& space, const Vector& r, Region region)
{
    if (region == Region::full)
        return r.norm();
    double s = 0.0;
    for (int i : space.interior(1))
        s += std::norm(r(i));
    return std::sqrt(s);
}

} // namespace detail

/// || (a2 - z2) v || on components n, m <= N-1 (or on all components).
inline double eigen_residual_a2(const CoherentMinusState& st, Region region = Region::interior)
{
    const Matrix a2 = fockrep::build_operator(st.space, Mode::a2).entries;
    const Vector r = a2 * st.coeffs - st.z2 * st.coeffs;
    return detail::masked_norm(st.space, r, region);
}

/// || a1 u - z1 w || with u = state(z1, z2), w = state(z1, sqrt(q) z2), both unnormalized.
inline double twisted_eigen_residual_a1(const TruncatedFockSpace& space, cplx z1, cplx z2,
                                        Region region = Region::interior)
{
    const Vector u = minus_coefficients(space, z1, z2);
    const Vector w = minus_coefficients(space, z1, space.dp().sqrt_q() * z2);
    const Matrix a1 = fockrep::build_operator(space, Mode::a1).entries;
    return detail::masked_norm(space, a1 * u - z1 * w, region);
}

struct TwistRatio
{
    double measured;   // ||a1 u||/||w|| over the interior, both normalized
    double predicted;  // |z1| sqrt(e_q(q|z2|^2) / e_q(|z2|^2))
};

/// The twisted relation on normalized states holds only up to the constant
/// sqrt(e_q(q|z2|^2)/e_q(|z2|^2)); this compares measured against that factor.
inline TwistRatio twisted_norm_ratio(const TruncatedFockSpace& space, cplx z1, cplx z2, double tol = 1e-14)
{
    const auto& dp = space.dp();
    const CoherentMinusState u = build_minus(space, z1, z2, true, tol);
    const CoherentMinusState w = build_minus(space, z1, dp.sqrt_q() * z2, true, tol);
    const Matrix a1 = fockrep::build_operator(space, Mode::a1).entries;
    const Vector au = a1 * u.coeffs;
    const double num = detail::masked_norm(space, au, Region::interior);
    const double den = detail::masked_norm(space, w.coeffs, Region::interior);
    const double x2 = std::norm(z2);
    const double pred = std::abs(z1) * std::sqrt(q_exp(dp, dp.q() * x2, tol).value.real() /
                                                 q_exp(dp, x2, tol).value.real());
    return {num / den, pred};
}

enum class FactorOrder {
    a1_innermost,  // e_q(z2 a2dag) e_q(z1 a1dag) |0,0>, consistent with |n,m> = a2dag^m a1dag^n |0,0>
    a2_innermost   // e_q(z1 a1dag) e_q(z2 a2dag) |0,0>, operator order as printed
};

/// e_q(z A) v as the finite sum over powers of the nilpotent truncated creator.
inline Vector apply_q_exp(const DeformationParameter& dp, const Matrix& creator, cplx z, const Vector& v,
                          int cutoff)
{
    Vector acc = v;
    Vector term = v;
    for (int k = 1; k <= cutoff; ++k) {
        term = (z / q_number(dp, k)) * (creator * term);
        acc += term;
    }
    return acc;
}

struct FactorizedCheck
{
    double distance;  // interior distance to the unnormalized coefficient vector
    bool truncation_warning;
};

inline FactorizedCheck verify_factorized_form(const TruncatedFockSpace& space, cplx z1, cplx z2,
                                              FactorOrder order = FactorOrder::a1_innermost,
                                              double truncation_threshold = 1e-8)
{
    const Matrix a1d = fockrep::build_operator(space, Mode::a1dag).entries;
    const Matrix a2d = fockrep::build_operator(space, Mode::a2dag).entries;
    const int N = space.cutoff();
    Vector v = space.basis_vector(0, 0);
    if (order == FactorOrder::a1_innermost) {
        v = apply_q_exp(space.dp(), a1d, z1, v, N);
        v = apply_q_exp(space.dp(), a2d, z2, v, N);
    } else {
        v = apply_q_exp(space.dp(), a2d, z2, v, N);
        v = apply_q_exp(space.dp(), a1d, z1, v, N);
    }
    const Vector ref = minus_coefficients(space, z1, z2);
    return {detail::masked_norm(space, v - ref, Region::interior),
            boundary_ratio(space, v) > truncation_threshold};
}

/// sum |c|^2 over the truncated space.
inline double truncated_norm_squared(const CoherentMinusState& st) { return st.coeffs.squaredNorm(); }

} // namespace glq::coherent_fock
