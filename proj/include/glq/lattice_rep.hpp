#pragma once

// Positive-energy representation on the label lattice |lambda q^j, mu q^k>,
// j, k in Z, truncated to a square window |j|, |k| <= W, and the coherent
// states |z1,z2>_+ of the creators built on it.
//
// Action (principal square roots, H eigenvalue lambda q^j):
//   a1    |j,k> = sqrt(lambda q^j     - mu q^k) |j-1,k>
//   a1dag |j,k> = sqrt(lambda q^{j+1} - mu q^k) |j+1,k>
//   a2    |j,k> = sqrt(mu q^k     + nu)        |j-1,k-1>
//   a2dag |j,k> = sqrt(mu q^{k+1} + nu)        |j+1,k+1>
//   H     |j,k> = lambda q^j |j,k>,   T |j,k> = mu q^k |j,k>

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glq/qspecial.hpp"

namespace glq::lattice_rep {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct LatticeIndex
{
    int j = 0;
    int k = 0;
    friend bool operator==(const LatticeIndex&, const LatticeIndex&) = default;
};

class LatticeWindow
{
public:
    LatticeWindow(DeformationParameter dp, double lambda, double mu, int half_width)
        : dp_(dp), lambda_(lambda), mu_(mu), W_(half_width)
    {
        if (!(lambda > 0.0) || !(mu > 0.0))
            throw ContractViolation("LatticeWindow: lambda and mu must be positive");
        if (half_width < 1)
            throw ContractViolation("LatticeWindow: W must be >= 1");
    }

    const DeformationParameter& dp() const noexcept { return dp_; }
    double lambda() const noexcept { return lambda_; }
    double mu() const noexcept { return mu_; }
    int half_width() const noexcept { return W_; }
    int side() const noexcept { return 2 * W_ + 1; }
    int size() const noexcept { return side() * side(); }

    bool contains(int j, int k) const noexcept { return std::abs(j) <= W_ && std::abs(k) <= W_; }

    int index(int j, int k) const
    {
        if (!contains(j, k))
            throw ContractViolation("lattice label (" + std::to_string(j) + "," + std::to_string(k) +
                                    ") outside window W = " + std::to_string(W_));
        return (j + W_) * side() + (k + W_);
    }

    LatticeIndex label(int i) const { return {i / side() - W_, i % side() - W_}; }

    /// Indices with |j|, |k| <= W - margin.
    std::vector<int> interior(int margin) const
    {
        std::vector<int> out;
        for (int j = -W_ + margin; j <= W_ - margin; ++j)
            for (int k = -W_ + margin; k <= W_ - margin; ++k)
                out.push_back(index(j, k));
        return out;
    }

    Vector unit(int j, int k) const
    {
        Vector v = Vector::Zero(size());
        v(index(j, k)) = 1.0;
        return v;
    }

    /// Same parameters, different half width.
    LatticeWindow resized(int half_width) const { return {dp_, lambda_, mu_, half_width}; }

private:
    DeformationParameter dp_;
    double lambda_;
    double mu_;
    int W_;
};

enum class LatticeOp { a1, a2, a1dag, a2dag, H, T };

inline const char* to_string(LatticeOp op)
{
    switch (op) {
    case LatticeOp::a1: return "a1";
    case LatticeOp::a2: return "a2";
    case LatticeOp::a1dag: return "a1dag";
    case LatticeOp::a2dag: return "a2dag";
    case LatticeOp::H: return "H";
    case LatticeOp::T: return "T";
    }
    return "?";
}

/// lambda q^j - mu q^k, snapped to zero when it cancels to roundoff.
inline double energy_gap(const LatticeWindow& w, int j, int k)
{
    const double x = w.lambda() * w.dp().pow(j);
    const double y = w.mu() * w.dp().pow(k);
    const double d = x - y;
    return std::abs(d) <= 8.0 * std::numeric_limits<double>::epsilon() * std::max(x, y) ? 0.0 : d;
}

struct Transition
{
    int dj;
    int dk;
    cplx amplitude;
};

inline Transition transition(const LatticeWindow& w, LatticeOp op, int j, int k)
{
    const auto& dp = w.dp();
    switch (op) {
    case LatticeOp::a1: return {-1, 0, principal_sqrt(energy_gap(w, j, k))};
    case LatticeOp::a1dag: return {1, 0, principal_sqrt(energy_gap(w, j + 1, k))};
    case LatticeOp::a2: return {-1, -1, principal_sqrt(w.mu() * dp.pow(k) + dp.nu())};
    case LatticeOp::a2dag: return {1, 1, principal_sqrt(w.mu() * dp.pow(k + 1) + dp.nu())};
    case LatticeOp::H: return {0, 0, w.lambda() * dp.pow(j)};
    case LatticeOp::T: return {0, 0, w.mu() * dp.pow(k)};
    }
    return {0, 0, 0.0};
}

struct LatticeState
{
    LatticeWindow window;
    Vector coeffs;
    double leaked_mass = 0.0;  // sum |amplitude * c|^2 pushed off the window

    cplx at(int j, int k) const { return coeffs(window.index(j, k)); }

    /// sum |c|^2 over labels with |j| == W or |k| == W.
    double boundary_mass() const
    {
        const int W = window.half_width();
        double s = 0.0;
        for (int i = 0; i < window.size(); ++i) {
            const auto l = window.label(i);
            if (std::abs(l.j) == W || std::abs(l.k) == W)
                s += std::norm(coeffs(i));
        }
        return s;
    }
};

inline LatticeState lattice_apply(const LatticeWindow& w, LatticeOp op, const LatticeState& in)
{
    LatticeState out{w, Vector::Zero(w.size())};
    for (int i = 0; i < w.size(); ++i) {
        const cplx c = in.coeffs(i);
        if (c == cplx{0.0, 0.0})
            continue;
        const auto l = w.label(i);
        const Transition t = transition(w, op, l.j, l.k);
        const cplx v = t.amplitude * c;
        if (w.contains(l.j + t.dj, l.k + t.dk))
            out.coeffs(w.index(l.j + t.dj, l.k + t.dk)) += v;
        else
            out.leaked_mass += std::norm(v);
    }
    return out;
}

inline Matrix lattice_operator(const LatticeWindow& w, LatticeOp op)
{
    Matrix M = Matrix::Zero(w.size(), w.size());
    for (int i = 0; i < w.size(); ++i) {
        const auto l = w.label(i);
        const Transition t = transition(w, op, l.j, l.k);
        if (w.contains(l.j + t.dj, l.k + t.dk))
            M(w.index(l.j + t.dj, l.k + t.dk), i) = t.amplitude;
    }
    return M;
}

struct LatticeResidualReport
{
    std::string norm_kind = "relative frobenius";
    std::string region = "domain |j|,|k| <= W-2, full range";
    std::map<std::string, double> residuals;    // algebra relations and H/T structure
    std::map<std::string, double> diagnostics;  // alternative conventions, expected nonzero

    double max_residual() const
    {
        double r = 0.0;
        for (const auto& [_, v] : residuals)
            r = std::max(r, v);
        return r;
    }
};

namespace detail {

// ||(L - R) P|| / max(||L P||, ||R P||) on the columns of `dom`.
inline double relative_residual(const Matrix& L, const Matrix& R, const std::vector<int>& dom)
{
    double diff = 0.0, nl = 0.0, nr = 0.0;
    for (int c : dom) {
        diff += (L.col(c) - R.col(c)).squaredNorm();
        nl += L.col(c).squaredNorm();
        nr += R.col(c).squaredNorm();
    }
    const double scale = std::sqrt(std::max(nl, nr));
    return scale > 0.0 ? std::sqrt(diff) / scale : std::sqrt(diff);
}

} // namespace detail

/// The six oscillator relations and the H/T structure in the lattice action.
inline LatticeResidualReport algebra_residuals_on_lattice(const LatticeWindow& w)
{
    if (w.half_width() < 2)
        throw ContractViolation("algebra_residuals_on_lattice: need W >= 2 for a nonempty interior");
    LatticeResidualReport rep;
    const auto dom = w.interior(2);
    const double q = w.dp().q();
    const double s = w.dp().sqrt_q();
    const double nu = w.dp().nu();
    const Matrix a1 = lattice_operator(w, LatticeOp::a1);
    const Matrix a2 = lattice_operator(w, LatticeOp::a2);
    const Matrix a1d = lattice_operator(w, LatticeOp::a1dag);
    const Matrix a2d = lattice_operator(w, LatticeOp::a2dag);
    const Matrix H = lattice_operator(w, LatticeOp::H);
    const Matrix T = lattice_operator(w, LatticeOp::T);
    const Matrix id = Matrix::Identity(w.size(), w.size());

    auto put = [&](const char* name, const Matrix& L, const Matrix& R) {
        rep.residuals[name] = detail::relative_residual(L, R, dom);
    };
    put("a1dag a2dag = sqrt(q) a2dag a1dag", a1d * a2d, s * a2d * a1d);
    put("a1 a2 = q^(-1/2) a2 a1", a1 * a2, (1.0 / s) * a2 * a1);
    put("a1 a2dag = sqrt(q) a2dag a1", a1 * a2d, s * a2d * a1);
    put("a2 a1dag = sqrt(q) a1dag a2", a2 * a1d, s * a1d * a2);
    put("a1 a1dag = 1 + q a1dag a1 + (q-1) a2dag a2", a1 * a1d, id + q * a1d * a1 + (q - 1.0) * a2d * a2);
    put("a2 a2dag = 1 + q a2dag a2", a2 * a2d, id + q * a2d * a2);

    const Matrix Hpoly = a1d * a1 + a2d * a2 - nu * id;
    put("H = a1dag a1 + a2dag a2 - nu", H, Hpoly);
    put("T = a2dag a2 - nu", T, a2d * a2 - nu * id);
    put("[H,T] = 0", H * T, T * H);
    put("H a1dag = q a1dag H", H * a1d, q * a1d * H);
    put("H a2dag = q a2dag H", H * a2d, q * a2d * H);
    put("T a2dag = q a2dag T", T * a2d, q * a2d * T);
    put("T a1dag = a1dag T", T * a1d, a1d * T);

    // The alternative H eigenvalue lambda q^{j+k} against the operator polynomial.
    Matrix Halt = Matrix::Zero(w.size(), w.size());
    for (int i = 0; i < w.size(); ++i) {
        const auto l = w.label(i);
        Halt(i, i) = w.lambda() * w.dp().pow(l.j + l.k);
    }
    rep.diagnostics["H = lambda q^(j+k) vs a1dag a1 + a2dag a2 - nu"] = detail::relative_residual(Halt, Hpoly, dom);
    return rep;
}

// ---------------------------------------------------------------------------
// Coherent states of the creators

/// prod_{i<n} sqrt(1 - a q^i), the factorwise principal square root of (a;q)_n, n >= 0.
inline cplx sqrt_pochhammer(double a, const DeformationParameter& dp, int n)
{
    cplx p{1.0, 0.0};
    for (int i = 0; i < n; ++i)
        p *= principal_sqrt(1.0 - a * dp.pow(i));
    return p;
}

namespace detail {

inline cplx sqrt_pochhammer_denominator(double a, const DeformationParameter& dp, int n, int j, int k)
{
    cplx p{1.0, 0.0};
    for (int i = 0; i < n; ++i) {
        const double x = a * dp.pow(i);
        if (glq::detail::vanishes(1.0 - x, x))
            throw PoleError("closed-form coefficient has a Pochhammer pole at (j,k) = (" + std::to_string(j) + "," +
                            std::to_string(k) + ")");
        p *= principal_sqrt(1.0 - x);
    }
    return p;
}

} // namespace detail

/// Which of the four expansion quadrants a lattice label belongs to:
/// 1: (n,m), n,m >= 1;  2: (n,-m), n >= 1, m >= 0;  3: (-n,m), n >= 0, m >= 1;  4: (-n,-m), n,m >= 0.
inline int quadrant(int j, int k)
{
    if (j >= 1)
        return k >= 1 ? 1 : 2;
    return k >= 1 ? 3 : 4;
}

/// z-independent part gamma_{jk} of the coherent-state coefficient
/// c_{jk} = gamma_{jk} z1^{k-j} z2^{-k}, from the quadrant closed forms.
/// Square roots of Pochhammer symbols are taken factorwise.
inline cplx closed_form_coefficient(const LatticeWindow& w, int j, int k)
{
    const auto& dp = w.dp();
    const double lam = w.lambda();
    const double mu = w.mu();
    const double nu = dp.nu();
    const cplx s_mmu = principal_sqrt(-mu);
    const double s_mu = std::sqrt(mu), s_lam = std::sqrt(lam), s_nu = std::sqrt(nu);
    auto P = [&](double a, int n) { return sqrt_pochhammer(a, dp, n); };
    auto Pden = [&](double a, int n) { return detail::sqrt_pochhammer_denominator(a, dp, n, j, k); };

    switch (quadrant(j, k)) {
    case 1: {
        const int n = j, m = k;
        return dp.pow(0.25 * m * (m - 1)) * ipow(s_mmu, n) * std::pow(s_nu, m) / std::pow(s_lam, m) *
               P(lam / mu * dp.pow(1 - m), n) * P(-mu / nu * dp.q(), m) / Pden(mu / lam, m);
    }
    case 2: {
        const int n = j, m = -k;
        return dp.pow(0.25 * m * (m - 1)) * ipow(s_mmu, n) * ipow(s_mmu, m) / std::pow(s_mu, m) *
               P(lam / mu * dp.pow(m + 1), n) * P(lam / mu * dp.q(), m) / Pden(-nu / mu, m);
    }
    case 3: {
        const int n = -j, m = k;
        return dp.pow(0.5 * n * m + 0.25 * m * (m - 1) + 0.25 * n * (n - 1)) * std::pow(s_nu, m) /
               (std::pow(s_lam, n) * std::pow(s_lam, m)) * P(-mu / nu * dp.q(), m) /
               (Pden(mu / lam * dp.pow(m), n) * Pden(mu / lam, m));
    }
    default: {
        const int n = -j, m = -k;
        return dp.pow(-0.5 * n * m + 0.25 * m * (m - 1) + 0.25 * n * (n - 1)) * ipow(s_mmu, m) /
               (std::pow(s_lam, n) * std::pow(s_mu, m)) * P(lam / mu * dp.q(), m) /
               (Pden(mu / lam * dp.pow(-m), n) * Pden(-nu / mu, m));
    }
    }
}

struct CoefficientTable
{
    Vector gamma;                // z-independent coefficients
    std::vector<char> singular;  // 1 where the value is undefined
};

/// Recurrence oracle: gamma_{00} = 1, then
///   gamma_{j,k} = gamma_{j-1,k-1} sqrt(mu q^k + nu)              (a2dag eigen-relation)
///   gamma_{j,k} = gamma_{j-1,k}   sqrt(lambda q^j - mu q^k) q^{-k/2}  (twisted a1dag relation)
/// walking the diagonal to (k,k) and then along the row to (j,k). Division
/// by a vanishing row amplitude marks the point and everything beyond it singular.
inline CoefficientTable recurrence_coefficients(const LatticeWindow& w)
{
    const auto& dp = w.dp();
    const int W = w.half_width();
    CoefficientTable t{Vector::Zero(w.size()), std::vector<char>(w.size(), 0)};
    auto diag = [&](int k) { return principal_sqrt(w.mu() * dp.pow(k) + dp.nu()); };
    auto row = [&](int j, int k) { return principal_sqrt(energy_gap(w, j, k)) * dp.pow(-0.5 * k); };

    for (int k = -W; k <= W; ++k) {
        cplx g{1.0, 0.0};
        if (k > 0)
            for (int i = 1; i <= k; ++i)
                g *= diag(i);
        else
            for (int i = k + 1; i <= 0; ++i)
                g /= diag(i);
        t.gamma(w.index(k, k)) = g;

        cplx up = g;
        for (int j = k + 1; j <= W; ++j) {
            up *= row(j, k);
            t.gamma(w.index(j, k)) = up;
        }
        cplx down = g;
        bool broken = false;
        for (int j = k - 1; j >= -W; --j) {
            const cplx a = row(j + 1, k);
            if (broken || a == cplx{0.0, 0.0}) {
                broken = true;
                t.singular[w.index(j, k)] = 1;
                t.gamma(w.index(j, k)) = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            down /= a;
            t.gamma(w.index(j, k)) = down;
        }
    }
    return t;
}

inline CoefficientTable closed_form_coefficients(const LatticeWindow& w)
{
    CoefficientTable t{Vector::Zero(w.size()), std::vector<char>(w.size(), 0)};
    for (int i = 0; i < w.size(); ++i) {
        const auto l = w.label(i);
        try {
            t.gamma(i) = closed_form_coefficient(w, l.j, l.k);
        } catch (const PoleError&) {
            t.singular[i] = 1;
            t.gamma(i) = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return t;
}

enum class CoefficientSource { closed_form, recurrence };

inline const char* to_string(CoefficientSource s)
{
    return s == CoefficientSource::closed_form ? "closed_form" : "recurrence";
}

struct PlusCoherentState
{
    cplx z1;
    cplx z2;
    CoefficientSource source;
    Vector gamma;                // z-independent part
    std::vector<char> singular;  // undefined coefficients (excluded everywhere)
    LatticeState state;          // c_{jk} = gamma_{jk} z1^{k-j} z2^{-k}, NaN-free (singular -> 0)

    const LatticeWindow& window() const { return state.window; }

    std::vector<LatticeIndex> singular_points() const
    {
        std::vector<LatticeIndex> out;
        for (int i = 0; i < static_cast<int>(singular.size()); ++i)
            if (singular[i])
                out.push_back(window().label(i));
        return out;
    }
};

/// Unnormalized |z1,z2>_+ (C = 1). With strict_poles the first pole raises
/// PoleError naming its (j,k); otherwise pole points are masked as singular.
inline PlusCoherentState build_plus_coherent(const LatticeWindow& w, cplx z1, cplx z2,
                                             CoefficientSource source = CoefficientSource::closed_form,
                                             bool strict_poles = false)
{
    if (z1 == cplx{0.0, 0.0} || z2 == cplx{0.0, 0.0})
        throw ZeroArgumentError("build_plus_coherent: z1 and z2 must be nonzero");
    CoefficientTable t;
    if (source == CoefficientSource::closed_form) {
        if (strict_poles) {
            t = {Vector::Zero(w.size()), std::vector<char>(w.size(), 0)};
            for (int i = 0; i < w.size(); ++i) {
                const auto l = w.label(i);
                t.gamma(i) = closed_form_coefficient(w, l.j, l.k);
            }
        } else {
            t = closed_form_coefficients(w);
        }
    } else {
        t = recurrence_coefficients(w);
        if (strict_poles)
            for (int i = 0; i < w.size(); ++i)
                if (t.singular[i]) {
                    const auto l = w.label(i);
                    throw PoleError("recurrence is singular at (j,k) = (" + std::to_string(l.j) + "," +
                                    std::to_string(l.k) + ")");
                }
    }
    PlusCoherentState st{z1, z2, source, t.gamma, t.singular, LatticeState{w, Vector::Zero(w.size())}};
    for (int i = 0; i < w.size(); ++i) {
        if (st.singular[i])
            continue;
        const auto l = w.label(i);
        st.state.coeffs(i) = t.gamma(i) * ipow(z1, l.k - l.j) * ipow(z2, -l.k);
    }
    return st;
}

struct CoefficientDiscrepancy
{
    LatticeIndex index;
    int quadrant;
    cplx closed_form;
    cplx recurrence;
    double relative_error;
    bool magnitude_agrees;
};

struct CoefficientComparison
{
    int points = 0;
    int compared = 0;
    int singular = 0;  // singular in either table
    double max_relative_error = 0.0;
    double max_magnitude_error = 0.0;  // relative error of |closed| vs |recurrence|
    std::array<int, 4> mismatches_per_quadrant{0, 0, 0, 0};
    std::vector<CoefficientDiscrepancy> discrepancies;

    bool all_match() const { return discrepancies.empty(); }
};

/// Point-by-point comparison of the closed forms against the recurrence oracle.
inline CoefficientComparison compare_closed_form_with_recurrence(const LatticeWindow& w, double rel_tol = 1e-9)
{
    const CoefficientTable cf = closed_form_coefficients(w);
    const CoefficientTable rc = recurrence_coefficients(w);
    CoefficientComparison out;
    out.points = w.size();
    for (int i = 0; i < w.size(); ++i) {
        if (cf.singular[i] || rc.singular[i]) {
            ++out.singular;
            continue;
        }
        ++out.compared;
        const cplx a = cf.gamma(i), b = rc.gamma(i);
        const double scale = std::max(std::abs(b), std::numeric_limits<double>::min());
        const double rel = std::abs(a - b) / scale;
        const double mag = std::abs(std::abs(a) - std::abs(b)) / scale;
        out.max_relative_error = std::max(out.max_relative_error, rel);
        out.max_magnitude_error = std::max(out.max_magnitude_error, mag);
        if (rel > rel_tol) {
            const auto l = w.label(i);
            const int qd = quadrant(l.j, l.k);
            ++out.mismatches_per_quadrant[qd - 1];
            out.discrepancies.push_back({l, qd, a, b, rel, mag <= rel_tol});
        }
    }
    return out;
}

enum class RecurrenceMode { a1dag, a2dag };

struct RecurrenceResidual
{
    double max_relative = 0.0;  // max over checked rows of |lhs - rhs| / max(|lhs|, |rhs|)
    int rows_checked = 0;
    int rows_skipped = 0;  // a singular coefficient on either side
    std::vector<LatticeIndex> inconsistent;  // zero-amplitude rows with a nonzero right-hand side
};

/// Residual of the eigen-relations as coefficient recurrences on the window.
///   a2dag: c_{j-1,k-1} sqrt(mu q^k + nu) = z2 c_{j,k}
///   a1dag: c_{j-1,k}(z1,z2) sqrt(lambda q^j - mu q^k) = z1 c_{j,k}(z1, z2/sqrt(q)),
/// the twisted state being built independently from the same source.
inline RecurrenceResidual plus_recurrence_residual(const PlusCoherentState& st, RecurrenceMode mode)
{
    const LatticeWindow& w = st.window();
    const auto& dp = w.dp();
    RecurrenceResidual out;
    std::optional<PlusCoherentState> twisted;
    if (mode == RecurrenceMode::a1dag)
        twisted = build_plus_coherent(w, st.z1, st.z2 / dp.sqrt_q(), st.source);
    const PlusCoherentState& rhs_state = twisted ? *twisted : st;
    const cplx z = mode == RecurrenceMode::a1dag ? st.z1 : st.z2;
    const double rhs_scale = rhs_state.state.coeffs.cwiseAbs().maxCoeff();

    for (int i = 0; i < w.size(); ++i) {
        const auto l = w.label(i);
        const int pj = l.j - 1;
        const int pk = mode == RecurrenceMode::a1dag ? l.k : l.k - 1;
        const cplx amp = mode == RecurrenceMode::a1dag ? principal_sqrt(energy_gap(w, l.j, l.k))
                                                       : principal_sqrt(w.mu() * dp.pow(l.k) + dp.nu());
        if (rhs_state.singular[i]) {
            ++out.rows_skipped;
            continue;
        }
        const cplx rhs = z * rhs_state.state.coeffs(i);
        if (amp == cplx{0.0, 0.0}) {
            ++out.rows_checked;
            if (std::abs(rhs) > 1e-12 * std::abs(z) * rhs_scale)
                out.inconsistent.push_back(l);
            continue;
        }
        if (!w.contains(pj, pk))
            continue;
        const int pi = w.index(pj, pk);
        if (st.singular[pi]) {
            ++out.rows_skipped;
            continue;
        }
        const cplx lhs = st.state.coeffs(pi) * amp;
        const double scale = std::max({std::abs(lhs), std::abs(rhs), std::numeric_limits<double>::min()});
        out.max_relative = std::max(out.max_relative, std::abs(lhs - rhs) / scale);
        ++out.rows_checked;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Normalization

enum class NormRoute { coeff_sum, eq20_sum, eq22_product, bilinear_sum };

inline const char* to_string(NormRoute r)
{
    switch (r) {
    case NormRoute::coeff_sum: return "coeff_sum";
    case NormRoute::eq20_sum: return "eq20_sum";
    case NormRoute::eq22_product: return "eq22_product";
    case NormRoute::bilinear_sum: return "bilinear_sum";
    }
    return "?";
}

struct NormValue
{
    cplx value{0.0, 0.0};
    bool converged = false;
    double tail_estimate = 0.0;
    long terms_used = 0;
    std::string error;  // error kind when the route could not be evaluated
};

namespace detail {

// log of (a;q)_n as a sum of principal logs of its factors (n of either sign).
inline cplx log_pochhammer(cplx a, const DeformationParameter& dp, int n)
{
    cplx s{0.0, 0.0};
    if (n >= 0) {
        for (int j = 0; j < n; ++j)
            s += std::log(1.0 - a * dp.pow(j));
        return s;
    }
    for (int i = n; i <= -1; ++i) {
        const cplx x = a * dp.pow(i);
        if (glq::detail::vanishes(1.0 - x, x))
            throw PoleError("negative-order Pochhammer pole");
        s -= std::log(1.0 - x);
    }
    return s;
}

// One term of the double bilateral normalization sum, evaluated in log space:
// (-1)^m q^{-nm + n(n-1)/2 + m(m-1)/2} (lambda q/mu; q)_m
//   / (lambda^n (mu/lambda q^{-m}; q)_n (-nu/mu; q)_m) x1^{n-m} x2^m
inline cplx eq20_term(const LatticeWindow& w, double x1, double x2, int n, int m)
{
    const auto& dp = w.dp();
    const double lam = w.lambda(), mu = w.mu(), nu = dp.nu();
    const double lq = dp.log_q();
    const cplx den_n = log_pochhammer(mu / lam * dp.pow(-m), dp, n);
    if (n > 0) {
        for (int j = 0; j < n; ++j) {
            const double x = mu / lam * dp.pow(j - m);
            if (glq::detail::vanishes(1.0 - x, x))
                throw PoleError("eq20: (mu/lambda q^-m; q)_n vanishes");
        }
    }
    cplx lg = (-static_cast<double>(n) * m + 0.5 * n * (n - 1) + 0.5 * m * (m - 1)) * lq;
    lg += log_pochhammer(lam / mu * dp.q(), dp, m);
    lg -= n * std::log(lam);
    lg -= den_n;
    lg -= log_pochhammer(-nu / mu, dp, m);
    lg += static_cast<double>(n - m) * std::log(x1) + static_cast<double>(m) * std::log(x2);
    const double sign = (m % 2 == 0) ? 1.0 : -1.0;
    return sign * std::exp(lg);
}

} // namespace detail

/// |C|^{-2} of the unnormalized state by one of four routes:
///   coeff_sum    sum |c_{jk}|^2 over the window (ground truth for the Hilbert-space norm)
///   eq20_sum     the double bilateral sum, grown over n, m in [-K, K]
///   eq22_product 0psi1(-nu/mu; q, -|z2|^2/mu) * 0psi1(mu/lambda; q, -|z1|^2/lambda)
///   bilinear_sum sum gamma_{jk}^2 |z1|^{2(k-j)} |z2|^{-2k} over the window
inline NormValue plus_norm(const PlusCoherentState& st, NormRoute via, double tol = 1e-12, int max_terms = 400)
{
    const LatticeWindow& w = st.window();
    const auto& dp = w.dp();
    const double x1 = std::norm(st.z1), x2 = std::norm(st.z2);
    NormValue out;
    try {
        switch (via) {
        case NormRoute::coeff_sum: {
            double s = 0.0;
            long used = 0;
            for (int i = 0; i < w.size(); ++i)
                if (!st.singular[i]) {
                    s += std::norm(st.state.coeffs(i));
                    ++used;
                }
            out.value = s;
            out.terms_used = used;
            out.tail_estimate = s > 0.0 ? st.state.boundary_mass() / s : 0.0;
            out.converged = std::isfinite(s) && out.tail_estimate <= tol;
            break;
        }
        case NormRoute::bilinear_sum: {
            cplx s{0.0, 0.0};
            cplx edge{0.0, 0.0};
            const int W = w.half_width();
            for (int i = 0; i < w.size(); ++i) {
                if (st.singular[i])
                    continue;
                const auto l = w.label(i);
                const cplx t = st.gamma(i) * st.gamma(i) * std::pow(x1, l.k - l.j) * std::pow(x2, -l.k);
                s += t;
                if (std::abs(l.j) == W || std::abs(l.k) == W)
                    edge += std::abs(t);
                ++out.terms_used;
            }
            out.value = s;
            out.tail_estimate = std::abs(s) > 0.0 ? std::abs(edge) / std::abs(s) : 0.0;
            out.converged = glq::detail::finite(s) && out.tail_estimate <= tol;
            break;
        }
        case NormRoute::eq20_sum: {
            cplx s = detail::eq20_term(w, x1, x2, 0, 0);
            out.terms_used = 1;
            int passes = 0;
            for (int K = 1; K <= max_terms; ++K) {
                cplx ring{0.0, 0.0};
                double ring_abs = 0.0;
                for (int n = -K; n <= K; ++n)
                    for (int m = -K; m <= K; ++m) {
                        if (std::abs(n) != K && std::abs(m) != K)
                            continue;
                        const cplx t = detail::eq20_term(w, x1, x2, n, m);
                        ring += t;
                        ring_abs += std::abs(t);
                        ++out.terms_used;
                    }
                s += ring;
                if (!glq::detail::finite(s))
                    throw NonConvergenceError("eq20 double sum overflows");
                out.tail_estimate = ring_abs;
                if (ring_abs <= tol * std::max(1.0, std::abs(s))) {
                    if (++passes >= 2) {
                        out.converged = true;
                        break;
                    }
                } else {
                    passes = 0;
                }
            }
            out.value = s;
            break;
        }
        case NormRoute::eq22_product: {
            const cplx b1 = -dp.nu() / w.mu();
            const cplx b2 = w.mu() / w.lambda();
            const auto p1 = bilateral_psi({}, {b1}, dp, -x2 / w.mu(), tol, max_terms);
            const auto p2 = bilateral_psi({}, {b2}, dp, -x1 / w.lambda(), tol, max_terms);
            out.value = p1.value * p2.value;
            out.converged = p1.converged && p2.converged;
            out.terms_used = p1.terms_used + p2.terms_used;
            out.tail_estimate = std::abs(p1.value) * p2.tail_estimate + std::abs(p2.value) * p1.tail_estimate;
            break;
        }
        }
    } catch (const Error& e) {
        out.error = std::string(e.kind()) + ": " + e.what();
        out.converged = false;
    }
    return out;
}

inline double relative_difference(cplx a, cplx b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? std::abs(a - b) / scale : 0.0;
}

/// All normalization routes side by side, with window-growth stability of
/// the coefficient sum and a verdict. When sum |c|^2 disagrees with the
/// bilateral product the report keeps both values plus the bilinear sum that
/// the product actually reproduces.
struct NormCrossCheck
{
    int window_small = 0;
    int window_large = 0;
    NormValue coeff_sum_small;
    NormValue coeff_sum_large;
    double coeff_sum_window_change = 0.0;
    NormValue eq20;
    NormValue eq22;
    NormValue bilinear;
    double coeff_vs_eq22 = 0.0;
    double eq20_vs_eq22 = 0.0;
    double bilinear_vs_eq22 = 0.0;
    bool agreement = false;    // coeff_sum == eq22 within tol
    bool discrepancy = false;  // routes disagree, report carries the evidence
    bool evidence_complete = false;
};

inline NormCrossCheck norm_cross_check(const LatticeWindow& base, cplx z1, cplx z2, int w_small, int w_large,
                                       double rel_tol = 1e-6, double series_tol = 1e-13)
{
    NormCrossCheck out;
    out.window_small = w_small;
    out.window_large = w_large;
    const auto small = build_plus_coherent(base.resized(w_small), z1, z2, CoefficientSource::recurrence);
    const auto large = build_plus_coherent(base.resized(w_large), z1, z2, CoefficientSource::recurrence);
    out.coeff_sum_small = plus_norm(small, NormRoute::coeff_sum, 1.0);
    out.coeff_sum_large = plus_norm(large, NormRoute::coeff_sum, 1.0);
    out.coeff_sum_window_change = relative_difference(out.coeff_sum_small.value, out.coeff_sum_large.value);
    out.eq20 = plus_norm(large, NormRoute::eq20_sum, series_tol);
    out.eq22 = plus_norm(large, NormRoute::eq22_product, series_tol);
    out.bilinear = plus_norm(large, NormRoute::bilinear_sum, 1.0);
    out.coeff_vs_eq22 = relative_difference(out.coeff_sum_large.value, out.eq22.value);
    out.eq20_vs_eq22 = relative_difference(out.eq20.value, out.eq22.value);
    out.bilinear_vs_eq22 = relative_difference(out.bilinear.value, out.eq22.value);

    const bool stable = out.coeff_sum_window_change <= rel_tol;
    out.agreement = stable && out.eq22.converged && out.coeff_vs_eq22 <= rel_tol;
    out.discrepancy = !out.agreement;
    out.evidence_complete = stable && out.eq22.converged && out.eq20.converged && out.eq20_vs_eq22 <= rel_tol &&
                            out.bilinear_vs_eq22 <= rel_tol;
    return out;
}

} // namespace glq::lattice_rep
