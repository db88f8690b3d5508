#pragma once

// Truncated two-mode Fock representation |n,m>, 0 <= n,m <= N, of the
// gl_q(2)-covariant oscillator algebra, plus numerical checks of the defining
// relations and of the H/T spectrum.

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "glq/qspecial.hpp"

namespace glq::fockrep {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct FockIndex
{
    int n = 0;
    int m = 0;
    friend bool operator==(const FockIndex&, const FockIndex&) = default;
};

enum class Mode { a1, a2, a1dag, a2dag, N1, N2, H, T };

inline const char* to_string(Mode m)
{
    switch (m) {
    case Mode::a1: return "a1";
    case Mode::a2: return "a2";
    case Mode::a1dag: return "a1dag";
    case Mode::a2dag: return "a2dag";
    case Mode::N1: return "N1";
    case Mode::N2: return "N2";
    case Mode::H: return "H";
    case Mode::T: return "T";
    }
    return "?";
}

/// Square truncation n, m <= N in row-major order (n major, m minor).
class TruncatedFockSpace
{
public:
    TruncatedFockSpace(DeformationParameter dp, int cutoff)
        : dp_(dp), cutoff_(cutoff)
    {
        if (cutoff < 1)
            throw ContractViolation("TruncatedFockSpace: cutoff must be >= 1");
    }

    const DeformationParameter& dp() const noexcept { return dp_; }
    int cutoff() const noexcept { return cutoff_; }
    int side() const noexcept { return cutoff_ + 1; }
    int dimension() const noexcept { return side() * side(); }

    bool contains(int n, int m) const noexcept { return n >= 0 && m >= 0 && n <= cutoff_ && m <= cutoff_; }

    int index(int n, int m) const
    {
        if (!contains(n, m))
            throw ContractViolation("Fock index (" + std::to_string(n) + "," + std::to_string(m) +
                                    ") outside cutoff " + std::to_string(cutoff_));
        return n * side() + m;
    }
    int index(FockIndex i) const { return index(i.n, i.m); }

    FockIndex label(int i) const { return {i / side(), i % side()}; }

    /// Indices of basis states with n, m <= N - margin.
    std::vector<int> interior(int margin = 2) const
    {
        std::vector<int> out;
        for (int n = 0; n <= cutoff_ - margin; ++n)
            for (int m = 0; m <= cutoff_ - margin; ++m)
                out.push_back(index(n, m));
        return out;
    }

    Vector basis_vector(int n, int m) const
    {
        Vector v = Vector::Zero(dimension());
        v(index(n, m)) = 1.0;
        return v;
    }

private:
    DeformationParameter dp_;
    int cutoff_;
};

inline TruncatedFockSpace build_space(DeformationParameter dp, int cutoff) { return {dp, cutoff}; }

struct ModeMatrix
{
    Mode which;
    Matrix entries;
    TruncatedFockSpace space;
};

namespace detail {

// a1|n,m> = sqrt(q^m [n]) |n-1,m>,  a2|n,m> = sqrt([m]) |n,m-1>
inline Matrix ladder(const TruncatedFockSpace& s, Mode which)
{
    const auto& dp = s.dp();
    const int N = s.cutoff();
    Matrix M = Matrix::Zero(s.dimension(), s.dimension());
    for (int n = 0; n <= N; ++n) {
        for (int m = 0; m <= N; ++m) {
            const int col = s.index(n, m);
            switch (which) {
            case Mode::a1:
                if (n >= 1)
                    M(s.index(n - 1, m), col) = std::sqrt(dp.pow(m) * q_number(dp, n));
                break;
            case Mode::a1dag:
                if (n + 1 <= N)
                    M(s.index(n + 1, m), col) = std::sqrt(dp.pow(m) * q_number(dp, n + 1));
                break;
            case Mode::a2:
                if (m >= 1)
                    M(s.index(n, m - 1), col) = std::sqrt(q_number(dp, m));
                break;
            case Mode::a2dag:
                if (m + 1 <= N)
                    M(s.index(n, m + 1), col) = std::sqrt(q_number(dp, m + 1));
                break;
            case Mode::N1: M(col, col) = n; break;
            case Mode::N2: M(col, col) = m; break;
            default: break;
            }
        }
    }
    return M;
}

} // namespace detail

/// Matrix image of a mode operator. H and T are built as operator
/// polynomials, H = a1dag a1 + a2dag a2 - nu and T = a2dag a2 - nu.
inline ModeMatrix build_operator(const TruncatedFockSpace& space, Mode which)
{
    if (which == Mode::H || which == Mode::T) {
        const Matrix a2 = detail::ladder(space, Mode::a2);
        const Matrix a2d = detail::ladder(space, Mode::a2dag);
        const Matrix id = Matrix::Identity(space.dimension(), space.dimension());
        Matrix M = a2d * a2 - space.dp().nu() * id;
        if (which == Mode::H)
            M += detail::ladder(space, Mode::a1dag) * detail::ladder(space, Mode::a1);
        return {which, std::move(M), space};
    }
    return {which, detail::ladder(space, which), space};
}

/// Residual norms of the algebra relations on the interior.
struct ResidualReport
{
    double q = 0.0;
    int cutoff = 0;
    std::string norm_kind = "frobenius";
    std::string region;
    bool interior_empty = false;
    std::map<std::string, double> residuals;

    double max_residual() const
    {
        double r = 0.0;
        for (const auto& [_, v] : residuals)
            r = std::max(r, v);
        return r;
    }
};

/// Frobenius norm of the columns of R indexed by `domain` (an upper bound on
/// the operator norm of R restricted to span(domain)).
inline double restricted_norm(const Matrix& R, const std::vector<int>& domain)
{
    double s = 0.0;
    for (int c : domain)
        s += R.col(c).squaredNorm();
    return std::sqrt(s);
}

inline ResidualReport relation_residuals(const TruncatedFockSpace& space)
{
    ResidualReport rep;
    rep.q = space.dp().q();
    rep.cutoff = space.cutoff();
    rep.region = "domain n,m <= N-2, full range";

    const std::vector<int> dom = space.interior(2);
    if (dom.empty()) {
        rep.interior_empty = true;
        return rep;
    }

    const double q = space.dp().q();
    const double s = space.dp().sqrt_q();
    const Matrix a1 = build_operator(space, Mode::a1).entries;
    const Matrix a2 = build_operator(space, Mode::a2).entries;
    const Matrix a1d = build_operator(space, Mode::a1dag).entries;
    const Matrix a2d = build_operator(space, Mode::a2dag).entries;
    const Matrix n1 = build_operator(space, Mode::N1).entries;
    const Matrix n2 = build_operator(space, Mode::N2).entries;
    const Matrix id = Matrix::Identity(space.dimension(), space.dimension());

    auto put = [&](const char* name, const Matrix& R) { rep.residuals[name] = restricted_norm(R, dom); };

    put("a1dag a2dag = sqrt(q) a2dag a1dag", a1d * a2d - s * a2d * a1d);
    put("a1 a2 = q^(-1/2) a2 a1", a1 * a2 - (1.0 / s) * a2 * a1);
    put("a1 a2dag = sqrt(q) a2dag a1", a1 * a2d - s * a2d * a1);
    put("a2 a1dag = sqrt(q) a1dag a2", a2 * a1d - s * a1d * a2);
    put("a1 a1dag = 1 + q a1dag a1 + (q-1) a2dag a2", a1 * a1d - id - q * a1d * a1 - (q - 1.0) * a2d * a2);
    put("a2 a2dag = 1 + q a2dag a2", a2 * a2d - id - q * a2d * a2);

    put("[N1,a1] = -a1", n1 * a1 - a1 * n1 + a1);
    put("[N2,a2] = -a2", n2 * a2 - a2 * n2 + a2);
    put("[N1,a1dag] = a1dag", n1 * a1d - a1d * n1 - a1d);
    put("[N2,a2dag] = a2dag", n2 * a2d - a2d * n2 - a2d);
    put("[N1,a2] = 0", n1 * a2 - a2 * n1);
    put("[N2,a1] = 0", n2 * a1 - a1 * n2);
    put("[N1,a2dag] = 0", n1 * a2d - a2d * n1);
    put("[N2,a1dag] = 0", n2 * a1d - a1d * n2);
    return rep;
}

struct SpectrumEntry
{
    FockIndex index;
    double energy;          // diagonal of H
    double t;               // diagonal of T
    double energy_formula;  // -q^{n+m}/(1-q)
    double t_formula;       // -q^m/(1-q)
};

/// Eigenvalues of H, T read off the operator-polynomial matrices, next to the closed forms.
inline std::vector<SpectrumEntry> spectrum_check(const TruncatedFockSpace& space)
{
    const Matrix H = build_operator(space, Mode::H).entries;
    const Matrix T = build_operator(space, Mode::T).entries;
    const double q = space.dp().q();
    std::vector<SpectrumEntry> out;
    out.reserve(space.dimension());
    for (int i = 0; i < space.dimension(); ++i) {
        const FockIndex f = space.label(i);
        out.push_back({f, H(i, i).real(), T(i, i).real(), -std::pow(q, f.n + f.m) / (1.0 - q),
                       -std::pow(q, f.m) / (1.0 - q)});
    }
    return out;
}

/// Frobenius norm of [H,T] on the interior.
inline double commutator_HT_residual(const TruncatedFockSpace& space)
{
    const Matrix H = build_operator(space, Mode::H).entries;
    const Matrix T = build_operator(space, Mode::T).entries;
    return restricted_norm(H * T - T * H, space.interior(2));
}

/// Off-diagonal Frobenius mass of a matrix.
inline double off_diagonal_mass(const Matrix& M)
{
    Matrix D = M;
    D.diagonal().setZero();
    return D.norm();
}

/// (a2dag)^m (a1dag)^n |0,0> / sqrt([n]! [m]!), a1dag applied first.
inline Vector build_number_state(const TruncatedFockSpace& space, int n, int m)
{
    if (!space.contains(n, m))
        throw ContractViolation("build_number_state: (" + std::to_string(n) + "," + std::to_string(m) +
                                ") beyond cutoff");
    const Matrix a1d = build_operator(space, Mode::a1dag).entries;
    const Matrix a2d = build_operator(space, Mode::a2dag).entries;
    Vector v = space.basis_vector(0, 0);
    for (int k = 0; k < n; ++k)
        v = a1d * v;
    for (int k = 0; k < m; ++k)
        v = a2d * v;
    return v / std::sqrt(q_factorial(space.dp(), n) * q_factorial(space.dp(), m));
}

} // namespace glq::fockrep
