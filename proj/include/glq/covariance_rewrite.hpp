#pragma once

// Exact noncommutative rewriting over the quantum-matrix entries a, b, c, d
// and the oscillator modes a1dag, a2dag, a1, a2, with coefficients that are
// Laurent polynomials in s = sqrt(q) over the rationals.
//
// Order a < b < c < d < a1dag < a2dag < a1 < a2; a word is in normal form
// iff it is non-decreasing. Every decreasing adjacent pair has a rule.

#include <algorithm>
#include <array>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "glq/errors.hpp"

namespace glq::covariance {

using Rational = boost::rational<long long>;

/// Laurent polynomial in s with rational coefficients; zero terms are never stored.
class Laurent
{
public:
    Laurent() = default;
    Laurent(long long c) { add(0, Rational(c)); }  // NOLINT(google-explicit-constructor)
    static Laurent monomial(int power, Rational c = 1)
    {
        Laurent l;
        l.add(power, c);
        return l;
    }
    static Laurent s(int power = 1) { return monomial(power); }

    bool is_zero() const noexcept { return terms_.empty(); }
    const std::map<int, Rational>& terms() const noexcept { return terms_; }

    Rational coefficient(int power) const
    {
        const auto it = terms_.find(power);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    Laurent& operator+=(const Laurent& o)
    {
        for (const auto& [p, c] : o.terms_)
            add(p, c);
        return *this;
    }
    Laurent& operator-=(const Laurent& o)
    {
        for (const auto& [p, c] : o.terms_)
            add(p, -c);
        return *this;
    }
    friend Laurent operator+(Laurent a, const Laurent& b) { return a += b; }
    friend Laurent operator-(Laurent a, const Laurent& b) { return a -= b; }
    friend Laurent operator-(const Laurent& a) { return Laurent{} - a; }
    friend Laurent operator*(const Laurent& a, const Laurent& b)
    {
        Laurent r;
        for (const auto& [p, c] : a.terms_)
            for (const auto& [p2, c2] : b.terms_)
                r.add(p + p2, c * c2);
        return r;
    }
    Laurent& operator*=(const Laurent& o) { return *this = *this * o; }
    friend bool operator==(const Laurent&, const Laurent&) = default;

    /// Canonical text, highest power first, e.g. "s^2 - 1", "-1/2 s^-1", "0".
    std::string str() const
    {
        if (terms_.empty())
            return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            Rational c = it->second;
            const int p = it->first;
            if (first) {
                if (c.numerator() < 0) {
                    os << "-";
                    c = -c;
                }
            } else {
                os << (c.numerator() < 0 ? " - " : " + ");
                if (c.numerator() < 0)
                    c = -c;
            }
            first = false;
            const bool unit = c == Rational(1);
            if (!unit || p == 0) {
                os << c.numerator();
                if (c.denominator() != 1)
                    os << "/" << c.denominator();
            }
            if (p != 0) {
                if (!unit)
                    os << " ";
                os << "s";
                if (p != 1)
                    os << "^" << p;
            }
        }
        return os.str();
    }

private:
    void add(int p, Rational c)
    {
        if (c.numerator() == 0)
            return;
        auto [it, inserted] = terms_.try_emplace(p, c);
        if (!inserted) {
            it->second += c;
            if (it->second.numerator() == 0)
                terms_.erase(it);
        }
    }
    std::map<int, Rational> terms_;
};

enum class Gen : unsigned char { A, B, C, D, A1dag, A2dag, A1, A2 };

inline constexpr std::array<Gen, 8> all_generators{Gen::A,     Gen::B,     Gen::C,  Gen::D,
                                                   Gen::A1dag, Gen::A2dag, Gen::A1, Gen::A2};

inline const char* name(Gen g)
{
    static constexpr const char* names[] = {"a", "b", "c", "d", "a1dag", "a2dag", "a1", "a2"};
    return names[static_cast<int>(g)];
}

inline bool is_entry(Gen g) { return g <= Gen::D; }

using Word = std::vector<Gen>;

/// Degree first, then lexicographic in the generator order.
struct DegLex
{
    bool operator()(const Word& x, const Word& y) const
    {
        if (x.size() != y.size())
            return x.size() < y.size();
        return x < y;
    }
};

inline std::string word_str(const Word& w)
{
    if (w.empty())
        return "1";
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i)
            s += "*";
        s += name(w[i]);
    }
    return s;
}

inline bool is_sorted_word(const Word& w)
{
    for (std::size_t i = 0; i + 1 < w.size(); ++i)
        if (w[i] > w[i + 1])
            return false;
    return true;
}

class NCPolynomial
{
public:
    using Terms = std::map<Word, Laurent, DegLex>;

    NCPolynomial() = default;
    NCPolynomial(Laurent c) { add(Word{}, std::move(c)); }  // NOLINT(google-explicit-constructor)
    NCPolynomial(long long c) : NCPolynomial(Laurent(c)) {}  // NOLINT(google-explicit-constructor)
    NCPolynomial(Gen g) { add(Word{g}, Laurent(1)); }        // NOLINT(google-explicit-constructor)
    static NCPolynomial term(Word w, Laurent c = 1)
    {
        NCPolynomial p;
        p.add(std::move(w), std::move(c));
        return p;
    }

    bool is_zero() const noexcept { return terms_.empty(); }
    const Terms& terms() const noexcept { return terms_; }
    std::size_t degree() const { return terms_.empty() ? 0 : terms_.rbegin()->first.size(); }

    Laurent coefficient(const Word& w) const
    {
        const auto it = terms_.find(w);
        return it == terms_.end() ? Laurent{} : it->second;
    }

    void add(Word w, Laurent c)
    {
        if (c.is_zero())
            return;
        auto [it, inserted] = terms_.try_emplace(std::move(w), c);
        if (!inserted) {
            it->second += c;
            if (it->second.is_zero())
                terms_.erase(it);
        }
    }

    NCPolynomial& operator+=(const NCPolynomial& o)
    {
        for (const auto& [w, c] : o.terms_)
            add(w, c);
        return *this;
    }
    NCPolynomial& operator-=(const NCPolynomial& o)
    {
        for (const auto& [w, c] : o.terms_)
            add(w, -c);
        return *this;
    }
    friend NCPolynomial operator+(NCPolynomial a, const NCPolynomial& b) { return a += b; }
    friend NCPolynomial operator-(NCPolynomial a, const NCPolynomial& b) { return a -= b; }
    friend NCPolynomial operator*(const NCPolynomial& a, const NCPolynomial& b)
    {
        NCPolynomial r;
        for (const auto& [w1, c1] : a.terms_)
            for (const auto& [w2, c2] : b.terms_) {
                Word w = w1;
                w.insert(w.end(), w2.begin(), w2.end());
                r.add(std::move(w), c1 * c2);
            }
        return r;
    }
    friend NCPolynomial operator*(const Laurent& c, const NCPolynomial& p)
    {
        NCPolynomial r;
        for (const auto& [w, c2] : p.terms_)
            r.add(w, c * c2);
        return r;
    }
    friend bool operator==(const NCPolynomial&, const NCPolynomial&) = default;

    bool is_canonical() const
    {
        for (const auto& [w, _] : terms_)
            if (!is_sorted_word(w))
                return false;
        return true;
    }

    /// Terms in increasing degree-lex order, "(coeff) w1*w2 + ...", or "0".
    std::string str() const
    {
        if (terms_.empty())
            return "0";
        std::string s;
        bool first = true;
        for (const auto& [w, c] : terms_) {
            if (!first)
                s += " + ";
            first = false;
            const std::string cs = c.str();
            if (w.empty())
                s += cs.find(' ') == std::string::npos ? cs : "(" + cs + ")";
            else if (cs == "1")
                s += word_str(w);
            else
                s += "(" + cs + ") " + word_str(w);
        }
        return s;
    }

private:
    Terms terms_;
};

class RewriteSystem
{
public:
    static constexpr std::size_t degree_cap = 12;

    /// The oriented defining relations of the quantum matrix and the oscillator
    /// algebra, plus mode*entry -> entry*mode.
    static RewriteSystem standard()
    {
        RewriteSystem rs;
        const Laurent s = Laurent::s(1), si = Laurent::s(-1), s2 = Laurent::s(2);
        auto w = [](std::initializer_list<Gen> g) { return Word(g); };
        using enum Gen;
        rs.set(B, A, NCPolynomial::term(w({A, B}), si));
        rs.set(C, A, NCPolynomial::term(w({A, C}), si));
        rs.set(D, C, NCPolynomial::term(w({C, D}), si));
        rs.set(D, B, NCPolynomial::term(w({B, D}), si));
        rs.set(C, B, NCPolynomial::term(w({B, C})));
        rs.set(D, A, NCPolynomial::term(w({A, D})) - NCPolynomial::term(w({B, C}), s - si));
        rs.set(A2dag, A1dag, NCPolynomial::term(w({A1dag, A2dag}), si));
        rs.set(A2, A1, NCPolynomial::term(w({A1, A2}), s));
        rs.set(A1, A2dag, NCPolynomial::term(w({A2dag, A1}), s));
        rs.set(A2, A1dag, NCPolynomial::term(w({A1dag, A2}), s));
        rs.set(A1, A1dag, NCPolynomial(1) + NCPolynomial::term(w({A1dag, A1}), s2) +
                              NCPolynomial::term(w({A2dag, A2}), s2 - Laurent(1)));
        rs.set(A2, A2dag, NCPolynomial(1) + NCPolynomial::term(w({A2dag, A2}), s2));
        for (Gen m : {A1dag, A2dag, A1, A2})
            for (Gen e : {A, B, C, D})
                rs.set(m, e, NCPolynomial::term(w({e, m})));
        return rs;
    }

    const NCPolynomial* rule(Gen x, Gen y) const
    {
        const auto& r = rules_[idx(x, y)];
        return r.first ? &r.second : nullptr;
    }

    /// Rule patterns in a fixed order.
    std::vector<std::pair<Gen, Gen>> patterns() const
    {
        std::vector<std::pair<Gen, Gen>> out;
        for (Gen x : all_generators)
            for (Gen y : all_generators)
                if (rule(x, y))
                    out.emplace_back(x, y);
        return out;
    }

    /// Replace the pair at position pos of w by its rule (pos must be a rule pattern).
    NCPolynomial rewrite_at(const Word& w, std::size_t pos) const
    {
        if (pos + 1 >= w.size())
            throw ContractViolation("rewrite_at: position out of range");
        const NCPolynomial* r = rule(w[pos], w[pos + 1]);
        if (!r)
            throw ContractViolation("rewrite_at: no rule for " + std::string(name(w[pos])) + name(w[pos + 1]));
        const Word prefix(w.begin(), w.begin() + static_cast<long>(pos));
        const Word suffix(w.begin() + static_cast<long>(pos) + 2, w.end());
        return NCPolynomial::term(prefix) * *r * NCPolynomial::term(suffix);
    }

    /// Rewrite until every word is sorted. Terms are taken largest-first in
    /// degree-lex order, which every rule strictly decreases.
    NCPolynomial normal_form(const NCPolynomial& p) const
    {
        NCPolynomial::Terms pending;
        NCPolynomial done;
        auto push = [&](const Word& w, const Laurent& c) {
            if (w.size() > degree_cap)
                throw ContractViolation("normal_form: word degree exceeds cap " + std::to_string(degree_cap));
            auto [it, inserted] = pending.try_emplace(w, c);
            if (!inserted) {
                it->second += c;
                if (it->second.is_zero())
                    pending.erase(it);
            }
        };
        for (const auto& [w, c] : p.terms())
            push(w, c);
        while (!pending.empty()) {
            auto it = std::prev(pending.end());
            const Word w = it->first;
            const Laurent c = it->second;
            pending.erase(it);
            std::size_t pos = 0;
            while (pos + 1 < w.size() && w[pos] <= w[pos + 1])
                ++pos;
            if (pos + 1 >= w.size()) {
                done.add(w, c);
                continue;
            }
            const NCPolynomial next = rewrite_at(w, pos);
            for (const auto& [w2, c2] : next.terms())
                push(w2, c * c2);
        }
        return done;
    }

private:
    static std::size_t idx(Gen x, Gen y) { return static_cast<std::size_t>(x) * 8 + static_cast<std::size_t>(y); }
    void set(Gen x, Gen y, NCPolynomial r) { rules_[idx(x, y)] = {true, std::move(r)}; }
    std::array<std::pair<bool, NCPolynomial>, 64> rules_{};
};

inline NCPolynomial normal_form(const NCPolynomial& p, const RewriteSystem& rs = RewriteSystem::standard())
{
    return rs.normal_form(p);
}

struct CriticalPair
{
    Word word;
    NCPolynomial left;      // normal form after rewriting the first pair
    NCPolynomial right;     // normal form after rewriting the second pair
    NCPolynomial residual;  // left - right
};

/// All overlaps xyz where xy and yz are both rule patterns.
inline std::vector<CriticalPair> overlap_check(const RewriteSystem& rs = RewriteSystem::standard())
{
    std::vector<CriticalPair> out;
    for (Gen x : all_generators)
        for (Gen y : all_generators)
            for (Gen z : all_generators) {
                if (!rs.rule(x, y) || !rs.rule(y, z))
                    continue;
                const Word w{x, y, z};
                CriticalPair cp{w, rs.normal_form(rs.rewrite_at(w, 0)), rs.normal_form(rs.rewrite_at(w, 1)), {}};
                cp.residual = cp.left - cp.right;
                out.push_back(std::move(cp));
            }
    return out;
}

enum class MatrixAction { row, column, row_T, column_T };

inline const char* to_string(MatrixAction k)
{
    switch (k) {
    case MatrixAction::row: return "row";
    case MatrixAction::column: return "column";
    case MatrixAction::row_T: return "row-T";
    case MatrixAction::column_T: return "column-T";
    }
    return "?";
}

inline constexpr std::array<MatrixAction, 4> all_actions{MatrixAction::row, MatrixAction::column,
                                                         MatrixAction::row_T, MatrixAction::column_T};

struct Convention
{
    MatrixAction creators = MatrixAction::row;
    MatrixAction annihilators = MatrixAction::column;

    std::string str() const
    {
        return std::string("creators-") + to_string(creators) + " annihilators-" + to_string(annihilators);
    }
};

struct PrimedOperators
{
    NCPolynomial a1;
    NCPolynomial a2;
    NCPolynomial a1dag;
    NCPolynomial a2dag;
};

namespace detail {

// (x1', x2') for the pair (x1, x2) transformed by M = [[a, b], [c, d]].
inline std::pair<NCPolynomial, NCPolynomial> transform(MatrixAction k, Gen x1, Gen x2)
{
    using enum Gen;
    auto t = [](Gen e, Gen m) { return NCPolynomial::term(Word{e, m}); };
    switch (k) {
    case MatrixAction::column:
    case MatrixAction::row_T:
        return {t(A, x1) + t(B, x2), t(C, x1) + t(D, x2)};
    case MatrixAction::row:
    case MatrixAction::column_T:
        return {t(A, x1) + t(C, x2), t(B, x1) + t(D, x2)};
    }
    return {};
}

} // namespace detail

/// Primed modes as entry*mode polynomials. column: x' = M x; row: x'^T = x^T M;
/// the transposed variants use M^T in place of M.
inline PrimedOperators primed_operators(const Convention& cv)
{
    auto [c1, c2] = detail::transform(cv.creators, Gen::A1dag, Gen::A2dag);
    auto [n1, n2] = detail::transform(cv.annihilators, Gen::A1, Gen::A2);
    return {std::move(n1), std::move(n2), std::move(c1), std::move(c2)};
}

struct RelationResidual
{
    std::string relation;
    NCPolynomial residual;  // normal form of lhs - rhs
    bool pure_creator;
};

inline std::vector<RelationResidual> covariance_report(const Convention& cv,
                                                       const RewriteSystem& rs = RewriteSystem::standard())
{
    const PrimedOperators p = primed_operators(cv);
    const Laurent s = Laurent::s(1), si = Laurent::s(-1), s2 = Laurent::s(2);
    std::vector<RelationResidual> out;
    auto put = [&](const char* name, const NCPolynomial& diff, bool pure_creator) {
        out.push_back({name, rs.normal_form(diff), pure_creator});
    };
    put("a1dag a2dag = sqrt(q) a2dag a1dag", p.a1dag * p.a2dag - s * (p.a2dag * p.a1dag), true);
    put("a1 a2 = q^(-1/2) a2 a1", p.a1 * p.a2 - si * (p.a2 * p.a1), false);
    put("a1 a2dag = sqrt(q) a2dag a1", p.a1 * p.a2dag - s * (p.a2dag * p.a1), false);
    put("a2 a1dag = sqrt(q) a1dag a2", p.a2 * p.a1dag - s * (p.a1dag * p.a2), false);
    put("a1 a1dag = 1 + q a1dag a1 + (q-1) a2dag a2",
        p.a1 * p.a1dag - NCPolynomial(1) - s2 * (p.a1dag * p.a1) - (s2 - Laurent(1)) * (p.a2dag * p.a2), false);
    put("a2 a2dag = 1 + q a2dag a2", p.a2 * p.a2dag - NCPolynomial(1) - s2 * (p.a2dag * p.a2), false);
    return out;
}

struct ConventionScore
{
    Convention convention;
    int zero_relations;
};

/// Every creators x annihilators combination, ranked by the number of relations
/// that close exactly (stable: ties keep enumeration order).
inline std::vector<ConventionScore> rank_conventions(const RewriteSystem& rs = RewriteSystem::standard())
{
    std::vector<ConventionScore> out;
    for (MatrixAction c : all_actions)
        for (MatrixAction a : all_actions) {
            const Convention cv{c, a};
            int zeros = 0;
            for (const auto& r : covariance_report(cv, rs))
                zeros += r.residual.is_zero();
            out.push_back({cv, zeros});
        }
    std::stable_sort(out.begin(), out.end(),
                     [](const ConventionScore& x, const ConventionScore& y) { return x.zero_relations > y.zero_relations; });
    return out;
}

} // namespace glq::covariance
