#include <random>

#include <gtest/gtest.h>

#include "glq/qspecial.hpp"

using namespace glq;

namespace {

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

const DeformationParameter half(0.5);

// 0psi1(b; q, z) summed from per-factor products:
// t_n = prod_{j<n} -q^j z/(1 - b q^j),  t_{-k} = prod_{i=1..k} (b - q^i)/z
cplx brute_0psi1(cplx b, double q, cplx z, int K)
{
    cplx s{1.0, 0.0}, t{1.0, 0.0};
    for (int j = 0; j < K; ++j) {
        t *= -std::pow(q, j) * z / (1.0 - b * std::pow(q, j));
        s += t;
    }
    t = 1.0;
    for (int i = 1; i <= K; ++i) {
        t *= (b - std::pow(q, i)) / z;
        s += t;
    }
    return s;
}

} // namespace

TEST(DeformationParameter, RejectsOutsideUnitInterval)
{
    EXPECT_THROW(DeformationParameter(0.0), ContractViolation);
    EXPECT_THROW(DeformationParameter(1.0), ContractViolation);
    EXPECT_THROW(DeformationParameter(1.5), ContractViolation);
    EXPECT_THROW(DeformationParameter(-0.2), ContractViolation);
    EXPECT_DOUBLE_EQ(DeformationParameter(0.25).nu(), 1.0 / 0.75);
}

TEST(QNumber, Examples)
{
    EXPECT_DOUBLE_EQ(q_number(half, 0), 0.0);
    EXPECT_DOUBLE_EQ(q_number(half, 1), 1.0);
    EXPECT_DOUBLE_EQ(q_number(half, 2), 1.5);
}

TEST(QNumber, ClassicalLimitIsMonotone)
{
    for (int n : {2, 5, 10}) {
        double prev = std::numeric_limits<double>::infinity();
        for (double q : {0.9, 0.99, 0.999}) {
            const double d = std::abs(q_number(DeformationParameter(q), n) - n);
            EXPECT_LT(d, prev);
            prev = d;
        }
    }
}

TEST(QFactorial, Examples)
{
    EXPECT_DOUBLE_EQ(q_factorial(half, 0), 1.0);
    EXPECT_DOUBLE_EQ(q_factorial(half, 1), 1.0);
    EXPECT_DOUBLE_EQ(q_factorial(half, 3), 2.625);
    EXPECT_THROW(q_factorial(half, -1), ContractViolation);
}

TEST(QFactorial, IsProductOfQNumbers)
{
    for (double q : {0.2, 0.5, 0.8}) {
        const DeformationParameter dp(q);
        double p = 1.0;
        for (int n = 1; n <= 12; ++n) {
            p *= q_number(dp, n);
            EXPECT_NEAR(q_factorial(dp, n), p, 1e-14 * p);
            EXPECT_NEAR(q_number(dp, n), (1.0 - std::pow(q, n)) / (1.0 - q), 1e-14);
            EXPECT_GE(q_number(dp, n), 0.0);
        }
    }
}

TEST(QPochhammer, FiniteExamples)
{
    EXPECT_EQ(q_pochhammer(cplx(3.7, -1.0), half, 0), cplx(1.0));
    EXPECT_EQ(q_pochhammer(2.0, half, 2), cplx(0.0));
    EXPECT_NEAR(std::abs(q_pochhammer(0.25, half, -1) - 2.0), 0.0, 1e-15);
}

TEST(QPochhammer, NegativeOrderPole)
{
    // (q;q)_{-1} = 1/(1 - q q^{-1})
    EXPECT_THROW(q_pochhammer(0.5, half, -1), PoleError);
    EXPECT_THROW(q_pochhammer(0.25, half, -3), PoleError);
}

TEST(QPochhammer, InfiniteOrderOracle)
{
    const auto v = q_pochhammer(0.5, half, PochhammerOrder::infinite(), 1e-17);
    EXPECT_LT(rel(v.value, 0.2887880950866024212789), 1e-15);
    EXPECT_TRUE(v.converged);
    EXPECT_LT(v.tail_estimate, 1e-17 * 0.5);
    const auto w = q_pochhammer(-0.3, half, PochhammerOrder::infinite(), 1e-17);
    EXPECT_LT(rel(w.value, 1.73070518218929168261), 1e-15);
}

TEST(QPochhammer, SpliceProperty)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> ua(-2.0, 2.0), uq(0.1, 0.9);
    std::uniform_int_distribution<int> un(0, 8);
    for (int t = 0; t < 200; ++t) {
        const DeformationParameter dp(uq(rng));
        const cplx a(ua(rng), ua(rng));
        const int n = un(rng), m = un(rng);
        const cplx lhs = q_pochhammer(a, dp, n + m);
        const cplx rhs = q_pochhammer(a, dp, n) * q_pochhammer(a * dp.pow(n), dp, m);
        EXPECT_LE(std::abs(lhs - rhs), 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST(QPochhammer, NegativeOrderInverse)
{
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> ua(-2.0, 2.0), uq(0.1, 0.9);
    std::uniform_int_distribution<int> un(1, 8);
    for (int t = 0; t < 200; ++t) {
        const DeformationParameter dp(uq(rng));
        const cplx a(ua(rng), ua(rng));
        const int n = un(rng);
        EXPECT_LT(std::abs(q_pochhammer(a, dp, -n) * q_pochhammer(a * dp.pow(-n), dp, n) - 1.0), 1e-12);
    }
}

TEST(ShiftIdentity, Examples)
{
    auto s0 = verify_shift_identity(0.3, half, 0, 4);
    EXPECT_LT(rel(s0.lhs, q_pochhammer(0.3, half, 4)), 1e-15);
    EXPECT_LT(rel(s0.lhs, s0.rhs), 1e-15);
    auto s1 = verify_shift_identity(0.3, half, 2, 5);
    EXPECT_LT(rel(s1.lhs, s1.rhs), 1e-12);
    auto s2 = verify_shift_identity(-1.2, DeformationParameter(0.7), 3, 3);
    EXPECT_LT(rel(s2.lhs, s2.rhs), 1e-12);
    EXPECT_THROW(verify_shift_identity(0.0, half, 1, 2), ZeroArgumentError);
}

TEST(ShiftIdentity, RandomSamples)
{
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> ua(0.2, 3.0), uphase(0.0, 6.283185307179586), uq(0.2, 0.8);
    std::uniform_int_distribution<int> um(0, 6), ud(0, 6);
    for (int t = 0; t < 100; ++t) {
        const DeformationParameter dp(uq(rng));
        const cplx a = std::polar(ua(rng), uphase(rng));
        const int m = um(rng), n = m + ud(rng);
        const auto s = verify_shift_identity(a, dp, m, n);
        EXPECT_LE(std::abs(s.lhs - s.rhs), 1e-10 * std::max(std::abs(s.lhs), std::abs(s.rhs)));
    }
}

TEST(QExp, Examples)
{
    const auto z = q_exp(half, 0.0, 1e-14);
    EXPECT_EQ(z.value, cplx(1.0));
    EXPECT_TRUE(z.converged);
    const auto one = q_exp(half, 1.0, 1e-15);
    EXPECT_LT(rel(one.value, 3.462746619455063611537957), 1e-14);
    EXPECT_TRUE(one.converged);
    EXPECT_THROW(q_exp(half, 2.5, 1e-10), DivergenceError);
    EXPECT_THROW(q_exp(half, 2.0, 1e-10), DivergenceError);
}

TEST(QExp, NearRadiusAndComplexOracle)
{
    const auto v = q_exp(half, 1.9, 1e-15);
    EXPECT_LT(rel(v.value, 63.99720823573140805066793), 1e-13);
    const auto w = q_exp(half, cplx(0.0, 0.5), 1e-15);
    EXPECT_LT(rel(w.value, cplx(0.8452490158823991004507942, 0.4554606666245585252388984)), 1e-14);
}

TEST(QExp, ConvergedImpliesTailWithinTolerance)
{
    for (double x : {0.1, 0.7, 1.3, 1.99}) {
        const double tol = 1e-12;
        const auto v = q_exp(half, x, tol);
        ASSERT_TRUE(v.converged);
        EXPECT_LE(v.tail_estimate, tol * std::max(1.0, std::abs(v.value)));
    }
}

TEST(BilateralPsi, ZeroTermBudgetKeepsCentralTerm)
{
    const auto v = bilateral_psi({}, {cplx(-1.0)}, half, -2.0, 1e-12, 0);
    EXPECT_EQ(v.value, cplx(1.0));
    EXPECT_FALSE(v.converged);
}

TEST(BilateralPsi, ZeroPsiOneAgainstBruteForce)
{
    // 0psi1(-nu/mu; q, -|z2|^2/mu) at q = 0.5, mu = 2, z2 = 2
    const auto v = bilateral_psi({}, {cplx(-1.0)}, half, -2.0, 1e-15, 200);
    ASSERT_TRUE(v.converged);
    EXPECT_LT(rel(v.value, 4.768462058062743446231808), 1e-13);

    EXPECT_LT(rel(v.value, brute_0psi1(-1.0, 0.5, -2.0, 120)), 1e-13);

    const std::array<cplx, 1> b{cplx(-1.0)};
    for (int n = -20; n <= 20; ++n) {
        const cplx lhs = bilateral_psi_term({}, b, half, -2.0, n);
        const cplx rhs = [&] {
            cplx t{1.0, 0.0};
            if (n >= 0)
                for (int j = 0; j < n; ++j)
                    t *= -std::pow(0.5, j) * -2.0 / (1.0 + std::pow(0.5, j));
            else
                for (int i = 1; i <= -n; ++i)
                    t *= (-1.0 - std::pow(0.5, i)) / -2.0;
            return t;
        }();
        EXPECT_LT(rel(lhs, rhs), 1e-12) << "n = " << n;
    }
}

TEST(BilateralPsi, DegenerateSpecExampleHitsPole)
{
    // b = mu/lambda = 2 = 1/q: (b;q)_n vanishes for n >= 2
    EXPECT_THROW(bilateral_psi({}, {cplx(2.0)}, half, -0.09, 1e-12, 200), PoleError);
}

TEST(BilateralPsi, BackwardTailNeedsLargeArgument)
{
    // n -> -inf needs |z| > |b|: here |z| = 0.09 < 1.7
    EXPECT_THROW(bilateral_psi({}, {cplx(1.7)}, half, -0.09, 1e-12, 200), NonConvergenceError);
    EXPECT_NO_THROW(bilateral_psi({}, {cplx(1.7)}, half, -16.0, 1e-12, 200));
}

TEST(BilateralPsi, TrailingParameterQGivesUnilateralSum)
{
    // 1psi1(a; q; q, z) = sum_{n>=0} (a;q)_n/(q;q)_n z^n = (az;q)_inf/(z;q)_inf
    const std::array<cplx, 1> a{cplx(0.3)};
    const std::array<cplx, 1> b{cplx(0.5)};
    for (int n = -1; n >= -10; --n)
        EXPECT_EQ(bilateral_psi_term(a, b, half, 0.4, n), cplx(0.0));
    const auto v = bilateral_psi(a, b, half, 0.4, 1e-15, 200);
    ASSERT_TRUE(v.converged);
    EXPECT_LT(rel(v.value, 1.995164350820907645997), 1e-13);
    EXPECT_EQ(v.backward_terms, 1);
}

TEST(BilateralPsi, LeadingParameterQIsAPole)
{
    EXPECT_THROW(bilateral_psi({cplx(0.5)}, {cplx(0.3)}, half, 0.4, 1e-12, 200), PoleError);
}

TEST(BilateralPsi, ContractChecks)
{
    EXPECT_THROW(bilateral_psi({}, {cplx(0.3)}, half, 0.0, 1e-12, 100), ZeroArgumentError);
    EXPECT_THROW(bilateral_psi({cplx(0.3)}, {}, half, 0.4, 1e-12, 100), ContractViolation);
}

TEST(BilateralPsi, MatchesDirectTermsRandomized)
{
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> ub(-3.0, -0.2), uz(4.0, 9.0);
    for (int t = 0; t < 20; ++t) {
        const std::array<cplx, 1> b{cplx(ub(rng))};
        const cplx z(-uz(rng));
        const auto v = bilateral_psi({}, b, half, z, 1e-15, 400);
        ASSERT_TRUE(v.converged);
        EXPECT_LT(rel(v.value, brute_0psi1(b[0], 0.5, z, 200)), 1e-12);
    }
}
