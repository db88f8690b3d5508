#include <gtest/gtest.h>

#include "glq/fockrep.hpp"

using namespace glq;
using namespace glq::fockrep;

namespace {
const DeformationParameter half(0.5);
}

TEST(TruncatedFockSpace, DimensionsAndIndexing)
{
    EXPECT_EQ(build_space(half, 1).dimension(), 4);
    EXPECT_EQ(build_space(half, 12).dimension(), 169);
    const auto s = build_space(half, 5);
    EXPECT_EQ(s.index(0, 0), 0);
    for (int i = 0; i < s.dimension(); ++i)
        EXPECT_EQ(s.index(s.label(i)), i);
    EXPECT_THROW(s.index(6, 0), ContractViolation);
    EXPECT_THROW(build_space(half, 0), ContractViolation);
}

TEST(BuildOperator, LadderExamples)
{
    const auto s = build_space(half, 4);
    const Matrix a1 = build_operator(s, Mode::a1).entries;
    EXPECT_EQ(a1.col(s.index(0, 0)).norm(), 0.0);
    const Vector v = a1 * s.basis_vector(1, 1);
    EXPECT_NEAR(v(s.index(0, 1)).real(), std::sqrt(0.5), 1e-15);
    EXPECT_NEAR((v - std::sqrt(0.5) * s.basis_vector(0, 1)).norm(), 0.0, 1e-15);
    const Vector w = build_operator(s, Mode::a2dag).entries * s.basis_vector(0, 0);
    EXPECT_NEAR((w - s.basis_vector(0, 1)).norm(), 0.0, 1e-15);
}

TEST(BuildOperator, CreatorsAreAdjointsOnInterior)
{
    const auto s = build_space(DeformationParameter(0.3), 6);
    for (auto [ann, cre] : {std::pair{Mode::a1, Mode::a1dag}, std::pair{Mode::a2, Mode::a2dag}}) {
        const Matrix A = build_operator(s, ann).entries;
        const Matrix C = build_operator(s, cre).entries;
        for (int i : s.interior(1))
            for (int j : s.interior(1))
                EXPECT_NEAR(std::abs(A(i, j) - std::conj(C(j, i))), 0.0, 1e-15);
    }
}

TEST(BuildOperator, HermiticityPairing)
{
    const auto s = build_space(half, 8);
    const Matrix a1 = build_operator(s, Mode::a1).entries;
    const Matrix a1d = build_operator(s, Mode::a1dag).entries;
    const auto dom = s.interior(1);
    for (int i : dom)
        for (int j : dom) {
            const Vector u = Vector::Unit(s.dimension(), i) * cplx(0.3, -0.7);
            const Vector v = Vector::Unit(s.dimension(), j) * cplx(1.1, 0.2);
            EXPECT_NEAR(std::abs(u.dot(a1 * v) - (a1d * u).dot(v)), 0.0, 1e-12);
        }
}

TEST(RelationResiduals, AllRelationsVanishOnInterior)
{
    for (double q : {0.3, 0.5, 0.9})
        for (int N : {4, 8, 12}) {
            const auto rep = relation_residuals(build_space(DeformationParameter(q), N));
            EXPECT_EQ(rep.norm_kind, "frobenius");
            EXPECT_FALSE(rep.interior_empty);
            EXPECT_EQ(rep.residuals.size(), 14u);
            for (const auto& [name, v] : rep.residuals)
                EXPECT_LE(v, 1e-12) << name << " q=" << q << " N=" << N;
        }
}

TEST(RelationResiduals, SpecExamples)
{
    const auto rep = relation_residuals(build_space(half, 8));
    EXPECT_LE(rep.residuals.at("a1 a2 = q^(-1/2) a2 a1"), 1e-12);
    EXPECT_LE(rep.residuals.at("a1 a1dag = 1 + q a1dag a1 + (q-1) a2dag a2"), 1e-12);
}

TEST(RelationResiduals, EmptyInteriorIsFlagged)
{
    const auto rep = relation_residuals(build_space(half, 1));
    EXPECT_TRUE(rep.interior_empty);
    EXPECT_TRUE(rep.residuals.empty());
    EXPECT_FALSE(relation_residuals(build_space(half, 2)).interior_empty);
}

TEST(RelationResiduals, DetectsABrokenRelation)
{
    // plain commutation is off by a factor sqrt(q)
    const auto s = build_space(half, 6);
    const Matrix a1 = build_operator(s, Mode::a1).entries;
    const Matrix a2d = build_operator(s, Mode::a2dag).entries;
    EXPECT_GT(restricted_norm(a1 * a2d - a2d * a1, s.interior(2)), 0.1);
}

TEST(Spectrum, Examples)
{
    const auto s = build_space(half, 4);
    const auto sp = spectrum_check(s);
    const auto& e00 = sp[s.index(0, 0)];
    EXPECT_NEAR(e00.energy, -2.0, 1e-14);
    EXPECT_NEAR(e00.t, -2.0, 1e-14);
    EXPECT_NEAR(sp[s.index(1, 1)].energy, -0.5, 1e-14);
}

TEST(Spectrum, MatchesClosedFormBelowTotalDegreeTen)
{
    for (double q : {0.3, 0.5, 0.9}) {
        const auto s = build_space(DeformationParameter(q), 12);
        for (const auto& e : spectrum_check(s)) {
            if (e.index.n + e.index.m > 10)
                continue;
            EXPECT_NEAR(e.energy, e.energy_formula, 1e-12);
            EXPECT_NEAR(e.t, e.t_formula, 1e-12);
        }
        EXPECT_LE(commutator_HT_residual(s), 1e-13);
    }
}

TEST(Spectrum, DegenerateAndNegative)
{
    const auto s = build_space(DeformationParameter(0.7), 8);
    const auto sp = spectrum_check(s);
    for (const auto& e : sp) {
        EXPECT_LT(e.energy, 0.0);
        for (const auto& f : sp)
            if (f.index.n + f.index.m == e.index.n + e.index.m)
                EXPECT_NEAR(e.energy, f.energy, 1e-13);
    }
}

TEST(Spectrum, DiagonalOperators)
{
    const auto s = build_space(half, 6);
    for (Mode m : {Mode::N1, Mode::N2, Mode::H, Mode::T})
        EXPECT_EQ(off_diagonal_mass(build_operator(s, m).entries), 0.0) << to_string(m);
}

TEST(NumberStates, ReproduceBasis)
{
    const auto s = build_space(half, 8);
    for (int n = 0; n <= 8; ++n)
        for (int m = 0; m <= 8; ++m)
            EXPECT_LE((build_number_state(s, n, m) - s.basis_vector(n, m)).norm(), 1e-12) << n << "," << m;
    EXPECT_THROW(build_number_state(s, 9, 0), ContractViolation);
}

TEST(NumberStates, IntermediateNorm)
{
    const auto s = build_space(half, 4);
    const Matrix a1d = build_operator(s, Mode::a1dag).entries;
    const Vector v = a1d * (a1d * s.basis_vector(0, 0));
    EXPECT_NEAR(v.norm(), std::sqrt(1.5), 1e-15);
}
