#include <gtest/gtest.h>

#include <cmath>

#include "qmeas/hydrogen.hpp"

using namespace qmeas;

TEST(HydrogenLevel, ValidQuantumNumbers)
{
    EXPECT_NO_THROW(HydrogenLevel(2, 1, 3));
    EXPECT_THROW(HydrogenLevel(0, 0, 1), invalid_input);
    EXPECT_THROW(HydrogenLevel(2, 2, 3), invalid_input);
    EXPECT_THROW(HydrogenLevel(1, 0, 3), invalid_input);
    EXPECT_THROW(HydrogenLevel(3, 2, 1), invalid_input);
    EXPECT_EQ(HydrogenLevel(2, 1, 1).label(), "2P1/2");
    EXPECT_DOUBLE_EQ(HydrogenLevel(3, 2, 5).j(), 2.5);
}

TEST(HydrogenLevel, ParsesSpectroscopicLabels)
{
    EXPECT_EQ(parse_level("2P1/2"), HydrogenLevel(2, 1, 1));
    EXPECT_EQ(parse_level("1s1/2"), HydrogenLevel(1, 0, 1));
    EXPECT_EQ(parse_level("3D5/2"), HydrogenLevel(3, 2, 5));
    for (const char* bad : {"", "P1/2", "2X1/2", "2P1", "2P1/3", "2Pa/2", "1P1/2", "2P5/2"})
        EXPECT_THROW((void)parse_level(bad), invalid_input) << bad;
}

TEST(HydrogenLevel, ParseErrorStatesGrammar)
{
    try {
        (void)parse_level("2X1/2");
        FAIL();
    } catch (const invalid_input& e) {
        EXPECT_NE(std::string(e.what()).find("<n><L><j>"), std::string::npos);
    }
}

TEST(Bohr, GroundStateEnergy)
{
    EXPECT_NEAR(level_energy(1, false).in_ev(), -13.605693, 1e-5);
    EXPECT_NEAR(level_energy(1, true).in_ev(), -13.598287, 1e-5);
    EXPECT_NEAR(level_energy(2, false).in_ev() * 4.0, level_energy(1, false).in_ev(), 1e-12);
    EXPECT_THROW((void)level_energy(0, false), invalid_input);
}

TEST(FineStructure, ReferenceTransitionNumbers)
{
    const auto t = transition_adjustment(HydrogenLevel(2, 1, 1), HydrogenLevel(1, 0, 1), Energy::ev(100.0));
    EXPECT_NEAR(t.adjustment_dirac / 1.24e-4, 1.0, 0.01);
    EXPECT_NEAR(t.adjustment_new / 1.26e-4, 1.0, 0.01);
    EXPECT_NEAR(t.difference / 1.95e-6, 1.0, 0.08);
    EXPECT_NEAR(t.cm_contribution / 3.3e-6, 1.0, 0.03);
    EXPECT_NEAR(t.cm_ratio / 3.2e-7, 1.0, 0.03);
    EXPECT_DOUBLE_EQ(t.difference, t.adjustment_new - t.adjustment_dirac);
}

TEST(FineStructure, DiracTextbookValue)
{
    // 2P1/2 and 2S1/2 share the Dirac shift: -(5/128) m c^2 alpha^4 for n = 2, j = 1/2
    const auto& k = codata2018();
    const double mc2a4 = joule_to_ev(k.m_e * k.c * k.c) * std::pow(k.alpha, 4);
    const double shift = fine_structure_adjustment(HydrogenLevel(2, 1, 1), FineStructureModel::dirac()).in_ev();
    EXPECT_NEAR(shift / (-5.0 / 128.0 * mc2a4), 1.0, 1e-12);
    EXPECT_EQ(shift, fine_structure_adjustment(HydrogenLevel(2, 0, 1), FineStructureModel::dirac()).in_ev());
}

TEST(FineStructure, HeavyProtonLimitRecoversDirac)
{
    PhysicalConstants k = codata2018();
    k.m_p *= 1e12;
    const auto fm = FineStructureModel::finite_mass(Energy::ev(0.0));
    for (const auto& level : {HydrogenLevel(1, 0, 1), HydrogenLevel(2, 1, 1), HydrogenLevel(2, 1, 3)}) {
        const double d = fine_structure_adjustment(level, FineStructureModel::dirac(), k).in_ev();
        EXPECT_NEAR(fine_structure_adjustment(level, fm, k).in_ev() / d, 1.0, 1e-9);
    }
}

TEST(FineStructure, ScalesAsAlphaToTheFourth)
{
    PhysicalConstants k = codata2018();
    const auto fm = FineStructureModel::finite_mass(Energy::ev(0.0));
    const HydrogenLevel level(2, 1, 3);
    const double base = fine_structure_adjustment(level, fm, k).in_ev();
    k.alpha *= 0.5;
    EXPECT_NEAR(fine_structure_adjustment(level, fm, k).in_ev() / base, 1.0 / 16.0, 1e-10);
}

TEST(FineStructure, CentreOfMassTermIsLinearInEnergy)
{
    const double r1 = cm_coupling_ratio(Energy::ev(100.0));
    EXPECT_NEAR(cm_coupling_ratio(Energy::ev(200.0)) / r1, 2.0, 1e-14);
    EXPECT_EQ(cm_coupling_ratio(Energy::ev(0.0)), 0.0);
    EXPECT_THROW((void)cm_coupling_ratio(Energy::ev(-1.0)), invalid_input);
    EXPECT_THROW((void)FineStructureModel::finite_mass(Energy::ev(-1.0)), invalid_input);
}
