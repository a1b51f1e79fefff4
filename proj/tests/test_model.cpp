#include <gtest/gtest.h>

#include <cmath>

#include "dpnp/model.hpp"
#include "support.hpp"

using namespace dpnp;
using dpnp::testing::Gen;
using dpnp::testing::simple_params;

namespace {

const Grid2D unit2(2, 2, 1.0, 1.0);

SpeciesFields constant_species(const Grid2D& g, std::initializer_list<double> values) {
    SpeciesFields c;
    for (double v : values) c.push_back(g.make_cell_field(v, FieldRole::concentration));
    return c;
}

} // namespace

TEST(Validate, ZeroPorosityFailsA4) {
    ModelParams p = simple_params({1});
    p.porosity = 0.0;
    const ValidationReport rep = validate(unit2, p, ReactionSpec::none(), BoundaryData{});
    ASSERT_NE(rep.find("A4"), nullptr);
    EXPECT_FALSE(rep.find("A4")->passed);
    EXPECT_NE(rep.find("A4")->detail.find("porosity"), std::string::npos);
    EXPECT_FALSE(rep.ok());
}

TEST(Validate, NonpositiveChargePrefactorFailsA4) {
    ModelParams p = simple_params({1});
    p.charge_prefactor = -1.0;
    EXPECT_FALSE(validate(unit2, p, ReactionSpec::none(), BoundaryData{}).find("A4")->passed);
}

TEST(Validate, LinearDecayPassesA5) {
    const ValidationReport rep = validate(unit2, simple_params({0}), ReactionSpec::linear_decay({1.0}), BoundaryData{});
    EXPECT_TRUE(rep.find("A5")->passed);
    EXPECT_TRUE(rep.ok()) << rep.summary();
}

TEST(Validate, NegativeDecayRateFailsA5) {
    EXPECT_FALSE(validate(unit2, simple_params({0}), ReactionSpec::linear_decay({-1.0}), BoundaryData{})
                     .find("A5")
                     ->passed);
}

TEST(Validate, ConstantInflowFailsCompatibility) {
    BoundaryData bc;
    bc.fluid_flux = [](const BoundaryPoint&, double) { return 1.0; };
    bc.flux_bound = 1.0;
    const ValidationReport rep = validate(unit2, simple_params({1}), ReactionSpec::none(), bc);
    EXPECT_FALSE(rep.find("compatibility")->passed);
    EXPECT_TRUE(rep.find("A6")->passed);
}

TEST(Validate, BoundExceededFailsA6AndA7) {
    BoundaryData bc;
    bc.sigma = [](const BoundaryPoint&, double) { return 2.0; };
    bc.sigma_bound = 1.0;
    bc.background_charge = [](const CellPoint&, double) { return -3.0; };
    bc.background_bound = 1.0;
    const ValidationReport rep = validate(unit2, simple_params({1}), ReactionSpec::none(), bc);
    EXPECT_FALSE(rep.find("A6")->passed);
    EXPECT_FALSE(rep.find("A7")->passed);
}

TEST(Validate, NegativeInitialDataFailsA2) {
    SpeciesFields c = constant_species(unit2, {1.0});
    c[0][3] = -0.5;
    EXPECT_FALSE(validate(unit2, simple_params({1}), ReactionSpec::none(), BoundaryData{}, c).find("A2")->passed);
}

TEST(Validate, NonpositiveDiffusivityFailsA3) {
    ModelParams p = simple_params({1});
    p.diffusivities[0].yy = 0.0;
    EXPECT_FALSE(validate(unit2, p, ReactionSpec::none(), BoundaryData{}).find("A3")->passed);
}

TEST(Validate, SpeciesCountMismatchStopsEarly) {
    ModelParams p = simple_params({1, -1});
    p.valencies.pop_back();
    const ValidationReport rep = validate(unit2, p, ReactionSpec::none(), BoundaryData{});
    EXPECT_FALSE(rep.find("species")->passed);
    EXPECT_EQ(rep.checks.size(), 1u);
}

TEST(Validate, CustomTableViolatingQuasiPositivityFailsA5) {
    ReactionSpec r;
    r.kind = ReactionKind::custom_lipschitz;
    // R_0 = table(c_1) which is negative even when c_0 = 0
    r.custom_terms.push_back({0, 1, PiecewiseLinear{{0.0, 1.0}, {0.0, -1.0}}});
    r.declared_lipschitz = {1.0, 0.0};
    const ValidationReport rep = validate(unit2, simple_params({0, 0}), r, BoundaryData{});
    EXPECT_FALSE(rep.find("A5")->passed);
    EXPECT_NE(rep.find("A5")->detail.find("quasi-positivity"), std::string::npos);
}

TEST(Validate, CustomTableBelowDeclaredSlopeFailsA5) {
    ReactionSpec r;
    r.kind = ReactionKind::custom_lipschitz;
    r.custom_terms.push_back({0, 1, PiecewiseLinear{{0.0, 1.0}, {0.0, 2.0}}});
    r.declared_lipschitz = {1.0, 0.0};
    EXPECT_FALSE(validate(unit2, simple_params({0, 0}), r, BoundaryData{}).find("A5")->passed);
}

TEST(Validate, IsDeterministic) {
    ModelParams p = simple_params({1, -1});
    BoundaryData bc;
    bc.sigma = [](const BoundaryPoint& b, double) { return b.x - 0.5; };
    bc.sigma_bound = 0.5;
    const ValidationReport a = validate(unit2, p, ReactionSpec::none(), bc);
    const ValidationReport b = validate(unit2, p, ReactionSpec::none(), bc);
    EXPECT_EQ(a.summary(), b.summary());
}

TEST(ChargeDensity, SymmetricPairCancels) {
    const CellField rho = charge_density(constant_species(unit2, {2.0, 2.0}), simple_params({1, -1}));
    for (double v : rho.values()) EXPECT_EQ(v, 0.0);
}

TEST(ChargeDensity, ThreeIonExample) {
    const CellField rho =
        charge_density(constant_species(unit2, {1.0, 1.0, std::sqrt(3.0)}), simple_params({1, 1, -1}));
    for (double v : rho.values()) EXPECT_NEAR(v, 2.0 - std::sqrt(3.0), 1e-15);
}

TEST(ChargeDensity, SingleSpeciesScaling) {
    const CellField rho = charge_density(constant_species(unit2, {0.5}), simple_params({2}));
    for (double v : rho.values()) EXPECT_EQ(v, 1.0);
}

TEST(ChargeDensity, PrefactorAndPorosityMultiply) {
    ModelParams p = simple_params({1});
    p.charge_prefactor = 3.0;
    p.porosity = 0.5;
    EXPECT_DOUBLE_EQ(charge_density(constant_species(unit2, {2.0}), p)[0], 3.0);
}

TEST(ChargeDensity, SpeciesCountMismatchThrows) {
    EXPECT_THROW(charge_density(constant_species(unit2, {1.0}), simple_params({1, -1})), InvalidArgument);
}

TEST(ChargeDensity, LinearityProperty) {
    Gen gen(11);
    for (int trial = 0; trial < 100; ++trial) {
        const int L = gen.integer(1, 4);
        std::vector<int> z(L);
        for (int& v : z) v = gen.integer(-3, 3);
        ModelParams p = simple_params(z);
        p.charge_prefactor = gen.uniform(0.1, 2.0);
        p.porosity = gen.uniform(0.1, 1.0);
        SpeciesFields c, d, mix;
        const double a = gen.uniform(-2.0, 2.0), b = gen.uniform(-2.0, 2.0);
        for (int l = 0; l < L; ++l) {
            c.push_back(gen.cell_field(unit2, -5.0, 5.0));
            d.push_back(gen.cell_field(unit2, -5.0, 5.0));
            mix.push_back(a * c.back() + b * d.back());
        }
        const CellField lhs = charge_density(mix, p);
        const CellField rhs = a * charge_density(c, p) + b * charge_density(d, p);
        for (std::size_t i = 0; i < lhs.size(); ++i) EXPECT_NEAR(lhs[i], rhs[i], 1e-12 * (1.0 + std::abs(rhs[i])));
    }
}

TEST(Reactions, LinearDecayValue) {
    const SpeciesFields r = evaluate_reactions(ReactionSpec::linear_decay({1.0}), constant_species(unit2, {1.0}));
    EXPECT_EQ(r[0][0], -1.0);
}

TEST(Reactions, ZeroAtOrigin) {
    const std::vector<ReactionSpec> specs{
        ReactionSpec::none(), ReactionSpec::linear_decay({2.0, 0.5, 1.0}),
        ReactionSpec::mass_action({{{1, 1, 0}, {0, 0, 1}, 2.0}, {{0, 0, 1}, {1, 1, 0}, 0.3}})};
    for (const ReactionSpec& s : specs) {
        const SpeciesFields r = evaluate_reactions(s, constant_species(unit2, {0.0, 0.0, 0.0}));
        for (const CellField& f : r)
            for (double v : f.values()) EXPECT_EQ(v, 0.0);
    }
}

TEST(Reactions, MassActionHandValue) {
    const ReactionSpec s = ReactionSpec::mass_action({{{1, 1, 0}, {0, 0, 1}, 2.0}});
    const SpeciesFields r = evaluate_reactions(s, constant_species(unit2, {1.0, 1.0, 0.0}));
    EXPECT_EQ(r[0][0], -2.0);
    EXPECT_EQ(r[1][0], -2.0);
    EXPECT_EQ(r[2][0], 2.0);
}

TEST(Reactions, MassActionFiniteDifferenceLipschitzProbe) {
    const ReactionSpec s = ReactionSpec::mass_action({{{1, 1, 0}, {0, 0, 1}, 2.0}}, 10.0);
    const std::vector<double> k = s.lipschitz_constants(3);
    Gen gen(5);
    std::vector<double> a(3), b(3), ra(3), rb(3);
    for (int trial = 0; trial < 2000; ++trial) {
        for (int l = 0; l < 3; ++l) {
            a[l] = gen.uniform(0.0, 10.0);
            b[l] = std::clamp(a[l] + gen.uniform(-1e-3, 1e-3), 0.0, 10.0);
        }
        s.evaluate(a, ra);
        s.evaluate(b, rb);
        double dist = 0.0;
        for (int l = 0; l < 3; ++l) dist = std::max(dist, std::abs(a[l] - b[l]));
        if (dist == 0.0) continue;
        for (int l = 0; l < 3; ++l) EXPECT_LE(std::abs(ra[l] - rb[l]), k[l] * dist * (1.0 + 1e-9));
    }
}

TEST(Reactions, QuasiPositivityProperty) {
    Gen gen(17);
    for (int trial = 0; trial < 200; ++trial) {
        const int L = gen.integer(1, 4);
        std::vector<MassActionReaction> list;
        const int nr = gen.integer(1, 3);
        for (int r = 0; r < nr; ++r) {
            MassActionReaction mr{std::vector<int>(L), std::vector<int>(L), gen.uniform(0.0, 3.0)};
            for (int l = 0; l < L; ++l) {
                mr.reactants[l] = gen.integer(0, 2);
                mr.products[l] = gen.integer(0, 2);
            }
            list.push_back(mr);
        }
        const std::vector<ReactionSpec> specs{ReactionSpec::mass_action(list),
                                              ReactionSpec::linear_decay(std::vector<double>(L, gen.uniform(0.0, 5.0)))};
        for (const ReactionSpec& s : specs) {
            std::vector<double> c(L), r(L);
            for (int l = 0; l < L; ++l) c[l] = gen.uniform(0.0, 10.0);
            const int zeroed = gen.integer(0, L - 1);
            c[zeroed] = 0.0;
            s.evaluate(c, r);
            EXPECT_GE(r[zeroed], 0.0);
        }
    }
}
