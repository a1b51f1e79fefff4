#include <gtest/gtest.h>

#include <numbers>

#include "dpnp/coupling.hpp"
#include "dpnp/diagnostics.hpp"
#include "support.hpp"

using namespace dpnp;
using dpnp::testing::Gen;
using dpnp::testing::simple_params;

namespace {

constexpr double e = std::numbers::e;

}

TEST(Lyapunov, Values) {
    EXPECT_DOUBLE_EQ(lyapunov(1.0), e - 1.0);
    EXPECT_NEAR(lyapunov(e) - e, 0.0, 1e-15);
    EXPECT_EQ(lyapunov(0.0), e);
    EXPECT_THROW(lyapunov(-1e-300), InvalidArgument);
    EXPECT_THROW(lyapunov(std::nan("")), InvalidArgument);
}

TEST(Lyapunov, DominatesIdentityProperty) {
    Gen gen(51);
    for (int k = 0; k < 10000; ++k) {
        const double x = k % 2 ? gen.uniform(0.0, 10.0) : std::exp(gen.uniform(-40.0, 5.0));
        EXPECT_GE(lyapunov(x) - x, -1e-12 * (1.0 + x));
        EXPECT_GE(lyapunov(x), 0.0);
    }
}

TEST(Lyapunov, ContinuousAtZero) {
    EXPECT_NEAR(lyapunov(1e-300), e, 1e-12);
}

TEST(Entropy, HandValues) {
    const Grid2D g(4, 4, 1.0, 1.0);
    EXPECT_NEAR(entropy_total(g, {g.make_cell_field(0.0)}), e, 1e-15);
    EXPECT_NEAR(entropy_total(g, {g.make_cell_field(1.0), g.make_cell_field(1.0)}), 2.0 * (e - 1.0), 1e-14);
    CellField half = g.make_cell_field();
    for (std::size_t c = 0; c < g.cell_count(); ++c)
        if (g.cell_x(c) < 0.5) half[c] = e;
    EXPECT_NEAR(entropy_total(g, {half}), e, 1e-14);
}

TEST(Entropy, RejectsNegative) {
    const Grid2D g(1, 1, 1.0, 1.0);
    EXPECT_THROW(entropy_total(g, {g.make_cell_field(-0.1)}), InvalidArgument);
}

TEST(DriftSign, Values) {
    const std::vector<int> z2{1, -1};
    const std::vector<double> c2{2.0, 1.0};
    EXPECT_DOUBLE_EQ(drift_sign_term(z2, c2), 3.0);
    const std::vector<int> z3{1, 1, -1};
    const std::vector<double> c3{1.0, 1.0, std::sqrt(3.0)};
    EXPECT_NEAR(drift_sign_term(z3, c3), -(2.0 - std::sqrt(3.0)), 1e-15);
    const std::vector<double> zero{0.0, 0.0, 0.0};
    EXPECT_EQ(drift_sign_term(z3, zero), 0.0);
}

TEST(DriftSign, TwoOppositeUnitIonsNeverNegative) {
    Gen gen(52);
    const std::vector<int> z{1, -1};
    for (int k = 0; k < 10000; ++k) {
        const std::vector<double> c{gen.uniform(0.0, 10.0), gen.uniform(0.0, 10.0)};
        EXPECT_GE(drift_sign_term(z, c), 0.0);
    }
}

TEST(DriftSign, HigherValencyWeighting) {
    // z = (2, -1), c = (1, 1): (2 - 1) * ((2)^2 - (1)^2) = 3
    const std::vector<int> z{2, -1};
    const std::vector<double> c{1.0, 1.0};
    EXPECT_DOUBLE_EQ(drift_sign_term(z, c), 3.0);
}

TEST(Envelope, NoSourcesMeansConstantEntropyEnvelope) {
    const Grid2D g(4, 4, 1.0, 1.0);
    Gen gen(53);
    const SpeciesFields c0{gen.cell_field(g, 0.0, 5.0)};
    const EnvelopeConstants k = envelope_constants(g, simple_params({1}), BoundaryData{}, ReactionSpec::none(), c0);
    EXPECT_EQ(k.b, 0.0);
    EXPECT_EQ(k.background_rate, 0.0);
    for (double t : {0.0, 1.0, 100.0}) EXPECT_EQ(gronwall_envelopes(k, t).entropy, entropy_total(g, c0));
}

TEST(Envelope, HandConstants) {
    // alpha_D = 2, theta = 0.5, |z| = 2, e = eps kT = 1, |f| <= 1, |sigma| <= 0.5, linear decay 3
    const Grid2D g(2, 2, 1.0, 1.0);
    ModelParams p = simple_params({2, -1}, 2.0);
    p.porosity = 0.5;
    BoundaryData bc;
    bc.flux_bound = 1.0;
    bc.sigma_bound = 0.5;
    bc.background_bound = 0.25;
    const SpeciesFields c0{g.make_cell_field(1.0), g.make_cell_field(2.0)};
    const EnvelopeConstants k = envelope_constants(g, p, bc, ReactionSpec::linear_decay({3.0, 0.0}), c0);
    // drift = e^2 z^2 / (alpha_D (eps kT)^2) = 4 / 2 = 2
    // b = (8/2 * 1 + 8 * 2 * 0.25) / 0.5 + 3 = 19
    EXPECT_DOUBLE_EQ(k.b, 19.0);
    // rho_b rate = e / (2 eps kT kappa theta) * 0.25^2 * |Omega| with kappa = theta = 0.5
    EXPECT_DOUBLE_EQ(k.background_rate, 0.0625 / (2.0 * 0.25));
    // A0 = min(0.25, 1) ; B0 = (12 * 2 * (0.25 + 0.25) + 4/2 * 1 + 3 * 0.5 * 3) / 0.25 = 74
    EXPECT_DOUBLE_EQ(k.a0, 0.25);
    EXPECT_DOUBLE_EQ(k.b0, 74.0);
    EXPECT_DOUBLE_EQ(k.charge_gain, 96.0);
    EXPECT_DOUBLE_EQ(k.initial_energy, 5.0);
}

TEST(Envelope, ContinuousInTime) {
    const Grid2D g(3, 3, 1.0, 1.0);
    BoundaryData bc;
    bc.flux_bound = 0.7;
    bc.sigma_bound = 0.2;
    const SpeciesFields c0{g.make_cell_field(2.0)};
    const EnvelopeConstants k = envelope_constants(g, simple_params({1}), bc, ReactionSpec::none(), c0);
    ASSERT_GT(k.b, 0.0);
    const double s0 = entropy_total(g, c0);
    EXPECT_DOUBLE_EQ(gronwall_envelopes(k, 0.0).entropy, s0);
    EXPECT_NEAR(gronwall_envelopes(k, 1e-12).entropy, s0, 1e-9);
    double prev = s0;
    for (double t = 0.1; t < 2.0; t += 0.1) {
        const double v = gronwall_envelopes(k, t).entropy;
        EXPECT_GT(v, prev);
        prev = v;
    }
}

TEST(Envelope, EnergyLogStaysFiniteWhenValueOverflows) {
    const Grid2D g(3, 3, 1.0, 1.0);
    BoundaryData bc;
    bc.flux_bound = 5.0;
    const SpeciesFields c0{g.make_cell_field(10.0)};
    const Envelopes env = gronwall_envelopes(g, simple_params({3}, 0.01), bc, ReactionSpec::none(), c0, 1e-4);
    EXPECT_TRUE(std::isinf(env.energy));
    EXPECT_TRUE(std::isfinite(env.log_energy));
    DiagnosticsRecord r;
    r.energy = 900.0;
    r.log_energy_env = env.log_energy;
    EXPECT_TRUE(r.energy_within_envelope());
}

TEST(Envelope, EnergyEnvelopeDominatesInitialEnergy) {
    Gen gen(54);
    for (int trial = 0; trial < 20; ++trial) {
        const Grid2D g(4, 4, 1.0, 1.0);
        const SpeciesFields c0{gen.cell_field(g, 0.0, 10.0), gen.cell_field(g, 0.0, 10.0)};
        const Envelopes env = gronwall_envelopes(g, simple_params({1, -1}), BoundaryData{}, ReactionSpec::none(), c0, 0.0);
        EXPECT_GE(env.log_energy, std::log(sum_squared_l2(g, c0)) - 1e-12);
    }
}

TEST(Record, StatsAndCounters) {
    const Grid2D g(2, 2, 1.0, 1.0);
    ModelParams p = simple_params({1, -1});
    p.porosity = 0.5;
    const Model m{g, p, ReactionSpec::none(), BoundaryData{}, {}, {}};
    const SystemState s = initial_state(m, {g.make_cell_field(2.0), g.make_cell_field(2.0)});
    const DiagnosticsRecord r =
        make_record(m, s, envelope_constants(g, p, BoundaryData{}, ReactionSpec::none(), s.c));
    EXPECT_DOUBLE_EQ(r.species[0].mass, 1.0);
    EXPECT_DOUBLE_EQ(r.species[0].l2, 2.0);
    EXPECT_DOUBLE_EQ(r.species[0].linf, 2.0);
    EXPECT_EQ(r.species[0].grad_l2, 0.0);
    EXPECT_DOUBLE_EQ(r.energy, 8.0);
    EXPECT_TRUE(r.entropy_within_envelope());
    EXPECT_TRUE(r.energy_within_envelope());
}
