#include <gtest/gtest.h>

#include "dpnp/oracle.hpp"
#include "support.hpp"

using namespace dpnp;
using dpnp::testing::Gen;
using dpnp::testing::simple_params;

namespace {

FixedPointConfig tight_config(double dt) {
    FixedPointConfig cfg;
    cfg.dt = dt;
    cfg.t_end = dt;
    cfg.fp_tol = 1e-14;
    cfg.max_outer_iters = 500;
    return cfg;
}

Model tight_model(Model m) {
    m.elliptic.cg_tol = 1e-14;
    return m;
}

} // namespace

TEST(DenseSolve, SmallSystem) {
    // [2 1; 1 3] x = [3; 5] -> x = (4/5, 7/5)
    const std::vector<double> x = dense_solve({2.0, 1.0, 1.0, 3.0}, {3.0, 5.0});
    EXPECT_NEAR(x[0], 0.8, 1e-15);
    EXPECT_NEAR(x[1], 1.4, 1e-15);
}

TEST(DenseSolve, NeedsPivoting) {
    const std::vector<double> x = dense_solve({0.0, 1.0, 1.0, 0.0}, {2.0, 3.0});
    EXPECT_EQ(x[0], 3.0);
    EXPECT_EQ(x[1], 2.0);
}

TEST(DenseSolve, SingularThrows) {
    EXPECT_THROW(dense_solve({1.0, 2.0, 2.0, 4.0}, {1.0, 1.0}), NonConvergence);
    EXPECT_THROW(dense_solve({1.0, 2.0, 3.0}, {1.0, 1.0}), InvalidArgument);
}

TEST(Oracle, SingleCellDecay) {
    const Grid2D g(1, 1, 1.0, 1.0);
    const Model m{g, simple_params({0}), ReactionSpec::linear_decay({1.0}), BoundaryData{}, {}, {}};
    const OracleResult r = monolithic_step(m, initial_state(m, {g.make_cell_field(1.0)}), 0.5);
    EXPECT_NEAR(r.state.c[0][0], 2.0 / 3.0, 1e-14);
    EXPECT_NEAR(r.state.phi[0], 0.0, 1e-14);
    EXPECT_NEAR(r.state.p[0], 0.0, 1e-14);
}

// Two cells side by side, one cation, uniform neutralising background,
// no boundary data. Darcy gives q = 0 (each cell has a single open face), so
// the interior face carries v = alpha E with E fixed by cell 0's Gauss
// balance, E |f| = (kappa c_0 + rho_b) |cell|. Mass conservation reduces the
// step to one scalar equation in c_0, solved here by bisection.
TEST(Oracle, TwoCellHandFormula) {
    const Grid2D g(2, 1, 1.0, 1.0);
    ModelParams p = simple_params({1}, 0.3);
    p.charge_prefactor = 2.0;
    p.porosity = 0.8;
    const double kappa = p.charge_factor(), theta = p.porosity, D = 0.3, alpha = 1.0;
    const double a = g.cell_area(), h = g.hx(), dt = 0.2;
    const double c0_old = 3.0, c1_old = 0.5, S = c0_old + c1_old;
    const double rho_b = -kappa * S / 2.0;
    BoundaryData bc;
    bc.background_charge = [rho_b](const CellPoint&, double) { return rho_b; };
    bc.background_bound = std::abs(rho_b);
    const Model m = tight_model(Model{g, p, ReactionSpec::none(), bc, {}, {}});

    auto residual = [&](double c0) {
        const double c1 = S - c0;
        const double v = alpha * (kappa * c0 + rho_b) * a;
        const double flux = std::max(v, 0.0) * c0 + std::min(v, 0.0) * c1 + D * (c0 - c1) / h;
        return theta * a * (c0 - c0_old) / dt + flux;
    };
    double lo = 0.0, hi = S;
    ASSERT_LT(residual(lo), 0.0);
    ASSERT_GT(residual(hi), 0.0);
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid) < 0.0 ? lo : hi) = mid;
    }
    const double c0 = 0.5 * (lo + hi), c1 = S - c0;
    const double E_mid = (kappa * c0 + rho_b) * a;

    CellField init = g.make_cell_field();
    init[0] = c0_old;
    init[1] = c1_old;
    const SystemState s0 = initial_state(m, {init});
    const OracleResult orc = monolithic_step(m, s0, dt);
    const StepResult mod = fixed_point_step(m, s0, dt, tight_config(dt));
    for (const SystemState* s : {&orc.state, &mod.state}) {
        EXPECT_NEAR(s->c[0][0], c0, 1e-12);
        EXPECT_NEAR(s->c[0][1], c1, 1e-12);
        EXPECT_NEAR(s->E[g.x_face(1, 0)], E_mid, 1e-12);
        EXPECT_NEAR(s->q[g.x_face(1, 0)], 0.0, 1e-12);
        // phi: E = -eps (phi_1 - phi_0) / h with zero mean
        EXPECT_NEAR(s->phi[0], E_mid * h / 2.0, 1e-12);
    }
}

TEST(Oracle, EquilibriumIsFixedPoint) {
    const Grid2D g(2, 2, 1.0, 1.0);
    const Model m{g, simple_params({1, -1}), ReactionSpec::none(), BoundaryData{}, {}, {}};
    const SystemState s0 = initial_state(m, {g.make_cell_field(1.0), g.make_cell_field(1.0)});
    const OracleResult r = monolithic_step(m, s0, 0.1);
    EXPECT_LE(max_abs_difference(r.state, s0), 1e-14);
}

TEST(Oracle, RejectsLargeGrids) {
    const Grid2D g(5, 4, 1.0, 1.0);
    const Model m{g, simple_params({0}), ReactionSpec::none(), BoundaryData{}, {}, {}};
    const SystemState s0 = initial_state(m, {g.make_cell_field(1.0)});
    EXPECT_THROW(monolithic_step(m, s0, 0.1), InvalidArgument);
}

TEST(Oracle, MatchesModularOnRandomTwoByTwo) {
    Gen gen(61);
    dpnp::testing::RandomCaseOptions o;
    o.nx = o.ny = 2;
    o.valencies = {1, -1};
    for (int trial = 0; trial < 20; ++trial) {
        auto rc = dpnp::testing::random_case(gen, o);
        const Model m = tight_model(rc.model);
        const double dt = gen.uniform(1e-3, 0.1);
        const SystemState s0 = initial_state(m, rc.initial);
        const StepResult mod = fixed_point_step(m, s0, dt, tight_config(dt));
        const OracleResult orc = monolithic_step(m, s0, dt);
        EXPECT_LE(max_abs_difference(mod.state, orc.state), 1e-10) << "trial " << trial;
    }
}

TEST(Oracle, MatchesModularWithReactions) {
    Gen gen(62);
    const Grid2D g(2, 2, 1.0, 1.0);
    const Model m = tight_model(Model{g, simple_params({1, -1, 0}),
                                      ReactionSpec::mass_action({{{1, 1, 0}, {0, 0, 1}, 1.5}, {{0, 0, 1}, {1, 1, 0}, 0.2}}),
                                      BoundaryData{}, {}, {}});
    for (double dt : {0.01, 0.1}) {
        const CellField a = gen.cell_field(g, 0.0, 3.0);
        const SystemState s0 = initial_state(m, {a, a, gen.cell_field(g, 0.0, 3.0)});
        const StepResult mod = fixed_point_step(m, s0, dt, tight_config(dt));
        const OracleResult orc = monolithic_step(m, s0, dt);
        EXPECT_LE(max_abs_difference(mod.state, orc.state), 1e-10) << "dt " << dt;
    }
}

TEST(Manufactured, EllipticSecondOrder) {
    for (ManufacturedCase c : {ManufacturedCase::poisson_cos, ManufacturedCase::darcy_gradient_force}) {
        const ErrorTable t = manufactured_errors(c);
        ASSERT_EQ(t.levels, (std::vector<int>{8, 16, 32}));
        ASSERT_EQ(t.ratios.size(), 2u);
        for (double r : t.ratios) {
            EXPECT_GE(r, 3.4) << to_string(c);
            EXPECT_LE(r, 4.6) << to_string(c);
        }
        for (double o : t.orders) EXPECT_NEAR(o, 2.0, 0.3);
    }
}

TEST(Manufactured, UpwindFirstOrder) {
    const ErrorTable t = manufactured_errors(ManufacturedCase::transport_translate);
    ASSERT_EQ(t.ratios.size(), 2u);
    for (double r : t.ratios) {
        EXPECT_GE(r, 1.6);
        EXPECT_LE(r, 2.4);
    }
    for (double o : t.orders) EXPECT_NEAR(o, 1.0, 0.3);
}

TEST(Manufactured, CaseNames) {
    for (ManufacturedCase c :
         {ManufacturedCase::poisson_cos, ManufacturedCase::darcy_gradient_force, ManufacturedCase::transport_translate})
        EXPECT_EQ(parse_manufactured_case(to_string(c)), c);
    EXPECT_THROW(parse_manufactured_case("heat"), InvalidArgument);
}
