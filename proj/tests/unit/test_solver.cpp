#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "lgfb/solver.hpp"
#include "support.hpp"

namespace lgfb {
namespace {

using test::code_of;
using test::kPi;

ValidatedModel model(double beta = 1.0, double h0 = 1.0) { return validate_params(test::params(beta, h0), {}); }

TEST(Resolve, FillsDefaults) {
    const auto d = resolve(Discretization{}, test::params());
    ASSERT_TRUE(d.nx.has_value());
    EXPECT_EQ(*d.nx, static_cast<int>(std::ceil(60.0 * 400 / 2)));
    ASSERT_TRUE(d.u_floor.has_value());
    EXPECT_DOUBLE_EQ(*d.u_floor, 1e-8);
}

TEST(Resolve, DomainTooSmall) {
    Discretization d;
    d.L = 1.05;
    d.front_margin = 0.5;
    EXPECT_EQ(code_of([&] { (void)resolve(d, test::params(1.0, 1.0)); }), ErrorCode::DomainTooSmall);
    EXPECT_EQ(code_of([&] { (void)init_state(model(1.0, 1.0), d); }), ErrorCode::DomainTooSmall);
}

TEST(Resolve, InvalidDiscretization) {
    auto bad = [](auto mutate) {
        Discretization d = test::coarse();
        mutate(d);
        return code_of([&] { (void)resolve(d, test::params()); });
    };
    EXPECT_EQ(bad([](Discretization& d) { d.ny = 7; }), ErrorCode::InvalidDiscretization);
    EXPECT_EQ(bad([](Discretization& d) { d.nx = 4; }), ErrorCode::InvalidDiscretization);
    EXPECT_EQ(bad([](Discretization& d) { d.dt = 0.0; }), ErrorCode::InvalidDiscretization);
    EXPECT_EQ(bad([](Discretization& d) { d.cfl_safety = 1.5; }), ErrorCode::InvalidDiscretization);
    EXPECT_EQ(bad([](Discretization& d) { d.cfl_safety = 0.0; }), ErrorCode::InvalidDiscretization);
    EXPECT_EQ(bad([](Discretization& d) { d.t_end = -1.0; }), ErrorCode::InvalidDiscretization);
    EXPECT_EQ(bad([](Discretization& d) { d.record_every = 0.0; }), ErrorCode::InvalidDiscretization);
}

TEST(InitState, CosineProfile) {
    const auto d = test::coarse();
    const Solver solver(model(), d);
    const auto s = solver.initial_state();
    ASSERT_EQ(s.z.size(), 61u);
    EXPECT_EQ(s.z.front(), 0.0);
    EXPECT_EQ(s.z.back(), 0.0);
    for (std::size_t i = 0; i < s.z.size(); ++i) {
        EXPECT_NEAR(s.z[i], std::cos(kPi * solver.y_at(i) / 2), 1e-15);
    }
    for (double u : s.u) EXPECT_EQ(u, 1.0);
    EXPECT_EQ(s.front.g, -1.0);
    EXPECT_EQ(s.front.h, 1.0);
    EXPECT_EQ(s.t, 0.0);
    EXPECT_EQ(s, init_state(model(), d));
}

TEST(Step, ZeroPredatorAndSaturatedPreyIsFixed) {
    auto d = test::coarse();
    const auto m = model();
    auto s = init_state(m, d);
    std::fill(s.z.begin(), s.z.end(), 0.0);
    const auto next = step(s, m, d);
    EXPECT_NEAR(next.t, s.t + d.dt, 1e-15);
    EXPECT_EQ(next.front.g, s.front.g);
    EXPECT_EQ(next.front.h, s.front.h);
    for (std::size_t j = 0; j < s.u.size(); ++j) EXPECT_NEAR(next.u[j], 1.0, 1e-12);
    for (double z : next.z) EXPECT_EQ(z, 0.0);
}

TEST(Step, CoexistenceInteriorUnchanged) {
    auto p = test::params(1.0, 1.0);
    InitialData init;
    init.u0 = ConstantProfile{2.0 / 3.0};
    const auto m = validate_params(p, init);
    Discretization d;
    d.L = 10.0;
    d.ny = 100;
    d.dt = 1e-4;
    Solver solver(m, d);
    auto s = solver.initial_state();
    for (std::size_t i = 1; i + 1 < s.z.size(); ++i) s.z[i] = 2.0 / 3.0;
    const auto before = s;
    solver.advance(s, d.dt);
    for (std::size_t i = 0; i < s.z.size(); ++i) {
        if (std::abs(solver.y_at(i)) <= 0.5) {
            EXPECT_NEAR(s.z[i], before.z[i], 1e-10) << "y = " << solver.y_at(i);
        }
    }
    for (std::size_t j = 0; j < s.u.size(); ++j) {
        if (std::abs(solver.x_at(j)) <= 0.5) {
            EXPECT_NEAR(s.u[j], before.u[j], 1e-10) << "x = " << solver.x_at(j);
        }
    }
    EXPECT_EQ(s.z.front(), 0.0);
    EXPECT_EQ(s.z.back(), 0.0);
}

TEST(Step, CflViolation) {
    auto d = test::coarse();
    const auto m = model(10.0, 1.0);
    const auto s = init_state(m, d);
    EXPECT_EQ(code_of([&] { (void)step(s, m, d); }), ErrorCode::CflViolation);
}

TEST(Step, AdvanceIsTransactional) {
    auto d = test::coarse();
    Solver solver(model(10.0, 1.0), d);
    auto s = solver.initial_state();
    const auto before = s;
    EXPECT_EQ(code_of([&] { solver.advance(s, 0.02); }), ErrorCode::CflViolation);
    EXPECT_EQ(s, before);
    solver.advance(s, 0.5 * solver.cfl_limit(s));
    EXPECT_GT(s.t, 0.0);
}

TEST(Step, FrontsMoveOutward) {
    auto d = test::coarse();
    Solver solver(model(1.0, 1.0), d);
    auto s = solver.initial_state();
    solver.advance(s, 0.01);
    EXPECT_LT(s.front.g, -1.0);
    EXPECT_GT(s.front.h, 1.0);
    EXPECT_EQ(s.step_count, 1);
}

TEST(Simulate, ZeroHorizonGivesInitialRecord) {
    auto d = test::coarse(0.0);
    const auto m = model();
    const auto r = simulate(m, d);
    ASSERT_EQ(r.series.size(), 1u);
    EXPECT_EQ(r.series.front().t, 0.0);
    EXPECT_EQ(r.final_state, init_state(m, d));
    EXPECT_EQ(r.health.stop, StopReason::Completed);
}

TEST(Simulate, RecordsAndInvariants) {
    const auto d = test::coarse(10.0);
    const auto m = model(1.0, 1.0);
    double max_backstep = 0.0;
    std::size_t calls = 0;
    const auto r = simulate(m, d, [&](const Solver& solver, const SimState& s, const SeriesRecord& rec) {
        ++calls;
        EXPECT_EQ(s.z.front(), 0.0);
        EXPECT_EQ(s.z.back(), 0.0);
        EXPECT_EQ(rec.t, s.t);
        EXPECT_LE(rec.max_u, solver.constants().A * (1 + kBoundTolerance));
        EXPECT_LE(rec.max_v, solver.constants().B * (1 + kBoundTolerance));
        max_backstep = std::max(max_backstep, solver.last_step().backstep);
    });
    ASSERT_EQ(r.series.size(), 21u);
    EXPECT_EQ(calls, r.series.size());
    for (std::size_t k = 0; k < r.series.size(); ++k) {
        EXPECT_NEAR(r.series[k].t, 0.5 * static_cast<double>(k), 1e-12);
        EXPECT_NEAR(r.series[k].span, r.series[k].h - r.series[k].g, 1e-15);
        if (k > 0) {
            EXPECT_LE(r.series[k].g, r.series[k - 1].g + 1e-12);
            EXPECT_GE(r.series[k].h, r.series[k - 1].h - 1e-12);
        }
    }
    EXPECT_EQ(r.health.floor_hits, 0);
    EXPECT_GT(r.health.min_core_u, 0.0);
    EXPECT_LE(r.health.max_backstep, r.health.max_stencil_tolerance * d.dt + 1e-15);
}

TEST(Simulate, Deterministic) {
    const auto d = test::coarse(5.0);
    const auto m = model(2.0, 0.8);
    const auto a = simulate(m, d);
    const auto b = simulate(m, d);
    EXPECT_EQ(a.series, b.series);
    EXPECT_EQ(a.final_state, b.final_state);
}

TEST(Simulate, SmallHabitatSmallBetaDecays) {
    const auto d = test::coarse(30.0);
    const auto r = simulate(model(0.001, 0.5), d);
    EXPECT_LT(r.series.back().max_v, 1e-6);
    EXPECT_LT(r.series.back().span, kPi);
    EXPECT_NEAR(r.final_state.u[r.final_state.u.size() / 2], 1.0, 1e-3);
}

TEST(Simulate, LargeHabitatSpreadsUntilTruncation) {
    auto d = test::coarse(200.0);
    d.L = 12.0;
    const auto r = simulate(model(1.0, 2.0), d);
    EXPECT_EQ(r.health.stop, StopReason::FrontNearTruncation);
    EXPECT_LT(r.final_state.t, 200.0);
    EXPECT_GT(r.series.back().span, kPi);
    // the run stops within one step of entering the margin
    EXPECT_GT(r.final_state.front.h, d.L - d.front_margin - 0.1);
    EXPECT_LT(r.final_state.front.h, d.L - d.front_margin + 0.1);
}

TEST(Simulate, HollingTannerRunsWithinBounds) {
    auto p = test::params(1.0, 2.0);
    p.kernel = HollingTanner{1.0};
    const auto r = simulate(validate_params(p, {}), test::coarse(10.0));
    EXPECT_LE(r.health.max_u_ratio, 1 + kBoundTolerance);
    EXPECT_LE(r.health.max_v_ratio, 1 + kBoundTolerance);
}

TEST(Sampling, PredatorZeroOutsideFronts) {
    const auto d = test::coarse();
    const Solver solver(model(1.0, 1.0), d);
    const auto s = solver.initial_state();
    const auto v = solver.predator_on_prey_grid(s);
    for (std::size_t j = 0; j < v.size(); ++j) {
        const double x = solver.x_at(j);
        if (std::abs(x) >= 1.0) {
            EXPECT_EQ(v[j], 0.0) << x;
        } else {
            EXPECT_NEAR(v[j], std::cos(kPi * x / 2), 2e-3) << x;
        }
    }
    EXPECT_EQ(solver.predator_at(s, 1.5), 0.0);
    EXPECT_NEAR(solver.prey_at(s, 0.3), 1.0, 1e-15);
}

TEST(Refinement, NeedsThreeLevels) {
    const std::vector<Discretization> two(2, test::coarse(1.0));
    EXPECT_EQ(code_of([&] { (void)refine_check(model(), two, 1.0); }), ErrorCode::PreconditionViolated);
    EXPECT_EQ(code_of([&] { (void)refine_check(model(), test::coarse(1.0), 2, 1.0); }),
              ErrorCode::PreconditionViolated);
}

TEST(Refinement, IdenticalLevelsAreFlagged) {
    const std::vector<Discretization> same(3, test::coarse(1.0));
    const auto r = refine_check(model(), same, 1.0);
    EXPECT_TRUE(r.undefined);
    ASSERT_EQ(r.orders.size(), 1u);
    EXPECT_FALSE(r.orders.front().h.has_value());
}

TEST(Refinement, SpreadingFrontConverges) {
    Discretization base = test::coarse(4.0);
    base.ny = 40;
    base.dt = 0.04;
    base.L = 15.0;
    const auto r = refine_check(model(1.0, 2.0), base, 3, 4.0);
    ASSERT_EQ(r.levels.size(), 3u);
    EXPECT_EQ(r.levels[1].disc.ny, 80);
    EXPECT_DOUBLE_EQ(r.levels[1].disc.dt, 0.02);
    ASSERT_TRUE(r.orders.front().h.has_value());
    EXPECT_GE(*r.orders.front().h, 1.0);
}

}  // namespace
}  // namespace lgfb
