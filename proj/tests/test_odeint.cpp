#include <doctest.h>
#include "test_helpers.hpp"
#include "g2flow/diagnostics.hpp"

using namespace g2flow;
using namespace g2test;

namespace {

Rhs make_rhs(FlowKind kind, FamilyKind family) {
    auto sys = std::make_shared<OdeSystem>(reduce_to_ode(kind, family));
    return [sys](const std::vector<double>& y) { return sys->eval(y); };
}

double max_rel_err_vs_closed(const Trajectory& tr, const ClosedSolution& sol) {
    double worst = 0;
    for (size_t i = 0; i < tr.times.size(); ++i) {
        if (!sol.inside(tr.times[i])) continue;
        auto [f, h] = sol.eval(tr.times[i]);
        worst = std::max(worst, std::abs(tr.states[i][0] - f) / f);
        worst = std::max(worst, std::abs(tr.states[i][1] - h) / h);
    }
    return worst;
}

} // namespace

TEST_CASE("RHF trajectory matches the closed solution") {
    auto rhs = make_rhs(FlowKind::RHF, FamilyKind::CCY);
    auto tr = integrate(rhs, {1.0, 1.0}, 0.0, 0.07);
    CHECK(tr.status == Termination::ReachedEnd);
    CHECK(max_rel_err_vs_closed(tr, closed_solution(FlowKind::RHF, 1.0)) < 1e-8);
}

TEST_CASE("ancient direction: backward integration to t = -100") {
    auto rhs = make_rhs(FlowKind::RHF, FamilyKind::CCY);
    auto tr = integrate(rhs, {1.0, 1.0}, 0.0, -100.0);
    CHECK(tr.status == Termination::ReachedEnd);
    for (double v : tr.states.back()) CHECK(std::isfinite(v));
    CHECK(max_rel_err_vs_closed(tr, closed_solution(FlowKind::RHF, 1.0)) < 1e-8);
}

TEST_CASE("blow-up detection near the singular time") {
    auto rhs = make_rhs(FlowKind::RHF, FamilyKind::CCY);
    auto diag = FamilyDiagnostics::build(FamilyKind::CCY);
    auto tr = integrate(rhs, {1.0, 1.0}, 0.0, 1.0, {}, diag);
    CHECK(tr.status == Termination::BlowUp);
    CHECK(std::abs(tr.t_est - 1.0 / 13) < 1e-4);
}

TEST_CASE("observed convergence order of the embedded pair is at least 4") {
    auto rhs = make_rhs(FlowKind::RHF, FamilyKind::CCY);
    auto sol = closed_solution(FlowKind::RHF, 1.0);
    auto endpoint_err = [&](double hstep) {
        IntegrateSettings set;
        set.fixed_step = hstep;
        auto tr = integrate(rhs, {1.0, 1.0}, 0.0, 0.064, set);
        auto [f, h] = sol.eval(tr.times.back());
        return std::abs(tr.states.back()[0] - f) / f + std::abs(tr.states.back()[1] - h) / h;
    };
    double e1 = endpoint_err(1e-3);
    double e2 = endpoint_err(5e-4);
    double order = std::log2(e1 / e2);
    CHECK(order >= 4.0);
}

TEST_CASE("time-reversal consistency") {
    double rtol = 1e-10;
    IntegrateSettings set;
    set.rtol = rtol;
    auto rhs = make_rhs(FlowKind::RHF, FamilyKind::CCY);
    auto fwd = integrate(rhs, {1.0, 1.0}, 0.0, 0.05, set);
    auto back = integrate(rhs, fwd.states.back(), 0.05, 0.0, set);
    for (size_t i = 0; i < 2; ++i)
        CHECK(std::abs(back.states.back()[i] - 1.0) < 10 * rtol);
}

TEST_CASE("volume monotonicity along the numerical trajectories") {
    auto diag = FamilyDiagnostics::build(FamilyKind::CCY);
    auto rhf = integrate(make_rhs(FlowKind::RHF, FamilyKind::CCY), {1.0, 1.0}, 0.0, 0.07, {}, diag);
    for (size_t i = 1; i < rhf.diags.size(); ++i)
        CHECK(rhf.diags[i].volfactor < rhf.diags[i - 1].volfactor);
    auto rl1 = integrate(make_rhs(FlowKind::RL1, FamilyKind::CCY), {1.0, 1.0}, 0.0, 50.0, {}, diag);
    for (size_t i = 1; i < rl1.diags.size(); ++i)
        CHECK(rl1.diags[i].volfactor > rl1.diags[i - 1].volfactor);
}

TEST_CASE("blow-up estimates approach the closed singular time as rtol shrinks") {
    auto rhs = make_rhs(FlowKind::RHF, FamilyKind::CCY);
    auto diag = FamilyDiagnostics::build(FamilyKind::CCY);
    IntegrateSettings set;
    set.rtol = 1e-10;
    set.atol = 1e-13;
    auto tr = integrate(rhs, {1.0, 1.0}, 0.0, 1.0, set, diag);
    CHECK(std::abs(tr.t_est - 1.0 / 13) * 13 < 1e-3);
}

TEST_CASE("sweep: symmetric grid point reproduces the contact trajectory") {
    auto rhs_h7 = make_rhs(FlowKind::RHF, FamilyKind::HEISENBERG);
    auto rhs_ccy = make_rhs(FlowKind::RHF, FamilyKind::CCY);
    auto items = sweep(rhs_h7, {{1, 1, 1, 1}}, 0.0, 0.06);
    REQUIRE(items.size() == 1);
    REQUIRE(items[0].ok);
    auto ccy = integrate(rhs_ccy, {1.0, 1.0}, 0.0, 0.06);
    // compare the embedded (f, h) = (f, a) on a common grid via dense output
    for (double t : {0.01, 0.02, 0.03, 0.055}) {
        auto yh = items[0].trajectory.at(t);
        auto yc = ccy.at(t);
        CHECK(yh[0] == doctest::Approx(yc[0]).epsilon(1e-8));
        CHECK(yh[1] == doctest::Approx(yc[1]).epsilon(1e-8));
        CHECK(yh[2] == doctest::Approx(yc[1]).epsilon(1e-8));
        CHECK(yh[3] == doctest::Approx(yc[1]).epsilon(1e-8));
    }
}

TEST_CASE("sweep: unequal initial data stays inside the family") {
    auto rhs = make_rhs(FlowKind::RHF, FamilyKind::HEISENBERG);
    auto diag = FamilyDiagnostics::build(FamilyKind::HEISENBERG);
    auto items = sweep(rhs, {{1.0, 1.1, 1.0, 0.9}, {1.0, 0.8, 1.3, 1.0}}, 0.0, 1.0, {}, diag);
    REQUIRE(items.size() == 2);
    for (auto& it : items) {
        REQUIRE(it.ok);
        CHECK(it.trajectory.status == Termination::BlowUp);
        for (auto& y : it.trajectory.states)
            for (double v : y) CHECK(v > 0);
    }
}

TEST_CASE("sweep rejects an empty grid; invalid initial states are errors") {
    auto rhs = make_rhs(FlowKind::RHF, FamilyKind::CCY);
    CHECK_THROWS_WITH(sweep(rhs, {}, 0.0, 1.0), "empty sweep grid");
    CHECK_THROWS_WITH(integrate(rhs, {0.0, 1.0}, 0.0, 1.0), "invalid initial state");
    CHECK_THROWS_WITH(integrate(rhs, {1.0, -1.0}, 0.0, 1.0), "invalid initial state");
}
