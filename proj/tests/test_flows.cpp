#include <doctest.h>
#include "test_helpers.hpp"

using namespace g2flow;
using namespace g2test;

TEST_CASE("ansatz construction") {
    auto fr = FrameAlgebra<Rat>::heisenberg();
    // contact family at (f,h) = (a,1): phi = a eta0^omega0 + Re Upsilon0
    Rat a = rand_pos_rat();
    auto G = build_ccy(fr, a, Rat(1));
    CHECK(G.phi == a * eta_wedge_omega0<Rat>() + re_upsilon0<Rat>());

    auto H = build_heisenberg(fr, Rat(1), Rat(1), Rat(1), Rat(1));
    CHECK(H.phi == phi_standard<Rat>());

    CHECK_THROWS_WITH(build_ccy(fr, Rat(0), Rat(1)), "degenerate ansatz");
    CHECK_THROWS_WITH(build_ccy(fr, Rat(1), Rat(-2)), "degenerate ansatz");
    CHECK_THROWS_WITH(build_heisenberg(fr, Rat(1), Rat(1), Rat(0), Rat(1)), "degenerate ansatz");
}

TEST_CASE("velocity fixtures on the contact family") {
    auto fr = FrameAlgebra<Rat>::heisenberg();
    Rat f = rand_pos_rat(), h = rand_pos_rat();
    auto G = build_ccy(fr, f, h);
    Rat f3h2 = f * f * f / (h * h), f2h = f * f / h;
    CHECK(velocity(FlowKind::RHF, G) ==
          Rat(-7, 2) * f3h2 * eta_wedge_omega0<Rat>() - Rat(15, 2) * f2h * re_upsilon0<Rat>());
    CHECK(velocity(FlowKind::RL1, G) ==
          Rat(-5, 4) * f3h2 * eta_wedge_omega0<Rat>() + Rat(15, 4) * f2h * re_upsilon0<Rat>());
    CHECK(velocity(FlowKind::RL2, G) ==
          Rat(5, 2) * f3h2 * eta_wedge_omega0<Rat>() + Rat(15, 2) * f2h * re_upsilon0<Rat>());
    CHECK(velocity(FlowKind::NGF, G) ==
          Rat(-27, 8) * f3h2 * eta_wedge_omega0<Rat>() - Rat(27, 8) * f2h * re_upsilon0<Rat>());
}

TEST_CASE("stationarity: torsion-free structures have zero velocity") {
    auto ab = FrameAlgebra<Rat>::abelian();
    auto G = make_g2(ab, phi_standard<Rat>());
    for (auto kind : {FlowKind::RHF, FlowKind::RL1, FlowKind::RL2, FlowKind::NGF})
        CHECK(velocity(kind, G).zero());
}

TEST_CASE("vector torsion terms engage on non-co-closed structures") {
    auto fr = frame_n2();
    auto G = rand_g2_on(fr);
    auto inv = torsion_invariants(G);
    REQUIRE(!inv.VT.zero());
    // RL1 carries the 1/3 tr T VT - 1/3 T^t(VT) vector part on top of Div T
    auto vel = velocity(FlowKind::RL1, G);
    CHECK(!vel.zero());
    // L_{VT} g enters the NGF tensor; it must change the outcome relative to
    // dropping the vector terms
    auto ric = ricci_bryant(G);
    Rat half(1, 2);
    Mat7<Rat> trunc = -ric - half * inv.normT2 * G.metric.g + inv.TTt;
    auto vel_trunc = diamond(trunc, G.phi, G.metric);
    CHECK(!(velocity(FlowKind::NGF, G) == vel_trunc));
}

TEST_CASE("reduced systems evaluate consistently with the tensor velocity") {
    auto fr = FrameAlgebra<Rat>::heisenberg();
    for (auto kind : {FlowKind::RHF, FlowKind::RL1, FlowKind::RL2, FlowKind::NGF}) {
        auto sys = reduce_to_ode(kind, FamilyKind::HEISENBERG);
        for (int it = 0; it < 3; ++it) {
            Rat f = rand_pos_rat(), a = rand_pos_rat(), b = rand_pos_rat(), c = rand_pos_rat();
            auto G = build_heisenberg(fr, f, a, b, c);
            auto vel = velocity(kind, G);
            std::vector<Rat> y{f, a, b, c};
            auto dp = std::vector<Rat>{sys.rhs_product[0].eval_rat(y), sys.rhs_product[1].eval_rat(y),
                                       sys.rhs_product[2].eval_rat(y), sys.rhs_product[3].eval_rat(y)};
            auto expected = KForm<Rat>::basis({1, 2, 7}, dp[0]) + KForm<Rat>::basis({3, 4, 7}, dp[1]) +
                            KForm<Rat>::basis({5, 6, 7}, dp[2]) + dp[3] * re_upsilon0<Rat>();
            // zero projection residual: the velocity lies in the ansatz span
            CHECK(vel == expected);

            // chain rule back from the raw parameter derivatives
            auto dr = sys.eval_rat(y);
            CHECK(dr[0] * a * a + 2 * f * a * dr[1] == dp[0]);
            CHECK(dr[0] * b * b + 2 * f * b * dr[2] == dp[1]);
            CHECK(dr[0] * c * c + 2 * f * c * dr[3] == dp[2]);
            CHECK(dr[1] * b * c + a * dr[2] * c + a * b * dr[3] == dp[3]);
        }
    }
}

TEST_CASE("contact reductions in raw parameters") {
    auto sys = reduce_to_ode(FlowKind::RHF, FamilyKind::CCY);
    std::vector<std::string> vars{"f", "h"};
    CHECK(sys.rhs_raw[0].str(vars) == "3/2 * f^3 * h^-4");
    CHECK(sys.rhs_raw[1].str(vars) == "-5/2 * f^2 * h^-3");
    CHECK(sys.labels == std::vector<std::string>{"f", "h"});
    CHECK(sys.product_labels == std::vector<std::string>{"f*h^2", "h^3"});
}

TEST_CASE("Heisenberg systems specialize to the contact systems at a=b=c=h") {
    for (auto kind : {FlowKind::RHF, FlowKind::RL1, FlowKind::RL2, FlowKind::NGF}) {
        auto hs = reduce_to_ode(kind, FamilyKind::HEISENBERG);
        auto cs = reduce_to_ode(kind, FamilyKind::CCY);
        CHECK(collapse_to_ccy(hs.rhs_product[0]) == cs.rhs_product[0]);
        CHECK(collapse_to_ccy(hs.rhs_product[1]) == cs.rhs_product[0]);
        CHECK(collapse_to_ccy(hs.rhs_product[2]) == cs.rhs_product[0]);
        CHECK(collapse_to_ccy(hs.rhs_product[3]) == cs.rhs_product[1]);
    }
}

TEST_CASE("functional densities") {
    auto fr = FrameAlgebra<Rat>::heisenberg();
    Rat f = rand_pos_rat(), h = rand_pos_rat();
    auto G = build_ccy(fr, f, h);
    auto fd = functionals(G);
    Rat h6 = h * h * h * h * h * h;
    CHECK(fd.volume == f * h6);
    CHECK(fd.energy == Rat(15, 8) * f * f * f * h * h);
    CHECK(fd.EH == Rat(-15, 8) * f * f * f * h * h);

    Rat a = rand_pos_rat(), b = rand_pos_rat(), c = rand_pos_rat();
    auto H = build_heisenberg(fr, f, a, b, c);
    CHECK(functionals(H).volume == f * a * a * b * b * c * c);

    auto ab7 = FrameAlgebra<Rat>::abelian();
    auto flat = make_g2(ab7, phi_standard<Rat>());
    CHECK(is_zero(functionals(flat).EH));
    CHECK(is_zero(functionals(flat).energy));
}
