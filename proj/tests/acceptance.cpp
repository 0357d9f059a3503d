// Acceptance suite: one line per criterion, nonzero exit on any failure.
// Everything runs against the library as shipped; tolerances are fixed here.

#include "g2flow/diagnostics.hpp"
#include "g2flow/refcheck.hpp"
#include "test_helpers.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

using namespace g2flow;
using namespace g2test;

namespace {

int failures = 0;

void criterion(int n, const std::string& what, const std::function<bool(std::string&)>& body) {
    auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("[%s] criterion %d: %s (%.2f s)%s%s\n", ok ? "PASS" : "FAIL", n, what.c_str(), secs,
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++failures;
}

Mat7<Rat> warped(const Rat& transversal, const Rat& fiber) {
    Mat7<Rat> m;
    for (int i = 0; i < 6; ++i) m(i, i) = transversal;
    m(6, 6) = fiber;
    return m;
}

bool ccy_formulas_exact(const Rat& f, const Rat& h) {
    auto fr = FrameAlgebra<Rat>::heisenberg();
    auto G = build_ccy(fr, f, h);
    auto inv = torsion_invariants(G);
    Rat h2 = h * h, h4 = h2 * h2, f2 = f * f, f3 = f2 * f, f4 = f3 * f;
    bool ok = true;
    ok = ok && G.torsion.tau0 == Rat(6, 7) * f / h2;
    ok = ok && G.torsion.tau3 == Rat(8, 7) * f2 * eta_wedge_omega0<Rat>() -
                                     Rat(6, 7) * (f * h) * re_upsilon0<Rat>();
    ok = ok && G.T == warped(f / 2, Rat(-3, 2) * f3 / h2);
    ok = ok && ricci_bryant(G) == warped(Rat(-1, 2) * f2 / h2, Rat(3, 2) * f4 / h4);
    ok = ok && inv.TtT == warped(Rat(1, 4) * f2 / h2, Rat(9, 4) * f4 / h4);
    ok = ok && inv.normT2 == Rat(15, 4) * f2 / h4;
    ok = ok && inv.trT == Rat(3, 2) * f / h2;
    return ok;
}

bool h7_formulas_exact(const Rat& f, const Rat& a, const Rat& b, const Rat& c) {
    auto fr = FrameAlgebra<Rat>::heisenberg();
    auto G = build_heisenberg(fr, f, a, b, c);
    auto inv = torsion_invariants(G);
    Rat a2 = a * a, b2 = b * b, c2 = c * c;
    Rat a4 = a2 * a2, b4 = b2 * b2, c4 = c2 * c2;
    Rat f2 = f * f, f3 = f2 * f, f4 = f3 * f;
    Rat s2 = a2 * b2 + a2 * c2 + b2 * c2;
    Rat s4 = a4 * b4 + a4 * c4 + b4 * c4;
    Rat abc2 = a2 * b2 * c2, abc4 = a4 * b4 * c4;
    bool ok = true;
    {
        Mat7<Rat> T;
        for (int i = 0; i < 6; ++i) T(i, i) = f / 2;
        T(6, 6) = -f3 * s2 / (2 * abc2);
        ok = ok && G.T == T;
    }
    {
        Mat7<Rat> ric;
        ric(0, 0) = ric(1, 1) = -f2 / (2 * a2);
        ric(2, 2) = ric(3, 3) = -f2 / (2 * b2);
        ric(4, 4) = ric(5, 5) = -f2 / (2 * c2);
        ric(6, 6) = f4 * s4 / (2 * abc4);
        ok = ok && ricci_bryant(G) == ric;
    }
    {
        Mat7<Rat> ttt;
        ttt(0, 0) = ttt(1, 1) = f2 / (4 * a2);
        ttt(2, 2) = ttt(3, 3) = f2 / (4 * b2);
        ttt(4, 4) = ttt(5, 5) = f2 / (4 * c2);
        ttt(6, 6) = f4 * s2 * s2 / (4 * abc4);
        ok = ok && inv.TtT == ttt;
    }
    ok = ok && inv.normT2 == f2 * (2 * s4 + s2 * s2) / (4 * abc4);
    ok = ok && inv.trT == f * s2 / (2 * abc2);
    return ok;
}

struct Leg {
    double t_target;
    bool toward_singularity;
};

} // namespace

int main() {
    std::printf("acceptance criteria\n===================\n");

    criterion(1, "formula suite reproduces the reference tensors exactly (rational backend)",
              [&](std::string& detail) {
                  for (int it = 0; it < 20; ++it)
                      if (!ccy_formulas_exact(rand_pos_rat(), rand_pos_rat())) {
                          detail = "contact-family mismatch";
                          return false;
                      }
                  for (int it = 0; it < 20; ++it)
                      if (!h7_formulas_exact(rand_pos_rat(), rand_pos_rat(), rand_pos_rat(),
                                             rand_pos_rat())) {
                          detail = "heisenberg-family mismatch";
                          return false;
                      }
                  return true;
              });

    criterion(2, "Bryant Ricci equals the Koszul-curvature Ricci on 50 random metrics",
              [&](std::string& detail) {
                  auto fr = FrameAlgebra<Rat>::heisenberg();
                  for (int it = 0; it < 50; ++it) {
                      auto G = rand_g2_on(fr);
                      if (!(curvature(fr, G.metric, G.T).Ric == ricci_bryant(G))) {
                          detail = "mismatch at sample " + std::to_string(it);
                          return false;
                      }
                  }
                  return true;
              });

    criterion(3, "ODE reductions match the reference systems; typo'd displays are ledgered",
              [&](std::string& detail) {
                  auto results = refcheck::run_reference_checks();
                  auto status_of = [&](const std::string& id) -> const refcheck::CheckResult* {
                      for (auto& r : results)
                          if (r.id == id) return &r;
                      return nullptr;
                  };
                  for (const char* id : {"ccy.ode.rhf", "ccy.ode.rl1", "ccy.ode.rl2", "ccy.ode.ngf",
                                         "ccy.ode.rhf.raw", "h7.ode.rhf"}) {
                      auto* r = status_of(id);
                      if (!r || r->status != refcheck::Status::Pass) {
                          detail = std::string(id) + " did not match";
                          return false;
                      }
                  }
                  // the three systems with printed typos: engine internally
                  // consistent (residual-free reduction + symmetric collapse)
                  // and the mismatch recorded in the ledger
                  for (const char* id : {"h7.ode.rl1", "h7.ode.rl2", "h7.ode.ngf"}) {
                      auto* r = status_of(id);
                      if (!r || r->status != refcheck::Status::Discrepancy) {
                          detail = std::string(id) + " not ledgered as a discrepancy";
                          return false;
                      }
                  }
                  for (const char* id : {"sym.rhf", "sym.rl1", "sym.rl2", "sym.ngf"}) {
                      auto* r = status_of(id);
                      if (!r || r->status != refcheck::Status::Pass) {
                          detail = std::string(id) + " symmetric reduction failed";
                          return false;
                      }
                  }
                  return true;
              });

    criterion(4, "numerical trajectories match the closed solutions to 1e-7 over 90% of each lifespan",
              [&](std::string& detail) {
                  IntegrateSettings set;
                  set.rtol = 1e-10;
                  set.atol = 1e-13;
                  for (auto kind : {FlowKind::RHF, FlowKind::RL1, FlowKind::RL2, FlowKind::NGF}) {
                      auto sysp = reduce_to_ode(kind, FamilyKind::CCY);
                      Rhs rhs = [&sysp](const std::vector<double>& y) { return sysp.eval(y); };
                      for (double a : {0.5, 1.0, 2.0}) {
                          auto sol = closed_solution(kind, a);
                          std::vector<Leg> legs;
                          if (std::isfinite(sol.t_max)) legs.push_back({0.9 * sol.t_max, true});
                          else legs.push_back({100.0, false});
                          if (std::isfinite(sol.t_min)) legs.push_back({0.9 * sol.t_min, true});
                          else legs.push_back({-100.0, false});
                          for (auto leg : legs) {
                              auto tr = integrate(rhs, {a, 1.0}, 0.0, leg.t_target, set);
                              if (tr.status != Termination::ReachedEnd) {
                                  detail = std::string(flow_name(kind)) + " leg did not finish";
                                  return false;
                              }
                              double worst = 0;
                              for (size_t i = 0; i < tr.times.size(); ++i) {
                                  auto [fc, hc] = sol.eval(tr.times[i]);
                                  worst = std::max(worst, std::abs(tr.states[i][0] - fc) / fc);
                                  worst = std::max(worst, std::abs(tr.states[i][1] - hc) / hc);
                              }
                              if (worst >= 1e-7) {
                                  char buf[160];
                                  std::snprintf(buf, sizeof(buf), "%s a=%g err=%.3g", flow_name(kind),
                                                a, worst);
                                  detail = buf;
                                  return false;
                              }
                          }
                      }
                  }
                  return true;
              });

    criterion(5, "blow-up estimates hit the singular times within 1e-3 relative error",
              [&](std::string& detail) {
                  auto diag = FamilyDiagnostics::build(FamilyKind::CCY);
                  struct Case {
                      FlowKind kind;
                      double t1, tau;
                  };
                  for (auto cse : {Case{FlowKind::RHF, 1.0, 1.0 / 13},
                                   Case{FlowKind::RL1, -1.0, -2.0 / 25},
                                   Case{FlowKind::NGF, 1.0, 4.0 / 9}}) {
                      auto sysp = reduce_to_ode(cse.kind, FamilyKind::CCY);
                      Rhs rhs = [&sysp](const std::vector<double>& y) { return sysp.eval(y); };
                      auto tr = integrate(rhs, {1.0, 1.0}, 0.0, cse.t1, {}, diag);
                      if (tr.status == Termination::ReachedEnd) {
                          detail = std::string(flow_name(cse.kind)) + ": no blow-up detected";
                          return false;
                      }
                      double rel = std::abs(tr.t_est - cse.tau) / std::abs(cse.tau);
                      if (rel >= 1e-3) {
                          char buf[120];
                          std::snprintf(buf, sizeof(buf), "%s t_est=%.8f rel=%.2g",
                                        flow_name(cse.kind), tr.t_est, rel);
                          detail = buf;
                          return false;
                      }
                  }
                  return true;
              });

    criterion(6, "singularity types: RHF and NGF Type I, RL1 Type III (K=0) and IIb (K=1)",
              [&](std::string& detail) {
                  double c0 = 693.0 / 16;
                  for (double K : {0.0, 1.0, 10.0}) {
                      auto rep = classify(profile_samples(FlowKind::RHF, 1.0, K, c0),
                                          closed_solution(FlowKind::RHF, 1.0).t_max);
                      if (rep.type != SingType::I) {
                          detail = "RHF K=" + std::to_string(K);
                          return false;
                      }
                  }
                  auto ngf = classify(profile_samples(FlowKind::NGF, 1.0, 0.0, c0),
                                      closed_solution(FlowKind::NGF, 1.0).t_max);
                  if (ngf.type != SingType::I) {
                      detail = "NGF";
                      return false;
                  }
                  auto rl1_flat = classify(profile_samples(FlowKind::RL1, 1.0, 0.0, c0), kInf);
                  if (rl1_flat.type != SingType::III) {
                      detail = "RL1 K=0";
                      return false;
                  }
                  auto rl1_curved = classify(profile_samples(FlowKind::RL1, 1.0, 1.0, c0), kInf);
                  if (rl1_curved.type != SingType::IIb) {
                      detail = "RL1 K=1";
                      return false;
                  }
                  return true;
              });

    criterion(7, "fitted laws: volume 27/26 (RHF), 3/10 (RL1), EH decay -11/10 (RL1), each +-0.01",
              [&](std::string& detail) {
                  IntegrateSettings set;
                  set.rtol = 1e-10;
                  auto diag = FamilyDiagnostics::build(FamilyKind::CCY);
                  char buf[256];

                  auto sys_rhf = reduce_to_ode(FlowKind::RHF, FamilyKind::CCY);
                  Rhs rhs_rhf = [&](const std::vector<double>& y) { return sys_rhf.eval(y); };
                  auto tr = integrate(rhs_rhf, {1.0, 1.0}, 0.0, 0.9 / 13, set, diag);
                  std::vector<std::pair<double, double>> pts;
                  for (size_t i = 0; i < tr.times.size(); ++i)
                      pts.emplace_back(1 - 13 * tr.times[i], tr.diags[i].volfactor);
                  double vol_rhf = fit_log_exponent(pts);

                  auto sys_rl1 = reduce_to_ode(FlowKind::RL1, FamilyKind::CCY);
                  Rhs rhs_rl1 = [&](const std::vector<double>& y) { return sys_rl1.eval(y); };
                  auto tr2 = integrate(rhs_rl1, {1.0, 1.0}, 0.0, 1e4, set, diag);
                  std::vector<std::pair<double, double>> vpts, epts;
                  double eh0 = diag(std::vector<double>{1.0, 1.0}).eh_density;
                  for (size_t i = 0; i < tr2.times.size(); ++i) {
                      double scale = 1 + 12.5 * tr2.times[i];
                      if (scale < 10) continue; // fit in the power-law regime
                      vpts.emplace_back(scale, tr2.diags[i].volfactor);
                      epts.emplace_back(scale, tr2.diags[i].eh_density / eh0);
                  }
                  double vol_rl1 = fit_log_exponent(vpts);
                  double eh_rl1 = fit_log_exponent(epts);
                  // prefactor of the fitted EH power law (reported, not asserted)
                  double logc = 0;
                  for (auto& [x, y] : epts) logc += std::log(y) - eh_rl1 * std::log(x);
                  double prefactor = std::exp(logc / static_cast<double>(epts.size()));

                  bool ok_vol_rhf = std::abs(vol_rhf - 27.0 / 26) < 0.01;
                  bool ok_vol_rl1 = std::abs(vol_rl1 - 0.3) < 0.01;
                  bool ok_eh = std::abs(eh_rl1 - (-1.1)) < 0.01;
                  std::snprintf(buf, sizeof(buf),
                                "vol_rhf=%.4f (27/26=%.4f) %s; vol_rl1=%.4f (0.3) %s; "
                                "eh_rl1=%.4f (-1.1 asserted) %s, prefactor=%.4f",
                                vol_rhf, 27.0 / 26, ok_vol_rhf ? "ok" : "FAIL", vol_rl1,
                                ok_vol_rl1 ? "ok" : "FAIL", eh_rl1, ok_eh ? "ok" : "FAIL", prefactor);
                  detail = buf;
                  return ok_vol_rhf && ok_vol_rl1 && ok_eh;
              });

    criterion(8, "|Rm|^2 h^8/f^4 is constant along the RHF solution and pins c0 = 69/4",
              [&](std::string& detail) {
                  auto fr = FrameAlgebra<double>::heisenberg();
                  auto sol = closed_solution(FlowKind::RHF, 1.0);
                  double lo = -1.0, hi = 0.9 * sol.t_max;
                  double ref = 69.0 / 4, worst = 0;
                  for (int i = 0; i < 50; ++i) {
                      double t = lo + (hi - lo) * i / 49.0;
                      auto [f, h] = sol.eval(t);
                      auto G = build_ccy(fr, f, h);
                      auto cd = curvature(fr, G.metric, G.T);
                      double val = cd.normRm2 * std::pow(h, 8) / std::pow(f, 4);
                      worst = std::max(worst, std::abs(val - ref) / ref);
                  }
                  auto constants = refcheck::computed_constants();
                  bool pinned = constants.c0 == Rat(69, 4) && constants.c0_prime == Rat(12);
                  char buf[120];
                  std::snprintf(buf, sizeof(buf), "max rel variation %.2e, c0=%s c0'=%s", worst,
                                constants.c0.str().c_str(), constants.c0_prime.str().c_str());
                  detail = buf;
                  return worst < 1e-9 && pinned;
              });

    criterion(9, "randomized exact property suites (wedge, hodge, d, diamond, reassembly)",
              [&](std::string& detail) {
                  size_t cases = 0;
                  auto fr = FrameAlgebra<Rat>::heisenberg();
                  // wedge sign law
                  for (int it = 0; it < 1000; ++it) {
                      int p = static_cast<int>(rng()() % 4), q = static_cast<int>(rng()() % 4);
                      auto a = rand_form(p), b = rand_form(q);
                      auto ab = wedge(a, b), ba = wedge(b, a);
                      bool ok = ((p * q) % 2 == 0) ? ab == ba : ab == -ba;
                      if (!ok) {
                          detail = "wedge sign law";
                          return false;
                      }
                      ++cases;
                  }
                  // d.d = 0 on every coframe element of every registered frame
                  for (auto frx : {FrameAlgebra<Rat>::heisenberg(), FrameAlgebra<Rat>::abelian(),
                                   frame_n1(), frame_n2()}) {
                      for (int k = 1; k <= kDim; ++k) {
                          if (!frx.d(frx.d(KForm<Rat>::basis({k}))).zero()) {
                              detail = "d.d != 0";
                              return false;
                          }
                          ++cases;
                      }
                  }
                  // hodge involutivity and pairing symmetry on random SPD metrics
                  for (int it = 0; it < 10; ++it) {
                      auto m = rand_spd_metric();
                      for (int deg = 0; deg <= 7; ++deg) {
                          auto a = rand_form(deg, 3);
                          if (!(hodge(m, hodge(m, a)) == a)) {
                              detail = "hodge involutivity";
                              return false;
                          }
                          ++cases;
                      }
                      auto a = rand_form(3, 4), b = rand_form(3, 4);
                      if (!(wedge(a, hodge(m, b)) == wedge(b, hodge(m, a)))) {
                          detail = "pairing symmetry";
                          return false;
                      }
                      ++cases;
                  }
                  // diamond identities and reassembly on random structures
                  for (int it = 0; it < 12; ++it) {
                      auto G = rand_g2_on(fr);
                      if (!(diamond(G.metric.g, G.phi, G.metric) == Rat(3) * G.phi) ||
                          !(diamond(G.metric.g, G.psi, G.metric) == Rat(4) * G.psi)) {
                          detail = "diamond on g";
                          return false;
                      }
                      cases += 2;
                  }
                  for (auto frx : {frame_n1(), frame_n2()}) {
                      for (int it = 0; it < 6; ++it) {
                          auto G = rand_g2_on(frx); // construction validates reassembly exactly
                          auto Tn = torsion_from_nabla(G, koszul(frx, G.metric));
                          if (!(Tn == G.T)) {
                              detail = "torsion cross-check";
                              return false;
                          }
                          cases += 2;
                      }
                  }
                  // stationarity of the torsion-free structure
                  auto ab7 = FrameAlgebra<Rat>::abelian();
                  auto flat = make_g2(ab7, phi_standard<Rat>());
                  for (auto kind : {FlowKind::RHF, FlowKind::RL1, FlowKind::RL2, FlowKind::NGF}) {
                      if (!velocity(kind, flat).zero()) {
                          detail = "stationarity";
                          return false;
                      }
                      ++cases;
                  }
                  detail = std::to_string(cases) + " randomized cases";
                  return cases >= 1000;
              });

    std::printf("===================\n%s: %d failure(s)\n", failures ? "RED" : "GREEN", failures);
    return failures;
}
