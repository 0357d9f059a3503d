#pragma once

#include "closedform.hpp"

namespace g2flow {

/// Per-family diagnostic quantities, derived once symbolically and then
/// evaluated numerically along trajectories: volume factor, |T|^2, tr T,
/// Λ^2 = |Rm|^2 + |∇T|^2 + |T|^4 and the Einstein-Hilbert density.
/// For the contact family a transversal curvature bound K contributes
/// K^2/h^4 to Λ^2 (the formal frame itself is transversally flat).
struct FamilyDiagnostics {
    Laurent volfactor, normT2, trT, lambda2, eh;
    double K = 0;
    FamilyKind family = FamilyKind::CCY;

    static FamilyDiagnostics build(FamilyKind family, double K = 0) {
        static FrameAlgebra<Laurent> frame = FrameAlgebra<Laurent>::heisenberg();
        FamilyDiagnostics m;
        m.family = family;
        m.K = K;
        Laurent f = Laurent::variable(0);
        G2Data<Laurent> G = family == FamilyKind::CCY
                                ? build_ccy(frame, f, Laurent::variable(1))
                                : build_heisenberg(frame, f, Laurent::variable(1),
                                                   Laurent::variable(2), Laurent::variable(3));
        TorsionInvariants<Laurent> inv = torsion_invariants(G);
        CurvatureData<Laurent> cd = curvature(frame, G.metric, G.T);
        m.volfactor = G.metric.vol_factor;
        m.normT2 = inv.normT2;
        m.trT = inv.trT;
        m.lambda2 = cd.normRm2 + cd.normNablaT2 + inv.normT2 * inv.normT2;
        Laurent half(1, 2);
        m.eh = Laurent(-1) * half * inv.normT2 * m.volfactor; // VT = 0 on both families
        return m;
    }

    Diagnostics operator()(const std::vector<double>& y) const {
        Diagnostics d;
        d.volfactor = volfactor.eval(y);
        d.normT2 = normT2.eval(y);
        d.trT = trT.eval(y);
        double l2 = lambda2.eval(y);
        if (K > 0) {
            double h = y[1];
            l2 += K * K / (h * h * h * h);
        }
        d.lambda = std::sqrt(l2);
        d.eh_density = eh.eval(y);
        return d;
    }
};

} // namespace g2flow
