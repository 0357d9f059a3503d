#pragma once

#include "ansatz.hpp"
#include "laurent.hpp"

namespace g2flow {

enum class FlowKind { RHF, RL1, RL2, NGF };
enum class FamilyKind { CCY, HEISENBERG };

inline const char* flow_name(FlowKind k) {
    switch (k) {
    case FlowKind::RHF: return "rhf";
    case FlowKind::RL1: return "rl1";
    case FlowKind::RL2: return "rl2";
    case FlowKind::NGF: return "ngf";
    }
    return "?";
}

inline const char* family_name(FamilyKind k) {
    return k == FamilyKind::CCY ? "ccy" : "heisenberg";
}

/// Velocity 3-form of the flow at a G2-structure.
///
/// RHF: (-Ric + 3 T^tT - |T|^2 g) ⋄ φ + (Div T) ⌟ ψ
/// RL1: (-Ric - 2/3 (T∘(VT⌟φ))_sym + (tr T) T_sym) ⋄ φ
///      + (Div T + 1/3 (tr T) VT - 1/3 T^t(VT)) ⌟ ψ
/// RL2: RL1 + 1/3 (|T|^2 - 1/3 |VT|^2) g ⋄ φ
/// NGF: (-Ric - 1/2 L_{VT} g - 1/2 |T|^2 g + T T^t - (T(PT))_sym) ⋄ φ
///      + (Div T) ⌟ ψ
///
/// The NGF tensor is the one whose reductions reproduce the reference ODE
/// systems and closed solutions on both ansatz families; the reference's
/// displayed general equation carries an extra pair (tr T) T_sym - T^2_sym
/// that contradicts those reductions (see the report command).
template <class S>
KForm<S> velocity(FlowKind kind, const G2Data<S>& G) {
    const Metric<S>& m = G.metric;
    Mat7<S> ric = ricci_bryant(G);
    TorsionInvariants<S> inv = torsion_invariants(G);
    S third = scalar_from_int(S(0), 1, 3);
    S half = scalar_from_int(S(0), 1, 2);

    Mat7<S> A = -ric;
    Vec7<S> Xcov = inv.divT;

    auto mixed = [&](const Mat7<S>& t) {
        // t_i^k = t_{ia} g^{ak}
        Mat7<S> r;
        for (int i = 0; i < kDim; ++i)
            for (int k = 0; k < kDim; ++k) {
                S acc(0);
                for (int a = 0; a < kDim; ++a) acc += t(i, a) * m.g_inv(a, k);
                r(i, k) = acc;
            }
        return r;
    };

    switch (kind) {
    case FlowKind::RHF:
        A += S(3) * inv.TtT;
        A -= inv.normT2 * m.g;
        break;
    case FlowKind::RL1:
    case FlowKind::RL2: {
        A += inv.trT * G.T.sym();
        Vec7<S> vt_up = raise(m, inv.VT);
        if (!inv.VT.zero()) {
            Mat7<S> vtphi = two_form_to_tensor(interior(vt_up, G.phi));
            Mat7<S> comp = mixed(G.T) * vtphi; // (T ∘ (VT⌟φ))_i{}_j with T_i^k (VT⌟φ)_{kj}
            A -= (S(2) * third) * comp.sym();
        }
        if (kind == FlowKind::RL2) {
            S vt2(0);
            for (int i = 0; i < kDim; ++i)
                for (int j = 0; j < kDim; ++j) vt2 += inv.VT[i] * inv.VT[j] * m.g_inv(i, j);
            A += third * (inv.normT2 - third * vt2) * m.g;
        }
        // vector part: Div T + 1/3 tr T VT - 1/3 T^t(VT)
        for (int i = 0; i < kDim; ++i) {
            S tv(0);
            for (int j = 0; j < kDim; ++j) tv += G.T(j, i) * vt_up[j];
            Xcov[i] += third * inv.trT * inv.VT[i] - third * tv;
        }
        break;
    }
    case FlowKind::NGF: {
        A -= half * inv.normT2 * m.g;
        A += inv.TTt;
        if (!inv.VT.zero()) {
            Connection<S> conn = koszul(*G.frame, m);
            Mat7<S> lie;
            for (int i = 0; i < kDim; ++i)
                for (int j = 0; j < kDim; ++j) {
                    S acc(0);
                    for (int p = 0; p < kDim; ++p)
                        acc -= (conn.g3(i, j, p) + conn.g3(j, i, p)) * inv.VT[p];
                    lie(i, j) = acc;
                }
            A -= half * lie;
            Mat7<S> tpt = mixed(G.T) * inv.PT;
            A -= tpt.sym();
        }
        break;
    }
    }

    KForm<S> vel = diamond(A, G.phi, m);
    if (!Xcov.zero()) vel += interior(raise(m, Xcov), G.psi);
    return vel;
}

/// A reduced parameter ODE system with exact symbolic right-hand sides.
struct OdeSystem {
    FlowKind kind;
    FamilyKind family;
    std::vector<std::string> labels;         // raw parameters, e.g. {f,h}
    std::vector<Laurent> rhs_raw;            // d(param)/dt
    std::vector<std::string> product_labels; // coefficient functions of the ansatz basis
    std::vector<Laurent> rhs_product;        // d(product)/dt

    size_t dim() const { return labels.size(); }

    std::vector<double> eval(const std::vector<double>& y) const {
        std::vector<double> out(rhs_raw.size());
        for (size_t i = 0; i < rhs_raw.size(); ++i) out[i] = rhs_raw[i].eval(y);
        return out;
    }
    std::vector<Rat> eval_rat(const std::vector<Rat>& y) const {
        std::vector<Rat> out(rhs_raw.size());
        for (size_t i = 0; i < rhs_raw.size(); ++i) out[i] = rhs_raw[i].eval_rat(y);
        return out;
    }
};

/// Express the flow velocity in the ansatz basis and change variables from
/// the basis coefficient functions to the raw parameters. The projection
/// residual must vanish identically; a nonzero residual means the family is
/// not invariant under the flow.
inline OdeSystem reduce_to_ode(FlowKind kind, FamilyKind family) {
    FrameAlgebra<Laurent> frame = FrameAlgebra<Laurent>::heisenberg();
    Laurent f = Laurent::variable(0);
    OdeSystem sys;
    sys.kind = kind;
    sys.family = family;

    if (family == FamilyKind::CCY) {
        Laurent h = Laurent::variable(1);
        G2Data<Laurent> G = build_ccy(frame, f, h);
        KForm<Laurent> vel = velocity(kind, G);
        Laurent V1 = vel.coeff(mask_of({1, 2, 7}));
        Laurent V2 = vel.coeff(mask_of({1, 3, 5}));
        KForm<Laurent> candidate = V1 * eta_wedge_omega0<Laurent>() + V2 * re_upsilon0<Laurent>();
        if (!(vel - candidate).zero()) throw std::runtime_error("velocity leaves ansatz family");
        sys.labels = {"f", "h"};
        sys.product_labels = {"f*h^2", "h^3"};
        sys.rhs_product = {V1, V2};
        // d(h^3) = 3h^2 h', d(f h^2) = f' h^2 + 2 f h h'
        Laurent hp = V2 / (Laurent(3) * h * h);
        Laurent fp = (V1 - Laurent(2) * f * h * hp) / (h * h);
        sys.rhs_raw = {fp, hp};
    } else {
        Laurent a = Laurent::variable(1), b = Laurent::variable(2), c = Laurent::variable(3);
        G2Data<Laurent> G = build_heisenberg(frame, f, a, b, c);
        KForm<Laurent> vel = velocity(kind, G);
        Laurent V1 = vel.coeff(mask_of({1, 2, 7}));
        Laurent V2 = vel.coeff(mask_of({3, 4, 7}));
        Laurent V3 = vel.coeff(mask_of({5, 6, 7}));
        Laurent V4 = vel.coeff(mask_of({1, 3, 5}));
        KForm<Laurent> candidate = KForm<Laurent>::basis({1, 2, 7}, V1) + KForm<Laurent>::basis({3, 4, 7}, V2) +
                                   KForm<Laurent>::basis({5, 6, 7}, V3) + V4 * re_upsilon0<Laurent>();
        if (!(vel - candidate).zero()) throw std::runtime_error("velocity leaves ansatz family");
        sys.labels = {"f", "a", "b", "c"};
        sys.product_labels = {"f*a^2", "f*b^2", "f*c^2", "a*b*c"};
        sys.rhs_product = {V1, V2, V3, V4};
        // d(f a^2) = f' a^2 + 2 f a a' (and cyclic), d(abc) = a'bc + ab'c + abc'
        Laurent two(2), three(3);
        Laurent S1 = b * c * V1 / (two * f * a) + a * c * V2 / (two * f * b) + a * b * V3 / (two * f * c);
        Laurent fp = (S1 - V4) * (two * f) / (three * a * b * c);
        Laurent ap = (V1 - fp * a * a) / (two * f * a);
        Laurent bp = (V2 - fp * b * b) / (two * f * b);
        Laurent cp = (V3 - fp * c * c) / (two * f * c);
        sys.rhs_raw = {fp, ap, bp, cp};
    }
    return sys;
}

/// Specialise a Heisenberg-family expression at a=b=c=h (variable slots
/// 2 and 3 are folded onto slot 1), for comparison with the contact family.
inline Laurent collapse_to_ccy(const Laurent& p) {
    return p.collapse(2, 1).collapse(3, 1);
}

/// Pointwise densities per unit base volume on the homogeneous frame.
template <class S>
struct FunctionalDensities {
    S EH;     // (-1/2 |T|^2 + 1/6 |VT|^2) * volfactor
    S energy; // 1/2 |T|^2 * volfactor
    S volume; // volfactor
};

template <class S>
FunctionalDensities<S> functionals(const G2Data<S>& G) {
    TorsionInvariants<S> inv = torsion_invariants(G);
    S vt2(0);
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) vt2 += inv.VT[i] * inv.VT[j] * G.metric.g_inv(i, j);
    S half = scalar_from_int(S(0), 1, 2);
    S sixth = scalar_from_int(S(0), 1, 6);
    FunctionalDensities<S> r;
    r.volume = G.metric.vol_factor;
    r.energy = half * inv.normT2 * r.volume;
    r.EH = (S(-1) * half * inv.normT2 + sixth * vt2) * r.volume;
    return r;
}

} // namespace g2flow
