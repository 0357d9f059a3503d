#pragma once

#include "connection.hpp"
#include "laurent.hpp"

namespace g2flow {

/// Intrinsic torsion forms of a G2-structure: dφ = τ0 ψ + 3 τ1 ∧ φ + *τ3,
/// dψ = 4 τ1 ∧ ψ + τ2 ∧ φ. τ1 is stored as a 1-form, τ2 lies in the
/// 14-dimensional component (τ2 ∧ ψ = 0), τ3 in the 27-dimensional one
/// (τ3 ∧ φ = 0 and τ3 ∧ ψ = 0).
template <class S>
struct TorsionForms {
    S tau0 = S(0);
    Vec7<S> tau1;      // 1-form components (τ1)_i
    KForm<S> tau2{2};
    KForm<S> tau3{3};

    bool coclosed() const { return tau1.zero() && tau2.zero(); }
};

/// Metric and volume determined by a nondegenerate 3-form through
/// (X⌟φ)∧(Y⌟φ)∧φ = 6 g(X,Y) vol. The bilinear form B with
/// (e_i⌟φ)∧(e_j⌟φ)∧φ = B_ij e^1..7 satisfies B = 6 s g and det B = 6^7 s^9,
/// so s = (det B / 6^7)^{1/9} and g = B/(6s).
template <class S>
Metric<S> metric_from_phi(const KForm<S>& phi) {
    if (phi.degree() != 3) throw std::invalid_argument("metric_from_phi expects a 3-form");
    Mat7<S> B;
    for (int i = 0; i < kDim; ++i) {
        KForm<S> ci = interior(Vec7<S>::basis(i + 1), phi);
        for (int j = i; j < kDim; ++j) {
            KForm<S> cj = (j == i) ? ci : interior(Vec7<S>::basis(j + 1), phi);
            S v = wedge(wedge(ci, cj), phi).coeff(kFullMask);
            B(i, j) = v;
            if (j != i) B(j, i) = v;
        }
    }
    S detB = det7(B);
    S six = S(6);
    S six7 = six * six * six * six * six * six * six;
    bool pos;
    try {
        pos = is_positive(detB);
    } catch (const std::domain_error&) {
        pos = false;
    }
    if (!pos) throw std::invalid_argument("not a G2 three-form");
    S s;
    try {
        s = nth_root_scalar(detB / six7, 9);
    } catch (const std::domain_error&) {
        throw std::invalid_argument("volume normalization not exact in this backend");
    }
    Mat7<S> g;
    S denom = six * s;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) g(i, j) = B(i, j) / denom;
    try {
        return Metric<S>::from_matrix(g);
    } catch (const std::invalid_argument&) {
        throw std::invalid_argument("not a G2 three-form");
    }
}

/// Bryant's j-map: j(σ)(X,Y) = *((X⌟φ)∧(Y⌟φ)∧σ), a symmetric 2-tensor.
template <class S>
Mat7<S> jmap(const KForm<S>& phi, const Metric<S>& m, const KForm<S>& sigma) {
    if (sigma.degree() != 3) throw std::invalid_argument("jmap expects a 3-form");
    Mat7<S> out;
    std::array<KForm<S>, kDim> contr;
    for (int i = 0; i < kDim; ++i) contr[static_cast<size_t>(i)] = interior(Vec7<S>::basis(i + 1), phi);
    for (int i = 0; i < kDim; ++i)
        for (int j = i; j < kDim; ++j) {
            S v = wedge(wedge(contr[static_cast<size_t>(i)], contr[static_cast<size_t>(j)]), sigma).coeff(kFullMask) /
                  m.vol_factor;
            out(i, j) = v;
            if (j != i) out(j, i) = v;
        }
    return out;
}

/// Bryant's equivariant pairing
/// Q(α,β) = *( ψ^{ijkl} (e_j⌟e_i⌟*α) ∧ (e_l⌟e_k⌟*β) ), indices raised by g.
template <class S>
KForm<S> qpair(const KForm<S>& psi, const Metric<S>& m, const KForm<S>& alpha, const KForm<S>& beta) {
    if (alpha.degree() != 3 || beta.degree() != 3) throw std::invalid_argument("qpair expects 3-forms");
    KForm<S> sa = hodge(m, alpha);
    KForm<S> sb = hodge(m, beta);
    // ψ with all four indices raised
    KForm<S> psi_up(4);
    for (Mask I = 0; I <= kFullMask; ++I) {
        if (mask_degree(I) != 4) continue;
        S acc(0);
        for (auto& [J, v] : psi.coeffs()) acc += v * m.lambda_gram(J, I);
        if (!is_zero(acc)) psi_up.add(I, acc);
    }
    std::array<KForm<S>, kDim> ca, cb;
    for (int i = 0; i < kDim; ++i) {
        ca[static_cast<size_t>(i)] = interior(Vec7<S>::basis(i + 1), sa);
        cb[static_cast<size_t>(i)] = interior(Vec7<S>::basis(i + 1), sb);
    }
    KForm<S> acc4(4);
    S four = S(4);
    for (int i = 0; i < kDim; ++i)
        for (int j = i + 1; j < kDim; ++j) {
            // e_j ⌟ e_i ⌟ *α, antisymmetric in (i,j): sum over i<j with factor 4
            KForm<S> cij = interior(Vec7<S>::basis(j + 1), ca[static_cast<size_t>(i)]);
            if (cij.zero()) continue;
            for (int k = 0; k < kDim; ++k)
                for (int l = k + 1; l < kDim; ++l) {
                    S pv = psi_up.component({i, j, k, l});
                    if (is_zero(pv)) continue;
                    KForm<S> ckl = interior(Vec7<S>::basis(l + 1), cb[static_cast<size_t>(k)]);
                    if (ckl.zero()) continue;
                    acc4 += (four * pv) * wedge(cij, ckl);
                }
        }
    return hodge(m, acc4);
}

/// A G2-structure with everything the flows need: dual 4-form, intrinsic
/// torsion forms and the full torsion tensor, all on a fixed frame algebra.
template <class S>
struct G2Data {
    const FrameAlgebra<S>* frame = nullptr;
    KForm<S> phi{3};
    Metric<S> metric;
    KForm<S> psi{4};
    TorsionForms<S> torsion;
    Mat7<S> T;

    const S& tau0() const { return torsion.tau0; }
};

namespace detail {

/// Dense linear solve over a field backend (Rat or double); returns false if
/// the system is singular/inconsistent.
template <class S>
bool solve_linear(std::vector<std::vector<S>>& A, std::vector<S>& b, std::vector<S>& x) {
    size_t nrow = A.size(), ncol = x.size();
    size_t row = 0;
    std::vector<size_t> pivot_col;
    for (size_t col = 0; col < ncol && row < nrow; ++col) {
        size_t sel = row;
        while (sel < nrow && is_zero(A[sel][col])) ++sel;
        if (sel == nrow) continue;
        std::swap(A[sel], A[row]);
        std::swap(b[sel], b[row]);
        S inv = S(1) / A[row][col];
        for (size_t c = col; c < ncol; ++c) A[row][c] = A[row][c] * inv;
        b[row] = b[row] * inv;
        for (size_t r = 0; r < nrow; ++r) {
            if (r == row || is_zero(A[r][col])) continue;
            S f = A[r][col];
            for (size_t c = col; c < ncol; ++c) A[r][c] -= f * A[row][c];
            b[r] -= f * b[row];
        }
        pivot_col.push_back(col);
        ++row;
    }
    if (pivot_col.size() != ncol) return false;
    for (size_t r = row; r < nrow; ++r)
        if (!is_zero(b[r])) return false;
    for (size_t r = 0; r < ncol; ++r) x[pivot_col[r]] = b[r];
    return true;
}

inline bool solve_linear(std::vector<std::vector<Laurent>>&, std::vector<Laurent>&, std::vector<Laurent>&) {
    throw std::domain_error("torsion solve unavailable on the symbolic backend (co-closed only)");
}

} // namespace detail

/// Full pipeline: metric, dual 4-form, intrinsic torsion forms, full torsion.
/// In exact backends every projection is validated by reassembling dφ and dψ.
template <class S>
G2Data<S> make_g2(const FrameAlgebra<S>& frame, const KForm<S>& phi, bool validate = true) {
    G2Data<S> G;
    G.frame = &frame;
    G.phi = phi;
    G.metric = metric_from_phi(phi);
    G.psi = hodge(G.metric, phi);

    KForm<S> dphi = frame.d(phi);
    KForm<S> dpsi = frame.d(G.psi);

    S seven = S(7);
    G.torsion.tau0 = wedge(dphi, phi).coeff(kFullMask) / (seven * G.metric.vol_factor);

    if (!dpsi.zero()) {
        // Solve dψ = 4 τ1∧ψ + τ2∧φ together with τ2∧ψ = 0 (membership in the
        // 14-component). Unknowns: τ1 (7) then τ2 on increasing pairs (21).
        std::vector<Mask> pair_masks;
        for (Mask mk = 0; mk <= kFullMask; ++mk)
            if (mask_degree(mk) == 2) pair_masks.push_back(mk);
        const size_t n_unknown = kDim + pair_masks.size();
        std::vector<std::vector<S>> A;
        std::vector<S> rhs;
        auto add_rows = [&](int formdeg, const std::vector<KForm<S>>& cols, const KForm<S>& target) {
            for (Mask mk = 0; mk <= kFullMask; ++mk) {
                if (mask_degree(mk) != formdeg) continue;
                std::vector<S> rowv(n_unknown, S(0));
                for (size_t u = 0; u < n_unknown; ++u) rowv[u] = cols[u].coeff(mk);
                A.push_back(std::move(rowv));
                rhs.push_back(target.coeff(mk));
            }
        };
        std::vector<KForm<S>> cols5, cols6;
        for (int i = 0; i < kDim; ++i) {
            KForm<S> e1(1);
            e1.add(Mask(1) << i, S(4));
            cols5.push_back(wedge(e1, G.psi));
            cols6.push_back(KForm<S>(6));
        }
        for (Mask mk : pair_masks) {
            KForm<S> b2(2);
            b2.add(mk, S(1));
            cols5.push_back(wedge(b2, phi));
            cols6.push_back(wedge(b2, G.psi));
        }
        add_rows(5, cols5, dpsi);
        add_rows(6, cols6, KForm<S>(6));
        std::vector<S> x(n_unknown, S(0));
        if (!detail::solve_linear(A, rhs, x))
            throw std::runtime_error("projection inconsistent");
        for (int i = 0; i < kDim; ++i) G.torsion.tau1[i] = x[static_cast<size_t>(i)];
        for (size_t p = 0; p < pair_masks.size(); ++p) G.torsion.tau2.set(pair_masks[p], x[kDim + p]);
    }

    KForm<S> tau1_form(1);
    for (int i = 0; i < kDim; ++i) tau1_form.add(Mask(1) << i, G.torsion.tau1[i]);
    KForm<S> rem = dphi - G.torsion.tau0 * G.psi - S(3) * wedge(tau1_form, phi);
    G.torsion.tau3 = hodge(G.metric, rem);

    // T = (τ0/4) g - (1/4) j(τ3) - (τ1 ⌟ φ) - (1/2) τ2
    S quarter = scalar_from_int(S(0), 1, 4);
    S half = scalar_from_int(S(0), 1, 2);
    Mat7<S> jt = jmap(phi, G.metric, G.torsion.tau3);
    Vec7<S> tau1_up = raise(G.metric, G.torsion.tau1);
    Mat7<S> t1phi = two_form_to_tensor(interior(tau1_up, phi));
    Mat7<S> t2 = two_form_to_tensor(G.torsion.tau2);
    G.T = quarter * G.torsion.tau0 * G.metric.g - quarter * jt - t1phi - half * t2;

    if (validate) {
        KForm<S> re_dphi =
            G.torsion.tau0 * G.psi + S(3) * wedge(tau1_form, phi) + hodge(G.metric, G.torsion.tau3);
        KForm<S> re_dpsi = S(4) * wedge(tau1_form, G.psi) + wedge(G.torsion.tau2, phi);
        if (!(re_dphi - dphi).zero() || !(re_dpsi - dpsi).zero())
            throw std::runtime_error("projection inconsistent");
        if (!wedge(G.torsion.tau3, phi).zero() || !wedge(G.torsion.tau3, G.psi).zero())
            throw std::runtime_error("projection inconsistent");
    }
    return G;
}

template <>
inline G2Data<double> make_g2<double>(const FrameAlgebra<double>& frame, const KForm<double>& phi, bool) {
    // float backend: same pipeline, reassembly checked by the test suites
    // with explicit tolerances rather than exact zero tests.
    G2Data<double> G;
    G.frame = &frame;
    G.phi = phi;
    G.metric = metric_from_phi(phi);
    G.psi = hodge(G.metric, phi);
    KForm<double> dphi = frame.d(phi);
    KForm<double> dpsi = frame.d(G.psi);
    G.torsion.tau0 = wedge(dphi, phi).coeff(kFullMask) / (7.0 * G.metric.vol_factor);
    if (!dpsi.zero()) throw std::runtime_error("float backend supports co-closed structures only");
    KForm<double> rem = dphi - G.torsion.tau0 * G.psi;
    G.torsion.tau3 = hodge(G.metric, rem);
    Mat7<double> jt = jmap(phi, G.metric, G.torsion.tau3);
    G.T = 0.25 * G.torsion.tau0 * G.metric.g - 0.25 * jt;
    return G;
}

/// Cross-check of the full torsion through the connection:
/// T_{mq} = (1/24) (∇_m φ)_{ijk} ψ_q^{ijk} = (1/4) ⟨∇_m φ, e_q ⌟ ψ⟩.
template <class S>
Mat7<S> torsion_from_nabla(const G2Data<S>& G, const Connection<S>& conn) {
    Mat7<S> out;
    S quarter = scalar_from_int(S(0), 1, 4);
    std::array<KForm<S>, kDim> psi_contr;
    for (int q = 0; q < kDim; ++q)
        psi_contr[static_cast<size_t>(q)] = interior(Vec7<S>::basis(q + 1), G.psi);
    for (int m = 0; m < kDim; ++m) {
        KForm<S> np = nabla_form(conn, G.phi, m);
        for (int q = 0; q < kDim; ++q)
            out(m, q) = quarter * inner(G.metric, np, psi_contr[static_cast<size_t>(q)]);
    }
    return out;
}

/// Bryant's Ricci formula in terms of the intrinsic torsion forms. The
/// τ1/τ2 terms require the exterior derivatives of the torsion forms, which
/// the constant-coefficient frame provides.
template <class S>
Mat7<S> ricci_bryant(const G2Data<S>& G) {
    const Metric<S>& m = G.metric;
    const FrameAlgebra<S>& F = *G.frame;
    const TorsionForms<S>& tf = G.torsion;
    S half = scalar_from_int(S(0), 1, 2);
    S quarter = scalar_from_int(S(0), 1, 4);
    S eighth = scalar_from_int(S(0), 1, 8);

    KForm<S> tau1_form(1);
    for (int i = 0; i < kDim; ++i) tau1_form.add(Mask(1) << i, tf.tau1[i]);
    bool has1 = !tau1_form.zero();
    bool has2 = !tf.tau2.zero();
    bool has3 = !tf.tau3.zero();

    S norm_t3 = has3 ? inner(m, tf.tau3, tf.tau3) : S(0);

    // scalar coefficient: -(3/2 d*τ1 - 3/8 τ0^2 + 15|τ1|^2 - 1/4|τ2|^2 + 1/2|τ3|^2)
    S scal = scalar_from_int(S(0), -3, 8) * tf.tau0 * tf.tau0 + half * norm_t3;
    if (has1) {
        // codifferential of the 1-form: d*τ1 = -*d*τ1 in dimension 7
        S dstar = S(-1) * hodge(m, F.d(hodge(m, tau1_form))).coeff(0);
        scal += scalar_from_int(S(0), 3, 2) * dstar + S(15) * inner(m, tau1_form, tau1_form);
    }
    if (has2) scal -= quarter * inner(m, tf.tau2, tf.tau2);

    // j-argument
    KForm<S> arg(3);
    if (has3) {
        arg += quarter * hodge(m, F.d(tf.tau3));
        arg -= eighth * tf.tau0 * tf.tau3;
        arg += scalar_from_int(S(0), 1, 64) * qpair(G.psi, m, tf.tau3, tf.tau3);
    }
    if (has1) {
        KForm<S> t1psi_star = hodge(m, wedge(tau1_form, G.psi)); // 2-form
        arg -= scalar_from_int(S(0), 5, 4) * F.d(t1psi_star);
        arg += scalar_from_int(S(0), 5, 2) * wedge(tau1_form, t1psi_star);
        if (has3) arg += scalar_from_int(S(0), 3, 4) * hodge(m, wedge(tau1_form, tf.tau3));
    }
    if (has2) {
        arg -= quarter * F.d(tf.tau2);
        arg += eighth * hodge(m, wedge(tf.tau2, tf.tau2));
        if (has1) arg += quarter * wedge(tau1_form, tf.tau2);
    }

    Mat7<S> ric = (S(-1) * scal) * m.g;
    if (!arg.zero()) ric += jmap(G.phi, m, arg);
    return ric;
}

/// Pointwise quadratic invariants of the torsion tensor.
template <class S>
struct TorsionInvariants {
    Mat7<S> TtT;     // (T^t T)_{ij} = T_{ai} T_{bj} g^{ab}
    Mat7<S> TTt;     // (T T^t)_{ij} = T_{ia} T_{jb} g^{ab}
    S normT2;
    S trT;
    Vec7<S> VT;      // (V T)_k = T^{ij} φ_{ijk}, 1-form components
    Mat7<S> PT;      // (P T)_{ij} = T^{ab} ψ_{abij}
    Vec7<S> divT;    // (div T)_i = ∇^j T_{ji}
};

template <class S>
TorsionInvariants<S> torsion_invariants(const G2Data<S>& G) {
    const Metric<S>& m = G.metric;
    TorsionInvariants<S> inv;
    // raised torsion Tup^{ij} and mixed Tmix_i^j
    Mat7<S> Tup, Tmix;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) {
            S accm(0);
            for (int a = 0; a < kDim; ++a) accm += G.T(i, a) * m.g_inv(a, j);
            Tmix(i, j) = accm;
        }
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) {
            S acc(0);
            for (int a = 0; a < kDim; ++a) acc += m.g_inv(i, a) * Tmix(a, j);
            Tup(i, j) = acc;
        }
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) {
            S a1(0), a2(0), n(0);
            for (int a = 0; a < kDim; ++a)
                for (int b = 0; b < kDim; ++b) {
                    a1 += G.T(a, i) * G.T(b, j) * m.g_inv(a, b);
                    a2 += G.T(i, a) * G.T(j, b) * m.g_inv(a, b);
                }
            inv.TtT(i, j) = a1;
            inv.TTt(i, j) = a2;
        }
    S nrm(0), tr(0);
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) {
            nrm += G.T(i, j) * Tup(i, j);
            tr += m.g_inv(i, j) * G.T(i, j);
        }
    inv.normT2 = nrm;
    inv.trT = tr;
    for (int k = 0; k < kDim; ++k) {
        S acc(0);
        for (int i = 0; i < kDim; ++i)
            for (int j = 0; j < kDim; ++j) {
                const S& t = Tup(i, j);
                if (is_zero(t)) continue;
                S ph = G.phi.component({i, j, k});
                if (!is_zero(ph)) acc += t * ph;
            }
        inv.VT[k] = acc;
    }
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) {
            S acc(0);
            for (int a = 0; a < kDim; ++a)
                for (int b = 0; b < kDim; ++b) {
                    const S& t = Tup(a, b);
                    if (is_zero(t)) continue;
                    S ps = G.psi.component({a, b, i, j});
                    if (!is_zero(ps)) acc += t * ps;
                }
            inv.PT(i, j) = acc;
        }
    CurvatureData<S> cd = curvature(*G.frame, m, G.T);
    inv.divT = cd.divT;
    return inv;
}

} // namespace g2flow
