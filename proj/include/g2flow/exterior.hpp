#pragma once

#include "kform.hpp"
#include <functional>
#include <optional>

namespace g2flow {

// ---------------------------------------------------------------------------
// wedge / interior
// ---------------------------------------------------------------------------

template <class S>
KForm<S> wedge(const KForm<S>& a, const KForm<S>& b) {
    int deg = a.degree() + b.degree();
    if (deg > kDim) return KForm<S>(std::min(deg, kDim)); // zero beyond top degree
    KForm<S> r(deg);
    for (auto& [ma, va] : a.coeffs())
        for (auto& [mb, vb] : b.coeffs()) {
            if (ma & mb) continue;
            int s = merge_sign(ma, mb);
            r.add(ma | mb, s > 0 ? va * vb : S(-1) * (va * vb));
        }
    return r;
}

template <class S>
KForm<S> wedge(const KForm<S>& a, const KForm<S>& b, const KForm<S>& c) {
    return wedge(wedge(a, b), c);
}

/// Interior product X ⌟ a (contraction in the first slot).
template <class S>
KForm<S> interior(const Vec7<S>& X, const KForm<S>& a) {
    if (a.degree() == 0) throw std::invalid_argument("cannot contract scalar");
    KForm<S> r(a.degree() - 1);
    for (auto& [m, v] : a.coeffs()) {
        for (int i = 0; i < kDim; ++i) {
            Mask bit = Mask(1) << i;
            if (!(m & bit)) continue;
            if (is_zero(X[i])) continue;
            int pos = index_position(m, i);
            S term = X[i] * v;
            r.add(m & Mask(~bit), (pos % 2 == 0) ? term : S(-1) * term);
        }
    }
    return r;
}

// ---------------------------------------------------------------------------
// FrameAlgebra: constant structure coefficients, d on the coframe
// ---------------------------------------------------------------------------

/// Exterior derivative data for a left-invariant coframe: de^k is a constant
/// 2-form. Construction checks d∘d = 0, which is the Jacobi identity for the
/// induced bracket [e_i,e_j] = -Σ_k de^k(e_i,e_j) e_k.
template <class S>
class FrameAlgebra {
public:
    explicit FrameAlgebra(std::array<KForm<S>, kDim> d_coeffs, std::string name = "")
        : d_(std::move(d_coeffs)), name_(std::move(name)) {
        for (auto& f : d_)
            if (f.degree() != 2) throw std::invalid_argument("de^k must be a 2-form");
        for (int k = 1; k <= kDim; ++k) {
            if (!d(d(coframe(k))).zero())
                throw std::invalid_argument("structure coefficients violate d*d = 0");
        }
    }

    static FrameAlgebra abelian() {
        std::array<KForm<S>, kDim> dd;
        for (auto& f : dd) f = KForm<S>(2);
        return FrameAlgebra(std::move(dd), "abelian7");
    }

    /// de^i = 0 (i<7), de^7 = e^12 + e^34 + e^56.
    static FrameAlgebra heisenberg() {
        std::array<KForm<S>, kDim> dd;
        for (auto& f : dd) f = KForm<S>(2);
        dd[6] = KForm<S>::basis({1, 2}) + KForm<S>::basis({3, 4}) + KForm<S>::basis({5, 6});
        return FrameAlgebra(std::move(dd), "heisenberg7");
    }

    const std::string& name() const { return name_; }
    const KForm<S>& d_coframe(int k) const { return d_[static_cast<size_t>(k - 1)]; }

    static KForm<S> coframe(int k) { return KForm<S>::basis({k}); }

    /// d of a constant-coefficient form via the graded Leibniz rule.
    KForm<S> d(const KForm<S>& a) const {
        int deg = a.degree() + 1;
        if (deg > kDim) return KForm<S>(kDim); // top-degree forms are closed
        KForm<S> r(deg);
        for (auto& [m, v] : a.coeffs()) {
            auto idx = mask_indices(m);
            for (size_t p = 0; p < idx.size(); ++p) {
                const KForm<S>& dk = d_[static_cast<size_t>(idx[p])];
                if (dk.zero()) continue;
                KForm<S> rest(a.degree() - 1);
                rest.add(m & Mask(~(Mask(1) << idx[p])), (p % 2 == 0) ? v : S(-1) * v);
                r += wedge(dk, rest);
            }
        }
        return r;
    }

    /// Bracket coefficients c^k_{ij} with [e_i,e_j] = c^k_{ij} e_k; indices 0-based.
    S bracket_coeff(int i, int j, int k) const {
        return S(-1) * d_[static_cast<size_t>(k)].component({i, j});
    }
    Vec7<S> bracket(int i, int j) const {
        Vec7<S> v;
        for (int k = 0; k < kDim; ++k) v[k] = bracket_coeff(i, j, k);
        return v;
    }

private:
    std::array<KForm<S>, kDim> d_;
    std::string name_;
};

// ---------------------------------------------------------------------------
// Metric and Hodge star
// ---------------------------------------------------------------------------

template <class S>
struct Metric {
    Mat7<S> g;
    Mat7<S> g_inv;
    S vol_factor; // vol = vol_factor * e^1...e^7, vol_factor = sqrt(det g)

    Metric() : vol_factor(S(0)) {}

    /// Build from a symmetric positive definite matrix. In the exact
    /// backends sqrt(det g) must exist in the scalar field.
    static Metric from_matrix(const Mat7<S>& m) {
        if (!m.symmetric()) throw std::invalid_argument("metric not symmetric");
        for (int k = 1; k <= kDim; ++k) {
            std::vector<int> idx;
            for (int i = 0; i < k; ++i) idx.push_back(i);
            if (!is_positive(subdet(m, idx, idx)))
                throw std::invalid_argument("metric not positive definite");
        }
        Metric mt;
        mt.g = m;
        S det = det7(m);
        mt.g_inv = inverse7(m, det);
        mt.vol_factor = sqrt_scalar(det);
        return mt;
    }

    static Metric euclidean() { return from_matrix(Mat7<S>::identity()); }

    KForm<S> vol() const {
        KForm<S> v(kDim);
        v.add(kFullMask, vol_factor);
        return v;
    }

    /// Gram matrix of Λ^k(g^{-1}) entry: det of the g^{-1} minor on (I, J).
    S lambda_gram(Mask I, Mask J) const {
        return subdet(g_inv, mask_indices(I), mask_indices(J));
    }
};

/// Metric-induced inner product on k-forms, ⟨a,b⟩ with indices raised by g.
template <class S>
S inner(const Metric<S>& m, const KForm<S>& a, const KForm<S>& b) {
    if (a.degree() != b.degree()) throw std::invalid_argument("inner: degree mismatch");
    S acc(0);
    for (auto& [ma, va] : a.coeffs())
        for (auto& [mb, vb] : b.coeffs()) acc += va * vb * m.lambda_gram(ma, mb);
    return acc;
}

/// Hodge star with the convention a ∧ *b = ⟨a,b⟩ vol, orientation e^1...e^7.
template <class S>
KForm<S> hodge(const Metric<S>& m, const KForm<S>& a) {
    KForm<S> r(kDim - a.degree());
    if (a.degree() == 0) {
        // *1 = vol
        S c = a.coeff(0);
        if (!is_zero(c)) r.add(kFullMask, c * m.vol_factor);
        return r;
    }
    int k = a.degree();
    // enumerate increasing I of degree k: (*a)_{I^c} = vol_factor * Σ_J a_J Λgram(J,I) sign(I, I^c)
    for (Mask I = 0; I <= kFullMask; ++I) {
        if (mask_degree(I) != k) continue;
        S raised(0);
        bool any = false;
        for (auto& [J, vJ] : a.coeffs()) {
            S gram = m.lambda_gram(J, I);
            if (!is_zero(gram)) {
                raised += vJ * gram;
                any = true;
            }
        }
        if (!any || is_zero(raised)) continue;
        Mask Ic = kFullMask & Mask(~I);
        int s = merge_sign(I, Ic);
        S val = m.vol_factor * raised;
        r.add(Ic, s > 0 ? val : S(-1) * val);
    }
    return r;
}

// ---------------------------------------------------------------------------
// diamond: infinitesimal gl(7) action of a 2-tensor on forms
// ---------------------------------------------------------------------------

/// (A ⋄ γ)_{i1..ik} = Σ_m A_{i_m}{}^p γ_{i1..p..ik}, indices raised with g.
template <class S>
KForm<S> diamond(const Mat7<S>& A, const KForm<S>& gamma, const Metric<S>& m) {
    if (gamma.degree() < 1) throw std::invalid_argument("diamond needs degree >= 1");
    // mixed endomorphism Ahat_i^p = A_{iq} g^{qp}
    Mat7<S> Ahat;
    for (int i = 0; i < kDim; ++i)
        for (int p = 0; p < kDim; ++p) {
            S acc(0);
            for (int q = 0; q < kDim; ++q) acc += A(i, q) * m.g_inv(q, p);
            Ahat(i, p) = acc;
        }
    KForm<S> r(gamma.degree());
    for (Mask I = 0; I <= kFullMask; ++I) {
        if (mask_degree(I) != gamma.degree()) continue;
        auto idx = mask_indices(I);
        S acc(0);
        bool any = false;
        for (size_t slot = 0; slot < idx.size(); ++slot) {
            for (int p = 0; p < kDim; ++p) {
                const S& aip = Ahat(idx[slot], p);
                if (is_zero(aip)) continue;
                std::vector<int> rep = idx;
                rep[slot] = p;
                S g = gamma.component(rep);
                if (is_zero(g)) continue;
                acc += aip * g;
                any = true;
            }
        }
        if (any && !is_zero(acc)) r.add(I, acc);
    }
    return r;
}

/// 2-form -> antisymmetric 2-tensor on the coframe.
template <class S>
Mat7<S> two_form_to_tensor(const KForm<S>& b) {
    if (b.degree() != 2) throw std::invalid_argument("expected a 2-form");
    Mat7<S> t;
    for (auto& [m, v] : b.coeffs()) {
        auto idx = mask_indices(m);
        t(idx[0], idx[1]) += v;
        t(idx[1], idx[0]) -= v;
    }
    return t;
}

/// 1-form value of a vector: X^♭ = g(X, ·).
template <class S>
Vec7<S> lower(const Metric<S>& m, const Vec7<S>& X) {
    Vec7<S> w;
    for (int i = 0; i < kDim; ++i) {
        S acc(0);
        for (int j = 0; j < kDim; ++j) acc += m.g(i, j) * X[j];
        w[i] = acc;
    }
    return w;
}

template <class S>
Vec7<S> raise(const Metric<S>& m, const Vec7<S>& w) {
    Vec7<S> X;
    for (int i = 0; i < kDim; ++i) {
        S acc(0);
        for (int j = 0; j < kDim; ++j) acc += m.g_inv(i, j) * w[j];
        X[i] = acc;
    }
    return X;
}

} // namespace g2flow
