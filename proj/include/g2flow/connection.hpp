#pragma once

#include "exterior.hpp"

namespace g2flow {

/// Levi-Civita connection of a left-invariant metric: constant Christoffel
/// coefficients Γ^k_{ij} with ∇_{e_i} e_j = Γ^k_{ij} e_k.
template <class S>
struct Connection {
    std::array<S, kDim * kDim * kDim> gamma{};

    Connection() {
        for (auto& v : gamma) v = S(0);
    }
    S& g3(int i, int j, int k) { return gamma[static_cast<size_t>((i * kDim + j) * kDim + k)]; }
    const S& g3(int i, int j, int k) const {
        return gamma[static_cast<size_t>((i * kDim + j) * kDim + k)];
    }
};

/// Koszul formula for left-invariant fields:
/// 2⟨∇_X Y, Z⟩ = ⟨[X,Y],Z⟩ - ⟨[Y,Z],X⟩ + ⟨[Z,X],Y⟩.
template <class S>
Connection<S> koszul(const FrameAlgebra<S>& F, const Metric<S>& m) {
    auto pair_bracket = [&](int i, int j, int w) {
        // ⟨[e_i,e_j], e_w⟩
        S acc(0);
        for (int p = 0; p < kDim; ++p) {
            S c = F.bracket_coeff(i, j, p);
            if (!is_zero(c)) acc += c * m.g(p, w);
        }
        return acc;
    };
    S half = scalar_from_int(S(0), 1, 2);
    Connection<S> conn;
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) {
            // covector w -> ⟨∇_{e_i} e_j, e_w⟩, then raise
            Vec7<S> cov;
            for (int w = 0; w < kDim; ++w)
                cov[w] = half * (pair_bracket(i, j, w) - pair_bracket(j, w, i) + pair_bracket(w, i, j));
            Vec7<S> up = raise(m, cov);
            for (int k = 0; k < kDim; ++k) conn.g3(i, j, k) = up[k];
        }
    return conn;
}

/// ∇_m of a constant k-form: (∇_m a)_I = -Σ_slots Γ^p_{m i_s} a_{i1..p..ik}.
template <class S>
KForm<S> nabla_form(const Connection<S>& c, const KForm<S>& a, int m) {
    KForm<S> r(a.degree());
    for (Mask I = 0; I <= kFullMask; ++I) {
        if (mask_degree(I) != a.degree()) continue;
        auto idx = mask_indices(I);
        S acc(0);
        for (size_t s = 0; s < idx.size(); ++s)
            for (int p = 0; p < kDim; ++p) {
                const S& gam = c.g3(m, idx[s], p);
                if (is_zero(gam)) continue;
                std::vector<int> rep = idx;
                rep[s] = p;
                S av = a.component(rep);
                if (!is_zero(av)) acc -= gam * av;
            }
        if (!is_zero(acc)) r.add(I, acc);
    }
    return r;
}

/// ∇_m of a constant 2-tensor.
template <class S>
Mat7<S> nabla_tensor2(const Connection<S>& c, const Mat7<S>& T, int m) {
    Mat7<S> r;
    for (int j = 0; j < kDim; ++j)
        for (int k = 0; k < kDim; ++k) {
            S acc(0);
            for (int p = 0; p < kDim; ++p) {
                acc -= c.g3(m, j, p) * T(p, k);
                acc -= c.g3(m, k, p) * T(j, p);
            }
            r(j, k) = acc;
        }
    return r;
}

template <class S>
struct CurvatureData {
    std::array<S, kDim * kDim * kDim * kDim> Rm{}; // R_{ijkl} = ⟨R(e_i,e_j)e_k, e_l⟩
    Mat7<S> Ric;
    S normRm2;
    std::array<Mat7<S>, kDim> nablaT; // ∇_i T
    S normNablaT2;
    Vec7<S> divT; // (div T)_i = ∇^j T_{ji}, covector components

    const S& rm(int i, int j, int k, int l) const {
        return Rm[static_cast<size_t>(((i * kDim + j) * kDim + k) * kDim + l)];
    }
    S& rm(int i, int j, int k, int l) {
        return Rm[static_cast<size_t>(((i * kDim + j) * kDim + k) * kDim + l)];
    }
};

/// Curvature of the invariant metric plus covariant-derivative diagnostics of
/// the supplied torsion tensor. The frame is anholonomic, so R includes the
/// -∇_{[e_i,e_j]} term.
template <class S>
CurvatureData<S> curvature(const FrameAlgebra<S>& F, const Metric<S>& m, const Mat7<S>& T) {
    Connection<S> c = koszul(F, m);
    CurvatureData<S> out;

    // R^l_{ijk} = Γ^m_{jk}Γ^l_{im} - Γ^m_{ik}Γ^l_{jm} - c^p_{ij}Γ^l_{pk}
    for (int i = 0; i < kDim; ++i)
        for (int j = i + 1; j < kDim; ++j)
            for (int k = 0; k < kDim; ++k) {
                Vec7<S> Rl;
                for (int l = 0; l < kDim; ++l) {
                    S acc(0);
                    for (int mm = 0; mm < kDim; ++mm) {
                        acc += c.g3(j, k, mm) * c.g3(i, mm, l);
                        acc -= c.g3(i, k, mm) * c.g3(j, mm, l);
                    }
                    for (int p = 0; p < kDim; ++p) {
                        S br = F.bracket_coeff(i, j, p);
                        if (!is_zero(br)) acc -= br * c.g3(p, k, l);
                    }
                    Rl[l] = acc;
                }
                for (int l = 0; l < kDim; ++l) {
                    S low(0);
                    for (int mm = 0; mm < kDim; ++mm) low += m.g(l, mm) * Rl[mm];
                    out.rm(i, j, k, l) = low;
                    out.rm(j, i, k, l) = S(-1) * low;
                }
            }

    // Ric(e_j, e_k) = g^{il} R_{ijkl}
    for (int j = 0; j < kDim; ++j)
        for (int k = 0; k < kDim; ++k) {
            S acc(0);
            for (int i = 0; i < kDim; ++i)
                for (int l = 0; l < kDim; ++l) {
                    const S& r = out.rm(i, j, k, l);
                    if (!is_zero(r)) acc += m.g_inv(i, l) * r;
                }
            out.Ric(j, k) = acc;
        }

    // |Rm|^2 by raising one index at a time
    {
        std::array<S, kDim * kDim * kDim * kDim> cur = out.Rm;
        for (int pos = 0; pos < 4; ++pos) {
            std::array<S, kDim * kDim * kDim * kDim> nxt{};
            for (auto& v : nxt) v = S(0);
            int stride[4] = {kDim * kDim * kDim, kDim * kDim, kDim, 1};
            for (int a = 0; a < kDim; ++a)
                for (int b = 0; b < kDim; ++b)
                    for (int cc = 0; cc < kDim; ++cc)
                        for (int d = 0; d < kDim; ++d) {
                            int id[4] = {a, b, cc, d};
                            size_t from = static_cast<size_t>(a * stride[0] + b * stride[1] + cc * stride[2] + d);
                            const S& v = cur[from];
                            if (is_zero(v)) continue;
                            for (int r = 0; r < kDim; ++r) {
                                const S& gi = m.g_inv(id[pos], r);
                                if (is_zero(gi)) continue;
                                int jd[4] = {id[0], id[1], id[2], id[3]};
                                jd[pos] = r;
                                size_t to = static_cast<size_t>(jd[0] * stride[0] + jd[1] * stride[1] + jd[2] * stride[2] + jd[3]);
                                nxt[to] += gi * v;
                            }
                        }
            cur = nxt;
        }
        S acc(0);
        for (size_t n = 0; n < cur.size(); ++n)
            if (!is_zero(cur[n]) && !is_zero(out.Rm[n])) acc += cur[n] * out.Rm[n];
        out.normRm2 = acc;
    }

    for (int i = 0; i < kDim; ++i) out.nablaT[static_cast<size_t>(i)] = nabla_tensor2(c, T, i);

    // |∇T|^2 and div T
    {
        S acc(0);
        for (int i = 0; i < kDim; ++i)
            for (int j = 0; j < kDim; ++j)
                for (int k = 0; k < kDim; ++k) {
                    const S& v = out.nablaT[static_cast<size_t>(i)](j, k);
                    if (is_zero(v)) continue;
                    for (int a = 0; a < kDim; ++a)
                        for (int b = 0; b < kDim; ++b)
                            for (int cc = 0; cc < kDim; ++cc) {
                                const S& w = out.nablaT[static_cast<size_t>(a)](b, cc);
                                if (is_zero(w)) continue;
                                acc += v * w * m.g_inv(i, a) * m.g_inv(j, b) * m.g_inv(k, cc);
                            }
                }
        out.normNablaT2 = acc;
        for (int i = 0; i < kDim; ++i) {
            S d(0);
            for (int j = 0; j < kDim; ++j)
                for (int mm = 0; mm < kDim; ++mm) {
                    const S& v = out.nablaT[static_cast<size_t>(mm)](j, i);
                    if (!is_zero(v)) d += m.g_inv(j, mm) * v;
                }
            out.divT[i] = d;
        }
    }
    return out;
}

/// Λ^2 = |Rm|^2 + |∇T|^2 + |T|^4, the blow-up quantity squared.
template <class S>
S lambda_squared(const CurvatureData<S>& cd, const S& normT2) {
    return cd.normRm2 + cd.normNablaT2 + normT2 * normT2;
}

} // namespace g2flow
