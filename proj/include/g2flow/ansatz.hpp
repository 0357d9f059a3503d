#pragma once

#include "g2.hpp"

namespace g2flow {

inline Mask mask_of(std::initializer_list<int> idx) {
    Mask m = 0;
    for (int i : idx) m |= Mask(1) << (i - 1);
    return m;
}

// Fixed forms on the frame with de^7 = e^12+e^34+e^56: contact form η0 = e^7,
// transverse Kähler form ω0 = dη0, and the transverse holomorphic volume
// form Υ0 with ReΥ0 = e^135-e^146-e^236-e^245, ImΥ0 = e^136+e^145+e^235-e^246.

template <class S>
KForm<S> omega0() {
    return KForm<S>::basis({1, 2}) + KForm<S>::basis({3, 4}) + KForm<S>::basis({5, 6});
}

template <class S>
KForm<S> eta0() {
    return KForm<S>::basis({7});
}

template <class S>
KForm<S> eta_wedge_omega0() {
    return KForm<S>::basis({1, 2, 7}) + KForm<S>::basis({3, 4, 7}) + KForm<S>::basis({5, 6, 7});
}

template <class S>
KForm<S> re_upsilon0() {
    return KForm<S>::basis({1, 3, 5}) - KForm<S>::basis({1, 4, 6}) - KForm<S>::basis({2, 3, 6}) -
           KForm<S>::basis({2, 4, 5});
}

template <class S>
KForm<S> im_upsilon0() {
    return KForm<S>::basis({1, 3, 6}) + KForm<S>::basis({1, 4, 5}) + KForm<S>::basis({2, 3, 5}) -
           KForm<S>::basis({2, 4, 6});
}

/// Standard G2 3-form on the Heisenberg frame (also the a=1 member of the
/// contact family realized on the same frame).
template <class S>
KForm<S> phi_standard() {
    return eta_wedge_omega0<S>() + re_upsilon0<S>();
}

/// η0^2 as a symmetric 2-tensor.
template <class S>
Mat7<S> eta0_squared() {
    Mat7<S> m;
    m(6, 6) = S(1);
    return m;
}

/// Transversal metric g_D0 = Σ_{i<=6} (e^i)^2.
template <class S>
Mat7<S> gD0() {
    Mat7<S> m;
    for (int i = 0; i < 6; ++i) m(i, i) = S(1);
    return m;
}

template <class S>
void require_positive_param(const S& v) {
    if (!is_positive(v)) throw std::invalid_argument("degenerate ansatz");
}

/// φ_t = f h^2 η0∧ω0 + h^3 ReΥ0 on the contact frame.
template <class S>
G2Data<S> build_ccy(const FrameAlgebra<S>& frame, const S& f, const S& h) {
    require_positive_param(f);
    require_positive_param(h);
    KForm<S> phi = (f * h * h) * eta_wedge_omega0<S>() + (h * h * h) * re_upsilon0<S>();
    return make_g2(frame, phi);
}

/// φ_t = f(a^2 e^127 + b^2 e^347 + c^2 e^567) + abc ReΥ0 on the Heisenberg frame.
template <class S>
G2Data<S> build_heisenberg(const FrameAlgebra<S>& frame, const S& f, const S& a, const S& b, const S& c) {
    require_positive_param(f);
    require_positive_param(a);
    require_positive_param(b);
    require_positive_param(c);
    KForm<S> phi =
        KForm<S>::basis({1, 2, 7}, f * a * a) + KForm<S>::basis({3, 4, 7}, f * b * b) +
        KForm<S>::basis({5, 6, 7}, f * c * c) + (a * b * c) * re_upsilon0<S>();
    return make_g2(frame, phi);
}

} // namespace g2flow
