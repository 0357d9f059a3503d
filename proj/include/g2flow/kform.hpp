#pragma once

#include "scalar.hpp"
#include <array>
#include <bit>
#include <cstdint>
#include <map>
#include <vector>

namespace g2flow {

constexpr int kDim = 7;

/// A strictly increasing multi-index on the coframe e^1..e^7, stored as a
/// 7-bit mask (bit i set = index i+1 present). The bijection makes equality
/// and complement trivial and keeps sign bookkeeping in one place.
using Mask = std::uint8_t;

constexpr Mask kFullMask = 0x7F;

inline int mask_degree(Mask m) { return std::popcount(static_cast<unsigned>(m)); }

/// Parity sign of merging two disjoint increasing index sets a, b into one
/// increasing set: (-1)^{#inversions}.
inline int merge_sign(Mask a, Mask b) {
    int inv = 0;
    for (int i = 0; i < kDim; ++i) {
        if (b & (Mask(1) << i)) {
            unsigned higher = static_cast<unsigned>(a) >> (i + 1);
            inv += std::popcount(higher);
        }
    }
    return (inv % 2 == 0) ? 1 : -1;
}

/// Position (0-based) of index bit i within the increasing listing of m.
inline int index_position(Mask m, int i) {
    return std::popcount(static_cast<unsigned>(m) & ((1u << i) - 1u));
}

inline std::vector<int> mask_indices(Mask m) {
    std::vector<int> v;
    for (int i = 0; i < kDim; ++i)
        if (m & (Mask(1) << i)) v.push_back(i);
    return v;
}

inline std::string mask_str(Mask m) {
    std::string s = "e^";
    for (int i = 0; i < kDim; ++i)
        if (m & (Mask(1) << i)) s += static_cast<char>('1' + i);
    return m == 0 ? std::string("1") : s;
}

/// Alternating k-form with scalar coefficients on the fixed coframe.
/// Coefficients are stored sparsely on increasing multi-indices; an absent
/// index means zero.
template <class S>
class KForm {
public:
    KForm() : degree_(0) {}
    explicit KForm(int degree) : degree_(degree) {
        if (degree < 0 || degree > kDim) throw std::invalid_argument("form degree out of range");
    }

    static KForm basis(std::initializer_list<int> idx, const S& c = S(1)) {
        Mask m = 0;
        int sign = 1;
        for (int i : idx) {
            Mask bit = Mask(1) << (i - 1);
            if (m & bit) return KForm(static_cast<int>(idx.size())); // repeated index
            // count set bits above the inserted one for the sorting sign
            unsigned higher = static_cast<unsigned>(m) >> i;
            if (std::popcount(higher) % 2 != 0) sign = -sign;
            m |= bit;
        }
        KForm f(static_cast<int>(idx.size()));
        f.add(m, sign > 0 ? c : S(-1) * c);
        return f;
    }

    int degree() const { return degree_; }
    const std::map<Mask, S>& coeffs() const { return c_; }
    bool zero() const { return c_.empty(); }

    S coeff(Mask m) const {
        auto it = c_.find(m);
        return it == c_.end() ? S(0) : it->second;
    }

    void add(Mask m, const S& v) {
        if (mask_degree(m) != degree_) throw std::invalid_argument("multi-index degree mismatch");
        if (is_zero(v)) return;
        auto it = c_.find(m);
        if (it == c_.end()) {
            c_.emplace(m, v);
        } else {
            it->second += v;
            if (is_zero(it->second)) c_.erase(it);
        }
    }
    void set(Mask m, const S& v) {
        if (mask_degree(m) != degree_) throw std::invalid_argument("multi-index degree mismatch");
        c_.erase(m);
        if (!is_zero(v)) c_.emplace(m, v);
    }

    /// Fully antisymmetric component lookup: value on an arbitrary ordered
    /// index tuple (0-based), zero on repeats.
    S component(const std::vector<int>& idx) const {
        Mask m = 0;
        int sign = 1;
        for (int i : idx) {
            Mask bit = Mask(1) << i;
            if (m & bit) return S(0);
            unsigned higher = static_cast<unsigned>(m) >> (i + 1);
            if (std::popcount(higher) % 2 != 0) sign = -sign;
            m |= bit;
        }
        S v = coeff(m);
        return sign > 0 ? v : S(-1) * v;
    }

    bool operator==(const KForm& o) const { return degree_ == o.degree_ && c_ == o.c_; }
    bool operator!=(const KForm& o) const { return !(*this == o); }

    KForm operator-() const {
        KForm r(degree_);
        for (auto& [m, v] : c_) r.c_.emplace(m, S(-1) * v);
        return r;
    }
    KForm& operator+=(const KForm& o) {
        if (degree_ != o.degree_) throw std::invalid_argument("form degree mismatch in sum");
        for (auto& [m, v] : o.c_) add(m, v);
        return *this;
    }
    KForm& operator-=(const KForm& o) { return *this += -o; }
    friend KForm operator+(KForm a, const KForm& b) { return a += b; }
    friend KForm operator-(KForm a, const KForm& b) { return a -= b; }
    friend KForm operator*(const S& s, const KForm& f) {
        KForm r(f.degree_);
        if (is_zero(s)) return r;
        for (auto& [m, v] : f.c_) r.add(m, s * v);
        return r;
    }
    friend KForm operator*(const KForm& f, const S& s) { return s * f; }
    KForm operator/(const S& s) const {
        KForm r(degree_);
        for (auto& [m, v] : c_) r.add(m, v / s);
        return r;
    }

    std::string str() const {
        if (c_.empty()) return "0";
        std::string s;
        bool first = true;
        for (auto& [m, v] : c_) {
            if (!first) s += " + ";
            s += "(" + scalar_str(v) + ")" + (m ? " " + mask_str(m) : "");
            first = false;
        }
        return s;
    }

private:
    int degree_;
    std::map<Mask, S> c_;
};

/// Vector in the frame e_1..e_7 dual to the coframe.
template <class S>
struct Vec7 {
    std::array<S, kDim> x{};

    Vec7() { x.fill(S(0)); }
    static Vec7 basis(int i, const S& c = S(1)) {
        Vec7 v;
        v.x[static_cast<size_t>(i - 1)] = c;
        return v;
    }
    S& operator[](int i) { return x[static_cast<size_t>(i)]; }
    const S& operator[](int i) const { return x[static_cast<size_t>(i)]; }
    bool zero() const {
        for (auto& v : x)
            if (!is_zero(v)) return false;
        return true;
    }
    bool operator==(const Vec7& o) const { return x == o.x; }
    Vec7 operator-() const {
        Vec7 r;
        for (int i = 0; i < kDim; ++i) r.x[static_cast<size_t>(i)] = S(-1) * x[static_cast<size_t>(i)];
        return r;
    }
    Vec7& operator+=(const Vec7& o) {
        for (int i = 0; i < kDim; ++i) x[static_cast<size_t>(i)] += o.x[static_cast<size_t>(i)];
        return *this;
    }
    friend Vec7 operator+(Vec7 a, const Vec7& b) { return a += b; }
    friend Vec7 operator*(const S& s, const Vec7& v) {
        Vec7 r;
        for (int i = 0; i < kDim; ++i) r.x[static_cast<size_t>(i)] = s * v.x[static_cast<size_t>(i)];
        return r;
    }
};

/// Dense 7x7 2-tensor; also used for symmetric tensors (g, T, Ric) with
/// symmetry checked where a contract requires it.
template <class S>
struct Mat7 {
    std::array<S, kDim * kDim> a{};

    Mat7() {
        for (auto& v : a) v = S(0);
    }
    static Mat7 identity() {
        Mat7 m;
        for (int i = 0; i < kDim; ++i) m(i, i) = S(1);
        return m;
    }
    S& operator()(int i, int j) { return a[static_cast<size_t>(i * kDim + j)]; }
    const S& operator()(int i, int j) const { return a[static_cast<size_t>(i * kDim + j)]; }

    bool zero() const {
        for (auto& v : a)
            if (!is_zero(v)) return false;
        return true;
    }
    bool symmetric() const {
        for (int i = 0; i < kDim; ++i)
            for (int j = i + 1; j < kDim; ++j)
                if (!is_zero((*this)(i, j) - (*this)(j, i))) return false;
        return true;
    }
    bool operator==(const Mat7& o) const {
        for (size_t i = 0; i < a.size(); ++i)
            if (!is_zero(a[i] - o.a[i])) return false;
        return true;
    }
    bool operator!=(const Mat7& o) const { return !(*this == o); }

    Mat7 operator-() const {
        Mat7 r;
        for (size_t i = 0; i < a.size(); ++i) r.a[i] = S(-1) * a[i];
        return r;
    }
    Mat7& operator+=(const Mat7& o) {
        for (size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
        return *this;
    }
    Mat7& operator-=(const Mat7& o) {
        for (size_t i = 0; i < a.size(); ++i) a[i] -= o.a[i];
        return *this;
    }
    friend Mat7 operator+(Mat7 x, const Mat7& y) { return x += y; }
    friend Mat7 operator-(Mat7 x, const Mat7& y) { return x -= y; }
    friend Mat7 operator*(const S& s, const Mat7& m) {
        Mat7 r;
        for (size_t i = 0; i < m.a.size(); ++i) r.a[i] = s * m.a[i];
        return r;
    }
    friend Mat7 operator*(const Mat7& x, const Mat7& y) {
        Mat7 r;
        for (int i = 0; i < kDim; ++i)
            for (int j = 0; j < kDim; ++j) {
                S acc(0);
                for (int k = 0; k < kDim; ++k) acc += x(i, k) * y(k, j);
                r(i, j) = acc;
            }
        return r;
    }
    Mat7 transpose() const {
        Mat7 r;
        for (int i = 0; i < kDim; ++i)
            for (int j = 0; j < kDim; ++j) r(i, j) = (*this)(j, i);
        return r;
    }
    Mat7 sym() const {
        Mat7 r;
        S half = scalar_from_int(S(0), 1, 2);
        for (int i = 0; i < kDim; ++i)
            for (int j = 0; j < kDim; ++j) r(i, j) = half * ((*this)(i, j) + (*this)(j, i));
        return r;
    }
};

/// Division-free determinant of the submatrix with rows `rows` and columns
/// `cols` (Laplace expansion over column subsets).
template <class S>
S subdet(const Mat7<S>& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    size_t n = rows.size();
    if (n != cols.size()) throw std::invalid_argument("subdet: shape mismatch");
    if (n == 0) return S(1);
    // dp over subsets of columns: det of rows[0..k) x chosen columns
    std::vector<S> dp(size_t(1) << n, S(0));
    dp[0] = S(1);
    for (size_t mask = 1; mask < dp.size(); ++mask) {
        int k = std::popcount(static_cast<unsigned>(mask));
        S acc(0);
        int pos = 0;
        for (size_t j = 0; j < n; ++j) {
            if (!(mask & (size_t(1) << j))) continue;
            const S& entry = m(rows[static_cast<size_t>(k - 1)], cols[j]);
            if (!is_zero(entry)) {
                S term = entry * dp[mask ^ (size_t(1) << j)];
                acc += ((k - 1 + pos) % 2 == 0) ? term : S(-1) * term;
            }
            ++pos;
        }
        dp[mask] = acc;
    }
    return dp[dp.size() - 1];
}

template <class S>
S det7(const Mat7<S>& m) {
    std::vector<int> all{0, 1, 2, 3, 4, 5, 6};
    return subdet(m, all, all);
}

/// Adjugate-based inverse (no pivoting, so it works over every backend).
/// Diagonal matrices take the cheap path.
template <class S>
Mat7<S> inverse7(const Mat7<S>& m, const S& det) {
    bool diag = true;
    for (int i = 0; i < kDim && diag; ++i)
        for (int j = 0; j < kDim; ++j)
            if (i != j && !is_zero(m(i, j))) { diag = false; break; }
    Mat7<S> inv;
    if (diag) {
        for (int i = 0; i < kDim; ++i) inv(i, i) = S(1) / m(i, i);
        return inv;
    }
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < kDim; ++j) {
            std::vector<int> rows, cols;
            for (int k = 0; k < kDim; ++k) {
                if (k != j) rows.push_back(k);
                if (k != i) cols.push_back(k);
            }
            S c = subdet(m, rows, cols);
            if ((i + j) % 2 != 0) c = S(-1) * c;
            inv(i, j) = c / det;
        }
    return inv;
}

} // namespace g2flow
