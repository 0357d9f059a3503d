#pragma once

#include "scalar.hpp"
#include <array>
#include <map>
#include <sstream>
#include <vector>

namespace g2flow {

/// Sparse Laurent polynomial over Rat in up to four variables.
///
/// This scalar backend drives the symbolic path of the engine: the full
/// tensor pipeline (exterior derivative, Hodge star, torsion, Ricci, flow
/// velocities) runs unchanged over it, so ODE reductions come out as exact
/// closed-form expressions in the ansatz parameters. Division is restricted
/// to single-term divisors, which is all the diagonal-metric ansatz paths
/// ever need.
class Laurent {
public:
    static constexpr int kVars = 4;
    using Expo = std::array<int, kVars>;

    Laurent() = default;
    Laurent(long n, long d = 1) {
        if (n != 0) terms_[Expo{0, 0, 0, 0}] = Rat(n, d);
    }
    explicit Laurent(const Rat& c) {
        if (c != 0) terms_[Expo{0, 0, 0, 0}] = c;
    }

    static Laurent variable(int i) {
        Laurent p;
        Expo e{0, 0, 0, 0};
        e[static_cast<size_t>(i)] = 1;
        p.terms_[e] = 1;
        return p;
    }
    static Laurent term(const Rat& c, const Expo& e) {
        Laurent p;
        if (c != 0) p.terms_[e] = c;
        return p;
    }

    const std::map<Expo, Rat>& terms() const { return terms_; }
    bool zero() const { return terms_.empty(); }
    bool single_term() const { return terms_.size() == 1; }

    bool operator==(const Laurent& o) const { return terms_ == o.terms_; }
    bool operator!=(const Laurent& o) const { return !(*this == o); }

    Laurent operator-() const {
        Laurent r;
        for (auto& [e, c] : terms_) r.terms_[e] = -c;
        return r;
    }
    Laurent& operator+=(const Laurent& o) {
        for (auto& [e, c] : o.terms_) {
            Rat& t = terms_[e];
            t += c;
            if (t == 0) terms_.erase(e);
        }
        return *this;
    }
    Laurent& operator-=(const Laurent& o) {
        for (auto& [e, c] : o.terms_) {
            Rat& t = terms_[e];
            t -= c;
            if (t == 0) terms_.erase(e);
        }
        return *this;
    }
    friend Laurent operator+(Laurent a, const Laurent& b) { return a += b; }
    friend Laurent operator-(Laurent a, const Laurent& b) { return a -= b; }

    friend Laurent operator*(const Laurent& a, const Laurent& b) {
        Laurent r;
        for (auto& [ea, ca] : a.terms_)
            for (auto& [eb, cb] : b.terms_) {
                Expo e;
                for (int i = 0; i < kVars; ++i) e[static_cast<size_t>(i)] = ea[static_cast<size_t>(i)] + eb[static_cast<size_t>(i)];
                Rat& t = r.terms_[e];
                t += ca * cb;
                if (t == 0) r.terms_.erase(e);
            }
        return r;
    }
    Laurent& operator*=(const Laurent& o) { return *this = *this * o; }

    /// Exact division; the divisor must be a single term.
    friend Laurent operator/(const Laurent& a, const Laurent& b) {
        if (b.terms_.size() != 1)
            throw std::domain_error("Laurent division requires a single-term divisor");
        auto& [eb, cb] = *b.terms_.begin();
        Laurent r;
        for (auto& [ea, ca] : a.terms_) {
            Expo e;
            for (int i = 0; i < kVars; ++i) e[static_cast<size_t>(i)] = ea[static_cast<size_t>(i)] - eb[static_cast<size_t>(i)];
            r.terms_[e] = ca / cb;
        }
        return r;
    }
    Laurent& operator/=(const Laurent& o) { return *this = *this / o; }

    /// Collapse variables: every exponent of variable `from` is added onto
    /// variable `onto`. Used to specialise a=b=c=h symbolically.
    Laurent collapse(int from, int onto) const {
        Laurent r;
        for (auto& [e, c] : terms_) {
            Expo f = e;
            f[static_cast<size_t>(onto)] += f[static_cast<size_t>(from)];
            f[static_cast<size_t>(from)] = 0;
            Rat& t = r.terms_[f];
            t += c;
            if (t == 0) r.terms_.erase(f);
        }
        return r;
    }

    template <class T>
    T eval(const std::vector<T>& x) const {
        T acc = T(0);
        for (auto& [e, c] : terms_) {
            T t = T(to_double(c));
            for (int i = 0; i < kVars; ++i) {
                int p = e[static_cast<size_t>(i)];
                for (int k = 0; k < p; ++k) t *= x[static_cast<size_t>(i)];
                for (int k = 0; k > p; --k) t /= x[static_cast<size_t>(i)];
            }
            acc += t;
        }
        return acc;
    }

    Rat eval_rat(const std::vector<Rat>& x) const {
        Rat acc = 0;
        for (auto& [e, c] : terms_) {
            Rat t = c;
            for (int i = 0; i < kVars; ++i) {
                int p = e[static_cast<size_t>(i)];
                for (int k = 0; k < p; ++k) t *= x[static_cast<size_t>(i)];
                for (int k = 0; k > p; --k) t /= x[static_cast<size_t>(i)];
            }
            acc += t;
        }
        return acc;
    }

    /// True when the polynomial is a rational constant.
    bool constant(Rat* value = nullptr) const {
        if (terms_.empty()) {
            if (value) *value = 0;
            return true;
        }
        if (terms_.size() == 1 && terms_.begin()->first == Expo{0, 0, 0, 0}) {
            if (value) *value = terms_.begin()->second;
            return true;
        }
        return false;
    }

    /// Canonical string: terms sorted by exponent, "p/q * x^a * y^b" each.
    std::string str(const std::vector<std::string>& names) const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto& [e, c] : terms_) {
            Rat a = c;
            if (first) {
                if (a < 0) { os << "-"; a = -a; }
            } else {
                if (a < 0) { os << " - "; a = -a; }
                else os << " + ";
            }
            os << a.str();
            for (int i = 0; i < kVars && i < static_cast<int>(names.size()); ++i) {
                int p = e[static_cast<size_t>(i)];
                if (p == 0) continue;
                os << " * " << names[static_cast<size_t>(i)];
                if (p != 1) os << "^" << p;
            }
            first = false;
        }
        return os.str();
    }

private:
    std::map<Expo, Rat> terms_;
};

inline bool is_zero(const Laurent& x) { return x.zero(); }

/// Positivity on the open positive orthant: decidable when every coefficient
/// has one sign. Mixed signs throw; the ansatz metrics never produce them.
inline bool is_positive(const Laurent& x) {
    if (x.zero()) return false;
    bool all_pos = true, all_neg = true;
    for (auto& [e, c] : x.terms()) {
        (void)e;
        if (c < 0) all_pos = false;
        if (c > 0) all_neg = false;
    }
    if (all_pos) return true;
    if (all_neg) return false;
    throw std::domain_error("indeterminate sign of Laurent scalar");
}

inline Laurent scalar_from_int(const Laurent&, long n, long d = 1) { return Laurent(n, d); }

inline Laurent sqrt_scalar(const Laurent& x) {
    if (x.zero()) return Laurent();
    if (!x.single_term())
        throw std::domain_error("Laurent sqrt requires a single term");
    auto& [e, c] = *x.terms().begin();
    Laurent::Expo h;
    for (int i = 0; i < Laurent::kVars; ++i) {
        if (e[static_cast<size_t>(i)] % 2 != 0)
            throw std::domain_error("Laurent sqrt: odd exponent");
        h[static_cast<size_t>(i)] = e[static_cast<size_t>(i)] / 2;
    }
    Rat rc;
    if (!rat_nth_root(c, 2, rc))
        throw std::domain_error("Laurent sqrt: coefficient not a perfect square");
    return Laurent::term(rc, h);
}

inline Laurent nth_root_scalar(const Laurent& x, unsigned n) {
    if (x.zero()) return Laurent();
    if (!x.single_term())
        throw std::domain_error("Laurent nth root requires a single term");
    auto& [e, c] = *x.terms().begin();
    Laurent::Expo h;
    for (int i = 0; i < Laurent::kVars; ++i) {
        if (e[static_cast<size_t>(i)] % static_cast<int>(n) != 0)
            throw std::domain_error("Laurent nth root: exponent not divisible");
        h[static_cast<size_t>(i)] = e[static_cast<size_t>(i)] / static_cast<int>(n);
    }
    Rat rc;
    if (!rat_nth_root(c, n, rc))
        throw std::domain_error("Laurent nth root: coefficient not an exact power");
    return Laurent::term(rc, h);
}

inline double to_double(const Laurent& x) {
    Rat v;
    if (!x.constant(&v))
        throw std::domain_error("Laurent scalar is not constant");
    return to_double(v);
}

} // namespace g2flow
