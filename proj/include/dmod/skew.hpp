#pragma once

#include <utility>
#include <vector>

#include "dmod/poly.hpp"

namespace dmod {

/// F_q-linear (additive) polynomial in operator form: sum b_i tau^i where
/// tau is the q-power map x -> x^q.  Coefficients live in a field containing
/// F_q; composition twists coefficients, so the ring is non-commutative.
class AdditivePoly {
public:
    AdditivePoly() = default;

    static AdditivePoly from_coeffs(const FieldPtr& K, u64 q, std::vector<FieldElem> b) {
        check_twist(K, q);
        for (auto& x : b)
            if (!x.field()->same(*K)) x = embed(x, K);
        return AdditivePoly(K, q, std::move(b));
    }

    static AdditivePoly zero(const FieldPtr& K, u64 q) { return from_coeffs(K, q, {}); }

    /// The identity operator x -> x (tau^0).
    static AdditivePoly identity(const FieldPtr& K, u64 q) {
        return from_coeffs(K, q, {K->one()});
    }

    /// The twist operator itself, x -> x^q.
    static AdditivePoly tau(const FieldPtr& K, u64 q) {
        return from_coeffs(K, q, {K->zero(), K->one()});
    }

    static AdditivePoly scalar(const FieldPtr& K, u64 q, const FieldElem& c) {
        return from_coeffs(K, q, {c});
    }

    const FieldPtr& field() const { return K_; }
    u64 twist() const { return q_; }
    const std::vector<FieldElem>& coeffs() const { return b_; }
    bool valid() const { return static_cast<bool>(K_); }
    int tau_degree() const { return static_cast<int>(b_.size()) - 1; }
    bool is_zero() const { return b_.empty(); }

    FieldElem at(size_t i) const { return i < b_.size() ? b_[i] : K_->zero(); }

    bool operator==(const AdditivePoly& o) const {
        if (q_ != o.q_ || !K_->same(*o.K_)) return false;
        if (b_.size() != o.b_.size()) return false;
        for (size_t i = 0; i < b_.size(); ++i)
            if (!(b_[i] == o.b_[i])) return false;
        return true;
    }
    bool operator!=(const AdditivePoly& o) const { return !(*this == o); }

    /// Applies the operator to a point of any field containing both the
    /// coefficient field and F_q.
    FieldElem eval(const FieldElem& x0) const {
        auto x = x0;
        // lift x into the coefficient field unless it already lives above it
        if (!x.field()->same(*K_) && !x.field()->subfield_degree(field_size(K_)))
            x = embed(x, K_);
        check_twist(x.field(), q_);
        auto acc = x.field()->zero();
        auto y = x;  // tau^i applied to x
        for (size_t i = 0; i < b_.size(); ++i) {
            if (!b_[i].is_zero()) acc = acc + b_[i] * y;
            if (i + 1 < b_.size()) y = frobenius_power(y, q_, 1);
        }
        return acc;
    }

    /// The ordinary polynomial sum b_i X^(q^i).  Capped: the X-degree must
    /// stay at or below 2^20.
    Poly to_poly() const {
        if (is_zero()) return Poly::zero(K_);
        u64 deg = 1;
        for (int i = 0; i < tau_degree(); ++i) {
            deg *= q_;
            if (deg > (1ULL << 20)) fail_cap("DegreeCap", "expanded operator degree exceeds 2^20");
        }
        std::vector<FieldElem> c(deg + 1, K_->zero());
        u64 pw = 1;
        for (size_t i = 0; i < b_.size(); ++i) {
            c[pw] = b_[i];
            pw *= q_;
        }
        return Poly::from_coeffs(K_, std::move(c));
    }

    static u64 field_size(const FieldPtr& K) {
        u64 s = 1;
        for (unsigned i = 0; i < K->degree(); ++i) s *= K->p();
        return s;
    }

private:
    AdditivePoly(FieldPtr K, u64 q, std::vector<FieldElem> b)
        : K_(std::move(K)), q_(q), b_(std::move(b)) {
        while (!b_.empty() && b_.back().is_zero()) b_.pop_back();
    }

    static void check_twist(const FieldPtr& K, u64 q) {
        if (!K->subfield_degree(q))
            fail_input("TwistMismatch", "coefficient field does not contain the twist field");
    }

    FieldPtr K_;
    u64 q_ = 0;
    std::vector<FieldElem> b_;
};

/// Re-bases an operator's coefficients into an extension field.
inline AdditivePoly lift_operator(const AdditivePoly& f, const FieldPtr& L) {
    if (f.field()->same(*L)) return f;
    std::vector<FieldElem> c;
    c.reserve(f.coeffs().size());
    for (const auto& x : f.coeffs()) c.push_back(embed(x, L));
    return AdditivePoly::from_coeffs(L, f.twist(), std::move(c));
}

namespace detail {

/// Common (field, twist) for a binary operation; embeds into the larger
/// field when one coefficient field contains the other.
inline std::pair<AdditivePoly, AdditivePoly> unify_ops(const AdditivePoly& a,
                                                       const AdditivePoly& b) {
    if (a.twist() != b.twist()) fail_input("TwistMismatch", "operators have different twists");
    if (a.field()->same(*b.field())) return {a, b};
    if (b.field()->subfield_degree(AdditivePoly::field_size(a.field())))
        return {lift_operator(a, b.field()), b};  // a's coefficients sit inside b's field
    if (a.field()->subfield_degree(AdditivePoly::field_size(b.field())))
        return {a, lift_operator(b, a.field())};
    fail_input("FieldMismatch", "operator coefficient fields are incompatible");
}

}  // namespace detail

inline AdditivePoly operator+(const AdditivePoly& a0, const AdditivePoly& b0) {
    auto [a, b] = detail::unify_ops(a0, b0);
    const size_t n = std::max(a.coeffs().size(), b.coeffs().size());
    std::vector<FieldElem> c;
    c.reserve(n);
    for (size_t i = 0; i < n; ++i) c.push_back(a.at(i) + b.at(i));
    return AdditivePoly::from_coeffs(a.field(), a.twist(), std::move(c));
}

inline AdditivePoly operator-(const AdditivePoly& a0, const AdditivePoly& b0) {
    auto [a, b] = detail::unify_ops(a0, b0);
    const size_t n = std::max(a.coeffs().size(), b.coeffs().size());
    std::vector<FieldElem> c;
    c.reserve(n);
    for (size_t i = 0; i < n; ++i) c.push_back(a.at(i) - b.at(i));
    return AdditivePoly::from_coeffs(a.field(), a.twist(), std::move(c));
}

/// Composition a(b(x)): coefficient k picks up sum over i+j=k of
/// a_i * b_j^(q^i).
inline AdditivePoly compose(const AdditivePoly& a0, const AdditivePoly& b0) {
    auto [a, b] = detail::unify_ops(a0, b0);
    if (a.is_zero() || b.is_zero()) return AdditivePoly::zero(a.field(), a.twist());
    std::vector<FieldElem> c(a.coeffs().size() + b.coeffs().size() - 1, a.field()->zero());
    for (size_t i = 0; i < a.coeffs().size(); ++i) {
        if (a.coeffs()[i].is_zero()) continue;
        for (size_t j = 0; j < b.coeffs().size(); ++j) {
            if (b.coeffs()[j].is_zero()) continue;
            c[i + j] = c[i + j] + a.coeffs()[i] * frobenius_power(b.coeffs()[j], a.twist(), i);
        }
    }
    return AdditivePoly::from_coeffs(a.field(), a.twist(), std::move(c));
}

/// Left scalar action c * f (compose the map x -> cx after f).
inline AdditivePoly operator*(const FieldElem& c, const AdditivePoly& f) {
    AdditivePoly sc;
    if (f.field()->subfield_degree(AdditivePoly::field_size(c.field())))
        sc = AdditivePoly::scalar(f.field(), f.twist(), embed(c, f.field()));
    else if (c.field()->subfield_degree(AdditivePoly::field_size(f.field())))
        sc = AdditivePoly::scalar(c.field(), f.twist(), c);
    else
        fail_input("FieldMismatch", "scalar field is incompatible with the operator");
    return compose(sc, f);
}

/// Reads an additive operator off its expanded polynomial: every exponent
/// with a nonzero coefficient must be a power of q.
inline AdditivePoly additive_from_poly(const Poly& f, u64 q) {
    const auto& K = f.field();
    if (!K->subfield_degree(q))
        fail_input("TwistMismatch", "coefficient field does not contain the twist field");
    std::vector<FieldElem> b;
    std::vector<bool> seen(f.coeffs().size(), false);
    u64 pw = 1;
    while (pw < f.coeffs().size()) {
        b.push_back(f.coeffs()[pw]);
        seen[pw] = true;
        pw *= q;
    }
    for (size_t k = 0; k < f.coeffs().size(); ++k)
        if (!seen[k] && !f.coeffs()[k].is_zero())
            fail_input("NotAdditive",
                       "coefficient at X-degree " + std::to_string(k) +
                           " falls outside the twist powers");
    return AdditivePoly::from_coeffs(K, q, std::move(b));
}

}  // namespace dmod
