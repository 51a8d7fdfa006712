#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dmod/errors.hpp"
#include "dmod/ff.hpp"
#include "dmod/rand.hpp"

namespace dmod {

/// Dense univariate polynomial over a Field, low degree first, canonical
/// (no trailing zero coefficients).  Doubles as the operator-coefficient ring
/// F_q[t]: residues mod a monic n are represented as canonical remainders of
/// this same type, not as a separate class.
class Poly {
public:
    Poly() = default;

    static Poly zero(const FieldPtr& F) { return Poly(F, {}); }

    static Poly from_coeffs(const FieldPtr& F, std::vector<FieldElem> c) {
        for (auto& x : c)
            if (!x.field()->same(*F)) x = embed(x, F);
        return Poly(F, std::move(c));
    }

    static Poly from_ints(const FieldPtr& F, const std::vector<u64>& v) {
        std::vector<FieldElem> c;
        c.reserve(v.size());
        for (u64 x : v) c.push_back(F->from_int(x));
        return Poly(F, std::move(c));
    }

    /// The monomial c * X^k.
    static Poly monomial(const FieldPtr& F, FieldElem c, size_t k) {
        std::vector<FieldElem> v(k + 1, F->zero());
        v[k] = std::move(c);
        return Poly(F, std::move(v));
    }

    static Poly constant(const FieldPtr& F, const FieldElem& c) { return monomial(F, c, 0); }
    static Poly one(const FieldPtr& F) { return constant(F, F->one()); }
    static Poly x(const FieldPtr& F) { return monomial(F, F->one(), 1); }

    const FieldPtr& field() const { return f_; }
    const std::vector<FieldElem>& coeffs() const { return c_; }
    bool valid() const { return static_cast<bool>(f_); }
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }

    FieldElem at(size_t i) const { return i < c_.size() ? c_[i] : f_->zero(); }
    FieldElem lc() const { return c_.empty() ? f_->zero() : c_.back(); }
    bool is_monic() const { return !c_.empty() && lc() == f_->one(); }

    bool operator==(const Poly& o) const {
        if (!f_->same(*o.f_)) return false;
        if (c_.size() != o.c_.size()) return false;
        for (size_t i = 0; i < c_.size(); ++i)
            if (!(c_[i] == o.c_[i])) return false;
        return true;
    }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    /// Horner evaluation.  The point may live in an extension of the
    /// coefficient field; coefficients embed implicitly.
    FieldElem eval(const FieldElem& x) const {
        auto acc = x.field()->zero();
        for (size_t i = c_.size(); i-- > 0;) acc = acc * x + c_[i];
        if (c_.empty()) return x.field()->zero();
        return acc;
    }

    std::string to_string() const;

private:
    Poly(FieldPtr f, std::vector<FieldElem> c) : f_(std::move(f)), c_(std::move(c)) {
        while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
    }

    FieldPtr f_;
    std::vector<FieldElem> c_;
};

inline Poly operator+(const Poly& a, const Poly& b) {
    if (!a.field()->same(*b.field())) fail_input("FieldMismatch", "polynomial fields differ");
    std::vector<FieldElem> c;
    const size_t n = std::max(a.coeffs().size(), b.coeffs().size());
    c.reserve(n);
    for (size_t i = 0; i < n; ++i) c.push_back(a.at(i) + b.at(i));
    return Poly::from_coeffs(a.field(), std::move(c));
}

inline Poly operator-(const Poly& a, const Poly& b) {
    if (!a.field()->same(*b.field())) fail_input("FieldMismatch", "polynomial fields differ");
    std::vector<FieldElem> c;
    const size_t n = std::max(a.coeffs().size(), b.coeffs().size());
    c.reserve(n);
    for (size_t i = 0; i < n; ++i) c.push_back(a.at(i) - b.at(i));
    return Poly::from_coeffs(a.field(), std::move(c));
}

inline Poly operator*(const Poly& a, const Poly& b) {
    if (!a.field()->same(*b.field())) fail_input("FieldMismatch", "polynomial fields differ");
    if (a.is_zero() || b.is_zero()) return Poly::zero(a.field());
    std::vector<FieldElem> c(a.coeffs().size() + b.coeffs().size() - 1, a.field()->zero());
    for (size_t i = 0; i < a.coeffs().size(); ++i) {
        if (a.coeffs()[i].is_zero()) continue;
        for (size_t j = 0; j < b.coeffs().size(); ++j)
            c[i + j] = c[i + j] + a.coeffs()[i] * b.coeffs()[j];
    }
    return Poly::from_coeffs(a.field(), std::move(c));
}

inline Poly operator*(const FieldElem& s, const Poly& a) {
    std::vector<FieldElem> c = a.coeffs();
    for (auto& x : c) x = s * x;
    return Poly::from_coeffs(a.field(), std::move(c));
}

/// Quotient and remainder; divisor must be nonzero.
inline std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
    if (!a.field()->same(*b.field())) fail_input("FieldMismatch", "polynomial fields differ");
    if (b.is_zero()) fail_input("DivisionByZero", "polynomial division by zero");
    const auto& F = a.field();
    std::vector<FieldElem> rem = a.coeffs();
    std::vector<FieldElem> quo(
        a.degree() >= b.degree() ? a.degree() - b.degree() + 1 : 0, F->zero());
    const auto lead_inv = inv(b.lc());
    auto redeg = [&rem]() {
        int d = static_cast<int>(rem.size()) - 1;
        while (d >= 0 && rem[d].is_zero()) --d;
        return d;
    };
    int dr = redeg();
    while (dr >= b.degree()) {
        const int shift = dr - b.degree();
        const auto c = rem[dr] * lead_inv;
        quo[shift] = quo[shift] + c;
        for (int i = 0; i <= b.degree(); ++i)
            rem[shift + i] = rem[shift + i] - c * b.coeffs()[i];
        dr = redeg();
    }
    return {Poly::from_coeffs(F, std::move(quo)), Poly::from_coeffs(F, std::move(rem))};
}

inline Poly operator/(const Poly& a, const Poly& b) { return divmod(a, b).first; }
inline Poly operator%(const Poly& a, const Poly& b) { return divmod(a, b).second; }

inline Poly monic(const Poly& a) {
    if (a.is_zero()) return a;
    return inv(a.lc()) * a;
}

/// Monic greatest common divisor.
inline Poly gcd(Poly a, Poly b) {
    while (!b.is_zero()) {
        auto r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return monic(a);
}

/// Extended Euclid: returns (g, u, v) with u*a + v*b = g, g monic (or zero).
inline std::tuple<Poly, Poly, Poly> ext_gcd(const Poly& a, const Poly& b) {
    const auto& F = a.field();
    Poly r0 = a, r1 = b;
    Poly s0 = Poly::one(F), s1 = Poly::zero(F);
    Poly t0 = Poly::zero(F), t1 = Poly::one(F);
    while (!r1.is_zero()) {
        auto [q, r2] = divmod(r0, r1);
        r0 = std::move(r1);
        r1 = std::move(r2);
        Poly s2 = s0 - q * s1;
        s0 = std::move(s1);
        s1 = std::move(s2);
        Poly t2 = t0 - q * t1;
        t0 = std::move(t1);
        t1 = std::move(t2);
    }
    if (r0.is_zero()) return {r0, s0, t0};
    auto scale = inv(r0.lc());
    return {Poly::constant(F, scale) * r0, Poly::constant(F, scale) * s0,
            Poly::constant(F, scale) * t0};
}

inline Poly derivative(const Poly& a) {
    std::vector<FieldElem> c;
    const auto& F = a.field();
    for (size_t i = 1; i < a.coeffs().size(); ++i) {
        u64 k = i % F->p();
        c.push_back(F->from_int(k) * a.coeffs()[i]);
    }
    return Poly::from_coeffs(F, std::move(c));
}

inline Poly pow_mod(Poly base, u64 e, const Poly& m) {
    Poly r = Poly::one(base.field());
    base = base % m;
    while (e) {
        if (e & 1) r = (r * base) % m;
        base = (base * base) % m;
        e >>= 1;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Residue-ring helpers for F_q[t]/(n), n monic of positive degree (degree 0,
// the zero ring, is tolerated where noted).  Residues are canonical
// remainders.
// ---------------------------------------------------------------------------

inline Poly mod_n(const Poly& a, const Poly& n) {
    if (n.degree() == 0) return Poly::zero(a.field());  // zero ring
    return a % n;
}

inline Poly mul_mod(const Poly& a, const Poly& b, const Poly& n) { return mod_n(a * b, n); }

/// Inverse of a in F_q[t]/(n).  NotInvertible when gcd(a, n) != 1.
inline Poly inv_mod(const Poly& a, const Poly& n) {
    if (n.degree() == 0) return Poly::zero(a.field());  // zero ring: 0 is its own unit
    auto [g, u, v] = ext_gcd(mod_n(a, n), n);
    (void)v;
    if (g.degree() != 0) fail_input("NotInvertible", "residue is not a unit");
    return mod_n(u, n);
}

/// Integer encoding of a residue of degree < d over F_q: base-q digits are
/// coefficient values, low degree least significant.
inline u64 residue_value(const Poly& a, u64 q, int d) {
    u64 v = 0;
    for (int i = d - 1; i >= 0; --i) {
        u64 cv = 0;
        if (i <= a.degree()) {
            const auto& c = a.coeffs()[i].coords();
            u64 mul = 1;
            for (u64 x : c) {
                cv += x * mul;
                mul *= a.field()->p();
            }
        }
        v = v * q + cv;
    }
    return v;
}

/// Residue with the given integer encoding.
inline Poly residue_from_value(const FieldPtr& F, u64 q, int d, u64 v) {
    std::vector<FieldElem> c;
    for (int i = 0; i < d; ++i) {
        c.push_back(F->from_int(v % q));
        v /= q;
    }
    return Poly::from_coeffs(F, std::move(c));
}

// ---------------------------------------------------------------------------
// Factorization over any Field at desk scale.
// ---------------------------------------------------------------------------

namespace detail {

/// g -> g^p mod f, p the characteristic ((sum c_i X^i)^p = sum c_i^p X^{ip}).
inline Poly poly_pth_power_mod(const Poly& g, const Poly& f) {
    const auto& F = g.field();
    const u64 p = F->p();
    if (g.is_zero()) return g;
    std::vector<FieldElem> dil(static_cast<size_t>(g.degree()) * p + 1, F->zero());
    for (size_t i = 0; i < g.coeffs().size(); ++i)
        if (!g.coeffs()[i].is_zero()) dil[i * p] = frobenius(g.coeffs()[i]);
    return Poly::from_coeffs(F, std::move(dil)) % f;
}

/// g -> g^{|F|} mod f (iterated p-th power, |F| = p^e).
inline Poly poly_field_power_mod(Poly g, const Poly& f) {
    for (unsigned i = 0; i < g.field()->degree(); ++i) g = poly_pth_power_mod(g, f);
    return g;
}

/// p-th root of a field element: c^(p^(e-1)).
inline FieldElem pth_root(const FieldElem& c) {
    auto r = c;
    for (unsigned i = 0; i + 1 < c.field()->degree(); ++i) r = frobenius(r);
    return r;
}

/// Splits a monic squarefree product of degree-d irreducibles into its
/// factors, by trace maps to the prime field.  Deterministic for a fixed
/// input: the RNG seed is derived from the polynomial.
inline void equal_degree_split(const Poly& g, int d, std::vector<Poly>& out, Rng& rng) {
    if (g.degree() == d) {
        out.push_back(g);
        return;
    }
    const auto& F = g.field();
    const unsigned e = F->degree();
    const u64 p = F->p();
    for (int attempt = 0; attempt < 512; ++attempt) {
        // random u of degree < deg g
        std::vector<FieldElem> uc(g.degree());
        for (auto& c : uc) {
            std::vector<u64> v(e);
            for (auto& x : v) x = rng.below(p);
            c = F->from_coords(v);
        }
        Poly u = Poly::from_coeffs(F, std::move(uc));
        // absolute trace of u into F_p, computed mod g: factor roots live in
        // an extension of relative degree d, so the trace has e*d terms
        Poly term = u % g;
        Poly acc = term;
        for (unsigned i = 1; i < e * static_cast<unsigned>(d); ++i) {
            term = poly_pth_power_mod(term, g);
            acc = acc + term;
        }
        for (u64 c = 0; c < p; ++c) {
            Poly shifted = acc - Poly::constant(F, F->from_int(c));
            Poly h = gcd(g, shifted);
            if (h.degree() > 0 && h.degree() < g.degree()) {
                equal_degree_split(h, d, out, rng);
                equal_degree_split(g / h, d, out, rng);
                return;
            }
        }
    }
    fail_internal("equal-degree splitting did not converge");
}

}  // namespace detail

/// Canonical order on polynomials: by degree, then by coefficient sequence
/// value (low degree least significant).
inline bool poly_value_less(const Poly& a, const Poly& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    for (int i = a.degree(); i >= 0; --i) {
        if (value_less(a.coeffs()[i], b.coeffs()[i])) return true;
        if (value_less(b.coeffs()[i], a.coeffs()[i])) return false;
    }
    return false;
}

/// Full factorization of a nonzero polynomial into monic irreducible factors
/// with multiplicities, sorted canonically (the leading coefficient is the
/// caller's to keep).  Desk scale.
inline std::vector<std::pair<Poly, unsigned>> factor(const Poly& f0) {
    if (f0.is_zero()) fail_input("ZeroInput", "cannot factor the zero polynomial");
    const auto& F = f0.field();
    std::vector<std::pair<Poly, unsigned>> out;
    if (f0.degree() == 0) return out;

    // squarefree decomposition, characteristic aware
    std::map<unsigned, Poly> square_parts;  // multiplicity -> product of factors
    struct Item {
        Poly f;
        unsigned mult;
    };
    std::vector<Item> work{{monic(f0), 1}};
    while (!work.empty()) {
        auto [f, mult] = work.back();
        work.pop_back();
        if (f.degree() == 0) continue;
        Poly d = derivative(f);
        if (d.is_zero()) {
            // f = g(X^p): take the p-th root and re-queue with multiplicity*p
            const u64 p = F->p();
            std::vector<FieldElem> g;
            for (int i = 0; i <= f.degree(); i += static_cast<int>(p))
                g.push_back(detail::pth_root(f.coeffs()[i]));
            work.push_back({Poly::from_coeffs(F, std::move(g)), mult * static_cast<unsigned>(p)});
            continue;
        }
        Poly c = gcd(f, d);
        Poly sqfree = f / c;  // product of distinct irreducible factors of f
        // peel sqfree's factors off f to find their multiplicities
        unsigned i = 1;
        Poly rest = c;
        Poly cur = sqfree;
        while (cur.degree() > 0) {
            Poly next = gcd(cur, rest);
            Poly exact = cur / next;  // factors of multiplicity exactly i
            if (exact.degree() > 0) {
                auto it = square_parts.find(mult * i);
                if (it == square_parts.end())
                    square_parts.emplace(mult * i, exact);
                else
                    it->second = it->second * exact;
            }
            if (next.degree() > 0) rest = rest / next;
            cur = next;
            ++i;
            if (i > 4096) fail_internal("squarefree decomposition did not converge");
        }
        if (rest.degree() > 0) work.push_back({rest, mult});
    }

    // distinct-degree then equal-degree on each squarefree part
    for (auto& [mult, part] : square_parts) {
        Poly g = monic(part);
        Poly h = Poly::x(F) % g;
        int k = 0;
        while (g.degree() > 0) {
            ++k;
            if (2 * k > g.degree()) {
                out.emplace_back(g, mult);  // remaining part is irreducible
                break;
            }
            h = detail::poly_field_power_mod(h, g);
            Poly d = gcd(h - Poly::x(F), g);
            if (d.degree() > 0) {
                std::vector<Poly> split;
                Rng rng(derive_seed(0x65646673ULL,
                                    static_cast<u64>(d.degree()) * 1315423911ULL + k));
                detail::equal_degree_split(d, k, split, rng);
                for (auto& irr : split) out.emplace_back(irr, mult);
                g = g / d;
                h = h % g;
            }
        }
    }

    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return poly_value_less(a.first, b.first);
    });
    return out;
}

/// Minimal monic irreducible of degree d over F, candidates ordered by
/// coefficient-sequence value.
inline Poly min_irreducible(const FieldPtr& F, unsigned d) {
    if (d == 0) fail_input("DegreeZero", "irreducible polynomials have positive degree");
    u64 q = 1;
    for (unsigned i = 0; i < F->degree(); ++i) {
        q *= F->p();
        if (q > (1ULL << 40)) fail_cap("CapExceeded", "field too large for a modulus scan");
    }
    auto is_irreducible = [&](const Poly& f) {
        if (f.degree() == 1) return true;
        if (f.coeffs()[0].is_zero()) return false;
        Poly h = Poly::x(F) % f;
        for (int k = 1; 2 * k <= f.degree(); ++k) {
            h = detail::poly_field_power_mod(h, f);
            if (gcd(h - Poly::x(F), f).degree() != 0) return false;
        }
        return true;
    };
    // scan lower-coefficient counter in base q
    std::vector<u64> digits(d, 0);
    for (;;) {
        std::vector<FieldElem> c;
        c.reserve(d + 1);
        for (unsigned i = 0; i < d; ++i) c.push_back(F->from_int(digits[i]));
        c.push_back(F->one());
        Poly f = Poly::from_coeffs(F, std::move(c));
        if (is_irreducible(f)) return f;
        unsigned i = 0;
        for (; i < d; ++i) {
            if (++digits[i] < q) break;
            digits[i] = 0;
        }
        if (i == d) fail_internal("no irreducible polynomial of the requested degree");
    }
}

// ---------------------------------------------------------------------------
// Text form: sums of terms like "t^3", "2t", "1"; descending degree on
// output, any order on input.  Coefficients are integer-encoded field values
// in [0, q).
// ---------------------------------------------------------------------------

inline std::string Poly::to_string() const {
    if (is_zero()) return "0";
    std::string s;
    for (int i = degree(); i >= 0; --i) {
        const auto& c = c_[i];
        if (c.is_zero()) continue;
        u64 v = 0, mul = 1;
        for (u64 x : c.coords()) {
            v += x * mul;
            mul *= f_->p();
        }
        if (!s.empty()) s += "+";
        if (i == 0) {
            s += std::to_string(v);
        } else {
            if (v != 1) s += std::to_string(v);
            s += "t";
            if (i > 1) s += "^" + std::to_string(i);
        }
    }
    return s;
}

/// Parses the polynomial grammar over F ("t^2+t+1", "2t^3+1", "0", ...).
inline Poly parse_poly(const FieldPtr& F, const std::string& text) {
    u64 q = 1;
    for (unsigned i = 0; i < F->degree(); ++i) q *= F->p();
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    if (s.empty()) fail_input("ParseError", "empty polynomial");
    std::vector<FieldElem> coeffs;
    auto add_term = [&](u64 cv, size_t deg) {
        if (cv >= q) fail_input("ParseError", "coefficient out of range: " + std::to_string(cv));
        if (coeffs.size() <= deg) coeffs.resize(deg + 1, F->zero());
        coeffs[deg] = coeffs[deg] + F->from_int(cv);
    };
    size_t i = 0;
    while (i < s.size()) {
        if (!coeffs.empty() || i > 0) {
            if (s[i] == '+') {
                ++i;
                if (i >= s.size()) fail_input("ParseError", "dangling '+'");
            } else if (i > 0) {
                fail_input("ParseError", std::string("expected '+' at '") + s[i] + "'");
            }
        }
        u64 cv = 1;
        bool saw_digits = false;
        if (std::isdigit(static_cast<unsigned char>(s[i]))) {
            cv = 0;
            saw_digits = true;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
                cv = cv * 10 + static_cast<u64>(s[i] - '0');
                if (cv > (1ULL << 40)) fail_input("ParseError", "coefficient too large");
                ++i;
            }
        }
        if (i < s.size() && s[i] == 't') {
            ++i;
            size_t deg = 1;
            if (i < s.size() && s[i] == '^') {
                ++i;
                if (i >= s.size() || !std::isdigit(static_cast<unsigned char>(s[i])))
                    fail_input("ParseError", "missing exponent after '^'");
                deg = 0;
                while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) {
                    deg = deg * 10 + static_cast<size_t>(s[i] - '0');
                    if (deg > 4096) fail_input("ParseError", "exponent too large");
                    ++i;
                }
            }
            add_term(cv, deg);
        } else if (saw_digits) {
            add_term(cv, 0);
        } else {
            fail_input("ParseError", std::string("unexpected character '") + s[i] + "'");
        }
    }
    return Poly::from_coeffs(F, std::move(coeffs));
}

}  // namespace dmod
