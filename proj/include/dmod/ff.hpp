#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "dmod/errors.hpp"
#include "dmod/rand.hpp"

namespace dmod {

using u64 = std::uint64_t;

namespace detail {

inline bool is_prime_u64(u64 n) {
    if (n < 2) return false;
    for (u64 d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

inline u64 inv_mod_prime(u64 a, u64 p) {
    // extended Euclid; a nonzero mod p
    long long t = 0, newt = 1;
    long long r = static_cast<long long>(p), newr = static_cast<long long>(a % p);
    while (newr != 0) {
        long long q = r / newr;
        long long tmp = t - q * newt;
        t = newt;
        newt = tmp;
        tmp = r - q * newr;
        r = newr;
        newr = tmp;
    }
    if (r != 1) fail_internal("inverse of a noninvertible residue requested");
    if (t < 0) t += static_cast<long long>(p);
    return static_cast<u64>(t);
}

// ---------------------------------------------------------------------------
// Polynomials over the prime field: vectors of u64 in [0, p), low degree
// first.  Only what field construction needs; the public polynomial type
// lives elsewhere.
// ---------------------------------------------------------------------------

inline void fp_trim(std::vector<u64>& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline int fp_deg(const std::vector<u64>& a) { return static_cast<int>(a.size()) - 1; }

inline std::vector<u64> fp_add(const std::vector<u64>& a, const std::vector<u64>& b, u64 p) {
    std::vector<u64> r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) {
        u64 x = (i < a.size() ? a[i] : 0) + (i < b.size() ? b[i] : 0);
        r[i] = x % p;
    }
    fp_trim(r);
    return r;
}

inline std::vector<u64> fp_sub(const std::vector<u64>& a, const std::vector<u64>& b, u64 p) {
    std::vector<u64> r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) {
        u64 x = (i < a.size() ? a[i] : 0) + p - (i < b.size() ? b[i] : 0);
        r[i] = x % p;
    }
    fp_trim(r);
    return r;
}

inline std::vector<u64> fp_mul(const std::vector<u64>& a, const std::vector<u64>& b, u64 p) {
    if (a.empty() || b.empty()) return {};
    std::vector<u64> r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % p;
    }
    fp_trim(r);
    return r;
}

// remainder of a by monic f
inline std::vector<u64> fp_mod(std::vector<u64> a, const std::vector<u64>& f, u64 p) {
    fp_trim(a);
    const int df = fp_deg(f);
    while (fp_deg(a) >= df) {
        const u64 c = a.back();
        const size_t shift = a.size() - f.size();
        if (c != 0)
            for (size_t i = 0; i < f.size(); ++i)
                a[shift + i] = (a[shift + i] + (p - f[i] % p) * c) % p;
        fp_trim(a);
    }
    return a;
}

inline std::vector<u64> fp_monic(std::vector<u64> a, u64 p) {
    fp_trim(a);
    if (a.empty()) return a;
    const u64 inv = inv_mod_prime(a.back(), p);
    for (auto& c : a) c = c * inv % p;
    return a;
}

inline std::vector<u64> fp_gcd(std::vector<u64> a, std::vector<u64> b, u64 p) {
    fp_trim(a);
    fp_trim(b);
    while (!b.empty()) {
        auto r = fp_mod(a, fp_monic(b, p), p);
        a = std::move(b);
        b = std::move(r);
    }
    return fp_monic(a, p);
}

// g(X) -> g(X)^p mod f.  Coefficients live in F_p, so c^p = c and the p-th
// power is just exponent dilation.
inline std::vector<u64> fp_pth_power_mod(const std::vector<u64>& g, const std::vector<u64>& f,
                                         u64 p) {
    std::vector<u64> dil;
    dil.resize(g.empty() ? 0 : (g.size() - 1) * p + 1, 0);
    for (size_t i = 0; i < g.size(); ++i)
        if (g[i]) dil[i * p] = g[i];
    return fp_mod(std::move(dil), f, p);
}

// Irreducibility over F_p via a distinct-degree sieve: f of degree e is
// irreducible iff it has no factor of degree <= e/2.  Early exit on the first
// small-degree factor keeps the minimal-modulus scan cheap.
inline bool fp_is_irreducible(const std::vector<u64>& f, u64 p) {
    const int e = fp_deg(f);
    if (e <= 0) return false;
    if (e == 1) return true;
    if (f[0] == 0) return false;  // divisible by X
    std::vector<u64> h = {0, 1};  // X
    for (int k = 1; 2 * k <= e; ++k) {
        h = fp_pth_power_mod(h, f, p);  // X^{p^k} mod f
        auto g = fp_gcd(fp_sub(h, {0, 1}, p), f, p);
        if (fp_deg(g) != 0) return false;
    }
    return true;
}

// Minimal monic irreducible of degree e over F_p: candidates ordered by the
// lower-coefficient sequence read as a base-p integer.
inline std::vector<u64> minimal_irreducible_fp(u64 p, unsigned e) {
    std::vector<u64> f(e + 1, 0);
    f[e] = 1;
    for (;;) {
        if (fp_is_irreducible(f, p)) return f;
        // increment base-p counter in f[0..e-1]
        unsigned i = 0;
        for (; i < e; ++i) {
            if (++f[i] < p) break;
            f[i] = 0;
        }
        if (i == e) fail_internal("no irreducible polynomial found in a full scan");
    }
}

}  // namespace detail

class Field;
using FieldPtr = std::shared_ptr<const Field>;

/// Element of a finite field: coordinate vector over F_p with respect to the
/// power basis of the field's canonical modulus, low degree first.
class FieldElem {
public:
    FieldElem() = default;

    const FieldPtr& field() const { return f_; }
    const std::vector<u64>& coords() const { return c_; }
    bool valid() const { return static_cast<bool>(f_); }
    bool is_zero() const;

    std::string to_string() const;

private:
    friend class Field;
    FieldElem(FieldPtr f, std::vector<u64> c) : f_(std::move(f)), c_(std::move(c)) {}

    FieldPtr f_;
    std::vector<u64> c_;
};

/// Finite field F_{p^e}, represented as F_p[t] modulo the canonical modulus:
/// the minimal monic irreducible of degree e, ordered by the coefficient
/// sequence read as a base-p integer.  Two constructions with the same (p, e)
/// return the same shared instance, so identity is structural.
///
/// Instances are immutable after construction and safe to share between
/// threads.
class Field : public std::enable_shared_from_this<Field> {
public:
    /// Canonical field with p^e elements.  p must be prime, e >= 1.
    static FieldPtr get(u64 p, unsigned e) {
        if (!detail::is_prime_u64(p)) fail_input("NonPrime", "p = " + std::to_string(p));
        if (e == 0) fail_input("DegreeZero", "extension degree must be at least 1");
        std::lock_guard<std::mutex> lock(registry_mutex());
        auto key = std::make_pair(p, e);
        auto& reg = registry();
        auto it = reg.find(key);
        if (it != reg.end()) return it->second;
        auto f = FieldPtr(new Field(p, e));
        reg.emplace(key, f);
        return f;
    }

    /// Degree-m extension of `base` as an abstract field: the canonical field
    /// with |base|^m elements.  Embeddings between the two are canonical and
    /// cached; see `embed`.
    static FieldPtr extension(const FieldPtr& base, unsigned m) {
        if (m == 0) fail_input("DegreeZero", "relative extension degree must be at least 1");
        return get(base->p(), base->degree() * m);
    }

    u64 p() const { return p_; }
    unsigned degree() const { return e_; }
    const std::vector<u64>& modulus() const { return modulus_; }

    bool same(const Field& o) const { return p_ == o.p_ && e_ == o.e_; }

    /// True when q = p^d for some d dividing the degree, i.e. the field with q
    /// elements sits inside this one.  d is returned through `out_d`.
    bool subfield_degree(u64 q, unsigned* out_d = nullptr) const {
        if (q < 2) return false;
        u64 v = q;
        unsigned d = 0;
        while (v % p_ == 0) {
            v /= p_;
            ++d;
        }
        if (v != 1 || d == 0 || e_ % d != 0) return false;
        if (out_d) *out_d = d;
        return true;
    }

    // -- element construction ------------------------------------------------

    FieldElem zero() const { return make(std::vector<u64>(e_, 0)); }
    FieldElem one() const { return from_int(1); }

    /// Element whose coordinate sequence is the base-p expansion of v.
    FieldElem from_int(u64 v) const {
        std::vector<u64> c(e_, 0);
        for (unsigned i = 0; i < e_ && v; ++i) {
            c[i] = v % p_;
            v /= p_;
        }
        if (v) fail_input("ValueOutOfRange", "integer does not fit in the field");
        return make(std::move(c));
    }

    FieldElem from_coords(std::vector<u64> c) const {
        if (c.size() > e_) {
            for (size_t i = e_; i < c.size(); ++i)
                if (c[i] != 0) fail_input("ValueOutOfRange", "coordinate vector too long");
            c.resize(e_);
        }
        c.resize(e_, 0);
        for (auto& x : c) x %= p_;
        return make(std::move(c));
    }

    /// Class of t, the canonical generator.  Only meaningful for e >= 2.
    FieldElem gen() const {
        std::vector<u64> c(e_, 0);
        if (e_ >= 2) c[1] = 1;
        return make(std::move(c));
    }

    /// All field elements in canonical (integer-value) order.  Guarded: only
    /// for small fields.
    std::vector<FieldElem> elements() const {
        double bits = e_ * std::log2(static_cast<double>(p_));
        if (bits > 21) fail_cap("CapExceeded", "field too large to enumerate");
        u64 n = 1;
        for (unsigned i = 0; i < e_; ++i) n *= p_;
        std::vector<FieldElem> out;
        out.reserve(n);
        for (u64 v = 0; v < n; ++v) out.push_back(from_int(v));
        return out;
    }

    // -- arithmetic (raw coordinate vectors of length e) ---------------------

    std::vector<u64> add_vec(const std::vector<u64>& a, const std::vector<u64>& b) const {
        std::vector<u64> r(e_);
        for (unsigned i = 0; i < e_; ++i) r[i] = (a[i] + b[i]) % p_;
        return r;
    }

    std::vector<u64> sub_vec(const std::vector<u64>& a, const std::vector<u64>& b) const {
        std::vector<u64> r(e_);
        for (unsigned i = 0; i < e_; ++i) r[i] = (a[i] + p_ - b[i]) % p_;
        return r;
    }

    std::vector<u64> mul_vec(const std::vector<u64>& a, const std::vector<u64>& b) const {
        if (e_ == 1) return {a[0] * b[0] % p_};
        std::vector<u64> prod(2 * e_ - 1, 0);
        for (unsigned i = 0; i < e_; ++i) {
            if (a[i] == 0) continue;
            for (unsigned j = 0; j < e_; ++j)
                prod[i + j] = (prod[i + j] + a[i] * b[j]) % p_;
        }
        // fold degrees e .. 2e-2 down with the precomputed reduction rows
        std::vector<u64> r(prod.begin(), prod.begin() + e_);
        for (unsigned k = e_; k < 2 * e_ - 1; ++k) {
            const u64 c = prod[k];
            if (c == 0) continue;
            const auto& row = red_rows_[k - e_];
            for (unsigned i = 0; i < e_; ++i) r[i] = (r[i] + c * row[i]) % p_;
        }
        return r;
    }

    std::vector<u64> inv_vec(const std::vector<u64>& a) const {
        std::vector<u64> av(a);
        detail::fp_trim(av);
        if (av.empty()) fail_input("DivisionByZero", "inverse of zero");
        // extended Euclid in F_p[t] against the modulus
        std::vector<u64> r0 = modulus_, r1 = av;
        std::vector<u64> s0 = {}, s1 = {1};
        while (!r1.empty()) {
            // divide r0 by r1
            std::vector<u64> q;
            std::vector<u64> rem = r0;
            detail::fp_trim(rem);
            const int d1 = detail::fp_deg(r1);
            const u64 lead_inv = detail::inv_mod_prime(r1.back(), p_);
            while (detail::fp_deg(rem) >= d1) {
                const int shift = detail::fp_deg(rem) - d1;
                const u64 c = rem.back() * lead_inv % p_;
                if (static_cast<int>(q.size()) < shift + 1) q.resize(shift + 1, 0);
                q[shift] = (q[shift] + c) % p_;
                for (int i = 0; i <= d1; ++i)
                    rem[shift + i] = (rem[shift + i] + (p_ - r1[i] % p_) * c) % p_;
                detail::fp_trim(rem);
            }
            r0 = std::move(r1);
            r1 = std::move(rem);
            auto s2 = detail::fp_sub(s0, detail::fp_mul(q, s1, p_), p_);
            s0 = std::move(s1);
            s1 = std::move(s2);
        }
        // r0 = gcd (a constant, since the modulus is irreducible)
        if (detail::fp_deg(r0) != 0) fail_internal("modulus not irreducible");
        const u64 scale = detail::inv_mod_prime(r0[0], p_);
        std::vector<u64> out(e_, 0);
        for (size_t i = 0; i < s0.size(); ++i) out[i] = s0[i] * scale % p_;
        return out;
    }

    /// x -> x^p via the precomputed Frobenius matrix.
    std::vector<u64> frob_vec(const std::vector<u64>& a) const {
        std::vector<u64> r(e_, 0);
        for (unsigned j = 0; j < e_; ++j) {
            if (a[j] == 0) continue;
            const auto& col = frob_cols_[j];
            for (unsigned i = 0; i < e_; ++i) r[i] = (r[i] + a[j] * col[i]) % p_;
        }
        return r;
    }

private:
    Field(u64 p, unsigned e) : p_(p), e_(e) {
        modulus_ = detail::minimal_irreducible_fp(p, e);
        // reduction rows: X^{e+i} mod modulus for i in [0, e-2]
        if (e_ >= 2) {
            red_rows_.reserve(e_ - 1);
            std::vector<u64> cur(modulus_.begin(), modulus_.begin() + e_);
            for (auto& c : cur) c = (p_ - c % p_) % p_;  // X^e = -(lower part)
            red_rows_.push_back(cur);
            for (unsigned i = 1; i + 1 < e_; ++i) {
                // multiply previous row by X and reduce
                std::vector<u64> nxt(e_, 0);
                const auto& prev = red_rows_.back();
                for (unsigned k = 0; k + 1 < e_; ++k) nxt[k + 1] = prev[k];
                const u64 top = prev[e_ - 1];
                if (top) {
                    const auto& r0 = red_rows_[0];
                    for (unsigned k = 0; k < e_; ++k) nxt[k] = (nxt[k] + top * r0[k]) % p_;
                }
                red_rows_.push_back(std::move(nxt));
            }
        }
        // Frobenius columns: coords of X^{jp} mod modulus
        frob_cols_.resize(e_);
        std::vector<u64> xp{0, 1};
        xp = detail::fp_pth_power_mod(xp, modulus_, p_);  // X^p mod f
        std::vector<u64> cur = {1};
        for (unsigned j = 0; j < e_; ++j) {
            std::vector<u64> col(e_, 0);
            for (size_t i = 0; i < cur.size(); ++i) col[i] = cur[i];
            frob_cols_[j] = std::move(col);
            if (j + 1 < e_) cur = detail::fp_mod(detail::fp_mul(cur, xp, p_), modulus_, p_);
        }
    }

    FieldElem make(std::vector<u64> c) const {
        return FieldElem(shared_from_this(), std::move(c));
    }

    static std::mutex& registry_mutex() {
        static std::mutex m;
        return m;
    }
    static std::map<std::pair<u64, unsigned>, FieldPtr>& registry() {
        static std::map<std::pair<u64, unsigned>, FieldPtr> r;
        return r;
    }

    u64 p_;
    unsigned e_;
    std::vector<u64> modulus_;
    std::vector<std::vector<u64>> red_rows_;
    std::vector<std::vector<u64>> frob_cols_;
};

inline bool FieldElem::is_zero() const {
    for (u64 x : c_)
        if (x) return false;
    return true;
}

inline std::string FieldElem::to_string() const {
    std::string s = "[";
    for (size_t i = 0; i < c_.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(c_[i]);
    }
    return s + "]";
}

// ---------------------------------------------------------------------------
// Embeddings.  The image of a subfield generator is the minimal root (in
// coordinate order) of the subfield modulus, refined so that choices for the
// whole divisor lattice of the top degree are mutually compatible; embeddings
// along any chain of subfields therefore compose.
// ---------------------------------------------------------------------------

FieldElem embed(const FieldElem& x, const FieldPtr& target);

namespace detail {

// polynomial helpers over an arbitrary Field (coefficients are coordinate
// vectors); low degree first, used only by the embedding root finder

using XPolyV = std::vector<std::vector<u64>>;

inline void xp_trim(const Field& K, XPolyV& a) {
    auto zero = [&](const std::vector<u64>& v) {
        for (u64 x : v)
            if (x) return false;
        return true;
    };
    while (!a.empty() && zero(a.back())) a.pop_back();
    (void)K;
}

inline XPolyV xp_mod(const Field& K, XPolyV a, const XPolyV& f) {
    // f monic
    xp_trim(K, a);
    while (a.size() >= f.size() && !f.empty()) {
        auto c = a.back();
        const size_t shift = a.size() - f.size();
        bool cz = true;
        for (u64 x : c)
            if (x) cz = false;
        if (!cz) {
            for (size_t i = 0; i + 1 < f.size(); ++i) {
                auto prod = K.mul_vec(c, f[i]);
                a[shift + i] = K.sub_vec(a[shift + i], prod);
            }
        }
        a.resize(a.size() - 1);
        xp_trim(K, a);
    }
    return a;
}

inline XPolyV xp_mul_mod(const Field& K, const XPolyV& a, const XPolyV& b, const XPolyV& f) {
    if (a.empty() || b.empty()) return {};
    XPolyV r(a.size() + b.size() - 1, std::vector<u64>(K.degree(), 0));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            r[i + j] = K.add_vec(r[i + j], K.mul_vec(a[i], b[j]));
    return xp_mod(K, std::move(r), f);
}

inline XPolyV xp_pth_power_mod(const Field& K, const XPolyV& g, const XPolyV& f) {
    // (sum c_i X^i)^p = sum c_i^p X^{ip}
    const u64 p = K.p();
    if (g.empty()) return {};
    XPolyV dil((g.size() - 1) * p + 1, std::vector<u64>(K.degree(), 0));
    for (size_t i = 0; i < g.size(); ++i) dil[i * p] = K.frob_vec(g[i]);
    return xp_mod(K, std::move(dil), f);
}

inline XPolyV xp_gcd(const Field& K, XPolyV a, XPolyV b) {
    xp_trim(K, a);
    xp_trim(K, b);
    while (!b.empty()) {
        // make b monic
        auto lead = b.back();
        auto inv = K.inv_vec(lead);
        for (auto& c : b) c = K.mul_vec(c, inv);
        auto r = xp_mod(K, a, b);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        auto inv = K.inv_vec(a.back());
        for (auto& c : a) c = K.mul_vec(c, inv);
    }
    return a;
}

// All roots in K of a squarefree monic polynomial that splits completely over
// K (the use case: canonical modulus of a subfield).  Trace-map splitting;
// the RNG is seeded from (p, deg K, deg f) so the set and its order are
// reproducible, and the result is sorted canonically anyway.
inline std::vector<std::vector<u64>> xp_roots_of_split(const Field& K, const XPolyV& f0) {
    std::vector<std::vector<u64>> roots;
    std::vector<XPolyV> stack{f0};
    Rng rng(derive_seed(0x66656d62ULL, K.p() * 1000003ULL + K.degree() * 1009ULL +
                                          f0.size()));
    int guard = 0;
    while (!stack.empty()) {
        XPolyV g = std::move(stack.back());
        stack.pop_back();
        xp_trim(K, g);
        if (g.size() <= 1) continue;
        if (g.size() == 2) {
            // monic X + c -> root -c
            auto inv = K.inv_vec(g[1]);
            auto root = K.mul_vec(g[0], inv);
            root = K.sub_vec(std::vector<u64>(K.degree(), 0), root);
            roots.push_back(std::move(root));
            continue;
        }
        if (++guard > 4096) fail_internal("root splitting did not converge");
        // random u of degree < deg g, absolute trace T(u) mod g
        XPolyV u(g.size() - 1);
        for (auto& c : u) {
            c.assign(K.degree(), 0);
            for (auto& x : c) x = rng.below(K.p());
        }
        XPolyV term = xp_mod(K, u, g);
        XPolyV acc = term;
        for (unsigned i = 1; i < K.degree(); ++i) {
            term = xp_pth_power_mod(K, term, g);
            if (acc.size() < term.size()) acc.resize(term.size(), std::vector<u64>(K.degree(), 0));
            for (size_t j = 0; j < term.size(); ++j) acc[j] = K.add_vec(acc[j], term[j]);
        }
        bool split = false;
        for (u64 c = 0; c < K.p() && !split; ++c) {
            XPolyV shifted = acc;
            if (shifted.empty()) shifted.resize(1, std::vector<u64>(K.degree(), 0));
            std::vector<u64> cv(K.degree(), 0);
            cv[0] = c;
            shifted[0] = K.sub_vec(shifted[0], cv);
            auto h = xp_gcd(K, g, shifted);
            if (h.size() > 1 && h.size() < g.size()) {
                // divide g by h
                XPolyV q;
                XPolyV rem = g;
                xp_trim(K, rem);
                while (rem.size() >= h.size()) {
                    auto c2 = rem.back();
                    const size_t shift = rem.size() - h.size();
                    XPolyV part(shift + 1, std::vector<u64>(K.degree(), 0));
                    part[shift] = c2;
                    if (q.size() < part.size()) q.resize(part.size(), std::vector<u64>(K.degree(), 0));
                    for (size_t i = 0; i < part.size(); ++i) q[i] = K.add_vec(q[i], part[i]);
                    for (size_t i = 0; i < h.size(); ++i)
                        rem[shift + i] = K.sub_vec(rem[shift + i], K.mul_vec(c2, h[i]));
                    xp_trim(K, rem);
                }
                stack.push_back(std::move(h));
                stack.push_back(std::move(q));
                split = true;
            }
        }
        if (!split) stack.push_back(std::move(g));  // retry with a fresh u
    }
    return roots;
}

inline bool coords_value_less(const std::vector<u64>& a, const std::vector<u64>& b) {
    // compare as base-p integers: highest coordinate is most significant
    size_t n = std::max(a.size(), b.size());
    for (size_t i = n; i-- > 0;) {
        u64 x = i < a.size() ? a[i] : 0;
        u64 y = i < b.size() ? b[i] : 0;
        if (x != y) return x < y;
    }
    return false;
}

struct EmbedKey {
    u64 p;
    unsigned d, e;
    bool operator<(const EmbedKey& o) const {
        return std::tie(p, d, e) < std::tie(o.p, o.d, o.e);
    }
};

inline std::mutex& embed_mutex() {
    static std::mutex m;
    return m;
}

// generator image cache: (p, d, e) -> coords in F_{p^e} of the canonical
// image of the F_{p^d} generator
inline std::map<EmbedKey, std::vector<u64>>& gen_image_cache() {
    static std::map<EmbedKey, std::vector<u64>> c;
    return c;
}

std::vector<u64> gen_image_locked(u64 p, unsigned d, const FieldPtr& target);

// image in `target` of an element of F_{p^d} given the generator image
inline std::vector<u64> map_through(const FieldPtr& target, const std::vector<u64>& coords,
                                    const std::vector<u64>& gen_img) {
    const Field& K = *target;
    std::vector<u64> acc(K.degree(), 0);
    for (size_t i = coords.size(); i-- > 0;) {
        acc = K.mul_vec(acc, gen_img);
        std::vector<u64> cv(K.degree(), 0);
        cv[0] = coords[i] % K.p();
        acc = K.add_vec(acc, cv);
    }
    return acc;
}

inline std::vector<u64> gen_image_locked(u64 p, unsigned d, const FieldPtr& target) {
    EmbedKey key{p, d, target->degree()};
    auto& cache = gen_image_cache();
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    const Field& K = *target;
    if (d == target->degree()) {
        // the identity embedding
        std::vector<u64> g(K.degree(), 0);
        if (K.degree() >= 2) g[1] = 1;
        cache.emplace(key, g);
        return g;
    }

    // roots of the canonical degree-d modulus inside target
    auto sub = Field::get(p, d);
    XPolyV f(sub->modulus().size());
    for (size_t i = 0; i < f.size(); ++i) {
        f[i].assign(K.degree(), 0);
        f[i][0] = sub->modulus()[i] % p;
    }
    auto roots = xp_roots_of_split(K, f);
    check_internal(roots.size() == d, "subfield modulus did not split completely");
    std::sort(roots.begin(), roots.end(), coords_value_less);

    // pick the minimal root compatible with every proper subfield choice
    for (const auto& z : roots) {
        bool ok = true;
        for (unsigned d0 = 2; d0 < d && ok; ++d0) {
            if (d % d0 != 0) continue;
            // canonical image of the F_{p^{d0}} generator inside F_{p^d} ...
            auto inner = gen_image_locked(p, d0, sub);
            // ... pushed forward through the candidate root ...
            auto pushed = map_through(target, inner, z);
            // ... must equal the canonical image inside target.
            auto direct = gen_image_locked(p, d0, target);
            if (pushed != direct) ok = false;
        }
        if (ok) {
            cache.emplace(key, z);
            return z;
        }
    }
    fail_internal("no compatible root for a subfield embedding");
}

}  // namespace detail

/// Canonical embedding of x into `target`.  Requires |field(x)| to divide
/// |target| (same characteristic, degree dividing); otherwise FieldMismatch.
/// The map is a ring homomorphism, deterministic, and compatible with
/// composition along towers of subfields.
inline FieldElem embed(const FieldElem& x, const FieldPtr& target) {
    if (!x.valid()) fail_internal("embedding an uninitialized element");
    const FieldPtr& src = x.field();
    if (src->same(*target)) return target->from_coords(x.coords());
    if (src->p() != target->p() || target->degree() % src->degree() != 0)
        fail_input("FieldMismatch", "no embedding between these fields");
    std::lock_guard<std::mutex> lock(detail::embed_mutex());
    auto gen = detail::gen_image_locked(src->p(), src->degree(), target);
    auto img = detail::map_through(target, x.coords(), gen);
    return target->from_coords(std::move(img));
}

// ---------------------------------------------------------------------------
// Element operations.  Binary operations unify operands: if one field sits
// inside the other, the smaller element is embedded first; incompatible
// fields raise FieldMismatch.
// ---------------------------------------------------------------------------

namespace detail {

inline void unify(FieldElem& a, FieldElem& b) {
    if (!a.valid() || !b.valid()) fail_internal("operation on an uninitialized element");
    const FieldPtr& fa = a.field();
    const FieldPtr& fb = b.field();
    if (fa->same(*fb)) return;
    if (fa->p() == fb->p()) {
        if (fb->degree() % fa->degree() == 0) {
            a = embed(a, fb);
            return;
        }
        if (fa->degree() % fb->degree() == 0) {
            b = embed(b, fa);
            return;
        }
    }
    fail_input("FieldMismatch", "elements of incompatible fields");
}

}  // namespace detail

inline FieldElem operator+(FieldElem a, FieldElem b) {
    detail::unify(a, b);
    return a.field()->from_coords(a.field()->add_vec(a.coords(), b.coords()));
}

inline FieldElem operator-(FieldElem a, FieldElem b) {
    detail::unify(a, b);
    return a.field()->from_coords(a.field()->sub_vec(a.coords(), b.coords()));
}

inline FieldElem operator-(const FieldElem& a) {
    return a.field()->from_coords(
        a.field()->sub_vec(std::vector<u64>(a.field()->degree(), 0), a.coords()));
}

inline FieldElem operator*(FieldElem a, FieldElem b) {
    detail::unify(a, b);
    return a.field()->from_coords(a.field()->mul_vec(a.coords(), b.coords()));
}

inline FieldElem inv(const FieldElem& a) {
    return a.field()->from_coords(a.field()->inv_vec(a.coords()));
}

inline FieldElem operator/(FieldElem a, FieldElem b) {
    detail::unify(a, b);
    return a * inv(b);
}

inline bool operator==(FieldElem a, FieldElem b) {
    detail::unify(a, b);
    return a.coords() == b.coords();
}

inline bool operator!=(const FieldElem& a, const FieldElem& b) { return !(a == b); }

/// x^k with a plain machine-word exponent (desk scale throughout).
inline FieldElem pow(FieldElem x, u64 k) {
    FieldElem r = x.field()->one();
    while (k) {
        if (k & 1) r = r * x;
        x = x * x;
        k >>= 1;
    }
    return r;
}

/// x -> x^p (absolute Frobenius).
inline FieldElem frobenius(const FieldElem& x) {
    return x.field()->from_coords(x.field()->frob_vec(x.coords()));
}

/// x -> x^{q^k} where q = p^d is the size of a subfield of x's field.
/// NotASubfield when q is not such a size.
inline FieldElem frobenius_power(const FieldElem& x, u64 q, u64 k) {
    unsigned d = 0;
    if (!x.field()->subfield_degree(q, &d))
        fail_input("NotASubfield", "q = " + std::to_string(q) + " is not a subfield size");
    const unsigned e = x.field()->degree();
    u64 steps = (d * (k % e)) % e;
    auto c = x.coords();
    for (u64 i = 0; i < steps; ++i) c = x.field()->frob_vec(c);
    return x.field()->from_coords(std::move(c));
}

/// Value order: coordinate sequence read as a base-p integer.
inline bool value_less(const FieldElem& a, const FieldElem& b) {
    return detail::coords_value_less(a.coords(), b.coords());
}

/// Multiplicative order of a nonzero element, by iteration (desk scale).
inline u64 mult_order(const FieldElem& x, u64 cap = 2000000) {
    if (x.is_zero()) fail_input("ZeroInput", "order of zero is undefined");
    FieldElem y = x;
    FieldElem one = x.field()->one();
    for (u64 n = 1; n <= cap; ++n) {
        if (y == one) return n;
        y = y * x;
    }
    fail_cap("CapExceeded", "multiplicative order exceeds cap");
}

/// Compact stable key for hashing/sorting (decimal coords, comma separated).
inline std::string elem_key(const FieldElem& x) { return x.to_string(); }

}  // namespace dmod
