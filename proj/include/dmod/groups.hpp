#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "dmod/poly.hpp"

namespace dmod {

using u32 = std::uint32_t;

/// Square matrix over F_q[t]/(n), n monic of positive degree; entries are
/// canonical residues.
class ResidueMatrix {
public:
    ResidueMatrix() = default;

    static ResidueMatrix identity(const FieldPtr& Fq, const Poly& n, unsigned r) {
        ResidueMatrix m = zero(Fq, n, r);
        for (unsigned i = 0; i < r; ++i) m.e_[i * r + i] = mod_n(Poly::one(Fq), n);
        return m;
    }

    static ResidueMatrix zero(const FieldPtr& Fq, const Poly& n, unsigned r) {
        check_modulus(Fq, n, r);
        ResidueMatrix m;
        m.Fq_ = Fq;
        m.n_ = n;
        m.r_ = r;
        m.e_.assign(static_cast<size_t>(r) * r, Poly::zero(Fq));
        return m;
    }

    static ResidueMatrix from_entries(const FieldPtr& Fq, const Poly& n, unsigned r,
                                      std::vector<Poly> entries) {
        check_modulus(Fq, n, r);
        if (entries.size() != static_cast<size_t>(r) * r)
            fail_input("ShapeMismatch", "matrix needs r*r entries");
        ResidueMatrix m;
        m.Fq_ = Fq;
        m.n_ = n;
        m.r_ = r;
        m.e_.reserve(entries.size());
        for (auto& x : entries) {
            if (!x.field()->same(*Fq)) fail_input("FieldMismatch", "entry over the wrong field");
            m.e_.push_back(mod_n(x, n));
        }
        return m;
    }

    const FieldPtr& base_field() const { return Fq_; }
    const Poly& modulus() const { return n_; }
    unsigned dim() const { return r_; }
    const Poly& at(unsigned i, unsigned j) const { return e_[i * r_ + j]; }

    bool operator==(const ResidueMatrix& o) const {
        if (r_ != o.r_ || n_ != o.n_) return false;
        for (size_t k = 0; k < e_.size(); ++k)
            if (!(e_[k] == o.e_[k])) return false;
        return true;
    }
    bool operator!=(const ResidueMatrix& o) const { return !(*this == o); }

    /// Stable text key (entry residue values in row-major order).
    std::string key() const {
        const u64 q = field_size();
        std::string s;
        for (const auto& x : e_) {
            s += std::to_string(residue_value(x, q, n_.degree()));
            s += ',';
        }
        return s;
    }

    ResidueMatrix add(const ResidueMatrix& o) const {
        check_same(o);
        ResidueMatrix out = *this;
        for (size_t k = 0; k < e_.size(); ++k) out.e_[k] = mod_n(e_[k] + o.e_[k], n_);
        return out;
    }

    /// Scalar multiple by a residue.
    ResidueMatrix scale(const Poly& c) const {
        if (!c.field()->same(*Fq_)) fail_input("FieldMismatch", "scalar over the wrong field");
        ResidueMatrix out = *this;
        for (size_t k = 0; k < e_.size(); ++k) out.e_[k] = mod_n(e_[k] * c, n_);
        return out;
    }

    ResidueMatrix mul(const ResidueMatrix& o) const {
        check_same(o);
        ResidueMatrix out = zero(Fq_, n_, r_);
        for (unsigned i = 0; i < r_; ++i)
            for (unsigned k = 0; k < r_; ++k) {
                const Poly& a = at(i, k);
                if (a.is_zero()) continue;
                for (unsigned j = 0; j < r_; ++j) {
                    const Poly& b = o.at(k, j);
                    if (b.is_zero()) continue;
                    out.e_[i * r_ + j] = mod_n(out.e_[i * r_ + j] + a * b, n_);
                }
            }
        return out;
    }

    ResidueMatrix pow(u64 k) const {
        auto acc = identity(Fq_, n_, r_);
        auto base = *this;
        while (k) {
            if (k & 1) acc = acc.mul(base);
            base = base.mul(base);
            k >>= 1;
        }
        return acc;
    }

    Poly det() const {
        std::vector<size_t> rows(r_), cols(r_);
        for (unsigned i = 0; i < r_; ++i) rows[i] = cols[i] = i;
        return det_rec(rows, cols);
    }

    bool is_invertible() const { return gcd(det(), n_).degree() == 0; }

    /// Inverse through the adjugate; the determinant must be a unit.
    ResidueMatrix inverse() const {
        Poly d = det();
        Poly di = inv_mod(d, n_);  // throws NotInvertible when det is not a unit
        ResidueMatrix out = zero(Fq_, n_, r_);
        for (unsigned i = 0; i < r_; ++i)
            for (unsigned j = 0; j < r_; ++j) {
                // cofactor expansion: adj(i, j) = (-1)^(i+j) * minor(j, i)
                std::vector<size_t> rows, cols;
                for (unsigned k = 0; k < r_; ++k) {
                    if (k != j) rows.push_back(k);
                    if (k != i) cols.push_back(k);
                }
                Poly m = det_rec(rows, cols);
                if ((i + j) % 2 == 1) m = Poly::zero(Fq_) - m;
                out.e_[i * r_ + j] = mod_n(m * di, n_);
            }
        return out;
    }

    /// Multiplicative order (the matrix must be invertible).
    u64 order(u64 cap = 2000000) const {
        auto id = identity(Fq_, n_, r_);
        auto x = *this;
        for (u64 k = 1; k <= cap; ++k) {
            if (x == id) return k;
            x = x.mul(*this);
        }
        fail_cap("CapExceeded", "matrix order exceeds the cap");
    }

    u64 field_size() const {
        u64 s = 1;
        for (unsigned i = 0; i < Fq_->degree(); ++i) s *= Fq_->p();
        return s;
    }

private:
    static void check_modulus(const FieldPtr& Fq, const Poly& n, unsigned r) {
        if (r == 0) fail_input("ShapeMismatch", "matrices need positive dimension");
        if (!n.field()->same(*Fq)) fail_input("FieldMismatch", "modulus over the wrong field");
        if (n.degree() < 1 || !n.is_monic())
            fail_input("InvalidModulus", "modulus must be monic of positive degree");
    }
    void check_same(const ResidueMatrix& o) const {
        if (r_ != o.r_ || n_ != o.n_ || !Fq_->same(*o.Fq_))
            fail_input("ShapeMismatch", "matrices live over different rings");
    }

    Poly det_rec(const std::vector<size_t>& rows, const std::vector<size_t>& cols) const {
        if (rows.empty()) return Poly::one(Fq_);
        if (rows.size() == 1) return at(rows[0], cols[0]);
        Poly acc = Poly::zero(Fq_);
        std::vector<size_t> sub_rows(rows.begin() + 1, rows.end());
        for (size_t j = 0; j < cols.size(); ++j) {
            const Poly& a = at(rows[0], cols[j]);
            if (a.is_zero()) continue;
            std::vector<size_t> sub_cols;
            for (size_t k = 0; k < cols.size(); ++k)
                if (k != j) sub_cols.push_back(cols[k]);
            Poly term = a * det_rec(sub_rows, sub_cols);
            if (j % 2 == 1) term = Poly::zero(Fq_) - term;
            acc = acc + term;
        }
        return mod_n(acc, n_);
    }

    FieldPtr Fq_;
    Poly n_;
    unsigned r_ = 0;
    std::vector<Poly> e_;
};

// ---------------------------------------------------------------------------
// Orders by formula.
// ---------------------------------------------------------------------------

namespace detail {

inline u64 upow(u64 b, u64 e) {
    u64 r = 1;
    while (e--) {
        check_internal(r <= ~0ULL / b, "order overflows 64 bits");
        r *= b;
    }
    return r;
}

}  // namespace detail

/// |GL_r(F_q[t]/(n))| by the product formula over the factorization of n.
inline u64 gl_order(const FieldPtr& Fq, unsigned r, const Poly& n) {
    if (n.degree() < 1 || !n.is_monic())
        fail_input("InvalidModulus", "modulus must be monic of positive degree");
    u64 q = 1;
    for (unsigned i = 0; i < Fq->degree(); ++i) q *= Fq->p();
    u64 total = 1;
    for (const auto& [P, a] : factor(n)) {
        const u64 Q = detail::upow(q, static_cast<u64>(P.degree()));
        u64 local = detail::upow(Q, static_cast<u64>(a - 1) * r * r);
        u64 Qr = detail::upow(Q, r);
        u64 Qi = 1;
        for (unsigned i = 0; i < r; ++i) {
            local *= Qr - Qi;
            Qi *= Q;
        }
        check_internal(total <= ~0ULL / local, "order overflows 64 bits");
        total *= local;
    }
    return total;
}

/// Number of units of F_q[t]/(n) (n monic, positive degree).
inline u64 residue_unit_count(const FieldPtr& Fq, const Poly& n) {
    return gl_order(Fq, 1, n);
}

/// |SL_r(F_q[t]/(n))|: the determinant maps GL onto the units.
inline u64 sl_order(const FieldPtr& Fq, unsigned r, const Poly& n) {
    return gl_order(Fq, r, n) / residue_unit_count(Fq, n);
}

// ---------------------------------------------------------------------------
// Enumeration.
// ---------------------------------------------------------------------------

/// All invertible r x r matrices over F_q[t]/(n), in entry-counter order.
/// `sl_only` keeps determinant one.  Candidate count q^(r^2 deg n) is capped.
inline std::vector<ResidueMatrix> enumerate_invertible(const FieldPtr& Fq, const Poly& n,
                                                       unsigned r, bool sl_only = false,
                                                       u64 candidate_cap = (1ULL << 21)) {
    if (n.degree() < 1 || !n.is_monic())
        fail_input("InvalidModulus", "modulus must be monic of positive degree");
    u64 q = 1;
    for (unsigned i = 0; i < Fq->degree(); ++i) q *= Fq->p();
    const int dn = n.degree();
    u64 res_count = detail::upow(q, static_cast<u64>(dn));
    u64 total = 1;
    for (unsigned k = 0; k < r * r; ++k) {
        if (total > candidate_cap / res_count + 1) fail_cap("CapExceeded", "too many candidates");
        total *= res_count;
    }
    if (total > candidate_cap) fail_cap("CapExceeded", "too many candidates");
    const Poly one = Poly::one(Fq);
    std::vector<ResidueMatrix> out;
    std::vector<u64> digits(static_cast<size_t>(r) * r, 0);
    for (u64 v = 0; v < total; ++v) {
        std::vector<Poly> entries;
        entries.reserve(digits.size());
        for (u64 dv : digits) entries.push_back(residue_from_value(Fq, q, dn, dv));
        auto m = ResidueMatrix::from_entries(Fq, n, r, std::move(entries));
        Poly d = m.det();
        const bool ok = sl_only ? d == one : gcd(d, n).degree() == 0;
        if (ok) out.push_back(std::move(m));
        for (size_t k = 0; k < digits.size(); ++k) {
            if (++digits[k] < res_count) break;
            digits[k] = 0;
        }
    }
    return out;
}

/// The subgroup of GL_r(F_q[t]/(t n)) of matrices congruent to the identity
/// mod t, enumerated as I + t B with B over F_q[t]/(n).  `sl_only` cuts to
/// determinant one.
inline std::vector<ResidueMatrix> kernel_subgroup(const FieldPtr& Fq, const Poly& n, unsigned r,
                                                  bool sl_only = false,
                                                  u64 candidate_cap = (1ULL << 21)) {
    if (n.degree() < 0 || !n.is_monic())
        fail_input("InvalidModulus", "level must be monic");
    u64 q = 1;
    for (unsigned i = 0; i < Fq->degree(); ++i) q *= Fq->p();
    const Poly t = Poly::x(Fq);
    const Poly tn = t * n;
    const int dn = n.degree();
    u64 res_count = detail::upow(q, static_cast<u64>(dn));
    u64 total = 1;
    for (unsigned k = 0; k < r * r; ++k) {
        if (total > candidate_cap / res_count + 1) fail_cap("CapExceeded", "too many candidates");
        total *= res_count;
    }
    if (total > candidate_cap) fail_cap("CapExceeded", "too many candidates");
    const Poly one = Poly::one(Fq);
    std::vector<ResidueMatrix> out;
    std::vector<u64> digits(static_cast<size_t>(r) * r, 0);
    for (u64 v = 0; v < total; ++v) {
        std::vector<Poly> entries;
        entries.reserve(digits.size());
        for (unsigned i = 0; i < r; ++i)
            for (unsigned j = 0; j < r; ++j) {
                Poly b = residue_from_value(Fq, q, dn, digits[i * r + j]);
                Poly e = t * b;
                if (i == j) e = e + one;
                entries.push_back(std::move(e));
            }
        auto m = ResidueMatrix::from_entries(Fq, tn, r, std::move(entries));
        Poly d = m.det();
        const bool ok = sl_only ? d == one : gcd(d, tn).degree() == 0;
        if (ok) out.push_back(std::move(m));
        for (size_t k = 0; k < digits.size(); ++k) {
            if (++digits[k] < res_count) break;
            digits[k] = 0;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Finite group combinatorics on a multiplication table.
// ---------------------------------------------------------------------------

/// A finite matrix group materialized as index arithmetic: elements,
/// multiplication table, inverses.  Index 0 is the identity.
class GroupTable {
public:
    /// Builds from a complete element list (must be closed under products).
    static GroupTable from_elements(std::vector<ResidueMatrix> elems, u64 cap = 4096) {
        if (elems.empty()) fail_input("EmptyInput", "a group needs elements");
        if (elems.size() > cap) fail_cap("CapExceeded", "group too large to tabulate");
        GroupTable g;
        // identity first
        auto id = ResidueMatrix::identity(elems[0].base_field(), elems[0].modulus(),
                                          elems[0].dim());
        std::stable_sort(elems.begin(), elems.end(),
                         [&](const ResidueMatrix& a, const ResidueMatrix& b) {
                             return (a == id) > (b == id);
                         });
        check_internal(elems[0] == id, "group does not contain the identity");
        g.elems_ = std::move(elems);
        for (u32 i = 0; i < g.elems_.size(); ++i) {
            auto [it, fresh] = g.index_.emplace(g.elems_[i].key(), i);
            (void)it;
            check_internal(fresh, "duplicate group element");
        }
        g.build_table();
        return g;
    }

    /// Closure of a generating set under multiplication.
    static GroupTable closure_of(const std::vector<ResidueMatrix>& gens, u64 cap = 4096) {
        if (gens.empty()) fail_input("EmptyInput", "a group needs generators");
        auto id = ResidueMatrix::identity(gens[0].base_field(), gens[0].modulus(),
                                          gens[0].dim());
        std::vector<ResidueMatrix> elems{id};
        std::unordered_map<std::string, u32> seen{{id.key(), 0}};
        std::deque<u32> queue{0};
        while (!queue.empty()) {
            u32 i = queue.front();
            queue.pop_front();
            for (const auto& gmat : gens) {
                auto y = elems[i].mul(gmat);
                auto k = y.key();
                if (seen.count(k)) continue;
                if (elems.size() >= cap) fail_cap("CapExceeded", "closure exceeds the cap");
                seen.emplace(std::move(k), static_cast<u32>(elems.size()));
                queue.push_back(static_cast<u32>(elems.size()));
                elems.push_back(std::move(y));
            }
        }
        return from_elements(std::move(elems), cap);
    }

    u32 size() const { return static_cast<u32>(elems_.size()); }
    u32 id() const { return 0; }
    u32 mul(u32 a, u32 b) const { return mul_[a * size() + b]; }
    u32 inv(u32 a) const { return inv_[a]; }
    const ResidueMatrix& elem(u32 i) const { return elems_[i]; }

    /// Index of a matrix; fails when it is outside the group.
    u32 index_of(const ResidueMatrix& m) const {
        auto it = index_.find(m.key());
        if (it == index_.end())
            fail_input("NotInGroup", "matrix does not belong to the group");
        return it->second;
    }
    bool contains(const ResidueMatrix& m) const { return index_.count(m.key()) != 0; }

    u64 element_order(u32 a) const {
        u64 k = 1;
        u32 x = a;
        while (x != 0) {
            x = mul(x, a);
            ++k;
        }
        return k;
    }

    /// Subgroup generated by the given indices, as a sorted index list.
    std::vector<u32> closure_indices(const std::vector<u32>& gens) const {
        std::vector<bool> in(size(), false);
        in[0] = true;
        std::deque<u32> queue{0};
        while (!queue.empty()) {
            u32 i = queue.front();
            queue.pop_front();
            for (u32 g : gens) {
                u32 y = mul(i, g);
                if (!in[y]) {
                    in[y] = true;
                    queue.push_back(y);
                }
            }
        }
        std::vector<u32> out;
        for (u32 i = 0; i < size(); ++i)
            if (in[i]) out.push_back(i);
        return out;
    }

    /// Conjugacy class of an element, as a sorted index list.
    std::vector<u32> conjugacy_class(u32 a) const {
        std::vector<bool> in(size(), false);
        for (u32 g = 0; g < size(); ++g) in[mul(mul(g, a), inv(g))] = true;
        std::vector<u32> out;
        for (u32 i = 0; i < size(); ++i)
            if (in[i]) out.push_back(i);
        return out;
    }

    /// The derived subgroup (generated by all commutators), as indices.
    std::vector<u32> derived_subgroup() const {
        std::unordered_set<u32> comms;
        for (u32 a = 0; a < size(); ++a)
            for (u32 b = 0; b < size(); ++b)
                comms.insert(mul(mul(inv(a), inv(b)), mul(a, b)));
        std::vector<u32> gens(comms.begin(), comms.end());
        return closure_indices(gens);
    }

    u64 abelianization_order() const { return size() / derived_subgroup().size(); }

    struct Subgroup {
        std::vector<u64> bits;   // membership bitset over element indices
        std::vector<u32> gens;   // a generating set
        u32 count = 0;

        bool test(u32 i) const { return (bits[i >> 6] >> (i & 63)) & 1; }
    };

    /// Every subgroup, found as the join-closure of the cyclic subgroups.
    /// Guarded: only for groups of at most `group_cap` elements.
    std::vector<Subgroup> all_subgroups(u32 group_cap = 1000,
                                        size_t subgroup_cap = 100000) const {
        if (size() > group_cap)
            fail_cap("CapExceeded", "group too large for a full subgroup scan");
        const size_t words = (size() + 63) / 64;
        auto make_subgroup = [&](const std::vector<u32>& idxs, std::vector<u32> gens) {
            Subgroup s;
            s.bits.assign(words, 0);
            for (u32 i : idxs) s.bits[i >> 6] |= 1ULL << (i & 63);
            s.count = static_cast<u32>(idxs.size());
            s.gens = std::move(gens);
            return s;
        };
        auto key_of = [&](const Subgroup& s) {
            std::string k;
            k.reserve(s.bits.size() * 8);
            for (u64 w : s.bits)
                for (int b = 0; b < 8; ++b) k += static_cast<char>((w >> (8 * b)) & 0xff);
            return k;
        };

        std::vector<Subgroup> subs;
        std::unordered_set<std::string> seen;
        auto add = [&](Subgroup s) {
            auto k = key_of(s);
            if (seen.count(k)) return false;
            if (subs.size() >= subgroup_cap)
                fail_cap("CapExceeded", "subgroup lattice exceeds the cap");
            seen.insert(std::move(k));
            subs.push_back(std::move(s));
            return true;
        };

        add(make_subgroup({0}, {}));
        for (u32 g = 1; g < size(); ++g) add(make_subgroup(closure_indices({g}), {g}));
        // the whole group, via its cyclic pieces' join, may appear below;
        // seed it explicitly so joins can short-circuit to it
        {
            std::vector<u32> all(size());
            for (u32 i = 0; i < size(); ++i) all[i] = i;
            add(make_subgroup(all, {}));
        }

        // fixpoint over pairwise joins; a join larger than half the group is
        // the whole group
        const u32 half = size() / 2;
        size_t processed = 0;
        while (processed < subs.size()) {
            const size_t upto = subs.size();
            for (size_t i = processed; i < upto; ++i)
                for (size_t j = 0; j < i; ++j) {
                    // skip when one contains the other
                    bool i_in_j = true, j_in_i = true;
                    for (size_t w = 0; w < words; ++w) {
                        if ((subs[i].bits[w] & ~subs[j].bits[w]) != 0) i_in_j = false;
                        if ((subs[j].bits[w] & ~subs[i].bits[w]) != 0) j_in_i = false;
                    }
                    if (i_in_j || j_in_i) continue;
                    std::vector<u32> gens = subs[i].gens;
                    gens.insert(gens.end(), subs[j].gens.begin(), subs[j].gens.end());
                    auto join = join_indices(gens, half);
                    if (join.empty()) continue;  // grew past half: the whole group
                    add(make_subgroup(join, std::move(gens)));
                }
            processed = upto;
        }
        return subs;
    }

private:
    /// Closure that bails out (returning empty) once it exceeds `half`.
    std::vector<u32> join_indices(const std::vector<u32>& gens, u32 half) const {
        std::vector<bool> in(size(), false);
        in[0] = true;
        u32 count = 1;
        std::deque<u32> queue{0};
        while (!queue.empty()) {
            u32 i = queue.front();
            queue.pop_front();
            for (u32 g : gens) {
                u32 y = mul(i, g);
                if (!in[y]) {
                    in[y] = true;
                    if (++count > half) return {};
                    queue.push_back(y);
                }
            }
        }
        std::vector<u32> out;
        out.reserve(count);
        for (u32 i = 0; i < size(); ++i)
            if (in[i]) out.push_back(i);
        return out;
    }

    void build_table() {
        const u32 n = size();
        mul_.assign(static_cast<size_t>(n) * n, 0);
        for (u32 i = 0; i < n; ++i)
            for (u32 j = 0; j < n; ++j) {
                auto it = index_.find(elems_[i].mul(elems_[j]).key());
                check_internal(it != index_.end(), "element list is not closed under products");
                mul_[static_cast<size_t>(i) * n + j] = it->second;
            }
        inv_.assign(n, 0);
        for (u32 i = 0; i < n; ++i) {
            bool found = false;
            for (u32 j = 0; j < n; ++j)
                if (mul(i, j) == 0) {
                    inv_[i] = j;
                    found = true;
                    break;
                }
            check_internal(found, "element without inverse");
        }
    }

    std::vector<ResidueMatrix> elems_;
    std::unordered_map<std::string, u32> index_;
    std::vector<u32> mul_;
    std::vector<u32> inv_;
};

/// Certification that sampled conjugacy classes pin down the whole group: no
/// proper subgroup meets every sampled class.  A true result proves that any
/// subgroup containing one representative of each sampled class is all of G.
inline bool conjugacy_certify(const GroupTable& G, const std::vector<u32>& samples) {
    if (G.size() == 1) return true;
    if (samples.empty()) return false;
    // distinct sampled classes as bitsets
    const size_t words = (G.size() + 63) / 64;
    std::vector<std::vector<u64>> classes;
    std::unordered_set<std::string> seen;
    for (u32 s : samples) {
        auto cls = G.conjugacy_class(s);
        std::vector<u64> bits(words, 0);
        for (u32 i : cls) bits[i >> 6] |= 1ULL << (i & 63);
        std::string k;
        for (u64 w : bits)
            for (int b = 0; b < 8; ++b) k += static_cast<char>((w >> (8 * b)) & 0xff);
        if (seen.insert(std::move(k)).second) classes.push_back(std::move(bits));
    }
    for (const auto& H : G.all_subgroups()) {
        if (H.count == G.size()) continue;
        bool meets_all = true;
        for (const auto& cls : classes) {
            bool meets = false;
            for (size_t w = 0; w < words && !meets; ++w)
                if (H.bits[w] & cls[w]) meets = true;
            if (!meets) {
                meets_all = false;
                break;
            }
        }
        if (meets_all) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Characteristic polynomial over the residue ring.
// ---------------------------------------------------------------------------

namespace detail {

using XPoly = std::vector<Poly>;  // polynomial in X with residue coefficients

inline void xp_trim(XPoly& f) {
    while (!f.empty() && f.back().is_zero()) f.pop_back();
}

inline XPoly xp_add(const XPoly& a, const XPoly& b, const Poly& n) {
    XPoly c;
    const size_t sz = std::max(a.size(), b.size());
    for (size_t i = 0; i < sz; ++i) {
        Poly x = i < a.size() ? a[i] : Poly::zero(n.field());
        if (i < b.size()) x = x + b[i];
        c.push_back(mod_n(x, n));
    }
    xp_trim(c);
    return c;
}

inline XPoly xp_neg(const XPoly& a, const Poly& n) {
    XPoly c;
    for (const auto& x : a) c.push_back(mod_n(Poly::zero(n.field()) - x, n));
    return c;
}

inline XPoly xp_mul(const XPoly& a, const XPoly& b, const Poly& n) {
    if (a.empty() || b.empty()) return {};
    XPoly c(a.size() + b.size() - 1, Poly::zero(n.field()));
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (size_t j = 0; j < b.size(); ++j) c[i + j] = mod_n(c[i + j] + a[i] * b[j], n);
    }
    xp_trim(c);
    return c;
}

inline XPoly xp_det(const std::vector<std::vector<XPoly>>& m, std::vector<size_t> cols,
                    size_t row, const Poly& n) {
    if (cols.empty()) return {Poly::one(n.field())};
    XPoly acc;
    for (size_t j = 0; j < cols.size(); ++j) {
        const XPoly& a = m[row][cols[j]];
        if (a.empty()) continue;
        std::vector<size_t> sub;
        for (size_t k = 0; k < cols.size(); ++k)
            if (k != j) sub.push_back(cols[k]);
        XPoly term = xp_mul(a, xp_det(m, sub, row + 1, n), n);
        if (j % 2 == 1) term = xp_neg(term, n);
        acc = xp_add(acc, term, n);
    }
    return acc;
}

}  // namespace detail

/// Characteristic polynomial det(X I - M): coefficients are residues mod the
/// matrix modulus, constant term first, degree = dim, monic.
inline std::vector<Poly> charpoly(const ResidueMatrix& M) {
    const auto& Fq = M.base_field();
    const Poly& n = M.modulus();
    const unsigned r = M.dim();
    std::vector<std::vector<detail::XPoly>> m(r, std::vector<detail::XPoly>(r));
    for (unsigned i = 0; i < r; ++i)
        for (unsigned j = 0; j < r; ++j) {
            detail::XPoly e;
            Poly neg = mod_n(Poly::zero(Fq) - M.at(i, j), n);
            e.push_back(neg);
            if (i == j) e.push_back(Poly::one(Fq));  // + X on the diagonal
            detail::xp_trim(e);
            m[i][j] = std::move(e);
        }
    std::vector<size_t> cols(r);
    for (unsigned i = 0; i < r; ++i) cols[i] = i;
    auto d = detail::xp_det(m, cols, 0, n);
    d.resize(r + 1, Poly::zero(Fq));
    return d;
}

/// Determinant factorization of the identity-mod-t kernel: |G_r| splits as
/// |S_r| times the number of units congruent to one mod t.
struct KernelFactorization {
    u64 g_count = 0;       // matrices congruent to I mod t, invertible mod tn
    u64 s_count = 0;       // those with determinant one
    u64 unit1_count = 0;   // units of F_q[t]/(tn) congruent to 1 mod t
    u64 gl_tn = 0;         // |GL_r(F_q[t]/(tn))|
    u64 gl_t = 0;          // |GL_r(F_q[t]/(t))|
    bool det_split = false;     // g = s * unit1
    bool reduction_split = false;  // gl_tn = g * gl_t
};

inline KernelFactorization kernel_factorization_check(const FieldPtr& Fq, unsigned r,
                                                      const Poly& n) {
    KernelFactorization out;
    const Poly t = Poly::x(Fq);
    out.g_count = kernel_subgroup(Fq, n, r, false).size();
    out.s_count = kernel_subgroup(Fq, n, r, true).size();
    u64 unit1 = 0;
    {
        u64 q = 1;
        for (unsigned i = 0; i < Fq->degree(); ++i) q *= Fq->p();
        const Poly tn = t * n;
        u64 total = detail::upow(q, static_cast<u64>(n.degree()));
        for (u64 v = 0; v < total; ++v) {
            Poly u = Poly::one(Fq) + t * residue_from_value(Fq, q, n.degree(), v);
            if (gcd(u, tn).degree() == 0) ++unit1;
        }
    }
    out.unit1_count = unit1;
    out.gl_tn = gl_order(Fq, r, t * n);
    out.gl_t = gl_order(Fq, r, t);
    out.det_split = out.g_count == out.s_count * out.unit1_count;
    out.reduction_split = out.gl_tn == out.g_count * out.gl_t;
    return out;
}

}  // namespace dmod
