#pragma once

#include <algorithm>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dmod/skew.hpp"

namespace dmod {

namespace detail {

/// Incremental F_p span with membership testing (row echelon, pivot-high
/// rows kept normalized).
class FpSpan {
public:
    FpSpan(u64 p, size_t n) : p_(p), n_(n) {}

    /// Adds v to the span; returns true when the dimension grew.
    bool add(std::vector<u64> v) {
        reduce(v);
        size_t piv = first_nonzero(v);
        if (piv == n_) return false;
        const u64 ipv = inv_mod_prime(v[piv] % p_, p_);
        for (auto& x : v) x = x % p_ * ipv % p_;
        rows_.push_back(std::move(v));
        pivs_.push_back(piv);
        return true;
    }

    bool contains(std::vector<u64> v) const {
        reduce(v);
        return first_nonzero(v) == n_;
    }

    size_t dim() const { return rows_.size(); }

private:
    void reduce(std::vector<u64>& v) const {
        for (size_t k = 0; k < rows_.size(); ++k) {
            const u64 c = v[pivs_[k]] % p_;
            if (!c) continue;
            for (size_t i = 0; i < n_; ++i) v[i] = (v[i] + (p_ - c) * rows_[k][i]) % p_;
        }
    }
    size_t first_nonzero(const std::vector<u64>& v) const {
        for (size_t i = 0; i < n_; ++i)
            if (v[i] % p_) return i;
        return n_;
    }

    u64 p_;
    size_t n_;
    std::vector<std::vector<u64>> rows_;
    std::vector<size_t> pivs_;
};

/// Kernel basis of the F_p-linear map given by matrix rows (size nrows x
/// ncols, acting on column vectors).
inline std::vector<std::vector<u64>> fp_kernel(std::vector<std::vector<u64>> a, u64 p,
                                               size_t ncols) {
    const size_t nrows = a.size();
    std::vector<size_t> pivot_cols;
    size_t r = 0;
    for (size_t c = 0; c < ncols && r < nrows; ++c) {
        size_t sel = nrows;
        for (size_t i = r; i < nrows; ++i)
            if (a[i][c] % p) {
                sel = i;
                break;
            }
        if (sel == nrows) continue;
        std::swap(a[r], a[sel]);
        const u64 ipv = inv_mod_prime(a[r][c] % p, p);
        for (auto& x : a[r]) x = x % p * ipv % p;
        for (size_t i = 0; i < nrows; ++i) {
            if (i == r) continue;
            const u64 f = a[i][c] % p;
            if (!f) continue;
            for (size_t j = 0; j < ncols; ++j) a[i][j] = (a[i][j] + (p - f) * a[r][j]) % p;
        }
        pivot_cols.push_back(c);
        ++r;
    }
    std::vector<bool> is_pivot(ncols, false);
    for (size_t c : pivot_cols) is_pivot[c] = true;
    std::vector<std::vector<u64>> basis;
    for (size_t f = 0; f < ncols; ++f) {
        if (is_pivot[f]) continue;
        std::vector<u64> v(ncols, 0);
        v[f] = 1;
        for (size_t k = 0; k < pivot_cols.size(); ++k)
            v[pivot_cols[k]] = (p - a[k][f] % p) % p;
        basis.push_back(std::move(v));
    }
    return basis;
}

}  // namespace detail

/// A rank-r module structure on the additive group: the image of t is
/// theta + a_1 tau + ... + a_r tau^r with a_r nonzero, coefficients in a
/// finite extension K of the base field F_q.
class DrinfeldModule {
public:
    DrinfeldModule() = default;

    /// a = (a_1, ..., a_r).  theta and the a_i may be given in subfields of
    /// K; they are lifted.
    static DrinfeldModule make(const FieldPtr& Fq, const FieldPtr& K, const FieldElem& theta,
                               std::vector<FieldElem> a) {
        const u64 q = AdditivePoly::field_size(Fq);
        unsigned m = 0;
        if (!K->subfield_degree(q, &m))
            fail_input("TwistMismatch", "coefficient field does not extend the base field");
        if (a.empty()) fail_input("RankZero", "the image of t needs at least one twist term");
        DrinfeldModule psi;
        psi.Fq_ = Fq;
        psi.K_ = K;
        psi.q_ = q;
        psi.m_ = K->degree() / Fq->degree();
        psi.theta_ = theta.field()->same(*K) ? theta : embed(theta, K);
        for (auto& x : a) psi.a_.push_back(x.field()->same(*K) ? x : embed(x, K));
        if (psi.a_.back().is_zero())
            fail_input("TopCoefficientZero", "the leading twist coefficient must be nonzero");
        std::vector<FieldElem> c;
        c.push_back(psi.theta_);
        for (const auto& x : psi.a_) c.push_back(x);
        psi.psi_t_ = AdditivePoly::from_coeffs(K, q, std::move(c));
        return psi;
    }

    const FieldPtr& base_field() const { return Fq_; }
    const FieldPtr& field() const { return K_; }
    u64 q() const { return q_; }
    /// Degree of the coefficient field over the base field.
    unsigned m() const { return m_; }
    unsigned rank() const { return static_cast<unsigned>(a_.size()); }
    const FieldElem& theta() const { return theta_; }
    /// a_i for i in 1..rank.
    const FieldElem& coeff(unsigned i) const {
        if (i < 1 || i > a_.size()) fail_input("IndexOutOfRange", "coefficient index");
        return a_[i - 1];
    }
    const AdditivePoly& psi_t() const { return psi_t_; }

    /// Image of an arbitrary a in F_q[t] under the module map (Horner over
    /// the operator ring).
    AdditivePoly psi_of(const Poly& a) const {
        if (!a.field()->same(*Fq_)) fail_input("FieldMismatch", "operand is not over the base field");
        if (a.is_zero()) return AdditivePoly::zero(K_, q_);
        auto acc = AdditivePoly::scalar(K_, q_, embed(a.coeffs().back(), K_));
        for (int i = a.degree() - 1; i >= 0; --i) {
            acc = compose(acc, psi_t_);
            const auto& c = a.coeffs()[static_cast<size_t>(i)];
            if (!c.is_zero()) acc = acc + AdditivePoly::scalar(K_, q_, embed(c, K_));
        }
        return acc;
    }

    /// Evaluation of a at theta (the constant term of psi_of(a)).
    FieldElem at_theta(const Poly& a) const {
        if (!a.field()->same(*Fq_)) fail_input("FieldMismatch", "operand is not over the base field");
        auto acc = K_->zero();
        for (size_t i = a.coeffs().size(); i-- > 0;)
            acc = acc * theta_ + embed(a.coeffs()[i], K_);
        return acc;
    }

    /// True when n stays away from the kernel of t -> theta, i.e. n(theta)
    /// is nonzero; torsion is then a free module.
    bool prime_to_characteristic(const Poly& n) const { return !at_theta(n).is_zero(); }

    /// Minimal polynomial of theta over the base field: the generator of
    /// the kernel of t -> theta.
    Poly characteristic() const {
        std::vector<FieldElem> orbit{theta_};
        for (;;) {
            auto next = frobenius_power(orbit.back(), q_, 1);
            if (next == orbit.front()) break;
            orbit.push_back(next);
        }
        Poly f = Poly::one(K_);
        Poly x = Poly::x(K_);
        for (const auto& c : orbit) f = f * (x - Poly::constant(K_, c));
        // coefficients are fixed by the q-power map, so they name base-field
        // elements; translate by scanning the embedding
        std::vector<FieldElem> out;
        for (const auto& c : f.coeffs()) {
            bool found = false;
            for (u64 v = 0; v < q_; ++v) {
                if (embed(Fq_->from_int(v), K_) == c) {
                    out.push_back(Fq_->from_int(v));
                    found = true;
                    break;
                }
            }
            check_internal(found, "minimal polynomial coefficient escaped the base field");
        }
        return Poly::from_coeffs(Fq_, std::move(out));
    }

private:
    FieldPtr Fq_;
    FieldPtr K_;
    u64 q_ = 0;
    unsigned m_ = 0;
    FieldElem theta_;
    std::vector<FieldElem> a_;
    AdditivePoly psi_t_;
};

/// Twist by a nonzero scalar: conjugation of the module structure by the map
/// x -> cx, giving a_i' = c^(q^i - 1) * a_i.  Isomorphic module; points
/// transform as x -> c^(-1) x.
inline DrinfeldModule twist(const DrinfeldModule& psi, const FieldElem& c0) {
    auto c = c0.field()->same(*psi.field()) ? c0 : embed(c0, psi.field());
    if (c.is_zero()) fail_input("ZeroInput", "twists use nonzero scalars");
    std::vector<FieldElem> a;
    auto cpow = c;  // c^(q^i) as i advances
    for (unsigned i = 1; i <= psi.rank(); ++i) {
        cpow = frobenius_power(cpow, psi.q(), 1);
        a.push_back(cpow * inv(c) * psi.coeff(i));
    }
    return DrinfeldModule::make(psi.base_field(), psi.field(), psi.theta(), std::move(a));
}

/// Isomorphism invariants J_i = a_i^((q^r-1)/d_i) / a_r^((q^i-1)/d_i) with
/// d_i = gcd(q^i-1, q^r-1), for i = 1..r-1 (empty at rank 1).  Unchanged
/// under twisting.
inline std::vector<FieldElem> j_invariants(const DrinfeldModule& psi) {
    const unsigned r = psi.rank();
    std::vector<FieldElem> out;
    if (r == 1) return out;
    u64 qr = 1;
    for (unsigned i = 0; i < r; ++i) qr *= psi.q();
    const u64 top = qr - 1;
    u64 qi = 1;
    for (unsigned i = 1; i < r; ++i) {
        qi *= psi.q();
        const u64 lo = qi - 1;
        u64 a = top, b = lo;
        while (b) {
            a %= b;
            std::swap(a, b);
        }
        const u64 d = a;
        out.push_back(pow(psi.coeff(i), top / d) * inv(pow(psi.coeff(r), lo / d)));
    }
    return out;
}

/// The rank-1 module carrying the determinant of the action: the image of t
/// is theta + (-1)^(r-1) a_r tau.
inline DrinfeldModule det_module(const DrinfeldModule& psi) {
    auto c = psi.coeff(psi.rank());
    if (psi.rank() % 2 == 0) c = -c;
    return DrinfeldModule::make(psi.base_field(), psi.field(), psi.theta(), {c});
}

/// The n-torsion submodule: all points killed by psi_n, realized inside the
/// smallest extension of the coefficient field that contains them all.
struct TorsionModule {
    DrinfeldModule psi;
    Poly n;              // monic
    FieldPtr ambient;    // extension of psi.field() containing the points
    unsigned steps = 0;  // relative degree of the ambient over psi.field()
    std::vector<FieldElem> points;  // all of them, sorted by value
};

inline TorsionModule torsion(const DrinfeldModule& psi, const Poly& n0, u64 point_cap = 20000) {
    if (!n0.field()->same(*psi.base_field()))
        fail_input("FieldMismatch", "torsion level is not over the base field");
    if (n0.is_zero()) fail_input("ZeroInput", "torsion level must be nonzero");
    const Poly n = monic(n0);
    TorsionModule T;
    T.psi = psi;
    T.n = n;
    if (n.degree() == 0) {  // level 1: the zero module
        T.ambient = psi.field();
        T.steps = 1;
        T.points = {psi.field()->zero()};
        return T;
    }
    if (!psi.prime_to_characteristic(n))
        fail_input("CharacteristicDivides", "torsion level meets the characteristic of t -> theta");

    const u64 p = psi.field()->p();
    const unsigned d = psi.base_field()->degree();
    const unsigned target = d * psi.rank() * static_cast<unsigned>(n.degree());
    u64 points_total = 1;
    for (unsigned i = 0; i < target; ++i) points_total *= p;
    if (points_total > point_cap) fail_cap("CapExceeded", "torsion module too large to enumerate");

    // cap on the ambient search: the splitting degree divides the order of
    // the residue matrix group, which is at most q^(r^2 deg n)
    u64 step_cap = 1;
    for (unsigned i = 0; i < psi.rank() * psi.rank() * static_cast<unsigned>(n.degree()); ++i) {
        step_cap *= psi.q();
        if (step_cap >= 10000) {
            step_cap = 10000;
            break;
        }
    }

    const auto psi_n = psi.psi_of(n);
    for (unsigned steps = 1; steps <= step_cap; ++steps) {
        auto L = Field::extension(psi.field(), steps);
        const size_t N = L->degree();
        const auto op = lift_operator(psi_n, L);
        // matrix of the F_p-linear map x -> op(x) in the coordinate basis
        std::vector<std::vector<u64>> rows(N, std::vector<u64>(N, 0));
        for (size_t j = 0; j < N; ++j) {
            std::vector<u64> e(N, 0);
            e[j] = 1;
            auto y = op.eval(L->from_coords(e));
            for (size_t i = 0; i < N; ++i) rows[i][j] = y.coords()[i];
        }
        auto kernel = detail::fp_kernel(std::move(rows), p, N);
        if (kernel.size() < target) continue;
        check_internal(kernel.size() == target, "torsion kernel exceeds the module size");
        // enumerate all F_p-combinations of the kernel basis
        std::vector<FieldElem> pts;
        pts.reserve(points_total);
        std::vector<u64> digits(kernel.size(), 0);
        for (u64 count = 0; count < points_total; ++count) {
            std::vector<u64> v(N, 0);
            for (size_t k = 0; k < kernel.size(); ++k) {
                const u64 c = digits[k];
                if (!c) continue;
                for (size_t i = 0; i < N; ++i) v[i] = (v[i] + c * kernel[k][i]) % p;
            }
            pts.push_back(L->from_coords(v));
            for (size_t k = 0; k < digits.size(); ++k) {
                if (++digits[k] < p) break;
                digits[k] = 0;
            }
        }
        std::sort(pts.begin(), pts.end(), value_less);
        T.ambient = L;
        T.steps = steps;
        T.points = std::move(pts);
        return T;
    }
    fail_cap("CapExceeded", "no ambient extension held the full torsion within the search cap");
}

namespace detail {

/// F_q-span tracker inside an extension L of F_q: the F_q-span of a set of
/// points is the F_p-span of their multiples by an F_p-basis of F_q.
class FqSpan {
public:
    FqSpan(const FieldPtr& Fq, const FieldPtr& L)
        : span_(L->p(), L->degree()), L_(L) {
        auto g = embed(Fq->gen(), L);
        auto acc = L->one();
        for (unsigned i = 0; i < Fq->degree(); ++i) {
            mults_.push_back(acc);
            acc = acc * g;
        }
    }

    bool add(const FieldElem& x) {
        bool grew = false;
        for (const auto& mu : mults_)
            if (span_.add((mu * x).coords())) grew = true;
        return grew;
    }

    size_t dim() const { return span_.dim(); }  // F_p-dimension

private:
    FpSpan span_;
    FieldPtr L_;
    std::vector<FieldElem> mults_;
};

}  // namespace detail

/// A basis of the torsion module as a free module over F_q[t]/(n): r points
/// whose module span is everything.  Deterministic: depth-first search in
/// point value order, pruned by span size.
inline std::vector<FieldElem> module_basis(const TorsionModule& T) {
    if (T.n.degree() == 0) return {};
    const auto& psi = T.psi;
    const unsigned r = psi.rank();
    const unsigned dn = static_cast<unsigned>(T.n.degree());
    const unsigned d = psi.base_field()->degree();

    // images psi_{t^j}(w) for j < dn generate w's cyclic submodule over F_q
    std::vector<AdditivePoly> tpow;  // psi_{t^j} lifted to the ambient
    auto op = AdditivePoly::identity(T.ambient, psi.q());
    auto psi_t = lift_operator(psi.psi_t(), T.ambient);
    for (unsigned j = 0; j < dn; ++j) {
        tpow.push_back(op);
        if (j + 1 < dn) op = compose(psi_t, op);
    }

    std::vector<FieldElem> chosen;
    std::vector<detail::FqSpan> spans;  // spans[k] = span of chosen[0..k)
    spans.emplace_back(psi.base_field(), T.ambient);

    // depth-first over candidate points in value order
    std::vector<size_t> idx_stack;
    size_t next_idx = 0;
    for (;;) {
        if (chosen.size() == r) return chosen;
        bool advanced = false;
        for (size_t i = next_idx; i < T.points.size(); ++i) {
            const auto& w = T.points[i];
            if (w.is_zero()) continue;
            auto trial = spans.back();
            bool all_new = true;
            for (unsigned j = 0; j < dn; ++j)
                trial.add(tpow[j].eval(w));
            all_new = trial.dim() == d * dn * (chosen.size() + 1);
            if (all_new) {
                chosen.push_back(w);
                spans.push_back(std::move(trial));
                idx_stack.push_back(i);
                next_idx = 0;
                advanced = true;
                break;
            }
        }
        if (advanced) continue;
        if (chosen.empty())
            fail_internal("torsion module admitted no free basis");
        next_idx = idx_stack.back() + 1;
        idx_stack.pop_back();
        chosen.pop_back();
        spans.pop_back();
    }
}

/// Coordinate chart for a torsion module with a chosen basis: every point is
/// a unique combination sum psi_{c_i}(w_i) with c_i residues mod n, looked
/// up by enumeration.
class TorsionCoordinates {
public:
    TorsionCoordinates(const TorsionModule& T, std::vector<FieldElem> basis)
        : T_(T), basis_(std::move(basis)) {
        const auto& psi = T.psi;
        const unsigned r = psi.rank();
        check_internal(basis_.size() == r, "coordinate chart needs a full basis");
        const unsigned dn = static_cast<unsigned>(T.n.degree());
        const u64 q = psi.q();
        if (dn == 0) {
            keys_[elem_key(T.ambient->zero())] = {};
            return;
        }
        // images psi_{t^j}(w_i)
        std::vector<std::vector<FieldElem>> img(r);
        auto psi_t = lift_operator(psi.psi_t(), T_.ambient);
        for (unsigned i = 0; i < r; ++i) {
            auto w = basis_[i];
            for (unsigned j = 0; j < dn; ++j) {
                img[i].push_back(w);
                if (j + 1 < dn) w = psi_t.eval(w);
            }
        }
        u64 res_count = 1;
        for (unsigned i = 0; i < dn; ++i) res_count *= q;
        u64 total = 1;
        for (unsigned i = 0; i < r; ++i) total *= res_count;
        const auto& Fq = psi.base_field();
        for (u64 v = 0; v < total; ++v) {
            u64 rest = v;
            std::vector<Poly> tuple;
            auto pt = T_.ambient->zero();
            for (unsigned i = 0; i < r; ++i) {
                const u64 rv = rest % res_count;
                rest /= res_count;
                Poly c = residue_from_value(Fq, q, static_cast<int>(dn), rv);
                for (unsigned j = 0; j < dn; ++j) {
                    const auto cj = c.at(j);
                    if (!cj.is_zero()) pt = pt + embed(cj, T_.ambient) * img[i][j];
                }
                tuple.push_back(std::move(c));
            }
            auto [it, fresh] = keys_.emplace(elem_key(pt), std::move(tuple));
            (void)it;
            check_internal(fresh, "torsion coordinates collided; the basis is not free");
        }
        check_internal(keys_.size() == T_.points.size(),
                       "coordinate chart does not cover the torsion module");
    }

    /// Residue coordinates of a torsion point in the chosen basis.
    const std::vector<Poly>& coords(const FieldElem& x) const {
        auto it = keys_.find(elem_key(x));
        if (it == keys_.end()) fail_internal("point is outside the torsion module");
        return it->second;
    }

    const std::vector<FieldElem>& basis() const { return basis_; }
    const TorsionModule& torsion() const { return T_; }
    size_t size() const { return keys_.size(); }

private:
    TorsionModule T_;
    std::vector<FieldElem> basis_;
    std::unordered_map<std::string, std::vector<Poly>> keys_;
};

}  // namespace dmod
