#pragma once

#include <utility>
#include <vector>

#include "dmod/drinfeld.hpp"
#include "dmod/moore.hpp"

namespace dmod {

/// The same module with coefficients embedded into an extension of its
/// coefficient field.
inline DrinfeldModule rebase(const DrinfeldModule& psi, const FieldPtr& L) {
    std::vector<FieldElem> a;
    for (unsigned i = 1; i <= psi.rank(); ++i) a.push_back(embed(psi.coeff(i), L));
    return DrinfeldModule::make(psi.base_field(), L, embed(psi.theta(), L), std::move(a));
}

/// Right-hand side of the product form of a torsion operator: with m the
/// level, the polynomial m(theta) X prod (1 - X/w) over the nonzero torsion
/// points w, expanded over the ambient field.
inline Poly torsion_product_polynomial(const TorsionModule& T) {
    const auto& L = T.ambient;
    auto acc = Poly::monomial(L, embed(T.psi.at_theta(T.n), L), 1);
    const auto one = L->one();
    for (const auto& w : T.points) {
        if (w.is_zero()) continue;
        acc = acc * Poly::from_coeffs(L, {one, -inv(w)});
    }
    return acc;
}

/// Exact check that the torsion operator factors through its points:
/// psi_m(X) = m(theta) X prod_{0 != w in psi[m]} (1 - X/w).
inline bool torsion_product_identity(const TorsionModule& T) {
    auto lhs = lift_operator(T.psi.psi_of(T.n), T.ambient).to_poly();
    return lhs == torsion_product_polynomial(T);
}

/// Image of a free basis of psi[t n] under psi_n: a basis of psi[t].  The
/// input vectors must all live in one extension of the coefficient field.
inline std::vector<FieldElem> induced_level_basis(const DrinfeldModule& psi, const Poly& n,
                                                  const std::vector<FieldElem>& w) {
    if (w.size() != psi.rank())
        fail_input("NotABasis", "expected one generator per unit of rank");
    if (!n.field()->same(*psi.base_field()))
        fail_input("FieldMismatch", "level is not over the base field");
    const auto& L = w.front().field();
    for (const auto& wi : w)
        if (!wi.field()->same(*L))
            fail_input("FieldMismatch", "generators live in different fields");
    const Poly t = Poly::x(psi.base_field());
    auto op_tn = lift_operator(psi.psi_of(t * n), L);
    auto op_n = lift_operator(psi.psi_of(n), L);
    auto op_t = lift_operator(psi.psi_of(t), L);

    std::vector<FieldElem> v;
    for (const auto& wi : w) {
        if (!op_tn.eval(wi).is_zero())
            fail_input("NotABasis", "generator is not killed by the level");
        auto vi = op_n.eval(wi);
        if (vi.is_zero()) fail_input("NotABasis", "generator dies too early");
        if (!op_t.eval(vi).is_zero())
            fail_internal("induced vector escapes the t-torsion");
        v.push_back(std::move(vi));
    }
    // the images must span all of psi[t]: q^r points from r generators
    detail::FqSpan span(psi.base_field(), L);
    for (const auto& vi : v) span.add(vi);
    const unsigned need = psi.base_field()->degree() * psi.rank();
    if (span.dim() != need)
        fail_input("NotABasis", "images do not span the t-torsion");
    return v;
}

/// A module twisted so that the first basis vector becomes 1.
struct NormalizedLevel {
    DrinfeldModule psi;              // over the basis field
    std::vector<FieldElem> basis;    // first entry is 1
    FieldElem unit;                  // the twisting scalar (the old first vector)
};

/// Twist by the first basis vector: points scale by its inverse, so the
/// basis starts with 1 afterwards.
inline NormalizedLevel normalize_level(const DrinfeldModule& psi,
                                       const std::vector<FieldElem>& basis) {
    if (basis.empty()) fail_input("EmptyInput", "normalization needs a basis");
    const auto& c = basis.front();
    if (c.is_zero()) fail_input("ZeroInput", "cannot normalize by the zero vector");
    const auto& L = c.field();
    NormalizedLevel out;
    out.psi = twist(rebase(psi, L), c);
    auto ci = inv(c);
    for (const auto& b : basis) out.basis.push_back(embed(b, L) * ci);
    out.unit = c;
    check_internal(out.basis.front() == L->one(), "normalization must set the lead to 1");
    return out;
}

/// Whether theta + a_1 + ... + a_r = 0, i.e. psi_t kills 1.  Holds after
/// normalizing a level-t structure.
inline bool coefficient_sum_vanishes(const DrinfeldModule& psi) {
    auto s = psi.theta();
    for (unsigned i = 1; i <= psi.rank(); ++i) s = s + psi.coeff(i);
    return s.is_zero();
}

/// Whether the top coefficient satisfies the basis-determinant relation
/// theta = (-1)^r a_r M(basis)^(q-1).
inline bool leading_coefficient_identity(const DrinfeldModule& psi,
                                         const std::vector<FieldElem>& basis) {
    auto lhs = theta_from_torsion_basis(psi, basis);
    return lhs == embed(psi.theta(), lhs.field());
}

}  // namespace dmod
