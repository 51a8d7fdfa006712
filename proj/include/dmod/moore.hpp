#pragma once

#include <utility>
#include <vector>

#include "dmod/drinfeld.hpp"

namespace dmod {

namespace detail {

/// Determinant by Gaussian elimination over the coefficient field.
inline FieldElem field_det(std::vector<std::vector<FieldElem>> m, const FieldPtr& K) {
    const size_t n = m.size();
    auto det = K->one();
    for (size_t c = 0; c < n; ++c) {
        size_t sel = n;
        for (size_t i = c; i < n; ++i)
            if (!m[i][c].is_zero()) {
                sel = i;
                break;
            }
        if (sel == n) return K->zero();
        if (sel != c) {
            std::swap(m[sel], m[c]);
            det = -det;
        }
        det = det * m[c][c];
        auto ipv = inv(m[c][c]);
        for (size_t i = c + 1; i < n; ++i) {
            if (m[i][c].is_zero()) continue;
            auto f = m[i][c] * ipv;
            for (size_t j = c; j < n; ++j) m[i][j] = m[i][j] - f * m[c][j];
        }
    }
    return det;
}

/// Embeds a list of points into their common (largest) field.
inline std::pair<std::vector<FieldElem>, FieldPtr> unify_points(
    const std::vector<FieldElem>& xs) {
    if (xs.empty()) fail_input("EmptyInput", "need at least one point");
    FieldPtr K = xs[0].field();
    for (const auto& x : xs)
        if (x.field()->degree() > K->degree()) K = x.field();
    std::vector<FieldElem> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(x.field()->same(*K) ? x : embed(x, K));
    return {std::move(out), K};
}

}  // namespace detail

/// Determinant of the matrix whose (i, j) entry is x_j^(q^i), i, j in
/// 0..r-1.  Vanishes exactly when the points are dependent over F_q.
inline FieldElem moore_det(const std::vector<FieldElem>& xs0, u64 q) {
    auto [xs, K] = detail::unify_points(xs0);
    if (!K->subfield_degree(q))
        fail_input("TwistMismatch", "points do not live over the twist field");
    const size_t r = xs.size();
    std::vector<std::vector<FieldElem>> m(r, std::vector<FieldElem>(r, K->zero()));
    for (size_t j = 0; j < r; ++j) {
        auto v = xs[j];
        for (size_t i = 0; i < r; ++i) {
            m[i][j] = v;
            if (i + 1 < r) v = frobenius_power(v, q, 1);
        }
    }
    return detail::field_det(std::move(m), K);
}

/// The monic additive polynomial of tau-degree r vanishing exactly on the
/// F_q-span of the given independent points: cofactor expansion of the
/// bordered Moore matrix along its last column, normalized by the top minor.
inline AdditivePoly moore_interpolate(const std::vector<FieldElem>& xs0, u64 q) {
    auto [xs, K] = detail::unify_points(xs0);
    if (!K->subfield_degree(q))
        fail_input("TwistMismatch", "points do not live over the twist field");
    const size_t r = xs.size();
    // powers x_j^(q^i) for i = 0..r
    std::vector<std::vector<FieldElem>> pw(r + 1, std::vector<FieldElem>(r, K->zero()));
    for (size_t j = 0; j < r; ++j) {
        auto v = xs[j];
        for (size_t i = 0; i <= r; ++i) {
            pw[i][j] = v;
            if (i < r) v = frobenius_power(v, q, 1);
        }
    }
    auto minor_det = [&](size_t skip) {
        std::vector<std::vector<FieldElem>> m;
        m.reserve(r);
        for (size_t i = 0; i <= r; ++i)
            if (i != skip) m.push_back(pw[i]);
        return detail::field_det(std::move(m), K);
    };
    const auto top = minor_det(r);
    if (top.is_zero()) fail_input("DependentPoints", "points are dependent over the twist field");
    const auto top_inv = inv(top);
    std::vector<FieldElem> b(r + 1, K->zero());
    for (size_t i = 0; i <= r; ++i) {
        auto c = minor_det(i) * top_inv;
        if ((r - i) % 2 == 1) c = -c;  // cofactor sign (-1)^(i + r)
        b[i] = c;
    }
    return AdditivePoly::from_coeffs(K, q, std::move(b));
}

/// Moore determinant of a torsion basis, embedded in the basis field.
inline FieldElem basis_determinant_point(const DrinfeldModule& psi,
                                         const std::vector<FieldElem>& basis) {
    if (basis.size() != psi.rank())
        fail_input("RankMismatch", "basis size must equal the module rank");
    return moore_det(basis, psi.q());
}

/// Reconstructs theta from a basis of the t-torsion:
/// theta = (-1)^r a_r M^(q-1) with M the basis Moore determinant.
inline FieldElem theta_from_torsion_basis(const DrinfeldModule& psi,
                                          const std::vector<FieldElem>& basis) {
    auto M = basis_determinant_point(psi, basis);
    auto v = embed(psi.coeff(psi.rank()), M.field()) * pow(M, psi.q() - 1);
    if (psi.rank() % 2 == 1) v = -v;
    return v;
}

/// True when x lies in the t-torsion of the determinant module of psi.
inline bool det_torsion_contains(const DrinfeldModule& psi, const FieldElem& x) {
    auto rho = det_module(psi);
    auto op = lift_operator(rho.psi_t(), x.field());
    return op.eval(x).is_zero();
}

}  // namespace dmod
