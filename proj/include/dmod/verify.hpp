#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "dmod/galois.hpp"
#include "dmod/modring.hpp"

namespace dmod {

/// Tally of one property suite: how many checks ran and how many failed.
struct SuiteResult {
    std::string name;
    unsigned checks = 0;
    unsigned failures = 0;
    std::vector<std::string> notes;  // one line per failure

    bool ok() const { return failures == 0; }

    void record(bool pass, const std::string& what) {
        ++checks;
        if (!pass) {
            ++failures;
            notes.push_back(what);
        }
    }
};

namespace detail {

/// Specialization with the extension degree walked upward until a usable
/// point exists.  Constant levels are drawn with the stand-in level t (theta
/// nonzero is exactly what both require) and the requested level restored.
inline Specialization grid_specialize(const FieldPtr& Fq, unsigned r, const Poly& n,
                                      u64 seed) {
    const Poly draw_n = n.degree() > 0 ? n : Poly::x(Fq);
    const unsigned m0 = 1 + static_cast<unsigned>(seed % 3);
    for (unsigned m = m0; m < m0 + 6; ++m) {
        try {
            auto S = specialize(Fq, r, draw_n, m, seed);
            S.n = n.degree() > 0 ? monic(n) : n;
            return S;
        } catch (const Error& e) {
            if (e.code() != "NoGoodTheta") throw;
        }
    }
    fail_input("NoGoodTheta", "no usable specialization at any tried degree");
}

struct GridPoint {
    FieldPtr F;
    unsigned r;
    Poly n;
    u64 seed;
    std::string tag;
};

/// q in {2,3} x rank in {1,2} x four levels x five seeds.
inline std::vector<GridPoint> property_grid(u64 seed_base) {
    std::vector<GridPoint> out;
    for (u64 p : {2ULL, 3ULL}) {
        auto F = Field::get(p, 1);
        std::vector<Poly> levels{Poly::one(F), Poly::x(F) + Poly::one(F),
                                 Poly::x(F) * Poly::x(F), min_irreducible(F, 2)};
        for (unsigned r = 1; r <= 2; ++r)
            for (const auto& n : levels)
                for (u64 s = 0; s < 5; ++s) {
                    GridPoint g;
                    g.F = F;
                    g.r = r;
                    g.n = n;
                    g.seed = derive_seed(seed_base, (p << 40) ^ (u64(r) << 32) ^
                                                        (u64(n.degree()) << 16) ^
                                                        residue_value(n, p, n.degree() + 1) * 8 ^
                                                        s);
                    std::ostringstream os;
                    os << "q=" << p << " r=" << r << " n=" << n.to_string() << " seed=" << s;
                    g.tag = os.str();
                    out.push_back(std::move(g));
                }
    }
    return out;
}

}  // namespace detail

/// The torsion operator equals its product over torsion points, across the
/// whole specialization grid (level 1 included as the degenerate case).
inline SuiteResult verify_torsion_product(u64 seed_base = 0) {
    SuiteResult res;
    res.name = "torsion-product";
    for (const auto& g : detail::property_grid(seed_base)) {
        try {
            auto S = detail::grid_specialize(g.F, g.r, g.n, g.seed);
            auto T = torsion(S.psi, S.n);
            res.record(torsion_product_identity(T), g.tag);
        } catch (const Error& e) {
            res.record(false, g.tag + " threw: " + e.what());
        }
    }
    return res;
}

/// Free bases of psi[t n] push down to bases of psi[t]; normalizing by the
/// first vector makes the coefficients sum to zero.
inline SuiteResult verify_level_structures(u64 seed_base = 0) {
    SuiteResult res;
    res.name = "level-structures";
    for (const auto& g : detail::property_grid(seed_base)) {
        try {
            auto S = detail::grid_specialize(g.F, g.r, g.n, g.seed);
            const Poly t = Poly::x(g.F);
            auto T = torsion(S.psi, t * S.n);
            auto w = module_basis(T);
            auto v = induced_level_basis(S.psi, S.n, w);  // validates the span
            res.record(v.size() == g.r, g.tag + " basis size");
            auto norm = normalize_level(S.psi, v);
            res.record(coefficient_sum_vanishes(norm.psi), g.tag + " coefficient sum");
            bool killed = true;
            for (const auto& b : norm.basis)
                if (!norm.psi.psi_t().eval(b).is_zero()) killed = false;
            res.record(killed, g.tag + " normalized basis in torsion");
        } catch (const Error& e) {
            res.record(false, g.tag + " threw: " + e.what());
        }
    }
    return res;
}

/// Multilinearity, alternation, equivariance, interpolation, and membership
/// for the Moore determinant.
inline SuiteResult verify_moore_properties() {
    SuiteResult res;
    res.name = "moore";

    // the rank-2 module with both coefficients 1 over F_2: its t-torsion is a
    // 4-point plane inside the degree-3 extension
    auto F2 = Field::get(2, 1);
    auto psi = DrinfeldModule::make(F2, F2, F2->one(), {F2->one(), F2->one()});
    auto T = torsion(psi, Poly::x(F2));
    const auto& pts = T.points;  // exhaustive domain for the bilinear laws

    for (const auto& x : pts) {
        res.record(moore_det({x, x}, 2).is_zero(), "alternation");
        for (const auto& y : pts) {
            res.record(moore_det({x, y}, 2) == -moore_det({y, x}, 2), "antisymmetry");
            for (const auto& z : pts)
                res.record(moore_det({x + y, z}, 2) ==
                               moore_det({x, z}, 2) + moore_det({y, z}, 2),
                           "additivity");
        }
    }
    auto F9 = Field::get(3, 2);
    for (const auto& c : {F9->one(), F9->from_int(2)})
        for (const auto& x : {F9->gen(), F9->from_int(5)})
            for (const auto& y : {F9->one(), F9->from_int(7)})
                res.record(moore_det({c * x, y}, 3) == c * moore_det({x, y}, 3),
                           "scalar homogeneity");

    // equivariance under every integral matrix (the six invertible ones and
    // the ten singular ones), on an independent pair
    auto F8 = Field::get(2, 3);
    const auto al = F8->gen();
    const std::vector<FieldElem> pt{al, al * al};
    auto base = moore_det(pt, 2);
    res.record(!base.is_zero(), "independent pair");
    for (unsigned bits = 0; bits < 16; ++bits) {
        const bool s00 = bits & 1, s01 = bits & 2, s10 = bits & 4, s11 = bits & 8;
        auto u = (s00 ? pt[0] : F8->zero()) + (s01 ? pt[1] : F8->zero());
        auto v = (s10 ? pt[0] : F8->zero()) + (s11 ? pt[1] : F8->zero());
        auto det = F2->from_int((u64(s00) * s11 + u64(s01) * s10) % 2);
        res.record(moore_det({u, v}, 2) == embed(det, F8) * base, "equivariance");
    }

    // interpolation through the torsion plane and the membership split
    auto op = moore_interpolate(pt, 2);
    res.record(op.to_poly() == parse_poly(F8, "t^4+t^2+t"), "interpolation");
    unsigned roots = 0;
    for (const auto& x : F8->elements())
        if (op.eval(x).is_zero()) ++roots;
    res.record(roots == 4, "membership split");

    // every basis determinant lies in the t-torsion of the determinant module
    for (const auto& w1 : pts) {
        if (w1.is_zero()) continue;
        for (const auto& w2 : pts) {
            if (moore_det({w1, w2}, 2).is_zero()) continue;
            res.record(det_torsion_contains(psi, basis_determinant_point(psi, {w1, w2})),
                       "determinant point membership");
        }
    }
    return res;
}

/// theta = (-1)^r a_r M^(q-1) over every basis choice of the classic example
/// and across random top-normalized modules.
inline SuiteResult verify_leading_identity(u64 seed_base = 0) {
    SuiteResult res;
    res.name = "leading-identity";
    auto F2 = Field::get(2, 1);
    auto psi = DrinfeldModule::make(F2, F2, F2->one(), {F2->one(), F2->one()});
    auto T = torsion(psi, Poly::x(F2));
    for (const auto& w1 : T.points) {
        if (w1.is_zero()) continue;
        for (const auto& w2 : T.points) {
            if (w2.is_zero() || w2 == w1) continue;
            res.record(leading_coefficient_identity(psi, {w1, w2}), "classic basis");
            auto norm = normalize_level(psi, {w1, w2});
            res.record(coefficient_sum_vanishes(norm.psi), "classic normalized sum");
            res.record(leading_coefficient_identity(norm.psi, norm.basis),
                       "classic normalized identity");
        }
    }
    unsigned done = 0;
    for (u64 p : {2ULL, 3ULL})
        for (u64 s = 0; s < 10; ++s) {
            auto F = Field::get(p, 1);
            auto S = detail::grid_specialize(F, 2, Poly::x(F),
                                             derive_seed(seed_base, 900 + 16 * p + s));
            auto Tt = torsion(S.psi, Poly::x(F));
            auto basis = module_basis(Tt);
            std::ostringstream os;
            os << "random q=" << p << " seed=" << s;
            res.record(leading_coefficient_identity(S.psi, basis), os.str());
            ++done;
        }
    res.record(done == 20, "random module count");
    return res;
}

/// Twisting preserves the j-invariants and scales torsion points.
inline SuiteResult verify_twist_invariants(u64 seed_base = 0) {
    SuiteResult res;
    res.name = "twist-invariants";
    for (u64 p : {2ULL, 3ULL})
        for (unsigned r = 1; r <= 2; ++r)
            for (u64 s = 0; s < 5; ++s) {
                std::ostringstream os;
                os << "q=" << p << " r=" << r << " seed=" << s;
                try {
                    auto F = Field::get(p, 1);
                    auto S = detail::grid_specialize(F, r, Poly::x(F),
                                                     derive_seed(seed_base, 700 + 32 * p + s));
                    const auto& K = S.psi.field();
                    u64 size = 1;
                    for (unsigned i = 0; i < K->degree(); ++i) size *= K->p();
                    Rng rng(derive_seed(seed_base, 7000 + 32 * p + 8 * r + s));
                    FieldElem c = K->zero();
                    while (c.is_zero()) c = K->from_int(rng.below(size));
                    auto tw = twist(S.psi, c);
                    auto j0 = j_invariants(S.psi);
                    auto j1 = j_invariants(tw);
                    bool same = j0.size() == j1.size();
                    for (size_t i = 0; same && i < j0.size(); ++i) same = j0[i] == j1[i];
                    res.record(same, os.str() + " j-invariants");
                    auto T0 = torsion(S.psi, Poly::x(F));
                    auto T1 = torsion(tw, Poly::x(F));
                    bool scaled = T0.points.size() == T1.points.size();
                    if (scaled) {
                        auto ci = inv(embed(c, T0.ambient));
                        std::vector<std::string> want, got;
                        for (const auto& x : T0.points) want.push_back(elem_key(x * ci));
                        for (const auto& x : T1.points)
                            got.push_back(elem_key(embed(x, T0.ambient)));
                        std::sort(want.begin(), want.end());
                        std::sort(got.begin(), got.end());
                        scaled = want == got;
                    }
                    res.record(scaled, os.str() + " torsion scaling");
                } catch (const Error& e) {
                    res.record(false, os.str() + std::string(" threw: ") + e.what());
                }
            }
    return res;
}

/// Kernel factorizations, p-power abelianizations, and the frozen
/// abelianization orders of the small determinant-one groups.
inline SuiteResult verify_group_structure() {
    SuiteResult res;
    res.name = "group-structure";
    auto F2 = Field::get(2, 1);
    auto F3 = Field::get(3, 1);
    auto F4 = Field::get(2, 2);

    auto sl22 = GroupTable::from_elements(enumerate_invertible(F2, Poly::x(F2), 2, true));
    res.record(sl22.abelianization_order() == 2, "determinant-one mod 2 abelianization");
    auto sl23 = GroupTable::from_elements(enumerate_invertible(F3, Poly::x(F3), 2, true));
    res.record(sl23.abelianization_order() == 3, "determinant-one mod 3 abelianization");
    auto sl24 = GroupTable::from_elements(enumerate_invertible(F4, Poly::x(F4), 2, true));
    res.record(sl24.abelianization_order() == 1, "determinant-one over four elements");

    struct KCase {
        FieldPtr F;
        const char* n;
    };
    const KCase kcases[] = {{F2, "t"}, {F2, "t+1"}, {F3, "t"}, {F3, "t+1"}};
    for (const auto& c : kcases) {
        std::ostringstream os;
        os << "p=" << c.F->p() << " n=" << c.n;
        auto ks = kernel_subgroup(c.F, parse_poly(c.F, c.n), 2, true);
        auto g = GroupTable::from_elements(ks);
        u64 ab = g.abelianization_order();
        bool ppow = ab > 0;
        u64 v = ab;
        while (v % c.F->p() == 0) v /= c.F->p();
        ppow = ppow && v == 1;
        res.record(ppow, os.str() + " abelianization p-power");
        auto kf = kernel_factorization_check(c.F, 2, parse_poly(c.F, c.n));
        res.record(kf.det_split, os.str() + " determinant split");
        res.record(kf.reduction_split, os.str() + " reduction split");
    }

    auto kt = kernel_factorization_check(F2, 2, Poly::x(F2));
    res.record(kt.g_count == 16 && kt.s_count == 8 && kt.unit1_count == 2,
               "16 = 8 * 2");
    res.record(kt.gl_tn == 96 && kt.g_count * kt.gl_t == 96, "96 = 16 * 6");
    return res;
}

inline std::vector<SuiteResult> verify_all(u64 seed_base = 0) {
    return {verify_torsion_product(seed_base), verify_level_structures(seed_base),
            verify_moore_properties(),         verify_leading_identity(seed_base),
            verify_twist_invariants(seed_base), verify_group_structure()};
}

/// Runs one suite by name ("all" is handled by the caller via verify_all).
inline SuiteResult run_suite(const std::string& name, u64 seed_base = 0) {
    if (name == "torsion-product") return verify_torsion_product(seed_base);
    if (name == "level-structures") return verify_level_structures(seed_base);
    if (name == "moore") return verify_moore_properties();
    if (name == "leading-identity") return verify_leading_identity(seed_base);
    if (name == "twist-invariants") return verify_twist_invariants(seed_base);
    if (name == "group-structure") return verify_group_structure();
    fail_input("UnknownSuite", "no suite named '" + name + "'");
}

}  // namespace dmod
