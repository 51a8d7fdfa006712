#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dmod/drinfeld.hpp"
#include "dmod/groups.hpp"
#include "dmod/rand.hpp"

namespace dmod {

/// A module over a finite coefficient field, together with the level its
/// torsion is studied at.
struct Specialization {
    DrinfeldModule psi;
    Poly n;         // monic level over the base field
    unsigned m = 0;  // degree of the coefficient field over the base field
};

/// Draws a module of the requested rank over the degree-m extension: theta
/// is sampled so that both theta and n(theta) are nonzero (so the level stays
/// prime to the characteristic and determinant checks at t make sense), the
/// middle coefficients are uniform, and the top coefficient is 1.
inline Specialization specialize(const FieldPtr& Fq, unsigned r, const Poly& n0, unsigned m,
                                 u64 seed, u64 attempt_cap = 256) {
    if (r == 0) fail_input("RankZero", "rank must be positive");
    if (m == 0) fail_input("InvalidInput", "the coefficient field needs positive degree");
    if (!n0.field()->same(*Fq)) fail_input("FieldMismatch", "level is not over the base field");
    if (n0.degree() < 1) fail_input("InvalidModulus", "level must have positive degree");
    const Poly n = monic(n0);
    auto K = Field::extension(Fq, m);
    u64 size = 1;
    for (unsigned i = 0; i < K->degree(); ++i) {
        if (size > (1ULL << 40) / K->p()) fail_cap("CapExceeded", "coefficient field too large");
        size *= K->p();
    }
    Rng rng(derive_seed(seed, 0x73706563ULL));
    auto good = [&](const FieldElem& th) {
        return !th.is_zero() && !n.eval(th).is_zero();
    };
    FieldElem theta;
    bool found = false;
    for (u64 a = 0; a < attempt_cap && !found; ++a) {
        auto th = K->from_int(rng.below(size));
        if (good(th)) {
            theta = th;
            found = true;
        }
    }
    for (u64 v = 0; v < size && !found; ++v) {
        auto th = K->from_int(v);
        if (good(th)) {
            theta = th;
            found = true;
        }
    }
    if (!found)
        fail_input("NoGoodTheta", "no point of the extension keeps the level etale");
    std::vector<FieldElem> a;
    for (unsigned i = 1; i < r; ++i) a.push_back(K->from_int(rng.below(size)));
    a.push_back(K->one());
    Specialization S;
    S.psi = DrinfeldModule::make(Fq, K, theta, std::move(a));
    S.n = n;
    S.m = m;
    return S;
}

/// Frobenius data at one specialization: the matrix of x -> x^(#K) on the
/// level-n torsion in a fixed free basis, with its invariants.
struct FrobeniusSample {
    Specialization spec;
    TorsionModule torsion;
    std::vector<FieldElem> basis;
    ResidueMatrix matrix;
    std::vector<Poly> charpoly;       // constant term first, monic
    u64 order = 0;                    // multiplicative order of the matrix
    unsigned splitting_degree = 0;    // ambient degree over the coefficient field
};

inline FrobeniusSample frobenius_sample(const Specialization& S) {
    FrobeniusSample out;
    out.spec = S;
    out.torsion = torsion(S.psi, S.n);
    out.basis = module_basis(out.torsion);
    TorsionCoordinates coords(out.torsion, out.basis);
    const unsigned r = S.psi.rank();
    std::vector<Poly> entries(static_cast<size_t>(r) * r, Poly::zero(S.psi.base_field()));
    for (unsigned j = 0; j < r; ++j) {
        auto img = frobenius_power(out.basis[j], S.psi.q(), S.m);
        auto col = coords.coords(img);
        for (unsigned i = 0; i < r; ++i) entries[i * r + j] = col[i];
    }
    out.matrix = ResidueMatrix::from_entries(S.psi.base_field(), out.torsion.n, r,
                                             std::move(entries));
    out.charpoly = charpoly(out.matrix);
    out.order = out.matrix.order();
    out.splitting_degree = out.torsion.steps;
    check_internal(out.order == out.splitting_degree,
                   "matrix order must match the splitting degree");
    return out;
}

inline ResidueMatrix frobenius_matrix(const Specialization& S) {
    return frobenius_sample(S).matrix;
}

/// Cross-check: the determinant of the torsion Frobenius matrix equals the
/// 1x1 Frobenius of the rank-1 determinant module at the same level.
inline bool det_matches_det_module(const FrobeniusSample& s) {
    Specialization D;
    D.psi = det_module(s.spec.psi);
    D.n = s.spec.n;
    D.m = s.spec.m;
    auto d = frobenius_sample(D);
    return d.matrix.at(0, 0) == mod_n(s.matrix.det(), s.torsion.n);
}

/// Outcome of a surjectivity certification run.
struct CertificationReport {
    FieldPtr base;
    unsigned rank = 0;
    Poly level;
    unsigned requested = 0;           // samples asked for
    u64 group_order = 0;              // |GL_r(F_q[t]/(n))|
    std::string method;               // "subgroup-lattice" or "abelian-shortcut"
    bool certified = false;
    std::string verdict;              // "certified" or "inconclusive"
    bool det_checked = false;         // determinant cross-check ran (level t)
    bool det_consistent = true;
    std::vector<FrobeniusSample> samples;
};

/// Samples Frobenius matrices over rotating extension degrees and decides
/// whether their conjugacy classes force the full matrix group.  A
/// "certified" verdict is a proof of fullness for any group containing one
/// member of each sampled class; "inconclusive" only means the samples were
/// not enough.
inline CertificationReport certify(const FieldPtr& Fq, unsigned r, const Poly& n0,
                                   unsigned samples = 64, u64 seed = 1) {
    if (r == 0) fail_input("RankZero", "rank must be positive");
    if (n0.degree() < 1) fail_input("InvalidModulus", "level must have positive degree");
    const Poly n = monic(n0);
    CertificationReport rep;
    rep.base = Fq;
    rep.rank = r;
    rep.level = n;
    rep.requested = samples;
    rep.group_order = gl_order(Fq, r, n);
    rep.method = (r == 1) ? "abelian-shortcut" : "subgroup-lattice";

    auto table = GroupTable::from_elements(enumerate_invertible(Fq, n, r, false));
    check_internal(table.size() == rep.group_order, "group order mismatch");

    const Poly t = Poly::x(Fq);
    std::vector<u32> witness;
    for (unsigned i = 0; i < samples; ++i) {
        Specialization S;
        bool have = false;
        const unsigned m0 = 1 + (i % 3);
        for (unsigned m = m0; m < m0 + 6 && !have; ++m) {
            try {
                S = specialize(Fq, r, n, m, derive_seed(seed, i));
                have = true;
            } catch (const Error& e) {
                if (e.code() != "NoGoodTheta") throw;
            }
        }
        if (!have)
            fail_input("NoGoodTheta", "no usable specialization at any tried degree");
        auto s = frobenius_sample(S);
        if (n == t) {
            rep.det_checked = true;
            if (!det_matches_det_module(s)) rep.det_consistent = false;
        }
        witness.push_back(table.index_of(s.matrix));
        rep.samples.push_back(std::move(s));
    }

    if (r == 1)
        rep.certified = table.closure_indices(witness).size() == table.size();
    else
        rep.certified = conjugacy_certify(table, witness);
    rep.verdict = rep.certified ? "certified" : "inconclusive";
    return rep;
}

}  // namespace dmod
