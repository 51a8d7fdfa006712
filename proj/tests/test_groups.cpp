#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <string>
#include <vector>

#include <dmod/groups.hpp>
#include <dmod/rand.hpp>

using dmod::Error;
using dmod::ErrorKind;
using dmod::Field;
using dmod::FieldPtr;
using dmod::GroupTable;
using dmod::Poly;
using dmod::ResidueMatrix;
using dmod::u32;
using dmod::u64;

namespace {

ResidueMatrix mk(const FieldPtr& F, const Poly& n, unsigned r,
                 std::initializer_list<const char*> entries) {
    std::vector<Poly> es;
    for (auto* s : entries) es.push_back(dmod::parse_poly(F, s));
    return ResidueMatrix::from_entries(F, n, r, std::move(es));
}

u64 field_size(const FieldPtr& F) {
    u64 s = 1;
    for (unsigned i = 0; i < F->degree(); ++i) s *= F->p();
    return s;
}

ResidueMatrix random_matrix(const FieldPtr& F, const Poly& n, unsigned r, dmod::Rng& rng) {
    const u64 q = field_size(F);
    u64 res_count = 1;
    for (int i = 0; i < n.degree(); ++i) res_count *= q;
    std::vector<Poly> es;
    for (unsigned k = 0; k < r * r; ++k)
        es.push_back(dmod::residue_from_value(F, q, n.degree(), rng.below(res_count)));
    return ResidueMatrix::from_entries(F, n, r, std::move(es));
}

std::vector<std::string> key_set(const std::vector<ResidueMatrix>& ms) {
    std::vector<std::string> ks;
    for (const auto& m : ms) ks.push_back(m.key());
    std::sort(ks.begin(), ks.end());
    return ks;
}

bool is_power_of(u64 v, u64 p) {
    if (v == 0) return false;
    while (v % p == 0) v /= p;
    return v == 1;
}

}  // namespace

TEST_CASE("residue matrix arithmetic", "[groups]") {
    auto F2 = Field::get(2, 1);
    auto F3 = Field::get(3, 1);
    const Poly t2 = Poly::x(F2);
    const Poly t3 = Poly::x(F3);

    SECTION("construction reduces entries") {
        auto n = dmod::parse_poly(F2, "t^2+1");
        auto m = mk(F2, n, 1, {"t^3"});
        // t^3 = t*(t^2+1) + t
        REQUIRE(m.at(0, 0) == dmod::parse_poly(F2, "t"));
        REQUIRE_THROWS_AS(ResidueMatrix::from_entries(F2, n, 2, {Poly::one(F2)}), Error);
        REQUIRE_THROWS_AS(ResidueMatrix::from_entries(F2, Poly::one(F2), 1, {Poly::one(F2)}),
                          Error);
        REQUIRE_THROWS_AS(
            ResidueMatrix::from_entries(F3, dmod::parse_poly(F3, "2t"), 1, {Poly::one(F3)}),
            Error);
    }

    SECTION("determinants") {
        REQUIRE(mk(F2, t2, 2, {"1", "1", "0", "1"}).det() == Poly::one(F2));
        // det [[t,1],[1,t]] = t^2 - 1 = -2 = 1 mod (t^2+1) over F_3
        auto n = dmod::parse_poly(F3, "t^2+1");
        REQUIRE(mk(F3, n, 2, {"t", "1", "1", "t"}).det() == Poly::one(F3));
        REQUIRE(mk(F2, t2, 2, {"1", "1", "1", "1"}).det().is_zero());
        // 3x3: det of the permutation matrix (1 2 3) is +1
        auto p3 = mk(F3, t3, 3, {"0", "1", "0", "0", "0", "1", "1", "0", "0"});
        REQUIRE(p3.det() == Poly::one(F3));
        // multiplicativity on random pairs
        dmod::Rng rng(301);
        auto nn = dmod::parse_poly(F3, "t^2");
        for (int it = 0; it < 40; ++it) {
            auto a = random_matrix(F3, nn, 2, rng);
            auto b = random_matrix(F3, nn, 2, rng);
            REQUIRE(a.mul(b).det() == dmod::mul_mod(a.det(), b.det(), nn));
        }
    }

    SECTION("inverse and invertibility") {
        auto m = mk(F2, t2, 2, {"1", "1", "0", "1"});
        REQUIRE(m.inverse() == m);  // involution over F_2
        REQUIRE(m.mul(m.inverse()) == ResidueMatrix::identity(F2, t2, 2));
        REQUIRE_FALSE(mk(F2, t2, 2, {"1", "1", "1", "1"}).is_invertible());
        REQUIRE_THROWS_AS(mk(F2, t2, 2, {"1", "1", "1", "1"}).inverse(), Error);
        auto nn = dmod::parse_poly(F2, "t^2");
        REQUIRE_FALSE(mk(F2, nn, 2, {"t", "0", "0", "1"}).is_invertible());
        REQUIRE_THROWS_AS(mk(F2, nn, 2, {"t", "0", "0", "1"}).inverse(), Error);

        dmod::Rng rng(302);
        auto n3 = dmod::parse_poly(F3, "t^2+1");
        auto id = ResidueMatrix::identity(F3, n3, 2);
        int seen = 0;
        for (int it = 0; it < 60 && seen < 25; ++it) {
            auto a = random_matrix(F3, n3, 2, rng);
            if (!a.is_invertible()) continue;
            ++seen;
            REQUIRE(a.mul(a.inverse()) == id);
            REQUIRE(a.inverse().mul(a) == id);
        }
        REQUIRE(seen >= 25);
    }

    SECTION("powers and orders") {
        auto c = mk(F2, t2, 2, {"0", "1", "1", "1"});
        REQUIRE(c.order() == 3);
        REQUIRE(c.pow(3) == ResidueMatrix::identity(F2, t2, 2));
        REQUIRE(c.pow(0) == ResidueMatrix::identity(F2, t2, 2));
        REQUIRE(c.pow(2) == c.mul(c));
        REQUIRE(mk(F2, t2, 2, {"0", "1", "1", "0"}).order() == 2);
        REQUIRE(ResidueMatrix::identity(F2, t2, 2).order() == 1);
        try {
            (void)c.order(2);
            FAIL("cap should trip");
        } catch (const Error& e) {
            REQUIRE(e.kind() == ErrorKind::CapExceeded);
        }
        // scale and add round out the ring operations
        auto s = c.scale(Poly::one(F2));
        REQUIRE(s == c);
        REQUIRE(c.add(c) == ResidueMatrix::zero(F2, t2, 2));
    }
}

TEST_CASE("general linear group orders match enumeration", "[groups]") {
    auto F2 = Field::get(2, 1);
    auto F3 = Field::get(3, 1);
    auto F4 = Field::get(2, 2);

    struct Case {
        FieldPtr F;
        const char* n;
        unsigned r;
        u64 gl;
        u64 sl;
    };
    const Case cases[] = {
        {F2, "t", 2, 6, 6},
        {F3, "t", 2, 48, 24},
        {F2, "t^2", 2, 96, 48},
        {F2, "t^2+t", 2, 36, 36},
        {F2, "t^2+t+1", 2, 180, 60},
        {F2, "t", 3, 168, 168},
        {F4, "t", 2, 180, 60},
        {F3, "t^2", 1, 6, 1},
        {F4, "t", 1, 3, 1},
    };
    for (const auto& c : cases) {
        INFO("modulus " << c.n << " r=" << c.r);
        auto n = dmod::parse_poly(c.F, c.n);
        auto gl = dmod::enumerate_invertible(c.F, n, c.r, false);
        auto sl = dmod::enumerate_invertible(c.F, n, c.r, true);
        REQUIRE(gl.size() == c.gl);
        REQUIRE(sl.size() == c.sl);
        REQUIRE(dmod::gl_order(c.F, c.r, n) == c.gl);
        REQUIRE(dmod::sl_order(c.F, c.r, n) == c.sl);
    }

    SECTION("enumerated sets are groups") {
        auto n = dmod::parse_poly(F2, "t^2");
        auto gl = dmod::enumerate_invertible(F2, n, 2, false);
        std::set<std::string> keys;
        for (const auto& m : gl) keys.insert(m.key());
        REQUIRE(keys.size() == gl.size());
        dmod::Rng rng(310);
        for (int it = 0; it < 50; ++it) {
            const auto& a = gl[rng.below(gl.size())];
            const auto& b = gl[rng.below(gl.size())];
            REQUIRE(keys.count(a.mul(b).key()) == 1);
            REQUIRE(keys.count(a.inverse().key()) == 1);
        }
    }

    SECTION("caps and validation") {
        auto n = dmod::parse_poly(F3, "t^2");
        try {
            (void)dmod::enumerate_invertible(F3, n, 2, false, 100);
            FAIL("cap should trip");
        } catch (const Error& e) {
            REQUIRE(e.kind() == ErrorKind::CapExceeded);
        }
        REQUIRE_THROWS_AS(dmod::gl_order(F2, 2, Poly::one(F2)), Error);
        REQUIRE_THROWS_AS(dmod::enumerate_invertible(F2, Poly::one(F2), 2), Error);
    }
}

TEST_CASE("kernel subgroups of the mod-t reduction", "[groups]") {
    auto F2 = Field::get(2, 1);
    auto F3 = Field::get(3, 1);

    SECTION("sizes") {
        REQUIRE(dmod::kernel_subgroup(F2, Poly::x(F2), 2, false).size() == 16);
        REQUIRE(dmod::kernel_subgroup(F2, Poly::x(F2), 2, true).size() == 8);
        REQUIRE(dmod::kernel_subgroup(F3, Poly::x(F3), 2, false).size() == 81);
        REQUIRE(dmod::kernel_subgroup(F3, Poly::x(F3), 2, true).size() == 27);
        REQUIRE(dmod::kernel_subgroup(F2, dmod::parse_poly(F2, "t+1"), 2, false).size() == 6);
        REQUIRE(dmod::kernel_subgroup(F2, dmod::parse_poly(F2, "t+1"), 2, true).size() == 6);
        REQUIRE(dmod::kernel_subgroup(F3, dmod::parse_poly(F3, "t+1"), 2, false).size() == 48);
        REQUIRE(dmod::kernel_subgroup(F3, dmod::parse_poly(F3, "t+1"), 2, true).size() == 24);
        REQUIRE(dmod::kernel_subgroup(F2, Poly::one(F2), 2, false).size() == 1);
    }

    SECTION("members reduce to the identity mod t") {
        auto ks = dmod::kernel_subgroup(F3, Poly::x(F3), 2, false);
        const Poly t = Poly::x(F3);
        for (const auto& m : ks)
            for (unsigned i = 0; i < 2; ++i)
                for (unsigned j = 0; j < 2; ++j) {
                    auto c = dmod::mod_n(m.at(i, j), t);
                    if (i == j)
                        REQUIRE(c == Poly::one(F3));
                    else
                        REQUIRE(c.is_zero());
                }
    }

    SECTION("agrees with filtering the full group") {
        // independent derivation: take all invertible matrices mod t^2 and
        // keep those congruent to the identity mod t
        auto n = dmod::parse_poly(F2, "t^2");
        const Poly t = Poly::x(F2);
        std::vector<std::string> filtered;
        for (const auto& m : dmod::enumerate_invertible(F2, n, 2, false)) {
            bool ok = true;
            for (unsigned i = 0; i < 2 && ok; ++i)
                for (unsigned j = 0; j < 2 && ok; ++j) {
                    auto c = dmod::mod_n(m.at(i, j), t);
                    ok = (i == j) ? (c == Poly::one(F2)) : c.is_zero();
                }
            if (ok) filtered.push_back(m.key());
        }
        std::sort(filtered.begin(), filtered.end());
        REQUIRE(filtered == key_set(dmod::kernel_subgroup(F2, Poly::x(F2), 2, false)));
    }

    SECTION("closed under products") {
        auto ks = dmod::kernel_subgroup(F3, Poly::x(F3), 2, true);
        std::set<std::string> keys;
        for (const auto& m : ks) keys.insert(m.key());
        dmod::Rng rng(320);
        for (int it = 0; it < 40; ++it) {
            const auto& a = ks[rng.below(ks.size())];
            const auto& b = ks[rng.below(ks.size())];
            REQUIRE(keys.count(a.mul(b).key()) == 1);
        }
    }
}

TEST_CASE("group tables and closures", "[groups]") {
    auto F2 = Field::get(2, 1);
    auto F3 = Field::get(3, 1);
    const Poly t = Poly::x(F2);
    auto c = mk(F2, t, 2, {"0", "1", "1", "1"});      // order 3
    auto sw = mk(F2, t, 2, {"0", "1", "1", "0"});     // order 2

    SECTION("closure of one generator") {
        auto g = GroupTable::closure_of({c});
        REQUIRE(g.size() == 3);
        REQUIRE(g.elem(0) == ResidueMatrix::identity(F2, t, 2));
        REQUIRE(g.contains(c));
        REQUIRE(g.contains(c.mul(c)));
        REQUIRE_FALSE(g.contains(sw));
        REQUIRE_THROWS_AS(g.index_of(sw), Error);
        REQUIRE(g.element_order(g.index_of(c)) == 3);
    }

    SECTION("closure of two generators is the whole group") {
        auto g = GroupTable::closure_of({c, sw});
        REQUIRE(g.size() == 6);
        std::vector<ResidueMatrix> elems;
        for (u32 i = 0; i < g.size(); ++i) elems.push_back(g.elem(i));
        REQUIRE(key_set(elems) == key_set(dmod::enumerate_invertible(F2, t, 2, false)));
    }

    SECTION("table axioms") {
        auto g = GroupTable::from_elements(dmod::enumerate_invertible(F3, Poly::x(F3), 2, false));
        REQUIRE(g.size() == 48);
        dmod::Rng rng(330);
        for (int it = 0; it < 100; ++it) {
            u32 a = static_cast<u32>(rng.below(g.size()));
            u32 b = static_cast<u32>(rng.below(g.size()));
            u32 d = static_cast<u32>(rng.below(g.size()));
            REQUIRE(g.mul(g.mul(a, b), d) == g.mul(a, g.mul(b, d)));
            REQUIRE(g.mul(a, g.inv(a)) == g.id());
            REQUIRE(g.mul(g.inv(a), a) == g.id());
            REQUIRE(g.mul(a, g.id()) == a);
            // the table matches matrix multiplication
            REQUIRE(g.elem(g.mul(a, b)) == g.elem(a).mul(g.elem(b)));
            REQUIRE(g.index_of(g.elem(a)) == a);
        }
    }

    SECTION("caps and validation") {
        try {
            (void)GroupTable::closure_of({c, sw}, 4);
            FAIL("cap should trip");
        } catch (const Error& e) {
            REQUIRE(e.kind() == ErrorKind::CapExceeded);
        }
        // a list that is not closed under products is rejected
        try {
            (void)GroupTable::from_elements({ResidueMatrix::identity(F2, t, 2), c});
            FAIL("non-closed list should be rejected");
        } catch (const Error& e) {
            REQUIRE(e.kind() == ErrorKind::Internal);
        }
        REQUIRE_THROWS_AS(GroupTable::closure_of({}), Error);
    }

    SECTION("unit groups as 1x1 tables") {
        auto n = dmod::parse_poly(F3, "t^2");
        auto g = GroupTable::from_elements(dmod::enumerate_invertible(F3, n, 1, false));
        REQUIRE(g.size() == 6);
        u64 best = 0;
        for (u32 i = 0; i < g.size(); ++i) best = std::max(best, g.element_order(i));
        REQUIRE(best == 6);  // the unit group of F_3[t]/(t^2) is cyclic
        REQUIRE(g.abelianization_order() == 6);
        REQUIRE(g.derived_subgroup().size() == 1);
    }
}

TEST_CASE("derived subgroups and abelianizations", "[groups]") {
    auto F2 = Field::get(2, 1);
    auto F3 = Field::get(3, 1);
    auto F4 = Field::get(2, 2);

    SECTION("classical groups") {
        auto gl22 = GroupTable::from_elements(dmod::enumerate_invertible(F2, Poly::x(F2), 2));
        REQUIRE(gl22.derived_subgroup().size() == 3);
        REQUIRE(gl22.abelianization_order() == 2);

        auto sl23 = GroupTable::from_elements(
            dmod::enumerate_invertible(F3, Poly::x(F3), 2, true));
        REQUIRE(sl23.derived_subgroup().size() == 8);
        REQUIRE(sl23.abelianization_order() == 3);

        auto sl24 = GroupTable::from_elements(
            dmod::enumerate_invertible(F4, Poly::x(F4), 2, true));
        REQUIRE(sl24.abelianization_order() == 1);  // perfect
        REQUIRE(sl24.derived_subgroup().size() == 60);

        auto gl23 = GroupTable::from_elements(dmod::enumerate_invertible(F3, Poly::x(F3), 2));
        REQUIRE(gl23.derived_subgroup().size() == 24);
        REQUIRE(gl23.abelianization_order() == 2);

        auto gl24 = GroupTable::from_elements(dmod::enumerate_invertible(F4, Poly::x(F4), 2));
        REQUIRE(gl24.abelianization_order() == 3);
    }

    SECTION("determinant-one kernels abelianize to p-groups") {
        struct Case {
            FieldPtr F;
            const char* n;
        };
        const Case cases[] = {
            {F2, "t"}, {F2, "t+1"}, {F3, "t"}, {F3, "t+1"}};
        for (const auto& c : cases) {
            INFO("q=" << field_size(c.F) << " n=" << c.n);
            auto ks = dmod::kernel_subgroup(c.F, dmod::parse_poly(c.F, c.n), 2, true);
            auto g = GroupTable::from_elements(ks);
            REQUIRE(is_power_of(g.abelianization_order(), c.F->p()));
        }
        // frozen values behind the property
        auto s2t = GroupTable::from_elements(dmod::kernel_subgroup(F2, Poly::x(F2), 2, true));
        REQUIRE(s2t.abelianization_order() == 8);  // abelian of order 8
        auto s3t = GroupTable::from_elements(dmod::kernel_subgroup(F3, Poly::x(F3), 2, true));
        REQUIRE(s3t.abelianization_order() == 27);
        auto s2u = GroupTable::from_elements(
            dmod::kernel_subgroup(F2, dmod::parse_poly(F2, "t+1"), 2, true));
        REQUIRE(s2u.abelianization_order() == 2);
        auto s3u = GroupTable::from_elements(
            dmod::kernel_subgroup(F3, dmod::parse_poly(F3, "t+1"), 2, true));
        REQUIRE(s3u.abelianization_order() == 3);
    }
}

TEST_CASE("conjugacy classes", "[groups]") {
    auto F2 = Field::get(2, 1);
    auto F3 = Field::get(3, 1);
    auto g = GroupTable::from_elements(dmod::enumerate_invertible(F2, Poly::x(F2), 2));

    SECTION("partition of the symmetric group on three letters") {
        std::set<std::vector<u32>> classes;
        for (u32 i = 0; i < g.size(); ++i) classes.insert(g.conjugacy_class(i));
        std::vector<size_t> sizes;
        size_t total = 0;
        for (const auto& c : classes) {
            sizes.push_back(c.size());
            total += c.size();
        }
        std::sort(sizes.begin(), sizes.end());
        REQUIRE(sizes == std::vector<size_t>{1, 2, 3});
        REQUIRE(total == g.size());
        REQUIRE(g.conjugacy_class(g.id()) == std::vector<u32>{g.id()});
    }

    SECTION("classes are closed under conjugation") {
        for (u32 x = 0; x < g.size(); ++x) {
            auto cls = g.conjugacy_class(x);
            std::set<u32> cs(cls.begin(), cls.end());
            REQUIRE(cs.count(x) == 1);
            for (u32 h = 0; h < g.size(); ++h)
                REQUIRE(cs.count(g.mul(g.mul(h, x), g.inv(h))) == 1);
        }
    }

    SECTION("class sizes of the determinant-one group mod three") {
        auto sl = GroupTable::from_elements(
            dmod::enumerate_invertible(F3, Poly::x(F3), 2, true));
        std::set<std::vector<u32>> classes;
        for (u32 i = 0; i < sl.size(); ++i) classes.insert(sl.conjugacy_class(i));
        std::vector<size_t> sizes;
        for (const auto& c : classes) sizes.push_back(c.size());
        std::sort(sizes.begin(), sizes.end());
        REQUIRE(sizes == std::vector<size_t>{1, 1, 4, 4, 4, 4, 6});
    }
}

TEST_CASE("subgroup lattices", "[groups]") {
    auto F2 = Field::get(2, 1);
    auto F3 = Field::get(3, 1);

    SECTION("all subgroups of the order-six matrix group") {
        auto g = GroupTable::from_elements(dmod::enumerate_invertible(F2, Poly::x(F2), 2));
        auto subs = g.all_subgroups();
        std::vector<u32> sizes;
        for (const auto& s : subs) sizes.push_back(s.count);
        std::sort(sizes.begin(), sizes.end());
        REQUIRE(sizes == std::vector<u32>{1, 2, 2, 2, 3, 6});
    }

    SECTION("subgroup counts match classical values") {
        // the determinant-one group mod 3 has exactly 15 subgroups
        auto sl = GroupTable::from_elements(
            dmod::enumerate_invertible(F3, Poly::x(F3), 2, true));
        REQUIRE(sl.all_subgroups().size() == 15);

        // an elementary abelian group of order 16 has 67 subgroups
        // (the number of subspaces of a 4-dimensional binary vector space)
        auto ker = GroupTable::from_elements(dmod::kernel_subgroup(F2, Poly::x(F2), 2, false));
        REQUIRE(ker.size() == 16);
        REQUIRE(ker.all_subgroups().size() == 67);
    }

    SECTION("every reported subgroup is a subgroup") {
        auto sl = GroupTable::from_elements(
            dmod::enumerate_invertible(F3, Poly::x(F3), 2, true));
        for (const auto& s : sl.all_subgroups()) {
            std::vector<u32> members;
            for (u32 i = 0; i < sl.size(); ++i)
                if (s.test(i)) members.push_back(i);
            REQUIRE(members.size() == s.count);
            REQUIRE(sl.size() % s.count == 0);  // Lagrange
            REQUIRE(sl.closure_indices(members) == members);
        }
    }
}

TEST_CASE("conjugacy class certification", "[groups]") {
    auto F2 = Field::get(2, 1);
    auto F3 = Field::get(3, 1);
    const Poly t = Poly::x(F2);
    auto c = mk(F2, t, 2, {"0", "1", "1", "1"});
    auto sw = mk(F2, t, 2, {"0", "1", "1", "0"});
    auto g = GroupTable::from_elements(dmod::enumerate_invertible(F2, t, 2));

    SECTION("order three plus order two pins the full group") {
        REQUIRE(dmod::conjugacy_certify(g, {g.index_of(c), g.index_of(sw)}));
        // the identity class changes nothing
        REQUIRE(dmod::conjugacy_certify(g, {g.id(), g.index_of(c), g.index_of(sw)}));
    }

    SECTION("single classes are met by proper subgroups") {
        REQUIRE_FALSE(dmod::conjugacy_certify(g, {g.index_of(c)}));
        REQUIRE_FALSE(dmod::conjugacy_certify(g, {g.index_of(sw)}));
        REQUIRE_FALSE(dmod::conjugacy_certify(g, {}));
        REQUIRE_FALSE(dmod::conjugacy_certify(g, {g.id()}));
    }

    SECTION("certified samples generate from any representatives") {
        auto cls_c = g.conjugacy_class(g.index_of(c));
        auto cls_s = g.conjugacy_class(g.index_of(sw));
        for (u32 a : cls_c)
            for (u32 b : cls_s)
                REQUIRE(g.closure_indices({a, b}).size() == g.size());
    }

    SECTION("trivial group") {
        auto one = GroupTable::closure_of({ResidueMatrix::identity(F2, t, 2)});
        REQUIRE(one.size() == 1);
        REQUIRE(dmod::conjugacy_certify(one, {}));
        REQUIRE(dmod::conjugacy_certify(one, {one.id()}));
    }

    SECTION("triangular samples do not certify the mod-three group") {
        auto gl = GroupTable::from_elements(dmod::enumerate_invertible(F3, Poly::x(F3), 2));
        auto unip = mk(F3, Poly::x(F3), 2, {"1", "1", "0", "1"});
        auto diag = mk(F3, Poly::x(F3), 2, {"2", "0", "0", "1"});
        // both lie in the upper triangular subgroup of order 12
        REQUIRE_FALSE(
            dmod::conjugacy_certify(gl, {gl.index_of(unip), gl.index_of(diag)}));
        // an order-8 element (irreducible characteristic polynomial) plus a
        // unipotent rules out every proper subgroup
        auto m8 = mk(F3, Poly::x(F3), 2, {"0", "1", "1", "2"});
        REQUIRE(m8.order() == 8);
        REQUIRE(dmod::conjugacy_certify(gl, {gl.index_of(m8), gl.index_of(unip)}));
    }

    SECTION("abelian groups certify exactly when samples generate") {
        auto n = dmod::parse_poly(F3, "t^2");
        auto u = GroupTable::from_elements(dmod::enumerate_invertible(F3, n, 1));
        REQUIRE(u.size() == 6);
        u32 gen6 = 0, elt2 = 0, elt3 = 0;
        for (u32 i = 0; i < u.size(); ++i) {
            if (u.element_order(i) == 6) gen6 = i;
            if (u.element_order(i) == 2) elt2 = i;
            if (u.element_order(i) == 3) elt3 = i;
        }
        REQUIRE(u.element_order(gen6) == 6);
        REQUIRE(dmod::conjugacy_certify(u, {gen6}));
        REQUIRE(dmod::conjugacy_certify(u, {elt2, elt3}));
        REQUIRE_FALSE(dmod::conjugacy_certify(u, {elt2}));
        REQUIRE_FALSE(dmod::conjugacy_certify(u, {elt3}));
        REQUIRE(u.closure_indices({elt2, elt3}).size() == u.size());
        REQUIRE(u.closure_indices({elt3}).size() == 3);
    }
}

TEST_CASE("characteristic polynomials of residue matrices", "[groups]") {
    auto F2 = Field::get(2, 1);
    auto F3 = Field::get(3, 1);

    SECTION("frozen examples") {
        auto c = mk(F2, Poly::x(F2), 2, {"0", "1", "1", "1"});
        auto cp = dmod::charpoly(c);
        REQUIRE(cp.size() == 3);
        REQUIRE(cp[0] == Poly::one(F2));
        REQUIRE(cp[1] == Poly::one(F2));
        REQUIRE(cp[2] == Poly::one(F2));

        auto n = dmod::parse_poly(F2, "t^2");
        auto m = mk(F2, n, 2, {"t", "1", "0", "1"});
        auto cp2 = dmod::charpoly(m);
        REQUIRE(cp2[0] == dmod::parse_poly(F2, "t"));
        REQUIRE(cp2[1] == dmod::parse_poly(F2, "t+1"));
        REQUIRE(cp2[2] == Poly::one(F2));

        auto n3 = dmod::parse_poly(F3, "t^2+1");
        auto m1 = mk(F3, n3, 1, {"t+2"});
        auto cp1 = dmod::charpoly(m1);
        REQUIRE(cp1[0] == dmod::parse_poly(F3, "2t+1"));
        REQUIRE(cp1[1] == Poly::one(F3));

        auto id3 = ResidueMatrix::identity(F2, Poly::x(F2), 3);
        auto cpi = dmod::charpoly(id3);
        REQUIRE(cpi.size() == 4);
        for (const auto& co : cpi) REQUIRE(co == Poly::one(F2));
    }

    SECTION("degree, trace, determinant, and the matrix as a root") {
        struct Case {
            FieldPtr F;
            const char* n;
            unsigned r;
        };
        const Case cases[] = {{Field::get(3, 1), "t^2", 2}, {Field::get(2, 1), "t", 3}};
        for (const auto& cse : cases) {
            auto n = dmod::parse_poly(cse.F, cse.n);
            dmod::Rng rng(340 + cse.r);
            for (int it = 0; it < 30; ++it) {
                auto m = random_matrix(cse.F, n, cse.r, rng);
                auto cp = dmod::charpoly(m);
                REQUIRE(cp.size() == cse.r + 1);
                REQUIRE(cp[cse.r] == Poly::one(cse.F));
                // constant term is (-1)^r det
                Poly d = m.det();
                if (cse.r % 2 == 1) d = Poly::zero(cse.F) - d;
                REQUIRE(cp[0] == d);
                // next-to-top coefficient is minus the trace
                Poly tr = Poly::zero(cse.F);
                for (unsigned i = 0; i < cse.r; ++i) tr = tr + m.at(i, i);
                REQUIRE(cp[cse.r - 1] == dmod::mod_n(Poly::zero(cse.F) - tr, n));
                // the matrix satisfies its own characteristic polynomial
                auto acc = ResidueMatrix::zero(cse.F, n, cse.r);
                auto id = ResidueMatrix::identity(cse.F, n, cse.r);
                for (unsigned i = cp.size(); i-- > 0;)
                    acc = acc.mul(m).add(id.scale(cp[i]));
                REQUIRE(acc == ResidueMatrix::zero(cse.F, n, cse.r));
            }
        }
    }
}

TEST_CASE("kernel determinant factorization", "[groups]") {
    auto F2 = Field::get(2, 1);
    auto F3 = Field::get(3, 1);
    auto F4 = Field::get(2, 2);

    SECTION("frozen counts") {
        auto k = dmod::kernel_factorization_check(F2, 2, Poly::x(F2));
        REQUIRE(k.g_count == 16);
        REQUIRE(k.s_count == 8);
        REQUIRE(k.unit1_count == 2);
        REQUIRE(k.gl_tn == 96);
        REQUIRE(k.gl_t == 6);
        REQUIRE(k.det_split);
        REQUIRE(k.reduction_split);

        auto k3 = dmod::kernel_factorization_check(F3, 2, Poly::x(F3));
        REQUIRE(k3.g_count == 81);
        REQUIRE(k3.s_count == 27);
        REQUIRE(k3.unit1_count == 3);
        REQUIRE(k3.gl_tn == 3888);
        REQUIRE(k3.gl_t == 48);
        REQUIRE(k3.det_split);
        REQUIRE(k3.reduction_split);

        auto ku = dmod::kernel_factorization_check(F2, 2, dmod::parse_poly(F2, "t+1"));
        REQUIRE(ku.g_count == 6);
        REQUIRE(ku.s_count == 6);
        REQUIRE(ku.unit1_count == 1);
        REQUIRE(ku.gl_tn == 36);
        REQUIRE(ku.det_split);
        REQUIRE(ku.reduction_split);

        auto k4 = dmod::kernel_factorization_check(F4, 1, Poly::x(F4));
        REQUIRE(k4.g_count == 4);
        REQUIRE(k4.s_count == 1);
        REQUIRE(k4.unit1_count == 4);
        REQUIRE(k4.gl_tn == 12);
        REQUIRE(k4.gl_t == 3);
        REQUIRE(k4.det_split);
        REQUIRE(k4.reduction_split);
    }

    SECTION("splits hold across a small grid") {
        struct Case {
            FieldPtr F;
            const char* n;
            unsigned r;
        };
        const Case cases[] = {
            {F2, "t", 1},      {F2, "t+1", 1},  {F2, "t^2", 1}, {F3, "t", 1},
            {F3, "t+1", 2},    {F2, "t^2+t", 1}, {F2, "t^2+t+1", 1},
        };
        for (const auto& c : cases) {
            INFO("q=" << field_size(c.F) << " n=" << c.n << " r=" << c.r);
            auto k = dmod::kernel_factorization_check(c.F, c.r, dmod::parse_poly(c.F, c.n));
            REQUIRE(k.det_split);
            REQUIRE(k.reduction_split);
        }
    }
}
