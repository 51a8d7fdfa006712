#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "dmod/skew.hpp"

using namespace dmod;

namespace {

AdditivePoly random_op(const FieldPtr& K, u64 q, int maxdeg, Rng& rng) {
    const u64 size = AdditivePoly::field_size(K);
    const int d = static_cast<int>(rng.below(static_cast<u64>(maxdeg) + 1));
    std::vector<FieldElem> b;
    for (int i = 0; i <= d; ++i) b.push_back(K->from_int(rng.below(size)));
    return AdditivePoly::from_coeffs(K, q, std::move(b));
}

struct Cfg {
    FieldPtr K;
    u64 q;
};

std::vector<Cfg> cfgs() {
    return {{Field::get(2, 3), 2}, {Field::get(3, 2), 3}, {Field::get(2, 4), 4}};
}

}  // namespace

TEST_CASE("operator construction and twist validation", "[skew]") {
    auto F2 = Field::get(2, 1);
    auto F16 = Field::get(2, 4);

    REQUIRE_THROWS_AS(AdditivePoly::from_coeffs(F2, 4, {F2->one()}), Error);
    REQUIRE_THROWS_AS(AdditivePoly::from_coeffs(Field::get(3, 2), 2, {}), Error);
    REQUIRE_NOTHROW(AdditivePoly::from_coeffs(F16, 4, {F16->one()}));
    REQUIRE_NOTHROW(AdditivePoly::from_coeffs(F16, 16, {F16->one()}));

    auto f = AdditivePoly::from_coeffs(F2, 2, {F2->one(), F2->zero(), F2->zero()});
    REQUIRE(f.tau_degree() == 0);
    REQUIRE(AdditivePoly::zero(F2, 2).is_zero());
    REQUIRE(AdditivePoly::tau(F2, 2).tau_degree() == 1);
    REQUIRE(AdditivePoly::identity(F2, 2).tau_degree() == 0);
}

TEST_CASE("operators are additive and linear over the twist field", "[skew]") {
    Rng rng(31);
    for (const auto& cfg : cfgs()) {
        auto L = Field::extension(cfg.K, 2);
        const u64 ls = AdditivePoly::field_size(L);
        unsigned d = 0;
        REQUIRE(L->subfield_degree(cfg.q, &d));
        auto Fq = Field::get(L->p(), d);
        for (int it = 0; it < 40; ++it) {
            auto f = random_op(cfg.K, cfg.q, 3, rng);
            auto x = L->from_int(rng.below(ls));
            auto y = L->from_int(rng.below(ls));
            REQUIRE(f.eval(x + y) == f.eval(x) + f.eval(y));
            auto c = Fq->from_int(rng.below(cfg.q));
            REQUIRE(f.eval(c * x) == c * f.eval(x));
        }
    }
}

TEST_CASE("composition agrees with function composition", "[skew]") {
    Rng rng(32);
    for (const auto& cfg : cfgs()) {
        auto L = Field::extension(cfg.K, 2);
        const u64 ls = AdditivePoly::field_size(L);
        for (int it = 0; it < 50; ++it) {
            auto a = random_op(cfg.K, cfg.q, 3, rng);
            auto b = random_op(cfg.K, cfg.q, 3, rng);
            auto x = L->from_int(rng.below(ls));
            REQUIRE(compose(a, b).eval(x) == a.eval(b.eval(x)));
        }
    }
}

TEST_CASE("operator ring structure", "[skew]") {
    Rng rng(33);
    for (const auto& cfg : cfgs()) {
        auto id = AdditivePoly::identity(cfg.K, cfg.q);
        for (int it = 0; it < 25; ++it) {
            auto a = random_op(cfg.K, cfg.q, 3, rng);
            auto b = random_op(cfg.K, cfg.q, 3, rng);
            auto c = random_op(cfg.K, cfg.q, 3, rng);
            REQUIRE(compose(compose(a, b), c) == compose(a, compose(b, c)));
            REQUIRE(compose(a, b + c) == compose(a, b) + compose(a, c));
            REQUIRE(compose(a + b, c) == compose(a, c) + compose(b, c));
            REQUIRE(compose(a, id) == a);
            REQUIRE(compose(id, a) == a);
            REQUIRE(compose(a, AdditivePoly::zero(cfg.K, cfg.q)).is_zero());
        }
    }
    REQUIRE_THROWS_AS(compose(AdditivePoly::tau(Field::get(2, 4), 2),
                              AdditivePoly::tau(Field::get(2, 4), 4)),
                      Error);
}

TEST_CASE("composition twists scalars", "[skew]") {
    auto F4 = Field::get(2, 2);
    auto w = F4->from_int(2);  // generator of F_4
    auto tau = AdditivePoly::tau(F4, 2);
    auto scalar_w = AdditivePoly::scalar(F4, 2, w);
    auto left = compose(tau, scalar_w);   // tau then scalar applied first
    auto right = compose(scalar_w, tau);  // scalar after tau
    REQUIRE(left.at(1) == w * w);         // w^q with q = 2
    REQUIRE(right.at(1) == w);
    REQUIRE(left != right);

    Rng rng(34);
    for (const auto& cfg : cfgs()) {
        const u64 size = AdditivePoly::field_size(cfg.K);
        for (int it = 0; it < 25; ++it) {
            auto f = random_op(cfg.K, cfg.q, 3, rng);
            auto c = cfg.K->from_int(rng.below(size));
            auto x = cfg.K->from_int(rng.below(size));
            REQUIRE((c * f).eval(x) == c * f.eval(x));
        }
    }
}

TEST_CASE("coefficient fields unify along extensions", "[skew]") {
    auto F4 = Field::get(2, 2);
    auto F16 = Field::get(2, 4);
    Rng rng(35);
    for (int it = 0; it < 25; ++it) {
        auto a = random_op(F4, 4, 2, rng);
        auto b = random_op(F16, 4, 2, rng);
        auto x = F16->from_int(rng.below(16));
        REQUIRE((a + b).field()->same(*F16));
        REQUIRE((a + b).eval(x) == a.eval(x) + b.eval(x));
        REQUIRE(compose(a, b).eval(x) == a.eval(b.eval(x)));
        REQUIRE(compose(b, a).eval(x) == b.eval(a.eval(x)));
    }
}

TEST_CASE("expanded polynomial form", "[skew]") {
    auto F2 = Field::get(2, 1);

    SECTION("frozen expansion") {
        auto f = AdditivePoly::from_coeffs(F2, 2, {F2->one(), F2->one(), F2->one()});
        REQUIRE(f.to_poly() == parse_poly(F2, "t^4+t^2+t"));
    }

    SECTION("expansion evaluates identically and round-trips") {
        Rng rng(36);
        for (const auto& cfg : cfgs()) {
            auto L = Field::extension(cfg.K, 2);
            const u64 ls = AdditivePoly::field_size(L);
            for (int it = 0; it < 25; ++it) {
                auto f = random_op(cfg.K, cfg.q, 3, rng);
                auto x = L->from_int(rng.below(ls));
                REQUIRE(f.to_poly().eval(x) == f.eval(x));
                REQUIRE(additive_from_poly(f.to_poly(), cfg.q) == f);
            }
        }
    }

    SECTION("non-additive polynomials rejected") {
        REQUIRE_THROWS_AS(additive_from_poly(parse_poly(F2, "t^3"), 2), Error);
        REQUIRE_THROWS_AS(additive_from_poly(parse_poly(F2, "t+1"), 2), Error);
        REQUIRE_NOTHROW(additive_from_poly(parse_poly(F2, "t^4+t"), 2));
        REQUIRE_THROWS_AS(additive_from_poly(parse_poly(F2, "t^4+t^3"), 2), Error);
    }

    SECTION("expansion degree is capped") {
        std::vector<FieldElem> b(22, F2->zero());
        b[21] = F2->one();  // X-degree would be 2^21
        auto f = AdditivePoly::from_coeffs(F2, 2, std::move(b));
        REQUIRE_THROWS_AS(f.to_poly(), Error);
        std::vector<FieldElem> ok(11, F2->zero());
        ok[10] = F2->one();
        REQUIRE(AdditivePoly::from_coeffs(F2, 2, std::move(ok)).to_poly().degree() == 1024);
    }
}
