#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "cosrays/cosine.hpp"

using namespace cosrays;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2 * pi;

bool close(cplx a, cplx b, double tol) { return std::abs(a - b) <= tol; }

const NormalizedMap& scaled_cosh() {
    static const NormalizedMap nm = disjoint_type_scale(cosh_map());
    return nm;
}

} // namespace

TEST_CASE("eval") {
    CHECK(close(eval(cosh_map(), 0), 1, 1e-15));
    CHECK(close(eval(cosh_map(), cplx(0, pi)), -1, 1e-15));
    CHECK(close(eval(make_map(1, 2), 0), 3, 1e-15));
    CHECK_THROWS_AS(eval(cosh_map(), cplx(800, 0)), Error);
    CHECK_THROWS_AS(make_map(0, 1), Error);

    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-5, 5);
    const CosineMap m = make_map(cplx(0.3, -1.2), cplx(2.0, 0.4));
    for (int i = 0; i < 1000; ++i) {
        const cplx z(u(rng), u(rng));
        const cplx w = eval(m, z);
        REQUIRE(close(eval(m, z + cplx(0, two_pi)), w, 1e-12 * (1 + std::abs(w))));
    }
}

TEST_CASE("singular data") {
    auto sd = singular_data(cosh_map());
    CHECK(close(sd.crit_base, 0, 1e-15));
    CHECK(close(sd.v1, 1, 1e-15));
    CHECK(close(sd.v2, -1, 1e-15));

    sd = singular_data(make_map(1, 1));
    CHECK(close(sd.v1, 2, 1e-15));
    CHECK(close(sd.v2, -2, 1e-15));

    // the derivative a e^z - b e^{-z} vanishes where e^{2z} = b/a
    const CosineMap m = make_map(2, 0.5);
    sd = singular_data(m);
    CHECK(close(sd.crit_base, -std::log(2.0), 1e-15));
    CHECK(close(derivative(m, sd.crit_base), 0, 1e-15));
    CHECK(close(sd.v1, 2, 1e-14));
    CHECK(close(eval(m, sd.crit_base), 2, 1e-14));

    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int i = 0; i < 500; ++i) {
        const CosineMap g = make_map(cplx(u(rng), u(rng)), cplx(u(rng), u(rng)));
        const auto s = singular_data(g);
        REQUIRE(std::abs(s.crit_base.imag()) <= pi / 2 + 1e-15);
        REQUIRE(std::abs(derivative(g, s.crit_base)) <= 1e-12 * (std::abs(g.a) + std::abs(g.b)) * std::exp(std::abs(s.crit_base.real())));
        const cplx r = 2.0 * std::sqrt(g.a * g.b);
        const double tol = 1e-12 * (1 + std::abs(r));
        REQUIRE((close(s.v1, r, tol) || close(s.v1, -r, tol)));
        REQUIRE(close(s.v1, -s.v2, tol));
    }
}

TEST_CASE("k_constant") {
    const auto t = k_terms(cosh_map());
    CHECK(t[0] == Catch::Approx(2 * std::sqrt(2.0)));
    CHECK(t[1] == Catch::Approx(2));
    CHECK(t[2] == 1);
    CHECK(t[3] == Catch::Approx(0.5 * std::log(2.0)));
    CHECK(t[4] == Catch::Approx(0.5 * std::log(2.0)));
    CHECK(t[5] == Catch::Approx(std::log(64.0)));
    CHECK(k_constant(cosh_map()) == Catch::Approx(4.1589).margin(1e-4));

    const auto s = k_terms(make_map(cplx(1, 1), cplx(1, 1)));
    CHECK(s[3] == s[4]);
    CHECK(k_terms(make_map(4, 4))[5] == Catch::Approx(0).margin(1e-15));
}

TEST_CASE("disjoint-type scaling of cosh") {
    const NormalizedMap& nm = scaled_cosh();
    const double Kf = std::log(64.0);
    CHECK(nm.K_source == Catch::Approx(Kf));
    CHECK(nm.R_tract >= std::sqrt(Kf * Kf + pi * pi));
    CHECK(std::abs(nm.lambda) <= Kf / std::exp(nm.R_tract));
    CHECK(nm.A > nm.K);

    // tract boundary samples: |g| = R only for |Re z| > K_source
    for (int i = 0; i < 1000; ++i) {
        const double y = two_pi * i / 1000.0;
        for (double x : {-Kf, 0.0, Kf}) REQUIRE(std::abs(eval(nm.base, cplx(x, y))) < nm.R_tract);
    }
    // expansion beyond K
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> xr(0, 30), yr(-20, 20);
    for (int i = 0; i < 10000; ++i) {
        const double x = nm.K + 1e-9 + xr(rng);
        const cplx z(i % 2 ? x : -x, yr(rng));
        REQUIRE(std::abs(derivative(nm.base, z)) > 2);
    }
    // symmetry a <-> b, z <-> -z
    const CosineMap m = make_map(0.7, 2.5), mt = make_map(2.5, 0.7);
    const NormalizedMap n1 = disjoint_type_scale(m), n2 = disjoint_type_scale(mt);
    CHECK(std::abs(n1.lambda - n2.lambda) < 1e-15);
    CHECK(n1.K == Catch::Approx(n2.K));
}

TEST_CASE("half-lines sit in their fundamental domains") {
    const NormalizedMap& nm = scaled_cosh();
    for (long n = -4; n <= 4; ++n) {
        CHECK(fundamental_domain_of(nm, cplx(nm.A + 1, two_pi * n)) == Symbol{n, Side::R});
        CHECK(fundamental_domain_of(nm, cplx(-nm.A - 1, two_pi * n)) == Symbol{n, Side::L});
    }
    const cplx w = eval(nm.base, cplx(nm.A + 1, 0));
    CHECK(std::abs(w) > nm.R_tract);
    CHECK(dist_to_cut(nm.base, w) > 1e-9);
}

TEST_CASE("inverse branches") {
    const NormalizedMap& nm = scaled_cosh();
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> lr(std::log(nm.R_tract * 1.01), std::log(1e8)), th(-pi, pi);
    std::uniform_int_distribution<long> idx(-5, 5);
    int done = 0;
    while (done < 1000) {
        const Symbol s{idx(rng), done % 2 ? Side::R : Side::L};
        const cplx w = std::polar(std::exp(lr(rng)), th(rng));
        if (dist_to_cut(nm.base, w) < 1e-6) continue;
        ++done;
        const cplx z = inverse_branch(nm, s, w);
        REQUIRE(std::abs(eval(nm.base, z) - w) <= 1e-10 * (1 + std::abs(w)));
        REQUIRE(std::abs(branch_residual(nm.base, s, w, z)) < 1);
        REQUIRE(fundamental_domain_of(nm, z) == s);
        const cplx z0 = inverse_branch(nm, Symbol{0, s.side}, w);
        REQUIRE(close(z, z0 + cplx(0, two_pi * s.n), 1e-9));
        // the two roots multiply to b/a
        const auto [u1, u2] = roots(nm.base, w);
        REQUIRE(close(u1 * u2, nm.base.b / nm.base.a, 1e-12 * std::abs(nm.base.b / nm.base.a)));
    }
    CHECK_THROWS_AS(inverse_branch(nm, Symbol{0, Side::R}, cplx(nm.R_tract * 0.5, 0)), Error);
    const Cut cut = cut_of(nm.base);
    CHECK_THROWS_AS(inverse_branch(nm, Symbol{0, Side::R}, cut.base + cplx(0, cut.dir * nm.R_tract * 2)), Error);
}

TEST_CASE("address_of") {
    const NormalizedMap& nm = scaled_cosh();
    CHECK(address_of(nm, cplx(nm.A + 1, 0), 0).empty());
    // real orbit of lambda cosh from A + 1: all (0,R) while it stays beyond A
    cplx z(nm.A + 1, 0);
    std::size_t k = 0;
    for (cplx x = z; x.real() > nm.A && x.real() < 600; x = eval(nm.base, x)) ++k;
    const auto addr = address_of(nm, z, k);
    REQUIRE(addr.size() == k);
    for (Symbol s : addr) CHECK(s == Symbol{0, Side::R});
}

TEST_CASE("branch of the cosh frame") {
    // the fixed branches of cosh itself: R_0 maps [1, inf) onto [0, inf)
    const CosineMap c = cosh_map();
    CHECK(close(branch(c, Symbol{0, Side::R}, 1.5430806348152437), 1, 1e-12));
    CHECK(close(branch(c, Symbol{0, Side::L}, 1.5430806348152437), -1, 1e-12));
    CHECK(close(branch(c, Symbol{2, Side::R}, 1.5430806348152437), cplx(1, 2 * two_pi), 1e-12));
    // large-modulus form agrees with direct evaluation below the switch
    const cplx w = std::polar(std::exp(50.0), 0.3);
    CHECK(close(branch_log(c, Symbol{1, Side::L}, 50.0, 0.3), branch(c, Symbol{1, Side::L}, w), 1e-9));
}
