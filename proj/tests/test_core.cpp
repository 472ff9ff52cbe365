#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>
#include <complex>
#include <random>

#include "backreaction/linmap3.hpp"
#include "backreaction/params.hpp"
#include "backreaction/polynomial.hpp"
#include "backreaction/vec3.hpp"

using namespace backreaction;
using Rational = boost::multiprecision::cpp_rational;

namespace {

Vec3 random_vec(std::mt19937& rng, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    return {u(rng), u(rng), u(rng)};
}

LinearMap3 random_map(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    LinearMap3 m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = u(rng);
    return m;
}

}  // namespace

TEST_CASE("linear map composition is associative, identity neutral") {
    std::mt19937 rng(7001);
    for (int trial = 0; trial < 50; ++trial) {
        const LinearMap3 a = random_map(rng), b = random_map(rng), c = random_map(rng);
        CHECK(max_abs_diff((a * b) * c, a * (b * c)) < 1e-13);
        CHECK(max_abs_diff(a * LinearMap3::identity(), a) == 0.0);
        CHECK(max_abs_diff(LinearMap3::identity() * a, a) == 0.0);
        const Vec3 v = random_vec(rng);
        CHECK(max_abs_diff((a * b) * v, a * (b * v)) < 1e-13);
    }
}

TEST_CASE("cross_map applies the right-hand rule") {
    const LinearMap3 B = cross_map({0, 0, 1});
    CHECK(max_abs_diff(B * Vec3{1, 0, 0}, Vec3{0, -1, 0}) == 0.0);
    CHECK(cross_map({0, 0, 0}).max_abs() == 0.0);

    std::mt19937 rng(7002);
    for (int trial = 0; trial < 20; ++trial) {
        const Vec3 b = random_vec(rng);
        const LinearMap3 B = cross_map(b);
        const Vec3 v = random_vec(rng);
        CHECK(max_abs_diff(B * v, cross(v, b)) < 1e-15);
        CHECK(max_abs_diff(B.transpose(), B * -1.0) == 0.0);  // antisymmetric
    }
}

TEST_CASE("cross_map squared equals -b^2 P (matrix-product oracle)") {
    std::mt19937 rng(7003);
    for (int trial = 0; trial < 10; ++trial) {
        Vec3 b = random_vec(rng);
        if (b.norm() < 0.1) b = {0.3, -0.2, 0.9};
        const double b2 = b.norm2();
        const LinearMap3 B = cross_map(b);
        const LinearMap3 P = orthogonal_projector(b);
        CHECK(max_abs_diff(B * B, P * (-b2)) < 1e-13 * (1.0 + b2));
        for (int k = 0; k < 3; ++k) {
            const Vec3 v = random_vec(rng);
            CHECK(max_abs_diff((B * B) * v, (P * v) * (-b2)) < 1e-13 * (1.0 + b2));
        }
    }
}

TEST_CASE("projector splits parallel and perpendicular parts") {
    const Vec3 b{0, 0, 1};
    SUBCASE("parallel input") {
        const auto [par, perp] = project_parallel_perp(b, b);
        CHECK(max_abs_diff(par, b) == 0.0);
        CHECK(perp.norm() == 0.0);
    }
    SUBCASE("orthogonal input") {
        const Vec3 v{0.4, -0.3, 0.0};
        const auto [par, perp] = project_parallel_perp(v, b);
        CHECK(par.norm() == 0.0);
        CHECK(max_abs_diff(perp, v) == 0.0);
    }
    SUBCASE("axis-aligned decomposition") {
        const auto [par, perp] = project_parallel_perp({1, 2, 3}, b);
        CHECK(max_abs_diff(par, {0, 0, 3}) == 0.0);
        CHECK(max_abs_diff(perp, {1, 2, 0}) == 0.0);
    }
    SUBCASE("zero direction rejected") {
        CHECK_THROWS_WITH_AS(project_parallel_perp({1, 0, 0}, {0, 0, 0}),
                             "degenerate magnetic direction", std::invalid_argument);
    }
    SUBCASE("random splits recompose and are orthogonal") {
        std::mt19937 rng(7004);
        for (int trial = 0; trial < 30; ++trial) {
            Vec3 dir = random_vec(rng);
            if (dir.norm() < 0.1) dir = {1, 1, 1};
            const Vec3 v = random_vec(rng);
            const auto [par, perp] = project_parallel_perp(v, dir);
            CHECK(max_abs_diff(par + perp, v) < 1e-14);
            CHECK(std::abs(perp.dot(dir)) < 1e-14);
            CHECK(cross(par, dir).norm() < 1e-14);
        }
    }
}

TEST_CASE("field projector algebra holds for random parameters") {
    std::mt19937 rng(7005);
    std::uniform_real_distribution<double> u(0.2, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
        Vec3 bv = random_vec(rng);
        if (bv.norm() < 0.1) bv = {0.5, 0.1, -0.4};
        FieldParams params{random_vec(rng), bv, u(rng)};
        params.validate();
        const double b2 = bv.norm2();
        const LinearMap3 B = cross_map(bv);
        const LinearMap3 P = orthogonal_projector(bv);
        const LinearMap3 I = LinearMap3::identity();
        for (int k = 0; k < 4; ++k) {
            const Vec3 v = random_vec(rng);
            const double scale = 1.0 + v.norm() * (1.0 + b2);
            CHECK(max_abs_diff(P * (P * v), P * v) < 1e-12 * scale);
            CHECK(((I - P) * (B * v)).norm() < 1e-12 * scale);
            CHECK(max_abs_diff(B * (P * v), B * v) < 1e-12 * scale);
            CHECK(max_abs_diff(P * (B * v), B * v) < 1e-12 * scale);
            CHECK(max_abs_diff(B * (B * v), (P * v) * (-b2)) < 1e-12 * scale);
        }
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(FieldParams({}, {}, 0.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS(FieldParams({}, {}, -1.0).validate(), std::invalid_argument);
    CHECK_THROWS_AS((ElasticParams{-0.5, 1.0}.validate()), std::invalid_argument);
    CHECK_THROWS_AS((ElasticParams{0.5, 0.0}.validate()), std::invalid_argument);
    CHECK_NOTHROW((ElasticParams{0.0, 1.0}.validate()));
}

TEST_CASE("polynomial arithmetic is exact on integer coefficients") {
    std::mt19937 rng(7006);
    std::uniform_int_distribution<int> coeff(-9, 9);
    std::uniform_int_distribution<int> deg(0, 6);
    for (int trial = 0; trial < 40; ++trial) {
        std::vector<double> ac(deg(rng) + 1), bc(deg(rng) + 1);
        for (auto& x : ac) x = coeff(rng);
        for (auto& x : bc) x = coeff(rng);
        const Polynomial<double> a(ac), b(bc);
        for (const auto& p : {a + b, a - b, a * b, a.derivative()}) {
            for (double ck : p.coefficients()) CHECK(ck == std::floor(ck));
        }
        // d/dt of the antiderivative gives the polynomial back exactly.
        CHECK(a.antiderivative(3.0).derivative() == a);
        // evaluation at integer points stays integral
        const double at2 = (a * b).evaluate(2.0);
        CHECK(at2 == std::floor(at2));
        CHECK((a * b).evaluate(2.0) == a.evaluate(2.0) * b.evaluate(2.0));
    }
}

TEST_CASE("polynomial zero handling and degree bookkeeping") {
    const Polynomial<double> z;
    CHECK(z.is_zero());
    CHECK(z.degree() == -1);
    CHECK(z.evaluate(3.0) == 0.0);
    const Polynomial<double> p{1.0, 0.0, 2.0};
    CHECK(p.degree() == 2);
    CHECK((p - p).is_zero());
    CHECK((p * z).is_zero());
    const Polynomial<double> trimmed{1.0, 2.0, 0.0, 0.0};
    CHECK(trimmed.degree() == 1);
}

TEST_CASE("polynomial works over complex and exact rational scalars") {
    using C = std::complex<double>;
    const Polynomial<C> pc{C{0.0, 1.0}, C{1.0, 0.0}};  // i + t
    CHECK(pc.evaluate({2.0, 0.0}) == C{2.0, 1.0});

    const Polynomial<Rational> pr{Rational(1), Rational(1, 3)};
    const auto anti = pr.antiderivative(Rational(0));
    CHECK(anti.coefficient(2) == Rational(1, 6));
    CHECK(anti.derivative() == pr);
    CHECK(pr.evaluate(Rational(3, 2)) == Rational(3, 2));
}
