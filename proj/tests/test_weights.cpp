#include <doctest.h>

#include <random>

#include "helpers.hpp"
#include "wradon/weights.hpp"

using namespace wradon;

namespace {

std::shared_ptr<const AttenuationMap> ball_map(int dim, double radius, double c)
{
    const GridSpec grid = GridSpec::centered(dim, dim == 2 ? 81 : 41, dim == 2 ? 0.025 : 0.05);
    BallPhantom b;
    b.radius = radius;
    b.amplitude = c;
    b.edge = 0.1;
    return std::make_shared<const AttenuationMap>(make_phantom(grid, b));
}

}  // namespace

TEST_CASE("sphere average of simple weights")
{
    const SphereGrid c = make_circle_grid(64);
    const Vec3 x{0.3, -0.2, 0.0};
    CHECK(std::abs(eval_w0(Weight::constant({2.0, -1.0}), x, c) - Complex{2.0, -1.0}) <= 1e-14);
    CHECK(std::abs(eval_w0(Weight::polynomial(1.0, {1.0, 0.0, 0.0}, {}), x, c) - 1.0) <= 1e-15);
    std::array<Vec3, 3> q{};
    q[0][0] = 1.0;
    CHECK(std::abs(eval_w0(Weight::polynomial(1.0, {}, q), x, c) - 1.5) <= 1e-12);
}

TEST_CASE("w0 tabulation")
{
    const GridSpec grid = GridSpec::centered(2, 9, 0.2);
    const SphereGrid c = make_circle_grid(32);
    const ScalarField ones = w0_field(Weight::constant(1.0), grid, c);
    for (const Complex& v : ones.values) CHECK(std::abs(v - 1.0) <= 1e-15);

    const Weight odd = Weight::polynomial(0.0, {1.0, 0.0, 0.0}, {});
    CHECK_THROWS_AS(w0_field(odd, grid, c), DataError);
    try {
        w0_field(odd, grid, c);
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("node") != std::string::npos);
    }

    const Weight att = attenuation_weight(ball_map(2, 0.5, 1.0));
    const ScalarField w0 = w0_field(att, grid, c);
    for (const Complex& v : w0.values) {
        CHECK(v.real() > 0.0);
        CHECK(v.real() <= 1.0);
    }
}

TEST_CASE("symmetrization")
{
    const Vec3 x{0.1, 0.4, 0.0};
    const Vec3 t = normalized(Vec3{0.6, -0.8, 0.0});
    const Weight odd = Weight::polynomial(1.0, {1.0, 0.0, 0.0}, {});
    CHECK(std::abs(symmetrize(odd)(x, t) - 1.0) <= 1e-15);

    std::array<Vec3, 3> q{};
    q[0][1] = q[1][0] = 0.5;
    const Weight even = Weight::polynomial(1.0, {}, q, {Profile::Type::gaussian, {0.2, 0.0, 0.0}, 0.3});
    CHECK(std::abs(symmetrize(even)(x, t) - even(x, t)) <= 1e-15);

    const Weight w = Weight::one_sided(1.0, 0.8, {1.0, 0.0, 0.0}, {Profile::Type::gaussian, {}, 0.5});
    const Weight s1 = symmetrize(w), s2 = symmetrize(s1);
    for (double a = 0.0; a < 6.0; a += 0.37) {
        const Vec3 th{std::cos(a), std::sin(a), 0.0};
        CHECK(std::abs(s1(x, th) - s2(x, th)) <= 1e-15);
    }
}

TEST_CASE("averaging removes the odd part")
{
    const SphereGrid s = make_sphere_grid(8, 16);
    const Weight w = Weight::one_sided({1.0, 0.5}, 0.8, normalized(Vec3{1.0, 1.0, 0.5}), {Profile::Type::gaussian, {}, 0.5});
    for (const Vec3& x : {Vec3{0, 0, 0}, Vec3{0.3, -0.1, 0.2}, Vec3{-0.5, 0.5, 0.0}})
        CHECK(std::abs(eval_w0(symmetrize(w), x, s) - eval_w0(w, x, s)) <= 1e-13);
}

TEST_CASE("symmetry check")
{
    const GridSpec grid = GridSpec::centered(2, 17, 0.1);
    const SphereGrid c = make_circle_grid(180);

    SUBCASE("constant weight")
    {
        const SymmetryReport r = check_chang_symmetry(Weight::constant(2.5), grid, c);
        CHECK(r.max_violation <= 1e-14);
        CHECK(r.holds);
        CHECK(r.min_abs_w0 == doctest::Approx(2.5));
    }
    SUBCASE("odd perturbation")
    {
        const Weight w = Weight::polynomial(1.0, {0.5, 0.0, 0.0}, {}, {Profile::Type::gaussian, {}, 0.4});
        const SymmetryReport r = check_chang_symmetry(w, grid, c);
        CHECK(r.max_violation <= 1e-12);
        CHECK(r.holds);
    }
    SUBCASE("one-sided weight")
    {
        // chi peaks at a grid node, so the brute-force maximum is attained there
        const Profile chi{Profile::Type::gaussian, {0.3, 0.2, 0.0}, 0.35};
        const Weight w = Weight::one_sided(1.0, 0.8, {1.0, 0.0, 0.0}, chi);
        const SymmetryReport r = check_chang_symmetry(w, grid, c);
        double expected = 0.0;
        for (const Vec3& t : c.nodes) expected = std::max(expected, std::abs(std::abs(t[0]) / 2.0 - 1.0 / kPi));
        expected *= 0.8;
        CHECK(std::abs(r.max_violation - expected) <= 2e-4);
        CHECK_FALSE(r.holds);
        CHECK(r.max_pair_violation == doctest::Approx(r.max_violation).epsilon(1e-14));
    }
}

TEST_CASE("pair form of the violation agrees with W_s - w0")
{
    const GridSpec grid = GridSpec::centered(3, 7, 0.2);
    const SphereGrid s = make_sphere_grid(6, 12);
    const Weight w = Weight::one_sided({1.0, 0.2}, 0.6, normalized(Vec3{0.0, 1.0, 1.0}), {Profile::Type::gaussian, {}, 0.3});
    const SymmetryReport r = check_chang_symmetry(w, grid, s);
    CHECK(std::abs(r.max_pair_violation - r.max_violation) <= 1e-14);
}

TEST_CASE("weights respect their bounds")
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::normal_distribution<double> n(0.0, 1.0);
    std::array<Vec3, 3> q{};
    q[0][2] = 0.3;
    q[1][1] = -0.4;
    const Weight weights[] = {
        Weight::constant({0.3, -2.0}),
        Weight::polynomial(1.0, {0.5, -0.2, 0.1}, q, {Profile::Type::gaussian, {0.1, 0.1, 0.0}, 0.3}),
        Weight::one_sided(1.0, 0.8, {1.0, 0.0, 0.0}, {Profile::Type::gaussian, {}, 0.4}),
        attenuation_weight(ball_map(3, 0.5, 0.3)),
    };
    for (const Weight& w : weights) {
        for (int k = 0; k < 10000; ++k) {
            const Vec3 x{u(rng), u(rng), u(rng)};
            const Vec3 t = normalized(Vec3{n(rng), n(rng), n(rng)});
            CHECK_LE(std::abs(w(x, t)), w.bound() * (1.0 + 1e-15));
        }
    }
}

TEST_CASE("divergent beam")
{
    SUBCASE("zero map")
    {
        const GridSpec grid = GridSpec::centered(2, 21, 0.1);
        const AttenuationMap a{ScalarField(grid)};
        CHECK(divergent_beam(a, {0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}) == 0.0);
    }
    SUBCASE("chord of a ball from its center")
    {
        for (int dim : {2, 3}) {
            const auto a = ball_map(dim, 0.5, 0.3);
            const double d = divergent_beam(*a, {0.0, 0.0, 0.0}, normalized(Vec3{1.0, 0.7, dim == 3 ? 0.2 : 0.0}), 0.001);
            CHECK(std::abs(d - 0.15) <= 0.01 * 0.15);
        }
    }
    SUBCASE("outside, pointing away")
    {
        const auto a = ball_map(2, 0.5, 0.3);
        CHECK(divergent_beam(*a, {0.8, 0.0, 0.0}, {1.0, 0.0, 0.0}) == 0.0);
    }
    SUBCASE("negative or complex maps are rejected")
    {
        ScalarField f(GridSpec::centered(2, 5, 0.1));
        f.values[3] = -0.1;
        CHECK_THROWS_AS(AttenuationMap{f}, DataError);
        f.values[3] = Complex{0.1, 0.1};
        CHECK_THROWS_AS(AttenuationMap{f}, DataError);
    }
}

TEST_CASE("attenuation weight")
{
    const GridSpec grid = GridSpec::centered(2, 41, 0.05);
    const Weight none = attenuation_weight(std::make_shared<const AttenuationMap>(ScalarField(grid)));
    CHECK(none({0.1, 0.2, 0.0}, {0.0, 1.0, 0.0}) == Complex{1.0, 0.0});

    const Weight w = attenuation_weight(ball_map(2, 0.5, 1.0));
    for (double a = 0.0; a < 6.28; a += 0.5)
        for (const Vec3& x : {Vec3{0, 0, 0}, Vec3{0.2, 0.1, 0}, Vec3{-0.4, 0.3, 0}}) {
            const double v = w(x, {std::cos(a), std::sin(a), 0.0}).real();
            CHECK(v > 0.0);
            CHECK(v <= 1.0);
        }
    // off-center, the beam length differs between the two sides
    const Vec3 x{0.3, 0.0, 0.0};
    const Vec3 t{0.0, 1.0, 0.0};
    CHECK(std::abs(w(x, t) - w(x, -t)) > 0.1);
}

TEST_CASE("weights from JSON")
{
    const Vec3 x{0.1, 0.2, 0.0};
    const Vec3 t{0.6, 0.8, 0.0};
    using nlohmann::json;
    CHECK(weight_from_json(json{{"kind", "constant"}, {"value", {2.0, 1.0}}})(x, t) == Complex{2.0, 1.0});
    const Weight p = weight_from_json(json::parse(R"({"kind":"polynomial","c0":1,"linear":[0.5,0,0]})"));
    CHECK(std::abs(p(x, t) - 1.3) <= 1e-15);
    const Weight o = weight_from_json(json::parse(R"({"kind":"one_sided","amp":0.8,"axis":[1,0,0]})"));
    CHECK(std::abs(o(x, t) - 1.48) <= 1e-15);
    CHECK(std::abs(o(x, -t) - 1.0) <= 1e-15);
    CHECK_THROWS_AS(weight_from_json(json{{"kind", "bogus"}}), std::invalid_argument);
    CHECK_THROWS_AS(weight_from_json(json{{"kind", "attenuation"}, {"map", "a.fld"}}), std::invalid_argument);
}
