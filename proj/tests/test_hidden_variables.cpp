#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "bellrv/hidden_variables.hpp"
#include "bellrv/rational.hpp"
#include "oracles.hpp"

using namespace bellrv;

namespace {

UnitVector3 to_unit(const std::array<double, 3>& a)
{
    return UnitVector3::normalized(a[0], a[1], a[2]);
}

const UnitVector3 kX(1.0, 0.0, 0.0);
const UnitVector3 kZ(0.0, 0.0, 1.0);

}  // namespace

TEST_CASE("rational arithmetic")
{
    CHECK(Rational(2, 4) == Rational(1, 2));
    CHECK(Rational(1, -3) == Rational(-1, 3));
    CHECK(Rational(1, 4) + Rational(1, 4) == Rational(1, 2));
    CHECK(Rational(3, 4) * Rational(2, 3) == Rational(1, 2));
    CHECK(Rational(1, 3) / Rational(2, 3) == Rational(1, 2));
    CHECK(Rational(1, 3) < Rational(1, 2));
    CHECK((Rational(5) - Rational(5)).den() == 1);
    CHECK(Rational(7, 8).str() == "7/8");
    CHECK_THROWS_AS(Rational(1, 0), std::domain_error);
    CHECK_THROWS_AS(Rational(INT64_MAX) + Rational(1), std::overflow_error);

    CHECK(Dyadic(2, 2) == Dyadic(1, 1));
    CHECK(Dyadic(0, 5) == Dyadic(0, 0));
    CHECK(Dyadic(3, 2).to_rational() == Rational(3, 4));
    CHECK(Dyadic(1, 2) < Dyadic(1, 1));
}

TEST_CASE("step functions validate their breakpoints")
{
    CHECK_THROWS_AS(PiecewiseConstantRV({Dyadic(0, 0)}, {}), InvalidArgument);
    CHECK_THROWS_AS(PiecewiseConstantRV({Dyadic(1, 2), Dyadic(1, 0)}, {1}), InvalidArgument);
    CHECK_THROWS_AS(PiecewiseConstantRV({Dyadic(0, 0), Dyadic(1, 1), Dyadic(1, 1), Dyadic(1, 0)}, {1, 1, 1}),
                    InvalidArgument);
    CHECK_THROWS_AS(PiecewiseConstantRV({Dyadic(0, 0), Dyadic(1, 0)}, {1, 2}), InvalidArgument);
}

TEST_CASE("triple model step functions")
{
    const TripleSpinModel model = triple_spin_model();
    for (double w : {0.0, 0.1, 0.3, 0.6, 0.9, 1.0}) CHECK(model.xi[0].value_at(w) == 1.0);
    CHECK(model.xi[2].value_at(0.25) == 1.0);
    CHECK(model.xi[2].value_at(0.75) == -1.0);
    CHECK(model.xi[1].value_at(0.1) == -1.0);
    CHECK(model.xi[1].value_at(0.3) == 1.0);
    CHECK(model.xi[1].value_at(0.6) == -1.0);
    CHECK(model.xi[1].value_at(0.8) == 1.0);
    // Right-open convention at breakpoints.
    CHECK(model.xi[2].value_at(Rational(1, 2)) == Rational(-1));
    CHECK(model.xi[1].value_at(Rational(1, 4)) == Rational(1));
    CHECK(model.xi[1].value_at(Rational(1)) == Rational(1));
    CHECK_THROWS_AS(model.xi[0].value_at(1.5), InvalidArgument);
}

TEST_CASE("gram identity holds exactly")
{
    const TripleSpinModel model = triple_spin_model();
    CHECK(integrate_product(model.xi[1], model.xi[2]) == Rational(0));
    CHECK(integrate_product(model.xi[1], model.xi[1]) == Rational(1));
    CHECK(integrate_product(model.xi[0], model.xi[1]) == Rational(0));

    const RationalMatrix3 g = model.gram();
    const RationalMatrix3 cross = model.cross_gram();
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(g[i][j] == Rational(i == j ? 1 : 0));
            CHECK(cross[i][j] == Rational(i == j ? -1 : 0));
        }
    }
}

TEST_CASE("integration over mismatched partitions")
{
    const PiecewiseConstantRV u({Dyadic(0, 0), Dyadic(1, 3), Dyadic(1, 0)}, {Rational(3), Rational(-1, 2)});
    const PiecewiseConstantRV v({Dyadic(0, 0), Dyadic(1, 1), Dyadic(5, 3), Dyadic(1, 0)}, {2, 0, 7});
    // [0,1/8): 3*2, [1/8,1/2): -1/2*2, [1/2,5/8): 0, [5/8,1): -1/2*7
    const Rational expected = Rational(1, 8) * 6 + Rational(3, 8) * -1 + Rational(3, 8) * Rational(-7, 2);
    CHECK(integrate_product(u, v) == expected);
    CHECK(integrate_product(v, u) == expected);
}

TEST_CASE("triple model reproduces the singlet correlation")
{
    const TripleSpinModel model = triple_spin_model();
    CHECK(triple_correlation(model, kZ, kZ) == -1.0);
    CHECK(triple_correlation(model, kX, kZ) == 0.0);

    std::mt19937_64 rng(21);
    for (int k = 0; k < 1000; ++k) {
        const auto a = oracle::random_direction(rng);
        const auto b = oracle::random_direction(rng);
        const UnitVector3 ua = to_unit(a);
        const UnitVector3 ub = to_unit(b);
        CHECK(std::abs(triple_correlation(model, ua, ub) + ua.dot(ub)) < 1e-15);
        CHECK(std::abs(triple_correlation(model, ua, ub) - quantum_correlation(ua, ub)) < 1e-12);
    }
}

TEST_CASE("factor values")
{
    const LHVModelSpec triple{ModelKind::triple};
    CHECK(factor_value(triple, 1, kZ, 0.3) == 1.0);
    CHECK(factor_value(triple, 2, kZ, 0.3) == -1.0);
    const double s = 1.0 / std::sqrt(3.0);
    const UnitVector3 diag(s, s, s);
    CHECK(factor_value(triple, 1, diag, 0.3) == doctest::Approx(std::sqrt(3.0)).epsilon(1e-15));
    CHECK(factor_value(triple, 1, diag, 0.3) > 1.0);
    CHECK_THROWS_AS(factor_value(triple, 1, kZ, -0.1), InvalidArgument);
    CHECK_THROWS_AS(factor_value(triple, 3, kZ, 0.5), InvalidArgument);
    CHECK_THROWS_AS(factor_value(triple, 1, kZ, kZ), InvalidArgument);

    const LHVModelSpec cosine{ModelKind::cosine};
    CHECK(factor_value(cosine, 1, Setting::angle(0.0), 0.0) == doctest::Approx(std::numbers::sqrt2));
    CHECK_THROWS_AS(factor_value(cosine, 1, Setting::angle(0.0), 7.0), InvalidArgument);
    CHECK_THROWS_AS(factor_value(cosine, 1, UnitVector3(0.0, 1.0, 0.0), 1.0), InvalidArgument);

    const LHVModelSpec sign{ModelKind::scalar_sign};
    CHECK(factor_value(sign, 1, kZ, kZ) == 1.0);
    CHECK(factor_value(sign, 2, kZ, kZ) == -1.0);
    CHECK_THROWS_AS(factor_value(sign, 1, kZ, 0.5), InvalidArgument);
}

TEST_CASE("triple factor exceeds the unit bound while the cosine factor stays under sqrt2")
{
    const double s = 1.0 / std::sqrt(3.0);
    const UnitVector3 diag(s, s, s);
    const LHVModelSpec triple{ModelKind::triple};
    double peak = 0.0;
    for (std::uint64_t k = 0; k < 1000; ++k) {
        peak = std::max(peak, std::abs(factor_value(triple, 1, diag, draw_sample(ModelKind::triple, 3, k))));
    }
    CHECK(peak > 1.0);
    CHECK(peak == doctest::Approx(std::sqrt(3.0)));

    const LHVModelSpec cosine{ModelKind::cosine};
    for (std::uint64_t k = 0; k < 1000; ++k) {
        CHECK(std::abs(factor_value(cosine, 1, Setting::angle(0.4), draw_sample(ModelKind::cosine, 3, k))) <=
              std::numbers::sqrt2);
    }
}

TEST_CASE("cosine model")
{
    CHECK(cosine_correlation(0.0, 0.0) == 1.0);
    CHECK(std::abs(cosine_correlation(0.0, std::numbers::pi / 2)) < 1e-16);
    CHECK(cosine_correlation(0.7, 0.1) == doctest::Approx(0.8253356149).epsilon(1e-10));
    CHECK(std::abs(oracle::cosine_model_simpson(0.7, 0.1) - 0.8253356149096783) < 1e-12);

    std::mt19937_64 rng(22);
    std::uniform_real_distribution<double> angle(-10.0, 10.0);
    for (int k = 0; k < 100; ++k) {
        const double a = angle(rng);
        const double b = angle(rng);
        CHECK(std::abs(cosine_correlation(a, b) - oracle::cosine_model_simpson(a, b)) < 1e-10);
        CHECK(std::abs(cosine_correlation_quadrature(a, b) - std::cos(a - b)) < 1e-10);
    }
}

TEST_CASE("scalar sign model")
{
    CHECK(scalar_sign_correlation(kZ, kZ) == -1.0);
    CHECK(std::abs(scalar_sign_correlation(kX, kZ)) < 1e-15);
    const UnitVector3 diag = UnitVector3::planar(std::numbers::pi / 4);
    CHECK(scalar_sign_correlation(kZ, diag) == doctest::Approx(-0.5).epsilon(1e-14));

    // Monte Carlo oracle with an independent generator: 3 sigma agreement at theta = pi/4.
    std::mt19937_64 rng(23);
    const std::array<double, 3> a{0.0, 0.0, 1.0};
    const std::array<double, 3> b{std::sin(std::numbers::pi / 4), 0.0, std::cos(std::numbers::pi / 4)};
    const int n = 10'000'000;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
        const auto l = oracle::random_direction(rng);
        const double fa = oracle::dot(a, l) >= 0 ? 1.0 : -1.0;
        const double fb = oracle::dot(b, l) >= 0 ? -1.0 : 1.0;
        sum += fa * fb;
    }
    const double mean = sum / n;
    const double sigma = std::sqrt((1.0 - mean * mean) / n);
    CHECK(std::abs(mean - (-0.5)) < 3.0 * sigma);

    // Bounded and monotone decreasing in a.b.
    std::mt19937_64 g(24);
    for (int k = 0; k < 500; ++k) {
        const UnitVector3 x = to_unit(oracle::random_direction(g));
        const UnitVector3 y = to_unit(oracle::random_direction(g));
        const UnitVector3 w = to_unit(oracle::random_direction(g));
        const double cxy = scalar_sign_correlation(x, y);
        const double cxw = scalar_sign_correlation(x, w);
        CHECK(std::abs(cxy) <= 1.0);
        if (x.dot(y) > x.dot(w)) CHECK(cxy <= cxw);
    }
}

TEST_CASE("model kind names")
{
    CHECK(parse_model_kind("triple") == ModelKind::triple);
    CHECK(parse_model_kind("scalar-sign") == ModelKind::scalar_sign);
    CHECK(to_string(ModelKind::cosine) == "cosine");
    CHECK_THROWS_AS(parse_model_kind("bohm"), InvalidArgument);
}

TEST_CASE("monte carlo special cases")
{
    const LHVModelSpec triple{ModelKind::triple};
    for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) {
        const McResult r = mc_correlation(triple, kZ, kZ, 5000, seed);
        CHECK(r.estimate == -1.0);
        CHECK(r.std_error == 0.0);
        CHECK(r.n == 5000);
        CHECK(r.seed == seed);
    }
    const McResult single = mc_correlation(triple, kX, kZ, 1, 5);
    CHECK(single.std_error == 0.0);
    CHECK_THROWS_AS(mc_correlation(triple, kX, kZ, 0, 5), InvalidArgument);

    const McResult xz = mc_correlation(triple, kX, kZ, 1'000'000, 7);
    CHECK(std::abs(xz.estimate) < 5.0 * xz.std_error);

    const McResult cos0 = mc_correlation(LHVModelSpec{ModelKind::cosine}, Setting::angle(0.0), Setting::angle(0.0),
                                         100'000, 8);
    CHECK(std::abs(cos0.estimate - 1.0) < 5.0 * cos0.std_error);
}

TEST_CASE("monte carlo is independent of lane count")
{
    const UnitVector3 a = UnitVector3::normalized(0.3, -0.2, 0.9);
    const UnitVector3 b = UnitVector3::normalized(-0.5, 0.4, 0.1);
    for (ModelKind kind : {ModelKind::triple, ModelKind::scalar_sign}) {
        const LHVModelSpec spec{kind};
        const McResult one = mc_correlation(spec, a, b, 100'003, 77, 1);
        for (unsigned lanes : {2U, 3U, 8U}) {
            const McResult many = mc_correlation(spec, a, b, 100'003, 77, lanes);
            CHECK(many.estimate == one.estimate);
            CHECK(many.std_error == one.std_error);
        }
    }
}

TEST_CASE("counter-based draws depend only on seed and index")
{
    for (std::uint64_t k = 0; k < 10; ++k) {
        CHECK(std::get<double>(draw_sample(ModelKind::triple, 5, k)) ==
              std::get<double>(draw_sample(ModelKind::triple, 5, k)));
    }
    CHECK(std::get<double>(draw_sample(ModelKind::triple, 5, 0)) !=
          std::get<double>(draw_sample(ModelKind::triple, 6, 0)));
}
