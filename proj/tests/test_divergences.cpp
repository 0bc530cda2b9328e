#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>
#include <random>

#include "compreg/divergences.hpp"
#include "oracles.hpp"

using namespace compreg;

namespace {

const double kLog2 = std::log(2.0);

// Random composition; with `zeros` some parts are set to exactly zero.
Composition random_composition(std::mt19937_64& gen, int parts, bool zeros)
{
    std::exponential_distribution<double> expo(1.0);
    Eigen::VectorXd v(parts);
    for (int j = 0; j < parts; ++j) {
        v[j] = expo(gen);
    }
    if (zeros) {
        for (int j = 0; j < parts; ++j) {
            if (gen() % 3 == 0) {
                v[j] = 0.0;
            }
        }
        if (v.sum() == 0.0) {
            v[static_cast<Eigen::Index>(gen() % parts)] = 1.0;
        }
    }
    return closure(v);
}

std::vector<long double> as_long(const Composition& c)
{
    std::vector<long double> out;
    for (Eigen::Index j = 0; j < c.size(); ++j) {
        out.push_back(c[j]);
    }
    return out;
}

} // namespace

TEST_CASE("esov basic values")
{
    const Composition x{0.2, 0.3, 0.5};
    CHECK(esov(x, x) == 0.0);
    CHECK(esov(Composition{1, 0}, Composition{0, 1}) == doctest::Approx(2 * kLog2).epsilon(1e-15));

    const Composition a{0.775, 0.195, 0.030};
    const Composition b{0.719, 0.249, 0.032};
    const long double expected = oracle::esov(as_long(a), as_long(b));
    CHECK(std::abs(esov(a, b) - static_cast<double>(expected)) < 1e-15);

    try {
        esov(Composition{0.5, 0.5}, Composition{0.2, 0.3, 0.5});
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DimensionMismatch);
    }
}

TEST_CASE("esov matches the extended precision oracle")
{
    std::mt19937_64 gen(1234);
    for (int t = 0; t < 2000; ++t) {
        const int parts = 2 + static_cast<int>(gen() % 10);
        const Composition x = random_composition(gen, parts, t % 2 == 0);
        const Composition y = random_composition(gen, parts, t % 3 == 0);
        const double expected = static_cast<double>(oracle::esov(as_long(x), as_long(y)));
        CHECK(std::abs(esov(x, y) - expected) < 1e-13);
    }
}

TEST_CASE("esov symmetry, range and metric property")
{
    std::mt19937_64 gen(99);
    for (int t = 0; t < 3000; ++t) {
        const int parts = std::array<int, 4>{2, 3, 6, 16}[t % 4];
        const bool zeros = t % 2 == 1;
        const Composition x = random_composition(gen, parts, zeros);
        const Composition y = random_composition(gen, parts, zeros);
        const Composition z = random_composition(gen, parts, zeros);
        const double xy = esov(x, y);
        CHECK(xy == esov(y, x));
        CHECK(xy >= 0.0);
        CHECK(xy <= 2 * kLog2);
        CHECK_FALSE(std::isnan(xy));
        CHECK(std::sqrt(esov(x, y)) + std::sqrt(esov(y, z)) - std::sqrt(esov(x, z)) >= -1e-12);
    }
}

TEST_CASE("phi form agrees with esov on positive pairs")
{
    CHECK(esov_phi_form(Composition{0.3, 0.7}, Composition{0.3, 0.7}) == doctest::Approx(0.0));
    const Composition a{0.5, 0.5};
    const Composition b{0.9, 0.1};
    CHECK(std::abs(esov_phi_form(a, b) - esov(a, b)) < 1e-12);

    std::mt19937_64 gen(5);
    for (int t = 0; t < 2000; ++t) {
        const int parts = 2 + static_cast<int>(gen() % 15);
        const Composition x = random_composition(gen, parts, false);
        const Composition y = random_composition(gen, parts, false);
        CHECK(std::abs(esov_phi_form(x, y) - esov(x, y)) < 1e-12);
    }

    try {
        esov_phi_form(Composition{0.5, 0.5}, Composition{1.0, 0.0});
        FAIL("expected ZeroPart");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ZeroPart);
    }
}

TEST_CASE("kl")
{
    const Composition x{0.1, 0.6, 0.3};
    CHECK(kl(x, x) == 0.0);
    CHECK(kl(Composition{1, 0}, Composition{0.5, 0.5}) == doctest::Approx(kLog2).epsilon(1e-15));
    CHECK(kl(Composition{0.5, 0.5}, Composition{1, 0}) == std::numeric_limits<double>::infinity());

    std::mt19937_64 gen(8);
    for (int t = 0; t < 1000; ++t) {
        const Composition a = random_composition(gen, 4, false);
        const Composition b = random_composition(gen, 4, false);
        CHECK(kl(a, b) >= 0.0);
        CHECK(kl(a, b) > 1e-12);
        CHECK(std::abs(kl(a, b) - oracle::kl(a.parts(), b.parts())) < 1e-13);
    }
}

TEST_CASE("weighted js")
{
    std::mt19937_64 gen(21);
    for (int t = 0; t < 500; ++t) {
        const Composition a = random_composition(gen, 5, t % 2 == 0);
        const Composition b = random_composition(gen, 5, t % 2 == 1);
        CHECK(std::abs(weighted_js(a, b, 0.5) - esov(a, b) / 2) < 1e-12);
    }
    const Composition x{0.4, 0.6};
    CHECK(weighted_js(x, x, 0.0) == 0.0);
    // lambda = 0 keeps only the y log(2y/(x+y)) terms:
    // 0.5 log(1 / 1.5) + 0.5 log(1 / 0.5) = 0.5 log(4/3)
    CHECK(weighted_js(Composition{1, 0}, Composition{0.5, 0.5}, 0.0) ==
          doctest::Approx(0.5 * std::log(4.0 / 3.0)).epsilon(1e-15));
    // lambda = 1 keeps the x terms: 1 log(2 / 1.5)
    CHECK(weighted_js(Composition{1, 0}, Composition{0.5, 0.5}, 1.0) ==
          doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-15));

    try {
        weighted_js(x, x, 1.5);
        FAIL("expected InvalidLambda");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidLambda);
    }
    CHECK_THROWS_AS(DivergenceKind::weighted_js(-0.1), Error);
}

TEST_CASE("jeffreys")
{
    const Composition x{0.25, 0.75};
    CHECK(jeffreys(x, x) == 0.0);
    CHECK(jeffreys(Composition{1, 0}, Composition{0, 1}) == std::numeric_limits<double>::infinity());
    std::mt19937_64 gen(2);
    for (int t = 0; t < 500; ++t) {
        const Composition a = random_composition(gen, 6, false);
        const Composition b = random_composition(gen, 6, false);
        CHECK(jeffreys(a, b) == doctest::Approx(kl(a, b) + kl(b, a)).epsilon(1e-14));
        CHECK(jeffreys(a, b) == doctest::Approx(jeffreys(b, a)).epsilon(1e-14));
    }
}

TEST_CASE("hellinger and chi square")
{
    const Composition x{0.1, 0.2, 0.7};
    CHECK(hellinger(x, x) == 0.0);
    CHECK(chi_square(x, x) == 0.0);
    CHECK(hellinger(Composition{1, 0}, Composition{0, 1}) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(chi_square(Composition{0.5, 0.5}, Composition{0.25, 0.75}) == doctest::Approx(1.0 / 3).epsilon(1e-15));
    CHECK(chi_square(Composition{0.5, 0.5}, Composition{1, 0}) == std::numeric_limits<double>::infinity());

    std::mt19937_64 gen(4);
    for (int t = 0; t < 500; ++t) {
        const Composition a = random_composition(gen, 4, true);
        const Composition b = random_composition(gen, 4, true);
        const double h = hellinger(a, b);
        CHECK(h >= 0.0);
        CHECK(h <= 1.0 + 1e-15);
    }
}

TEST_CASE("divergence dispatch")
{
    const Composition a{0.2, 0.8};
    const Composition b{0.6, 0.4};
    CHECK(divergence(DivergenceKind::esov(), a, b) == esov(a, b));
    CHECK(divergence(DivergenceKind::kl(), a, b) == kl(a, b));
    CHECK(divergence(DivergenceKind::weighted_js(0.3), a, b) == weighted_js(a, b, 0.3));
    CHECK(divergence(DivergenceKind::jeffreys(), a, b) == jeffreys(a, b));
    CHECK(divergence(DivergenceKind::hellinger(), a, b) == hellinger(a, b));
    CHECK(divergence(DivergenceKind::chi_square(), a, b) == chi_square(a, b));
}
