#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "rauzy/renewal.hpp"

namespace rauzy {
namespace {

TEST_CASE("series coefficients at delta one", "[renewal]") {
    Dimension d3(3);
    REQUIRE(b_coeff_exact(d3, 1) == make_rational(27, 64));
    REQUIRE(b_coeff_exact(d3, 2) == make_rational(64, 125));
    REQUIRE(a_coeff_exact(d3, 1) == make_rational(91, 216));
    REQUIRE(a_coeff_exact(d3, 2) == make_rational(341, 1000));
    REQUIRE(lambda_coeff_exact(d3, 1) == make_rational(91, 216));
    REQUIRE(lambda_coeff_exact(d3, 2) == make_rational(9207, 64000));
    REQUIRE(lambda_coeff_exact(d3, 3) == make_rational(4617, 68600));

    REQUIRE(b_coeff_exact(Dimension(4), 1) == make_rational(81, 256));
    REQUIRE(a_coeff_exact(Dimension(4), 1) == make_rational(209, 648));

    REQUIRE_THROWS_AS(a_coeff_exact(d3, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(b_coeff_exact(d3, -1), std::invalid_argument);
}

TEST_CASE("telescoped coefficients equal the literal product", "[renewal]") {
    for (int dv : {3, 4, 5}) {
        Dimension d(dv);
        for (int k = 1; k <= 200; ++k) {
            REQUIRE(lambda_coeff_exact(d, k) == lambda_coeff_product_exact(d, k));
        }
    }
}

TEST_CASE("float coefficients mirror the exact ones", "[renewal]") {
    Dimension d3(3);
    for (int k : {1, 2, 5, 20, 100}) {
        REQUIRE(b_coeff_float(d3, 1.0, k) ==
                Catch::Approx(to_double(b_coeff_exact(d3, k))).epsilon(1e-14));
        REQUIRE(a_coeff_float(d3, 1.0, k) ==
                Catch::Approx(to_double(a_coeff_exact(d3, k))).epsilon(1e-14));
        REQUIRE(lambda_coeff_float(d3, 1.0, k) ==
                Catch::Approx(to_double(lambda_coeff_exact(d3, k))).epsilon(1e-14));
    }
    REQUIRE(lambda_coeff(d3, DeltaMode::exact_unit(), 2).exact.value() ==
            make_rational(9207, 64000));
    REQUIRE_FALSE(lambda_coeff(d3, DeltaMode::floating(0.9), 2).exact.has_value());
}

TEST_CASE("integrand dominates every series term", "[renewal]") {
    for (int dv : {3, 4, 6}) {
        Dimension d(dv);
        for (int k = 1; k <= 2000; ++k) {
            REQUIRE(lambda_coeff_exact(d, k) <= tail_integrand_exact(d, k));
        }
    }
    REQUIRE(tail_integrand_exact(Dimension(3), 1) == make_rational(9, 8));
}

TEST_CASE("tail bounds", "[renewal]") {
    Dimension d3(3);
    REQUIRE(tail_bound_exact(d3, 1) == make_rational(15, 16));
    REQUIRE(tail_bound_exact(d3, 2) == make_rational(2403, 6400));
    REQUIRE(tail_bound_exact(d3, 3) == make_rational(4023, 19600));

    // Strictly decreasing in the lower limit.
    for (long L = 1; L <= 30; ++L) {
        REQUIRE(tail_bound_exact(d3, L + 1) < tail_bound_exact(d3, L));
    }

    for (long L : {1L, 3L, 10L, 1000L}) {
        REQUIRE(tail_bound_float(d3, 1.0, L) ==
                Catch::Approx(to_double(tail_bound_exact(d3, L))).epsilon(1e-13));
    }

    REQUIRE_THROWS_AS(tail_bound_float(d3, 1.0 / 3.0, 5), std::domain_error);
    REQUIRE_THROWS_AS(tail_bound_float(d3, 0.2, 5), std::domain_error);
    REQUIRE_THROWS_AS(tail_bound_exact(d3, 0), std::invalid_argument);
    REQUIRE(tail_bound(d3, DeltaMode::exact_unit(), 3).exact.value() ==
            make_rational(4023, 19600));
}

TEST_CASE("criterion sum at small truncation", "[renewal]") {
    Dimension d3(3);
    CriterionReport rigorous = criterion_sum(d3, DeltaMode::exact_unit(), 3, 3);
    REQUIRE(rigorous.partial_sum.exact.value() == make_rational(374860907, 592704000));
    REQUIRE(rigorous.tail.exact.value() == make_rational(4023, 19600));
    REQUIRE(rigorous.upper_bound.exact.value() == make_rational(496516427, 592704000));
    REQUIRE(rigorous.verdict);
    REQUIRE(rigorous.K == 3);
    REQUIRE(rigorous.tail_lower_limit == 3);
    REQUIRE(rigorous.exact);
    REQUIRE(rigorous.delta == 1.0);

    CriterionReport shifted = criterion_sum(d3, DeltaMode::exact_unit(), 3, 2);
    REQUIRE(shifted.upper_bound.exact.value() == make_rational(597402737, 592704000));
    REQUIRE_FALSE(shifted.verdict);

    CriterionReport single = criterion_sum(d3, DeltaMode::exact_unit(), 1, 1);
    REQUIRE(single.partial_sum.exact.value() == make_rational(91, 216));
    REQUIRE_FALSE(single.verdict);
}

TEST_CASE("criterion argument validation", "[renewal]") {
    Dimension d3(3);
    REQUIRE_THROWS_AS(criterion_sum(d3, DeltaMode::exact_unit(), 0, 0), std::domain_error);
    REQUIRE_THROWS_AS(criterion_sum(d3, DeltaMode::exact_unit(), 10, 8), std::domain_error);
    REQUIRE_THROWS_AS(criterion_sum(d3, DeltaMode::exact_unit(), 1, 0), std::domain_error);
    REQUIRE_THROWS_AS(criterion_sum(d3, DeltaMode::floating(0.5), 10, 10), std::domain_error);
    REQUIRE_NOTHROW(criterion_sum(d3, DeltaMode::floating(0.51), 10, 10));
}

TEST_CASE("factored summation matches plain pairwise summation", "[renewal]") {
    for (int dv : {3, 5}) {
        Dimension d(dv);
        const long K = 2000;
        std::vector<Rational> terms;
        terms.reserve(K);
        for (long k = 1; k <= K; ++k) terms.push_back(lambda_coeff_exact(d, static_cast<int>(k)));
        Rational plain = detail::pairwise_sum(terms, 0, terms.size());
        CriterionReport rep = criterion_sum(d, DeltaMode::exact_unit(), K, K);
        REQUIRE(rep.partial_sum.exact.value() == plain);
    }
}

TEST_CASE("certified verdicts at the default truncation", "[renewal]") {
    CriterionReport r3 = criterion_sum(Dimension(3), DeltaMode::exact_unit(), 20000, 20000);
    REQUIRE(r3.verdict);
    REQUIRE(r3.upper_bound.exact.value() < 1);

    // Larger truncation tightens the bound.
    CriterionReport coarse = criterion_sum(Dimension(3), DeltaMode::exact_unit(), 1000, 1000);
    REQUIRE(r3.upper_bound.exact.value() < coarse.upper_bound.exact.value());

    // The bound improves with d.
    CriterionReport r4 = criterion_sum(Dimension(4), DeltaMode::exact_unit(), 1000, 1000);
    REQUIRE(r4.upper_bound.exact.value() < coarse.upper_bound.exact.value());
}

TEST_CASE("float criterion decreases in delta", "[renewal]") {
    Dimension d3(3);
    double prev = 2.0;
    for (double delta : {0.85, 0.9, 0.95, 1.0}) {
        CriterionReport rep = criterion_sum(d3, DeltaMode::floating(delta), 5000, 5000);
        REQUIRE(rep.upper_bound.approx < prev);
        prev = rep.upper_bound.approx;
    }
}

TEST_CASE("criterion is deterministic across worker counts", "[renewal]") {
    Dimension d3(3);
    CriterionReport e1 = criterion_sum(d3, DeltaMode::exact_unit(), 20000, 20000, {.threads = 1});
    CriterionReport e4 = criterion_sum(d3, DeltaMode::exact_unit(), 20000, 20000, {.threads = 4});
    REQUIRE(e1.partial_sum.exact.value() == e4.partial_sum.exact.value());

    CriterionReport f1 = criterion_sum(d3, DeltaMode::floating(0.9), 50000, 50000, {.threads = 1});
    CriterionReport f4 = criterion_sum(d3, DeltaMode::floating(0.9), 50000, 50000, {.threads = 4});
    CriterionReport f8 = criterion_sum(d3, DeltaMode::floating(0.9), 50000, 50000, {.threads = 8});
    REQUIRE(f1.partial_sum.approx == f4.partial_sum.approx);
    REQUIRE(f4.partial_sum.approx == f8.partial_sum.approx);
}

TEST_CASE("bisection pins the minimal certified delta", "[renewal]") {
    BisectionResult r = min_delta(Dimension(3));
    REQUIRE(r.delta_star == 0.89336800667542948);
    REQUIRE(r.iterations == 29);
    REQUIRE(r.dim_upper_bound == 1.0 + r.delta_star);
    REQUIRE(r.dim_upper_bound < 2.0);
    REQUIRE(r.final_report.verdict);
    REQUIRE(r.final_report.upper_bound.approx < 1.0);
    REQUIRE(1.0 - r.final_report.upper_bound.approx < 1e-6);

    REQUIRE_THROWS_AS(min_delta(Dimension(3), 0.0), std::invalid_argument);
}

TEST_CASE("bisection refuses when no certificate exists", "[renewal]") {
    REQUIRE_THROWS_AS(min_delta(Dimension(3), kDefaultBisectionTol, 1), NoCertificateError);
}

TEST_CASE("coefficients shrink as d grows", "[renewal]") {
    REQUIRE(d_monotonicity_check(6, 100));
    REQUIRE(d_monotonicity_check(4, 500));
    REQUIRE_THROWS_AS(d_monotonicity_check(3, 100), std::invalid_argument);
    REQUIRE_THROWS_AS(d_monotonicity_check(6, 0), std::invalid_argument);
}

}  // namespace
}  // namespace rauzy
