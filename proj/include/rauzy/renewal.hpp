#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rauzy/enumeration.hpp"
#include "rauzy/gasket_core.hpp"
#include "rauzy/parallel.hpp"
#include "rauzy/rational.hpp"

namespace rauzy {

class NoCertificateError : public std::runtime_error {
public:
    explicit NoCertificateError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SeriesOptions {
    int threads = 0;
};

inline constexpr int kDominationCheckLimit = 10000;
inline constexpr std::size_t kSeriesChunk = 4096;

inline Rational b_coeff_exact(Dimension d, int k) {
    if (k < 1) throw std::invalid_argument("coefficient index starts at 1");
    return rational_pow(make_rational(k + 2, k + 3), static_cast<unsigned long>(d.value()));
}

inline double b_coeff_float(Dimension d, double delta, int k) {
    if (k < 1) throw std::invalid_argument("coefficient index starts at 1");
    double s = d.value() * delta;
    return std::pow((k + 2.0) / (k + 3.0), s);
}

inline Rational a_coeff_exact(Dimension d, int k) {
    if (k < 1) throw std::invalid_argument("coefficient index starts at 1");
    unsigned long e = static_cast<unsigned long>(d.value());
    Rational first = rational_pow(make_rational(k + 1, 2 * k + 1), e);
    Rational second = rational_pow(make_rational(1, 2), e) * (d.value() - 2);
    return first + second;
}

inline double a_coeff_float(Dimension d, double delta, int k) {
    if (k < 1) throw std::invalid_argument("coefficient index starts at 1");
    double s = d.value() * delta;
    return std::pow((k + 1.0) / (2.0 * k + 1.0), s) + std::pow(0.5, s) * (d.value() - 2);
}

// Telescoped closed form: lambda_k = a_k * (3/(k+2))^{d delta}.
inline Rational lambda_coeff_exact(Dimension d, int k) {
    return a_coeff_exact(d, k) *
           rational_pow(make_rational(3, k + 2), static_cast<unsigned long>(d.value()));
}

inline double lambda_coeff_float(Dimension d, double delta, int k) {
    double s = d.value() * delta;
    return a_coeff_float(d, delta, k) * std::pow(3.0 / (k + 2.0), s);
}

// Literal product a_k * prod_{j=1}^{k-1} b_j, kept as an independent route
// for cross-checking the telescoped form.
inline Rational lambda_coeff_product_exact(Dimension d, int k) {
    Rational value = a_coeff_exact(d, k);
    for (int j = 1; j < k; ++j) value *= b_coeff_exact(d, j);
    return value;
}

inline ModeValue b_coeff(Dimension d, DeltaMode mode, int k) {
    if (mode.is_exact()) return ModeValue::from_exact(b_coeff_exact(d, k));
    return ModeValue::from_float(b_coeff_float(d, mode.delta(), k));
}

inline ModeValue a_coeff(Dimension d, DeltaMode mode, int k) {
    if (mode.is_exact()) return ModeValue::from_exact(a_coeff_exact(d, k));
    return ModeValue::from_float(a_coeff_float(d, mode.delta(), k));
}

inline ModeValue lambda_coeff(Dimension d, DeltaMode mode, int k) {
    if (mode.is_exact()) return ModeValue::from_exact(lambda_coeff_exact(d, k));
    return ModeValue::from_float(lambda_coeff_float(d, mode.delta(), k));
}

// Integrand dominating the series: g(x) = (3/(2x+1))^s + (d-2)(3/(2(x+2)))^s.
// lambda_k <= g(k) because (k+1)/(k+2) < 1.
inline Rational tail_integrand_exact(Dimension d, int k) {
    unsigned long e = static_cast<unsigned long>(d.value());
    return rational_pow(make_rational(3, 2 * k + 1), e) +
           rational_pow(make_rational(3, 2 * k + 4), e) * (d.value() - 2);
}

inline double tail_integrand_float(Dimension d, double delta, double x) {
    double s = d.value() * delta;
    return std::pow(3.0 / (2.0 * x + 1.0), s) +
           (d.value() - 2) * std::pow(3.0 / (2.0 * (x + 2.0)), s);
}

// Closed form of the integral of g over [L, infinity):
// 3^s (2L+1)^{1-s} / (2(s-1)) + (d-2)(3/2)^s (L+2)^{1-s} / (s-1).
inline Rational tail_bound_exact(Dimension d, long lower_limit) {
    if (lower_limit < 1) throw std::invalid_argument("tail lower limit must be >= 1");
    unsigned long e = static_cast<unsigned long>(d.value());
    Rational three_pow = rational_pow(Rational(3), e);
    Rational first = three_pow * rational_pow(make_rational(1, 2 * lower_limit + 1), e - 1) /
                     (2 * (d.value() - 1));
    Rational second = three_pow * rational_pow(make_rational(1, 2), e) *
                      rational_pow(make_rational(1, lower_limit + 2), e - 1) *
                      (d.value() - 2) / (d.value() - 1);
    return first + second;
}

inline double tail_bound_float(Dimension d, double delta, long lower_limit) {
    double s = d.value() * delta;
    if (!(s > 1.0)) throw std::domain_error("tail bound requires d*delta > 1");
    if (lower_limit < 1) throw std::invalid_argument("tail lower limit must be >= 1");
    double first = std::pow(3.0, s) * std::pow(2.0 * lower_limit + 1.0, 1.0 - s) /
                   (2.0 * (s - 1.0));
    double second = (d.value() - 2) * std::pow(1.5, s) *
                    std::pow(lower_limit + 2.0, 1.0 - s) / (s - 1.0);
    return first + second;
}

inline ModeValue tail_bound(Dimension d, DeltaMode mode, long lower_limit) {
    if (mode.is_exact()) return ModeValue::from_exact(tail_bound_exact(d, lower_limit));
    return ModeValue::from_float(tail_bound_float(d, mode.delta(), lower_limit));
}

struct CriterionReport {
    int d = 0;
    double delta = 0.0;
    bool exact = false;
    long K = 0;
    long tail_lower_limit = 0;
    ModeValue partial_sum;
    ModeValue tail;
    ModeValue upper_bound;
    bool verdict = false;
};

struct BisectionResult {
    double delta_star = 0.0;
    double dim_upper_bound = 0.0;
    int iterations = 0;
    CriterionReport final_report;
};

namespace detail {

template <typename V>
V pairwise_sum(const std::vector<V>& terms, std::size_t lo, std::size_t hi) {
    if (hi == lo) return V{};
    if (hi - lo == 1) return terms[lo];
    std::size_t mid = lo + (hi - lo) / 2;
    return pairwise_sum(terms, lo, mid) + pairwise_sum(terms, mid, hi);
}

inline std::vector<std::int32_t> spf_sieve(std::int64_t n) {
    std::vector<std::int32_t> spf(static_cast<std::size_t>(n) + 1, 0);
    for (std::int64_t i = 2; i <= n; ++i) {
        if (spf[static_cast<std::size_t>(i)] == 0) {
            for (std::int64_t j = i; j <= n; j += i) {
                if (spf[static_cast<std::size_t>(j)] == 0) {
                    spf[static_cast<std::size_t>(j)] = static_cast<std::int32_t>(i);
                }
            }
        }
    }
    return spf;
}

// Exact series terms carry their denominator's prime factorization alongside
// the plain integers, so merging two partial sums only multiplies each side
// by the small product of primes it is missing instead of running a gcd over
// the full denominators at every node of the reduction tree.
struct FactoredRational {
    BigInt num;
    BigInt den;
    std::vector<std::pair<std::int32_t, std::int32_t>> factors;
};

inline BigInt product_of_powers(const std::vector<std::pair<std::int32_t, std::int32_t>>& pows) {
    if (pows.empty()) return BigInt(1);
    std::vector<BigInt> vals;
    vals.reserve(pows.size());
    for (auto [prime, exp] : pows) {
        BigInt t;
        mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(prime),
                      static_cast<unsigned long>(exp));
        vals.push_back(std::move(t));
    }
    while (vals.size() > 1) {
        std::vector<BigInt> next;
        next.reserve(vals.size() / 2 + 1);
        for (std::size_t i = 0; i + 1 < vals.size(); i += 2) next.push_back(vals[i] * vals[i + 1]);
        if (vals.size() % 2) next.push_back(std::move(vals.back()));
        vals = std::move(next);
    }
    return vals[0];
}

inline void append_value_factors(std::vector<std::pair<std::int32_t, std::int32_t>>& out,
                                 std::int64_t value, std::int32_t multiplicity,
                                 const std::vector<std::int32_t>& spf) {
    while (value > 1) {
        std::int32_t p = spf[static_cast<std::size_t>(value)];
        std::int32_t e = 0;
        while (value % p == 0) {
            value /= p;
            ++e;
        }
        out.push_back({p, e * multiplicity});
    }
}

// lambda_k at delta=1 as 3^d (2^d (k+1)^d + (d-2)(2k+1)^d) / (2(2k+1)(k+2))^d,
// reduced to lowest terms with the reduction mirrored in the factor list.
inline FactoredRational lambda_term_factored(Dimension d, std::int64_t k,
                                             const std::vector<std::int32_t>& spf,
                                             const BigInt& three_pow) {
    unsigned long e = static_cast<unsigned long>(d.value());
    FactoredRational f;
    BigInt first, second;
    mpz_ui_pow_ui(first.get_mpz_t(), static_cast<unsigned long>(k + 1), e);
    mpz_mul_2exp(first.get_mpz_t(), first.get_mpz_t(), e);
    mpz_ui_pow_ui(second.get_mpz_t(), static_cast<unsigned long>(2 * k + 1), e);
    second *= (d.value() - 2);
    f.num = three_pow * (first + second);

    std::vector<std::pair<std::int32_t, std::int32_t>> raw;
    raw.push_back({2, d.value()});
    append_value_factors(raw, 2 * k + 1, d.value(), spf);
    append_value_factors(raw, k + 2, d.value(), spf);
    std::sort(raw.begin(), raw.end());
    for (auto [prime, exp] : raw) {
        if (!f.factors.empty() && f.factors.back().first == prime) {
            f.factors.back().second += exp;
        } else {
            f.factors.push_back({prime, exp});
        }
    }
    unsigned long base = 2ul * static_cast<unsigned long>(2 * k + 1) *
                         static_cast<unsigned long>(k + 2);
    mpz_ui_pow_ui(f.den.get_mpz_t(), base, e);

    BigInt g;
    mpz_gcd(g.get_mpz_t(), f.num.get_mpz_t(), f.den.get_mpz_t());
    if (g != 1) {
        mpz_divexact(f.num.get_mpz_t(), f.num.get_mpz_t(), g.get_mpz_t());
        mpz_divexact(f.den.get_mpz_t(), f.den.get_mpz_t(), g.get_mpz_t());
        for (auto& [prime, exp] : f.factors) {
            while (exp > 0 && mpz_divisible_ui_p(g.get_mpz_t(), static_cast<unsigned long>(prime))) {
                mpz_divexact_ui(g.get_mpz_t(), g.get_mpz_t(), static_cast<unsigned long>(prime));
                --exp;
            }
            if (g == 1) break;
        }
        std::erase_if(f.factors, [](const auto& pe) { return pe.second == 0; });
    }
    return f;
}

inline FactoredRational merge_factored(FactoredRational a, FactoredRational b) {
    FactoredRational out;
    std::vector<std::pair<std::int32_t, std::int32_t>> need_a, need_b;
    out.factors.reserve(a.factors.size() + b.factors.size());
    std::size_t i = 0, j = 0;
    while (i < a.factors.size() || j < b.factors.size()) {
        if (j == b.factors.size() ||
            (i < a.factors.size() && a.factors[i].first < b.factors[j].first)) {
            out.factors.push_back(a.factors[i]);
            need_b.push_back(a.factors[i]);
            ++i;
        } else if (i == a.factors.size() || b.factors[j].first < a.factors[i].first) {
            out.factors.push_back(b.factors[j]);
            need_a.push_back(b.factors[j]);
            ++j;
        } else {
            auto [prime, ea] = a.factors[i];
            std::int32_t eb = b.factors[j].second;
            std::int32_t mx = std::max(ea, eb);
            out.factors.push_back({prime, mx});
            if (mx > ea) need_a.push_back({prime, mx - ea});
            if (mx > eb) need_b.push_back({prime, mx - eb});
            ++i;
            ++j;
        }
    }
    BigInt mul_a = product_of_powers(need_a);
    BigInt mul_b = product_of_powers(need_b);
    out.num = a.num * mul_a + b.num * mul_b;
    out.den = a.den * mul_a;
    return out;
}

inline FactoredRational pairwise_merge_factored(std::vector<FactoredRational>& terms,
                                                std::size_t lo, std::size_t hi) {
    if (hi - lo == 1) return std::move(terms[lo]);
    std::size_t mid = lo + (hi - lo) / 2;
    return merge_factored(pairwise_merge_factored(terms, lo, mid),
                          pairwise_merge_factored(terms, mid, hi));
}

// Exact lambda series sum over k = 1..K with the same chunk layout as
// chunked_series_sum. check_limit terms are verified against the integrand
// by cross-multiplication before entering the sum.
inline Rational factored_lambda_series(Dimension d, long K, long check_limit, int threads) {
    auto spf = spf_sieve(2l * K + 2);
    BigInt three_pow;
    mpz_ui_pow_ui(three_pow.get_mpz_t(), 3ul, static_cast<unsigned long>(d.value()));

    std::size_t count = static_cast<std::size_t>(K);
    std::size_t chunks = (count + kSeriesChunk - 1) / kSeriesChunk;
    std::vector<FactoredRational> chunk_sums(chunks);
    parallel_for_index(chunks, resolve_threads(threads), [&](std::size_t c) {
        std::size_t begin = c * kSeriesChunk;
        std::size_t end = std::min(count, begin + kSeriesChunk);
        std::vector<FactoredRational> terms;
        terms.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) {
            long k = static_cast<long>(i) + 1;
            FactoredRational term = lambda_term_factored(d, k, spf, three_pow);
            if (k <= check_limit) {
                Rational bound = tail_integrand_exact(d, static_cast<int>(k));
                BigInt lhs = term.num * BigInt(bound.get_den());
                BigInt rhs = BigInt(bound.get_num()) * term.den;
                if (lhs > rhs) {
                    throw std::logic_error("series term exceeds its integrand bound at k=" +
                                           std::to_string(k));
                }
            }
            terms.push_back(std::move(term));
        }
        chunk_sums[c] = pairwise_merge_factored(terms, 0, terms.size());
    });
    FactoredRational total = pairwise_merge_factored(chunk_sums, 0, chunk_sums.size());

    Rational sum;
    mpz_swap(mpq_numref(sum.get_mpq_t()), total.num.get_mpz_t());
    mpz_swap(mpq_denref(sum.get_mpq_t()), total.den.get_mpz_t());
    mpq_canonicalize(sum.get_mpq_t());
    return sum;
}

// Chunked pairwise series sum with a fixed reduction shape: chunk c covers
// indices [1 + c*chunk, min(K, (c+1)*chunk)], chunks evaluate in parallel,
// chunk results merge pairwise in chunk order.
template <typename TermFn, typename V>
V chunked_series_sum(long K, int threads, TermFn term, V /*tag*/) {
    std::size_t count = static_cast<std::size_t>(K);
    std::size_t chunks = (count + kSeriesChunk - 1) / kSeriesChunk;
    std::vector<V> chunk_sums(chunks);
    parallel_for_index(chunks, resolve_threads(threads), [&](std::size_t c) {
        std::size_t begin = c * kSeriesChunk;
        std::size_t end = std::min(count, begin + kSeriesChunk);
        std::vector<V> terms;
        terms.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) {
            terms.push_back(term(static_cast<long>(i) + 1));
        }
        chunk_sums[c] = pairwise_sum(terms, 0, terms.size());
    });
    return pairwise_sum(chunk_sums, 0, chunk_sums.size());
}

}  // namespace detail

inline CriterionReport criterion_sum(Dimension d, DeltaMode mode, long K, long tail_lower_limit,
                                     const SeriesOptions& opts = {}) {
    if (K < 1) throw std::domain_error("criterion truncation K must be >= 1");
    if (tail_lower_limit != K && tail_lower_limit != K - 1) {
        throw std::domain_error("tail lower limit must be K (rigorous) or K-1");
    }
    if (tail_lower_limit < 1) throw std::domain_error("tail lower limit must be >= 1");
    double delta = mode.is_exact() ? 1.0 : mode.delta();
    if (!(delta > 1.0 / (d.value() - 1))) {
        throw std::domain_error("criterion requires delta > 1/(d-1)");
    }

    CriterionReport report;
    report.d = d.value();
    report.delta = delta;
    report.exact = mode.is_exact();
    report.K = K;
    report.tail_lower_limit = tail_lower_limit;

    long check_limit = std::min<long>(K, kDominationCheckLimit);
    if (mode.is_exact()) {
        Rational partial = detail::factored_lambda_series(d, K, check_limit, opts.threads);
        Rational tail = tail_bound_exact(d, tail_lower_limit);
        Rational upper = partial + tail;
        report.verdict = upper < 1;
        report.partial_sum = ModeValue::from_exact(std::move(partial));
        report.tail = ModeValue::from_exact(std::move(tail));
        report.upper_bound = ModeValue::from_exact(std::move(upper));
    } else {
        double partial = detail::chunked_series_sum(
            K, opts.threads,
            [&](long k) {
                double lambda = lambda_coeff_float(d, delta, static_cast<int>(k));
                if (k <= check_limit &&
                    lambda > tail_integrand_float(d, delta, static_cast<double>(k))) {
                    throw std::logic_error("series term exceeds its integrand bound at k=" +
                                           std::to_string(k));
                }
                return lambda;
            },
            0.0);
        double tail = tail_bound_float(d, delta, tail_lower_limit);
        double upper = partial + tail;
        report.verdict = upper < 1.0;
        report.partial_sum = ModeValue::from_float(partial);
        report.tail = ModeValue::from_float(tail);
        report.upper_bound = ModeValue::from_float(upper);
    }
    return report;
}

inline constexpr long kDefaultSeriesK = 100000;
inline constexpr double kDefaultBisectionTol = 1e-9;

// Smallest delta in ((d-1)^{-1}, 1] whose truncated criterion certifies
// dim <= d - 2 + delta, located by bisection to within tol. Valid because
// every series term and the tail are strictly decreasing in delta.
inline BisectionResult min_delta(Dimension d, double tol = kDefaultBisectionTol,
                                 long K = kDefaultSeriesK, const SeriesOptions& opts = {}) {
    if (!(tol > 0.0)) throw std::invalid_argument("bisection tolerance must be positive");
    auto probe = [&](double delta) {
        return criterion_sum(d, DeltaMode::floating(delta), K, K, opts);
    };
    CriterionReport at_hi = probe(1.0);
    if (!at_hi.verdict) {
        throw NoCertificateError("criterion fails at delta=1 for d=" +
                                 std::to_string(d.value()) + "; increase K");
    }
    double lo = 1.0 / (d.value() - 1) + 1e-6;
    double hi = 1.0;
    int iterations = 0;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        CriterionReport rep = probe(mid);
        if (rep.verdict) {
            hi = mid;
            at_hi = std::move(rep);
        } else {
            lo = mid;
        }
        ++iterations;
    }
    BisectionResult out;
    out.delta_star = hi;
    out.dim_upper_bound = d.value() - 2 + hi;
    out.iterations = iterations;
    out.final_report = std::move(at_hi);
    return out;
}

// Exact witness that every coefficient lambda_k at delta=1 decreases when d
// grows, for 3 <= d < d_max and k <= k_max.
inline bool d_monotonicity_check(int d_max, int k_max) {
    if (d_max < 4) throw std::invalid_argument("monotonicity check needs d_max >= 4");
    if (k_max < 1) throw std::invalid_argument("monotonicity check needs k_max >= 1");
    for (int d = 3; d < d_max; ++d) {
        for (int k = 1; k <= k_max; ++k) {
            if (lambda_coeff_exact(Dimension(d + 1), k) > lambda_coeff_exact(Dimension(d), k)) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace rauzy
