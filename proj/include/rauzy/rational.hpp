#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <stdexcept>
#include <string>

namespace rauzy {

using BigInt = mpz_class;
using Rational = mpq_class;

// Builds a canonical fraction: lowest terms, positive denominator.
inline Rational make_rational(const BigInt& num, const BigInt& den) {
    if (den == 0) {
        throw std::invalid_argument("rational with zero denominator");
    }
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline Rational rational_pow(const Rational& base, unsigned long exponent) {
    Rational out;
    mpz_pow_ui(out.get_num_mpz_t(), base.get_num().get_mpz_t(), exponent);
    mpz_pow_ui(out.get_den_mpz_t(), base.get_den().get_mpz_t(), exponent);
    // base is canonical, so num^e / den^e already is.
    return out;
}

// Nearest-even correctly rounded conversion; mpq_get_d truncates, which is
// not good enough for reproducible float-mode sums.
inline double to_double(const Rational& q) {
    mpfr_t x;
    mpfr_init2(x, 53);
    mpfr_set_q(x, q.get_mpq_t(), MPFR_RNDN);
    double d = mpfr_get_d(x, MPFR_RNDN);
    mpfr_clear(x);
    return d;
}

// Always "num/den", including a unit denominator, so serialized values are
// unambiguous and byte-stable.
inline std::string fraction_string(const Rational& q) {
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// Accepts "p/q", plain integers, and decimal literals like "0.05" (scaled
// exactly by a power of ten).
inline Rational parse_rational(const std::string& text) {
    if (text.empty()) {
        throw std::invalid_argument("empty rational literal");
    }
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        BigInt num(text.substr(0, slash));
        BigInt den(text.substr(slash + 1));
        return make_rational(num, den);
    }
    auto dot = text.find('.');
    if (dot != std::string::npos) {
        std::string digits = text.substr(0, dot) + text.substr(dot + 1);
        std::size_t frac_digits = text.size() - dot - 1;
        if (digits.empty() || digits == "-" || digits == "+") {
            throw std::invalid_argument("malformed rational literal: " + text);
        }
        BigInt num(digits);
        BigInt den;
        mpz_ui_pow_ui(den.get_mpz_t(), 10, frac_digits);
        return make_rational(num, den);
    }
    return make_rational(BigInt(text), 1);
}

}  // namespace rauzy
