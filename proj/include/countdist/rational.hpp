#pragma once

#include <gmpxx.h>

#include <string>

#include "countdist/errors.hpp"

namespace countdist {

// Exact arithmetic used by the polytope oracle and the exact test paths.
using Rational = mpq_class;

inline double to_double(const Rational& q) { return q.get_d(); }
inline double to_double(double x) { return x; }

// Exact conversion: every finite double is a dyadic rational.
inline Rational rational_from_double(double x) {
    Rational q;
    mpq_set_d(q.get_mpq_t(), x);
    return q;
}

// Accepts "p/q", "p", or "-p/q" with base-10 integers.
inline Rational parse_rational(const std::string& text) {
    try {
        Rational q(text);
        q.canonicalize();
        if (q.get_den() == 0) throw InputError("rational with zero denominator: " + text);
        return q;
    } catch (const std::invalid_argument&) {
        throw InputError("cannot parse rational: '" + text + "'");
    }
}

inline std::string rational_to_string(const Rational& q) { return q.get_str(); }

}  // namespace countdist
