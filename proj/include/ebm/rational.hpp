#pragma once

#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace ebm {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Accepts "p/q" or an integer. Decimal notation is rejected: the stability conditions are
/// strict inequalities and must not depend on rounding.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& r);

}  // namespace ebm
