#include "ebm/rational.hpp"

#include <algorithm>
#include <cctype>

#include "ebm/error.hpp"

namespace ebm {

namespace {

BigInt parse_integer(std::string_view digits, std::string_view whole)
{
    std::size_t k = 0;
    bool negative = false;
    if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
        negative = digits[0] == '-';
        k = 1;
    }
    if (k == digits.size() ||
        !std::all_of(digits.begin() + k, digits.end(),
                     [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
        throw Error(ErrorCode::parse_error, "'" + std::string(whole) + "' is not a rational p/q");
    BigInt v(std::string(digits.substr(k)));
    return negative ? BigInt(-v) : v;
}

}  // namespace

Rational parse_rational(std::string_view text)
{
    if (text.find('.') != std::string_view::npos || text.find('e') != std::string_view::npos ||
        text.find('E') != std::string_view::npos)
        throw Error(ErrorCode::parse_error,
                    "'" + std::string(text) + "': decimal weights are rejected, write p/q");
    auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_integer(text, text));
    BigInt num = parse_integer(text.substr(0, slash), text);
    BigInt den = parse_integer(text.substr(slash + 1), text);
    if (den == 0) throw Error(ErrorCode::parse_error, "'" + std::string(text) + "': zero denominator");
    return Rational(num, den);
}

std::string to_string(const Rational& r)
{
    BigInt num = boost::multiprecision::numerator(r);
    BigInt den = boost::multiprecision::denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

}  // namespace ebm
