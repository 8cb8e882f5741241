#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "ebm/model.hpp"

namespace ebm {

/// Letters are class ids, oldest first.
using Word = std::vector<int>;

struct BufferDetail {
    Word w;  // customers
    Word z;  // servers

    bool empty() const { return w.empty() && z.empty(); }
    std::size_t size() const { return w.size() + z.size(); }
    auto operator<=>(const BufferDetail&) const = default;
};

struct ClassDetail {
    std::vector<int> x;  // indexed by customer class - 1
    std::vector<int> y;  // indexed by server class - 1

    auto operator<=>(const ClassDetail&) const = default;
};

std::vector<int> commutative_image(const Word& word, int alphabet);
ClassDetail class_detail(const MatchingStructure& st, const BufferDetail& b);

bool is_admissible_buffer(const MatchingStructure& st, const Word& w, const Word& z);
bool is_admissible_detail(const MatchingStructure& st, const ClassDetail& d);

/// Checks letters against both alphabets and the no-compatible-coexistence rule.
BufferDetail validate_buffer(const MatchingStructure& st, Word w, Word z);

/// 1-based position, as in the paper's w_[i].
Word delete_at(const Word& word, std::size_t i);

int l1_distance(const ClassDetail& a, const ClassDetail& b);

/// sigma[c-1] orders S(c); gamma[s-1] orders C(s). An empty profile means ascending order.
struct PreferenceProfile {
    std::vector<std::vector<int>> sigma;
    std::vector<std::vector<int>> gamma;

    bool empty() const { return sigma.empty() && gamma.empty(); }
    static PreferenceProfile ascending(const MatchingStructure& st);
    void validate(const MatchingStructure& st) const;
    bool operator==(const PreferenceProfile&) const = default;
};

/// One input event (c, s, sigma, gamma). Either class may be 0 for the lone arrivals of
/// unequal-length inputs.
struct ArrivalQuadruple {
    int c = 0;
    int s = 0;
    PreferenceProfile prefs;

    bool operator==(const ArrivalQuadruple&) const = default;
};

std::vector<ArrivalQuadruple> pair_arrivals(const Word& c, const Word& s);

// Text forms: customers "3312" (or "10.3.1" beyond 9 classes), servers "s1s2s3",
// empty word "-".
std::string format_customers(const Word& w);
std::string format_servers(const Word& z);
std::string format_buffer(const BufferDetail& b);
Word parse_customers(std::string_view text);
Word parse_servers(std::string_view text);

}  // namespace ebm
