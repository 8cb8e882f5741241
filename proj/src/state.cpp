#include "ebm/state.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>

#include "ebm/error.hpp"

namespace ebm {

std::vector<int> commutative_image(const Word& word, int alphabet)
{
    std::vector<int> counts(alphabet, 0);
    for (int letter : word) {
        if (letter < 1 || letter > alphabet)
            throw Error(ErrorCode::alphabet_mismatch, "letter " + std::to_string(letter) +
                                                          " outside alphabet of size " +
                                                          std::to_string(alphabet));
        ++counts[letter - 1];
    }
    return counts;
}

ClassDetail class_detail(const MatchingStructure& st, const BufferDetail& b)
{
    return {commutative_image(b.w, st.customers()), commutative_image(b.z, st.servers())};
}

bool is_admissible_buffer(const MatchingStructure& st, const Word& w, const Word& z)
{
    Mask cs = 0, ss = 0;
    for (int c : w) {
        if (c < 1 || c > st.customers()) return false;
        cs |= bit(c);
    }
    for (int s : z) {
        if (s < 1 || s > st.servers()) return false;
        ss |= bit(s);
    }
    return (st.server_nbrs_of(cs) & ss) == 0;
}

bool is_admissible_detail(const MatchingStructure& st, const ClassDetail& d)
{
    if (static_cast<int>(d.x.size()) != st.customers() ||
        static_cast<int>(d.y.size()) != st.servers())
        return false;
    for (auto [c, s] : st.matching_edges())
        if (d.x[c - 1] > 0 && d.y[s - 1] > 0) return false;
    return std::all_of(d.x.begin(), d.x.end(), [](int v) { return v >= 0; }) &&
           std::all_of(d.y.begin(), d.y.end(), [](int v) { return v >= 0; });
}

BufferDetail validate_buffer(const MatchingStructure& st, Word w, Word z)
{
    auto cx = commutative_image(w, st.customers());
    auto sy = commutative_image(z, st.servers());
    for (auto [c, s] : st.matching_edges()) {
        if (cx[c - 1] > 0 && sy[s - 1] > 0)
            throw Error(ErrorCode::incompatible_coexistence,
                        "(" + format_customer(c) + "," + format_server(s) +
                            ") are compatible and both buffered");
    }
    return {std::move(w), std::move(z)};
}

Word delete_at(const Word& word, std::size_t i)
{
    if (i < 1 || i > word.size())
        throw Error(ErrorCode::position_out_of_range,
                    "position " + std::to_string(i) + " in word of length " +
                        std::to_string(word.size()));
    Word out;
    out.reserve(word.size() - 1);
    out.insert(out.end(), word.begin(), word.begin() + static_cast<std::ptrdiff_t>(i - 1));
    out.insert(out.end(), word.begin() + static_cast<std::ptrdiff_t>(i), word.end());
    return out;
}

int l1_distance(const ClassDetail& a, const ClassDetail& b)
{
    if (a.x.size() != b.x.size() || a.y.size() != b.y.size())
        throw Error(ErrorCode::alphabet_mismatch, "class details over different alphabets");
    int d = 0;
    for (std::size_t i = 0; i < a.x.size(); ++i) d += std::abs(a.x[i] - b.x[i]);
    for (std::size_t j = 0; j < a.y.size(); ++j) d += std::abs(a.y[j] - b.y[j]);
    return d;
}

PreferenceProfile PreferenceProfile::ascending(const MatchingStructure& st)
{
    PreferenceProfile p;
    for (int c = 1; c <= st.customers(); ++c) p.sigma.push_back(st.server_list(c));
    for (int s = 1; s <= st.servers(); ++s) p.gamma.push_back(st.customer_list(s));
    return p;
}

void PreferenceProfile::validate(const MatchingStructure& st) const
{
    if (empty()) return;
    if (static_cast<int>(sigma.size()) != st.customers() ||
        static_cast<int>(gamma.size()) != st.servers())
        throw Error(ErrorCode::invalid_preference, "profile must list every class");
    auto is_perm_of = [](std::vector<int> list, const std::vector<int>& nbrs) {
        std::sort(list.begin(), list.end());
        return list == nbrs;
    };
    for (int c = 1; c <= st.customers(); ++c)
        if (!is_perm_of(sigma[c - 1], st.server_list(c)))
            throw Error(ErrorCode::invalid_preference,
                        "sigma(" + format_customer(c) + ") is not a permutation of S(c)");
    for (int s = 1; s <= st.servers(); ++s)
        if (!is_perm_of(gamma[s - 1], st.customer_list(s)))
            throw Error(ErrorCode::invalid_preference,
                        "gamma(" + format_server(s) + ") is not a permutation of C(s)");
}

std::vector<ArrivalQuadruple> pair_arrivals(const Word& c, const Word& s)
{
    if (c.size() != s.size())
        throw Error(ErrorCode::not_admissible_input, "paired input needs equal lengths");
    std::vector<ArrivalQuadruple> out;
    out.reserve(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) out.push_back({c[k], s[k], {}});
    return out;
}

std::string format_customers(const Word& w)
{
    if (w.empty()) return "-";
    bool wide = std::any_of(w.begin(), w.end(), [](int c) { return c > 9; });
    std::string out;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (wide && k) out += '.';
        out += std::to_string(w[k]);
    }
    return out;
}

std::string format_servers(const Word& z)
{
    if (z.empty()) return "-";
    std::string out;
    for (int s : z) out += format_server(s);
    return out;
}

std::string format_buffer(const BufferDetail& b)
{
    return format_customers(b.w) + "|" + format_servers(b.z);
}

Word parse_customers(std::string_view text)
{
    Word out;
    if (text == "-" || text.empty()) return out;
    bool dotted = text.find('.') != std::string_view::npos;
    if (dotted) {
        std::size_t start = 0;
        while (start <= text.size()) {
            std::size_t dot = text.find('.', start);
            auto piece = text.substr(start, dot == std::string_view::npos ? text.npos : dot - start);
            if (piece.empty() || !std::all_of(piece.begin(), piece.end(), ::isdigit))
                throw Error(ErrorCode::parse_error, "bad customer word '" + std::string(text) + "'");
            out.push_back(std::stoi(std::string(piece)));
            if (dot == std::string_view::npos) break;
            start = dot + 1;
        }
        return out;
    }
    for (char ch : text) {
        if (ch < '1' || ch > '9')
            throw Error(ErrorCode::parse_error, "bad customer word '" + std::string(text) + "'");
        out.push_back(ch - '0');
    }
    return out;
}

Word parse_servers(std::string_view text)
{
    Word out;
    if (text == "-" || text.empty()) return out;
    std::size_t k = 0;
    while (k < text.size()) {
        if (text[k] != 's')
            throw Error(ErrorCode::parse_error, "bad server word '" + std::string(text) + "'");
        std::size_t j = k + 1;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        if (j == k + 1)
            throw Error(ErrorCode::parse_error, "bad server word '" + std::string(text) + "'");
        out.push_back(std::stoi(std::string(text.substr(k + 1, j - k - 1))));
        k = j;
    }
    return out;
}

}  // namespace ebm
