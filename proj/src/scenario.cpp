#include "ebm/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "ebm/error.hpp"

namespace ebm {

const std::vector<std::string>& analysis_names()
{
    static const std::vector<std::string> names = {
        "simulate",       "verify-subadd",   "verify-nonexp", "find-erasing",
        "verify-erasing", "check-stability", "loynes"};
    return names;
}

namespace {

struct Token {
    std::string text;
    int col = 0;  // 1-based
};

struct Line {
    int number = 0;
    std::vector<Token> tokens;
};

std::vector<Token> tokenize(const std::string& line)
{
    std::vector<Token> out;
    std::size_t k = 0;
    while (k < line.size()) {
        while (k < line.size() && std::isspace(static_cast<unsigned char>(line[k]))) ++k;
        if (k >= line.size()) break;
        std::size_t j = k;
        while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) ++j;
        out.push_back({line.substr(k, j - k), static_cast<int>(k) + 1});
        k = j;
    }
    return out;
}

class Parser {
public:
    Parser(std::string_view text, std::string source) : source_(std::move(source))
    {
        std::istringstream in{std::string(text)};
        std::string raw;
        int number = 0;
        while (std::getline(in, raw)) {
            ++number;
            if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
            auto toks = tokenize(raw);
            if (!toks.empty()) lines_.push_back({number, std::move(toks)});
        }
    }

    Scenario parse();

private:
    [[noreturn]] void fail(const Line& ln, const Token& tok, const std::string& msg) const
    {
        throw Error(ErrorCode::parse_error, source_ + ":" + std::to_string(ln.number) + ":" +
                                                std::to_string(tok.col) + ": " + msg);
    }
    [[noreturn]] void fail(const Line& ln, const std::string& msg) const
    {
        fail(ln, ln.tokens.front(), msg);
    }

    template <class T>
    T number(const Line& ln, const Token& tok) const
    {
        T v{};
        auto [ptr, ec] = std::from_chars(tok.text.data(), tok.text.data() + tok.text.size(), v);
        if (ec != std::errc() || ptr != tok.text.data() + tok.text.size())
            fail(ln, tok, "expected a number, got '" + tok.text + "'");
        return v;
    }

    const Token& arg(const Line& ln, std::size_t k) const
    {
        if (ln.tokens.size() <= k) fail(ln, ln.tokens.back(), "missing value after '" + ln.tokens[0].text + "'");
        return ln.tokens[k];
    }
    void expect_args(const Line& ln, std::size_t n) const
    {
        if (ln.tokens.size() != n + 1)
            fail(ln, "'" + ln.tokens[0].text + "' takes " + std::to_string(n) + " value(s)");
    }

    Edge edge(const Line& ln, const Token& tok, bool allow_lone = false) const;
    ArrivalQuadruple event(const Line& ln, const Token& tok) const;
    BufferDetail buffer(const Line& ln, const Token& tok) const;
    template <class F>
    auto wrap(const Line& ln, const Token& tok, F&& f) const
    {
        try {
            return f();
        } catch (const Error& e) {
            fail(ln, tok, e.what());
        }
    }

    void structure_line(Scenario& sc, const Line& ln);
    void policy_line(Scenario& sc, const Line& ln);
    void mu_line(Scenario& sc, const Line& ln);
    void input_line(Scenario& sc, const Line& ln);
    void run_line(Scenario& sc, const Line& ln);
    void budget_line(Scenario& sc, const Line& ln);
    void pieces_line(Scenario& sc, const Line& ln);
    void erasing_line(Scenario& sc, const Line& ln);
    void nonexp_line(Scenario& sc, const Line& ln);

    std::string source_;
    std::vector<Line> lines_;

    // deferred until the structure is known
    std::vector<std::pair<int, Word>> sigma_, gamma_;
    std::optional<std::string> mode_;
    bool mu_uniform_ = false;
    bool mu_partial_ = false;
};

Edge Parser::edge(const Line& ln, const Token& tok, bool allow_lone) const
{
    auto dash = tok.text.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 1 == tok.text.size())
        fail(ln, tok, "expected an edge c-s, got '" + tok.text + "'");
    Token a{tok.text.substr(0, dash), tok.col};
    Token b{tok.text.substr(dash + 1), tok.col + static_cast<int>(dash) + 1};
    Edge e{number<int>(ln, a), number<int>(ln, b)};
    int low = allow_lone ? 0 : 1;
    if (e.first < low || e.second < low || (e.first == 0 && e.second == 0))
        fail(ln, tok, "class indices start at 1 in '" + tok.text + "'");
    return e;
}

ArrivalQuadruple Parser::event(const Line& ln, const Token& tok) const
{
    auto colon = tok.text.find(':');
    Token head{tok.text.substr(0, colon), tok.col};
    auto [c, s] = edge(ln, head, true);
    ArrivalQuadruple q;
    q.c = c;
    q.s = s;
    if (colon != std::string::npos) {
        std::string rest = tok.text.substr(colon + 1);
        auto slash = rest.find('/');
        if (slash == std::string::npos) fail(ln, tok, "preference lists are written sigma/gamma");
        // Lists are kept as raw words; the full profile is assembled once the structure exists.
        q.prefs.sigma.push_back(wrap(ln, tok, [&] { return parse_servers(rest.substr(0, slash)); }));
        q.prefs.gamma.push_back(wrap(ln, tok, [&] { return parse_customers(rest.substr(slash + 1)); }));
    }
    return q;
}

BufferDetail Parser::buffer(const Line& ln, const Token& tok) const
{
    auto bar = tok.text.find('|');
    if (bar == std::string::npos) fail(ln, tok, "a buffer detail is written w|z");
    BufferDetail b;
    b.w = wrap(ln, tok, [&] { return parse_customers(tok.text.substr(0, bar)); });
    b.z = wrap(ln, tok, [&] { return parse_servers(tok.text.substr(bar + 1)); });
    return b;
}

void Parser::structure_line(Scenario& sc, const Line& ln)
{
    const std::string& key = ln.tokens[0].text;
    if (key == "customers" || key == "servers") {
        expect_args(ln, 1);
        int v = number<int>(ln, arg(ln, 1));
        (key == "customers" ? sc.customers : sc.servers) = v;
    } else if (key == "E") {
        for (std::size_t k = 1; k < ln.tokens.size(); ++k) sc.e.push_back(edge(ln, ln.tokens[k]));
    } else if (key == "F") {
        if (ln.tokens.size() == 2 && ln.tokens[1].text == "all") {
            sc.f_all = true;
            return;
        }
        for (std::size_t k = 1; k < ln.tokens.size(); ++k) sc.f.push_back(edge(ln, ln.tokens[k]));
    } else {
        fail(ln, "unknown key '" + key + "' in [structure]");
    }
}

void Parser::policy_line(Scenario& sc, const Line& ln)
{
    const std::string& key = ln.tokens[0].text;
    if (key == "kind") {
        expect_args(ln, 1);
        const Token& t = arg(ln, 1);
        sc.policy.kind = wrap(ln, t, [&] { return parse_policy_kind(t.text); });
        if (t.text == "priority" && !mode_) mode_ = "deterministic";
    } else if (key == "preferences") {
        expect_args(ln, 1);
        mode_ = arg(ln, 1).text;
    } else if (key == "sigma" || key == "gamma") {
        expect_args(ln, 2);
        int cls = number<int>(ln, arg(ln, 1));
        const Token& t = arg(ln, 2);
        if (key == "sigma")
            sigma_.emplace_back(cls, wrap(ln, t, [&] { return parse_servers(t.text); }));
        else
            gamma_.emplace_back(cls, wrap(ln, t, [&] { return parse_customers(t.text); }));
    } else {
        fail(ln, "unknown key '" + key + "' in [policy]");
    }
}

void Parser::mu_line(Scenario& sc, const Line& ln)
{
    const std::string& key = ln.tokens[0].text;
    if (key == "uniform") {
        mu_uniform_ = true;
    } else if (key == "partial") {
        mu_partial_ = true;
    } else {
        expect_args(ln, 1);
        Edge e = edge(ln, ln.tokens[0]);
        const Token& t = arg(ln, 1);
        sc.mu_weights.emplace_back(e, wrap(ln, t, [&] { return parse_rational(t.text); }));
    }
}

void Parser::input_line(Scenario& sc, const Line& ln)
{
    const std::string& key = ln.tokens[0].text;
    if (key == "periodic") {
        if (!sc.periodic) sc.periodic.emplace();
        for (std::size_t k = 1; k < ln.tokens.size(); ++k) {
            auto q = event(ln, ln.tokens[k]);
            if (!q.c || !q.s) fail(ln, ln.tokens[k], "periodic events are pairs");
            sc.periodic->events.push_back(std::move(q));
        }
    } else if (key == "origin") {
        expect_args(ln, 1);
        if (!sc.periodic) sc.periodic.emplace();
        sc.periodic->origin = number<int>(ln, arg(ln, 1));
    } else if (key == "initial") {
        expect_args(ln, 1);
        sc.initial = buffer(ln, arg(ln, 1));
    } else if (key == "horizon") {
        expect_args(ln, 1);
        sc.horizon = number<long long>(ln, arg(ln, 1));
    } else if (key == "runs") {
        expect_args(ln, 1);
        sc.runs = number<std::size_t>(ln, arg(ln, 1));
    } else {
        fail(ln, "unknown key '" + key + "' in [input]");
    }
}

void Parser::run_line(Scenario& sc, const Line& ln)
{
    const std::string& key = ln.tokens[0].text;
    if (key == "name") {
        sc.name.clear();
        for (std::size_t k = 1; k < ln.tokens.size(); ++k)
            sc.name += (k > 1 ? " " : "") + ln.tokens[k].text;
    } else if (key == "seed") {
        expect_args(ln, 1);
        sc.seed = number<std::uint64_t>(ln, arg(ln, 1));
    } else if (key == "threads") {
        expect_args(ln, 1);
        sc.threads = number<int>(ln, arg(ln, 1));
    } else if (key == "analyses") {
        for (std::size_t k = 1; k < ln.tokens.size(); ++k) {
            const auto& names = analysis_names();
            if (std::find(names.begin(), names.end(), ln.tokens[k].text) == names.end())
                fail(ln, ln.tokens[k], "unknown analysis '" + ln.tokens[k].text + "'");
            sc.analyses.push_back(ln.tokens[k].text);
        }
    } else {
        fail(ln, "unknown key '" + key + "' in [run]");
    }
}

void Parser::budget_line(Scenario& sc, const Line& ln)
{
    const std::string& key = ln.tokens[0].text;
    expect_args(ln, 1);
    auto& b = sc.budgets;
    const Token& t = arg(ln, 1);
    if (key == "max_len_first") b.max_len_first = number<int>(ln, t);
    else if (key == "max_len_second") b.max_len_second = number<int>(ln, t);
    else if (key == "max_count") b.max_count = number<int>(ln, t);
    else if (key == "max_steps") b.max_steps = number<std::uint64_t>(ln, t);
    else if (key == "max_backsteps") b.max_backsteps = number<int>(ln, t);
    else if (key == "enumeration_cap") b.enumeration_cap = number<int>(ln, t);
    else if (key == "search_depth") b.search_depth = number<int>(ln, t);
    else if (key == "search_length") b.search_length = number<int>(ln, t);
    else if (key == "window") b.window = number<int>(ln, t);
    else if (key == "forward_steps") b.forward_steps = number<long long>(ln, t);
    else fail(ln, "unknown budget '" + key + "'");
}

void Parser::pieces_line(Scenario& sc, const Line& ln)
{
    const std::string& key = ln.tokens[0].text;
    if (key != "first" && key != "second") fail(ln, "unknown key '" + key + "' in [pieces]");
    std::vector<ArrivalQuadruple> piece;
    for (std::size_t k = 1; k < ln.tokens.size(); ++k) {
        if (ln.tokens[k].text == "-") continue;  // explicit empty piece
        piece.push_back(event(ln, ln.tokens[k]));
    }
    (key == "first" ? sc.first : sc.second) = std::move(piece);
}

void Parser::erasing_line(Scenario& sc, const Line& ln)
{
    const std::string& key = ln.tokens[0].text;
    if (key == "target") {
        expect_args(ln, 1);
        sc.target = buffer(ln, arg(ln, 1));
    } else if (key == "couple") {
        expect_args(ln, 2);
        ErasingCouple e;
        e.c = wrap(ln, ln.tokens[1], [&] { return parse_customers(ln.tokens[1].text); });
        e.s = wrap(ln, ln.tokens[2], [&] { return parse_servers(ln.tokens[2].text); });
        e.strength = CoupleStrength::strong;
        e.construction = "given";
        sc.couples.push_back(std::move(e));
    } else {
        fail(ln, "unknown key '" + key + "' in [erasing]");
    }
}

void Parser::nonexp_line(Scenario& sc, const Line& ln)
{
    const std::string& key = ln.tokens[0].text;
    expect_args(ln, 1);
    if (key == "a") sc.probe_a = buffer(ln, arg(ln, 1));
    else if (key == "b") sc.probe_b = buffer(ln, arg(ln, 1));
    else if (key == "arrival") sc.probe_arrival = event(ln, arg(ln, 1));
    else fail(ln, "unknown key '" + key + "' in [nonexp]");
}

// Per-event lists were parsed as single-entry profiles; expand them to full profiles.
void expand_event(const MatchingStructure& st, ArrivalQuadruple& q, const std::string& where)
{
    if (q.prefs.empty()) return;
    PreferenceProfile full = PreferenceProfile::ascending(st);
    if (q.c) full.sigma[q.c - 1] = q.prefs.sigma.front();
    if (q.s) full.gamma[q.s - 1] = q.prefs.gamma.front();
    try {
        full.validate(st);
    } catch (const Error& e) {
        throw Error(e.code(), where + ": " + e.what());
    }
    q.prefs = std::move(full);
}

Scenario Parser::parse()
{
    Scenario sc;
    std::string section = "run";
    static const std::vector<std::string> sections = {"structure", "policy", "mu",    "input",
                                                      "run",       "budgets", "pieces", "erasing", "nonexp"};
    for (const Line& ln : lines_) {
        const std::string& head = ln.tokens[0].text;
        if (head.front() == '[') {
            if (head.back() != ']' || ln.tokens.size() != 1) fail(ln, "malformed section header");
            section = head.substr(1, head.size() - 2);
            if (std::find(sections.begin(), sections.end(), section) == sections.end())
                fail(ln, "unknown section '" + section + "'");
            continue;
        }
        if (section == "structure") structure_line(sc, ln);
        else if (section == "policy") policy_line(sc, ln);
        else if (section == "mu") mu_line(sc, ln);
        else if (section == "input") input_line(sc, ln);
        else if (section == "run") run_line(sc, ln);
        else if (section == "budgets") budget_line(sc, ln);
        else if (section == "pieces") pieces_line(sc, ln);
        else if (section == "erasing") erasing_line(sc, ln);
        else nonexp_line(sc, ln);
    }

    auto validation = [&](const std::string& what, auto&& f) {
        try {
            f();
        } catch (const Error& e) {
            throw Error(e.code(), source_ + ": " + what + ": " + e.what());
        }
    };

    if (sc.customers <= 0 || sc.servers <= 0)
        throw Error(ErrorCode::parse_error, source_ + ": [structure] needs customers and servers");
    if (sc.f_all) {
        sc.f.clear();
        for (int c = 1; c <= sc.customers; ++c)
            for (int s = 1; s <= sc.servers; ++s) sc.f.emplace_back(c, s);
    }
    validation("structure", [&] { sc.structure = MatchingStructure::build(sc.customers, sc.servers, sc.e, sc.f); });
    const auto& st = sc.structure;

    if (mode_) {
        if (*mode_ == "deterministic") sc.policy.mode = PreferenceMode::deterministic;
        else if (*mode_ == "uniform") sc.policy.mode = PreferenceMode::uniform;
        else if (*mode_ == "per-arrival" || *mode_ == "per_arrival") sc.policy.mode = PreferenceMode::per_arrival;
        else throw Error(ErrorCode::parse_error, source_ + ": unknown preference mode '" + *mode_ + "'");
    } else if (sc.policy.class_admissible()) {
        sc.policy.mode = sigma_.empty() && gamma_.empty() ? PreferenceMode::uniform
                                                          : PreferenceMode::deterministic;
    }
    if (!sigma_.empty() || !gamma_.empty()) {
        PreferenceProfile p = PreferenceProfile::ascending(st);
        for (auto& [c, list] : sigma_) {
            if (c < 1 || c > st.customers())
                throw Error(ErrorCode::invalid_preference, source_ + ": sigma of unknown class " + std::to_string(c));
            p.sigma[c - 1] = list;
        }
        for (auto& [s, list] : gamma_) {
            if (s < 1 || s > st.servers())
                throw Error(ErrorCode::invalid_preference, source_ + ": gamma of unknown class " + std::to_string(s));
            p.gamma[s - 1] = list;
        }
        validation("policy", [&] { p.validate(st); });
        sc.policy.profile = std::move(p);
    }

    if (mu_uniform_) {
        validation("mu", [&] { sc.mu = ArrivalDistribution::uniform(st); });
        sc.mu_weights = sc.mu->support();
    } else if (!sc.mu_weights.empty()) {
        validation("mu", [&] {
            sc.mu = mu_partial_ ? ArrivalDistribution::partial(st, sc.mu_weights)
                                : ArrivalDistribution::make(st, sc.mu_weights);
        });
    }

    if (sc.periodic) {
        for (std::size_t k = 0; k < sc.periodic->events.size(); ++k)
            expand_event(st, sc.periodic->events[k], source_ + ": periodic event " + std::to_string(k));
        validation("input", [&] { sc.periodic->validate(st); });
    }
    validation("initial buffer", [&] { validate_buffer(st, sc.initial.w, sc.initial.z); });
    for (auto* piece : {&sc.first, &sc.second})
        if (*piece)
            for (auto& q : **piece) {
                expand_event(st, q, source_ + ": piece event");
                if ((q.c && !q.s) || (!q.c && q.s)) continue;
                if (!st.in_f(q.c, q.s))
                    throw Error(ErrorCode::arrival_not_in_f,
                                source_ + ": piece event " + format_event(q) + " is not in F");
            }
    if (sc.target) validation("erasing target", [&] { validate_buffer(st, sc.target->w, sc.target->z); });
    for (auto& e : sc.couples) {
        if (sc.target) {
            e.strength = CoupleStrength::erasing;
            e.target = sc.target;
        }
        for (int c : e.c)
            if (c < 1 || c > st.customers())
                throw Error(ErrorCode::alphabet_mismatch, source_ + ": couple uses an unknown customer class");
        for (int s : e.s)
            if (s < 1 || s > st.servers())
                throw Error(ErrorCode::alphabet_mismatch, source_ + ": couple uses an unknown server class");
    }
    if (sc.probe_a || sc.probe_b || sc.probe_arrival) {
        if (!sc.probe_a || !sc.probe_b || !sc.probe_arrival)
            throw Error(ErrorCode::parse_error, source_ + ": [nonexp] needs a, b and arrival");
        validation("nonexp a", [&] { validate_buffer(st, sc.probe_a->w, sc.probe_a->z); });
        validation("nonexp b", [&] { validate_buffer(st, sc.probe_b->w, sc.probe_b->z); });
        expand_event(st, *sc.probe_arrival, source_ + ": nonexp arrival");
        if (!sc.probe_arrival->c || !sc.probe_arrival->s || !st.in_f(sc.probe_arrival->c, sc.probe_arrival->s))
            throw Error(ErrorCode::arrival_not_in_f, source_ + ": nonexp arrival is not a pair of F");
    }
    if (sc.threads < 1) throw Error(ErrorCode::validation_error, source_ + ": threads must be positive");
    return sc;
}

void write_edges(std::ostringstream& os, const char* key, const std::vector<Edge>& edges)
{
    os << key;
    for (auto [c, s] : edges) os << ' ' << c << '-' << s;
    os << '\n';
}

std::string format_buffer_token(const BufferDetail& b)
{
    return format_customers(b.w) + "|" + format_servers(b.z);
}

}  // namespace

std::string format_event(const ArrivalQuadruple& q)
{
    std::string out = std::to_string(q.c) + "-" + std::to_string(q.s);
    if (!q.prefs.empty()) {
        std::string sigma = q.c ? format_servers(q.prefs.sigma[q.c - 1]) : "-";
        std::string gamma = q.s ? format_customers(q.prefs.gamma[q.s - 1]) : "-";
        out += ":" + sigma + "/" + gamma;
    }
    return out;
}

Scenario parse_scenario(std::string_view text, const std::string& source)
{
    return Parser(text, source).parse();
}

Scenario load_scenario(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::parse_error, path + ": cannot open scenario file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str(), path);
}

std::string write_scenario(const Scenario& sc)
{
    std::ostringstream os;
    if (!sc.name.empty()) os << "name " << sc.name << '\n';
    os << "seed " << sc.seed << '\n';
    if (sc.threads != 1) os << "threads " << sc.threads << '\n';
    if (!sc.analyses.empty()) {
        os << "analyses";
        for (const auto& a : sc.analyses) os << ' ' << a;
        os << '\n';
    }

    os << "\n[structure]\ncustomers " << sc.customers << "\nservers " << sc.servers << '\n';
    write_edges(os, "E", sc.structure.matching_edges());
    if (sc.f_all)
        os << "F all\n";
    else
        write_edges(os, "F", sc.structure.arrival_edges());

    os << "\n[policy]\nkind " << to_string(sc.policy.kind) << "\npreferences "
       << to_string(sc.policy.mode) << '\n';
    const auto& prof = sc.policy.profile;
    for (std::size_t c = 0; c < prof.sigma.size(); ++c)
        os << "sigma " << c + 1 << ' ' << format_servers(prof.sigma[c]) << '\n';
    for (std::size_t s = 0; s < prof.gamma.size(); ++s)
        os << "gamma " << s + 1 << ' ' << format_customers(prof.gamma[s]) << '\n';

    if (sc.mu) {
        os << "\n[mu]\n";
        if (!sc.mu->full_support()) os << "partial\n";
        for (const auto& [e, w] : sc.mu_weights)
            os << e.first << '-' << e.second << ' ' << to_string(w) << '\n';
    }

    os << "\n[input]\n";
    if (sc.periodic) {
        os << "periodic";
        for (const auto& q : sc.periodic->events) os << ' ' << format_event(q);
        os << "\norigin " << sc.periodic->origin << '\n';
    }
    if (!sc.initial.empty()) os << "initial " << format_buffer_token(sc.initial) << '\n';
    os << "horizon " << sc.horizon << "\nruns " << sc.runs << '\n';

    if (sc.first || sc.second) {
        os << "\n[pieces]\n";
        auto piece = [&](const char* key, const std::optional<std::vector<ArrivalQuadruple>>& p) {
            if (!p) return;
            os << key;
            if (p->empty()) os << " -";
            for (const auto& q : *p) os << ' ' << format_event(q);
            os << '\n';
        };
        piece("first", sc.first);
        piece("second", sc.second);
    }
    if (sc.target || !sc.couples.empty()) {
        os << "\n[erasing]\n";
        if (sc.target) os << "target " << format_buffer_token(*sc.target) << '\n';
        for (const auto& e : sc.couples)
            os << "couple " << format_customers(e.c) << ' ' << format_servers(e.s) << '\n';
    }
    if (sc.probe_a && sc.probe_b && sc.probe_arrival)
        os << "\n[nonexp]\na " << format_buffer_token(*sc.probe_a) << "\nb "
           << format_buffer_token(*sc.probe_b) << "\narrival " << format_event(*sc.probe_arrival)
           << '\n';

    const auto& b = sc.budgets;
    os << "\n[budgets]\nmax_len_first " << b.max_len_first << "\nmax_len_second "
       << b.max_len_second << "\nmax_count " << b.max_count << "\nmax_steps " << b.max_steps
       << "\nmax_backsteps " << b.max_backsteps << "\nenumeration_cap " << b.enumeration_cap
       << "\nsearch_depth " << b.search_depth << "\nsearch_length " << b.search_length
       << "\nwindow " << b.window << "\nforward_steps " << b.forward_steps << '\n';
    return os.str();
}

}  // namespace ebm
