#include "ebm/report.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ebm/error.hpp"

namespace ebm {

using nlohmann::json;

namespace {

std::string buf(const BufferDetail& b) { return format_buffer(b); }

json couple_json(const ErasingCouple& e)
{
    json j = {{"customers", format_customers(e.c)},
              {"servers", format_servers(e.s)},
              {"strength", e.strength == CoupleStrength::strong ? "strong" : "erasing"},
              {"construction", e.construction},
              {"residuals", e.residuals}};
    if (e.target) j["target"] = buf(*e.target);
    return j;
}

json condition_json(const ConditionResult& r)
{
    json j = {{"holds", r.holds}};
    if (!r.holds) {
        j["witness"] = r.witness;
        j["lhs"] = to_string(r.lhs);
        j["rhs"] = to_string(r.rhs);
    }
    return j;
}

std::string condition_line(const char* name, const ConditionResult& r)
{
    if (r.holds) return std::string(name) + ": holds";
    return std::string(name) + ": fails at " + r.witness + " (" + to_string(r.lhs) + " vs " +
           to_string(r.rhs) + ")";
}

Word expand_counts(const std::vector<int>& counts)
{
    Word w;
    for (std::size_t k = 0; k < counts.size(); ++k)
        for (int i = 0; i < counts[k]; ++i) w.push_back(static_cast<int>(k) + 1);
    return w;
}

Scenario replay_of(const Scenario& sc, const std::string& analysis)
{
    Scenario r = sc;
    r.analyses = {analysis};
    r.name = (sc.name.empty() ? std::string("scenario") : sc.name) + " replay of " + analysis;
    return r;
}

AnalysisOutcome simulate(const Scenario& sc)
{
    AnalysisOutcome out;
    const auto& st = sc.structure;
    if (sc.periodic) {
        std::vector<ArrivalQuadruple> input;
        for (long long t = 0; t < sc.horizon; ++t) input.push_back(sc.periodic->at(t));
        auto tr = run(st, sc.policy, sc.initial, std::span<const ArrivalQuadruple>(input));
        std::size_t peak = 0;
        for (const auto& b : tr.steps) peak = std::max(peak, b.w.size());
        out.lines.push_back("periodic input, " + std::to_string(sc.horizon) + " arrivals from " +
                            buf(sc.initial));
        out.lines.push_back("final buffer " + buf(tr.final_buffer()));
        out.lines.push_back("matches " + std::to_string(tr.matches.size()) +
                            ", peak customer queue " + std::to_string(peak));
        out.data = {{"input", "periodic"},
                    {"horizon", sc.horizon},
                    {"final", buf(tr.final_buffer())},
                    {"matches", tr.matches.size()},
                    {"peak", peak}};
        return out;
    }
    if (!sc.mu) throw Error(ErrorCode::validation_error, "simulate needs a periodic input or [mu]");
    auto stats = estimate_tau1(st, sc.policy, *sc.mu, sc.initial, sc.runs, sc.horizon, sc.seed,
                               sc.threads);
    std::ostringstream mean;
    mean.precision(6);
    mean << stats.mean;
    out.lines.push_back("iid input, " + std::to_string(stats.runs) + " runs of horizon " +
                        std::to_string(sc.horizon) + " from " + buf(sc.initial));
    out.lines.push_back("tau1 mean " + mean.str() + ", median " + std::to_string(stats.median) +
                        ", p90 " + std::to_string(stats.p90) + ", max " + std::to_string(stats.max));
    out.lines.push_back("censored " + std::to_string(stats.censored) + " of " +
                        std::to_string(stats.runs));
    out.data = {{"input", "iid"},
                {"runs", stats.runs},
                {"horizon", sc.horizon},
                {"seed", sc.seed},
                {"tau1_mean", stats.mean},
                {"tau1_median", stats.median},
                {"tau1_p90", stats.p90},
                {"tau1_max", stats.max},
                {"censored", stats.censored}};
    return out;
}

AnalysisOutcome verify_subadd(const Scenario& sc)
{
    AnalysisOutcome out;
    const auto& st = sc.structure;
    if (sc.first || sc.second) {
        std::vector<ArrivalQuadruple> a = sc.first.value_or(std::vector<ArrivalQuadruple>{});
        std::vector<ArrivalQuadruple> b = sc.second.value_or(std::vector<ArrivalQuadruple>{});
        auto ev = evaluate_subadditive_pair(st, sc.policy, a, b);
        out.lines.push_back("pieces " + format_arrivals(a) + " and " + format_arrivals(b));
        out.lines.push_back("combined " + buf(ev.combined) + ", first " + buf(ev.first) +
                            ", second " + buf(ev.second));
        out.lines.push_back(ev.holds() ? "sub-additive on this pair" : "NOT sub-additive on this pair");
        out.status = ev.holds() ? CheckStatus::clean : CheckStatus::violated;
        out.data = {{"mode", "pair"},
                    {"combined", buf(ev.combined)},
                    {"first", buf(ev.first)},
                    {"second", buf(ev.second)},
                    {"holds", ev.holds()}};
        if (!ev.holds()) out.replay = replay_of(sc, "verify-subadd");
        return out;
    }
    SubadditiveOptions opt;
    opt.max_len_first = sc.budgets.max_len_first;
    opt.max_len_second = sc.budgets.max_len_second;
    opt.budget.max_steps = sc.budgets.max_steps;
    auto res = check_subadditive(st, sc.policy, opt);
    out.status = res.status;
    out.lines.push_back("exhaustive search, piece lengths <= " + std::to_string(opt.max_len_first) +
                        " and " + std::to_string(opt.max_len_second));
    out.lines.push_back("steps " + std::to_string(res.steps) + ", residual states " +
                        std::to_string(res.residual_states));
    out.data = {{"mode", "exhaustive"},
                {"max_len_first", opt.max_len_first},
                {"max_len_second", opt.max_len_second},
                {"steps", res.steps},
                {"residual_states", res.residual_states}};
    if (res.counterexample) {
        const auto& ce = *res.counterexample;
        out.lines.push_back("counterexample " + format_arrivals(ce.first) + " then " +
                            format_arrivals(ce.second));
        out.lines.push_back("combined " + buf(ce.evaluation.combined) + ", first " +
                            buf(ce.evaluation.first) + ", second " + buf(ce.evaluation.second));
        out.data["counterexample"] = {{"first", format_arrivals(ce.first)},
                                      {"second", format_arrivals(ce.second)},
                                      {"combined", buf(ce.evaluation.combined)},
                                      {"first_residual", buf(ce.evaluation.first)},
                                      {"second_residual", buf(ce.evaluation.second)}};
        Scenario r = replay_of(sc, "verify-subadd");
        r.first = ce.first;
        r.second = ce.second;
        out.replay = std::move(r);
    }
    return out;
}

AnalysisOutcome verify_nonexp(const Scenario& sc)
{
    AnalysisOutcome out;
    const auto& st = sc.structure;
    if (sc.probe_a) {
        ClassDetail a = class_detail(st, *sc.probe_a), b = class_detail(st, *sc.probe_b);
        ClassDetail an = step_class(st, sc.policy, a, view(*sc.probe_arrival));
        ClassDetail bn = step_class(st, sc.policy, b, view(*sc.probe_arrival));
        int before = l1_distance(a, b), after = l1_distance(an, bn);
        out.status = after <= before ? CheckStatus::clean : CheckStatus::violated;
        out.lines.push_back("probe distance " + std::to_string(before) + " -> " + std::to_string(after));
        out.data = {{"mode", "probe"}, {"before", before}, {"after", after}};
        if (out.status == CheckStatus::violated) out.replay = replay_of(sc, "verify-nonexp");
        return out;
    }
    Budget budget{sc.budgets.max_steps};
    auto res = check_nonexpansive(st, sc.policy, sc.budgets.max_count, budget);
    out.status = res.status;
    out.lines.push_back("class details with entries <= " + std::to_string(sc.budgets.max_count) +
                        ", pairs " + std::to_string(res.pairs));
    out.data = {{"mode", "exhaustive"}, {"max_count", sc.budgets.max_count}, {"pairs", res.pairs}};
    if (res.counterexample) {
        const auto& ce = *res.counterexample;
        BufferDetail a{expand_counts(ce.a.x), expand_counts(ce.a.y)};
        BufferDetail b{expand_counts(ce.b.x), expand_counts(ce.b.y)};
        out.lines.push_back("counterexample " + buf(a) + " vs " + buf(b) + " on " +
                            format_event(ce.arrival) + ": distance " + std::to_string(ce.before) +
                            " -> " + std::to_string(ce.after));
        out.data["counterexample"] = {{"a", buf(a)},
                                      {"b", buf(b)},
                                      {"arrival", format_event(ce.arrival)},
                                      {"before", ce.before},
                                      {"after", ce.after}};
        Scenario r = replay_of(sc, "verify-nonexp");
        r.probe_a = a;
        r.probe_b = b;
        r.probe_arrival = ce.arrival;
        out.replay = std::move(r);
    }
    auto cv = find_consistency_violation(st, sc.policy, sc.budgets.max_count);
    if (cv) {
        out.lines.push_back(std::string("consistency fails for entering ") +
                            (cv->side == Side::customer ? format_customer(cv->entering)
                                                        : format_server(cv->entering)) +
                            ": choice " + std::to_string(cv->choice_a) + " vs " +
                            std::to_string(cv->choice_b));
        out.data["consistency_violation"] = {{"side", cv->side == Side::customer ? "customer" : "server"},
                                             {"entering", cv->entering},
                                             {"counts_a", cv->counts_a},
                                             {"counts_b", cv->counts_b},
                                             {"choice_a", cv->choice_a},
                                             {"choice_b", cv->choice_b}};
    } else {
        out.lines.push_back("consistency holds on all enumerated queue vectors");
    }
    return out;
}

AnalysisOutcome find_erasing(const Scenario& sc)
{
    AnalysisOutcome out;
    const auto& st = sc.structure;
    StrongSearchOptions strong;
    strong.search_length = sc.budgets.search_length;
    std::optional<ErasingCouple> found;
    if (sc.target) {
        ErasingSearchOptions opt;
        opt.search_depth = sc.budgets.search_depth;
        opt.strong = strong;
        try {
            found = construct_erasing_couple(st, sc.policy, *sc.target, opt);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::search_exhausted) throw;
            out.lines.push_back(e.what());
        }
    } else {
        found = construct_strong_erasing_couple(st, sc.policy, strong);
    }
    if (!found) {
        out.status = CheckStatus::budget_exhausted;
        out.lines.push_back("no couple found within the search budget");
        out.data = {{"found", false}};
        return out;
    }
    out.lines.push_back(std::string(found->strength == CoupleStrength::strong ? "strong " : "") +
                        "erasing couple (" + format_customers(found->c) + ", " +
                        format_servers(found->s) + ") by " + found->construction);
    if (sc.target) out.lines.push_back("target " + buf(*sc.target));
    out.data = {{"found", true}, {"couple", couple_json(*found)}};
    Scenario r = replay_of(sc, "verify-erasing");
    r.couples = {*found};
    out.replay = std::move(r);
    return out;
}

AnalysisOutcome verify_erasing(const Scenario& sc)
{
    AnalysisOutcome out;
    if (sc.couples.empty()) throw Error(ErrorCode::validation_error, "verify-erasing needs a couple");
    json list = json::array();
    for (const auto& e : sc.couples) {
        bool ok = sc.target ? verify_erasing_couple(sc.structure, sc.policy, *sc.target, e.c, e.s)
                            : verify_strong_erasing_couple(sc.structure, sc.policy, e.c, e.s);
        std::string what = sc.target ? "erasing couple of " + buf(*sc.target) : "strong erasing couple";
        out.lines.push_back("(" + format_customers(e.c) + ", " + format_servers(e.s) + ") " +
                            (ok ? "is" : "is NOT") + " a " + what);
        list.push_back({{"customers", format_customers(e.c)},
                        {"servers", format_servers(e.s)},
                        {"valid", ok}});
        if (!ok) out.status = CheckStatus::violated;
    }
    out.data = {{"couples", list}};
    if (sc.target) out.data["target"] = buf(*sc.target);
    if (out.status == CheckStatus::violated) out.replay = replay_of(sc, "verify-erasing");
    return out;
}

AnalysisOutcome check_stability(const Scenario& sc)
{
    AnalysisOutcome out;
    if (!sc.mu) throw Error(ErrorCode::validation_error, "check-stability needs [mu]");
    const auto& st = sc.structure;
    auto rep = h2_advisor(st, sc.policy, *sc.mu);
    out.lines.push_back(std::string("associated digraph ") +
                        (rep.strongly_connected ? "strongly connected" : "not strongly connected"));
    out.lines.push_back(std::string("model kind ") + to_string(rep.kind));
    out.lines.push_back(condition_line("N-cond", rep.ncond));
    out.lines.push_back(condition_line("S-cond", rep.scond));
    if (rep.scond_monotone) out.lines.push_back(condition_line("bi-separable condition", *rep.scond_monotone));
    out.lines.push_back("stability: " + rep.summary());
    out.data = {{"strongly_connected", rep.strongly_connected},
                {"kind", to_string(rep.kind)},
                {"ncond", condition_json(rep.ncond)},
                {"scond", condition_json(rep.scond)},
                {"cases", rep.cases},
                {"verdict", rep.summary()}};
    if (rep.scond_monotone) out.data["scond_monotone"] = condition_json(*rep.scond_monotone);
    if (!rep.ncond.holds) {
        out.status = CheckStatus::violated;
        out.lines.push_back("N-cond fails: the model is unstable under every policy");
        out.replay = replay_of(sc, "check-stability");
    }
    return out;
}

AnalysisOutcome loynes(const Scenario& sc)
{
    AnalysisOutcome out;
    if (!sc.periodic) throw Error(ErrorCode::validation_error, "loynes needs a periodic input");
    const auto& st = sc.structure;
    const auto& smp = *sc.periodic;
    auto sol = backward_coupling(st, sc.policy, smp, sc.budgets.max_backsteps, sc.threads);
    if (!sol) {
        out.status = CheckStatus::budget_exhausted;
        auto lens = backward_min_lengths(st, sc.policy, smp, std::min(sc.budgets.max_backsteps, 8));
        std::string trend;
        for (auto l : lens) trend += " " + std::to_string(l);
        out.lines.push_back("no backward coupling within " + std::to_string(sc.budgets.max_backsteps) +
                            " periods");
        out.lines.push_back("min buffer length per backward period:" + trend);
        out.data = {{"coupled", false}, {"min_lengths", lens}};
        return out;
    }
    out.lines.push_back("backward coupling after " + std::to_string(sol->coupling_depth) +
                        " period(s)");
    json values = json::array();
    for (std::size_t k = 0; k < sol->values.size(); ++k) {
        out.lines.push_back("U(theta^" + std::to_string(k) + ") = " + buf(sol->values[k]));
        values.push_back(buf(sol->values[k]));
    }
    out.data = {{"coupled", true}, {"coupling_depth", sol->coupling_depth}, {"values", values}};

    std::vector<int> cps;
    try {
        cps = construction_points(*sol);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::no_construction_points) throw;
        out.lines.push_back("no construction points");
        out.data["construction_points"] = json::array();
        return out;
    }
    std::string cp_text;
    for (int k : cps) cp_text += (cp_text.empty() ? "" : ",") + std::to_string(k);
    out.lines.push_back("construction points {" + cp_text + "}");
    out.data["construction_points"] = cps;

    auto matching = biinfinite_matching(st, sc.policy, smp, *sol);
    json pairs = json::array();
    for (const auto& m : matching.matches) {
        out.lines.push_back("(" + std::to_string(m.customer_index) + ", " +
                            format_customer(m.customer_class) + ") -- (" +
                            std::to_string(m.server_index) + ", " + format_server(m.server_class) + ")");
        pairs.push_back({m.customer_index, m.customer_class, m.server_index, m.server_class});
    }
    out.data["matching"] = pairs;

    int window = sc.budgets.window > 0 ? sc.budgets.window : 2 * smp.period();
    bool renov = check_renovation(st, sc.policy, smp, sc.couples, window);
    out.lines.push_back(std::string("renovation with ") + std::to_string(sc.couples.size()) +
                        " couple(s), window " + std::to_string(window) + ": " +
                        (renov ? "holds" : "fails"));
    out.data["renovation"] = renov;

    auto fwd = forward_coupling_check(st, sc.policy, smp, *sol, sc.initial, sc.budgets.forward_steps);
    out.lines.push_back("forward coupling from " + buf(sc.initial) + ": " +
                        (fwd ? "time " + std::to_string(*fwd) : std::string("censored")));
    out.data["forward_coupling"] = fwd ? json(*fwd) : json(nullptr);
    return out;
}

}  // namespace

AnalysisOutcome run_analysis(const Scenario& sc, const std::string& name)
{
    AnalysisOutcome out;
    if (name == "simulate") out = simulate(sc);
    else if (name == "verify-subadd") out = verify_subadd(sc);
    else if (name == "verify-nonexp") out = verify_nonexp(sc);
    else if (name == "find-erasing") out = find_erasing(sc);
    else if (name == "verify-erasing") out = verify_erasing(sc);
    else if (name == "check-stability") out = check_stability(sc);
    else if (name == "loynes") out = loynes(sc);
    else throw Error(ErrorCode::validation_error, "unknown analysis '" + name + "'");
    out.name = name;
    return out;
}

ReportBundle run_scenario(const Scenario& sc, const std::vector<std::string>& analyses)
{
    ReportBundle bundle;
    bundle.scenario_name = sc.name;
    for (const auto& a : analyses) {
        try {
            bundle.outcomes.push_back(run_analysis(sc, a));
        } catch (const Error& e) {
            throw Error(e.code(), a + ": " + e.what());
        }
    }
    return bundle;
}

int ReportBundle::exit_code() const
{
    bool budget = false;
    for (const auto& o : outcomes) {
        if (o.status == CheckStatus::violated) return exit_violation;
        budget = budget || o.status == CheckStatus::budget_exhausted;
    }
    return budget ? exit_budget : exit_clean;
}

std::string ReportBundle::text() const
{
    std::ostringstream os;
    if (!scenario_name.empty()) os << "scenario: " << scenario_name << '\n';
    for (const auto& o : outcomes) {
        os << "\n== " << o.name << " [" << to_string(o.status) << "]\n";
        for (const auto& l : o.lines) os << l << '\n';
        if (o.replay) os << "replay: replay_" << o.name << ".scn\n";
    }
    return os.str();
}

json ReportBundle::json() const
{
    nlohmann::json j = {{"scenario", scenario_name}, {"exit_code", exit_code()}};
    nlohmann::json list = nlohmann::json::array();
    for (const auto& o : outcomes) {
        nlohmann::json e = {{"analysis", o.name}, {"status", to_string(o.status)}, {"result", o.data}};
        if (o.replay) e["replay"] = "replay_" + o.name + ".scn";
        list.push_back(std::move(e));
    }
    j["analyses"] = std::move(list);
    return j;
}

void write_report(const ReportBundle& bundle, const std::string& dir)
{
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto put = [&](const std::string& file, const std::string& body) {
        std::ofstream f(fs::path(dir) / file, std::ios::binary);
        if (!f) throw Error(ErrorCode::validation_error, "cannot write " + (fs::path(dir) / file).string());
        f << body;
    };
    put("report.txt", bundle.text());
    put("report.json", bundle.json().dump(2) + "\n");
    for (const auto& o : bundle.outcomes)
        if (o.replay) put("replay_" + o.name + ".scn", write_scenario(*o.replay));
}

}  // namespace ebm
