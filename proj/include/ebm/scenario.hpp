#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ebm/analysis.hpp"
#include "ebm/erasing.hpp"
#include "ebm/loynes.hpp"
#include "ebm/rational.hpp"
#include "ebm/stability.hpp"

namespace ebm {

struct ScenarioBudgets {
    int max_len_first = 3;
    int max_len_second = 3;
    int max_count = 2;
    std::uint64_t max_steps = Budget{}.max_steps;
    int max_backsteps = default_max_backsteps;
    int enumeration_cap = default_enumeration_cap;
    int search_depth = 6;
    int search_length = 10;
    int window = 0;  // 0: two periods
    long long forward_steps = 10'000;
};

/// Everything a run needs, kept close to the file so that it can be written back.
struct Scenario {
    std::string name;
    int customers = 0;
    int servers = 0;
    std::vector<Edge> e, f;
    bool f_all = false;
    MatchingStructure structure;

    Policy policy;
    std::vector<std::pair<Edge, Rational>> mu_weights;
    std::optional<ArrivalDistribution> mu;

    std::optional<PeriodicSample> periodic;
    BufferDetail initial;
    long long horizon = 1000;
    std::size_t runs = 1000;

    std::optional<std::vector<ArrivalQuadruple>> first, second;
    std::optional<BufferDetail> target;
    std::vector<ErasingCouple> couples;

    // a single non-expansiveness probe: two buffers read as class details, one arrival
    std::optional<BufferDetail> probe_a, probe_b;
    std::optional<ArrivalQuadruple> probe_arrival;

    ScenarioBudgets budgets;
    std::uint64_t seed = 1;
    int threads = 1;
    std::vector<std::string> analyses;
};

/// Known analysis names, in CLI spelling.
const std::vector<std::string>& analysis_names();

/// Errors carry "name:line:col: message".
Scenario parse_scenario(std::string_view text, const std::string& source = "<scenario>");
Scenario load_scenario(const std::string& path);

/// Inverse of parse_scenario, up to comments and layout.
std::string write_scenario(const Scenario& sc);

/// "c-s", or "c-s:<sigma(c)>/<gamma(s)>" when the event carries preference lists.
std::string format_event(const ArrivalQuadruple& q);

}  // namespace ebm
