#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ebm/error.hpp"
#include "ebm/report.hpp"

namespace {

struct Flags {
    std::string scenario;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string out;
};

int execute(const Flags& flags, const std::string& command)
{
    ebm::Scenario sc = ebm::load_scenario(flags.scenario);
    if (flags.seed) sc.seed = *flags.seed;
    if (flags.threads) {
        if (*flags.threads < 1) throw ebm::Error(ebm::ErrorCode::validation_error, "--threads must be positive");
        sc.threads = *flags.threads;
    }
    std::vector<std::string> analyses = command == "run" ? sc.analyses : std::vector<std::string>{command};
    auto bundle = ebm::run_scenario(sc, analyses);
    std::cout << bundle.text();
    if (!flags.out.empty()) ebm::write_report(bundle, flags.out);
    return bundle.exit_code();
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Extended bipartite matching: simulation, property checks and stationary states"};
    app.require_subcommand(1);
    Flags flags;

    std::vector<std::pair<std::string, std::string>> commands = {
        {"run", "run the analyses listed in the scenario"},
        {"simulate", "forward simulation; tau1 estimation for IID input"},
        {"verify-subadd", "exhaustive sub-additivity check, or replay of one piece pair"},
        {"verify-nonexp", "exhaustive non-expansiveness check on bounded class details"},
        {"find-erasing", "construct an erasing couple of [erasing] target, or a strong one"},
        {"verify-erasing", "check the couples listed in [erasing]"},
        {"check-stability", "N-cond, S-cond and the sufficient stability cases"},
        {"loynes", "backward coupling, construction points and the bi-infinite matching"},
    };
    for (const auto& [name, help] : commands) {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->add_option("--scenario", flags.scenario, "scenario file")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", flags.seed, "override the scenario seed");
        sub->add_option("--threads", flags.threads, "worker threads");
        sub->add_option("--out", flags.out, "directory for report.txt, report.json and replays");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : ebm::exit_error;
    }

    try {
        for (auto* sub : app.get_subcommands()) return execute(flags, sub->get_name());
    } catch (const ebm::Error& e) {
        std::cerr << "error [" << ebm::to_string(e.code()) << "]: " << e.what() << '\n';
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
    }
    return ebm::exit_error;
}
