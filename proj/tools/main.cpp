#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "coexist/cli/commands.hpp"
#include "coexist/cli/scenario.hpp"

namespace cli = coexist::cli;

namespace {

struct Options {
    std::string scenario;
    std::string out;
    std::string format;
};

using Handler = cli::CommandResult (*)(const cli::Scenario&, cli::Format);

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help,
                      Options& opt, const std::string& default_format) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("scenario", opt.scenario, "Scenario file")->required();
    sub->add_option("--out", opt.out, "Write the report to this path instead of stdout");
    sub->add_option("--format", opt.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->default_str(default_format);
    return sub;
}

int run(const Options& opt, Handler handler, const std::string& default_format) {
    const std::string fmt = opt.format.empty() ? default_format : opt.format;
    const cli::Format format = fmt == "csv" ? cli::Format::csv : cli::Format::json;
    std::optional<cli::Scenario> scenario;
    try {
        scenario = cli::load_scenario(opt.scenario);
    } catch (const cli::ScenarioError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return cli::exit_code::invalid_input;
    }
    cli::CommandResult result;
    try {
        result = handler(*scenario, format);
    } catch (const cli::ScenarioError& e) {
        std::cerr << "error: " << opt.scenario << ": " << e.what() << '\n';
        return cli::exit_code::invalid_input;
    }
    if (opt.out.empty()) {
        std::cout << result.output;
    } else {
        std::ofstream out(opt.out, std::ios::binary);
        if (!(out << result.output)) {
            std::cerr << "error: cannot write " << opt.out << '\n';
            return cli::exit_code::invalid_input;
        }
    }
    return result.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equilibrium engine for markets where a few large firms coexist with a continuum "
                 "of small firms, in closed and open economies."};
    app.require_subcommand(1);

    struct Command {
        const char* name;
        const char* help;
        Handler handler;
        const char* default_format;
    };
    const Command commands[] = {
        {"solve-closed", "Solve the closed-economy equilibrium", cli::solve_closed_command, "json"},
        {"solve-open", "Solve the symmetric two-country equilibrium", cli::solve_open_command, "json"},
        {"statics", "Trade-cost comparative statics at the scenario's tau", cli::statics_command, "json"},
        {"sweep", "Comparative statics over the [sweep] tau grid", cli::sweep_command, "csv"},
        {"verify", "Compare analytic solutions with the entry simulator", cli::verify_command, "json"},
    };
    std::map<const CLI::App*, const Command*> by_app;
    Options opt;
    for (const auto& c : commands) by_app[add_command(app, c.name, c.help, opt, c.default_format)] = &c;

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : cli::exit_code::invalid_input;
    }
    for (const auto& [sub, command] : by_app)
        if (sub->parsed()) return run(opt, command->handler, command->default_format);
    return cli::exit_code::invalid_input;
}
