// park — PLTL satisfiability checking and smart-parking simulation CLI.
//
//   park check [--valid] [--depth N] <formula>
//   park simulate --topology F --trace F [--store-in F] --store-out F
//                 --log F [--depth N]
//   park store dump <file>
//
// Exit codes: 0 = Sat/valid/ok, 1 = Unsat/not valid, 2 = input or engine
// error.

#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "park/simulation.hpp"
#include "park/tableau.hpp"

namespace {

int run_check(const std::string& text, bool check_valid,
              std::optional<int> depth) {
    park::Formula f = park::parse(text);
    park::Formula probe = check_valid ? park::make_not(f) : f;
    int bound = depth ? *depth : park::default_depth_bound(probe);
    park::TableauResult result = park::decide(probe, bound);

    bool closed = result.verdict == park::Verdict::Unsat;
    if (check_valid)
        std::cout << (closed ? "VALID" : "NOT VALID") << "\n";
    else
        std::cout << (closed ? "UNSAT" : "SAT") << "\n";
    std::cout << park::render_tree(result.tree);
    if (check_valid) return closed ? 0 : 1;
    return closed ? 1 : 0;
}

int run_store_dump(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw park::error("cannot open '" + path + "'");
    park::SpecStore store = park::load_store(in, path);

    auto entries = store.entries();
    std::stable_sort(entries.begin(), entries.end(),
                     [](const park::SpecEntry& a, const park::SpecEntry& b) {
                         if (a.id != b.id) return a.id < b.id;
                         return a.count > b.count;
                     });
    std::size_t id_w = 2, f_w = 7;
    std::vector<std::string> rendered;
    for (const auto& e : entries) {
        rendered.push_back(park::render(e.formula));
        id_w = std::max(id_w, e.id.size());
        f_w = std::max(f_w, rendered.back().size());
    }
    std::cout << std::left << std::setw(static_cast<int>(id_w) + 2) << "id"
              << std::setw(static_cast<int>(f_w) + 2) << "formula" << "r\n";
    for (std::size_t i = 0; i < entries.size(); ++i)
        std::cout << std::left << std::setw(static_cast<int>(id_w) + 2)
                  << entries[i].id << std::setw(static_cast<int>(f_w) + 2)
                  << rendered[i] << entries[i].count << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"PLTL tableau checking and preference-learning parking "
                 "simulation"};
    app.require_subcommand(1);

    // check
    std::string formula_text;
    bool check_valid = false;
    std::optional<int> check_depth;
    CLI::App* check = app.add_subcommand(
        "check", "Decide satisfiability of a formula and print its truth tree");
    check->add_option("formula", formula_text, "formula text, e.g. \"G ~g3 & g3\"")
        ->required();
    check->add_flag("--valid", check_valid,
                    "check validity instead (tableau for the negation)");
    check->add_option("--depth", check_depth, "state bound per branch");

    // simulate
    park::RunPaths paths;
    std::optional<int> sim_depth;
    std::string store_in;
    CLI::App* simulate =
        app.add_subcommand("simulate", "Replay a presence trace through the "
                                       "agent runtime");
    simulate->add_option("--topology", paths.topology, "topology file")
        ->required();
    simulate->add_option("--trace", paths.trace, "presence trace file")
        ->required();
    simulate->add_option("--store-in", store_in, "initial specification store");
    simulate->add_option("--store-out", paths.store_out, "final store file")
        ->required();
    simulate->add_option("--log", paths.log_out, "decision log file")
        ->required();
    simulate->add_option("--depth", sim_depth, "tableau state bound");

    // store dump
    CLI::App* store_cmd = app.add_subcommand("store", "Store utilities");
    store_cmd->require_subcommand(1);
    std::string dump_path;
    CLI::App* dump =
        store_cmd->add_subcommand("dump", "Print a store as a table");
    dump->add_option("file", dump_path, "store file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (check->parsed()) return run_check(formula_text, check_valid, check_depth);
        if (simulate->parsed()) {
            if (!store_in.empty()) paths.store_in = store_in;
            park::SimulationResult result = park::run_simulation(paths, sim_depth);
            std::cout << "processed " << result.messages.size()
                      << " messages; " << result.log.size()
                      << " decision(s); " << result.cars_entered
                      << " car(s) entered, " << result.cars_exited
                      << " left, " << result.cars_present
                      << " still inside\n";
            return 0;
        }
        if (dump->parsed()) return run_store_dump(dump_path);
    } catch (const park::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
