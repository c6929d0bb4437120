#include "commands.hpp"
#include "scenario.hpp"

#include "wpk/parallel.hpp"

#include <CLI11.hpp>

#include <iostream>

using namespace wpk::cli;

int main(int argc, char** argv) {
    CLI::App app{"Wavepacket concentration toolkit"};
    app.require_subcommand(1);

    std::string config, out;
    unsigned threads = 0;
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::size_t max_evals = 0;
    app.add_option("--config", config, "Scenario file (INI sections potential, grid, evolve, search, output)")
        ->check(CLI::ExistingFile);
    app.add_option("--threads", threads, "Worker threads (default: machine parallelism)");
    app.add_option("--out", out, "Output directory");
    auto* seed_opt = app.add_option("--seed", seed, "Corpus seed");
    auto* evals_opt = app.add_option("--max-evals", max_evals, "Coarse-search evaluation budget");

    std::string input;
    int max_bubbles = 0;
    double q = 8.0, r = 0.0;
    std::string suite = "all";

    auto* evolve_cmd = app.add_subcommand("evolve", "Evolve a WPK1 field and write slices, mass and norms");
    evolve_cmd->add_option("input", input, "WPK1 input field")->required();
    auto* detect_cmd = app.add_subcommand("detect", "Locate the strongest wavepacket bubble");
    detect_cmd->add_option("input", input, "WPK1 input field")->required();
    auto* decompose_cmd = app.add_subcommand("decompose", "Iterated profile extraction");
    decompose_cmd->add_option("input", input, "WPK1 input field")->required();
    auto* bubbles_opt = decompose_cmd->add_option("--max-bubbles", max_bubbles, "Maximum number of profiles");
    auto* hls_cmd = app.add_subcommand("hls", "Time interval of concentration");
    hls_cmd->add_option("input", input, "WPK1 input field")->required();
    hls_cmd->add_option("--q", q, "Time exponent, 2 < q")->capture_default_str();
    hls_cmd->add_option("--r", r, "Space exponent (default: admissible partner)");
    auto* kernel_cmd = app.add_subcommand("kernel", "Four-packet kernel for a list of quadruples");
    kernel_cmd->add_option("quads", input, "CSV of x1,xi1,x2,xi2,x3,xi3,x4,xi4 rows")->required();
    auto* verify_cmd = app.add_subcommand("verify", "Run property suites, TAP output");
    verify_cmd->add_option("suite", suite, "flow | propagator | phasespace | concentration | all")
        ->check(CLI::IsMember({"flow", "propagator", "phasespace", "concentration", "all"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    seed_given = seed_opt->count() > 0;

    try {
        Scenario s = config.empty() ? Scenario{} : load_scenario(config);
        if (!out.empty())
            s.out_dir = out;
        if (seed_given)
            s.seed = seed;
        if (evals_opt->count())
            s.max_evals = max_evals;
        if (bubbles_opt->count())
            s.max_bubbles = max_bubbles;
        validate(s);
        if (threads > 0)
            wpk::set_thread_count(threads);

        if (*evolve_cmd)
            cmd_evolve(s, input);
        else if (*detect_cmd)
            cmd_detect(s, input);
        else if (*decompose_cmd)
            cmd_decompose(s, input);
        else if (*hls_cmd)
            cmd_hls(s, input, q, r);
        else if (*kernel_cmd)
            cmd_kernel(s, input);
        else if (*verify_cmd)
            return cmd_verify(s, suite, std::cout) ? 0 : 1;
    } catch (const ValidityError& e) {
        std::cerr << "wpk: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "wpk: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
