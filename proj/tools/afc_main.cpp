#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "afc/pipeline.hpp"

namespace {

// A scenario argument names either a file on disk or a shipped preset.
afc::Scenario load_scenario(const std::string& arg) {
    if (std::filesystem::exists(arg)) return afc::parse_scenario(arg);
    if (const auto* preset = afc::presets::find_scenario(arg)) {
        return afc::parse_scenario_text(preset->text, preset->name);
    }
    throw afc::Error("no scenario file or preset named '" + arg + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Affine formation maneuver design and simulation"};
    app.require_subcommand(1);

    std::string run_arg;
    std::string out_dir = "afc_out";
    int decimate = 0;
    unsigned long long seed = 0;
    CLI::App* run = app.add_subcommand(
        "run", "Run a scenario and write CSV outputs plus a summary");
    run->add_option("scenario", run_arg, "Scenario file or preset name")
        ->required();
    run->add_option("--out", out_dir, "Output directory (default afc_out)");
    CLI::Option* dec_opt = run->add_option(
        "--decimate", decimate, "Store every N-th step (overrides the scenario)");
    CLI::Option* seed_opt = run->add_option(
        "--seed", seed, "Perturbation seed (overrides the scenario)");

    std::string validate_arg;
    CLI::App* validate = app.add_subcommand(
        "validate", "Parse and validate a scenario without running it");
    validate->add_option("scenario", validate_arg, "Scenario file or preset name")
        ->required();

    CLI::App* presets_cmd =
        app.add_subcommand("presets", "Operations on shipped presets");
    CLI::App* presets_list =
        presets_cmd->add_subcommand("list", "List shipped scenario presets");
    presets_cmd->require_subcommand(1);

    try {
        app.parse(argc, argv);

        if (run->parsed()) {
            afc::Scenario s = load_scenario(run_arg);
            if (dec_opt->count() > 0) {
                if (decimate < 1) {
                    throw afc::ValidationError(
                        "decimate", "cli: --decimate must be at least 1");
                }
                s.decimate = decimate;
            }
            if (seed_opt->count() > 0) s.perturb_seed = seed;
            const afc::RunReport rep = afc::run_pipeline(s);
            afc::write_outputs(rep, out_dir);
            std::cout << afc::summary_text(rep);
            std::cout << "outputs: " << out_dir << '\n';
            return rep.exit_code();
        }

        if (validate->parsed()) {
            const afc::Scenario s = load_scenario(validate_arg);
            const afc::ReferenceShape shape = afc::resolve_shape(s);
            const afc::FrameworkGraph g =
                afc::FrameworkGraph::build(shape.agent_count(), s.edges);
            std::cout << "valid: " << (s.name.empty() ? validate_arg : s.name)
                      << '\n';
            std::cout << "agents: " << shape.agent_count()
                      << "  dimension: " << shape.dimension()
                      << "  edges: " << g.edge_count() << '\n';
            std::cout << "motion spans: " << s.schedule.size()
                      << "  engine: "
                      << (s.distributed ? "distributed" : "centralized")
                      << "  t_end: " << s.t_end << '\n';
            return 0;
        }

        if (presets_list->parsed()) {
            for (const auto& p : afc::presets::scenario_presets()) {
                std::cout << p.name << "  " << p.summary << '\n';
            }
            return 0;
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const afc::ParseError& e) {
        std::cerr << "parse error at line " << e.line << ": " << e.what()
                  << '\n';
        return 1;
    } catch (const afc::ValidationError& e) {
        std::cerr << "invalid scenario (field '" << e.field
                  << "'): " << e.what() << '\n';
        return 1;
    } catch (const afc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
