#include <cstdint>
#include <string>

#include <CLI11.hpp>

#include "dra/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Diversity-calibrated group policy optimization toolkit"};
    app.require_subcommand(1);

    std::string input, output, config_path;
    std::string smi_name = "graphcut";
    std::string method_name = "tapprox";
    std::string synth_kind = "null";
    double epsilon = 1e-6;
    double jitter = 1e-8;
    double alpha = 0.05;
    double noise = 0.05;
    std::uint64_t seed = 0;
    int max_group = 64;
    int repetitions = 5;
    std::size_t prompts = 500;
    int group_size = 6;
    int dim = 8;
    bool sweep = false;

    CLI::App* adjust = app.add_subcommand("adjust", "Reweight completion rewards by diversity");
    adjust->add_option("--input", input, "Completion JSONL")->required();
    adjust->add_option("--output", output, "Output JSONL")->required();
    adjust->add_option("--smi", smi_name, "Redundancy measure")
        ->check(CLI::IsMember({"graphcut", "logdet"}));
    adjust->add_option("--epsilon", epsilon, "Denominator slack");
    adjust->add_option("--jitter", jitter, "Diagonal regularizer (logdet)");

    CLI::App* analyze =
        app.add_subcommand("analyze", "Correlate reward and embedding distances per prompt");
    analyze->add_option("--input", input, "Completion JSONL")->required();
    analyze->add_option("--output", output, "Output CSV prefix")->required();
    analyze->add_option("--alpha", alpha, "Significance level");
    analyze->add_option("--method", method_name, "P-value method")
        ->check(CLI::IsMember({"tapprox", "permutation"}));
    analyze->add_option("--seed", seed, "Permutation sampling seed");

    CLI::App* simulate = app.add_subcommand("simulate", "Train on the toy landscape");
    simulate->add_option("--config", config_path, "Run config JSON")->required();
    simulate->add_option("--output", output, "Metrics CSV path")->required();
    simulate->add_flag("--sweep", sweep, "Run all four algorithms under the shared seed");

    CLI::App* bench = app.add_subcommand("bench", "Time the weight variants over group sizes");
    bench->add_option("--max-g", max_group, "Largest group size (doubling grid from 8)");
    bench->add_option("--repetitions", repetitions, "Timing repetitions per size");
    bench->add_option("--output", output, "Timing CSV path")->required();
    bench->add_option("--seed", seed, "Embedding draw seed");

    CLI::App* synth = app.add_subcommand("synth", "Generate synthetic completion datasets");
    synth->add_option("--kind", synth_kind, "Dataset regime")
        ->check(CLI::IsMember({"null", "monotone"}));
    synth->add_option("--prompts", prompts, "Number of prompts");
    synth->add_option("--group-size", group_size, "Completions per prompt");
    synth->add_option("--dim", dim, "Embedding dimension");
    synth->add_option("--noise", noise, "Angular noise (monotone)");
    synth->add_option("--seed", seed, "Generation seed");
    synth->add_option("--output", output, "Output JSONL")->required();

    CLI11_PARSE(app, argc, argv);

    if (adjust->parsed()) {
        dra::SmiKind kind;
        kind.variant =
            smi_name == "logdet" ? dra::SmiVariant::LogDet : dra::SmiVariant::GraphCut;
        kind.jitter = jitter;
        return dra::cmd_adjust(input, output, kind, epsilon);
    }
    if (analyze->parsed()) {
        const dra::PValueMethod method = method_name == "permutation"
                                             ? dra::PValueMethod::Permutation
                                             : dra::PValueMethod::TApprox;
        return dra::cmd_analyze(input, output, alpha, method, seed);
    }
    if (simulate->parsed()) return dra::cmd_simulate(config_path, output, sweep);
    if (bench->parsed()) return dra::cmd_bench(max_group, repetitions, output, seed);
    if (synth->parsed()) {
        const dra::SynthKind kind =
            synth_kind == "monotone" ? dra::SynthKind::Monotone : dra::SynthKind::Null;
        return dra::cmd_synth(kind, prompts, group_size, dim, noise, seed, output);
    }
    return 1;
}
