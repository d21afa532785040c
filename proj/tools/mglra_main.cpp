#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mglra/cli.hpp"
#include "mglra/errors.hpp"

int main(int argc, char** argv) {
    CLI::App app{"MGLRA multimodal emotion recognition pipeline"};
    app.require_subcommand(1);

    std::string spec_path, out_dir = "out", config_path, model_path, features_path, parameter;
    std::vector<double> values;

    auto* generate = app.add_subcommand("generate", "synthesize feature files from a spec");
    generate->add_option("--spec", spec_path, "synthetic spec JSON")->required();
    generate->add_option("--out", out_dir, "output directory")->required();

    auto* train = app.add_subcommand("train", "train a model from a run config");
    train->add_option("--config", config_path, "run config JSON")->required();

    auto* sweep = app.add_subcommand("sweep", "train once per hyperparameter value");
    sweep->add_option("--param", parameter, "one of mask_rate, n_heads, T^F, aleph")->required();
    sweep->add_option("--values", values, "values to sweep")->required()->delimiter(',');
    sweep->add_option("--config", config_path, "run config JSON")->required();

    auto* inspect = app.add_subcommand("inspect", "export metrics, embeddings and graph dumps");
    inspect->add_option("--model", model_path, "model binary")->required();
    inspect->add_option("--features", features_path, "feature JSONL file")->required();
    inspect->add_option("--out", out_dir, "output directory")->required();

    try {
        app.parse(argc, argv);
        if (generate->parsed()) {
            mglra::cmd_generate(spec_path, out_dir);
        } else if (train->parsed()) {
            mglra::cmd_train(config_path);
        } else if (sweep->parsed()) {
            mglra::cmd_sweep(parameter, values, config_path);
        } else if (inspect->parsed()) {
            mglra::cmd_inspect(model_path, features_path, out_dir);
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : mglra::kExitIoUsage;
    } catch (const mglra::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return mglra::kExitIoUsage;
    } catch (const mglra::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return mglra::kExitIoUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return mglra::kExitContract;
    }
    return mglra::kExitOk;
}
