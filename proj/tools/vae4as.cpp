/*
Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    https://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

#include "vae4as/checkpoint.hpp"
#include "vae4as/detector.hpp"
#include "vae4as/errors.hpp"
#include "vae4as/eval.hpp"
#include "vae4as/experiment.hpp"

using namespace vae4as;

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kDataError = 3, kNumericalError = 4 };

struct CommonOptions {
    std::string config_path;
    std::string dataset;
    std::string dd_mode;
    std::string out;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    std::size_t runs = 0;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--config", o.config_path, "key = value config file");
    cmd->add_option("--dataset", o.dataset, "builtin stream (sea, sine, circle, vib) or CSV path");
    cmd->add_option("--seed", o.seed, "base seed");
    cmd->add_option("--runs", o.runs, "number of seeded runs");
    cmd->add_option("--dd-mode", o.dd_mode, "dual, ks_only or distance_only");
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--set", o.sets, "override, key=value (repeatable)");
}

ExperimentConfig resolve(const CommonOptions& o) {
    std::vector<std::pair<std::string, std::string>> overrides;
    if (!o.dataset.empty()) {
        overrides.emplace_back("dataset", o.dataset);
    }
    if (o.seed != 0) {
        overrides.emplace_back("seed", std::to_string(o.seed));
    }
    if (o.runs != 0) {
        overrides.emplace_back("runs", std::to_string(o.runs));
    }
    if (!o.dd_mode.empty()) {
        overrides.emplace_back("dd_mode", o.dd_mode);
    }
    if (!o.out.empty()) {
        overrides.emplace_back("out", o.out);
    }
    for (const auto& s : o.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("--set expects key=value, got '" + s + "'");
        }
        overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    return load_config(o.config_path, overrides);
}

void print_summary(const ExperimentSummary& s) {
    for (const auto& r : s.runs) {
        std::printf("seed %llu  final_g_mean %.4f  detections %zu/%zu  false_alarms %zu\n",
                    static_cast<unsigned long long>(r.seed), r.final_g_mean, r.score.detections(),
                    r.score.delays.size(), r.score.false_alarms);
    }
    std::printf("final_g_mean %.4f +- %.4f  false_alarms %.2f +- %.2f  config_hash %s\n", s.final_g_mean.mean[0],
                s.final_g_mean.stderr_[0], s.false_alarms.mean[0], s.false_alarms.stderr_[0], s.config_hash.c_str());
}

}// namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-supervised anomaly detection on drifting streams"};
    app.require_subcommand(1);

    CommonOptions gen_opts;
    std::string gen_pretrain_out;
    auto* gen = app.add_subcommand("generate", "write a builtin stream as CSV");
    add_common(gen, gen_opts);
    gen->add_option("--pretrain-out", gen_pretrain_out, "also write labeled pre-training rows");

    CommonOptions pre_opts;
    auto* pre = app.add_subcommand("pretrain", "pre-train a model and save a checkpoint");
    add_common(pre, pre_opts);

    CommonOptions run_opts;
    auto* run = app.add_subcommand("run", "run seeded experiments and write metrics");
    add_common(run, run_opts);

    CommonOptions sweep_opts;
    std::string sweep_param;
    std::vector<std::string> sweep_values;
    auto* sw = app.add_subcommand("sweep", "repeat run over values of one parameter");
    add_common(sw, sweep_opts);
    sw->add_option("--param", sweep_param, "config key to vary")->required();
    sw->add_option("--values", sweep_values, "values to try")->required()->delimiter(',');

    std::string eval_checkpoint;
    std::string eval_data;
    auto* ev = app.add_subcommand("evaluate", "static G-mean of a checkpoint on a labeled CSV");
    ev->add_option("--checkpoint", eval_checkpoint)->required();
    ev->add_option("--data", eval_data)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const auto config = resolve(gen_opts);
            if (!config.is_builtin()) {
                throw ConfigError("generate needs a builtin dataset");
            }
            const auto data = prepare_data(config, config.seed);
            const std::string path = gen_opts.out.empty() ? config.dataset + ".csv" : gen_opts.out;
            write_csv_stream(path, data.stream);
            if (!gen_pretrain_out.empty()) {
                std::vector<LabeledInstance> rows;
                for (const auto& x : data.pretrain_normal) {
                    rows.push_back({x, 0, 0});
                }
                for (const auto& x : data.anomalous_reference) {
                    rows.push_back({x, 1, 0});
                }
                write_csv_stream(gen_pretrain_out, rows);
            }
            std::printf("wrote %zu instances to %s\n", data.stream.size(), path.c_str());
        } else if (pre->parsed()) {
            auto config = resolve(pre_opts);
            const auto data = prepare_data(config, config.seed);
            auto pc = config.pipeline;
            pc.seed = config.seed;
            const auto pipeline = Pipeline::pretrain(data.pretrain_normal, data.anomalous_reference, pc);
            const std::string path = pre_opts.out.empty() ? "model.ckpt" : pre_opts.out;
            save_checkpoint(path, Checkpoint{pipeline.model(), pipeline.normalizer(), pipeline.theta()});
            std::printf("theta %.6g  checkpoint %s\n", pipeline.theta(), path.c_str());
            if (!data.validation.empty()) {
                std::printf("validation_g_mean %.4f\n", pipeline.evaluate_g_mean(data.validation));
            }
        } else if (run->parsed()) {
            print_summary(run_experiment(resolve(run_opts)));
        } else if (sw->parsed()) {
            const auto config = resolve(sweep_opts);
            for (const auto& row : sweep(config, sweep_param, sweep_values)) {
                std::printf("%s=%s  final_g_mean %.4f +- %.4f  false_alarms %.2f\n", sweep_param.c_str(),
                            row.value.c_str(), row.mean_final_g_mean, row.stderr_final_g_mean, row.mean_false_alarms);
            }
        } else if (ev->parsed()) {
            const auto ck = load_checkpoint(eval_checkpoint);
            const auto data = load_csv_stream(eval_data);
            FadedCounts counts(1.0);
            double g = 0.0;
            for (const auto& inst : data) {
                const auto pred = predict(ck.model, ck.theta, ck.normalizer.apply(inst.x));
                g = prequential_update(counts, inst.y_true, pred.label);
            }
            std::printf("g_mean %.6f  positive_recall %.6f  negative_recall %.6f\n", g, counts.positive_recall(),
                        counts.negative_recall());
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return kNumericalError;
    } catch (const ContractViolation& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kDataError;
    }
    return kOk;
}
