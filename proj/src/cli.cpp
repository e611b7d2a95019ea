#include "rgnn/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "rgnn/baselines.hpp"
#include "rgnn/generators.hpp"
#include "rgnn/joins.hpp"
#include "rgnn/network.hpp"
#include "rgnn/policy.hpp"
#include "rgnn/state_space.hpp"
#include "rgnn/trainer.hpp"
#include "rgnn/wl.hpp"

namespace rgnn {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

int env_threads() {
    const char* env = std::getenv("RGNN_THREADS");
    if (!env) return 1;
    int threads = std::atoi(env);
    if (threads <= 0)
        threads = static_cast<int>(std::thread::hardware_concurrency());
    return std::max(1, std::min(threads, 16));
}

void write_manifest(const fs::path& path, const std::string& subcommand,
                    const json& config, const std::vector<std::string>& artifacts,
                    double wall_time_s) {
    json manifest;
    manifest["tool"] = "rgnn";
    manifest["version"] = kToolVersion;
    manifest["subcommand"] = subcommand;
    manifest["config"] = config;
    manifest["artifacts"] = artifacts;
    manifest["wall_time_s"] = wall_time_s;
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest: " + path.string());
    out << manifest.dump(2) << "\n";
}

std::vector<std::string> expand_problem_paths(const std::vector<std::string>& inputs) {
    std::vector<std::string> paths;
    for (const std::string& input : inputs) {
        if (fs::is_directory(input)) {
            std::vector<std::string> found;
            for (const auto& entry : fs::directory_iterator(input)) {
                if (!entry.is_regular_file()) continue;
                const std::string name = entry.path().filename().string();
                if (name == "domain.pddl" || entry.path().extension() != ".pddl")
                    continue;
                found.push_back(entry.path().string());
            }
            std::sort(found.begin(), found.end());
            paths.insert(paths.end(), found.begin(), found.end());
        } else {
            paths.push_back(input);
        }
    }
    if (paths.empty()) throw IoError("no problem files found");
    return paths;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ','))
        if (!part.empty()) seeds.push_back(std::stoull(part));
    if (seeds.empty()) throw Error("empty seed list");
    return seeds;
}

struct Timer {
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                             start).count();
    }
};

int run_gen(const std::string& domain, int n, int m, double density, int targets,
            int size, int count, std::uint64_t seed, const std::string& out_dir) {
    Timer timer;
    fs::create_directories(out_dir);
    std::vector<std::string> artifacts;

    const fs::path domain_path = fs::path(out_dir) / "domain.pddl";
    {
        std::ofstream out(domain_path);
        out << domain_pddl(domain);
    }
    artifacts.push_back(domain_path.string());

    for (int i = 0; i < count; ++i) {
        GeneratedInstance inst =
            generate(domain, n, m, density, targets, size, seed + static_cast<std::uint64_t>(i));
        char name[32];
        std::snprintf(name, sizeof(name), "p%02d.pddl", i);
        const fs::path path = fs::path(out_dir) / name;
        std::ofstream out(path);
        out << inst.problem_text;
        artifacts.push_back(path.string());
    }

    json config{{"domain", domain}, {"n", n},           {"m", m},
                {"density", density}, {"targets", targets}, {"size", size},
                {"count", count},   {"seed", seed},     {"out", out_dir}};
    write_manifest(fs::path(out_dir) / "manifest.json", "gen", config, artifacts,
                   timer.seconds());
    std::cout << "wrote " << count << " instance(s) to " << out_dir << "\n";
    return 0;
}

int run_oracle(const std::string& domain_path,
               const std::vector<std::string>& problem_inputs,
               const std::string& out_path, int per_value_cap,
               std::uint64_t seed, bool include_dead_ends, std::size_t cap) {
    Timer timer;
    std::vector<std::string> problems = expand_problem_paths(problem_inputs);

    std::vector<ExpandedInstance> expanded;
    std::string domain_name;
    for (const std::string& path : problems) {
        Instance inst = parse_instance_files(domain_path, path);
        domain_name = inst.domain.name;
        ExpandedInstance e;
        e.id = inst.id;
        e.space = expand(inst.domain, inst.init, cap);
        e.vstar = optimal_values(e.space);
        expanded.push_back(std::move(e));
    }
    std::vector<LabeledState> labeled =
        sample_training_set(expanded, per_value_cap, seed, include_dead_ends);
    write_dataset_file(out_path, domain_name, labeled);

    json config{{"domain", domain_path},   {"problems", problems},
                {"per_value_cap", per_value_cap}, {"seed", seed},
                {"include_dead_ends", include_dead_ends}, {"cap", cap}};
    write_manifest(out_path + ".manifest.json", "oracle", config, {out_path},
                   timer.seconds());
    std::cout << "labeled " << labeled.size() << " states from "
              << problems.size() << " instance(s) -> " << out_path << "\n";
    return 0;
}

int run_transform(const std::string& domain_path, const std::string& problem_path,
                  const std::string& model, int t, bool cumulative,
                  const std::string& out_path) {
    Timer timer;
    Instance inst = parse_instance_files(domain_path, problem_path);
    const ModelKind kind = model_kind_from_string(model);

    std::ostringstream out;
    out << "# rgnn-transform 1\n# model " << model << "\n# t " << t << "\n";
    if (kind == ModelKind::rgnn_t || kind == ModelKind::rgnn2) {
        RelationalState s = add_obj_atoms(augment_goal(inst.init));
        TransformedState ts = kind == ModelKind::rgnn_t
                                  ? at_transform(s, t, cumulative)
                                  : build_rgnn2_input(s);
        for (int p = 0; p < static_cast<int>(ts.pairs.size()); ++p) {
            if (p) out << ",";
            out << ts.pair_name(p);
        }
        out << "\n" << transformed_to_text(ts) << "\n";
    } else if (kind == ModelKind::two_gnn) {
        RelationalState s = augment_goal(inst.init);
        Vocabulary net = network_vocabulary(
            model_base_vocabulary(s.vocab, kind), kind, 0);
        NetworkInput input = build_2gnn_input(s, net);
        for (int node = 0; node < input.num_nodes; ++node) {
            if (node) out << ",";
            out << input.node_names[static_cast<std::size_t>(node)];
        }
        out << "\n";
        for (std::size_t i = 0; i < input.atoms.size(); ++i) {
            if (i) out << " ";
            const InputAtom& atom = input.atoms[i];
            out << net.at(atom.predicate).name << "("
                << input.node_names[static_cast<std::size_t>(atom.args[0])] << ","
                << input.node_names[static_cast<std::size_t>(atom.args[1])] << ")";
        }
        out << "\n";
    } else {
        RelationalState s = augment_goal(inst.init);
        out << state_to_text(s) << "\n";
    }

    if (out_path.empty()) {
        std::cout << out.str();
    } else {
        std::ofstream file(out_path);
        if (!file) throw IoError("cannot write " + out_path);
        file << out.str();
        json config{{"domain", domain_path}, {"problem", problem_path},
                    {"model", model},        {"t", t},
                    {"cumulative", cumulative}};
        write_manifest(out_path + ".manifest.json", "transform", config,
                       {out_path}, timer.seconds());
    }
    return 0;
}

std::pair<std::vector<LabeledState>, std::vector<LabeledState>> split_dataset(
    const Dataset& ds, const std::string& val_path, double val_fraction,
    std::uint64_t split_seed) {
    if (!val_path.empty()) {
        Dataset val = read_dataset_file(val_path);
        return {ds.states, val.states};
    }
    if (val_fraction <= 0.0) return {ds.states, ds.states};

    std::vector<std::string> ids;
    for (const LabeledState& ls : ds.states)
        if (ids.empty() || ids.back() != ls.instance_id)
            ids.push_back(ls.instance_id);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

    std::vector<LabeledState> train, val;
    Rng rng(split_seed);
    if (ids.size() > 1) {
        rng.shuffle(ids);
        const std::size_t val_count = std::max<std::size_t>(
            1, static_cast<std::size_t>(val_fraction * static_cast<double>(ids.size())));
        std::vector<std::string> val_ids(ids.begin(),
                                         ids.begin() + static_cast<std::ptrdiff_t>(val_count));
        std::sort(val_ids.begin(), val_ids.end());
        for (const LabeledState& ls : ds.states) {
            if (std::binary_search(val_ids.begin(), val_ids.end(), ls.instance_id))
                val.push_back(ls);
            else
                train.push_back(ls);
        }
    } else {
        // single instance: split states instead
        std::vector<std::size_t> order(ds.states.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        rng.shuffle(order);
        const std::size_t val_count = std::max<std::size_t>(
            1, static_cast<std::size_t>(val_fraction * static_cast<double>(order.size())));
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (i < val_count)
                val.push_back(ds.states[order[i]]);
            else
                train.push_back(ds.states[order[i]]);
        }
    }
    if (train.empty()) throw Error("validation split consumed every state");
    return {train, val};
}

int run_train(const std::string& data_path, const std::string& val_path,
              double val_fraction, const std::string& model, int t, int dim,
              int layers, double lr, int batch, int steps,
              const std::string& seeds_text, const std::string& out_path,
              const std::string& metrics_path, bool cumulative,
              double stop_train_loss) {
    Timer timer;
    Dataset ds = read_dataset_file(data_path);
    auto [train_set, val_set] = split_dataset(ds, val_path, val_fraction, 0);

    TrainConfig config;
    config.kind = model_kind_from_string(model);
    config.t = t;
    config.cumulative_rt = cumulative;
    config.net.embed_dim = dim;
    config.net.layers = layers;
    config.lr = lr;
    config.batch_size = batch;
    config.max_steps = steps;
    config.seeds = parse_seed_list(seeds_text);
    config.threads = env_threads();
    config.stop_train_loss = stop_train_loss;

    std::ofstream metrics;
    if (!metrics_path.empty()) {
        metrics.open(metrics_path);
        if (!metrics) throw IoError("cannot write metrics: " + metrics_path);
    }

    ValueModel best;
    TrainReport report = train(config, ds.vocab, train_set, val_set, &best,
                               metrics.is_open() ? &metrics : nullptr);
    save_checkpoint_file(out_path, best);

    json seeds_json = json::array();
    for (const auto& run : report.runs) {
        seeds_json.push_back(json{{"seed", run.seed},
                                  {"steps", run.steps},
                                  {"final_val_loss", run.final_val_loss},
                                  {"aborted_nan", run.aborted_nan}});
    }
    json config_json{{"data", data_path},   {"val", val_path},
                     {"val_fraction", val_fraction}, {"model", model},
                     {"t", t},              {"dim", dim},
                     {"layers", layers},    {"lr", lr},
                     {"batch", batch},      {"steps", steps},
                     {"seeds", seeds_text}, {"runs", seeds_json},
                     {"selected", report.selected}};
    std::vector<std::string> artifacts{out_path};
    if (!metrics_path.empty()) artifacts.push_back(metrics_path);
    write_manifest(out_path + ".manifest.json", "train", config_json, artifacts,
                   timer.seconds());

    std::cout << "selected seed "
              << report.runs[static_cast<std::size_t>(report.selected)].seed
              << " with validation loss "
              << report.runs[static_cast<std::size_t>(report.selected)].final_val_loss
              << " -> " << out_path << "\n";
    return 0;
}

int run_eval(const std::string& model_path, const std::string& domain_path,
             const std::vector<std::string>& problem_inputs, int step_cap,
             const std::string& out_path, std::size_t oracle_cap,
             std::uint64_t tie_seed, bool random_ties) {
    Timer timer;
    ValueModel model = load_checkpoint_file(model_path);
    std::vector<std::string> problems = expand_problem_paths(problem_inputs);
    std::vector<Instance> instances;
    for (const std::string& path : problems)
        instances.push_back(parse_instance_files(domain_path, path));

    ValueFn value = [&model](const RelationalState& s) { return model.value(s); };
    std::vector<EvalRecord> records;
    SuiteSummary summary;
    if (random_ties) {
        records.resize(instances.size());
        for (std::size_t i = 0; i < instances.size(); ++i)
            records[i] = run_policy(instances[i].domain, instances[i].init, value,
                                    step_cap, tie_seed + i, instances[i].id);
        summary = summarize(records);
    } else {
        summary = evaluate_suite(instances, value, step_cap, &records,
                                 env_threads(), oracle_cap);
    }

    if (!out_path.empty()) {
        std::ofstream out(out_path);
        if (!out) throw IoError("cannot write " + out_path);
        write_records_csv(out, records);
        json config{{"model", model_path}, {"domain", domain_path},
                    {"problems", problems}, {"step_cap", step_cap},
                    {"oracle_cap", oracle_cap}};
        write_manifest(out_path + ".manifest.json", "eval", config, {out_path},
                       timer.seconds());
    }
    std::cout << "coverage " << summary.solved << "/" << summary.total;
    if (summary.solved > 0)
        std::cout << "  plan length total " << summary.total_length << " median "
                  << summary.median_length << " mean " << summary.mean_length;
    std::cout << "\n";
    return 0;
}

int run_wl(const std::string& algo_text, const std::string& a_path,
           const std::string& b_path) {
    Graph a = parse_edge_list_file(a_path);
    Graph b = parse_edge_list_file(b_path);
    WlComparison cmp = compare_graphs(a, b, wl_algo_from_string(algo_text));
    std::cout << (cmp.distinguished ? "DISTINGUISHED" : "NOT-DISTINGUISHED")
              << " algo=" << algo_text << " rounds_a=" << cmp.rounds_a
              << " rounds_b=" << cmp.rounds_b << "\n";
    return 0;
}

int run_gradcheck(const std::string& model, int t, int dim, int layers,
                  double step, int samples, std::uint64_t seed, double tol) {
    GeneratedInstance gen = gen_navig_xy(3, 3, 0.2, seed);
    Instance inst = parse_generated(gen);
    StateSpace space = expand(inst.domain, inst.init);
    std::vector<int> vstar = optimal_values(space);

    // pick a solvable state with the largest value for a non-trivial loss
    std::size_t pick = 0;
    for (std::size_t i = 0; i < space.size(); ++i)
        if (vstar[i] != kInfiniteValue && vstar[i] >= vstar[pick]) pick = i;

    RgnnConfig config;
    config.embed_dim = dim;
    config.layers = layers;
    ValueModel vm = ValueModel::create(model_kind_from_string(model), t, config,
                                       inst.domain.vocab, seed);
    PreparedInput prepared = vm.prepare(space.states[pick]);
    const double target = static_cast<double>(vstar[pick]);

    const double err = grad_check(
        [&](Tape& tape, const ParameterSet& params, GradSink* sink) {
            (void)params;  // vm.params is the set being perturbed
            Tape::Id value = vm.value_on_tape(tape, prepared, sink);
            return tape.abs_diff(value, target);
        },
        vm.params, step, samples, seed);
    std::cout << "max relative error " << err << " over " << samples
              << " coordinates (step " << step << ")\n";
    return err <= tol ? 0 : 1;
}

}  // namespace

int cli_run(const std::vector<std::string>& args) {
    CLI::App app{"relational value-function learning toolkit"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate benchmark instances");
    std::string gen_domain = "navig-xy", gen_out = "data";
    int gen_n = 4, gen_m = 3, gen_targets = 2, gen_size = 2, gen_count = 1;
    double gen_density = 0.2;
    std::uint64_t gen_seed = 1;
    gen->add_option("--domain", gen_domain, "one of the built-in generators")
        ->check(CLI::IsMember(kGeneratorDomains));
    gen->add_option("--n", gen_n, "grid width / vacuum locations");
    gen->add_option("--m", gen_m, "grid height");
    gen->add_option("--density", gen_density, "obstacle density (navig-xy)");
    gen->add_option("--targets", gen_targets, "visit targets (visitall)");
    gen->add_option("--size", gen_size, "balls / blocks / robots");
    gen->add_option("--count", gen_count, "number of instances");
    gen->add_option("--seed", gen_seed, "base seed");
    gen->add_option("--out", gen_out, "output directory");

    // oracle
    auto* oracle = app.add_subcommand("oracle", "expand instances and label V*");
    std::string oracle_domain, oracle_out = "dataset.txt";
    std::vector<std::string> oracle_problems;
    int oracle_cap_per_value = 1000000;
    std::uint64_t oracle_seed = 1;
    bool oracle_dead_ends = false;
    std::size_t oracle_cap = 200000;
    oracle->add_option("--domain", oracle_domain, "domain file")->required();
    oracle->add_option("--problems", oracle_problems,
                       "problem files or directories")->required();
    oracle->add_option("--out", oracle_out, "dataset output path");
    oracle->add_option("--per-value-cap", oracle_cap_per_value,
                       "max states per V* value");
    oracle->add_option("--seed", oracle_seed, "sampling seed");
    oracle->add_flag("--include-dead-ends", oracle_dead_ends,
                     "label dead ends with a finite surrogate");
    oracle->add_option("--cap", oracle_cap, "state-space size cap");

    // transform
    auto* transform = app.add_subcommand("transform",
                                         "dump the network input atoms");
    std::string tr_domain, tr_problem, tr_model = "rgnn-t", tr_out;
    int tr_t = 1;
    bool tr_cumulative = false;
    transform->add_option("--domain", tr_domain, "domain file")->required();
    transform->add_option("--problem", tr_problem, "problem file")->required();
    transform->add_option("--model", tr_model, "rgnn | rgnn-t | rgnn2 | 2gnn");
    transform->add_option("--t", tr_t, "composition parameter");
    transform->add_flag("--cumulative", tr_cumulative,
                        "union lower R_t levels into R_t");
    transform->add_option("--out", tr_out, "output file (stdout if omitted)");

    // train
    auto* train_cmd = app.add_subcommand("train", "train a value function");
    std::string train_data, train_val, train_model = "rgnn-t",
                train_seeds = "1,2,3", train_out = "model.ckpt", train_metrics;
    double train_val_fraction = 0.2, train_lr = 2e-4, train_stop = 0.0;
    int train_t = 1, train_dim = 32, train_layers = 15, train_batch = 16,
        train_steps = 5000;
    bool train_cumulative = false;
    train_cmd->add_option("--data", train_data, "training dataset")->required();
    train_cmd->add_option("--val", train_val, "validation dataset");
    train_cmd->add_option("--val-fraction", train_val_fraction,
                          "held-out fraction when --val is absent");
    train_cmd->add_option("--model", train_model, "rgnn | rgnn-t | rgnn2 | 2gnn");
    train_cmd->add_option("--t", train_t, "composition parameter");
    train_cmd->add_option("--dim", train_dim, "embedding dimension k");
    train_cmd->add_option("--layers", train_layers, "message-passing layers L");
    train_cmd->add_option("--lr", train_lr, "Adam learning rate");
    train_cmd->add_option("--batch", train_batch, "batch size");
    train_cmd->add_option("--steps", train_steps, "Adam step budget per seed");
    train_cmd->add_option("--seeds", train_seeds, "comma-separated seeds");
    train_cmd->add_option("--out", train_out, "checkpoint path");
    train_cmd->add_option("--metrics", train_metrics, "metrics CSV path");
    train_cmd->add_flag("--cumulative", train_cumulative,
                        "union lower R_t levels into R_t");
    train_cmd->add_option("--stop-train-loss", train_stop,
                          "early exit once epoch train loss drops below");

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "run the greedy policy");
    std::string eval_model, eval_domain, eval_out;
    std::vector<std::string> eval_problems;
    int eval_cap = 1000;
    std::size_t eval_oracle_cap = 0;
    std::uint64_t eval_tie_seed = 0;
    bool eval_random_ties = false;
    eval_cmd->add_option("--model", eval_model, "checkpoint path")->required();
    eval_cmd->add_option("--domain", eval_domain, "domain file")->required();
    eval_cmd->add_option("--problems", eval_problems,
                         "problem files or directories")->required();
    eval_cmd->add_option("--step-cap", eval_cap, "execution step cap");
    eval_cmd->add_option("--out", eval_out, "per-instance CSV path");
    eval_cmd->add_option("--oracle-cap", eval_oracle_cap,
                         "expand instances up to this size to record V*");
    eval_cmd->add_flag("--random-ties", eval_random_ties,
                       "break value ties randomly instead of canonically");
    eval_cmd->add_option("--tie-seed", eval_tie_seed, "seed for --random-ties");

    // wl
    auto* wl_cmd = app.add_subcommand("wl", "compare two graphs with WL");
    std::string wl_algo = "fwl2", wl_a, wl_b;
    wl_cmd->add_option("--algo", wl_algo, "wl1 | fwl2 | owl2 | owl3")
        ->check(CLI::IsMember({"wl1", "fwl2", "owl2", "owl3"}));
    wl_cmd->add_option("--a", wl_a, "first edge-list file")->required();
    wl_cmd->add_option("--b", wl_b, "second edge-list file")->required();

    // gradcheck
    auto* gc = app.add_subcommand("gradcheck",
                                  "finite-difference gradient audit");
    std::string gc_model = "rgnn-t";
    int gc_t = 1, gc_dim = 8, gc_layers = 3, gc_samples = 100;
    double gc_step = 1e-6, gc_tol = 1e-5;
    std::uint64_t gc_seed = 1;
    gc->add_option("--model", gc_model, "rgnn | rgnn-t | rgnn2 | 2gnn");
    gc->add_option("--t", gc_t, "composition parameter");
    gc->add_option("--dim", gc_dim, "embedding dimension");
    gc->add_option("--layers", gc_layers, "layers");
    gc->add_option("--step", gc_step, "finite-difference step");
    gc->add_option("--samples", gc_samples, "sampled coordinates");
    gc->add_option("--seed", gc_seed, "seed");
    gc->add_option("--tol", gc_tol, "pass/fail threshold");

    std::vector<const char*> argv;
    argv.push_back("rgnn");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n" << app.help();
        return 2;
    }

    try {
        if (gen->parsed())
            return run_gen(gen_domain, gen_n, gen_m, gen_density, gen_targets,
                           gen_size, gen_count, gen_seed, gen_out);
        if (oracle->parsed())
            return run_oracle(oracle_domain, oracle_problems, oracle_out,
                              oracle_cap_per_value, oracle_seed,
                              oracle_dead_ends, oracle_cap);
        if (transform->parsed())
            return run_transform(tr_domain, tr_problem, tr_model, tr_t,
                                 tr_cumulative, tr_out);
        if (train_cmd->parsed())
            return run_train(train_data, train_val, train_val_fraction,
                             train_model, train_t, train_dim, train_layers,
                             train_lr, train_batch, train_steps, train_seeds,
                             train_out, train_metrics, train_cumulative,
                             train_stop);
        if (eval_cmd->parsed())
            return run_eval(eval_model, eval_domain, eval_problems, eval_cap,
                            eval_out, eval_oracle_cap, eval_tie_seed,
                            eval_random_ties);
        if (wl_cmd->parsed()) return run_wl(wl_algo, wl_a, wl_b);
        if (gc->parsed())
            return run_gradcheck(gc_model, gc_t, gc_dim, gc_layers, gc_step,
                                 gc_samples, gc_seed, gc_tol);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace rgnn
