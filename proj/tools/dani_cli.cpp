#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dani/cascade.hpp"
#include "dani/evaluate.hpp"
#include "dani/graph.hpp"
#include "dani/inference.hpp"
#include "dani/simulate.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitStage = 3;

// key=value config file; '#' starts a comment line.
std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("bad config line: " + line);
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        auto trim = [](std::string& s) {
            s.erase(0, s.find_first_not_of(" \t"));
            s.erase(s.find_last_not_of(" \t") + 1);
        };
        trim(key);
        trim(val);
        kv[key] = val;
    }
    return kv;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string default_output_dir() {
    if (const char* env = std::getenv("DANI_OUTPUT_DIR")) return env;
    return ".";
}

dani::InferMode parse_mode(const std::string& s) {
    if (s == "directed") return dani::InferMode::directed;
    if (s == "undirected") return dani::InferMode::undirected;
    throw CLI::ValidationError("mode", "must be directed or undirected");
}

struct EvalRow {
    dani::EdgeReport edge;
    dani::StructureReport structure;
    std::optional<dani::CommunityReport> community;
};

EvalRow run_evaluation(const dani::Graph& truth,
                       const dani::CommunityPartition* truth_part,
                       const dani::InferredGraph& inferred,
                       std::uint64_t detector_seed) {
    EvalRow row;
    row.edge = dani::edge_metrics(truth, inferred);
    row.structure = dani::structure_metrics(truth, inferred);
    if (truth_part) {
        dani::Graph ig = dani::to_graph(inferred, truth.n);
        row.community =
            dani::community_report(truth, *truth_part, ig, detector_seed);
    }
    return row;
}

json report_json(const EvalRow& row, std::uint64_t config_hash) {
    json j;
    j["config_hash"] = config_hash;
    j["edge"] = {{"precision", row.edge.precision},
                 {"recall", row.edge.recall},
                 {"f_measure", row.edge.f_measure},
                 {"true_edge_count", row.edge.true_edge_count},
                 {"inferred_edge_count", row.edge.inferred_edge_count},
                 {"hit_count", row.edge.hit_count}};
    j["structure"] = {{"node_recovery", row.structure.node_recovery},
                      {"degree_rel_err", row.structure.degree_rel_err},
                      {"clustering_rel_err", row.structure.clustering_rel_err}};
    if (row.community) {
        const auto& c = *row.community;
        j["community"] = {{"nmi", c.nmi},
                          {"pwf", c.pwf},
                          {"density_gap", c.density_gap},
                          {"conductance_gap", c.conductance_gap},
                          {"nc", c.nc},
                          {"degenerate_nmi", c.degenerate_nmi},
                          {"detector_seed", c.detector_seed}};
    } else {
        j["community"] = nullptr;
    }
    return j;
}

std::vector<std::size_t> parse_counts(const std::string& s) {
    std::vector<std::size_t> counts;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) counts.push_back(std::stoull(tok));
    return counts;
}

int cmd_pipeline(const std::string& config_path) {
    auto kv = read_config(config_path);
    auto get = [&](const std::string& key, const std::string& def) {
        auto it = kv.find(key);
        return it == kv.end() ? def : it->second;
    };

    dani::GenConfig gen;
    gen.n = std::stoull(get("gen.n", "128"));
    gen.mu = std::stod(get("gen.mu", "0.1"));
    gen.avg_degree = std::stod(get("gen.avg_degree", "16"));
    gen.max_degree = std::stoull(get("gen.max_degree", "0"));
    gen.min_community = std::stoull(get("gen.min_community", "0"));
    gen.max_community = std::stoull(get("gen.max_community", "0"));
    gen.rng_seed = std::stoull(get("gen.seed", "1"));
    if (kv.count("gen.community_sizes"))
        for (std::size_t s : parse_counts(kv["gen.community_sizes"]))
            gen.community_sizes.push_back(s);
    if (gen.community_sizes.empty() && gen.min_community == 0) {
        std::size_t c = std::stoull(get("gen.communities", "4"));
        gen.community_sizes.assign(c, gen.n / c);
        gen.community_sizes.back() += gen.n % c;
    }

    dani::SimConfig sim;
    sim.delay_scale = std::stod(get("sim.delay_scale", "1.0"));
    sim.infection_prob = std::stod(get("sim.infection_prob", "0.3"));
    sim.max_cascade_size = std::stoull(get("sim.max_cascade_size", "0"));
    sim.rng_seed = std::stoull(get("sim.seed", "2"));

    auto counts = parse_counts(get("counts", "500,1000"));
    std::size_t repeats = std::stoull(get("eval.repeats", "1"));
    std::uint64_t detector_seed = std::stoull(get("eval.detector_seed", "3"));
    std::string mode_s = get("infer.mode", "undirected");
    dani::InferMode mode = parse_mode(mode_s);
    std::string k_s = get("infer.k", "auto_truth_edges");
    fs::path out_dir = get("output_dir", default_output_dir());

    std::string config_text;
    for (const auto& [k, v] : kv) config_text += k + "=" + v + "\n";
    std::uint64_t config_hash = fnv1a(config_text);

    fs::create_directories(out_dir);
    {
        std::ofstream cfg_copy(out_dir / "config.txt");
        cfg_copy << config_text;
    }

    std::ofstream sweep(out_dir / "sweep.csv");
    if (!sweep) {
        std::cerr << "cannot write " << (out_dir / "sweep.csv") << "\n";
        return kExitIo;
    }
    sweep << "algo,cascades,repeat,f_measure,nmi,pwf,density_gap,"
             "conductance_gap,nc,runtime_ms\n";
    sweep.precision(10);

    for (std::size_t rep = 0; rep < repeats; ++rep) {
        std::string stage = "generate";
        try {
            dani::GenConfig g = gen;
            g.rng_seed = gen.rng_seed + rep;
            auto [graph, part] = dani::planted_partition(g);
            fs::path rep_dir = out_dir / ("repeat_" + std::to_string(rep));
            fs::create_directories(rep_dir);
            dani::save_graph(graph, (rep_dir / "graph.tsv").string());
            dani::save_partition(part, (rep_dir / "partition.tsv").string());

            std::size_t k = graph.edges.size();
            if (k_s != "auto" && k_s != "auto_truth_edges") k = std::stoull(k_s);

            stage = "simulate";
            dani::SimConfig s = sim;
            s.rng_seed = sim.rng_seed + rep;
            auto sets = dani::simulate_batch(graph, s, counts);
            for (std::size_t ci = 0; ci < counts.size(); ++ci)
                dani::write_cascades(
                    sets[ci],
                    (rep_dir / ("cascades_" + std::to_string(counts[ci]) + ".txt"))
                        .string(),
                    dani::CascadeFormat::snap);

            for (std::size_t ci = 0; ci < counts.size(); ++ci) {
                for (const std::string algo : {"dani", "baseline"}) {
                    stage = "infer(" + algo + ")";
                    auto t0 = std::chrono::steady_clock::now();
                    dani::InferredGraph ig =
                        algo == "dani"
                            ? dani::infer(sets[ci], k, mode)
                            : dani::baseline_time_adjacency(sets[ci], k, mode);
                    auto t1 = std::chrono::steady_clock::now();
                    double ms =
                        std::chrono::duration<double, std::milli>(t1 - t0).count();
                    dani::write_inferred(
                        ig, (rep_dir / (algo + "_" + std::to_string(counts[ci]) +
                                        ".tsv"))
                                .string());

                    stage = "evaluate(" + algo + ")";
                    EvalRow row = run_evaluation(graph, &part, ig, detector_seed);
                    json j = report_json(row, config_hash);
                    j["algo"] = algo;
                    j["cascades"] = counts[ci];
                    j["repeat"] = rep;
                    j["runtime_ms"] = ms;
                    j["seeds"] = {{"gen", g.rng_seed},
                                  {"sim", s.rng_seed},
                                  {"detector", detector_seed}};
                    std::ofstream rf(rep_dir / ("report_" + algo + "_" +
                                                std::to_string(counts[ci]) + ".json"));
                    rf << j.dump(2) << "\n";

                    const auto& c = *row.community;
                    sweep << algo << "," << counts[ci] << "," << rep << ","
                          << row.edge.f_measure << "," << c.nmi << "," << c.pwf
                          << "," << c.density_gap << "," << c.conductance_gap
                          << "," << c.nc << "," << ms << "\n";
                }
            }
        } catch (const std::exception& e) {
            std::cerr << "pipeline stage " << stage << " failed: " << e.what()
                      << "\n";
            return kExitStage;
        }
    }
    std::cout << "wrote " << (out_dir / "sweep.csv").string() << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diffusion network inference toolkit"};
    app.require_subcommand(1);

    // generate
    auto* gen_cmd = app.add_subcommand("generate", "Generate a community graph");
    dani::GenConfig gen;
    std::string gen_sizes, gen_out_graph = "graph.tsv", gen_out_part = "partition.tsv";
    std::size_t gen_communities = 0;
    gen_cmd->add_option("--n", gen.n, "node count")->required();
    gen_cmd->add_option("--mu", gen.mu, "mixing parameter in [0,1]");
    gen_cmd->add_option("--avg-degree", gen.avg_degree, "average degree")
        ->default_val(16.0);
    gen_cmd->add_option("--max-degree", gen.max_degree, "degree cap (0 = 2*avg)");
    gen_cmd->add_option("--min-community", gen.min_community, "min community size");
    gen_cmd->add_option("--max-community", gen.max_community, "max community size");
    gen_cmd->add_option("--communities", gen_communities,
                        "equal-size community count (alternative to minC/maxC)");
    gen_cmd->add_option("--sizes", gen_sizes, "explicit community sizes, comma list");
    gen_cmd->add_option("--seed", gen.rng_seed, "rng seed")->default_val(1);
    gen_cmd->add_option("--out-graph", gen_out_graph, "output edge TSV");
    gen_cmd->add_option("--out-partition", gen_out_part, "output partition TSV");

    // simulate
    auto* sim_cmd = app.add_subcommand("simulate", "Generate cascades over a graph");
    dani::SimConfig sim;
    std::string sim_graph, sim_out = "cascades.txt", sim_counts, sim_format = "snap";
    sim_cmd->add_option("--graph", sim_graph, "input edge TSV")->required();
    sim_cmd->add_option("--cascades", sim.cascade_count, "number of cascades");
    sim_cmd->add_option("--counts", sim_counts,
                        "comma list of cascade counts (prefix-consistent sets)");
    sim_cmd->add_option("--delay-scale", sim.delay_scale, "mean exponential delay")
        ->default_val(1.0);
    sim_cmd->add_option("--infection-prob", sim.infection_prob,
                        "per-edge transmission probability")
        ->default_val(0.3);
    sim_cmd->add_option("--max-size", sim.max_cascade_size,
                        "cascade size cap (0 = unbounded)");
    sim_cmd->add_option("--seed", sim.rng_seed, "rng seed")->default_val(2);
    sim_cmd->add_option("--format", sim_format, "snap or tsv");
    sim_cmd->add_option("--out", sim_out, "output cascade file (or prefix with --counts)");

    // infer
    auto* inf_cmd = app.add_subcommand("infer", "Infer edges from cascades");
    std::string inf_cascades, inf_out = "inferred.tsv", inf_k = "auto",
                inf_truth, inf_mode = "directed", inf_algo = "dani",
                inf_format = "snap";
    unsigned inf_threads = 1;
    inf_cmd->add_option("--cascades", inf_cascades, "input cascade file")->required();
    inf_cmd->add_option("--k", inf_k, "edge budget, or 'auto' with --truth");
    inf_cmd->add_option("--truth", inf_truth, "truth edge TSV for --k auto");
    inf_cmd->add_option("--mode", inf_mode, "directed or undirected");
    inf_cmd->add_option("--algo", inf_algo, "dani or baseline");
    inf_cmd->add_option("--format", inf_format, "snap or tsv");
    inf_cmd->add_option("--threads", inf_threads, "worker count (results unchanged)");
    inf_cmd->add_option("--out", inf_out, "output edge TSV");

    // evaluate
    auto* eval_cmd = app.add_subcommand("evaluate", "Score an inferred graph");
    std::string ev_truth, ev_part, ev_inferred, ev_json = "report.json",
                ev_tsv = "report.tsv";
    std::uint64_t ev_seed = 3;
    eval_cmd->add_option("--truth-graph", ev_truth, "truth edge TSV")->required();
    eval_cmd->add_option("--truth-partition", ev_part,
                         "truth partition TSV (optional)");
    eval_cmd->add_option("--inferred", ev_inferred, "inferred edge TSV")->required();
    eval_cmd->add_option("--detector-seed", ev_seed, "label propagation seed");
    eval_cmd->add_option("--out-json", ev_json, "JSON report path");
    eval_cmd->add_option("--out-tsv", ev_tsv, "TSV report row path");

    // pipeline
    auto* pipe_cmd = app.add_subcommand("pipeline", "Full experiment sweep");
    std::string pipe_config;
    pipe_cmd->add_option("--config", pipe_config, "key=value experiment config")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_cmd->parsed()) {
            if (!gen_sizes.empty())
                for (std::size_t s : parse_counts(gen_sizes))
                    gen.community_sizes.push_back(s);
            if (gen.community_sizes.empty() && gen.min_community == 0 &&
                gen_communities > 0) {
                gen.community_sizes.assign(gen_communities, gen.n / gen_communities);
                gen.community_sizes.back() += gen.n % gen_communities;
            }
            auto [graph, part] = dani::planted_partition(gen);
            fs::create_directories(fs::path(gen_out_graph).parent_path().empty()
                                       ? "."
                                       : fs::path(gen_out_graph).parent_path());
            dani::save_graph(graph, gen_out_graph);
            dani::save_partition(part, gen_out_part);
            std::cout << "graph: " << graph.n << " nodes, " << graph.edges.size()
                      << " edges, realized mu "
                      << dani::realized_mixing(graph, part) << "\n";
        } else if (sim_cmd->parsed()) {
            dani::Graph g = dani::load_graph(sim_graph);
            auto fmt = sim_format == "tsv" ? dani::CascadeFormat::tsv
                                           : dani::CascadeFormat::snap;
            if (!sim_counts.empty()) {
                auto counts = parse_counts(sim_counts);
                auto sets = dani::simulate_batch(g, sim, counts);
                for (std::size_t i = 0; i < counts.size(); ++i) {
                    std::string path =
                        sim_out + "." + std::to_string(counts[i]) + ".txt";
                    dani::write_cascades(sets[i], path, fmt);
                    std::cout << "wrote " << path << "\n";
                }
            } else {
                auto cs = dani::simulate(g, sim);
                dani::write_cascades(cs, sim_out, fmt);
                auto st = dani::cascade_stats(cs);
                std::cout << "wrote " << sim_out << ": " << st.count
                          << " cascades, mean length " << st.mean_length << "\n";
            }
        } else if (inf_cmd->parsed()) {
            auto fmt = inf_format == "tsv" ? dani::CascadeFormat::tsv
                                           : dani::CascadeFormat::snap;
            dani::CascadeSet cs = dani::parse_cascades(inf_cascades, fmt);
            std::size_t k = 0;
            if (inf_k == "auto" || inf_k == "auto_truth_edges") {
                if (inf_truth.empty()) {
                    std::cerr << "--k auto requires --truth\n";
                    return kExitConfig;
                }
                k = dani::load_graph(inf_truth).edges.size();
            } else {
                k = std::stoull(inf_k);
            }
            dani::InferMode mode = parse_mode(inf_mode);
            dani::InferredGraph ig =
                inf_algo == "baseline"
                    ? dani::baseline_time_adjacency(cs, k, mode)
                    : dani::infer(cs, k, mode, inf_threads);
            if (ig.saturated)
                std::cerr << "warning: only " << ig.edges.size()
                          << " positive-score pairs for K=" << k << "\n";
            dani::write_inferred(ig, inf_out);
            std::cout << "wrote " << inf_out << " (" << ig.edges.size()
                      << " edges)\n";
        } else if (eval_cmd->parsed()) {
            dani::Graph truth = dani::load_graph(ev_truth);
            dani::InferredGraph inferred = dani::load_inferred(ev_inferred);
            std::optional<dani::CommunityPartition> part;
            if (!ev_part.empty()) part = dani::load_partition(ev_part);
            EvalRow row = run_evaluation(truth, part ? &*part : nullptr, inferred,
                                         ev_seed);
            std::uint64_t cfg_hash =
                fnv1a(ev_truth + "|" + ev_part + "|" + ev_inferred + "|" +
                      std::to_string(ev_seed));
            json j = report_json(row, cfg_hash);
            std::ofstream jf(ev_json);
            jf << j.dump(2) << "\n";
            std::ofstream tf(ev_tsv);
            tf.precision(10);
            tf << "precision\trecall\tf_measure\tnode_recovery\tnmi\tpwf\n"
               << row.edge.precision << "\t" << row.edge.recall << "\t"
               << row.edge.f_measure << "\t" << row.structure.node_recovery
               << "\t" << (row.community ? std::to_string(row.community->nmi) : "null")
               << "\t" << (row.community ? std::to_string(row.community->pwf) : "null")
               << "\n";
            std::cout << j.dump(2) << "\n";
        } else if (pipe_cmd->parsed()) {
            return cmd_pipeline(pipe_config);
        }
    } catch (const dani::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const dani::GraphParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const dani::GenError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const dani::SimError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitStage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    return kExitOk;
}
