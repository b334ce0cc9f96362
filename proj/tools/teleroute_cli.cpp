#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "teleroute/bench.hpp"
#include "teleroute/circuit.hpp"
#include "teleroute/protocol_verifier.hpp"
#include "teleroute/router.hpp"
#include "teleroute/routing_graph.hpp"
#include "teleroute/teleport_optimizer.hpp"

using namespace teleroute;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& given) {
    std::uint64_t s;
    if (given) {
        s = *given;
    } else {
        std::random_device rd;
        s = (std::uint64_t(rd()) << 32) ^ rd();
    }
    std::cerr << "seed " << s << '\n';
    return s;
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

std::vector<int> int_list(const std::string& s, const char* what) {
    std::vector<int> out;
    for (const auto& item : split(s)) {
        try {
            std::size_t used = 0;
            int v = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            out.push_back(v);
        } catch (const std::logic_error&) {
            throw UsageError(std::string("bad ") + what + " value '" + item + "'");
        }
    }
    if (out.empty()) throw UsageError(std::string("empty ") + what + " list");
    return out;
}

LayoutName layout_arg(const std::string& s) {
    try {
        return parse_layout_name(s);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

// Search options shared by compile, bench and sweep. Flags override the config file.
struct SearchFlags {
    std::string config;
    std::optional<int> k, r, iters;
    std::optional<std::uint64_t> seed;

    void add(CLI::App* app) {
        app->add_option("--config", config, "anneal config JSON");
        app->add_option("--k", k, "lookahead layers (default 5)");
        app->add_option("--r", r, "neighbourhood radius (default 10)");
        app->add_option("--iters", iters, "anneal iterations per window (default 200)");
        app->add_option("--seed", seed, "master seed (random when omitted)");
    }

    AnnealConfig resolve() {
        AnnealConfig cfg;
        if (!config.empty()) {
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(read_file(config));
            } catch (const nlohmann::json::exception& e) {
                throw UsageError(config + ": " + e.what());
            }
            try {
                cfg = anneal_config_from_json(j);
            } catch (const std::exception& e) {
                throw UsageError(config + ": " + e.what());
            }
            if (!seed && j.contains("seed")) seed = cfg.seed;
        }
        if (k) cfg.k = *k;
        if (r) cfg.r = *r;
        if (iters) cfg.iterations = *iters;
        try {
            cfg.validate();
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
        return cfg;
    }
};

int run_gen(int qubits, int g, int depth, const std::optional<std::uint64_t>& seed_flag, const std::string& out) {
    if (qubits < 1 || g < 1 || depth < 0) throw UsageError("qubits and g must be positive, depth non-negative");
    if (2 * g > qubits) throw UsageError("g=" + std::to_string(g) + " gates need " + std::to_string(2 * g) + " qubits");
    const std::uint64_t seed = resolve_seed(seed_flag);
    // Same derived seed as the bench sample with this seed.
    write_output(out, serialize_circuit(random_circuit(qubits, g, depth, bench::sample_seeds(seed).circuit)));
    return 0;
}

struct CompileArgs {
    std::string circuit;
    std::string layout = "pair";
    int qubits = 0;
    std::string mode = "optimized";
    std::string mapping;
    std::string out;
    SearchFlags search;
};

int run_compile(CompileArgs& a) {
    const LayoutName layout = layout_arg(a.layout);
    AnnealConfig cfg = a.search.resolve();
    const std::uint64_t seed = resolve_seed(a.search.seed);
    const bench::SampleSeeds seeds = bench::sample_seeds(seed);
    cfg.seed = seeds.anneal;

    LayeredCircuit circ;
    try {
        circ = parse_circuit(read_file(a.circuit));
    } catch (const CircuitParseError& e) {
        std::cerr << a.circuit << ": " << e.what() << '\n';
        return kExitFailure;
    }
    const int q = a.qubits > 0 ? a.qubits : circ.qubits;
    if (q < circ.qubits) {
        std::cerr << "circuit uses " << circ.qubits << " qubits but --qubits is " << q << '\n';
        return kExitFailure;
    }

    std::optional<Layout> lay;
    if (a.mapping.empty()) {
        lay = build_layout(layout, q, seeds.mapping);
    } else {
        // Either a bare positions array for the default window, or
        // {"window": {rows, cols, phase_r, phase_c}, "positions": [...]}.
        const auto j = nlohmann::json::parse(read_file(a.mapping));
        std::vector<VertexId> pos;
        LayoutWindow w = layout_window(layout, q);
        if (j.is_array()) {
            pos = j.get<std::vector<VertexId>>();
        } else {
            pos = j.at("positions").get<std::vector<VertexId>>();
            if (j.contains("window")) {
                const auto& jw = j.at("window");
                w = {jw.at("rows").get<int>(), jw.at("cols").get<int>(), jw.value("phase_r", 0), jw.value("phase_c", 0)};
            }
        }
        if (int(pos.size()) < circ.qubits) {
            std::cerr << "mapping places " << pos.size() << " qubits, circuit needs " << circ.qubits << '\n';
            return kExitFailure;
        }
        RoutingGraph g = window_graph(layout_spec(layout), w);
        Mapping m(g.size(), pos);
        lay.emplace(Layout{std::move(g), std::move(m)});
    }

    Schedule s;
    if (a.mode == "static") {
        s = route_static(lay->graph, lay->mapping, circ);
    } else if (a.mode == "optimized") {
        OptimizerStats stats;
        s = compile_optimized(lay->graph, lay->mapping, circ, cfg, &stats);
        std::cerr << "windows " << stats.windows << ", improved " << stats.windows_improved << ", tree teleports "
                  << stats.tree_teleports << ", idle teleports " << stats.idle_teleports << '\n';
    } else {
        throw UsageError("--mode must be static or optimized");
    }

    const auto problems = check_schedule(lay->graph, lay->mapping, circ, s);
    if (!problems.empty()) {
        for (const auto& p : problems) std::cerr << "invalid schedule: " << p << '\n';
        return kExitFailure;
    }
    if (!a.out.empty()) write_output(a.out, schedule_to_json(s).dump(2) + "\n");
    std::cout << "d_L " << logical_depth(circ) << '\n' << "d_tilde " << s.depth() << '\n';
    return 0;
}

void log_fits(const std::vector<bench::AggregateRow>& rows) {
    std::vector<LayoutName> seen;
    for (const auto& r : rows)
        if (std::find(seen.begin(), seen.end(), r.layout) == seen.end()) seen.push_back(r.layout);
    for (LayoutName l : seen) {
        std::vector<std::pair<double, double>> st, op;
        for (const auto& r : rows)
            if (r.layout == l) {
                st.push_back({double(r.d_l), r.dst_mean});
                op.push_back({double(r.d_l), r.dopt_mean});
            }
        if (st.size() < 2) continue;
        const auto fs = bench::linear_fit(st), fo = bench::linear_fit(op);
        std::cerr << layout_name_str(l) << ": slope d_st " << fs.slope << ", slope d_opt " << fo.slope << '\n';
    }
}

struct BatchArgs {
    int qubits = 120;
    int samples = 10;
    int jobs = 1;
    std::string out;
    std::string json;
    bool quiet = false;
    SearchFlags search;
};

bench::GridOptions grid_options(BatchArgs& a) {
    if (a.samples < 1) throw UsageError("--samples must be at least 1");
    if (a.jobs < 1) throw UsageError("--jobs must be at least 1");
    bench::GridOptions opt;
    opt.samples = a.samples;
    opt.jobs = a.jobs;
    opt.seed = resolve_seed(a.search.seed);
    opt.log_progress = !a.quiet;
    return opt;
}

void write_batch(const BatchArgs& a, const std::vector<bench::AggregateRow>& rows,
                 const std::vector<bench::RunRecord>& records) {
    std::ostringstream csv;
    bench::write_csv(csv, rows);
    write_output(a.out, csv.str());
    if (!a.json.empty()) write_output(a.json, bench::records_to_json(records).dump(2) + "\n");
}

int run_bench(BatchArgs& a, const std::string& layouts_s, const std::string& depths_s, int g) {
    std::vector<LayoutName> layouts;
    for (const auto& s : split(layouts_s)) layouts.push_back(layout_arg(s));
    if (layouts.empty()) throw UsageError("empty layout list");
    const auto depths = int_list(depths_s, "depth");
    if (g < 1 || 2 * g > a.qubits) throw UsageError("need 1 <= g and 2g <= qubits");
    const AnnealConfig cfg = a.search.resolve();
    const auto opt = grid_options(a);
    const auto res = bench::run_grid(layouts, depths, a.qubits, g, cfg, opt);
    write_batch(a, res.rows, res.records);
    log_fits(res.rows);
    return 0;
}

int run_sweep(BatchArgs& a, const std::string& g_s, int total_gates, const std::string& layout_s) {
    const LayoutName layout = layout_arg(layout_s);
    const auto gs = int_list(g_s, "g");
    for (int g : gs)
        if (g < 1 || 2 * g > a.qubits) throw UsageError("g=" + std::to_string(g) + " does not fit " + std::to_string(a.qubits) + " qubits");
    if (total_gates < 1) throw UsageError("--total-gates must be positive");
    const AnnealConfig cfg = a.search.resolve();
    const auto opt = grid_options(a);
    const auto res = bench::run_density_sweep(gs, total_gates, a.qubits, layout, cfg, opt);
    std::vector<bench::AggregateRow> rows;
    for (const auto& r : res.rows) rows.push_back(r.row);
    write_batch(a, rows, res.records);
    return 0;
}

int run_verify(const std::string& which) {
    std::vector<protocol::ProtocolName> names;
    if (which == "all") {
        names = protocol::all_protocols();
    } else {
        try {
            names.push_back(protocol::parse_protocol_name(which));
        } catch (const std::invalid_argument& e) {
            throw UsageError(e.what());
        }
    }
    nlohmann::ordered_json reports = nlohmann::ordered_json::array();
    bool pass = true;
    for (auto n : names) {
        const auto rep = protocol::verify_protocol(protocol::protocol_spec(n));
        pass = pass && rep.pass;
        reports.push_back(protocol::report_to_json(rep));
    }
    std::cout << reports.dump(2) << '\n';
    return pass ? 0 : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lattice-surgery CNOT routing with teleportation trees"};
    app.require_subcommand(1);

    auto* gen = app.add_subcommand("gen", "generate a random layered CNOT circuit");
    int gen_q = 0, gen_g = 0, gen_d = 0;
    std::optional<std::uint64_t> gen_seed;
    std::string gen_out;
    gen->add_option("--qubits", gen_q)->required();
    gen->add_option("--g", gen_g, "gates per layer")->required();
    gen->add_option("--depth", gen_d, "logical layers")->required();
    gen->add_option("--seed", gen_seed);
    gen->add_option("--out", gen_out, "output file (stdout when omitted)");

    auto* compile = app.add_subcommand("compile", "route a circuit file");
    CompileArgs ca;
    compile->add_option("--circuit", ca.circuit)->required();
    compile->add_option("--layout", ca.layout, "single|pair|triple|hex")->capture_default_str();
    compile->add_option("--qubits", ca.qubits, "data patches (default: circuit width)");
    compile->add_option("--mode", ca.mode, "static|optimized")->capture_default_str();
    compile->add_option("--mapping", ca.mapping, "initial mapping JSON");
    compile->add_option("--out", ca.out, "schedule JSON output");
    ca.search.add(compile);

    auto* benchc = app.add_subcommand("bench", "static vs optimized depths over layouts and logical depths");
    BatchArgs ba;
    std::string layouts_s = "single,pair,triple,hex", depths_s = "40,80,160,320";
    int bench_g = 8;
    benchc->add_option("--layouts", layouts_s)->capture_default_str();
    benchc->add_option("--depths", depths_s)->capture_default_str();
    benchc->add_option("--qubits", ba.qubits)->capture_default_str();
    benchc->add_option("--g", bench_g)->capture_default_str();
    benchc->add_option("--samples", ba.samples)->capture_default_str();
    benchc->add_option("--jobs", ba.jobs)->capture_default_str();
    benchc->add_option("--out", ba.out, "aggregate CSV (stdout when omitted)");
    benchc->add_option("--json", ba.json, "per-sample records JSON");
    benchc->add_flag("--quiet", ba.quiet, "no per-sample progress");
    ba.search.add(benchc);

    auto* sweep = app.add_subcommand("sweep", "gate-density sweep at fixed total gate count");
    BatchArgs sa;
    sa.qubits = 60;
    std::string sweep_g = "2,5,10,20,25", sweep_layout = "triple";
    int total_gates = 500;
    sweep->add_option("--g", sweep_g)->capture_default_str();
    sweep->add_option("--total-gates", total_gates)->capture_default_str();
    sweep->add_option("--qubits", sa.qubits)->capture_default_str();
    sweep->add_option("--layout", sweep_layout)->capture_default_str();
    sweep->add_option("--samples", sa.samples)->capture_default_str();
    sweep->add_option("--jobs", sa.jobs)->capture_default_str();
    sweep->add_option("--out", sa.out, "aggregate CSV (stdout when omitted)");
    sweep->add_option("--json", sa.json, "per-sample records JSON");
    sweep->add_flag("--quiet", sa.quiet, "no per-sample progress");
    sa.search.add(sweep);

    auto* verify = app.add_subcommand("verify", "check the CNOT protocols branch by branch");
    std::string protocol = "all";
    verify->add_option("--protocol", protocol, "all|standard|tele-control|tele-target")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*gen) return run_gen(gen_q, gen_g, gen_d, gen_seed, gen_out);
        if (*compile) return run_compile(ca);
        if (*benchc) return run_bench(ba, layouts_s, depths_s, bench_g);
        if (*sweep) return run_sweep(sa, sweep_g, total_gates, sweep_layout);
        if (*verify) return run_verify(protocol);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}
