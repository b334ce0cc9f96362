#include "teleroute/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "teleroute/circuit.hpp"
#include "teleroute/router.hpp"
#include "teleroute/seed.hpp"

namespace teleroute::bench {

std::optional<double> RunRecord::r_tilde() const {
    if (d_st <= d_l) return std::nullopt;
    return double(d_opt - d_l) / double(d_st - d_l);
}

SampleSeeds sample_seeds(std::uint64_t s) {
    return {splitmix64(s ^ 0x6d6170ULL), splitmix64(s ^ 0x636972ULL), splitmix64(s ^ 0x616e6eULL)};
}

RunRecord run_sample(LayoutName layout, int q, int g, int d_l, std::uint64_t seed, const AnnealConfig& cfg,
                     bool check) {
    using clock = std::chrono::steady_clock;
    RunRecord rec{layout, q, g, d_l, seed};
    const SampleSeeds seeds = sample_seeds(seed);
    const Layout lay = build_layout(layout, q, seeds.mapping);
    const LayeredCircuit circ = random_circuit(q, g, d_l, seeds.circuit);

    auto t0 = clock::now();
    const Schedule st = route_static(lay.graph, lay.mapping, circ);
    auto t1 = clock::now();
    AnnealConfig run_cfg = cfg;
    run_cfg.seed = seeds.anneal;
    const Schedule opt = compile_optimized(lay.graph, lay.mapping, circ, run_cfg);
    auto t2 = clock::now();

    if (check) {
        for (const Schedule* s : {&st, &opt}) {
            const auto problems = check_schedule(lay.graph, lay.mapping, circ, *s);
            if (!problems.empty())
                throw BenchError(std::string(s == &st ? "static" : "optimized") + " schedule invalid: " + problems.front());
        }
    }
    rec.d_st = int(st.depth());
    rec.d_opt = int(opt.depth());
    rec.seconds_st = std::chrono::duration<double>(t1 - t0).count();
    rec.seconds_opt = std::chrono::duration<double>(t2 - t1).count();
    return rec;
}

std::pair<double, double> mean_std(const std::vector<double>& xs) {
    if (xs.empty()) return {0.0, 0.0};
    double sum = 0;
    for (double x : xs) sum += x;
    const double mean = sum / double(xs.size());
    if (xs.size() < 2) return {mean, 0.0};
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return {mean, std::sqrt(ss / double(xs.size() - 1))};
}

AggregateRow aggregate(const std::vector<RunRecord>& records) {
    if (records.empty()) throw std::invalid_argument("cannot aggregate zero records");
    AggregateRow row;
    const RunRecord& first = records.front();
    row.layout = first.layout;
    row.q = first.q;
    row.g = first.g;
    row.d_l = first.d_l;
    row.samples = int(records.size());
    std::vector<double> dst, dopt, rt, delta, rel;
    for (const auto& r : records) {
        dst.push_back(r.d_st);
        dopt.push_back(r.d_opt);
        delta.push_back(r.delta());
        rel.push_back(r.d_st > 0 ? double(r.delta()) / double(r.d_st) : 0.0);
        if (auto x = r.r_tilde()) rt.push_back(*x);
        if (r.d_opt > r.d_st) ++row.opt_worse;
    }
    std::tie(row.dst_mean, row.dst_std) = mean_std(dst);
    std::tie(row.dopt_mean, row.dopt_std) = mean_std(dopt);
    std::tie(row.delta_mean, row.delta_std) = mean_std(delta);
    row.delta_over_dst_mean = mean_std(rel).first;
    if (!rt.empty()) {
        auto [m, s] = mean_std(rt);
        row.rtilde_mean = m;
        row.rtilde_std = s;
    }
    return row;
}

namespace {

struct Task {
    LayoutName layout;
    int g;
    int d_l;
    int sample;
};

std::vector<RunRecord> run_tasks(const std::vector<Task>& tasks, int q, const AnnealConfig& cfg,
                                 const GridOptions& opt) {
    std::vector<RunRecord> out(tasks.size());
    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::exception_ptr error;
    std::string error_where;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            {
                std::lock_guard lock(mu);
                if (error) return;
            }
            const Task& t = tasks[i];
            try {
                out[i] = run_sample(t.layout, q, t.g, t.d_l, opt.seed + std::uint64_t(t.sample), cfg,
                                    opt.check_schedules);
                if (opt.log_progress) {
                    std::lock_guard lock(mu);
                    std::cerr << layout_name_str(t.layout) << " g=" << t.g << " dL=" << t.d_l << " sample " << t.sample
                              << ": d_st=" << out[i].d_st << " d_opt=" << out[i].d_opt << " (" << std::fixed
                              << std::setprecision(2) << out[i].seconds_st + out[i].seconds_opt << "s)\n";
                    std::cerr.unsetf(std::ios::floatfield);
                }
            } catch (...) {
                std::lock_guard lock(mu);
                if (!error) {
                    error = std::current_exception();
                    std::ostringstream where;
                    where << "layout=" << layout_name_str(t.layout) << " g=" << t.g << " dL=" << t.d_l
                          << " sample=" << t.sample;
                    error_where = where.str();
                }
                return;
            }
        }
    };

    const int jobs = std::max(1, std::min<int>(opt.jobs, int(tasks.size())));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) {
        try {
            std::rethrow_exception(error);
        } catch (const std::exception& e) {
            throw BenchError(error_where + ": " + e.what());
        }
    }
    return out;
}

}  // namespace

GridResult run_grid(const std::vector<LayoutName>& layouts, const std::vector<int>& depths, int q, int g,
                    const AnnealConfig& cfg, const GridOptions& opt) {
    if (opt.samples < 1) throw std::invalid_argument("samples must be at least 1");
    cfg.validate();
    std::vector<Task> tasks;
    for (LayoutName l : layouts)
        for (int d : depths)
            for (int i = 0; i < opt.samples; ++i) tasks.push_back({l, g, d, i});
    GridResult res;
    res.records = run_tasks(tasks, q, cfg, opt);
    for (std::size_t start = 0; start < res.records.size(); start += std::size_t(opt.samples)) {
        std::vector<RunRecord> cell(res.records.begin() + std::ptrdiff_t(start),
                                    res.records.begin() + std::ptrdiff_t(start + std::size_t(opt.samples)));
        res.rows.push_back(aggregate(cell));
    }
    return res;
}

SweepResult run_density_sweep(const std::vector<int>& g_values, int total_gates, int q, LayoutName layout,
                              const AnnealConfig& cfg, const GridOptions& opt) {
    if (opt.samples < 1) throw std::invalid_argument("samples must be at least 1");
    if (total_gates < 1) throw std::invalid_argument("total gate count must be positive");
    cfg.validate();
    std::vector<Task> tasks;
    for (int g : g_values) {
        if (g < 1) throw std::invalid_argument("g must be positive");
        if (2 * g > q)
            throw std::invalid_argument("g=" + std::to_string(g) + " needs " + std::to_string(2 * g) +
                                        " qubits but q=" + std::to_string(q));
        const int d_l = (total_gates + g - 1) / g;
        for (int i = 0; i < opt.samples; ++i) tasks.push_back({layout, g, d_l, i});
    }
    SweepResult res;
    res.records = run_tasks(tasks, q, cfg, opt);
    for (std::size_t k = 0; k < g_values.size(); ++k) {
        const auto start = std::ptrdiff_t(k * std::size_t(opt.samples));
        std::vector<RunRecord> cell(res.records.begin() + start, res.records.begin() + start + opt.samples);
        SweepRow row{aggregate(cell), 0};
        row.total_gates = row.row.g * row.row.d_l;
        res.rows.push_back(row);
    }
    return res;
}

LineFit linear_fit(const std::vector<std::pair<double, double>>& points) {
    std::set<double> xs;
    for (const auto& p : points) xs.insert(p.first);
    if (xs.size() < 2) throw std::invalid_argument("linear fit needs at least two distinct abscissae");
    const double n = double(points.size());
    double sx = 0, sy = 0;
    for (const auto& [x, y] : points) {
        sx += x;
        sy += y;
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (const auto& [x, y] : points) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    LineFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    return f;
}

void write_csv(std::ostream& os, const std::vector<AggregateRow>& rows) {
    os << kCsvHeader << '\n';
    auto num = [&](double v) {
        std::ostringstream s;
        s << std::setprecision(6) << v;
        return s.str();
    };
    for (const auto& r : rows) {
        os << layout_name_str(r.layout) << ',' << r.q << ',' << r.g << ',' << r.d_l << ',' << r.samples << ','
           << num(r.dst_mean) << ',' << num(r.dst_std) << ',' << num(r.dopt_mean) << ',' << num(r.dopt_std) << ','
           << (r.rtilde_mean ? num(*r.rtilde_mean) : "NA") << ',' << (r.rtilde_std ? num(*r.rtilde_std) : "NA")
           << ',' << num(r.delta_mean) << ',' << num(r.delta_std) << ',' << num(r.delta_over_dst_mean) << '\n';
    }
}

nlohmann::ordered_json records_to_json(const std::vector<RunRecord>& records) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : records) {
        nlohmann::ordered_json j;
        j["layout"] = layout_name_str(r.layout);
        j["q"] = r.q;
        j["g"] = r.g;
        j["dL"] = r.d_l;
        j["seed"] = r.seed;
        j["d_st"] = r.d_st;
        j["d_opt"] = r.d_opt;
        j["seconds_st"] = r.seconds_st;
        j["seconds_opt"] = r.seconds_opt;
        arr.push_back(std::move(j));
    }
    return arr;
}

}  // namespace teleroute::bench
