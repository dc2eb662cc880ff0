#include "ssg/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <filesystem>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include <fmt/format.h>
#include <json.hpp>

#include "ssg/game_io.hpp"
#include "ssg/generator.hpp"
#include "ssg/rng.hpp"
#include "ssg/solvers.hpp"

namespace ssg {

namespace {

const std::set<std::string> kAlgorithms{"hk", "perm", "bf", "vi"};

std::uint64_t hash_string(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<std::string> split(const std::string& line, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

double mean_of(const std::vector<double>& xs)
{
    double s = 0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sd_of(const std::vector<double>& xs, double mean)
{
    if (xs.size() < 2) return 0.0;
    double s = 0;
    for (double x : xs) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

}  // namespace

BenchPlan parse_plan(const std::string& json_text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("plan is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("plan must be a JSON object");
    BenchPlan p;
    try {
        if (j.contains("sizes")) p.sizes = j["sizes"].get<std::vector<int>>();
        if (j.contains("ratios")) p.ratios = j["ratios"].get<std::vector<int>>();
        if (j.contains("instances_per_cell")) p.instances_per_cell = j["instances_per_cell"].get<int>();
        if (j.contains("runs_per_instance")) p.runs_per_instance = j["runs_per_instance"].get<int>();
        if (j.contains("algorithms")) p.algorithms = j["algorithms"].get<std::vector<std::string>>();
        if (j.contains("master_seed")) p.master_seed = j["master_seed"].get<std::uint64_t>();
        if (j.contains("threads")) p.threads = j["threads"].get<int>();
        if (j.contains("instance_dir")) p.instance_dir = j["instance_dir"].get<std::string>();
        if (j.contains("mode")) {
            const auto m = j["mode"].get<std::string>();
            if (m == "exact") p.mode = Mode::Exact;
            else if (m == "float") p.mode = Mode::Float;
            else throw std::invalid_argument("mode must be \"exact\" or \"float\"");
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad plan field: ") + e.what());
    }
    validate(p);
    return p;
}

std::string plan_to_json(const BenchPlan& p)
{
    nlohmann::ordered_json j;
    j["sizes"] = p.sizes;
    j["ratios"] = p.ratios;
    j["instances_per_cell"] = p.instances_per_cell;
    j["runs_per_instance"] = p.runs_per_instance;
    j["algorithms"] = p.algorithms;
    j["master_seed"] = p.master_seed;
    j["mode"] = p.mode == Mode::Exact ? "exact" : "float";
    j["threads"] = p.threads;
    if (!p.instance_dir.empty()) j["instance_dir"] = p.instance_dir;
    return j.dump(2) + "\n";
}

void validate(const BenchPlan& p)
{
    if (p.sizes.empty() || p.ratios.empty() || p.algorithms.empty())
        throw std::invalid_argument("plan needs at least one size, ratio and algorithm");
    if (p.instances_per_cell < 1 || p.runs_per_instance < 1) throw std::invalid_argument("plan counts must be positive");
    if (p.threads < 0) throw std::invalid_argument("threads must be non-negative");
    for (int s : p.sizes) {
        if (s < 16) throw std::invalid_argument(fmt::format("size {} is below 16", s));
    }
    for (int r : p.ratios) {
        if (r < 1 || r > 8) throw std::invalid_argument(fmt::format("ratio {} outside 1..8", r));
    }
    for (const auto& a : p.algorithms) {
        if (!kAlgorithms.count(a)) throw std::invalid_argument("unknown algorithm '" + a + "'");
    }
}

std::string instance_id(int size, int ratio, int index) { return fmt::format("s{}_r{}_i{:03}", size, ratio, index); }

bool parse_instance_id(const std::string& id, int& size, int& ratio, int& index)
{
    char tail = 0;
    return std::sscanf(id.c_str(), "s%d_r%d_i%d%c", &size, &ratio, &index, &tail) == 3;
}

std::uint64_t instance_seed(std::uint64_t master, int size, int ratio, int index)
{
    return derive_seed(master, 1, static_cast<std::uint64_t>(size) << 8 | static_cast<std::uint64_t>(ratio),
                       static_cast<std::uint64_t>(index));
}

std::uint64_t run_seed(std::uint64_t master, const std::string& instance, int run)
{
    return derive_seed(master, 2, hash_string(instance), static_cast<std::uint64_t>(run));
}

std::vector<BenchInstance> generate_instances(const BenchPlan& plan)
{
    validate(plan);
    std::vector<BenchInstance> out;
    for (int size : plan.sizes) {
        for (int ratio : plan.ratios) {
            for (int i = 0; i < plan.instances_per_cell; ++i) {
                BenchInstance inst;
                inst.id = instance_id(size, ratio, i);
                inst.size = size;
                inst.ratio = ratio;
                inst.index = i;
                inst.seed = instance_seed(plan.master_seed, size, ratio, i);
                const RatioSpec spec{size, ratio};
                GeneratedInstance gen = generate_fully_reduced(spec, inst.seed);
                inst.metadata = metadata_json(gen, spec);
                inst.game = std::move(gen.game);
                out.push_back(std::move(inst));
            }
        }
    }
    return out;
}

void write_instances(const std::string& dir, const std::vector<BenchInstance>& instances)
{
    std::filesystem::create_directories(dir);
    for (const auto& inst : instances) {
        const std::filesystem::path base(dir);
        write_game(base / (inst.id + ".json"), inst.game);
        write_text(base / (inst.id + ".meta.json"), inst.metadata);
    }
}

std::vector<BenchInstance> load_instances(const BenchPlan& plan)
{
    std::vector<BenchInstance> out;
    const std::filesystem::path base(plan.instance_dir);
    for (int size : plan.sizes) {
        for (int ratio : plan.ratios) {
            for (int i = 0; i < plan.instances_per_cell; ++i) {
                BenchInstance inst;
                inst.id = instance_id(size, ratio, i);
                inst.size = size;
                inst.ratio = ratio;
                inst.index = i;
                const auto path = base / (inst.id + ".json");
                if (!std::filesystem::exists(path)) throw std::runtime_error("missing instance file " + path.string());
                inst.game = read_game(path);
                out.push_back(std::move(inst));
            }
        }
    }
    return out;
}

std::vector<BenchRecord> run_benchmark(const BenchPlan& plan, const std::vector<BenchInstance>& instances)
{
    validate(plan);
    struct Job {
      std::size_t instance;
      std::string algorithm;
      std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        const Game& g = instances[i].game;
        const auto problems = validate_structure(g);
        if (!problems.empty())
            throw std::invalid_argument(fmt::format("instance {}: {}", instances[i].id, problems.front()));
        for (const auto& algo : plan.algorithms) {
            if (algo == "bf" && g.count(NodeKind::Max) + g.count(NodeKind::Min) > kBruteForceCap)
                throw std::invalid_argument(
                    fmt::format("instance {} has too many max/min nodes for bf (cap {})", instances[i].id, kBruteForceCap));
            for (int run = 0; run < plan.runs_per_instance; ++run)
                jobs.push_back({i, algo, run_seed(plan.master_seed, instances[i].id, run)});
        }
    }

    std::vector<BenchRecord> records(jobs.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= jobs.size()) return;
            {
                std::lock_guard lock(failure_mutex);
                if (failure) return;
            }
            const Job& job = jobs[k];
            const BenchInstance& inst = instances[job.instance];
            try {
                const auto t0 = std::chrono::steady_clock::now();
                SolveResult r;
                try {
                    r = solve_with(job.algorithm, inst.game, job.seed, plan.mode);
                } catch (const std::runtime_error& e) {
                    throw ContractError(fmt::format("{} on {} seed {}: {}", job.algorithm, inst.id, job.seed, e.what()));
                }
                const auto t1 = std::chrono::steady_clock::now();
                BenchRecord& rec = records[k];
                rec.instance_id = inst.id;
                rec.algorithm = job.algorithm;
                rec.seed = job.seed;
                rec.iterations = r.iterations;
                rec.wall_time_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
                rec.stable_check = is_stable(inst.game, r.values, kStabilityTolerance);
                if (!rec.stable_check)
                    throw ContractError(fmt::format("{} on {} seed {}: values are not stable", job.algorithm, inst.id,
                                                    job.seed));
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                return;
            }
        }
    };

    unsigned threads = plan.threads > 0 ? static_cast<unsigned>(plan.threads) : std::thread::hardware_concurrency();
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(jobs.size(), 1))));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    std::sort(records.begin(), records.end(), [](const BenchRecord& a, const BenchRecord& b) {
        return std::tie(a.instance_id, a.algorithm, a.seed) < std::tie(b.instance_id, b.algorithm, b.seed);
    });
    return records;
}

std::vector<BenchRecord> run_benchmark(const BenchPlan& plan)
{
    return run_benchmark(plan, plan.instance_dir.empty() ? generate_instances(plan) : load_instances(plan));
}

std::string records_to_csv(const std::vector<BenchRecord>& records, bool with_time)
{
    std::string out = with_time ? "instance_id,algorithm,seed,iterations,wall_time_ms,stable_check\n"
                                : "instance_id,algorithm,seed,iterations,stable_check\n";
    for (const auto& r : records) {
        if (with_time) {
            out += fmt::format("{},{},{},{},{:.3f},{}\n", r.instance_id, r.algorithm, r.seed, r.iterations, r.wall_time_ms,
                               r.stable_check ? "true" : "false");
        } else {
            out += fmt::format("{},{},{},{},{}\n", r.instance_id, r.algorithm, r.seed, r.iterations,
                               r.stable_check ? "true" : "false");
        }
    }
    return out;
}

std::vector<BenchRecord> records_from_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("empty CSV");
    const auto header = split(line, ',');
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* need : {"instance_id", "algorithm", "seed", "iterations", "stable_check"}) {
        if (!col.count(need)) throw std::invalid_argument(std::string("CSV lacks column ") + need);
    }
    std::vector<BenchRecord> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto f = split(line, ',');
        if (f.size() != header.size()) throw std::invalid_argument(fmt::format("CSV line {}: wrong field count", lineno));
        BenchRecord r;
        try {
            r.instance_id = f[col["instance_id"]];
            r.algorithm = f[col["algorithm"]];
            r.seed = std::stoull(f[col["seed"]]);
            r.iterations = std::stoi(f[col["iterations"]]);
            if (col.count("wall_time_ms")) r.wall_time_ms = std::stod(f[col["wall_time_ms"]]);
            r.stable_check = f[col["stable_check"]] == "true";
        } catch (const std::logic_error&) {
            throw std::invalid_argument(fmt::format("CSV line {}: malformed number", lineno));
        }
        out.push_back(std::move(r));
    }
    return out;
}

std::vector<SummaryRow> summarize(const std::vector<BenchRecord>& records)
{
    if (records.empty()) throw std::invalid_argument("summarize: no records");
    std::map<std::tuple<int, int, std::string>, std::pair<std::vector<double>, std::vector<double>>> groups;
    for (const auto& r : records) {
        int size = 0, ratio = 0, index = 0;
        if (!parse_instance_id(r.instance_id, size, ratio, index)) size = ratio = 0;
        auto& [iters, ms] = groups[{size, ratio, r.algorithm}];
        iters.push_back(r.iterations);
        ms.push_back(r.wall_time_ms);
    }
    std::vector<SummaryRow> out;
    for (const auto& [key, data] : groups) {
        SummaryRow row;
        std::tie(row.size, row.ratio, row.algorithm) = key;
        row.count = static_cast<int>(data.first.size());
        row.mean_iterations = mean_of(data.first);
        row.sd_iterations = sd_of(data.first, row.mean_iterations);
        row.mean_ms = mean_of(data.second);
        row.sd_ms = sd_of(data.second, row.mean_ms);
        out.push_back(std::move(row));
    }
    return out;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows)
{
    std::string out = "size,ratio,algorithm,count,mean_iterations,sd_iterations,mean_wall_time_ms,sd_wall_time_ms\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{}:4,{},{},{:.4f},{:.4f},{:.4f},{:.4f}\n", r.size, r.ratio, r.algorithm, r.count,
                           r.mean_iterations, r.sd_iterations, r.mean_ms, r.sd_ms);
    }
    return out;
}

std::string plot_data_csv(const std::vector<SummaryRow>& rows)
{
    std::set<std::string> algos;
    std::map<std::pair<int, int>, std::map<std::string, double>> cells;
    for (const auto& r : rows) {
        algos.insert(r.algorithm);
        cells[{r.size, r.ratio}][r.algorithm] = r.mean_iterations;
    }
    std::string out = "size,ratio";
    for (const auto& a : algos) out += "," + a;
    out += "\n";
    for (const auto& [key, by_algo] : cells) {
        out += fmt::format("{},{}", key.first, key.second);
        for (const auto& a : algos) {
            auto it = by_algo.find(a);
            out += it == by_algo.end() ? std::string(",") : fmt::format(",{:.4f}", it->second);
        }
        out += "\n";
    }
    return out;
}

std::string iteration_table_csv(const std::vector<SummaryRow>& rows, const std::string& algorithm)
{
    std::set<int> sizes, ratios;
    std::map<std::pair<int, int>, double> cell;
    for (const auto& r : rows) {
        if (r.algorithm != algorithm) continue;
        sizes.insert(r.size);
        ratios.insert(r.ratio);
        cell[{r.ratio, r.size}] = r.mean_iterations;
    }
    std::string out = "ratio";
    for (int s : sizes) out += fmt::format(",{}", s);
    out += "\n";
    for (int q : ratios) {
        out += fmt::format("{}:4", q);
        for (int s : sizes) {
            auto it = cell.find({q, s});
            out += it == cell.end() ? std::string(",") : fmt::format(",{:.2f}", it->second);
        }
        out += "\n";
    }
    return out;
}

}  // namespace ssg
