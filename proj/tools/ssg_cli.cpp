// ssg: generate, reduce, verify and solve simple stochastic games, and run
// iteration-count benchmarks.
//
// Exit codes: 0 success, 1 validation failure (bad input, malformed or
// non-stopping game, bad plan), 2 solver contract failure (unstable result or
// iteration cap).

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "ssg/bench.hpp"
#include "ssg/game_io.hpp"
#include "ssg/generator.hpp"
#include "ssg/reducer.hpp"
#include "ssg/solvers.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 1;
constexpr int kContract = 2;

struct ValidationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

ssg::Game load_valid(const std::string& path)
{
    ssg::Game g = ssg::read_game(path);
    const auto problems = ssg::validate_structure(g);
    if (!problems.empty()) throw ValidationFailure(path + ": " + problems.front());
    return g;
}

int cmd_generate(int size, int ratio, int count, std::uint64_t seed, const std::string& out)
{
    ssg::BenchPlan plan;
    plan.sizes = {size};
    plan.ratios = {ratio};
    plan.instances_per_cell = count;
    plan.master_seed = seed;
    const auto instances = ssg::generate_instances(plan);
    ssg::write_instances(out, instances);
    for (const auto& inst : instances) fmt::print("{} n={}\n", inst.id, inst.game.size());
    return kOk;
}

int cmd_reduce(const std::string& in, const std::string& out, std::string report_path)
{
    const ssg::Game g = load_valid(in);
    const auto red = ssg::reduce_fully(g);
    ssg::write_game(out, red.game);
    if (report_path.empty()) report_path = out + ".report.json";
    ssg::write_text(report_path, ssg::report_to_json(red.report));
    fmt::print("{} -> {} nodes, {} merges, fully reduced: {}\n", g.size(), red.game.size(), red.report.merges.size(),
               red.checklist.fully_reduced() ? "yes" : "no");
    return kOk;
}

int cmd_verify(const std::string& in)
{
    const ssg::Game g = ssg::read_game(in);
    const auto problems = ssg::validate_structure(g);
    for (const auto& p : problems) fmt::print("structure: {}\n", p);
    if (!problems.empty()) return kInvalid;
    const auto core = ssg::find_bad_core(g);
    if (!core.empty()) {
        fmt::print("not stopping: bad core of {} nodes\n", core.members.size());
        return kInvalid;
    }
    const auto c = ssg::check_assumptions(g);
    static const char* names[] = {"stopping",
                                  "no max/min arcs to terminals",
                                  "no identical arcs or self-arcs",
                                  "no zero in-degree nodes",
                                  "terminal-adjacent average pair",
                                  "no 1- or 0-valued nodes",
                                  "single SCC or two constants"};
    const auto items = c.items();
    for (std::size_t i = 0; i < items.size(); ++i) fmt::print("{:<32} {}\n", names[i], items[i] ? "ok" : "no");
    fmt::print("{:<32} {}\n", "single SCC", c.single_scc ? "ok" : "no");
    fmt::print("valid stopping game, n={}\n", g.size());
    return kOk;
}

int cmd_solve(const std::string& algo, std::uint64_t seed, const std::string& mode, const std::string& in)
{
    const ssg::Game g = load_valid(in);
    if (!ssg::is_stopping(g)) throw ValidationFailure(in + ": game is not stopping");
    ssg::SolveResult r;
    try {
        r = ssg::solve_with(algo, g, seed, mode == "float" ? ssg::Mode::Float : ssg::Mode::Exact);
    } catch (const ssg::PreconditionError&) {
        throw;
    } catch (const std::runtime_error& e) {
        throw ssg::ContractError(e.what());
    }
    if (!ssg::is_stable(g, r.values)) throw ssg::ContractError("solver returned unstable values");
    std::cout << ssg::result_to_json(g, r);
    return kOk;
}

int cmd_bench(const std::string& plan_path, const std::string& out, int threads)
{
    ssg::BenchPlan plan = ssg::parse_plan(ssg::read_text(plan_path));
    if (threads > 0) plan.threads = threads;
    const auto records = ssg::run_benchmark(plan);
    ssg::write_text(out, ssg::records_to_csv(records));
    fmt::print("{} records -> {}\n", records.size(), out);
    return kOk;
}

int cmd_summarize(const std::string& csv, const std::string& out, const std::string& plot, const std::string& table)
{
    const auto rows = ssg::summarize(ssg::records_from_csv(ssg::read_text(csv)));
    const std::string summary = ssg::summary_to_csv(rows);
    if (out.empty()) std::cout << summary;
    else ssg::write_text(out, summary);
    if (!plot.empty()) ssg::write_text(plot, ssg::plot_data_csv(rows));
    if (!table.empty()) std::cout << ssg::iteration_table_csv(rows, table);
    return kOk;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simple stochastic game toolkit"};
    app.require_subcommand(1);

    int size = 128, ratio = 4, count = 1, threads = 0;
    std::uint64_t seed = 0;
    std::string out, in, report, algo = "hk", mode = "exact", plan, plot, table;

    auto* gen = app.add_subcommand("generate", "Generate fully reduced benchmark instances");
    gen->add_option("--size", size, "Target node count")->required()->check(CLI::Range(16, 1 << 20));
    gen->add_option("--ratio", ratio, "Average:max ratio numerator (ratio:4)")->required()->check(CLI::Range(1, 8));
    gen->add_option("--count", count, "Instances to generate")->check(CLI::PositiveNumber);
    gen->add_option("--seed", seed, "Master seed");
    gen->add_option("--out", out, "Output directory")->required();

    auto* red = app.add_subcommand("reduce", "Apply every reduction and write the reduced game");
    red->add_option("IN", in)->required()->check(CLI::ExistingFile);
    red->add_option("OUT", out)->required();
    red->add_option("--report", report, "Reduction report path (default OUT.report.json)");

    auto* ver = app.add_subcommand("verify", "Check structure, stoppingness and the reduction checklist");
    ver->add_option("IN", in)->required()->check(CLI::ExistingFile);

    auto* sol = app.add_subcommand("solve", "Solve one game and print the result as JSON");
    sol->add_option("--algo", algo)->check(CLI::IsMember({"hk", "perm", "bf", "vi"}));
    sol->add_option("--seed", seed);
    sol->add_option("--mode", mode)->check(CLI::IsMember({"exact", "float"}));
    sol->add_option("IN", in)->required()->check(CLI::ExistingFile);

    auto* ben = app.add_subcommand("bench", "Run a benchmark plan");
    ben->add_option("--plan", plan, "Plan JSON")->required()->check(CLI::ExistingFile);
    ben->add_option("--out", out, "Results CSV")->required();
    ben->add_option("--threads", threads, "Worker threads (overrides the plan)");

    auto* sum = app.add_subcommand("summarize", "Group benchmark records by size, ratio and algorithm");
    sum->add_option("CSV", in)->required()->check(CLI::ExistingFile);
    sum->add_option("--out", out, "Summary CSV (default stdout)");
    sum->add_option("--plot", plot, "Plot data CSV (x = ratio, one column per algorithm)");
    sum->add_option("--table", table, "Print the ratio-by-size iteration table for this algorithm");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (*gen) return cmd_generate(size, ratio, count, seed, out);
        if (*red) return cmd_reduce(in, out, report);
        if (*ver) return cmd_verify(in);
        if (*sol) return cmd_solve(algo, seed, mode, in);
        if (*ben) return cmd_bench(plan, out, threads);
        if (*sum) return cmd_summarize(in, out, plot, table);
    } catch (const ssg::ContractError& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kContract;
    } catch (const std::exception& e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kInvalid;
    }
    return kOk;
}
