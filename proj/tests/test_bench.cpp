#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ssg/bench.hpp"
#include "ssg/game_io.hpp"

using namespace ssg;

namespace {

BenchPlan small_plan()
{
    BenchPlan p;
    p.sizes = {32};
    p.ratios = {4};
    p.instances_per_cell = 2;
    p.runs_per_instance = 3;
    p.algorithms = {"hk"};
    p.master_seed = 5;
    p.threads = 2;
    return p;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_SUITE("bench")
{
TEST_CASE("instance ids and seeds")
{
    CHECK(instance_id(128, 3, 7) == "s128_r3_i007");
    int s = 0, r = 0, i = 0;
    CHECK(parse_instance_id("s4096_r8_i099", s, r, i));
    CHECK(s == 4096);
    CHECK(r == 8);
    CHECK(i == 99);
    CHECK(!parse_instance_id("s32_r1", s, r, i));
    CHECK(!parse_instance_id("s32_r1_i001x", s, r, i));
    CHECK(instance_seed(1, 32, 1, 0) != instance_seed(1, 32, 1, 1));
    CHECK(instance_seed(1, 32, 1, 0) != instance_seed(2, 32, 1, 0));
    CHECK(run_seed(1, "s32_r1_i000", 0) != run_seed(1, "s32_r1_i001", 0));
    CHECK(run_seed(1, "s32_r1_i000", 3) == run_seed(1, "s32_r1_i000", 3));
}

TEST_CASE("plan parsing and validation")
{
    const BenchPlan d = parse_plan("{}");
    CHECK(d.sizes.size() == 8);
    CHECK(d.sizes.front() == 32);
    CHECK(d.sizes.back() == 4096);
    CHECK(d.instances_per_cell == 100);
    CHECK(d.runs_per_instance == 100);

    const BenchPlan p = parse_plan(R"({"sizes":[32],"ratios":[4],"instances_per_cell":2,"runs_per_instance":3,
                                      "algorithms":["hk","perm"],"master_seed":9,"mode":"float"})");
    CHECK(p.mode == Mode::Float);
    CHECK(p.master_seed == 9);
    const BenchPlan back = parse_plan(plan_to_json(p));
    CHECK(back.algorithms == p.algorithms);
    CHECK(back.mode == p.mode);

    CHECK_THROWS_AS(parse_plan("[1,2]"), std::invalid_argument);
    CHECK_THROWS_AS(parse_plan("{"), std::invalid_argument);
    CHECK_THROWS_AS(parse_plan(R"({"ratios":[9]})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_plan(R"({"algorithms":["simplex"]})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_plan(R"({"runs_per_instance":0})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_plan(R"({"mode":"fast"})"), std::invalid_argument);
    CHECK_THROWS_AS(parse_plan(R"({"sizes":"big"})"), std::invalid_argument);
}

TEST_CASE("small plan yields one stable record per job, reproducibly")
{
    const BenchPlan plan = small_plan();
    const auto records = run_benchmark(plan);
    REQUIRE(records.size() == 6);
    for (const auto& r : records) {
        CHECK(r.stable_check);
        CHECK(r.iterations >= 1);
        CHECK(r.algorithm == "hk");
    }
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& a = records[i - 1];
        const auto& b = records[i];
        CHECK(std::tie(a.instance_id, a.algorithm, a.seed) < std::tie(b.instance_id, b.algorithm, b.seed));
    }
    BenchPlan single = plan;
    single.threads = 1;
    CHECK(records_to_csv(run_benchmark(single), false) == records_to_csv(records, false));
}

TEST_CASE("every algorithm uses the same run seeds")
{
    BenchPlan plan = small_plan();
    plan.algorithms = {"hk", "perm"};
    plan.instances_per_cell = 1;
    const auto records = run_benchmark(plan);
    REQUIRE(records.size() == 6);
    std::vector<std::uint64_t> hk, perm;
    for (const auto& r : records) (r.algorithm == "hk" ? hk : perm).push_back(r.seed);
    CHECK(hk == perm);
}

TEST_CASE("brute force is refused on instances over its cap")
{
    BenchPlan plan = small_plan();
    plan.algorithms = {"bf"};
    CHECK_THROWS_AS(run_benchmark(plan), std::invalid_argument);
}

TEST_CASE("instances written to disk load back identically")
{
    const auto dir = std::filesystem::temp_directory_path() / "ssg_bench_test";
    std::filesystem::remove_all(dir);
    BenchPlan plan = small_plan();
    const auto instances = generate_instances(plan);
    write_instances(dir.string(), instances);
    for (const auto& inst : instances) {
        CHECK(slurp(dir / (inst.id + ".json")) == serialize_game(inst.game));
        const auto meta = nlohmann::json::parse(slurp(dir / (inst.id + ".meta.json")));
        CHECK(meta["seed"] == inst.seed);
    }
    plan.instance_dir = dir.string();
    const auto loaded = load_instances(plan);
    REQUIRE(loaded.size() == instances.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) CHECK(loaded[i].game == instances[i].game);
    CHECK(records_to_csv(run_benchmark(plan), false) == records_to_csv(run_benchmark(small_plan()), false));

    plan.instances_per_cell = 3;
    CHECK_THROWS_AS(load_instances(plan), std::runtime_error);
    std::filesystem::remove_all(dir);
}

TEST_CASE("csv round trip")
{
    std::vector<BenchRecord> recs{{"s32_r1_i000", "hk", 11, 4, 1.25, true}, {"s32_r1_i000", "perm", 11, 2, 0.5, true}};
    const std::string csv = records_to_csv(recs);
    CHECK(csv.rfind("instance_id,algorithm,seed,iterations,wall_time_ms,stable_check\n", 0) == 0);
    CHECK(csv.find("s32_r1_i000,hk,11,4,1.250,true\n") != std::string::npos);
    const auto back = records_from_csv(csv);
    REQUIRE(back.size() == 2);
    CHECK(back[1].algorithm == "perm");
    CHECK(back[0].wall_time_ms == doctest::Approx(1.25));
    CHECK(records_to_csv(back) == csv);
    CHECK_THROWS_AS(records_from_csv(""), std::invalid_argument);
    CHECK_THROWS_AS(records_from_csv("instance_id,algorithm\nx,y\n"), std::invalid_argument);
    CHECK_THROWS_AS(records_from_csv(csv + "s32_r1_i000,hk,zz,4,1.0,true\n"), std::invalid_argument);
}

TEST_CASE("summaries")
{
    const std::vector<BenchRecord> one{{"s32_r2_i000", "hk", 1, 5, 2.0, true}};
    const auto rows = summarize(one);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].mean_iterations == 5);
    CHECK(rows[0].sd_iterations == 0);
    CHECK(rows[0].mean_ms == 2.0);
    CHECK(rows[0].size == 32);
    CHECK(rows[0].ratio == 2);
    CHECK_THROWS_AS(summarize({}), std::invalid_argument);

    std::vector<BenchRecord> many;
    for (int size : {32, 64}) {
        for (int ratio : {1, 8}) {
            for (int k = 0; k < 4; ++k) {
                const std::string id = instance_id(size, ratio, k);
                many.push_back({id, "hk", 0, 4 + k, 1.0, true});
                many.push_back({id, "perm", 0, 2, 1.0, true});
            }
        }
    }
    const auto s = summarize(many);
    CHECK(s.size() == 8);
    for (const auto& r : s) {
        CHECK(r.count == 4);
        if (r.algorithm == "hk") {
            CHECK(r.mean_iterations == doctest::Approx(5.5));
            CHECK(r.sd_iterations == doctest::Approx(1.2909944));
        }
    }
    CHECK(summary_to_csv(s).find("32,1:4,hk,4,5.5000,1.2910,") != std::string::npos);

    const std::string plot = plot_data_csv(s);
    CHECK(plot.rfind("size,ratio,hk,perm\n32,1,5.5000,2.0000\n", 0) == 0);

    const std::string table = iteration_table_csv(s, "hk");
    CHECK(table == "ratio,32,64\n1:4,5.50,5.50\n8:4,5.50,5.50\n");
}
}
