#include "matfactor/benchmark.hpp"
#include "matfactor/error.hpp"

#include <doctest.h>

#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace matfactor;

namespace {

std::vector<BenchmarkScenario> tiny_grid() {
  SimScenario s;
  s.T = 200;
  SimScenario t = s;
  t.p1 = 6;
  t.p2 = 5;
  t.r1 = 1;
  t.r2 = 2;
  t.k1 = 0;
  t.k2 = 1;
  return {{"a", s}, {"b", t}};
}

}  // namespace

TEST_SUITE("benchmark") {
  TEST_CASE("replication seeds are distinct and deterministic") {
    std::set<std::uint64_t> seen;
    for (int s = 0; s < 5; ++s)
      for (int r = 0; r < 200; ++r) seen.insert(replication_seed(1234, s, r));
    CHECK(seen.size() == 1000);
    CHECK(replication_seed(1, 2, 3) == replication_seed(1, 2, 3));
    CHECK(replication_seed(1, 2, 3) != replication_seed(2, 2, 3));
  }

  TEST_CASE("zero replications produce only the header") {
    BenchmarkOptions o;
    o.n_replications = 0;
    const auto results = run_benchmark(tiny_grid(), o);
    CHECK(results.empty());
    std::ostringstream out;
    write_benchmark_csv(out, summarize(tiny_grid(), results, o));
    CHECK(out.str() == "scenario,T,metric,mean,sd\n");
  }

  TEST_CASE("metric rows and order") {
    BenchmarkOptions o;
    o.n_replications = 2;
    o.threads = 1;
    const auto grid = tiny_grid();
    const auto results = run_benchmark(grid, o);
    REQUIRE(results.size() == 4);
    for (std::size_t i = 0; i < results.size(); ++i) {
      CHECK(results[i].scenario == static_cast<int>(i / 2));
      CHECK(results[i].replication == static_cast<int>(i % 2));
      CHECK(results[i].ok);
    }
    const auto rows = summarize(grid, results, o);
    const std::vector<std::string> expected = {
        "hit_rate",   "hit_rate_initial", "hit_rate_wlc", "MD_A",    "MD_P",  "MD_A_first",
        "MD_P_first", "MD_A_s0",          "MD_P_s0",      "DX",      "DX_s0", "failures"};
    REQUIRE(rows.size() == 2 * expected.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].metric == expected[i % expected.size()]);
      CHECK(rows[i].scenario == (i < expected.size() ? "a" : "b"));
      CHECK(rows[i].T == 200);
    }
    for (const auto& r : rows) {
      if (r.metric.rfind("hit_rate", 0) == 0) {
        CHECK(r.mean >= 0.0);
        CHECK(r.mean <= 1.0);
      }
      if (r.metric.rfind("MD_", 0) == 0) {
        CHECK(r.mean >= 0.0);
        CHECK(r.mean <= 1.0);
      }
    }

    BenchmarkOptions lean = o;
    lean.with_baseline = false;
    lean.with_factor_distance = false;
    const auto lean_rows = summarize(grid, run_benchmark(grid, lean), lean);
    CHECK(lean_rows.size() == 2 * 8);
  }

  TEST_CASE("results do not depend on the thread count") {
    BenchmarkOptions one;
    one.n_replications = 3;
    one.threads = 1;
    one.with_factor_distance = false;
    BenchmarkOptions three = one;
    three.threads = 3;
    const auto grid = tiny_grid();
    std::ostringstream a, b;
    write_benchmark_csv(a, summarize(grid, run_benchmark(grid, one), one));
    write_benchmark_csv(b, summarize(grid, run_benchmark(grid, three), three));
    CHECK(a.str() == b.str());
  }

  TEST_CASE("accuracy metrics at true or estimated orders") {
    BenchmarkOptions truth;
    truth.n_replications = 3;
    truth.threads = 1;
    truth.with_baseline = false;
    BenchmarkOptions estimated = truth;
    estimated.accuracy_at_true_orders = false;
    const auto grid = tiny_grid();
    const auto a = run_benchmark(grid, truth);
    const auto b = run_benchmark(grid, estimated);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      // Order estimates come from the data-driven fit in both modes.
      CHECK(a[i].r1_hat == b[i].r1_hat);
      CHECK(a[i].r2_hat == b[i].r2_hat);
      CHECK(a[i].r1_initial == b[i].r1_initial);
      CHECK(a[i].k1_hat == b[i].k1_hat);
      CHECK(a[i].md_A >= 0.0);
      CHECK(a[i].md_A <= 1.0);
    }
  }

  TEST_CASE("fixed loadings share the truth across replications") {
    BenchmarkOptions fixed;
    fixed.n_replications = 2;
    fixed.threads = 1;
    fixed.with_baseline = false;
    BenchmarkOptions redraw = fixed;
    redraw.fixed_loadings = false;
    const auto grid = tiny_grid();
    const auto a = run_benchmark(grid, fixed);
    const auto b = run_benchmark(grid, redraw);
    REQUIRE(a.size() == b.size());
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) differs = differs || a[i].md_A != b[i].md_A;
    CHECK(differs);
  }
}
