#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "zgt2/experiment.hpp"
#include "zgt2/synthetic.hpp"

using namespace zgt2;

namespace {

RunConfig small_config() {
  RunConfig c;
  c.model.rules = 3;
  c.train.epochs = 3;
  c.train.batch_size = 32;
  c.train.learning_rate = 1e-2;
  return c;
}

std::string csv_of(const ExperimentReport& r) {
  std::ostringstream out;
  write_report_csv(r, out);
  return out.str();
}

SeedRecord record(std::uint64_t seed, double rmse, double picp, double pinaw) {
  SeedRecord r;
  r.seed = seed;
  r.metrics = {rmse, picp, pinaw};
  return r;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("a single seed is its own aggregate") {
  const auto rep = aggregate("d", small_config(), 1, {record(1, 0.8, 0.97, 0.4)});
  REQUIRE(rep.rmse);
  CHECK(rep.rmse->mean == 0.8);
  CHECK(rep.rmse->median == 0.8);
  CHECK(rep.picp->mean == 0.97);
  CHECK(rep.pinaw->max == 0.4);
}

TEST_CASE("aggregates do not depend on record order") {
  std::vector<SeedRecord> recs{record(1, 0.8, 0.9, 0.4), record(2, 0.7, 1.0, 0.5),
                               record(3, 0.9, 0.95, 0.3)};
  const auto a = aggregate("d", small_config(), 1, recs);
  std::reverse(recs.begin(), recs.end());
  const auto b = aggregate("d", small_config(), 1, recs);
  CHECK(csv_of(a) == csv_of(b));
  CHECK(report_summary_json(a) == report_summary_json(b));
}

TEST_CASE("stored aggregates match a recomputation from the records") {
  const std::vector<SeedRecord> recs{record(1, 0.8, 0.9, 0.4), record(2, 0.7, 1.0, 0.5),
                                     record(3, 0.9, 0.95, 0.3), record(4, 0.75, 0.9, 0.45)};
  const auto rep = aggregate("d", small_config(), 1, recs);
  double mean = 0.0;
  for (const auto& r : rep.records) mean += r.metrics.rmse;
  mean /= 4.0;
  CHECK(std::abs(rep.rmse->mean - mean) < 1e-12);
  const auto j = report_summary_json(rep);
  CHECK(std::abs(j["metrics"]["rmse"]["mean"].get<double>() - mean) < 1e-12);
  CHECK(std::abs(j["metrics_x100"]["rmse"]["mean"].get<double>() - 100 * mean) < 1e-10);
}

TEST_CASE("failed seeds are flagged and excluded") {
  auto bad = record(2, 0, 0, 0);
  bad.failed = true;
  bad.failure = "diverged";
  const auto rep = aggregate("d", small_config(), 1, {record(1, 0.8, 0.9, 0.4), bad});
  CHECK(rep.failed_seeds == std::vector<std::uint64_t>{2});
  CHECK(rep.rmse->mean == 0.8);
  CHECK(csv_of(rep).find("2,failed,") != std::string::npos);

  const auto all_bad = aggregate("d", small_config(), 1, {bad});
  CHECK_FALSE(all_bad.rmse);
}

TEST_CASE("report naming") {
  const auto rep = aggregate("winequality-white", small_config(), 11, {record(1, 1, 1, 1)});
  CHECK(report_basename(rep) == "winequality-white_Z-GT2_1seeds");
}

TEST_CASE("campaign results are independent of worker count") {
  const auto table = make_heteroscedastic_sine(120, 4);
  CampaignOptions one, four;
  four.workers = 4;
  const auto a = run_campaign(table, "sine", small_config(), 5, one);
  const auto b = run_campaign(table, "sine", small_config(), 5, four);
  CHECK(csv_of(a) == csv_of(b));
  CHECK(report_summary_json(a).dump() == report_summary_json(b).dump());
  CHECK(a.records.size() == 5);
}

TEST_CASE("resumed campaign equals an uninterrupted one") {
  const auto table = make_heteroscedastic_sine(120, 5);
  const auto dir = std::filesystem::temp_directory_path() / "zgt2_resume_unit";
  std::filesystem::remove_all(dir);
  CampaignOptions opts;
  opts.checkpoint_dir = dir;
  const auto full = run_campaign(table, "sine", small_config(), 3, opts);
  // Simulate an interruption after seed 1 by deleting the later checkpoints.
  std::filesystem::remove(dir / "seed_2.json");
  std::filesystem::remove(dir / "seed_3.json");
  int resumed = 0;
  opts.on_seed = [&](const SeedRecord&, bool r) { resumed += r; };
  const auto again = run_campaign(table, "sine", small_config(), 3, opts);
  CHECK(resumed == 1);
  CHECK(csv_of(full) == csv_of(again));

  // A different configuration must not reuse the checkpoints.
  auto changed = small_config();
  changed.train.epochs = 2;
  resumed = 0;
  run_campaign(table, "sine", changed, 3, opts);
  CHECK(resumed == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("campaign needs a seed") {
  const auto table = make_heteroscedastic_sine(50, 1);
  CHECK_THROWS_AS(run_campaign(table, "sine", small_config(), 0), ConfigError);
}

}  // TEST_SUITE
