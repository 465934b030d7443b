#include "zgt2/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "zgt2/error.hpp"
#include "zgt2/hash.hpp"
#include "zgt2/rng.hpp"
#include "zgt2/training.hpp"

namespace zgt2 {

namespace {

std::uint64_t table_fingerprint(const Table& t) {
  std::uint64_t h = fnv1a64(t.target_name);
  for (const auto& n : t.feature_names) h = fnv1a64(n, h);
  const auto bytes = [](std::span<const double> v) {
    return std::string_view(reinterpret_cast<const char*>(v.data()), v.size() * sizeof(double));
  };
  h = fnv1a64(bytes(t.features.data()), h);
  return fnv1a64(bytes(t.targets), h);
}

std::filesystem::path checkpoint_path(const std::filesystem::path& dir, std::uint64_t seed) {
  return dir / ("seed_" + std::to_string(seed) + ".json");
}

nlohmann::json record_json(const SeedRecord& r) {
  return {{"seed", r.seed},
          {"failed", r.failed},
          {"failure", r.failure},
          {"rmse", r.metrics.rmse},
          {"picp", r.metrics.picp},
          {"pinaw", r.metrics.pinaw},
          {"epochs", r.epochs},
          {"best_epoch", r.best_epoch},
          {"wall_time", r.wall_time}};
}

SeedRecord record_from_json(const nlohmann::json& j) {
  SeedRecord r;
  r.seed = j.at("seed").get<std::uint64_t>();
  r.failed = j.at("failed").get<bool>();
  r.failure = j.at("failure").get<std::string>();
  r.metrics = {j.at("rmse").get<double>(), j.at("picp").get<double>(), j.at("pinaw").get<double>()};
  r.epochs = j.at("epochs").get<int>();
  r.best_epoch = j.at("best_epoch").get<int>();
  r.wall_time = j.at("wall_time").get<double>();
  return r;
}

nlohmann::json summary_json(const std::optional<Summary>& s, double scale) {
  if (!s) return nullptr;
  return {{"mean", s->mean * scale}, {"std", s->std * scale},     {"median", s->median * scale},
          {"q25", s->q25 * scale},   {"q75", s->q75 * scale},     {"min", s->min * scale},
          {"max", s->max * scale}};
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

TestMetrics evaluate_model(const RawParams& raw, const ModelConfig& config, const Dataset& data) {
  const auto params = constrain(raw, config);
  const auto preds = predict_batch(data.features, params, config);
  std::vector<double> point(preds.size()), lo(preds.size()), hi(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    point[i] = preds[i].point;
    lo[i] = preds[i].lower;
    hi[i] = preds[i].upper;
  }
  return {rmse(data.targets, point), picp(data.targets, lo, hi), pinaw(data.targets, lo, hi)};
}

SeedRecord run_seed(const Table& table, const RunConfig& config, std::uint64_t seed) {
  SeedRecord rec;
  rec.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto [train_rows, test_rows] =
        split(table, config.train_ratio, derive_seed(seed, "split"));
    const auto [train_set, test_set] = zscore_fit_apply(train_rows, test_rows);
    ModelConfig model = config.model;
    model.inputs = static_cast<int>(train_set.dim());
    TrainConfig tc = config.train;
    tc.seed = seed;
    const auto result = train(train_set, model, tc);
    rec.metrics = evaluate_model(result.params, model, test_set);
    rec.epochs = static_cast<int>(result.trace.rows.size());
    rec.best_epoch = result.trace.best_epoch;
  } catch (const TrainingDiverged& e) {
    rec.failed = true;
    rec.failure = e.what();
    rec.epochs = static_cast<int>(e.trace().rows.size());
  } catch (const Error& e) {
    rec.failed = true;
    rec.failure = e.what();
  }
  rec.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

ExperimentReport aggregate(std::string dataset_name, const RunConfig& config, int inputs,
                           std::vector<SeedRecord> records) {
  ExperimentReport rep;
  rep.dataset_name = std::move(dataset_name);
  rep.config = config;
  rep.inputs = inputs;
  std::sort(records.begin(), records.end(),
            [](const SeedRecord& a, const SeedRecord& b) { return a.seed < b.seed; });
  rep.records = std::move(records);
  std::vector<double> r, c, w;
  for (const auto& rec : rep.records) {
    if (rec.failed) {
      rep.failed_seeds.push_back(rec.seed);
      continue;
    }
    r.push_back(rec.metrics.rmse);
    c.push_back(rec.metrics.picp);
    w.push_back(rec.metrics.pinaw);
  }
  if (!r.empty()) {
    rep.rmse = summarize(r);
    rep.picp = summarize(c);
    rep.pinaw = summarize(w);
  }
  return rep;
}

ExperimentReport run_campaign(const Table& table, std::string dataset_name,
                              const RunConfig& config, int n_seeds,
                              const CampaignOptions& options) {
  if (n_seeds < 1) throw ConfigError("a campaign needs at least one seed");
  config.model.validate();
  config.train.validate();
  const std::uint64_t fingerprint =
      fnv1a64(format_run_config(config), table_fingerprint(table));
  if (options.checkpoint_dir) std::filesystem::create_directories(*options.checkpoint_dir);

  std::vector<SeedRecord> records(static_cast<std::size_t>(n_seeds));
  std::vector<std::uint8_t> done(records.size(), 0);
  std::mutex report_mutex;

  if (options.checkpoint_dir) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      std::ifstream in(checkpoint_path(*options.checkpoint_dir, i + 1));
      if (!in) continue;
      try {
        const auto j = nlohmann::json::parse(in);
        if (j.at("fingerprint").get<std::uint64_t>() != fingerprint) continue;
        records[i] = record_from_json(j.at("record"));
        done[i] = records[i].seed == i + 1;
      } catch (const nlohmann::json::exception&) {
        // unreadable checkpoint: recompute the seed
      }
      if (done[i] && options.on_seed) options.on_seed(records[i], true);
    }
  }

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < records.size(); i = next++) {
      if (done[i]) continue;
      records[i] = run_seed(table, config, i + 1);
      std::lock_guard lock(report_mutex);
      if (options.checkpoint_dir) {
        const auto path = checkpoint_path(*options.checkpoint_dir, i + 1);
        const auto tmp = path.string() + ".tmp";
        {
          std::ofstream out(tmp, std::ios::trunc);
          out << nlohmann::json{{"fingerprint", fingerprint}, {"record", record_json(records[i])}}
                     .dump(2)
              << '\n';
        }
        std::filesystem::rename(tmp, path);
      }
      if (options.on_seed) options.on_seed(records[i], false);
    }
  };
  const int workers = std::clamp(options.workers, 1, n_seeds);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  // Input dimension after dropping constant columns on the first seed's split.
  int inputs = 0;
  {
    const auto [tr, te] = split(table, config.train_ratio, derive_seed(1, "split"));
    inputs = static_cast<int>(fit_normalizer(tr).feature_names.size());
  }
  return aggregate(std::move(dataset_name), config, inputs, std::move(records));
}

ExperimentReport run_campaign(const std::filesystem::path& dataset_path, const RunConfig& config,
                              int n_seeds, const CampaignOptions& options) {
  const auto table = load_csv(dataset_path, config.target_column);
  return run_campaign(table, dataset_path.stem().string(), config, n_seeds, options);
}

std::string report_basename(const ExperimentReport& report) {
  return report.dataset_name + "_" + std::string(variant_name(report.config.model.variant)) + "_" +
         std::to_string(report.records.size()) + "seeds";
}

void write_report_csv(const ExperimentReport& report, std::ostream& out) {
  out << "seed,status,rmse,picp,pinaw,rmse_x100,picp_x100,pinaw_x100,epochs,best_epoch\n";
  for (const auto& r : report.records) {
    out << r.seed << ',' << (r.failed ? "failed" : "ok") << ',';
    if (r.failed) {
      out << ",,,,,,";
    } else {
      out << fmt(r.metrics.rmse) << ',' << fmt(r.metrics.picp) << ',' << fmt(r.metrics.pinaw)
          << ',' << fmt(100.0 * r.metrics.rmse) << ',' << fmt(100.0 * r.metrics.picp) << ','
          << fmt(100.0 * r.metrics.pinaw) << ',';
    }
    out << r.epochs << ',' << r.best_epoch << '\n';
  }
}

nlohmann::json report_summary_json(const ExperimentReport& report) {
  const auto& c = report.config;
  nlohmann::json j;
  j["tool"] = "zgt2";
  j["version"] = std::string(kToolVersion);
  j["dataset"] = report.dataset_name;
  j["config"] = {
      {"variant", std::string(variant_name(c.model.variant))},
      {"rules", c.model.rules},
      {"alpha_planes", c.model.plane_count()},
      {"inputs", report.inputs},
      {"parameters", count_params(c.model.variant, c.model.rules, std::max(report.inputs, 1))},
      {"epochs", c.train.epochs},
      {"batch_size", c.train.batch_size},
      {"learning_rate", c.train.learning_rate},
      {"beta1", c.train.beta1},
      {"beta2", c.train.beta2},
      {"epsilon", c.train.epsilon},
      {"tau_lower", c.train.quantiles.lower},
      {"tau_upper", c.train.quantiles.upper},
      {"clip_norm", c.train.clip_norm},
      {"target_column", c.target_column},
      {"train_ratio", c.train_ratio},
      {"text", format_run_config(c)}};
  j["n_seeds"] = report.records.size();
  j["failed_seeds"] = report.failed_seeds;
  j["metrics"] = {{"rmse", summary_json(report.rmse, 1.0)},
                  {"picp", summary_json(report.picp, 1.0)},
                  {"pinaw", summary_json(report.pinaw, 1.0)}};
  j["metrics_x100"] = {{"rmse", summary_json(report.rmse, 100.0)},
                       {"picp", summary_json(report.picp, 100.0)},
                       {"pinaw", summary_json(report.pinaw, 100.0)}};
  return j;
}

std::vector<std::filesystem::path> write_report_files(const ExperimentReport& report,
                                                      const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const auto base = report_basename(report);
  const auto csv = dir / (base + ".csv");
  const auto json = dir / (base + "_summary.json");
  const auto timing = dir / (base + "_timing.csv");
  {
    std::ofstream out(csv, std::ios::trunc);
    write_report_csv(report, out);
  }
  {
    std::ofstream out(json, std::ios::trunc);
    out << report_summary_json(report).dump(2) << '\n';
  }
  {
    std::ofstream out(timing, std::ios::trunc);
    out << "seed,wall_time_s\n";
    for (const auto& r : report.records) out << r.seed << ',' << fmt(r.wall_time) << '\n';
  }
  return {csv, json, timing};
}

}  // namespace zgt2
