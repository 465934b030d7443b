#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "zgt2/experiment.hpp"
#include "zgt2/model_io.hpp"
#include "zgt2/rng.hpp"
#include "zgt2/synthetic.hpp"

using namespace zgt2;
using namespace zgt2::cli;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigs = fs::path(ZGT2_SOURCE_DIR) / "configs";

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("zgt2_it_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_table(const fs::path& path, const Table& t, char sep = ',') {
  std::ofstream out(path);
  out.precision(17);
  for (const auto& n : t.feature_names) out << n << sep;
  out << t.target_name << '\n';
  for (std::size_t r = 0; r < t.size(); ++r) {
    for (std::size_t c = 0; c < t.features.cols(); ++c) out << t.features(r, c) << sep;
    out << t.targets[r] << '\n';
  }
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto p = dir / "run.ini";
  std::ofstream(p) << text;
  return p;
}

const char* kToyConfig =
    "[model]\nrules = 3\nalpha_planes = 3\n"
    "[train]\nepochs = 8\nbatch_size = 16\nlearning_rate = 0.01\nseed = 4\n"
    "[data]\ntarget_column = y\n";

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// Eleven inputs named like the UCI white-wine columns.
Table wine_like(std::size_t n) {
  static const char* names[] = {"fixed acidity", "volatile acidity", "citric acid",
                                "residual sugar", "chlorides", "free sulfur dioxide",
                                "total sulfur dioxide", "density", "pH", "sulphates", "alcohol"};
  Rng rng(77);
  Table t;
  t.feature_names.assign(std::begin(names), std::end(names));
  t.target_name = "quality";
  t.features = Matrix(n, 11);
  t.targets.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < 11; ++c) {
      t.features(r, c) = 5.0 + rng.normal();
      s += (c % 3 == 0 ? 0.3 : -0.1) * t.features(r, c);
    }
    t.targets[r] = std::round(6.0 + s + 0.5 * rng.normal());
  }
  return t;
}

}  // namespace

TEST_CASE("train: missing dataset exits 2 naming the path") {
  const auto dir = scratch("missing");
  std::ostringstream out, err;
  const int rc = cmd_train({write_config(dir, kToyConfig), dir / "nope.csv", dir / "o", {}}, out, err);
  CHECK(rc == kDataError);
  CHECK(err.str().find((dir / "nope.csv").string()) != std::string::npos);
}

TEST_CASE("train: config errors exit 1") {
  const auto dir = scratch("badcfg");
  write_table(dir / "d.csv", make_heteroscedastic_sine(40, 1));
  std::ostringstream out, err;
  CHECK(cmd_train({write_config(dir, "[model]\nrulez = 3\n"), dir / "d.csv", dir / "o", {}}, out, err) ==
        kConfigError);
  CHECK(cmd_train({dir / "absent.ini", dir / "d.csv", dir / "o", {}}, out, err) == kConfigError);
}

TEST_CASE("train then eval: persistence round trip and exact metrics") {
  const auto dir = scratch("roundtrip");
  const auto data = dir / "sine.csv";
  write_table(data, make_heteroscedastic_sine(150, 2));
  const auto cfg = write_config(dir, kToyConfig);
  std::ostringstream out, err;
  REQUIRE(cmd_train({cfg, data, dir / "run", {}}, out, err) == kOk);
  for (const char* f : {"model.zgt2", "trace.csv", "manifest.json"}) CHECK(fs::exists(dir / "run" / f));

  // The saved model reproduces the best trace loss on its training partition.
  const auto model = load_model(dir / "run" / "model.zgt2");
  const auto table = load_csv(data, "y");
  const auto [tr, te] = split(table, model.train_ratio, model.split_seed);
  const auto train_set = apply_normalizer(model.normalizer, tr);
  const auto loss = evaluate_loss(model.params, BatchView{train_set.features, train_set.targets},
                                  model.config, LossOptions{});
  const auto manifest = nlohmann::json::parse(slurp(dir / "run" / "manifest.json"));
  CHECK(loss.total == manifest["best_loss"].get<double>());
  CHECK(slurp(dir / "run" / "trace.csv").find(g17(loss.total)) != std::string::npos);

  // eval prints the in-process metrics to full precision, one labeled row per split.
  std::ostringstream eout, eerr;
  REQUIRE(cmd_eval({dir / "run" / "model.zgt2", data, dir / "eval", "both"}, eout, eerr) == kOk);
  const auto expect_test = evaluate_model(model.params, model.config, apply_normalizer(model.normalizer, te));
  const auto expect_train = evaluate_model(model.params, model.config, train_set);
  const auto text = eout.str();
  CHECK(text.find("train: rows=105 rmse=" + g17(expect_train.rmse)) != std::string::npos);
  CHECK(text.find("test: rows=45 rmse=" + g17(expect_test.rmse)) != std::string::npos);
  CHECK(text.find("picp=" + g17(expect_test.picp)) != std::string::npos);
  CHECK(text.find("x100 rmse=" + g17(100 * expect_test.rmse)) != std::string::npos);
  CHECK(expect_train.rmse != expect_test.rmse);

  const auto csv = slurp(dir / "eval" / "eval_metrics.csv");
  CHECK(csv.rfind("split,rows,rmse,picp,pinaw,rmse_x100,picp_x100,pinaw_x100\n", 0) == 0);
  CHECK(csv.find("\ntrain,105,") != std::string::npos);
  CHECK(csv.find("\ntest,45,") != std::string::npos);
}

TEST_CASE("eval: corrupted model exits 1, dimension mismatch exits 2") {
  const auto dir = scratch("evalerr");
  const auto data = dir / "d.csv";
  write_table(data, wine_like(60));
  std::ostringstream out, err;
  REQUIRE(cmd_train({write_config(dir, "[model]\nrules = 2\n[train]\nepochs = 2\n[data]\ntarget_column = quality\n"),
                     data, dir / "run", {}},
                    out, err) == kOk);

  auto bytes = slurp(dir / "run" / "model.zgt2");
  bytes[bytes.size() - 5] ^= 0x01;
  std::ofstream(dir / "bad.zgt2", std::ios::binary) << bytes;
  CHECK(cmd_eval({dir / "bad.zgt2", data, {}, "both"}, out, err) == kConfigError);
  CHECK(cmd_eval({dir / "none.zgt2", data, {}, "both"}, out, err) == kConfigError);

  // Drop one input column.
  auto t = load_csv(data, "quality");
  Table fewer;
  fewer.feature_names.assign(t.feature_names.begin() + 1, t.feature_names.end());
  fewer.target_name = t.target_name;
  fewer.targets = t.targets;
  fewer.features = Matrix(t.size(), 10);
  for (std::size_t r = 0; r < t.size(); ++r)
    for (std::size_t c = 0; c < 10; ++c) fewer.features(r, c) = t.features(r, c + 1);
  write_table(dir / "fewer.csv", fewer);
  std::ostringstream e2;
  CHECK(cmd_eval({dir / "run" / "model.zgt2", dir / "fewer.csv", {}, "all"}, out, e2) == kDataError);
  CHECK(cmd_eval({dir / "run" / "model.zgt2", dir / "missing.csv", {}, "all"}, out, err) == kDataError);
}

TEST_CASE("wine config from the docs trains and evaluates") {
  const auto dir = scratch("wine");
  const auto data = dir / "winequality-white.csv";
  write_table(data, wine_like(300), ';');
  std::ostringstream out, err;
  REQUIRE(cmd_train({kConfigs / "wine.ini", data, dir / "run", {}}, out, err) == kOk);
  const auto model = load_model(dir / "run" / "model.zgt2");
  CHECK(model.config.inputs == 11);
  CHECK(model.config.plane_count() == 3);
  CHECK(count_params(model.config.variant, model.config.rules, model.config.inputs) == 192);
  std::ostringstream eout;
  CHECK(cmd_eval({dir / "run" / "model.zgt2", data, {}, "test"}, eout, err) == kOk);
  CHECK(eout.str().rfind("test: rows=90 ", 0) == 0);
}

TEST_CASE("train is byte-for-byte deterministic") {
  const auto dir = scratch("det");
  const auto data = dir / "d.csv";
  write_table(data, make_heteroscedastic_sine(100, 3));
  const auto cfg = write_config(dir, kToyConfig);
  std::ostringstream out, err;
  REQUIRE(cmd_train({cfg, data, dir / "a", {}}, out, err) == kOk);
  REQUIRE(cmd_train({cfg, data, dir / "b", {}}, out, err) == kOk);
  for (const char* f : {"model.zgt2", "trace.csv", "manifest.json"}) {
    CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
  }
}

TEST_CASE("gradcheck: default passes, echoes the seed; fault injection exits 4") {
  std::ostringstream out, err;
  CHECK(cmd_gradcheck({std::nullopt, 1234, 5, false}, out, err) == kOk);
  CHECK(out.str().find("seed=1234") != std::string::npos);
  std::ostringstream out2, err2;
  CHECK(cmd_gradcheck({std::nullopt, 1234, 2, true}, out2, err2) == kGradCheckFailed);
  CHECK(err2.str().find("coordinate 0 (c)") != std::string::npos);
}

TEST_CASE("campaign: seed count, worker independence, resume, manifests") {
  const auto dir = scratch("campaign");
  const auto data = dir / "sine.csv";
  write_table(data, make_heteroscedastic_sine(120, 6));
  const auto cfg = write_config(dir, kToyConfig);
  std::ostringstream out, err;

  CHECK(cmd_campaign({cfg, data, dir / "zero", 0, 1, {}}, out, err) == kConfigError);

  REQUIRE(cmd_campaign({cfg, data, dir / "w1", 4, 1, {}}, out, err) == kOk);
  REQUIRE(cmd_campaign({cfg, data, dir / "w4", 4, 4, {}}, out, err) == kOk);
  const std::string base = "sine_Z-GT2_4seeds";
  for (const auto& f : {base + ".csv", base + "_summary.json", std::string("manifest.json")}) {
    CHECK(slurp(dir / "w1" / f) == slurp(dir / "w4" / f));
  }

  // Every output file is listed by the manifest exactly once.
  const auto manifest = nlohmann::json::parse(slurp(dir / "w1" / "manifest.json"));
  std::multiset<std::string> listed;
  for (const auto& a : manifest["artifacts"]) listed.insert(a.get<std::string>());
  std::multiset<std::string> present;
  for (const auto& e : fs::recursive_directory_iterator(dir / "w1")) {
    if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
    present.insert(fs::relative(e.path(), dir / "w1").generic_string());
  }
  CHECK(listed == present);

  // Interrupted after two seeds: reports gone, two checkpoints left behind.
  fs::copy(dir / "w1", dir / "resumed", fs::copy_options::recursive);
  for (const auto& f : {base + ".csv", base + "_summary.json", base + "_timing.csv",
                        std::string("manifest.json"), std::string("seeds/seed_3.json"),
                        std::string("seeds/seed_4.json")}) {
    fs::remove(dir / "resumed" / f);
  }
  std::ostringstream rout;
  REQUIRE(cmd_campaign({cfg, data, dir / "resumed", 4, 2, {}}, rout, err) == kOk);
  CHECK(rout.str().find("seed 1 (resumed)") != std::string::npos);
  CHECK(rout.str().find("seed 3 (resumed)") == std::string::npos);
  for (const auto& f : {base + ".csv", base + "_summary.json", std::string("manifest.json")}) {
    CHECK(slurp(dir / "w1" / f) == slurp(dir / "resumed" / f));
  }
}

TEST_CASE("campaign: every seed failing exits 3") {
  const auto dir = scratch("allfail");
  const auto data = dir / "tiny.csv";
  write_table(data, make_heteroscedastic_sine(12, 1));
  // More rules than training rows: every seed fails at initialisation.
  const auto cfg = write_config(dir, "[model]\nrules = 20\n[train]\nepochs = 1\n[data]\ntarget_column = y\n");
  std::ostringstream out, err;
  CHECK(cmd_campaign({cfg, data, dir / "o", 2, 1, {}}, out, err) == kDiverged);
  CHECK(out.str().find("FAILED") != std::string::npos);
}

TEST_CASE("worker default comes from the environment") {
  ::setenv("ZGT2_WORKERS", "3", 1);
  CHECK(default_workers() == 3);
  ::setenv("ZGT2_WORKERS", "zero", 1);
  CHECK(default_workers() == 1);
  ::unsetenv("ZGT2_WORKERS");
  CHECK(default_workers() == 1);
}
