#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "zgt2/experiment.hpp"

int main(int argc, char** argv) {
  using namespace zgt2::cli;
  CLI::App app{"Zadeh general type-2 fuzzy regression: train, evaluate, verify, run campaigns"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "zgt2 " + std::string(zgt2::kToolVersion));

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train one model and save it");
  train_cmd->add_option("--config", train.config, "Run configuration (INI)")->required();
  train_cmd->add_option("--dataset", train.dataset, "CSV dataset")->required();
  train_cmd->add_option("--out", train.out_dir, "Output directory")->required();
  train_cmd->add_option("--target-column", train.target_column, "Target column name or 'last'");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a saved model on a dataset");
  eval_cmd->add_option("--model", eval.model, "Model file written by train")->required();
  eval_cmd->add_option("--dataset", eval.dataset, "CSV dataset")->required();
  eval_cmd->add_option("--out", eval.out_dir, "Directory for eval_metrics.csv");
  eval_cmd->add_option("--split", eval.split, "both, train, test or all")
      ->capture_default_str();

  GradCheckArgs grad;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Compare analytic and numeric gradients");
  grad_cmd->add_option("--config", grad.config, "Run configuration supplying P, K and quantiles");
  grad_cmd->add_option("--seed", grad.seed, "Instance seed")->capture_default_str();
  grad_cmd->add_option("--instances", grad.instances, "Instances per variant")
      ->capture_default_str();
  grad_cmd->add_flag("--inject-fault", grad.inject_fault)->group("");

  CampaignArgs campaign;
  campaign.workers = default_workers();
  auto* camp_cmd = app.add_subcommand("campaign", "Multi-seed train/evaluate campaign");
  camp_cmd->add_option("--config", campaign.config, "Run configuration (INI)")->required();
  camp_cmd->add_option("--dataset", campaign.dataset, "CSV dataset")->required();
  camp_cmd->add_option("--out", campaign.out_dir, "Output directory")->required();
  camp_cmd->add_option("--seeds", campaign.seeds, "Number of seeds (1..n)")->capture_default_str();
  camp_cmd->add_option("--workers", campaign.workers, "Parallel workers (default $ZGT2_WORKERS)")
      ->capture_default_str();
  camp_cmd->add_option("--target-column", campaign.target_column, "Target column name or 'last'");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write the heteroscedastic sine benchmark as CSV");
  synth_cmd->add_option("--rows", synth.rows, "Number of rows")->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  if (*train_cmd) return cmd_train(train, std::cout, std::cerr);
  if (*eval_cmd) return cmd_eval(eval, std::cout, std::cerr);
  if (*grad_cmd) return cmd_gradcheck(grad, std::cout, std::cerr);
  if (*synth_cmd) return cmd_synth(synth, std::cout, std::cerr);
  return cmd_campaign(campaign, std::cout, std::cerr);
}
