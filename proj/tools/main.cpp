#include <iostream>

#include "CLI11.hpp"

#include "pivotal/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Unequal-probability sampling without replacement via martingale (pivotal) "
               "procedures, with large-deviation tail bounds and verification oracles"};
  app.require_subcommand(1);
  int rc = 0;

  pivotal::SampleOptions sopt;
  CLI::App* sample = app.add_subcommand("sample", "Draw samples from a weight file");
  sample->add_option("weights-file", sopt.weights_file, "CSV or JSON weight file")->required();
  sample->add_option("--k", sopt.k, "Sample size")->required();
  sample->add_option("--procedure", sopt.procedure, "x, x-star, or x-star-star")
      ->capture_default_str();
  sample->add_option("--policy", sopt.policy, "in-order or random-pair (procedure x only)")
      ->capture_default_str();
  sample->add_option("--order-file", sopt.order_file, "JSON permutation of [0, n)");
  CLI::Option* sample_seed = sample->add_option("--seed", sopt.seed, "Base RNG seed");
  sample->add_option("--count", sopt.count, "Number of samples")->capture_default_str();
  sample->add_flag("--trace", sopt.trace, "Attach a per-step trace to each record");
  sample->add_option("--precision", sopt.precision, "Significant digits")->capture_default_str();
  sample->callback([&] {
    sopt.have_seed = sample_seed->count() > 0;
    rc = pivotal::cmd_sample(sopt, std::cout, std::cerr);
  });

  pivotal::BoundsOptions bopt;
  CLI::App* bounds = app.add_subcommand("bounds", "Evaluate tail bounds for one subset");
  CLI::Option* bounds_alpha =
      bounds->add_option("--alpha", bopt.alpha_text, "Subset weight (decimal or fraction)");
  bounds->add_option("--delta", bopt.delta_text, "Deviation (decimal or fraction)")->required();
  bounds->add_option("--k", bopt.k, "Sample size")->required();
  bounds->add_option("--m", bopt.m_text, "Subset size cap for eta-bar; inf allowed");
  bounds->add_option("--weights-file", bopt.weights_file, "Weight file for exact eta");
  bounds->add_option("--subset-file", bopt.subset_file, "Subset file for exact eta");
  bounds->add_option("--side", bopt.side, "upper, lower, or both")->capture_default_str();
  bounds->add_flag("--best-of-complement", bopt.best_of_complement,
                   "Also evaluate at min(eta_A, eta_complement)");
  bounds->add_option("--format", bopt.format, "json, csv, or pretty")->capture_default_str();
  bounds->add_option("--precision", bopt.precision, "Significant digits")->capture_default_str();
  bounds->callback([&] {
    bopt.have_alpha = bounds_alpha->count() > 0;
    rc = pivotal::cmd_bounds(bopt, std::cout, std::cerr);
  });

  pivotal::TableOptions topt;
  CLI::App* table = app.add_subcommand("table", "Tabulate bounds across subset-size caps");
  table->add_option("--k", topt.k, "Sample size")->capture_default_str();
  table->add_option("--alpha", topt.alpha_text, "Subset weight")->capture_default_str();
  table->add_option("--delta", topt.delta_text, "Deviation")->capture_default_str();
  table->add_option("--m-list", topt.m_list_text, "Comma-separated m values; inf allowed")
      ->capture_default_str();
  table->add_option("--format", topt.format, "pretty, csv, or json")->capture_default_str();
  table->add_option("--precision", topt.precision, "Significant digits")->capture_default_str();
  table->callback([&] { rc = pivotal::cmd_table(topt, std::cout, std::cerr); });

  pivotal::VerifyOptions vopt;
  CLI::App* verify = app.add_subcommand("verify", "Check the theory against a concrete instance");
  verify->add_option("weights-file", vopt.weights_file, "CSV or JSON weight file")->required();
  verify->add_option("--subset-file", vopt.subset_file, "Tracked subset")->required();
  verify->add_option("--k", vopt.k, "Sample size")->required();
  verify->add_option("--mode", vopt.mode, "exact (n <= 14) or mc")->capture_default_str();
  verify->add_option("--delta", vopt.delta_text, "Deviation")->capture_default_str();
  verify->add_option("--trials", vopt.trials, "MC replications")->capture_default_str();
  CLI::Option* verify_seed = verify->add_option("--seed", vopt.seed, "Base RNG seed (mc)");
  verify->add_option("--procedure", vopt.procedure, "x, x-star, or x-star-star")
      ->capture_default_str();
  verify->add_option("--policy", vopt.policy, "in-order or random-pair (procedure x only)")
      ->capture_default_str();
  verify->add_option("--order-file", vopt.order_file, "JSON permutation of [0, n)");
  verify->add_option("--jobs", vopt.jobs, "MC worker threads; default $PIVOTAL_JOBS or 1");
  verify->add_option("--max-n", vopt.max_n, "Exact enumeration size cap")->capture_default_str();
  verify->add_option("--precision", vopt.precision, "Significant digits")->capture_default_str();
  verify->callback([&] {
    vopt.have_seed = verify_seed->count() > 0;
    rc = pivotal::cmd_verify(vopt, std::cout, std::cerr);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version keep 0; bad flags map to 2
  }
  return rc;
}
