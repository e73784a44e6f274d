// causalabs: identifiable causal abstractions for linear Gaussian SCMs.
//
// Subcommands:
//   abstract  — non-descendant family, sigma-algebra atoms, quotient graph
//   simulate  — weakly supervised counterfactual pair generation
//   fit       — relaxed maximum likelihood over rotations
//   eval      — block-diagonality score and delta-oracle verdicts
//
// Exit codes: 0 success, 2 validation failure, 3 I/O failure,
// 4 optimization failure.

#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "causalabs/abstraction.hpp"
#include "causalabs/errors.hpp"
#include "causalabs/io.hpp"
#include "causalabs/learn.hpp"
#include "causalabs/scm.hpp"
#include "causalabs/setcalc.hpp"
#include "causalabs/version.hpp"

namespace {

causalabs::Provenance make_provenance(int argc, char** argv) {
  causalabs::Provenance p;
  p.version = causalabs::version();
  for (int i = 0; i < argc; ++i) {
    if (i) p.invocation += ' ';
    p.invocation += argv[i];
  }
  return p;
}

struct AbstractArgs {
  std::string spec_path;
  std::string json_out;
  std::string dot_out;
  bool atoms_only = false;
};

int cmd_abstract(const AbstractArgs& args, const causalabs::Provenance& provenance) {
  const causalabs::ProblemSpec spec = causalabs::load_problem_spec(args.spec_path);
  if (args.atoms_only) {
    if (!spec.sets_only && spec.interventions.empty()) {
      throw causalabs::SpecError("--atoms-only requires a \"sets\" spec");
    }
    const auto& sets = spec.sets_only ? spec.sets : spec.interventions;
    const causalabs::Partition atoms =
        causalabs::sigma_atoms(causalabs::SetFamily(spec.nodes, sets));
    std::string json = "{\n  \"partition\": [";
    for (std::size_t b = 0; b < atoms.blocks().size(); ++b) {
      if (b) json += ", ";
      json += "[";
      const auto& nodes = atoms.blocks()[b].nodes();
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (i) json += ", ";
        json += std::to_string(nodes[i]);
      }
      json += "]";
    }
    json += "]\n}\n";
    if (args.json_out.empty()) {
      std::cout << json;
    } else {
      causalabs::write_text_file(args.json_out, json);
    }
    return 0;
  }

  const causalabs::Dag dag = causalabs::dag_from_spec(spec);
  const causalabs::TargetFamily targets = causalabs::targets_from_spec(spec);
  const causalabs::AbstractionReport report =
      causalabs::identifiable_abstraction(dag, targets);
  const std::string json = causalabs::abstraction_report_to_json(report, provenance);
  if (args.json_out.empty()) {
    std::cout << json << '\n';
  } else {
    causalabs::write_text_file(args.json_out, json + "\n");
  }
  if (!args.dot_out.empty()) {
    causalabs::write_text_file(
        args.dot_out,
        causalabs::to_dot(report.quotient, causalabs::block_labels(report.partition)));
  }
  return 0;
}

struct SimulateArgs {
  std::string spec_path;
  std::int64_t samples = 0;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_prefix;
  bool keep_labels = false;
};

int cmd_simulate(const SimulateArgs& args, const causalabs::Provenance& provenance) {
  const causalabs::ProblemSpec spec = causalabs::load_problem_spec(args.spec_path);
  if (args.samples < 1) throw causalabs::EmptyDataset("--samples must be >= 1");
  const causalabs::Dag dag = causalabs::dag_from_spec(spec);
  const causalabs::TargetFamily targets = causalabs::targets_from_spec(spec);
  const std::uint64_t seed =
      args.seed_given ? args.seed : spec.seed.value_or(0);

  const causalabs::LinearGaussianScm scm =
      spec.coefficients ? causalabs::LinearGaussianScm(dag, *spec.coefficients)
                        : causalabs::sample_scm(dag, seed);
  const causalabs::MixingModel mixing =
      causalabs::sample_rotation(dag.node_count(), seed);
  const causalabs::InterventionModel interventions{targets};
  const causalabs::CounterfactualDataset data = causalabs::sample_pairs(
      scm, interventions, mixing, args.samples, seed, args.keep_labels);
  causalabs::write_dataset(args.out_prefix, data, provenance);
  return 0;
}

struct FitArgs {
  std::string data_prefix;
  std::string config_path;
  std::string out_path;
  int restarts = -1;
  int steps = -1;
  std::uint64_t seed = 0;
  bool seed_given = false;
};

int cmd_fit(const FitArgs& args, const causalabs::Provenance& provenance) {
  causalabs::FitConfig config;
  if (!args.config_path.empty()) {
    config = causalabs::fit_config_from_json(causalabs::read_text_file(args.config_path));
  }
  if (args.restarts >= 0) config.restarts = args.restarts;
  if (args.steps >= 0) config.steps = args.steps;
  if (args.seed_given) config.seed = args.seed;

  // Only the observation CSV is read; ground truth stays in the sidecar.
  const causalabs::LoadedDataset data = causalabs::read_dataset_csv(args.data_prefix);
  const causalabs::FitResult result = causalabs::fit(data.x, data.x_tilde, config);
  const std::string json = causalabs::fit_result_to_json(result, config, provenance);
  if (args.out_path.empty()) {
    std::cout << json << '\n';
  } else {
    causalabs::write_text_file(args.out_path, json + "\n");
  }
  return 0;
}

struct EvalArgs {
  std::string fit_path;
  std::string data_prefix;
  std::string out_path;
};

int cmd_eval(const EvalArgs& args, const causalabs::Provenance& provenance) {
  const causalabs::LoadedFit fit = causalabs::read_fit_result(args.fit_path);
  const causalabs::DatasetMetadata meta =
      causalabs::read_dataset_metadata(args.data_prefix);
  const causalabs::LoadedDataset data = causalabs::read_dataset_csv(args.data_prefix);
  const causalabs::EvaluationOutcome outcome =
      causalabs::run_evaluation(fit.rotation, meta, data);
  const std::string json = causalabs::evaluation_to_json(outcome, provenance);
  if (args.out_path.empty()) {
    std::cout << json << '\n';
  } else {
    causalabs::write_text_file(args.out_path, json + "\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Identifiable causal abstractions for linear Gaussian SCMs"};
  app.set_version_flag("--version", causalabs::version());
  app.require_subcommand(1);

  AbstractArgs abstract_args;
  auto* abstract = app.add_subcommand(
      "abstract", "Compute the identifiable abstraction of a problem spec");
  abstract->add_option("spec", abstract_args.spec_path, "Problem spec JSON")
      ->required();
  abstract->add_option("--json", abstract_args.json_out,
                       "Write the report here instead of stdout");
  abstract->add_option("--dot", abstract_args.dot_out,
                       "Write the quotient graph as DOT");
  abstract->add_flag("--atoms-only", abstract_args.atoms_only,
                     "Compute sigma-algebra atoms of a sets-only spec");

  SimulateArgs simulate_args;
  auto* simulate = app.add_subcommand(
      "simulate", "Generate counterfactual pairs from a problem spec");
  simulate->add_option("spec", simulate_args.spec_path, "Problem spec JSON")
      ->required();
  simulate->add_option("--samples", simulate_args.samples, "Number of pairs")
      ->required();
  auto* seed_opt =
      simulate->add_option("--seed", simulate_args.seed, "Dataset seed");
  simulate->add_option("--out", simulate_args.out_prefix, "Output prefix")
      ->required();
  simulate->add_flag("--keep-labels", simulate_args.keep_labels,
                     "Retain per-row intervention labels");

  FitArgs fit_args;
  auto* fit = app.add_subcommand(
      "fit", "Fit (Q, A, mixture) to a dataset by relaxed MLE");
  fit->add_option("data", fit_args.data_prefix, "Dataset prefix")->required();
  fit->add_option("--config", fit_args.config_path, "FitConfig JSON");
  fit->add_option("--restarts", fit_args.restarts, "Restart count");
  fit->add_option("--steps", fit_args.steps, "Total gradient steps");
  auto* fit_seed_opt = fit->add_option("--seed", fit_args.seed, "Fit seed");
  fit->add_option("--out", fit_args.out_path, "FitResult JSON path");

  EvalArgs eval_args;
  auto* eval = app.add_subcommand(
      "eval", "Score a fit against the dataset's ground truth");
  eval->add_option("fit", eval_args.fit_path, "FitResult JSON")->required();
  eval->add_option("data", eval_args.data_prefix, "Dataset prefix")->required();
  eval->add_option("--out", eval_args.out_path, "Report JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  const causalabs::Provenance provenance = make_provenance(argc, argv);
  simulate_args.seed_given = seed_opt->count() > 0;
  fit_args.seed_given = fit_seed_opt->count() > 0;

  try {
    if (*abstract) return cmd_abstract(abstract_args, provenance);
    if (*simulate) return cmd_simulate(simulate_args, provenance);
    if (*fit) return cmd_fit(fit_args, provenance);
    if (*eval) return cmd_eval(eval_args, provenance);
  } catch (const causalabs::IoError& e) {
    std::cerr << e.what() << '\n';
    return 3;
  } catch (const causalabs::NumericalOverflow& e) {
    std::cerr << e.what() << '\n';
    return 4;
  } catch (const causalabs::InternalError& e) {
    std::cerr << e.what() << '\n';
    return 1;
  } catch (const causalabs::Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
