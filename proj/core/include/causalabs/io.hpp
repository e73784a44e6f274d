#ifndef CAUSALABS_IO_HPP
#define CAUSALABS_IO_HPP

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "causalabs/abstraction.hpp"
#include "causalabs/eval.hpp"
#include "causalabs/graph.hpp"
#include "causalabs/learn.hpp"
#include "causalabs/scm.hpp"

namespace causalabs {

/// Tool name, version, and the exact invocation; embedded in every output
/// file for provenance.
struct Provenance {
  std::string tool = "causalabs";
  std::string version;
  std::string invocation;
};

/// Problem description accepted by the CLI: a graph plus intervention
/// targets, optionally fixed coefficients, weights, and a seed. The
/// sets-only variant (for atom computations) fills `sets` instead of
/// edges/interventions.
struct ProblemSpec {
  int nodes = 0;
  std::vector<Edge> edges;
  std::vector<VertexSet> interventions;
  std::vector<double> weights;  // empty = uniform
  std::optional<Eigen::MatrixXd> coefficients;
  std::optional<std::uint64_t> seed;
  std::vector<VertexSet> sets;  // sets-only variant
  bool sets_only = false;
};

ProblemSpec parse_problem_spec(const std::string& json_text);
ProblemSpec load_problem_spec(const std::string& path);

Dag dag_from_spec(const ProblemSpec& spec);
TargetFamily targets_from_spec(const ProblemSpec& spec);

/// Graph JSON: {"nodes": n, "edges": [[u,v],...]}.
std::string graph_to_json(const Digraph& g);
Digraph graph_from_json(const std::string& json_text);

std::string abstraction_report_to_json(const AbstractionReport& report,
                                       const Provenance& provenance);

/// Dataset files: <prefix>.csv (x_1..x_n, xt_1..xt_n at 17 significant
/// digits), <prefix>_meta.json (ground truth sidecar), and
/// <prefix>_labels.csv when labels were retained.
void write_dataset(const std::string& prefix,
                   const CounterfactualDataset& data,
                   const Provenance& provenance);

struct LoadedDataset {
  Eigen::MatrixXd x;
  Eigen::MatrixXd x_tilde;
};

/// Reads only the observation CSV; the metadata sidecar stays untouched so
/// fitting cannot consume ground truth.
LoadedDataset read_dataset_csv(const std::string& prefix);

struct DatasetMetadata {
  std::uint64_t seed = 0;
  int nodes = 0;
  std::vector<Edge> edges;
  Eigen::MatrixXd coefficients;
  Eigen::MatrixXd rotation;
  std::vector<VertexSet> targets;
  std::vector<double> weights;
  bool labels_present = false;
  std::int64_t samples = 0;
};

DatasetMetadata read_dataset_metadata(const std::string& prefix);

std::string fit_result_to_json(const FitResult& result, const FitConfig& config,
                               const Provenance& provenance);

struct LoadedFit {
  Eigen::MatrixXd rotation;
  Eigen::MatrixXd coefficients;
};

LoadedFit read_fit_result(const std::string& path);

/// End-to-end evaluation of a fit against the dataset's ground truth:
/// alignment matrix M = Q_learned^T Q_truth, matched block score against the
/// identifiable partition, delta-oracle family recovery on reconstructed
/// latents, and Theorem-3.2-style coordinate verdicts.
struct EvaluationOutcome {
  AbstractionReport report;
  Eigen::MatrixXd alignment;  // M
  MatchResult match;
  std::vector<VertexSet> recovered_family;
  bool family_match = false;
  struct PiVerdict {
    VertexSet nd, pi;
    bool singleton = false;
    bool coordinate_aligned = false;
  };
  std::vector<PiVerdict> pi;
};

EvaluationOutcome run_evaluation(const Eigen::MatrixXd& learned_rotation,
                                 const DatasetMetadata& meta,
                                 const LoadedDataset& data);

std::string evaluation_to_json(const EvaluationOutcome& outcome,
                               const Provenance& provenance);

/// JSON (de)serialization helpers shared by the CLI.
FitConfig fit_config_from_json(const std::string& json_text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace causalabs

#endif  // CAUSALABS_IO_HPP
