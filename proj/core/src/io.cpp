#include "causalabs/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "causalabs/errors.hpp"
#include "causalabs/version.hpp"

namespace causalabs {

using nlohmann::json;

const char* version() {
#ifdef CAUSALABS_VERSION
  return CAUSALABS_VERSION;
#else
  return "0.0.0";
#endif
}

namespace {

json to_json_set(const VertexSet& s) { return json(s.nodes()); }

VertexSet set_from_json(const json& j) {
  if (!j.is_array()) throw SpecError("set must be an array of node labels");
  std::vector<Node> nodes;
  for (const auto& v : j) {
    if (!v.is_number_integer()) throw SpecError("node labels must be integers");
    nodes.push_back(v.get<Node>());
  }
  return VertexSet(std::move(nodes));
}

json to_json_sets(const std::vector<VertexSet>& sets) {
  json out = json::array();
  for (const VertexSet& s : sets) out.push_back(to_json_set(s));
  return out;
}

std::vector<VertexSet> sets_from_json(const json& j) {
  if (!j.is_array()) throw SpecError("expected an array of sets");
  std::vector<VertexSet> out;
  for (const auto& s : j) out.push_back(set_from_json(s));
  return out;
}

json to_json_matrix(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw SpecError("expected a matrix");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = static_cast<Eigen::Index>(j.front().size());
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw SpecError("ragged matrix rows");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      m(r, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
  }
  return m;
}

std::vector<Edge> edges_from_json(const json& j) {
  if (!j.is_array()) throw SpecError("edges must be an array of pairs");
  std::vector<Edge> edges;
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 2) {
      throw SpecError("each edge must be a pair [u, v]");
    }
    edges.push_back({e[0].get<Node>(), e[1].get<Node>()});
  }
  return edges;
}

json edges_to_json(const std::vector<Edge>& edges) {
  json out = json::array();
  for (const auto& [u, v] : edges) out.push_back(json::array({u, v}));
  return out;
}

json provenance_to_json(const Provenance& p) {
  return json{{"tool", p.tool}, {"version", p.version}, {"invocation", p.invocation}};
}

json parse_json(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw SpecError(std::string("malformed JSON in ") + what);
  return j;
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

ProblemSpec parse_problem_spec(const std::string& json_text) {
  const json j = parse_json(json_text, "problem spec");
  ProblemSpec spec;
  if (!j.contains("nodes") || !j["nodes"].is_number_integer()) {
    throw SpecError("spec requires an integer \"nodes\" field");
  }
  spec.nodes = j["nodes"].get<int>();
  if (spec.nodes < 1) throw SpecError("\"nodes\" must be >= 1");
  if (j.contains("sets")) {
    spec.sets = sets_from_json(j["sets"]);
    spec.sets_only = true;
  }
  if (j.contains("edges")) spec.edges = edges_from_json(j["edges"]);
  if (j.contains("interventions")) {
    spec.interventions = sets_from_json(j["interventions"]);
  }
  if (j.contains("weights")) {
    for (const auto& w : j["weights"]) spec.weights.push_back(w.get<double>());
  }
  if (j.contains("coefficients")) {
    spec.coefficients = matrix_from_json(j["coefficients"]);
  }
  if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
  if (!spec.sets_only && spec.interventions.empty()) {
    throw SpecError("spec requires \"interventions\" (or \"sets\")");
  }
  return spec;
}

ProblemSpec load_problem_spec(const std::string& path) {
  return parse_problem_spec(read_text_file(path));
}

Dag dag_from_spec(const ProblemSpec& spec) {
  return validate_dag(spec.nodes, spec.edges);
}

TargetFamily targets_from_spec(const ProblemSpec& spec) {
  if (spec.weights.empty()) return TargetFamily(spec.interventions);
  return TargetFamily(spec.interventions, spec.weights);
}

std::string graph_to_json(const Digraph& g) {
  json j{{"nodes", g.node_count()}, {"edges", edges_to_json(g.edges())}};
  return j.dump(2);
}

Digraph graph_from_json(const std::string& json_text) {
  const json j = parse_json(json_text, "graph");
  if (!j.contains("nodes")) throw SpecError("graph requires \"nodes\"");
  return Digraph(j["nodes"].get<int>(),
                 j.contains("edges") ? edges_from_json(j["edges"])
                                     : std::vector<Edge>{});
}

std::string abstraction_report_to_json(const AbstractionReport& report,
                                       const Provenance& provenance) {
  json quotient{{"nodes", to_json_sets(report.partition.blocks())},
                {"edges", edges_to_json(report.quotient.edges())}};
  json pi = json::array();
  for (const PiEntry& entry : report.pi_map) {
    pi.push_back(json{{"nd", to_json_set(entry.nd)},
                      {"pi", to_json_set(entry.pi)},
                      {"singleton", entry.singleton}});
  }
  json j{{"provenance", provenance_to_json(provenance)},
         {"nd_family", to_json_sets(report.nd_family)},
         {"partition", to_json_sets(report.partition.blocks())},
         {"quotient", std::move(quotient)},
         {"pi", std::move(pi)},
         {"acyclic", report.acyclic}};
  return j.dump(2);
}

namespace {

void write_csv_matrix(std::ofstream& out, const Eigen::MatrixXd& x,
                      const Eigen::MatrixXd& xt) {
  const auto n = x.cols();
  for (Eigen::Index c = 0; c < n; ++c) {
    out << (c == 0 ? "" : ",") << "x_" << (c + 1);
  }
  for (Eigen::Index c = 0; c < n; ++c) out << ",xt_" << (c + 1);
  out << '\n';
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      if (c) out << ',';
      out << format_g17(x(r, c));
    }
    for (Eigen::Index c = 0; c < n; ++c) out << ',' << format_g17(xt(r, c));
    out << '\n';
  }
}

}  // namespace

void write_dataset(const std::string& prefix, const CounterfactualDataset& data,
                   const Provenance& provenance) {
  const std::string comment = "# tool=" + provenance.tool +
                              " version=" + provenance.version +
                              " invocation=" + provenance.invocation + "\n";
  {
    std::ofstream csv(prefix + ".csv");
    if (!csv) throw IoError("cannot write " + prefix + ".csv");
    csv << comment;
    write_csv_matrix(csv, data.x, data.x_tilde);
    if (!csv) throw IoError("write failure on " + prefix + ".csv");
  }
  {
    json meta{{"provenance", provenance_to_json(provenance)},
              {"seed", data.seed},
              {"nodes", data.nodes},
              {"edges", edges_to_json(data.edges)},
              {"coefficients", to_json_matrix(data.coefficients)},
              {"rotation", to_json_matrix(data.rotation)},
              {"targets", to_json_sets(data.targets)},
              {"weights", data.weights},
              {"labels_present", !data.labels.empty()},
              {"samples", data.rows()}};
    write_text_file(prefix + "_meta.json", meta.dump(2) + "\n");
  }
  if (!data.labels.empty()) {
    std::ofstream labels(prefix + "_labels.csv");
    if (!labels) throw IoError("cannot write " + prefix + "_labels.csv");
    labels << comment << "iota_index\n";
    for (int label : data.labels) labels << label << '\n';
  }
}

LoadedDataset read_dataset_csv(const std::string& prefix) {
  std::ifstream in(prefix + ".csv");
  if (!in) throw IoError("cannot read " + prefix + ".csv");
  std::string line;
  // Skip provenance comments; the first remaining line is the header.
  do {
    if (!std::getline(in, line)) throw IoError("empty dataset CSV");
  } while (!line.empty() && line.front() == '#');

  int n = 0;
  {
    std::stringstream header(line);
    std::string field;
    int columns = 0;
    while (std::getline(header, field, ',')) ++columns;
    if (columns < 2 || columns % 2 != 0) {
      throw IoError("dataset header must hold x_1..x_n, xt_1..xt_n");
    }
    n = columns / 2;
  }

  std::vector<double> values;
  std::int64_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    const char* p = line.data();
    const char* end = p + line.size();
    int fields = 0;
    while (p < end) {
      double v = 0.0;
      const auto [next, ec] = std::from_chars(p, end, v);
      if (ec != std::errc{}) throw IoError("malformed number in dataset CSV");
      values.push_back(v);
      ++fields;
      p = next;
      if (p < end && *p == ',') ++p;
    }
    if (fields != 2 * n) throw IoError("row width differs from header");
    ++rows;
  }
  if (rows == 0) throw EmptyDataset("dataset CSV has no rows");

  LoadedDataset data;
  data.x.resize(rows, n);
  data.x_tilde.resize(rows, n);
  for (std::int64_t r = 0; r < rows; ++r) {
    for (int c = 0; c < n; ++c) {
      data.x(r, c) = values[static_cast<std::size_t>(r) * 2 * n + c];
      data.x_tilde(r, c) = values[static_cast<std::size_t>(r) * 2 * n + n + c];
    }
  }
  return data;
}

DatasetMetadata read_dataset_metadata(const std::string& prefix) {
  const json j = parse_json(read_text_file(prefix + "_meta.json"), "metadata");
  DatasetMetadata meta;
  meta.seed = j.at("seed").get<std::uint64_t>();
  meta.nodes = j.at("nodes").get<int>();
  meta.edges = edges_from_json(j.at("edges"));
  meta.coefficients = matrix_from_json(j.at("coefficients"));
  meta.rotation = matrix_from_json(j.at("rotation"));
  meta.targets = sets_from_json(j.at("targets"));
  meta.weights = j.at("weights").get<std::vector<double>>();
  meta.labels_present = j.at("labels_present").get<bool>();
  meta.samples = j.at("samples").get<std::int64_t>();
  return meta;
}

namespace {

json fit_config_to_json(const FitConfig& config) {
  return json{{"steps", config.steps},
              {"step_size", config.step_size},
              {"stages", config.stages},
              {"slack_initial", config.slack_initial},
              {"slack_final", config.slack_final},
              {"acyclicity_weight_final", config.acyclicity_weight_final},
              {"restarts", config.restarts},
              {"batch_size", config.batch_size},
              {"seed", config.seed},
              {"convergence_tol", config.convergence_tol}};
}

}  // namespace

std::string fit_result_to_json(const FitResult& result, const FitConfig& config,
                               const Provenance& provenance) {
  json mixture = json::array();
  for (Eigen::Index i = 0; i < result.mixture_weights.size(); ++i) {
    if (result.mixture_weights(i) > 1e-4) {
      mixture.push_back(
          json{{"target", to_json_set(result.candidates[i])},
               {"weight", result.mixture_weights(i)}});
    }
  }
  json j{{"provenance", provenance_to_json(provenance)},
         {"config", fit_config_to_json(config)},
         {"seed", config.seed},
         {"rotation", to_json_matrix(result.rotation)},
         {"coefficients", to_json_matrix(result.coefficients)},
         {"mixture", std::move(mixture)},
         {"objective_trace", result.stage_objectives},
         {"final_objective", result.final_objective},
         {"best_restart", result.best_restart},
         {"diverged_restarts", result.diverged_restarts}};
  return j.dump(2);
}

LoadedFit read_fit_result(const std::string& path) {
  const json j = parse_json(read_text_file(path), "fit result");
  LoadedFit fit;
  fit.rotation = matrix_from_json(j.at("rotation"));
  fit.coefficients = matrix_from_json(j.at("coefficients"));
  return fit;
}

FitConfig fit_config_from_json(const std::string& json_text) {
  const json j = parse_json(json_text, "fit config");
  FitConfig config;
  if (j.contains("candidates")) {
    config.candidates = sets_from_json(j["candidates"]);
  }
  if (j.contains("steps")) config.steps = j["steps"].get<int>();
  if (j.contains("step_size")) config.step_size = j["step_size"].get<double>();
  if (j.contains("stages")) config.stages = j["stages"].get<int>();
  if (j.contains("slack_initial")) {
    config.slack_initial = j["slack_initial"].get<double>();
  }
  if (j.contains("slack_final")) {
    config.slack_final = j["slack_final"].get<double>();
  }
  if (j.contains("acyclicity_weight_final")) {
    config.acyclicity_weight_final = j["acyclicity_weight_final"].get<double>();
  }
  if (j.contains("restarts")) config.restarts = j["restarts"].get<int>();
  if (j.contains("batch_size")) {
    config.batch_size = j["batch_size"].get<std::int64_t>();
  }
  if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("convergence_tol")) {
    config.convergence_tol = j["convergence_tol"].get<double>();
  }
  return config;
}

EvaluationOutcome run_evaluation(const Eigen::MatrixXd& learned_rotation,
                                 const DatasetMetadata& meta,
                                 const LoadedDataset& data) {
  const int n = meta.nodes;
  if (learned_rotation.rows() != n || learned_rotation.cols() != n ||
      meta.rotation.rows() != n || data.x.cols() != n) {
    throw DimensionMismatch("fit, metadata, and dataset dimensions differ");
  }

  const Dag dag = validate_dag(n, meta.edges);
  const TargetFamily targets(meta.targets, meta.weights);
  AbstractionReport report = identifiable_abstraction(dag, targets);
  Eigen::MatrixXd alignment = learned_rotation.transpose() * meta.rotation;
  MatchResult match = match_blocks(alignment, report.partition);

  // Ground-truth latents: z = Q*^T x, row-wise.
  const Eigen::MatrixXd z = data.x * meta.rotation;
  const Eigen::MatrixXd zt = data.x_tilde * meta.rotation;
  std::vector<VertexSet> recovered = delta_support_oracle(z, zt, 1e-9).sets;
  const bool family_match = recovered == report.nd_family;

  std::vector<EvaluationOutcome::PiVerdict> pi;
  for (const PiEntry& entry : report.pi_map) {
    EvaluationOutcome::PiVerdict verdict;
    verdict.nd = entry.nd;
    verdict.pi = entry.pi;
    verdict.singleton = entry.singleton;
    verdict.coordinate_aligned = false;
    if (entry.singleton) {
      const Node coord = entry.pi.nodes().front();
      const VertexSet& block =
          report.partition.blocks()[report.partition.block_of(coord)];
      verdict.coordinate_aligned =
          pi_coordinate_check(alignment, block, coord, 0.1);
    }
    pi.push_back(std::move(verdict));
  }
  return EvaluationOutcome{std::move(report), std::move(alignment),
                           std::move(match),  std::move(recovered),
                           family_match,      std::move(pi)};
}

std::string evaluation_to_json(const EvaluationOutcome& outcome,
                               const Provenance& provenance) {
  json pi = json::array();
  for (const auto& verdict : outcome.pi) {
    pi.push_back(json{{"nd", to_json_set(verdict.nd)},
                      {"pi", to_json_set(verdict.pi)},
                      {"singleton", verdict.singleton},
                      {"coordinate_aligned", verdict.coordinate_aligned}});
  }
  json j{{"provenance", provenance_to_json(provenance)},
         {"block_score", outcome.match.score},
         {"matched_blocks", to_json_sets(outcome.match.learned_groups)},
         {"partition", to_json_sets(outcome.report.partition.blocks())},
         {"nd_family", to_json_sets(outcome.report.nd_family)},
         {"recovered_family", to_json_sets(outcome.recovered_family)},
         {"family_match", outcome.family_match ? "MATCH" : "MISMATCH"},
         {"pi", std::move(pi)},
         {"alignment", to_json_matrix(outcome.alignment)}};
  return j.dump(2);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failure on " + path);
}

}  // namespace causalabs
