#include "pie/report.hpp"

#include <algorithm>
#include <fstream>

#include "json.hpp"
#include "pie/csv.hpp"

namespace pie {

namespace {

using Json = nlohmann::ordered_json;

Json beta_entries(const Vector& beta) {
  Json arr = Json::array();
  for (Index j = 0; j < beta.size(); ++j) {
    if (beta(j) != 0.0) arr.push_back({{"index", j + 1}, {"value", beta(j)}});
  }
  return arr;
}

Json omega_entries(const SymmetricMatrix& omega) {
  Json arr = Json::array();
  for (auto [k, l] : omega.lower_support()) {
    arr.push_back({{"k", k + 1}, {"l", l + 1}, {"value", omega(k, l)}});
  }
  return arr;
}

Json path_entries(const PathResult& path) {
  Json arr = Json::array();
  for (size_t i = 0; i < path.lambdas.size(); ++i) {
    const InteractionFit& f = path.fits[i];
    Json row{{"lambda", path.lambdas[i]},
             {"size", support_size(f.omega)},
             {"iterations", f.iterations},
             {"converged", f.converged},
             {"kkt", f.kkt},
             {"admissible", static_cast<bool>(path.admissible[i])}};
    if (path.admissible[i]) {
      row["rss"] = path.refit_rss[i];
      row["df"] = path.refit_df[i];
      row["bic"] = path.bic[i];
    }
    arr.push_back(std::move(row));
  }
  return arr;
}

Json fit_header(const std::string& method, Index n, Index p) {
  return Json{{"schema_version", 1},
              {"command", "fit"},
              {"method", method},
              {"n", n},
              {"p", p}};
}

std::string csv_triples(const std::string& method,
                        const std::vector<std::pair<std::string, double>>& meta,
                        const Vector& beta, const SymmetricMatrix& omega) {
  std::string out = "section,k,l,value\n";
  out += "method,0,0," + method + "\n";
  for (const auto& [key, v] : meta) {
    out += key + ",0,0," + format_double(v) + "\n";
  }
  for (Index j = 0; j < beta.size(); ++j) {
    if (beta(j) != 0.0)
      out += "beta," + std::to_string(j + 1) + ",0," + format_double(beta(j)) + "\n";
  }
  for (auto [k, l] : omega.lower_support()) {
    out += "omega," + std::to_string(k + 1) + "," + std::to_string(l + 1) + "," +
           format_double(omega(k, l)) + "\n";
  }
  return out;
}

}  // namespace

std::string fit_report_json(const std::string& method, Index n, Index p,
                            const QuadraticModel& model, const PathResult& path) {
  const InteractionFit& chosen = path.fits[path.chosen];
  Json doc = fit_header(method, n, p);
  doc["lambda"] = chosen.lambda;
  doc["converged"] = chosen.converged;
  doc["iterations"] = chosen.iterations;
  doc["kkt"] = chosen.kkt;
  doc["alpha"] = model.alpha;
  doc["beta"] = beta_entries(model.beta);
  doc["omega"] = omega_entries(model.omega);
  doc["path"] = path_entries(path);
  doc["residual_history"] = Json{{"primal", chosen.primal_history},
                                 {"dual", chosen.dual_history}};
  return doc.dump(2) + "\n";
}

std::string fit_report_csv(const std::string& method, Index n, Index p,
                           const QuadraticModel& model, const PathResult& path) {
  const InteractionFit& chosen = path.fits[path.chosen];
  return csv_triples(method,
                     {{"n", static_cast<double>(n)},
                      {"p", static_cast<double>(p)},
                      {"lambda", chosen.lambda},
                      {"converged", chosen.converged ? 1.0 : 0.0},
                      {"iterations", static_cast<double>(chosen.iterations)},
                      {"kkt", chosen.kkt},
                      {"alpha", model.alpha}},
                     model.beta, model.omega);
}

std::string all_pairs_report_json(Index n, Index p, const AllPairsFit& fit) {
  Json doc = fit_header("all_pairs", n, p);
  doc["lambda"] = fit.lambda;
  doc["converged"] = fit.converged;
  doc["sweeps"] = fit.sweeps;
  doc["beta"] = beta_entries(fit.beta);
  doc["omega"] = omega_entries(fit.B);
  return doc.dump(2) + "\n";
}

std::string all_pairs_report_csv(Index n, Index p, const AllPairsFit& fit) {
  return csv_triples("all_pairs",
                     {{"n", static_cast<double>(n)},
                      {"p", static_cast<double>(p)},
                      {"lambda", fit.lambda},
                      {"converged", fit.converged ? 1.0 : 0.0},
                      {"sweeps", static_cast<double>(fit.sweeps)}},
                     fit.beta, fit.B);
}

namespace {

Json stats_block(const MethodStats& s) {
  return Json{{"rate", {{"mean", s.mean_rate}, {"sd", s.sd_rate}}},
              {"loss", {{"mean", s.mean_loss}, {"sd", s.sd_loss}}},
              {"size", {{"mean", s.mean_size}, {"sd", s.sd_size}}},
              {"time_seconds", {{"mean", s.mean_time}, {"sd", s.sd_time}}},
              {"completed", s.completed}};
}

}  // namespace

std::string simulate_report_json(const ReplicationSummary& summary) {
  const SimulationSpec& spec = summary.spec;
  Json doc{{"schema_version", 1},
           {"command", "simulate"},
           {"spec",
            {{"model", model_name(spec.model)},
             {"n", spec.n},
             {"p", spec.p},
             {"law", law_name(spec.law.kind)},
             {"replications", spec.replications},
             {"seed", spec.base_seed},
             {"d", spec.d},
             {"noise_sd", spec.noise_sd}}}};
  Json methods = Json::array();
  for (const auto& run : summary.runs) {
    Json m{{"method", method_name(run.method)}};
    m.update(stats_block(run.stats));
    m["failures"] = run.failures;
    methods.push_back(std::move(m));
  }
  doc["methods"] = std::move(methods);
  return doc.dump(2) + "\n";
}

std::string simulate_report_csv(const ReplicationSummary& summary) {
  std::string out = "method,statistic,mean,sd\n";
  for (const auto& run : summary.runs) {
    const MethodStats& s = run.stats;
    const std::string name = method_name(run.method);
    auto row = [&](const char* stat, double mean, double sd) {
      out += name + "," + stat + "," + format_double(mean) + "," +
             format_double(sd) + "\n";
    };
    row("rate", s.mean_rate, s.sd_rate);
    row("loss", s.mean_loss, s.sd_loss);
    row("size", s.mean_size, s.sd_size);
    row("time_seconds", s.mean_time, s.sd_time);
  }
  return out;
}

std::string frequency_csv(const Eigen::MatrixXi& freq) {
  std::string out;
  for (Index i = 0; i < freq.rows(); ++i) {
    for (Index j = 0; j < freq.cols(); ++j) {
      if (j) out += ',';
      out += std::to_string(freq(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string experiment_report_json(
    int experiment, const std::string& method, Index n_subsample,
    int replications, std::uint64_t seed, const Eigen::MatrixXi& freq,
    const std::vector<std::pair<Index, Index>>& planted,
    const std::vector<std::string>& failures) {
  struct Cell {
    Index k, l;
    int count;
  };
  std::vector<Cell> cells;
  for (Index k = 0; k < freq.rows(); ++k)
    for (Index l = 0; l <= k; ++l)
      if (freq(k, l) > 0) cells.push_back({k, l, freq(k, l)});
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    if (a.count != b.count) return a.count > b.count;
    return std::tie(a.k, a.l) < std::tie(b.k, b.l);
  });
  if (cells.size() > 10) cells.resize(10);

  Json top = Json::array();
  for (const Cell& c : cells)
    top.push_back({{"k", c.k + 1}, {"l", c.l + 1}, {"count", c.count}});
  Json planted_json = Json::array();
  for (auto [k, l] : planted) planted_json.push_back({{"k", k + 1}, {"l", l + 1}});

  Json doc{{"schema_version", 1},
           {"command", "experiment"},
           {"experiment", experiment},
           {"method", method},
           {"p", freq.rows()},
           {"n_subsample", n_subsample},
           {"replications", replications},
           {"seed", seed},
           {"top_pairs", std::move(top)},
           {"planted", std::move(planted_json)},
           {"failures", failures}};
  return doc.dump(2) + "\n";
}

void write_text(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << content;
}

}  // namespace pie
