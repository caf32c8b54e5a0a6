#pragma once

#include <string>

#include "pie/evaluation.hpp"
#include "pie/simulation.hpp"
#include "pie/tuning.hpp"

namespace pie {

// Report payloads.  JSON documents carry schema_version 1 and keep insertion
// order, so a fixed input yields byte-identical files.  Matrix indices are
// 1-based with l <= k.

std::string fit_report_json(const std::string& method, Index n, Index p,
                            const QuadraticModel& model, const PathResult& path);
std::string fit_report_csv(const std::string& method, Index n, Index p,
                           const QuadraticModel& model, const PathResult& path);

std::string all_pairs_report_json(Index n, Index p, const AllPairsFit& fit);
std::string all_pairs_report_csv(Index n, Index p, const AllPairsFit& fit);

std::string simulate_report_json(const ReplicationSummary& summary);
std::string simulate_report_csv(const ReplicationSummary& summary);

// Frequency matrix as a bare integer grid, one row per line.
std::string frequency_csv(const Eigen::MatrixXi& freq);

// Sidecar with the ten most frequent pairs (count desc, then (k, l) asc)
// and the planted pairs when present.
std::string experiment_report_json(
    int experiment, const std::string& method, Index n_subsample,
    int replications, std::uint64_t seed, const Eigen::MatrixXi& freq,
    const std::vector<std::pair<Index, Index>>& planted,
    const std::vector<std::string>& failures);

void write_text(const std::string& path, const std::string& content);

}  // namespace pie
