#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include <nlohmann/json.hpp>

#include "survsplit/mc_harness.hpp"
#include "survsplit/risk_model.hpp"

namespace survsplit {

/// Shortest round-trip decimal form; "nan"/"inf" for non-finite values.
std::string format_double(double x);

/// Parses a `time,event,z` CSV. Throws Parse with a 1-based line number on
/// malformed input (including an empty file).
Dataset read_dataset_csv(std::istream& in);
Dataset read_dataset_csv(const std::filesystem::path& path);
void write_dataset_csv(std::ostream& out, std::span<const Subject> data);

/// `method,n,a,rep,c_hat,stat,status,runtime_us`, plus a trailing
/// `data_checksum` column when requested.
void write_records_csv(std::ostream& out, std::span<const ReplicateRecord> records,
                       bool with_checksum = false);
void write_summary_csv(std::ostream& out, std::span<const EcpSummary> summaries);
void write_histogram_csv(std::ostream& out, std::span<const EcpSummary> summaries);
void write_variance_csv(std::ostream& out, std::span<const VarianceRow> rows);

nlohmann::ordered_json records_json(std::span<const ReplicateRecord> records,
                                    bool with_checksum = false);
nlohmann::ordered_json summary_json(std::span<const EcpSummary> summaries);
nlohmann::ordered_json histogram_json(std::span<const EcpSummary> summaries);
nlohmann::ordered_json variance_json(std::span<const VarianceRow> rows);
nlohmann::ordered_json config_json(const ExperimentConfig& cfg);
nlohmann::ordered_json split_result_json(const SplitResult& r);

/// Writes every (name, contents) pair into `dir` through temporary files
/// and renames them into place only after all writes succeeded.
void write_files_atomically(const std::filesystem::path& dir,
                            std::span<const std::pair<std::string, std::string>> files);

}  // namespace survsplit
