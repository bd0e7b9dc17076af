#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ptcure/data.hpp"
#include "ptcure/mcmc.hpp"
#include "ptcure/simulate.hpp"
#include "ptcure/summaries.hpp"

namespace ptcure::io {

// 17 significant digits, enough to round-trip any double, so reruns of a
// deterministic pipeline diff clean.
std::string format_value(double value);

// FNV-1a over the raw bytes of a file; recorded in manifests so an input
// swap is detectable.
std::uint64_t fnv1a64_file(const std::string& path);

// CSV with header `time,event` followed by covariate columns prefixed x_
// or z_.  A name appearing under both prefixes is fine in general but gets
// rejected when short_followup is set: with limited follow up the model is
// only identified when the two blocks share no covariate.
SurvivalDataset read_dataset_csv(const std::string& path,
                                 bool short_followup = false);
void write_dataset_csv(const std::string& path, const SurvivalDataset& data);

// Ground-truth sidecar of a simulated dataset: cure flags and raw failure
// times, one row per subject.
void write_simulation_sidecar(const std::string& path,
                              const GeneratedDataset& generated);

void write_draws_csv(const std::string& path, const ChainOutput& chain);
// Rebuilds the column layout (basis size, covariate counts) from the
// header; run metadata that a CSV cannot carry stays at defaults.
ChainOutput read_draws_csv(const std::string& path);

void write_summary_csv(const std::string& path, const SummaryResult& summary);
void write_summary_json(const std::string& path, const SummaryResult& summary);
void write_geweke_csv(const std::string& path,
                      const std::vector<GewekeRow>& rows);
void write_curve_csv(const std::string& path, const CurveBand& band);
// One column per replicate on a shared grid; undefined points are "nan".
void write_curve_matrix_csv(const std::string& path,
                            const Eigen::VectorXd& grid,
                            const Eigen::MatrixXd& curves);
void write_study_table_csv(const std::string& path, const StudyResult& study,
                           double cure_fraction, int setting);
void write_replicate_estimates_csv(const std::string& path,
                                   const StudyResult& study);

// Plain key=value scenario description; '#' starts a comment.  Truth
// values default from the built-in tables for the requested setting and
// cure fraction unless beta0/beta/gamma are all given.
ScenarioConfig read_scenario_file(const std::string& path);

// A named covariate at two levels, every other covariate at its sample
// median, resolved into full profiles for curve evaluation.
struct ResolvedContrast {
  std::string covariate;
  double high = 1.0;
  double low = 0.0;
  CovariateProfile group;
  CovariateProfile reference;
};

// Everything needed to reproduce a run: resolved configuration, seeds and
// the input fingerprint.
struct RunManifest {
  std::string subcommand;
  std::string status = "ok";
  std::uint64_t seed = 0;
  std::string input_path;
  std::uint64_t input_hash = 0;
  ModelConfig model;
  ChainConfig chain;
  bool has_scenario = false;
  ScenarioConfig scenario;
  bool has_contrast = false;
  ResolvedContrast contrast;
  std::vector<std::string> outputs;
};

void write_manifest(const std::string& path, const RunManifest& manifest);
RunManifest read_manifest(const std::string& path);

}  // namespace ptcure::io
