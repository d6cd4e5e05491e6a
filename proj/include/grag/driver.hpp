#pragma once

#include <filesystem>
#include <string>

#include "grag/config.hpp"

namespace grag::driver {

/// Executes a full run into `out_dir` (records.jsonl, timings.jsonl,
/// manifest.json, metrics.{jsonl,txt}, artifacts/). Returns the manifest
/// JSON text.
std::string run(const config::RunConfig& config, const std::filesystem::path& out_dir);

/// Renders a previously written run directory. `table` and `machine` return
/// the artifact text; `plotdata` writes one series file per configuration
/// under <run_dir>/plot and returns the file listing.
std::string report(const std::filesystem::path& run_dir, const std::string& format);

/// Dumps every stored artifact bundle (docset, graph, communities, context,
/// prompt, response) for one case id.
std::string inspect(const std::filesystem::path& run_dir, const std::string& case_id);

/// Converts an upstream benchmark release file to the canonical test-set
/// format. Returns a summary (counts plus per-line diagnostics) as JSON text.
std::string ingest(const std::filesystem::path& upstream, corpus::TaskKind task,
                   const std::filesystem::path& out_path);

/// Removes cached responses; returns a one-line summary.
std::string cache_purge(const std::filesystem::path& cache_dir);

std::string version();

}  // namespace grag::driver
