#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bpm/bench/config.hpp"

namespace bpm::bench {

// Name -> version of every library linked into the toolkit, plus the
// compiler.
std::map<std::string, std::string> library_versions();

// Run manifest: config text and hash, root and derived seeds, library
// versions, the active SIMD backend, and every artifact with its SHA-256.
nlohmann::json build_manifest(const ExperimentConfig& config, const std::string& out_dir,
                              const std::vector<std::string>& files, std::size_t report_count, bool incomplete);

}  // namespace bpm::bench
