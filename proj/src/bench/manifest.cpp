#include "bpm/bench/manifest.hpp"

#include <Eigen/Core>
#include <fmt/core.h>
#include <openssl/opensslv.h>

#include "bpm/common/hash.hpp"
#include "bpm/common/random.hpp"
#include "bpm/common/text.hpp"
#include "bpm/simd/kernels.hpp"

namespace bpm::bench {

std::map<std::string, std::string> library_versions() {
  return {
      {"eigen", fmt::format("{}.{}.{}", EIGEN_WORLD_VERSION, EIGEN_MAJOR_VERSION, EIGEN_MINOR_VERSION)},
      {"fmt", fmt::format("{}.{}.{}", FMT_VERSION / 10000, FMT_VERSION / 100 % 100, FMT_VERSION % 100)},
      {"openssl", OPENSSL_VERSION_TEXT},
      {"nlohmann_json", fmt::format("{}.{}.{}", NLOHMANN_JSON_VERSION_MAJOR, NLOHMANN_JSON_VERSION_MINOR,
                                    NLOHMANN_JSON_VERSION_PATCH)},
#if defined(__clang__)
      {"compiler", "clang " __clang_version__},
#elif defined(__GNUC__)
      {"compiler", "gcc " __VERSION__},
#else
      {"compiler", "unknown"},
#endif
  };
}

nlohmann::json build_manifest(const ExperimentConfig& config, const std::string& out_dir,
                              const std::vector<std::string>& files, std::size_t report_count, bool incomplete) {
  const std::string text = canonical_text(config);
  nlohmann::json seeds = nlohmann::json::object();
  for (const int year : config.vintages) {
    const auto y = std::to_string(year);
    for (const auto* tag : {"sample/", "fs/", "split/", "smote/"}) {
      seeds[tag + y] = derive_seed(config.seed, tag + y);
    }
  }
  for (const auto& spec : model_specs(config)) seeds["model/" + std::string(models::to_string(spec.kind))] = spec.seed;

  auto listing = nlohmann::json::array();
  for (const auto& f : files) {
    const std::string content = read_file(out_dir + "/" + f);
    listing.push_back({{"path", f}, {"bytes", content.size()}, {"sha256", sha256_hex(content)}});
  }
  return {{"tool", "bpm"},
          {"config_sha256", sha256_hex(text)},
          {"config", text},
          {"seed", config.seed},
          {"seed_scheme", "splitmix64(root ^ fnv1a64(tag))"},
          {"derived_seeds", seeds},
          {"libraries", library_versions()},
          {"simd_backend", simd::backend_name(simd::active_backend())},
          {"reports", report_count},
          {"incomplete", incomplete},
          {"files", listing}};
}

}  // namespace bpm::bench
