#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcf/diagnostics.hpp"

namespace qcf {

/// Shortest round-trip decimal form; "nan", "inf", "-inf" for non-finite.
std::string format_double(double v);

/// Invariants table columns: the fixed prefix, one column per tracer loop,
/// then the extras (C1_trace, C2_cLam1, planar Casimirs, rho_tot entries,
/// floor_hits, norm_err).
std::vector<std::string> invariant_columns(std::size_t loops, int n);
std::vector<std::string> invariant_row(const DiagnosticsRecord& r, std::size_t loops, int n);

/// Appends one line per record and flushes it, so a run that dies leaves a
/// readable prefix.
class InvariantsWriter {
 public:
  InvariantsWriter(const std::filesystem::path& path, std::size_t loops, int n);
  void write(const DiagnosticsRecord& r);
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
  std::size_t loops_;
  int n_;
};

/// Writes <stem>.bin (little-endian float64, fields concatenated, x fastest)
/// and the <stem>.json sidecar. Returns both paths.
std::vector<std::filesystem::path> write_snapshot(const std::filesystem::path& dir, const std::string& stem,
                                                  const State& s);

/// Field list in file order, as recorded in the sidecar.
std::vector<std::string> snapshot_fields(const State& s);

/// Reads a snapshot back into named fields (used by tests and tooling).
std::vector<std::pair<std::string, std::vector<double>>> read_snapshot(const std::filesystem::path& bin);

std::string sha256_file(const std::filesystem::path& p);

/// Run manifest: written before the first step, rewritten (atomically) on
/// every status change, finalized with the checksummed file inventory.
class RunManifest {
 public:
  RunManifest(std::filesystem::path dir, nlohmann::ordered_json config);
  void start();
  void finish(const std::string& status, const std::string& message, long long steps, double t_final);
  void add_file(const std::filesystem::path& p);
  std::filesystem::path path() const { return dir_ / "manifest.json"; }

 private:
  void write() const;
  std::filesystem::path dir_;
  nlohmann::ordered_json doc_;
  std::vector<std::filesystem::path> files_;
};

/// Two-column (t, value) extraction from an invariants table. Throws
/// config-error listing the available names when `quantity` is absent.
std::string extract_series(const std::filesystem::path& csv, const std::string& quantity);

std::string code_version();

}  // namespace qcf
