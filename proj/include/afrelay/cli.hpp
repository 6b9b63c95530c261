#pragma once

// Configuration parsing, result writers and subcommand drivers.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "afrelay/experiments.hpp"

namespace afrelay::cli {

inline constexpr const char* kVersion = "0.3.0";

enum class Command { gamma_opt, allocate, sweep, bussgang, ser };
enum class Format { csv, json };

struct RunManifest {
    Command command = Command::sweep;
    std::string config_path;  // empty: built-in defaults
    std::string output_path;  // empty: standard output
    Format format = Format::csv;
    std::optional<std::uint64_t> seed_override;
    int jobs = 1;
};

/// Parses `key = value` lines ('#' starts a comment). Unknown keys and bad
/// values raise config_error carrying the line number; absent keys keep
/// their defaults.
SweepConfig parse_config_text(const std::string& text);
SweepConfig parse_config(const std::string& path);

/// Shortest round-trip-safe decimal form used in every writer.
std::string format_number(double x);

void write_sweep_csv(std::ostream& os, const SweepResult& result);
void write_sweep_json(std::ostream& os, const SweepResult& result);
/// Reads rows written by write_sweep_csv.
std::vector<SweepRow> read_sweep_csv(std::istream& is);

struct GammaOptRecord {
    double mu_db;
    double gamma_opt;
    double gamma_opt_db;
    double residual;  // 1/sqrt(g) - sqrt(pi)/(2 mu) erfc(1/sqrt(g)) at the root
};

GammaOptRecord gamma_opt_record(double mu_db);

/// Subcommand drivers.  Each returns the process exit status and reports
/// failures on `err`.
int cmd_gamma_opt(double mu_db, std::ostream& out, std::ostream& err);
int cmd_allocate(const RunManifest& m, double snr_db, std::ostream& err);
int cmd_sweep(const RunManifest& m, std::ostream& err);
int cmd_bussgang(const RunManifest& m, const std::vector<double>& gammas, int n_samples,
                 std::ostream& err);
int cmd_ser(const RunManifest& m, long long n_symbols, Estimation estimation, std::ostream& err);

}  // namespace afrelay::cli
