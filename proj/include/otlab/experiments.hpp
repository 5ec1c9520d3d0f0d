#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace otlab {

// Flat `key = value` config with bracketed [section] headers; keys inside a
// section are addressed as "section.key".
struct ExperimentConfig {
    std::map<std::string, std::string> kv;
    std::string source_text;

    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig parse(const std::string& text);

    bool has(const std::string& key) const;
    std::string str(const std::string& key, const std::string& dflt = "") const;
    double num(const std::string& key, double dflt) const;
    long integer(const std::string& key, long dflt) const;
    std::vector<double> list(const std::string& key) const;

    std::uint64_t hash() const; // FNV-1a of the raw config text
};

// Exit statuses: 0 success, 1 invariant failure (named on stdout),
// 2 unknown experiment / malformed config, 3 I/O failure.
int run_experiment(const std::string& config_path);

int plot_csv(const std::string& csv_path, const std::string& xcol,
             const std::string& ycol, const std::string& out_path,
             bool log_axes);

// Runs the cross-module invariant suites; 0 when everything holds.
int selftest();

} // namespace otlab
