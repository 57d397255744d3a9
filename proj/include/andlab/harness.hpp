#pragma once

#include "andlab/config.hpp"
#include "andlab/level_stats.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace andlab {

struct PhaseTiming {
    std::string name;
    double seconds = 0.0;
};

struct RunManifest {
    std::uint64_t config_checksum = 0;
    std::vector<PhaseTiming> timings;
    std::vector<std::pair<std::string, std::uint64_t>> files; // path, checksum
    bool all_pass = true;

    void note_file(const std::string& path); // checksums the file now
    void write(const std::string& path) const;
    void merge(const RunManifest& other);
};

std::uint64_t fnv1a_bytes(const void* data, std::size_t n);
std::uint64_t fnv1a_file(const std::string& path);

// Deterministic parallel map over realization indices [lo, hi): static
// contiguous chunks, one per worker; fn(index) must only write state owned by
// that index so aggregation order cannot matter.
void parallel_for_index(std::int64_t lo, std::int64_t hi, int threads,
                        const std::function<void(std::int64_t)>& fn);

std::string ids_table_path(const ExperimentConfig& cfg);
std::string tail_table_path(const ExperimentConfig& cfg);

// Each phase returns its manifest fragment; all_pass reflects the invoked
// TestReports only.
RunManifest run_ids_build(const ExperimentConfig& cfg);
RunManifest run_bulk_stats(const ExperimentConfig& cfg);
RunManifest run_edge_stats(const ExperimentConfig& cfg);
RunManifest run_spacings(const ExperimentConfig& cfg);
RunManifest run_wegner_minami(const ExperimentConfig& cfg);
RunManifest run_clt(const ExperimentConfig& cfg);
RunManifest run_reduce(const ExperimentConfig& cfg);
RunManifest run_experiment(const ExperimentConfig& cfg); // all phases in order

// Shared building blocks, exposed for tests and the acceptance binary.
SpectrumSample solve_realization(const ExperimentConfig& cfg, int side,
                                 std::int64_t realization);
double anchor_energy(const ExperimentConfig& cfg, const IDSTable& table);
void write_test_report(std::ostream& out, const TestReport& r);

} // namespace andlab
