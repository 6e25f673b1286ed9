#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "oiaudit/report/scenario_io.hpp"
#include "oiaudit/simulate/generator.hpp"

namespace oiaudit::report {

/// Layout of a `simulate` output directory.
struct SimulationPaths {
    std::filesystem::path root;

    [[nodiscard]] std::filesystem::path true_dir() const { return root / "true"; }
    [[nodiscard]] std::filesystem::path reported_dir() const { return root / "reported"; }
    [[nodiscard]] std::filesystem::path ledger() const { return root / "truth_ledger.tsv"; }
    [[nodiscard]] std::filesystem::path oi_reports() const { return root / "oi_reports.tsv"; }
    [[nodiscard]] std::filesystem::path scenario() const { return root / "scenario.json"; }
};

/// Writes both streams as capture files (channel "sim"), the truth ledger,
/// the OI report table and a copy of the scenario. Existing files are
/// replaced.
void write_simulation(const SimulationPaths& out, const ScenarioFile& scenario, const sim::Scenario& result);

void write_truth_ledger(const std::filesystem::path& path, const sim::TruthLedger& truth);
void write_oi_reports(const std::filesystem::path& path, const sim::TruthLedger& truth);
/// Reads both truth files back. Throws DataError on malformed rows.
[[nodiscard]] sim::TruthLedger read_truth(const SimulationPaths& in);

struct VerifyCheck {
    std::string name;
    bool ok = true;
    std::string detail;
};

struct VerifyResult {
    std::vector<VerifyCheck> checks;
    std::string signature;

    [[nodiscard]] bool ok() const noexcept;
    [[nodiscard]] std::string text() const;
};

/// Re-audits a simulation directory and checks it against the oracles the
/// generator guarantees: the true stream reconciles at every resolution,
/// stream volumes match the truth ledger, and the reported stream shows
/// the signature its policy implies.
[[nodiscard]] VerifyResult verify_simulation(const SimulationPaths& in);

}  // namespace oiaudit::report
