#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "sisstab/certify.hpp"
#include "sisstab/oracle.hpp"

namespace sisstab::cli {

enum class Command { Analyze, Certify, Sample, Simulate, Verify };
enum class Format { Text, Json };

inline constexpr int kExitStable = 0;
inline constexpr int kExitNotStable = 1;
inline constexpr int kExitIndeterminate = 2;
inline constexpr int kExitError = 3;

struct RunConfig {
    Command command = Command::Analyze;
    std::string model_path;
    DegreeTuple slack;          // empty = zeros
    int auto_slack_max = -1;    // < 0 disables escalation
    std::vector<int> grid;      // per-direction sample counts
    std::vector<int> sites;     // simulate: ring sizes
    std::vector<std::string> init;  // raw "--init" items, see parse_init
    SimulationOptions sim;
    std::string certificate_path;
    std::string output_path;
    Format format = Format::Text;
    AnalyzeOptions analyze;

    /// Throws Error when a field the command needs is missing or malformed.
    void validate() const;
};

int exit_code(VerdictStatus s);

/// Each command writes its report to `out` (and files named in cfg) and
/// returns the process exit code. Library errors propagate as exceptions.
int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_certify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_sample(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Parses an "--init" item "k1,k2:state:value" (1-based site and state) into
/// 0-based entries. State '*' sets every one of the n0 states.
std::vector<InitEntry> parse_init(const std::string& spec, int n0);

/// Full command line front end; never throws.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace sisstab::cli
