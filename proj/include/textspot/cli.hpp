#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "textspot/annotation.hpp"
#include "textspot/error.hpp"
#include "textspot/lexicon.hpp"
#include "textspot/metrics.hpp"

namespace textspot::cli {

enum class Command { kValidate, kStats, kConvert, kEvaluate };
enum class OutputFormat { kJson, kTable, kCsv };

inline constexpr int kExitOk = 0;
inline constexpr int kExitViolations = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInput = 3;

class UsageError : public Error {
public:
    using Error::Error;
};

struct RunConfig {
    Command command = Command::kEvaluate;
    std::vector<std::filesystem::path> inputs;

    // evaluate
    std::filesystem::path gt;
    std::filesystem::path pred;
    Protocol protocol = Protocol::kEndToEnd;
    double iou_threshold = 0.5;
    LexiconMode lexicon_mode = LexiconMode::kNone;
    std::vector<std::filesystem::path> lexicon;
    std::optional<std::filesystem::path> per_image_lexicon;
    double wed_threshold = 0.5;
    std::optional<double> score_threshold;
    bool case_sensitive = false;
    bool match_before_suppress = false;
    unsigned jobs = 1;

    // validate
    bool warn_only = false;
    CharsetPolicy charset = CharsetPolicy::kPrintableAscii;

    // convert
    std::string from;
    std::string to;

    std::optional<std::filesystem::path> output;
    OutputFormat format = OutputFormat::kJson;
};

/// Throws UsageError on bad flags. Returns nullopt after printing help.
std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out);

/// Executes a parsed configuration and returns the process exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run with exit-code mapping: 2 usage, 3 input errors.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace textspot::cli
