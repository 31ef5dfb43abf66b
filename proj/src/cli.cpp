#include "textspot/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <ostream>
#include <thread>

#include "CLI11.hpp"
#include "format.hpp"
#include "textspot/io.hpp"

namespace textspot::cli {
namespace {

namespace fs = std::filesystem;

OutputFormat parse_format(const std::string& s) {
    if (s == "json") return OutputFormat::kJson;
    if (s == "table") return OutputFormat::kTable;
    return OutputFormat::kCsv;
}

void emit(const RunConfig& c, std::ostream& out, const std::string& text) {
    if (c.output) {
        write_text_file(*c.output, text);
    } else {
        out << text;
    }
}

// --- validate -------------------------------------------------------------

std::string violations_json(const ViolationReport& r) {
    std::string s = "{\n  \"violations\": [";
    for (std::size_t i = 0; i < r.violations.size(); ++i) {
        const Violation& v = r.violations[i];
        s += i ? ",\n    " : "\n    ";
        s += "{\"id\":" + detail::quote(v.subject_id) + ",\"message\":" + detail::quote(v.message) +
             ",\"rule\":" + detail::quote(v.rule) + ",\"severity\":" + detail::quote(to_string(v.severity)) + "}";
    }
    s += r.violations.empty() ? "]\n}\n" : "\n  ]\n}\n";
    return s;
}

std::string violations_text(const ViolationReport& r, char sep) {
    std::string s;
    if (sep == ',') s = "severity,rule,id,message\n";
    for (const Violation& v : r.violations) {
        s += std::string(to_string(v.severity)) + sep + v.rule + sep + v.subject_id + sep + v.message + "\n";
    }
    return s;
}

int run_validate(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const fs::path& file = c.inputs.at(0);
    const Dataset d = file.extension() == ".json" || !(fs::is_directory(file) || file.extension() == ".txt")
                          ? load_coco_dataset(file)
                          : load_icdar_dataset(file);
    const ViolationReport report = validate(d, ValidationOptions{c.charset});
    switch (c.format) {
        case OutputFormat::kJson: emit(c, out, violations_json(report)); break;
        case OutputFormat::kTable: emit(c, out, violations_text(report, ' ')); break;
        case OutputFormat::kCsv: emit(c, out, violations_text(report, ',')); break;
    }
    if (!report.empty()) {
        err << file.string() << ": " << report.violations.size() << " violation(s), " << report.error_count()
            << " error(s)\n";
    }
    return report.empty() || c.warn_only ? kExitOk : kExitViolations;
}

// --- stats ----------------------------------------------------------------

struct StatsRow {
    std::string name;
    SubsetStats stats;
};

std::uint64_t parse_count(std::string_view field, const std::string& ctx) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw ParseError(ctx + "bad count '" + std::string(field) + "'");
    }
    return v;
}

// Rows previously written by `stats --format csv`; the TOTAL row is recomputed.
std::vector<StatsRow> read_stats_csv(const fs::path& file) {
    const std::string text = read_text_file(file);
    std::vector<StatsRow> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        const std::string ctx = file.string() + ": line " + std::to_string(line_no) + ": ";
        if (fields.size() != 4) throw ParseError(ctx + "expected subset,images,instances,legible", line_no);
        if (fields[0] == "subset" || fields[0] == "TOTAL") continue;
        rows.push_back({fields[0], {parse_count(fields[1], ctx), parse_count(fields[2], ctx), parse_count(fields[3], ctx)}});
    }
    return rows;
}

int run_stats(const RunConfig& c, std::ostream& out) {
    std::vector<StatsRow> rows;
    for (const fs::path& file : c.inputs) {
        if (file.extension() == ".csv") {
            for (StatsRow& r : read_stats_csv(file)) rows.push_back(std::move(r));
        } else if (fs::is_directory(file) || file.extension() == ".txt") {
            rows.push_back({file.stem().string(), subset_stats(load_icdar_dataset(file))});
        } else {
            rows.push_back({file.stem().string(), subset_stats(load_coco_dataset(file))});
        }
    }
    std::vector<SubsetStats> parts;
    for (const StatsRow& r : rows) parts.push_back(r.stats);
    const SubsetStats total = aggregate_stats(parts);

    std::string s;
    auto line = [&](const std::string& name, const SubsetStats& st, char sep) {
        s += name + sep + std::to_string(st.images) + sep + std::to_string(st.instances) + sep +
             std::to_string(st.legible) + "\n";
    };
    auto json_row = [](const SubsetStats& st) {
        return "\"images\":" + std::to_string(st.images) + ",\"instances\":" + std::to_string(st.instances) +
               ",\"legible\":" + std::to_string(st.legible);
    };
    switch (c.format) {
        case OutputFormat::kTable:
        case OutputFormat::kCsv: {
            const char sep = c.format == OutputFormat::kCsv ? ',' : ' ';
            s = c.format == OutputFormat::kCsv ? "subset,images,instances,legible\n" : "subset images instances legible\n";
            for (const StatsRow& r : rows) line(r.name, r.stats, sep);
            line("TOTAL", total, sep);
            break;
        }
        case OutputFormat::kJson: {
            s = "{\n  \"subsets\": [";
            for (std::size_t i = 0; i < rows.size(); ++i) {
                s += i ? ",\n    " : "\n    ";
                s += "{" + json_row(rows[i].stats) + ",\"name\":" + detail::quote(rows[i].name) + "}";
            }
            s += rows.empty() ? "],\n" : "\n  ],\n";
            s += "  \"total\": {" + json_row(total) + "}\n}\n";
            break;
        }
    }
    emit(c, out, s);
    return kExitOk;
}

// --- convert --------------------------------------------------------------

void require_directory_output(const RunConfig& c) {
    if (!c.output) throw UsageError("convert to " + c.to + " needs --output DIR");
    fs::create_directories(*c.output);
}

int run_convert(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const fs::path& in = c.inputs.at(0);
    if (c.from == "coco-text" && c.to == "icdar-quad") {
        require_directory_output(c);
        const Dataset d = load_coco_dataset(in);
        std::size_t boxed = 0;
        for (const auto& [image, instances] : group_by_image(d)) {
            for (const TextInstance& i : instances) boxed += i.polygon.size() != 4;
            write_text_file(*c.output / ("gt_" + image + ".txt"), icdar_quad_text(instances));
        }
        if (boxed) err << "note: " << boxed << " non-quad polygon(s) written as bounding boxes\n";
        return kExitOk;
    }
    if (c.from == "icdar-quad" && c.to == "coco-text") {
        emit(c, out, serialize_coco_text(load_icdar_dataset(in)));
        return kExitOk;
    }
    if (c.from == "coco-text" && c.to == "icdar-submission") {
        require_directory_output(c);
        const Dataset d = load_coco_dataset(in);
        for (const auto& [image, instances] : group_by_image(d)) {
            std::vector<Prediction> preds;
            for (const TextInstance& i : instances) {
                if (i.legible && i.transcription) preds.push_back({image, i.polygon, *i.transcription, 1.0, std::nullopt});
            }
            write_text_file(*c.output / ("res_" + image + ".txt"), export_icdar_submission(preds));
        }
        return kExitOk;
    }
    if (c.from == "pred-jsonl" && c.to == "icdar-submission") {
        require_directory_output(c);
        for (const auto& [image, preds] : parse_predictions_jsonl(read_text_file(in))) {
            write_text_file(*c.output / ("res_" + image + ".txt"), export_icdar_submission(preds));
        }
        return kExitOk;
    }
    throw UsageError("unsupported conversion " + c.from + " -> " + c.to);
}

// --- evaluate -------------------------------------------------------------

int run_evaluate(const RunConfig& c, std::ostream& out, std::ostream& err) {
    const GroundTruthByImage gt = load_ground_truth(c.gt);
    PredictionsByImage preds = load_predictions(c.pred);
    if (c.score_threshold) {
        for (auto& [image, list] : preds) {
            std::erase_if(list, [&](const Prediction& p) { return p.confidence < *c.score_threshold; });
        }
    }

    EvalOptions options;
    options.protocol = c.protocol;
    options.policy.case_fold = !c.case_sensitive;
    options.match.iou_threshold = c.iou_threshold;
    options.match.order = c.match_before_suppress ? MatchOrder::kMatchThenSuppress : MatchOrder::kSuppressThenMatch;
    options.wed_threshold = c.wed_threshold;
    options.jobs = c.jobs;
    if (const char* env = std::getenv("TEXTSPOT_EVAL_NO_PARALLEL"); env && std::string_view(env) == "1") {
        options.jobs = 1;
    }

    Lexicon lexicon;
    if (c.lexicon_mode != LexiconMode::kNone) {
        std::vector<std::string> images;
        for (const auto& entry : gt) images.push_back(entry.first);
        lexicon = load_lexicon(c.lexicon_mode, LexiconSources{c.lexicon, c.per_image_lexicon}, options.policy, images);
        options.lexicon = &lexicon;
    }

    const EvalReport report = evaluate(gt, preds, options);
    switch (c.format) {
        case OutputFormat::kJson: emit(c, out, report_to_json(report)); break;
        case OutputFormat::kTable: emit(c, out, report_to_table(report)); break;
        case OutputFormat::kCsv: emit(c, out, report_to_csv(report)); break;
    }
    for (const InstanceError& e : report.errors) {
        err << "warning: image " << e.image_id << " " << e.kind << " #" << e.index << ": " << e.message << "\n";
    }
    (c.output ? out : err) << summary_line(report) << "\n";
    return kExitOk;
}

}  // namespace

std::optional<RunConfig> parse_args(int argc, const char* const* argv, std::ostream& out) {
    RunConfig c;
    CLI::App app{"Text-spotting annotation tooling and end-to-end evaluation", "textspot"};
    app.require_subcommand(1);

    auto* validate_cmd = app.add_subcommand("validate", "Check an annotation file; exit 1 on any violation");
    std::string charset = "printable-ascii";
    validate_cmd->add_option("input", c.inputs, "COCO-like JSON annotation (or ICDAR ground truth)")
        ->required()
        ->expected(1)
        ->check(CLI::ExistingPath);
    validate_cmd->add_flag("--warn-only", c.warn_only, "Report violations but exit 0");
    validate_cmd->add_option("--charset", charset, "Transcription charset policy")
        ->check(CLI::IsMember({"printable-ascii", "alnum", "any"}));

    auto* stats_cmd = app.add_subcommand("stats", "Per-file image/instance/legible counts plus a TOTAL row");
    stats_cmd->add_option("inputs", c.inputs, "Annotation files, or CSV rows from an earlier `stats --format csv`")
        ->required()
        ->check(CLI::ExistingPath);

    auto* convert_cmd = app.add_subcommand("convert", "Convert between annotation and submission formats");
    const std::vector<std::string> kFormats{"coco-text", "icdar-quad", "icdar-submission", "pred-jsonl"};
    convert_cmd->add_option("input", c.inputs, "Input file or directory")->required()->expected(1)->check(CLI::ExistingPath);
    convert_cmd->add_option("--from", c.from, "Input format")->required()->check(CLI::IsMember(kFormats));
    convert_cmd->add_option("--to", c.to, "Output format")->required()->check(CLI::IsMember(kFormats));

    auto* eval_cmd = app.add_subcommand(
        "evaluate",
        "Score predictions against ground truth. Precision of an empty prediction set is reported as 0.");
    std::string protocol = "e2e";
    std::string lexicon_mode = "none";
    std::string per_image;
    double score_threshold = 0.0;
    c.jobs = std::max(1u, std::thread::hardware_concurrency());
    eval_cmd->add_option("--gt", c.gt, "Ground truth: COCO-like JSON, ICDAR .txt file or directory")
        ->required()
        ->check(CLI::ExistingPath);
    eval_cmd->add_option("--pred", c.pred, "Predictions: JSONL file or directory of ICDAR submission files")
        ->required()
        ->check(CLI::ExistingPath);
    eval_cmd->add_option("--protocol", protocol, "e2e or word-spotting")->check(CLI::IsMember({"e2e", "word-spotting"}));
    eval_cmd->add_option("--iou", c.iou_threshold, "IoU match threshold")->check(CLI::Range(0.0, 1.0));
    eval_cmd->add_option("--lexicon-mode", lexicon_mode, "Lexicon regime")
        ->check(CLI::IsMember({"none", "strong", "weak", "generic"}));
    auto* lex_opt = eval_cmd->add_option("--lexicon", c.lexicon, "Word list file (weak/generic)")->check(CLI::ExistingFile);
    auto* per_image_opt = eval_cmd->add_option("--per-image-lexicon", per_image,
                                               "Directory of <image_id>.txt or JSON map (strong)")
                              ->check(CLI::ExistingPath);
    lex_opt->excludes(per_image_opt);
    eval_cmd->add_option("--wed-threshold", c.wed_threshold, "Reject lexicon matches above this normalized cost");
    auto* score_opt = eval_cmd->add_option("--score-threshold", score_threshold, "Drop predictions below this confidence");
    eval_cmd->add_flag("--case-sensitive", c.case_sensitive, "Compare transcriptions without case folding");
    eval_cmd->add_flag("--match-before-suppress", c.match_before_suppress,
                       "Match care regions before don't-care absorption");
    eval_cmd->add_option("--jobs,-j", c.jobs, "Worker threads")->check(CLI::PositiveNumber);

    // Each subcommand keeps its own format/output storage.
    std::string validate_format = "json", stats_format = "table", eval_format = "json";
    std::string validate_output, stats_output, convert_output, eval_output;
    for (auto [sub, fmt, outp] : {std::tuple{validate_cmd, &validate_format, &validate_output},
                                  std::tuple{stats_cmd, &stats_format, &stats_output},
                                  std::tuple{convert_cmd, static_cast<std::string*>(nullptr), &convert_output},
                                  std::tuple{eval_cmd, &eval_format, &eval_output}}) {
        sub->add_option("--output,-o", *outp, "Write the result to this path instead of stdout");
        if (fmt) sub->add_option("--format", *fmt, "Report format")->check(CLI::IsMember({"json", "table", "csv"}));
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return std::nullopt;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return std::nullopt;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    if (validate_cmd->parsed()) {
        c.command = Command::kValidate;
        c.charset = charset == "alnum" ? CharsetPolicy::kAlphanumeric
                                       : charset == "any" ? CharsetPolicy::kAny : CharsetPolicy::kPrintableAscii;
        c.format = parse_format(validate_format);
        if (!validate_output.empty()) c.output = validate_output;
    } else if (stats_cmd->parsed()) {
        c.command = Command::kStats;
        c.format = parse_format(stats_format);
        if (!stats_output.empty()) c.output = stats_output;
    } else if (convert_cmd->parsed()) {
        c.command = Command::kConvert;
        if (!convert_output.empty()) c.output = convert_output;
        if (c.from == c.to) throw UsageError("--from and --to name the same format");
    } else {
        c.command = Command::kEvaluate;
        c.format = parse_format(eval_format);
        if (!eval_output.empty()) c.output = eval_output;
        c.protocol = protocol == "e2e" ? Protocol::kEndToEnd : Protocol::kWordSpotting;
        c.lexicon_mode = parse_lexicon_mode(lexicon_mode);
        if (!per_image.empty()) c.per_image_lexicon = per_image;
        if (score_opt->count()) c.score_threshold = score_threshold;
        if (!(c.iou_threshold > 0.0 && c.iou_threshold < 1.0)) throw UsageError("--iou must lie in (0, 1)");
        switch (c.lexicon_mode) {
            case LexiconMode::kNone:
                if (!c.lexicon.empty() || c.per_image_lexicon) {
                    throw UsageError("--lexicon/--per-image-lexicon need --lexicon-mode");
                }
                break;
            case LexiconMode::kStrong:
                if (!c.per_image_lexicon) throw UsageError("--lexicon-mode strong needs --per-image-lexicon");
                break;
            case LexiconMode::kWeak:
            case LexiconMode::kGeneric:
                if (c.lexicon.empty()) throw UsageError("--lexicon-mode " + lexicon_mode + " needs --lexicon");
                break;
        }
    }
    return c;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
    try {
        switch (config.command) {
            case Command::kValidate: return run_validate(config, out, err);
            case Command::kStats: return run_stats(config, out);
            case Command::kConvert: return run_convert(config, out, err);
            case Command::kEvaluate: return run_evaluate(config, out, err);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const Error& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const fs::filesystem_error& e) {
        err << "input error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitUsage;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    std::optional<RunConfig> config;
    try {
        config = parse_args(argc, argv, out);
    } catch (const Error& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    }
    if (!config) return kExitOk;
    return run(*config, out, err);
}

}  // namespace textspot::cli
