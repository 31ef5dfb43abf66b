#include "textspot/lexicon.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "textspot/error.hpp"
#include "textspot/utf8.hpp"

namespace textspot {
namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LexiconError("cannot read lexicon file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Lexicon::WordList build_word_list(const std::vector<std::string>& raw, const NormalizationPolicy& policy) {
    Lexicon::WordList list;
    std::unordered_set<std::string> seen;
    for (const std::string& w : raw) {
        std::string n = normalize_transcription(w, policy);
        if (n.empty() || !seen.insert(n).second) continue;
        list.code_points.push_back(utf8::decode(n));
        list.words.push_back(std::move(n));
    }
    return list;
}

bool is_ascii_alnum(char32_t c) {
    return (c >= U'0' && c <= U'9') || (c >= U'A' && c <= U'Z') || (c >= U'a' && c <= U'z');
}

char32_t fold(char32_t c) { return (c >= U'a' && c <= U'z') ? c - U'a' + U'A' : c; }

double weighted_distance(const std::u32string& pred, const CharProbMatrix& probs, const std::u32string& cand) {
    const std::size_t m = cand.size();
    std::vector<double> prev(m + 1);
    std::vector<double> cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<double>(j);
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double del = probs.probability(i, pred[i]);
        cur[0] = prev[0] + del;
        for (std::size_t j = 1; j <= m; ++j) {
            const char32_t c = cand[j - 1];
            const double sub = pred[i] == c ? 0.0 : 1.0 - probs.probability(i, c);
            cur[j] = std::min({prev[j] + del, cur[j - 1] + 1.0, prev[j - 1] + sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

std::size_t unit_distance(const std::u32string& a, const std::u32string& b) {
    std::vector<std::size_t> prev(b.size() + 1);
    std::vector<std::size_t> cur(b.size() + 1);
    std::iota(prev.begin(), prev.end(), std::size_t{0});
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

}  // namespace

CharProbMatrix::CharProbMatrix(std::u32string alphabet, std::vector<std::vector<double>> rows)
    : alphabet_(std::move(alphabet)), rows_(std::move(rows)) {
    std::u32string sorted = alphabet_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw LexiconError("character probability alphabet repeats a character");
    }
    for (std::size_t r = 0; r < rows_.size(); ++r) {
        const auto& row = rows_[r];
        if (row.size() != alphabet_.size()) {
            throw LexiconError("probability row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                               " entries, alphabet has " + std::to_string(alphabet_.size()));
        }
        double sum = 0.0;
        for (double p : row) {
            if (!(p >= 0.0 && p <= 1.0)) throw LexiconError("probability row " + std::to_string(r) + " leaves [0, 1]");
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-6) {
            throw LexiconError("probability row " + std::to_string(r) + " sums to " + std::to_string(sum));
        }
    }
}

CharProbMatrix CharProbMatrix::from_utf8(std::string_view alphabet, std::vector<std::vector<double>> rows) {
    return CharProbMatrix(utf8::decode(alphabet), std::move(rows));
}

double CharProbMatrix::probability(std::size_t row, char32_t c) const noexcept {
    const auto pos = alphabet_.find(c);
    if (pos == std::u32string::npos || row >= rows_.size()) return 0.0;
    return rows_[row][pos];
}

std::string_view to_string(LexiconMode m) noexcept {
    switch (m) {
        case LexiconMode::kNone: return "none";
        case LexiconMode::kStrong: return "strong";
        case LexiconMode::kWeak: return "weak";
        case LexiconMode::kGeneric: return "generic";
    }
    return "none";
}

LexiconMode parse_lexicon_mode(std::string_view name) {
    for (LexiconMode m : {LexiconMode::kNone, LexiconMode::kStrong, LexiconMode::kWeak, LexiconMode::kGeneric}) {
        if (to_string(m) == name) return m;
    }
    throw LexiconError("unknown lexicon mode '" + std::string(name) + "'");
}

Lexicon::Lexicon(LexiconMode mode, const std::vector<std::string>& global_words,
                 const std::map<std::string, std::vector<std::string>>& per_image_words,
                 const NormalizationPolicy& policy)
    : mode_(mode), policy_(policy), global_(build_word_list(global_words, policy)) {
    for (const auto& [image, words] : per_image_words) per_image_.emplace(image, build_word_list(words, policy));
}

std::map<std::string, std::vector<std::string>> Lexicon::per_image_words() const {
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& [image, list] : per_image_) out.emplace(image, list.words);
    return out;
}

const Lexicon::WordList& Lexicon::words_for(const std::string& image_id) const {
    if (mode_ != LexiconMode::kStrong) return global_;
    const auto it = per_image_.find(image_id);
    if (it == per_image_.end()) throw LexiconError("no per-image vocabulary for image '" + image_id + "'");
    return it->second;
}

std::vector<std::string> read_word_list(std::string_view text) {
    constexpr std::string_view kBom = "\xEF\xBB\xBF";
    if (text.substr(0, kBom.size()) == kBom) text.remove_prefix(kBom.size());
    std::vector<std::string> words;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string_view::npos) continue;
        const auto e = line.find_last_not_of(" \t\r");
        words.emplace_back(line.substr(b, e - b + 1));
    }
    return words;
}

std::map<std::string, std::vector<std::string>> parse_per_image_lexicon_json(std::string_view document) {
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(document.begin(), document.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("malformed lexicon JSON at byte ") + std::to_string(e.byte), std::nullopt,
                         e.byte);
    }
    if (!root.is_object()) throw SchemaError("per-image lexicon must be a JSON object", "");
    std::map<std::string, std::vector<std::string>> out;
    for (const auto& [image, words] : root.items()) {
        if (!words.is_array()) throw SchemaError("lexicon for image '" + image + "' must be an array", image);
        auto& list = out[image];
        for (const auto& w : words) {
            if (!w.is_string()) throw SchemaError("lexicon for image '" + image + "' has a non-string word", image);
            list.push_back(w.get<std::string>());
        }
    }
    return out;
}

Lexicon load_lexicon(LexiconMode mode, const LexiconSources& sources, const NormalizationPolicy& policy,
                     std::span<const std::string> required_images) {
    std::vector<std::string> global;
    std::map<std::string, std::vector<std::string>> per_image;
    switch (mode) {
        case LexiconMode::kNone:
            return Lexicon();
        case LexiconMode::kStrong: {
            if (!sources.per_image) throw LexiconError("strong lexicon mode needs a per-image vocabulary");
            const auto& path = *sources.per_image;
            if (std::filesystem::is_directory(path)) {
                std::vector<std::filesystem::path> files;
                for (const auto& entry : std::filesystem::directory_iterator(path)) {
                    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
                }
                std::sort(files.begin(), files.end());
                for (const auto& f : files) per_image[f.stem().string()] = read_word_list(read_file(f));
            } else {
                per_image = parse_per_image_lexicon_json(read_file(path));
            }
            for (const std::string& image : required_images) {
                if (!per_image.contains(image)) {
                    throw LexiconError("no per-image vocabulary for image '" + image + "'");
                }
            }
            break;
        }
        case LexiconMode::kWeak:
        case LexiconMode::kGeneric:
            if (sources.word_files.empty()) {
                throw LexiconError(std::string(to_string(mode)) + " lexicon mode needs a word list file");
            }
            for (const auto& f : sources.word_files) {
                auto words = read_word_list(read_file(f));
                global.insert(global.end(), std::make_move_iterator(words.begin()),
                              std::make_move_iterator(words.end()));
            }
            break;
    }
    return Lexicon(mode, global, per_image, policy);
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    return unit_distance(utf8::decode(a), utf8::decode(b));
}

double weighted_edit_distance(std::string_view pred, const CharProbMatrix& probs, std::string_view candidate) {
    const std::u32string p = utf8::decode(pred);
    if (p.size() != probs.row_count()) {
        throw LexiconError("probability matrix has " + std::to_string(probs.row_count()) + " rows for a " +
                           std::to_string(p.size()) + "-character prediction");
    }
    return weighted_distance(p, probs, utf8::decode(candidate));
}

std::optional<LexiconMatch> best_match(std::string_view pred, const std::optional<CharProbMatrix>& probs,
                                       const Lexicon& lex, const std::string& image_id, double reject_threshold) {
    if (lex.mode() == LexiconMode::kNone) throw LexiconError("best_match needs a lexicon");
    const Lexicon::WordList& list = lex.words_for(image_id);
    const std::u32string p = utf8::decode(pred);
    if (probs && probs->row_count() != p.size()) {
        throw LexiconError("probability matrix has " + std::to_string(probs->row_count()) + " rows for a " +
                           std::to_string(p.size()) + "-character prediction");
    }

    const bool bucketed = lex.mode() == LexiconMode::kGeneric;
    std::optional<std::size_t> best;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < list.code_points.size(); ++k) {
        const std::u32string& word = list.code_points[k];
        if (bucketed) {
            const auto diff = word.size() > p.size() ? word.size() - p.size() : p.size() - word.size();
            if (diff > 4) continue;
        }
        const double cost = probs ? weighted_distance(p, *probs, word) : static_cast<double>(unit_distance(p, word));
        if (cost < best_cost) {
            best_cost = cost;
            best = k;
        }
    }
    if (!best) return std::nullopt;

    if (lex.mode() != LexiconMode::kStrong) {
        const double denom = static_cast<double>(std::max(p.size(), list.code_points[*best].size()));
        const double normalized = denom > 0.0 ? best_cost / denom : 0.0;
        if (normalized > reject_threshold) return std::nullopt;
    }
    return LexiconMatch{list.words[*best], best_cost};
}

NormalizedPrediction normalize_prediction(std::string_view pred, const std::optional<CharProbMatrix>& probs,
                                          const NormalizationPolicy& policy) {
    if (!probs) return {normalize_transcription(pred, policy), std::nullopt};

    std::u32string cps = utf8::decode(pred);
    if (probs->row_count() != cps.size()) {
        throw LexiconError("probability matrix has " + std::to_string(probs->row_count()) + " rows for a " +
                           std::to_string(cps.size()) + "-character prediction");
    }
    std::size_t first = 0;
    std::size_t last = cps.size();
    if (policy.strip_edge_punctuation) {
        while (first < last && !is_ascii_alnum(cps[first])) ++first;
        while (last > first && !is_ascii_alnum(cps[last - 1])) --last;
    }
    std::vector<std::vector<double>> rows(probs->rows().begin() + static_cast<std::ptrdiff_t>(first),
                                          probs->rows().begin() + static_cast<std::ptrdiff_t>(last));
    std::u32string text = cps.substr(first, last - first);
    std::u32string alphabet = probs->alphabet();

    if (policy.case_fold) {
        for (char32_t& c : text) c = fold(c);
        std::u32string folded;
        std::vector<std::size_t> target(alphabet.size());
        for (std::size_t k = 0; k < alphabet.size(); ++k) {
            const char32_t f = fold(alphabet[k]);
            auto pos = folded.find(f);
            if (pos == std::u32string::npos) {
                pos = folded.size();
                folded.push_back(f);
            }
            target[k] = pos;
        }
        for (auto& row : rows) {
            std::vector<double> merged(folded.size(), 0.0);
            for (std::size_t k = 0; k < row.size(); ++k) merged[target[k]] += row[k];
            // Merging can push a sum of ones a hair above 1.
            for (double& v : merged) v = std::min(v, 1.0);
            row = std::move(merged);
        }
        alphabet = std::move(folded);
    }
    return {utf8::encode(text), CharProbMatrix(std::move(alphabet), std::move(rows))};
}

}  // namespace textspot
