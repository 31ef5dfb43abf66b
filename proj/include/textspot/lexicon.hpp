#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "textspot/normalize.hpp"
#include "textspot/prediction.hpp"

namespace textspot {

/// Vocabulary regimes: strong = per-image word list, weak = every word of the
/// evaluation set, generic = a large general-purpose list.
enum class LexiconMode { kNone, kStrong, kWeak, kGeneric };

std::string_view to_string(LexiconMode m) noexcept;
/// Accepts "none", "strong", "weak", "generic". Throws LexiconError otherwise.
LexiconMode parse_lexicon_mode(std::string_view name);

/// Immutable after construction. Words are normalized with the given policy,
/// empty results dropped and duplicates removed keeping first occurrence, so
/// list order is the tie-break order.
class Lexicon {
public:
    Lexicon() = default;
    Lexicon(LexiconMode mode, const std::vector<std::string>& global_words,
            const std::map<std::string, std::vector<std::string>>& per_image_words,
            const NormalizationPolicy& policy = {});

    LexiconMode mode() const noexcept { return mode_; }
    const NormalizationPolicy& policy() const noexcept { return policy_; }
    const std::vector<std::string>& global_words() const noexcept { return global_.words; }
    std::map<std::string, std::vector<std::string>> per_image_words() const;
    bool has_image(const std::string& image_id) const { return per_image_.contains(image_id); }

    struct WordList {
        std::vector<std::string> words;
        std::vector<std::u32string> code_points;
    };

    /// The list consulted for `image_id`: per-image in strong mode, global
    /// otherwise. Throws LexiconError for an unknown image in strong mode.
    const WordList& words_for(const std::string& image_id) const;

private:
    LexiconMode mode_ = LexiconMode::kNone;
    NormalizationPolicy policy_;
    WordList global_;
    std::map<std::string, WordList> per_image_;
};

struct LexiconSources {
    std::vector<std::filesystem::path> word_files;
    /// Directory of `<image_id>.txt` files, or a JSON file {"image_id": [words]}.
    std::optional<std::filesystem::path> per_image;
};

/// One word per line; CRLF and surrounding whitespace tolerated, blank lines skipped.
std::vector<std::string> read_word_list(std::string_view text);

std::map<std::string, std::vector<std::string>> parse_per_image_lexicon_json(std::string_view document);

/// Strong mode needs `per_image`; weak and generic need at least one word file.
/// In strong mode every id in `required_images` must have a vocabulary,
/// otherwise LexiconError names the first missing image.
Lexicon load_lexicon(LexiconMode mode, const LexiconSources& sources, const NormalizationPolicy& policy = {},
                     std::span<const std::string> required_images = {});

/// Levenshtein distance over code points.
std::size_t edit_distance(std::string_view a, std::string_view b);

/// Edit distance whose costs follow the recognizer's confidence:
///   substitute pred[i] -> c : 0 if equal, else 1 - P_i(c)
///   delete pred[i]          : P_i(pred[i])
///   insert c                : 1
/// Characters outside the matrix alphabet have probability 0. Throws
/// LexiconError when the matrix row count differs from the length of `pred`.
double weighted_edit_distance(std::string_view pred, const CharProbMatrix& probs, std::string_view candidate);

struct LexiconMatch {
    std::string word;
    double cost = 0.0;
};

/// Argmin over the applicable word list, ties to the earlier word. Uses the
/// weighted distance when `probs` is given. In weak and generic modes the
/// match is rejected when cost / max(len(pred), len(word)) exceeds
/// `reject_threshold`; strong mode always substitutes. Generic mode skips words
/// whose length differs from the prediction by more than 4.
/// Throws LexiconError for mode none or an unknown image in strong mode.
std::optional<LexiconMatch> best_match(std::string_view pred, const std::optional<CharProbMatrix>& probs,
                                       const Lexicon& lex, const std::string& image_id, double reject_threshold);

struct NormalizedPrediction {
    std::string text;
    std::optional<CharProbMatrix> probs;
};

/// Applies the normalization policy to a prediction and keeps its probability
/// matrix aligned: stripped characters drop their rows, and case folding
/// merges the columns of letters that fold together.
NormalizedPrediction normalize_prediction(std::string_view pred, const std::optional<CharProbMatrix>& probs,
                                          const NormalizationPolicy& policy);

}  // namespace textspot
